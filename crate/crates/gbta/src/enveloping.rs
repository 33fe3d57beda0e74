//! The associative algebra generated by left multiplications.
//!
//! Left multiplication by the basis of `B'(λ,β)` gives four 4x4 matrices
//! (column action: `l_x · v = x ∘ v`):
//!
//! ```text
//! l_o = E11 + λE22 + λE33          l_ab = 0
//! l_a = λE21 + E22 + (λ−β)/λ E23 + (λ+β−1)/λ E33 + E43
//! l_b = (λ−β)/λ E22 + λE31 + (λ+β−1)/λ E32 + E33 + E42
//! ```
//!
//! The associative subalgebra of `End(R⁴)` generated by `{l_o, l_a, l_b}`
//! is always one of four fixed sparsity patterns:
//!
//! ```text
//!      M0 (dim 8)   M1 (dim 9)   M2 (dim 9)   M3 (dim 10)
//!      * 0 0 0      * 0 0 0      * 0 0 0      * 0 0 0
//!      * * 0 0      * * * 0      * * 0 0      * * * 0
//!      * 0 * 0      * 0 * 0      * * * 0      * * * 0
//!      * * * 0      * * * 0      * * * 0      * * * 0
//! ```
//!
//! `M0` at `λ = β = 1/2`, `M1` on `λ = 1−β`, `M2` on `λ = β`, `M3`
//! generically.

use thiserror::Error;

use crate::algebra::{self, Basis, Element};
use crate::json::fmt_f64;
use crate::linalg::{self, Subspace};
use crate::params::Params;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopingError {
    #[error("matrix span kept growing past the ambient dimension; closure is broken")]
    NoConvergence,
    #[error("need at least one generator")]
    NoGenerators,
}

pub type Mat4 = [[f64; 4]; 4];

/// The four left-multiplication matrices.
#[derive(Debug, Clone)]
pub struct LeftMulSet {
    pub l_o: Mat4,
    pub l_a: Mat4,
    pub l_b: Mat4,
    pub l_ab: Mat4,
}

/// Builds the displayed matrices and cross-checks each column against the
/// structure tensor (`l_x · e_j = x ∘ e_j`).
pub fn left_mul_matrices(p: &Params) -> LeftMulSet {
    let la = p.lambda();
    let mu = (la - p.beta()) / la;
    let nu = (la + p.beta() - 1.0) / la;

    let mut l_o = [[0.0; 4]; 4];
    l_o[0][0] = 1.0;
    l_o[1][1] = la;
    l_o[2][2] = la;

    let mut l_a = [[0.0; 4]; 4];
    l_a[1][0] = la;
    l_a[1][1] = 1.0;
    l_a[1][2] = mu;
    l_a[2][2] = nu;
    l_a[3][2] = 1.0;

    let mut l_b = [[0.0; 4]; 4];
    l_b[1][1] = mu;
    l_b[2][0] = la;
    l_b[2][1] = nu;
    l_b[2][2] = 1.0;
    l_b[3][1] = 1.0;

    let l_ab = [[0.0; 4]; 4];

    let set = LeftMulSet { l_o, l_a, l_b, l_ab };
    let t = algebra::transformed_table(p);
    for (i, m) in set.matrices().into_iter().enumerate() {
        let x = Element::basis_vector(Basis::Transformed, i);
        for j in 0..4 {
            let e = Element::basis_vector(Basis::Transformed, j);
            let want = algebra::multiply(&t, &x, &e).expect("transformed basis");
            let got = algebra::mat_vec(m, e.coords());
            for k in 0..4 {
                assert!(
                    (got[k] - want.coords()[k]).abs() <= 1e-12,
                    "left-multiplication matrix {i} disagrees with the table at column {j}"
                );
            }
        }
    }
    set
}

impl LeftMulSet {
    pub fn matrices(&self) -> [&Mat4; 4] {
        [&self.l_o, &self.l_a, &self.l_b, &self.l_ab]
    }

    /// The generating set `{l_o, l_a, l_b}` (the zero matrix generates
    /// nothing).
    pub fn generators(&self) -> [Mat4; 3] {
        [self.l_o, self.l_a, self.l_b]
    }
}

/// Sparsity patterns that can occur as the enveloping algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    M0,
    M1,
    M2,
    M3,
    Unrecognized,
}

impl Pattern {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pattern::M0 => "M0",
            Pattern::M1 => "M1",
            Pattern::M2 => "M2",
            Pattern::M3 => "M3",
            Pattern::Unrecognized => "Unrecognized",
        }
    }

    /// Star positions (row, col), 0-based.
    pub fn stars(&self) -> Option<Vec<(usize, usize)>> {
        let base = vec![
            (0, 0),
            (1, 0),
            (1, 1),
            (2, 0),
            (2, 2),
            (3, 0),
            (3, 1),
            (3, 2),
        ];
        let mut stars = base;
        match self {
            Pattern::M0 => {}
            Pattern::M1 => stars.push((1, 2)),
            Pattern::M2 => stars.push((2, 1)),
            Pattern::M3 => {
                stars.push((1, 2));
                stars.push((2, 1));
            }
            Pattern::Unrecognized => return None,
        }
        Some(stars)
    }

    pub fn dimension(&self) -> Option<usize> {
        self.stars().map(|s| s.len())
    }
}

pub fn flatten(m: &Mat4) -> Vec<f64> {
    let mut v = Vec::with_capacity(16);
    for row in m {
        v.extend_from_slice(row);
    }
    v
}

fn unflatten(v: &[f64]) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = v[4 * i + j];
        }
    }
    m
}

/// Smallest subspace of R^16 containing the generators and closed under the
/// matrix product. Each round multiplies all current basis pairs, so the
/// result is saturated as an associative algebra.
pub fn generate_subalgebra(gens: &[Mat4], tol: f64) -> Result<Subspace, EnvelopingError> {
    if gens.is_empty() {
        return Err(EnvelopingError::NoGenerators);
    }
    let rows: Vec<Vec<f64>> = gens.iter().map(flatten).collect();
    let mut space = linalg::span(&rows, tol).expect("16-dim span");
    for _round in 0..16 {
        let mats: Vec<Mat4> = space.basis_rows().iter().map(|r| unflatten(r)).collect();
        let mut products: Vec<Vec<f64>> = Vec::with_capacity(mats.len() * mats.len());
        for x in &mats {
            for y in &mats {
                products.push(flatten(&algebra::mat_mul(x, y)));
            }
        }
        let extended = linalg::extend(&space, &products, tol).expect("16-dim span");
        if extended.dim() == space.dim() {
            return Ok(space);
        }
        space = extended;
    }
    Err(EnvelopingError::NoConvergence)
}

/// Matches a subspace of R^16 against the star patterns by subspace
/// equality (echelon bases may mix coordinates, so entrywise zero tests on
/// the basis would not be reliable).
pub fn match_pattern(space: &Subspace) -> Pattern {
    for pattern in [Pattern::M0, Pattern::M1, Pattern::M2, Pattern::M3] {
        let stars = pattern.stars().unwrap();
        if stars.len() != space.dim() {
            continue;
        }
        let rows: Vec<Vec<f64>> = stars
            .iter()
            .map(|&(i, j)| {
                let mut v = vec![0.0; 16];
                v[4 * i + j] = 1.0;
                v
            })
            .collect();
        let candidate = linalg::span(&rows, space.tol()).unwrap();
        if space.equal(&candidate).unwrap() {
            return pattern;
        }
    }
    Pattern::Unrecognized
}

/// Dimension and pattern of the enveloping algebra at `(λ,β)`.
#[derive(Debug, Clone)]
pub struct EnvelopingReport {
    pub dimension: usize,
    pub pattern: Pattern,
    pub basis16: Subspace,
    pub generators_verified: bool,
}

impl EnvelopingReport {
    pub fn to_json(&self, p: &Params) -> String {
        format!(
            "{{\"lambda\": {}, \"beta\": {}, \"dimension\": {}, \"pattern\": \"{}\", \"generators_verified\": {}}}",
            fmt_f64(p.lambda()),
            fmt_f64(p.beta()),
            self.dimension,
            self.pattern.as_str(),
            self.generators_verified,
        )
    }
}

/// Generates the algebra from `{l_o, l_a, l_b}` and classifies it.
pub fn enveloping_report(p: &Params) -> Result<EnvelopingReport, EnvelopingError> {
    let set = left_mul_matrices(p);
    let basis16 = generate_subalgebra(&set.generators(), p.tol())?;
    let pattern = match_pattern(&basis16);
    let generators_verified = set
        .generators()
        .iter()
        .all(|g| basis16.contains(&flatten(g)).unwrap());
    Ok(EnvelopingReport {
        dimension: basis16.dim(),
        pattern,
        basis16,
        generators_verified,
    })
}
