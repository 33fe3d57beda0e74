//! The two multiplication tables and the basis change between them.
//!
//! Phenotype basis `(O, A, B, AB)`, with `α = 1 − λ`:
//!
//! ```text
//! O∘O  = O
//! O∘A  = αO + (1−α)A                    O∘B  = αO + (1−α)B
//! O∘AB = βA + (1−β)B
//! A∘A  = α²O + (1−α²)A                  B∘B  = α²O + (1−α²)B
//! A∘B  = α²O + α(1−α)A + α(1−α)B + (1−α)²AB
//! A∘AB = βA + α(1−β)B + (1−α)(1−β)AB
//! B∘AB = αβA + (1−β)B + (1−α)βAB
//! AB∘AB = β²A + (1−β)²B + 2β(1−β)AB
//! ```
//!
//! Every right-hand side is a probability distribution over offspring
//! phenotypes, so each row of the tensor is nonnegative and sums to 1.
//!
//! Transformed basis `(o, a, b, ab)` defined by `o = O`,
//! `a = (O−A)/λ²`, `b = (O−B)/λ²`, `ab = ((1−λ)O − βA − (1−β)B + λAB)/λ³`:
//!
//! ```text
//! o∘o = o     o∘a = λa     o∘b = λb
//! a∘a = a     b∘b = b
//! a∘b = (λ−β)/λ · a + (λ+β−1)/λ · b + ab
//! ab∘x = 0 for every x
//! ```
//!
//! The transformed table is built from these formulas directly; that it
//! agrees with the conjugated phenotype table is a theorem the test suite
//! checks, not a definition.

use thiserror::Error;

use crate::params::Params;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("basis mismatch: {expected:?} expected, {got:?} supplied")]
    BasisMismatch { expected: Basis, got: Basis },
}

/// Which ordered basis coordinates refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `(O, A, B, AB)`
    Phenotype,
    /// `(o, a, b, ab)`
    Transformed,
}

/// A vector of the 4-dimensional algebra, tagged with its basis.
/// Elements in different bases never combine without an explicit
/// [`to_transformed`] / [`from_transformed`] conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    coords: [f64; 4],
    basis: Basis,
}

impl Element {
    pub fn new(coords: [f64; 4], basis: Basis) -> Self {
        Element { coords, basis }
    }

    pub fn phenotype(coords: [f64; 4]) -> Self {
        Element::new(coords, Basis::Phenotype)
    }

    pub fn transformed(coords: [f64; 4]) -> Self {
        Element::new(coords, Basis::Transformed)
    }

    /// The `idx`-th basis vector (0-based) of the given basis.
    pub fn basis_vector(basis: Basis, idx: usize) -> Self {
        let mut coords = [0.0; 4];
        coords[idx] = 1.0;
        Element::new(coords, basis)
    }

    pub fn coords(&self) -> &[f64; 4] {
        &self.coords
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn inf_norm(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Element::new(self.coords.map(|x| c * x), self.basis)
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        if self.basis != other.basis {
            return Err(AlgebraError::BasisMismatch {
                expected: self.basis,
                got: other.basis,
            });
        }
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(&other.coords) {
            *c += o;
        }
        Ok(Element::new(coords, self.basis))
    }
}

/// Structure constants `c[i][j][k]`: coefficient of basis vector `k` in
/// `e_i ∘ e_j`. Symmetric in `(i, j)` — the algebra is commutative.
#[derive(Debug, Clone)]
pub struct StructureTensor {
    c: [[[f64; 4]; 4]; 4],
    basis: Basis,
    params: Params,
}

impl StructureTensor {
    pub fn constants(&self) -> &[[[f64; 4]; 4]; 4] {
        &self.c
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// `e_i ∘ e_j` as an element.
    pub fn product(&self, i: usize, j: usize) -> Element {
        Element::new(self.c[i][j], self.basis)
    }

    /// Matrix of left multiplication by `x`: column-action, so
    /// `left_mul(x) · v = x ∘ v` on coordinate vectors.
    pub fn left_mul(&self, x: &[f64; 4]) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for j in 0..4 {
                for k in 0..4 {
                    m[k][j] += xi * self.c[i][j][k];
                }
            }
        }
        m
    }
}

fn symmetric_set(c: &mut [[[f64; 4]; 4]; 4], i: usize, j: usize, row: [f64; 4]) {
    c[i][j] = row;
    c[j][i] = row;
}

/// Phenotype-basis table of `B(α,β)` with `α = 1 − λ`.
pub fn phenotype_table(p: &Params) -> StructureTensor {
    let al = p.alpha();
    let be = p.beta();
    let nal = 1.0 - al;
    let nbe = 1.0 - be;
    let mut c = [[[0.0; 4]; 4]; 4];
    symmetric_set(&mut c, 0, 0, [1.0, 0.0, 0.0, 0.0]);
    symmetric_set(&mut c, 0, 1, [al, nal, 0.0, 0.0]);
    symmetric_set(&mut c, 0, 2, [al, 0.0, nal, 0.0]);
    symmetric_set(&mut c, 0, 3, [0.0, be, nbe, 0.0]);
    symmetric_set(&mut c, 1, 1, [al * al, 1.0 - al * al, 0.0, 0.0]);
    symmetric_set(&mut c, 1, 2, [al * al, al * nal, al * nal, nal * nal]);
    symmetric_set(&mut c, 1, 3, [0.0, be, al * nbe, nal * nbe]);
    symmetric_set(&mut c, 2, 2, [al * al, 0.0, 1.0 - al * al, 0.0]);
    symmetric_set(&mut c, 2, 3, [0.0, al * be, nbe, nal * be]);
    symmetric_set(&mut c, 3, 3, [0.0, be * be, nbe * nbe, 2.0 * be * nbe]);
    StructureTensor {
        c,
        basis: Basis::Phenotype,
        params: p.clone(),
    }
}

/// Transformed-basis table of `B'(λ,β)`.
pub fn transformed_table(p: &Params) -> StructureTensor {
    let la = p.lambda();
    let be = p.beta();
    let mu = (la - be) / la;
    let nu = (la + be - 1.0) / la;
    let mut c = [[[0.0; 4]; 4]; 4];
    symmetric_set(&mut c, 0, 0, [1.0, 0.0, 0.0, 0.0]);
    symmetric_set(&mut c, 0, 1, [0.0, la, 0.0, 0.0]);
    symmetric_set(&mut c, 0, 2, [0.0, 0.0, la, 0.0]);
    symmetric_set(&mut c, 1, 1, [0.0, 1.0, 0.0, 0.0]);
    symmetric_set(&mut c, 2, 2, [0.0, 0.0, 1.0, 0.0]);
    symmetric_set(&mut c, 1, 2, [0.0, mu, nu, 1.0]);
    // every product with ab is zero
    StructureTensor {
        c,
        basis: Basis::Transformed,
        params: p.clone(),
    }
}

/// Bilinear product `z_k = Σ_{i,j} x_i y_j c[i][j][k]`.
pub fn multiply(t: &StructureTensor, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    if x.basis() != t.basis {
        return Err(AlgebraError::BasisMismatch {
            expected: t.basis,
            got: x.basis(),
        });
    }
    if y.basis() != t.basis {
        return Err(AlgebraError::BasisMismatch {
            expected: t.basis,
            got: y.basis(),
        });
    }
    Ok(Element::new(
        multiply_coords(t, x.coords(), y.coords()),
        t.basis,
    ))
}

/// Coordinate-level product, used where the basis tags are already known.
pub fn multiply_coords(t: &StructureTensor, x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..4 {
            let f = x[i] * y[j];
            if f == 0.0 {
                continue;
            }
            for k in 0..4 {
                out[k] += f * t.c[i][j][k];
            }
        }
    }
    out
}

/// Matrix taking transformed coordinates to phenotype coordinates: columns
/// are `o, a, b, ab` written in `(O, A, B, AB)`.
pub fn transformed_to_phenotype_matrix(p: &Params) -> [[f64; 4]; 4] {
    let la = p.lambda();
    let be = p.beta();
    let l2 = la * la;
    let l3 = l2 * la;
    [
        [1.0, 1.0 / l2, 1.0 / l2, (1.0 - la) / l3],
        [0.0, -1.0 / l2, 0.0, -be / l3],
        [0.0, 0.0, -1.0 / l2, -(1.0 - be) / l3],
        [0.0, 0.0, 0.0, 1.0 / l2],
    ]
}

/// Inverse of [`transformed_to_phenotype_matrix`], in closed form:
/// `O = o`, `A = o − λ²a`, `B = o − λ²b`,
/// `AB = o − βλa − (1−β)λb + λ²ab`.
pub fn phenotype_to_transformed_matrix(p: &Params) -> [[f64; 4]; 4] {
    let la = p.lambda();
    let be = p.beta();
    let l2 = la * la;
    [
        [1.0, 1.0, 1.0, 1.0],
        [0.0, -l2, 0.0, -be * la],
        [0.0, 0.0, -l2, -(1.0 - be) * la],
        [0.0, 0.0, 0.0, l2],
    ]
}

pub fn mat_vec(m: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn mat_mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Phenotype coordinates -> transformed coordinates.
pub fn to_transformed(p: &Params, x: &Element) -> Result<Element, AlgebraError> {
    if x.basis() != Basis::Phenotype {
        return Err(AlgebraError::BasisMismatch {
            expected: Basis::Phenotype,
            got: x.basis(),
        });
    }
    let m = phenotype_to_transformed_matrix(p);
    Ok(Element::transformed(mat_vec(&m, x.coords())))
}

/// Transformed coordinates -> phenotype coordinates.
pub fn from_transformed(p: &Params, x: &Element) -> Result<Element, AlgebraError> {
    if x.basis() != Basis::Transformed {
        return Err(AlgebraError::BasisMismatch {
            expected: Basis::Transformed,
            got: x.basis(),
        });
    }
    let m = transformed_to_phenotype_matrix(p);
    Ok(Element::phenotype(mat_vec(&m, x.coords())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::params::Mode;
    use proptest::prelude::*;

    fn bta() -> Params {
        Params::from_alpha(0.25, 0.5, 1e-9, Mode::Float64).unwrap()
    }

    fn assert_close(got: &[f64; 4], want: &[f64; 4], tol: f64) {
        for (g, w) in got.iter().zip(want) {
            assert!(
                (g - w).abs() <= tol,
                "got {got:?}, want {want:?} (tol {tol})"
            );
        }
    }

    #[test]
    fn phenotype_products_at_bta() {
        let t = phenotype_table(&bta());
        // A∘A = 1/16 O + 15/16 A
        assert_close(&t.c[1][1], &[1.0 / 16.0, 15.0 / 16.0, 0.0, 0.0], 1e-15);
        // O∘O = O for any alpha
        assert_close(&t.c[0][0], &[1.0, 0.0, 0.0, 0.0], 0.0);
        // A∘B = 1/16 O + 3/16 A + 3/16 B + 9/16 AB
        assert_close(
            &t.c[1][2],
            &[1.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 9.0 / 16.0],
            1e-15,
        );
        // O∘AB = 1/2 A + 1/2 B at beta = 1/2
        let o = Element::basis_vector(Basis::Phenotype, 0);
        let ab = Element::basis_vector(Basis::Phenotype, 3);
        let prod = multiply(&t, &o, &ab).unwrap();
        assert_close(prod.coords(), &[0.0, 0.5, 0.5, 0.0], 0.0);
    }

    #[test]
    fn phenotype_rows_are_distributions() {
        for &(l, b) in &[(0.75, 0.5), (0.31, 0.87), (0.5, 0.5), (0.07, 0.93)] {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let t = phenotype_table(&p);
            for i in 0..4 {
                for j in 0..4 {
                    let sum: f64 = t.c[i][j].iter().sum();
                    assert!((sum - 1.0).abs() < 1e-14, "row ({i},{j}) sums to {sum}");
                    assert!(t.c[i][j].iter().all(|&x| x >= 0.0));
                }
            }
        }
    }

    #[test]
    fn transformed_products() {
        // lambda = 3/4, beta = 1/2: a∘b = (1/3)a + (1/3)b + ab
        let p = Params::new(0.75, 0.5, 1e-9, Mode::Float64).unwrap();
        let t = transformed_table(&p);
        assert_close(&t.c[1][2], &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0], 1e-15);

        for &(l, b) in &[(0.75, 0.5), (0.2, 0.9), (0.5, 0.5)] {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let t = transformed_table(&p);
            // o∘a = λa, a∘a = a, ab annihilates everything
            assert_close(&t.c[0][1], &[0.0, l, 0.0, 0.0], 0.0);
            assert_close(&t.c[1][1], &[0.0, 1.0, 0.0, 0.0], 0.0);
            for j in 0..4 {
                assert_close(&t.c[3][j], &[0.0; 4], 0.0);
            }
            let ab = Element::basis_vector(Basis::Transformed, 3);
            let sq = multiply(&t, &ab, &ab).unwrap();
            assert_eq!(sq.coords(), &[0.0; 4]);
        }
    }

    #[test]
    fn basis_mismatch_is_an_error() {
        let p = bta();
        let t = phenotype_table(&p);
        let x = Element::basis_vector(Basis::Transformed, 0);
        let y = Element::basis_vector(Basis::Phenotype, 0);
        assert!(matches!(
            multiply(&t, &x, &y),
            Err(AlgebraError::BasisMismatch { .. })
        ));
        assert!(to_transformed(&p, &x).is_err());
        assert!(from_transformed(&p, &y).is_err());
    }

    #[test]
    fn basis_change_examples() {
        let p = bta(); // lambda = 3/4
        // o = O
        let o = Element::phenotype([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            to_transformed(&p, &o).unwrap().coords(),
            &[1.0, 0.0, 0.0, 0.0]
        );
        // O − A = λ² a = (9/16) a
        let oma = Element::phenotype([1.0, -1.0, 0.0, 0.0]);
        assert_close(
            to_transformed(&p, &oma).unwrap().coords(),
            &[0.0, 9.0 / 16.0, 0.0, 0.0],
            1e-15,
        );
    }

    #[test]
    fn closed_form_inverse_matches_numeric_inversion() {
        // Oracle: invert transformed_to_phenotype_matrix by Gauss-Jordan and
        // compare against the closed-form inverse.
        for &(l, b) in &[(0.75, 0.5), (0.3, 0.8), (0.55, 0.21)] {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let m = transformed_to_phenotype_matrix(&p);
            let minv = phenotype_to_transformed_matrix(&p);
            let mut inv_numeric = [[0.0; 4]; 4];
            for col in 0..4 {
                let mut a: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
                let mut rhs = vec![0.0; 4];
                rhs[col] = 1.0;
                let x = crate::solve::solve_dense(&mut a, &mut rhs).unwrap();
                for row in 0..4 {
                    inv_numeric[row][col] = x[row];
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (inv_numeric[i][j] - minv[i][j]).abs() < 1e-10,
                        "entry ({i},{j}) at ({l},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn non_associativity_witness() {
        // (O∘A)∘A != O∘(A∘A) in the Mendelian algebra.
        let t = phenotype_table(&bta());
        let o = Element::basis_vector(Basis::Phenotype, 0);
        let a = Element::basis_vector(Basis::Phenotype, 1);
        let left = multiply(&t, &multiply(&t, &o, &a).unwrap(), &a).unwrap();
        let right = multiply(&t, &o, &multiply(&t, &a, &a).unwrap()).unwrap();
        let diff: f64 = left
            .coords()
            .iter()
            .zip(right.coords())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff > 1e-3, "expected a visible associativity defect");
    }

    #[test]
    fn float_tables_match_exact_tables_at_dyadic_params() {
        let p = Params::new(0.75, 0.5, 1e-9, Mode::Float64).unwrap();
        let tf = phenotype_table(&p);
        let te = exact::phenotype_table(&exact::rat(1, 4), &exact::rat(1, 2));
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(tf.c[i][j][k], exact::to_f64(&te.c[i][j][k]));
                }
            }
        }
        let tf = transformed_table(&p);
        let te = exact::transformed_table(&exact::rat(3, 4), &exact::rat(1, 2));
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!((tf.c[i][j][k] - exact::to_f64(&te.c[i][j][k])).abs() < 1e-16);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn multiply_commutes(
            l in 0.05f64..0.95,
            b in 0.05f64..0.95,
            x in proptest::array::uniform4(-2.0f64..2.0),
            y in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            for t in [phenotype_table(&p), transformed_table(&p)] {
                let xy = multiply_coords(&t, &x, &y);
                let yx = multiply_coords(&t, &y, &x);
                for k in 0..4 {
                    prop_assert!((xy[k] - yx[k]).abs() <= 1e-12);
                }
            }
        }

        // The basis change is an algebra homomorphism: transporting x, y to
        // the transformed basis and multiplying there agrees with
        // multiplying in the phenotype basis and transporting the product.
        #[test]
        fn basis_change_is_homomorphism(
            l in 0.05f64..0.95,
            b in 0.05f64..0.95,
            x in proptest::array::uniform4(-2.0f64..2.0),
            y in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let tp = phenotype_table(&p);
            let tt = transformed_table(&p);
            let xe = Element::phenotype(x);
            let ye = Element::phenotype(y);
            let lhs = to_transformed(&p, &multiply(&tp, &xe, &ye).unwrap()).unwrap();
            let rhs = multiply(
                &tt,
                &to_transformed(&p, &xe).unwrap(),
                &to_transformed(&p, &ye).unwrap(),
            )
            .unwrap();
            for k in 0..4 {
                prop_assert!((lhs.coords()[k] - rhs.coords()[k]).abs() <= 1e-9);
            }
        }

        #[test]
        fn round_trip_is_identity(
            l in 0.05f64..0.95,
            b in 0.05f64..0.95,
            x in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let e = Element::phenotype(x);
            let back = from_transformed(&p, &to_transformed(&p, &e).unwrap()).unwrap();
            for k in 0..4 {
                prop_assert!((back.coords()[k] - x[k]).abs() <= 1e-12);
            }
        }
    }
}
