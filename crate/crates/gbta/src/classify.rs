//! Absolute nilpotents, idempotents, and solvable elements of `B'(λ,β)`.
//!
//! Writing an element as `u0·o + u1·a + u2·b + u3·ab`, squaring gives the
//! polynomial system (with `μ = (λ−β)/λ`, `ν = (λ+β−1)/λ`):
//!
//! ```text
//! (u∘u)_o  = u0²
//! (u∘u)_a  = u1² + 2λ u0 u1 + 2μ u1 u2
//! (u∘u)_b  = u2² + 2λ u0 u2 + 2ν u1 u2
//! (u∘u)_ab = 2 u1 u2
//! ```
//!
//! - `u∘u = 0` forces `u0 = u1 = u2 = 0`: the absolute nilpotents are
//!   exactly the line `⟨ab⟩`.
//! - `u∘u = u` has the five universal solutions `o, a, b, o+(1−2λ)a,
//!   o+(1−2λ)b` plus, off the curve `P`, two interior solutions `j0, j1`
//!   whose shared denominator `−3λ²+4β²+4λ−4β` is precisely the `P`
//!   residual.
//! - plenary squaring `m ↦ m∘m` reaches 0 in finitely many steps only on
//!   `P` (index ≥ 3), or trivially from `⟨ab⟩` (index 2).
//!
//! Each closed form is paired with a numeric root search that knows nothing
//! about the formulas, so the two can disagree loudly in tests if either is
//! wrong.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{self, Element, StructureTensor};
use crate::json::{fmt_f64, fmt_rows};
use crate::linalg::{self, Subspace};
use crate::params::Params;
use crate::solve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("interior-idempotent denominator {denom} within tolerance of zero while off the curve P; tolerance state is inconsistent")]
    DenominatorVanishes { denom: f64 },
    #[error("solvability index {0} out of range (must be >= 2)")]
    BadIndex(u32),
    #[error("computed idempotent {element:?} fails e∘e = e with residual {residual}")]
    VerificationFailed { element: [f64; 4], residual: f64 },
}

/// The idempotent census at one parameter point, transformed basis.
#[derive(Debug, Clone)]
pub struct IdempotentSet {
    /// `[o, a, b, o+(1−2λ)a, o+(1−2λ)b]` and, off `P`, also `[j0, j1]`.
    pub items: Vec<Element>,
    /// True exactly when `(λ,β) ∈ P` (5 items instead of 7).
    pub degenerate: bool,
}

impl IdempotentSet {
    /// `{"lambda": …, "beta": …, "in_P": …, "idempotents": […], "verified": true}`
    pub fn to_json(&self, p: &Params) -> String {
        let rows: Vec<Vec<f64>> = self.items.iter().map(|e| e.coords().to_vec()).collect();
        format!(
            "{{\"lambda\": {}, \"beta\": {}, \"in_P\": {}, \"idempotents\": {}, \"verified\": true}}",
            fmt_f64(p.lambda()),
            fmt_f64(p.beta()),
            self.degenerate,
            fmt_rows(&rows),
        )
    }
}

/// The set of elements with `x∘x = 0`: always the line spanned by `ab`.
pub fn absolute_nilpotents(p: &Params) -> Subspace {
    linalg::span(&[vec![0.0, 0.0, 0.0, 1.0]], p.tol()).expect("fixed 4-dim span")
}

/// All idempotents of `B'(λ,β)`, each re-verified by an independent
/// `e∘e = e` product before being returned.
///
/// Off `P` there are seven; on `P` the interior pair `j0, j1` degenerates
/// away and five remain. The listed elements coincide pairwise only on the
/// measure-zero line `λ = 1/2` (where `1−2λ = 0`).
pub fn idempotents(p: &Params) -> Result<IdempotentSet, ClassifyError> {
    let la = p.lambda();
    let be = p.beta();
    let pm = p.p_membership();

    let mut items = vec![
        Element::transformed([1.0, 0.0, 0.0, 0.0]),
        Element::transformed([0.0, 1.0, 0.0, 0.0]),
        Element::transformed([0.0, 0.0, 1.0, 0.0]),
        Element::transformed([1.0, 1.0 - 2.0 * la, 0.0, 0.0]),
        Element::transformed([1.0, 0.0, 1.0 - 2.0 * la, 0.0]),
    ];

    if !pm.in_p {
        let denom = -3.0 * la * la + 4.0 * be * be + 4.0 * la - 4.0 * be;
        if denom.abs() <= p.tol() {
            return Err(ClassifyError::DenominatorVanishes { denom });
        }
        for o_coeff in [0.0, 1.0] {
            let factor = la * (1.0 - 2.0 * o_coeff * la) / denom;
            let x = factor * (2.0 * be - la);
            let y = factor * (2.0 - 2.0 * be - la);
            let z = 2.0 * factor * factor * (2.0 * be - la) * (2.0 - 2.0 * be - la);
            items.push(Element::transformed([o_coeff, x, y, z]));
        }
    }

    let t = algebra::transformed_table(p);
    for e in &items {
        let sq = algebra::multiply(&t, e, e).expect("transformed basis");
        let residual = sq
            .coords()
            .iter()
            .zip(e.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual > p.tol() {
            return Err(ClassifyError::VerificationFailed {
                element: *e.coords(),
                residual,
            });
        }
    }

    Ok(IdempotentSet {
        items,
        degenerate: pm.in_p,
    })
}

/// The parametric family of solvable elements of one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvableFamily {
    pub index: u32,
    /// Multiplier of `t` in the `a`-coordinate: `−(2(λ+β−1)/λ)^(n−4)`.
    /// Irrelevant for index 2, where the family is the line `⟨ab⟩` itself.
    pub a_coeff: f64,
}

impl SolvableFamily {
    /// The member with parameters `(t, s)`: `a_coeff·t·a + t·b + s·ab`
    /// (`t ≠ 0`), or `s·ab` for index 2.
    pub fn member(&self, t: f64, s: f64) -> Element {
        if self.index == 2 {
            Element::transformed([0.0, 0.0, 0.0, s])
        } else {
            Element::transformed([0.0, self.a_coeff * t, t, s])
        }
    }

    pub fn describe(&self) -> String {
        if self.index == 2 {
            "s·ab (t = 0, s free)".to_string()
        } else {
            format!("{}·t·a + t·b + s·ab (t ≠ 0, s free)", self.a_coeff)
        }
    }

    /// A representative with `t = |a_coeff|^(-1/2)`, which balances the two
    /// coordinates (`|X₁·Y₁| = 1`) so plenary squaring stays within `f64`
    /// range through index 8 even when `a_coeff` is huge.
    pub fn normalized_member(&self, s: f64) -> Element {
        let t = if self.index == 2 || self.a_coeff == 0.0 {
            1.0
        } else {
            self.a_coeff.abs().powf(-0.5)
        };
        self.member(t, s)
    }
}

/// Solvable elements of index `n`.
///
/// `n = 2` is the nilpotent line; for `n ≥ 3` a family exists precisely on
/// the curve `P`, with `a`-coefficient `−(2(λ+β−1)/λ)^(n−4)` (reducing to
/// `−2(λ−β)/λ` at `n = 3`). Off `P` the answer is `None`.
pub fn solvable_family(p: &Params, n: u32) -> Result<Option<SolvableFamily>, ClassifyError> {
    if n < 2 {
        return Err(ClassifyError::BadIndex(n));
    }
    if n == 2 {
        return Ok(Some(SolvableFamily {
            index: 2,
            a_coeff: 0.0,
        }));
    }
    if !p.p_membership().in_p {
        return Ok(None);
    }
    let two_nu = 2.0 * (p.lambda() + p.beta() - 1.0) / p.lambda();
    let a_coeff = -two_nu.powi(n as i32 - 4);
    Ok(Some(SolvableFamily { index: n, a_coeff }))
}

/// Floor below which a live coordinate means the orbit has decayed past any
/// trustworthy range (squaring is about to underflow) rather than heading
/// for an algebraic zero.
const PLENARY_UNDERFLOW_FLOOR: f64 = 1e-120;

/// Squares `x` in the algebra, also returning per-coordinate sums of the
/// absolute contributions. The sums bound both the rounding error of the
/// result and the size it would have had without cancellation.
fn square_with_scale(t: &StructureTensor, x: &[f64; 4]) -> ([f64; 4], [f64; 4]) {
    let c = t.constants();
    let mut val = [0.0; 4];
    let mut scale = [0.0; 4];
    for i in 0..4 {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..4 {
            let f = x[i] * x[j];
            if f == 0.0 {
                continue;
            }
            for k in 0..4 {
                val[k] += f * c[i][j][k];
                scale[k] += f.abs() * c[i][j][k].abs();
            }
        }
    }
    (val, scale)
}

/// Least `n ≤ cap` with `m^[n] = 0`, or `None`.
///
/// Plenary squaring contracts an open neighborhood of the origin, so a bare
/// magnitude threshold would call every orbit in that basin "solvable".
/// What distinguishes an algebraic zero is cancellation: a coordinate of
/// `m^[k]∘m^[k]` whose value is `tol`-small *relative to the absolute sum
/// of the products that formed it* vanished by cancellation (the rounding
/// floor is ~1e-16 of that sum) and is snapped to exact zero; a merely
/// shrinking coordinate stays comparable to its own contribution sum and is
/// left alone. The index is the first power whose coordinates are all zero.
/// Orbits that decay below `1e-120` without cancelling are reported
/// `None`. `tol` comes from the tensor's `Params`.
pub fn solvability_index(t: &StructureTensor, m: &Element, cap: u32) -> Option<u32> {
    assert!(cap >= 2, "cap must be at least 2");
    if m.inf_norm() == 0.0 {
        return Some(1);
    }
    let tol = t.params().tol();
    let mut cur = *m.coords();
    for n in 2..=cap {
        if cur
            .iter()
            .any(|&x| x != 0.0 && x.abs() < PLENARY_UNDERFLOW_FLOOR)
        {
            return None;
        }
        let (mut val, scale) = square_with_scale(t, &cur);
        for (v, s) in val.iter_mut().zip(&scale) {
            if v.abs() <= tol * s {
                *v = 0.0;
            }
        }
        if val == [0.0; 4] {
            return Some(n);
        }
        cur = val;
    }
    None
}

/// The witness sequence `m^[1], …, m^[upto]`.
pub fn plenary_sequence(t: &StructureTensor, m: &Element, upto: u32) -> Vec<Element> {
    let mut out = Vec::with_capacity(upto as usize);
    let mut cur = *m;
    out.push(cur);
    for _ in 1..upto {
        cur = algebra::multiply(t, &cur, &cur).expect("element basis matches tensor");
        out.push(cur);
    }
    out
}

// ---------------------------------------------------------------------------
// Numeric root searches. These work from the polynomial system spelled out
// in the module docs, not from the structure tensor, so they are an
// independent route to the same sets.
// ---------------------------------------------------------------------------

fn mu_nu(p: &Params) -> (f64, f64) {
    let la = p.lambda();
    let be = p.beta();
    ((la - be) / la, (la + be - 1.0) / la)
}

/// `count` seeds uniform on `[lo, hi]^4` from a fixed-seed generator.
pub fn random_seeds(count: usize, lo: f64, hi: f64, rng_seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.gen_range(lo..hi)))
        .collect()
}

/// A fixed 4^4 lattice of starts covering `[−2, 2]^4`.
pub fn grid_seeds() -> Vec<[f64; 4]> {
    const AXIS: [f64; 4] = [-1.8, -0.6, 0.7, 1.9];
    let mut out = Vec::with_capacity(256);
    for &a in &AXIS {
        for &b in &AXIS {
            for &c in &AXIS {
                for &d in &AXIS {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Multi-start Newton on `u∘u − u = 0`. Returns converged, verified roots
/// clustered at distance 1e-6.
pub fn newton_idempotent_search(p: &Params, seeds: &[[f64; 4]]) -> Vec<[f64; 4]> {
    let la = p.lambda();
    let (mu, nu) = mu_nu(p);
    let system = |u: &[f64]| {
        let (u0, u1, u2, u3) = (u[0], u[1], u[2], u[3]);
        let r = vec![
            u0 * u0 - u0,
            u1 * u1 + 2.0 * la * u0 * u1 + 2.0 * mu * u1 * u2 - u1,
            u2 * u2 + 2.0 * la * u0 * u2 + 2.0 * nu * u1 * u2 - u2,
            2.0 * u1 * u2 - u3,
        ];
        let jac = vec![
            vec![2.0 * u0 - 1.0, 0.0, 0.0, 0.0],
            vec![
                2.0 * la * u1,
                2.0 * u1 + 2.0 * la * u0 + 2.0 * mu * u2 - 1.0,
                2.0 * mu * u1,
                0.0,
            ],
            vec![
                2.0 * la * u2,
                2.0 * nu * u2,
                2.0 * u2 + 2.0 * la * u0 + 2.0 * nu * u1 - 1.0,
                0.0,
            ],
            vec![0.0, 2.0 * u2, 2.0 * u1, -1.0],
        ];
        (r, jac)
    };

    let t = algebra::transformed_table(p);
    let mut roots: Vec<[f64; 4]> = Vec::new();
    for seed in seeds {
        let Some(root) = solve::newton(seed.to_vec(), system, 60, 1e-12) else {
            continue;
        };
        let e = Element::transformed([root[0], root[1], root[2], root[3]]);
        let sq = algebra::multiply(&t, &e, &e).expect("transformed basis");
        let residual = sq
            .coords()
            .iter()
            .zip(e.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual > 1e-9 {
            continue;
        }
        let pt = [root[0], root[1], root[2], root[3]];
        if !roots
            .iter()
            .any(|r| r.iter().zip(&pt).all(|(a, b)| (a - b).abs() <= 1e-6))
        {
            roots.push(pt);
        }
    }
    roots
}

/// Outcome of the absolute-nilpotent root search.
#[derive(Debug, Clone, Copy)]
pub struct NilpotentSearch {
    pub attempted: usize,
    pub converged: usize,
    /// Largest Euclidean distance from `⟨ab⟩` over converged roots.
    pub max_line_distance: f64,
}

/// Gauss-Newton search for solutions of `u∘u = 0`.
///
/// The system is homogeneous, so unnormalized iterations would slide down
/// the rays into the origin and learn nothing. Instead each start is pinned
/// to one of the charts `u1 = 1`, `u2 = 1`, `u3 = 1`; a root found in the
/// first two charts would be a genuine nilpotent outside `⟨ab⟩`.
pub fn newton_nilpotent_search(p: &Params, n_seeds: usize, rng_seed: u64) -> NilpotentSearch {
    let la = p.lambda();
    let (mu, nu) = mu_nu(p);
    let residual4 = move |u0: f64, u1: f64, u2: f64| {
        vec![
            u0 * u0,
            u1 * u1 + 2.0 * la * u0 * u1 + 2.0 * mu * u1 * u2,
            u2 * u2 + 2.0 * la * u0 * u2 + 2.0 * nu * u1 * u2,
            2.0 * u1 * u2,
        ]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut converged = 0;
    let mut max_dist = 0.0f64;
    for i in 0..n_seeds {
        let chart = i % 3;
        let root = match chart {
            0 => {
                // u1 = 1, unknowns (u0, u2)
                let x0 = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                solve::gauss_newton(x0, |x| residual4(x[0], 1.0, x[1]), 60, 1e-15)
                    .map(|x| [x[0], 1.0, x[1], rng.gen_range(-2.0..2.0)])
            }
            1 => {
                // u2 = 1, unknowns (u0, u1)
                let x0 = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                solve::gauss_newton(x0, |x| residual4(x[0], x[1], 1.0), 60, 1e-15)
                    .map(|x| [x[0], x[1], 1.0, rng.gen_range(-2.0..2.0)])
            }
            _ => {
                // u3 = 1, unknowns (u0, u1, u2)
                let x0 = vec![
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ];
                solve::gauss_newton(x0, |x| residual4(x[0], x[1], x[2]), 60, 1e-15)
                    .map(|x| [x[0], x[1], x[2], 1.0])
            }
        };
        if let Some(u) = root {
            converged += 1;
            let dist = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            max_dist = max_dist.max(dist);
        }
    }
    NilpotentSearch {
        attempted: n_seeds,
        converged,
        max_line_distance: max_dist,
    }
}

/// Greedy one-to-one matching of two point sets at threshold `eps`
/// (infinity norm). True when sizes agree and every point pairs up.
pub fn sets_match(a: &[[f64; 4]], b: &[[f64; 4]], eps: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for pa in a {
        for (j, pb) in b.iter().enumerate() {
            if !used[j] && pa.iter().zip(pb).all(|(x, y)| (x - y).abs() <= eps) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Coordinate swap `a ↔ b` (the involution induced by `β ↦ 1−β`).
pub fn swap_ab(e: &Element) -> Element {
    let c = e.coords();
    Element::new([c[0], c[2], c[1], c[3]], e.basis())
}
