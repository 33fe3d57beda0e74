//! Isomorphism between `B'(λ,β)` and `B'(λ',β')`.
//!
//! Two of these algebras are isomorphic exactly when `λ' = λ` and
//! `β' ∈ {β, 1−β}`; the nontrivial witness is the basis swap
//! `(o,a,b,ab) ↦ (o,b,a,ab)`. The decision rule below is that statement;
//! the numeric search exists to produce independent evidence (a verified
//! witness matrix, or a pile of failed starts) rather than to decide.
//!
//! A witness is stored as the coordinate action: column `i` holds the image
//! of the `i`-th source basis vector, so `φ(u) = W·u` on coordinate
//! vectors. Any homomorphism has `W[0][0] = 1`, the rest of row 0 zero, and
//! column 3 supported only on `ab` (the annihilator must map to the
//! annihilator), which cuts the search space to 10 free entries.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, mat_vec, StructureTensor};
use crate::json::fmt_mat4;
use crate::params::Params;
use crate::solve;

pub type Mat4 = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoReason {
    /// Same parameters; the identity map works.
    Identity,
    /// `β' = 1−β`; the `a ↔ b` swap works.
    SwapBeta,
    NotIsomorphic,
}

impl IsoReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            IsoReason::Identity => "Identity",
            IsoReason::SwapBeta => "SwapBeta",
            IsoReason::NotIsomorphic => "NotIsomorphic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsoReport {
    pub isomorphic: bool,
    /// Verified homomorphism from the first algebra to the second.
    pub witness: Option<Mat4>,
    pub reason: IsoReason,
}

impl IsoReport {
    pub fn to_json(&self) -> String {
        let witness = match &self.witness {
            Some(w) => fmt_mat4(w),
            None => "null".to_string(),
        };
        format!(
            "{{\"isomorphic\": {}, \"reason\": \"{}\", \"witness\": {}}}",
            self.isomorphic,
            self.reason.as_str(),
            witness,
        )
    }
}

fn identity4() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        m[i][i] = 1.0;
    }
    m
}

/// The swap `(o,a,b,ab) ↦ (o,b,a,ab)` as a coordinate matrix.
pub fn swap_witness() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    m[0][0] = 1.0;
    m[1][2] = 1.0;
    m[2][1] = 1.0;
    m[3][3] = 1.0;
    m
}

/// Applies the classification rule. Tolerances come from the first
/// argument. Witnesses are verified before being returned.
pub fn decide_isomorphic(p1: &Params, p2: &Params) -> IsoReport {
    let tol = p1.tol();
    if (p1.lambda() - p2.lambda()).abs() > tol {
        return IsoReport {
            isomorphic: false,
            witness: None,
            reason: IsoReason::NotIsomorphic,
        };
    }
    if (p1.beta() - p2.beta()).abs() <= tol {
        let w = identity4();
        debug_assert!(verify_homomorphism(p1, p2, &w));
        return IsoReport {
            isomorphic: true,
            witness: Some(w),
            reason: IsoReason::Identity,
        };
    }
    if (p1.beta() - (1.0 - p2.beta())).abs() <= tol {
        let w = swap_witness();
        debug_assert!(verify_homomorphism(p1, p2, &w));
        return IsoReport {
            isomorphic: true,
            witness: Some(w),
            reason: IsoReason::SwapBeta,
        };
    }
    IsoReport {
        isomorphic: false,
        witness: None,
        reason: IsoReason::NotIsomorphic,
    }
}

/// True iff `phi` is invertible and `φ(e_i ∘₁ e_j) = φ(e_i) ∘₂ φ(e_j)` for
/// all ten unordered basis pairs, within the first argument's tolerance.
pub fn verify_homomorphism(p1: &Params, p2: &Params, phi: &Mat4) -> bool {
    let tol = p1.tol();
    if solve::det4(phi).abs() <= tol {
        return false;
    }
    let t1 = algebra::transformed_table(p1);
    let t2 = algebra::transformed_table(p2);
    homomorphism_residual_inf(&t1, &t2, phi) <= tol
}

/// Max-norm of the 10-pair product-preservation residual.
fn homomorphism_residual_inf(t1: &StructureTensor, t2: &StructureTensor, phi: &Mat4) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in i..4 {
            let lhs = mat_vec(phi, t1.product(i, j).coords());
            let phi_ei = mat_vec(phi, &unit(i));
            let phi_ej = mat_vec(phi, &unit(j));
            let rhs = algebra::multiply_coords(t2, &phi_ei, &phi_ej);
            for k in 0..4 {
                worst = worst.max((lhs[k] - rhs[k]).abs());
            }
        }
    }
    worst
}

fn unit(i: usize) -> [f64; 4] {
    let mut v = [0.0; 4];
    v[i] = 1.0;
    v
}

/// Multi-start Gauss-Newton search for a homomorphism from `B'(p1)` to
/// `B'(p2)`, over the 10 entries not forced by the annihilator and unit
/// constraints. The residual carries a penalty pushing `|det φ|` above
/// 0.01, so the zero map is never a attractor. Returns the first witness
/// that passes [`verify_homomorphism`].
pub fn search_isomorphism(p1: &Params, p2: &Params, trials: usize, seed: u64) -> Option<Mat4> {
    let t1 = algebra::transformed_table(p1);
    let t2 = algebra::transformed_table(p2);

    // Free slots in the coordinate matrix, given the structural zeros.
    const FREE: [(usize, usize); 10] = [
        (1, 0),
        (2, 0),
        (3, 0),
        (1, 1),
        (2, 1),
        (3, 1),
        (1, 2),
        (2, 2),
        (3, 2),
        (3, 3),
    ];

    let assemble = |x: &[f64]| -> Mat4 {
        let mut w = [[0.0; 4]; 4];
        w[0][0] = 1.0;
        for (k, &(i, j)) in FREE.iter().enumerate() {
            w[i][j] = x[k];
        }
        w
    };

    let residual = |x: &[f64]| -> Vec<f64> {
        let w = assemble(x);
        let mut r = Vec::with_capacity(41);
        for i in 0..4 {
            for j in i..4 {
                let lhs = mat_vec(&w, t1.product(i, j).coords());
                let phi_ei = mat_vec(&w, &unit(i));
                let phi_ej = mat_vec(&w, &unit(j));
                let rhs = algebra::multiply_coords(&t2, &phi_ei, &phi_ej);
                for k in 0..4 {
                    r.push(lhs[k] - rhs[k]);
                }
            }
        }
        let det = solve::det4(&w).abs();
        r.push(10.0 * (0.01 - det).max(0.0));
        r
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x0: Vec<f64> = (0..10).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Some(x) = solve::gauss_newton(x0, residual, 40, 1e-11) {
            let w = assemble(&x);
            if verify_homomorphism(p1, p2, &w) {
                return Some(w);
            }
        }
    }
    None
}

/// Standard normal via Box-Muller, kept local so the only rand dependency
/// is the core `Rng` trait.
struct StandardNormal;

impl rand::distributions::Distribution<f64> for StandardNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify;
    use crate::params::Mode;

    fn params(l: f64, b: f64) -> Params {
        Params::new(l, b, 1e-9, Mode::Float64).unwrap()
    }

    #[test]
    fn decision_rule() {
        // beta' = 1 − beta: isomorphic via swap
        let r = decide_isomorphic(&params(0.6, 0.3), &params(0.6, 0.7));
        assert!(r.isomorphic);
        assert_eq!(r.reason, IsoReason::SwapBeta);
        assert_eq!(r.witness.unwrap(), swap_witness());

        // different lambda: not isomorphic
        let r = decide_isomorphic(&params(0.6, 0.3), &params(0.5, 0.3));
        assert!(!r.isomorphic);
        assert!(r.witness.is_none());

        // same parameters: identity witness
        let r = decide_isomorphic(&params(0.6, 0.3), &params(0.6, 0.3));
        assert!(r.isomorphic);
        assert_eq!(r.reason, IsoReason::Identity);
    }

    #[test]
    fn decision_is_symmetric_and_reflexive() {
        let pts = [(0.6, 0.3), (0.6, 0.7), (0.5, 0.3), (0.33, 0.91)];
        for &(l1, b1) in &pts {
            let p1 = params(l1, b1);
            assert!(decide_isomorphic(&p1, &p1).isomorphic);
            for &(l2, b2) in &pts {
                let p2 = params(l2, b2);
                assert_eq!(
                    decide_isomorphic(&p1, &p2).isomorphic,
                    decide_isomorphic(&p2, &p1).isomorphic
                );
            }
        }
    }

    #[test]
    fn homomorphism_verification() {
        // swap witness between (λ,β) and (λ,1−β)
        assert!(verify_homomorphism(
            &params(0.6, 0.3),
            &params(0.6, 0.7),
            &swap_witness()
        ));
        // identity between different lambdas fails: o∘a gives 0.6a vs 0.5a
        assert!(!verify_homomorphism(
            &params(0.6, 0.3),
            &params(0.5, 0.3),
            &identity4()
        ));
        // the zero matrix is not invertible
        assert!(!verify_homomorphism(
            &params(0.6, 0.3),
            &params(0.6, 0.7),
            &[[0.0; 4]; 4]
        ));
    }

    #[test]
    fn search_finds_swap_witness() {
        let p1 = params(0.6, 0.3);
        let p2 = params(0.6, 0.7);
        let w = search_isomorphism(&p1, &p2, 100, 42).expect("witness should exist");
        assert!(verify_homomorphism(&p1, &p2, &w));
    }

    #[test]
    fn search_on_self_finds_an_automorphism() {
        let p = params(0.44, 0.27);
        let w = search_isomorphism(&p, &p, 100, 7).expect("identity exists");
        assert!(verify_homomorphism(&p, &p, &w));
    }

    #[test]
    fn search_fails_for_different_lambda() {
        let p1 = params(0.6, 0.3);
        let p2 = params(0.5, 0.3);
        assert!(search_isomorphism(&p1, &p2, 50, 13).is_none());
    }

    #[test]
    fn witness_transports_idempotents() {
        let p1 = params(0.6, 0.3);
        let p2 = params(0.6, 0.7);
        let w = decide_isomorphic(&p1, &p2).witness.unwrap();
        let src: Vec<[f64; 4]> = classify::idempotents(&p1)
            .unwrap()
            .items
            .iter()
            .map(|e| mat_vec(&w, e.coords()))
            .collect();
        let dst: Vec<[f64; 4]> = classify::idempotents(&p2)
            .unwrap()
            .items
            .iter()
            .map(|e| *e.coords())
            .collect();
        assert!(classify::sets_match(&src, &dst, 1e-9));
    }

    #[test]
    fn json_shape() {
        let r = decide_isomorphic(&params(0.6, 0.3), &params(0.6, 0.7));
        let js = r.to_json();
        assert!(js.contains("\"isomorphic\": true"));
        assert!(js.contains("\"reason\": \"SwapBeta\""));
        assert!(js.contains("\"witness\": [["));

        let r = decide_isomorphic(&params(0.6, 0.3), &params(0.5, 0.3));
        assert!(r.to_json().contains("\"witness\": null"));
    }
}
