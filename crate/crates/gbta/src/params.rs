//! The parameter pair `(λ, β)` and the degenerate curve `P`.
//!
//! `α` is the probability that a phenotype-A or -B parent passes the O
//! allele; `β` the probability that an AB parent passes A. The transformed
//! table works in `λ = 1 − α` throughout, so `λ` is what gets stored and
//! `α` is derived.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{self, Rat};

/// Default absolute tolerance for residuals and rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Arithmetic backing for residual checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float64,
    /// Residuals evaluated over exact rationals; zero means exactly zero.
    Rational,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("{name} = {value} is outside the open interval (0, 1)")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTol(f64),
    #[error("rational mode requires exactly representable parameters")]
    ModeUnavailable,
}

/// Which branch of `β = ½(1 ± √((1−λ)(1−3λ)))` a point of `P` sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PBranch {
    Plus,
    Minus,
    NotApplicable,
}

/// Result of testing `(λ, β)` against the curve `P`.
///
/// `P = {(λ,β) | 0 < λ ≤ 1/3, (2β−1)² = (1−3λ)(1−λ)}`. On it the idempotent
/// census drops from 7 to 5 and solvable elements of index ≥ 3 appear.
#[derive(Debug, Clone, Copy)]
pub struct PMembership {
    pub in_p: bool,
    /// `(2β−1)² − (1−3λ)(1−λ)`; also the denominator of the interior
    /// idempotents, so membership and degeneracy coincide.
    pub residual: f64,
    pub branch: PBranch,
}

/// Validated `(λ, β)` pair plus the numeric policy (tolerance, mode).
///
/// Immutable after construction; everything downstream borrows it.
#[derive(Debug, Clone)]
pub struct Params {
    lambda: f64,
    beta: f64,
    tol: f64,
    mode: Mode,
    exact: Option<(Rat, Rat)>,
}

impl Params {
    /// Builds from `λ` and `β`. In [`Mode::Rational`] the parameters are
    /// taken at their exact dyadic values.
    pub fn new(lambda: f64, beta: f64, tol: f64, mode: Mode) -> Result<Self, ParamsError> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(ParamsError::OutOfRange {
                name: "lambda",
                value: lambda,
            });
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ParamsError::OutOfRange {
                name: "beta",
                value: beta,
            });
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ParamsError::BadTol(tol));
        }
        let exact = match mode {
            Mode::Float64 => None,
            Mode::Rational => {
                let l = exact::from_f64(lambda).ok_or(ParamsError::ModeUnavailable)?;
                let b = exact::from_f64(beta).ok_or(ParamsError::ModeUnavailable)?;
                Some((l, b))
            }
        };
        Ok(Params {
            lambda,
            beta,
            tol,
            mode,
            exact,
        })
    }

    /// Same as [`Params::new`] but parameterized by `α = 1 − λ`.
    pub fn from_alpha(alpha: f64, beta: f64, tol: f64, mode: Mode) -> Result<Self, ParamsError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ParamsError::OutOfRange {
                name: "alpha",
                value: alpha,
            });
        }
        Self::new(1.0 - alpha, beta, tol, mode)
    }

    /// Exact-rational constructor (e.g. `λ = 1/3`, which no double hits).
    pub fn from_rationals(lambda: Rat, beta: Rat, tol: f64) -> Result<Self, ParamsError> {
        if !exact::in_open_unit(&lambda) {
            return Err(ParamsError::OutOfRange {
                name: "lambda",
                value: exact::to_f64(&lambda),
            });
        }
        if !exact::in_open_unit(&beta) {
            return Err(ParamsError::OutOfRange {
                name: "beta",
                value: exact::to_f64(&beta),
            });
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ParamsError::BadTol(tol));
        }
        Ok(Params {
            lambda: exact::to_f64(&lambda),
            beta: exact::to_f64(&beta),
            tol,
            mode: Mode::Rational,
            exact: Some((lambda, beta)),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `α = 1 − λ`, always in (0, 1).
    pub fn alpha(&self) -> f64 {
        1.0 - self.lambda
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Exact values when constructed in rational mode.
    pub fn exact_pair(&self) -> Option<&(Rat, Rat)> {
        self.exact.as_ref()
    }

    /// Tests membership in the curve `P`.
    ///
    /// Float mode: `λ ≤ 1/3 + tol` and `|residual| ≤ tol`. Rational mode:
    /// the residual must vanish exactly (no square root is ever taken, so
    /// irrational points of `P` are simply not representable there).
    pub fn p_membership(&self) -> PMembership {
        let (in_p, residual) = match &self.exact {
            Some((l, b)) if self.mode == Mode::Rational => {
                let r = exact::p_residual(l, b);
                let le_third = (l - exact::rat(1, 3)).is_negative() || (l - exact::rat(1, 3)).is_zero();
                (r.is_zero() && le_third, exact::to_f64(&r))
            }
            _ => {
                let l = self.lambda;
                let b = self.beta;
                let r = (2.0 * b - 1.0).powi(2) - (1.0 - 3.0 * l) * (1.0 - l);
                (l <= 1.0 / 3.0 + self.tol && r.abs() <= self.tol, r)
            }
        };
        let branch = if !in_p {
            PBranch::NotApplicable
        } else if self.beta >= 0.5 {
            PBranch::Plus
        } else {
            PBranch::Minus
        };
        PMembership {
            in_p,
            residual,
            branch,
        }
    }
}

/// The `β` value putting `(λ, β)` on `P`: `½(1 ± √((1−λ)(1−3λ)))`.
/// Only meaningful for `0 < λ ≤ 1/3`.
pub fn p_curve_beta(lambda: f64, plus: bool) -> f64 {
    let disc = (1.0 - lambda) * (1.0 - 3.0 * lambda);
    let root = disc.max(0.0).sqrt();
    if plus {
        0.5 * (1.0 + root)
    } else {
        0.5 * (1.0 - root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bta_params_accepted() {
        let p = Params::from_alpha(0.25, 0.5, 1e-9, Mode::Float64).unwrap();
        assert_eq!(p.lambda(), 0.75);
        assert_eq!(p.beta(), 0.5);
        assert_eq!(p.alpha(), 0.25);
    }

    #[test]
    fn boundary_rejected() {
        assert!(matches!(
            Params::new(1.0, 0.5, 1e-9, Mode::Float64),
            Err(ParamsError::OutOfRange { name: "lambda", .. })
        ));
        assert!(matches!(
            Params::new(0.5, 0.0, 1e-9, Mode::Float64),
            Err(ParamsError::OutOfRange { name: "beta", .. })
        ));
        assert!(matches!(
            Params::new(f64::NAN, 0.5, 1e-9, Mode::Float64),
            Err(ParamsError::OutOfRange { .. })
        ));
        assert!(matches!(
            Params::new(0.5, 0.5, 0.0, Mode::Float64),
            Err(ParamsError::BadTol(_))
        ));
    }

    #[test]
    fn interior_point_accepted() {
        let p = Params::new(1.0 / 3.0, 0.5, 1e-9, Mode::Float64).unwrap();
        assert!(p.lambda() > 0.33 && p.lambda() < 0.34);
    }

    #[test]
    fn p_membership_examples() {
        // Both sides vanish at (1/3, 1/2).
        let p = Params::new(1.0 / 3.0, 0.5, 1e-9, Mode::Float64).unwrap();
        let m = p.p_membership();
        assert!(m.in_p);
        assert!(m.residual.abs() <= 1e-9);

        // (0.75, 0.5): lambda > 1/3, residual strictly positive.
        let p = Params::new(0.75, 0.5, 1e-9, Mode::Float64).unwrap();
        let m = p.p_membership();
        assert!(!m.in_p);
        // (2β−1)² = 0, (1−3λ)(1−λ) = (−1.25)(0.25) = −0.3125
        assert!((m.residual - 0.3125).abs() < 1e-15);
        assert_eq!(m.branch, PBranch::NotApplicable);

        // On-curve point via the plus branch at lambda = 0.2.
        let beta = p_curve_beta(0.2, true);
        assert!((beta - 0.5 * (1.0 + 0.32f64.sqrt())).abs() < 1e-15);
        let p = Params::new(0.2, beta, 1e-9, Mode::Float64).unwrap();
        let m = p.p_membership();
        assert!(m.in_p);
        assert_eq!(m.branch, PBranch::Plus);
    }

    #[test]
    fn p_membership_symmetric_in_beta() {
        for &(l, b) in &[(0.2, 0.3), (0.1, p_curve_beta(0.1, true)), (0.7, 0.9)] {
            let m1 = Params::new(l, b, 1e-9, Mode::Float64).unwrap().p_membership();
            let m2 = Params::new(l, 1.0 - b, 1e-9, Mode::Float64)
                .unwrap()
                .p_membership();
            assert_eq!(m1.in_p, m2.in_p);
            assert!((m1.residual - m2.residual).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_mode_exact_membership() {
        let p = Params::from_rationals(crate::exact::rat(1, 3), crate::exact::rat(1, 2), 1e-9)
            .unwrap();
        let m = p.p_membership();
        assert!(m.in_p);
        assert_eq!(m.residual, 0.0);

        // 0.333... as a double is NOT 1/3, so the exact residual is nonzero.
        let p = Params::new(1.0 / 3.0, 0.5, 1e-9, Mode::Rational).unwrap();
        let m = p.p_membership();
        assert!(!m.in_p);
        assert!(m.residual != 0.0);
    }
}
