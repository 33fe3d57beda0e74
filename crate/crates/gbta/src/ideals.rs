//! Ideals of `B'(λ,β)` and their lattice.
//!
//! `⟨a,b,ab⟩` is always the unique maximal ideal and `⟨ab⟩` the unique
//! 1-dimensional one. Two-dimensional ideals exist only on the parameter
//! lines `β = λ` (then `⟨b,ab⟩`) and `β = 1−λ` (then `⟨a,ab⟩`); at
//! `λ = β = 1/2` both appear and the lattice is a diamond, otherwise it is
//! a chain. `ideal_closure` verifies all of this numerically: it knows
//! nothing about the classification, it just saturates a subspace under
//! multiplication by basis vectors.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{self, Element, StructureTensor};
use crate::json::fmt_rows;
use crate::linalg::{self, Subspace};
use crate::params::Params;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdealsError {
    #[error("generator basis does not match the tensor basis")]
    BasisMismatch,
}

/// Names for the subspaces that can occur as ideals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdealLabel {
    /// `⟨ab⟩`
    Ab,
    /// `⟨a,ab⟩`
    AAb,
    /// `⟨b,ab⟩`
    BAb,
    /// `⟨a,b,ab⟩`
    ABAb,
    Full,
    Zero,
    /// Anything else — a falsification event if it ever labels a closure.
    Other,
}

impl IdealLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            IdealLabel::Ab => "⟨ab⟩",
            IdealLabel::AAb => "⟨a,ab⟩",
            IdealLabel::BAb => "⟨b,ab⟩",
            IdealLabel::ABAb => "⟨a,b,ab⟩",
            IdealLabel::Full => "full",
            IdealLabel::Zero => "zero",
            IdealLabel::Other => "other",
        }
    }

    /// Coordinate positions spanning the named subspace (transformed basis).
    fn coordinates(&self) -> Option<&'static [usize]> {
        match self {
            IdealLabel::Ab => Some(&[3]),
            IdealLabel::AAb => Some(&[1, 3]),
            IdealLabel::BAb => Some(&[2, 3]),
            IdealLabel::ABAb => Some(&[1, 2, 3]),
            IdealLabel::Full => Some(&[0, 1, 2, 3]),
            IdealLabel::Zero => Some(&[]),
            IdealLabel::Other => None,
        }
    }
}

impl std::fmt::Display for IdealLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A subspace closed under multiplication by the algebra.
#[derive(Debug, Clone)]
pub struct Ideal {
    pub space: Subspace,
    pub label: IdealLabel,
}

/// Which of the four lattice shapes applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeCase {
    /// `β = λ ≠ 1/2`: chain `⟨ab⟩ ⊂ ⟨b,ab⟩ ⊂ ⟨a,b,ab⟩`
    BetaEqLambda,
    /// `β = 1−λ, λ ≠ 1/2`: chain `⟨ab⟩ ⊂ ⟨a,ab⟩ ⊂ ⟨a,b,ab⟩`
    BetaEq1MinusLambda,
    /// `β ∉ {λ, 1−λ}`: chain `⟨ab⟩ ⊂ ⟨a,b,ab⟩`
    Generic,
    /// `λ = β = 1/2`: the diamond
    Half,
}

impl LatticeCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            LatticeCase::BetaEqLambda => "BetaEqLambda",
            LatticeCase::BetaEq1MinusLambda => "BetaEq1MinusLambda",
            LatticeCase::Generic => "Generic",
            LatticeCase::Half => "Half",
        }
    }
}

/// The proper ideals and Hasse diagram at one parameter point.
#[derive(Debug, Clone)]
pub struct LatticeReport {
    pub case: LatticeCase,
    pub proper_ideals: Vec<Ideal>,
    pub hasse_edges: Vec<(IdealLabel, IdealLabel)>,
    /// Set when the parameters sit within `10·tol` of a case boundary,
    /// where the lattice is about to jump.
    pub boundary_warning: Option<String>,
}

impl LatticeReport {
    pub fn to_json(&self) -> String {
        let ideals: Vec<String> = self
            .proper_ideals
            .iter()
            .map(|i| {
                format!(
                    "{{\"label\": \"{}\", \"dim\": {}, \"basis\": {}}}",
                    i.label,
                    i.space.dim(),
                    fmt_rows(i.space.basis_rows()),
                )
            })
            .collect();
        let hasse: Vec<String> = self
            .hasse_edges
            .iter()
            .map(|(a, b)| format!("[\"{a}\", \"{b}\"]"))
            .collect();
        format!(
            "{{\"case\": \"{}\", \"ideals\": [{}], \"hasse\": [{}]}}",
            self.case.as_str(),
            ideals.join(", "),
            hasse.join(", "),
        )
    }
}

fn unit_rows(coords: &[usize]) -> Vec<Vec<f64>> {
    coords
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; 4];
            v[i] = 1.0;
            v
        })
        .collect()
}

fn named_subspace(label: IdealLabel, tol: f64) -> Subspace {
    let coords = label.coordinates().expect("named label");
    if coords.is_empty() {
        Subspace::zero(4, tol).unwrap()
    } else {
        linalg::span(&unit_rows(coords), tol).unwrap()
    }
}

/// Assigns a name by subspace equality against the named candidates.
pub fn label_subspace(s: &Subspace) -> IdealLabel {
    for label in [
        IdealLabel::Zero,
        IdealLabel::Ab,
        IdealLabel::AAb,
        IdealLabel::BAb,
        IdealLabel::ABAb,
        IdealLabel::Full,
    ] {
        let candidate = named_subspace(label, s.tol());
        if s.dim() == candidate.dim() && s.equal(&candidate).unwrap() {
            return label;
        }
    }
    IdealLabel::Other
}

/// Smallest ideal containing `generators`: iterate span-extension with all
/// products `v ∘ e_i` until the rank stabilizes (at most 4 rounds).
pub fn ideal_closure(t: &StructureTensor, generators: &[Element]) -> Result<Ideal, IdealsError> {
    if generators.iter().any(|g| g.basis() != t.basis()) {
        return Err(IdealsError::BasisMismatch);
    }
    let tol = t.params().tol();
    let rows: Vec<Vec<f64>> = generators.iter().map(|g| g.coords().to_vec()).collect();
    let mut space = if rows.is_empty() {
        Subspace::zero(4, tol).unwrap()
    } else {
        linalg::span(&rows, tol).unwrap()
    };
    loop {
        let mut products: Vec<Vec<f64>> = Vec::new();
        for row in space.basis_rows() {
            let v: [f64; 4] = [row[0], row[1], row[2], row[3]];
            for i in 0..4 {
                let mut e = [0.0; 4];
                e[i] = 1.0;
                products.push(algebra::multiply_coords(t, &v, &e).to_vec());
            }
        }
        let extended = linalg::extend(&space, &products, tol).unwrap();
        if extended.dim() == space.dim() {
            break;
        }
        space = extended;
    }
    let label = label_subspace(&space);
    Ok(Ideal { space, label })
}

/// Checks the defining property: `v ∘ e_i` stays inside for every basis row
/// `v` and every algebra basis vector `e_i`.
pub fn is_ideal(t: &StructureTensor, s: &Subspace) -> bool {
    for row in s.basis_rows() {
        let v: [f64; 4] = [row[0], row[1], row[2], row[3]];
        for i in 0..4 {
            let mut e = [0.0; 4];
            e[i] = 1.0;
            let prod = algebra::multiply_coords(t, &v, &e);
            if !s.contains(&prod).unwrap() {
                return false;
            }
        }
    }
    true
}

/// The ideal lattice at `(λ,β)`, selected by case and re-verified.
pub fn lattice(p: &Params) -> LatticeReport {
    let tol = p.tol();
    let la = p.lambda();
    let be = p.beta();
    let beta_eq_lambda = (be - la).abs() <= tol;
    let beta_eq_1ml = (be - (1.0 - la)).abs() <= tol;

    let case = match (beta_eq_lambda, beta_eq_1ml) {
        (true, true) => LatticeCase::Half,
        (true, false) => LatticeCase::BetaEqLambda,
        (false, true) => LatticeCase::BetaEq1MinusLambda,
        (false, false) => LatticeCase::Generic,
    };

    let labels: Vec<IdealLabel> = match case {
        LatticeCase::Generic => vec![IdealLabel::Ab, IdealLabel::ABAb],
        LatticeCase::BetaEqLambda => vec![IdealLabel::Ab, IdealLabel::BAb, IdealLabel::ABAb],
        LatticeCase::BetaEq1MinusLambda => {
            vec![IdealLabel::Ab, IdealLabel::AAb, IdealLabel::ABAb]
        }
        LatticeCase::Half => vec![
            IdealLabel::Ab,
            IdealLabel::AAb,
            IdealLabel::BAb,
            IdealLabel::ABAb,
        ],
    };

    let hasse_edges: Vec<(IdealLabel, IdealLabel)> = match case {
        LatticeCase::Generic => vec![(IdealLabel::Ab, IdealLabel::ABAb)],
        LatticeCase::BetaEqLambda => vec![
            (IdealLabel::Ab, IdealLabel::BAb),
            (IdealLabel::BAb, IdealLabel::ABAb),
        ],
        LatticeCase::BetaEq1MinusLambda => vec![
            (IdealLabel::Ab, IdealLabel::AAb),
            (IdealLabel::AAb, IdealLabel::ABAb),
        ],
        LatticeCase::Half => vec![
            (IdealLabel::Ab, IdealLabel::AAb),
            (IdealLabel::Ab, IdealLabel::BAb),
            (IdealLabel::AAb, IdealLabel::ABAb),
            (IdealLabel::BAb, IdealLabel::ABAb),
        ],
    };

    let t = algebra::transformed_table(p);
    let proper_ideals: Vec<Ideal> = labels
        .iter()
        .map(|&label| {
            let space = named_subspace(label, tol);
            assert!(
                is_ideal(&t, &space),
                "listed subspace {label} fails the ideal property at ({la},{be})"
            );
            Ideal { space, label }
        })
        .collect();

    // Knife-edge diagnostics: the lattice is discontinuous across the
    // special lines, so flag parameters that sit almost on one.
    let mut warnings = Vec::new();
    let near = 10.0 * tol;
    if !beta_eq_lambda && (be - la).abs() <= near {
        warnings.push("beta is within 10*tol of lambda");
    }
    if !beta_eq_1ml && (be - (1.0 - la)).abs() <= near {
        warnings.push("beta is within 10*tol of 1-lambda");
    }
    if case != LatticeCase::Half && (beta_eq_lambda || beta_eq_1ml) && (la - 0.5).abs() <= near {
        warnings.push("lambda is within 10*tol of 1/2");
    }
    let boundary_warning = if warnings.is_empty() {
        None
    } else {
        Some(warnings.join("; "))
    };

    LatticeReport {
        case,
        proper_ideals,
        hasse_edges,
        boundary_warning,
    }
}

/// Randomized completeness check: closures of random subspaces must land in
/// the listed lattice (or be zero / the full algebra).
#[derive(Debug, Clone)]
pub struct FalsifyReport {
    pub trials: usize,
    pub violations: usize,
    pub first_violation: Option<(IdealLabel, Vec<Vec<f64>>)>,
}

/// Samples `trials` random subspaces of dimension 1–3, closes each, and
/// counts closures that are not in the reported lattice. Every other trial
/// samples inside the maximal ideal `⟨a,b,ab⟩`, since a random vector with
/// a nonzero `o`-coordinate closes to the full algebra almost surely.
pub fn falsify_lattice(p: &Params, trials: usize, seed: u64) -> FalsifyReport {
    let t = algebra::transformed_table(p);
    let report = lattice(p);
    let mut allowed: Vec<IdealLabel> = report.proper_ideals.iter().map(|i| i.label).collect();
    allowed.push(IdealLabel::Zero);
    allowed.push(IdealLabel::Full);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr_standard_normal;
    let mut violations = 0;
    let mut first_violation = None;
    for trial in 0..trials {
        let dim = 1 + trial % 3;
        let zero_o = trial % 2 == 1;
        let gens: Vec<Element> = (0..dim)
            .map(|_| {
                let mut v = [0.0; 4];
                for (i, x) in v.iter_mut().enumerate() {
                    if zero_o && i == 0 {
                        continue;
                    }
                    *x = normal(&mut rng);
                }
                Element::transformed(v)
            })
            .collect();
        let ideal = ideal_closure(&t, &gens).unwrap();
        if !allowed.contains(&ideal.label) {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some((ideal.label, ideal.space.basis_rows().to_vec()));
            }
        }
    }
    FalsifyReport {
        trials,
        violations,
        first_violation,
    }
}

fn rand_distr_standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; avoids log(0).
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
