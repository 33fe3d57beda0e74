//! The evolutionary operator and plenary powers.
//!
//! A population state is a point of the simplex: proportions of the four
//! phenotypes. The next generation is the quadratic map
//!
//! ```text
//! p_O = x1 + α x2 + α x3
//! p_A = (1−α) x2 + β x4
//! p_B = (1−α) x3 + (1−β) x4
//!
//! V(x) = (p_O², p_A² + 2 p_A p_O, p_B² + 2 p_B p_O, 2 p_A p_B)
//! ```
//!
//! `V(x) = x ∘ x` in the phenotype algebra, and polarization recovers the
//! whole product from `V` alone: `x ∘ y = ¼(V(x+y) − V(x−y))`. The same
//! polynomial formulas evaluate `V` on all of R⁴, which the polarization
//! identity needs (the points `x ± y` leave the simplex).

use std::io::{self, Write};

use thiserror::Error;

use crate::algebra::{self, Element, StructureTensor};
use crate::json::fmt_f64;
use crate::params::Params;

/// Hard cap on trajectory length.
pub const MAX_TRAJECTORY_STEPS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state {0:?} is not on the simplex (nonnegative, summing to 1)")]
    NotOnSimplex([f64; 4]),
    #[error("requested {0} steps, cap is {MAX_TRAJECTORY_STEPS}")]
    TooManySteps(usize),
}

/// Phenotype proportions `(x1, x2, x3, x4)` for `(O, A, B, AB)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State(pub [f64; 4]);

impl State {
    pub fn coords(&self) -> &[f64; 4] {
        &self.0
    }

    /// On the simplex within `tol`: entries ≥ −tol, sum within `tol` of 1.
    pub fn is_simplex(&self, tol: f64) -> bool {
        let sum: f64 = self.0.iter().sum();
        (sum - 1.0).abs() <= tol && self.0.iter().all(|&x| x >= -tol)
    }
}

/// Allele frequencies underlying a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlleleFreqs {
    pub p_o: f64,
    pub p_a: f64,
    pub p_b: f64,
}

/// `p_O = x1 + αx2 + αx3`, `p_A = (1−α)x2 + βx4`, `p_B = (1−α)x3 + (1−β)x4`.
pub fn allele_freqs(p: &Params, s: &State) -> AlleleFreqs {
    let al = p.alpha();
    let be = p.beta();
    let [x1, x2, x3, x4] = s.0;
    AlleleFreqs {
        p_o: x1 + al * x2 + al * x3,
        p_a: (1.0 - al) * x2 + be * x4,
        p_b: (1.0 - al) * x3 + (1.0 - be) * x4,
    }
}

/// One generation step. Defined on all of R⁴; maps the simplex into itself.
pub fn evolve(p: &Params, s: &State) -> State {
    let f = allele_freqs(p, s);
    State([
        f.p_o * f.p_o,
        f.p_a * f.p_a + 2.0 * f.p_a * f.p_o,
        f.p_b * f.p_b + 2.0 * f.p_b * f.p_o,
        2.0 * f.p_a * f.p_b,
    ])
}

/// The algebra product recovered from `V` alone: `¼(V(x+y) − V(x−y))`.
pub fn polarized_multiply(p: &Params, x: &State, y: &State) -> State {
    let mut sum = [0.0; 4];
    let mut diff = [0.0; 4];
    for i in 0..4 {
        sum[i] = x.0[i] + y.0[i];
        diff[i] = x.0[i] - y.0[i];
    }
    let vs = evolve(p, &State(sum));
    let vd = evolve(p, &State(diff));
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = 0.25 * (vs.0[i] - vd.0[i]);
    }
    State(out)
}

/// A trajectory `[s0, V(s0), …, Vⁿ(s0)]` with its first convergence index.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<State>,
    /// First `k` with `|s_{k+1} − s_k|_∞ ≤ 10·tol`, if any; `states[k+1]`
    /// is then a fixed point up to that threshold.
    pub converged_at: Option<usize>,
}

impl Trajectory {
    /// The state at the convergence index, when one was found.
    pub fn limit(&self) -> Option<&State> {
        self.converged_at.map(|k| &self.states[k + 1])
    }
}

/// Iterates `V` for `n` steps from a simplex state. All `n+1` states are
/// kept; `converged_at` records where successive states first got within
/// `10·tol` of each other in max norm.
pub fn trajectory(p: &Params, s0: &State, n: usize) -> Result<Trajectory, DynamicsError> {
    if !s0.is_simplex(p.tol()) {
        return Err(DynamicsError::NotOnSimplex(s0.0));
    }
    if n > MAX_TRAJECTORY_STEPS {
        return Err(DynamicsError::TooManySteps(n));
    }
    let stop = 10.0 * p.tol();
    let mut states = Vec::with_capacity(n + 1);
    states.push(*s0);
    let mut converged_at = None;
    for k in 0..n {
        let next = evolve(p, &states[k]);
        if converged_at.is_none() {
            let step: f64 = next
                .0
                .iter()
                .zip(&states[k].0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if step <= stop {
                converged_at = Some(k);
            }
        }
        states.push(next);
    }
    Ok(Trajectory {
        states,
        converged_at,
    })
}

/// Plenary powers `m^[1] = m`, `m^[k+1] = m^[k] ∘ m^[k]`.
/// `n` must be at least 1.
pub fn plenary_power(t: &StructureTensor, m: &Element, n: u32) -> Element {
    assert!(n >= 1, "plenary powers start at n = 1");
    let mut cur = *m;
    for _ in 1..n {
        cur = algebra::multiply(t, &cur, &cur).expect("element basis matches its tensor");
    }
    cur
}

/// Streams `step,x1,x2,x3,x4` rows, one per state, 17 significant digits.
pub fn write_trajectory_csv<W: Write>(w: &mut W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "step,x1,x2,x3,x4")?;
    for (k, s) in traj.states.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{}",
            k,
            fmt_f64(s.0[0]),
            fmt_f64(s.0[1]),
            fmt_f64(s.0[2]),
            fmt_f64(s.0[3])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Basis;
    use crate::params::Mode;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn bta() -> Params {
        Params::from_alpha(0.25, 0.5, 1e-9, Mode::Float64).unwrap()
    }

    #[test]
    fn allele_freq_examples() {
        let p = bta();
        let f = allele_freqs(&p, &State([1.0, 0.0, 0.0, 0.0]));
        assert_eq!((f.p_o, f.p_a, f.p_b), (1.0, 0.0, 0.0));

        let f = allele_freqs(&p, &State([0.0, 0.0, 0.0, 1.0]));
        assert_eq!((f.p_o, f.p_a, f.p_b), (0.0, 0.5, 0.5));

        let f = allele_freqs(&p, &State([0.0, 1.0, 0.0, 0.0]));
        assert_eq!((f.p_o, f.p_a, f.p_b), (0.25, 0.75, 0.0));
    }

    #[test]
    fn evolve_examples() {
        let p = bta();
        // pure O is fixed
        assert_eq!(evolve(&p, &State([1.0, 0.0, 0.0, 0.0])).0, [1.0, 0.0, 0.0, 0.0]);
        // AB x AB cross at beta = 1/2
        assert_eq!(
            evolve(&p, &State([0.0, 0.0, 0.0, 1.0])).0,
            [0.0, 0.25, 0.25, 0.5]
        );
        // all-A population at alpha = 1/4
        assert_eq!(
            evolve(&p, &State([0.0, 1.0, 0.0, 0.0])).0,
            [1.0 / 16.0, 15.0 / 16.0, 0.0, 0.0]
        );
    }

    #[test]
    fn trajectory_examples() {
        let p = bta();
        let t = trajectory(&p, &State([1.0, 0.0, 0.0, 0.0]), 5).unwrap();
        assert_eq!(t.states.len(), 6);
        for s in &t.states {
            assert_eq!(s.0, [1.0, 0.0, 0.0, 0.0]);
        }
        assert_eq!(t.converged_at, Some(0));

        let t = trajectory(&p, &State([0.0, 0.0, 0.0, 1.0]), 2).unwrap();
        assert_eq!(t.states[1].0, [0.0, 0.25, 0.25, 0.5]);
        assert_eq!(t.states[2], evolve(&p, &t.states[1]));

        // converged trajectories end at a near-fixed point
        let t = trajectory(&p, &State([0.0, 0.0, 0.0, 1.0]), 10_000).unwrap();
        let k = t.converged_at.expect("should converge");
        let s_star = t.states[k + 1];
        let v = evolve(&p, &s_star);
        let gap: f64 = v
            .0
            .iter()
            .zip(&s_star.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 10.0 * p.tol(), "gap {gap}");
    }

    #[test]
    fn trajectory_rejects_bad_input() {
        let p = bta();
        assert!(matches!(
            trajectory(&p, &State([0.5, 0.0, 0.0, 0.0]), 5),
            Err(DynamicsError::NotOnSimplex(_))
        ));
        assert!(matches!(
            trajectory(&p, &State([1.0, 0.0, 0.0, 0.0]), MAX_TRAJECTORY_STEPS + 1),
            Err(DynamicsError::TooManySteps(_))
        ));
    }

    #[test]
    fn plenary_power_examples() {
        // ab squares to zero
        let p = Params::new(1.0 / 3.0, 0.5, 1e-9, Mode::Float64).unwrap();
        let t = algebra::transformed_table(&p);
        let ab = Element::basis_vector(Basis::Transformed, 3);
        assert_eq!(plenary_power(&t, &ab, 2).coords(), &[0.0; 4]);

        // a + b at (1/3, 1/2): squares to ~2ab, then to ~0
        let apb = Element::transformed([0.0, 1.0, 1.0, 0.0]);
        let sq = plenary_power(&t, &apb, 2);
        assert!(sq.coords()[1].abs() < 1e-12);
        assert!(sq.coords()[2].abs() < 1e-12);
        assert!((sq.coords()[3] - 2.0).abs() < 1e-12);
        assert!(plenary_power(&t, &apb, 3).inf_norm() < 1e-12);

        // idempotents are constant under plenary powers
        let a = Element::basis_vector(Basis::Transformed, 1);
        for n in 1..=6 {
            assert_eq!(plenary_power(&t, &a, n).coords(), a.coords());
        }
    }

    #[test]
    fn csv_format() {
        let p = bta();
        let t = trajectory(&p, &State([0.0, 0.0, 0.0, 1.0]), 1).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "step,x1,x2,x3,x4");
        assert!(lines[1].starts_with("0,"));
        assert!(lines[2].starts_with("1,"));
    }

    #[test]
    fn fixed_points_on_simplex_are_idempotents() {
        // Converged trajectory limits square to themselves in the algebra.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let l: f64 = rng.gen_range(0.1..0.9);
            let b: f64 = rng.gen_range(0.1..0.9);
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let raw: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
            let sum: f64 = raw.iter().sum();
            let s0 = State(raw.map(|x| x / sum));
            let t = trajectory(&p, &s0, 100_000).unwrap();
            if let Some(limit) = t.limit() {
                let tensor = algebra::phenotype_table(&p);
                let e = Element::phenotype(limit.0);
                let sq = algebra::multiply(&tensor, &e, &e).unwrap();
                let gap: f64 = sq
                    .coords()
                    .iter()
                    .zip(&limit.0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(gap <= 1e-7, "limit is not idempotent: gap {gap}");
            }
        }
    }

    proptest! {
        // V preserves the simplex.
        #[test]
        fn simplex_preserved(
            l in 0.05f64..0.95,
            b in 0.05f64..0.95,
            raw in proptest::array::uniform4(0.01f64..1.0),
        ) {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let sum: f64 = raw.iter().sum();
            let s = State(raw.map(|x| x / sum));
            let next = evolve(&p, &s);
            prop_assert!(next.is_simplex(1e-12));
        }

        // V is homogeneous of degree 2.
        #[test]
        fn quadratic_homogeneity(
            l in 0.05f64..0.95,
            b in 0.05f64..0.95,
            x in proptest::array::uniform4(-2.0f64..2.0),
            c in -3.0f64..3.0,
        ) {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let vs = evolve(&p, &State(x.map(|v| c * v)));
            let sv = evolve(&p, &State(x));
            for k in 0..4 {
                prop_assert!((vs.0[k] - c * c * sv.0[k]).abs() <= 1e-10);
            }
        }

        // x∘x = V(x), and polarization agrees with the tensor product.
        #[test]
        fn polarization_identity(
            l in 0.05f64..0.95,
            b in 0.05f64..0.95,
            x in proptest::array::uniform4(-2.0f64..2.0),
            y in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let p = Params::new(l, b, 1e-9, Mode::Float64).unwrap();
            let sq = polarized_multiply(&p, &State(x), &State(x));
            let v = evolve(&p, &State(x));
            for k in 0..4 {
                prop_assert!((sq.0[k] - v.0[k]).abs() <= 1e-10);
            }

            let t = algebra::phenotype_table(&p);
            let via_tensor =
                algebra::multiply_coords(&t, &x, &y);
            let via_v = polarized_multiply(&p, &State(x), &State(y));
            for k in 0..4 {
                prop_assert!((via_tensor[k] - via_v.0[k]).abs() <= 1e-9);
            }
        }
    }
}
