//! Exact rational arithmetic: the two multiplication tables and Gaussian
//! elimination over `BigRational`.
//!
//! This path shares no code with the floating-point implementation, so it
//! doubles as an independent cross-check in the test suites, and it backs
//! [`Mode::Rational`](crate::Mode), where residuals must vanish exactly
//! rather than within a tolerance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact value of a finite `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn zero4() -> [Rat; 4] {
    std::array::from_fn(|_| Rat::zero())
}

/// 4x4x4 structure constants over the rationals; `c[i][j]` is the product of
/// basis vectors `i` and `j` expressed in the basis.
pub struct Tensor {
    pub c: [[[Rat; 4]; 4]; 4],
}

impl Tensor {
    fn new() -> Self {
        Tensor {
            c: std::array::from_fn(|_| std::array::from_fn(|_| zero4())),
        }
    }

    fn set(&mut self, i: usize, j: usize, row: [Rat; 4]) {
        self.c[i][j] = row.clone();
        self.c[j][i] = row;
    }
}

/// Phenotype-basis table over `(O, A, B, AB)` for exact `alpha`, `beta`.
pub fn phenotype_table(alpha: &Rat, beta: &Rat) -> Tensor {
    let one = Rat::one();
    let al = alpha.clone();
    let be = beta.clone();
    let nal = &one - &al; // 1 - alpha
    let nbe = &one - &be; // 1 - beta
    let al2 = &al * &al;

    let mut t = Tensor::new();
    // O o O = O
    t.set(0, 0, [one.clone(), Rat::zero(), Rat::zero(), Rat::zero()]);
    // O o A = alpha O + (1-alpha) A
    t.set(0, 1, [al.clone(), nal.clone(), Rat::zero(), Rat::zero()]);
    // O o B = alpha O + (1-alpha) B
    t.set(0, 2, [al.clone(), Rat::zero(), nal.clone(), Rat::zero()]);
    // O o AB = beta A + (1-beta) B
    t.set(0, 3, [Rat::zero(), be.clone(), nbe.clone(), Rat::zero()]);
    // A o A = alpha^2 O + (1-alpha^2) A
    t.set(1, 1, [al2.clone(), &one - &al2, Rat::zero(), Rat::zero()]);
    // A o B = alpha^2 O + alpha(1-alpha)(A + B) + (1-alpha)^2 AB
    t.set(
        1,
        2,
        [al2.clone(), &al * &nal, &al * &nal, &nal * &nal],
    );
    // A o AB = beta A + alpha(1-beta) B + (1-alpha)(1-beta) AB
    t.set(
        1,
        3,
        [Rat::zero(), be.clone(), &al * &nbe, &nal * &nbe],
    );
    // B o B = alpha^2 O + (1-alpha^2) B
    t.set(2, 2, [al2.clone(), Rat::zero(), &one - &al2, Rat::zero()]);
    // B o AB = alpha beta A + (1-beta) B + (1-alpha) beta AB
    t.set(
        2,
        3,
        [Rat::zero(), &al * &be, nbe.clone(), &nal * &be],
    );
    // AB o AB = beta^2 A + (1-beta)^2 B + 2 beta(1-beta) AB
    t.set(
        3,
        3,
        [
            Rat::zero(),
            &be * &be,
            &nbe * &nbe,
            rat(2, 1) * &be * &nbe,
        ],
    );
    t
}

/// Transformed-basis table over `(o, a, b, ab)` for exact `lambda`, `beta`;
/// `ab` annihilates everything.
pub fn transformed_table(lambda: &Rat, beta: &Rat) -> Tensor {
    let one = Rat::one();
    let la = lambda.clone();
    let be = beta.clone();
    let mu = (&la - &be) / &la; // a-coefficient of a o b
    let nu = (&la + &be - &one) / &la; // b-coefficient of a o b

    let mut t = Tensor::new();
    t.set(0, 0, [one.clone(), Rat::zero(), Rat::zero(), Rat::zero()]);
    t.set(0, 1, [Rat::zero(), la.clone(), Rat::zero(), Rat::zero()]);
    t.set(0, 2, [Rat::zero(), Rat::zero(), la.clone(), Rat::zero()]);
    t.set(1, 1, [Rat::zero(), one.clone(), Rat::zero(), Rat::zero()]);
    t.set(2, 2, [Rat::zero(), Rat::zero(), one.clone(), Rat::zero()]);
    t.set(1, 2, [Rat::zero(), mu, nu, one.clone()]);
    // rows touching ab stay zero
    t
}

pub fn multiply(t: &Tensor, x: &[Rat; 4], y: &[Rat; 4]) -> [Rat; 4] {
    let mut out = zero4();
    for i in 0..4 {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if y[j].is_zero() {
                continue;
            }
            let f = &x[i] * &y[j];
            for k in 0..4 {
                if !t.c[i][j][k].is_zero() {
                    out[k] += &f * &t.c[i][j][k];
                }
            }
        }
    }
    out
}

/// Rank of a row matrix by exact Gaussian elimination.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = m[r][col].clone();
        for x in m[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in 0..ncols {
                    let sub = &f * &m[r][c];
                    m[i][c] -= sub;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// `(2β−1)² − (1−3λ)(1−λ)`, the residual whose vanishing puts `(λ,β)` on the
/// degenerate curve `P`. It equals the denominator `−3λ²+4β²+4λ−4β` of the
/// interior idempotents `j0`, `j1`.
pub fn p_residual(lambda: &Rat, beta: &Rat) -> Rat {
    let one = Rat::one();
    let two_beta = rat(2, 1) * beta;
    let lhs = (&two_beta - &one) * (&two_beta - &one);
    let rhs = (&one - rat(3, 1) * lambda) * (&one - lambda);
    lhs - rhs
}

/// True when the rational lies strictly between 0 and 1.
pub fn in_open_unit(r: &Rat) -> bool {
    r.is_positive() && r < &Rat::one()
}
