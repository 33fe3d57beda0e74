//! Tolerance-aware dense linear algebra on row vectors of dimension 4 or 16.
//!
//! Everything here reduces to one primitive: reduced row echelon form with
//! partial pivoting and a zero threshold relative to the largest entry of
//! the input. Subspaces are stored as their canonical echelon basis, which
//! makes equality a pair of containment checks.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimension {0} unsupported; only 4 and 16 are used here")]
    BadAmbient(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A linear subspace of R^4 or R^16, held as reduced echelon basis rows.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<f64>>,
    pivots: Vec<usize>,
    tol: f64,
}

fn check_ambient(n: usize) -> Result<(), LinalgError> {
    if n == 4 || n == 16 {
        Ok(())
    } else {
        Err(LinalgError::BadAmbient(n))
    }
}

impl Subspace {
    /// The zero subspace.
    pub fn zero(ambient: usize, tol: f64) -> Result<Self, LinalgError> {
        check_ambient(ambient)?;
        Ok(Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            tol,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis_rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// True iff `v` lies in the subspace: after eliminating the pivot
    /// coordinates the remainder must be below `tol * (1 + |v|_inf)`.
    pub fn contains(&self, v: &[f64]) -> Result<bool, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let scale = 1.0 + inf_norm(v);
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = r[p];
            if f != 0.0 {
                for (ri, wi) in r.iter_mut().zip(row) {
                    *ri -= f * wi;
                }
            }
        }
        Ok(inf_norm(&r) <= self.tol * scale)
    }

    /// Mutual containment of basis rows.
    pub fn equal(&self, other: &Subspace) -> Result<bool, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                got: other.ambient,
            });
        }
        if self.dim() != other.dim() {
            return Ok(false);
        }
        for row in &self.rows {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        for row in &other.rows {
            if !self.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Echelon basis of the span of `vectors`.
///
/// Pivots are chosen column-by-column as the largest remaining |entry|
/// (ties: lowest row index); entries at or below `tol * max_input_entry`
/// are treated as zero. Deterministic for a given input order.
pub fn span(vectors: &[Vec<f64>], tol: f64) -> Result<Subspace, LinalgError> {
    let Some(first) = vectors.first() else {
        return Err(LinalgError::BadAmbient(0));
    };
    let ambient = first.len();
    check_ambient(ambient)?;
    for v in vectors {
        if v.len() != ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient,
                got: v.len(),
            });
        }
    }

    let scale = vectors.iter().map(|v| inf_norm(v)).fold(0.0, f64::max);
    let thresh = tol * scale;
    let mut m: Vec<Vec<f64>> = vectors.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ambient {
        let mut best = r;
        let mut best_val = 0.0;
        for (i, row) in m.iter().enumerate().skip(r) {
            let v = row[col].abs();
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        if best_val <= thresh {
            continue;
        }
        m.swap(r, best);
        let inv = m[r][col];
        for x in m[r].iter_mut() {
            *x /= inv;
        }
        m[r][col] = 1.0; // exact pivot
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col] == 0.0 {
                continue;
            }
            let f = row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            row[col] = 0.0;
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    // Clean residual noise so re-reduction is a fixed point.
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            if x.abs() <= thresh {
                *x = 0.0;
            }
        }
    }
    Ok(Subspace {
        ambient,
        rows: m,
        pivots,
        tol,
    })
}

/// Span of the union of a subspace's basis with extra vectors.
pub fn extend(s: &Subspace, extra: &[Vec<f64>], tol: f64) -> Result<Subspace, LinalgError> {
    let mut all: Vec<Vec<f64>> = s.rows.clone();
    all.extend_from_slice(extra);
    if all.is_empty() {
        return Subspace::zero(s.ambient(), tol);
    }
    span(&all, tol)
}
