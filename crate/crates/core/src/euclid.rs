//! Euclidean n-space: flat geometry, rigid motions, and their splitting.
//!
//! An isometry is stored as an orthogonal matrix `q` and a translation part
//! `v`, acting by `x -> q x + v`. Classification rests on the orthogonal
//! splitting R^n = ker(q - 1) (+) im(q - 1): the displacement field
//! `q x + v - x` has constant component `v0` along the kernel, so the
//! minimal displacement is `|v0|`. Zero minimum means a fixed point exists
//! (elliptic); otherwise the motion translates by `|v0|` along an invariant
//! axis. Parabolic motions do not exist here.

use crate::error::{Cat0Error, Result};

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn scale(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|a| a * s).collect()
}

pub fn axpy(x: &[f64], s: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + s * b).collect()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    norm(&sub(x, y))
}

pub fn normalize(x: &[f64]) -> Result<Vec<f64>> {
    let n = norm(x);
    if n < 1e-300 {
        return Err(Cat0Error::InvalidPoint("cannot normalize zero vector".into()));
    }
    Ok(scale(x, 1.0 / n))
}

// ---------------------------------------------------------------------------
// Rigid motions
// ---------------------------------------------------------------------------

/// A rigid motion `x -> q x + v` with `q` orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclIso {
    q: Vec<Vec<f64>>,
    v: Vec<f64>,
}

/// Outcome of splitting a rigid motion.
#[derive(Clone, Debug, PartialEq)]
pub enum EuclClass {
    Identity,
    /// Fixed point exists (includes rotations and point reflections).
    Elliptic { fixed: Vec<f64> },
    /// No fixed point: translation by `tau` along the axis through `base`
    /// in direction `dir` (unit), possibly combined with rotation about it.
    Axial {
        tau: f64,
        base: Vec<f64>,
        dir: Vec<f64>,
    },
}

impl EuclIso {
    pub fn new(q: Vec<Vec<f64>>, v: Vec<f64>) -> Result<EuclIso> {
        let n = v.len();
        if q.len() != n || q.iter().any(|row| row.len() != n) {
            return Err(Cat0Error::InvalidPoint(
                "matrix and translation dimensions disagree".into(),
            ));
        }
        // Orthogonality: columns pairwise orthonormal.
        for i in 0..n {
            for j in i..n {
                let col_dot: f64 = (0..n).map(|k| q[k][i] * q[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (col_dot - want).abs() > 1e-8 {
                    return Err(Cat0Error::InvalidPoint(format!(
                        "matrix is not orthogonal (col {i}.col {j} = {col_dot})"
                    )));
                }
            }
        }
        Ok(EuclIso { q, v })
    }

    pub fn translation(v: Vec<f64>) -> EuclIso {
        let n = v.len();
        let mut q = vec![vec![0.0; n]; n];
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        EuclIso { q, v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn shift(&self) -> &[f64] {
        &self.v
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.v.clone();
        for (i, row) in self.q.iter().enumerate() {
            out[i] += dot(row, x);
        }
        out
    }

    /// Image of a boundary direction: `q u` (translation part vanishes at
    /// infinity).
    pub fn apply_direction(&self, u: &[f64]) -> Vec<f64> {
        self.q.iter().map(|row| dot(row, u)).collect()
    }

    pub fn compose(&self, other: &EuclIso) -> EuclIso {
        // (q1, v1) . (q2, v2) : x -> q1 q2 x + q1 v2 + v1
        let n = self.dim();
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                q[i][j] = (0..n).map(|k| self.q[i][k] * other.q[k][j]).sum();
            }
        }
        let v = add(&self.apply_direction(&other.v), &self.v);
        EuclIso { q, v }
    }

    pub fn inverse(&self) -> EuclIso {
        // q^T (x - v)
        let n = self.dim();
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                q[i][j] = self.q[j][i];
            }
        }
        let mut v = vec![0.0; n];
        for (i, row) in q.iter().enumerate() {
            v[i] = -dot(row, &self.v);
        }
        EuclIso { q, v }
    }

    pub fn is_identity(&self, eps: f64) -> bool {
        let n = self.dim();
        self.v.iter().all(|x| x.abs() < eps)
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    let want = if i == j { 1.0 } else { 0.0 };
                    (self.q[i][j] - want).abs() < eps
                })
            })
    }

    /// Splits the motion: fixed point, or invariant axis with translation
    /// length. `eps` decides when the minimal displacement counts as zero.
    pub fn classify(&self, eps: f64) -> Result<EuclClass> {
        if self.is_identity(eps) {
            return Ok(EuclClass::Identity);
        }
        let n = self.dim();
        // A = q - 1; minimize |A x + v| via the normal equations
        // A^T A x = -A^T v (consistent since v's image part lies in im A).
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = self.q[i][j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        let mut ata = vec![vec![0.0; n]; n];
        let mut atv = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                ata[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum();
            }
            atv[i] = -(0..n).map(|k| a[k][i] * self.v[k]).sum::<f64>();
        }
        let x = gauss_particular(&mut ata, &mut atv, 1e-9)?;
        // Residual displacement at the optimum.
        let v0 = sub(&self.apply(&x), &x);
        let tau = norm(&v0);
        if tau < eps {
            Ok(EuclClass::Elliptic { fixed: x })
        } else {
            Ok(EuclClass::Axial {
                tau,
                base: x,
                dir: scale(&v0, 1.0 / tau),
            })
        }
    }
}

/// Particular solution of a consistent (possibly singular) linear system by
/// Gaussian elimination with partial pivoting; free variables are set to 0.
fn gauss_particular(m: &mut [Vec<f64>], rhs: &mut [f64], tol: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut pivot_col: Vec<Option<usize>> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        // Find the largest pivot in this column.
        let (best, mag) = (row..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((row, 0.0));
        if mag <= tol {
            pivot_col.push(None);
            continue;
        }
        m.swap(row, best);
        rhs.swap(row, best);
        let p = m[row][col];
        for r in 0..n {
            if r != row && m[r][col].abs() > 0.0 {
                let f = m[r][col] / p;
                for c in col..n {
                    m[r][c] -= f * m[row][c];
                }
                rhs[r] -= f * rhs[row];
            }
        }
        pivot_col.push(Some(row));
        row += 1;
        if row == n {
            while pivot_col.len() < n {
                pivot_col.push(None);
            }
            break;
        }
    }
    // Consistency: zero rows must have (near-)zero right-hand side.
    for r in row..n {
        if rhs[r].abs() > 1e-6 {
            return Err(Cat0Error::Inconclusive(
                "normal equations inconsistent beyond tolerance".into(),
            ));
        }
    }
    let mut x = vec![0.0; n];
    for (col, &pc) in pivot_col.iter().enumerate() {
        if let Some(r) = pc {
            x[col] = rhs[r] / m[r][col];
        }
    }
    Ok(x)
}

/// Busemann function of the boundary direction `u` (unit vector):
/// b_u(y, z) = <y - z, u>, decreasing at unit rate along rays towards `u`.
pub fn busemann(u: &[f64], y: &[f64], z: &[f64]) -> f64 {
    dot(&sub(y, z), u)
}

/// Angular (visual) distance between unit directions, in [0, pi].
pub fn direction_angle(u: &[f64], v: &[f64]) -> f64 {
    dot(u, v).clamp(-1.0, 1.0).acos()
}
