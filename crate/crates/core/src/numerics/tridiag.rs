//! Real symmetric tridiagonal eigenproblem (implicit QL with Wilkinson shifts).

use crate::error::{domain, Error, Result};

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    /// `offdiag[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(domain("tridiagonal matrix must have order >= 1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::Shape(format!(
                "offdiagonal length {} does not match order {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(domain("tridiagonal entries must be finite"));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.offdiag[i]
        } else if i == j + 1 {
            self.offdiag[j]
        } else {
            0.0
        }
    }

    /// `T v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.order();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Max-row-sum norm, which bounds the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.order();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].abs();
                if i > 0 {
                    acc += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    acc += self.offdiag[i].abs();
                }
                acc
            })
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition result. `vectors[j]` is the unit eigenvector for
/// `values[j]`.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

const MAX_SWEEPS_PER_VALUE: usize = 60;

/// Eigenvalues in ascending order and, on request, orthonormal
/// eigenvectors.
///
/// Blocks split off by an exactly-zero off-diagonal entry are never touched
/// by rotations from neighbouring blocks, so a decoupled diagonal entry is
/// returned bit-exactly.
pub fn symtridiag_eigen(t: &SymTridiagonal, want_vectors: bool) -> Result<TridiagEigen> {
    let n = t.order();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    // column-major: z[col * n + row]
    let mut z = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Some(z)
    } else {
        None
    };

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_VALUE {
                return Err(Error::Capability(format!(
                    "QL iteration failed to converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let col_i = &mut lo[i * n..];
                    let col_next = &mut hi[..n];
                    for k in 0..n {
                        let f = col_next[k];
                        col_next[k] = s * col_i[k] + c * f;
                        col_i[k] = c * col_i[k] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| order.iter().map(|&j| z[j * n..(j + 1) * n].to_vec()).collect());
    Ok(TridiagEigen { values, vectors })
}
