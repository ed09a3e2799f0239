//! Ladder operators and the Hamiltonian as truncated matrices in the
//! pseudo-number basis, plus the Rayleigh–Ritz spectrum.
//!
//! Truncation to the leading `N × N` block is exact for `A`, `A†`, `A†A`
//! (hence `H`) and for products of two lowering or two raising operators.
//! `A A†` misses the single term `u_{N-1}² = N(2s+N-1)` in its last diagonal
//! entry, which shows up as a corner defect in `[A, A†]`.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::morse::{pseudo_wavefunctions, x_from_y, y_from_x, LogGrid, ShapeParams};
use crate::numerics::{symtridiag_eigen, DenseMatrix, QuadratureRule, SymTridiagonal};

/// Which side of the diagonal carries the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSide {
    Upper,
    Lower,
}

/// `A(s+k)` or `A†(s+k)` truncated to order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    params: ShapeParams,
    shift: i32,
    diag: Vec<f64>,
    band: Vec<f64>,
    side: BandSide,
}

impl BandedOperator {
    pub fn params(&self) -> ShapeParams {
        self.params
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn band(&self) -> &[f64] {
        &self.band
    }

    pub fn side(&self) -> BandSide {
        self.side
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        if m == n {
            return self.diag[m];
        }
        match self.side {
            BandSide::Upper if n == m + 1 => self.band[m],
            BandSide::Lower if m == n + 1 => self.band[n],
            _ => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        let side = match self.side {
            BandSide::Upper => BandSide::Lower,
            BandSide::Lower => BandSide::Upper,
        };
        Self { side, ..self.clone() }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.order(), |i, j| Complex64::new(self.get(i, j), 0.0))
    }
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(format!("truncation order must be at least 2, got {n}")));
    }
    Ok(())
}

/// Upper band of `A(s)`: `u_m = sqrt((m+1)(2s+m))`.
fn ladder_band(params: ShapeParams, n: usize) -> Vec<f64> {
    let s = params.s();
    (0..n - 1).map(|m| ((m as f64 + 1.0) * (2.0 * s + m as f64)).sqrt()).collect()
}

/// `⟨m|A(s+k)|n⟩ = sqrt(n(2s+m)) δ_{m+1,n} - (m-k) δ_{m,n}`.
pub fn matrix_a(params: ShapeParams, shift: i32, n: usize) -> Result<BandedOperator> {
    check_order(n)?;
    Ok(BandedOperator {
        params,
        shift,
        diag: (0..n).map(|m| (shift as i64 - m as i64) as f64).collect(),
        band: ladder_band(params, n),
        side: BandSide::Upper,
    })
}

/// `A†(s+k)`, the transpose of [`matrix_a`].
pub fn matrix_adag(params: ShapeParams, shift: i32, n: usize) -> Result<BandedOperator> {
    Ok(matrix_a(params, shift, n)?.transpose())
}

/// Truncated Hamiltonian `H(s) = A†(s) A(s) + E₀(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub params: ShapeParams,
    pub matrix: SymTridiagonal,
}

/// `diag_n = 2n(n+s-1/2) + E₀(s)`, `offdiag_{n,n+1} = -n sqrt((n+1)(2s+n))`.
pub fn matrix_h(params: ShapeParams, n: usize) -> Result<HamiltonianMatrix> {
    check_order(n)?;
    let s = params.s();
    let e0 = params.ground_energy();
    let diag = (0..n).map(|k| 2.0 * k as f64 * (k as f64 + s - 0.5) + e0).collect();
    let off = ladder_band(params, n).into_iter().enumerate().map(|(k, u)| -(k as f64) * u).collect();
    Ok(HamiltonianMatrix { params, matrix: SymTridiagonal::new(diag, off)? })
}

/// Entry `(m, n)` of the third line of the printed matrix-element table,
/// `(2n(n+s-1/2)+E₀) δ_{m,n} - (n-1) sqrt(n(2s+n-1)) δ_{m+1,n} - (m-1) sqrt(n(2s+n-1)) δ_{m,n+1}`.
///
/// This is not symmetric; kept only so that the quadrature oracle can show
/// which version of the off-diagonal is correct.
pub fn printed_h_entry(params: ShapeParams, m: usize, n: usize) -> f64 {
    let s = params.s();
    let (mf, nf) = (m as f64, n as f64);
    let root = (nf * (2.0 * s + nf - 1.0)).sqrt();
    if m == n {
        2.0 * nf * (nf + s - 0.5) + params.ground_energy()
    } else if m + 1 == n {
        -(nf - 1.0) * root
    } else if m == n + 1 {
        -(mf - 1.0) * root
    } else {
        0.0
    }
}

/// `Ma Mb - Mb Ma`.
pub fn commutator(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.order() != b.order() {
        return Err(Error::Shape(format!("commutator of orders {} and {}", a.order(), b.order())));
    }
    Ok(&(a * b) - &(b * a))
}

/// Lowest eigenvalues of the truncated Hamiltonian, with Ritz vectors on
/// request.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

pub fn spectrum(params: ShapeParams, n: usize, n_eigen: usize, want_vectors: bool) -> Result<Spectrum> {
    if n_eigen > n {
        return Err(domain(format!("asked for {n_eigen} eigenvalues of an order-{n} matrix")));
    }
    let h = matrix_h(params, n)?;
    let eig = symtridiag_eigen(&h.matrix, want_vectors)?;
    Ok(Spectrum {
        values: eig.values[..n_eigen].to_vec(),
        vectors: eig.vectors.map(|v| v.into_iter().take(n_eigen).collect()),
    })
}

/// Ritz values tracked under repeated doubling of the truncation order.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    /// `(N, lowest eigenvalues)` for each order visited.
    pub history: Vec<(usize, Vec<f64>)>,
    /// `|λ_i(N) - λ_i(N/2)|` at the final order.
    pub last_change: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn final_values(&self) -> &[f64] {
        &self.history.last().expect("non-empty history").1
    }

    pub fn final_order(&self) -> usize {
        self.history.last().expect("non-empty history").0
    }

    /// Whether index `i` changed by less than `tol` under the last doubling.
    pub fn has_plateau(&self, i: usize, tol: f64) -> bool {
        self.last_change.get(i).is_some_and(|c| *c < tol)
    }
}

/// Spectra at `n_start, 2 n_start, …` up to `n_final` (which must be
/// reached by doubling).
pub fn convergence_study(params: ShapeParams, n_eigen: usize, n_start: usize, n_final: usize) -> Result<ConvergenceStudy> {
    if n_start < 2 || n_final < n_start {
        return Err(domain("convergence study needs 2 <= n_start <= n_final"));
    }
    let mut history = Vec::new();
    let mut n = n_start;
    loop {
        history.push((n, spectrum(params, n, n_eigen.min(n), false)?.values));
        if n >= n_final {
            break;
        }
        n = (2 * n).min(n_final);
    }
    let last_change = match history.len() {
        1 => vec![f64::INFINITY; n_eigen],
        k => {
            let (prev, last) = (&history[k - 2].1, &history[k - 1].1);
            (0..n_eigen)
                .map(|i| match (prev.get(i), last.get(i)) {
                    (Some(a), Some(b)) => (a - b).abs(),
                    _ => f64::INFINITY,
                })
                .collect()
        }
    };
    Ok(ConvergenceStudy { history, last_change })
}

/// Operator choices for [`matrix_element_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOp {
    /// `A(s)`
    Lower,
    /// `A†(s)`
    Raise,
    /// `H(s)`
    Hamiltonian,
}

/// A value with a finite-difference error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error_bar: f64,
}

impl OracleEstimate {
    pub fn contains(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.error_bar
    }
}

const ORACLE_MAX_INDEX: usize = 30;
/// Floor on the error bar: quadrature and stencil rounding.
const ORACLE_FLOOR: f64 = 1e-10;

fn stencil_at(op: OracleOp, params: ShapeParams, n: usize, y: f64, h: f64) -> Result<f64> {
    let x = x_from_y(y)?;
    let phi = |x: f64| -> Result<f64> { Ok(pseudo_wavefunctions(n, params, y_from_x(x))?[n]) };
    let (fm, f0, fp) = (phi(x - h)?, phi(x)?, phi(x + h)?);
    let s = params.s();
    let ex = (-x).exp();
    Ok(match op {
        OracleOp::Lower => (s - ex) * f0 + (fp - fm) / (2.0 * h),
        OracleOp::Raise => (s - ex) * f0 - (fp - fm) / (2.0 * h),
        OracleOp::Hamiltonian => -(fp - 2.0 * f0 + fm) / (h * h) + (s + 0.5 - ex).powi(2) * f0,
    })
}

fn oracle_at_spacing(m: usize, n: usize, op: OracleOp, params: ShapeParams, rule: &QuadratureRule, h: f64) -> Result<f64> {
    let weights = rule.plain_weights();
    let mut acc = 0.0;
    for (&y, w) in rule.nodes().iter().zip(weights) {
        let bra = pseudo_wavefunctions(m, params, y)?[m];
        if bra == 0.0 {
            continue;
        }
        acc += w * bra * stencil_at(op, params, n, y, h)? / y;
    }
    Ok(acc)
}

/// `⟨φ_m | Op φ_n⟩` with `Op` applied by central differences in `x` (step
/// taken from `grid`) at every quadrature node and the integral taken with
/// the measure `dy/y`.
///
/// `rule` should be a Gauss–Laguerre rule with `α = 2s-1`. The error bar is
/// a Richardson estimate from a second evaluation at half the step, times
/// two, plus a small floor.
pub fn matrix_element_oracle(
    m: usize,
    n: usize,
    op: OracleOp,
    params: ShapeParams,
    rule: &QuadratureRule,
    grid: &LogGrid,
) -> Result<OracleEstimate> {
    if m > ORACLE_MAX_INDEX || n > ORACLE_MAX_INDEX {
        return Err(domain(format!("oracle supports indices up to {ORACLE_MAX_INDEX}")));
    }
    let h = grid.spacing();
    let coarse = oracle_at_spacing(m, n, op, params, rule, h)?;
    let fine = oracle_at_spacing(m, n, op, params, rule, 0.5 * h)?;
    // coarse - exact ≈ (4/3)(coarse - fine) for an O(h²) stencil
    let error_bar = 2.0 * (4.0 / 3.0) * (coarse - fine).abs() + ORACLE_FLOOR;
    Ok(OracleEstimate { value: coarse, error_bar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sp(s: f64) -> ShapeParams {
        ShapeParams::new(s).unwrap()
    }

    #[test]
    fn lowering_matrix_small() {
        let a = matrix_a(sp(1.0), 0, 3).unwrap();
        assert_abs_diff_eq!(a.band()[0], 2f64.sqrt());
        assert_abs_diff_eq!(a.band()[1], 6f64.sqrt());
        assert_eq!(a.diag(), &[0.0, -1.0, -2.0]);
        for m in 0..3 {
            assert_eq!(a.get(m, 0), 0.0);
        }
        assert!(matrix_a(sp(1.0), 0, 1).is_err());
    }

    #[test]
    fn raising_is_transpose() {
        let a = matrix_a(sp(1.3), 2, 6).unwrap();
        let ad = matrix_adag(sp(1.3), 2, 6).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                assert_eq!(a.get(m, n), ad.get(n, m));
            }
        }
    }

    #[test]
    fn shift_adds_identity() {
        let a0 = matrix_a(sp(1.7), 0, 8).unwrap();
        let a2 = matrix_a(sp(1.7), 2, 8).unwrap();
        for m in 0..8 {
            for n in 0..8 {
                let expect = if m == n { 2.0 } else { 0.0 };
                assert_eq!(a2.get(m, n) - a0.get(m, n), expect);
            }
        }
    }

    #[test]
    fn hamiltonian_small() {
        let h = matrix_h(sp(1.0), 3).unwrap();
        assert_eq!(h.matrix.diag(), &[1.25, 4.25, 11.25]);
        assert_eq!(h.matrix.offdiag()[0], 0.0);
        assert_abs_diff_eq!(h.matrix.offdiag()[1], -(6f64.sqrt()), epsilon = 1e-15);
    }

    #[test]
    fn ground_state_is_exact_eigenvector() {
        let h = matrix_h(sp(2.2), 10).unwrap();
        let mut e0 = vec![0.0; 10];
        e0[0] = 1.0;
        let he0 = h.matrix.apply(&e0);
        assert_eq!(he0[0], sp(2.2).ground_energy());
        assert!(he0[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn commutator_shape_mismatch() {
        assert!(commutator(&DenseMatrix::identity(2), &DenseMatrix::identity(3)).is_err());
    }

    #[test]
    fn printed_entry_is_asymmetric() {
        let p = sp(1.75);
        assert!(printed_h_entry(p, 1, 2) != printed_h_entry(p, 2, 1));
    }

    #[test]
    fn spectrum_validation() {
        assert!(spectrum(sp(1.0), 4, 5, false).is_err());
        let sp0 = spectrum(sp(3.6), 50, 3, true).unwrap();
        assert_eq!(sp0.values[0], 3.85);
        assert_eq!(sp0.vectors.unwrap().len(), 3);
    }
}
