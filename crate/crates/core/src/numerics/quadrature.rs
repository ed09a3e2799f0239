//! Gaussian quadrature by the Golub–Welsch construction.

use crate::error::{domain, require_finite, Error, Result};
use crate::numerics::special::log_gamma;
use crate::numerics::tridiag::{symtridiag_eigen, SymTridiagonal};

/// Largest supported number of quadrature points.
pub const MAX_POINTS: usize = 512;

/// Gauss rule for the weight `y^α e^{-y}` on `(0, ∞)`.
///
/// Weights far out in the tail are below the smallest positive double for
/// large rules; `log_weights` always holds them exactly and `weights` holds
/// their (possibly flushed-to-zero) exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f(y) y^α e^{-y} dy`.
    pub fn integrate_weighted(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }

    /// Weights for the bare measure `dy`: `w_i · y_i^{-α} e^{y_i}`.
    ///
    /// These stay representable even where the weighted ones underflow.
    pub fn plain_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&y, &lw)| (lw + y - self.alpha * y.ln()).exp())
            .collect()
    }

    /// `∫ g(y) dy` for integrands that carry the decay `y^α e^{-y}`
    /// themselves.
    pub fn integrate_plain(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(self.plain_weights()).map(|(&y, w)| w * g(y)).sum()
    }
}

/// Nodes and log-weights of the Gauss rule whose Jacobi matrix has
/// diagonal `a` and off-diagonal `b`, with zeroth moment `exp(log_mu0)`.
///
/// Nodes are the eigenvalues of the Jacobi matrix. Each weight is
/// `μ0 v_0²`, where the first eigenvector component `v_0` is obtained from
/// the eigenvector's own three-term recurrence evaluated at the node, which
/// keeps tiny tail weights relatively accurate.
fn golub_welsch(a: Vec<f64>, b: Vec<f64>, log_mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let jacobi = SymTridiagonal::new(a.clone(), b.clone())?;
    let nodes = symtridiag_eigen(&jacobi, false)?.values;
    let n = nodes.len();
    let log_weights = nodes
        .iter()
        .map(|&x| {
            // unnormalised eigenvector: p_0 = 1, b_k p_k = (x - a_{k-1}) p_{k-1} - b_{k-1} p_{k-2}
            let mut prev = 0.0;
            let mut cur = 1.0;
            let mut sum_sq = 1.0;
            let mut log_scale = 0.0;
            for k in 1..n {
                let back = if k >= 2 { b[k - 2] } else { 0.0 };
                let next = ((x - a[k - 1]) * cur - back * prev) / b[k - 1];
                prev = cur;
                cur = next;
                sum_sq += cur * cur;
                if sum_sq > 1e200 {
                    let f = 1e-100;
                    prev *= f;
                    cur *= f;
                    sum_sq *= f * f;
                    log_scale += 2.0 * 100.0 * std::f64::consts::LN_10;
                }
            }
            log_mu0 - sum_sq.ln() - log_scale
        })
        .collect();
    Ok((nodes, log_weights))
}

fn check_points(n_points: usize) -> Result<()> {
    if n_points == 0 {
        return Err(domain("a quadrature rule needs at least one point"));
    }
    if n_points > MAX_POINTS {
        return Err(Error::Capability(format!(
            "{n_points} quadrature points requested, at most {MAX_POINTS} supported"
        )));
    }
    Ok(())
}

/// Generalized Gauss–Laguerre rule for the weight `y^α e^{-y}`.
pub fn gauss_laguerre_rule(n_points: usize, alpha: f64) -> Result<QuadratureRule> {
    check_points(n_points)?;
    require_finite("alpha", alpha)?;
    if alpha <= -1.0 {
        return Err(domain(format!("Laguerre weight exponent must exceed -1, got {alpha}")));
    }
    let a = (0..n_points).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let b = (1..n_points).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    let (nodes, log_weights) = golub_welsch(a, b, log_gamma(alpha + 1.0)?)?;
    let weights = log_weights.iter().map(|lw| lw.exp()).collect();
    Ok(QuadratureRule { alpha, nodes, weights, log_weights })
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `u^a (1-u)^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitJacobiRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitJacobiRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * f(u)).sum()
    }
}

/// Gauss–Jacobi rule on `[0, 1]` for `u^a (1-u)^b`, `a, b > -1`.
///
/// Built on `[-1, 1]` with the weight `(1-t)^b (1+t)^a` and mapped by
/// `u = (1+t)/2`.
pub fn gauss_jacobi_unit_rule(n_points: usize, a: f64, b: f64) -> Result<UnitJacobiRule> {
    check_points(n_points)?;
    require_finite("a", a)?;
    require_finite("b", b)?;
    if a <= -1.0 || b <= -1.0 {
        return Err(domain(format!("Jacobi exponents must exceed -1, got ({a}, {b})")));
    }
    // standard Jacobi notation on [-1, 1]: (1-t)^al (1+t)^be
    let (al, be) = (b, a);
    let ab = al + be;
    let diag = (0..n_points)
        .map(|k| {
            if k == 0 {
                (be - al) / (ab + 2.0)
            } else {
                let c = 2.0 * k as f64 + ab;
                (be * be - al * al) / (c * (c + 2.0))
            }
        })
        .collect();
    let off = (1..n_points)
        .map(|k| {
            let kf = k as f64;
            let c = 2.0 * kf + ab;
            if k == 1 {
                (4.0 * (1.0 + al) * (1.0 + be) / (c * c * (c + 1.0))).sqrt()
            } else {
                (4.0 * kf * (kf + al) * (kf + be) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))).sqrt()
            }
        })
        .collect();
    let log_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + log_gamma(al + 1.0)? + log_gamma(be + 1.0)?
        - log_gamma(ab + 2.0)?;
    let (t_nodes, log_w) = golub_welsch(diag, off, log_mu0)?;
    let jac = -(ab + 1.0) * std::f64::consts::LN_2;
    Ok(UnitJacobiRule {
        a,
        b,
        nodes: t_nodes.iter().map(|t| 0.5 * (1.0 + t)).collect(),
        weights: log_w.iter().map(|lw| (lw + jac).exp()).collect(),
    })
}

/// Gauss–Legendre rule on `[lo, hi]` as `(nodes, weights)`.
pub fn gauss_legendre(n_points: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let unit = gauss_jacobi_unit_rule(n_points, 0.0, 0.0)?;
    let width = hi - lo;
    Ok((
        unit.nodes.iter().map(|u| lo + width * u).collect(),
        unit.weights.iter().map(|w| width * w).collect(),
    ))
}
