//! Shape parameter, pseudo-number-state wavefunctions and coordinate-space
//! finite-difference versions of the ladder operators.
//!
//! Coordinates: `x` is the dimensionless position, `y = 2 e^{-x}`. The
//! Hilbert space is `L²(ℝ, dx) = L²((0, ∞), dy/y)`. In `x`,
//!
//! ```text
//! A(s)  = s - e^{-x} + d/dx
//! A†(s) = s - e^{-x} - d/dx
//! H(s)  = -d²/dx² + (s + 1/2 - e^{-x})² = A†(s) A(s) + s + 1/4
//! ```

use crate::error::{domain, require_finite, Error, Result};
use crate::numerics::special::{digamma, laguerre_scaled, log_binomial, log_gamma, Scaled};

/// The dimensionless shape parameter `s > 0` of `H(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    s: f64,
}

/// Number of normalizable eigenstates, with a flag for integer `s`, where
/// the top state sits exactly at the continuum threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundStateCount {
    pub count: usize,
    pub marginal: bool,
}

impl ShapeParams {
    pub fn new(s: f64) -> Result<Self> {
        require_finite("s", s)?;
        if s <= 0.0 {
            return Err(domain(format!("shape parameter must be positive, got {s}")));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Laguerre parameter `2s - 1` of the basis functions.
    pub fn laguerre_alpha(&self) -> f64 {
        2.0 * self.s - 1.0
    }

    /// `E₀(s) = s + 1/4`, the constant in `H = A†A + E₀`.
    pub fn ground_energy(&self) -> f64 {
        self.s + 0.25
    }

    /// Continuum threshold `(s + 1/2)²`.
    pub fn threshold(&self) -> f64 {
        (self.s + 0.5).powi(2)
    }

    /// `floor(s + 1)`; integer `s` is flagged as marginal.
    pub fn bound_state_count(&self) -> BoundStateCount {
        BoundStateCount {
            count: (self.s + 1.0).floor() as usize,
            marginal: self.s.fract() == 0.0,
        }
    }

    /// `E_n(s) = s + 1/4 + n(2s - n)`, from the shape-invariance chain
    /// `E_n(s) = E_{n-1}(s-1) + R(s-1)` with `R(s) = 2(s+1)`.
    pub fn bound_energy(&self, n: usize) -> Result<f64> {
        let BoundStateCount { count, .. } = self.bound_state_count();
        if n >= count {
            return Err(domain(format!("level {n} is not bound for s = {} ({count} bound states)", self.s)));
        }
        let nf = n as f64;
        Ok(self.ground_energy() + nf * (2.0 * self.s - nf))
    }

    /// Reading of the energy sum with `E₀` kept at the unshifted parameter:
    /// `E₀(s) + Σ_{k=1}^{n} R(s-k) = s + 1/4 + n(2s - n + 1)`.
    ///
    /// Only used to show that the Rayleigh–Ritz spectrum rejects it.
    pub fn bound_energy_unshifted_sum(&self, n: usize) -> f64 {
        self.ground_energy() + (1..=n).map(|k| 2.0 * (self.s - k as f64 + 1.0)).sum::<f64>()
    }

    /// `⟨0|X|0⟩ = ln 2 - ψ(2s)`.
    pub fn ground_x_expectation(&self) -> Result<f64> {
        Ok(std::f64::consts::LN_2 - digamma(2.0 * self.s)?)
    }

    /// `ln` of the normalization `(Γ(2s) C(n+2s-1, n))^{-1/2}`.
    fn log_norm(&self, n: usize) -> Result<f64> {
        Ok(-0.5 * (log_gamma(2.0 * self.s)? + log_binomial(n, self.laguerre_alpha())?))
    }
}

pub fn y_from_x(x: f64) -> f64 {
    2.0 * (-x).exp()
}

pub fn x_from_y(y: f64) -> Result<f64> {
    require_finite("y", y)?;
    if y <= 0.0 {
        return Err(domain(format!("y must be positive, got {y}")));
    }
    Ok((2.0 / y).ln())
}

/// `C_n = sqrt(n (2s + n - 1))`, `n ≥ 1`.
pub fn norm_coefficient(n: usize, params: ShapeParams) -> Result<f64> {
    if n == 0 {
        return Err(domain("C_n is defined for n >= 1"));
    }
    let nf = n as f64;
    Ok((nf * (2.0 * params.s + nf - 1.0)).sqrt())
}

fn check_y(y: f64) -> Result<()> {
    require_finite("y", y)?;
    if y <= 0.0 {
        return Err(domain(format!("y must be positive, got {y}")));
    }
    Ok(())
}

/// Closed form of the pseudo-number wavefunction,
/// `φ_n(y) = (Γ(2s) C(n+2s-1, n))^{-1/2} y^s e^{-y/2} L_n^{2s-1}(y)`,
/// assembled in log space.
pub fn pseudo_wavefunction(n: usize, params: ShapeParams, y: f64) -> Result<f64> {
    check_y(y)?;
    let lag = laguerre_scaled(n, params.laguerre_alpha(), y)?;
    let envelope = params.log_norm(n)? + params.s * y.ln() - 0.5 * y;
    Ok(lag.exp_times(envelope))
}

/// `[φ_0(y), …, φ_{n_max}(y)]` in one recurrence pass.
pub fn pseudo_wavefunctions(n_max: usize, params: ShapeParams, y: f64) -> Result<Vec<f64>> {
    check_y(y)?;
    let alpha = params.laguerre_alpha();
    let base = params.s * y.ln() - 0.5 * y - 0.5 * log_gamma(2.0 * params.s)?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = 0.0;
    // C(n+α, n) builds up as Π (k+α)/k
    let mut log_binom = 0.0;
    for n in 0..=n_max {
        if n >= 1 {
            let nf = n as f64;
            let next = if n == 1 {
                1.0 + alpha - y
            } else {
                ((2.0 * nf - 1.0 + alpha - y) * cur - (nf - 1.0 + alpha) * prev) / nf
            };
            prev = cur;
            cur = next;
            log_binom += ((nf + alpha) / nf).ln();
            if cur.abs() > 1e200 {
                prev *= 1e-200;
                cur *= 1e-200;
                log_scale += 200.0 * std::f64::consts::LN_10;
            }
        }
        let lag = Scaled { mantissa: cur, log_scale };
        out.push(lag.exp_times(base - 0.5 * log_binom));
    }
    Ok(out)
}

/// `φ_n` built by applying `C_k^{-1}(y ∂_y + (s+k-1) - y/2)` to `φ_0`
/// `n` times, with derivatives carried exactly.
///
/// Writing `φ_k = y^s e^{-y/2} q_k`, each step maps
/// `q ↦ (y q' + (2s+k-1-y) q) / C_k`. The j-th derivative of the image needs
/// derivatives `j-1..=j+1` of `q`, so step `k` keeps a tower of
/// `n - k + 1` derivatives evaluated at the fixed point `y`.
pub fn pseudo_wavefunction_recursive(n: usize, params: ShapeParams, y: f64) -> Result<f64> {
    check_y(y)?;
    let s = params.s;
    let mut tower = vec![0.0; n + 1];
    tower[0] = 1.0;
    let mut log_scale = 0.0;
    for k in 1..=n {
        let c = 2.0 * s + k as f64 - 1.0;
        let ck = norm_coefficient(k, params)?;
        let depth = n - k;
        let mut next = vec![0.0; depth + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            let jf = j as f64;
            let lower = if j > 0 { jf * tower[j - 1] } else { 0.0 };
            *slot = (y * tower[j + 1] + (jf + c - y) * tower[j] - lower) / ck;
        }
        let peak = next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if peak > 1e200 {
            next.iter_mut().for_each(|v| *v *= 1e-200);
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
        tower = next;
    }
    let q = Scaled { mantissa: tower[0], log_scale };
    Ok(q.exp_times(s * y.ln() - 0.5 * y - 0.5 * log_gamma(2.0 * s)?))
}

/// Uniform grid in `x` for the finite-difference oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl LogGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        require_finite("x_min", x_min)?;
        require_finite("x_max", x_max)?;
        if x_min >= x_max {
            return Err(domain(format!("grid needs x_min < x_max, got {x_min} >= {x_max}")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(domain(format!("grid needs at least {} points, got {n_points}", Self::MIN_POINTS)));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points - 1, ..*self }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_points).map(|i| f(self.x(i))).collect()
    }
}

/// Operators available to the finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOperator {
    /// `A(s + k)`
    Lower(i32),
    /// `A†(s + k)`
    Raise(i32),
    /// `H(s)`
    Hamiltonian,
    /// `Hᵖ(s) = A(s) A†(s) + E₀(s)`, composed from the two first-order
    /// stencils.
    Partner,
}

impl FdOperator {
    /// Grid points lost at each end.
    pub fn margin(&self) -> usize {
        match self {
            FdOperator::Partner => 2,
            _ => 1,
        }
    }
}

/// Output of a stencil application: `values[i]` belongs to grid index
/// `first_index + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSamples {
    pub first_index: usize,
    pub values: Vec<f64>,
}

impl FdSamples {
    /// Discrete `L²(dx)` norm by the trapezoid rule (endpoint values of the
    /// covered range weighted by one half).
    pub fn l2_norm(&self, h: f64) -> f64 {
        let n = self.values.len();
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 || i + 1 == n { 0.5 * v * v } else { v * v })
            .sum();
        (h * sum).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn first_order(shift: f64, sign: f64, grid: &LogGrid, f: &[f64], first: usize) -> Vec<f64> {
    let h = grid.spacing();
    // f[i] belongs to grid index first + i; output covers first+1 ..= first+len-2
    (1..f.len() - 1)
        .map(|i| {
            let x = grid.x(first + i);
            let deriv = (f[i + 1] - f[i - 1]) / (2.0 * h);
            (shift - (-x).exp()) * f[i] + sign * deriv
        })
        .collect()
}

/// Central second-order finite-difference application of `op` to samples of
/// a function on `grid`.
pub fn apply_operator_fd(op: FdOperator, params: ShapeParams, grid: &LogGrid, samples: &[f64]) -> Result<FdSamples> {
    if samples.len() < 5 {
        return Err(domain(format!("finite differences need at least 5 samples, got {}", samples.len())));
    }
    if samples.len() != grid.n_points() {
        return Err(Error::Shape(format!(
            "{} samples for a grid of {} points",
            samples.len(),
            grid.n_points()
        )));
    }
    let s = params.s;
    let values = match op {
        FdOperator::Lower(k) => first_order(s + k as f64, 1.0, grid, samples, 0),
        FdOperator::Raise(k) => first_order(s + k as f64, -1.0, grid, samples, 0),
        FdOperator::Hamiltonian => {
            let h2 = grid.spacing().powi(2);
            (1..samples.len() - 1)
                .map(|i| {
                    let x = grid.x(i);
                    let lap = (samples[i + 1] - 2.0 * samples[i] + samples[i - 1]) / h2;
                    -lap + (s + 0.5 - (-x).exp()).powi(2) * samples[i]
                })
                .collect()
        }
        FdOperator::Partner => {
            let raised = first_order(s, -1.0, grid, samples, 0);
            first_order(s, 1.0, grid, &raised, 1)
                .into_iter()
                .enumerate()
                .map(|(i, v)| v + params.ground_energy() * samples[i + 2])
                .collect()
        }
    };
    Ok(FdSamples { first_index: op.margin(), values })
}

/// Max-norm over the common interior of `[A(s)A†(s) + E₀(s)] f - [H(s-1) + 2s] f`.
pub fn shape_invariance_residual(params: ShapeParams, grid: &LogGrid, samples: &[f64]) -> Result<f64> {
    if params.s <= 1.0 {
        return Err(domain(format!("shape invariance check needs s > 1, got {}", params.s)));
    }
    let partner = apply_operator_fd(FdOperator::Partner, params, grid, samples)?;
    let lowered = ShapeParams::new(params.s - 1.0)?;
    let ham = apply_operator_fd(FdOperator::Hamiltonian, lowered, grid, samples)?;
    let offset = partner.first_index - ham.first_index;
    Ok(partner
        .values
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let idx = partner.first_index + i;
            let rhs = ham.values[i + offset] + 2.0 * params.s * samples[idx];
            (p - rhs).abs()
        })
        .fold(0.0, f64::max))
}
