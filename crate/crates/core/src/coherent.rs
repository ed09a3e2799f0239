//! Coherent states `|β⟩` over the pseudo-number basis.
//!
//! Complex powers such as `(1-β)^{-2s}` use the principal branch throughout;
//! every base involved has positive real part on the open unit disk, so the
//! phases of the closed forms, the phase factor and the displacement
//! operator agree with one another.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{domain, require_finite, Error, Result};
use crate::morse::{pseudo_wavefunctions, x_from_y, ShapeParams};
use crate::numerics::{
    digamma, gauss_jacobi_unit_rule, gauss_legendre, laguerre_sequence, log_binomial, log_gamma, matrix_exp,
    DenseMatrix, QuadratureRule,
};
use crate::operators::{matrix_a, matrix_adag};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    beta: Complex64,
}

impl CoherentLabel {
    pub fn new(beta: Complex64) -> Result<Self> {
        require_finite("Re beta", beta.re)?;
        require_finite("Im beta", beta.im)?;
        if beta.norm() >= 1.0 {
            return Err(domain(format!("|beta| must be below 1, got {}", beta.norm())));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `w = (1+β)/(1-β)`, which has positive real part.
    pub fn w(&self) -> Complex64 {
        (1.0 + self.beta) / (1.0 - self.beta)
    }

    /// `ln(1 - |β|²)`, accurate for small `|β|`.
    fn ln_one_minus_norm_sqr(&self) -> f64 {
        (-self.beta.norm_sqr()).ln_1p()
    }
}

/// Position/momentum labels `(x̃, p̃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceLabel {
    pub x_tilde: f64,
    pub p_tilde: f64,
}

impl PhaseSpaceLabel {
    pub fn new(x_tilde: f64, p_tilde: f64) -> Result<Self> {
        require_finite("x_tilde", x_tilde)?;
        require_finite("p_tilde", p_tilde)?;
        Ok(Self { x_tilde, p_tilde })
    }
}

/// Truncated coefficient vector of `|β⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub params: ShapeParams,
    pub label: CoherentLabel,
    pub coefficients: Vec<Complex64>,
}

impl CoherentState {
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Upper bound on `Σ_{n≥N} |c_n|²`.
    ///
    /// Consecutive terms have ratio `r²(n+2s)/(n+1)`, which for `n ≥ N` is
    /// at most `q = r² max(1, (N+2s)/(N+1))`; the remainder is then bounded
    /// by a geometric series. Returns infinity when `q ≥ 1`.
    pub fn tail_bound(&self) -> f64 {
        let n = self.coefficients.len();
        let r2 = self.label.beta.norm_sqr();
        if r2 == 0.0 {
            return 0.0;
        }
        let s = self.params.s();
        let q = r2 * f64::max(1.0, (n as f64 + 2.0 * s) / (n as f64 + 1.0));
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let first = coefficient_log_modulus(self.label, self.params, n).map(|l| (2.0 * l).exp());
        first.map_or(f64::INFINITY, |t| t / (1.0 - q))
    }
}

/// `{n}! = n! / (2s(2s+1)⋯(2s+n-1))`.
pub fn gen_factorial(n: usize, params: ShapeParams) -> Result<f64> {
    Ok((-log_binomial(n, params.laguerre_alpha())?).exp())
}

/// `ln |c_n| = s ln(1-|β|²) + ½ ln C(n+2s-1, n) + (n/2) ln|β|²`.
fn coefficient_log_modulus(label: CoherentLabel, params: ShapeParams, n: usize) -> Result<f64> {
    let ln_r2 = label.beta.norm_sqr().ln();
    log_modulus_from_parts(label.ln_one_minus_norm_sqr(), ln_r2, params, n)
}

fn log_modulus_from_parts(ln_u: f64, ln_r2: f64, params: ShapeParams, n: usize) -> Result<f64> {
    let power = if n == 0 { 0.0 } else { 0.5 * n as f64 * ln_r2 };
    Ok(params.s() * ln_u + 0.5 * log_binomial(n, params.laguerre_alpha())? + power)
}

/// Coefficients from `ln(1-|β|²)`, `ln|β|²` and `arg β`, which stay
/// accurate where `|β|` itself rounds to 1.
fn coefficients_from_parts(ln_u: f64, ln_r2: f64, theta: f64, params: ShapeParams, n: usize) -> Result<Vec<Complex64>> {
    (0..n)
        .map(|k| {
            if k > 0 && ln_r2 == f64::NEG_INFINITY {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let modulus = log_modulus_from_parts(ln_u, ln_r2, params, k)?.exp();
            Ok(Complex64::from_polar(modulus, k as f64 * theta))
        })
        .collect()
}

/// `c_n = (1-|β|²)^s sqrt(C(n+2s-1, n)) β^n` for `n < N`.
pub fn coefficients(label: CoherentLabel, params: ShapeParams, n: usize) -> Result<CoherentState> {
    let b = label.beta;
    let coefficients = coefficients_from_parts(label.ln_one_minus_norm_sqr(), b.norm_sqr().ln(), b.arg(), params, n)?;
    Ok(CoherentState { params, label, coefficients })
}

/// [`coefficients`] at `β(x̃, p̃)`, usable all the way to the rim of the
/// disk: `1-|β|² = 4 Re w / |1+w|²`.
pub fn coefficients_at(ps: PhaseSpaceLabel, params: ShapeParams, n: usize) -> Result<Vec<Complex64>> {
    let w = Complex64::new(1.0, ps.p_tilde / params.s()) * ps.x_tilde.exp();
    let ln_u = (4.0 * w.re).ln() - 2.0 * (1.0 + w).norm().ln();
    let u = ln_u.exp();
    if !(u > 0.0) || !w.re.is_finite() || !w.im.is_finite() {
        return Err(domain("phase-space label out of range"));
    }
    let beta_dir = (w - 1.0) / (w + 1.0);
    coefficients_from_parts(ln_u, (-u).ln_1p(), beta_dir.arg(), params, n)
}

/// `⟨β₁|β₂⟩ = (1-|β₁|²)^s (1-|β₂|²)^s (1 - conj(β₁)β₂)^{-2s}`.
pub fn overlap(a: CoherentLabel, b: CoherentLabel, params: ShapeParams) -> Complex64 {
    let s = params.s();
    let log = s * (a.ln_one_minus_norm_sqr() + b.ln_one_minus_norm_sqr())
        - 2.0 * s * (1.0 - a.beta.conj() * b.beta).ln();
    log.exp()
}

/// `‖|β⟩ - |β′⟩‖ = sqrt(2 - 2 Re⟨β|β′⟩)`.
///
/// With `u = 1-|β|²` and `δ = β′-β`, `ln⟨β|β′⟩ = s ln(1 - (2Re(conj(β)δ)+|δ|²)/u) - 2s ln(1 - conj(β)δ/u)`;
/// writing it this way and using `ln_1p`/`exp_m1` avoids the cancellation
/// that ruins the direct formula for nearby labels.
pub fn state_distance(a: CoherentLabel, b: CoherentLabel, params: ShapeParams) -> f64 {
    let s = params.s();
    let u = 1.0 - a.beta.norm_sqr();
    let delta = b.beta - a.beta;
    let cross = a.beta.conj() * delta;
    let real_part = (-(2.0 * cross.re + delta.norm_sqr()) / u).ln_1p();
    let zeta = -cross / u;
    // ln(1+ζ) for small complex ζ
    let log_one_plus = Complex64::new(0.5 * (2.0 * zeta.re + zeta.norm_sqr()).ln_1p(), zeta.im.atan2(1.0 + zeta.re));
    let z = s * real_part - 2.0 * s * log_one_plus;
    // Re(e^z) - 1 = expm1(Re z) cos(Im z) - 2 sin²(Im z / 2)
    let re_minus_one = z.re.exp_m1() * z.im.cos() - 2.0 * (0.5 * z.im).sin().powi(2);
    (-2.0 * re_minus_one).max(0.0).sqrt()
}

fn check_y(y: f64) -> Result<()> {
    require_finite("y", y)?;
    if y <= 0.0 {
        return Err(domain(format!("y must be positive, got {y}")));
    }
    Ok(())
}

/// Partial sum `(1-|β|²)^s Γ(2s)^{-1/2} y^s e^{-y/2} Σ_{n<N} β^n L_n^{2s-1}(y)`.
pub fn wavefunction_series(label: CoherentLabel, params: ShapeParams, y: f64, n: usize) -> Result<Complex64> {
    check_y(y)?;
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = params.s();
    let laguerre = laguerre_sequence(n - 1, params.laguerre_alpha(), y)?;
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for l in laguerre {
        sum += power * l;
        power *= label.beta;
    }
    let log_pre = s * label.ln_one_minus_norm_sqr() - 0.5 * log_gamma(2.0 * s)? + s * y.ln() - 0.5 * y;
    Ok(sum * log_pre.exp())
}

/// `(1-|β|²)^s Γ(2s)^{-1/2} (1-β)^{-2s} y^s exp(-(y/2) w)`.
pub fn wavefunction_closed(label: CoherentLabel, params: ShapeParams, y: f64) -> Result<Complex64> {
    check_y(y)?;
    let s = params.s();
    let log = Complex64::new(s * label.ln_one_minus_norm_sqr() - 0.5 * log_gamma(2.0 * s)? + s * y.ln(), 0.0)
        - 2.0 * s * (1.0 - label.beta).ln()
        - 0.5 * y * label.w();
    Ok(log.exp())
}

/// `x̃ = ln Re w`, `p̃ = s Im w / Re w`.
pub fn to_phase_space(label: CoherentLabel, params: ShapeParams) -> PhaseSpaceLabel {
    let w = label.w();
    PhaseSpaceLabel { x_tilde: w.re.ln(), p_tilde: params.s() * w.im / w.re }
}

/// Inverse of [`to_phase_space`]: `w = e^{x̃}(1 + i p̃/s)`, `β = (w-1)/(w+1)`.
pub fn from_phase_space(ps: PhaseSpaceLabel, params: ShapeParams) -> Result<CoherentLabel> {
    let w = Complex64::new(1.0, ps.p_tilde / params.s()) * ps.x_tilde.exp();
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(domain("phase-space label out of range"));
    }
    // β = (w-1)/(w+1) loses |β| < 1 to rounding once |w| is huge
    let beta = (w - 1.0) / (w + 1.0);
    CoherentLabel::new(beta)
}

/// `e^{-iφ} = (|1-β|/(1-β))^{2s}`.
pub fn phase_factor(label: CoherentLabel, params: ShapeParams) -> Complex64 {
    let d = 1.0 - label.beta;
    // |d|/d = e^{-i arg d}
    Complex64::from_polar(1.0, -2.0 * params.s() * d.arg())
}

/// Internal tolerance for the quadrature cross-check of expectation values.
pub const EXPECTATION_CHECK_TOL: f64 = 1e-8;

/// Trapezoid sums in `x` of `|φ_β|²`, `x|φ_β|²` and the momentum density.
///
/// `|φ_β(x)|²` is the ground-state density translated by `x̃`; it decays
/// like `e^{-2s(x-x̃)}` on the right and doubly exponentially on the left,
/// and is entire, so the trapezoid rule converges geometrically.
struct Moments {
    norm: f64,
    x: f64,
    p: Complex64,
}

fn moments(label: CoherentLabel, params: ShapeParams) -> Result<Moments> {
    let s = params.s();
    let x_tilde = to_phase_space(label, params).x_tilde;
    let w = label.w();
    let h = 0.01;
    let lo = x_tilde - 6.0;
    let hi = x_tilde + 40.0 / s.min(1.0) + 5.0;
    let steps = ((hi - lo) / h).ceil() as usize;
    let (mut norm, mut xs, mut p) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for k in 0..=steps {
        let x = lo + k as f64 * h;
        let y = 2.0 * (-x).exp();
        let phi = wavefunction_closed(label, params, y)?;
        let density = phi.norm_sqr();
        // P = i y ∂_y and ∂_y φ_β = (s/y - w/2) φ_β
        let p_density = phi.conj() * I * y * (s / y - 0.5 * w) * phi;
        norm += density;
        xs += x * density;
        p += p_density;
    }
    Ok(Moments { norm: norm * h, x: xs * h, p: p * h })
}

fn consistency(what: &str, formula: f64, quadrature: f64) -> Result<()> {
    let residual = (formula - quadrature).abs();
    if !(residual <= EXPECTATION_CHECK_TOL) {
        return Err(Error::Consistency { what: what.into(), residual, tolerance: EXPECTATION_CHECK_TOL });
    }
    Ok(())
}

/// `⟨X⟩ = x̃ + ln 2 - ψ(2s)`, cross-checked against quadrature.
pub fn expectation_x(label: CoherentLabel, params: ShapeParams) -> Result<f64> {
    let value = to_phase_space(label, params).x_tilde + LN_2 - digamma(2.0 * params.s())?;
    let m = moments(label, params)?;
    consistency("norm of coherent wavefunction", 1.0, m.norm)?;
    consistency("position expectation", value, m.x)?;
    Ok(value)
}

/// `⟨P⟩ = p̃`, cross-checked against quadrature.
pub fn expectation_p(label: CoherentLabel, params: ShapeParams) -> Result<f64> {
    let value = to_phase_space(label, params).p_tilde;
    let m = moments(label, params)?;
    consistency("norm of coherent wavefunction", 1.0, m.norm)?;
    consistency("momentum expectation", value, m.p.re)?;
    consistency("imaginary part of momentum expectation", 0.0, m.p.im)?;
    Ok(value)
}

/// Quadrature estimates of `⟨X⟩` and `⟨P⟩` without the formula.
pub fn expectation_quadrature(label: CoherentLabel, params: ShapeParams) -> Result<(f64, f64)> {
    let m = moments(label, params)?;
    Ok((m.x / m.norm, m.p.re / m.norm))
}

fn require_resolution_s(params: ShapeParams) -> Result<()> {
    if params.s() <= 0.5 {
        return Err(domain(format!("the disk measure needs s > 1/2, got {}", params.s())));
    }
    Ok(())
}

fn add_outer(acc: &mut [Complex64], v: &[Complex64], weight: f64) {
    let m = v.len();
    for i in 0..m {
        let vi = v[i] * weight;
        for j in 0..m {
            acc[i * m + j] += vi * v[j].conj();
        }
    }
}

fn finish(acc: Vec<Complex64>, m: usize) -> Result<DenseMatrix> {
    DenseMatrix::from_rows(acc.chunks(m).map(|r| r.to_vec()).collect())
}

/// `∫ |β⟩⟨β| (2s-1)(1-|β|²)^{-2} d²β` on the leading `M × M` block.
///
/// In polar coordinates with `u = 1 - r²` the `(1-|β|²)^{2s}` of the
/// coefficients and the measure combine into the Jacobi weight `u^{2s-2}`;
/// the angle is integrated with the uniform trapezoid rule.
pub fn resolution_of_unity(params: ShapeParams, m: usize, n_radial: usize, n_angular: usize) -> Result<DenseMatrix> {
    require_resolution_s(params)?;
    if m == 0 || n_angular == 0 {
        return Err(domain("basis size and angular points must be positive"));
    }
    let s = params.s();
    let rule = gauss_jacobi_unit_rule(n_radial, 2.0 * s - 2.0, 0.0)?;
    let log_binom = (0..m).map(|n| log_binomial(n, params.laguerre_alpha())).collect::<Result<Vec<_>>>()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
    let dtheta = 2.0 * PI / n_angular as f64;
    let mut v = vec![Complex64::new(0.0, 0.0); m];
    for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
        let r = (1.0 - u).sqrt();
        for k in 0..n_angular {
            let theta = k as f64 * dtheta;
            for (n, vn) in v.iter_mut().enumerate() {
                *vn = Complex64::from_polar((0.5 * log_binom[n]).exp() * r.powi(n as i32), n as f64 * theta);
            }
            // r dr = du/2
            add_outer(&mut acc, &v, (2.0 * s - 1.0) * 0.5 * wu * dtheta);
        }
    }
    finish(acc, m)
}

/// Rectangle `|x̃| ≤ x_max`, `|p̃| ≤ p_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceBox {
    pub x_max: f64,
    pub p_max: f64,
}

/// Result of [`phase_space_measure_check`].
#[derive(Debug, Clone)]
pub struct MeasureCheck {
    /// Integral over the box.
    pub inside: DenseMatrix,
    /// Integral over the complement of the box.
    pub outside: DenseMatrix,
    /// Largest entry of `outside`: what the box leaves out.
    pub tail_bound: f64,
}

impl MeasureCheck {
    pub fn total(&self) -> DenseMatrix {
        &self.inside + &self.outside
    }
}

/// Integrates `(2s-1)/(4s) |x̃,p̃⟩⟨x̃,p̃|` over `[x0,x1] × (p-range)`.
///
/// For fixed `x̃` the coefficients depend on `p̃` through `p̃/σ` with
/// `σ = s(1+e^{-x̃})`, and `|c_0|² ∝ (1+p̃²/σ²)^{-2s}`; the substitution
/// `p̃ = σ tan θ` turns this algebraic tail into `cos^{4s-2} θ`.
fn phase_space_panel(
    params: ShapeParams,
    m: usize,
    (x0, x1): (f64, f64),
    theta_range: impl Fn(f64) -> Vec<(f64, f64)>,
    n_x: usize,
    n_p: usize,
    acc: &mut [Complex64],
) -> Result<()> {
    let s = params.s();
    let (xs, wxs) = gauss_legendre(n_x, x0, x1)?;
    for (&x, &wx) in xs.iter().zip(&wxs) {
        let sigma = s * (1.0 + (-x).exp());
        for (t0, t1) in theta_range(sigma) {
            let (ts, wts) = gauss_legendre(n_p, t0, t1)?;
            for (&t, &wt) in ts.iter().zip(&wts) {
                let p = sigma * t.tan();
                let c = coefficients_at(PhaseSpaceLabel { x_tilde: x, p_tilde: p }, params, m)?;
                let jac = sigma / t.cos().powi(2);
                add_outer(acc, &c, (2.0 * s - 1.0) / (4.0 * s) * wx * wt * jac);
            }
        }
    }
    Ok(())
}

/// Phase-space form of the resolution of unity over a finite box, with
/// the complement integrated separately as a tail estimate.
///
/// The `x̃` tails decay like `e^{(2s-1)x̃}` to the left and `e^{-2s x̃}` to
/// the right; they are integrated out to where those envelopes drop below
/// `e^{-40}`.
pub fn phase_space_measure_check(
    params: ShapeParams,
    m: usize,
    bx: PhaseSpaceBox,
    n_x: usize,
    n_p: usize,
) -> Result<MeasureCheck> {
    require_resolution_s(params)?;
    if m == 0 || !(bx.x_max > 0.0 && bx.p_max > 0.0) {
        return Err(domain("phase-space box must have positive extent"));
    }
    let s = params.s();
    let half_pi = 0.5 * PI;
    // stay clear of θ = ±π/2 where p̃ overflows
    let edge = half_pi - 1e-9;
    let mut inside = vec![Complex64::new(0.0, 0.0); m * m];
    let mut outside = vec![Complex64::new(0.0, 0.0); m * m];

    let p_max = bx.p_max;
    phase_space_panel(params, m, (-bx.x_max, bx.x_max), |sg| {
        let t = (p_max / sg).atan();
        vec![(-t, t)]
    }, n_x, n_p, &mut inside)?;
    phase_space_panel(params, m, (-bx.x_max, bx.x_max), |sg| {
        let t = (p_max / sg).atan();
        vec![(-edge, -t), (t, edge)]
    }, n_x, n_p, &mut outside)?;
    let full = |_: f64| vec![(-edge, edge)];
    let left = bx.x_max + 40.0 / (2.0 * s - 1.0);
    let right = bx.x_max + 40.0 / (2.0 * s);
    phase_space_panel(params, m, (-left, -bx.x_max), full, n_x, n_p, &mut outside)?;
    phase_space_panel(params, m, (bx.x_max, right), full, n_x, n_p, &mut outside)?;

    let outside = finish(outside, m)?;
    let tail_bound = outside.max_abs();
    Ok(MeasureCheck { inside: finish(inside, m)?, outside, tail_bound })
}

/// Enlarges `start` until the tail estimate of
/// [`phase_space_measure_check`] drops below `tail_tol`.
///
/// The mass left outside a box sits near the rim of the disk, where high
/// basis indices concentrate. At position `x̃` the momentum scale is
/// `s(1+e^{-x̃})`, so each step widens `x̃` by `ln 4` and multiplies the
/// momentum half-width by 4 to keep the two in proportion.
pub fn grow_measure_box(
    params: ShapeParams,
    m: usize,
    start: PhaseSpaceBox,
    tail_tol: f64,
    n_x: usize,
    n_p: usize,
    max_steps: usize,
) -> Result<(PhaseSpaceBox, MeasureCheck)> {
    let mut bx = start;
    for _ in 0..=max_steps {
        let check = phase_space_measure_check(params, m, bx, n_x, n_p)?;
        if check.tail_bound < tail_tol {
            return Ok((bx, check));
        }
        bx = PhaseSpaceBox { x_max: bx.x_max + 4f64.ln(), p_max: 4.0 * bx.p_max };
    }
    Err(Error::Capability(format!(
        "phase-space tail still above {tail_tol:e} after {max_steps} box enlargements"
    )))
}

fn ladder_sum_and_difference(params: ShapeParams, n: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let a = matrix_a(params, 0, n)?.to_dense();
    let ad = matrix_adag(params, 0, n)?.to_dense();
    Ok((&a + &ad, &ad - &a))
}

fn scalar(c: Complex64, m: &DenseMatrix) -> DenseMatrix {
    m.scale(c)
}

/// `D = e^{-iφ} e^{-ip̃} exp((x̃/2)(A†-A)) exp((i/2s) p̃ (A+A†))` on the
/// leading `N × N` block, with `φ` evaluated at `β(x̃, p̃)`.
pub fn displacement_matrix(ps: PhaseSpaceLabel, params: ShapeParams, n: usize) -> Result<DenseMatrix> {
    let s = params.s();
    let (sum, diff) = ladder_sum_and_difference(params, n)?;
    let shift = matrix_exp(&diff.scale(Complex64::new(0.5 * ps.x_tilde, 0.0)))?;
    let boost = matrix_exp(&sum.scale(I * (ps.p_tilde / (2.0 * s))))?;
    let phase = phase_factor(from_phase_space(ps, params)?, params) * (-I * ps.p_tilde).exp();
    Ok(scalar(phase, &(&shift * &boost)))
}

/// The same operator with the factors in the opposite order:
/// `e^{-iφ} e^{-ip̃e^{x̃}} exp((i/2s) p̃ e^{x̃} (A+A†)) exp((x̃/2)(A†-A))`.
///
/// Moving the boost through the translation rescales its generator by
/// `e^{x̃}`, which this form carries explicitly.
pub fn displacement_matrix_reversed(ps: PhaseSpaceLabel, params: ShapeParams, n: usize) -> Result<DenseMatrix> {
    let s = params.s();
    let scale = ps.x_tilde.exp();
    let (sum, diff) = ladder_sum_and_difference(params, n)?;
    let shift = matrix_exp(&diff.scale(Complex64::new(0.5 * ps.x_tilde, 0.0)))?;
    let boost = matrix_exp(&sum.scale(I * (ps.p_tilde * scale / (2.0 * s))))?;
    let phase = phase_factor(from_phase_space(ps, params)?, params) * (-I * ps.p_tilde * scale).exp();
    Ok(scalar(phase, &(&boost * &shift)))
}

/// The reversed ordering exactly as printed alongside the definition of
/// `D`: `e^{-iφ} e^{-(i/s)p̃e^{x̃}} e^{-ip̃} exp((i/2s) p̃ (A+A†)) exp((x̃/2)(A†-A))`.
///
/// The boost here lacks the `e^{x̃}` rescaling, so for `x̃ ≠ 0` this is a
/// different state from [`displacement_matrix`]; kept for comparison.
pub fn displacement_matrix_printed_reversed(ps: PhaseSpaceLabel, params: ShapeParams, n: usize) -> Result<DenseMatrix> {
    let s = params.s();
    let (sum, diff) = ladder_sum_and_difference(params, n)?;
    let shift = matrix_exp(&diff.scale(Complex64::new(0.5 * ps.x_tilde, 0.0)))?;
    let boost = matrix_exp(&sum.scale(I * (ps.p_tilde / (2.0 * s))))?;
    let phase = phase_factor(from_phase_space(ps, params)?, params)
        * (-I * (ps.p_tilde / s) * ps.x_tilde.exp()).exp()
        * (-I * ps.p_tilde).exp();
    Ok(scalar(phase, &(&boost * &shift)))
}

/// `|⟨a|b⟩|` for unit vectors (normalised here).
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

/// `⟨n|f⟩ = ∫ φ_n(y) f(y) dy/y` for `n < N`.
///
/// `rule` should be a Gauss–Laguerre rule; its plain weights are used, so
/// `f` need not carry any particular decay beyond square integrability.
pub fn project_onto_basis(
    f: impl Fn(f64) -> Result<Complex64>,
    params: ShapeParams,
    n: usize,
    rule: &QuadratureRule,
) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (&y, w) in rule.nodes().iter().zip(rule.plain_weights()) {
        if w == 0.0 {
            continue;
        }
        let fy = f(y)?;
        let phis = pseudo_wavefunctions(n - 1, params, y)?;
        for (o, p) in out.iter_mut().zip(phis) {
            *o += fy * (w * p / y);
        }
    }
    Ok(out)
}

/// `x(y)` re-exported for callers that sample in `x`.
pub fn position_of(y: f64) -> Result<f64> {
    x_from_y(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sp(s: f64) -> ShapeParams {
        ShapeParams::new(s).unwrap()
    }

    fn lab(re: f64, im: f64) -> CoherentLabel {
        CoherentLabel::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn label_validation() {
        assert!(CoherentLabel::new(Complex64::new(1.0, 0.0)).is_err());
        assert!(CoherentLabel::new(Complex64::new(0.6, 0.8)).is_err());
        assert!(CoherentLabel::new(Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(CoherentLabel::new(Complex64::new(0.99, 0.0)).is_ok());
    }

    #[test]
    fn generalized_factorial() {
        assert_eq!(gen_factorial(0, sp(1.3)).unwrap(), 1.0);
        assert_abs_diff_eq!(gen_factorial(1, sp(1.3)).unwrap(), 1.0 / 2.6, epsilon = 1e-15);
        assert_abs_diff_eq!(gen_factorial(2, sp(1.0)).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn ground_label_gives_unit_vector() {
        let c = coefficients(lab(0.0, 0.0), sp(1.0), 5).unwrap();
        assert_eq!(c.coefficients[0], Complex64::new(1.0, 0.0));
        assert!(c.coefficients[1..].iter().all(|z| z.norm() == 0.0));
        assert_eq!(c.tail_bound(), 0.0);
    }

    #[test]
    fn phase_space_examples() {
        let ps = to_phase_space(lab(0.5, 0.0), sp(1.0));
        assert_abs_diff_eq!(ps.x_tilde, 3f64.ln(), epsilon = 1e-15);
        assert_eq!(ps.p_tilde, 0.0);
        let ps = to_phase_space(lab(0.0, 0.5), sp(1.0));
        assert_abs_diff_eq!(ps.x_tilde, 0.6f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(ps.p_tilde, 4.0 / 3.0, epsilon = 1e-15);
        let ps = to_phase_space(lab(0.0, 0.0), sp(1.0));
        assert_eq!((ps.x_tilde, ps.p_tilde), (0.0, 0.0));
    }

    #[test]
    fn phase_factor_examples() {
        assert_abs_diff_eq!(phase_factor(lab(0.7, 0.0), sp(2.3)).re, 1.0, epsilon = 1e-15);
        let f = phase_factor(lab(0.0, 0.5), sp(1.0));
        let direct = Complex64::new(1.25, 0.0) / Complex64::new(0.75, -1.0);
        assert_abs_diff_eq!(f.re, direct.re, epsilon = 1e-15);
        assert_abs_diff_eq!(f.im, direct.im, epsilon = 1e-15);
        assert_abs_diff_eq!(f.arg(), 2.0 * 0.5f64.atan2(1.0), epsilon = 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let (a, p) = (lab(0.3, -0.2), sp(1.4));
        assert_abs_diff_eq!(overlap(a, a, p).re, 1.0, epsilon = 1e-14);
        let o = overlap(lab(0.0, 0.0), a, p);
        assert_abs_diff_eq!(o.re, (1.0 - 0.13f64).powf(1.4), epsilon = 1e-15);
        assert_eq!(state_distance(a, a, p), 0.0);
    }

    #[test]
    fn closed_wavefunction_at_zero_label_is_ground_state() {
        let p = sp(1.75);
        for y in [0.1, 1.0, 4.0, 20.0] {
            let z = wavefunction_closed(lab(0.0, 0.0), p, y).unwrap();
            assert_abs_diff_eq!(z.re, crate::morse::pseudo_wavefunction(0, p, y).unwrap(), epsilon = 1e-14);
            assert_eq!(z.im, 0.0);
        }
        assert!(wavefunction_closed(lab(0.0, 0.0), p, 0.0).is_err());
    }

    #[test]
    fn resolution_needs_s_above_half() {
        assert!(resolution_of_unity(sp(0.5), 3, 10, 8).is_err());
        assert!(phase_space_measure_check(sp(0.4), 3, PhaseSpaceBox { x_max: 1.0, p_max: 1.0 }, 4, 4).is_err());
    }

    #[test]
    fn displacement_at_origin_is_identity() {
        let d = displacement_matrix(PhaseSpaceLabel::new(0.0, 0.0).unwrap(), sp(1.2), 6).unwrap();
        assert!((&d - &DenseMatrix::identity(6)).max_abs() < 1e-15);
    }
}
