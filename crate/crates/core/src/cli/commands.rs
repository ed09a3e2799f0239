use num_complex::Complex64;

use super::output::{Cell, Table};
use super::{verify as suite, Outcome, RunConfig};
use crate::coherent::{
    coefficients, displacement_matrix, displacement_matrix_reversed, fidelity, from_phase_space, grow_measure_box,
    resolution_of_unity, to_phase_space, wavefunction_closed, wavefunction_series, CoherentLabel, PhaseSpaceBox,
};
use crate::error::{domain, Result};
use crate::morse::{pseudo_wavefunctions, y_from_x, ShapeParams};
use crate::numerics::{gauss_laguerre_rule, DenseMatrix};
use crate::operators::{matrix_h, spectrum as ritz};

const DEFAULT_S: f64 = 1.75;
/// Largest basis order the spectrum command will double up to.
const MAX_SPECTRUM_ORDER: usize = 25_600;
/// Change under doubling below which a Ritz value counts as converged.
pub const PLATEAU_TOL: f64 = 1e-6;

fn params(config: &mut RunConfig, default: f64) -> Result<ShapeParams> {
    let s = *config.s.get_or_insert(default);
    ShapeParams::new(s)
}

fn size(slot: &mut Option<usize>, default: usize, name: &str, min: usize) -> Result<usize> {
    let v = *slot.get_or_insert(default);
    if v < min {
        return Err(domain(format!("{name} must be at least {min}, got {v}")));
    }
    Ok(v)
}

/// Sample points in `y`: the user grid in `x` mapped through `y = 2e^{-x}`,
/// or Gauss–Laguerre nodes for `α = 2s-1`.
fn sample_points(config: &mut RunConfig, p: ShapeParams, default_nodes: usize) -> Result<Vec<f64>> {
    match config.grid {
        Some(g) => {
            let h = (g.max - g.min) / (g.count - 1) as f64;
            Ok((0..g.count).map(|i| y_from_x(g.min + i as f64 * h)).collect())
        }
        None => {
            let n = size(&mut config.quad_points, default_nodes, "--quad-points", 1)?;
            Ok(gauss_laguerre_rule(n, p.laguerre_alpha())?.nodes().to_vec())
        }
    }
}

fn label(config: &RunConfig, p: ShapeParams) -> Result<CoherentLabel> {
    match (config.beta, config.x_tilde, config.p_tilde) {
        (Some([re, im]), _, _) => CoherentLabel::new(Complex64::new(re, im)),
        (None, Some(x), Some(pt)) => from_phase_space(crate::coherent::PhaseSpaceLabel::new(x, pt)?, p),
        _ => CoherentLabel::new(Complex64::new(0.0, 0.0)),
    }
}

fn ok(table: Table) -> Result<Outcome> {
    Ok(Outcome { table, failed: false })
}

pub(super) fn basis(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let n_max = *config.n_max.get_or_insert(4);
    let ys = sample_points(config, p, 40)?;
    let mut columns = vec!["y".to_string()];
    columns.extend((0..=n_max).map(|n| format!("phi_{n}")));
    let mut table = Table { columns, ..Table::default() };
    for y in ys {
        let mut row = vec![Cell::Float(y)];
        row.extend(pseudo_wavefunctions(n_max, p, y)?.into_iter().map(Cell::Float));
        table.push(row);
    }
    ok(table)
}

pub(super) fn ham(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let n = size(&mut config.n, 10, "--n", 2)?;
    let h = matrix_h(p, n)?;
    let mut table = Table::new(&["m", "n", "h_mn"]);
    for m in 0..n {
        for k in m.saturating_sub(1)..(m + 2).min(n) {
            table.push(vec![m.into(), k.into(), h.matrix.get(m, k).into()]);
        }
    }
    ok(table)
}

/// Indices whose Ritz values are required to plateau: bound states whose
/// eigenfunction decays at least like `e^{-x}` (`s - n ≥ 1`). The state
/// nearest the threshold converges much more slowly and is only compared
/// with the formula.
pub fn plateau_indices(p: ShapeParams, n_eigen: usize) -> Vec<usize> {
    let count = p.bound_state_count().count;
    (0..count.min(n_eigen)).filter(|&i| p.s() - i as f64 >= 1.0).collect()
}

pub(super) fn spectrum(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let mut n = size(&mut config.n, 1600, "--n", 4)?;
    let n_eigen = *config.n_eigen.get_or_insert(p.bound_state_count().count.max(1));
    if n_eigen == 0 || n_eigen > n / 2 {
        return Err(domain(format!("--n-eigen must be between 1 and N/2 = {}, got {n_eigen}", n / 2)));
    }
    let watched = plateau_indices(p, n_eigen);
    let mut previous = ritz(p, n / 2, n_eigen, false)?.values;
    let (values, change) = loop {
        let values = ritz(p, n, n_eigen, false)?.values;
        let change = watched.iter().map(|&i| (values[i] - previous[i]).abs()).fold(0.0, f64::max);
        if change < PLATEAU_TOL || 2 * n > MAX_SPECTRUM_ORDER {
            break (values, change);
        }
        previous = values;
        n *= 2;
    };
    let mut table = Table::new(&["index", "ritz_value", "formula_value", "abs_diff", "threshold"]);
    for (i, v) in values.iter().enumerate() {
        let formula = p.bound_energy(i).ok();
        table.push(vec![
            i.into(),
            (*v).into(),
            formula.into(),
            formula.map(|f| (v - f).abs()).into(),
            p.threshold().into(),
        ]);
    }
    table.summarize("basis_order", n);
    table.summarize("plateau_change", change);
    table.summarize("plateau_tolerance", PLATEAU_TOL);
    let failed = change >= PLATEAU_TOL;
    if failed {
        eprintln!("error: no Ritz plateau below {PLATEAU_TOL:e} up to N = {n}");
    }
    Ok(Outcome { table, failed })
}

pub(super) fn coherent(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let n = size(&mut config.n, 50, "--n", 1)?;
    let l = label(config, p)?;
    let state = coefficients(l, p, n)?;
    let mut table = Table::new(&["n", "re", "im", "abs"]);
    for (k, c) in state.coefficients.iter().enumerate() {
        table.push(vec![k.into(), c.re.into(), c.im.into(), c.norm().into()]);
    }
    let ps = to_phase_space(l, p);
    table.summarize("norm_sqr", state.norm_sqr());
    table.summarize("tail_bound", Cell::from(Some(state.tail_bound()).filter(|t| t.is_finite())));
    table.summarize("x_tilde", ps.x_tilde);
    table.summarize("p_tilde", ps.p_tilde);
    ok(table)
}

pub(super) fn wavefunction(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let n = size(&mut config.n, 400, "--n", 1)?;
    let l = label(config, p)?;
    let ys = sample_points(config, p, 64)?;
    let mut table = Table::new(&["y", "series_re", "series_im", "closed_re", "closed_im", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for y in ys {
        let a = wavefunction_series(l, p, y, n)?;
        let b = wavefunction_closed(l, p, y)?;
        let d = (a - b).norm();
        worst = worst.max(d);
        table.push(vec![y.into(), a.re.into(), a.im.into(), b.re.into(), b.im.into(), d.into()]);
    }
    table.summarize("max_abs_diff", worst);
    ok(table)
}

fn pi_identity(m: usize) -> DenseMatrix {
    DenseMatrix::identity(m).scale(Complex64::new(std::f64::consts::PI, 0.0))
}

pub(super) fn resolution(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let quick = config.quick;
    let m = size(&mut config.n, if quick { 6 } else { 12 }, "--n", 1)?;
    let n_radial = size(&mut config.n_radial, 200, "--n-radial", 1)?;
    let n_angular = size(&mut config.n_angular, 64, "--n-angular", 1)?;
    let disk = resolution_of_unity(p, m, n_radial, n_angular)?;
    let panel = if quick { 60 } else { 100 };
    let (bx, check) = grow_measure_box(p, m, PhaseSpaceBox { x_max: 6.0, p_max: 40.0 }, 5e-4, panel, panel, 10)?;
    let mut table = Table::new(&["quantity", "value"]);
    let mut row = |name: &str, v: f64| table.push(vec![name.into(), v.into()]);
    row("disk_max_deviation", (&disk - &pi_identity(m)).max_abs());
    row("phase_space_box_x_max", bx.x_max);
    row("phase_space_box_p_max", bx.p_max);
    row("phase_space_max_deviation", (&check.inside - &pi_identity(m)).max_abs());
    row("phase_space_tail_bound", check.tail_bound);
    row("phase_space_with_tail_vs_disk", (&check.total() - &disk).max_abs());
    ok(table)
}

pub(super) fn displace(config: &mut RunConfig) -> Result<Outcome> {
    let p = params(config, DEFAULT_S)?;
    let n = size(&mut config.n, if config.quick { 150 } else { 300 }, "--n", 2)?;
    let l = label(config, p)?;
    let ps = to_phase_space(l, p);
    let d = displacement_matrix(ps, p, n)?;
    let unitarity = (&(&d.adjoint() * &d) - &DenseMatrix::identity(n)).max_abs();
    let column = d.column(0);
    let target = coefficients(l, p, n)?.coefficients;
    let amplitude: Complex64 = target.iter().zip(&column).map(|(a, b)| a.conj() * b).sum();
    let reversed = displacement_matrix_reversed(ps, p, n)?.column(0);
    let reversed_diff = column.iter().zip(&reversed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let mut table = Table::new(&["quantity", "value"]);
    let mut row = |name: &str, v: f64| table.push(vec![name.into(), v.into()]);
    row("x_tilde", ps.x_tilde);
    row("p_tilde", ps.p_tilde);
    row("beta_re", l.beta().re);
    row("beta_im", l.beta().im);
    row("unitarity_defect", unitarity);
    row("fidelity", fidelity(&target, &column));
    row("amplitude_re", amplitude.re);
    row("amplitude_im", amplitude.im);
    row("reversed_ordering_max_diff", reversed_diff);
    ok(table)
}

pub(super) fn verify(config: &mut RunConfig) -> Result<Outcome> {
    let checks = suite::run_suite(config.quick);
    let mut table = Table::new(&["property", "residual", "relation", "tolerance", "status"]);
    let mut failed = false;
    for c in &checks {
        failed |= !c.pass;
        table.push(vec![
            c.property.as_str().into(),
            Some(c.residual).filter(|r| r.is_finite()).into(),
            c.relation.symbol().into(),
            c.tolerance.into(),
            (if c.pass { "PASS" } else { "FAIL" }).into(),
        ]);
    }
    Ok(Outcome { table, failed })
}
