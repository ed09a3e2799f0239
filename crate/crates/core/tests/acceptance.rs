//! Acceptance criteria 1–12, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the console.
//! A criterion listed in `EXPECTED_FAIL` is known to be unattainable as
//! stated; the run fails if any criterion's outcome differs from what is
//! listed here.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use morse_susy::coherent::*;
use morse_susy::morse::*;
use morse_susy::numerics::{digamma, gauss_laguerre_rule, DenseMatrix};
use morse_susy::operators::*;

/// The reversed factor ordering as printed applies the boost with the
/// unrescaled momentum; off the `x̃ = 0` axis it builds a different state.
const EXPECTED_FAIL: &[&str] = &["11c"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sp(s: f64) -> ShapeParams {
    ShapeParams::new(s).unwrap()
}

fn max_dev(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a - b).max_abs()
}

fn pi_identity(m: usize) -> DenseMatrix {
    DenseMatrix::identity(m).scale(Complex64::new(PI, 0.0))
}

fn c1_orthonormality() -> Outcome {
    let start = Instant::now();
    let n_max = 30;
    let mut worst: f64 = 0.0;
    for s in [0.75, 1.75, 3.6] {
        let p = sp(s);
        let rule = gauss_laguerre_rule(200, p.laguerre_alpha()).unwrap();
        let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
        for (&y, w) in rule.nodes().iter().zip(rule.plain_weights()) {
            let phi = pseudo_wavefunctions(n_max, p, y).unwrap();
            for m in 0..=n_max {
                for n in 0..=n_max {
                    gram[m][n] += w * phi[m] * phi[n] / y;
                }
            }
        }
        for (m, row) in gram.iter().enumerate() {
            for (n, g) in row.iter().enumerate() {
                worst = worst.max((g - if m == n { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let t = start.elapsed();
    outcome(worst < 1e-10 && t < Duration::from_secs(5), format!("max |G - I| = {worst:.2e}, {t:.2?}"))
}

fn c2_recursion() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [0.75, 1.75, 3.6] {
        let p = sp(s);
        let rule = gauss_laguerre_rule(200, p.laguerre_alpha()).unwrap();
        for &y in rule.nodes() {
            let closed = pseudo_wavefunctions(20, p, y).unwrap();
            for (n, c) in closed.iter().enumerate() {
                worst = worst.max((pseudo_wavefunction_recursive(n, p, y).unwrap() - c).abs());
            }
        }
    }
    outcome(worst < 1e-9, format!("max deviation {worst:.2e} over 600 nodes, n <= 20"))
}

fn ground_samples(p: ShapeParams, g: &LogGrid) -> Vec<f64> {
    g.sample(|x| pseudo_wavefunction(0, p, y_from_x(x)).unwrap())
}

fn orders(p: ShapeParams, residual: impl Fn(&LogGrid, &[f64]) -> f64) -> [f64; 2] {
    let g0 = LogGrid::new(-4.0, 30.0 / p.s(), 301).unwrap();
    let g1 = g0.refined();
    let g2 = g1.refined();
    let r: Vec<f64> = [g0, g1, g2].iter().map(|g| residual(g, &ground_samples(p, g))).collect();
    [(r[0] / r[1]).log2(), (r[1] / r[2]).log2()]
}

fn c3_annihilation() -> Outcome {
    let mut observed = Vec::new();
    let mut e0_ok = true;
    for s in [0.75, 1.75, 3.6] {
        let p = sp(s);
        e0_ok &= p.ground_energy() == s + 0.25;
        observed.extend(orders(p, |g, f| apply_operator_fd(FdOperator::Lower(0), p, g, f).unwrap().l2_norm(g.spacing())));
        observed.extend(orders(p, |g, f| {
            let mut hf = apply_operator_fd(FdOperator::Hamiltonian, p, g, f).unwrap();
            for (i, v) in hf.values.iter_mut().enumerate() {
                *v -= (s + 0.25) * f[hf.first_index + i];
            }
            hf.l2_norm(g.spacing())
        }));
    }
    let worst = observed.iter().map(|o| (o - 2.0).abs()).fold(0.0, f64::max);
    let lo = observed.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = observed.iter().cloned().fold(0.0, f64::max);
    outcome(worst <= 0.2 && e0_ok, format!("observed orders in [{lo:.3}, {hi:.3}]"))
}

fn c4_ladder() -> Outcome {
    let mut shift_exact = true;
    let mut worst_entry: f64 = 0.0;
    let mut worst_corner: f64 = 0.0;
    for s in [0.75, 1.75, 3.6] {
        let p = sp(s);
        for n in [5usize, 20, 64] {
            let base = matrix_a(p, 0, n).unwrap();
            for k in -3..=3 {
                let shifted = matrix_a(p, k, n).unwrap();
                shift_exact &= shifted.band() == base.band()
                    && shifted.diag().iter().zip(base.diag()).all(|(a, b)| *a == b + k as f64);
            }
            let a = base.to_dense();
            let ad = matrix_adag(p, 0, n).unwrap().to_dense();
            let rhs = &DenseMatrix::identity(n).scale(Complex64::new(2.0 * s, 0.0)) - &(&a + &ad);
            for (m, k) in [(0, 0), (2, 5), (-1, 3)] {
                let c = commutator(&matrix_a(p, m, n).unwrap().to_dense(), &matrix_adag(p, k, n).unwrap().to_dense())
                    .unwrap();
                for i in 0..n {
                    for j in 0..n {
                        if i + 1 < n || j + 1 < n {
                            // entry tolerance scales with the matrix size
                            worst_entry = worst_entry.max((c.get(i, j) - rhs.get(i, j)).norm() / (2.0 * s + n as f64));
                        }
                    }
                }
                let defect = (rhs.get(n - 1, n - 1) - c.get(n - 1, n - 1)).re;
                let expect = n as f64 * (2.0 * s + n as f64 - 1.0);
                worst_corner = worst_corner.max(((defect - expect) / expect).abs());
            }
        }
    }
    outcome(
        shift_exact && worst_entry <= 1e-12 && worst_corner <= 1e-12,
        format!("shift exact: {shift_exact}, off-corner dev / (2s+N) {worst_entry:.2e}, corner rel {worst_corner:.2e}"),
    )
}

fn c5_spectrum() -> Outcome {
    let p = sp(3.6);
    let start = Instant::now();
    // plateau detection: keep doubling from N = 1600 until eigenvalues 1-2
    // change by less than 1e-6
    let mut n = 1600;
    let mut previous = spectrum(p, n / 2, 4, false).unwrap().values;
    let (values, change) = loop {
        let values = spectrum(p, n, 4, false).unwrap().values;
        let change = (1..=2).map(|i| (values[i] - previous[i]).abs()).fold(0.0, f64::max);
        if change < 1e-6 || n >= 25_600 {
            break (values, change);
        }
        previous = values;
        n *= 2;
    };
    let t = start.elapsed();
    let e0 = (values[0] - 3.85).abs();
    let e12 = (values[1] - 10.05).abs().max((values[2] - 14.25).abs());
    let e3 = (values[3] - 16.45).abs();
    outcome(
        e0 <= 1e-12 && change < 1e-6 && e12 <= 1e-3 && e3 <= 5e-2 && t < Duration::from_secs(60),
        format!(
            "E0 dev {e0:.1e}, plateau change {change:.1e} at N={n}, E1/E2 dev {e12:.1e}, E3 dev {e3:.1e}, {t:.2?}"
        ),
    )
}

fn c6_matrix_elements() -> Outcome {
    let p = sp(1.75);
    let rule = gauss_laguerre_rule(80, p.laguerre_alpha()).unwrap();
    let grid = LogGrid::new(-5.0, 20.0, 12_501).unwrap();
    let h = matrix_h(p, 10).unwrap();
    let mut all_inside = true;
    let mut widest: f64 = 0.0;
    for m in 0..=6 {
        for n in 0..=6 {
            let est = matrix_element_oracle(m, n, OracleOp::Hamiltonian, p, &rule, &grid).unwrap();
            all_inside &= est.contains(h.matrix.get(m, n));
            widest = widest.max(est.error_bar);
        }
    }
    let est = matrix_element_oracle(2, 1, OracleOp::Hamiltonian, p, &rule, &grid).unwrap();
    let printed_excluded = !est.contains(printed_h_entry(p, 2, 1));
    outcome(
        all_inside && printed_excluded,
        format!("49 entries inside error bars (widest {widest:.1e}); unsymmetrized (2,1) excluded: {printed_excluded}"),
    )
}

fn label_grid() -> Vec<CoherentLabel> {
    let mut out = Vec::new();
    for r in [0.0, 0.3, 0.6] {
        for k in 0..3 {
            out.push(CoherentLabel::new(Complex64::from_polar(r, 0.4 + 2.0 * PI * k as f64 / 3.0)).unwrap());
        }
    }
    out
}

fn c7_normalization_overlap() -> Outcome {
    let mut within_tail = true;
    let mut worst_overlap: f64 = 0.0;
    for s in [0.75, 1.75, 3.6] {
        let p = sp(s);
        let states: Vec<_> = label_grid().into_iter().map(|l| coefficients(l, p, 120).unwrap()).collect();
        for st in &states {
            within_tail &= (1.0 - st.norm_sqr()).abs() <= st.tail_bound() + 1e-13;
        }
        let big: Vec<_> = label_grid().into_iter().map(|l| coefficients(l, p, 500).unwrap()).collect();
        for a in &big {
            for b in &big {
                let series: Complex64 = a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x.conj() * y).sum();
                worst_overlap = worst_overlap.max((series - overlap(a.label, b.label, p)).norm());
            }
        }
    }
    outcome(
        within_tail && worst_overlap <= 1e-10,
        format!("norm within tail bound: {within_tail}, overlap dev {worst_overlap:.2e}"),
    )
}

fn c8_wavefunction() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [0.75, 1.75, 3.6] {
        let p = sp(s);
        let rule = gauss_laguerre_rule(200, p.laguerre_alpha()).unwrap();
        for l in label_grid() {
            for &y in rule.nodes() {
                let d = wavefunction_series(l, p, y, 400).unwrap() - wavefunction_closed(l, p, y).unwrap();
                worst = worst.max(d.norm());
            }
        }
    }
    outcome(worst < 1e-9, format!("max deviation {worst:.2e}"))
}

fn c9_resolution() -> Outcome {
    let start = Instant::now();
    let p = sp(1.75);
    let disk = max_dev(&resolution_of_unity(p, 12, 200, 64).unwrap(), &pi_identity(12));
    let (bx, check) = grow_measure_box(p, 8, PhaseSpaceBox { x_max: 6.0, p_max: 40.0 }, 5e-4, 100, 100, 10).unwrap();
    let inside = max_dev(&check.inside, &pi_identity(8));
    let t = start.elapsed();
    outcome(
        disk <= 1e-6 && inside <= 1e-3 && check.tail_bound <= 1e-3 && t < Duration::from_secs(120),
        format!(
            "disk 12x12 dev {disk:.1e}; box |x|<={:.2}, |p|<={} dev {inside:.1e}, tail bound {:.1e}, {t:.2?}",
            bx.x_max, bx.p_max, check.tail_bound
        ),
    )
}

fn c10_expectations() -> Outcome {
    let c = Complex64::new;
    let cases = [
        (c(0.0, 0.0), 1.75),
        (c(0.5, 0.0), 1.0),
        (c(0.0, 0.5), 1.0),
        (c(-0.3, 0.4), 0.75),
        (c(0.2, -0.6), 3.6),
        (c(-0.55, -0.1), 2.2),
    ];
    let mut worst: f64 = 0.0;
    for (beta, s) in cases {
        let (l, p) = (CoherentLabel::new(beta).unwrap(), sp(s));
        let ps = to_phase_space(l, p);
        let fx = ps.x_tilde + 2f64.ln() - digamma(2.0 * s).unwrap();
        let (qx, qp) = expectation_quadrature(l, p).unwrap();
        worst = worst.max((fx - qx).abs()).max((ps.p_tilde - qp).abs());
    }
    let zero = CoherentLabel::new(c(0.0, 0.0)).unwrap();
    let (qx0, qp0) = expectation_quadrature(zero, sp(1.75)).unwrap();
    let ground = (qx0 - (2f64.ln() - digamma(3.5).unwrap())).abs().max(qp0.abs());
    let (_, q_half) = expectation_quadrature(CoherentLabel::new(c(0.0, 0.5)).unwrap(), sp(1.0)).unwrap();
    let half = (q_half - 4.0 / 3.0).abs();
    outcome(
        worst <= 1e-8 && ground <= 1e-8 && half <= 1e-8,
        format!("formula vs quadrature {worst:.1e}; beta=0 {ground:.1e}; <P>(0.5i, s=1) - 4/3 = {half:.1e}"),
    )
}

struct Displacement {
    unitarity: f64,
    fidelity: f64,
    corrected: f64,
    printed: f64,
}

fn displacement_results() -> Displacement {
    let p = sp(1.75);
    let n = 300;
    let labels = [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::from_polar(0.5, 2.5),
        Complex64::new(-0.2, -0.3),
    ];
    let mut r = Displacement { unitarity: 0.0, fidelity: 1.0, corrected: 0.0, printed: 0.0 };
    for beta in labels {
        let l = CoherentLabel::new(beta).unwrap();
        let ps = to_phase_space(l, p);
        let d = displacement_matrix(ps, p, n).unwrap();
        r.unitarity = r.unitarity.max(max_dev(&(&d.adjoint() * &d), &DenseMatrix::identity(n)));
        let column = d.column(0);
        let target = coefficients(l, p, n).unwrap().coefficients;
        r.fidelity = r.fidelity.min(fidelity(&target, &column));
        let corrected = displacement_matrix_reversed(ps, p, n).unwrap().column(0);
        r.corrected = r.corrected.max(1.0 - fidelity(&column, &corrected));
        let printed = displacement_matrix_printed_reversed(ps, p, n).unwrap().column(0);
        r.printed = r.printed.max(1.0 - fidelity(&column, &printed));
    }
    r
}

fn c12_cli() -> Outcome {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_morse-susy")).args(["verify", "--quick"]).output().unwrap();
        (out, start.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let ok = a.status.success() && b.status.success();
    let t = ta.max(tb);
    let fails = String::from_utf8_lossy(&a.stdout).lines().filter(|l| l.ends_with(",FAIL")).count();
    outcome(
        ok && identical && t < Duration::from_secs(60),
        format!("exit ok: {ok}, byte-identical: {identical}, failed properties {fails}, slowest run {t:.2?}"),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1", c1_orthonormality()),
        ("2", c2_recursion()),
        ("3", c3_annihilation()),
        ("4", c4_ladder()),
        ("5", c5_spectrum()),
        ("6", c6_matrix_elements()),
        ("7", c7_normalization_overlap()),
        ("8", c8_wavefunction()),
        ("9", c9_resolution()),
        ("10", c10_expectations()),
    ];
    let d = displacement_results();
    results.push(("11a", outcome(d.unitarity < 1e-10, format!("max |D†D - I| = {:.1e} at N=300", d.unitarity))));
    results.push(("11b", outcome(d.fidelity > 1.0 - 1e-6, format!("min fidelity {:.15} for |beta| <= 0.5", d.fidelity))));
    results.push((
        "11c",
        outcome(
            d.printed <= 1e-8,
            format!(
                "printed reversed ordering: max 1 - fidelity {:.2e}; with the boost rescaled by e^x: {:.1e}",
                d.printed, d.corrected
            ),
        ),
    ));
    results.push(("12", c12_cli()));

    let mut unexpected = Vec::new();
    for (id, o) in &results {
        println!("criterion {id:>3}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass == EXPECTED_FAIL.contains(id) {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria with an unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}
