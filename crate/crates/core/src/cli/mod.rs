//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical or convergence
//! failure (including any failed property in `verify`).

mod commands;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use output::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "morse-susy", version, about = "Morse oscillator in the pseudo-number basis: tables and self-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pseudo-number-state wavefunctions φ_0..φ_{n-max} at sample points
    Basis(CommonArgs),
    /// Nonzero entries of the truncated Hamiltonian matrix
    Ham(CommonArgs),
    /// Rayleigh–Ritz eigenvalues against the bound-state formula
    Spectrum(CommonArgs),
    /// Coherent-state coefficients c_n
    Coherent(CommonArgs),
    /// Coherent-state wavefunction, series and closed form side by side
    Wavefunction(CommonArgs),
    /// Resolution of unity on the disk and on the (x̃, p̃) plane
    Resolution(CommonArgs),
    /// Displacement operator: unitarity and fidelity of D|0⟩
    Displace(CommonArgs),
    /// Runs the property suite and prints one PASS/FAIL line per property
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Shape parameter s > 0
    #[arg(long = "s")]
    s: Option<f64>,
    /// Basis truncation / number of terms
    #[arg(long = "n")]
    n: Option<usize>,
    /// Highest basis index for `basis`
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Number of eigenvalues for `spectrum`
    #[arg(long = "n-eigen")]
    n_eigen: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gauss–Laguerre points for sampling or quadrature
    #[arg(long = "quad-points")]
    quad_points: Option<usize>,
    /// Uniform x-grid as min:max:count
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Coherent-state label as a complex literal, e.g. 0.4+0.2i
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Phase-space position label x̃
    #[arg(long = "x", allow_hyphen_values = true)]
    x: Option<f64>,
    /// Phase-space momentum label p̃
    #[arg(long = "p", allow_hyphen_values = true)]
    p: Option<f64>,
    /// Radial quadrature points for `resolution`
    #[arg(long = "n-radial")]
    n_radial: Option<usize>,
    /// Angular points for `resolution`
    #[arg(long = "n-angular")]
    n_angular: Option<usize>,
    /// Reduced sizes
    #[arg(long)]
    quick: bool,
}

/// Uniform grid specification from `--grid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Validated configuration, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_eigen: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// `[Re β, Im β]`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_angular: Option<usize>,
    pub quick: bool,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (with optional exponents).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || domain(format!("cannot parse complex number '{text}' (expected a+bi)"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().ok().filter(|re| re.is_finite()).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // split before the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match split {
        Some(k) => Complex64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?),
        None => Complex64::new(0.0, imag(body)?),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

/// Parses `min:max:count`.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let bad = || domain(format!("cannot parse grid '{text}' (expected min:max:count)"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let min = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let max = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(domain(format!("grid needs finite min < max, got {min}:{max}")));
    }
    if count < 2 {
        return Err(domain(format!("grid needs at least 2 points, got {count}")));
    }
    Ok(GridSpec { min, max, count })
}

fn build_config(command: &'static str, a: &CommonArgs) -> Result<RunConfig> {
    if let Some(s) = a.s {
        if !(s.is_finite() && s > 0.0) {
            return Err(domain(format!("--s must be a positive number, got {s}")));
        }
    }
    if a.beta.is_some() && (a.x.is_some() || a.p.is_some()) {
        return Err(domain("--beta and --x/--p are mutually exclusive"));
    }
    if a.x.is_some() != a.p.is_some() {
        return Err(domain("--x and --p must be given together"));
    }
    for (name, v) in [("--x", a.x), ("--p", a.p)] {
        if let Some(v) = v {
            if !v.is_finite() {
                return Err(domain(format!("{name} must be finite, got {v}")));
            }
        }
    }
    let beta = a.beta.as_deref().map(parse_complex).transpose()?;
    if let Some(b) = beta {
        if b.norm() >= 1.0 {
            return Err(domain(format!("--beta must lie inside the unit disk, |beta| = {}", b.norm())));
        }
    }
    let grid = a.grid.as_deref().map(parse_grid).transpose()?;
    Ok(RunConfig {
        command,
        s: a.s,
        n: a.n,
        n_max: a.n_max,
        n_eigen: a.n_eigen,
        quad_points: a.quad_points,
        grid,
        beta: beta.map(|b| [b.re, b.im]),
        x_tilde: a.x,
        p_tilde: a.p,
        n_radial: a.n_radial,
        n_angular: a.n_angular,
        quick: a.quick,
        format: a.format,
        out: a.out.clone(),
    })
}

/// What a command produced: the table, and whether it signals a numerical
/// failure (exit code 2) despite producing output.
pub struct Outcome {
    pub table: Table,
    pub failed: bool,
}

fn render(config: &RunConfig, table: &Table) -> Result<String> {
    match config.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(config),
    }
}

fn emit(config: &RunConfig, text: &str) -> std::io::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Shape(_) => EXIT_INVALID,
        Error::Capability(_) | Error::Consistency { .. } => EXIT_NUMERICAL,
    }
}

fn dispatch(command: Command) -> Result<(RunConfig, Outcome)> {
    let (name, args) = match &command {
        Command::Basis(a) => ("basis", a),
        Command::Ham(a) => ("ham", a),
        Command::Spectrum(a) => ("spectrum", a),
        Command::Coherent(a) => ("coherent", a),
        Command::Wavefunction(a) => ("wavefunction", a),
        Command::Resolution(a) => ("resolution", a),
        Command::Displace(a) => ("displace", a),
        Command::Verify(a) => ("verify", a),
    };
    let mut config = build_config(name, args)?;
    let outcome = match name {
        "basis" => commands::basis(&mut config)?,
        "ham" => commands::ham(&mut config)?,
        "spectrum" => commands::spectrum(&mut config)?,
        "coherent" => commands::coherent(&mut config)?,
        "wavefunction" => commands::wavefunction(&mut config)?,
        "resolution" => commands::resolution(&mut config)?,
        "displace" => commands::displace(&mut config)?,
        _ => commands::verify(&mut config)?,
    };
    Ok((config, outcome))
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (config, outcome) = match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let text = match render(&config, &outcome.table) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = emit(&config, &text) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_NUMERICAL;
    }
    if config.format == Format::Csv {
        if let Ok(lines) = outcome.table.summary_lines() {
            eprint!("{lines}");
        }
    }
    if outcome.failed {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let cases = [
            ("0", (0.0, 0.0)),
            ("0.4+0.2i", (0.4, 0.2)),
            ("-0.3-0.1i", (-0.3, -0.1)),
            ("0.5i", (0.0, 0.5)),
            ("-i", (0.0, -1.0)),
            ("1e-3+2.5e-2i", (1e-3, 2.5e-2)),
            ("-1e-3-2E-2i", (-1e-3, -2e-2)),
            (" 0.1 + 0.2i ", (0.1, 0.2)),
        ];
        for (text, (re, im)) in cases {
            assert_eq!(parse_complex(text).unwrap(), Complex64::new(re, im), "{text}");
        }
        for bad in ["", "abc", "1+", "0.1+xi", "nan", "1+2j"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("0.1:20:200").unwrap(), GridSpec { min: 0.1, max: 20.0, count: 200 });
        assert_eq!(parse_grid("-3:5:2").unwrap().min, -3.0);
        for bad in ["1:2", "2:1:10", "0:1:1", "a:b:c", "0:1:-4"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn conflicting_labels_rejected() {
        let code = run(["morse-susy", "coherent", "--beta", "0.1", "--x", "0.2", "--p", "0"]);
        assert_eq!(code, EXIT_INVALID);
        assert_eq!(run(["morse-susy", "coherent", "--x", "0.2"]), EXIT_INVALID);
        assert_eq!(run(["morse-susy", "spectrum", "--s", "-1"]), EXIT_INVALID);
        assert_eq!(run(["morse-susy", "frobnicate"]), EXIT_INVALID);
    }
}
