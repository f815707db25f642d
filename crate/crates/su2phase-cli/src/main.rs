//! `su2phase`: verification suites, Fisher-information sweeps, and
//! estimation experiments on the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical-integrity error.

mod output;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use serde_json::json;

use su2phase::dynamics::PhaseConfig;
use su2phase::estimation::crb_report;
use su2phase::metrology::{ec_qfi, h_joo, qfi_ensemble, PreparedProbe};
use su2phase::states::{ec_ensemble, noon, PhotonSectorEnsemble};
use su2phase::wigner::{
    d_matrix, d_matrix_oracle, parity_orthogonality_check, EulerAngles, ORACLE_MAX_TWICE_J,
};
use su2phase::HalfInt;

use output::{emit_json, emit_table, Format, Meta, Table};

#[derive(Parser)]
#[command(
    name = "su2phase",
    version,
    about = "Wigner rotation identities and interferometric phase estimation",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProbeKind {
    Noon,
    Ec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeasurementKind {
    Dpc,
    Parity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConfigKind {
    /// Phase shift in one arm: U = exp(-i (N/2 + J_z) phi).
    Single,
    /// Opposite half-shifts in both arms: U = exp(-i J_z phi).
    Balanced,
}

impl From<ConfigKind> for PhaseConfig {
    fn from(kind: ConfigKind) -> Self {
        match kind {
            ConfigKind::Single => PhaseConfig::SingleArm,
            ConfigKind::Balanced => PhaseConfig::Balanced,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format (each command has a natural default).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    /// Probe state family.
    #[arg(long, value_enum, default_value = "noon")]
    probe: ProbeKind,
    /// Photon number for the NOON probe.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Coherent amplitude for the entangled-coherent probe.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Probability mass allowed outside the retained sectors.
    #[arg(long, default_value_t = 1e-12)]
    tail_tol: f64,
}

impl ProbeArgs {
    fn build(&self) -> Result<PhotonSectorEnsemble, CliError> {
        match self.probe {
            ProbeKind::Noon => Ok(PhotonSectorEnsemble::pure(noon(self.n)?)),
            ProbeKind::Ec => Ok(ec_ensemble(Complex64::new(self.alpha, 0.0), self.tail_tol)?),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the rotation-identity suite and report worst-case residuals.
    Verify {
        /// Largest photon number (= 2j) to sweep.
        #[arg(long, default_value_t = 50)]
        max_n: u32,
        /// Residual bound every identity must meet.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Seed for the randomized angles.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print a Wigner D-matrix (or the matrix-exponential oracle).
    Dmat {
        /// Spin, written as `3`, `1/2`, `5/2`, ...
        #[arg(long, value_parser = parse_half_int)]
        j: HalfInt,
        /// Rotation angle about y, radians.
        #[arg(long)]
        beta: f64,
        /// First z-rotation angle, radians.
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Final z-rotation angle, radians.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Use the brute-force exponentiation oracle instead (needs
        /// alpha = gamma = 0 and 2j <= 20).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep classical Fisher information against the phase for one probe
    /// and measurement.
    Curve {
        #[command(flatten)]
        probe: ProbeArgs,
        /// Measurement whose CFI is computed.
        #[arg(long, value_enum, default_value = "dpc")]
        measurement: MeasurementKind,
        /// Phase-shift configuration.
        #[arg(long, value_enum, default_value = "single")]
        config: ConfigKind,
        #[arg(long, default_value_t = 1e-4)]
        phi_min: f64,
        #[arg(long, default_value_t = 3.0)]
        phi_max: f64,
        #[arg(long, default_value_t = 120)]
        steps: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// DPC and parity Fisher information versus phase for the
    /// entangled-coherent probe, with its quantum bounds.
    Fig2 {
        /// Coherent amplitude (default sqrt(5)).
        #[arg(long, default_value_t = 2.23606797749979)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-4)]
        phi_min: f64,
        #[arg(long, default_value_t = 3.0)]
        phi_max: f64,
        #[arg(long, default_value_t = 300)]
        steps: u32,
        /// Probability mass allowed outside the retained sectors.
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo maximum-likelihood experiment against the Cramer-Rao
    /// bound.
    Estimate {
        #[command(flatten)]
        probe: ProbeArgs,
        #[arg(long, value_enum, default_value = "single")]
        config: ConfigKind,
        /// True phase being estimated.
        #[arg(long, default_value_t = 0.3)]
        phi: f64,
        /// Measurement repetitions per trial.
        #[arg(long, default_value_t = 10_000)]
        nu: u64,
        /// Independent trials.
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Lower edge of the search bracket (defaults to a quarter period
        /// of the fastest fringe, kept away from zero).
        #[arg(long, requires = "bracket_hi")]
        bracket_lo: Option<f64>,
        /// Upper edge of the search bracket.
        #[arg(long, requires = "bracket_lo")]
        bracket_hi: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_half_int(s: &str) -> Result<HalfInt, String> {
    let s = s.trim();
    if let Some((numerator, denominator)) = s.split_once('/') {
        if denominator.trim() != "2" {
            return Err(format!("half-integers use denominator 2, got `{s}`"));
        }
        let twice: i32 = numerator
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator in `{s}`: {e}"))?;
        return Ok(HalfInt::from_twice(twice));
    }
    if let Ok(n) = s.parse::<i32>() {
        return Ok(HalfInt::integer(n));
    }
    let value: f64 = s.parse().map_err(|e| format!("bad spin `{s}`: {e}"))?;
    let twice = 2.0 * value;
    if (twice - twice.round()).abs() > 1e-9 {
        return Err(format!("`{s}` is not an integer or half-integer"));
    }
    Ok(HalfInt::from_twice(twice.round() as i32))
}

enum CliError {
    Usage(String),
    Verification(String),
    Integrity(String),
    Io(io::Error),
}

impl From<su2phase::Error> for CliError {
    fn from(err: su2phase::Error) -> Self {
        match err {
            su2phase::Error::NumericalIntegrity(msg) => CliError::Integrity(msg),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Io(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(err)) => {
            eprintln!("i/o error: {err}");
            ExitCode::from(2)
        }
        Err(CliError::Integrity(msg)) => {
            eprintln!("numerical integrity error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn linspace(lo: f64, hi: f64, steps: u32) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Usage("need at least 2 steps".into()));
    }
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(CliError::Usage(format!("empty phase range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|i| lo + step * i as f64).collect())
}

#[derive(Serialize)]
struct IdentityReport {
    identity: &'static str,
    max_residual: f64,
    worst_case: serde_json::Value,
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Verify {
            max_n,
            tol,
            seed,
            output,
        } => cmd_verify(max_n, tol, seed, output),
        Command::Dmat {
            j,
            beta,
            alpha,
            gamma,
            oracle,
            output,
        } => cmd_dmat(j, beta, alpha, gamma, oracle, output),
        Command::Curve {
            probe,
            measurement,
            config,
            phi_min,
            phi_max,
            steps,
            output,
        } => cmd_curve(
            probe,
            measurement,
            config.into(),
            phi_min,
            phi_max,
            steps,
            output,
        ),
        Command::Fig2 {
            alpha,
            phi_min,
            phi_max,
            steps,
            tail_tol,
            output,
        } => cmd_fig2(alpha, phi_min, phi_max, steps, tail_tol, output),
        Command::Estimate {
            probe,
            config,
            phi,
            nu,
            trials,
            seed,
            bracket_lo,
            bracket_hi,
            output,
        } => cmd_estimate(
            probe,
            config.into(),
            phi,
            nu,
            trials,
            seed,
            bracket_lo.zip(bracket_hi),
            output,
        ),
    }
}

fn cmd_verify(max_n: u32, tol: f64, seed: u64, output: OutputArgs) -> Result<(), CliError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut angle = move || -> f64 { rng.random_range(-6.3..6.3) };

    // Even/odd orthogonality over every representation up to max_n.
    let mut parity_worst = (0.0f64, json!(null));
    let mut totality_worst = (0.0f64, json!(null));
    for n in 1..=max_n {
        for _ in 0..10 {
            let (alpha, gamma) = (angle(), angle());
            let check = parity_orthogonality_check(n, alpha, gamma)?;
            if check.max_contract_residual > parity_worst.0 {
                parity_worst = (
                    check.max_contract_residual,
                    json!({
                        "n": n,
                        "m": check.worst.0.to_string(),
                        "m_prime": check.worst.1.to_string(),
                        "parity": format!("{:?}", check.worst.2),
                        "alpha": alpha,
                        "gamma": gamma,
                    }),
                );
            }
            if check.max_totality_residual > totality_worst.0 {
                totality_worst = (
                    check.max_totality_residual,
                    json!({ "n": n, "alpha": alpha, "gamma": gamma }),
                );
            }
        }
    }

    // Row orthonormality of the full D-matrix.
    let mut unitarity_worst = (0.0f64, json!(null));
    for twice_j in 0..=max_n as i32 {
        let j = HalfInt::from_twice(twice_j);
        let mut angle_sets = vec![EulerAngles::beam_splitter()];
        for _ in 0..20 {
            angle_sets.push(EulerAngles::new(angle(), angle(), angle()));
        }
        for angles in &angle_sets {
            let residual = d_matrix(j, angles)?.unitarity_residual();
            if residual > unitarity_worst.0 {
                unitarity_worst = (
                    residual,
                    json!({
                        "twice_j": twice_j,
                        "alpha": angles.alpha,
                        "beta": angles.beta,
                        "gamma": angles.gamma,
                    }),
                );
            }
        }
    }

    // Sum formula against the exponentiation oracle on small spins.
    let mut oracle_worst = (0.0f64, json!(null));
    let betas = [
        0.0,
        1e-3,
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI - 1e-3,
        std::f64::consts::PI,
    ];
    for twice_j in 0..=max_n.min(ORACLE_MAX_TWICE_J as u32) as i32 {
        let j = HalfInt::from_twice(twice_j);
        for &beta in &betas {
            let ours = d_matrix(j, &EulerAngles::y_rotation(beta))?;
            let reference = d_matrix_oracle(j, beta)?;
            for r in 0..ours.dim() {
                for col in 0..ours.dim() {
                    let deviation = (ours.entry(r, col) - reference.entry(r, col)).norm();
                    if deviation > oracle_worst.0 {
                        oracle_worst = (deviation, json!({ "twice_j": twice_j, "beta": beta }));
                    }
                }
            }
        }
    }

    let identities = vec![
        IdentityReport {
            identity: "even_odd_orthogonality",
            max_residual: parity_worst.0,
            worst_case: parity_worst.1,
        },
        IdentityReport {
            identity: "even_plus_odd_totality",
            max_residual: totality_worst.0,
            worst_case: totality_worst.1,
        },
        IdentityReport {
            identity: "row_orthonormality",
            max_residual: unitarity_worst.0,
            worst_case: unitarity_worst.1,
        },
        IdentityReport {
            identity: "oracle_equivalence",
            max_residual: oracle_worst.0,
            worst_case: oracle_worst.1,
        },
    ];
    let passed = identities.iter().all(|i| i.max_residual <= tol);
    let meta = Meta::new(seed, 0.0);
    let payload = json!({
        "max_n": max_n,
        "tol": tol,
        "passed": passed,
        "identities": identities,
    });
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(&payload, &meta, &output.out)?,
        Format::Csv => {
            let table = Table {
                columns: identities.iter().map(|i| i.identity).collect(),
                rows: vec![identities.iter().map(|i| i.max_residual).collect()],
            };
            emit_table(&table, &meta, Format::Csv, &output.out)?;
        }
    }
    if passed {
        Ok(())
    } else {
        let worst = identities
            .iter()
            .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
            .expect("non-empty");
        Err(CliError::Verification(format!(
            "{} residual {:e} exceeds tol {:e} at {}",
            worst.identity, worst.max_residual, tol, worst.worst_case
        )))
    }
}

fn cmd_dmat(
    j: HalfInt,
    beta: f64,
    alpha: f64,
    gamma: f64,
    oracle: bool,
    output: OutputArgs,
) -> Result<(), CliError> {
    let matrix = if oracle {
        if alpha != 0.0 || gamma != 0.0 {
            return Err(CliError::Usage(
                "the oracle computes pure y-rotations; set alpha = gamma = 0".into(),
            ));
        }
        d_matrix_oracle(j, beta)?
    } else {
        d_matrix(j, &EulerAngles::new(alpha, beta, gamma))?
    };
    let mut rows = Vec::with_capacity(matrix.dim() * matrix.dim());
    for r in 0..matrix.dim() {
        for col in 0..matrix.dim() {
            let entry = matrix.entry(r, col);
            rows.push(vec![
                matrix.m_of(r).value(),
                matrix.m_of(col).value(),
                entry.re,
                entry.im,
            ]);
        }
    }
    let table = Table {
        columns: vec!["m_row", "m_col", "re", "im"],
        rows,
    };
    emit_table(
        &table,
        &Meta::new(0, 0.0),
        output.format.unwrap_or(Format::Csv),
        &output.out,
    )?;
    Ok(())
}

fn cmd_curve(
    probe_args: ProbeArgs,
    measurement: MeasurementKind,
    config: PhaseConfig,
    phi_min: f64,
    phi_max: f64,
    steps: u32,
    output: OutputArgs,
) -> Result<(), CliError> {
    let ensemble = probe_args.build()?;
    let probe = PreparedProbe::new(&ensemble)?;
    let qfi = qfi_ensemble(&ensemble, config).value;
    let mut rows = Vec::new();
    for phi in linspace(phi_min, phi_max, steps)? {
        let cfi = match measurement {
            MeasurementKind::Dpc => probe.cfi_dpc(phi, config)?.value,
            MeasurementKind::Parity => probe.cfi_parity(phi, config)?.value,
        };
        rows.push(vec![phi, cfi, qfi]);
    }
    let table = Table {
        columns: vec!["phi", "cfi", "qfi"],
        rows,
    };
    emit_table(
        &table,
        &Meta::new(0, ensemble.truncation_residual()),
        output.format.unwrap_or(Format::Csv),
        &output.out,
    )?;
    Ok(())
}

fn cmd_fig2(
    alpha: f64,
    phi_min: f64,
    phi_max: f64,
    steps: u32,
    tail_tol: f64,
    output: OutputArgs,
) -> Result<(), CliError> {
    let alpha = Complex64::new(alpha, 0.0);
    let ensemble = ec_ensemble(alpha, tail_tol)?;
    let probe = PreparedProbe::new(&ensemble)?;
    let qfi = qfi_ensemble(&ensemble, PhaseConfig::SingleArm).value;
    let joo = h_joo(alpha);
    let _ = ec_qfi(alpha); // closed form; equals `qfi` up to truncation
    let mut rows = Vec::new();
    for phi in linspace(phi_min, phi_max, steps)? {
        let dpc = probe.cfi_dpc(phi, PhaseConfig::SingleArm)?.value;
        let parity = probe.cfi_parity(phi, PhaseConfig::SingleArm)?.value;
        rows.push(vec![phi, dpc, parity, qfi, joo]);
    }
    let table = Table {
        columns: vec!["phi", "cfi_dpc", "cfi_parity", "qfi_ec", "h_joo"],
        rows,
    };
    emit_table(
        &table,
        &Meta::new(0, ensemble.truncation_residual()),
        output.format.unwrap_or(Format::Csv),
        &output.out,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct EstimateReport {
    phi_star: f64,
    nu: u64,
    n_trials: u32,
    seed: u64,
    fisher_information: f64,
    crb: f64,
    empirical_variance: f64,
    ratio: f64,
    bias: f64,
    mean_estimate: f64,
    multimodal_trials: u32,
    bracket_lo: f64,
    bracket_hi: f64,
    rng_algorithm: &'static str,
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    probe_args: ProbeArgs,
    config: PhaseConfig,
    phi: f64,
    nu: u64,
    trials: u32,
    seed: u64,
    bracket: Option<(f64, f64)>,
    output: OutputArgs,
) -> Result<(), CliError> {
    let ensemble = probe_args.build()?;
    let report = crb_report(&ensemble, config, phi, nu, trials, seed, bracket)?;
    let payload = EstimateReport {
        phi_star: report.phi_star,
        nu: report.nu,
        n_trials: report.n_trials,
        seed: report.seed,
        fisher_information: report.fisher_information,
        crb: report.crb,
        empirical_variance: report.empirical_variance,
        ratio: report.ratio,
        bias: report.bias,
        mean_estimate: report.mean_estimate,
        multimodal_trials: report.multimodal_trials,
        bracket_lo: report.bracket.0,
        bracket_hi: report.bracket.1,
        rng_algorithm: report.rng_algorithm,
    };
    let meta = Meta::new(seed, report.truncation_residual);
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(&payload, &meta, &output.out)?,
        Format::Csv => {
            let table = Table {
                columns: vec![
                    "phi_star",
                    "nu",
                    "n_trials",
                    "seed",
                    "fisher_information",
                    "crb",
                    "empirical_variance",
                    "ratio",
                    "bias",
                    "mean_estimate",
                    "multimodal_trials",
                    "bracket_lo",
                    "bracket_hi",
                ],
                rows: vec![vec![
                    payload.phi_star,
                    payload.nu as f64,
                    payload.n_trials as f64,
                    payload.seed as f64,
                    payload.fisher_information,
                    payload.crb,
                    payload.empirical_variance,
                    payload.ratio,
                    payload.bias,
                    payload.mean_estimate,
                    payload.multimodal_trials as f64,
                    payload.bracket_lo,
                    payload.bracket_hi,
                ]],
            };
            emit_table(&table, &meta, Format::Csv, &output.out)?;
        }
    }
    Ok(())
}
