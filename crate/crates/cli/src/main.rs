use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use doubleforms::double_form::{contract_iter, decomposable, relative_residual, sectional};
use doubleforms::linalg::complete_frame;
use doubleforms::toolkit::harness::{run_suite, SuiteConfig, VerificationReport};
use doubleforms::toolkit::io::{form_file, load_tensor, save_form, BianchiPolicy, LoadedTensor};
use doubleforms::toolkit::random::{random_plane, rng};
use doubleforms::weitzenboeck::{
    decompose_22, np_definition, np_formula, operator_matrix, p_curvature_form, spectrum, FORMULA_OMEGA_COEFFICIENT,
};
use doubleforms::{CurvatureTensor, DoubleForm, Error};

#[derive(Parser)]
#[command(name = "doubleforms", version, about = "Double forms and Weitzenböck curvature operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity verification suite.
    Verify(VerifyArgs),
    /// Compute N_p of a curvature tensor.
    Weitzenboeck(WeitzenboeckArgs),
    /// Eigenvalues and sampled sectional minimum of N_p.
    Spectrum(SpectrumArgs),
    /// Split a curvature tensor into Weyl, traceless Ricci and scalar parts.
    Decompose(DecomposeArgs),
    /// Sectional curvatures of N_p on random p-planes.
    Sectional(SectionalArgs),
    /// p-curvature on random p-planes.
    Pcurvature(PcurvatureArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Random curvature tensors per cell.
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    /// Random form pairs per cell for the algebra checks.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Include n = 7 and 8.
    #[arg(long)]
    extended: bool,
    /// Base seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Coefficient of ω in the closed formula (mutation testing).
    #[arg(long, default_value_t = FORMULA_OMEGA_COEFFICIENT, hide = true, allow_hyphen_values = true)]
    omega_coefficient: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InputArgs {
    /// Curvature tensor file.
    #[arg(long)]
    input: PathBuf,
    /// Reject tensors violating the first Bianchi identity.
    #[arg(long, conflicts_with = "project")]
    strict: bool,
    /// Project onto Bianchi tensors before use.
    #[arg(long)]
    project: bool,
    #[arg(long)]
    json: bool,
}

impl InputArgs {
    fn load(&self) -> Result<CurvatureTensor, Error> {
        let policy = if self.strict {
            BianchiPolicy::Strict
        } else if self.project {
            BianchiPolicy::Project
        } else {
            BianchiPolicy::Warn
        };
        let loaded: LoadedTensor = load_tensor(&self.input, policy)?;
        if loaded.violates_bianchi() {
            let action = if loaded.projected { "projected" } else { "continuing" };
            eprintln!(
                "warning: Bianchi residual {:e} exceeds {:e}; {action}",
                loaded.residual, loaded.tolerance
            );
        }
        Ok(loaded.tensor)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Formula,
    Definition,
}

#[derive(Args)]
struct WeitzenboeckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum, default_value_t = Method::Definition)]
    method: Method,
    /// Write N_p to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct SectionalArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct PcurvatureArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

enum Failure {
    Identity,
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("plain data serializes"));
}

fn print_matrix(form: &DoubleForm) {
    let m = form.coeffs();
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|v| format!("{v:>12.6}")).collect();
        println!("{}", row.join(" "));
    }
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let config = SuiteConfig {
        n_min: args.n_min,
        n_max: args.n_max,
        seeds: args.seeds,
        trials: args.trials,
        tol: args.tol,
        extended: args.extended,
        seed: args.seed,
        formula_omega_coefficient: args.omega_coefficient,
    };
    let report = run_suite(&config)?;
    if args.json {
        print_json(&report);
    } else {
        print_report(&report);
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Identity)
    }
}

fn print_report(report: &VerificationReport) {
    for c in &report.summary.criteria {
        let worst = report
            .criterion(c.criterion)
            .filter(|r| matches!(r.check, doubleforms::toolkit::harness::Check::AtMost))
            .map(|r| r.residual)
            .fold(0.0f64, f64::max);
        let status = if c.failed == 0 { "pass" } else { "FAIL" };
        println!(
            "criterion {:>2}: {status}  {:>5} records, {:>4} failed, max residual {worst:.2e}",
            c.criterion, c.records, c.failed
        );
    }
    for r in report.failures() {
        let mut line = format!("  failed: {} n={}", r.identity, r.n);
        if let Some(p) = r.p {
            line += &format!(" p={p}");
        }
        if let Some(k) = r.k {
            line += &format!(" k={k}");
        }
        line += &format!(" residual={:e} tolerance={:e}", r.residual, r.tolerance);
        if let Some(f) = r.fitted_factor {
            line += &format!(" fitted_factor={f}");
        }
        println!("{line}");
    }
    for t in &report.timings {
        println!("  {:<20} {:>8.2}s", t.group, t.elapsed.as_secs_f64());
    }
    println!("{}", if report.pass() { "PASS" } else { "FAIL" });
}

fn weitzenboeck(args: &WeitzenboeckArgs) -> Result<(), Failure> {
    let omega = args.input.load()?;
    let np = match args.method {
        Method::Definition => np_definition(&omega, args.p)?,
        Method::Formula => np_formula(&omega, args.p)?,
    };
    if let Some(path) = &args.output {
        save_form(&np, path)?;
    } else if args.input.json {
        print_json(&form_file(&np));
    } else {
        print_matrix(&np);
    }
    Ok(())
}

fn spectrum_command(args: &SpectrumArgs) -> Result<(), Failure> {
    let omega = args.input.load()?;
    let np = np_definition(&omega, args.p)?;
    let report = spectrum(&operator_matrix(&np)?, args.samples, args.seed);
    if args.input.json {
        print_json(&report);
    } else {
        println!("eigenvalues: {:?}", report.eigenvalues);
        println!("min eigenvalue: {}", report.min_eigenvalue);
        if let Some(k) = report.min_sampled_sectional {
            println!("min sampled sectional ({} planes): {k}", report.sample_count);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DecomposeOutput {
    #[serde(flatten)]
    summary: doubleforms::weitzenboeck::DecompositionSummary,
    reassembly_residual: f64,
}

fn decompose(args: &DecomposeArgs) -> Result<(), Failure> {
    let omega = args.input.load()?;
    let parts = decompose_22(&omega)?;
    let out = DecomposeOutput {
        summary: parts.summary(),
        reassembly_residual: relative_residual(&parts.reassemble(), omega.form()),
    };
    if args.input.json {
        print_json(&out);
    } else {
        println!("omega0: {}", out.summary.omega0);
        println!("|omega1|: {}", out.summary.omega1_norm);
        println!("|omega2|: {}", out.summary.omega2_norm);
        println!("reassembly residual: {:e}", out.reassembly_residual);
    }
    Ok(())
}

#[derive(Serialize)]
struct SectionalSample {
    value: f64,
    /// `Σ_{i ≤ p < j} ω(f_i∧f_j, f_i∧f_j)` in a frame extending the plane.
    frame_sum: f64,
}

#[derive(Serialize)]
struct SectionalOutput {
    n: usize,
    p: usize,
    seed: u64,
    min: f64,
    max: f64,
    samples: Vec<SectionalSample>,
}

fn sectional_command(args: &SectionalArgs) -> Result<(), Failure> {
    let omega = args.input.load()?;
    let n = omega.dim();
    let np = np_definition(&omega, args.p)?;
    let mut r = rng(args.seed);
    let mut samples = Vec::with_capacity(args.samples);
    for _ in 0..args.samples {
        let plane = random_plane(&mut r, n, args.p);
        let frame = complete_frame(&plane, n);
        let cols: Vec<_> = (0..n).map(|i| frame.column(i).into_owned()).collect();
        let mut frame_sum = 0.0;
        for i in 0..args.p {
            for j in args.p..n {
                frame_sum += sectional(omega.form(), &[cols[i].clone(), cols[j].clone()])?;
            }
        }
        samples.push(SectionalSample { value: sectional(&np, &plane)?, frame_sum });
    }
    let out = SectionalOutput {
        n,
        p: args.p,
        seed: args.seed,
        min: samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min),
        max: samples.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max),
        samples,
    };
    if args.input.json {
        print_json(&out);
    } else {
        for s in &out.samples {
            println!("{:>14.8} {:>14.8}", s.value, s.frame_sum);
        }
        println!("min {} max {}", out.min, out.max);
    }
    Ok(())
}

#[derive(Serialize)]
struct PcurvatureOutput {
    n: usize,
    p: usize,
    seed: u64,
    min: f64,
    max: f64,
    values: Vec<f64>,
}

fn pcurvature(args: &PcurvatureArgs) -> Result<(), Failure> {
    let omega = args.input.load()?;
    let n = omega.dim();
    let form = p_curvature_form(&omega, args.p)?;
    let mut r = rng(args.seed);
    let values: Vec<f64> = (0..args.samples)
        .map(|_| {
            let plane = random_plane(&mut r, n, args.p);
            let w = decomposable(form.ctx(), &plane);
            w.dot(&(form.coeffs() * &w))
        })
        .collect();
    let out = PcurvatureOutput {
        n,
        p: args.p,
        seed: args.seed,
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        values,
    };
    if args.input.json {
        print_json(&out);
    } else {
        if args.p == 0 {
            let s = contract_iter(omega.form(), 2)?.scalar_value().unwrap_or_default();
            println!("scalar curvature: {s}");
        }
        println!("p-curvature: min {} max {} over {} planes", out.min, out.max, out.values.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Weitzenboeck(a) => weitzenboeck(a),
        Command::Spectrum(a) => spectrum_command(a),
        Command::Decompose(a) => decompose(a),
        Command::Sectional(a) => sectional_command(a),
        Command::Pcurvature(a) => pcurvature(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Identity) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
