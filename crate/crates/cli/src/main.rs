//! `relsin`: weighted subspace angles, relative perturbation bounds and
//! penalty-family sweeps from the command line.

mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relsin_core::analysis::{AnalysisOptions, PerturbationAnalysis};
use relsin_core::angles::{sin_theta_euclid, sin_theta_m};
use relsin_core::bounds::{NormKind, PNorm};
use relsin_core::io::{read_mtx_file, write_mtx, MtxError, ReportFormat};
use relsin_core::matpair::{m_orthonormalize, orthonormalize, pair_eigendecompose, partition};
use relsin_core::penalty::{
    builtin_example, effectivity_sweep, BoundKind, KappaGrid, PairVariant, PenaltyFamily, Reference, SweepConfig,
};
use relsin_core::perturb::perturb_spd;
use relsin_core::Error as CoreError;

use inputs::PairArgs;
use output::{quotient, save, show_quotient, write_atomic, AnglesOutput, CompareOutput, CompareRow};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DEFINITENESS: u8 = 3;
const EXIT_INAPPLICABLE: u8 = 4;

/// Relative spacing below which a split of the spectrum is reported as degenerate.
const DEGENERATE_SPLIT_TOL: f64 = 1e-12;

/// Invalid flag combination or input shape.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// The requested bound does not apply to the given pairs.
#[derive(Debug, thiserror::Error)]
#[error("bound not applicable: {0}")]
struct Inapplicable(String);

#[derive(Debug, Parser)]
#[command(name = "relsin", version, about = "Relative sin-theta bounds for definite matrix pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact weighted and Euclidean angles between the k lowest eigenspaces.
    Angles(AnglesArgs),
    /// Relative perturbation bound next to the exact angle.
    Bound(BoundArgs),
    /// Exact angle, relative bound and classical bound side by side.
    Compare(BoundArgs),
    /// Effectivity quotients of a penalty family over a kappa grid.
    Sweep(SweepArgs),
    /// Writes an entrywise perturbation of a positive definite matrix.
    Perturb(PerturbArgs),
    /// Writes a built-in penalty matrix H_b + kappa H_e.
    Example(ExampleArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Machine-readable output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct AnglesArgs {
    #[command(flatten)]
    pairs: PairArgs,
    /// Dimension of the eigenspace.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    #[value(name = "2")]
    Two,
    #[value(name = "fro")]
    Fro,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Two => NormKind::Spectral,
            NormArg::Fro => NormKind::Frobenius,
        }
    }
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[command(flatten)]
    pairs: PairArgs,
    #[arg(long)]
    k: usize,
    /// Mean in the relative gap: 1, 2 or inf.
    #[arg(long, default_value = "inf")]
    p: PNorm,
    #[arg(long, value_enum, default_value = "2")]
    norm: NormArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Built-in family: tridiag3 or tridiag4.
    #[arg(long, conflicts_with_all = ["family_hb", "family_he"], required_unless_present_all = ["family_hb", "family_he"])]
    example: Option<String>,
    /// Positive semidefinite base term of the family.
    #[arg(long, requires = "family_he")]
    family_hb: Option<PathBuf>,
    /// Positive semidefinite penalty term of the family.
    #[arg(long, requires = "family_hb")]
    family_he: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Pair variant such as "Hinv,H" or "I,H".
    #[arg(long, default_value = "Hinv,H")]
    variant: PairVariant,
    #[arg(long, default_value_t = 1e2)]
    kappa_start: f64,
    #[arg(long, default_value_t = 1e8)]
    kappa_stop: f64,
    #[arg(long, default_value_t = 13)]
    kappa_points: usize,
    /// main, phi or frobenius.
    #[arg(long, default_value = "main")]
    bound: BoundKind,
    /// limit or perturbed-pair.
    #[arg(long, default_value = "limit")]
    reference: Reference,
    #[arg(long, default_value = "inf")]
    p: PNorm,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    /// Positive definite input matrix.
    #[arg(long)]
    input: PathBuf,
    /// Relative entrywise size.
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output Matrix Market file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExampleArgs {
    /// tridiag3 or tridiag4.
    #[arg(long)]
    name: String,
    #[arg(long)]
    kappa: f64,
    /// Output Matrix Market file.
    #[arg(long)]
    out: PathBuf,
}

fn warn_degenerate(degenerate: bool) {
    if degenerate {
        eprintln!("warning: the split separates nearly equal eigenvalues; angles depend on the chosen basis");
    }
}

fn cmd_angles(args: &AnglesArgs) -> Result<()> {
    let pairs = args.pairs.load()?;
    let base = partition(&pair_eigendecompose(&pairs.h, &pairs.m)?, args.k)?;
    let pert = partition(&pair_eigendecompose(&pairs.h_tilde, &pairs.m_tilde)?, args.k)?;
    warn_degenerate([&base, &pert].iter().any(|p| p.is_degenerate_split(DEGENERATE_SPLIT_TOL)));
    let weighted = sin_theta_m(&base.x1, &m_orthonormalize(&pert.x1, &pairs.m)?, &pairs.m)?;
    let euclidean = sin_theta_euclid(&orthonormalize(&base.x1), &orthonormalize(&pert.x1))?;

    println!("{:>5}  {:>24}  {:>24}", "index", "weighted sine", "euclidean sine");
    for (i, (w, e)) in weighted.sines.iter().zip(&euclidean.sines).enumerate() {
        println!("{:>5}  {w:>24.16e}  {e:>24.16e}", i + 1);
    }
    println!("{:>5}  {:>24.16e}  {:>24.16e}", "norm2", weighted.norm2, euclidean.norm2);
    println!("{:>5}  {:>24.16e}  {:>24.16e}", "normF", weighted.norm_f, euclidean.norm_f);
    save(&AnglesOutput { weighted, euclidean }, args.output.format, args.output.out.as_deref())
}

fn analyse(args: &BoundArgs, compute_sun: bool) -> Result<PerturbationAnalysis> {
    let pairs = args.pairs.load()?;
    let opts = AnalysisOptions { compute_sun, ..Default::default() };
    let analysis = PerturbationAnalysis::run(&pairs.h, &pairs.m, &pairs.h_tilde, &pairs.m_tilde, args.k, &opts)?;
    warn_degenerate(analysis.degenerate_split);
    Ok(analysis)
}

fn cmd_bound(args: &BoundArgs) -> Result<()> {
    let a = analyse(args, false)?;
    let norm = NormKind::from(args.norm);
    let bound = a.bound(norm, args.p).clone();
    let exact = a.exact(norm);
    let g = &a.gaps;
    let row = |name: &str, v: String| println!("{name:<20} {v}");
    row("norm", format!("{norm:?}"));
    row("p", bound.p.map_or_else(|| "-".into(), |p| p.to_string()));
    row("step1", format!("{:.6e}", bound.step1));
    row("step2", format!("{:.6e}", bound.step2));
    row("correction factor", format!("{:.6e}", bound.correction_factor));
    row("total", format!("{:.6e}", bound.total));
    row("exact", format!("{exact:.6e}"));
    row("quotient", show_quotient(quotient(exact, bound.total).filter(|_| bound.applicable)));
    row("relgap", format!("{:.6e}", g.relgap));
    row(&format!("relgap_p[{}]", args.p), format!("{:.6e}", g.relgap_p.get(args.p)));
    row("relgap_comp", format!("{:.6e}", g.relgap_comp));
    row("dichotomy", format!("{:?}", g.dichotomy.dichotomy));
    if !bound.applicable {
        let reason = bound.reason.unwrap_or_else(|| "unknown".into());
        return Err(Inapplicable(reason).into());
    }
    save(&bound, args.output.format, args.output.out.as_deref())
}

fn cmd_compare(args: &BoundArgs) -> Result<()> {
    let a = analyse(args, true)?;
    let norm = NormKind::from(args.norm);
    let exact = a.exact(norm);
    let bound = a.bound(norm, args.p);
    let sun = a.sun.as_ref().context("classical bound was not computed")?;
    let mut rows = vec![CompareRow { method: "exact".into(), value: exact, quotient: None, applicable: true }];
    rows.push(CompareRow {
        method: "relative".into(),
        value: bound.total,
        quotient: quotient(exact, bound.total).filter(|_| bound.applicable),
        applicable: bound.applicable,
    });
    // The classical bound controls the Euclidean angle.
    let euclid = match norm {
        NormKind::Spectral => a.angle_euclid.norm2,
        NormKind::Frobenius => a.angle_euclid.norm_f,
    };
    rows.push(CompareRow {
        method: "classical".into(),
        value: sun.total,
        quotient: quotient(euclid, sun.total),
        applicable: sun.total.is_finite(),
    });
    println!("{:<10}  {:>14}  {:>10}", "method", "value", "quotient");
    for r in &rows {
        let value = if r.applicable { format!("{:.6e}", r.value) } else { "n/a".into() };
        println!("{:<10}  {value:>14}  {:>10}", r.method, show_quotient(r.quotient));
    }
    save(&CompareOutput { k: a.k, rows }, args.output.format, args.output.out.as_deref())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let family = match (&args.example, &args.family_hb, &args.family_he) {
        (Some(name), _, _) => builtin_example(name)?,
        (None, Some(hb), Some(he)) => PenaltyFamily::new(
            read_mtx_file(hb).with_context(|| format!("reading {}", hb.display()))?,
            read_mtx_file(he).with_context(|| format!("reading {}", he.display()))?,
        )?,
        _ => return Err(UsageError("give --example or both --family-hb and --family-he".into()).into()),
    };
    let grid = KappaGrid::log(args.kappa_start, args.kappa_stop, args.kappa_points)?;
    let cfg = SweepConfig {
        bound: args.bound,
        reference: args.reference,
        p: args.p,
        ..SweepConfig::new(args.k, args.variant)
    };
    let result = effectivity_sweep(&family, &grid, &cfg)?;

    println!("{:>12}  {:>14}  {:>14}  {:>10}  flags", "kappa", "left", "right", "quotient");
    for p in &result.points {
        println!(
            "{:>12.4e}  {:>14.6e}  {:>14.6e}  {:>10}  {}",
            p.kappa,
            p.left,
            p.right,
            show_quotient(p.quotient),
            p.flags.join(";")
        );
    }
    let slope = |s: Option<f64>| s.map_or_else(|| "n/a".to_string(), |s| format!("{s:.4}"));
    println!("left slope {}, right slope {}", slope(result.left_slope), slope(result.right_slope));
    if result.succeeded() == 0 {
        anyhow::bail!("no grid point succeeded");
    }
    save(&result, args.output.format, args.output.out.as_deref())
}

fn cmd_perturb(args: &PerturbArgs) -> Result<()> {
    let a = read_mtx_file(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let p = perturb_spd(&a, args.eta, args.seed)?;
    if p.seed != args.seed {
        eprintln!("note: seed {} gave an indefinite result; used seed {}", args.seed, p.seed);
    }
    write_atomic(&args.out, |w| Ok(write_mtx(&p.perturbed, w)?))?;
    println!("wrote {}x{} matrix to {} (seed {})", a.dim(), a.dim(), args.out.display(), p.seed);
    Ok(())
}

fn cmd_example(args: &ExampleArgs) -> Result<()> {
    let h = builtin_example(&args.name)?.assemble(args.kappa)?;
    write_atomic(&args.out, |w| Ok(write_mtx(&h, w)?))?;
    println!("wrote {} at kappa = {} to {}", args.name, args.kappa, args.out.display());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Inapplicable>() {
            return EXIT_INAPPLICABLE;
        }
        if cause.is::<MtxError>() || cause.is::<UsageError>() {
            return EXIT_PARSE;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                e if e.is_definiteness() => EXIT_DEFINITENESS,
                CoreError::BadBlockSize { .. }
                | CoreError::DimensionMismatch(_)
                | CoreError::NonFinite { .. }
                | CoreError::NotSymmetric { .. }
                | CoreError::InvalidArgument(_)
                | CoreError::BadP(_)
                | CoreError::UnknownExample(_)
                | CoreError::UnknownVariant(_)
                | CoreError::EmptyGrid => EXIT_PARSE,
                _ => EXIT_OTHER,
            };
        }
    }
    EXIT_OTHER
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Angles(a) => cmd_angles(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Example(a) => cmd_example(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
