use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypotest::bounds::{BoundContext, DEFAULT_STEIN_DELTA};
use hypotest::dist::TiltedFamily;
use hypotest::error::Error;
use hypotest::verify::{self, Fault, VerifyOptions};
use rayon::prelude::*;

use crate::format::DEFAULT_DIGITS;
use crate::row::{compute_row, exact_table, render_json, render_tsv, Budget, Row, COLUMNS, PAPER_COLUMNS};
use crate::{exit, CliError, CliResult, DistributionSpec, TABLE_EPSILONS};

/// Exact and approximate optimal error probabilities for testing `P^n`
/// against `Q^n` on a finite alphabet.
#[derive(Debug, Parser)]
#[command(name = "hypotest", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One report at a given sample size and error budget.
    Analyze(AnalyzeArgs),
    /// The comparison table: one report per epsilon.
    Table(TableArgs),
    /// Reports over a grid of sample sizes or exponents.
    Sweep(SweepArgs),
    /// Run the numerical self-checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// First hypothesis, `bernoulli:<p>` or `probs:<c0,c1,...>`.
    #[arg(long, default_value = "bernoulli:0.6")]
    pub p: DistributionSpec,
    /// Second hypothesis, same syntax.
    #[arg(long, default_value = "bernoulli:0.25")]
    pub q: DistributionSpec,
    /// Free parameter of the fixed-epsilon converse bound.
    #[arg(long, default_value_t = DEFAULT_STEIN_DELTA)]
    pub delta_slack: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Emit JSON instead of TSV.
    #[arg(long)]
    pub json: bool,
    /// Significant digits of numeric output.
    #[arg(long, default_value_t = DEFAULT_DIGITS, value_parser = clap::value_parser!(u16).range(1..=17).map(|d| d as usize))]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub n: u64,
    /// Bound on the second error probability.
    #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
    pub epsilon: Option<f64>,
    /// Exponent of the second error, `eps = exp(-n delta)`.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Move epsilon to the nearest level of a deterministic threshold test.
    #[arg(long, requires = "epsilon")]
    pub snap_epsilon: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EpsilonMode {
    /// Nearest level attainable by a deterministic threshold test.
    Snap,
    /// Use the listed values as given.
    Verbatim,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 50)]
    pub n: u64,
    /// Comma-separated epsilons; defaults to the seven levels of the
    /// reference table.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = EpsilonMode::Snap)]
    pub epsilon_mode: EpsilonMode,
    /// Only the printed columns, rounded as in the reference table.
    #[arg(long)]
    pub round_like_paper: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Fixed exponent for a sweep over n.
    #[arg(long, requires_all = ["n_from", "n_to"], conflicts_with_all = ["n", "delta_grid", "delta_points"])]
    pub delta: Option<f64>,
    #[arg(long)]
    pub n_from: Option<u64>,
    #[arg(long)]
    pub n_to: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub n_step: u64,
    /// Fixed sample size for a sweep over delta.
    #[arg(long, required_unless_present = "delta")]
    pub n: Option<u64>,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', conflicts_with = "delta_points")]
    pub delta_grid: Option<Vec<f64>>,
    /// This many exponents evenly spaced strictly inside (0, D(Q||P)).
    #[arg(long)]
    pub delta_points: Option<usize>,
    /// Skip the exact column.
    #[arg(long)]
    pub no_exact: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    PhiInvShift,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Seed of the random-pair generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random pairs.
    #[arg(long, default_value_t = 25)]
    pub pairs: usize,
    /// Corrupt a primitive to check that the suites notice.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

/// Output text and exit status of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: exit::OK }
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Analyze(a) => analyze(a).map(Outcome::ok),
        Command::Table(a) => table(a).map(Outcome::ok),
        Command::Sweep(a) => sweep(a).map(Outcome::ok),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn context(pair: &PairArgs) -> CliResult<BoundContext> {
    let family = TiltedFamily::new(pair.p.0.clone(), pair.q.0.clone())?;
    Ok(BoundContext::new(family)?.with_stein_delta(pair.delta_slack)?)
}

fn check_n(n: u64) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn render(rows: &[Row], output: &OutputArgs) -> String {
    let cells: Vec<_> = rows.iter().map(Row::cells).collect();
    if output.json {
        render_json(&COLUMNS, &cells, output.precision)
    } else {
        render_tsv(&COLUMNS, &cells, output.precision)
    }
}

/// Explicit exponents must lie where the exponent theory applies.
fn check_delta(ctx: &BoundContext, delta: f64) -> CliResult<()> {
    let max = ctx.family().kl_qp();
    if !(delta > 0.0 && delta < max) {
        return Err(Error::DeltaOutOfRange { delta, max }.into());
    }
    Ok(())
}

pub fn analyze(a: AnalyzeArgs) -> CliResult<String> {
    check_n(a.n)?;
    let ctx = context(&a.pair)?;
    let budget = match (a.epsilon, a.delta) {
        (Some(eps), None) => Budget::Epsilon(eps),
        (None, Some(delta)) => {
            check_delta(&ctx, delta)?;
            Budget::Delta(delta)
        }
        _ => return Err(CliError::Usage("give exactly one of --epsilon and --delta".into())),
    };
    let table = exact_table(&ctx, a.n)?;
    let row = compute_row(&ctx, table.as_ref(), a.n, budget, a.snap_epsilon)?;
    if a.output.json {
        let obj = crate::row::json_object(&COLUMNS, &row.cells(), a.output.precision);
        let mut s = serde_json::to_string_pretty(&obj).expect("serializable");
        s.push('\n');
        Ok(s)
    } else {
        Ok(render(&[row], &a.output))
    }
}

pub fn table(a: TableArgs) -> CliResult<String> {
    check_n(a.n)?;
    let ctx = context(&a.pair)?;
    let table = exact_table(&ctx, a.n)?;
    let epsilons = a.epsilons.clone().unwrap_or_else(|| TABLE_EPSILONS.to_vec());
    let snap = a.epsilon_mode == EpsilonMode::Snap;
    let rows: Vec<Row> = epsilons.iter().map(|&eps| compute_row(&ctx, table.as_ref(), a.n, Budget::Epsilon(eps), snap)).collect::<CliResult<_>>()?;
    if a.round_like_paper {
        let cells: Vec<_> = rows.iter().map(Row::paper_cells).collect();
        return Ok(if a.output.json {
            render_json(&PAPER_COLUMNS, &cells, a.output.precision)
        } else {
            render_tsv(&PAPER_COLUMNS, &cells, a.output.precision)
        });
    }
    Ok(render(&rows, &a.output))
}

pub fn sweep(a: SweepArgs) -> CliResult<String> {
    let ctx = context(&a.pair)?;
    let points: Vec<(u64, f64)> = if let Some(delta) = a.delta {
        check_delta(&ctx, delta)?;
        let (from, to) = (a.n_from.unwrap_or(1), a.n_to.unwrap_or(1));
        if from == 0 || to < from || a.n_step == 0 {
            return Err(CliError::Usage("need 1 <= --n-from <= --n-to and --n-step >= 1".into()));
        }
        (from..=to).step_by(a.n_step as usize).map(|n| (n, delta)).collect()
    } else {
        let n = a.n.ok_or_else(|| CliError::Usage("give --delta with an n range, or --n with a delta grid".into()))?;
        check_n(n)?;
        let deltas = match (&a.delta_grid, a.delta_points) {
            (Some(grid), None) => grid.clone(),
            (None, Some(k)) if k > 0 => {
                let max = ctx.family().kl_qp();
                (1..=k).map(|i| max * i as f64 / (k + 1) as f64).collect()
            }
            _ => return Err(CliError::Usage("give one of --delta-grid or --delta-points (>= 1) with --n".into())),
        };
        for &d in &deltas {
            check_delta(&ctx, d)?;
        }
        deltas.into_iter().map(|d| (n, d)).collect()
    };

    // rows are independent; collect() keeps the input order
    let rows: Vec<Row> = points
        .par_iter()
        .map(|&(n, delta)| {
            let table = if a.no_exact { None } else { exact_table(&ctx, n)? };
            compute_row(&ctx, table.as_ref(), n, Budget::Delta(delta), false)
        })
        .collect::<CliResult<_>>()?;
    Ok(render(&rows, &a.output))
}

pub fn verify_cmd(a: VerifyArgs) -> CliResult<Outcome> {
    let opts = VerifyOptions {
        seed: a.seed,
        random_pairs: a.pairs,
        fault: a.inject_fault.map(|f| match f {
            FaultArg::PhiInvShift => Fault::PhiInvShift,
        }),
    };
    let results = verify::run(&opts)?;
    let mut out = String::new();
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}\t{}\t{} checks\t{} failures\n", r.name, r.checks, r.failures));
        for c in &r.counterexamples {
            out.push_str(&format!("  counterexample: {c}\n"));
        }
        for note in &r.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
    }
    let code = if results.iter().all(|r| r.passed()) { exit::OK } else { exit::VERIFY_FAILED };
    Ok(Outcome { stdout: out, code })
}
