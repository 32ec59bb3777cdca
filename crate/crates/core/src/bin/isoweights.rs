use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use isoweights::classify::{classify_cached, classify_with, render_table, ClassifyOptions, RunControl};
use isoweights::fixtures::{fixture, FixtureSpec};
use isoweights::graphs::{enumerate_multigraphs, Dedup, EdgeFilter};
use isoweights::hattori::{dim8_solver, hattori_report};
use isoweights::magnitudes::{Mode, SearchOptions};
use isoweights::verify::verify;
use isoweights::{Error, Profile, Result, WeightSystem};

#[derive(Parser)]
#[command(name = "isoweights", version, about = "Enumerate and verify isotropy-weight systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the multigraphs compatible with a profile.
    Enumerate {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        graphs: GraphArgs,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the classification pipeline.
    Classify(ClassifyArgs),
    /// Structural, localization and Laurent checks of a weight system.
    Verify {
        file: PathBuf,
    },
    /// Level data, r_s(1) values and the dimension-8 solver.
    Hattori {
        file: PathBuf,
        #[arg(long)]
        k0: Option<i64>,
        #[arg(long, default_value_t = 60)]
        lmax: i64,
    },
    /// Print the weight system of a standard example.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        /// Comma-separated ξ for cp and grassmannian.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<i64>,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
    },
    /// Solve the dimension-8 system for C1 = 1 over l ≤ lmax.
    ScanC1eq1 {
        #[arg(long, default_value_t = 60)]
        lmax: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    Cp,
    Grassmannian,
    V5,
    V22,
    S2xs2,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    All,
    Nonneg,
    Positive,
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupArg {
    None,
    Reversal,
}

#[derive(Args)]
struct ProfileArgs {
    /// Half the real dimension of the manifold
    #[arg(long)]
    n: usize,
    /// Use the minimal profile λ = (0, 1, …, n).
    #[arg(long)]
    minimal: bool,
    /// Comma-separated indices, one per fixed point.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<usize>>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum, default_value = "nonneg")]
    filter: FilterArg,
    #[arg(long, value_enum, default_value = "reversal")]
    dedup: DedupArg,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[command(flatten)]
    graphs: GraphArgs,
    /// Force this divisor of every label.
    #[arg(long = "C")]
    c: Option<i64>,
    /// Bounded search |m(e)| ≤ 2D instead of nonnegative labels.
    #[arg(long = "bound-D")]
    bound_d: Option<i64>,
    /// In dimension 8 only try C ∈ {1, 5}.
    #[arg(long)]
    dim8_strict: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Checkpoint file; finished blocks in it are reused.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Directory for classify.json, audit.json and table.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict to these graph ids (1-based, comma-separated).
    #[arg(long, value_delimiter = ',')]
    graphs_only: Option<Vec<usize>>,
    /// Restrict to these divisor branches (comma-separated).
    #[arg(long, value_delimiter = ',')]
    branches: Option<Vec<i64>>,
    /// Edge-weight bound for representative instances.
    #[arg(long, default_value_t = 12)]
    weight_bound: i64,
    /// Also require the Laurent conditions with k0 = C1.
    #[arg(long)]
    hattori: bool,
    /// Process at most this many blocks per branch.
    #[arg(long)]
    block_limit: Option<usize>,
    /// Reuse (and store) whole reports keyed by profile, options and code version.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl ProfileArgs {
    fn profile(&self) -> Result<Profile> {
        match (&self.lambdas, self.minimal) {
            (Some(_), true) => Err(Error::Schema("--minimal and --lambdas are exclusive".into())),
            (Some(l), false) => Profile::new(self.n, l.clone()),
            (None, _) => Ok(Profile::minimal(self.n)),
        }
    }
}

impl GraphArgs {
    fn filter(&self) -> EdgeFilter {
        match self.filter {
            FilterArg::All => EdgeFilter::All,
            FilterArg::Nonneg => EdgeFilter::Nonnegative,
            FilterArg::Positive => EdgeFilter::Positive,
        }
    }

    fn dedup(&self) -> Dedup {
        match self.dedup {
            DedupArg::None => Dedup::None,
            DedupArg::Reversal => Dedup::Reversal,
        }
    }
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_weights(path: &Path) -> Result<WeightSystem> {
    WeightSystem::from_json_str(&std::fs::read_to_string(path)?)
}

fn run_classify(a: &ClassifyArgs) -> Result<()> {
    if let Some(j) = a.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::Precondition(e.to_string()))?;
    }
    let profile = a.profile.profile()?;
    let opts = ClassifyOptions {
        search: SearchOptions {
            mode: a.bound_d.map_or(Mode::Nonnegative, Mode::Bounded),
            divisor_c: a.c,
            force_unit_edges: a.c.is_some(),
            dim8_strict: a.dim8_strict,
        },
        filter: a.graphs.filter(),
        dedup: a.graphs.dedup(),
        weight_bound: a.weight_bound,
        hattori: a.hattori,
        graphs: a.graphs_only.clone(),
        branches: a.branches.clone(),
        block_limit: a.block_limit,
    };
    let checkpoint = a.resume.clone().or_else(|| a.out.as_ref().map(|d| d.join("checkpoint.json")));
    let ctl = RunControl { checkpoint: checkpoint.as_deref(), resume: a.resume.as_ref().is_some_and(|p| p.exists()) };
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
    }
    let report = match &a.cache_dir {
        Some(dir) => classify_cached(&profile, &opts, dir, &ctl)?,
        None => classify_with(&profile, &opts, &ctl)?,
    };
    let table = render_table(&report);
    match &a.out {
        Some(dir) => {
            let mut main = serde_json::to_value(&report)?;
            let audit = main.as_object_mut().and_then(|m| m.remove("audit")).unwrap_or(json!([]));
            emit(&main, Some(&dir.join("classify.json")))?;
            emit(&json!({ "graph_classes": report.graph_classes, "graphs": audit }), Some(&dir.join("audit.json")))?;
            std::fs::write(dir.join("table.txt"), &table)?;
            eprint!("{table}");
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enumerate { profile, graphs, out } => {
            let p = profile.profile()?;
            let list = enumerate_multigraphs(&p, graphs.filter(), graphs.dedup())?;
            let doc = json!({
                "n": p.n(),
                "lambdas": p.lambdas(),
                "filter": graphs.filter(),
                "dedup": graphs.dedup(),
                "count": list.len(),
                "graphs": list.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
            });
            emit(&doc, out.as_deref())
        }
        Command::Classify(a) => run_classify(&a),
        Command::Verify { file } => {
            let report = verify(&read_weights(&file)?)?;
            emit(&report.to_json(), None)
        }
        Command::Hattori { file, k0, lmax } => {
            let report = hattori_report(&read_weights(&file)?, k0, lmax);
            emit(&serde_json::to_value(report)?, None)
        }
        Command::Fixture { name, xi, a, b } => {
            let need = |v: Option<i64>, f: &str| v.ok_or_else(|| Error::Schema(format!("--{f} is required")));
            let spec = match name {
                FixtureName::Cp => FixtureSpec::Cp { xi },
                FixtureName::Grassmannian => FixtureSpec::Grassmannian { xi },
                FixtureName::V5 => FixtureSpec::V5,
                FixtureName::V22 => FixtureSpec::V22,
                FixtureName::S2xs2 => FixtureSpec::S2xs2 { a: need(a, "a")?, b: need(b, "b")? },
            };
            emit(&fixture(&spec)?.to_json(), None)
        }
        Command::ScanC1eq1 { lmax } => emit(&serde_json::to_value(dim8_solver(1, lmax))?, None),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_) | Error::BalanceViolation { .. } | Error::RangeViolation { .. } => 2,
        Error::ProfileUnrealizable | Error::NonIntegralSum | Error::ModeRefused => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
