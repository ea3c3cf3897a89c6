mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use climbrank::audit::iia_audit;
use climbrank::copula::CorrelationSpec;
use climbrank::io::read_competition;
use climbrank::montecarlo::{
    conditional_rank_distribution, conditional_win_probability, expected_score_by_placement, run_simulation, Condition,
    RoundSize, SimulationConfig, DEFAULT_REPLICATIONS,
};
use climbrank::pca::{pca, PerformanceMatrix, VARIABLES};
use climbrank::stats::{bootstrap_tau_ci, kendall_exact_test, PairedRanks};
use climbrank::{AggregationMethod, RoundResult};
use output::{write_tables, Cell, Format, Table};

#[derive(Parser)]
#[command(
    name = "climbrank",
    version,
    about = "Scoring, simulation and audits for combined climbing results"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Master seed for simulations and bootstrap resampling.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write output here instead of stdout; the run manifest goes to
    /// `<out>.manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Product,
    Sum,
    SqrtSum,
}

impl From<Method> for AggregationMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Product => AggregationMethod::Product,
            Method::Sum => AggregationMethod::Sum,
            Method::SqrtSum => AggregationMethod::SumOfSquareRoots,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Round {
    Qual,
    Final,
}

impl From<Round> for RoundSize {
    fn from(r: Round) -> Self {
        match r {
            Round::Qual => RoundSize::Qualification,
            Round::Final => RoundSize::Final,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variable {
    Speed,
    #[value(alias = "bouldering")]
    Boulder,
    Lead,
    Overall,
}

impl Variable {
    fn name(self) -> &'static str {
        match self {
            Variable::Speed => "speed",
            Variable::Boulder => "boulder",
            Variable::Lead => "lead",
            Variable::Overall => "overall",
        }
    }

    fn ranks(self, round: &RoundResult) -> Vec<u32> {
        match self {
            Variable::Overall => round.placements().to_vec(),
            _ => round
                .entries()
                .iter()
                .map(|e| match self {
                    Variable::Speed => e.ranks.speed,
                    Variable::Boulder => e.ranks.boulder,
                    _ => e.ranks.lead,
                })
                .collect(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Recompute scores and standings for a results file.
    Score {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Product)]
        method: Method,
    },
    /// Simulate rounds and tabulate conditional outcomes.
    Simulate {
        #[arg(long, value_enum)]
        round: Round,
        /// Kendall tau between bouldering and lead ranks.
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = Method::Product)]
        method: Method,
    },
    /// Win probabilities across a range of tau values.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        taus: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Round::Final)]
        round: Round,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
    },
    /// Kendall tau, exact test and optional bootstrap interval.
    Correlate {
        file: PathBuf,
        /// Defaults to each discipline in turn.
        #[arg(long, value_enum)]
        x: Option<Variable>,
        #[arg(long, value_enum, default_value_t = Variable::Overall)]
        y: Variable,
        /// Bootstrap resamples; 0 skips the interval.
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Leave-one-out rescoring of every climber.
    Audit { file: PathBuf },
    /// Principal components of speed time, boulder tops and lead holds.
    Pca { file: PathBuf },
}

fn load(path: &Path, method: AggregationMethod) -> anyhow::Result<RoundResult> {
    let file = File::open(path).map_err(|e| climbrank::DataError::Io(format!("{}: {e}", path.display())))?;
    read_competition(file, None, method).with_context(|| format!("reading {}", path.display()))
}

fn score(file: &Path, method: AggregationMethod) -> anyhow::Result<(Vec<Table>, serde_json::Value)> {
    let round = load(file, method)?;
    let mut t = Table::new(
        "standings",
        &[
            "placement",
            "id",
            "name",
            "speed",
            "boulder",
            "lead",
            "score",
            "tied",
            "official_total",
            "official_place",
        ],
    );
    for i in round.order() {
        let e = &round.entries()[i];
        let p = round.placements()[i];
        let score = match method {
            AggregationMethod::Product => Cell::from(e.ranks.product()),
            _ => Cell::from(round.scores()[i]),
        };
        t.push(vec![
            p.into(),
            e.climber.id.as_str().into(),
            e.climber.name.as_str().into(),
            e.ranks.speed.into(),
            e.ranks.boulder.into(),
            e.ranks.lead.into(),
            score,
            (round.placements().iter().filter(|&&q| q == p).count() > 1).into(),
            e.official.and_then(|o| o.total).into(),
            e.official.and_then(|o| o.place).into(),
        ]);
    }
    let config = json!({ "file": file, "n": round.len(), "method": method.as_str() });
    Ok((vec![t], config))
}

fn simulate(config: &SimulationConfig) -> anyhow::Result<Vec<Table>> {
    let set = run_simulation(config)?;
    let mut win = Table::new("conditional", &["condition", "observations", "p_win"]);
    let mut dist = Table::new("distribution", &["condition", "placement", "probability", "cumulative"]);
    for c in Condition::ALL {
        let d = conditional_rank_distribution(&set, c);
        win.push(vec![c.as_str().into(), d.observations.into(), d.at(1).into()]);
        for k in 1..=set.n() {
            dist.push(vec![
                c.as_str().into(),
                k.into(),
                d.at(k).into(),
                d.at_or_better(k).into(),
            ]);
        }
    }
    let mut scores = Table::new("expected_score", &["placement", "mean", "lower", "upper", "count"]);
    for s in expected_score_by_placement(&set) {
        scores.push(vec![
            s.placement.into(),
            s.mean.into(),
            s.lower.into(),
            s.upper.into(),
            s.count.into(),
        ]);
    }
    Ok(vec![win, dist, scores])
}

fn sim_config_json(c: &SimulationConfig) -> serde_json::Value {
    json!({
        "n": c.round.field_size(),
        "tau": c.spec.tau(),
        "reps": c.replications,
        "seed": c.master_seed,
        "method": c.method.as_str(),
    })
}

fn sweep(taus: &[f64], round: RoundSize, reps: usize, seed: u64) -> anyhow::Result<Vec<Table>> {
    let mut t = Table::new("trend", &["tau", "condition", "p_win"]);
    for &tau in taus {
        let set = run_simulation(&SimulationConfig::new(round, CorrelationSpec::new(tau)?, reps, seed))?;
        for c in Condition::ALL {
            t.push(vec![
                tau.into(),
                c.as_str().into(),
                conditional_win_probability(&set, c).into(),
            ]);
        }
    }
    Ok(vec![t])
}

fn correlate(
    file: &Path,
    xs: &[Variable],
    y: Variable,
    bootstrap: usize,
    level: f64,
    seed: u64,
) -> anyhow::Result<Vec<Table>> {
    let round = load(file, AggregationMethod::Product)?;
    let mut t = Table::new(
        "kendall",
        &["x", "y", "n", "tau", "t", "p_value", "exact", "ci_lower", "ci_upper"],
    );
    for &x in xs {
        let data = PairedRanks::from_ranks(&x.ranks(&round), &y.ranks(&round))?;
        let test = kendall_exact_test(&data)?;
        let ci = if bootstrap > 0 {
            Some(bootstrap_tau_ci(&data, bootstrap, level, seed)?)
        } else {
            None
        };
        t.push(vec![
            x.name().into(),
            y.name().into(),
            data.len().into(),
            test.tau.into(),
            test.statistic_t.into(),
            test.p_value.into(),
            test.exact.into(),
            ci.map(|c| c.lower).into(),
            ci.map(|c| c.upper).into(),
        ]);
    }
    Ok(vec![t])
}

fn audit(file: &Path) -> anyhow::Result<Vec<Table>> {
    let round = load(file, AggregationMethod::Product)?;
    let report = iia_audit(&round)?;
    let mut ex = Table::new(
        "exclusions",
        &[
            "excluded_id",
            "excluded_placement",
            "perfect",
            "reversals",
            "agreement_tau",
        ],
    );
    let mut standings = Table::new("standings", &["excluded_id", "id", "old_placement", "new_placement"]);
    let mut reversals = Table::new("reversals", &["excluded_id", "ahead", "behind", "excluded_position"]);
    for e in &report.exclusions {
        ex.push(vec![
            e.excluded_id.as_str().into(),
            e.excluded_placement.into(),
            e.is_perfect().into(),
            e.reversals.len().into(),
            e.agreement_tau.into(),
        ]);
        for c in &e.rank_changes {
            standings.push(vec![
                e.excluded_id.as_str().into(),
                c.id.as_str().into(),
                c.old_placement.into(),
                c.new_placement.into(),
            ]);
        }
        for r in &e.reversals {
            let pos = serde_json::to_value(r.excluded_position)?;
            reversals.push(vec![
                e.excluded_id.as_str().into(),
                r.ahead.as_str().into(),
                r.behind.as_str().into(),
                pos.as_str().unwrap_or_default().into(),
            ]);
        }
    }
    let mut summary = Table::new("summary", &["climbers", "perfect_agreements"]);
    summary.push(vec![report.exclusions.len().into(), report.perfect_agreements.into()]);
    Ok(vec![summary, ex, standings, reversals])
}

fn principal_components(file: &Path) -> anyhow::Result<Vec<Table>> {
    let round = load(file, AggregationMethod::Product)?;
    let (matrix, kept) = PerformanceMatrix::from_round(&round)?;
    let r = pca(&matrix)?;
    let mut variance = Table::new("variance", &["component", "eigenvalue", "explained"]);
    for k in 0..3 {
        variance.push(vec![
            format!("PC{}", k + 1).into(),
            r.eigenvalues[k].into(),
            r.explained[k].into(),
        ]);
    }
    let mut loadings = Table::new("loadings", &["variable", "pc1", "pc2", "pc3"]);
    for (j, v) in VARIABLES.iter().enumerate() {
        loadings.push(vec![
            (*v).into(),
            r.loading(j, 0).into(),
            r.loading(j, 1).into(),
            r.loading(j, 2).into(),
        ]);
    }
    let mut scores = Table::new("scores", &["id", "pc1", "pc2", "pc3"]);
    for (&i, s) in kept.iter().zip(&r.scores) {
        scores.push(vec![
            round.entries()[i].climber.id.as_str().into(),
            s[0].into(),
            s[1].into(),
            s[2].into(),
        ]);
    }
    Ok(vec![variance, loadings, scores])
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    let (name, tables, config) = match &cli.command {
        Command::Score { file, method } => {
            let (tables, config) = score(file, (*method).into())?;
            ("score", tables, config)
        }
        Command::Simulate {
            round,
            tau,
            reps,
            method,
        } => {
            let config = SimulationConfig::new((*round).into(), CorrelationSpec::new(*tau)?, *reps, g.seed)
                .with_method((*method).into());
            ("simulate", simulate(&config)?, sim_config_json(&config))
        }
        Command::Sweep { taus, round, reps } => {
            let size: RoundSize = (*round).into();
            let config =
                json!({ "n": size.field_size(), "taus": taus, "reps": reps, "seed": g.seed, "method": "product" });
            ("sweep", sweep(taus, size, *reps, g.seed)?, config)
        }
        Command::Correlate {
            file,
            x,
            y,
            bootstrap,
            level,
        } => {
            let xs = match x {
                Some(v) => vec![*v],
                None => vec![Variable::Speed, Variable::Boulder, Variable::Lead],
            };
            let config = json!({
                "file": file,
                "x": xs.iter().map(|v| v.name()).collect::<Vec<_>>(),
                "y": y.name(),
                "bootstrap": bootstrap,
                "level": level,
                "seed": g.seed,
            });
            (
                "correlate",
                correlate(file, &xs, *y, *bootstrap, *level, g.seed)?,
                config,
            )
        }
        Command::Audit { file } => ("audit", audit(file)?, json!({ "file": file, "method": "product" })),
        Command::Pca { file } => ("pca", principal_components(file)?, json!({ "file": file })),
    };

    let manifest = json!({
        "command": name,
        "config": config,
        "format": match g.format { Format::Csv => "csv", Format::Json => "json" },
        "version": env!("CARGO_PKG_VERSION"),
    });
    let manifest = serde_json::to_string_pretty(&manifest)? + "\n";
    match &g.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| climbrank::DataError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_tables(&tables, g.format, &mut w)?;
            w.flush()?;
            let mut mpath = path.clone().into_os_string();
            mpath.push(".manifest.json");
            std::fs::write(&mpath, manifest)
                .map_err(|e| climbrank::DataError::Io(format!("{}: {e}", Path::new(&mpath).display())))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_tables(&tables, g.format, &mut w)?;
            w.flush()?;
            eprint!("{manifest}");
        }
    }
    Ok(())
}

/// 2 for invalid input data, 3 for numerical or domain failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    use climbrank::Error;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Domain(_) | Error::UndefinedCorrelation(_) => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<climbrank::DataError>().is_some() {
            return 2;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
