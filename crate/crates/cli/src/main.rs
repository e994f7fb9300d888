use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arcnc::error::ConfigError;
use arcnc::experiment::{
    bounds_report, cmd_sim, format_bounds, format_summary, parse_q_list, preset, run_preset, write_csv, BoundsKind,
    ExperimentConfig,
};
use arcnc::metrics::BoundReport;
use arcnc::net::to_dot;
use arcnc::topology::TopologySpec;

#[derive(Parser)]
#[command(name = "arcnc", version, about = "Adaptive random convolutional network coding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write per-trial CSV plus a summary table.
    Sim(SimArgs),
    /// Print closed-form bounds.
    Bounds(BoundsArgs),
    /// Write a topology as Graphviz DOT.
    Graph(GraphArgs),
    /// Run a figure preset and write one CSV per curve.
    Repro(ReproArgs),
}

#[derive(Args, Clone, Default)]
struct TopologyArgs {
    /// combination, sparsified, umbrella, shuttle, rgg-acyclic or rgg-cyclic.
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long)]
    beta: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    sinks: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    drop_forward: Option<f64>,
    #[arg(long)]
    drop_backward: Option<f64>,
}

impl TopologyArgs {
    fn spec(&self) -> Result<Option<TopologySpec>, ConfigError> {
        let Some(family) = &self.topology else { return Ok(None) };
        let mut pairs = vec![("family".to_string(), family.replace('-', "_"))];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                pairs.push((k.to_string(), v));
            }
        };
        push("n", self.n.map(|v| v.to_string()));
        push("m", self.m.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("beta", self.beta.map(|v| v.to_string()));
        push("nodes", self.nodes.map(|v| v.to_string()));
        push("sinks", self.sinks.map(|v| v.to_string()));
        push("radius", self.radius.map(|v| v.to_string()));
        push("drop_forward", self.drop_forward.map(|v| v.to_string()));
        push("drop_backward", self.drop_backward.map(|v| v.to_string()));
        TopologySpec::from_pairs(&pairs).map(Some)
    }
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    topo: TopologyArgs,
    /// Comma-separated field sizes.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; ARCNC_SEED overrides it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_max: Option<usize>,
    /// arcnc, rlnc or both.
    #[arg(long)]
    mode: Option<String>,
    /// random or identity.
    #[arg(long)]
    source_mode: Option<String>,
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-trial CSV path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fill the runtime_ms column.
    #[arg(long)]
    timing: bool,
    /// Exit with status 3 when more ARCNC trials than this fraction hit t_max.
    #[arg(long, default_value_t = 0.0)]
    max_fail_rate: f64,
}

#[derive(Args)]
struct BoundsArgs {
    /// et, etn, var, sparsified, umbrella or rlnc-q.
    kind: String,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    qr_bits: Option<String>,
}

impl BoundsArgs {
    fn pairs(&self) -> Vec<(String, String)> {
        [
            ("m", &self.m),
            ("n", &self.n),
            ("q", &self.q),
            ("t", &self.t),
            ("d", &self.d),
            ("eta", &self.eta),
            ("j", &self.j),
            ("target", &self.target),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("epsilon", &self.epsilon),
            ("qr_bits", &self.qr_bits),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    topo: TopologyArgs,
    /// Seed for random families.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    /// Figure id; `list` prints the known ids.
    figure: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

enum Failure {
    Config(anyhow::Error),
    Horizon(String),
    Other(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Self::Other(e.into()),
            other => Self::Config(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::Other(e)
    }
}

fn env_seed() -> Result<Option<u64>, ConfigError> {
    match std::env::var("ARCNC_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| ConfigError::Invalid(format!("ARCNC_SEED: not an integer: `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn sim_config(args: &SimArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
            let mut cfg = ExperimentConfig::from_kv(&text)?;
            if let Some(spec) = args.topo.spec()? {
                cfg.topology = spec;
            }
            cfg
        }
        None => {
            let spec = args.topo.spec()?.ok_or_else(|| ConfigError::Invalid("--topology is required".into()))?;
            ExperimentConfig::new(spec)
        }
    };
    if let Some(q) = &args.q {
        cfg.q_list = parse_q_list(q)?;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(s) = env_seed()? {
        cfg.master_seed = s;
    }
    if let Some(t) = args.t_max {
        cfg.t_max = t;
    }
    if let Some(m) = &args.mode {
        cfg.set("mode", m)?;
    }
    if let Some(m) = &args.source_mode {
        cfg.set("source_mode", m)?;
    }
    cfg.timing |= args.timing;
    if !(0.0..=1.0).contains(&args.max_fail_rate) {
        return Err(ConfigError::Invalid("--max-fail-rate must lie in [0, 1]".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sim(args: &SimArgs) -> Result<(), Failure> {
    let cfg = sim_config(args)?;
    let out = cmd_sim(&cfg)?;
    let table = format_summary(&out.summaries);
    match &args.output {
        Some(path) => {
            let mut w = create(path)?;
            write_csv(&out.rows, &mut w)?;
            w.flush().context("flushing CSV")?;
            print!("{table}");
        }
        None => {
            write_csv(&out.rows, io::stdout().lock())?;
            eprint!("{table}");
        }
    }
    let rate = out.arcnc_fail_rate();
    if rate > args.max_fail_rate {
        return Err(Failure::Horizon(format!(
            "{:.2}% of trials did not decode within t_max={} (allowed {:.2}%)",
            rate * 100.0,
            cfg.t_max,
            args.max_fail_rate * 100.0
        )));
    }
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let kind: BoundsKind = args.kind.parse()?;
    let reports = bounds_report(kind, &args.pairs())?;
    print!("{}", format_bounds(&reports));
    Ok(())
}

fn graph(args: &GraphArgs) -> Result<(), Failure> {
    let spec = args.topo.spec()?.ok_or_else(|| ConfigError::Invalid("--topology is required".into()))?;
    let net = spec.build(&mut ChaCha8Rng::seed_from_u64(args.seed)).map_err(ConfigError::from)?;
    let dot = to_dot(&net);
    match &args.output {
        Some(path) => fs::write(path, dot).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{dot}"),
    }
    Ok(())
}

fn write_bounds_csv(path: &Path, reports: &[BoundReport]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["bound", "value", "asymptotic", "params"])?;
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        w.write_record([r.name.clone(), r.value.to_string(), r.asymptotic.to_string(), params.join(";")])?;
    }
    w.flush()?;
    Ok(())
}

fn repro(args: &ReproArgs) -> Result<(), Failure> {
    if args.figure == "list" {
        for id in arcnc::experiment::preset_ids() {
            println!("{id:<24} {}", preset(id)?.description);
        }
        return Ok(());
    }
    let p = preset(&args.figure)?;
    if args.trials == 0 {
        return Err(ConfigError::Invalid("--trials must be at least 1".into()).into());
    }
    let seed = env_seed()?.unwrap_or(args.seed);
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let out = run_preset(&p, args.trials, seed)?;
    println!("{}: {}", p.id, p.description);
    for (name, rows, summaries) in &out.curves {
        let path = args.out_dir.join(format!("{}_{name}.csv", p.id));
        let mut w = create(&path)?;
        write_csv(rows, &mut w)?;
        w.flush().context("flushing CSV")?;
        println!("wrote {}", path.display());
        print!("{}", format_summary(summaries));
    }
    if !out.bounds.is_empty() {
        let path = args.out_dir.join(format!("{}_bounds.csv", p.id));
        write_bounds_csv(&path, &out.bounds)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sim(a) => sim(a),
        Command::Bounds(a) => bounds(a),
        Command::Graph(a) => graph(a),
        Command::Repro(a) => repro(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Horizon(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
