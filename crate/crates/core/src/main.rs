use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jordanlab::harness::{parse_config_text, run, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "jordanlab", version, about = "Column statistics of random nilpotent matrices over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sampled (or exact) shifted column law against the limit law.
    Compare(Opts),
    /// Probability tables from several methods with cross-method deltas.
    Tables(Opts),
    /// Jordan type and row/column profile of one random matrix.
    SampleFigure(Opts),
    /// Column law sampled from the growth chain, unshifted.
    Simulate(Opts),
    /// Exact column law with rational probabilities.
    ExactDp(Opts),
}

#[derive(Args)]
struct Opts {
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    /// Number of columns tracked.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated: dp, prelimit-integral, poissonized, series, contour, k1-explicit.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Torus radius for the finite-n integrals.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    torus_nodes: Option<usize>,
    #[arg(long)]
    contour_nodes: Option<usize>,
    /// Lower end of the signature window.
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<i64>,
    /// Upper end of the signature window.
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<i64>,
    /// auto, matrix or chain.
    #[arg(long)]
    sampler: Option<String>,
    /// Use the exact dynamic program instead of sampling.
    #[arg(long)]
    exact: bool,
    /// Record wall-clock runtime in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
}

impl Opts {
    fn overrides(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("n", self.n.map(|x| x.to_string()));
        put("q", self.q.map(|x| x.to_string()));
        put("k", self.k.map(|x| x.to_string()));
        put("samples", self.samples.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        put("tol", self.tol.map(|x| x.to_string()));
        put("method", self.method.clone());
        put("chi", self.chi.map(|x| x.to_string()));
        put("tau", self.tau.map(|x| x.to_string()));
        put("radius", self.radius.map(|x| x.to_string()));
        put("torus-nodes", self.torus_nodes.map(|x| x.to_string()));
        put("contour-nodes", self.contour_nodes.map(|x| x.to_string()));
        put("lo", self.lo.map(|x| x.to_string()));
        put("hi", self.hi.map(|x| x.to_string()));
        put("sampler", self.sampler.clone());
        put("exact", self.exact.then(|| "true".to_string()));
        put("timing", self.timing.then(|| "true".to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.clone());
        m
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, opts) = match &cli.command {
        Cmd::Compare(o) => ("compare", o),
        Cmd::Tables(o) => ("tables", o),
        Cmd::SampleFigure(o) => ("sample-figure", o),
        Cmd::Simulate(o) => ("simulate", o),
        Cmd::ExactDp(o) => ("exact-dp", o),
    };
    match execute(name, opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(name: &str, opts: &Opts) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let mut map = match &opts.config {
        Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    map.extend(opts.overrides());
    map.insert("command".into(), name.into());
    let cfg = ExperimentConfig::from_map(&map)?;
    let report = run(&cfg)?;
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }
    if let (Some(d), Format::Json) = (report.dinf, cfg.format) {
        if cfg.out.is_some() {
            eprintln!("dinf = {d:.3e}");
        }
    }
    for f in &report.failures {
        eprintln!("FAILURE: {f}");
    }
    Ok(if report.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
