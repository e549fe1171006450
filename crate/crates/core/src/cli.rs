//! The `entdisc` command line. JSON (or CSV for noise curves) goes to stdout
//! or `--out`; a short human-readable summary goes to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::dense::{builtin_state, DenseState, Observable, ProductBasis, BUILTIN_STATES};
use crate::error::{Error, Result};
use crate::graph::{count_two_point, group_of_state, two_point_bound, GraphSpec};
use crate::measures::{DiscriminationReport, Normalization, Problem};
use crate::optimizer::{discriminate, max_overlap, noise_curve, noise_curve_csv, parse_grid, subset_search, Metric, OptimizerConfig};
use crate::pauli::PauliString;
use crate::statstest::{coin_equivalence, empirical_d, ingest_correlations, measures_from_correlations, simulate_runs};

#[derive(Parser, Debug)]
#[command(name = "entdisc", version, about = "Discriminate multiqubit states from local-unitary orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit-minimized fidelity gap and relative entropy of rho against sigma.
    Discriminate(Discriminate),
    /// Largest squared overlap of rho with the orbit of sigma.
    Overlap(Overlap),
    /// Rank small observable families by their discrimination power.
    SubsetSearch(SubsetSearch),
    /// Both measures against the white-noise level 1-p, as CSV.
    NoiseCurve(NoiseCurve),
    /// Two-point stabilizer bound between two graph states.
    GraphBound(GraphBound),
    /// Sample finite measurement runs.
    Simulate(Simulate),
    /// Measures from a file of measured correlations.
    Ingest(Ingest),
}

#[derive(Args, Debug, Clone)]
struct Search {
    /// Include the qubit-permutation orbit.
    #[arg(long)]
    perms: bool,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 4000)]
    max_iter: usize,
}

impl Search {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iterations: self.max_iter,
            tolerance: self.tol,
            seed: self.seed,
            include_permutations: self.perms,
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum MetricArg {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "both")]
    Both,
}

impl MetricArg {
    fn metrics(self) -> Vec<Metric> {
        match self {
            MetricArg::F => vec![Metric::F],
            MetricArg::D => vec![Metric::D],
            MetricArg::Both => vec![Metric::F, Metric::D],
        }
    }
}

#[derive(Args, Debug)]
struct Discriminate {
    /// Built-in name or state JSON file.
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    /// stabilizers, two-point, three-point, comp-basis, or a file of Pauli labels.
    #[arg(long, default_value = "stabilizers")]
    obs: String,
    #[arg(long, value_enum, default_value = "both")]
    metric: MetricArg,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Overlap {
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SubsetSearch {
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    #[arg(long, default_value = "stabilizers")]
    obs: String,
    #[arg(long, value_enum, default_value = "D")]
    metric: MetricArg,
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct NoiseCurve {
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    #[arg(long, default_value = "stabilizers")]
    obs: String,
    /// Noise levels 1-p as lo:hi:step.
    #[arg(long, default_value = "0:1:0.05")]
    noise_grid: String,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GraphBound {
    /// Graph JSON file `{"n": .., "edges": [[1, 2], ...]}`.
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Simulate {
    #[arg(long)]
    rho: String,
    #[arg(long, default_value = "stabilizers")]
    obs: String,
    /// Total number of runs, split evenly over the observables.
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    /// Also score the samples against this state.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Ingest {
    /// CSV of `label,expectation,stderr`.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    sigma: String,
    /// Ideal state the fidelity gap is normalized to; by default every
    /// label is assumed to have ideal expectation 1.
    #[arg(long)]
    ideal: Option<String>,
    #[arg(long, value_enum, default_value = "both")]
    metric: MetricArg,
    #[arg(long, default_value_t = 1000)]
    mc_samples: usize,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    output: Output,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Built-in state name or path to a state JSON file.
pub fn load_state(spec: &str) -> Result<DenseState> {
    if let Some(s) = builtin_state(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::InvalidState(format!("{spec:?} is neither a file nor one of {}", BUILTIN_STATES.join(", "))));
    }
    DenseState::from_json(&std::fs::read_to_string(path)?)
}

/// Pauli labels separated by whitespace or commas; `#` starts a comment.
pub fn parse_label_list(text: &str) -> Result<Vec<PauliString>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|w| !w.is_empty())
        .map(str::parse)
        .collect()
}

/// Resolves an observable-set name against `rho`.
pub fn resolve_observables(spec: &str, rho: &DenseState) -> Result<Vec<Observable>> {
    let from_group = |w: Option<usize>| -> Result<Vec<Observable>> {
        let group = group_of_state(rho)?;
        let ops = match w {
            None => group.nontrivial(),
            Some(w) => group.of_weight(w),
        };
        if ops.is_empty() {
            return Err(Error::EmptyObservables);
        }
        Ok(ops.into_iter().map(Observable::Pauli).collect())
    };
    match spec {
        "stabilizers" => from_group(None),
        "two-point" => from_group(Some(2)),
        "three-point" => from_group(Some(3)),
        "comp-basis" => Ok(vec![Observable::ProductBasis(ProductBasis::computational(rho.n())?)]),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidObservable(format!("{path:?} is not a known set and cannot be read: {e}")))?;
            let labels = parse_label_list(&text)?;
            if labels.is_empty() {
                return Err(Error::EmptyObservables);
            }
            Ok(labels.into_iter().map(Observable::Pauli).collect())
        }
    }
}

fn emit_text(text: &str, out: &Output, stdout: &mut dyn Write) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: &Output, stdout: &mut dyn Write) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(&text, out, stdout)
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn summarize(report: &DiscriminationReport, stderr: &mut dyn Write) -> Result<()> {
    for (name, result) in [("F", &report.f), ("D", &report.d)] {
        let Some(r) = result else { continue };
        writeln!(stderr, "{name} = {}", fmt_value(r.value))?;
        for t in &r.terms {
            let gap = t.f_gap.map_or("-".to_string(), fmt_value);
            writeln!(stderr, "  {:>12}  gap {gap:>9}  D {:>9}", t.label, fmt_value(t.d))?;
        }
    }
    Ok(())
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Discriminate(a) => {
            let rho = load_state(&a.rho)?;
            let sigma = load_state(&a.sigma)?;
            let obs = resolve_observables(&a.obs, &rho)?;
            let metrics = a.metric.metrics();
            let problem = Problem::from_state(&rho, &obs, &Normalization::Rho)?;
            let report = discriminate(&problem, &sigma, &a.search.config(), metrics.contains(&Metric::F), metrics.contains(&Metric::D))?;
            summarize(&report, stderr)?;
            #[derive(Serialize)]
            struct Out<'a> {
                rho: &'a str,
                sigma: &'a str,
                observables: Vec<String>,
                #[serde(flatten)]
                report: DiscriminationReport,
            }
            let out = Out { rho: &a.rho, sigma: &a.sigma, observables: obs.iter().map(Observable::label).collect(), report };
            emit_json(&out, &a.output, stdout)
        }
        Command::Overlap(a) => {
            let rho = load_state(&a.rho)?;
            let sigma = load_state(&a.sigma)?;
            let (value, params) = max_overlap(&rho, &sigma, &a.search.config())?;
            writeln!(stderr, "max overlap = {value:.6}")?;
            emit_json(&json!({ "rho": a.rho, "sigma": a.sigma, "value": value, "params": params }), &a.output, stdout)
        }
        Command::SubsetSearch(a) => {
            let rho = load_state(&a.rho)?;
            let sigma = load_state(&a.sigma)?;
            let cands = resolve_observables(&a.obs, &rho)?
                .iter()
                .map(|o| o.as_pauli().copied().ok_or_else(|| Error::InvalidObservable("subset search needs Pauli candidates".into())))
                .collect::<Result<Vec<_>>>()?;
            let cfg = a.search.config();
            let mut rankings = Vec::new();
            for metric in a.metric.metrics() {
                let families = subset_search(&rho, &sigma, &cands, a.max_size, metric, &cfg)?;
                writeln!(stderr, "{metric}: {} families", families.len())?;
                for f in families.iter().take(10) {
                    writeln!(stderr, "  {}  {{{}}}", fmt_value(f.value), f.labels.join(", "))?;
                }
                rankings.push(json!({ "metric": metric, "families": families }));
            }
            emit_json(&json!({ "rho": a.rho, "sigma": a.sigma, "max_size": a.max_size, "rankings": rankings }), &a.output, stdout)
        }
        Command::NoiseCurve(a) => {
            let rho = load_state(&a.rho)?;
            let sigma = load_state(&a.sigma)?;
            let obs = resolve_observables(&a.obs, &rho)?;
            let grid = parse_grid(&a.noise_grid)?;
            let points = noise_curve(&rho, &sigma, &obs, &grid, &a.search.config())?;
            for p in &points {
                writeln!(stderr, "1-p {:.3}  F {}  D {}", p.one_minus_p, fmt_value(p.f), fmt_value(p.d))?;
            }
            emit_text(&noise_curve_csv(&points)?, &a.output, stdout)
        }
        Command::GraphBound(a) => {
            let g1 = GraphSpec::from_json(&std::fs::read_to_string(&a.g1)?)?;
            let g2 = GraphSpec::from_json(&std::fs::read_to_string(&a.g2)?)?;
            let (c1, _) = count_two_point(&g1)?;
            let (c2, _) = count_two_point(&g2)?;
            let bound = two_point_bound(&g1, &g2)?;
            writeln!(stderr, "two-point operators: {c1} and {c2}; bound {bound:.4}")?;
            emit_json(&json!({ "two_point_g1": c1, "two_point_g2": c2, "bound": bound }), &a.output, stdout)
        }
        Command::Simulate(a) => {
            let rho = load_state(&a.rho)?;
            let obs = resolve_observables(&a.obs, &rho)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let runs = simulate_runs(&rho, &obs, a.runs, &mut rng)?;
            let mut out = json!({ "rho": a.rho, "runs_total": a.runs, "runs": runs });
            if let Some(spec) = &a.sigma {
                let sigma = load_state(spec)?;
                let mut per = Vec::new();
                let mut total = 0.0;
                for r in &runs {
                    let d = empirical_d(r, &sigma)?;
                    total += d;
                    per.push(if d.is_finite() { json!(d) } else { json!("inf") });
                }
                let mean = total / runs.len() as f64;
                let shots: u64 = runs.iter().map(|r| r.total).sum();
                let (log2_p, tosses) = coin_equivalence(shots, mean);
                writeln!(stderr, "empirical D = {}  ~ {} fair-coin tosses", fmt_value(mean), fmt_value(tosses))?;
                let finite = |v: f64| if v.is_finite() { json!(v) } else { json!(if v > 0.0 { "inf" } else { "-inf" }) };
                out["sigma"] = json!(spec);
                out["empirical_d"] = json!(per);
                out["mean_empirical_d"] = finite(mean);
                out["log2_probability"] = finite(log2_p);
                out["equivalent_coin_tosses"] = finite(tosses);
            }
            emit_json(&out, &a.output, stdout)
        }
        Command::Ingest(a) => {
            let data = ingest_correlations(&a.data)?;
            let sigma = load_state(&a.sigma)?;
            let normalization = match &a.ideal {
                Some(spec) => Normalization::Reference(load_state(spec)?),
                None => Normalization::Unit,
            };
            let cfg = a.search.config();
            let mut estimates = Vec::new();
            for metric in a.metric.metrics() {
                let est = measures_from_correlations(&data, &sigma, metric, &normalization, &cfg, a.mc_samples)?;
                let spread = est.uncertainty.map_or("-".to_string(), fmt_value);
                writeln!(stderr, "{metric} = {} +/- {spread}", fmt_value(est.value))?;
                estimates.push(est);
            }
            emit_json(&json!({ "records": data.len(), "sigma": a.sigma, "estimates": estimates }), &a.output, stdout)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("entdisc").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["discriminate", "--rho", "ghz4"]).0, 2);
        assert_eq!(call(&["overlap", "--rho", "ghz3", "--sigma", "w3", "--bogus"]).0, 2);
    }

    #[test]
    fn computation_errors_exit_1() {
        let (code, _, err) = call(&["overlap", "--rho", "nope", "--sigma", "w3"]);
        assert_eq!(code, 1);
        assert!(err.contains("error"));
        assert_eq!(call(&["discriminate", "--rho", "w3", "--sigma", "ghz3", "--obs", "stabilizers"]).0, 1);
    }

    #[test]
    fn label_lists() {
        let words = parse_label_list("IIZ, ZII # singles\n-XYY\n\n").unwrap();
        assert_eq!(words.len(), 3);
        assert!(parse_label_list("IIQ").is_err());
    }

    #[test]
    fn observable_sets() {
        let g = builtin_state("ghz4").unwrap();
        assert_eq!(resolve_observables("stabilizers", &g).unwrap().len(), 15);
        assert_eq!(resolve_observables("two-point", &g).unwrap().len(), 6);
        assert!(resolve_observables("three-point", &g).is_err());
        assert_eq!(resolve_observables("three-point", &builtin_state("cluster4").unwrap()).unwrap().len(), 8);
        assert_eq!(resolve_observables("comp-basis", &g).unwrap().len(), 1);
    }
}
