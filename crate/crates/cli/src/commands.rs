use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use planar_gap::certify::{verify_all, SuiteOptions};
use planar_gap::graph::io::{self, Format, GraphDocument};
use planar_gap::graph::{build_hat_tree, degree_stats, HatTree};
use planar_gap::spectral::{
    cheeger_exact, cheeger_sweep, lambda1, verify_cheeger_inequality, LambdaOptions, SolverChoice,
    EXACT_CHEEGER_LIMIT,
};
use planar_gap::walk::{
    bfs_distances, distance_stats, hat_tree_step_cap, mixing_time, trajectory_csv, DistanceMode,
    MixingMethod, MixingOptions, StartPolicy, EXACT_DISTANCE_LIMIT,
};
use planar_gap::Error;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    Command, Common, MethodArg, MetricsArgs, MixingArgs, OutputFormat, SolverArg, SweepArgs,
};
use crate::{EXIT_NUMERICAL, EXIT_USAGE, EXIT_VERIFICATION};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConvergenceFailure { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Build(c) => build(&c),
        Command::Spectrum(c) => spectrum(&c),
        Command::Cheeger(c) => cheeger(&c),
        Command::Verify(c) => verify(&c),
        Command::Mixing(a) => mixing(&a),
        Command::Metrics(a) => metrics(&a),
        Command::Sweep(a) => sweep(&a),
    }
}

fn default_k(h: u32) -> CliResult<u32> {
    1u32.checked_shl(h).ok_or_else(|| {
        Error::CapacityExceeded {
            what: format!("default subdivision factor 2^{h}"),
            limit: 31,
        }
        .into()
    })
}

/// `(h, k)` with `k` defaulting to `2^h`.
fn tree_params(c: &Common) -> CliResult<(u32, u32)> {
    let h = c.h.ok_or_else(|| CliError::usage("--h is required"))?;
    let k = match c.k {
        Some(k) => k,
        None => default_k(h)?,
    };
    Ok((h, k))
}

fn graph_format(format: Option<OutputFormat>, path: Option<&Path>) -> CliResult<Format> {
    match format {
        Some(OutputFormat::Edgelist) => Ok(Format::Edgelist),
        Some(OutputFormat::Json) => Ok(Format::Json),
        Some(OutputFormat::Dot) => Ok(Format::Dot),
        Some(OutputFormat::Csv) => Err(CliError::usage("csv is not a graph format")),
        None => Ok(path.map(Format::from_path).unwrap_or(Format::Edgelist)),
    }
}

/// The graph named by `--in` or built from `--h`/`--k`.
fn load(c: &Common) -> CliResult<GraphDocument> {
    match (&c.input, c.h) {
        (Some(_), Some(_)) => Err(CliError::usage("use either --in or --h, not both")),
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            let format = match c.format {
                Some(OutputFormat::Edgelist | OutputFormat::Json | OutputFormat::Dot) => {
                    graph_format(c.format, None)?
                }
                _ => Format::from_path(path),
            };
            Ok(io::deserialize(&text, format)?)
        }
        (None, Some(_)) => {
            let (h, k) = tree_params(c)?;
            Ok(build_hat_tree(h, k)?.into())
        }
        (None, None) => Err(CliError::usage("give a graph with --in PATH or --h H")),
    }
}

fn lambda_options(c: &Common) -> LambdaOptions {
    LambdaOptions {
        solver: match c.solver {
            SolverArg::Auto => SolverChoice::Auto,
            SolverArg::Dense => SolverChoice::Dense,
            SolverArg::Iterative => SolverChoice::Iterative,
        },
        tolerance: c.tol,
        max_iter: c.max_iter,
        seed: c.seed,
        dense_cutoff: c.dense_cutoff,
        ..LambdaOptions::default()
    }
}

fn config<T: Serialize>(command: &str, args: &T, c: &Common) -> Value {
    let mut value = serde_json::to_value(args).expect("arguments serialize");
    let map = value.as_object_mut().expect("arguments are a struct");
    map.insert("command".into(), json!(command));
    if c.input.is_none() {
        if let Ok((_, k)) = tree_params(c) {
            map.insert("k".into(), json!(k));
        }
    }
    value
}

fn report(config: Value, results: Vec<Value>) -> String {
    let doc = json!({
        "config": config,
        "version": planar_gap::VERSION,
        "results": results,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn expect_method(c: &Common, allowed: &[MethodArg]) -> CliResult<Option<MethodArg>> {
    match c.method {
        Some(m) if !allowed.contains(&m) => Err(CliError::usage(format!(
            "--method {} is not available for this command",
            serde_json::to_value(m)
                .expect("serializes")
                .as_str()
                .unwrap_or("?")
        ))),
        m => Ok(m),
    }
}

fn build(c: &Common) -> CliResult {
    let doc = load(c)?;
    let format = graph_format(c.format, c.out.as_deref())?;
    let text = io::serialize(&doc, format);
    let g = doc.graph();
    let mut summary = json!({
        "n": g.n(),
        "m": g.m(),
        "max_degree": degree_stats(g).max_degree,
    });
    if let Some(t) = doc.hat() {
        summary["h"] = json!(t.h());
        summary["k"] = json!(t.k());
    }
    match &c.out {
        Some(path) => {
            emit(Some(path), &text)?;
            emit(None, &report(config("build", c, c), vec![summary]))
        }
        None => {
            emit(None, &text)?;
            eprintln!("n={} m={}", g.n(), g.m());
            Ok(())
        }
    }
}

fn spectrum(c: &Common) -> CliResult {
    let doc = load(c)?;
    let cfg = config("spectrum", c, c);
    match lambda1(doc.graph(), &lambda_options(c)) {
        Ok(r) => emit(c.out.as_deref(), &report(cfg, vec![to_value(&r)])),
        Err(Error::ConvergenceFailure { best }) => {
            emit(c.out.as_deref(), &report(cfg, vec![to_value(&best)]))?;
            Err(Error::ConvergenceFailure { best }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn cheeger(c: &Common) -> CliResult {
    let doc = load(c)?;
    let g = doc.graph();
    let method = expect_method(c, &[MethodArg::Exact, MethodArg::Sweep])?.unwrap_or(
        if g.n() <= EXACT_CHEEGER_LIMIT {
            MethodArg::Exact
        } else {
            MethodArg::Sweep
        },
    );
    let mut results = Vec::new();
    if method == MethodArg::Exact {
        results.push(to_value(&cheeger_exact(g)?));
        results.push(to_value(&verify_cheeger_inequality(g)?));
    } else {
        let fiedler = lambda1(g, &lambda_options(c))?;
        if fiedler.component.is_some() {
            return Err(CliError::usage(
                "graph is disconnected; its Cheeger constant is 0",
            ));
        }
        results.push(to_value(&cheeger_sweep(g, &fiedler.eigenvector)?));
    }
    emit(c.out.as_deref(), &report(config("cheeger", c, c), results))
}

fn verify(c: &Common) -> CliResult {
    if c.input.is_some() {
        return Err(CliError::usage(
            "verify builds its own hat tree; use --h and --k",
        ));
    }
    let (h, k) = tree_params(c)?;
    let opts = SuiteOptions {
        trials: c.trials,
        seed: c.seed,
        lambda: lambda_options(c),
    };
    let reports = verify_all(h, k, &opts)?;
    let results = reports.iter().map(to_value).collect();
    emit(c.out.as_deref(), &report(config("verify", c, c), results))?;
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} (lhs {}, rhs {})", r.claim, r.lhs, r.rhs))
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_VERIFICATION,
            message: format!("failing claims: {}", failing.join(", ")),
        })
    }
}

fn trajectory_path(a: &MixingArgs) -> Option<PathBuf> {
    a.trajectory.clone().or_else(|| {
        a.common.out.as_ref().map(|out| {
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("mixing");
            out.with_file_name(format!("{stem}.trajectory.csv"))
        })
    })
}

fn mixing_options(
    c: &Common,
    tree: Option<&HatTree>,
    walkers: usize,
    start: StartPolicy,
) -> CliResult<MixingOptions> {
    let method = expect_method(c, &[MethodArg::Exact, MethodArg::MonteCarlo])?.map(|m| match m {
        MethodArg::MonteCarlo => MixingMethod::MonteCarlo,
        _ => MixingMethod::Exact,
    });
    Ok(MixingOptions {
        epsilon: c.eps,
        method,
        start,
        seed: c.seed,
        t_max: tree.map(|t| hat_tree_step_cap(t.h(), t.k())),
        walkers,
        lambda: lambda_options(c),
    })
}

fn mixing(a: &MixingArgs) -> CliResult {
    let c = &a.common;
    let doc = load(c)?;
    let start = a
        .start
        .map_or(StartPolicy::WorstSampled, StartPolicy::Vertex);
    let opts = mixing_options(c, doc.hat(), a.walkers, start)?;
    let r = mixing_time(doc.graph(), &opts)?;
    if let Some(path) = trajectory_path(a) {
        emit(Some(&path), &trajectory_csv(&r))?;
    }
    emit(
        c.out.as_deref(),
        &report(config("mixing", a, c), vec![to_value(&r)]),
    )
}

fn metrics(a: &MetricsArgs) -> CliResult {
    let c = &a.common;
    let doc = load(c)?;
    let g = doc.graph();
    let mode = match expect_method(c, &[MethodArg::Exact, MethodArg::Sampled])? {
        Some(MethodArg::Sampled) => DistanceMode::Sampled,
        Some(_) => DistanceMode::Exact,
        None if g.n() <= EXACT_DISTANCE_LIMIT => DistanceMode::Exact,
        None => DistanceMode::Sampled,
    };
    let stats = distance_stats(g, mode, a.sample_pairs, c.seed)?;
    let degrees = degree_stats(g);
    let mut result = json!({
        "n": g.n(),
        "m": g.m(),
        "max_degree": degrees.max_degree,
        "d_max": degrees.d_max,
        "root_eccentricity": bfs_distances(g, 0)?.eccentricity(),
        "distances": to_value(&stats),
    });
    if let Some(t) = doc.hat() {
        result["h"] = json!(t.h());
        result["k"] = json!(t.k());
        result["hk"] = json!(u64::from(t.h()) * u64::from(t.k()));
    }
    emit(
        c.out.as_deref(),
        &report(config("metrics", a, c), vec![result]),
    )
}

#[derive(Debug, Default, Serialize)]
struct SweepRow {
    h: u32,
    k: u32,
    n: Option<usize>,
    m: Option<usize>,
    lambda1: Option<f64>,
    bound_1_over_7k2: f64,
    diam: Option<u32>,
    hk: u64,
    avg_sq_dist: Option<f64>,
    t_mix: Option<u64>,
    relax_time: Option<f64>,
    product_u: Option<f64>,
    error: Option<String>,
}

const SWEEP_COLUMNS: [&str; 13] = [
    "h",
    "k",
    "n",
    "m",
    "lambda1",
    "bound_1_over_7k2",
    "diam",
    "hk",
    "avg_sq_dist",
    "t_mix",
    "relax_time",
    "product_u",
    "error",
];

fn sweep_row(h: u32, a: &SweepArgs) -> SweepRow {
    let c = &a.common;
    let mut row = SweepRow {
        h,
        ..SweepRow::default()
    };
    let mut errors = Vec::new();
    let k = match default_k(h) {
        Ok(k) => k,
        Err(e) => {
            row.error = Some(e.message);
            return row;
        }
    };
    row.k = k;
    row.hk = u64::from(h) * u64::from(k);
    row.bound_1_over_7k2 = 1.0 / (7.0 * f64::from(k).powi(2));
    let t = match build_hat_tree(h, k) {
        Ok(t) => t,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let g = t.graph();
    row.n = Some(g.n());
    row.m = Some(g.m());
    match lambda1(g, &lambda_options(c)) {
        Ok(r) => row.lambda1 = Some(r.lambda1),
        Err(e) => errors.push(format!("lambda1: {e}")),
    }
    match distance_stats(g, DistanceMode::Exact, 0, c.seed) {
        Ok(s) => {
            row.diam = Some(s.diameter);
            row.avg_sq_dist = Some(s.avg_sq_distance);
        }
        Err(e) => errors.push(format!("distances: {e}")),
    }
    match mixing_options(c, Some(&t), a.walkers, StartPolicy::WorstSampled)
        .map_err(|e| e.message)
        .and_then(|opts| mixing_time(g, &opts).map_err(|e| e.to_string()))
    {
        Ok(r) => {
            if r.cap_reached {
                errors.push(format!("mixing: step cap {} reached", r.t_max));
            }
            row.t_mix = Some(r.t_mix);
            row.relax_time = Some(r.relaxation_time);
        }
        Err(e) => errors.push(format!("mixing: {e}")),
    }
    if let (Some(l), Some(d)) = (row.lambda1, row.avg_sq_dist) {
        row.product_u = Some(l * d);
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn sweep_csv(rows: &[SweepRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::usage(e.to_string());
    w.write_record(SWEEP_COLUMNS).map_err(fail)?;
    for r in rows {
        w.write_record([
            r.h.to_string(),
            r.k.to_string(),
            opt(&r.n),
            opt(&r.m),
            opt(&r.lambda1),
            r.bound_1_over_7k2.to_string(),
            opt(&r.diam),
            r.hk.to_string(),
            opt(&r.avg_sq_dist),
            opt(&r.t_mix),
            opt(&r.relax_time),
            opt(&r.product_u),
            opt(&r.error),
        ])
        .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}

fn sweep(a: &SweepArgs) -> CliResult {
    let c = &a.common;
    if c.input.is_some() || c.h.is_some() || c.k.is_some() {
        return Err(CliError::usage(
            "sweep takes --h-min and --h-max; k is always 2^h",
        ));
    }
    if a.h_min < 1 || a.h_min > a.h_max {
        return Err(CliError::usage("need 1 <= --h-min <= --h-max"));
    }
    let rows: Vec<SweepRow> = (a.h_min..=a.h_max)
        .into_par_iter()
        .map(|h| sweep_row(h, a))
        .collect();
    let text = match c.format {
        None | Some(OutputFormat::Csv) => sweep_csv(&rows)?,
        Some(OutputFormat::Json) => {
            report(config("sweep", a, c), rows.iter().map(to_value).collect())
        }
        Some(_) => return Err(CliError::usage("sweep writes csv or json")),
    };
    emit(c.out.as_deref(), &text)
}
