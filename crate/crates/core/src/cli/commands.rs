use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use super::manifest::{sha256_file, sha256_hex, unix_now, FileDigest, RunManifest};
use super::*;
use crate::baselines::{kmeans, spectral_clustering, SpectralConfig};
use crate::criterion::FitConfig;
use crate::error::{config_err, Error, Result};
use crate::features::{default_measures, parse_feature_csv, parse_kinds, FeatureTable};
use crate::graph::{parse_edge_list, Graph};
use crate::harness::{emit_heatmap_data, parse_methods, run_grid_with_progress, GridSpec};
use crate::optimizer::{fit, TabuConfig};
use crate::partition::Partition;
use crate::verify::{run_verify, VerifyConfig};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Drop the top-level `timing` field of a JSON payload.
pub fn strip_timing(mut value: Value) -> Value {
    if let Value::Object(map) = &mut value {
        map.remove("timing");
    }
    value
}

/// SHA-256 of an output file's payload (JSON without `timing`, other files verbatim).
pub fn payload_digest(path: &Path) -> Result<String> {
    let bytes = read_file(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let value: Value = serde_json::from_slice(&bytes)?;
        Ok(sha256_hex(serde_json::to_string(&strip_timing(value))?.as_bytes()))
    } else {
        Ok(sha256_hex(&bytes))
    }
}

struct Record {
    code: i32,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    config: Value,
    seed: u64,
    out: Option<PathBuf>,
}

pub(crate) fn dispatch(command: &Command) -> Result<i32> {
    if let Command::Replay(args) = command {
        return replay(args);
    }
    execute(command).map(|(code, _)| code)
}

fn execute(command: &Command) -> Result<(i32, Option<RunManifest>)> {
    let started = unix_now();
    let rec = match command {
        Command::Fit(a) => cmd_fit(a)?,
        Command::Baseline(a) => cmd_baseline(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::Verify(a) => cmd_verify(a)?,
        Command::Replay(_) => return Err(config_err("a manifest cannot record a replay")),
    };
    let Some(out) = rec.out else { return Ok((rec.code, None)) };
    let digest_all = |paths: &[PathBuf], f: fn(&Path) -> Result<String>| {
        paths.iter().map(|p| Ok(FileDigest { path: p.clone(), sha256: f(p)? })).collect::<Result<Vec<_>>>()
    };
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        command: command.name().into(),
        invocation: command.clone(),
        config: rec.config,
        inputs: digest_all(&rec.inputs, sha256_file)?,
        outputs: digest_all(&rec.outputs, payload_digest)?,
        version: env!("CARGO_PKG_VERSION").into(),
        seed: rec.seed,
        started_at_unix: started,
        finished_at_unix: unix_now(),
    };
    manifest.write(&out)?;
    Ok((rec.code, Some(manifest)))
}

fn read_features(path: &Path, kinds: Option<&str>) -> Result<FeatureTable> {
    let kinds = kinds.map(parse_kinds).transpose()?;
    parse_feature_csv(read_file(path)?.as_slice(), kinds.as_deref())
}

fn read_graph(path: &Path, n: Option<usize>) -> Result<Graph> {
    let edges = parse_edge_list(read_file(path)?.as_slice())?;
    let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, edges)
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn cmd_fit(a: &FitArgs) -> Result<Record> {
    let raw = read_features(&a.features, a.kinds.as_deref())?;
    let graph = read_graph(&a.edges, Some(raw.n()))?;
    let features = raw.expand_categorical();
    let config = FitConfig {
        k: a.k,
        alpha: a.alpha,
        w_n: a.w,
        lambda: a.lambda,
        m_beta: a.mbeta,
        min_community_size: a.min_size,
        tabu: TabuConfig { restarts: a.restarts, ..TabuConfig::default() },
        seed: a.seed,
        ..FitConfig::default()
    };
    config.validate()?;
    let result = fit(&graph, &features, &default_measures(&features), &config)?;
    let sizes = result.partition.sizes();
    let names = features.names();
    let betas: Vec<Value> = result
        .betas
        .as_rows()
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let coefs: Vec<Value> =
                names.iter().zip(row).map(|(name, b)| json!({ "feature": name, "value": b })).collect();
            json!({ "community": k, "size": sizes[k], "coefficients": coefs })
        })
        .collect();
    let objective = result.criterion - config.lambda * result.betas.l1();
    let payload = json!({
        "schema_version": SCHEMA_VERSION,
        "n": graph.n(),
        "edges": graph.edge_count(),
        "k": config.k,
        "labels": result.partition.labels(),
        "features": names,
        "betas": betas,
        "criterion": result.criterion,
        "penalized_objective": objective,
        "trace": result.trace,
        "converged": result.converged,
        "iterations": result.iterations,
        "warnings": result.warnings,
        "config": config,
        "timing": { "wall_time_secs": result.wall_time_secs },
    });
    std::fs::create_dir_all(&a.out)?;
    let path = a.out.join("fit.json");
    write_json(&path, &payload)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} (criterion {:.6}, {} iterations)", path.display(), result.criterion, result.iterations);
    Ok(Record {
        code: EXIT_OK,
        inputs: vec![a.edges.clone(), a.features.clone()],
        outputs: vec![path],
        config: serde_json::to_value(&config)?,
        seed: a.seed,
        out: Some(a.out.clone()),
    })
}

fn cmd_baseline(a: &BaselineArgs) -> Result<Record> {
    let started = Instant::now();
    let features = a.features.as_ref().map(|p| read_features(p, a.kinds.as_deref())).transpose()?;
    let mut inputs = Vec::new();
    let labels: Partition = match a.method {
        BaselineMethod::Sc => {
            let edges = a.edges.as_ref().ok_or_else(|| config_err("--edges is required for sc"))?;
            inputs.push(edges.clone());
            if let (Some(n), Some(f)) = (a.n, &features) {
                if n != f.n() {
                    return Err(Error::Dimension(format!("--n {n} but the feature file has {} rows", f.n())));
                }
            }
            let graph = read_graph(edges, a.n.or(features.as_ref().map(FeatureTable::n)))?;
            spectral_clustering(&graph, &SpectralConfig { k: a.k, seed: a.seed, ..SpectralConfig::default() })?
        }
        BaselineMethod::Km => {
            let f = features.as_ref().ok_or_else(|| config_err("--features is required for km"))?;
            kmeans(f, a.k, 10, a.seed)?
        }
    };
    if let Some(p) = &a.features {
        inputs.push(p.clone());
    }
    let method = serde_json::to_value(a.method)?;
    let payload = json!({
        "schema_version": SCHEMA_VERSION,
        "method": method,
        "k": a.k,
        "labels": labels.labels(),
        "sizes": labels.sizes(),
        "timing": { "wall_time_secs": started.elapsed().as_secs_f64() },
    });
    std::fs::create_dir_all(&a.out)?;
    let name = format!("baseline_{}.json", method.as_str().unwrap_or("method"));
    let path = a.out.join(name);
    write_json(&path, &payload)?;
    println!("wrote {}", path.display());
    Ok(Record {
        code: EXIT_OK,
        inputs,
        outputs: vec![path],
        config: json!({ "method": method, "k": a.k, "kinds": a.kinds }),
        seed: a.seed,
        out: Some(a.out.clone()),
    })
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Record> {
    let methods = parse_methods(&a.methods)?;
    let mut spec = match a.grid {
        GridChoice::Desk => GridSpec::desk(a.seed),
        GridChoice::Paper => GridSpec::full(a.seed),
    };
    spec.methods = methods;
    if let Some(r) = a.reps {
        spec.replications = r;
    }
    spec.validate()?;
    let total = spec.cell_count() * spec.replications;
    eprintln!(
        "simulating {} cells x {} replicates ({} methods)",
        spec.cell_count(),
        spec.replications,
        spec.methods.len()
    );
    let started = Instant::now();
    let every = (total / 20).max(1);
    let verbose = a.grid == GridChoice::Paper;
    let progress = move |done: usize, total: usize| {
        if verbose && (done % every == 0 || done == total) {
            let el = started.elapsed().as_secs_f64();
            let eta = el / done as f64 * (total - done) as f64;
            eprintln!("  {done}/{total} replicates, elapsed {el:.0}s, eta {eta:.0}s");
        }
    };
    let result = run_grid_with_progress(&spec, &progress)?;
    let mut outputs = emit_heatmap_data(&result, &a.out)?;
    let mut summary = serde_json::to_value(&result)?;
    if let Value::Object(map) = &mut summary {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    let path = a.out.join("summary.json");
    write_json(&path, &summary)?;
    outputs.push(path);
    for p in &outputs {
        println!("wrote {}", p.display());
    }
    Ok(Record {
        code: EXIT_OK,
        inputs: Vec::new(),
        outputs,
        config: serde_json::to_value(&spec)?,
        seed: a.seed,
        out: Some(a.out.clone()),
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Record> {
    let cfg = VerifyConfig { seed: a.seed, r: a.r, w_n: a.w, alpha: a.alpha, m_phi: a.mphi, m_beta: a.mbeta, ..VerifyConfig::default() };
    let started = Instant::now();
    let report = run_verify(&cfg)?;
    for item in &report.items {
        println!("{} {}: {}", if item.passed { "PASS" } else { "FAIL" }, item.name, item.detail);
    }
    let code = if report.passed() {
        EXIT_OK
    } else {
        eprintln!("failed checks: {}", report.failures().join(", "));
        EXIT_CHECK_FAILED
    };
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        std::fs::create_dir_all(out)?;
        let mut payload = serde_json::to_value(&report)?;
        if let Value::Object(map) = &mut payload {
            map.insert("schema_version".into(), json!(SCHEMA_VERSION));
            map.insert("timing".into(), json!({ "wall_time_secs": started.elapsed().as_secs_f64() }));
        }
        let path = out.join("verify.json");
        write_json(&path, &payload)?;
        outputs.push(path);
    }
    Ok(Record { code, inputs: Vec::new(), outputs, config: serde_json::to_value(&cfg)?, seed: a.seed, out: a.out.clone() })
}

fn with_out(command: &Command, out: PathBuf) -> Command {
    let mut c = command.clone();
    match &mut c {
        Command::Fit(a) => a.out = out,
        Command::Baseline(a) => a.out = out,
        Command::Simulate(a) => a.out = out,
        Command::Verify(a) => a.out = Some(out),
        Command::Replay(_) => {}
    }
    c
}

fn original_out(command: &Command) -> Option<PathBuf> {
    match command {
        Command::Fit(a) => Some(a.out.clone()),
        Command::Baseline(a) => Some(a.out.clone()),
        Command::Simulate(a) => Some(a.out.clone()),
        Command::Verify(a) => a.out.clone(),
        Command::Replay(_) => None,
    }
}

fn replay(a: &ReplayArgs) -> Result<i32> {
    let manifest = RunManifest::read(&a.manifest)?;
    manifest.check_inputs()?;
    let out = match (&a.out, original_out(&manifest.invocation)) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => o.join("replay"),
        (None, None) => return Err(config_err("manifest has no output directory; pass --out")),
    };
    let (_, fresh) = execute(&with_out(&manifest.invocation, out))?;
    let fresh = fresh.ok_or_else(|| config_err("replayed command wrote no manifest"))?;
    let mut all_match = fresh.outputs.len() == manifest.outputs.len();
    for (old, new) in manifest.outputs.iter().zip(&fresh.outputs) {
        let same = old.sha256 == new.sha256 && old.path.file_name() == new.path.file_name();
        all_match &= same;
        println!("{} {}", if same { "MATCH" } else { "DIFFER" }, new.path.display());
    }
    Ok(if all_match { EXIT_OK } else { EXIT_CHECK_FAILED })
}
