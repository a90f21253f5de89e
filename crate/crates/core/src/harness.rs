//! Simulation grid over the out/in ratio `r` and feature signal `mu`.
//!
//! Each replicate of each cell draws one graph and one feature table that
//! every method sees. Seeds are derived from indices with
//! [`rng::child_seed`]:
//! - data: `(master, 0, r_index, mu_index, rep)`, graph and features split
//!   further by a trailing `0` / `1`;
//! - method: `(master, 1, method_code, r_index, mu_index, rep)`.
//!
//! Aggregation happens after all replicates finish, in index order, so the
//! result does not depend on the thread schedule.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{kmeans, spectral_clustering, SpectralConfig};
use crate::criterion::FitConfig;
use crate::error::{config_err, Error, Result};
use crate::features::{default_measures, generate_features, FeatureGenConfig};
use crate::graph::{generate_dcsbm, SbmConfig};
use crate::metrics::nmi;
use crate::optimizer::fit;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    JcdcW5,
    JcdcW15,
    Sc,
    Km,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::JcdcW5, Method::JcdcW15, Method::Sc, Method::Km];

    pub fn name(self) -> &'static str {
        match self {
            Method::JcdcW5 => "jcdc_w5",
            Method::JcdcW15 => "jcdc_w15",
            Method::Sc => "sc",
            Method::Km => "km",
        }
    }

    fn code(self) -> u64 {
        self as u64
    }

    /// `w_n` used by the joint methods.
    pub fn w_n(self) -> Option<f64> {
        match self {
            Method::JcdcW5 => Some(5.0),
            Method::JcdcW15 => Some(1.5),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let valid: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
            config_err(format!("unknown method `{s}`; valid methods: {}", valid.join(", ")))
        })
    }
}

/// Parse a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Method = tok.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(config_err("no methods given"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub replications: usize,
    pub methods: Vec<Method>,
    /// `out_in_ratio` and `seed` are overwritten per cell.
    pub sbm: SbmConfig,
    /// `mu` and `seed` are overwritten per cell.
    pub features: FeatureGenConfig,
    /// `w_n` and `seed` are overwritten per method and replicate.
    pub fit: FitConfig,
    pub seed: u64,
}

impl GridSpec {
    /// 3 x 3 grid, 10 replicates.
    pub fn desk(seed: u64) -> Self {
        Self {
            r_values: vec![0.25, 0.45, 0.65],
            mu_values: vec![0.5, 1.25, 2.0],
            replications: 10,
            methods: Method::ALL.to_vec(),
            sbm: SbmConfig::simulation(0.25, 0),
            features: FeatureGenConfig { mu: 0.5, n_noise: 1, seed: 0 },
            fit: FitConfig::default(),
            seed,
        }
    }

    /// `r` in 0.25..=0.75 by 0.05, `mu` in 0.5..=2 by 0.25, 30 replicates.
    pub fn full(seed: u64) -> Self {
        Self {
            r_values: (0..11).map(|i| (25 + 5 * i) as f64 / 100.0).collect(),
            mu_values: (0..7).map(|i| (50 + 25 * i) as f64 / 100.0).collect(),
            replications: 30,
            ..Self::desk(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_values.is_empty() || self.mu_values.is_empty() {
            return Err(config_err("grid needs at least one r and one mu value"));
        }
        if self.replications == 0 {
            return Err(config_err("replications must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(config_err("no methods selected"));
        }
        if self.fit.k != self.sbm.community_sizes.len() {
            return Err(config_err("fit k must equal the number of simulated communities"));
        }
        self.fit.validate()
    }

    pub fn cell_count(&self) -> usize {
        self.r_values.len() * self.mu_values.len()
    }
}

/// Aggregates for one (method, r, mu) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: Method,
    pub r: f64,
    pub mu: f64,
    /// Mean over the replicates that succeeded; `None` if all failed.
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    /// Per-replicate NMI; `None` marks a failed replicate.
    pub nmi: Vec<Option<f64>>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridTiming {
    pub wall_secs: f64,
    /// Summed per-method CPU-side seconds across replicates.
    pub method_secs: Vec<(Method, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: GridSpec,
    pub cells: Vec<CellResult>,
    pub timing: GridTiming,
}

impl GridResult {
    pub fn cell(&self, method: Method, r_index: usize, mu_index: usize) -> Option<&CellResult> {
        let nr = self.spec.r_values.len();
        let nm = self.spec.mu_values.len();
        let mi = self.spec.methods.iter().position(|&m| m == method)?;
        self.cells.get((mi * nr + r_index) * nm + mu_index)
    }

    /// Mean NMI matrix indexed `[mu_index][r_index]`.
    pub fn mean_matrix(&self, method: Method) -> Option<Vec<Vec<Option<f64>>>> {
        let nr = self.spec.r_values.len();
        let nm = self.spec.mu_values.len();
        self.spec.methods.contains(&method).then(|| {
            (0..nm).map(|m| (0..nr).map(|r| self.cell(method, r, m).and_then(|c| c.mean)).collect()).collect()
        })
    }
}

struct ReplicateOutcome {
    nmi: Vec<std::result::Result<f64, String>>,
    secs: Vec<f64>,
}

fn run_replicate(spec: &GridSpec, ri: usize, mi: usize, rep: usize) -> ReplicateOutcome {
    let data_seed = rng::child_seed(spec.seed, &[0, ri as u64, mi as u64, rep as u64]);
    let sbm = SbmConfig { out_in_ratio: spec.r_values[ri], seed: rng::child_seed(data_seed, &[0]), ..spec.sbm.clone() };
    let feat = FeatureGenConfig { mu: spec.mu_values[mi], seed: rng::child_seed(data_seed, &[1]), ..spec.features.clone() };
    let data = generate_dcsbm(&sbm).and_then(|(g, truth)| Ok((generate_features(&truth, &feat)?, g, truth)));
    let (features, graph, truth) = match data {
        Ok(d) => d,
        Err(e) => {
            let msg = format!("data generation failed: {e}");
            return ReplicateOutcome {
                nmi: spec.methods.iter().map(|_| Err(msg.clone())).collect(),
                secs: vec![0.0; spec.methods.len()],
            };
        }
    };
    let k = spec.fit.k;
    let mut nmis = Vec::with_capacity(spec.methods.len());
    let mut secs = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let seed = rng::child_seed(spec.seed, &[1, method.code(), ri as u64, mi as u64, rep as u64]);
        let t = Instant::now();
        let labels = match method {
            Method::JcdcW5 | Method::JcdcW15 => {
                let cfg = FitConfig { w_n: method.w_n().unwrap_or(spec.fit.w_n), seed, ..spec.fit.clone() };
                fit(&graph, &features, &default_measures(&features), &cfg).map(|f| f.partition)
            }
            Method::Sc => spectral_clustering(&graph, &SpectralConfig { k, seed, ..SpectralConfig::default() }),
            Method::Km => kmeans(&features, k, 10, seed),
        };
        secs.push(t.elapsed().as_secs_f64());
        nmis.push(labels.and_then(|e| nmi(&e, &truth)).map_err(|e| e.to_string()));
    }
    ReplicateOutcome { nmi: nmis, secs }
}

fn mean_sd(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (Some(mean), Some(sd))
}

/// Run every method on every replicate of every cell.
pub fn run_grid(spec: &GridSpec) -> Result<GridResult> {
    run_grid_with_progress(spec, &|_, _| {})
}

/// [`run_grid`] calling `progress(done, total)` after each replicate.
/// Calls may arrive from several threads and out of order.
pub fn run_grid_with_progress(spec: &GridSpec, progress: &(dyn Fn(usize, usize) + Sync)) -> Result<GridResult> {
    spec.validate()?;
    let started = Instant::now();
    let (nr, nm, reps) = (spec.r_values.len(), spec.mu_values.len(), spec.replications);
    let tasks: Vec<(usize, usize, usize)> =
        (0..nr).flat_map(|r| (0..nm).flat_map(move |m| (0..reps).map(move |x| (r, m, x)))).collect();
    let done = AtomicUsize::new(0);
    let outcomes: Vec<ReplicateOutcome> = tasks
        .par_iter()
        .map(|&(r, m, x)| {
            let out = run_replicate(spec, r, m, x);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, tasks.len());
            out
        })
        .collect();

    let mut cells = Vec::with_capacity(spec.methods.len() * nr * nm);
    let mut method_secs = Vec::new();
    for (mi, &method) in spec.methods.iter().enumerate() {
        method_secs.push((method, outcomes.iter().map(|o| o.secs[mi]).sum()));
        for r in 0..nr {
            for m in 0..nm {
                let base = (r * nm + m) * reps;
                let reps_out = &outcomes[base..base + reps];
                let nmi: Vec<Option<f64>> = reps_out.iter().map(|o| o.nmi[mi].as_ref().ok().copied()).collect();
                let errors = reps_out
                    .iter()
                    .enumerate()
                    .filter_map(|(x, o)| o.nmi[mi].as_ref().err().map(|e| format!("replicate {x}: {e}")))
                    .collect();
                let ok: Vec<f64> = nmi.iter().flatten().copied().collect();
                let (mean, sd) = mean_sd(&ok);
                cells.push(CellResult { method, r: spec.r_values[r], mu: spec.mu_values[m], mean, sd, nmi, errors });
            }
        }
    }
    Ok(GridResult {
        spec: spec.clone(),
        cells,
        timing: GridTiming { wall_secs: started.elapsed().as_secs_f64(), method_secs },
    })
}

/// Mean NMI matrix as read back from a heatmap CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Heatmap {
    pub r_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    /// `[mu_index][r_index]`
    pub values: Vec<Vec<Option<f64>>>,
}

/// Write the heatmap for `method`: header `mu\r,<r...>`, one row per `mu`,
/// cells with 4 decimals and `NA` for cells with no successful replicate.
pub fn write_heatmap<W: Write>(result: &GridResult, method: Method, mut out: W) -> Result<()> {
    let matrix =
        result.mean_matrix(method).ok_or_else(|| config_err(format!("method {method} is not part of this grid")))?;
    let header: Vec<String> = result.spec.r_values.iter().map(|r| r.to_string()).collect();
    writeln!(out, "mu\\r,{}", header.join(","))?;
    for (mu, row) in result.spec.mu_values.iter().zip(&matrix) {
        let cells: Vec<String> = row.iter().map(|c| c.map_or_else(|| "NA".into(), |v| format!("{v:.4}"))).collect();
        writeln!(out, "{mu},{}", cells.join(","))?;
    }
    Ok(())
}

/// One `heatmap_<method>.csv` per method in `dir`; returns the written paths.
pub fn emit_heatmap_data(result: &GridResult, dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for &method in &result.spec.methods {
        let path = dir.join(format!("heatmap_{method}.csv"));
        let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        write_heatmap(result, method, file)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn parse_heatmap<R: BufRead>(reader: R) -> Result<Heatmap> {
    let mut lines = reader.lines().enumerate();
    let parse_num = |line: usize, tok: &str| {
        tok.trim().parse::<f64>().map_err(|_| Error::Parse { line, message: format!("`{tok}` is not a number") })
    };
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty heatmap file".into() })?;
    let header = header?;
    let mut fields = header.split(',');
    if fields.next() != Some("mu\\r") {
        return Err(Error::Parse { line: 1, message: "header must start with `mu\\r`".into() });
    }
    let r_values = fields.map(|t| parse_num(1, t)).collect::<Result<Vec<_>>>()?;
    let mut mu_values = Vec::new();
    let mut values = Vec::new();
    for (ix, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = ix + 1;
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != r_values.len() + 1 {
            return Err(Error::Parse { line: lineno, message: format!("expected {} fields", r_values.len() + 1) });
        }
        mu_values.push(parse_num(lineno, toks[0])?);
        values.push(
            toks[1..]
                .iter()
                .map(|t| if t.trim() == "NA" { Ok(None) } else { parse_num(lineno, t).map(Some) })
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Heatmap { r_values, mu_values, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(methods: Vec<Method>) -> GridSpec {
        GridSpec {
            r_values: vec![0.25, 0.5, 0.75],
            mu_values: vec![0.5, 1.0, 2.0],
            replications: 1,
            methods,
            sbm: SbmConfig { community_sizes: vec![20, 10], ..SbmConfig::simulation(0.25, 0) },
            ..GridSpec::desk(3)
        }
    }

    #[test]
    fn heatmap_format_and_round_trip() {
        let res = run_grid(&tiny(vec![Method::Km])).unwrap();
        let mut buf = Vec::new();
        write_heatmap(&res, Method::Km, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l.split(',').count() == 4));
        assert_eq!(lines[0], "mu\\r,0.25,0.5,0.75");
        let hm = parse_heatmap(buf.as_slice()).unwrap();
        assert_eq!(hm.r_values, vec![0.25, 0.5, 0.75]);
        assert_eq!(hm.mu_values, vec![0.5, 1.0, 2.0]);
        let m = res.mean_matrix(Method::Km).unwrap();
        for (a, b) in hm.values.iter().flatten().zip(m.iter().flatten()) {
            assert!((a.unwrap() - b.unwrap()).abs() <= 5e-5);
        }
    }

    #[test]
    fn four_decimal_cells() {
        let mut res = run_grid(&GridSpec { r_values: vec![0.25], mu_values: vec![1.0], ..tiny(vec![Method::Km]) }).unwrap();
        res.cells[0].mean = Some(0.8);
        let mut buf = Vec::new();
        write_heatmap(&res, Method::Km, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "mu\\r,0.25\n1,0.8000\n");
    }

    #[test]
    fn rerun_is_identical() {
        let spec = tiny(vec![Method::JcdcW5, Method::Sc]);
        let a = run_grid(&spec).unwrap();
        let b = run_grid(&spec).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn method_names() {
        assert_eq!(parse_methods("jcdc_w5,sc,km").unwrap(), vec![Method::JcdcW5, Method::Sc, Method::Km]);
        let err = parse_methods("jcdc_w5,louvain").unwrap_err().to_string();
        assert!(err.contains("jcdc_w15") && err.contains("louvain"));
    }

    #[test]
    fn full_grid_shape() {
        let g = GridSpec::full(0);
        assert_eq!((g.r_values.len(), g.mu_values.len(), g.replications), (11, 7, 30));
        assert_eq!(g.r_values[1].to_string(), "0.3");
        assert_eq!(*g.mu_values.last().unwrap(), 2.0);
    }

    #[test]
    fn bad_spec_rejected() {
        assert!(run_grid(&GridSpec { replications: 0, ..GridSpec::desk(0) }).is_err());
        assert!(run_grid(&GridSpec { mu_values: vec![], ..GridSpec::desk(0) }).is_err());
    }
}
