//! Feature CSV: header row, first column `node_id` (0-based), then one
//! column per feature. Column kinds come from the caller.

use std::collections::BTreeSet;
use std::io::Read;

use super::{ColumnKind, FeatureTable};
use crate::error::{Error, Result};

/// Column kind as declared on the command line, before levels are known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindSpec {
    Continuous,
    Categorical,
    Ordinal,
}

/// Parse a comma-separated kind list such as `cont,cat,ord`.
pub fn parse_kinds(list: &str) -> Result<Vec<KindSpec>> {
    list.split(',')
        .map(|tok| match tok.trim() {
            "cont" | "continuous" => Ok(KindSpec::Continuous),
            "cat" | "categorical" => Ok(KindSpec::Categorical),
            "ord" | "ordinal" => Ok(KindSpec::Ordinal),
            other => Err(Error::Config(format!("unknown column kind {other:?} (expected cont, cat or ord)"))),
        })
        .collect()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Read a feature table. `kinds` defaults to all continuous.
///
/// Categorical cells may hold any token; distinct tokens are sorted
/// (numerically when every token is a number) and coded `0..M`.
pub fn parse_feature_csv<R: Read>(reader: R, kinds: Option<&[KindSpec]>) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.get(0) != Some("node_id") {
        return Err(parse_err(1, "first column must be named node_id"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let p = names.len();
    let kinds: Vec<KindSpec> = match kinds {
        Some(k) if k.len() != p => {
            return Err(Error::Dimension(format!("{} column kinds given for {p} feature columns", k.len())));
        }
        Some(k) => k.to_vec(),
        None => vec![KindSpec::Continuous; p],
    };

    let mut rows: Vec<(usize, usize, Vec<String>)> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.len() != p + 1 {
            return Err(parse_err(line, format!("expected {} fields, got {}", p + 1, record.len())));
        }
        let id = record[0]
            .parse::<usize>()
            .map_err(|_| parse_err(line, format!("invalid node_id {:?}", &record[0])))?;
        let cells: Vec<String> = record.iter().skip(1).map(str::to_string).collect();
        if let Some(l) = cells.iter().position(|c| c.is_empty() || c.eq_ignore_ascii_case("na")) {
            return Err(parse_err(line, format!("missing value in column {}", names[l])));
        }
        rows.push((line, id, cells));
    }
    let n = rows.len();
    let mut order = vec![usize::MAX; n];
    for (pos, (line, id, _)) in rows.iter().enumerate() {
        if *id >= n {
            return Err(Error::Dimension(format!("node_id {id} on line {line} is outside 0..{n}")));
        }
        if order[*id] != usize::MAX {
            return Err(Error::Dimension(format!("node_id {id} repeated on line {line}")));
        }
        order[*id] = pos;
    }

    let mut values = vec![0.0; n * p];
    let mut column_kinds = Vec::with_capacity(p);
    let mut level_labels = Vec::with_capacity(p);
    for l in 0..p {
        match kinds[l] {
            KindSpec::Categorical => {
                let tokens: BTreeSet<&str> = rows.iter().map(|r| r.2[l].as_str()).collect();
                let mut levels: Vec<&str> = tokens.into_iter().collect();
                if levels.iter().all(|t| t.parse::<f64>().is_ok()) {
                    levels.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
                }
                for (id, &pos) in order.iter().enumerate() {
                    let code = levels.iter().position(|t| *t == rows[pos].2[l]).unwrap();
                    values[id * p + l] = code as f64;
                }
                column_kinds.push(ColumnKind::Categorical { levels: levels.len() });
                level_labels.push(levels.iter().map(|s| s.to_string()).collect());
            }
            kind => {
                for (id, &pos) in order.iter().enumerate() {
                    let (line, _, cells) = &rows[pos];
                    let v = cells[l]
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(*line, format!("invalid number {:?} in column {}", cells[l], names[l])))?;
                    values[id * p + l] = v;
                }
                column_kinds.push(if kind == KindSpec::Ordinal { ColumnKind::Ordinal } else { ColumnKind::Continuous });
                level_labels.push(Vec::new());
            }
        }
    }
    let mut table = FeatureTable::with_names(n, p, values, column_kinds, names)?;
    for (l, labels) in level_labels.into_iter().enumerate() {
        if !labels.is_empty() {
            table.set_level_labels(l, labels);
        }
    }
    Ok(table)
}
