use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{BenchError, CaseResult};
use crate::algorithm::Algorithm;

/// Mean metrics of one algorithm over the cases with a given number of agents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStat {
    pub algorithm: Algorithm,
    pub n_agents: usize,
    pub mean_sum: f64,
    pub mean_min: f64,
    pub n_cases: usize,
}

/// Mean metrics of one algorithm over every case (cardinality-weighted).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverallStat {
    pub algorithm: Algorithm,
    pub mean_sum: f64,
    pub mean_min: f64,
    pub n_cases: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Provenance {
    /// SHA-256 of the input corpus.
    pub input_digest: String,
    pub config: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    /// Ascending by algorithm, then agent count.
    pub groups: Vec<GroupStat>,
    pub overall: Vec<OverallStat>,
    /// Ascending by algorithm, then case id.
    pub results: Vec<CaseResult>,
    pub provenance: Provenance,
}

impl Report {
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn overall_for(&self, alg: Algorithm) -> Option<&OverallStat> {
        self.overall.iter().find(|o| o.algorithm == alg)
    }

    /// Relative gaps between two algorithms' overall means, `(sum, min)`.
    pub fn closeness(&self, a: Algorithm, b: Algorithm) -> Option<(f64, f64)> {
        let (a, b) = (self.overall_for(a)?, self.overall_for(b)?);
        Some((
            relative_gap(a.mean_sum, b.mean_sum),
            relative_gap(a.mean_min, b.mean_min),
        ))
    }

    pub fn group(&self, alg: Algorithm, n_agents: usize) -> Option<&GroupStat> {
        self.groups
            .iter()
            .find(|g| g.algorithm == alg && g.n_agents == n_agents)
    }
}

/// Means per `(algorithm, n_agents)` and per algorithm.
///
/// Results are summed in a canonical order (case id first), so the report does
/// not depend on the order of `results`.
pub fn aggregate(results: &[CaseResult]) -> Report {
    let mut sorted: Vec<CaseResult> = results.to_vec();
    sorted.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then_with(|| a.case_id.cmp(&b.case_id))
            .then_with(|| a.n_agents.cmp(&b.n_agents))
            .then_with(|| a.sum_utility.total_cmp(&b.sum_utility))
            .then_with(|| a.min_utility.total_cmp(&b.min_utility))
            .then_with(|| a.runtime_ms.cmp(&b.runtime_ms))
    });

    let mut groups: BTreeMap<(Algorithm, usize), Vec<&CaseResult>> = BTreeMap::new();
    let mut overall: BTreeMap<Algorithm, Vec<&CaseResult>> = BTreeMap::new();
    for r in &sorted {
        groups.entry((r.algorithm, r.n_agents)).or_default().push(r);
        overall.entry(r.algorithm).or_default().push(r);
    }

    let groups = groups
        .into_iter()
        .map(|((algorithm, n_agents), rs)| {
            let (mean_sum, mean_min) = means(&rs);
            GroupStat {
                algorithm,
                n_agents,
                mean_sum,
                mean_min,
                n_cases: rs.len(),
            }
        })
        .collect();
    let overall = overall
        .into_iter()
        .map(|(algorithm, rs)| {
            let (mean_sum, mean_min) = means(&rs);
            OverallStat {
                algorithm,
                mean_sum,
                mean_min,
                n_cases: rs.len(),
            }
        })
        .collect();
    Report {
        groups,
        overall,
        results: sorted,
        provenance: Provenance::default(),
    }
}

/// `|a - b| / max(|a|, |b|)`, 0 when both are 0.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn means(rs: &[&CaseResult]) -> (f64, f64) {
    let n = rs.len() as f64;
    let sum: f64 = rs.iter().map(|r| r.sum_utility).sum();
    let min: f64 = rs.iter().map(|r| r.min_utility).sum();
    (sum / n, min / n)
}

pub const RESULTS_FILE: &str = "results.csv";
pub const PROVENANCE_FILE: &str = "provenance.txt";

/// Write `results.csv`, `fig_a.csv` .. `fig_d.csv` and `provenance.txt`.
///
/// * `fig_a`: mean sum of utilities per agent count;
/// * `fig_b`: mean minimum utility per agent count;
/// * `fig_c`: overall mean sum of utilities;
/// * `fig_d`: overall mean minimum utility.
pub fn emit_report(report: &Report, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, BenchError> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| io_err(dir, source))?;

    let mut files = Vec::new();
    let mut write = |name: &str, bytes: Vec<u8>| -> Result<(), BenchError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|source| io_err(&path, source))?;
        files.push(path);
        Ok(())
    };

    let mut results = csv_writer();
    results.write_record([
        "case_id",
        "algorithm",
        "n_agents",
        "sum_utility",
        "min_utility",
        "runtime_ms",
    ])?;
    for r in &report.results {
        results.write_record([
            r.case_id.clone(),
            r.algorithm.to_string(),
            r.n_agents.to_string(),
            fixed(r.sum_utility),
            fixed(r.min_utility),
            r.runtime_ms.to_string(),
        ])?;
    }
    write(RESULTS_FILE, finish(results)?)?;

    for (name, pick) in [("fig_a.csv", Metric::Sum), ("fig_b.csv", Metric::Min)] {
        let mut w = csv_writer();
        w.write_record(["algorithm", "n_agents", "mean_value", "n_cases"])?;
        for g in &report.groups {
            let value = match pick {
                Metric::Sum => g.mean_sum,
                Metric::Min => g.mean_min,
            };
            w.write_record([
                g.algorithm.to_string(),
                g.n_agents.to_string(),
                fixed(value),
                g.n_cases.to_string(),
            ])?;
        }
        write(name, finish(w)?)?;
    }
    for (name, pick) in [("fig_c.csv", Metric::Sum), ("fig_d.csv", Metric::Min)] {
        let mut w = csv_writer();
        w.write_record(["algorithm", "mean_value", "n_cases"])?;
        for o in &report.overall {
            let value = match pick {
                Metric::Sum => o.mean_sum,
                Metric::Min => o.mean_min,
            };
            w.write_record([o.algorithm.to_string(), fixed(value), o.n_cases.to_string()])?;
        }
        write(name, finish(w)?)?;
    }

    let p = &report.provenance;
    let seed = p.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    let header = format!(
        "# fairdiv benchmark report\ninput_digest: {}\nconfig: {}\nseed: {}\ncases: {}\n",
        p.input_digest,
        p.config,
        seed,
        report.overall.iter().map(|o| o.n_cases).max().unwrap_or(0),
    );
    write(PROVENANCE_FILE, header.into_bytes())?;
    Ok(files)
}

#[derive(Clone, Copy)]
enum Metric {
    Sum,
    Min,
}

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, BenchError> {
    w.into_inner()
        .map_err(|e| BenchError::Csv(csv::Error::from(e.into_error())))
}

fn io_err(path: &Path, source: std::io::Error) -> BenchError {
    BenchError::Io {
        path: path.display().to_string(),
        source,
    }
}
