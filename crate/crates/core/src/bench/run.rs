use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::algorithm::Algorithm;
use crate::leximin::allocate_leximin;
use crate::maxsum::allocate_maxsum;
use crate::mms::{allocate_mms34, check_oracle_size, complete_leftovers, mms_ratio, MMS_FACTOR};
use crate::model::{utilities, Allocation, Instance, EPS};
use crate::propm::{allocate_propm, check_propm, PropmCertificate};

/// Metrics of one algorithm on one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case_id: String,
    pub algorithm: Algorithm,
    pub n_agents: usize,
    pub sum_utility: f64,
    pub min_utility: f64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseFailure {
    pub case_id: String,
    pub algorithm: Algorithm,
    pub message: String,
}

/// Everything needed to reproduce a failed guarantee.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditViolation {
    pub algorithm: Algorithm,
    pub instance: Instance,
    pub allocation: Allocation,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mms_ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propm: Option<PropmCertificate>,
}

impl std::fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} on case {}: {}",
            self.algorithm, self.instance.case_id, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithms: Vec<Algorithm>,
    pub oracle_audit: bool,
    /// Worker threads; 0 picks the machine default.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithms: Algorithm::ALL.to_vec(),
            oracle_audit: false,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutcome {
    /// Case order, then algorithm order as configured.
    pub results: Vec<CaseResult>,
    pub failures: Vec<CaseFailure>,
}

enum Evaluated {
    Done(CaseResult),
    Failed(CaseFailure),
    Violation(Box<AuditViolation>),
}

/// Run every selected algorithm on every case.
///
/// `mms34` is measured after leftover completion. With `oracle_audit`, cases
/// small enough for the exact MMS oracle are also checked against the
/// three-quarters guarantee and the PROPm definition; the first violation
/// aborts the run.
pub fn run_comparison(cases: &[Instance], config: &RunConfig) -> Result<RunOutcome, BenchError> {
    if cases.is_empty() {
        return Err(BenchError::Config("no cases to run".into()));
    }
    if config.algorithms.is_empty() {
        return Err(BenchError::Config("no algorithms selected".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;

    let evaluated: Vec<Vec<Evaluated>> = pool.install(|| {
        cases
            .par_iter()
            .map(|case| {
                config
                    .algorithms
                    .iter()
                    .map(|&alg| evaluate(case, alg, config.oracle_audit))
                    .collect()
            })
            .collect()
    });

    let mut outcome = RunOutcome::default();
    for e in evaluated.into_iter().flatten() {
        match e {
            Evaluated::Done(r) => outcome.results.push(r),
            Evaluated::Failed(f) => outcome.failures.push(f),
            Evaluated::Violation(v) => return Err(BenchError::Audit(v)),
        }
    }
    Ok(outcome)
}

fn evaluate(case: &Instance, alg: Algorithm, audit: bool) -> Evaluated {
    let started = Instant::now();
    let (alloc, pre_completion) = match alg {
        Algorithm::MaxSum => (allocate_maxsum(case), None),
        Algorithm::Leximin => match allocate_leximin(case) {
            Ok(a) => (a, None),
            Err(e) => {
                return Evaluated::Failed(CaseFailure {
                    case_id: case.case_id.clone(),
                    algorithm: alg,
                    message: e.to_string(),
                })
            }
        },
        Algorithm::Propm => (allocate_propm(case), None),
        Algorithm::Mms34 => {
            let (partial, _) = allocate_mms34(case);
            let complete = complete_leftovers(case, &partial).expect("mms34 output is integral");
            (complete, Some(partial))
        }
    };
    let runtime_ms = started.elapsed().as_millis() as u64;

    if audit && check_oracle_size(case).is_ok() {
        if let Some(v) = audit_case(case, alg, &alloc, pre_completion.as_ref()) {
            return Evaluated::Violation(Box::new(v));
        }
    }

    let u = utilities(case, &alloc).expect("allocation built for this case");
    Evaluated::Done(CaseResult {
        case_id: case.case_id.clone(),
        algorithm: alg,
        n_agents: case.n_agents(),
        sum_utility: u.sum().expect("at least one agent"),
        min_utility: u.min().expect("at least one agent"),
        runtime_ms,
    })
}

fn audit_case(
    case: &Instance,
    alg: Algorithm,
    alloc: &Allocation,
    pre_completion: Option<&Allocation>,
) -> Option<AuditViolation> {
    let violation = |detail: String, mms_ratios, propm| AuditViolation {
        algorithm: alg,
        instance: case.clone(),
        allocation: alloc.clone(),
        detail,
        mms_ratios,
        propm,
    };
    match alg {
        Algorithm::Mms34 => {
            let partial = pre_completion.unwrap_or(alloc);
            let ratios = mms_ratio(case, partial).expect("size checked");
            let bad: Vec<usize> = (0..ratios.len())
                .filter(|&i| ratios[i] < MMS_FACTOR - EPS)
                .collect();
            (!bad.is_empty()).then(|| {
                violation(
                    format!("agents {bad:?} below 3/4 of their maximin share"),
                    Some(ratios),
                    None,
                )
            })
        }
        Algorithm::Propm => match check_propm(case, alloc) {
            Ok(cert) if cert.is_valid() => None,
            Ok(cert) => Some(violation(
                format!("PROPm violated for agents {:?}", cert.violations()),
                None,
                Some(cert),
            )),
            Err(e) => Some(violation(e.to_string(), None, None)),
        },
        Algorithm::MaxSum | Algorithm::Leximin => None,
    }
}
