//! Finite-statistics simulation of the three-party correlation experiment.
//!
//! Shots are split equally over the eight setting choices. Each choice draws
//! from its own ChaCha8 stream: the key is `(seed, choice)` and the shot
//! index is the stream position (one 64-bit word per shot), so a block's
//! counts do not depend on which other blocks are sampled or in what order.
//!
//! Per-entry standard errors are `sqrt((1 − Ê²)/n)`; inequality errors add
//! the terms in quadrature, treating setting blocks as independent.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequalities::{
    classify, correlation_tensor, CorrelationTensor, Functional, InequalityReport, Settings,
};
use crate::polarimetry::{outcome_distribution, outcome_label, outcome_parity};
use crate::qstate::{mix_with_white_noise, DensityMatrix, Visibility};

/// Outcome counts for each of the eight setting choices `(i, j, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    n_shots_per_setting: u64,
    counts: [[u64; 8]; 8],
}

impl CountTable {
    /// `counts[choice][outcome]`, with `choice = 4i + 2j + k` and outcomes
    /// indexed as in [`crate::polarimetry::outcome_index`].
    pub fn new(counts: [[u64; 8]; 8], n_shots_per_setting: u64) -> Result<Self> {
        for (choice, row) in counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total != n_shots_per_setting {
                return Err(Error::Counts(format!(
                    "setting choice {choice} has {total} counts, expected {n_shots_per_setting}"
                )));
            }
        }
        Ok(Self {
            n_shots_per_setting,
            counts,
        })
    }

    pub fn n_shots_per_setting(&self) -> u64 {
        self.n_shots_per_setting
    }

    pub fn counts(&self) -> &[[u64; 8]; 8] {
        &self.counts
    }

    pub fn get(&self, choice: usize, outcome: usize) -> u64 {
        self.counts[choice][outcome]
    }

    fn rows(&self) -> impl Iterator<Item = CountRow> + '_ {
        (0..64).map(|n| {
            let (choice, outcome) = (n / 8, n % 8);
            CountRow {
                i: choice >> 2 & 1,
                j: choice >> 1 & 1,
                k: choice & 1,
                outcome: outcome_label(outcome),
                count: self.counts[choice][outcome],
            }
        })
    }

    /// CSV with header `i,j,k,outcome,count`, 64 rows.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            writer.serialize(row).expect("in-memory CSV write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory CSV flush")).expect("utf-8 CSV")
    }
}

#[derive(Serialize)]
struct CountRow {
    i: usize,
    j: usize,
    k: usize,
    outcome: String,
    count: u64,
}

impl Serialize for CountTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Table {
            n_shots_per_setting: u64,
            rows: Vec<CountRow>,
        }
        Table {
            n_shots_per_setting: self.n_shots_per_setting,
            rows: self.rows().collect(),
        }
        .serialize(s)
    }
}

fn sample_block(probs: &[f64; 8], n_shots: u64, seed: u64, choice: usize) -> [u64; 8] {
    let mut cumulative = [0.0; 8];
    let mut acc = 0.0;
    for (c, p) in cumulative.iter_mut().zip(probs) {
        acc += p.max(0.0);
        *c = acc;
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(choice as u64);
    let mut counts = [0u64; 8];
    for _ in 0..n_shots {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * total;
        let outcome = cumulative.iter().position(|&c| u < c).unwrap_or(7);
        counts[outcome] += 1;
    }
    counts
}

/// Draws `n_shots` outcome triples for each setting choice.
pub fn sample_counts(state: &DensityMatrix, pairs: &Settings, n_shots: u64, seed: u64) -> Result<CountTable> {
    if n_shots == 0 {
        return Err(Error::Counts("n_shots must be at least 1".into()));
    }
    let blocks: Vec<[u64; 8]> = (0..8usize)
        .into_par_iter()
        .map(|choice| {
            let settings = [
                pairs[0].get(choice >> 2 & 1),
                pairs[1].get(choice >> 1 & 1),
                pairs[2].get(choice & 1),
            ];
            let dist = outcome_distribution(state, settings);
            sample_block(dist.probs(), n_shots, seed, choice)
        })
        .collect();
    let mut counts = [[0u64; 8]; 8];
    counts.iter_mut().zip(blocks).for_each(|(c, b)| *c = b);
    CountTable::new(counts, n_shots)
}

/// Estimated tensor and the standard error of each entry.
pub fn estimate_tensor(c: &CountTable) -> Result<(CorrelationTensor, [f64; 8])> {
    let n = c.n_shots_per_setting;
    if n == 0 {
        return Err(Error::Counts("cannot estimate from zero shots".into()));
    }
    let nf = n as f64;
    let mut entries = [0.0; 8];
    let mut errors = [0.0; 8];
    for choice in 0..8 {
        let signed: f64 = c.counts[choice]
            .iter()
            .enumerate()
            .map(|(outcome, &k)| outcome_parity(outcome) * k as f64)
            .sum();
        let e = signed / nf;
        entries[choice] = e;
        errors[choice] = ((1.0 - e * e).max(0.0) / nf).sqrt();
    }
    Ok((CorrelationTensor::new(entries)?, errors))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatedReport {
    #[serde(flatten)]
    pub report: InequalityReport,
    pub std_error: f64,
    /// `(|value| − bound)/std_error`; absent when `std_error` is 0.
    pub z_score: Option<f64>,
}

impl EstimatedReport {
    /// Report for a tensor whose entries carry independent standard errors.
    pub fn from_tensor(t: &CorrelationTensor, errors: &[f64; 8], functional: Functional) -> Self {
        let report = classify(functional.evaluate(t), functional);
        let std_error = functional
            .coefficients()
            .iter()
            .map(|&(n, _)| errors[n] * errors[n])
            .sum::<f64>()
            .sqrt();
        let z_score = (std_error > 0.0).then(|| (report.abs_value - report.bound) / std_error);
        Self {
            report,
            std_error,
            z_score,
        }
    }

    /// Infinite-statistics limit: an exact tensor with zero error.
    pub fn exact(t: &CorrelationTensor, functional: Functional) -> Self {
        Self::from_tensor(t, &[0.0; 8], functional)
    }
}

pub fn estimate_inequality(c: &CountTable, functional: Functional) -> Result<EstimatedReport> {
    let (t, errors) = estimate_tensor(c)?;
    Ok(EstimatedReport::from_tensor(&t, &errors, functional))
}

/// Smallest visibility `v` at which `v·ρ + (1 − v)·𝟙/8` violates the
/// functional's bound at `pairs`, by bisection to within `tol`. `None` if the
/// ideal state itself does not violate.
pub fn critical_visibility(
    state: &DensityMatrix,
    pairs: &Settings,
    functional: Functional,
    tol: f64,
) -> Option<f64> {
    let excess = |v: f64| {
        let rho = mix_with_white_noise(state, Visibility::new(v).expect("bisection stays in [0, 1]"));
        functional.evaluate(&correlation_tensor(&rho, pairs)).abs() - functional.bound()
    };
    if excess(1.0) <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
