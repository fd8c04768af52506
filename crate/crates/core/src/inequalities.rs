//! Two-setting correlation tensors and the Mermin and Svetlichny functionals.
//!
//! Each party chooses between an unprimed setting `φ` (index 0) and a
//! primed setting `φ'` (index 1). The eight correlations `E[i][j][k]` are all
//! both functionals need:
//!
//! ```text
//! S_M = E001 + E010 + E100 − E111
//! S_V = E000 + E001 + E010 + E100 − E011 − E101 − E110 − E111
//! ```
//!
//! Fully local models obey `|S_M| ≤ 2`; hybrid models that let one pair
//! share nonlocal correlations still obey `|S_V| ≤ 4` but can reach
//! `|S_M| = 4`. Only a Svetlichny violation therefore certifies genuine
//! three-party nonlocality.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarimetry::{correlation, AnalyzerSetting};
use crate::qstate::DensityMatrix;

/// Unprimed and primed analyzer settings of one party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SettingsPair {
    pub phi: AnalyzerSetting,
    pub phi_prime: AnalyzerSetting,
}

/// One [`SettingsPair`] per party, in order `a, b, c`.
pub type Settings = [SettingsPair; 3];

impl SettingsPair {
    pub fn new(phi: AnalyzerSetting, phi_prime: AnalyzerSetting) -> Self {
        Self { phi, phi_prime }
    }

    pub fn from_radians(phi: f64, phi_prime: f64) -> Result<Self> {
        Ok(Self::new(
            AnalyzerSetting::from_radians(phi)?,
            AnalyzerSetting::from_radians(phi_prime)?,
        ))
    }

    pub fn from_degrees(phi: f64, phi_prime: f64) -> Result<Self> {
        Self::from_radians(phi.to_radians(), phi_prime.to_radians())
    }

    /// Setting for choice index 0 (unprimed) or 1 (primed).
    pub fn get(&self, choice: usize) -> AnalyzerSetting {
        match choice {
            0 => self.phi,
            1 => self.phi_prime,
            _ => panic!("setting choice must be 0 or 1, got {choice}"),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.phi == self.phi_prime
    }

    /// The same pair with primed and unprimed roles exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.phi_prime, self.phi)
    }
}

/// The same pair for all three parties.
pub fn symmetric_settings(pair: SettingsPair) -> Settings {
    [pair; 3]
}

/// Settings used by the W-state experiment under discussion: `φ = π/2`, `φ' = 0`.
pub fn criticized_settings() -> Settings {
    symmetric_settings(SettingsPair::from_degrees(90.0, 0.0).unwrap())
}

/// Svetlichny-optimal settings for the W state, `φ = 35.264°`, `φ' = 144.736°`.
pub fn w_optimal_settings() -> Settings {
    symmetric_settings(SettingsPair::from_degrees(35.264, 144.736).unwrap())
}

/// The eight correlations `E[i][j][k]`, `i, j, k ∈ {0 = unprimed, 1 = primed}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor {
    entries: [f64; 8],
}

const ENTRY_TOL: f64 = 1e-10;

impl CorrelationTensor {
    /// Entries in order `E000, E001, …, E111`. Rejects `|E| > 1 + 1e-10`.
    pub fn new(entries: [f64; 8]) -> Result<Self> {
        if let Some(e) = entries
            .iter()
            .find(|e| !e.is_finite() || e.abs() > 1.0 + ENTRY_TOL)
        {
            return Err(Error::OutOfRange {
                what: "correlation",
                value: *e,
                lo: -1.0,
                hi: 1.0,
            });
        }
        Ok(Self { entries })
    }

    pub fn zeros() -> Self {
        Self { entries: [0.0; 8] }
    }

    pub(crate) fn from_fn_unchecked(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut entries = [0.0; 8];
        for (n, e) in entries.iter_mut().enumerate() {
            *e = f(n >> 2 & 1, n >> 1 & 1, n & 1);
        }
        Self { entries }
    }

    pub fn index(i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < 2 && j < 2 && k < 2);
        i << 2 | j << 1 | k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[Self::index(i, j, k)]
    }

    pub fn entries(&self) -> &[f64; 8] {
        &self.entries
    }

    /// `E[i][j][k] ↦ E[1−i][1−j][1−k]`.
    pub fn swapped_primes(&self) -> Self {
        Self::from_fn_unchecked(|i, j, k| self.get(1 - i, 1 - j, 1 - k))
    }

    /// Reorders parties: entry `(x_0, x_1, x_2)` of the result is the entry of
    /// `self` whose party `perm[p]` index equals `x_p`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self::from_fn_unchecked(|i, j, k| {
            let new = [i, j, k];
            let mut old = [0; 3];
            for p in 0..3 {
                old[perm[p]] = new[p];
            }
            self.get(old[0], old[1], old[2])
        })
    }

    /// CSV with header `i,j,k,E`, one row per entry.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            writer.serialize(row).expect("in-memory CSV write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory CSV flush")).expect("utf-8 CSV")
    }

    fn rows(&self) -> impl Iterator<Item = TensorRow> + '_ {
        self.entries.iter().enumerate().map(|(n, &e)| TensorRow {
            i: n >> 2 & 1,
            j: n >> 1 & 1,
            k: n & 1,
            e,
        })
    }
}

#[derive(Serialize)]
struct TensorRow {
    i: usize,
    j: usize,
    k: usize,
    #[serde(rename = "E")]
    e: f64,
}

impl Serialize for CorrelationTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.rows())
    }
}

/// Batches the eight correlation evaluations.
pub fn correlation_tensor(state: &DensityMatrix, pairs: &Settings) -> CorrelationTensor {
    CorrelationTensor::from_fn_unchecked(|i, j, k| {
        correlation(state, [pairs[0].get(i), pairs[1].get(j), pairs[2].get(k)])
    })
}

/// `E001 + E010 + E100 − E111`.
pub fn mermin_value(t: &CorrelationTensor) -> f64 {
    t.get(0, 0, 1) + t.get(0, 1, 0) + t.get(1, 0, 0) - t.get(1, 1, 1)
}

/// Mermin expression with primed and unprimed roles exchanged:
/// `E110 + E101 + E011 − E000`.
pub fn mermin_partner(t: &CorrelationTensor) -> f64 {
    mermin_value(&t.swapped_primes())
}

/// `E000 + E001 + E010 + E100 − E011 − E101 − E110 − E111`.
pub fn svetlichny_value(t: &CorrelationTensor) -> f64 {
    t.get(0, 0, 0) + t.get(0, 0, 1) + t.get(0, 1, 0) + t.get(1, 0, 0)
        - t.get(0, 1, 1)
        - t.get(1, 0, 1)
        - t.get(1, 1, 0)
        - t.get(1, 1, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Mermin,
    Svetlichny,
}

impl Functional {
    pub const ALL: [Functional; 2] = [Functional::Mermin, Functional::Svetlichny];

    /// Largest `|value|` reachable by the model class the inequality tests
    /// against: local models for Mermin, hybrid models for Svetlichny.
    pub fn bound(self) -> f64 {
        match self {
            Functional::Mermin => 2.0,
            Functional::Svetlichny => 4.0,
        }
    }

    /// Largest `|value|` for any tensor with entries in `[−1, 1]`.
    pub fn algebraic_max(self) -> f64 {
        match self {
            Functional::Mermin => 4.0,
            Functional::Svetlichny => 8.0,
        }
    }

    pub fn evaluate(self, t: &CorrelationTensor) -> f64 {
        match self {
            Functional::Mermin => mermin_value(t),
            Functional::Svetlichny => svetlichny_value(t),
        }
    }

    /// Nonzero `(entry index, sign)` coefficients.
    pub fn coefficients(self) -> &'static [(usize, f64)] {
        match self {
            Functional::Mermin => &[(1, 1.0), (2, 1.0), (4, 1.0), (7, -1.0)],
            Functional::Svetlichny => &[
                (0, 1.0),
                (1, 1.0),
                (2, 1.0),
                (4, 1.0),
                (3, -1.0),
                (5, -1.0),
                (6, -1.0),
                (7, -1.0),
            ],
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Functional::Mermin => "mermin",
            Functional::Svetlichny => "svetlichny",
        })
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mermin" | "m" => Ok(Functional::Mermin),
            "svetlichny" | "s" | "v" => Ok(Functional::Svetlichny),
            other => Err(Error::Parse(format!("unknown functional {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    ConsistentWithLocal,
    /// Excludes fully local models but not hybrid local-nonlocal ones.
    RulesOutLocalOnly,
    /// Excludes every hybrid model: genuine three-party nonlocality.
    RulesOutHybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub functional: Functional,
    pub value: f64,
    pub abs_value: f64,
    pub bound: f64,
    pub algebraic_max: f64,
    pub violated: bool,
    pub classification: Classification,
    /// Some party uses the same phase for both settings.
    pub degenerate: bool,
}

/// Judges `|value|` against the functional's bound. A Mermin violation never
/// reaches [`Classification::RulesOutHybrid`].
pub fn classify(value: f64, functional: Functional) -> InequalityReport {
    let bound = functional.bound();
    let violated = value.abs() > bound;
    let classification = match (violated, functional) {
        (false, _) => Classification::ConsistentWithLocal,
        (true, Functional::Mermin) => Classification::RulesOutLocalOnly,
        (true, Functional::Svetlichny) => Classification::RulesOutHybrid,
    };
    InequalityReport {
        functional,
        value,
        abs_value: value.abs(),
        bound,
        algebraic_max: functional.algebraic_max(),
        violated,
        classification,
        degenerate: false,
    }
}

/// Exact quantum report for `state` at `pairs`.
pub fn evaluate(state: &DensityMatrix, pairs: &Settings, functional: Functional) -> InequalityReport {
    let tensor = correlation_tensor(state, pairs);
    InequalityReport {
        degenerate: pairs.iter().any(SettingsPair::is_degenerate),
        ..classify(functional.evaluate(&tensor), functional)
    }
}
