//! Equatorial polarization analyzers and the Born rule for three parties.
//!
//! An analyzer with phase `φ` projects onto
//! `|φ±⟩ = (|R⟩ ± e^{iφ}|L⟩)/√2` and reports `+1` for the `|φ+⟩` port and
//! `−1` for the `|φ−⟩` port. Circular kets are fixed relative to the linear
//! basis as `|R⟩ = (|H⟩ − i|V⟩)/√2`, `|L⟩ = (|H⟩ + i|V⟩)/√2`, which makes
//! the observable `σ(φ) = cos φ·Z − sin φ·X`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::{Matrix2, Vector2};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, C64};

pub type Operator2 = Matrix2<C64>;

/// `|R⟩ = (|H⟩ − i|V⟩)/√2`.
pub fn circular_right() -> Vector2<C64> {
    Vector2::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2))
}

/// `|L⟩ = (|H⟩ + i|V⟩)/√2`.
pub fn circular_left() -> Vector2<C64> {
    Vector2::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2))
}

/// Analyzer phase in radians, wrapped to `[0, 2π)`.
///
/// Equality is circular: settings closer than `1e-12` rad around the circle
/// compare equal, so `φ` and `φ + 2π` are the same setting.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(transparent)]
pub struct AnalyzerSetting(f64);

const SETTING_EQ_TOL: f64 = 1e-12;

impl AnalyzerSetting {
    pub const ZERO: AnalyzerSetting = AnalyzerSetting(0.0);

    pub fn from_radians(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidSetting(format!("non-finite phase {phi}")));
        }
        Ok(Self(wrap(phi)))
    }

    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// Shortest distance around the circle, in radians.
    pub fn circular_distance(self, other: Self) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    /// The setting `−φ`.
    pub fn negated(self) -> Self {
        Self(wrap(-self.0))
    }

    /// The setting `φ + δ`.
    pub fn shifted(self, delta: f64) -> Self {
        Self(wrap(self.0 + delta))
    }
}

impl PartialEq for AnalyzerSetting {
    fn eq(&self, other: &Self) -> bool {
        self.circular_distance(*other) <= SETTING_EQ_TOL
    }
}

fn wrap(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// The analyzer kets `(|φ+⟩, |φ−⟩)` in the H/V basis.
pub fn analyzer_kets(phi: AnalyzerSetting) -> (Vector2<C64>, Vector2<C64>) {
    let phase = C64::from_polar(1.0, phi.radians());
    let (r, l) = (circular_right(), circular_left());
    let plus = (r + l * phase).scale(FRAC_1_SQRT_2);
    let minus = (r - l * phase).scale(FRAC_1_SQRT_2);
    (plus, minus)
}

/// `(|φ+⟩⟨φ+|, |φ−⟩⟨φ−|)`.
pub fn analyzer_projectors(phi: AnalyzerSetting) -> (Operator2, Operator2) {
    let (plus, minus) = analyzer_kets(phi);
    (plus * plus.adjoint(), minus * minus.adjoint())
}

/// A ±1-valued single-qubit observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable2x2(Operator2);

impl Observable2x2 {
    pub fn matrix(&self) -> &Operator2 {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = self.0.symmetric_eigenvalues();
        let (x, y) = (e[0], e[1]);
        if x <= y {
            [x, y]
        } else {
            [y, x]
        }
    }
}

/// `σ(φ) = |φ+⟩⟨φ+| − |φ−⟩⟨φ−|`.
pub fn analyzer_observable(phi: AnalyzerSetting) -> Observable2x2 {
    let (plus, minus) = analyzer_projectors(phi);
    Observable2x2(plus - minus)
}

/// Position of the outcome triple `(s_a, s_b, s_c)` among the eight outcomes:
/// `+1 ↦ 0`, `−1 ↦ 1`, party `a` most significant.
pub fn outcome_index(signs: [i8; 3]) -> usize {
    signs
        .iter()
        .fold(0, |acc, &s| (acc << 1) | usize::from(s < 0))
}

/// Sign triple for an outcome index, inverse of [`outcome_index`].
pub fn outcome_signs(index: usize) -> [i8; 3] {
    [2, 1, 0].map(|shift| if index >> shift & 1 == 0 { 1 } else { -1 })
}

/// Text label such as `"++-"`.
pub fn outcome_label(index: usize) -> String {
    outcome_signs(index)
        .iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect()
}

/// Product of the three signs of an outcome.
pub fn outcome_parity(index: usize) -> f64 {
    if index.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `tr(ρ · A ⊗ B ⊗ C)` without forming the 8×8 product.
pub fn product_expectation(rho: &DensityMatrix, ops: [&Operator2; 3]) -> C64 {
    let m = rho.entries();
    let [a, b, c] = ops;
    let mut acc = C64::new(0.0, 0.0);
    for row in 0..8 {
        let (ra, rb, rc) = (row >> 2 & 1, row >> 1 & 1, row & 1);
        for col in 0..8 {
            let (ca, cb, cc) = (col >> 2 & 1, col >> 1 & 1, col & 1);
            acc += m[(row, col)] * a[(ca, ra)] * b[(cb, rb)] * c[(cc, rc)];
        }
    }
    acc
}

/// Probabilities of the eight outcome triples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    probs: [f64; 8],
}

impl OutcomeDistribution {
    pub fn probs(&self) -> &[f64; 8] {
        &self.probs
    }

    pub fn prob(&self, signs: [i8; 3]) -> f64 {
        self.probs[outcome_index(signs)]
    }

    /// Probability for a label such as `"++-"`.
    pub fn get(&self, label: &str) -> Option<f64> {
        (0..8)
            .find(|&i| outcome_label(i) == label)
            .map(|i| self.probs[i])
    }

    /// `Σ s_a s_b s_c · p(s_a, s_b, s_c)`.
    pub fn signed_sum(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| outcome_parity(i) * p)
            .sum()
    }
}

impl Serialize for OutcomeDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(8))?;
        for (i, p) in self.probs.iter().enumerate() {
            map.serialize_entry(&outcome_label(i), p)?;
        }
        map.end()
    }
}

/// Born-rule distribution `p(s) = tr(ρ · Π_a^{s_a} ⊗ Π_b^{s_b} ⊗ Π_c^{s_c})`.
pub fn outcome_distribution(
    state: &DensityMatrix,
    settings: [AnalyzerSetting; 3],
) -> OutcomeDistribution {
    let projectors = settings.map(|phi| {
        let (plus, minus) = analyzer_projectors(phi);
        [plus, minus]
    });
    let mut probs = [0.0; 8];
    for (i, p) in probs.iter_mut().enumerate() {
        let [sa, sb, sc] = [i >> 2 & 1, i >> 1 & 1, i & 1];
        *p = product_expectation(
            state,
            [&projectors[0][sa], &projectors[1][sb], &projectors[2][sc]],
        )
        .re;
    }
    OutcomeDistribution { probs }
}

/// `E = tr(ρ · σ_a ⊗ σ_b ⊗ σ_c)`.
pub fn correlation(state: &DensityMatrix, settings: [AnalyzerSetting; 3]) -> f64 {
    let [a, b, c] = settings.map(analyzer_observable);
    product_expectation(state, [a.matrix(), b.matrix(), c.matrix()]).re
}
