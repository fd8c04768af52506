//! Deterministic hidden-variable strategies and exact model bounds.
//!
//! Every local or hybrid hidden-variable model is a convex mixture of
//! deterministic strategies, and the functionals are linear in the
//! correlation tensor, so their maxima over a model class sit on a
//! deterministic strategy. The classes are small enough to enumerate:
//!
//! * local: each party maps its setting choice to `±1` (4 responses per
//!   party, 64 strategies);
//! * hybrid: one pair of parties answers jointly as a function of both of its
//!   setting choices (4⁴ = 256 tables) while the third party answers locally
//!   (4 responses), for each of the 3 bipartitions: 3072 strategies.
//!
//! Enumeration order is fixed and documented on each iterator; ties in
//! [`lhv_max`] resolve to the first strategy in that order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::inequalities::{CorrelationTensor, Functional};

const PARTY_NAMES: [&str; 3] = ["a", "b", "c"];

fn sign_from_bit(bit: usize) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

/// A single party's deterministic answer to each of its two settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalResponse {
    outputs: [i8; 2],
}

impl LocalResponse {
    /// Responses are numbered 0..4 with the unprimed output as the high bit
    /// and `+1 ↦ 0`, `−1 ↦ 1`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < 4, "local response index {index} out of range");
        Self {
            outputs: [sign_from_bit(index >> 1 & 1), sign_from_bit(index & 1)],
        }
    }

    pub fn new(unprimed: i8, primed: i8) -> Self {
        assert!(unprimed.abs() == 1 && primed.abs() == 1, "outputs must be ±1");
        Self {
            outputs: [unprimed, primed],
        }
    }

    pub fn constant(sign: i8) -> Self {
        Self::new(sign, sign)
    }

    pub fn output(&self, choice: usize) -> i8 {
        self.outputs[choice]
    }

    fn flipped(&self) -> Self {
        Self {
            outputs: self.outputs.map(|s| -s),
        }
    }

    fn table(&self) -> serde_json::Value {
        json!({ "0": self.outputs[0], "1": self.outputs[1] })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalStrategy {
    pub responses: [LocalResponse; 3],
}

impl LocalStrategy {
    /// Outcomes of parties `a, b, c` for setting choices `(i, j, k)`.
    pub fn outcomes(&self, choices: [usize; 3]) -> [i8; 3] {
        [0, 1, 2].map(|p| self.responses[p].output(choices[p]))
    }
}

/// Which pair of parties may correlate nonlocally; the remaining party is local.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Partition {
    #[serde(rename = "AB|C")]
    AbC,
    #[serde(rename = "AC|B")]
    AcB,
    #[serde(rename = "BC|A")]
    BcA,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::AbC, Partition::AcB, Partition::BcA];

    /// `([first, second], solo)` party indices.
    pub fn parties(self) -> ([usize; 2], usize) {
        match self {
            Partition::AbC => ([0, 1], 2),
            Partition::AcB => ([0, 2], 1),
            Partition::BcA => ([1, 2], 0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Partition::AbC => "AB|C",
            Partition::AcB => "AC|B",
            Partition::BcA => "BC|A",
        }
    }
}

/// Joint deterministic answer of a pair of parties: for each of the four
/// input pairs `(x, y)` an output pair in `{±1}²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairResponse {
    outputs: [[i8; 2]; 4],
}

impl PairResponse {
    /// Tables are numbered 0..256: two bits per input pair, input `(0, 0)`
    /// most significant, each output pair coded like a [`LocalResponse`].
    pub fn from_index(index: usize) -> Self {
        assert!(index < 256, "pair response index {index} out of range");
        let mut outputs = [[0i8; 2]; 4];
        for (input, out) in outputs.iter_mut().enumerate() {
            let code = index >> (2 * (3 - input)) & 3;
            *out = [sign_from_bit(code >> 1 & 1), sign_from_bit(code & 1)];
        }
        Self { outputs }
    }

    pub fn output(&self, x: usize, y: usize) -> [i8; 2] {
        self.outputs[x << 1 | y]
    }

    fn flipped(&self) -> Self {
        Self {
            outputs: self.outputs.map(|o| o.map(|s| -s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HybridStrategy {
    pub partition: Partition,
    pub pair_response: PairResponse,
    pub solo_response: LocalResponse,
}

impl HybridStrategy {
    pub fn outcomes(&self, choices: [usize; 3]) -> [i8; 3] {
        let ([p, q], solo) = self.partition.parties();
        let [op, oq] = self.pair_response.output(choices[p], choices[q]);
        let mut out = [0; 3];
        out[p] = op;
        out[q] = oq;
        out[solo] = self.solo_response.output(choices[solo]);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Local(LocalStrategy),
    Hybrid(HybridStrategy),
}

impl Strategy {
    pub fn outcomes(&self, choices: [usize; 3]) -> [i8; 3] {
        match self {
            Strategy::Local(s) => s.outcomes(choices),
            Strategy::Hybrid(s) => s.outcomes(choices),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            Strategy::Local(_) => Model::Local,
            Strategy::Hybrid(_) => Model::Hybrid,
        }
    }

    /// Every output of every party negated.
    pub fn flipped(&self) -> Self {
        match self {
            Strategy::Local(s) => Strategy::Local(LocalStrategy {
                responses: s.responses.map(|r| r.flipped()),
            }),
            Strategy::Hybrid(s) => Strategy::Hybrid(HybridStrategy {
                pair_response: s.pair_response.flipped(),
                solo_response: s.solo_response.flipped(),
                ..*s
            }),
        }
    }

    fn table(&self) -> serde_json::Value {
        match self {
            Strategy::Local(s) => json!({
                "model": "local",
                "responses": {
                    "a": s.responses[0].table(),
                    "b": s.responses[1].table(),
                    "c": s.responses[2].table(),
                },
            }),
            Strategy::Hybrid(s) => {
                let ([p, q], solo) = s.partition.parties();
                let rows: Vec<_> = (0..4)
                    .map(|n| {
                        let (x, y) = (n >> 1, n & 1);
                        json!({ "inputs": [x, y], "outputs": s.pair_response.output(x, y) })
                    })
                    .collect();
                json!({
                    "model": "hybrid",
                    "partition": s.partition.label(),
                    "pair_parties": [PARTY_NAMES[p], PARTY_NAMES[q]],
                    "pair_response": rows,
                    "solo_party": PARTY_NAMES[solo],
                    "solo_response": s.solo_response.table(),
                })
            }
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.table().serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Local,
    Hybrid,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Local, Model::Hybrid];
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Local => "local",
            Model::Hybrid => "hybrid",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "local" => Ok(Model::Local),
            "hybrid" => Ok(Model::Hybrid),
            other => Err(Error::Parse(format!("unknown model {other:?}"))),
        }
    }
}

/// All 64 local strategies; index `16·a + 4·b + c` over the parties'
/// [`LocalResponse`] indices.
pub fn local_strategies() -> impl Iterator<Item = LocalStrategy> {
    (0..64).map(|n| LocalStrategy {
        responses: [n >> 4 & 3, n >> 2 & 3, n & 3].map(LocalResponse::from_index),
    })
}

/// All 3072 hybrid strategies, ordered by partition (`AB|C`, `AC|B`, `BC|A`),
/// then pair table index, then solo response index.
pub fn hybrid_strategies() -> impl Iterator<Item = HybridStrategy> {
    Partition::ALL.into_iter().flat_map(|partition| {
        (0..256 * 4).map(move |n| HybridStrategy {
            partition,
            pair_response: PairResponse::from_index(n >> 2),
            solo_response: LocalResponse::from_index(n & 3),
        })
    })
}

pub fn strategies(model: Model) -> Vec<Strategy> {
    match model {
        Model::Local => local_strategies().map(Strategy::Local).collect(),
        Model::Hybrid => hybrid_strategies().map(Strategy::Hybrid).collect(),
    }
}

/// `E[i][j][k]` = product of the three deterministic outcomes; always ±1.
pub fn strategy_tensor(s: &Strategy) -> CorrelationTensor {
    CorrelationTensor::from_fn_unchecked(|i, j, k| {
        let [x, y, z] = s.outcomes([i, j, k]);
        f64::from(x * y * z)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhvMaxResult {
    pub functional: Functional,
    pub model: Model,
    /// Largest `|value|` over the model class.
    pub max_value: f64,
    /// Signed functional value of the witness.
    pub witness_value: f64,
    pub strategies_checked: usize,
    pub witness: Strategy,
}

impl LhvMaxResult {
    /// Recomputes the functional on the witness.
    pub fn verify(&self) -> bool {
        let v = self.functional.evaluate(&strategy_tensor(&self.witness));
        v == self.witness_value && v.abs() == self.max_value
    }
}

/// Exact maximum of `|functional|` over every deterministic strategy of `model`.
pub fn lhv_max(functional: Functional, model: Model) -> LhvMaxResult {
    let all = strategies(model);
    let mut best: Option<(f64, f64, Strategy)> = None;
    for s in &all {
        let value = functional.evaluate(&strategy_tensor(s));
        if best.is_none_or(|(m, _, _)| value.abs() > m) {
            best = Some((value.abs(), value, *s));
        }
    }
    let (max_value, witness_value, witness) = best.expect("strategy sets are non-empty");
    LhvMaxResult {
        functional,
        model,
        max_value,
        witness_value,
        strategies_checked: all.len(),
        witness,
    }
}

/// Convex combination of strategy tensors.
pub fn mixture_tensor(weights: &[(f64, Strategy)]) -> Result<CorrelationTensor> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("empty mixture".into()));
    }
    if let Some((w, _)) = weights.iter().find(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let mut entries = [0.0; 8];
    for (w, s) in weights {
        for (e, x) in entries.iter_mut().zip(strategy_tensor(s).entries()) {
            *e += w * x;
        }
    }
    for e in &mut entries {
        *e = e.clamp(-1.0, 1.0);
    }
    CorrelationTensor::new(entries)
}
