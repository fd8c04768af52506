//! Data-driven expectations for `tribell reproduce`.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use tribell::inequalities::symmetric_settings;
use tribell::shots::critical_visibility;
use tribell::{correlation_tensor, lhv_max, optimize, Functional, Model, OptimizationConfig, SettingsPair};

use crate::state::StateSpec;

pub const BUILTIN: &str = include_str!("../reproduce.toml");

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub row: Vec<Row>,
}

#[derive(Debug, Deserialize)]
pub struct Row {
    pub id: String,
    pub label: String,
    #[serde(flatten)]
    pub quantity: Quantity,
    pub expected: f64,
    pub tolerance: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Quantity {
    Quantum {
        state: String,
        functional: Functional,
        phi_deg: f64,
        phi_prime_deg: f64,
    },
    LhvMax {
        functional: Functional,
        model: Model,
    },
    CriticalVisibility {
        state: String,
        functional: Functional,
        phi_deg: f64,
        phi_prime_deg: f64,
    },
    Optimum {
        state: String,
        functional: Functional,
    },
}

#[derive(Debug, Serialize)]
pub struct RowResult {
    pub id: String,
    pub label: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Manifest {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading manifest {}", p.display()))?,
            None => BUILTIN.to_string(),
        };
        toml::from_str(&text).context("parsing manifest")
    }
}

fn load_state(name: &str) -> anyhow::Result<tribell::DensityMatrix> {
    let spec: StateSpec = name.parse().map_err(anyhow::Error::msg)?;
    spec.load(1.0)
}

impl Row {
    pub fn evaluate(&self) -> anyhow::Result<RowResult> {
        let value = match &self.quantity {
            Quantity::Quantum {
                state,
                functional,
                phi_deg,
                phi_prime_deg,
            } => {
                let pairs = symmetric_settings(SettingsPair::from_degrees(*phi_deg, *phi_prime_deg)?);
                functional.evaluate(&correlation_tensor(&load_state(state)?, &pairs))
            }
            Quantity::LhvMax { functional, model } => {
                let r = lhv_max(*functional, *model);
                anyhow::ensure!(r.verify(), "witness for {functional}/{model} does not reproduce its value");
                r.max_value
            }
            Quantity::CriticalVisibility {
                state,
                functional,
                phi_deg,
                phi_prime_deg,
            } => {
                let pairs = symmetric_settings(SettingsPair::from_degrees(*phi_deg, *phi_prime_deg)?);
                critical_visibility(&load_state(state)?, &pairs, *functional, 1e-10).unwrap_or(f64::NAN)
            }
            Quantity::Optimum { state, functional } => {
                optimize(&load_state(state)?, *functional, &OptimizationConfig::default())?.best_value
            }
        };
        Ok(RowResult {
            id: self.id.clone(),
            label: self.label.clone(),
            value,
            expected: self.expected,
            tolerance: self.tolerance,
            pass: (value - self.expected).abs() <= self.tolerance,
        })
    }
}
