use std::path::PathBuf;
use std::str::FromStr;

use anyhow::Context;
use tribell::qstate::density_from_json;
use tribell::{make_ghz, make_w, mix_with_white_noise, DensityMatrix, GhzBasis, Visibility};

/// A named state or a JSON state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    W,
    GhzHv,
    GhzRl,
    File(PathBuf),
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "w" | "W" => StateSpec::W,
            "ghz-hv" => StateSpec::GhzHv,
            "ghz-rl" => StateSpec::GhzRl,
            "" => return Err("empty state spec".into()),
            path => StateSpec::File(PathBuf::from(path)),
        })
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateSpec::W => f.write_str("w"),
            StateSpec::GhzHv => f.write_str("ghz-hv"),
            StateSpec::GhzRl => f.write_str("ghz-rl"),
            StateSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl StateSpec {
    pub fn load(&self, visibility: f64) -> anyhow::Result<DensityMatrix> {
        let rho = match self {
            StateSpec::W => make_w().to_density(),
            StateSpec::GhzHv => make_ghz(GhzBasis::LinearHv).to_density(),
            StateSpec::GhzRl => make_ghz(GhzBasis::CircularRl).to_density(),
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading state file {}", path.display()))?;
                density_from_json(&text).with_context(|| format!("parsing {}", path.display()))?
            }
        };
        Ok(mix_with_white_noise(&rho, Visibility::new(visibility)?))
    }
}
