//! Maximizing `|S_M|` or `|S_V|` over the six analyzer phases.
//!
//! The search runs in two stages:
//!
//! 1. a coarse scan of the party-symmetric plane `φ_a = φ_b = φ_c`,
//!    `φ'_a = φ'_b = φ'_c` at `grid_step` resolution;
//! 2. compass pattern search in the full six-dimensional torus started from
//!    the best grid points, plus a few seeded random starts.
//!
//! Pattern search polls `±step` along each axis, moves to the best strictly
//! improving neighbour (then tries repeating that displacement once more),
//! halves the step when no axis move improves, and stops once every poll is
//! within `refine_tolerance` of the current value.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequalities::{correlation_tensor, Functional, Settings, SettingsPair};
use crate::polarimetry::AnalyzerSetting;
use crate::qstate::DensityMatrix;

/// Grid points that seed the local refinement.
pub const GRID_SEEDS: usize = 10;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationConfig {
    /// Coarse grid spacing in radians; must divide 2π.
    pub grid_step: f64,
    pub refine_tolerance: f64,
    pub max_refine_iterations: usize,
    /// Number of extra refinement runs from random points of the torus.
    pub random_restarts: usize,
    pub seed: u64,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            grid_step: 15f64.to_radians(),
            refine_tolerance: 1e-8,
            max_refine_iterations: 2000,
            random_restarts: 4,
            seed: 0,
        }
    }
}

impl OptimizationConfig {
    /// Number of grid cells per axis.
    pub fn cells(&self) -> Result<usize> {
        if !(self.grid_step.is_finite() && self.grid_step > 0.0 && self.grid_step <= TAU) {
            return Err(Error::Config(format!("grid_step {} must lie in (0, 2π]", self.grid_step)));
        }
        let cells = (TAU / self.grid_step).round();
        if (cells * self.grid_step - TAU).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "grid_step {} does not divide 2π",
                self.grid_step
            )));
        }
        Ok(cells as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.cells()?;
        if !(self.refine_tolerance.is_finite() && self.refine_tolerance > 0.0) {
            return Err(Error::Config(format!(
                "refine_tolerance {} must be positive",
                self.refine_tolerance
            )));
        }
        if self.max_refine_iterations == 0 {
            return Err(Error::Config("max_refine_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub functional: Functional,
    pub best_value: f64,
    pub best_settings: Settings,
    /// `(iteration, value)` of the winning refinement run.
    pub trace: Vec<(usize, f64)>,
    pub restarts_used: usize,
    pub evaluations: usize,
}

/// `|functional|` at a point `[φ_a, φ'_a, φ_b, φ'_b, φ_c, φ'_c]` of the torus.
struct Objective<'a> {
    state: &'a DensityMatrix,
    functional: Functional,
    evaluations: usize,
}

impl Objective<'_> {
    fn value(&mut self, x: &[f64; 6]) -> f64 {
        self.evaluations += 1;
        let t = correlation_tensor(self.state, &to_settings(x));
        self.functional.evaluate(&t).abs()
    }
}

fn to_settings(x: &[f64; 6]) -> Settings {
    let pair = |p: usize| SettingsPair::from_radians(x[2 * p], x[2 * p + 1]).expect("finite phases");
    [pair(0), pair(1), pair(2)]
}

fn wrap_point(x: &mut [f64; 6]) {
    for v in x.iter_mut() {
        *v = v.rem_euclid(TAU);
    }
}

struct Run {
    value: f64,
    point: [f64; 6],
    trace: Vec<(usize, f64)>,
}

fn pattern_search(obj: &mut Objective<'_>, start: [f64; 6], step: f64, config: &OptimizationConfig) -> Run {
    let mut point = start;
    let mut value = obj.value(&point);
    let mut step = step;
    let mut trace = vec![(0, value)];
    for iteration in 1..=config.max_refine_iterations {
        let mut best: Option<([f64; 6], f64)> = None;
        let mut spread = 0.0f64;
        for axis in 0..6 {
            for dir in [1.0, -1.0] {
                let mut trial = point;
                trial[axis] += dir * step;
                let v = obj.value(&trial);
                spread = spread.max((v - value).abs());
                if v > value && best.is_none_or(|(_, b)| v > b) {
                    best = Some((trial, v));
                }
            }
        }
        match best {
            Some((trial, v)) => {
                // Hooke-Jeeves pattern move: repeat the successful displacement.
                let mut ahead = trial;
                ahead.iter_mut().zip(&point).for_each(|(t, p)| *t += *t - p);
                let va = obj.value(&ahead);
                (point, value) = if va > v { (ahead, va) } else { (trial, v) };
                wrap_point(&mut point);
                trace.push((iteration, value));
            }
            None if spread < config.refine_tolerance || step < MIN_STEP => break,
            None => step *= 0.5,
        }
    }
    Run { value, point, trace }
}

/// Searches for the largest `|functional|` attainable on `state`.
pub fn optimize(
    state: &DensityMatrix,
    functional: Functional,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    let cells = config.cells()?;
    let mut obj = Objective {
        state,
        functional,
        evaluations: 0,
    };

    // Symmetric plane scan; ties go to the lexicographically smaller grid index.
    let mut grid: Vec<(f64, usize, usize)> = Vec::with_capacity(cells * cells);
    for u in 0..cells {
        for w in 0..cells {
            let (phi, phi_prime) = (u as f64 * config.grid_step, w as f64 * config.grid_step);
            let v = obj.value(&[phi, phi_prime, phi, phi_prime, phi, phi_prime]);
            grid.push((v, u, w));
        }
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut starts: Vec<[f64; 6]> = grid
        .iter()
        .take(GRID_SEEDS)
        .map(|&(_, u, w)| {
            let (phi, phi_prime) = (u as f64 * config.grid_step, w as f64 * config.grid_step);
            [phi, phi_prime, phi, phi_prime, phi, phi_prime]
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    starts.extend((0..config.random_restarts).map(|_| std::array::from_fn(|_| rng.random_range(0.0..TAU))));

    let mut best: Option<Run> = None;
    for start in &starts {
        let run = pattern_search(&mut obj, *start, config.grid_step / 2.0, config);
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let best_settings = to_settings(&best.point);
    // Report the value at the wrapped settings so re-evaluation matches exactly.
    let best_value = functional
        .evaluate(&correlation_tensor(state, &best_settings))
        .abs();
    Ok(OptimizationResult {
        functional,
        best_value,
        best_settings,
        trace: best.trace,
        restarts_used: starts.len(),
        evaluations: obj.evaluations,
    })
}

/// Settings equivalent to `settings` for `|S_M|` and `|S_V|` on the W state.
///
/// The group is generated by the global sign flip `φ ↦ −φ` (the W state is
/// an eigenvector of `Z⊗Z⊗Z`) and by shifting both phases of one party by π
/// (which negates that party's observable and so only flips the sign of
/// every correlation). Shifts by 2π are absorbed by angle wrapping. The input
/// itself comes first; duplicates are removed.
pub fn objective_symmetries(settings: &Settings) -> Vec<Settings> {
    let mut out: Vec<Settings> = Vec::with_capacity(16);
    for flip in [false, true] {
        for mask in 0..8usize {
            let image: Settings = std::array::from_fn(|p| {
                let map = |s: AnalyzerSetting| {
                    let s = if flip { s.negated() } else { s };
                    if mask >> p & 1 == 1 {
                        s.shifted(PI)
                    } else {
                        s
                    }
                };
                SettingsPair::new(map(settings[p].phi), map(settings[p].phi_prime))
            });
            if !out.contains(&image) {
                out.push(image);
            }
        }
    }
    out
}

/// Largest circular distance (radians) between corresponding phases.
pub fn settings_distance(a: &Settings, b: &Settings) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            [
                x.phi.circular_distance(y.phi),
                x.phi_prime.circular_distance(y.phi_prime),
            ]
        })
        .fold(0.0, f64::max)
}

/// Distance from `target` to the closest symmetric image of `settings`.
pub fn distance_modulo_symmetries(settings: &Settings, target: &Settings) -> f64 {
    objective_symmetries(settings)
        .iter()
        .map(|s| settings_distance(s, target))
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .expect("symmetry list contains the identity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{symmetric_settings, w_optimal_settings};
    use crate::qstate::{make_w, PureState};
    use approx::assert_abs_diff_eq;

    #[test]
    fn config_validation() {
        assert!(OptimizationConfig::default().validate().is_ok());
        assert_eq!(OptimizationConfig::default().cells().unwrap(), 24);
        let bad = |f: fn(&mut OptimizationConfig)| {
            let mut c = OptimizationConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.grid_step = 0.7));
        assert!(bad(|c| c.grid_step = -0.1));
        assert!(bad(|c| c.refine_tolerance = 0.0));
        assert!(bad(|c| c.max_refine_iterations = 0));
    }

    #[test]
    fn symmetries_include_identity_and_sign_flip() {
        let s = w_optimal_settings();
        let images = objective_symmetries(&s);
        assert_eq!(images[0], s);
        let flipped = symmetric_settings(SettingsPair::from_degrees(-35.264, -144.736).unwrap());
        assert!(images.contains(&flipped));
        assert_eq!(images.len(), 16);
    }

    #[test]
    fn zero_settings_fixed_by_sign_flip() {
        let s = symmetric_settings(SettingsPair::from_degrees(0.0, 0.0).unwrap());
        let images = objective_symmetries(&s);
        // only the π shifts produce new images
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn symmetries_preserve_w_objective() {
        let rho = make_w().to_density();
        let s = symmetric_settings(SettingsPair::from_radians(0.3, 2.2).unwrap());
        for f in Functional::ALL {
            let base = f.evaluate(&correlation_tensor(&rho, &s)).abs();
            for image in objective_symmetries(&s) {
                let v = f.evaluate(&correlation_tensor(&rho, &image)).abs();
                assert_abs_diff_eq!(v, base, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn product_state_mermin_is_local_bound() {
        let rho = PureState::basis("HHH").unwrap().to_density();
        let r = optimize(&rho, Functional::Mermin, &OptimizationConfig::default()).unwrap();
        assert_abs_diff_eq!(r.best_value, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn w_svetlichny_optimum() {
        let rho = make_w().to_density();
        let r = optimize(&rho, Functional::Svetlichny, &OptimizationConfig::default()).unwrap();
        assert_abs_diff_eq!(r.best_value, 4.354, epsilon = 1e-3);
        let d = distance_modulo_symmetries(&r.best_settings, &w_optimal_settings());
        assert!(d.to_degrees() < 0.5, "representative {d} rad away: {:?}", r.best_settings);
        let again = Functional::Svetlichny.evaluate(&correlation_tensor(&rho, &r.best_settings)).abs();
        assert!((again - r.best_value).abs() <= 1e-9);
    }

    #[test]
    fn invalid_config_rejected() {
        let c = OptimizationConfig {
            grid_step: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            optimize(&make_w().to_density(), Functional::Mermin, &c),
            Err(Error::Config(_))
        ));
    }
}
