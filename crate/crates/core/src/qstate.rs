//! Three-qubit polarization states, pure and mixed.
//!
//! Amplitudes live in the binary basis order `|HHH⟩, |HHV⟩, …, |VVV⟩`:
//! party `a` is the most significant bit, and `H = 0`, `V = 1` for every
//! party. Everything downstream (golden files, JSON state files, the
//! correlation engine) relies on this one layout.

use nalgebra::{Complex, SMatrix, SVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polarimetry::{circular_left, circular_right};

pub type C64 = Complex<f64>;
/// State vector in the canonical basis.
pub type Ket8 = SVector<C64, 8>;
/// Operator on the three-qubit space.
pub type Operator8 = SMatrix<C64, 8, 8>;

/// Tolerance for algebraic identities (norms, traces, Hermiticity).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for spectral statements (positivity, rank).
pub const SPECTRAL_TOL: f64 = 1e-10;

const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

/// Index of a basis ket given as a three-letter `H`/`V` label, e.g. `"HHV"` → 1.
pub fn basis_index(label: &str) -> Option<usize> {
    let bytes = label.as_bytes();
    if bytes.len() != 3 {
        return None;
    }
    bytes.iter().try_fold(0usize, |acc, b| match b {
        b'H' | b'h' => Some(acc << 1),
        b'V' | b'v' => Some((acc << 1) | 1),
        _ => None,
    })
}

/// Inverse of [`basis_index`].
pub fn basis_label(index: usize) -> String {
    assert!(index < 8, "basis index {index} out of range");
    (0..3)
        .map(|bit| if index >> (2 - bit) & 1 == 0 { 'H' } else { 'V' })
        .collect()
}

/// A normalized pure state of three polarization qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Ket8,
}

impl PureState {
    /// Wraps already-normalized amplitudes. Fails if the squared norm is not
    /// 1 within [`ALGEBRAIC_TOL`] or any amplitude is not finite.
    pub fn new(amplitudes: Ket8) -> Result<Self> {
        check_finite(amplitudes.iter())?;
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sqr} differs from 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: Ket8) -> Result<Self> {
        check_finite(amplitudes.iter())?;
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// The product basis state named by `label`, e.g. `"HHH"`.
    pub fn basis(label: &str) -> Result<Self> {
        let index = basis_index(label)
            .ok_or_else(|| Error::Parse(format!("not a basis label: {label:?}")))?;
        let mut amplitudes = Ket8::zeros();
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &Ket8 {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    /// Amplitude of the basis ket named by `label`.
    pub fn amplitude_of(&self, label: &str) -> Option<C64> {
        basis_index(label).map(|i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// The projector `|s⟩⟨s|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            entries: self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// `(|HHV⟩ + |HVH⟩ + |VHH⟩)/√3`.
pub fn make_w() -> PureState {
    let mut amplitudes = Ket8::zeros();
    for label in ["HHV", "HVH", "VHH"] {
        amplitudes[basis_index(label).unwrap()] = C64::new(FRAC_1_SQRT_3, 0.0);
    }
    PureState { amplitudes }
}

/// Basis in which the GHZ superposition is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzBasis {
    /// `(|HHH⟩ + |VVV⟩)/√2`
    LinearHv,
    /// `(|RRR⟩ + |LLL⟩)/√2`, expanded in H/V with the circular convention of
    /// [`crate::polarimetry`].
    CircularRl,
}

pub fn make_ghz(basis: GhzBasis) -> PureState {
    let (first, second) = match basis {
        GhzBasis::LinearHv => (
            nalgebra::Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            nalgebra::Vector2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        ),
        GhzBasis::CircularRl => (circular_right(), circular_left()),
    };
    let amplitudes = Ket8::from_fn(|index, _| {
        let bits = [index >> 2 & 1, index >> 1 & 1, index & 1];
        let product = |ket: &nalgebra::Vector2<C64>| bits.iter().map(|&b| ket[b]).product::<C64>();
        (product(&first) + product(&second)) * std::f64::consts::FRAC_1_SQRT_2
    });
    PureState { amplitudes }
}

/// An 8×8 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Operator8,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace within [`ALGEBRAIC_TOL`] and positivity
    /// within [`SPECTRAL_TOL`].
    pub fn new(entries: Operator8) -> Result<Self> {
        check_finite(entries.iter())?;
        for row in 0..8 {
            for col in row..8 {
                let gap = (entries[(row, col)] - entries[(col, row)].conj()).norm();
                if gap > ALGEBRAIC_TOL {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({row}, {col}): gap {gap:e}"
                    )));
                }
            }
        }
        let trace = entries.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > ALGEBRAIC_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let rho = Self { entries };
        let lowest = rho.eigenvalues()[0];
        if lowest < -SPECTRAL_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(rho)
    }

    /// Builds `|s⟩⟨s|` from raw amplitudes, rejecting non-normalized input.
    pub fn from_amplitudes(amplitudes: Ket8) -> Result<Self> {
        PureState::new(amplitudes).map(|s| s.to_density())
    }

    /// `𝟙/8`.
    pub fn maximally_mixed() -> Self {
        Self {
            entries: Operator8::identity().scale(0.125),
        }
    }

    pub fn entries(&self) -> &Operator8 {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 8] {
        let values = self.entries.symmetric_eigenvalues();
        let mut out = [0.0; 8];
        out.iter_mut().zip(values.iter()).for_each(|(o, v)| *o = *v);
        out.sort_by(f64::total_cmp);
        out
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(s: &PureState) -> Self {
        s.to_density()
    }
}

pub fn pure_to_density(s: &PureState) -> DensityMatrix {
    s.to_density()
}

/// Weight of the ideal state in a white-noise mixture.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Visibility(f64);

impl Visibility {
    pub const ONE: Visibility = Visibility(1.0);

    pub fn new(v: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&v) {
            Ok(Self(v))
        } else {
            Err(Error::OutOfRange {
                what: "visibility",
                value: v,
                lo: 0.0,
                hi: 1.0,
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `v·ρ + (1 − v)·𝟙/8`.
pub fn mix_with_white_noise(rho: &DensityMatrix, v: Visibility) -> DensityMatrix {
    let v = v.value();
    DensityMatrix {
        entries: rho.entries.scale(v) + Operator8::identity().scale((1.0 - v) / 8.0),
    }
}

/// A pure state drawn from the unitarily invariant measure.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        let amplitudes = Ket8::from_fn(|_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if let Ok(s) = PureState::normalized(amplitudes) {
            return s;
        }
    }
}

/// A random density matrix `G G† / tr(G G†)` with `G` an 8×`rank` complex
/// Ginibre matrix (`rank` clamped to 1..=8).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> DensityMatrix {
    let rank = rank.clamp(1, 8);
    let mut entries = Operator8::zeros();
    for _ in 0..rank {
        let column = Ket8::from_fn(|_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        entries += column * column.adjoint();
    }
    let trace = entries.trace().re;
    entries.unscale_mut(trace);
    // Hermitian by construction; the diagonal may carry rounding in the imaginary part.
    for i in 0..8 {
        entries[(i, i)].im = 0.0;
    }
    DensityMatrix { entries }
}

fn check_finite<'a>(mut values: impl Iterator<Item = &'a C64>) -> Result<()> {
    if values.all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidState("non-finite entry".into()))
    }
}

// JSON: complex numbers are `[re, im]` pairs in canonical basis order; a pure
// state is a list of 8 pairs, a density matrix a list of 8 rows of 8 pairs.

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(8))?;
        for z in self.amplitudes.iter() {
            seq.serialize_element(&pair(z))?;
        }
        seq.end()
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(8))?;
        for row in 0..8 {
            let row: Vec<[f64; 2]> = (0..8).map(|col| pair(&self.entries[(row, col)])).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateJson {
    Pure(Vec<[f64; 2]>),
    Mixed(Vec<Vec<[f64; 2]>>),
}

/// Parses a JSON state file: either 8 amplitudes or an 8×8 matrix, each
/// complex number written as `[re, im]`.
pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    let parsed: StateJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let c = |p: &[f64; 2]| C64::new(p[0], p[1]);
    match parsed {
        StateJson::Pure(amps) => {
            if amps.len() != 8 {
                return Err(Error::Parse(format!("expected 8 amplitudes, got {}", amps.len())));
            }
            DensityMatrix::from_amplitudes(Ket8::from_iterator(amps.iter().map(c)))
        }
        StateJson::Mixed(rows) => {
            if rows.len() != 8 || rows.iter().any(|r| r.len() != 8) {
                return Err(Error::Parse("expected an 8×8 matrix".into()));
            }
            DensityMatrix::new(Operator8::from_fn(|r, col| c(&rows[r][col])))
        }
    }
}
