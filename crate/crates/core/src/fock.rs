//! Truncated single-mode Fock space: ladder representations of the
//! Weyl-Heisenberg and su(1,1) algebras, number operators, coherent states,
//! and the modified Bessel function behind the Barut-Girardello normalizer.
//!
//! Everything acts on the first `d` occupation-number states `|0> .. |d-1>`.
//! Operators are dense `d x d` complex matrices tagged with their band
//! structure; states are length-`d` amplitude vectors that keep the exact
//! series coefficients of their infinite-dimensional parents, so truncation
//! loss is visible as `tail_mass`.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("truncation dimension must be at least {min}, got {dim}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error("entries outside the {structure:?} band must be zero")]
    BandViolation { structure: OperatorStructure },
    #[error("entry vector has length {got}, expected {expected}")]
    EntryLength { expected: usize, got: usize },
}

/// Which dynamical algebra a construction lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraKind {
    /// Simple harmonic oscillator ladder algebra.
    #[serde(rename = "wh")]
    WeylHeisenberg,
    /// Infinite square well ladder algebra.
    #[serde(rename = "su11")]
    SU11,
}

impl std::fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgebraKind::WeylHeisenberg => write!(f, "wh"),
            AlgebraKind::SU11 => write!(f, "su11"),
        }
    }
}

/// Band structure of a [`ModeOperator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorStructure {
    /// Nonzero entries on the main diagonal only.
    Diagonal,
    /// Nonzero entries on the first subdiagonal only (`<n+1|A|n>`).
    Raising,
    /// Nonzero entries on the first superdiagonal only (`<n-1|A|n>`).
    Lowering,
    General,
}

/// Dense complex operator on the `d`-dimensional truncated mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    dim: usize,
    entries: Vec<Complex64>, // row-major d x d
    structure: OperatorStructure,
}

impl ModeOperator {
    /// Validating constructor: `dim >= 2`, entries row-major of length
    /// `dim * dim`, and exact zeros outside the declared band.
    pub fn new(
        dim: usize,
        entries: Vec<Complex64>,
        structure: OperatorStructure,
    ) -> Result<Self, FockError> {
        if dim < 2 {
            return Err(FockError::DimensionTooSmall { dim, min: 2 });
        }
        if entries.len() != dim * dim {
            return Err(FockError::EntryLength {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let op = ModeOperator {
            dim,
            entries,
            structure,
        };
        let in_band = |r: usize, c: usize| match structure {
            OperatorStructure::Diagonal => r == c,
            OperatorStructure::Raising => r == c + 1,
            OperatorStructure::Lowering => r + 1 == c,
            OperatorStructure::General => true,
        };
        for r in 0..dim {
            for c in 0..dim {
                if !in_band(r, c) && op.entry(r, c) != Complex64::ZERO {
                    return Err(FockError::BandViolation { structure });
                }
            }
        }
        Ok(op)
    }

    fn from_fn(
        dim: usize,
        structure: OperatorStructure,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Self {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = f(r, c);
            }
        }
        ModeOperator {
            dim,
            entries,
            structure,
        }
    }

    /// Diagonal operator from real eigenvalues.
    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self, FockError> {
        if diag.len() < 2 {
            return Err(FockError::DimensionTooSmall {
                dim: diag.len(),
                min: 2,
            });
        }
        Ok(Self::from_fn(
            diag.len(),
            OperatorStructure::Diagonal,
            |r, c| {
                if r == c {
                    Complex64::new(diag[r], 0.0)
                } else {
                    Complex64::ZERO
                }
            },
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> OperatorStructure {
        self.structure
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose. Raising and lowering tags swap.
    pub fn adjoint(&self) -> ModeOperator {
        let structure = match self.structure {
            OperatorStructure::Raising => OperatorStructure::Lowering,
            OperatorStructure::Lowering => OperatorStructure::Raising,
            s => s,
        };
        Self::from_fn(self.dim, structure, |r, c| self.entry(c, r).conj())
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &ModeOperator) -> ModeOperator {
        assert_eq!(self.dim, other.dim, "operator dimensions must match");
        let d = self.dim;
        Self::from_fn(d, OperatorStructure::General, |r, c| {
            (0..d).map(|j| self.entry(r, j) * other.entry(j, c)).sum()
        })
    }

    /// `self - z * I`.
    pub fn shift(&self, z: Complex64) -> ModeOperator {
        Self::from_fn(self.dim, OperatorStructure::General, |r, c| {
            if r == c {
                self.entry(r, c) - z
            } else {
                self.entry(r, c)
            }
        })
    }

    pub fn sub(&self, other: &ModeOperator) -> ModeOperator {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, OperatorStructure::General, |r, c| {
            self.entry(r, c) - other.entry(r, c)
        })
    }

    pub fn scale(&self, z: Complex64) -> ModeOperator {
        Self::from_fn(self.dim, self.structure, |r, c| z * self.entry(r, c))
    }

    /// Apply to a state, `A |psi>`.
    pub fn apply(&self, state: &ModeState) -> ModeState {
        assert_eq!(self.dim, state.dim, "operator and state dimensions differ");
        let mut amps = vec![Complex64::ZERO; self.dim];
        for (r, out) in amps.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for c in 0..self.dim {
                acc += self.entry(r, c) * state.amps[c];
            }
            *out = acc;
        }
        ModeState {
            dim: self.dim,
            amps,
        }
    }

    /// Largest entrywise distance to another operator.
    pub fn max_abs_diff(&self, other: &ModeOperator) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Amplitude vector on the truncated mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    dim: usize,
    amps: Vec<Complex64>,
}

impl ModeState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, FockError> {
        if amps.len() < 2 {
            return Err(FockError::DimensionTooSmall {
                dim: amps.len(),
                min: 2,
            });
        }
        Ok(ModeState {
            dim: amps.len(),
            amps,
        })
    }

    /// Occupation-number basis state `|n>`.
    pub fn basis(dim: usize, n: usize) -> Result<Self, FockError> {
        if dim < 2 {
            return Err(FockError::DimensionTooSmall { dim, min: 2 });
        }
        assert!(n < dim, "basis index {n} out of range for dim {dim}");
        let mut amps = vec![Complex64::ZERO; dim];
        amps[n] = Complex64::ONE;
        Ok(ModeState { dim, amps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Probability mass lost to truncation, `1 - ||amps||^2`, clamped at 0.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.norm_sq()).max(0.0)
    }

    /// Unit-norm copy, for use as an evolution input.
    pub fn normalized(&self) -> ModeState {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        ModeState {
            dim: self.dim,
            amps: self.amps.iter().map(|a| a / n).collect(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ModeState) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Index and probability of the dominant basis state; ties break toward
    /// smaller `n`.
    pub fn max_basis_overlap(&self) -> (usize, f64) {
        debug_assert!(
            (self.norm() - 1.0).abs() < 1e-6,
            "max_basis_overlap expects a normalized state"
        );
        let mut best = (0usize, self.amps[0].norm_sqr());
        for (n, a) in self.amps.iter().enumerate().skip(1) {
            let p = a.norm_sqr();
            if p > best.1 {
                best = (n, p);
            }
        }
        best
    }
}

// States and operators serialize with interleaved [re, im] pairs.
fn interleave(amps: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(amps.len() * 2);
    for a in amps {
        out.push(a.re);
        out.push(a.im);
    }
    out
}

fn deinterleave<E: serde::de::Error>(flat: &[f64]) -> Result<Vec<Complex64>, E> {
    if !flat.len().is_multiple_of(2) {
        return Err(E::custom("interleaved complex data must have even length"));
    }
    Ok(flat
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect())
}

impl Serialize for ModeState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ModeState", 2)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("amps", &interleave(&self.amps))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ModeState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            amps: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let amps = deinterleave(&raw.amps)?;
        if amps.len() != raw.dim {
            return Err(D::Error::custom("amplitude count does not match dim"));
        }
        ModeState::new(amps).map_err(D::Error::custom)
    }
}

impl Serialize for ModeOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ModeOperator", 3)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("structure", &self.structure)?;
        st.serialize_field("entries", &interleave(&self.entries))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ModeOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            structure: OperatorStructure,
            entries: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let entries = deinterleave(&raw.entries)?;
        ModeOperator::new(raw.dim, entries, raw.structure).map_err(D::Error::custom)
    }
}

/// Harmonic-oscillator ladder pair `(a, a_dagger)`: `<n-1|a|n> = sqrt(n)`.
pub fn wh_ladder(d: usize) -> Result<(ModeOperator, ModeOperator), FockError> {
    if d < 2 {
        return Err(FockError::DimensionTooSmall { dim: d, min: 2 });
    }
    let lowering = ModeOperator::from_fn(d, OperatorStructure::Lowering, |r, c| {
        if r + 1 == c {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let raising = lowering.adjoint();
    Ok((lowering, raising))
}

/// Occupation-number operator `N = a_dagger a = diag(0, 1, ..., d-1)`.
pub fn wh_number(d: usize) -> Result<ModeOperator, FockError> {
    if d < 2 {
        return Err(FockError::DimensionTooSmall { dim: d, min: 2 });
    }
    ModeOperator::from_real_diagonal(&(0..d).map(|n| n as f64).collect::<Vec<_>>())
}

/// su(1,1) generators for the infinite square well, in the order
/// `(K_minus, K_plus, K3)`:
/// `<n-1|K-|n> = sqrt(n(n+2))`, `<n+1|K+|n> = sqrt((n+1)(n+3))`,
/// `K3 = diag(2n+3)`.
pub fn su11_generators(d: usize) -> Result<(ModeOperator, ModeOperator, ModeOperator), FockError> {
    if d < 2 {
        return Err(FockError::DimensionTooSmall { dim: d, min: 2 });
    }
    let k_minus = ModeOperator::from_fn(d, OperatorStructure::Lowering, |r, c| {
        if r + 1 == c {
            let n = c as f64;
            Complex64::new((n * (n + 2.0)).sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let k_plus = k_minus.adjoint();
    let k3 = ModeOperator::from_real_diagonal(
        &(0..d).map(|n| 2.0 * n as f64 + 3.0).collect::<Vec<_>>(),
    )?;
    Ok((k_minus, k_plus, k3))
}

/// Square-well number operator `(K3 - 3)/2 = diag(0, 1, ..., d-1)`.
pub fn su11_number(d: usize) -> Result<ModeOperator, FockError> {
    wh_number(d)
}

/// Square-well Hamiltonian `K+ K- = diag(n(n+2))` in natural units
/// (the overall energy scale is fixed to 1).
pub fn isw_hamiltonian(d: usize) -> Result<ModeOperator, FockError> {
    if d < 2 {
        return Err(FockError::DimensionTooSmall { dim: d, min: 2 });
    }
    ModeOperator::from_real_diagonal(
        &(0..d)
            .map(|n| {
                let n = n as f64;
                n * (n + 2.0)
            })
            .collect::<Vec<_>>(),
    )
}

/// Ladder amplitudes of the lowering operator for an algebra:
/// `<n|L|n+1>` for `n = 0..d-2`.
pub(crate) fn ladder_amplitudes(algebra: AlgebraKind, d: usize) -> Vec<f64> {
    (0..d - 1)
        .map(|n| {
            let m = (n + 1) as f64;
            match algebra {
                AlgebraKind::WeylHeisenberg => m.sqrt(),
                AlgebraKind::SU11 => (m * (m + 2.0)).sqrt(),
            }
        })
        .collect()
}

/// Diagonal of `R L` (raising times lowering) for an algebra: `n` for the
/// oscillator, `n(n+2)` for the square well.
pub(crate) fn number_diagonal(algebra: AlgebraKind, d: usize) -> Vec<f64> {
    (0..d)
        .map(|n| {
            let n = n as f64;
            match algebra {
                AlgebraKind::WeylHeisenberg => n,
                AlgebraKind::SU11 => n * (n + 2.0),
            }
        })
        .collect()
}

/// Truncated Glauber coherent state: `amps[n] = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`.
///
/// Amplitudes are the exact series coefficients; the truncated vector is not
/// renormalized (see [`ModeState::normalized`] and [`ModeState::tail_mass`]).
pub fn glauber_state(alpha: Complex64, d: usize) -> Result<ModeState, FockError> {
    if d < 2 {
        return Err(FockError::DimensionTooSmall { dim: d, min: 2 });
    }
    let mut amps = vec![Complex64::ZERO; d];
    amps[0] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..d {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    ModeState::new(amps)
}

/// Truncated Barut-Girardello coherent state:
/// `amps[n] = (|z| / sqrt(I2(2|z|))) z^n / sqrt(n! (n+2)!)`.
///
/// The normalizer is evaluated through the reduced series
/// `I2(2|z|)/|z|^2 = sum_m |z|^(2m) / (m! (m+2)!)`, which is finite and equal
/// to 1/2 at `z = 0`, so the `z -> 0` limit is `|0>` exactly.
pub fn bg_state(z: Complex64, d: usize) -> Result<ModeState, FockError> {
    if d < 2 {
        return Err(FockError::DimensionTooSmall { dim: d, min: 2 });
    }
    let reduced = bessel_i2_reduced(z.norm());
    let mut amps = vec![Complex64::ZERO; d];
    // |z|/sqrt(I2(2|z|)) * 1/sqrt(0! 2!) = 1/sqrt(2 * reduced)
    amps[0] = Complex64::new(1.0 / (2.0 * reduced).sqrt(), 0.0);
    for n in 1..d {
        let n_f = n as f64;
        amps[n] = amps[n - 1] * z / (n_f * (n_f + 2.0)).sqrt();
    }
    ModeState::new(amps)
}

/// Series tolerance for the Bessel sums: terms below this relative size stop
/// the summation.
const BESSEL_SERIES_TOL: f64 = 1e-17;
const BESSEL_SERIES_MAX_TERMS: usize = 600;

/// Modified Bessel function of the first kind, integer order, by direct
/// power-series summation: `I_v(x) = sum_m (x/2)^(2m+v) / (m! (m+v)!)`.
pub fn bessel_i(order: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_i requires x >= 0");
    let half = x / 2.0;
    // leading term (x/2)^v / v!
    let mut term = 1.0;
    for j in 1..=order {
        term *= half / j as f64;
    }
    let mut sum = term;
    for m in 1..BESSEL_SERIES_MAX_TERMS {
        term *= half * half / (m as f64 * (m as f64 + order as f64));
        sum += term;
        if term <= BESSEL_SERIES_TOL * sum {
            break;
        }
    }
    sum
}

/// `I2(2r) / r^2` as a direct series, finite at `r = 0` where it equals 1/2.
pub(crate) fn bessel_i2_reduced(r: f64) -> f64 {
    let r2 = r * r;
    let mut term = 0.5; // m = 0: 1/(0! 2!)
    let mut sum = term;
    for m in 1..BESSEL_SERIES_MAX_TERMS {
        term *= r2 / (m as f64 * (m as f64 + 2.0));
        sum += term;
        if term <= BESSEL_SERIES_TOL * sum {
            break;
        }
    }
    sum
}

/// Closed-form ground overlap of a Barut-Girardello state:
/// `|<z|0>|^2 = |z|^2 / (2 I2(2|z|))`.
pub fn bg_ground_overlap(z_mod: f64) -> f64 {
    1.0 / (2.0 * bessel_i2_reduced(z_mod))
}
