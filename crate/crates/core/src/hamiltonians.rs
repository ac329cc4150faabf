//! k-mode tensor-product Hamiltonians for the adiabatic search.
//!
//! The problem Hamiltonian is the diagonal `D(N_1, ..., N_k)^2`, kept as
//! exact integers so that an entry is zero iff the decoded index is a root.
//! The initial Hamiltonian is the Kronecker sum of per-mode terms
//! `(R - conj(c) I)(L - c I)` built from the algebra's ladder pair; its
//! ground state is the tensor product of coherent states. The interpolation
//! `H(s) = (1-s) H_I + s H_D` is applied matrix-free: each mode term is
//! tridiagonal, so a matvec is O(k d) per amplitude and the full operator is
//! never materialized except for small-instance eigensolves and test oracles.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fock::{
    bg_state, glauber_state, ladder_amplitudes, number_diagonal, AlgebraKind, ModeOperator,
    ModeState, OperatorStructure,
};
use crate::poly::{LatticePoint, Polynomial};

/// Hard ceiling on `d^k` for dense materialization (eigensolves, oracles).
pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HamiltonianError {
    #[error("mode count must be at least 1")]
    NoModes,
    #[error("per-mode dimension must be at least 2, got {dim}")]
    DimensionTooSmall { dim: usize },
    #[error("total dimension {d}^{k} overflows addressable memory")]
    TotalDimensionOverflow { d: usize, k: usize },
    #[error("polynomial has {poly_vars} variables but the codec has {codec_modes} modes")]
    ModeCountMismatch {
        poly_vars: usize,
        codec_modes: usize,
    },
    #[error("parameter list has {got} entries, expected {expected}")]
    ParamCount { expected: usize, got: usize },
    #[error("diagonal entry {index} does not fit in f64")]
    DiagonalOverflow { index: usize },
    #[error("total dimension {total} exceeds the dense cap {cap}")]
    DenseCapExceeded { total: usize, cap: usize },
    #[error("state vector dimension {got} does not match codec total {expected}")]
    StateDimensionMismatch { expected: usize, got: usize },
}

/// Bijection between flat indices `0..d^k` and occupation tuples
/// `(n_1, ..., n_k)`, row-major with mode 1 slowest:
/// `encode(n) = sum_i n_i d^(k-1-i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiIndexCodec {
    k: usize,
    d: usize,
    total: usize,
}

impl MultiIndexCodec {
    pub fn new(k: usize, d: usize) -> Result<Self, HamiltonianError> {
        if k == 0 {
            return Err(HamiltonianError::NoModes);
        }
        if d < 2 {
            return Err(HamiltonianError::DimensionTooSmall { dim: d });
        }
        let mut total: usize = 1;
        for _ in 0..k {
            total = total
                .checked_mul(d)
                .ok_or(HamiltonianError::TotalDimensionOverflow { d, k })?;
        }
        Ok(MultiIndexCodec { k, d, total })
    }

    pub fn modes(&self) -> usize {
        self.k
    }

    pub fn mode_dim(&self) -> usize {
        self.d
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn encode(&self, tuple: &[u64]) -> usize {
        assert_eq!(tuple.len(), self.k, "tuple length must equal mode count");
        let mut idx = 0usize;
        for &n in tuple {
            debug_assert!((n as usize) < self.d, "occupation number out of range");
            idx = idx * self.d + n as usize;
        }
        idx
    }

    pub fn decode(&self, mut index: usize) -> LatticePoint {
        assert!(index < self.total, "index out of range");
        let mut tuple = vec![0u64; self.k];
        for slot in tuple.iter_mut().rev() {
            *slot = (index % self.d) as u64;
            index /= self.d;
        }
        tuple
    }

    /// Stride between adjacent occupation numbers of the given mode.
    fn stride(&self, mode: usize) -> usize {
        self.d.pow((self.k - 1 - mode) as u32)
    }
}

/// Diagonal problem Hamiltonian `D(N_1, ..., N_k)^2`.
///
/// Entries are exact non-negative integers; the f64 mirror exists only for
/// the evolution kernels. Identical for both algebras because both number
/// operators are `diag(0..d-1)`.
#[derive(Debug, Clone)]
pub struct ProblemHamiltonian {
    codec: MultiIndexCodec,
    diag: Vec<BigInt>,
    diag_f64: Vec<f64>,
    max_diag_f64: f64,
}

impl ProblemHamiltonian {
    pub fn build(p: &Polynomial, codec: MultiIndexCodec) -> Result<Self, HamiltonianError> {
        if p.num_vars() != codec.modes() {
            return Err(HamiltonianError::ModeCountMismatch {
                poly_vars: p.num_vars(),
                codec_modes: codec.modes(),
            });
        }
        let mut diag = Vec::with_capacity(codec.total_dim());
        let mut diag_f64 = Vec::with_capacity(codec.total_dim());
        let mut max_diag = 0.0f64;
        for i in 0..codec.total_dim() {
            let tuple = codec.decode(i);
            let value = p.eval(&tuple).expect("codec mode count was validated");
            let sq = &value * &value;
            let as_f64 = sq
                .to_f64()
                .filter(|v| v.is_finite())
                .ok_or(HamiltonianError::DiagonalOverflow { index: i })?;
            max_diag = max_diag.max(as_f64);
            diag.push(sq);
            diag_f64.push(as_f64);
        }
        Ok(ProblemHamiltonian {
            codec,
            diag,
            diag_f64,
            max_diag_f64: max_diag,
        })
    }

    pub fn codec(&self) -> &MultiIndexCodec {
        &self.codec
    }

    pub fn diag(&self) -> &[BigInt] {
        &self.diag
    }

    pub fn diag_f64(&self) -> &[f64] {
        &self.diag_f64
    }

    /// Flat indices whose decoded tuple is a root of `D`.
    pub fn zero_positions(&self) -> Vec<usize> {
        self.diag
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Smallest diagonal entry and its exact multiplicity.
    pub fn ground_level(&self) -> (&BigInt, usize) {
        let min = self.diag.iter().min().expect("diagonal is non-empty");
        let mult = self.diag.iter().filter(|v| *v == min).count();
        (min, mult)
    }

    /// FNV-1a hash of the decimal diagonal, for run provenance.
    pub fn diag_checksum(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.diag {
            for b in v.to_string().bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
            hash ^= b';' as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash
    }
}

/// One tridiagonal mode term `(R - conj(c) I)(L - c I)`:
/// real diagonal `n (or n(n+2)) + |c|^2`, subdiagonal `-c * ladder(n)`,
/// superdiagonal the conjugate of the subdiagonal.
#[derive(Debug, Clone)]
struct ModeTerm {
    diag: Vec<f64>,
    sub: Vec<Complex64>,
    /// Real-valued subdiagonal fast path (real coherent parameters).
    sub_re: Option<Vec<f64>>,
    /// Hermitian spectral bound via the max absolute row sum.
    inf_norm: f64,
}

impl ModeTerm {
    fn build(algebra: AlgebraKind, c: Complex64, d: usize) -> ModeTerm {
        let ladder = ladder_amplitudes(algebra, d);
        let number = number_diagonal(algebra, d);
        let diag: Vec<f64> = number.iter().map(|n| n + c.norm_sqr()).collect();
        let sub: Vec<Complex64> = ladder.iter().map(|&l| -c * l).collect();
        let sub_re = if c.im == 0.0 {
            Some(sub.iter().map(|s| s.re).collect())
        } else {
            None
        };
        let mut inf_norm = 0.0f64;
        for n in 0..d {
            let mut row = diag[n].abs();
            if n > 0 {
                row += sub[n - 1].norm();
            }
            if n + 1 < d {
                row += sub[n].norm();
            }
            inf_norm = inf_norm.max(row);
        }
        ModeTerm {
            diag,
            sub,
            sub_re,
            inf_norm,
        }
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }
}

/// Kronecker-sum initial Hamiltonian `sum_i (R_i - conj(c_i))(L_i - c_i)`.
#[derive(Debug, Clone)]
pub struct InitialHamiltonian {
    codec: MultiIndexCodec,
    algebra: AlgebraKind,
    params: Vec<Complex64>,
    terms: Vec<ModeTerm>,
    spectral_bound: f64,
}

impl InitialHamiltonian {
    pub fn build(
        params: &[Complex64],
        algebra: AlgebraKind,
        codec: MultiIndexCodec,
    ) -> Result<Self, HamiltonianError> {
        if params.len() != codec.modes() {
            return Err(HamiltonianError::ParamCount {
                expected: codec.modes(),
                got: params.len(),
            });
        }
        let terms: Vec<ModeTerm> = params
            .iter()
            .map(|&c| ModeTerm::build(algebra, c, codec.mode_dim()))
            .collect();
        let spectral_bound = terms.iter().map(|t| t.inf_norm).sum();
        Ok(InitialHamiltonian {
            codec,
            algebra,
            params: params.to_vec(),
            terms,
            spectral_bound,
        })
    }

    pub fn codec(&self) -> &MultiIndexCodec {
        &self.codec
    }

    pub fn algebra(&self) -> AlgebraKind {
        self.algebra
    }

    pub fn params(&self) -> &[Complex64] {
        &self.params
    }

    /// Upper bound on the spectral norm (sum of per-term row-sum bounds).
    pub fn spectral_bound(&self) -> f64 {
        self.spectral_bound
    }

    /// All-zero mode terms: the null generator, for integrator tests only.
    #[cfg(test)]
    pub(crate) fn null_for_tests(codec: MultiIndexCodec) -> Self {
        let d = codec.mode_dim();
        let terms = (0..codec.modes())
            .map(|_| ModeTerm {
                diag: vec![0.0; d],
                sub: vec![Complex64::ZERO; d - 1],
                sub_re: Some(vec![0.0; d - 1]),
                inf_norm: 0.0,
            })
            .collect();
        InitialHamiltonian {
            codec,
            algebra: AlgebraKind::SU11,
            params: vec![Complex64::ZERO; codec.modes()],
            terms,
            spectral_bound: 0.0,
        }
    }

    /// Dense copy of one mode term, for diagnostics and tests.
    pub fn mode_term_dense(&self, mode: usize) -> ModeOperator {
        let term = &self.terms[mode];
        let d = term.dim();
        let mut entries = vec![Complex64::ZERO; d * d];
        for n in 0..d {
            entries[n * d + n] = Complex64::new(term.diag[n], 0.0);
            if n + 1 < d {
                entries[(n + 1) * d + n] = term.sub[n];
                entries[n * d + (n + 1)] = term.sub[n].conj();
            }
        }
        ModeOperator::new(d, entries, OperatorStructure::General)
            .expect("mode term entries are well-formed")
    }

    /// Accumulate `scale * H_I v` into `out`.
    fn accumulate_apply(&self, scale: f64, v: &[Complex64], out: &mut [Complex64]) {
        let d = self.codec.mode_dim();
        let total = self.codec.total_dim();
        for (mode, term) in self.terms.iter().enumerate() {
            let stride = self.codec.stride(mode);
            let block = stride * d;
            match &term.sub_re {
                Some(sub) => {
                    for base in (0..total).step_by(block) {
                        for lo in 0..stride {
                            let off = base + lo;
                            for n in 0..d {
                                let i = off + n * stride;
                                let mut acc = term.diag[n] * v[i];
                                if n > 0 {
                                    acc += sub[n - 1] * v[i - stride];
                                }
                                if n + 1 < d {
                                    acc += sub[n] * v[i + stride];
                                }
                                out[i] += scale * acc;
                            }
                        }
                    }
                }
                None => {
                    for base in (0..total).step_by(block) {
                        for lo in 0..stride {
                            let off = base + lo;
                            for n in 0..d {
                                let i = off + n * stride;
                                let mut acc = term.diag[n] * v[i];
                                if n > 0 {
                                    acc += term.sub[n - 1] * v[i - stride];
                                }
                                if n + 1 < d {
                                    acc += term.sub[n].conj() * v[i + stride];
                                }
                                out[i] += scale * acc;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Complex amplitude vector on the full `d^k` tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    codec: MultiIndexCodec,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(codec: MultiIndexCodec, amps: Vec<Complex64>) -> Result<Self, HamiltonianError> {
        if amps.len() != codec.total_dim() {
            return Err(HamiltonianError::StateDimensionMismatch {
                expected: codec.total_dim(),
                got: amps.len(),
            });
        }
        Ok(StateVector { codec, amps })
    }

    /// Product basis state `|n_1, ..., n_k>`.
    pub fn basis(codec: MultiIndexCodec, tuple: &[u64]) -> Self {
        let mut amps = vec![Complex64::ZERO; codec.total_dim()];
        amps[codec.encode(tuple)] = Complex64::ONE;
        StateVector { codec, amps }
    }

    pub fn codec(&self) -> &MultiIndexCodec {
        &self.codec
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        StateVector {
            codec: self.codec,
            amps: self.amps.iter().map(|a| a / n).collect(),
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.codec, other.codec);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Tensor product of per-mode coherent states, renormalized to unit norm.
///
/// Uses Glauber states for the oscillator algebra and Barut-Girardello
/// states for the square well.
pub fn build_initial_state(
    params: &[Complex64],
    algebra: AlgebraKind,
    codec: MultiIndexCodec,
) -> Result<StateVector, HamiltonianError> {
    if params.len() != codec.modes() {
        return Err(HamiltonianError::ParamCount {
            expected: codec.modes(),
            got: params.len(),
        });
    }
    let d = codec.mode_dim();
    let factors: Vec<ModeState> = params
        .iter()
        .map(|&c| match algebra {
            AlgebraKind::WeylHeisenberg => glauber_state(c, d),
            AlgebraKind::SU11 => bg_state(c, d),
        })
        .map(|r| r.expect("codec guarantees d >= 2"))
        .collect();
    let mut amps = vec![Complex64::ONE; codec.total_dim()];
    for (i, amp) in amps.iter_mut().enumerate() {
        let tuple = codec.decode(i);
        for (mode, &n) in tuple.iter().enumerate() {
            *amp *= factors[mode].amps()[n as usize];
        }
    }
    Ok(StateVector::new(codec, amps)?.normalized())
}

/// Matrix-free application of `H(s) = (1-s) H_I + s H_D` to a state.
pub fn apply_hamiltonian(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    s: f64,
    v: &StateVector,
) -> Result<StateVector, HamiltonianError> {
    check_pair(h_i, h_d)?;
    if v.codec() != h_i.codec() {
        return Err(HamiltonianError::StateDimensionMismatch {
            expected: h_i.codec().total_dim(),
            got: v.codec().total_dim(),
        });
    }
    let mut out = vec![Complex64::ZERO; v.amps.len()];
    apply_into(h_i, h_d, s, &v.amps, &mut out);
    StateVector::new(*h_i.codec(), out)
}

/// In-place kernel shared by [`apply_hamiltonian`] and the evolution loop.
pub(crate) fn apply_into(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    s: f64,
    v: &[Complex64],
    out: &mut [Complex64],
) {
    if s != 0.0 {
        for ((o, &x), &diag) in out.iter_mut().zip(v).zip(h_d.diag_f64()) {
            *o = s * diag * x;
        }
    } else {
        out.fill(Complex64::ZERO);
    }
    if s != 1.0 {
        h_i.accumulate_apply(1.0 - s, v, out);
    }
}

/// Upper bound on the spectral norm of `H(s)`.
pub(crate) fn spectral_bound(h_i: &InitialHamiltonian, h_d: &ProblemHamiltonian, s: f64) -> f64 {
    (1.0 - s) * h_i.spectral_bound() + s * h_d.max_diag_f64
}

fn check_pair(h_i: &InitialHamiltonian, h_d: &ProblemHamiltonian) -> Result<(), HamiltonianError> {
    if h_i.codec() != h_d.codec() {
        return Err(HamiltonianError::StateDimensionMismatch {
            expected: h_i.codec().total_dim(),
            got: h_d.codec().total_dim(),
        });
    }
    Ok(())
}

/// Dense Hermitian matrix of `H(s)`, for eigensolves and as the test oracle
/// for the matrix-free path. Refuses totals above [`DENSE_CAP`].
pub fn materialize_dense(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    s: f64,
) -> Result<DMatrix<Complex64>, HamiltonianError> {
    check_pair(h_i, h_d)?;
    let total = h_i.codec().total_dim();
    if total > DENSE_CAP {
        return Err(HamiltonianError::DenseCapExceeded {
            total,
            cap: DENSE_CAP,
        });
    }
    let d = h_i.codec().mode_dim();
    let mut m = DMatrix::<Complex64>::zeros(total, total);
    for i in 0..total {
        m[(i, i)] = Complex64::new(s * h_d.diag_f64()[i], 0.0);
    }
    let hi_scale = 1.0 - s;
    for (mode, term) in h_i.terms.iter().enumerate() {
        let stride = h_i.codec().stride(mode);
        let block = stride * d;
        for base in (0..total).step_by(block) {
            for lo in 0..stride {
                let off = base + lo;
                for n in 0..d {
                    let i = off + n * stride;
                    m[(i, i)] += Complex64::new(hi_scale * term.diag[n], 0.0);
                    if n + 1 < d {
                        let j = i + stride;
                        m[(j, i)] += hi_scale * term.sub[n];
                        m[(i, j)] += hi_scale * term.sub[n].conj();
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Provenance summary for run outputs: sizes, algebra, parameters, and the
/// checksum of the exact problem diagonal.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub k: usize,
    pub d: usize,
    pub algebra: AlgebraKind,
    pub params: Vec<[f64; 2]>,
    pub diag_checksum: String,
}

pub fn run_summary(h_i: &InitialHamiltonian, h_d: &ProblemHamiltonian) -> RunSummary {
    RunSummary {
        k: h_i.codec().modes(),
        d: h_i.codec().mode_dim(),
        algebra: h_i.algebra(),
        params: h_i.params().iter().map(|c| [c.re, c.im]).collect(),
        diag_checksum: format!("{:016x}", h_d.diag_checksum()),
    }
}
