//! Time evolution along the adiabatic schedule and the halting loop.
//!
//! Each schedule step advances the state by the unitary exponential of the
//! midpoint Hamiltonian, `psi <- exp(-i dt H((step+1/2)/steps)) psi`, in
//! natural units `hbar = 1`. The exponential is applied through a scaled
//! truncated Taylor series of the matrix-free operator: the step is split
//! into substeps small enough that the series converges to near machine
//! precision, which keeps every step unitary up to the series tolerance and
//! makes norm drift a meaningful diagnostic rather than a tuning knob.
//!
//! The decision loop measures `P_max` at the end of each run, doubles the
//! total time until `P_max > 1/2`, and then validates the winning basis
//! state by exact polynomial evaluation: the quantum run proposes, the
//! exact arithmetic disposes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::AlgebraKind;
use crate::hamiltonians::{
    apply_into, build_initial_state, materialize_dense, spectral_bound, HamiltonianError,
    InitialHamiltonian, MultiIndexCodec, ProblemHamiltonian, StateVector,
};
use crate::poly::{LatticePoint, Polynomial};

/// Largest `|dt| * ||H||` handled by one Taylor substep.
const MAX_SUBSTEP_PHASE: f64 = 4.0;
/// Relative truncation tolerance of the exponential series per substep.
/// Well under the 1e-10 per-step contract so that accumulated truncation
/// stays inside the 1e-9 run-level norm budget.
const SERIES_TOL: f64 = 1e-14;
const MAX_TAYLOR_TERMS: usize = 64;
/// Norm drift beyond this aborts the run with a step-size diagnostic.
const NORM_DRIFT_ABORT: f64 = 1e-6;
/// Eigenvalues closer than this count as degenerate in diagnostics.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Modulus floor for su(1,1) coherent parameters; below it the halting
/// criterion `P_max > 1/2` is unsound.
pub const SU11_HALTING_MODULUS: f64 = 1.6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("total time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("checkpoints must be sorted fractions in [0, 1]")]
    BadCheckpoints,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("initial state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error(
        "norm drift {drift:.3e} exceeded {NORM_DRIFT_ABORT:.0e} at step {step} (t = {t:.6}); \
         reduce the step size (current dt = {dt:.6e})"
    )]
    NormDrift {
        step: usize,
        t: f64,
        drift: f64,
        dt: f64,
    },
    #[error("exponential series did not converge within {MAX_TAYLOR_TERMS} terms")]
    SeriesDiverged,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecideError {
    #[error("config: {0}")]
    BadConfig(String),
    #[error(
        "su(1,1) coherent parameter {index} has modulus {modulus:.4} <= {SU11_HALTING_MODULUS}; \
         the halting criterion is unsound below that bound"
    )]
    HaltingBoundViolated { index: usize, modulus: f64 },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// Uniform-step schedule for one evolution run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    total_time: f64,
    steps: usize,
    checkpoints: Vec<f64>,
}

impl Schedule {
    /// Schedule with the default 16 evenly spaced trace checkpoints.
    pub fn new(total_time: f64, steps: usize) -> Result<Self, ScheduleError> {
        let checkpoints = (1..=16).map(|i| i as f64 / 16.0).collect();
        Self::with_checkpoints(total_time, steps, checkpoints)
    }

    pub fn with_checkpoints(
        total_time: f64,
        steps: usize,
        checkpoints: Vec<f64>,
    ) -> Result<Self, ScheduleError> {
        if !total_time.is_finite() || total_time <= 0.0 {
            return Err(ScheduleError::NonPositiveTime(total_time));
        }
        if steps == 0 {
            return Err(ScheduleError::NoSteps);
        }
        let sorted = checkpoints.windows(2).all(|w| w[0] <= w[1])
            && checkpoints.iter().all(|&f| (0.0..=1.0).contains(&f));
        if !sorted {
            return Err(ScheduleError::BadCheckpoints);
        }
        Ok(Schedule {
            total_time,
            steps,
            checkpoints,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// One trace row: time, dominant-basis probability, its decoded tuple, and
/// the state norm at that time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub p_max: f64,
    pub argmax: LatticePoint,
    pub norm: f64,
}

/// Decision outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SolutionExists,
    NoSolution,
    Inconclusive,
}

/// Truncation box of a run: roots with any coordinate at or above `d` are
/// invisible to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub k: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub total_time: f64,
    pub p_max: f64,
}

/// Full record of one decision run.
///
/// `SolutionExists` always carries a witness that has been re-validated by
/// exact evaluation of the polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub witness: Option<LatticePoint>,
    pub p_max_trace: Vec<TracePoint>,
    pub final_t: f64,
    #[serde(rename = "box")]
    pub search_box: BoxSpec,
    pub degeneracy_flag: bool,
    pub norm_drift: f64,
    pub algebra: AlgebraKind,
    pub params: Vec<[f64; 2]>,
    pub attempts: Vec<Attempt>,
}

/// Inputs of one decision run, with the schedule policy of the halting loop.
#[derive(Debug, Clone, PartialEq)]
pub struct DecideConfig {
    /// Per-mode truncation dimension.
    pub dim: usize,
    /// Coherent parameters, one per variable (`z_i` or `alpha_i`).
    pub params: Vec<Complex64>,
    pub t_initial: f64,
    pub t_growth: f64,
    pub t_cap: f64,
    pub steps_per_unit_time: f64,
}

impl DecideConfig {
    pub fn new(dim: usize, params: Vec<Complex64>) -> Self {
        DecideConfig {
            dim,
            params,
            t_initial: 10.0,
            t_growth: 2.0,
            t_cap: 1e4,
            steps_per_unit_time: 20.0,
        }
    }
}

/// Scratch buffers for the Taylor-series exponential.
struct Propagator<'a> {
    h_i: &'a InitialHamiltonian,
    h_d: &'a ProblemHamiltonian,
    term: Vec<Complex64>,
    h_term: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    fn new(h_i: &'a InitialHamiltonian, h_d: &'a ProblemHamiltonian) -> Self {
        let n = h_i.codec().total_dim();
        Propagator {
            h_i,
            h_d,
            term: vec![Complex64::ZERO; n],
            h_term: vec![Complex64::ZERO; n],
        }
    }

    /// `psi <- exp(-i tau H(s)) psi` by truncated Taylor series.
    fn substep(&mut self, s: f64, tau: f64, psi: &mut [Complex64]) -> Result<(), EvolveError> {
        let minus_i_tau = Complex64::new(0.0, -tau);
        self.term.copy_from_slice(psi);
        let psi_norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for j in 1..=MAX_TAYLOR_TERMS {
            apply_into(self.h_i, self.h_d, s, &self.term, &mut self.h_term);
            let factor = minus_i_tau / j as f64;
            let mut term_norm_sq = 0.0;
            for (t, h) in self.term.iter_mut().zip(&self.h_term) {
                *t = factor * h;
                term_norm_sq += t.norm_sqr();
            }
            for (p, t) in psi.iter_mut().zip(&self.term) {
                *p += t;
            }
            if term_norm_sq.sqrt() <= SERIES_TOL * psi_norm {
                return Ok(());
            }
        }
        Err(EvolveError::SeriesDiverged)
    }
}

/// Integrate the Schrödinger equation over the schedule.
///
/// Returns the final state and the checkpoint trace (the `t = 0` row is
/// always present, so the trace starts with the initial `P_max`).
pub fn evolve(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    psi0: &StateVector,
    sched: &Schedule,
) -> Result<(StateVector, Vec<TracePoint>), EvolveError> {
    let initial_defect = (psi0.norm() - 1.0).abs();
    if initial_defect > 1e-6 {
        return Err(EvolveError::NotNormalized(initial_defect));
    }
    let mut psi = psi0.clone();
    let steps = sched.steps;
    let dt = sched.total_time / steps as f64;

    let mut trace = Vec::with_capacity(sched.checkpoints.len() + 1);
    trace.push(trace_point(0.0, &psi));

    let mut prop = Propagator::new(h_i, h_d);
    let mut cp = sched
        .checkpoints
        .iter()
        .skip_while(|&&f| f <= 0.0)
        .peekable();
    for step in 0..steps {
        let s_mid = (step as f64 + 0.5) / steps as f64;
        let bound = spectral_bound(h_i, h_d, s_mid);
        let substeps = ((dt * bound / MAX_SUBSTEP_PHASE).ceil() as usize).max(1);
        let tau = dt / substeps as f64;
        for _ in 0..substeps {
            prop.substep(s_mid, tau, psi.amps_mut())?;
        }
        let t = (step + 1) as f64 * dt;
        let drift = (psi.norm() - 1.0).abs();
        if drift > NORM_DRIFT_ABORT {
            return Err(EvolveError::NormDrift {
                step: step + 1,
                t,
                drift,
                dt,
            });
        }
        while let Some(&&f) = cp.peek() {
            if f * steps as f64 <= (step + 1) as f64 + 1e-9 {
                trace.push(trace_point(t, &psi));
                cp.next();
            } else {
                break;
            }
        }
    }
    Ok((psi, trace))
}

fn trace_point(t: f64, psi: &StateVector) -> TracePoint {
    let (p_max, argmax) = measure_pmax(psi);
    TracePoint {
        t,
        p_max,
        argmax,
        norm: psi.norm(),
    }
}

/// Largest basis-state probability and its decoded occupation tuple.
/// Ties break toward the smaller encoded index.
pub fn measure_pmax(psi: &StateVector) -> (f64, LatticePoint) {
    debug_assert!(
        (psi.norm() - 1.0).abs() < 1e-6,
        "measure_pmax expects a normalized state"
    );
    let mut best_idx = 0usize;
    let mut best_p = psi.amps()[0].norm_sqr();
    for (i, a) in psi.amps().iter().enumerate().skip(1) {
        let p = a.norm_sqr();
        if p > best_p {
            best_p = p;
            best_idx = i;
        }
    }
    (best_p, psi.codec().decode(best_idx))
}

/// Run the halting loop of the decision procedure.
///
/// Evolves from the coherent product state, measures `P_max(T)`, and doubles
/// `T` (fresh preparation each attempt) until `P_max > 1/2` or the cap is
/// hit. A winning tuple becomes a `SolutionExists` witness only if exact
/// evaluation confirms `D = 0` there; otherwise the verdict is `NoSolution`.
/// Hitting the cap yields `Inconclusive`: a finite truncated run cannot
/// realize the infinite-time limit, and says so.
pub fn decide(
    p: &Polynomial,
    algebra: AlgebraKind,
    cfg: &DecideConfig,
) -> Result<RunReport, DecideError> {
    validate_config(p, algebra, cfg)?;
    let search_box = BoxSpec {
        k: p.num_vars(),
        d: cfg.dim,
    };
    let params_pairs: Vec<[f64; 2]> = cfg.params.iter().map(|c| [c.re, c.im]).collect();

    // Exact short-circuits: the zero polynomial vanishes everywhere, and a
    // variable-free polynomial is a single exact evaluation.
    if p.is_zero() {
        return Ok(RunReport {
            verdict: Verdict::SolutionExists,
            witness: Some(vec![0; p.num_vars()]),
            p_max_trace: Vec::new(),
            final_t: 0.0,
            search_box,
            degeneracy_flag: true,
            norm_drift: 0.0,
            algebra,
            params: params_pairs,
            attempts: Vec::new(),
        });
    }
    if p.num_vars() == 0 {
        use num_traits::Zero;
        let value = p.eval(&[]).expect("no variables");
        let exists = value.is_zero();
        return Ok(RunReport {
            verdict: if exists {
                Verdict::SolutionExists
            } else {
                Verdict::NoSolution
            },
            witness: exists.then(Vec::new),
            p_max_trace: Vec::new(),
            final_t: 0.0,
            search_box,
            degeneracy_flag: false,
            norm_drift: 0.0,
            algebra,
            params: params_pairs,
            attempts: Vec::new(),
        });
    }

    let codec = MultiIndexCodec::new(p.num_vars(), cfg.dim)?;
    let h_d = ProblemHamiltonian::build(p, codec)?;
    let h_i = InitialHamiltonian::build(&cfg.params, algebra, codec)?;
    let psi0 = build_initial_state(&cfg.params, algebra, codec)?;
    let (_, ground_multiplicity) = h_d.ground_level();

    let mut attempts = Vec::new();
    let mut total_time = cfg.t_initial;
    loop {
        let sched = Schedule::new(total_time, step_count(cfg, total_time))
            .expect("validated schedule inputs");
        let (psi, trace) = evolve(&h_i, &h_d, &psi0, &sched)?;
        let (p_max, argmax) = measure_pmax(&psi);
        attempts.push(Attempt { total_time, p_max });
        let norm_drift = (psi.norm() - 1.0).abs();

        if p_max > 0.5 {
            use num_traits::Zero;
            let value = p.eval(&argmax).expect("argmax has k coordinates");
            let exists = value.is_zero();
            return Ok(RunReport {
                verdict: if exists {
                    Verdict::SolutionExists
                } else {
                    Verdict::NoSolution
                },
                witness: exists.then_some(argmax),
                p_max_trace: trace,
                final_t: total_time,
                search_box,
                degeneracy_flag: ground_multiplicity > 1,
                norm_drift,
                algebra,
                params: params_pairs,
                attempts,
            });
        }

        let next = total_time * cfg.t_growth;
        if next > cfg.t_cap {
            return Ok(RunReport {
                verdict: Verdict::Inconclusive,
                witness: None,
                p_max_trace: trace,
                final_t: total_time,
                search_box,
                degeneracy_flag: ground_multiplicity > 1,
                norm_drift,
                algebra,
                params: params_pairs,
                attempts,
            });
        }
        total_time = next;
    }
}

fn step_count(cfg: &DecideConfig, total_time: f64) -> usize {
    let raw = (cfg.steps_per_unit_time * total_time).ceil() as usize;
    // multiple of 16 keeps the trace checkpoints on step boundaries
    raw.div_ceil(16).max(1) * 16
}

fn validate_config(
    p: &Polynomial,
    algebra: AlgebraKind,
    cfg: &DecideConfig,
) -> Result<(), DecideError> {
    if cfg.dim < 2 {
        return Err(DecideError::BadConfig(format!(
            "per-mode dimension must be at least 2, got {}",
            cfg.dim
        )));
    }
    if cfg.params.len() != p.num_vars() {
        return Err(DecideError::BadConfig(format!(
            "{} coherent parameters for a {}-variable polynomial",
            cfg.params.len(),
            p.num_vars()
        )));
    }
    if !cfg.t_initial.is_finite() || cfg.t_initial <= 0.0 {
        return Err(DecideError::BadConfig("initial T must be positive".into()));
    }
    if !cfg.t_growth.is_finite() || cfg.t_growth <= 1.0 {
        return Err(DecideError::BadConfig(
            "T growth factor must exceed 1".into(),
        ));
    }
    if cfg.t_cap < cfg.t_initial {
        return Err(DecideError::BadConfig(
            "T cap must be at least the initial T".into(),
        ));
    }
    if !cfg.steps_per_unit_time.is_finite() || cfg.steps_per_unit_time <= 0.0 {
        return Err(DecideError::BadConfig(
            "steps per unit time must be positive".into(),
        ));
    }
    if algebra == AlgebraKind::SU11 {
        for (index, z) in cfg.params.iter().enumerate() {
            let modulus = z.norm();
            if modulus <= SU11_HALTING_MODULUS {
                return Err(DecideError::HaltingBoundViolated { index, modulus });
            }
        }
    }
    Ok(())
}

/// Lowest two eigenvalues of `H(s)` along a grid of interpolation fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapTrace {
    pub grid: Vec<f64>,
    pub e0: Vec<f64>,
    pub e1: Vec<f64>,
    pub min_gap: f64,
}

impl GapTrace {
    /// Grid indices where the two lowest eigenvalues are within
    /// [`DEGENERACY_TOL`] of each other.
    pub fn degenerate_points(&self) -> Vec<usize> {
        self.e0
            .iter()
            .zip(&self.e1)
            .enumerate()
            .filter(|(_, (lo, hi))| *hi - *lo < DEGENERACY_TOL)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Dense scan of the two lowest eigenvalues over the grid. At `s = 1` the
/// matrix is diagonal by construction, so the sorted problem diagonal is
/// used directly.
pub fn gap_scan(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    grid: &[f64],
) -> Result<GapTrace, HamiltonianError> {
    assert!(
        grid.iter().all(|s| (0.0..=1.0).contains(s)),
        "grid fractions must lie in [0, 1]"
    );
    let mut e0 = Vec::with_capacity(grid.len());
    let mut e1 = Vec::with_capacity(grid.len());
    for &s in grid {
        let (lo, hi) = lowest_two(h_i, h_d, s)?;
        e0.push(lo);
        e1.push(hi);
    }
    let min_gap = e0
        .iter()
        .zip(&e1)
        .map(|(a, b)| b - a)
        .fold(f64::INFINITY, f64::min);
    Ok(GapTrace {
        grid: grid.to_vec(),
        e0,
        e1,
        min_gap,
    })
}

fn lowest_two(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    s: f64,
) -> Result<(f64, f64), HamiltonianError> {
    if s == 1.0 {
        let mut diag = h_d.diag_f64().to_vec();
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Ok((diag[0], diag[1]));
    }
    let m = materialize_dense(h_i, h_d, s)?;
    let mut evs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((evs[0], evs[1]))
}

/// Lowest eigenpair of `H(s)`, for fidelity diagnostics.
pub fn ground_state(
    h_i: &InitialHamiltonian,
    h_d: &ProblemHamiltonian,
    s: f64,
) -> Result<(f64, StateVector), HamiltonianError> {
    let m = materialize_dense(h_i, h_d, s)?;
    let eig = m.symmetric_eigen();
    let (imin, emin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &e)| (i, e))
        .expect("nonempty spectrum");
    let amps: Vec<Complex64> = eig.eigenvectors.column(imin).iter().cloned().collect();
    Ok((emin, StateVector::new(*h_i.codec(), amps)?))
}
