use nalgebra::{Complex, Matrix2, Matrix4};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ModelError, SensorEnsembleParams};
use crate::noise::stretched_exp;

type C64 = Complex<f64>;

/// Basis order of the density matrix: index = 2·electron + nuclear, with 0 = ↓ and 1 = ↑.
pub const BASIS_LABELS: [&str; 4] = ["down_e,down_n", "down_e,up_n", "up_e,down_n", "up_e,up_n"];

/// Tolerance used when accepting a state as input to an operation.
const ACCEPT_TOL: f64 = 1e-9;

/// Nuclear spin manifold selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuclearSpin {
    Down,
    Up,
}

/// Nuclear relaxation under illumination: polarization decays as exp(-(t/t1)^beta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuclearRelaxation {
    pub t1: f64,
    pub beta: f64,
}

impl NuclearRelaxation {
    pub fn exponential(t1: f64) -> Self {
        Self { t1, beta: 1.0 }
    }
}

/// Result of one simulated fluorescence readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readout {
    pub mean: f64,
    pub sigma: f64,
    pub sample: f64,
}

/// 4×4 density matrix of the electron ⊗ nuclear two-qubit sensor.
///
/// Operations consume `&self` and return a new state; nothing is mutated in place.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: Matrix4<C64>,
}

fn idx(electron: usize, nuclear: usize) -> usize {
    2 * electron + nuclear
}

impl QuantumState {
    /// Electron polarized into ↓e, nucleus maximally mixed.
    pub fn initial() -> Self {
        Self::from_populations([0.5, 0.5, 0.0, 0.0])
    }

    /// Diagonal state with the given populations in basis order.
    ///
    /// Panics if the populations are negative or do not sum to one.
    pub fn from_populations(p: [f64; 4]) -> Self {
        assert!(p.iter().all(|&x| x >= 0.0), "negative population in {p:?}");
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < ACCEPT_TOL, "populations sum to {total}");
        let mut rho = Matrix4::zeros();
        for (i, &x) in p.iter().enumerate() {
            rho[(i, i)] = C64::new(x, 0.0);
        }
        Self { rho }
    }

    /// Validated construction from an arbitrary matrix.
    pub fn from_matrix(rho: Matrix4<C64>) -> Result<Self, ModelError> {
        let state = Self { rho };
        state.check_hermitian_and_trace(ACCEPT_TOL)?;
        let min = state.min_eigenvalue();
        if min < -1e-10 {
            return Err(ModelError::InvalidState(format!(
                "matrix is not positive semidefinite (smallest eigenvalue {min:e})"
            )));
        }
        Ok(state)
    }

    /// Wraps a matrix without validation. Operations still reject it if it is
    /// not Hermitian with unit trace.
    pub fn from_matrix_unchecked(rho: Matrix4<C64>) -> Self {
        Self { rho }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.rho[(i, i)].re)
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// Largest |rho - rho†| entry.
    pub fn hermiticity_error(&self) -> f64 {
        let diff = self.rho - self.rho.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // Eigenvalues of the Hermitian part; callers check Hermiticity separately.
        let herm = (self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    pub fn electron_down_population(&self) -> f64 {
        let p = self.populations();
        p[0] + p[1]
    }

    pub fn electron_up_population(&self) -> f64 {
        let p = self.populations();
        p[2] + p[3]
    }

    /// p(↓e) − p(↑e).
    pub fn electron_polarization(&self) -> f64 {
        self.electron_down_population() - self.electron_up_population()
    }

    /// p(↓n) − p(↑n).
    pub fn nuclear_polarization(&self) -> f64 {
        let p = self.populations();
        (p[0] + p[2]) - (p[1] + p[3])
    }

    fn check_hermitian_and_trace(&self, tol: f64) -> Result<(), ModelError> {
        let herm = self.hermiticity_error();
        if !(herm < tol) {
            return Err(ModelError::InvalidState(format!(
                "matrix is not Hermitian (max deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if !((tr.re - 1.0).abs() < tol && tr.im.abs() < tol) {
            return Err(ModelError::InvalidState(format!(
                "trace is {tr}, expected 1"
            )));
        }
        Ok(())
    }

    fn checked(&self) -> Result<(), ModelError> {
        self.check_hermitian_and_trace(ACCEPT_TOL)
    }

    /// f·PρPᵀ + (1−f)·ρ for the transposition P exchanging basis states `a` and `b`.
    fn mix_transposition(&self, a: usize, b: usize, fidelity: f64) -> Result<Self, ModelError> {
        self.checked()?;
        check_probability("fidelity", fidelity)?;
        let perm = |i: usize| {
            if i == a {
                b
            } else if i == b {
                a
            } else {
                i
            }
        };
        let f = C64::new(fidelity, 0.0);
        let g = C64::new(1.0 - fidelity, 0.0);
        let rho = Matrix4::from_fn(|i, j| f * self.rho[(perm(i), perm(j))] + g * self.rho[(i, j)]);
        Ok(Self { rho })
    }

    /// Selective MW π pulse flipping the electron when the nucleus is ↑n
    /// (|↓e↑n⟩ ↔ |↑e↑n⟩), applied with probability `fidelity`.
    pub fn apply_cnot_e_given_n(&self, fidelity: f64) -> Result<Self, ModelError> {
        self.apply_conditional_electron_flip(NuclearSpin::Up, fidelity)
    }

    /// RF π pulse flipping the nucleus when the electron is ↑e
    /// (|↑e↑n⟩ ↔ |↑e↓n⟩), applied with probability `fidelity`.
    pub fn apply_cnot_n_given_e(&self, fidelity: f64) -> Result<Self, ModelError> {
        self.mix_transposition(idx(1, 0), idx(1, 1), fidelity)
    }

    /// Selective MW π pulse on the electron transition of one nuclear manifold.
    pub fn apply_conditional_electron_flip(
        &self,
        nuclear: NuclearSpin,
        fidelity: f64,
    ) -> Result<Self, ModelError> {
        let n = match nuclear {
            NuclearSpin::Down => 0,
            NuclearSpin::Up => 1,
        };
        self.mix_transposition(idx(0, n), idx(1, n), fidelity)
    }

    /// CNOT_e|n followed by CNOT_n|e, each with fidelity √F so that the
    /// end-to-end population transfer equals `params.swap_fidelity`.
    pub fn apply_swap(&self, params: &SensorEnsembleParams) -> Result<Self, ModelError> {
        check_probability("swap_fidelity", params.swap_fidelity)?;
        let f = params.per_gate_fidelity();
        self.apply_cnot_e_given_n(f)?.apply_cnot_n_given_e(f)
    }

    /// Optical repolarization/readout pulse.
    ///
    /// ↑e population relaxes into ↓e (nuclear state preserved) with a remaining
    /// fraction (1 − r)^(duration/t_op); every coherence involving the electron is
    /// destroyed; the nuclear state depolarizes by the stretched-exponential factor.
    pub fn apply_optical_pulse(
        &self,
        duration: f64,
        params: &SensorEnsembleParams,
        relaxation: &NuclearRelaxation,
    ) -> Result<Self, ModelError> {
        self.checked()?;
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(ModelError::Domain(format!(
                "optical pulse duration must be non-negative, got {duration}"
            )));
        }
        check_probability("repolarization_fraction", params.repolarization_fraction)?;
        if !(params.t_op > 0.0) {
            return Err(ModelError::Configuration("t_op must be positive".into()));
        }
        if duration == 0.0 {
            return Ok(self.clone());
        }
        let survival = nuclear_survival(duration, relaxation)?;
        let keep = (1.0 - params.repolarization_fraction).powf(duration / params.t_op);

        let down = self.nuclear_block(0);
        let up = self.nuclear_block(1);
        let down = down + up * C64::new(1.0 - keep, 0.0);
        let up = up * C64::new(keep, 0.0);
        let down = depolarize(&down, survival);
        let up = depolarize(&up, survival);
        Ok(Self::from_blocks(&down, &up))
    }

    /// Closes a sensing block: the electron population difference p(↓e) − p(↑e)
    /// becomes cos(φ)·decoherence_factor; the nuclear state is untouched.
    pub fn apply_sensing_phase(&self, phi: f64, decoherence_factor: f64) -> Result<Self, ModelError> {
        self.checked()?;
        check_factor(decoherence_factor)?;
        Ok(self.with_electron_polarization(phi.cos() * decoherence_factor))
    }

    /// Closes a correlation-spectroscopy pair of sensing blocks with phases φ₁ and φ₂:
    /// p(↓e) − p(↑e) becomes sin(φ₁)·sin(φ₂)·decoherence_factor.
    pub fn apply_correlation_phases(
        &self,
        phi1: f64,
        phi2: f64,
        decoherence_factor: f64,
    ) -> Result<Self, ModelError> {
        self.checked()?;
        check_factor(decoherence_factor)?;
        Ok(self.with_electron_polarization(phi1.sin() * phi2.sin() * decoherence_factor))
    }

    /// Replaces the electron by a diagonal state with polarization `d`, keeping
    /// the reduced nuclear state.
    fn with_electron_polarization(&self, d: f64) -> Self {
        let nuclear = self.nuclear_block(0) + self.nuclear_block(1);
        let p_down = C64::new(0.5 * (1.0 + d), 0.0);
        let p_up = C64::new(0.5 * (1.0 - d), 0.0);
        Self::from_blocks(&(nuclear * p_down), &(nuclear * p_up))
    }

    /// Mean fluorescence contrast c₀·(p(↓e) − p(↑e)).
    pub fn mean_contrast(&self, params: &SensorEnsembleParams) -> f64 {
        params.contrast_c0 * self.electron_polarization()
    }

    /// Samples one shot-noise-limited fluorescence contrast. Does not change the state.
    pub fn readout_fluorescence<R: Rng + ?Sized>(
        &self,
        params: &SensorEnsembleParams,
        rng: &mut R,
    ) -> Result<f64, ModelError> {
        Ok(self.readout(params, rng)?.sample)
    }

    pub fn readout<R: Rng + ?Sized>(
        &self,
        params: &SensorEnsembleParams,
        rng: &mut R,
    ) -> Result<Readout, ModelError> {
        self.checked()?;
        if !(params.photons_per_readout > 0.0) {
            return Err(ModelError::Configuration(format!(
                "photons_per_readout must be positive, got {}",
                params.photons_per_readout
            )));
        }
        let mean = self.mean_contrast(params);
        let sigma = params.readout_sigma();
        let sample = if sigma == 0.0 {
            mean
        } else {
            Normal::new(mean, sigma)
                .map_err(|e| ModelError::Configuration(e.to_string()))?
                .sample(rng)
        };
        Ok(Readout { mean, sigma, sample })
    }

    fn nuclear_block(&self, electron: usize) -> Matrix2<C64> {
        let o = 2 * electron;
        Matrix2::from_fn(|i, j| self.rho[(o + i, o + j)])
    }

    fn from_blocks(down: &Matrix2<C64>, up: &Matrix2<C64>) -> Self {
        let mut rho = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                rho[(i, j)] = down[(i, j)];
                rho[(2 + i, 2 + j)] = up[(i, j)];
            }
        }
        // Re-symmetrize so rounding never leaves an anti-Hermitian residue.
        let rho = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
        Self { rho }
    }
}

impl Default for QuantumState {
    fn default() -> Self {
        Self::initial()
    }
}

/// λ·B + (1 − λ)·tr(B)·I/2.
fn depolarize(block: &Matrix2<C64>, survival: f64) -> Matrix2<C64> {
    let half_trace = block.trace() * C64::new(0.5, 0.0);
    block * C64::new(survival, 0.0)
        + Matrix2::identity() * (half_trace * C64::new(1.0 - survival, 0.0))
}

fn nuclear_survival(duration: f64, relaxation: &NuclearRelaxation) -> Result<f64, ModelError> {
    if !(relaxation.t1 > 0.0) {
        return Err(ModelError::Domain(format!(
            "nuclear t1 must be positive, got {}",
            relaxation.t1
        )));
    }
    stretched_exp(duration, relaxation.t1, relaxation.beta)
        .map_err(|e| ModelError::Domain(e.to_string()))
}

fn check_probability(name: &str, p: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ModelError::Domain(format!("{name} must lie in [0, 1], got {p}")))
    }
}

fn check_factor(f: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(ModelError::Domain(format!(
            "decoherence factor must lie in [0, 1], got {f}"
        )))
    }
}
