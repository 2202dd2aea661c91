//! Time evolution and concurrence.
//!
//! Two routes are provided. [`evolve_lindblad`] integrates the full master
//! equation on the density matrix with fixed-step RK4. [`evolve_amplitudes`]
//! solves the single-excitation Schrödinger equation with the non-Hermitian
//! effective Hamiltonian exactly. Starting from one excitation and no `|ee⟩`
//! population both give the same concurrence, since quantum jumps only feed
//! `|gg⟩`.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2};

use crate::coefficients::MasterEqCoefficients;
use crate::error::{Error, Result};
use crate::slh::{max_abs, AtomicOperator};
use crate::{C64, MAX_DENSE_ATOMS, MAX_SINGLE_EXCITATION_ATOMS};

pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_FLOOR: f64 = -1e-8;
/// Positivity is sampled every this many RK4 steps.
pub const POSITIVITY_CHECK_INTERVAL: usize = 100;

/// Below this `|s|`, with `±s` the half-splitting of the two eigenvalues of
/// `−i H t`, the exceptional-point branch is used.
const DEGENERATE_SPLITTING: f64 = 1e-6;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

const I: C64 = C64::new(0.0, 1.0);

/// Mixed state over `2^M` levels, basis `|ee⟩, |eg⟩, |ge⟩, |gg⟩` for `M = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wrap a matrix after checking trace, Hermiticity and positivity.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::unchecked(matrix)?;
        rho.validate(true)?;
        Ok(rho)
    }

    fn unchecked(matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || !d.is_power_of_two() || d < 2 {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let n = d.trailing_zeros() as usize;
        if n > MAX_DENSE_ATOMS {
            return Err(Error::TooManyAtoms {
                atoms: n,
                max: MAX_DENSE_ATOMS,
            });
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn pure(state: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(state);
        Self::new(&v * v.adjoint())
    }

    /// Computational basis state `|index⟩⟨index|` of `n_atoms` atoms.
    pub fn basis_state(index: usize, n_atoms: usize) -> Result<Self> {
        let d = 1usize << n_atoms;
        if index >= d {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range")));
        }
        let mut m = DMatrix::zeros(d, d);
        m[(index, index)] = c(1.0);
        Self::new(m)
    }

    /// Two atoms with `c_eg |eg⟩ + c_ge |ge⟩`.
    pub fn from_amplitudes(state: &AmplitudeState) -> Self {
        let mut m = DMatrix::zeros(4, 4);
        m[(1, 1)] = state.c_eg * state.c_eg.conj();
        m[(1, 2)] = state.c_eg * state.c_ge.conj();
        m[(2, 1)] = state.c_ge * state.c_eg.conj();
        m[(2, 2)] = state.c_ge * state.c_ge.conj();
        // Norm below one is the population lost to |gg⟩.
        m[(3, 3)] = c((1.0 - state.norm_sqr()).max(0.0));
        DensityMatrix { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_atoms(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * c(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Diagonal entries; for two atoms `[p_ee, p_eg, p_ge, p_gg]`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    fn validate(&self, check_positivity: bool) -> Result<()> {
        let tr = self.trace();
        if (tr - c(1.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::NumericalFailure(format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_residual();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::NumericalFailure(format!("Hermiticity residual {herm:e}")));
        }
        if check_positivity {
            let min = self.min_eigenvalue();
            if min < POSITIVITY_FLOOR {
                return Err(Error::NumericalFailure(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(())
    }
}

/// Single-excitation amplitudes of two atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub c_eg: C64,
    pub c_ge: C64,
}

impl AmplitudeState {
    pub fn new(c_eg: C64, c_ge: C64) -> Self {
        AmplitudeState { c_eg, c_ge }
    }

    /// Atom a excited, atom b in the ground state.
    pub fn excited_a() -> Self {
        AmplitudeState::new(c(1.0), c(0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_eg.norm_sqr() + self.c_ge.norm_sqr()
    }

    fn as_vector(&self) -> Vector2<C64> {
        Vector2::new(self.c_eg, self.c_ge)
    }
}

/// Time series of states with their concurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub concurrence: Vec<f64>,
}

impl<S> TrajectoryRecord<S> {
    fn with_capacity(n: usize) -> Self {
        TrajectoryRecord {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            concurrence: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, state: S, concurrence: f64) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.states.push(state);
        self.concurrence.push(concurrence);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// The Lindblad generator for a fixed set of coefficients.
///
/// Written as `dρ/dt = −i(H_nh ρ − ρ H_nh†) + Σ_jk K_jk σ₋^j ρ σ₊^k` with
/// `K` the decay matrix and `H_nh = H − (i/2) Σ_jk K_jk σ₊^k σ₋^j`.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    non_hermitian: DMatrix<C64>,
    non_hermitian_adj: DMatrix<C64>,
    jumps: Vec<(f64, DMatrix<C64>, DMatrix<C64>)>,
}

impl LindbladGenerator {
    pub fn new(coeffs: &MasterEqCoefficients) -> Result<Self> {
        coeffs.ensure_physical()?;
        let n = coeffs.n_atoms();
        if n > MAX_DENSE_ATOMS {
            return Err(Error::TooManyAtoms {
                atoms: n,
                max: MAX_DENSE_ATOMS,
            });
        }
        let lower: Vec<AtomicOperator> = (0..n).map(|j| AtomicOperator::lowering(j, n)).collect();
        let raise: Vec<AtomicOperator> = lower.iter().map(AtomicOperator::dagger).collect();
        let decay = coeffs.decay_matrix();

        let d = 1usize << n;
        let mut h = DMatrix::<C64>::zeros(d, d);
        let mut jumps = Vec::new();
        for j in 0..n {
            h += AtomicOperator::excitation(j, n).matrix() * c(coeffs.lamb_shifts[j]);
            for k in 0..n {
                let hop = (&raise[k] * &lower[j]).into_matrix();
                if k != j {
                    // Each unordered pair appears twice, giving g(σ₊^kσ₋^j + H.c.).
                    h += &hop * c(coeffs.exchange[(j, k)]);
                }
                let rate = decay[(j, k)];
                if rate != 0.0 {
                    h -= &hop * (I * 0.5 * rate);
                    jumps.push((rate, lower[j].matrix().clone(), raise[k].matrix().clone()));
                }
            }
        }
        Ok(LindbladGenerator {
            non_hermitian_adj: h.adjoint(),
            non_hermitian: h,
            jumps,
        })
    }

    pub fn dim(&self) -> usize {
        self.non_hermitian.nrows()
    }

    /// `dρ/dt` for the given state matrix.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = (&self.non_hermitian * rho - rho * &self.non_hermitian_adj) * (-I);
        for (rate, lower, raise) in &self.jumps {
            out += (lower * rho * raise) * c(*rate);
        }
        out
    }
}

/// Right-hand side of the master equation.
pub fn lindblad_rhs(rho: &DensityMatrix, coeffs: &MasterEqCoefficients) -> Result<DMatrix<C64>> {
    let generator = LindbladGenerator::new(coeffs)?;
    if generator.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: generator.dim(),
        });
    }
    Ok(generator.apply(rho.matrix()))
}

/// Default step: `1e-3` over the fastest rate in the generator (at least 1).
pub fn recommended_dt(coeffs: &MasterEqCoefficients) -> f64 {
    let fastest = coeffs
        .max_decay_eigenvalue()
        .max(coeffs.max_abs_exchange())
        .max(coeffs.max_abs_lamb_shift())
        .max(1.0);
    1e-3 / fastest
}

fn rk4_step(generator: &LindbladGenerator, rho: &DMatrix<C64>, h: f64) -> DMatrix<C64> {
    let k1 = generator.apply(rho);
    let k2 = generator.apply(&(rho + &k1 * c(0.5 * h)));
    let k3 = generator.apply(&(rho + &k2 * c(0.5 * h)));
    let k4 = generator.apply(&(rho + &k3 * c(h)));
    rho + (k1 + (k2 + k3) * c(2.0) + k4) * c(h / 6.0)
}

/// Concurrence of a state, when it is a two-qubit state.
fn concurrence_if_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_atoms() == 2 {
        wootters_concurrence(rho)
    } else {
        Ok(f64::NAN)
    }
}

/// Integrate with fixed-step RK4 from 0 to `t_max`, recording every step.
///
/// The step is shrunk to divide `t_max` evenly. Trace and Hermiticity are
/// checked every step, positivity every [`POSITIVITY_CHECK_INTERVAL`] steps;
/// a violation aborts with [`Error::NumericalFailure`].
pub fn evolve_lindblad(
    rho0: &DensityMatrix,
    coeffs: &MasterEqCoefficients,
    t_max: f64,
    dt: f64,
) -> Result<TrajectoryRecord<DensityMatrix>> {
    let n_steps = step_count(t_max, dt)?;
    let times: Vec<f64> = (0..=n_steps).map(|i| t_max * i as f64 / n_steps.max(1) as f64).collect();
    evolve_lindblad_at(rho0, coeffs, &times, dt)
}

fn step_count(span: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(span.is_finite() && span >= 0.0) {
        return Err(Error::InvalidParameter(format!("time span must be nonnegative, got {span}")));
    }
    Ok((span / dt - 1e-9).ceil().max(0.0) as usize)
}

/// Integrate and record the state at each of `times` (strictly increasing,
/// starting at 0), using steps no longer than `dt` between outputs.
pub fn evolve_lindblad_at(
    rho0: &DensityMatrix,
    coeffs: &MasterEqCoefficients,
    times: &[f64],
    dt: f64,
) -> Result<TrajectoryRecord<DensityMatrix>> {
    let generator = LindbladGenerator::new(coeffs)?;
    if generator.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: generator.dim(),
        });
    }
    validate_times(times)?;
    rho0.validate(true)?;

    let mut record = TrajectoryRecord::with_capacity(times.len());
    let mut rho = rho0.matrix.clone();
    let mut now = 0.0;
    let mut steps_taken = 0usize;
    for &target in times {
        let n = step_count(target - now, dt)?;
        let h = if n > 0 { (target - now) / n as f64 } else { 0.0 };
        for _ in 0..n {
            rho = rk4_step(&generator, &rho, h);
            steps_taken += 1;
            let state = DensityMatrix { matrix: rho };
            state.validate(steps_taken.is_multiple_of(POSITIVITY_CHECK_INTERVAL))?;
            rho = state.matrix;
        }
        now = target;
        let state = DensityMatrix::unchecked(rho.clone())?;
        state.validate(true)?;
        let conc = concurrence_if_two_qubit(&state)?;
        record.push(target, state, conc);
    }
    Ok(record)
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("no output times".into()));
    }
    if times[0] < 0.0 || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidParameter("output times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("output times must be strictly increasing".into()));
    }
    Ok(())
}

/// Effective Hamiltonian on the single-excitation block `{|eg⟩, |ge⟩}`.
pub fn effective_hamiltonian(coeffs: &MasterEqCoefficients) -> Result<Matrix2<C64>> {
    let [da, db, g, ga, gb, gc] = coeffs.as_two_atom_array()?;
    let off = C64::new(g, -0.5 * gc);
    Ok(Matrix2::new(
        C64::new(da, -0.5 * ga),
        off,
        off,
        C64::new(db, -0.5 * gb),
    ))
}

/// Effective Hamiltonian on the single-excitation sector of `M` atoms,
/// row/column `j` being the state with only atom `j` excited.
pub fn effective_hamiltonian_general(coeffs: &MasterEqCoefficients) -> Result<DMatrix<C64>> {
    let n = coeffs.n_atoms();
    if n > MAX_SINGLE_EXCITATION_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: n,
            max: MAX_SINGLE_EXCITATION_ATOMS,
        });
    }
    Ok(DMatrix::from_fn(n, n, |r, col| {
        if r == col {
            C64::new(coeffs.lamb_shifts[r], -0.5 * coeffs.individual_decay[r])
        } else {
            C64::new(coeffs.exchange[(r, col)], -0.5 * coeffs.collective_decay[(r, col)])
        }
    }))
}

/// `exp(−i H t)` for a 2×2 matrix.
///
/// With `M = −iHt = m·1 + N`, `N` traceless, the eigenvalues are `m ± s`
/// where `s² = −det N`, and `exp(M) = e^m (cosh s · 1 + sinh(s)/s · N)`.
/// When `s` is tiny the matrix is at (or near) an exceptional point and
/// `N` is nilpotent to working precision, so the series branch
/// `e^m (1 + N)` with second-order corrections is used instead.
pub fn propagator(h: &Matrix2<C64>, t: f64) -> Matrix2<C64> {
    let m_full = h * (-I * t);
    let m = (m_full[(0, 0)] + m_full[(1, 1)]) * 0.5;
    let nil = m_full - Matrix2::identity() * m;
    let s2 = nil[(0, 0)] * nil[(0, 0)] + nil[(0, 1)] * nil[(1, 0)];
    let s = s2.sqrt();
    if s.norm() < DEGENERATE_SPLITTING {
        let (cosh, sinhc) = (c(1.0) + s2 * 0.5, c(1.0) + s2 / 6.0);
        return (Matrix2::identity() * cosh + nil * sinhc) * m.exp();
    }
    // e^m cosh s and e^m sinh s written with e^{m±s} so that large
    // decay exponents do not produce 0 · ∞.
    let up = (m + s).exp();
    let down = (m - s).exp();
    Matrix2::identity() * ((up + down) * 0.5) + nil * ((up - down) / (s * 2.0))
}

/// Exact single-excitation evolution to time `t`.
pub fn evolve_amplitudes(initial: &AmplitudeState, coeffs: &MasterEqCoefficients, t: f64) -> Result<AmplitudeState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let h = effective_hamiltonian(coeffs)?;
    let v = propagator(&h, t) * initial.as_vector();
    Ok(AmplitudeState::new(v[0], v[1]))
}

/// Amplitudes and concurrence at each of `times`.
pub fn amplitude_trajectory(
    initial: &AmplitudeState,
    coeffs: &MasterEqCoefficients,
    times: &[f64],
) -> Result<TrajectoryRecord<AmplitudeState>> {
    validate_times(times)?;
    let h = effective_hamiltonian(coeffs)?;
    let mut record = TrajectoryRecord::with_capacity(times.len());
    for &t in times {
        let v = propagator(&h, t) * initial.as_vector();
        let state = AmplitudeState::new(v[0], v[1]);
        record.push(t, state, concurrence_from_amplitudes(&state));
    }
    Ok(record)
}

/// `C = 2 |c_eg c_ge*|`.
pub fn concurrence_from_amplitudes(state: &AmplitudeState) -> f64 {
    2.0 * (state.c_eg * state.c_ge.conj()).norm()
}

/// `σ_y ⊗ σ_y` in the `|ee⟩, |eg⟩, |ge⟩, |gg⟩` basis.
pub(crate) fn sigma_y_sigma_y() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 3)] = c(-1.0);
    m[(3, 0)] = c(-1.0);
    m[(1, 2)] = c(1.0);
    m[(2, 1)] = c(1.0);
    m
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The square roots of the eigenvalues of `ρ ρ̃`, `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`,
/// are obtained as the square roots of the eigenvalues of the Hermitian
/// positive matrix `√ρ ρ̃ √ρ`, which has the same spectrum.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::NotTwoQubit(rho.dim()));
    }
    let yy = sigma_y_sigma_y();
    let herm = (&rho.matrix + rho.matrix.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(herm);
    let sqrt_vals = eig.eigenvalues.map(|x| c(x.max(0.0).sqrt()));
    let sqrt_rho = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let tilde = &yy * rho.matrix.conjugate() * &yy;
    let inner = &sqrt_rho * tilde * &sqrt_rho;
    let inner = (&inner + inner.adjoint()) * c(0.5);
    let mut lambdas: Vec<f64> = SymmetricEigen::new(inner)
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}
