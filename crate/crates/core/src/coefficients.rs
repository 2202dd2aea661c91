//! Interaction-picture master-equation coefficients.
//!
//! Two independent routes are provided: [`general_coefficients`] sums over
//! every pair of connection points for an arbitrary layout, and the
//! `closed_form_*` functions evaluate the trigonometric polynomials of the
//! three canonical two-atom layouts directly. The closed forms are defined at
//! `theta = 0`, where the geometric layout degenerates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{ConnectionPoint, Topology, WaveguideLayout};

/// Threshold below which a coefficient counts as zero, in units of γ.
pub const ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MasterEqCoefficients {
    /// Lamb shifts δω_j.
    pub lamb_shifts: DVector<f64>,
    /// Exchange couplings g_jk; symmetric with zero diagonal.
    pub exchange: DMatrix<f64>,
    /// Individual decay rates Γ_j.
    pub individual_decay: DVector<f64>,
    /// Collective decay rates Γ_coll,jk; symmetric with zero diagonal.
    pub collective_decay: DMatrix<f64>,
}

impl MasterEqCoefficients {
    pub fn zeros(n_atoms: usize) -> Self {
        MasterEqCoefficients {
            lamb_shifts: DVector::zeros(n_atoms),
            exchange: DMatrix::zeros(n_atoms, n_atoms),
            individual_decay: DVector::zeros(n_atoms),
            collective_decay: DMatrix::zeros(n_atoms, n_atoms),
        }
    }

    /// Assemble a two-atom set from the six scalar coefficients.
    pub fn two_atom(
        domega_a: f64,
        domega_b: f64,
        g_ab: f64,
        gamma_a: f64,
        gamma_b: f64,
        gamma_coll: f64,
    ) -> Self {
        let mut c = Self::zeros(2);
        c.lamb_shifts[0] = domega_a;
        c.lamb_shifts[1] = domega_b;
        c.exchange[(0, 1)] = g_ab;
        c.exchange[(1, 0)] = g_ab;
        c.individual_decay[0] = gamma_a;
        c.individual_decay[1] = gamma_b;
        c.collective_decay[(0, 1)] = gamma_coll;
        c.collective_decay[(1, 0)] = gamma_coll;
        c
    }

    pub fn n_atoms(&self) -> usize {
        self.lamb_shifts.len()
    }

    /// `[δω_a, δω_b, g_ab, Γ_a, Γ_b, Γ_coll]` of a two-atom set.
    pub fn as_two_atom_array(&self) -> Result<[f64; 6]> {
        if self.n_atoms() != 2 {
            return Err(Error::InvalidParameter(format!(
                "expected two atoms, got {}",
                self.n_atoms()
            )));
        }
        Ok([
            self.lamb_shifts[0],
            self.lamb_shifts[1],
            self.exchange[(0, 1)],
            self.individual_decay[0],
            self.individual_decay[1],
            self.collective_decay[(0, 1)],
        ])
    }

    /// Γ_j on the diagonal, Γ_coll,jk off it.
    pub fn decay_matrix(&self) -> DMatrix<f64> {
        let mut k = self.collective_decay.clone();
        for j in 0..self.n_atoms() {
            k[(j, j)] = self.individual_decay[j];
        }
        k
    }

    pub fn min_decay_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.decay_matrix())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_decay_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.decay_matrix())
            .eigenvalues
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Error unless the decay matrix is positive semidefinite within
    /// `ZERO_TOLERANCE` times its scale.
    pub fn ensure_physical(&self) -> Result<()> {
        let scale = self.decay_matrix().amax().max(1.0);
        let min = self.min_decay_eigenvalue();
        if min < -ZERO_TOLERANCE * scale {
            return Err(Error::UnphysicalDecay(min));
        }
        Ok(())
    }

    /// Largest decay magnitude, individual or collective.
    pub fn max_abs_decay(&self) -> f64 {
        self.individual_decay.amax().max(self.collective_decay.amax())
    }

    pub fn max_abs_exchange(&self) -> f64 {
        self.exchange.amax()
    }

    pub fn max_abs_lamb_shift(&self) -> f64 {
        self.lamb_shifts.amax()
    }

    /// Largest componentwise absolute difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n_atoms() != other.n_atoms() {
            return f64::INFINITY;
        }
        [
            (&self.lamb_shifts - &other.lamb_shifts).amax(),
            (&self.exchange - &other.exchange).amax(),
            (&self.individual_decay - &other.individual_decay).amax(),
            (&self.collective_decay - &other.collective_decay).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `sqrt(γ_p γ_q) * (f(|φ_p − φ_q|) + f(φ_p + φ_q))` for the direct and
/// mirror-reflected paths, returned for `f = sin` and `f = cos`.
fn pair_terms(p: &ConnectionPoint, q: &ConnectionPoint) -> (f64, f64) {
    let weight = (p.decay_rate * q.decay_rate).sqrt();
    let direct = (p.phase - q.phase).abs();
    let mirrored = p.phase + q.phase;
    (
        weight * (direct.sin() + mirrored.sin()),
        weight * (direct.cos() + mirrored.cos()),
    )
}

fn summed_terms(a: &[ConnectionPoint], b: &[ConnectionPoint]) -> (f64, f64) {
    a.iter()
        .flat_map(|p| b.iter().map(move |q| pair_terms(p, q)))
        .fold((0.0, 0.0), |(s, c), (ds, dc)| (s + ds, c + dc))
}

/// Coefficients of an arbitrary layout by summing over connection-point pairs.
///
/// Same-atom sums include the `n = m` terms, which supply the constant
/// `2γ` and the `cos(2φ)` mirror contribution of each point.
pub fn general_coefficients(layout: &WaveguideLayout) -> MasterEqCoefficients {
    let atoms = layout.atoms();
    let n = atoms.len();
    let mut c = MasterEqCoefficients::zeros(n);
    for j in 0..n {
        let pj = &atoms[j].connection_points;
        let (s, co) = summed_terms(pj, pj);
        c.lamb_shifts[j] = 0.5 * s;
        c.individual_decay[j] = co;
        for (k, other) in atoms.iter().enumerate().skip(j + 1) {
            let (s, co) = summed_terms(pj, &other.connection_points);
            c.exchange[(j, k)] = 0.5 * s;
            c.exchange[(k, j)] = 0.5 * s;
            c.collective_decay[(j, k)] = co;
            c.collective_decay[(k, j)] = co;
        }
    }
    c
}

/// Per-atom amplitudes `a_j = Σ_n sqrt(2 γ_jn) cos φ_jn` of the collapse
/// operator.
///
/// The decay matrix factorises as `Γ_j = a_j²`, `Γ_coll,jk = a_j a_k`, so
/// decays have double zeros while the amplitudes have simple ones.
pub fn decay_amplitudes(layout: &WaveguideLayout) -> DVector<f64> {
    DVector::from_iterator(
        layout.n_atoms(),
        layout.atoms().iter().map(|a| {
            a.connection_points
                .iter()
                .map(|p| (2.0 * p.decay_rate).sqrt() * p.phase.cos())
                .sum::<f64>()
        }),
    )
}

/// [`decay_amplitudes`] of a canonical layout, defined for every θ.
pub fn decay_amplitudes_canonical(kind: Topology, gamma: f64, theta: f64) -> [f64; 2] {
    let weight = (2.0 * gamma).sqrt();
    let mut amps = [0.0; 2];
    for (k, owner) in kind.assignment().into_iter().enumerate() {
        amps[owner] += weight * ((k as f64 + 0.5) * theta).cos();
    }
    amps
}

pub fn closed_form(kind: Topology, gamma: f64, theta: f64) -> MasterEqCoefficients {
    match kind {
        Topology::Braided => closed_form_braided(gamma, theta),
        Topology::Separate => closed_form_separate(gamma, theta),
        Topology::Nested => closed_form_nested(gamma, theta),
    }
}

pub fn closed_form_braided(gamma: f64, theta: f64) -> MasterEqCoefficients {
    let s = |m: f64| (m * theta).sin();
    let c = |m: f64| (m * theta).cos();
    let g = gamma;
    MasterEqCoefficients::two_atom(
        g * s(2.0) + g * s(3.0) + 0.5 * g * s(1.0) + 0.5 * g * s(5.0),
        g * s(2.0) + g * s(5.0) + 0.5 * g * s(3.0) + 0.5 * g * s(7.0),
        0.5 * g * (3.0 * s(1.0) + s(3.0) + s(2.0) + 2.0 * s(4.0) + s(6.0)),
        2.0 * g + 2.0 * g * c(2.0) + 2.0 * g * c(3.0) + g * c(1.0) + g * c(5.0),
        2.0 * g + 2.0 * g * c(2.0) + 2.0 * g * c(5.0) + g * c(3.0) + g * c(7.0),
        g * (3.0 * c(1.0) + c(3.0) + c(2.0) + 2.0 * c(4.0) + c(6.0)),
    )
}

pub fn closed_form_separate(gamma: f64, theta: f64) -> MasterEqCoefficients {
    let s = |m: f64| (m * theta).sin();
    let c = |m: f64| (m * theta).cos();
    let g = gamma;
    MasterEqCoefficients::two_atom(
        g * s(1.0) + g * s(2.0) + 0.5 * g * s(1.0) + 0.5 * g * s(3.0),
        g * s(1.0) + g * s(6.0) + 0.5 * g * s(5.0) + 0.5 * g * s(7.0),
        0.5 * g * (s(1.0) + 2.0 * s(2.0) + 2.0 * s(3.0) + 2.0 * s(4.0) + s(5.0)),
        2.0 * g + 2.0 * g * c(1.0) + g * c(1.0) + g * c(3.0) + 2.0 * g * c(2.0),
        2.0 * g + 2.0 * g * c(1.0) + g * c(5.0) + g * c(7.0) + 2.0 * g * c(6.0),
        g * (c(1.0) + 2.0 * c(2.0) + 2.0 * c(3.0) + 2.0 * c(4.0) + c(5.0)),
    )
}

pub fn closed_form_nested(gamma: f64, theta: f64) -> MasterEqCoefficients {
    let s = |m: f64| (m * theta).sin();
    let c = |m: f64| (m * theta).cos();
    let g = gamma;
    MasterEqCoefficients::two_atom(
        g * s(3.0) + g * s(4.0) + 0.5 * g * s(1.0) + 0.5 * g * s(7.0),
        g * s(1.0) + g * s(4.0) + 0.5 * g * s(3.0) + 0.5 * g * s(5.0),
        0.5 * g * (2.0 * s(1.0) + 3.0 * s(2.0) + s(3.0) + s(5.0) + s(6.0)),
        2.0 * g + 2.0 * g * c(3.0) + 2.0 * g * c(4.0) + g * c(1.0) + g * c(7.0),
        2.0 * g + 2.0 * g * c(1.0) + 2.0 * g * c(4.0) + g * c(3.0) + g * c(5.0),
        g * (2.0 * c(1.0) + 3.0 * c(2.0) + c(3.0) + c(5.0) + c(6.0)),
    )
}
