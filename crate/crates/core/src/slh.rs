//! SLH network composition for a single-port cascade.
//!
//! A mirror-terminated waveguide is one input field that passes every
//! connection point twice: first moving towards the mirror, then away from it
//! after reflection. Each pass through a connection point is an SLH component
//! `(1, sqrt(γ/2) σ₋, H)`, free propagation is a pure phase `(e^{iφ}, 0, 0)`,
//! and the whole network is their series product. Expanding the dissipator of
//! the resulting collapse operator gives the master-equation coefficients
//! without going through the pair sums in [`crate::coefficients`].

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::coefficients::MasterEqCoefficients;
use crate::error::{Error, Result};
use crate::model::WaveguideLayout;
use crate::{C64, MAX_DENSE_ATOMS};

/// Tolerance on Hermiticity of composed Hamiltonians and on the residue left
/// after projecting onto the master-equation operator basis.
pub const EXTRACTION_TOLERANCE: f64 = 1e-10;

/// Dense operator on the tensor product of `n_atoms` two-level systems.
///
/// Slot 0 is the most significant factor and each factor uses the ordered
/// basis `{|e⟩, |g⟩}`, so for two atoms the basis is `|ee⟩, |eg⟩, |ge⟩, |gg⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicOperator {
    matrix: DMatrix<C64>,
}

impl AtomicOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        Ok(AtomicOperator { matrix })
    }

    pub fn zero(n_atoms: usize) -> Self {
        let d = 1 << n_atoms;
        AtomicOperator {
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(n_atoms: usize) -> Self {
        let d = 1 << n_atoms;
        AtomicOperator {
            matrix: DMatrix::identity(d, d),
        }
    }

    /// σ₋ on `slot`: `|e⟩ → |g⟩`.
    pub fn lowering(slot: usize, n_atoms: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Self::embed(&[[z, z], [one, z]], slot, n_atoms)
    }

    pub fn raising(slot: usize, n_atoms: usize) -> Self {
        Self::lowering(slot, n_atoms).dagger()
    }

    pub fn sigma_z(slot: usize, n_atoms: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Self::embed(&[[one, z], [z, -one]], slot, n_atoms)
    }

    /// σ₊σ₋ on `slot`, the excited-state projector.
    pub fn excitation(slot: usize, n_atoms: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Self::embed(&[[one, z], [z, z]], slot, n_atoms)
    }

    fn embed(block: &[[C64; 2]; 2], slot: usize, n_atoms: usize) -> Self {
        assert!(slot < n_atoms, "slot {slot} out of range for {n_atoms} atoms");
        let d = 1usize << n_atoms;
        let shift = n_atoms - 1 - slot;
        let matrix = DMatrix::from_fn(d, d, |r, c| {
            if (r ^ c) & !(1 << shift) != 0 {
                return C64::new(0.0, 0.0);
            }
            block[(r >> shift) & 1][(c >> shift) & 1]
        });
        AtomicOperator { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_atoms(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn dagger(&self) -> Self {
        AtomicOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        AtomicOperator {
            matrix: &self.matrix * factor,
        }
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Hilbert–Schmidt inner product `tr(self† other)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.matrix.dotc(&other.matrix)
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl Add for &AtomicOperator {
    type Output = AtomicOperator;
    fn add(self, rhs: &AtomicOperator) -> AtomicOperator {
        AtomicOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &AtomicOperator {
    type Output = AtomicOperator;
    fn sub(self, rhs: &AtomicOperator) -> AtomicOperator {
        AtomicOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &AtomicOperator {
    type Output = AtomicOperator;
    fn mul(self, rhs: &AtomicOperator) -> AtomicOperator {
        AtomicOperator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Single-port SLH triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct SlhTriplet {
    pub scattering: C64,
    pub collapse: AtomicOperator,
    pub hamiltonian: AtomicOperator,
}

impl SlhTriplet {
    /// `(1, 0, 0)`, the unit of the series product.
    pub fn identity(n_atoms: usize) -> Self {
        SlhTriplet {
            scattering: C64::new(1.0, 0.0),
            collapse: AtomicOperator::zero(n_atoms),
            hamiltonian: AtomicOperator::zero(n_atoms),
        }
    }

    /// Free propagation `(e^{iφ}, 0, 0)`.
    pub fn phase(phi: f64, n_atoms: usize) -> Self {
        SlhTriplet {
            scattering: C64::from_polar(1.0, phi),
            ..Self::identity(n_atoms)
        }
    }

    /// One pass through a connection point of the atom in `slot`.
    pub fn connection(slot: usize, decay_rate: f64, hamiltonian: AtomicOperator, n_atoms: usize) -> Self {
        SlhTriplet {
            scattering: C64::new(1.0, 0.0),
            collapse: AtomicOperator::lowering(slot, n_atoms).scale(C64::new((decay_rate / 2.0).sqrt(), 0.0)),
            hamiltonian,
        }
    }

    pub fn dim(&self) -> usize {
        self.collapse.dim()
    }

    /// `self ◁ first`: the output of `first` feeds the input of `self`.
    pub fn after(&self, first: &SlhTriplet) -> Result<SlhTriplet> {
        series_product(self, first)
    }
}

/// Series product `g2 ◁ g1`:
/// `(S₂S₁, S₂L₁ + L₂, H₁ + H₂ + (1/2i)(L₂†S₂L₁ − L₁†S₂*L₂))`.
pub fn series_product(g2: &SlhTriplet, g1: &SlhTriplet) -> Result<SlhTriplet> {
    g2.collapse.check_same_space(&g1.collapse)?;
    g2.hamiltonian.check_same_space(&g1.hamiltonian)?;
    g2.collapse.check_same_space(&g1.hamiltonian)?;

    let s2 = g2.scattering;
    let l1 = &g1.collapse;
    let l2 = &g2.collapse;
    let forward = (&l2.dagger() * l1).scale(s2);
    let backward = (&l1.dagger() * l2).scale(s2.conj());
    // 1/(2i) = -i/2
    let cross = (&forward - &backward).scale(C64::new(0.0, -0.5));

    Ok(SlhTriplet {
        scattering: s2 * g1.scattering,
        collapse: &l1.scale(s2) + l2,
        hamiltonian: &(&g1.hamiltonian + &g2.hamiltonian) + &cross,
    })
}

/// Compose the whole mirror-terminated network.
///
/// The field first travels towards the mirror, meeting the points in
/// descending phase, picks up `e^{2iφ_min}` on the round trip between the
/// nearest point and the mirror, then meets the points again in ascending
/// phase. Each atom's `ω σ_z / 2` is attached to its first point on the
/// outgoing pass.
pub fn build_network(layout: &WaveguideLayout) -> Result<SlhTriplet> {
    let n = layout.n_atoms();
    if n > MAX_DENSE_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: n,
            max: MAX_DENSE_ATOMS,
        });
    }
    let points = layout.all_points();
    let slot = |atom_id: usize| layout.slot_of(atom_id).expect("validated layout");
    let mut network = SlhTriplet::identity(n);

    for (i, p) in points.iter().enumerate().rev() {
        let element = SlhTriplet::connection(slot(p.atom_id), p.decay_rate, AtomicOperator::zero(n), n);
        network = element.after(&network)?;
        if i > 0 {
            network = SlhTriplet::phase(p.phase - points[i - 1].phase, n).after(&network)?;
        }
    }

    network = SlhTriplet::phase(2.0 * points[0].phase, n).after(&network)?;

    let mut seen = vec![false; n];
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            network = SlhTriplet::phase(p.phase - points[i - 1].phase, n).after(&network)?;
        }
        let j = slot(p.atom_id);
        let hamiltonian = if seen[j] {
            AtomicOperator::zero(n)
        } else {
            seen[j] = true;
            AtomicOperator::sigma_z(j, n).scale(C64::new(0.5 * layout.atoms()[j].transition_frequency, 0.0))
        };
        let element = SlhTriplet::connection(j, p.decay_rate, hamiltonian, n);
        network = element.after(&network)?;
    }
    Ok(network)
}

/// Index of the state with only `slot` excited.
fn single_excitation_index(slot: usize, n_atoms: usize) -> usize {
    ((1 << n_atoms) - 1) ^ (1 << (n_atoms - 1 - slot))
}

/// Read the master-equation coefficients off a composed network.
///
/// The free `ω σ_z / 2` terms are removed (interaction picture). The
/// Hamiltonian is read through its single-excitation matrix elements and the
/// collapse operator through Hilbert–Schmidt projections onto each `σ₋^j`;
/// in both cases the operator rebuilt from the extracted coefficients must
/// reproduce the input to [`EXTRACTION_TOLERANCE`], so any component outside
/// the master-equation form is reported rather than dropped.
pub fn extract_coefficients(triplet: &SlhTriplet, layout: &WaveguideLayout) -> Result<MasterEqCoefficients> {
    let n = layout.n_atoms();
    let d = 1usize << n;
    if triplet.dim() != d || triplet.hamiltonian.dim() != d {
        return Err(Error::DimensionMismatch {
            left: triplet.dim(),
            right: d,
        });
    }
    let herm = triplet.hamiltonian.hermiticity_residual();
    if herm > EXTRACTION_TOLERANCE {
        return Err(Error::NonHermitian(herm));
    }

    let mut interaction = triplet.hamiltonian.clone();
    for (j, atom) in layout.atoms().iter().enumerate() {
        let free = AtomicOperator::sigma_z(j, n).scale(C64::new(0.5 * atom.transition_frequency, 0.0));
        interaction = &interaction - &free;
    }

    let h = interaction.matrix();
    let ground = h[(d - 1, d - 1)].re;
    let mut c = MasterEqCoefficients::zeros(n);
    for j in 0..n {
        let ej = single_excitation_index(j, n);
        c.lamb_shifts[j] = h[(ej, ej)].re - ground;
        for k in (j + 1)..n {
            let ek = single_excitation_index(k, n);
            let g = h[(ek, ej)];
            if g.im.abs() > EXTRACTION_TOLERANCE {
                return Err(Error::NumericalFailure(format!(
                    "complex exchange coupling between slots {j} and {k}: {g}"
                )));
            }
            c.exchange[(j, k)] = g.re;
            c.exchange[(k, j)] = g.re;
        }
    }

    let mut rebuilt = AtomicOperator::identity(n).scale(C64::new(ground, 0.0));
    for j in 0..n {
        rebuilt = &rebuilt + &AtomicOperator::excitation(j, n).scale(C64::new(c.lamb_shifts[j], 0.0));
        for k in (j + 1)..n {
            let hop = &AtomicOperator::raising(k, n) * &AtomicOperator::lowering(j, n);
            let both = &hop + &hop.dagger();
            rebuilt = &rebuilt + &both.scale(C64::new(c.exchange[(j, k)], 0.0));
        }
    }
    let residual = max_abs((&interaction - &rebuilt).matrix());
    if residual > EXTRACTION_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "Hamiltonian has components outside the master-equation form (residual {residual:e})"
        )));
    }

    let norm = (d / 2) as f64;
    let mut amplitudes: Vec<C64> = (0..n)
        .map(|j| AtomicOperator::lowering(j, n).inner(&triplet.collapse) / norm)
        .collect();
    let mut rebuilt_l = AtomicOperator::zero(n);
    for (j, a) in amplitudes.iter().enumerate() {
        rebuilt_l = &rebuilt_l + &AtomicOperator::lowering(j, n).scale(*a);
    }
    let residual = max_abs((&triplet.collapse - &rebuilt_l).matrix());
    if residual > EXTRACTION_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "collapse operator is not a combination of lowering operators (residual {residual:e})"
        )));
    }

    // Remove the global phase of L; the dissipator does not see it.
    if let Some(lead) = amplitudes.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if lead.norm() > 0.0 {
            let unphase = lead.conj() / lead.norm();
            amplitudes.iter_mut().for_each(|a| *a *= unphase);
        }
    }

    for j in 0..n {
        c.individual_decay[j] = amplitudes[j].norm_sqr();
        for k in (j + 1)..n {
            let cross = amplitudes[j] * amplitudes[k].conj();
            if cross.im.abs() > EXTRACTION_TOLERANCE {
                return Err(Error::NumericalFailure(format!(
                    "collective decay between slots {j} and {k} is complex: {cross}"
                )));
            }
            c.collective_decay[(j, k)] = cross.re;
            c.collective_decay[(k, j)] = cross.re;
        }
    }
    Ok(c)
}

/// Build the network for `layout` and extract its coefficients.
pub fn slh_coefficients(layout: &WaveguideLayout) -> Result<MasterEqCoefficients> {
    extract_coefficients(&build_network(layout)?, layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{closed_form, general_coefficients};
    use crate::model::{build_canonical, build_custom, CanonicalConfig, GiantAtomSpec, Topology};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_operator(rng: &mut StdRng, n: usize) -> AtomicOperator {
        let d = 1 << n;
        AtomicOperator::from_matrix(DMatrix::from_fn(d, d, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }))
        .unwrap()
    }

    fn random_triplet(rng: &mut StdRng, n: usize) -> SlhTriplet {
        let h = random_operator(rng, n);
        SlhTriplet {
            scattering: C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
            collapse: random_operator(rng, n),
            hamiltonian: (&h + &h.dagger()).scale(c(0.5, 0.0)),
        }
    }

    fn triplet_diff(a: &SlhTriplet, b: &SlhTriplet) -> f64 {
        (a.scattering - b.scattering)
            .norm()
            .max(max_abs((&a.collapse - &b.collapse).matrix()))
            .max(max_abs((&a.hamiltonian - &b.hamiltonian).matrix()))
    }

    #[test]
    fn operators_act_on_the_right_slot() {
        // |eg⟩ = index 1; σ₋ on atom a sends it to |gg⟩ = index 3.
        let lower_a = AtomicOperator::lowering(0, 2);
        assert_eq!(lower_a.matrix()[(3, 1)], c(1.0, 0.0));
        assert_eq!(lower_a.matrix().iter().filter(|z| z.norm() > 0.0).count(), 2);
        let lower_b = AtomicOperator::lowering(1, 2);
        assert_eq!(lower_b.matrix()[(3, 2)], c(1.0, 0.0));
        let nz = &AtomicOperator::raising(0, 2) * &lower_a;
        assert_eq!(nz, AtomicOperator::excitation(0, 2));
        let z = AtomicOperator::sigma_z(1, 2);
        let diag: Vec<f64> = (0..4).map(|i| z.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(AtomicOperator::sigma_z(0, 3).n_atoms(), 3);
    }

    #[test]
    fn identity_element() {
        let mut rng = StdRng::seed_from_u64(1);
        let g = random_triplet(&mut rng, 2);
        let id = SlhTriplet::identity(2);
        assert!(triplet_diff(&series_product(&id, &g).unwrap(), &g) < 1e-15);
        assert!(triplet_diff(&series_product(&g, &id).unwrap(), &g) < 1e-15);
    }

    #[test]
    fn phases_add() {
        let g = series_product(&SlhTriplet::phase(0.4, 1), &SlhTriplet::phase(1.1, 1)).unwrap();
        assert!((g.scattering - C64::from_polar(1.0, 1.5)).norm() < 1e-15);
        assert_eq!(g.collapse, AtomicOperator::zero(1));
        assert_eq!(g.hamiltonian, AtomicOperator::zero(1));
    }

    #[test]
    fn associative() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let (g1, g2, g3) = (
                random_triplet(&mut rng, 2),
                random_triplet(&mut rng, 2),
                random_triplet(&mut rng, 2),
            );
            let left = series_product(&series_product(&g3, &g2).unwrap(), &g1).unwrap();
            let right = series_product(&g3, &series_product(&g2, &g1).unwrap()).unwrap();
            assert!(triplet_diff(&left, &right) < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let err = series_product(&SlhTriplet::identity(1), &SlhTriplet::identity(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(AtomicOperator::from_matrix(DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn single_point_collapse() {
        let phi = 0.83;
        let gamma = 1.7;
        let layout = build_custom(vec![GiantAtomSpec::new(0, 2.0, &[(phi, gamma)])]).unwrap();
        let net = build_network(&layout).unwrap();
        assert!((net.scattering - C64::from_polar(1.0, 2.0 * phi)).norm() < 1e-15);
        // Inward pass then e^{2iφ}, then outward pass.
        let expected = (c(1.0, 0.0) + C64::from_polar(1.0, 2.0 * phi)) * (gamma / 2.0).sqrt();
        let amp = net.collapse.matrix()[(1, 0)];
        assert!((amp - expected).norm() < 1e-14);
        assert!((amp.norm_sqr() - gamma * (1.0 + (2.0 * phi).cos())).abs() < 1e-14);
    }

    /// Four points with arbitrary spacings and rates, atoms a,b,a,b.
    struct BraidedGeneral {
        gammas: [f64; 4],
        spacings: [f64; 3],
        theta: f64,
    }

    impl BraidedGeneral {
        fn layout(&self, omega_a: f64, omega_b: f64) -> WaveguideLayout {
            let p1 = self.theta / 2.0;
            let p2 = p1 + self.spacings[0];
            let p3 = p2 + self.spacings[1];
            let p4 = p3 + self.spacings[2];
            let [g1, g2, g3, g4] = self.gammas;
            build_custom(vec![
                GiantAtomSpec::new(0, omega_a, &[(p1, g1), (p3, g3)]),
                GiantAtomSpec::new(1, omega_b, &[(p2, g2), (p4, g4)]),
            ])
            .unwrap()
        }

        /// Total triplet written out by hand from the cascade.
        fn expected_triplet(&self) -> (C64, [C64; 2], [f64; 3]) {
            let [g1, g2, g3, g4] = self.gammas;
            let [t1, t2, t3] = self.spacings;
            let t = self.theta;
            let e = |x: f64| C64::from_polar(1.0, x);
            let s = f64::sin;
            let scattering = e(2.0 * t1 + 2.0 * t2 + 2.0 * t3 + t);
            let la = (e(t1 + t2 + t3 + t) + e(t1 + t2 + t3)) * (g1 / 2.0).sqrt()
                + (e(2.0 * t1 + 2.0 * t2 + t3 + t) + e(t3)) * (g3 / 2.0).sqrt();
            let lb = (e(2.0 * t1 + t2 + t3 + t) + e(t2 + t3)) * (g2 / 2.0).sqrt()
                + (e(2.0 * t1 + 2.0 * t2 + 2.0 * t3 + t) + 1.0) * (g4 / 2.0).sqrt();
            let da = (g1 * g3).sqrt() * (s(t1 + t2) + s(t1 + t2 + t))
                + g1 / 2.0 * s(t)
                + g3 / 2.0 * s(2.0 * t1 + 2.0 * t2 + t);
            let db = (g2 * g4).sqrt() * (s(t2 + t3) + s(2.0 * t1 + t2 + t3 + t))
                + g2 / 2.0 * s(2.0 * t1 + t)
                + g4 / 2.0 * s(2.0 * t1 + 2.0 * t2 + 2.0 * t3 + t);
            let g = (g1 * g2).sqrt() / 2.0 * (s(t1) + s(t1 + t))
                + (g2 * g3).sqrt() / 2.0 * (s(t2) + s(2.0 * t1 + t2 + t))
                + (g3 * g4).sqrt() / 2.0 * (s(t3) + s(2.0 * t1 + 2.0 * t2 + t3 + t))
                + (g1 * g4).sqrt() / 2.0 * (s(t1 + t2 + t3) + s(t1 + t2 + t3 + t));
            (scattering, [la, lb], [da, db, g])
        }
    }

    #[test]
    fn braided_network_term_for_term() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..25 {
            let case = BraidedGeneral {
                gammas: [(); 4].map(|_| rng.random_range(0.1..2.0)),
                spacings: [(); 3].map(|_| rng.random_range(0.05..3.0)),
                theta: rng.random_range(0.05..3.0),
            };
            let (wa, wb) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let layout = case.layout(wa, wb);
            let net = build_network(&layout).unwrap();
            let (s, [la, lb], [da, db, g]) = case.expected_triplet();
            assert!((net.scattering - s).norm() < 1e-12);
            assert!((net.scattering.norm() - 1.0).abs() < 1e-12);

            let l_expected = &AtomicOperator::lowering(0, 2).scale(la) + &AtomicOperator::lowering(1, 2).scale(lb);
            assert!(max_abs((&net.collapse - &l_expected).matrix()) < 1e-12);

            let hop = &AtomicOperator::raising(1, 2) * &AtomicOperator::lowering(0, 2);
            let h_expected = [
                AtomicOperator::sigma_z(0, 2).scale(c(wa / 2.0, 0.0)),
                AtomicOperator::sigma_z(1, 2).scale(c(wb / 2.0, 0.0)),
                AtomicOperator::excitation(0, 2).scale(c(da, 0.0)),
                AtomicOperator::excitation(1, 2).scale(c(db, 0.0)),
                (&hop + &hop.dagger()).scale(c(g, 0.0)),
            ]
            .iter()
            .fold(AtomicOperator::zero(2), |acc, op| &acc + op);
            assert!(max_abs((&net.hamiltonian - &h_expected).matrix()) < 1e-12);
            assert!(net.hamiltonian.hermiticity_residual() < 1e-12);
        }
    }

    #[test]
    fn braided_general_decay_prefactors() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..25 {
            let case = BraidedGeneral {
                gammas: [(); 4].map(|_| rng.random_range(0.1..2.0)),
                spacings: [(); 3].map(|_| rng.random_range(0.05..3.0)),
                theta: rng.random_range(0.05..3.0),
            };
            let layout = case.layout(1.0, 1.0);
            let got = slh_coefficients(&layout).unwrap();
            let [g1, g2, g3, g4] = case.gammas;
            let [t1, t2, t3] = case.spacings;
            let t = case.theta;
            let cs = f64::cos;
            let gamma_a = g1 + g3 + g1 * cs(t) + g3 * cs(2.0 * t1 + 2.0 * t2 + t)
                + 2.0 * (g1 * g3).sqrt() * (cs(t1 + t2) + cs(t1 + t2 + t));
            let gamma_b = g2 + g4 + g2 * cs(2.0 * t1 + t) + g4 * cs(2.0 * t1 + 2.0 * t2 + 2.0 * t3 + t)
                + 2.0 * (g2 * g4).sqrt() * (cs(t2 + t3) + cs(2.0 * t1 + t2 + t3 + t));
            let gamma_coll = (g1 * g2).sqrt() * (cs(t1) + cs(t1 + t))
                + (g2 * g3).sqrt() * (cs(t2) + cs(2.0 * t1 + t2 + t))
                + (g3 * g4).sqrt() * (cs(t3) + cs(2.0 * t1 + 2.0 * t2 + t3 + t))
                + (g1 * g4).sqrt() * (cs(t1 + t2 + t3) + cs(t1 + t2 + t3 + t));
            assert!((got.individual_decay[0] - gamma_a).abs() < 1e-10);
            assert!((got.individual_decay[1] - gamma_b).abs() < 1e-10);
            assert!((got.collective_decay[(0, 1)] - gamma_coll).abs() < 1e-10);
            assert!(got.max_abs_diff(&general_coefficients(&layout)) < 1e-10);
        }
    }

    #[test]
    fn canonical_cross_checks() {
        let layout = build_canonical(CanonicalConfig::new(Topology::Braided, 1.0, 0.7)).unwrap();
        let got = slh_coefficients(&layout).unwrap();
        assert!(got.max_abs_diff(&closed_form(Topology::Braided, 1.0, 0.7)) < 1e-10);

        let layout = build_canonical(CanonicalConfig::new(Topology::Nested, 1.0, PI / 4.0)).unwrap();
        let got = slh_coefficients(&layout).unwrap().as_two_atom_array().unwrap();
        assert!(got[3..].iter().all(|x| x.abs() < 1e-10));
        assert!((got[2] - (2.0 + SQRT_2) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn transition_frequency_drops_out() {
        let case = BraidedGeneral {
            gammas: [1.0, 0.5, 1.5, 0.7],
            spacings: [0.4, 1.3, 0.9],
            theta: 0.6,
        };
        let reference = slh_coefficients(&case.layout(0.0, 0.0)).unwrap();
        for (wa, wb) in [(1.0, 1.0), (5.0, -2.0), (100.0, 0.3)] {
            let got = slh_coefficients(&case.layout(wa, wb)).unwrap();
            assert!(got.max_abs_diff(&reference) < 1e-10);
        }
    }

    #[test]
    fn three_atoms_match_pair_sums() {
        let layout = build_custom(vec![
            GiantAtomSpec::new(4, 1.0, &[(0.3, 1.0), (2.9, 0.4)]),
            GiantAtomSpec::new(9, 1.0, &[(1.1, 0.8)]),
            GiantAtomSpec::new(2, 1.0, &[(1.7, 1.2), (2.2, 0.3), (4.0, 0.9)]),
        ])
        .unwrap();
        let got = slh_coefficients(&layout).unwrap();
        assert!(got.max_abs_diff(&general_coefficients(&layout)) < 1e-10);
    }

    #[test]
    fn non_hermitian_hamiltonian_is_flagged() {
        let layout = build_canonical(CanonicalConfig::new(Topology::Braided, 1.0, 0.7)).unwrap();
        let mut net = build_network(&layout).unwrap();
        net.hamiltonian = &net.hamiltonian + &AtomicOperator::lowering(0, 2).scale(c(1e-6, 0.0));
        assert!(matches!(extract_coefficients(&net, &layout), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn too_many_atoms() {
        let atoms = (0..7).map(|j| GiantAtomSpec::new(j, 1.0, &[(0.1 + j as f64, 1.0)])).collect();
        let layout = build_custom(atoms).unwrap();
        assert!(matches!(build_network(&layout), Err(Error::TooManyAtoms { .. })));
    }
}
