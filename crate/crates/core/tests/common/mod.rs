//! Independent reference values for the integration tests.
#![allow(dead_code)]

use giant_atoms::dynamics::DensityMatrix;
use giant_atoms::model::WaveguideLayout;
use giant_atoms::C64;
use nalgebra::DMatrix;

/// Coefficients from the complex self-energy
/// `Σ_jk = −(i/2) Σ_{n∈j, m∈k} √(γ_n γ_m) (e^{i|φ_n−φ_m|} + e^{i(φ_n+φ_m)})`,
/// whose real part is the coherent term and `−2·Im` the decay term.
/// Returns `(coherent, decay)` as full matrices.
pub fn self_energy(layout: &WaveguideLayout) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = layout.n_atoms();
    let mut sigma = DMatrix::<C64>::zeros(n, n);
    for (j, a) in layout.atoms().iter().enumerate() {
        for (k, b) in layout.atoms().iter().enumerate() {
            for p in &a.connection_points {
                for q in &b.connection_points {
                    let w = (p.decay_rate * q.decay_rate).sqrt();
                    let e = C64::from_polar(1.0, (p.phase - q.phase).abs()) + C64::from_polar(1.0, p.phase + q.phase);
                    sigma[(j, k)] += C64::new(0.0, -0.5) * e * w;
                }
            }
        }
    }
    (sigma.map(|z| z.re), sigma.map(|z| -2.0 * z.im))
}

/// Concurrence from the eigenvalues of the non-Hermitian `ρ ρ̃`.
pub fn wootters_schur(rho: &DensityMatrix) -> f64 {
    let i = C64::new(0.0, 1.0);
    let y = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
    let yy = y.kronecker(&y);
    let r = rho.matrix() * (&yy * rho.matrix().conjugate() * &yy);
    let ev = r.schur().eigenvalues().expect("complex Schur always yields eigenvalues");
    let mut l: Vec<f64> = ev.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Braided layout with per-point rates `γ1..γ4`, spacings `θ1..θ3` and first
/// point at `θ/2`, atom a on points 1 and 3.
pub struct BraidedGeneral {
    pub gammas: [f64; 4],
    pub spacings: [f64; 3],
    pub theta: f64,
}

impl BraidedGeneral {
    pub fn layout(&self) -> WaveguideLayout {
        use giant_atoms::model::{build_custom, GiantAtomSpec};
        let p1 = self.theta / 2.0;
        let p2 = p1 + self.spacings[0];
        let p3 = p2 + self.spacings[1];
        let p4 = p3 + self.spacings[2];
        let [g1, g2, g3, g4] = self.gammas;
        build_custom(vec![
            GiantAtomSpec::new(0, 1.0, &[(p1, g1), (p3, g3)]),
            GiantAtomSpec::new(1, 1.0, &[(p2, g2), (p4, g4)]),
        ])
        .unwrap()
    }

    /// `[δω_a, δω_b, g, Γ_a, Γ_b, Γ_coll]` written out by hand.
    pub fn expected(&self) -> [f64; 6] {
        let [g1, g2, g3, g4] = self.gammas;
        let [t1, t2, t3] = self.spacings;
        let t = self.theta;
        let (s, c) = (f64::sin, f64::cos);
        let da = (g1 * g3).sqrt() * (s(t1 + t2) + s(t1 + t2 + t)) + g1 / 2.0 * s(t) + g3 / 2.0 * s(2.0 * t1 + 2.0 * t2 + t);
        let db = (g2 * g4).sqrt() * (s(t2 + t3) + s(2.0 * t1 + t2 + t3 + t))
            + g2 / 2.0 * s(2.0 * t1 + t)
            + g4 / 2.0 * s(2.0 * t1 + 2.0 * t2 + 2.0 * t3 + t);
        let g = (g1 * g2).sqrt() / 2.0 * (s(t1) + s(t1 + t))
            + (g2 * g3).sqrt() / 2.0 * (s(t2) + s(2.0 * t1 + t2 + t))
            + (g3 * g4).sqrt() / 2.0 * (s(t3) + s(2.0 * t1 + 2.0 * t2 + t3 + t))
            + (g1 * g4).sqrt() / 2.0 * (s(t1 + t2 + t3) + s(t1 + t2 + t3 + t));
        let ga = g1 + g3 + g1 * c(t) + g3 * c(2.0 * t1 + 2.0 * t2 + t)
            + 2.0 * (g1 * g3).sqrt() * (c(t1 + t2) + c(t1 + t2 + t));
        let gb = g2 + g4 + g2 * c(2.0 * t1 + t) + g4 * c(2.0 * t1 + 2.0 * t2 + 2.0 * t3 + t)
            + 2.0 * (g2 * g4).sqrt() * (c(t2 + t3) + c(2.0 * t1 + t2 + t3 + t));
        let gc = (g1 * g2).sqrt() * (c(t1) + c(t1 + t))
            + (g2 * g3).sqrt() * (c(t2) + c(2.0 * t1 + t2 + t))
            + (g3 * g4).sqrt() * (c(t3) + c(2.0 * t1 + 2.0 * t2 + t3 + t))
            + (g1 * g4).sqrt() * (c(t1 + t2 + t3) + c(t1 + t2 + t3 + t));
        [da, db, g, ga, gb, gc]
    }
}

/// Braided θ = 0 from `|eg⟩`.
pub fn steady_state_concurrence(gamma_t: f64) -> f64 {
    (1.0 - (-16.0 * gamma_t).exp()) / 2.0
}

/// Braided θ = π/2 from `|eg⟩`.
pub fn dfi_concurrence(gamma_t: f64) -> f64 {
    (2.0 * gamma_t).sin().abs()
}

/// Slope of the least-squares line through `(x, y)`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
