//! Decoherence-free interaction: every decay rate vanishes while the
//! exchange coupling survives.

use serde::{Deserialize, Serialize};

use crate::coefficients::{closed_form, decay_amplitudes_canonical, MasterEqCoefficients};
use crate::error::{Error, Result};
use crate::model::Topology;

/// Thresholds in units of γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfiTolerances {
    pub decay: f64,
    pub exchange: f64,
}

impl Default for DfiTolerances {
    fn default() -> Self {
        DfiTolerances {
            decay: 1e-9,
            exchange: 1e-3,
        }
    }
}

impl DfiTolerances {
    fn scaled(self, gamma: f64) -> Self {
        DfiTolerances {
            decay: self.decay * gamma,
            exchange: self.exchange * gamma,
        }
    }
}

/// Smallest grid accepted by [`scan_dfi`].
pub const MIN_GRID: usize = 100;
/// Golden-section refinement stops below this bracket width.
pub const REFINE_WIDTH: f64 = 1e-12;
/// Located points closer than this are merged.
pub const DEDUP_RADIUS: f64 = 1e-9;

/// True iff every decay is below `tol_decay` and some exchange coupling
/// exceeds `tol_exchange` in magnitude.
pub fn check_dfi(coeffs: &MasterEqCoefficients, tol_decay: f64, tol_exchange: f64) -> bool {
    coeffs.max_abs_decay() < tol_decay && coeffs.max_abs_exchange() > tol_exchange
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfiPoint {
    pub theta: f64,
    /// Largest |Γ| at the point.
    pub residual: f64,
    /// Exchange coupling at the point.
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfiReport {
    #[serde(rename = "config")]
    pub configuration: Topology,
    pub points: Vec<DfiPoint>,
}

impl DfiReport {
    pub fn theta_points(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.theta).collect()
    }

    pub fn residual_decay(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.residual).collect()
    }

    pub fn exchange_at_point(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.g).collect()
    }
}

/// `max |a_j|` over the collapse amplitudes. Its square is
/// `max(|Γ_a|, |Γ_b|, |Γ_coll|)`, so both share minimisers, but this one
/// vanishes linearly and can be located to rounding precision.
fn objective(kind: Topology, gamma: f64, theta: f64) -> f64 {
    let [a, b] = decay_amplitudes_canonical(kind, gamma, theta);
    a.abs().max(b.abs())
}

/// Minimise `f` on `[lo, hi]` by golden-section search.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        // Stalls once the bracket is a few ulps wide.
        if x1 >= x2 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Scan with the default tolerances.
pub fn scan_dfi(kind: Topology, gamma: f64, theta_min: f64, theta_max: f64, grid: usize) -> Result<DfiReport> {
    scan_dfi_with(kind, gamma, theta_min, theta_max, grid, DfiTolerances::default())
}

/// Locate DFI points of a canonical layout in `[theta_min, theta_max]`.
///
/// The largest decay magnitude (through its square root, see
/// `objective`) is sampled on `grid + 1` evenly spaced
/// points; each sampled local minimum is refined by golden-section search
/// over its two neighbouring cells and kept if it passes [`check_dfi`].
pub fn scan_dfi_with(
    kind: Topology,
    gamma: f64,
    theta_min: f64,
    theta_max: f64,
    grid: usize,
    tolerances: DfiTolerances,
) -> Result<DfiReport> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    if !(theta_min.is_finite() && theta_max.is_finite() && theta_max > theta_min) {
        return Err(Error::InvalidParameter(format!(
            "empty scan range [{theta_min}, {theta_max}]"
        )));
    }
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter(format!("grid must be at least {MIN_GRID}, got {grid}")));
    }
    let tol = tolerances.scaled(gamma);
    let step = (theta_max - theta_min) / grid as f64;
    let theta_at = |i: usize| theta_min + step * i as f64;
    let values: Vec<f64> = (0..=grid).map(|i| objective(kind, gamma, theta_at(i))).collect();

    let mut points: Vec<DfiPoint> = Vec::new();
    for i in 0..=grid {
        let left = if i > 0 { values[i - 1] } else { f64::INFINITY };
        let right = if i < grid { values[i + 1] } else { f64::INFINITY };
        if values[i] > left || values[i] > right {
            continue;
        }
        let lo = theta_at(i.saturating_sub(1));
        let hi = theta_at((i + 1).min(grid));
        let theta = golden_section(|x| objective(kind, gamma, x), lo, hi, REFINE_WIDTH);
        let coeffs = closed_form(kind, gamma, theta);
        if check_dfi(&coeffs, tol.decay, tol.exchange) {
            points.push(DfiPoint {
                theta,
                residual: coeffs.max_abs_decay(),
                g: coeffs.exchange[(0, 1)],
            });
        }
    }

    points.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut merged: Vec<DfiPoint> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last_mut() {
            Some(last) if p.theta - last.theta < DEDUP_RADIUS => {
                if p.residual < last.residual {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    Ok(DfiReport {
        configuration: kind,
        points: merged,
    })
}
