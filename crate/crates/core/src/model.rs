//! Atoms, connection points and waveguide layouts.
//!
//! The mirror sits at phase zero. A connection point's position is stored as
//! the phase `k0 * x` a resonant photon accumulates travelling from the mirror
//! to it, so only products of wavevector and distance ever appear.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transition frequency given to atoms of the canonical layouts. It only
/// enters the SLH Hamiltonian before the move to the interaction picture.
pub const DEFAULT_TRANSITION_FREQUENCY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionPoint {
    pub atom_id: usize,
    /// Phase distance from the mirror, radians.
    pub phase: f64,
    /// Local decay rate, in units of the reference rate.
    pub decay_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GiantAtomSpec {
    pub atom_id: usize,
    pub transition_frequency: f64,
    pub connection_points: Vec<ConnectionPoint>,
}

impl GiantAtomSpec {
    /// Atom with the given `(phase, decay_rate)` connection points.
    pub fn new(atom_id: usize, transition_frequency: f64, points: &[(f64, f64)]) -> Self {
        let connection_points = points
            .iter()
            .map(|&(phase, decay_rate)| ConnectionPoint {
                atom_id,
                phase,
                decay_rate,
            })
            .collect();
        GiantAtomSpec {
            atom_id,
            transition_frequency,
            connection_points,
        }
    }
}

/// A validated arrangement of atoms along the semi-infinite waveguide.
///
/// Atom slot `j` (the position in [`atoms`](Self::atoms)) is the tensor
/// factor `j` of every operator built from the layout.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideLayout {
    atoms: Vec<GiantAtomSpec>,
    all_points: Vec<ConnectionPoint>,
}

impl WaveguideLayout {
    pub fn atoms(&self) -> &[GiantAtomSpec] {
        &self.atoms
    }

    /// Every connection point, ascending in phase.
    pub fn all_points(&self) -> &[ConnectionPoint] {
        &self.all_points
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Slot index of the atom with the given id.
    pub fn slot_of(&self, atom_id: usize) -> Option<usize> {
        self.atoms.iter().position(|a| a.atom_id == atom_id)
    }

    /// Parse and validate the JSON layout format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: LayoutFile = serde_json::from_str(text)?;
        file.into_layout()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&LayoutFile::from(self))?)
    }
}

/// Validate a list of atoms and assemble the layout.
pub fn build_custom(atoms: Vec<GiantAtomSpec>) -> Result<WaveguideLayout> {
    if atoms.is_empty() {
        return Err(Error::EmptyLayout);
    }
    let mut ids = HashSet::new();
    for atom in &atoms {
        if !ids.insert(atom.atom_id) {
            return Err(Error::DuplicateAtomId(atom.atom_id));
        }
        if atom.connection_points.is_empty() {
            return Err(Error::AtomWithoutPoints(atom.atom_id));
        }
        if !atom.transition_frequency.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "atom {} transition frequency {}",
                atom.atom_id, atom.transition_frequency
            )));
        }
        for p in &atom.connection_points {
            if p.atom_id != atom.atom_id {
                return Err(Error::AtomIdMismatch {
                    owner: atom.atom_id,
                    found: p.atom_id,
                });
            }
            if !(p.phase.is_finite() && p.phase >= 0.0) {
                return Err(Error::InvalidPhase(p.phase));
            }
            if !(p.decay_rate.is_finite() && p.decay_rate >= 0.0) {
                return Err(Error::InvalidDecayRate(p.decay_rate));
            }
        }
    }

    let mut all_points: Vec<ConnectionPoint> = atoms
        .iter()
        .flat_map(|a| a.connection_points.iter().copied())
        .collect();
    all_points.sort_by(|a, b| a.phase.total_cmp(&b.phase));
    if let Some(w) = all_points.windows(2).find(|w| w[1].phase <= w[0].phase) {
        return Err(Error::CoincidentPoints(w[0].phase));
    }

    Ok(WaveguideLayout { atoms, all_points })
}

/// The three orderings of two two-point atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Braided,
    Separate,
    Nested,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::Braided, Topology::Separate, Topology::Nested];

    /// Owner (0 = a, 1 = b) of each of the four points in ascending order.
    pub fn assignment(self) -> [usize; 4] {
        match self {
            Topology::Braided => [0, 1, 0, 1],
            Topology::Separate => [0, 0, 1, 1],
            Topology::Nested => [0, 1, 1, 0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Braided => "braided",
            Topology::Separate => "separate",
            Topology::Nested => "nested",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "braided" => Ok(Topology::Braided),
            "separate" => Ok(Topology::Separate),
            "nested" => Ok(Topology::Nested),
            other => Err(Error::InvalidParameter(format!("unknown configuration '{other}'"))),
        }
    }
}

/// Two atoms, uniform point decay `gamma`, adjacent points `theta` apart and
/// the first point `theta / 2` from the mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalConfig {
    pub kind: Topology,
    pub gamma: f64,
    pub theta: f64,
}

impl CanonicalConfig {
    pub fn new(kind: Topology, gamma: f64, theta: f64) -> Self {
        CanonicalConfig { kind, gamma, theta }
    }

    /// Phases of the four points: θ/2, 3θ/2, 5θ/2, 7θ/2.
    pub fn point_phases(&self) -> [f64; 4] {
        let t = self.theta;
        [0.5 * t, 1.5 * t, 2.5 * t, 3.5 * t]
    }
}

pub fn build_canonical(config: CanonicalConfig) -> Result<WaveguideLayout> {
    if !(config.gamma.is_finite() && config.gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {}",
            config.gamma
        )));
    }
    if !(config.theta.is_finite() && config.theta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta must be nonnegative, got {}",
            config.theta
        )));
    }
    let phases = config.point_phases();
    let owners = config.kind.assignment();
    let atoms = (0..2)
        .map(|id| {
            let points: Vec<(f64, f64)> = phases
                .iter()
                .zip(owners)
                .filter(|&(_, owner)| owner == id)
                .map(|(&phi, _)| (phi, config.gamma))
                .collect();
            GiantAtomSpec::new(id, DEFAULT_TRANSITION_FREQUENCY, &points)
        })
        .collect();
    build_custom(atoms)
}

#[derive(Debug, Serialize, Deserialize)]
struct LayoutFile {
    atoms: Vec<AtomEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AtomEntry {
    id: usize,
    #[serde(default = "default_omega")]
    omega: f64,
    points: Vec<PointEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PointEntry {
    phi: f64,
    gamma: f64,
}

fn default_omega() -> f64 {
    DEFAULT_TRANSITION_FREQUENCY
}

impl LayoutFile {
    fn into_layout(self) -> Result<WaveguideLayout> {
        let atoms = self
            .atoms
            .into_iter()
            .map(|a| {
                let points: Vec<(f64, f64)> = a.points.iter().map(|p| (p.phi, p.gamma)).collect();
                GiantAtomSpec::new(a.id, a.omega, &points)
            })
            .collect();
        build_custom(atoms)
    }
}

impl From<&WaveguideLayout> for LayoutFile {
    fn from(layout: &WaveguideLayout) -> Self {
        LayoutFile {
            atoms: layout
                .atoms
                .iter()
                .map(|a| AtomEntry {
                    id: a.atom_id,
                    omega: a.transition_frequency,
                    points: a
                        .connection_points
                        .iter()
                        .map(|p| PointEntry {
                            phi: p.phase,
                            gamma: p.decay_rate,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
