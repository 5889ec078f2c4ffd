//! Distance-d surface-code layout and the per-cycle gate schedule.
//!
//! The planar (unrotated) code is laid out on a doubled-resolution
//! integer grid of side `2d - 1` so that every qubit has integral
//! coordinates:
//!
//! * data qubits sit at (even row, even col) and (odd, odd);
//! * Z-type syndrome qubits at (even, odd) — they detect bit flips, and
//!   X-error chains terminate on the left/right boundaries;
//! * X-type syndrome qubits at (odd, even) — they detect phase flips,
//!   and Z-error chains terminate on the top/bottom boundaries.
//!
//! This gives `d^2 + (d-1)^2` data qubits and `2 d (d-1)` syndrome
//! qubits (25 total for d = 3, 81 for d = 5). The logical X operator is
//! the horizontal top-row data chain; logical Z is the vertical
//! left-column chain; they share exactly the corner qubit.
//!
//! Each cycle runs preparation, four CNOT steps in north-west-east-south
//! order, a Hadamard slot for the X syndromes, and readout. Z syndromes
//! are CNOT targets of their data neighbors; X syndromes are CNOT
//! controls. Weight-3 boundary stabilizers simply idle through their
//! missing CNOT slot.

use crate::arch::{ArchName, ArchitectureModel};
use crate::bits::BitMask;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("code distance must be odd and >= 3, got {0}")]
    BadDistance(u32),
}

/// Grid coordinate on the doubled-resolution lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Coord {
    pub row: i32,
    pub col: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    Data,
    SyndromeZ,
    SyndromeX,
}

/// The four CNOT directions in schedule order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    North,
    West,
    East,
    South,
}

pub const CNOT_ORDER: [Direction; 4] = [
    Direction::North,
    Direction::West,
    Direction::East,
    Direction::South,
];

impl Direction {
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::North => (-1, 0),
            Direction::West => (0, -1),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::North => 0,
            Direction::West => 1,
            Direction::East => 2,
            Direction::South => 3,
        }
    }
}

/// Static geometry of one code patch. Qubits carry a single global
/// index space: data first, then Z syndromes, then X syndromes.
#[derive(Clone, Debug)]
pub struct CodeLayout {
    pub d: u32,
    pub data_coords: Vec<Coord>,
    pub z_coords: Vec<Coord>,
    pub x_coords: Vec<Coord>,
    /// For each Z syndrome, its data neighbors in N, W, E, S order
    /// (`None` where the lattice boundary truncates the stabilizer).
    pub z_support: Vec<[Option<usize>; 4]>,
    pub x_support: Vec<[Option<usize>; 4]>,
    /// Data-qubit masks of the logical operators.
    pub logical_x_support: BitMask,
    pub logical_z_support: BitMask,
}

impl CodeLayout {
    pub fn n_data(&self) -> usize {
        self.data_coords.len()
    }

    pub fn n_z(&self) -> usize {
        self.z_coords.len()
    }

    pub fn n_x(&self) -> usize {
        self.x_coords.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_data() + self.n_z() + self.n_x()
    }

    /// Global qubit index of Z syndrome `i`.
    pub fn z_qubit(&self, i: usize) -> usize {
        self.n_data() + i
    }

    /// Global qubit index of X syndrome `i`.
    pub fn x_qubit(&self, i: usize) -> usize {
        self.n_data() + self.n_z() + i
    }

    pub fn role(&self, qubit: usize) -> QubitRole {
        if qubit < self.n_data() {
            QubitRole::Data
        } else if qubit < self.n_data() + self.n_z() {
            QubitRole::SyndromeZ
        } else {
            QubitRole::SyndromeX
        }
    }

    /// Mask of the data qubits in a Z stabilizer's support.
    pub fn z_stabilizer_mask(&self, i: usize) -> BitMask {
        let mut m = BitMask::zeros(self.n_data());
        for q in self.z_support[i].iter().flatten() {
            m.set(*q, true);
        }
        m
    }

    pub fn x_stabilizer_mask(&self, i: usize) -> BitMask {
        let mut m = BitMask::zeros(self.n_data());
        for q in self.x_support[i].iter().flatten() {
            m.set(*q, true);
        }
        m
    }
}

/// Construct the distance-d layout and check its structural invariants.
pub fn build_layout(d: u32) -> Result<CodeLayout, LatticeError> {
    if d < 3 || d % 2 == 0 {
        return Err(LatticeError::BadDistance(d));
    }
    let side = 2 * d as i32 - 1;
    let mut data_coords = Vec::new();
    let mut z_coords = Vec::new();
    let mut x_coords = Vec::new();
    for row in 0..side {
        for col in 0..side {
            let c = Coord { row, col };
            match (row % 2, col % 2) {
                (0, 0) | (1, 1) => data_coords.push(c),
                (0, 1) => z_coords.push(c),
                (1, 0) => x_coords.push(c),
                _ => unreachable!(),
            }
        }
    }
    let data_at = |row: i32, col: i32| -> Option<usize> {
        if row < 0 || col < 0 || row >= side || col >= side {
            return None;
        }
        data_coords
            .iter()
            .position(|c| c.row == row && c.col == col)
    };
    let support_of = |coords: &[Coord]| -> Vec<[Option<usize>; 4]> {
        coords
            .iter()
            .map(|c| {
                let mut s = [None; 4];
                for dir in CNOT_ORDER {
                    let (dr, dc) = dir.offset();
                    s[dir.index()] = data_at(c.row + dr, c.col + dc);
                }
                s
            })
            .collect()
    };
    let z_support = support_of(&z_coords);
    let x_support = support_of(&x_coords);

    let n_data = data_coords.len();
    let mut logical_x_support = BitMask::zeros(n_data);
    let mut logical_z_support = BitMask::zeros(n_data);
    for (i, c) in data_coords.iter().enumerate() {
        if c.row == 0 {
            logical_x_support.set(i, true);
        }
        if c.col == 0 {
            logical_z_support.set(i, true);
        }
    }

    let layout = CodeLayout {
        d,
        data_coords,
        z_coords,
        x_coords,
        z_support,
        x_support,
        logical_x_support,
        logical_z_support,
    };
    debug_assert!(layout_invariants_hold(&layout));
    Ok(layout)
}

/// Exhaustive structural checks: qubit counts, stabilizer commutation,
/// logical-operator commutation and anticommutation.
pub fn layout_invariants_hold(l: &CodeLayout) -> bool {
    let d = l.d as usize;
    if l.n_data() != d * d + (d - 1) * (d - 1) {
        return false;
    }
    if l.n_z() != d * (d - 1) || l.n_x() != d * (d - 1) {
        return false;
    }
    // Every X stabilizer must overlap every Z stabilizer evenly.
    for zi in 0..l.n_z() {
        let zm = l.z_stabilizer_mask(zi);
        for xi in 0..l.n_x() {
            if l.x_stabilizer_mask(xi).odd_overlap(&zm) {
                return false;
            }
        }
    }
    // Logical X commutes with Z stabilizers, logical Z with X
    // stabilizers, and the two logicals anticommute.
    for zi in 0..l.n_z() {
        if l.z_stabilizer_mask(zi).odd_overlap(&l.logical_x_support) {
            return false;
        }
    }
    for xi in 0..l.n_x() {
        if l.x_stabilizer_mask(xi).odd_overlap(&l.logical_z_support) {
            return false;
        }
    }
    l.logical_x_support.odd_overlap(&l.logical_z_support)
}

/// One step of the error-correction cycle.
#[derive(Clone, Debug, PartialEq)]
pub enum StepKind {
    /// Projective reset of all syndrome qubits plus the conditional
    /// local rotation; a wrong state is prepared with probability
    /// `p_qsp`.
    Prep,
    /// One CNOT slot; `gates` lists (control, target) global qubit
    /// pairs active in this slot.
    Cnot {
        dir: Direction,
        gates: Vec<(usize, usize)>,
    },
    /// Hadamard on every X syndrome ahead of readout (separate slot in
    /// the tunable-coupler schedules).
    LocalRotation,
    /// Syndrome readout; outcomes flip with probability `p_meas`.
    /// `includes_local` folds the pre-readout rotation into this block
    /// (the cross-resonance schedule).
    Measure { includes_local: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub kind: StepKind,
    pub duration_ns: u64,
    /// Idle-decoherence exposure of data qubits during this step.
    pub data_exposure_ns: u64,
    /// Idle-decoherence exposure of syndrome qubits during this step.
    /// Syndrome qubits are only exposed between the two local-rotation
    /// windows (2 t_loc + t_middle per cycle); errors outside that
    /// window are absorbed into `p_qsp` and `p_meas`.
    pub synd_exposure_ns: u64,
}

/// The ordered steps of one cycle for a given architecture.
#[derive(Clone, Debug)]
pub struct CycleSchedule {
    pub steps: Vec<Step>,
    pub t_cycle_ns: u64,
}

/// Assemble the per-cycle schedule. Step durations always sum to the
/// architecture's cycle time.
pub fn build_schedule(layout: &CodeLayout, m: &ArchitectureModel) -> CycleSchedule {
    let gates_for = |dir: Direction| -> Vec<(usize, usize)> {
        let mut gates = Vec::new();
        // Z syndromes are targets of data controls.
        for (i, support) in layout.z_support.iter().enumerate() {
            if let Some(data) = support[dir.index()] {
                gates.push((data, layout.z_qubit(i)));
            }
        }
        // X syndromes are controls onto data targets.
        for (i, support) in layout.x_support.iter().enumerate() {
            if let Some(data) = support[dir.index()] {
                gates.push((layout.x_qubit(i), data));
            }
        }
        gates
    };

    let mut steps = Vec::new();
    steps.push(Step {
        kind: StepKind::Prep,
        duration_ns: m.t_qsp_ns,
        data_exposure_ns: m.t_qsp_ns,
        // Only the trailing rotation window exposes the fresh syndrome.
        synd_exposure_ns: m.t_loc_ns,
    });
    for dir in CNOT_ORDER {
        let duration = m.cnot_step_durations_ns[dir.index()];
        steps.push(Step {
            kind: StepKind::Cnot {
                dir,
                gates: gates_for(dir),
            },
            duration_ns: duration,
            data_exposure_ns: duration,
            synd_exposure_ns: duration,
        });
    }
    match m.name {
        ArchName::DiVincenzo => {
            // Local rotation plus readout share one block.
            steps.push(Step {
                kind: StepKind::Measure {
                    includes_local: true,
                },
                duration_ns: m.t_loc_ns + m.t_meas_ns,
                data_exposure_ns: m.t_loc_ns + m.t_meas_ns,
                synd_exposure_ns: m.t_loc_ns,
            });
        }
        _ => {
            steps.push(Step {
                kind: StepKind::LocalRotation,
                duration_ns: m.t_loc_ns,
                data_exposure_ns: m.t_loc_ns,
                synd_exposure_ns: m.t_loc_ns,
            });
            steps.push(Step {
                kind: StepKind::Measure {
                    includes_local: false,
                },
                duration_ns: m.t_meas_ns,
                data_exposure_ns: m.t_meas_ns,
                synd_exposure_ns: 0,
            });
        }
    }
    let t_cycle_ns = steps.iter().map(|s| s.duration_ns).sum();
    debug_assert_eq!(t_cycle_ns, m.t_cycle_ns);
    CycleSchedule { steps, t_cycle_ns }
}

/// Serializable layout dump: qubit roles and coordinates, stabilizer
/// supports and logical operators.
#[derive(Serialize)]
pub struct LayoutDump {
    pub d: u32,
    pub qubits: Vec<QubitDump>,
    pub logical_x_data: Vec<usize>,
    pub logical_z_data: Vec<usize>,
}

#[derive(Serialize)]
pub struct QubitDump {
    pub index: usize,
    pub role: QubitRole,
    pub row: i32,
    pub col: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
}

pub fn layout_dump(l: &CodeLayout) -> LayoutDump {
    let mut qubits = Vec::with_capacity(l.n_qubits());
    for (i, c) in l.data_coords.iter().enumerate() {
        qubits.push(QubitDump {
            index: i,
            role: QubitRole::Data,
            row: c.row,
            col: c.col,
            support: None,
        });
    }
    for (i, c) in l.z_coords.iter().enumerate() {
        qubits.push(QubitDump {
            index: l.z_qubit(i),
            role: QubitRole::SyndromeZ,
            row: c.row,
            col: c.col,
            support: Some(l.z_support[i].iter().flatten().copied().collect()),
        });
    }
    for (i, c) in l.x_coords.iter().enumerate() {
        qubits.push(QubitDump {
            index: l.x_qubit(i),
            role: QubitRole::SyndromeX,
            row: c.row,
            col: c.col,
            support: Some(l.x_support[i].iter().flatten().copied().collect()),
        });
    }
    LayoutDump {
        d: l.d,
        qubits,
        logical_x_data: l.logical_x_support.iter_ones().collect(),
        logical_z_data: l.logical_z_support.iter_ones().collect(),
    }
}
