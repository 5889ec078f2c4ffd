//! Hardware parameter presets for the three architectures and the
//! per-cycle bit/phase-flip error composition derived from them.
//!
//! Durations are stored in integer nanoseconds so that schedule sums are
//! exact; they are converted to seconds only at the channel-evaluation
//! boundary.

use crate::twirl::{pta_channel, DampingParams, TwirlError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ArchError {
    #[error("unknown architecture preset '{0}' (expected textbook, helmer or divincenzo)")]
    UnknownPreset(String),
    #[error(transparent)]
    Channel(#[from] TwirlError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchName {
    Textbook,
    Helmer,
    DiVincenzo,
}

impl std::fmt::Display for ArchName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArchName::Textbook => "textbook",
            ArchName::Helmer => "helmer",
            ArchName::DiVincenzo => "divincenzo",
        })
    }
}

impl std::str::FromStr for ArchName {
    type Err = ArchError;
    fn from_str(s: &str) -> Result<Self, ArchError> {
        match s.to_ascii_lowercase().as_str() {
            "textbook" => Ok(ArchName::Textbook),
            "helmer" => Ok(ArchName::Helmer),
            "divincenzo" => Ok(ArchName::DiVincenzo),
            other => Err(ArchError::UnknownPreset(other.into())),
        }
    }
}

/// Rule tying the dephasing time to the relaxation time: tunable
/// transmons lose `T2` to flux noise (`T2 = T1`), fixed-frequency ones
/// reach the `T2 = 2 T1` limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T2Rule {
    EqualT1,
    TwiceT1,
}

impl T2Rule {
    pub fn t2_for(&self, t1: f64) -> f64 {
        match self {
            T2Rule::EqualT1 => t1,
            T2Rule::TwiceT1 => 2.0 * t1,
        }
    }
}

/// One architecture's parameter set: cycle step timings plus intrinsic,
/// measurement and preparation error probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureModel {
    pub name: ArchName,
    pub t2_rule: T2Rule,
    /// Default `T1` sweep range in microseconds; user-overridable.
    pub t1_range_us: (f64, f64),
    pub t_qsp_ns: u64,
    pub t_loc_ns: u64,
    pub t_meas_ns: u64,
    pub t_cnot_ns: u64,
    pub t_cycle_ns: u64,
    /// Durations of the four CNOT steps in north, west, east, south order.
    pub cnot_step_durations_ns: [u64; 4],
    /// Intrinsic (non-decoherence) CNOT error, distributed uniformly over
    /// the 15 two-qubit Paulis.
    pub p_intr: f64,
    pub p_meas: f64,
    pub p_qsp: f64,
}

impl ArchitectureModel {
    /// Schedule-sum invariant: preparation + CNOT steps + local rotation
    /// + readout fill the cycle exactly. For the DiVincenzo schedule the
    /// local rotation is folded into a 40 ns readout block but still
    /// contributes its 5 ns here.
    pub fn schedule_sum_ns(&self) -> u64 {
        let cnots: u64 = self.cnot_step_durations_ns.iter().sum();
        self.t_qsp_ns + cnots + self.t_loc_ns + self.t_meas_ns
    }

    pub fn t_middle_ns(&self) -> u64 {
        self.t_cycle_ns - (self.t_qsp_ns + self.t_loc_ns + self.t_meas_ns)
    }

    /// Marginal probability that one qubit of a CNOT pair suffers a bit
    /// flip (or phase flip) from the intrinsic error: 8/15 of `p_intr`.
    pub fn intrinsic_flip_probability(&self) -> f64 {
        8.0 * self.p_intr / 15.0
    }
}

/// Per-cycle flip probabilities entering the leading-order analytics:
/// `p_*` for data qubits, `q_*` for syndrome qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleErrorRates {
    pub p_bf: f64,
    pub q_bf: f64,
    pub p_pf: f64,
    pub q_pf: f64,
    pub t_middle_ns: u64,
}

/// Table of assumed parameters for the three architectures.
pub fn preset(name: ArchName) -> ArchitectureModel {
    match name {
        ArchName::Textbook => ArchitectureModel {
            name,
            t2_rule: T2Rule::EqualT1,
            t1_range_us: (1.0, 10.0),
            t_qsp_ns: 40,
            t_loc_ns: 5,
            t_meas_ns: 35,
            t_cnot_ns: 21,
            t_cycle_ns: 164,
            cnot_step_durations_ns: [21, 21, 21, 21],
            p_intr: 1e-4,
            p_meas: 1e-2,
            p_qsp: 1e-2,
        },
        ArchName::Helmer => ArchitectureModel {
            name,
            t2_rule: T2Rule::EqualT1,
            t1_range_us: (1.0, 10.0),
            t_qsp_ns: 40,
            t_loc_ns: 5,
            t_meas_ns: 35,
            t_cnot_ns: 20,
            t_cycle_ns: 160,
            cnot_step_durations_ns: [20, 20, 20, 20],
            p_intr: 1e-3,
            p_meas: 1e-2,
            p_qsp: 1e-2,
        },
        ArchName::DiVincenzo => ArchitectureModel {
            name,
            t2_rule: T2Rule::TwiceT1,
            t1_range_us: (1.0, 40.0),
            t_qsp_ns: 40,
            t_loc_ns: 5,
            t_meas_ns: 35,
            t_cnot_ns: 20,
            t_cycle_ns: 400,
            // Cross-resonance CNOTs with pre- and post-SWAPs folded in.
            cnot_step_durations_ns: [100, 60, 60, 100],
            p_intr: 1e-3,
            p_meas: 1e-2,
            p_qsp: 1e-2,
        },
    }
}

pub fn preset_by_name(name: &str) -> Result<ArchitectureModel, ArchError> {
    Ok(preset(name.parse()?))
}

/// Per-cycle bit/phase-flip error budget:
///
/// ```text
/// p_bf = p_x(t_cycle) + p_y(t_cycle) + 4 * (8 p_intr / 15)
/// q_bf = p_qsp + p_x(t_mid) + p_y(t_mid) + p_meas + 4 * (8 p_intr / 15)
/// p_pf = p_z(t_cycle) + p_y(t_cycle) + 4 * (8 p_intr / 15)
/// q_pf = p_qsp + p_z(2 t_loc + t_mid) + p_y(2 t_loc + t_mid)
///        + p_meas + 4 * (8 p_intr / 15)
/// ```
///
/// with `t_mid = t_cycle - (t_qsp + t_loc + t_meas)`. The syndrome
/// phase-flip window includes the two local-rotation slots because the
/// syndrome qubit is phase-sensitive during them.
pub fn cycle_error_rates(m: &ArchitectureModel, t1: f64) -> Result<CycleErrorRates, ArchError> {
    let t2 = m.t2_rule.t2_for(t1);
    let ch = |t_ns: u64| -> Result<_, ArchError> {
        Ok(pta_channel(DampingParams::new(t_ns as f64 * NS, t1, t2)?))
    };
    let t_mid = m.t_middle_ns();
    let cycle = ch(m.t_cycle_ns)?;
    let mid = ch(t_mid)?;
    let loc2_mid = ch(2 * m.t_loc_ns + t_mid)?;
    let intr = 4.0 * m.intrinsic_flip_probability();
    Ok(CycleErrorRates {
        p_bf: cycle.px + cycle.py + intr,
        q_bf: m.p_qsp + mid.px + mid.py + m.p_meas + intr,
        p_pf: cycle.pz + cycle.py + intr,
        q_pf: m.p_qsp + loc2_mid.pz + loc2_mid.py + m.p_meas + intr,
        t_middle_ns: t_mid,
    })
}
