//! Pauli-frame Monte Carlo engine.
//!
//! A shot tracks one X and one Z bit per physical qubit (the Pauli
//! frame). Errors are sampled per circuit location from the twirled
//! channel, propagated through CNOTs and Hadamards by conjugation, and
//! read out as syndrome bits each cycle. Detection events are parity
//! changes between consecutive syndrome rounds; a final noiseless round
//! computed straight from the data frame terminates every shot so the
//! matching problem has a defined endpoint.
//!
//! The same engine serves three purposes:
//! * stochastic sampling for rate estimation ([`estimate`]);
//! * deterministic single-fault runs for decoder-graph enumeration
//!   (`forced` faults with noise off);
//! * unit-level checks of the propagation rules.

use crate::arch::{ArchitectureModel, NS};
use crate::bits::BitMask;
use crate::decoder::DecoderPair;
use crate::exec::{map_reduce, Parallelism};
use crate::lattice::{CodeLayout, CycleSchedule, StepKind};
use crate::twirl::{pta_channel, DampingParams, PauliChannel1Q};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// All 15 non-identity two-qubit Paulis as (first, second) with `None`
/// for identity, indexed consistently with `twirl::PAULI2_LABELS`.
pub fn two_qubit_pauli(index: usize) -> (Option<Pauli>, Option<Pauli>) {
    debug_assert!(index < 15);
    let lookup = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
    let k = index + 1;
    (lookup[k / 4], lookup[k % 4])
}

/// X/Z frame bits for every physical qubit. A Y error sets both bits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliFrame {
    pub x: BitMask,
    pub z: BitMask,
}

impl PauliFrame {
    pub fn new(n_qubits: usize) -> Self {
        PauliFrame {
            x: BitMask::zeros(n_qubits),
            z: BitMask::zeros(n_qubits),
        }
    }

    pub fn apply(&mut self, q: usize, p: Pauli) {
        match p {
            Pauli::X => self.x.flip(q),
            Pauli::Y => {
                self.x.flip(q);
                self.z.flip(q);
            }
            Pauli::Z => self.z.flip(q),
        }
    }

    pub fn clear_qubit(&mut self, q: usize) {
        self.x.set(q, false);
        self.z.set(q, false);
    }
}

/// CNOT conjugation: X on the control copies onto the target, Z on the
/// target copies onto the control.
#[inline]
pub fn propagate_cnot(frame: &mut PauliFrame, control: usize, target: usize) {
    debug_assert_ne!(control, target);
    if frame.x.get(control) {
        frame.x.flip(target);
    }
    if frame.z.get(target) {
        frame.z.flip(control);
    }
}

/// Hadamard conjugation: swap the X and Z bits of one qubit.
#[inline]
pub fn propagate_hadamard(frame: &mut PauliFrame, q: usize) {
    let x = frame.x.get(q);
    let z = frame.z.get(q);
    frame.x.set(q, z);
    frame.z.set(q, x);
}

fn sample_pauli<R: Rng>(rng: &mut R, ch: &PauliChannel1Q) -> Option<Pauli> {
    let u: f64 = rng.random();
    if u < ch.px {
        Some(Pauli::X)
    } else if u < ch.px + ch.py {
        Some(Pauli::Y)
    } else if u < ch.p_sigma() {
        Some(Pauli::Z)
    } else {
        None
    }
}

/// Idle decoherence on one qubit for duration `dt`: mutually exclusive
/// X/Y/Z draw with the twirled-channel probabilities.
pub fn inject_idle<R: Rng>(
    frame: &mut PauliFrame,
    q: usize,
    dt: f64,
    t1: f64,
    t2: f64,
    rng: &mut R,
) {
    if dt <= 0.0 {
        return;
    }
    let ch = pta_channel(DampingParams::new(dt, t1, t2).expect("valid damping parameters"));
    if let Some(p) = sample_pauli(rng, &ch) {
        frame.apply(q, p);
    }
}

/// Intrinsic CNOT error: with probability `p_intr` one of the 15
/// two-qubit Paulis, uniformly.
pub fn inject_cnot_intrinsic<R: Rng>(
    frame: &mut PauliFrame,
    control: usize,
    target: usize,
    p_intr: f64,
    rng: &mut R,
) {
    if p_intr > 0.0 && rng.random::<f64>() < p_intr {
        let (a, b) = two_qubit_pauli(rng.random_range(0..15));
        if let Some(p) = a {
            frame.apply(control, p);
        }
        if let Some(p) = b {
            frame.apply(target, p);
        }
    }
}

/// Visit every index in `0..n` that suffers an error, each independently
/// with probability `p`. Skips runs of error-free locations with a
/// geometric draw, so the cost scales with the number of hits.
fn sample_hits<R: Rng>(rng: &mut R, n: usize, p: f64, mut visit: impl FnMut(&mut R, usize)) {
    if p <= 0.0 || n == 0 {
        return;
    }
    if p >= 1.0 {
        for i in 0..n {
            visit(rng, i);
        }
        return;
    }
    let ln_skip = (1.0 - p).ln();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / ln_skip).floor();
        if !skip.is_finite() || skip >= (n - i) as f64 {
            return;
        }
        i += skip as usize;
        visit(rng, i);
        i += 1;
        if i >= n {
            return;
        }
    }
}

/// A circuit location at which a fault can be forced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultSite {
    /// Idle decoherence slot of `qubit` (global index) in schedule step
    /// `step`.
    Idle { step: usize, qubit: usize },
    /// Intrinsic error on gate `gate` of CNOT step `step`.
    Intrinsic { step: usize, gate: usize },
    /// Wrong-state preparation of syndrome `synd` (combined index).
    Prep { synd: usize },
    /// Classical readout flip of syndrome `synd` (combined index).
    Meas { synd: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultKind {
    One(Pauli),
    Two(usize),
    Flip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForcedFault {
    pub cycle: usize,
    pub site: FaultSite,
    pub kind: FaultKind,
}

/// Precomputed per-step channel probabilities for one `(schedule, T1)`
/// point. Exposure durations differ between data and syndrome qubits.
#[derive(Clone, Debug)]
pub struct NoiseContext {
    pub data_channels: Vec<PauliChannel1Q>,
    pub synd_channels: Vec<PauliChannel1Q>,
    pub p_intr: f64,
    pub p_qsp: f64,
    pub p_meas: f64,
    pub t1: f64,
    pub t2: f64,
}

impl NoiseContext {
    pub fn new(schedule: &CycleSchedule, model: &ArchitectureModel, t1: f64) -> Self {
        let t2 = model.t2_rule.t2_for(t1);
        let channel = |ns: u64| {
            if ns == 0 {
                PauliChannel1Q::new(0.0, 0.0, 0.0)
            } else {
                pta_channel(
                    DampingParams::new(ns as f64 * NS, t1, t2).expect("valid damping parameters"),
                )
            }
        };
        NoiseContext {
            data_channels: schedule
                .steps
                .iter()
                .map(|s| channel(s.data_exposure_ns))
                .collect(),
            synd_channels: schedule
                .steps
                .iter()
                .map(|s| channel(s.synd_exposure_ns))
                .collect(),
            p_intr: model.p_intr,
            p_qsp: model.p_qsp,
            p_meas: model.p_meas,
            t1,
            t2,
        }
    }

    /// All probabilities zero: used for forced-fault enumeration runs.
    pub fn silent(schedule: &CycleSchedule) -> Self {
        let zero = PauliChannel1Q::new(0.0, 0.0, 0.0);
        NoiseContext {
            data_channels: vec![zero; schedule.steps.len()],
            synd_channels: vec![zero; schedule.steps.len()],
            p_intr: 0.0,
            p_qsp: 0.0,
            p_meas: 0.0,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
        }
    }
}

/// Result of one Monte Carlo shot.
#[derive(Clone, Debug)]
pub struct ShotRecord {
    /// Measured syndrome bits, one mask over the combined syndrome index
    /// (Z first, then X) per cycle.
    pub syndrome_history: Vec<BitMask>,
    /// Z-type detection events as (z-syndrome index, comparison round).
    /// Round `n_cycles` is the final noiseless extraction.
    pub events_z: Vec<(usize, usize)>,
    /// X-type detection events as (x-syndrome index, comparison round).
    pub events_x: Vec<(usize, usize)>,
    /// Residual frame on data qubits after the last cycle.
    pub final_residual: PauliFrame,
}

struct Engine<'a> {
    layout: &'a CodeLayout,
    schedule: &'a CycleSchedule,
    noise: &'a NoiseContext,
}

impl<'a> Engine<'a> {
    fn forced_at<'f>(
        forced: &'f [ForcedFault],
        cycle: usize,
    ) -> impl Iterator<Item = &'f ForcedFault> {
        forced.iter().filter(move |f| f.cycle == cycle)
    }

    fn run<R: Rng>(
        &self,
        n_cycles: usize,
        rng: Option<&mut R>,
        forced: &[ForcedFault],
    ) -> ShotRecord {
        let l = self.layout;
        let n_synd = l.n_z() + l.n_x();
        let mut frame = PauliFrame::new(l.n_qubits());
        let mut history: Vec<BitMask> = Vec::with_capacity(n_cycles);
        let mut rng = rng;

        for cycle in 0..n_cycles {
            let mut outcome = BitMask::zeros(n_synd);
            for (step_idx, step) in self.schedule.steps.iter().enumerate() {
                match &step.kind {
                    StepKind::Prep => {
                        for s in 0..n_synd {
                            frame.clear_qubit(l.n_data() + s);
                        }
                        if let Some(r) = rng.as_deref_mut() {
                            let n_z = l.n_z();
                            sample_hits(r, n_synd, self.noise.p_qsp, |_, s| {
                                // A wrong |1> is an X flip on a Z syndrome;
                                // a wrong |-> is a Z flip on an X syndrome.
                                let p = if s < n_z { Pauli::X } else { Pauli::Z };
                                frame.apply(l.n_data() + s, p);
                            });
                        }
                        for f in Self::forced_at(forced, cycle) {
                            if let FaultSite::Prep { synd } = f.site {
                                let p = if synd < l.n_z() { Pauli::X } else { Pauli::Z };
                                frame.apply(l.n_data() + synd, p);
                            }
                        }
                        self.inject_step_idles(
                            &mut frame,
                            step_idx,
                            rng.as_deref_mut(),
                            forced,
                            cycle,
                        );
                    }
                    StepKind::Cnot { gates, .. } => {
                        for &(c, t) in gates {
                            propagate_cnot(&mut frame, c, t);
                        }
                        if let Some(r) = rng.as_deref_mut() {
                            sample_hits(r, gates.len(), self.noise.p_intr, |r, g| {
                                let (a, b) = two_qubit_pauli(r.random_range(0..15));
                                let (c, t) = gates[g];
                                if let Some(p) = a {
                                    frame.apply(c, p);
                                }
                                if let Some(p) = b {
                                    frame.apply(t, p);
                                }
                            });
                        }
                        for f in Self::forced_at(forced, cycle) {
                            if let FaultSite::Intrinsic { step, gate } = f.site {
                                if step == step_idx {
                                    if let FaultKind::Two(idx) = f.kind {
                                        let (a, b) = two_qubit_pauli(idx);
                                        let (c, t) = gates[gate];
                                        if let Some(p) = a {
                                            frame.apply(c, p);
                                        }
                                        if let Some(p) = b {
                                            frame.apply(t, p);
                                        }
                                    }
                                }
                            }
                        }
                        self.inject_step_idles(
                            &mut frame,
                            step_idx,
                            rng.as_deref_mut(),
                            forced,
                            cycle,
                        );
                    }
                    StepKind::LocalRotation => {
                        // Idle slots are injected before the rotation so
                        // that phase errors in this window flip the
                        // coming readout, matching the 2 t_loc + t_mid
                        // syndrome exposure budget.
                        self.inject_step_idles(
                            &mut frame,
                            step_idx,
                            rng.as_deref_mut(),
                            forced,
                            cycle,
                        );
                        for i in 0..l.n_x() {
                            propagate_hadamard(&mut frame, l.x_qubit(i));
                        }
                        self.read_outcomes(&frame, &mut outcome);
                    }
                    StepKind::Measure { includes_local } => {
                        if *includes_local {
                            self.inject_synd_idles(
                                &mut frame,
                                step_idx,
                                rng.as_deref_mut(),
                                forced,
                                cycle,
                            );
                            for i in 0..l.n_x() {
                                propagate_hadamard(&mut frame, l.x_qubit(i));
                            }
                            self.read_outcomes(&frame, &mut outcome);
                        }
                        // Classical readout flips on the recorded bits.
                        if let Some(r) = rng.as_deref_mut() {
                            sample_hits(r, n_synd, self.noise.p_meas, |_, s| {
                                outcome.flip(s);
                            });
                        }
                        for f in Self::forced_at(forced, cycle) {
                            if let FaultSite::Meas { synd } = f.site {
                                outcome.flip(synd);
                            }
                        }
                        // Data decoherence during readout lands after
                        // this cycle's measurement.
                        self.inject_data_idles(
                            &mut frame,
                            step_idx,
                            rng.as_deref_mut(),
                            forced,
                            cycle,
                        );
                    }
                }
            }
            history.push(outcome);
        }

        // Final noiseless stabilizer round straight from the data frame.
        let mut final_parities = BitMask::zeros(n_synd);
        for i in 0..l.n_z() {
            let mut par = false;
            for &q in l.z_support[i].iter().flatten() {
                par ^= frame.x.get(q);
            }
            final_parities.set(i, par);
        }
        for i in 0..l.n_x() {
            let mut par = false;
            for &q in l.x_support[i].iter().flatten() {
                par ^= frame.z.get(q);
            }
            final_parities.set(l.n_z() + i, par);
        }

        // Detection events: parity changes between consecutive rounds,
        // with an all-zero reference before cycle 0.
        let mut events_z = Vec::new();
        let mut events_x = Vec::new();
        let mut prev = BitMask::zeros(n_synd);
        for (c, row) in history
            .iter()
            .chain(std::iter::once(&final_parities))
            .enumerate()
        {
            for s in 0..n_synd {
                if row.get(s) != prev.get(s) {
                    if s < l.n_z() {
                        events_z.push((s, c));
                    } else {
                        events_x.push((s - l.n_z(), c));
                    }
                }
            }
            prev.clone_from(row);
        }

        let mut final_residual = PauliFrame::new(l.n_data());
        for q in 0..l.n_data() {
            final_residual.x.set(q, frame.x.get(q));
            final_residual.z.set(q, frame.z.get(q));
        }

        ShotRecord {
            syndrome_history: history,
            events_z,
            events_x,
            final_residual,
        }
    }

    fn read_outcomes(&self, frame: &PauliFrame, outcome: &mut BitMask) {
        let l = self.layout;
        for s in 0..l.n_z() + l.n_x() {
            outcome.set(s, frame.x.get(l.n_data() + s));
        }
    }

    fn inject_data_idles<R: Rng>(
        &self,
        frame: &mut PauliFrame,
        step_idx: usize,
        rng: Option<&mut R>,
        forced: &[ForcedFault],
        cycle: usize,
    ) {
        let l = self.layout;
        if let Some(r) = rng {
            let ch = &self.noise.data_channels[step_idx];
            let (px, py, psum) = (ch.px, ch.py, ch.p_sigma());
            sample_hits(r, l.n_data(), psum, |r, q| {
                let v: f64 = r.random::<f64>() * psum;
                let p = if v < px {
                    Pauli::X
                } else if v < px + py {
                    Pauli::Y
                } else {
                    Pauli::Z
                };
                frame.apply(q, p);
            });
        }
        for f in Engine::forced_at(forced, cycle) {
            if let FaultSite::Idle { step, qubit } = f.site {
                if step == step_idx && qubit < l.n_data() {
                    if let FaultKind::One(p) = f.kind {
                        frame.apply(qubit, p);
                    }
                }
            }
        }
    }

    fn inject_synd_idles<R: Rng>(
        &self,
        frame: &mut PauliFrame,
        step_idx: usize,
        rng: Option<&mut R>,
        forced: &[ForcedFault],
        cycle: usize,
    ) {
        let l = self.layout;
        let n_synd = l.n_z() + l.n_x();
        if let Some(r) = rng {
            let ch = &self.noise.synd_channels[step_idx];
            let (px, py, psum) = (ch.px, ch.py, ch.p_sigma());
            sample_hits(r, n_synd, psum, |r, s| {
                let v: f64 = r.random::<f64>() * psum;
                let p = if v < px {
                    Pauli::X
                } else if v < px + py {
                    Pauli::Y
                } else {
                    Pauli::Z
                };
                frame.apply(l.n_data() + s, p);
            });
        }
        for f in Engine::forced_at(forced, cycle) {
            if let FaultSite::Idle { step, qubit } = f.site {
                if step == step_idx && qubit >= l.n_data() {
                    if let FaultKind::One(p) = f.kind {
                        frame.apply(qubit, p);
                    }
                }
            }
        }
    }

    fn inject_step_idles<R: Rng>(
        &self,
        frame: &mut PauliFrame,
        step_idx: usize,
        mut rng: Option<&mut R>,
        forced: &[ForcedFault],
        cycle: usize,
    ) {
        self.inject_data_idles(frame, step_idx, rng.as_deref_mut(), forced, cycle);
        self.inject_synd_idles(frame, step_idx, rng, forced, cycle);
    }
}

/// Run one shot with stochastic noise, deterministic in `rng`.
pub fn run_shot<R: Rng>(
    layout: &CodeLayout,
    schedule: &CycleSchedule,
    noise: &NoiseContext,
    n_cycles: usize,
    rng: &mut R,
) -> ShotRecord {
    Engine {
        layout,
        schedule,
        noise,
    }
    .run(n_cycles, Some(rng), &[])
}

/// Run one noiseless shot with the given faults forced in. Used by the
/// decoder-graph enumeration and by tests.
pub fn run_forced(
    layout: &CodeLayout,
    schedule: &CycleSchedule,
    n_cycles: usize,
    forced: &[ForcedFault],
) -> ShotRecord {
    let silent = NoiseContext::silent(schedule);
    Engine {
        layout,
        schedule,
        noise: &silent,
    }
    .run::<ChaCha8Rng>(n_cycles, None, forced)
}

/// Default cycle count: long enough that timelike boundary effects are
/// subdominant, short enough for desk-scale runtime.
pub fn default_n_cycles(d: u32) -> usize {
    10 * d as usize
}

/// Logical error rate estimate at one `(architecture, d, T1)` point.
#[derive(Clone, Debug, PartialEq)]
pub struct RatePoint {
    pub arch: String,
    pub d: u32,
    pub t1_us: f64,
    pub shots: u64,
    pub n_cycles: usize,
    pub logical_x_failures: u64,
    pub logical_z_failures: u64,
    pub p_xl_per_cycle: f64,
    pub p_xl_err: f64,
    pub p_zl_per_cycle: f64,
    pub p_zl_err: f64,
}

/// Convert a whole-shot failure probability into a per-cycle rate.
pub fn per_cycle_rate(p_total: f64, n_cycles: usize) -> f64 {
    1.0 - (1.0 - p_total).powf(1.0 / n_cycles as f64)
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Monte Carlo estimate of the per-cycle logical X and Z error rates.
///
/// Every shot derives its RNG substream from `(seed, shot index)`, so
/// the result is bit-identical for a fixed seed regardless of the
/// execution strategy or thread count.
#[allow(clippy::too_many_arguments)]
pub fn estimate(
    layout: &CodeLayout,
    schedule: &CycleSchedule,
    model: &ArchitectureModel,
    t1: f64,
    shots: u64,
    n_cycles: usize,
    decoders: &DecoderPair,
    seed: u64,
    par: Parallelism,
) -> RatePoint {
    let noise = NoiseContext::new(schedule, model, t1);
    let (x_fails, z_fails) = map_reduce(
        par,
        shots,
        || (0u64, 0u64),
        |shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot);
            let rec = run_shot(layout, schedule, &noise, n_cycles, &mut rng);
            let (fx, fz) = shot_failures(layout, decoders, &rec);
            (fx as u64, fz as u64)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let p_x_total = x_fails as f64 / shots as f64;
    let p_z_total = z_fails as f64 / shots as f64;
    // Delta-method error propagation through the per-cycle transform.
    let dtransform = |p: f64| (1.0 - p).powf(1.0 / n_cycles as f64 - 1.0) / n_cycles as f64;
    RatePoint {
        arch: model.name.to_string(),
        d: layout.d,
        t1_us: t1 * 1e6,
        shots,
        n_cycles,
        logical_x_failures: x_fails,
        logical_z_failures: z_fails,
        p_xl_per_cycle: per_cycle_rate(p_x_total, n_cycles),
        p_xl_err: binomial_se(p_x_total, shots) * dtransform(p_x_total),
        p_zl_per_cycle: per_cycle_rate(p_z_total, n_cycles),
        p_zl_err: binomial_se(p_z_total, shots) * dtransform(p_z_total),
    }
}

/// Decode one shot and report (logical X failure, logical Z failure).
///
/// A logical X failure is a net bit-flip chain (residual plus
/// correction) that anticommutes with the logical Z operator, and
/// symmetrically for Z.
pub fn shot_failures(
    layout: &CodeLayout,
    decoders: &DecoderPair,
    rec: &ShotRecord,
) -> (bool, bool) {
    let corr_x = decoders.z.decode(&rec.events_z).correction;
    let corr_z = decoders.x.decode(&rec.events_x).correction;
    let mut net_x = rec.final_residual.x.clone();
    net_x.xor_assign(&corr_x);
    let mut net_z = rec.final_residual.z.clone();
    net_z.xor_assign(&corr_z);
    (
        net_x.odd_overlap(&layout.logical_z_support),
        net_z.odd_overlap(&layout.logical_x_support),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{preset, ArchName};
    use crate::lattice::{build_layout, build_schedule, Direction};

    fn setup(d: u32, name: ArchName) -> (CodeLayout, CycleSchedule) {
        let layout = build_layout(d).unwrap();
        let schedule = build_schedule(&layout, &preset(name));
        (layout, schedule)
    }

    #[test]
    fn cnot_conjugation_rules() {
        let mut f = PauliFrame::new(2);
        f.apply(0, Pauli::X);
        propagate_cnot(&mut f, 0, 1);
        assert!(f.x.get(0) && f.x.get(1), "X on control copies to target");

        let mut f = PauliFrame::new(2);
        f.apply(1, Pauli::Z);
        propagate_cnot(&mut f, 0, 1);
        assert!(f.z.get(0) && f.z.get(1), "Z on target copies to control");

        let mut f = PauliFrame::new(2);
        f.apply(1, Pauli::X);
        propagate_cnot(&mut f, 0, 1);
        assert!(!f.x.get(0) && f.x.get(1), "X on target unchanged");
    }

    #[test]
    fn hadamard_swaps_xz() {
        let mut f = PauliFrame::new(1);
        f.apply(0, Pauli::X);
        propagate_hadamard(&mut f, 0);
        assert!(!f.x.get(0) && f.z.get(0), "X becomes Z");
        propagate_hadamard(&mut f, 0);
        assert!(f.x.get(0) && !f.z.get(0), "Z becomes X");

        let mut f = PauliFrame::new(1);
        f.apply(0, Pauli::Y);
        propagate_hadamard(&mut f, 0);
        assert!(f.x.get(0) && f.z.get(0), "Y is invariant");
    }

    #[test]
    fn noiseless_shot_is_silent() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        let rec = run_forced(&layout, &schedule, 5, &[]);
        assert!(rec.events_z.is_empty() && rec.events_x.is_empty());
        assert!(!rec.final_residual.x.any() && !rec.final_residual.z.any());
    }

    /// Bulk data X fault during the prep step: both adjacent Z syndromes
    /// fire in the same cycle.
    #[test]
    fn bulk_data_x_fires_two_adjacent_z_events() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        // Center data qubit of the d = 3 patch.
        let center = layout
            .data_coords
            .iter()
            .position(|c| c.row == 2 && c.col == 2)
            .unwrap();
        let rec = run_forced(
            &layout,
            &schedule,
            4,
            &[ForcedFault {
                cycle: 1,
                site: FaultSite::Idle {
                    step: 0,
                    qubit: center,
                },
                kind: FaultKind::One(Pauli::X),
            }],
        );
        assert_eq!(rec.events_z.len(), 2, "events: {:?}", rec.events_z);
        assert!(rec.events_z.iter().all(|&(_, c)| c == 1));
        assert!(rec.events_x.is_empty());
        for &(s, _) in &rec.events_z {
            assert!(layout.z_support[s].iter().flatten().any(|&q| q == center));
        }
    }

    /// A measurement flip produces two timelike events on the same
    /// syndrome in consecutive rounds.
    #[test]
    fn measurement_error_fires_timelike_pair() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        let rec = run_forced(
            &layout,
            &schedule,
            4,
            &[ForcedFault {
                cycle: 1,
                site: FaultSite::Meas { synd: 2 },
                kind: FaultKind::Flip,
            }],
        );
        assert_eq!(rec.events_z, vec![(2, 1), (2, 2)]);
        assert!(rec.events_x.is_empty());
        assert!(!rec.final_residual.x.any());
    }

    /// Measurement flip in the last cycle pairs with the final noiseless
    /// round.
    #[test]
    fn late_measurement_error_pairs_with_final_round() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        let n = 4;
        let rec = run_forced(
            &layout,
            &schedule,
            n,
            &[ForcedFault {
                cycle: n - 1,
                site: FaultSite::Meas { synd: 0 },
                kind: FaultKind::Flip,
            }],
        );
        assert_eq!(rec.events_z, vec![(0, n - 1), (0, n)]);
    }

    /// A prep error on an X syndrome is a phase flip and shows up in the
    /// X-type events, not the Z-type ones.
    #[test]
    fn prep_error_on_x_syndrome_is_phase_type() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        let synd = layout.n_z() + 1;
        let rec = run_forced(
            &layout,
            &schedule,
            4,
            &[ForcedFault {
                cycle: 1,
                site: FaultSite::Prep { synd },
                kind: FaultKind::Flip,
            }],
        );
        assert!(rec.events_z.is_empty());
        assert_eq!(rec.events_x, vec![(1, 1), (1, 2)]);
    }

    /// Pauli frames compose by XOR: two faults injected together produce
    /// the symmetric difference of their individual event sets.
    #[test]
    fn forced_faults_compose_linearly() {
        use std::collections::BTreeSet;
        let (layout, schedule) = setup(3, ArchName::Textbook);
        let f1 = ForcedFault {
            cycle: 1,
            site: FaultSite::Idle { step: 2, qubit: 4 },
            kind: FaultKind::One(Pauli::Y),
        };
        let f2 = ForcedFault {
            cycle: 2,
            site: FaultSite::Meas { synd: 3 },
            kind: FaultKind::Flip,
        };
        let e1 = run_forced(&layout, &schedule, 5, &[f1]);
        let e2 = run_forced(&layout, &schedule, 5, &[f2]);
        let both = run_forced(&layout, &schedule, 5, &[f1, f2]);
        let sym_diff = |a: &[(usize, usize)], b: &[(usize, usize)]| {
            let mut s: BTreeSet<(usize, usize)> = a.iter().copied().collect();
            for e in b {
                if !s.remove(e) {
                    s.insert(*e);
                }
            }
            s
        };
        assert_eq!(
            both.events_z.iter().copied().collect::<BTreeSet<_>>(),
            sym_diff(&e1.events_z, &e2.events_z)
        );
        assert_eq!(
            both.events_x.iter().copied().collect::<BTreeSet<_>>(),
            sym_diff(&e1.events_x, &e2.events_x)
        );
    }

    /// Single intrinsic faults never spray more than a handful of events
    /// per graph; the decoder's edge decomposition depends on this.
    #[test]
    fn intrinsic_fault_event_counts_are_small() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        for step in 1..=4 {
            let n_gates = match &schedule.steps[step].kind {
                StepKind::Cnot { gates, .. } => gates.len(),
                _ => panic!("step {step} is not a CNOT step"),
            };
            for gate in 0..n_gates {
                for idx in 0..15 {
                    let rec = run_forced(
                        &layout,
                        &schedule,
                        4,
                        &[ForcedFault {
                            cycle: 1,
                            site: FaultSite::Intrinsic { step, gate },
                            kind: FaultKind::Two(idx),
                        }],
                    );
                    assert!(
                        rec.events_z.len() <= 4 && rec.events_x.len() <= 4,
                        "step {step} gate {gate} pauli {idx}: {:?} {:?}",
                        rec.events_z,
                        rec.events_x,
                    );
                }
            }
        }
    }

    #[test]
    fn determinism_same_seed_same_record() {
        let (layout, schedule) = setup(3, ArchName::Textbook);
        let model = preset(ArchName::Textbook);
        let noise = NoiseContext::new(&schedule, &model, 3e-6);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_shot(&layout, &schedule, &noise, 10, &mut rng)
        };
        let a = run(7);
        let b = run(7);
        assert_eq!(a.syndrome_history, b.syndrome_history);
        assert_eq!(a.final_residual, b.final_residual);
        let c = run(8);
        assert!(c.syndrome_history != a.syndrome_history || c.final_residual != a.final_residual);
    }

    /// Empirical frequencies of inject_idle over 1e6 draws match the
    /// closed-form channel within 5 sigma.
    #[test]
    fn idle_injection_frequencies() {
        let n = 1_000_000;
        let (t, t1, t2) = (400e-9, 10e-6, 20e-6);
        let ch = pta_channel(DampingParams::new(t, t1, t2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let mut f = PauliFrame::new(1);
            inject_idle(&mut f, 0, t, t1, t2, &mut rng);
            match (f.x.get(0), f.z.get(0)) {
                (true, false) => counts[0] += 1,
                (true, true) => counts[1] += 1,
                (false, true) => counts[2] += 1,
                (false, false) => {}
            }
        }
        for (count, p) in counts.iter().zip([ch.px, ch.py, ch.pz]) {
            let mean = n as f64 * p;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (*count as f64 - mean).abs() < 5.0 * sigma,
                "count {count} vs mean {mean} (sigma {sigma})"
            );
        }
    }

    /// With T2 = T1 the X/Y/Z frequencies are statistically
    /// indistinguishable (chi-square on the conditional distribution).
    #[test]
    fn idle_injection_symmetric_channel() {
        let n = 300_000;
        let (t, t1) = (400e-9, 10e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let mut f = PauliFrame::new(1);
            inject_idle(&mut f, 0, t, t1, t1, &mut rng);
            match (f.x.get(0), f.z.get(0)) {
                (true, false) => counts[0] += 1,
                (true, true) => counts[1] += 1,
                (false, true) => counts[2] += 1,
                (false, false) => {}
            }
        }
        let total: u64 = counts.iter().sum();
        let expect = total as f64 / 3.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        // 2 degrees of freedom; the p = 0.001 cutoff is 13.8.
        assert!(chi2 < 13.8, "chi2 = {chi2}, counts {counts:?}");
    }

    /// Intrinsic-error marginal: the per-qubit bit-flip frequency is
    /// 8 p / 15, and the 15 labels are uniform (both at 5 sigma).
    #[test]
    fn intrinsic_injection_frequencies() {
        let n = 1_000_000u64;
        let p_intr = 0.3;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut label_counts = [0u64; 16];
        let mut control_bitflips = 0u64;
        for _ in 0..n {
            let mut f = PauliFrame::new(2);
            inject_cnot_intrinsic(&mut f, 0, 1, p_intr, &mut rng);
            let code = |x: bool, z: bool| match (x, z) {
                (false, false) => 0usize,
                (true, false) => 1,
                (true, true) => 2,
                (false, true) => 3,
            };
            let a = code(f.x.get(0), f.z.get(0));
            let b = code(f.x.get(1), f.z.get(1));
            label_counts[4 * a + b] += 1;
            if f.x.get(0) {
                control_bitflips += 1;
            }
        }
        let p_bf = 8.0 * p_intr / 15.0;
        let mean_bf = n as f64 * p_bf;
        let sigma_bf = (n as f64 * p_bf * (1.0 - p_bf)).sqrt();
        assert!((control_bitflips as f64 - mean_bf).abs() < 5.0 * sigma_bf);
        let per_label = n as f64 * p_intr / 15.0;
        let sigma_label = (n as f64 * (p_intr / 15.0) * (1.0 - p_intr / 15.0)).sqrt();
        for (k, &c) in label_counts.iter().enumerate().skip(1) {
            assert!(
                (c as f64 - per_label).abs() < 5.0 * sigma_label,
                "label {k}: {c} vs {per_label}"
            );
        }
    }

    #[test]
    fn geometric_skip_sampling_is_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (n, p, reps) = (50usize, 0.037, 200_000usize);
        let mut hits = vec![0u64; n];
        for _ in 0..reps {
            sample_hits(&mut rng, n, p, |_, i| hits[i] += 1);
        }
        let mean = reps as f64 * p;
        let sigma = (reps as f64 * p * (1.0 - p)).sqrt();
        for (i, &h) in hits.iter().enumerate() {
            assert!(
                (h as f64 - mean).abs() < 5.0 * sigma,
                "position {i}: {h} vs {mean}"
            );
        }
    }

    #[test]
    fn schedule_has_expected_cnot_steps() {
        let (_, schedule) = setup(3, ArchName::Textbook);
        let dirs: Vec<Direction> = schedule
            .steps
            .iter()
            .filter_map(|s| match &s.kind {
                StepKind::Cnot { dir, .. } => Some(*dir),
                _ => None,
            })
            .collect();
        assert_eq!(
            dirs,
            vec![
                Direction::North,
                Direction::West,
                Direction::East,
                Direction::South
            ]
        );
    }
}
