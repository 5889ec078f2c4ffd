//! Surface-code quantum memory simulator for superconducting architectures.
//!
//! The crate converts physical qubit decoherence (`T1`, `T2`) and gate,
//! preparation and measurement errors into per-cycle logical X/Z error
//! rates, for three hardware models of an error-corrected quantum memory.
//! It has four largely independent layers:
//!
//! * [`twirl`] — maps amplitude/phase damping onto a diagonal Pauli channel
//!   (the asymmetric depolarization channel) and verifies the mapping
//!   against a brute-force density-matrix evolution.
//! * [`arch`] + [`lattice`] — the hardware parameter presets, the cycle
//!   schedule, and the distance-`d` surface-code layout.
//! * [`sim`] + [`decoder`] — a Pauli-frame Monte Carlo engine and a
//!   minimum-weight perfect-matching decoder whose space-time graph is
//!   built by exhaustive single-fault enumeration.
//! * [`analytic`] + [`gatesim`] — a closed-form leading-order logical
//!   error estimator, and a two-qutrit density-matrix simulation of the
//!   CZ gate used to justify the intrinsic-error budget.
//!
//! Monte Carlo shots are embarrassingly parallel; with the `parallel`
//! feature (default) they are distributed with rayon, and results are
//! bit-identical for a fixed seed regardless of thread count because
//! every shot owns a counter-derived RNG substream.

pub mod analytic;
pub mod arch;
pub mod bits;
pub mod cli;
pub mod decoder;
pub mod exec;
pub mod gatesim;
pub mod lattice;
pub mod sim;
pub mod twirl;
