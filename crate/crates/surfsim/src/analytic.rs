//! Leading-order closed-form estimate of the logical error rate per
//! cycle, and threshold extraction from rate-vs-T1 curves.
//!
//! A logical X failure needs `(d+1)/2` bit flips that the matching
//! decoder completes into a boundary-to-boundary chain. Three chain
//! families contribute at leading order: a straight single-row chain
//! ([`case1`]), a chain broken across two adjacent rows ([`case2`]), and
//! a chain broken across two time slices, where the breaking point is a
//! syndrome-measurement error ([`case3`]). The combined bracket is
//! evaluated by [`p_xl`]; logical Z uses the same combinatorics on the
//! phase-flip rates.
//!
//! The estimate ignores diagonal error chains seeded by CNOT
//! propagation, so it underpredicts circuit-level Monte Carlo rates,
//! increasingly so at larger distance.

use crate::arch::CycleErrorRates;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("distance must be odd and >= 3, got {0}")]
    BadDistance(u32),
    #[error("curves share no common T1 grid")]
    GridMismatch,
}

/// Per-cycle flip probabilities feeding the estimator: `p` on data
/// qubits, `q` on syndrome qubits. Instantiated once with the bit-flip
/// pair for logical X and once with the phase-flip pair for logical Z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlipRates {
    pub p: f64,
    pub q: f64,
}

impl FlipRates {
    pub fn bit_flip(r: &CycleErrorRates) -> Self {
        FlipRates {
            p: r.p_bf,
            q: r.q_bf,
        }
    }

    pub fn phase_flip(r: &CycleErrorRates) -> Self {
        FlipRates {
            p: r.p_pf,
            q: r.q_pf,
        }
    }
}

fn check_distance(d: u32) -> Result<(), AnalyticError> {
    if d < 3 || d % 2 == 0 {
        return Err(AnalyticError::BadDistance(d));
    }
    Ok(())
}

/// Exact integer binomial coefficient; `d <= 15` keeps this far inside
/// u128 range.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Straight chains: `(d+1)/2` data flips filling one row, possible in
/// any of the `d` rows.
pub fn case1(d: u32, p: f64) -> Result<f64, AnalyticError> {
    check_distance(d)?;
    let choose = binomial(d, (d + 1) / 2) as f64;
    Ok(d as f64 * choose * p.powi(((d + 1) / 2) as i32))
}

/// Broken-chain count for the subcase with one error on a horizontal
/// link: all chains minus the clasps that return to the same boundary.
pub fn w1(d: u32) -> Result<u128, AnalyticError> {
    check_distance(d)?;
    let num = (d as u128 * d as u128 - 1) * binomial(d, (d - 1) / 2);
    debug_assert_eq!(num % (d as u128 + 3), 0);
    Ok(num / (d as u128 + 3))
}

/// Broken-chain count for the subcase with no horizontal-link errors:
/// all chains minus the ones that coincide with straight chains.
pub fn w2(d: u32) -> Result<u128, AnalyticError> {
    check_distance(d)?;
    Ok((d as u128 - 1) / 2 * binomial(d, (d - 1) / 2))
}

/// Chains broken across two adjacent rows. The factor 1/2 is the
/// misidentification probability, the factor 2 the chain orientation,
/// and `d - 1` the number of adjacent row pairs.
pub fn case2(d: u32, p: f64) -> Result<f64, AnalyticError> {
    let w = (w1(d)? + w2(d)?) as f64;
    Ok(0.5 * 2.0 * (d as f64 - 1.0) * w * p.powi(((d + 1) / 2) as i32))
}

/// Chains broken across two time slices: either one measurement error
/// plus `(d-1)/2` data flips, or `(d+1)/2` data flips split over the two
/// slices. The row can be chosen in `d` ways.
///
/// The `q`-term is evaluated as `q * p^{(d-1)/2}` directly, avoiding the
/// 0/0 ambiguity of the published `q/p` ratio form at `p = 0`.
pub fn case3(d: u32, rates: FlipRates) -> Result<f64, AnalyticError> {
    check_distance(d)?;
    let df = d as f64;
    let choose = binomial(d, (d - 1) / 2) as f64;
    let half_pow = rates.p.powi(((d - 1) / 2) as i32);
    let meas_term = (df * df - 1.0) / (df + 3.0) * rates.q * half_pow;
    let data_term = (df - 1.0) / 2.0 * rates.p * half_pow;
    Ok(df * choose * (meas_term + data_term))
}

/// Logical X error probability per cycle: the sum of the three chain
/// families, algebraically equal to the single bracketed expression
///
/// ```text
/// [ d + (d-1)^2 (3d+5) / (2(d+3)) + d ((d^2-1)/(d+3) q/p + (d-1)/2) ]
///   * C(d, (d-1)/2) * p^{(d+1)/2}
/// ```
pub fn p_xl(d: u32, rates: FlipRates) -> Result<f64, AnalyticError> {
    Ok(case1(d, rates.p)? + case2(d, rates.p)? + case3(d, rates)?)
}

/// Logical Z error probability per cycle: same combinatorics applied to
/// the phase-flip rates.
pub fn p_zl(d: u32, rates: FlipRates) -> Result<f64, AnalyticError> {
    p_xl(d, rates)
}

/// The published single-bracket form of the estimator. Kept separate so
/// tests can pin the term-by-term decomposition against it.
pub fn p_xl_bracket(d: u32, rates: FlipRates) -> Result<f64, AnalyticError> {
    check_distance(d)?;
    let df = d as f64;
    let choose = binomial(d, (d - 1) / 2) as f64;
    let ratio = if rates.p == 0.0 {
        0.0
    } else {
        rates.q / rates.p
    };
    let bracket = df
        + (df - 1.0) * (3.0 * df + 5.0) * (df - 1.0) / (2.0 * (df + 3.0))
        + df * ((df * df - 1.0) / (df + 3.0) * ratio + (df - 1.0) / 2.0);
    Ok(bracket * choose * rates.p.powi(((d + 1) / 2) as i32))
}

/// Convert a per-cycle data bit-flip probability to the single-qubit
/// error rate per timestep of an eight-step reference cycle.
pub fn p_step_from_p_bf(p_bf: f64) -> f64 {
    1.5 * (p_bf / 8.0)
}

pub fn p_bf_from_p_step(p_step: f64) -> f64 {
    p_step * 8.0 / 1.5
}

/// Outcome of a threshold search over two sampled rate curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Crossing {
    /// `T1` where the d = 5 curve drops below the d = 3 curve, from
    /// log-rate vs linear-T1 interpolation between the bracketing grid
    /// points.
    At { t1: f64 },
    /// Curves coincide within resolution; no unique crossing.
    Degenerate,
    /// No sign change inside the sampled range.
    None,
}

/// Locate the distance-dependent threshold: the `T1` where the higher
/// distance starts to win. Both curves must be sampled on the same
/// increasing `T1` grid.
///
/// Interpolation is linear in `T1` and logarithmic in rate, since the
/// below-threshold curves are near-exponential. Zero rates are treated
/// as a floor of 1e-300.
pub fn find_threshold(
    t1_grid: &[f64],
    rate_d3: &[f64],
    rate_d5: &[f64],
) -> Result<Crossing, AnalyticError> {
    if t1_grid.len() != rate_d3.len() || t1_grid.len() != rate_d5.len() || t1_grid.len() < 2 {
        return Err(AnalyticError::GridMismatch);
    }
    let log_gap: Vec<f64> = rate_d3
        .iter()
        .zip(rate_d5)
        .map(|(&r3, &r5)| (r5.max(1e-300)).ln() - (r3.max(1e-300)).ln())
        .collect();
    if log_gap.iter().all(|g| g.abs() < 1e-12) {
        return Ok(Crossing::Degenerate);
    }
    // Scan for the d5-above to d5-below transition.
    for i in 0..log_gap.len() - 1 {
        let (a, b) = (log_gap[i], log_gap[i + 1]);
        if a > 0.0 && b <= 0.0 {
            let frac = a / (a - b);
            return Ok(Crossing::At {
                t1: t1_grid[i] + frac * (t1_grid[i + 1] - t1_grid[i]),
            });
        }
    }
    Ok(Crossing::None)
}
