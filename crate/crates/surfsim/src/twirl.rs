//! Pauli twirl approximation: reduce combined amplitude and phase damping
//! to an asymmetric depolarization channel (ADC).
//!
//! Decoherence of a single qubit over a time `t` is described by the
//! three-operator Kraus channel of [`combined_damping_kraus`], fully
//! determined by two probabilities `gamma` (photon emission) and `lambda`
//! (pure dephasing weight). Twirling that channel over the Pauli group
//! keeps only the diagonal of its process matrix in the Pauli basis and
//! yields the ADC probabilities of [`pta_channel`]:
//!
//! ```text
//! p_x = p_y = (1 - e^{-t/T1}) / 4
//! p_z       = (1 - e^{-t/T2}) / 2 - (1 - e^{-t/T1}) / 4
//! ```
//!
//! `T2 <= 2 T1` is required for `p_z >= 0`; inputs outside that range are
//! hard errors rather than being clamped, so configuration mistakes
//! surface immediately.
//!
//! Process-matrix convention: the Pauli basis `{I, X, Y, Z}` is normalized
//! so that the identity channel has `chi = diag(1, 0, 0, 0)`, i.e. each
//! Kraus operator is expanded as `E = sum_m c_m P_m` with
//! `c_m = tr(P_m E) / 2` and `chi_mn = sum_k c_m^k conj(c_n^k)`.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

type Cx = Complex64;
pub type Mat2 = Matrix2<Cx>;
pub type ChiMatrix = Matrix4<Cx>;

/// Probabilities below this are flushed to exact zero to keep downstream
/// log-weights finite.
const FLUSH_THRESHOLD: f64 = 1e-300;

fn flush(p: f64) -> f64 {
    if p.abs() < FLUSH_THRESHOLD {
        0.0
    } else {
        p
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TwirlError {
    #[error("duration must be nonnegative, got {0}")]
    NegativeDuration(f64),
    #[error("T1 must be positive, got {0}")]
    NonPositiveT1(f64),
    #[error("T2 must satisfy 0 < T2 <= 2*T1, got T2 = {t2}, T1 = {t1}")]
    NonPhysicalT2 { t1: f64, t2: f64 },
    #[error("probabilities out of range: gamma = {gamma}, lambda = {lambda}")]
    ProbabilityRange { gamma: f64, lambda: f64 },
    #[error("input is not a density matrix: {0}")]
    NotADensityMatrix(String),
}

/// Decoherence exposure of one qubit: a duration together with the
/// qubit's relaxation and dephasing times. All three are in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingParams {
    pub t: f64,
    pub t1: f64,
    pub t2: f64,
}

impl DampingParams {
    pub fn new(t: f64, t1: f64, t2: f64) -> Result<Self, TwirlError> {
        if !(t >= 0.0) {
            return Err(TwirlError::NegativeDuration(t));
        }
        if !(t1 > 0.0) {
            return Err(TwirlError::NonPositiveT1(t1));
        }
        if !(t2 > 0.0 && t2 <= 2.0 * t1) {
            return Err(TwirlError::NonPhysicalT2 { t1, t2 });
        }
        Ok(DampingParams { t, t1, t2 })
    }
}

/// Diagonal single-qubit Pauli channel: probabilities of X, Y and Z
/// errors (identity takes the remainder).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliChannel1Q {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliChannel1Q {
    pub fn new(px: f64, py: f64, pz: f64) -> Self {
        let c = PauliChannel1Q { px, py, pz };
        debug_assert!(c.is_valid(), "invalid Pauli channel {c:?}");
        c
    }

    /// Total error probability `p_x + p_y + p_z`.
    pub fn p_sigma(&self) -> f64 {
        self.px + self.py + self.pz
    }

    pub fn is_valid(&self) -> bool {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        ok(self.px) && ok(self.py) && ok(self.pz) && self.p_sigma() <= 1.0 + 1e-12
    }
}

/// Two-qubit Pauli error labels in lexicographic order, identity excluded.
pub const PAULI2_LABELS: [&str; 15] = [
    "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

/// Diagonal two-qubit Pauli channel: probabilities for the 15 non-identity
/// two-qubit Paulis, indexed in the order of [`PAULI2_LABELS`]
/// (`4*a + b - 1` for single-qubit indices `a, b` in `{I=0, X=1, Y=2, Z=3}`).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel2Q {
    pub p: [f64; 15],
}

impl PauliChannel2Q {
    pub fn get(&self, label: &str) -> Option<f64> {
        PAULI2_LABELS
            .iter()
            .position(|&l| l == label)
            .map(|i| self.p[i])
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// An ordered set of Kraus operators on a single qubit.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub matrices: Vec<Mat2>,
}

impl KrausSet {
    /// Maximum elementwise deviation of `sum_k E_k^dag E_k` from identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut acc = Mat2::zeros();
        for e in &self.matrices {
            acc += e.adjoint() * e;
        }
        let mut defect = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { Cx::new(1.0, 0.0) } else { Cx::new(0.0, 0.0) };
                defect = defect.max((acc[(i, j)] - want).norm());
            }
        }
        defect
    }
}

/// Derive the photon-emission probability `gamma` and the dephasing
/// weight `lambda` of the combined damping channel from `(t, T1, T2)`.
///
/// `gamma = 1 - e^{-t/T1}` and `lambda = (1 - gamma) * p_pd`, where the
/// pure-dephasing probability solves `e^{-t/T2} = sqrt((1-gamma)(1-p_pd))`,
/// giving `p_pd = 1 - e^{-t (2/T2 - 1/T1)}`.
pub fn damping_probabilities(p: DampingParams) -> (f64, f64) {
    let gamma = 1.0 - (-p.t / p.t1).exp();
    // 2/T2 - 1/T1 >= 0 is guaranteed by the T2 <= 2 T1 invariant.
    let p_pd = 1.0 - (-p.t * (2.0 / p.t2 - 1.0 / p.t1)).exp();
    (flush(gamma), flush((1.0 - gamma) * p_pd))
}

/// The three Kraus operators of the combined amplitude/phase damping
/// channel:
///
/// ```text
/// E1 = [[1, 0], [0, sqrt(1 - gamma - lambda)]]
/// E2 = [[0, sqrt(gamma)], [0, 0]]
/// E3 = [[0, 0], [0, sqrt(lambda)]]
/// ```
pub fn combined_damping_kraus(gamma: f64, lambda: f64) -> Result<KrausSet, TwirlError> {
    let ok = |p: f64| (0.0..=1.0).contains(&p);
    if !ok(gamma) || !ok(lambda) || gamma + lambda > 1.0 {
        return Err(TwirlError::ProbabilityRange { gamma, lambda });
    }
    let z = Cx::new(0.0, 0.0);
    let e1 = Mat2::new(
        Cx::new(1.0, 0.0),
        z,
        z,
        Cx::new((1.0 - gamma - lambda).sqrt(), 0.0),
    );
    let e2 = Mat2::new(z, Cx::new(gamma.sqrt(), 0.0), z, z);
    let e3 = Mat2::new(z, z, z, Cx::new(lambda.sqrt(), 0.0));
    Ok(KrausSet {
        matrices: vec![e1, e2, e3],
    })
}

/// Pauli twirl approximation of combined damping: the asymmetric
/// depolarization channel with
/// `p_x = p_y = (1 - e^{-t/T1})/4` and
/// `p_z = (1 - e^{-t/T2})/2 - (1 - e^{-t/T1})/4`.
pub fn pta_channel(p: DampingParams) -> PauliChannel1Q {
    let ex1 = (-p.t / p.t1).exp();
    let ex2 = (-p.t / p.t2).exp();
    let pxy = (1.0 - ex1) / 4.0;
    let pz = (1.0 - ex2) / 2.0 - pxy;
    // T2 <= 2 T1 makes pz >= 0 analytically; round-off can leave a tiny
    // negative residue at T2 == 2 T1 which we clamp through flush().
    PauliChannel1Q::new(flush(pxy), flush(pxy), flush(pz.max(0.0)))
}

fn check_density_matrix(rho: &Mat2) -> Result<(), TwirlError> {
    let tr = rho[(0, 0)] + rho[(1, 1)];
    if (tr - Cx::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(TwirlError::NotADensityMatrix(format!(
            "trace = {tr}, expected 1"
        )));
    }
    if (rho[(0, 1)] - rho[(1, 0)].conj()).norm() > 1e-10
        || rho[(0, 0)].im.abs() > 1e-10
        || rho[(1, 1)].im.abs() > 1e-10
    {
        return Err(TwirlError::NotADensityMatrix("not Hermitian".into()));
    }
    // 2x2 positive semidefiniteness: nonnegative diagonal and determinant.
    let det = (rho[(0, 0)] * rho[(1, 1)] - rho[(0, 1)] * rho[(1, 0)]).re;
    if rho[(0, 0)].re < -1e-10 || rho[(1, 1)].re < -1e-10 || det < -1e-10 {
        return Err(TwirlError::NotADensityMatrix(
            "negative eigenvalue".into(),
        ));
    }
    Ok(())
}

/// Exact action of combined amplitude and phase damping on a single-qubit
/// density matrix over time `t`: populations relax with `e^{-t/T1}`
/// toward the ground state and coherences shrink by `e^{-t/T2}`.
///
/// This is the brute-force oracle the twirl is verified against.
pub fn apply_channel_density_matrix(rho: &Mat2, p: DampingParams) -> Result<Mat2, TwirlError> {
    check_density_matrix(rho)?;
    let ex1 = (-p.t / p.t1).exp();
    let ex2 = (-p.t / p.t2).exp();
    let r11 = rho[(1, 1)] * ex1;
    Ok(Mat2::new(
        Cx::new(1.0, 0.0) - r11,
        rho[(0, 1)] * ex2,
        rho[(1, 0)] * ex2,
        r11,
    ))
}

fn pauli_basis() -> [Mat2; 4] {
    let z = Cx::new(0.0, 0.0);
    let one = Cx::new(1.0, 0.0);
    let i = Cx::new(0.0, 1.0);
    [
        Mat2::new(one, z, z, one),
        Mat2::new(z, one, one, z),
        Mat2::new(z, -i, i, z),
        Mat2::new(one, z, z, -one),
    ]
}

/// Process matrix of a single-qubit Kraus channel in the Pauli basis
/// `{I, X, Y, Z}`, normalized so the identity channel gives
/// `diag(1, 0, 0, 0)`.
pub fn chi_matrix(k: &KrausSet) -> ChiMatrix {
    let paulis = pauli_basis();
    let mut chi = ChiMatrix::zeros();
    for e in &k.matrices {
        let c: Vec<Cx> = paulis
            .iter()
            .map(|p| (p * e).trace() * Cx::new(0.5, 0.0))
            .collect();
        for m in 0..4 {
            for n in 0..4 {
                chi[(m, n)] += c[m] * c[n].conj();
            }
        }
    }
    chi
}

/// Tensor product of two independent single-qubit Pauli channels,
/// marginalized onto the 15 non-identity two-qubit Pauli labels.
/// The identity-identity weight is the complement of [`PauliChannel2Q::sum`].
pub fn two_qubit_channel(a: &PauliChannel1Q, b: &PauliChannel1Q) -> PauliChannel2Q {
    let wa = [1.0 - a.p_sigma(), a.px, a.py, a.pz];
    let wb = [1.0 - b.p_sigma(), b.px, b.py, b.pz];
    let mut p = [0.0; 15];
    for (ia, &pa) in wa.iter().enumerate() {
        for (ib, &pb) in wb.iter().enumerate() {
            if ia == 0 && ib == 0 {
                continue;
            }
            p[4 * ia + ib - 1] = flush(pa * pb);
        }
    }
    PauliChannel2Q { p }
}

/// Apply the ADC with the given probabilities to a density matrix.
/// Used by tests to compare the twirl against the exact channel.
pub fn apply_adc(rho: &Mat2, ch: &PauliChannel1Q) -> Mat2 {
    let [_, x, y, z] = pauli_basis();
    let id_w = Cx::new(1.0 - ch.p_sigma(), 0.0);
    rho * id_w
        + x * rho * x * Cx::new(ch.px, 0.0)
        + y * rho * y * Cx::new(ch.py, 0.0)
        + z * rho * z * Cx::new(ch.pz, 0.0)
}

/// Average of `P E(P rho P) P` over the four Pauli conjugations: the
/// twirled version of the exact damping channel.
pub fn twirled_channel_density_matrix(rho: &Mat2, p: DampingParams) -> Result<Mat2, TwirlError> {
    check_density_matrix(rho)?;
    let paulis = pauli_basis();
    let mut acc = Mat2::zeros();
    for pm in &paulis {
        let conj_in = pm * rho * pm;
        let evolved = apply_channel_density_matrix(&conj_in, p)?;
        acc += pm * evolved * pm;
    }
    Ok(acc * Cx::new(0.25, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(t: f64, t1: f64, t2: f64) -> DampingParams {
        DampingParams::new(t, t1, t2).unwrap()
    }

    #[test]
    fn damping_zero_time_is_identity() {
        let (g, l) = damping_probabilities(params(0.0, 1e-6, 1e-6));
        assert_eq!((g, l), (0.0, 0.0));
    }

    #[test]
    fn damping_long_time_full_relaxation() {
        // T2 = 2 T1: no pure dephasing, gamma -> 1.
        let (g, l) = damping_probabilities(params(1.0, 1e-6, 2e-6));
        assert_relative_eq!(g, 1.0, max_relative = 1e-12);
        assert!(l.abs() < 1e-12);
    }

    #[test]
    fn damping_reference_point() {
        // t = 164 ns, T1 = T2 = 10 us; frozen from a 40-digit evaluation
        // of gamma = 1 - e^{-t/T1} and lambda = e^{-t/T1} - e^{-2t/T2}.
        let (g, l) = damping_probabilities(params(164e-9, 10e-6, 10e-6));
        assert_relative_eq!(g, 1.6266252153047703e-2, max_relative = 1e-13);
        assert_relative_eq!(l, 1.6001661193941174e-2, max_relative = 1e-13);
    }

    #[test]
    fn damping_rejects_nonphysical_t2() {
        assert_eq!(
            DampingParams::new(1e-9, 1e-6, 2.1e-6),
            Err(TwirlError::NonPhysicalT2 {
                t1: 1e-6,
                t2: 2.1e-6
            })
        );
    }

    #[test]
    fn kraus_identity_limit() {
        let k = combined_damping_kraus(0.0, 0.0).unwrap();
        assert_eq!(k.matrices[0], Mat2::identity());
        assert_eq!(k.matrices[1], Mat2::zeros());
        assert_eq!(k.matrices[2], Mat2::zeros());
    }

    #[test]
    fn kraus_pure_amplitude_damping() {
        let k = combined_damping_kraus(0.3, 0.0).unwrap();
        assert_relative_eq!(k.matrices[0][(1, 1)].re, 0.7f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(k.matrices[1][(0, 1)].re, 0.3f64.sqrt(), max_relative = 1e-15);
        assert_eq!(k.matrices[2], Mat2::zeros());
    }

    #[test]
    fn kraus_rejects_excess_probability() {
        assert!(combined_damping_kraus(0.7, 0.4).is_err());
    }

    proptest! {
        #[test]
        fn kraus_completeness(g in 0.0..1.0f64, frac in 0.0..1.0f64) {
            let l = (1.0 - g) * frac;
            let k = combined_damping_kraus(g, l).unwrap();
            prop_assert!(k.completeness_defect() < 1e-12);
        }

        #[test]
        fn pta_probabilities_valid(
            t in 0.0..1e-5f64,
            t1 in 1e-7..1e-4f64,
            r in 0.05..2.0f64,
        ) {
            let ch = pta_channel(params(t, t1, r * t1));
            prop_assert!(ch.is_valid());
            prop_assert!(ch.pz >= 0.0);
        }

        #[test]
        fn pta_px_monotone_in_t(t in 1e-9..1e-5f64, dt in 1e-9..1e-5f64) {
            let a = pta_channel(params(t, 1e-5, 1e-5));
            let b = pta_channel(params(t + dt, 1e-5, 1e-5));
            prop_assert!(b.px >= a.px);
        }

        #[test]
        fn two_qubit_channel_normalized(
            t in 1e-9..1e-5f64,
            t1 in 1e-6..1e-4f64,
        ) {
            let ch = pta_channel(params(t, t1, t1));
            let two = two_qubit_channel(&ch, &ch);
            let id = (1.0 - ch.p_sigma()) * (1.0 - ch.p_sigma());
            prop_assert!(two.sum() <= 1.0 + 1e-12);
            prop_assert!((two.sum() + id - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pta_symmetric_when_t2_equals_t1() {
        let ch = pta_channel(params(3e-7, 7e-6, 7e-6));
        assert_relative_eq!(ch.px, ch.py, max_relative = 1e-15);
        assert_relative_eq!(ch.px, ch.pz, max_relative = 1e-12);
    }

    #[test]
    fn pta_zero_time() {
        let ch = pta_channel(params(0.0, 1e-6, 1e-6));
        assert_eq!((ch.px, ch.py, ch.pz), (0.0, 0.0, 0.0));
    }

    #[test]
    fn pta_reference_point() {
        // t = 400 ns, T1 = 10 us, T2 = 20 us; frozen from a 40-digit
        // evaluation. px + py should be close to twice pz + py.
        let ch = pta_channel(params(400e-9, 10e-6, 20e-6));
        assert_relative_eq!(ch.px, 9.8026402119191976e-3, max_relative = 1e-13);
        assert_relative_eq!(ch.py, ch.px, max_relative = 1e-15);
        assert_relative_eq!(ch.pz, 9.8023134703151249e-5, max_relative = 1e-10);
        let bf = ch.px + ch.py;
        let pf = ch.pz + ch.py;
        assert_relative_eq!(bf / pf, 2.0, max_relative = 2e-2);
    }

    fn ket0() -> Mat2 {
        Mat2::new(
            Cx::new(1.0, 0.0),
            Cx::new(0.0, 0.0),
            Cx::new(0.0, 0.0),
            Cx::new(0.0, 0.0),
        )
    }

    fn ket1() -> Mat2 {
        Mat2::new(
            Cx::new(0.0, 0.0),
            Cx::new(0.0, 0.0),
            Cx::new(0.0, 0.0),
            Cx::new(1.0, 0.0),
        )
    }

    fn plus() -> Mat2 {
        Mat2::from_element(Cx::new(0.5, 0.0))
    }

    #[test]
    fn channel_fixes_ground_state() {
        let out = apply_channel_density_matrix(&ket0(), params(5e-7, 1e-6, 1e-6)).unwrap();
        assert_relative_eq!((out - ket0()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn channel_relaxes_excited_state() {
        // After t = T1 the excited population is e^{-1}.
        let out = apply_channel_density_matrix(&ket1(), params(1e-6, 1e-6, 1e-6)).unwrap();
        let e = 0.36787944117144232f64;
        assert_relative_eq!(out[(1, 1)].re, e, max_relative = 1e-14);
        assert_relative_eq!(out[(0, 0)].re, 1.0 - e, max_relative = 1e-14);
    }

    #[test]
    fn channel_dephases_plus_state() {
        // After t = T2 the coherences carry a factor e^{-1}.
        let out = apply_channel_density_matrix(&plus(), params(2e-6, 2e-6, 2e-6)).unwrap();
        assert_relative_eq!(out[(0, 1)].re, 0.5 * 0.36787944117144232, max_relative = 1e-14);
    }

    #[test]
    fn channel_rejects_bad_trace() {
        let rho = Mat2::identity();
        assert!(apply_channel_density_matrix(&rho, params(1e-9, 1e-6, 1e-6)).is_err());
    }

    #[test]
    fn chi_identity_channel() {
        let k = KrausSet {
            matrices: vec![Mat2::identity()],
        };
        let chi = chi_matrix(&k);
        assert_relative_eq!(chi[(0, 0)].re, 1.0, max_relative = 1e-15);
        for m in 0..4 {
            for n in 0..4 {
                if (m, n) != (0, 0) {
                    assert!(chi[(m, n)].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn chi_offdiagonal_support_pattern() {
        // Combined damping may have off-diagonal support only on the
        // (I,Z), (Z,I), (X,Y), (Y,X) entries.
        let k = combined_damping_kraus(0.12, 0.07).unwrap();
        let chi = chi_matrix(&k);
        let allowed = [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)];
        for m in 0..4 {
            for n in 0..4 {
                if !allowed.contains(&(m, n)) {
                    assert!(
                        chi[(m, n)].norm() < 1e-14,
                        "unexpected chi[{m}][{n}] = {}",
                        chi[(m, n)]
                    );
                }
            }
        }
        assert!(chi.trace().im.abs() < 1e-14);
        assert_relative_eq!(chi.trace().re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn chi_diagonal_matches_pta() {
        for &(t, t1, t2) in &[
            (164e-9, 10e-6, 10e-6),
            (400e-9, 10e-6, 20e-6),
            (50e-9, 2e-6, 3e-6),
        ] {
            let p = params(t, t1, t2);
            let (g, l) = damping_probabilities(p);
            let chi = chi_matrix(&combined_damping_kraus(g, l).unwrap());
            let ch = pta_channel(p);
            assert_relative_eq!(chi[(1, 1)].re, ch.px, epsilon = 1e-10);
            assert_relative_eq!(chi[(2, 2)].re, ch.py, epsilon = 1e-10);
            assert_relative_eq!(chi[(3, 3)].re, ch.pz, epsilon = 1e-10);
            assert_relative_eq!(chi[(0, 0)].re, 1.0 - ch.p_sigma(), epsilon = 1e-10);
        }
    }

    #[test]
    fn two_qubit_channel_zero() {
        let zero = PauliChannel1Q::new(0.0, 0.0, 0.0);
        let two = two_qubit_channel(&zero, &zero);
        assert!(two.p.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn two_qubit_channel_symmetric_case() {
        // For px = py = pz = p: p_IX = p(1-3p), p_XX = p^2, p_ZZ = p^2.
        let p = 0.01;
        let ch = PauliChannel1Q::new(p, p, p);
        let two = two_qubit_channel(&ch, &ch);
        assert_relative_eq!(two.get("IX").unwrap(), p * (1.0 - 3.0 * p), max_relative = 1e-14);
        assert_relative_eq!(two.get("XX").unwrap(), p * p, max_relative = 1e-14);
        assert_relative_eq!(two.get("ZZ").unwrap(), p * p, max_relative = 1e-14);
    }

    #[test]
    fn two_qubit_channel_matches_published_form() {
        // With a = b and px = py, every line of the published two-qubit
        // table holds exactly:
        //   p_IX = p_IY = p_XI = p_YI = p_x (1 - p_sigma)
        //   p_XX = p_XY = p_YX = p_YY = p_x p_y
        //   p_XZ = p_ZX = p_YZ = p_ZY = p_x p_z
        //   p_IZ = p_ZI = p_z (1 - p_sigma), p_ZZ = p_z^2
        let ch = pta_channel(params(400e-9, 10e-6, 20e-6));
        let two = two_qubit_channel(&ch, &ch);
        let q = 1.0 - ch.p_sigma();
        for lbl in ["IX", "IY", "XI", "YI"] {
            assert_relative_eq!(two.get(lbl).unwrap(), ch.px * q, max_relative = 1e-13);
        }
        for lbl in ["XX", "XY", "YX", "YY"] {
            assert_relative_eq!(two.get(lbl).unwrap(), ch.px * ch.py, max_relative = 1e-13);
        }
        for lbl in ["XZ", "ZX", "YZ", "ZY"] {
            assert_relative_eq!(two.get(lbl).unwrap(), ch.px * ch.pz, max_relative = 1e-13);
        }
        for lbl in ["IZ", "ZI"] {
            assert_relative_eq!(two.get(lbl).unwrap(), ch.pz * q, max_relative = 1e-13);
        }
        assert_relative_eq!(two.get("ZZ").unwrap(), ch.pz * ch.pz, max_relative = 1e-13);
    }

    #[test]
    fn two_qubit_channel_marginal_recovery() {
        let ch = pta_channel(params(200e-9, 5e-6, 8e-6));
        let two = two_qubit_channel(&ch, &ch);
        let marginal_x: f64 = ["XI", "XX", "XY", "XZ"]
            .iter()
            .map(|l| two.get(l).unwrap())
            .sum();
        assert_relative_eq!(marginal_x, ch.px, max_relative = 1e-13);
    }

    /// The six Pauli eigenstates as density matrices.
    pub fn pauli_eigenstates() -> Vec<Mat2> {
        let half = Cx::new(0.5, 0.0);
        let ihalf = Cx::new(0.0, 0.5);
        vec![
            ket0(),
            ket1(),
            plus(),
            Mat2::new(half, -half, -half, half),
            Mat2::new(half, -ihalf, ihalf, half),
            Mat2::new(half, ihalf, -ihalf, half),
        ]
    }

    #[test]
    fn twirl_oracle_equivalence() {
        // Averaging the exact channel over Pauli conjugation equals the
        // ADC with the pta_channel probabilities, on every eigenstate.
        let p = params(237e-9, 4.2e-6, 6.9e-6);
        let ch = pta_channel(p);
        for rho in pauli_eigenstates() {
            let twirled = twirled_channel_density_matrix(&rho, p).unwrap();
            let adc = apply_adc(&rho, &ch);
            assert!((twirled - adc).norm() < 1e-10);
        }
    }
}
