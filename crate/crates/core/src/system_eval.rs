//! Exact, solver-independent evaluation of the two-phase protocol: harvested
//! power, every SINR/SNR, U1's achievable rate, the feasibility margins of
//! the joint design problem, and the lifted matrices the semidefinite
//! subproblems operate on.
//!
//! Every optimizer in this crate is checked against this module; nothing
//! here depends on any solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelSet;
use crate::numerics::HermitianMatrix;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Scenario scalars shared by every subproblem.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemParams {
    /// AP antennas (N).
    pub n_antennas: usize,
    /// RIS elements (M).
    pub m_elements: usize,
    /// AP power budget in watts.
    pub p_s: f64,
    /// Noise variance at U1, watts.
    pub sigma1_sq: f64,
    /// Noise variance at U2, watts.
    pub sigma2_sq: f64,
    /// Energy conversion efficiency, in (0, 1].
    pub eta: f64,
    /// Target rate of U2, bits/s/Hz.
    pub gamma2: f64,
    /// Phase duration; the two-phase protocol fixes 1/2.
    pub tau: f64,
    /// Feasibility tolerance on constraint margins.
    pub eps_feas: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            n_antennas: 4,
            m_elements: 40,
            p_s: 1.0, // 30 dBm
            sigma1_sq: 1e-8,
            sigma2_sq: 1e-8,
            eta: 0.8,
            gamma2: 0.5,
            tau: 0.5,
            eps_feas: 1e-6,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), SystemError> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(SystemError::InvalidInput(format!("eta = {} outside (0, 1]", self.eta)));
        }
        if self.p_s < 0.0 {
            return Err(SystemError::InvalidInput(format!("p_s = {} negative", self.p_s)));
        }
        if self.sigma1_sq <= 0.0 || self.sigma2_sq <= 0.0 {
            return Err(SystemError::InvalidInput("noise variances must be positive".into()));
        }
        if self.gamma2 < 0.0 {
            return Err(SystemError::InvalidInput(format!("gamma2 = {} negative", self.gamma2)));
        }
        if self.tau != 0.5 {
            return Err(SystemError::InvalidInput(format!(
                "tau = {} but the two-phase protocol fixes tau = 1/2",
                self.tau
            )));
        }
        Ok(())
    }

    /// SNR threshold `2^(2 gamma2) - 1` that both QoS constraints compare
    /// against (the 1/2 pre-log doubles the exponent).
    pub fn snr_threshold(&self) -> f64 {
        4f64.powf(self.gamma2) - 1.0
    }
}

mod complex_vec_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Vec<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        serde::Serialize::serialize(&pairs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs: Vec<[f64; 2]> = serde::Deserialize::deserialize(d)?;
        Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

/// A candidate solution: power-splitting factor, beamformers, and the RIS
/// reflection coefficients of both phases (unit-modulus entries).
///
/// Complex vectors serialize as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Design {
    pub beta: f64,
    #[serde(with = "complex_vec_serde")]
    pub w1: Vec<Complex64>,
    #[serde(with = "complex_vec_serde")]
    pub w2: Vec<Complex64>,
    #[serde(with = "complex_vec_serde")]
    pub theta1: Vec<Complex64>,
    #[serde(with = "complex_vec_serde")]
    pub theta2: Vec<Complex64>,
}

impl Design {
    pub fn validate(&self, ch: &ChannelSet) -> Result<(), SystemError> {
        let n = ch.n_antennas();
        let m = ch.m_elements();
        if self.w1.len() != n || self.w2.len() != n {
            return Err(SystemError::InvalidInput(format!(
                "beamformer length {}/{} does not match N = {n}",
                self.w1.len(),
                self.w2.len()
            )));
        }
        if self.theta1.len() != m || self.theta2.len() != m {
            return Err(SystemError::InvalidInput(format!(
                "phase vector length {}/{} does not match M = {m}",
                self.theta1.len(),
                self.theta2.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SystemError::InvalidInput(format!("beta = {} outside [0, 1]", self.beta)));
        }
        Ok(())
    }

    pub fn w1_vec(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.w1)
    }

    pub fn w2_vec(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.w2)
    }
}

pub enum User {
    U1,
    U2,
}

/// Effective phase-1 channel of a user for given RIS coefficients:
/// the column vector `h_i` with `h_i^H w = (h_{r,i}^H Theta_1 G + h_{d,i}^H) w`.
pub fn effective_channel_phase1(
    ch: &ChannelSet,
    theta1: &[Complex64],
    user: User,
) -> Result<DVector<Complex64>, SystemError> {
    let m = ch.m_elements();
    let n = ch.n_antennas();
    if theta1.len() != m {
        return Err(SystemError::InvalidInput(format!(
            "theta1 length {} does not match M = {m}",
            theta1.len()
        )));
    }
    let (h_r, h_d) = match user {
        User::U1 => (&ch.h_r1, &ch.h_d1),
        User::U2 => (&ch.h_r2, &ch.h_d2),
    };
    let mut h = h_d.clone();
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for mi in 0..m {
            // conj of theta_m * conj(h_r[m]) * G[m, j]
            acc += theta1[mi].conj() * h_r[mi] * ch.g_mat[(mi, j)].conj();
        }
        h[j] += acc;
    }
    Ok(h)
}

/// Effective phase-2 scalar channel `g_d^H + g_r^H Theta_2 g`.
pub fn phase2_effective_gain(ch: &ChannelSet, theta2: &[Complex64]) -> Complex64 {
    let mut acc = ch.g_d.conj();
    for mi in 0..ch.m_elements() {
        acc += ch.g_r[mi].conj() * theta2[mi] * ch.g[mi];
    }
    acc
}

/// Received powers of the four phase-1 beam/user pairs plus the phase-2
/// channel gain, the quantities every SINR is assembled from.
#[derive(Debug, Clone, Copy)]
pub struct LinkPowers {
    /// |h1^H w1|^2
    pub p1: f64,
    /// |h1^H w2|^2
    pub p2: f64,
    /// |h2^H w1|^2
    pub q1: f64,
    /// |h2^H w2|^2
    pub q2: f64,
    /// |g_d^H + g_r^H Theta_2 g|^2
    pub g_eff_sq: f64,
}

pub fn link_powers(ch: &ChannelSet, d: &Design) -> Result<LinkPowers, SystemError> {
    d.validate(ch)?;
    let h1 = effective_channel_phase1(ch, &d.theta1, User::U1)?;
    let h2 = effective_channel_phase1(ch, &d.theta1, User::U2)?;
    let w1 = d.w1_vec();
    let w2 = d.w2_vec();
    Ok(LinkPowers {
        p1: h1.dotc(&w1).norm_sqr(),
        p2: h1.dotc(&w2).norm_sqr(),
        q1: h2.dotc(&w1).norm_sqr(),
        q2: h2.dotc(&w2).norm_sqr(),
        g_eff_sq: phase2_effective_gain(ch, &d.theta2).norm_sqr(),
    })
}

/// U1's transmit power in phase 2 (all harvested energy spent over an equal
/// duration) and the harvested energy itself.
#[derive(Debug, Clone, Copy)]
pub struct HarvestReport {
    /// `P_t = beta eta (|h1^H w1|^2 + |h1^H w2|^2)`, watts.
    pub p_t: f64,
    /// `E = tau P_t`.
    pub energy: f64,
}

pub fn harvested_transmit_power(
    ch: &ChannelSet,
    d: &Design,
    p: &SystemParams,
) -> Result<HarvestReport, SystemError> {
    let lp = link_powers(ch, d)?;
    let p_t = d.beta * p.eta * (lp.p1 + lp.p2);
    Ok(HarvestReport {
        p_t,
        energy: p.tau * p_t,
    })
}

/// All SINR/SNR quantities of the two-phase protocol.
#[derive(Debug, Clone, Copy)]
pub struct SinrReport {
    /// SINR at U1 decoding U2's symbol (SIC stage).
    pub sinr_1to2: f64,
    /// SNR at U1 decoding its own symbol after SIC.
    pub snr_1: f64,
    /// SINR at U2 in phase 1.
    pub sinr2_phase1: f64,
    /// SNR at U2 in phase 2 (relayed by U1).
    pub snr2_phase2: f64,
    /// MRC combination: exactly `sinr2_phase1 + snr2_phase2`.
    pub sinr2_combined: f64,
}

pub fn sinr_report(ch: &ChannelSet, d: &Design, p: &SystemParams) -> Result<SinrReport, SystemError> {
    let lp = link_powers(ch, d)?;
    let one_m_beta = 1.0 - d.beta;
    let sinr_1to2 = one_m_beta * lp.p2 / (one_m_beta * lp.p1 + p.sigma1_sq);
    let snr_1 = one_m_beta * lp.p1 / p.sigma1_sq;
    let sinr2_phase1 = lp.q2 / (lp.q1 + p.sigma2_sq);
    let snr2_phase2 = d.beta * p.eta * lp.g_eff_sq * (lp.p1 + lp.p2) / p.sigma2_sq;
    Ok(SinrReport {
        sinr_1to2,
        snr_1,
        sinr2_phase1,
        snr2_phase2,
        sinr2_combined: sinr2_phase1 + snr2_phase2,
    })
}

/// U1's achievable rate `(1/2) log2(1 + SNR_1)`, bits/s/Hz.
pub fn rate_u1(ch: &ChannelSet, d: &Design, p: &SystemParams) -> Result<f64, SystemError> {
    Ok(0.5 * (1.0 + sinr_report(ch, d, p)?.snr_1).log2())
}

/// Signed slack of each constraint of the joint design problem.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintMargins {
    /// U1 can decode U2's symbol: `(1/2) log2(1 + SINR_1to2) - gamma2`.
    pub c1_sic_rate: f64,
    /// U2's QoS after MRC: `(1/2) log2(1 + SINR_2) - gamma2`.
    pub c2_qos_rate: f64,
    /// Power budget: `P_s - ||w1||^2 - ||w2||^2`, watts.
    pub c3_power: f64,
    /// Splitting factor range: `min(beta, 1 - beta)`.
    pub c4_beta: f64,
    /// Unit modulus, phase 1: negative worst deviation of `|theta_1m|` from 1.
    pub c5_modulus1: f64,
    /// Unit modulus, phase 2.
    pub c6_modulus2: f64,
}

impl ConstraintMargins {
    pub fn min(&self) -> f64 {
        self.c1_sic_rate
            .min(self.c2_qos_rate)
            .min(self.c3_power)
            .min(self.c4_beta)
            .min(self.c5_modulus1)
            .min(self.c6_modulus2)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Feasibility {
    pub feasible: bool,
    pub margins: ConstraintMargins,
}

pub fn check_feasible(ch: &ChannelSet, d: &Design, p: &SystemParams) -> Result<Feasibility, SystemError> {
    let rep = sinr_report(ch, d, p)?;
    let worst_modulus = |theta: &[Complex64]| -> f64 {
        -theta
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    };
    let margins = ConstraintMargins {
        c1_sic_rate: 0.5 * (1.0 + rep.sinr_1to2).log2() - p.gamma2,
        c2_qos_rate: 0.5 * (1.0 + rep.sinr2_combined).log2() - p.gamma2,
        c3_power: p.p_s - (norm_sq(&d.w1) + norm_sq(&d.w2)),
        c4_beta: d.beta.min(1.0 - d.beta),
        c5_modulus1: worst_modulus(&d.theta1),
        c6_modulus2: worst_modulus(&d.theta2),
    };
    Ok(Feasibility {
        feasible: margins.min() >= -p.eps_feas,
        margins,
    })
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Constant matrices of the lifted phase subproblems, for fixed beamformers.
///
/// With `t = conj(theta)` and the augmented vector `t~ = [t; 1]`, each
/// received power splits as `|h^H w|^2 = t~^H R t~ + |b|^2` where `b` is the
/// direct-path term. `R1..R4` cover the (user, beam) pairs (1,1), (1,2),
/// (2,1), (2,2) of phase 1; `R5`/`b5` play the same role for the phase-2
/// scalar channel with `ghat = diag(g_r^H) g` and `b5 = conj(g_d)`.
#[derive(Debug, Clone)]
pub struct LiftMatrices {
    pub r1: HermitianMatrix,
    pub r2: HermitianMatrix,
    pub r3: HermitianMatrix,
    pub r4: HermitianMatrix,
    pub r5: HermitianMatrix,
    pub b1: Complex64,
    pub b2: Complex64,
    pub b3: Complex64,
    pub b4: Complex64,
    pub b5: Complex64,
    /// `diag(h_r1^H) G`, phase-1 cascade for U1 (M x N).
    pub gtilde_r1: DMatrix<Complex64>,
    /// `diag(h_r2^H) G`, phase-1 cascade for U2 (M x N).
    pub gtilde_r2: DMatrix<Complex64>,
    /// `diag(g_r^H) g`: the vector with `t2^H ghat = g_r^H Theta_2 g`.
    pub ghat: DVector<Complex64>,
}

/// Augmented lift vector `[conj(theta); 1]` entering the quadratic forms.
pub fn lift_vector(theta: &[Complex64]) -> DVector<Complex64> {
    let mut v = DVector::zeros(theta.len() + 1);
    for (i, z) in theta.iter().enumerate() {
        v[i] = z.conj();
    }
    v[theta.len()] = Complex64::new(1.0, 0.0);
    v
}

/// Rank-one lifted matrix `t~ t~^H` of a unit-modulus phase vector.
pub fn lift_matrix(theta: &[Complex64]) -> HermitianMatrix {
    HermitianMatrix::from_outer(&lift_vector(theta))
}

/// Quadratic form `t~^H R t~` (real by Hermitian symmetry).
pub fn lift_quadratic(r: &HermitianMatrix, theta: &[Complex64]) -> f64 {
    let t = lift_vector(theta);
    (t.adjoint() * r.matrix() * &t)[(0, 0)].re
}

fn lift_from_pair(a: &DVector<Complex64>, b: Complex64) -> HermitianMatrix {
    let m = a.len();
    let mut r = DMatrix::<Complex64>::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            r[(i, j)] = a[i] * a[j].conj();
        }
        r[(i, m)] = a[i] * b.conj();
        r[(m, i)] = b * a[i].conj();
    }
    HermitianMatrix::symmetrize(r)
}

/// Builds the five lift matrices and direct-path terms for fixed `w1`, `w2`.
pub fn build_lifts(
    ch: &ChannelSet,
    w1: &DVector<Complex64>,
    w2: &DVector<Complex64>,
) -> Result<LiftMatrices, SystemError> {
    let n = ch.n_antennas();
    let m = ch.m_elements();
    if w1.len() != n || w2.len() != n {
        return Err(SystemError::InvalidInput(format!(
            "beamformer length {}/{} does not match N = {n}",
            w1.len(),
            w2.len()
        )));
    }

    let gtilde = |h_r: &DVector<Complex64>| -> DMatrix<Complex64> {
        DMatrix::from_fn(m, n, |r, c| h_r[r].conj() * ch.g_mat[(r, c)])
    };
    let gtilde_r1 = gtilde(&ch.h_r1);
    let gtilde_r2 = gtilde(&ch.h_r2);

    let a11 = &gtilde_r1 * w1;
    let a12 = &gtilde_r1 * w2;
    let a21 = &gtilde_r2 * w1;
    let a22 = &gtilde_r2 * w2;
    let b1 = ch.h_d1.dotc(w1);
    let b2 = ch.h_d1.dotc(w2);
    let b3 = ch.h_d2.dotc(w1);
    let b4 = ch.h_d2.dotc(w2);

    let ghat = DVector::from_fn(m, |i, _| ch.g_r[i].conj() * ch.g[i]);
    let b5 = ch.g_d.conj();

    Ok(LiftMatrices {
        r1: lift_from_pair(&a11, b1),
        r2: lift_from_pair(&a12, b2),
        r3: lift_from_pair(&a21, b3),
        r4: lift_from_pair(&a22, b4),
        r5: lift_from_pair(&ghat, b5),
        b1,
        b2,
        b3,
        b4,
        b5,
        gtilde_r1,
        gtilde_r2,
        ghat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channels, FadingParams, Geometry};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// N=1, M=0 channel with unit direct links; the hand-checked instance.
    fn scalar_channel() -> ChannelSet {
        ChannelSet {
            h_d1: DVector::from_vec(vec![c(1.0, 0.0)]),
            h_d2: DVector::from_vec(vec![c(1.0, 0.0)]),
            g_mat: DMatrix::zeros(0, 1),
            h_r1: DVector::zeros(0),
            h_r2: DVector::zeros(0),
            g_d: c(1.0, 0.0),
            g: DVector::zeros(0),
            g_r: DVector::zeros(0),
        }
    }

    fn scalar_params() -> SystemParams {
        SystemParams {
            n_antennas: 1,
            m_elements: 0,
            p_s: 2.0,
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
            eta: 1.0,
            gamma2: 0.5,
            tau: 0.5,
            eps_feas: 1e-6,
        }
    }

    fn scalar_design() -> Design {
        Design {
            beta: 0.5,
            w1: vec![c(1.0, 0.0)],
            w2: vec![c(1.0, 0.0)],
            theta1: vec![],
            theta2: vec![],
        }
    }

    fn random_unit_theta(m: usize, rng: &mut ChaCha12Rng) -> Vec<Complex64> {
        (0..m)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect()
    }

    #[test]
    fn effective_channel_without_ris_is_direct() {
        let ch = scalar_channel();
        let h = effective_channel_phase1(&ch, &[], User::U1).unwrap();
        assert_eq!(h, ch.h_d1);
    }

    #[test]
    fn effective_channel_single_element_all_ones() {
        // M=1, N=1, all channels 1, zero-phase RIS: effective channel 2.
        let ch = ChannelSet {
            h_d1: DVector::from_vec(vec![c(1.0, 0.0)]),
            h_d2: DVector::from_vec(vec![c(1.0, 0.0)]),
            g_mat: DMatrix::from_vec(1, 1, vec![c(1.0, 0.0)]),
            h_r1: DVector::from_vec(vec![c(1.0, 0.0)]),
            h_r2: DVector::from_vec(vec![c(1.0, 0.0)]),
            g_d: c(1.0, 0.0),
            g: DVector::from_vec(vec![c(1.0, 0.0)]),
            g_r: DVector::from_vec(vec![c(1.0, 0.0)]),
        };
        let h = effective_channel_phase1(&ch, &[c(1.0, 0.0)], User::U1).unwrap();
        assert_relative_eq!(h[0].re, 2.0, epsilon = 1e-15);
        assert_relative_eq!(h[0].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn effective_channel_matches_entrywise_expansion() {
        let ch = sample_channels(&Geometry::default(), &FadingParams::default(), 3, 5, 11).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let theta = random_unit_theta(5, &mut rng);
        let w: DVector<Complex64> =
            DVector::from_fn(3, |i, _| c(0.3 * (i as f64 + 1.0), -0.1 * i as f64));

        let h = effective_channel_phase1(&ch, &theta, User::U2).unwrap();
        let lhs = h.dotc(&w);

        // Direct expansion (h_r2^H Theta G + h_d2^H) w.
        let mut rhs = ch.h_d2.dotc(&w);
        for mi in 0..5 {
            for j in 0..3 {
                rhs += ch.h_r2[mi].conj() * theta[mi] * ch.g_mat[(mi, j)] * w[j];
            }
        }
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn harvest_zero_when_beta_zero() {
        let ch = scalar_channel();
        let mut d = scalar_design();
        d.beta = 0.0;
        let rep = harvested_transmit_power(&ch, &d, &scalar_params()).unwrap();
        assert_eq!(rep.p_t, 0.0);
        assert_eq!(rep.energy, 0.0);
    }

    #[test]
    fn harvest_sums_beam_powers() {
        // |h^H w1|^2 = 2, |h^H w2|^2 = 3 with eta = 1, beta = 1 gives 5.
        let ch = scalar_channel();
        let d = Design {
            beta: 1.0,
            w1: vec![c(2f64.sqrt(), 0.0)],
            w2: vec![c(3f64.sqrt(), 0.0)],
            theta1: vec![],
            theta2: vec![],
        };
        let mut p = scalar_params();
        p.p_s = 5.0;
        let rep = harvested_transmit_power(&ch, &d, &p).unwrap();
        assert_relative_eq!(rep.p_t, 5.0, epsilon = 1e-12);
        // tau cancellation: P_t = E / tau exactly.
        assert_eq!(rep.energy, 0.5 * rep.p_t);
    }

    #[test]
    fn sinr_report_hand_instance() {
        let rep = sinr_report(&scalar_channel(), &scalar_design(), &scalar_params()).unwrap();
        assert_relative_eq!(rep.snr_1, 0.5, epsilon = 1e-15);
        // (1-beta)|h^H w2|^2 / ((1-beta)|h^H w1|^2 + sigma^2) = 0.5/1.5
        assert_relative_eq!(rep.sinr_1to2, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(rep.sinr2_phase1, 0.5, epsilon = 1e-15);
        assert_relative_eq!(rep.snr2_phase2, 1.0, epsilon = 1e-15);
        assert_relative_eq!(rep.sinr2_combined, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn sinr_edge_cases() {
        let ch = scalar_channel();
        let p = scalar_params();
        let mut d = scalar_design();
        d.w2 = vec![c(0.0, 0.0)];
        let rep = sinr_report(&ch, &d, &p).unwrap();
        assert_eq!(rep.sinr_1to2, 0.0);
        assert_eq!(rep.sinr2_phase1, 0.0);

        let mut d = scalar_design();
        d.beta = 1.0;
        let rep = sinr_report(&ch, &d, &p).unwrap();
        assert_eq!(rep.snr_1, 0.0);
    }

    #[test]
    fn mrc_additivity_is_exact() {
        let ch = sample_channels(&Geometry::default(), &FadingParams::default(), 2, 4, 3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let d = Design {
            beta: 0.3,
            w1: vec![c(0.1, 0.02), c(-0.05, 0.04)],
            w2: vec![c(0.07, -0.01), c(0.02, 0.03)],
            theta1: random_unit_theta(4, &mut rng),
            theta2: random_unit_theta(4, &mut rng),
        };
        let rep = sinr_report(&ch, &d, &SystemParams { n_antennas: 2, m_elements: 4, ..Default::default() }).unwrap();
        assert_eq!(rep.sinr2_combined, rep.sinr2_phase1 + rep.snr2_phase2);
    }

    #[test]
    fn rate_values() {
        let ch = scalar_channel();
        let p = scalar_params();
        let mut d = scalar_design();
        d.w1 = vec![c(0.0, 0.0)];
        assert_eq!(rate_u1(&ch, &d, &p).unwrap(), 0.0);

        // snr_1 = 3 -> rate 1.0: (1-beta)|w|^2 = 3 with beta = 1/2.
        let mut d = scalar_design();
        d.w1 = vec![c(6f64.sqrt(), 0.0)];
        let mut p6 = p;
        p6.p_s = 7.0;
        assert_relative_eq!(rate_u1(&ch, &d, &p6).unwrap(), 1.0, epsilon = 1e-12);

        let rate = rate_u1(&ch, &scalar_design(), &p).unwrap();
        assert_relative_eq!(rate, 0.5 * 1.5f64.log2(), epsilon = 1e-15);
    }

    #[test]
    fn feasibility_vacuous_when_gamma_zero() {
        let mut p = scalar_params();
        p.gamma2 = 0.0;
        let f = check_feasible(&scalar_channel(), &scalar_design(), &p).unwrap();
        assert!(f.feasible, "margins: {:?}", f.margins);
    }

    #[test]
    fn feasibility_zero_beamformers() {
        let ch = scalar_channel();
        let p = scalar_params();
        let d = Design {
            beta: 0.5,
            w1: vec![c(0.0, 0.0)],
            w2: vec![c(0.0, 0.0)],
            theta1: vec![],
            theta2: vec![],
        };
        let f = check_feasible(&ch, &d, &p).unwrap();
        assert!(!f.feasible);
        assert_relative_eq!(f.margins.c1_sic_rate, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn feasibility_hand_instance_sic_binds() {
        let f = check_feasible(&scalar_channel(), &scalar_design(), &scalar_params()).unwrap();
        // C1 margin = (1/2) log2(4/3) - 0.5 < 0.
        let expected = 0.5 * (4.0 / 3.0f64).log2() - 0.5;
        assert_relative_eq!(f.margins.c1_sic_rate, expected, epsilon = 1e-12);
        assert!(!f.feasible);
    }

    #[test]
    fn snr1_invariant_under_phase1_scaling() {
        let ch = sample_channels(&Geometry::default(), &FadingParams::default(), 2, 3, 17).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let d = Design {
            beta: 0.4,
            w1: vec![c(0.3, 0.1), c(0.0, -0.2)],
            w2: vec![c(0.1, 0.0), c(0.2, 0.2)],
            theta1: random_unit_theta(3, &mut rng),
            theta2: random_unit_theta(3, &mut rng),
        };
        let p = SystemParams { n_antennas: 2, m_elements: 3, ..Default::default() };
        let snr_before = sinr_report(&ch, &d, &p).unwrap().snr_1;

        // Scale all phase-1 channel amplitudes by sqrt(c) and sigma1^2 by c.
        let scale: f64 = 7.3;
        let amp = c(scale.sqrt(), 0.0);
        let mut ch2 = ch.clone();
        ch2.h_d1 *= amp;
        ch2.h_d2 *= amp;
        ch2.h_r1 *= amp;
        ch2.h_r2 *= amp;
        let mut p2 = p;
        p2.sigma1_sq *= scale;
        let snr_after = sinr_report(&ch2, &d, &p2).unwrap().snr_1;
        assert_relative_eq!(snr_before, snr_after, max_relative = 1e-12);
    }

    #[test]
    fn lift_zero_beamformer() {
        let ch = sample_channels(&Geometry::default(), &FadingParams::default(), 2, 3, 19).unwrap();
        let w0 = DVector::zeros(2);
        let w2 = DVector::from_vec(vec![c(0.2, 0.1), c(0.0, 0.3)]);
        let lifts = build_lifts(&ch, &w0, &w2).unwrap();
        assert!(lifts.r1.norm() == 0.0);
        assert_eq!(lifts.b1, c(0.0, 0.0));
    }

    #[test]
    fn lift_scalar_block_structure() {
        // M=1 with a = 1, b = 1: R = [[1, 1], [1, 0]].
        let a = DVector::from_vec(vec![c(1.0, 0.0)]);
        let r = lift_from_pair(&a, c(1.0, 0.0));
        assert_relative_eq!(r.get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.get(0, 1).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.get(1, 0).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.get(1, 1).re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lift_identity_random_draws() {
        // |h_i^H w_j|^2 == t~^H R t~ + |b|^2 for random unit-modulus phases,
        // all five lifts, 20 draws.
        let ch = sample_channels(&Geometry::default(), &FadingParams::default(), 3, 6, 23).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let w1: DVector<Complex64> = DVector::from_fn(3, |i, _| c(0.2 - 0.05 * i as f64, 0.1));
        let w2: DVector<Complex64> = DVector::from_fn(3, |i, _| c(0.05, 0.12 * i as f64 - 0.1));
        let lifts = build_lifts(&ch, &w1, &w2).unwrap();

        for _ in 0..20 {
            let theta1 = random_unit_theta(6, &mut rng);
            let theta2 = random_unit_theta(6, &mut rng);
            let h1 = effective_channel_phase1(&ch, &theta1, User::U1).unwrap();
            let h2 = effective_channel_phase1(&ch, &theta1, User::U2).unwrap();

            let truth = [
                h1.dotc(&w1).norm_sqr(),
                h1.dotc(&w2).norm_sqr(),
                h2.dotc(&w1).norm_sqr(),
                h2.dotc(&w2).norm_sqr(),
            ];
            let lifted = [
                lift_quadratic(&lifts.r1, &theta1) + lifts.b1.norm_sqr(),
                lift_quadratic(&lifts.r2, &theta1) + lifts.b2.norm_sqr(),
                lift_quadratic(&lifts.r3, &theta1) + lifts.b3.norm_sqr(),
                lift_quadratic(&lifts.r4, &theta1) + lifts.b4.norm_sqr(),
            ];
            for (t, l) in truth.iter().zip(lifted.iter()) {
                assert!((t - l).abs() <= 1e-9 * t.abs().max(1e-30), "lift identity broke: {t} vs {l}");
            }

            let g_truth = phase2_effective_gain(&ch, &theta2).norm_sqr();
            let g_lift = lift_quadratic(&lifts.r5, &theta2) + lifts.b5.norm_sqr();
            assert!((g_truth - g_lift).abs() <= 1e-9 * g_truth.abs().max(1e-30));
        }
    }

    #[test]
    fn design_serde_round_trip() {
        let d = Design {
            beta: 0.25,
            w1: vec![c(0.1, -0.2)],
            w2: vec![c(0.0, 0.3)],
            theta1: vec![c(1.0, 0.0)],
            theta2: vec![c(0.0, 1.0)],
        };
        let s = serde_json::to_string(&d).unwrap();
        // complex entries appear as [re, im] pairs
        assert!(s.contains("[0.1,-0.2]"));
        let back: Design = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::default().validate().is_ok());
        let bad = SystemParams { eta: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SystemParams { tau: 0.4, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
