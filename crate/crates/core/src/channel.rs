//! Seeded channel realizations: node geometry, log-distance path loss,
//! Rician fading on RIS-assisted links, Rayleigh fading on direct links.
//!
//! All randomness flows through a ChaCha stream keyed by the caller's seed,
//! with a fixed draw order, so a `(geometry, fading, dims, seed)` tuple maps
//! to exactly one [`ChannelSet`]. Monte-Carlo sweeps use disjoint seeds per
//! realization (`seed = base ^ index`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid fading parameters: {0}")]
    InvalidParams(String),
}

/// Node positions in meters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Geometry {
    pub ap_pos: [f64; 3],
    pub ris_pos: [f64; 3],
    pub u1_pos: [f64; 3],
    pub u2_pos: [f64; 3],
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            ap_pos: [0.0, 2.0, 0.0],
            ris_pos: [11.0, 2.0, 0.0],
            u1_pos: [8.0, 0.0, 0.0],
            u2_pos: [12.0, 2.0, 0.0],
        }
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl Geometry {
    pub fn d_ap_u1(&self) -> f64 {
        dist(self.ap_pos, self.u1_pos)
    }
    pub fn d_ap_u2(&self) -> f64 {
        dist(self.ap_pos, self.u2_pos)
    }
    pub fn d_u1_u2(&self) -> f64 {
        dist(self.u1_pos, self.u2_pos)
    }
    pub fn d_ap_ris(&self) -> f64 {
        dist(self.ap_pos, self.ris_pos)
    }
    pub fn d_ris_u1(&self) -> f64 {
        dist(self.ris_pos, self.u1_pos)
    }
    pub fn d_ris_u2(&self) -> f64 {
        dist(self.ris_pos, self.u2_pos)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let pairs = [
            ("ap-u1", self.d_ap_u1()),
            ("ap-u2", self.d_ap_u2()),
            ("u1-u2", self.d_u1_u2()),
            ("ap-ris", self.d_ap_ris()),
            ("ris-u1", self.d_ris_u1()),
            ("ris-u2", self.d_ris_u2()),
        ];
        for (name, d) in pairs {
            if d <= 0.0 {
                return Err(ChannelError::InvalidGeometry(format!(
                    "coincident nodes: distance {name} = {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Large- and small-scale fading parameters.
///
/// Exponents: the AP-U1 and U1-U2 links use `alpha_ap_u1` / `alpha_u1_u2`
/// (default 3.5), the AP-U2 link the largest exponent (default 4, the weak
/// user has the worst direct link), and every RIS-assisted segment
/// `alpha_ris` (default 2). `rician_k` is the linear Ricean factor of the
/// RIS-assisted links; direct links are Rayleigh.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FadingParams {
    pub alpha_ap_u1: f64,
    pub alpha_u1_u2: f64,
    pub alpha_ap_u2: f64,
    pub alpha_ris: f64,
    pub rician_k: f64,
    /// Reference path loss at 1 m, in dB.
    pub pl_ref_db: f64,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self {
            alpha_ap_u1: 3.5,
            alpha_u1_u2: 3.5,
            alpha_ap_u2: 4.0,
            alpha_ris: 2.0,
            rician_k: 2.0,
            pl_ref_db: -30.0,
        }
    }
}

impl FadingParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        for (name, a) in [
            ("alpha_ap_u1", self.alpha_ap_u1),
            ("alpha_u1_u2", self.alpha_u1_u2),
            ("alpha_ap_u2", self.alpha_ap_u2),
            ("alpha_ris", self.alpha_ris),
        ] {
            if a < 2.0 {
                return Err(ChannelError::InvalidParams(format!(
                    "path-loss exponent {name} = {a} below free-space value 2"
                )));
            }
        }
        if self.rician_k < 0.0 {
            return Err(ChannelError::InvalidParams(format!(
                "rician_k = {} must be nonnegative",
                self.rician_k
            )));
        }
        Ok(())
    }
}

/// One realization of all seven channel coefficients.
///
/// Vectors are columns; inner products with beamformers are taken as
/// `h^H w`. `g_mat` is the M x N AP-to-RIS matrix (rows indexed by RIS
/// element).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// AP -> U1 direct link (N).
    pub h_d1: DVector<Complex64>,
    /// AP -> U2 direct link (N).
    pub h_d2: DVector<Complex64>,
    /// AP -> RIS (M x N).
    pub g_mat: DMatrix<Complex64>,
    /// RIS -> U1 (M).
    pub h_r1: DVector<Complex64>,
    /// RIS -> U2 (M).
    pub h_r2: DVector<Complex64>,
    /// U1 -> U2 direct link.
    pub g_d: Complex64,
    /// U1 -> RIS (M).
    pub g: DVector<Complex64>,
    /// RIS -> U2, phase 2 (M).
    pub g_r: DVector<Complex64>,
}

impl ChannelSet {
    pub fn n_antennas(&self) -> usize {
        self.h_d1.len()
    }

    pub fn m_elements(&self) -> usize {
        self.h_r1.len()
    }

    /// The same realization with the RIS removed (M = 0). Direct links are
    /// kept bit-identical.
    pub fn without_ris(&self) -> Self {
        let n = self.n_antennas();
        Self {
            h_d1: self.h_d1.clone(),
            h_d2: self.h_d2.clone(),
            g_mat: DMatrix::zeros(0, n),
            h_r1: DVector::zeros(0),
            h_r2: DVector::zeros(0),
            g_d: self.g_d,
            g: DVector::zeros(0),
            g_r: DVector::zeros(0),
        }
    }
}

/// Linear amplitude-squared gain of the log-distance model
/// `PL_dB = pl_ref_db - 10 alpha log10(d)`.
pub fn path_loss_linear(d: f64, alpha: f64, pl_ref_db: f64) -> Result<f64, ChannelError> {
    if d <= 0.0 {
        return Err(ChannelError::InvalidGeometry(format!(
            "path loss requires positive distance, got {d}"
        )));
    }
    Ok(10f64.powf((pl_ref_db - 10.0 * alpha * d.log10()) / 10.0))
}

fn cn01(rng: &mut ChaCha12Rng) -> Complex64 {
    // Circularly-symmetric complex Gaussian with unit variance.
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unit-modulus steering ramp `exp(j pi k sin(az))`, `k = 0..len`.
fn phase_ramp(len: usize, azimuth: f64) -> Vec<Complex64> {
    (0..len)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * azimuth.sin()))
        .collect()
}

fn azimuth(from: [f64; 3], to: [f64; 3]) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0])
}

/// Draws one channel realization.
///
/// Direct-link entries are `sqrt(PL) * CN(0,1)`. Each RIS-assisted entry is
/// `sqrt(PL) * (sqrt(K/(K+1)) * LoS + sqrt(1/(K+1)) * CN(0,1))`, where the
/// LoS component is the deterministic geometry-derived ramp of
/// [`phase_ramp`] (outer product of RIS-side and AP-side ramps for the
/// AP-RIS matrix). Identical `(geom, fading, n, m, seed)` yields an
/// identical `ChannelSet`.
pub fn sample_channels(
    geom: &Geometry,
    fading: &FadingParams,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<ChannelSet, ChannelError> {
    geom.validate()?;
    fading.validate()?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let pl = |d: f64, alpha: f64| path_loss_linear(d, alpha, fading.pl_ref_db);

    let pl_ap_u1 = pl(geom.d_ap_u1(), fading.alpha_ap_u1)?.sqrt();
    let pl_ap_u2 = pl(geom.d_ap_u2(), fading.alpha_ap_u2)?.sqrt();
    let pl_u1_u2 = pl(geom.d_u1_u2(), fading.alpha_u1_u2)?.sqrt();
    let pl_ap_ris = pl(geom.d_ap_ris(), fading.alpha_ris)?.sqrt();
    let pl_ris_u1 = pl(geom.d_ris_u1(), fading.alpha_ris)?.sqrt();
    let pl_ris_u2 = pl(geom.d_ris_u2(), fading.alpha_ris)?.sqrt();

    let k = fading.rician_k;
    let los_w = (k / (k + 1.0)).sqrt();
    let nlos_w = (1.0 / (k + 1.0)).sqrt();

    // Draw order is part of the determinism contract: h_d1, h_d2, G (row
    // major), h_r1, h_r2, g_d, g, g_r.
    let h_d1 = DVector::from_fn(n, |_, _| pl_ap_u1 * cn01(&mut rng));
    let h_d2 = DVector::from_fn(n, |_, _| pl_ap_u2 * cn01(&mut rng));

    let ramp_ris_from_ap = phase_ramp(m, azimuth(geom.ris_pos, geom.ap_pos));
    let ramp_ap_to_ris = phase_ramp(n, azimuth(geom.ap_pos, geom.ris_pos));
    let mut g_mat = DMatrix::<Complex64>::zeros(m, n);
    for r in 0..m {
        for c in 0..n {
            let los = ramp_ris_from_ap[r] * ramp_ap_to_ris[c].conj();
            g_mat[(r, c)] = pl_ap_ris * (los_w * los + nlos_w * cn01(&mut rng));
        }
    }

    let rician_vec = |rng: &mut ChaCha12Rng, amp: f64, az: f64| -> DVector<Complex64> {
        let ramp = phase_ramp(m, az);
        DVector::from_fn(m, |i, _| amp * (los_w * ramp[i] + nlos_w * cn01(rng)))
    };

    let h_r1 = rician_vec(&mut rng, pl_ris_u1, azimuth(geom.ris_pos, geom.u1_pos));
    let h_r2 = rician_vec(&mut rng, pl_ris_u2, azimuth(geom.ris_pos, geom.u2_pos));
    let g_d = pl_u1_u2 * cn01(&mut rng);
    let g = rician_vec(&mut rng, pl_ris_u1, azimuth(geom.ris_pos, geom.u1_pos));
    let g_r = rician_vec(&mut rng, pl_ris_u2, azimuth(geom.ris_pos, geom.u2_pos));

    Ok(ChannelSet {
        h_d1,
        h_d2,
        g_mat,
        h_r1,
        h_r2,
        g_d,
        g,
        g_r,
    })
}
