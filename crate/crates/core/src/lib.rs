//! Optimization stack for an RIS-assisted cooperative-NOMA network with
//! simultaneous wireless information and power transfer.
//!
//! An access point with `N` antennas serves a strong user U1 and a weak user
//! U2 over two phases: a direct superposition-coded transmission assisted by
//! an `M`-element reconfigurable intelligent surface, followed by a
//! cooperative phase in which U1 relays U2's symbol using harvested energy.
//! The design problem maximizes U1's achievable rate subject to U2's QoS,
//! jointly over the power-splitting factor, the transmit beamformers, and
//! the RIS reflection coefficients of both phases.
//!
//! Module map:
//! - [`numerics`]: Hermitian linear-algebra utilities (dominant eigenpairs,
//!   spectral-norm subgradients, unit-modulus projection).
//! - [`channel`]: seeded channel realizations (geometry, log-distance path
//!   loss, Rician/Rayleigh small-scale fading).
//! - [`system_eval`]: exact evaluation of every physical quantity (SINRs,
//!   harvested power, rate, feasibility margins) and the lifted matrices
//!   used by the semidefinite subproblems. This is the ground-truth oracle
//!   the optimizers are checked against.
//! - [`conic`]: a small dense interior-point solver for Hermitian-PSD
//!   programs with trace-linear rows and second-order-cone rows.
//! - [`bf_ps`]: joint beamforming + power-splitting subproblem (SDR with a
//!   scalar search over the splitting factor).
//! - [`phase_opt`]: RIS phase optimization via penalized SDP iterations for
//!   phase 1 and an SCA feasibility refinement for phase 2.
//! - [`ao_driver`]: the outer alternating-optimization loop and the two
//!   baseline schemes (random phase, no RIS).

pub mod ao_driver;
pub mod bf_ps;
pub mod channel;
pub mod conic;
pub mod numerics;
pub mod phase_opt;
pub mod system_eval;

pub use num_complex::Complex64;
