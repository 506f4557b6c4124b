use num_complex::Complex64;
use ris_cnoma::bf_ps::{solve_bf_ps, BfPsOptions};
use ris_cnoma::channel::{sample_channels, FadingParams, Geometry};
use ris_cnoma::system_eval::SystemParams;

#[test]
#[ignore]
fn time_bf_ps_n4() {
    let ch = sample_channels(&Geometry::default(), &FadingParams::default(), 4, 20, 1).unwrap();
    let p = SystemParams { n_antennas: 4, m_elements: 20, ..Default::default() };
    let theta1: Vec<Complex64> = (0..20).map(|k| Complex64::from_polar(1.0, 0.3 * k as f64)).collect();
    let theta2 = theta1.clone();
    let t0 = std::time::Instant::now();
    let r = solve_bf_ps(&ch, &theta1, &theta2, &p, &BfPsOptions::default()).unwrap();
    println!("solve_bf_ps N=4 M=20: {:?} rate={} beta={}", t0.elapsed(), r.objective, r.beta);
}
