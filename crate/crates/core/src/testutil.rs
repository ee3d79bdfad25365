//! Scenario builders shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CVector, C64};
use crate::model::Scenario;

/// Complex Gaussian vector with entry variance `var`.
pub fn cn_vector(rng: &mut ChaCha8Rng, m: usize, var: f64) -> CVector {
    let sd = (var / 2.0).sqrt();
    CVector::from_fn(m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(sd * re, sd * im)
    })
}

/// A scenario with the default link budget: 70 dB loss to ID receivers,
/// 30 dB to EH receivers, `σ² = −50 dBm`, `P = 1 W`, `ζ = 0.5`.
pub fn nominal_draw(seed: u64, m: usize, k_i: usize, k_e: usize, gamma_db: f64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = 10f64.powf(gamma_db / 10.0);
    Scenario::new(
        m,
        (0..k_i).map(|_| cn_vector(&mut rng, m, 1e-7)).collect(),
        (0..k_e).map(|_| cn_vector(&mut rng, m, 1e-3)).collect(),
        vec![1e-8; k_i],
        vec![gamma; k_i],
        vec![1.0 / k_e.max(1) as f64; k_e],
        0.5,
        1.0,
    )
    .unwrap()
}
