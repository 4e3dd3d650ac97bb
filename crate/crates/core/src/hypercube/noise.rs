use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{check_bias, check_probability, Result};
use crate::hypercube::Configuration;

/// `N_ε(ω)`: every coordinate is independently resampled with probability
/// `eps`; a resampled coordinate is `+1` with probability `p`.
///
/// This is resampling, not flipping: at `p = 1/2` a coordinate changes with
/// probability `eps / 2`, and `P_p` is stationary.
pub fn apply_noise<R: Rng + ?Sized>(c: &Configuration, eps: f64, p: f64, rng: &mut R) -> Result<Configuration> {
    let mut out = c.clone();
    apply_noise_in_place(&mut out, eps, p, rng)?;
    Ok(out)
}

pub fn apply_noise_in_place<R: Rng + ?Sized>(c: &mut Configuration, eps: f64, p: f64, rng: &mut R) -> Result<()> {
    check_probability("epsilon", eps)?;
    check_bias(p)?;
    let n = c.len();
    if eps == 0.0 || n == 0 {
        return Ok(());
    }
    if eps == 1.0 {
        c.fill_random(p, rng);
        return Ok(());
    }
    // Gaps between resampled positions are geometric: floor(E / λ) with
    // E ~ Exp(1) and λ = −ln(1 − ε).
    let rate = -(-eps).ln_1p();
    let fair = p == 0.5;
    let (mut bits, mut left) = (0u64, 0u32);
    let mut pos = 0usize;
    loop {
        let e: f64 = Exp1.sample(rng);
        let gap = (e / rate).floor();
        if gap >= (n - pos) as f64 {
            break;
        }
        pos += gap as usize;
        let plus = if fair {
            if left == 0 {
                bits = rng.random();
                left = 64;
            }
            left -= 1;
            let b = bits & 1 == 1;
            bits >>= 1;
            b
        } else {
            rng.random_bool(p)
        };
        c.set(pos, plus);
        pos += 1;
        if pos >= n {
            break;
        }
    }
    Ok(())
}
