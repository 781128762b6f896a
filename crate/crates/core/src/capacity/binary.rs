//! Closed-form capacity of a binary-input, binary-output channel.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Binary entropy in bits.
pub fn binary_entropy<T: Real>(x: T) -> T {
    x.eta() + (T::one() - x).eta()
}

/// Capacity in bits of the channel whose two inputs produce outcome 1 with
/// probabilities `alpha` and `beta`, and the optimal probability of the
/// `alpha` input.
///
/// With `z = 2^{(H(α) − H(β))/(β − α)}`:
/// `C = [α H(β) − β H(α)]/(β − α) + log₂(1 + z)`, and the optimal output
/// distribution puts `z/(1 + z)` on outcome 1. Equal parameters give a
/// useless channel: capacity 0 and prior 1/2 by convention.
pub fn binary_capacity<T: Real>(alpha: T, beta: T) -> Result<(T, T)> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::OutOfRange(format!("{name} = {v} not in [0, 1]")));
        }
    }
    if (alpha - beta).abs() <= T::tol(1e-14) {
        return Ok((T::zero(), T::lit(0.5)));
    }
    let (ha, hb) = (binary_entropy(alpha), binary_entropy(beta));
    let expo = (ha - hb) / (beta - alpha);
    // log2(1 + 2^x) without overflow
    let softplus = if expo > T::zero() {
        expo + (-expo).exp2().ln_1p() / T::LN_2()
    } else {
        expo.exp2().ln_1p() / T::LN_2()
    };
    let capacity = (alpha * hb - beta * ha) / (beta - alpha) + softplus;
    let q1 = T::one() / (T::one() + (-expo).exp2());
    let p = ((q1 - beta) / (alpha - beta)).max(T::zero()).min(T::one());
    Ok((capacity.max(T::zero()), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn information(p: f64, a: f64, b: f64) -> f64 {
        let q = p * a + (1.0 - p) * b;
        binary_entropy(q) - p * binary_entropy(a) - (1.0 - p) * binary_entropy(b)
    }

    #[test]
    fn noiseless_and_symmetric() {
        let (c, p) = binary_capacity(0.0, 1.0).unwrap();
        assert!(f64::abs(c - 1.0) < 1e-15 && f64::abs(p - 0.5) < 1e-15);
        let (c, p) = binary_capacity(0.1, 0.9).unwrap();
        assert!(f64::abs(c - (1.0 - binary_entropy(0.1))) < 1e-12);
        assert!(f64::abs(c - 0.531004) < 1e-6);
        assert!(f64::abs(p - 0.5) < 1e-12);
    }

    #[test]
    fn degenerate_and_invalid() {
        assert_eq!(binary_capacity(0.3, 0.3).unwrap(), (0.0, 0.5));
        assert!(binary_capacity(1.2, 0.3).is_err());
    }

    #[test]
    fn z_channel_prior() {
        let (c, p) = binary_capacity(0.9, 0.2).unwrap();
        assert!(f64::abs(c - 0.397754) < 1e-6);
        assert!(f64::abs(p - 0.517555) < 1e-6);
    }

    #[test]
    fn matches_prior_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let (c, p) = binary_capacity(a, b).unwrap();
            assert!((information(p, a, b) - c).abs() < 1e-10);
            for k in 0..=200 {
                assert!(information(k as f64 / 200.0, a, b) <= c + 1e-12);
            }
        }
    }
}
