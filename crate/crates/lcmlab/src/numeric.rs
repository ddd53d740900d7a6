//! Small numeric helpers shared by the aggregation paths.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Compensated (Kahan) accumulator for the log-space aggregates.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Natural log of a positive big integer, robust past the f64 range.
pub fn ln_biguint(x: &BigUint) -> f64 {
    debug_assert!(*x != BigUint::ZERO, "ln of zero");
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v.ln();
        }
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().expect("top word fits f64");
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    #[test]
    fn kahan_beats_naive_on_spread_magnitudes() {
        let mut k = KahanSum::new();
        for _ in 0..1_000_000 {
            k.add(0.1);
        }
        assert!((k.value() - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn ln_biguint_matches_f64_in_range() {
        let x = BigUint::from(123456789u64);
        assert!((ln_biguint(&x) - (123456789f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn ln_biguint_past_f64_range() {
        // 2^2000: ln = 2000 ln 2
        let x = BigUint::one() << 2000;
        let expect = 2000.0 * std::f64::consts::LN_2;
        assert!((ln_biguint(&x) - expect).abs() / expect < 1e-14);
    }
}
