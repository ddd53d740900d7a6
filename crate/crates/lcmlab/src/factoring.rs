//! Primality testing and factorization of sieve residuals.
//!
//! Residuals have had every prime up to the cutoff removed, so they are
//! either 1, a prime, a prime power, or a product of a few large primes.
//! They are attacked in that order: Miller-Rabin, exact k-th-root check,
//! then Brent's variant of Pollard rho with a deterministic schedule so
//! that identical inputs always factor along the identical path.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Budget and seed for the rho stage. The seed only perturbs restart
/// points after a failed attempt; the first attempt is always x0 = 2
/// with increments 1, 3, 5, ...
#[derive(Clone, Copy, Debug)]
pub struct RhoConfig {
    pub budget: u64,
    pub seed: u64,
}

impl Default for RhoConfig {
    fn default() -> Self {
        RhoConfig {
            budget: 1 << 24,
            seed: 0,
        }
    }
}

#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[inline]
fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the 12-prime base set is exact
/// far beyond 2^64).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn is_strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Primality check for arbitrary-precision integers. Exact below 2^64;
/// above, Miller-Rabin with the first 12 primes plus 12 deterministic
/// bases derived from the input, so a given n always gets the same bases.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let mut bases: Vec<BigUint> = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .map(|&p| BigUint::from(p))
        .collect();
    let fingerprint = n.iter_u64_digits().fold(0u64, |acc, d| {
        splitmix64(acc ^ d)
    });
    let mut state = fingerprint;
    for _ in 0..12 {
        state = splitmix64(state);
        bases.push(BigUint::from((state | 1).max(3)));
    }
    bases.iter().all(|b| is_strong_probable_prime(n, &(b % n).max(BigUint::from(2u32))))
}

/// If `n = m^k` for some k >= 2, return one such decomposition (k prime;
/// the factorization recursion peels any remaining power structure off m).
pub fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let two = BigUint::from(2u32);
    if n < &two {
        return None;
    }
    let bits = n.bits() as u32;
    let mut k = 2u32;
    while k <= bits {
        if is_prime_u64(k as u64) {
            let r = n.nth_root(k);
            if r.pow(k) == *n {
                return Some((r, k));
            }
        }
        k += 1;
    }
    None
}

struct IterationBudget {
    left: u64,
}

impl IterationBudget {
    fn consume(&mut self, amount: u64) -> bool {
        if self.left < amount {
            self.left = 0;
            false
        } else {
            self.left -= amount;
            true
        }
    }
}

/// One Brent-rho attempt on odd composite `n` with polynomial x^2 + c from x0.
fn brent_attempt(
    n: &BigUint,
    x0: &BigUint,
    c: &BigUint,
    budget: &mut IterationBudget,
) -> Option<BigUint> {
    let one = BigUint::one();
    let step = |x: &BigUint| (x * x + c) % n;
    let mut y = x0.clone();
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g;
    let mut x;
    let mut ys = y.clone();
    const BATCH: u64 = 128;
    loop {
        x = y.clone();
        if !budget.consume(r) {
            return None;
        }
        for _ in 0..r {
            y = step(&y);
        }
        let mut k: u64 = 0;
        g = BigUint::one();
        while k < r {
            ys = y.clone();
            let m = BATCH.min(r - k);
            if !budget.consume(m) {
                return None;
            }
            for _ in 0..m {
                y = step(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            if g > one {
                break;
            }
            k += m;
        }
        if g > one {
            break;
        }
        r *= 2;
    }
    if g == *n {
        // batched gcd overshot; replay from the last checkpoint step by step
        loop {
            if !budget.consume(1) {
                return None;
            }
            ys = step(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g > one {
                break;
            }
        }
    }
    if g > one && g < *n {
        Some(g)
    } else {
        None
    }
}

fn rho_split(n: &BigUint, cfg: &RhoConfig, budget: &mut IterationBudget) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let mut attempt: u64 = 0;
    while budget.left > 0 {
        // increment schedule 1, 3, 5, ...; restart points perturbed by the seed
        let c = BigUint::from(2 * attempt + 1);
        let x0 = if attempt == 0 {
            BigUint::from(2u32)
        } else {
            BigUint::from(2 + (splitmix64(cfg.seed ^ attempt) & 0xffff))
        };
        if let Some(d) = brent_attempt(n, &(x0 % n), &c, budget) {
            return Some(d);
        }
        attempt += 1;
    }
    None
}

/// Complete factorization of `n`, primes ascending. `Err` carries the
/// composite that resisted the iteration budget.
pub fn factor(n: &BigUint, cfg: &RhoConfig) -> Result<Vec<(BigUint, u32)>, BigUint> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut budget = IterationBudget { left: cfg.budget };
    factor_into(n, cfg, &mut budget, 1, &mut out)?;
    out.sort_by(|a, b| a.0.cmp(&b.0));
    // merge equal primes from different split branches
    let mut merged: Vec<(BigUint, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

fn factor_into(
    n: &BigUint,
    cfg: &RhoConfig,
    budget: &mut IterationBudget,
    multiplicity: u32,
    out: &mut Vec<(BigUint, u32)>,
) -> Result<(), BigUint> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(n) {
        out.push((n.clone(), multiplicity));
        return Ok(());
    }
    if let Some((base, k)) = perfect_power(n) {
        return factor_into(&base, cfg, budget, multiplicity * k, out);
    }
    match rho_split(n, cfg, budget) {
        Some(d) => {
            let q = n / &d;
            factor_into(&d, cfg, budget, multiplicity, out)?;
            factor_into(&q, cfg, budget, multiplicity, out)
        }
        None => Err(n.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn u64_primality_small() {
        let primes: Vec<u64> = (0..100u64).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
        );
    }

    #[test]
    fn u64_primality_carmichael() {
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64(1_122_004_669_633)); // strong pseudoprime to base 2
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
    }

    #[test]
    fn big_primality() {
        // 2^89 - 1 is a Mersenne prime
        let m89 = (BigUint::one() << 89) - BigUint::one();
        assert!(is_prime(&m89));
        let composite = &m89 * BigUint::from(1000003u64);
        assert!(!is_prime(&composite));
    }

    #[test]
    fn perfect_power_detection() {
        let n = BigUint::from(3u32).pow(40);
        let (base, k) = perfect_power(&n).unwrap();
        assert!(k >= 2);
        assert_eq!(base.pow(k), n);
        let p7 = BigUint::from(1000003u64).pow(7);
        let (base, k) = perfect_power(&p7).unwrap();
        assert_eq!((base, k), (BigUint::from(1000003u64), 7));
        assert!(perfect_power(&BigUint::from(97u32)).is_none());
        let pq = BigUint::from(1009u32) * BigUint::from(1013u32);
        assert!(perfect_power(&pq).is_none());
    }

    #[test]
    fn prime_powers_factor_via_root_check() {
        let cfg = RhoConfig::default();
        let n = BigUint::from(1000003u64).pow(3);
        assert_eq!(factor(&n, &cfg).unwrap(), vec![(BigUint::from(1000003u64), 3)]);
    }

    #[test]
    fn factors_semiprime_of_large_primes() {
        let p = BigUint::from_str("2147483659").unwrap(); // prime > 2^31
        let q = BigUint::from_str("2147483693").unwrap();
        let n = &p * &q;
        let fs = factor(&n, &RhoConfig::default()).unwrap();
        assert_eq!(fs, vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn factorization_reconstructs_input() {
        let cfg = RhoConfig::default();
        for n in [1u64, 2, 97, 1024, 3 * 3 * 5 * 49, 1_000_000_007, 600_851_475_143] {
            let n = BigUint::from(n);
            let fs = factor(&n, &cfg).unwrap();
            let prod = fs
                .iter()
                .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
            assert_eq!(prod, n);
            for (p, _) in &fs {
                assert!(is_prime(p), "{p} not prime");
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let p = BigUint::from_str("618970019642690137449562111").unwrap(); // 2^89-1
        let q = BigUint::from_str("162259276829213363391578010288127").unwrap(); // 2^107-1
        let n = &p * &q;
        let cfg = RhoConfig {
            budget: 1000,
            seed: 7,
        };
        assert!(factor(&n, &cfg).is_err());
    }

    #[test]
    fn deterministic_across_runs() {
        let n = BigUint::from(2u64 * 3 * 3 * 1_000_033 * 1_000_037);
        let cfg = RhoConfig::default();
        assert_eq!(factor(&n, &cfg).unwrap(), factor(&n, &cfg).unwrap());
    }
}
