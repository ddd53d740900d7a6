//! Prime generation for the small-prime stage of the value sieve.

/// All primes `<= limit`, ascending. Odd-only bitset sieve of Eratosthenes;
/// the limits used here (a small multiple of N) keep this comfortably in memory.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = vec![2u64];
    if limit < 3 {
        return primes;
    }
    // bit i represents the odd number 2i + 1; index 0 (= 1) stays unused
    let n_odd = ((limit - 1) / 2) as usize + 1;
    let mut composite = vec![0u64; n_odd / 64 + 1];
    let is_set = |v: &[u64], i: usize| v[i / 64] >> (i % 64) & 1 == 1;
    let mut p = 3u64;
    while p * p <= limit {
        if !is_set(&composite, (p / 2) as usize) {
            let mut m = p * p;
            while m <= limit {
                let i = (m / 2) as usize;
                composite[i / 64] |= 1 << (i % 64);
                m += 2 * p;
            }
        }
        p += 2;
    }
    for i in 1..n_odd {
        if !is_set(&composite, i) {
            primes.push(2 * i as u64 + 1);
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_limits() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(11), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn pi_of_10000() {
        assert_eq!(primes_up_to(10_000).len(), 1229);
    }

    #[test]
    fn agrees_with_trial_division() {
        let primes = primes_up_to(500);
        let slow: Vec<u64> = (2..=500u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(primes, slow);
    }
}
