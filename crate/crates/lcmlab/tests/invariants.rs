//! Cross-module and trend invariants that don't fit a single unit module:
//! the small-prime mass stays N log N + O(N) across cutoffs, the lcm ratio
//! sits inside its theoretical bracket, and the quadratic secondary term
//! stabilizes. Everything here is deterministic (exact tables, fixed
//! seeds), so the assertions are tight.

use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::Ratio;

use lcmlab::experiments::{self, ExperimentConfig};
use lcmlab::poly::Polynomial;
use lcmlab::valuation::TableStore;
use lcmlab::zerosum;

fn store() -> &'static TableStore {
    static STORE: OnceLock<TableStore> = OnceLock::new();
    STORE.get_or_init(TableStore::in_memory)
}

fn poly(s: &str) -> Polynomial {
    Polynomial::from_str(s).unwrap()
}

#[test]
fn small_prime_mass_is_nlogn_plus_linear_for_each_cutoff() {
    for name in ["X^2+1", "X^4-2"] {
        let f = poly(name);
        for c in [1u64, 2, 4] {
            for n in [200u64, 1000, 4000] {
                let t = store()
                    .get_or_build(&f, n, Ratio::from_integer(c))
                    .unwrap();
                let mass = t.mass_split();
                let nf = n as f64;
                let gap = (mass.small_mass - nf * nf.ln()) / nf;
                assert!(
                    gap.abs() <= 5.0,
                    "{name} c={c} N={n}: small-mass gap {gap}"
                );
            }
        }
    }
}

#[test]
fn lcm_ratio_bracketed_for_even_quartic() {
    // 2(d-1)/d = 3/2 from below (the proved bound), d-1 = 3 from above
    // (the product bound); finite-N wiggle stays well inside
    let f = poly("X^4-2");
    for n in [500u64, 1000, 2000] {
        let t = store().get_or_build(&f, n, Ratio::from_integer(2)).unwrap();
        let mass = t.mass_split();
        let ratio = mass.log_l / (n as f64 * (n as f64).ln());
        assert!(
            (1.5..3.1).contains(&ratio),
            "N={n}: log L / (N log N) = {ratio}"
        );
    }
}

#[test]
fn quadratic_lcm_ratio_trends_to_one() {
    let f = poly("X^2+1");
    let mut deviations = Vec::new();
    for n in [200u64, 1000, 4000] {
        let t = store().get_or_build(&f, n, Ratio::from_integer(2)).unwrap();
        let ratio = t.mass_split().log_l / (n as f64 * (n as f64).ln());
        deviations.push((ratio - 1.0).abs());
    }
    assert!(deviations.windows(2).all(|w| w[1] < w[0]), "{deviations:?}");
    assert!(*deviations.last().unwrap() < 0.05);
}

#[test]
fn quadratic_secondary_term_stabilizes() {
    let cfg = ExperimentConfig::default();
    let (_, trends) = experiments::growth_scan(
        &poly("X^2+1"),
        &[500, 1000, 2000],
        Ratio::from_integer(2),
        &cfg,
        store(),
    )
    .unwrap();
    let b = &trends.b_estimate;
    let d1 = (b[1] - b[0]).abs();
    let d2 = (b[2] - b[1]).abs();
    assert!(d1 < 0.1 && d2 < 0.1, "b-estimate diffs {d1}, {d2}");
    assert!(d2 <= d1, "differences should shrink: {d1} then {d2}");
}

#[test]
fn pairing_bound_agrees_with_tables_for_even_family() {
    // no prime above 2N may divide more than minimal_u - 1 of the values
    for name in ["X^4-2", "X^6+1"] {
        let f = poly(name);
        let mu = zerosum::minimal_u(&zerosum::find_roots(&f).unwrap());
        assert!(mu.usable);
        for n in [500u64, 1000] {
            let t = store().get_or_build(&f, n, Ratio::from_integer(2)).unwrap();
            let report = t.verify_mu_bounds(mu.value, &[Ratio::from_integer(2)]);
            assert!(
                report.algnt_violations.is_empty(),
                "{name} N={n}: {:?}",
                report.algnt_violations
            );
        }
    }
}
