//! Assembled inequality checks and growth scans.
//!
//! Each check compares a power of L (the lcm) or ell (the radical) against
//! the product of the large-prime contributions to Q:
//!
//! - the pairing bound gives L^{d/2} >= prod_{p > 2N} p^{alpha_p} for even f;
//! - combining the pairing bound with the per-depth cap gives
//!   ell^{(d-u/2)(u-1)} >= prod_{p > cN} p^{alpha_p};
//! - for f = X^{2^eta}+1 the positional filter sharpens the exponent to
//!   eta * 2^{eta-1}.
//!
//! The exponents are cross-checked against the enumeration module, the
//! cutoffs default to the smallest grid value with no admissibility
//! violations in the actual data (never a hardcoded constant), and the
//! inequalities are evaluated in log space with compensated sums, with an
//! exact big-integer path behind a flag for moderate N.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;

use crate::error::Error;
use crate::poly::{IrreducibilityVerdict, Polynomial};
use crate::tuples::{self, AdmissibilityFilter, ValuationProfile};
use crate::valuation::{
    cutoff_bound, default_cutoff_grid, format_ratio, FactorizationTable, TableStore,
};
use crate::zerosum;
use crate::Result;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Prime budget for the irreducibility witness scan.
    pub witness_budget: u64,
    /// Proceed when the witness scan returns Unknown.
    pub allow_unknown: bool,
    /// Proceed when the polynomial is provably reducible (the mu-bound
    /// machinery only needs monic and even, not irreducible).
    pub allow_reducible: bool,
    /// Cutoff grid searched for the minimal violation-free c.
    pub cutoff_grid: Vec<Ratio<u64>>,
    /// Also confirm each inequality with exact big-integer arithmetic.
    pub exact_check: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            witness_budget: 10_000,
            allow_unknown: false,
            allow_reducible: false,
            cutoff_grid: default_cutoff_grid(),
            exact_check: false,
        }
    }
}

/// Per-(f, N) ledger row: the log masses, the theorem exponent h, the
/// inequality margin h*log(L or ell) - large_mass, and the gap of the bound
/// target against its leading term.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub poly: String,
    pub n: u64,
    pub c: Ratio<u64>,
    pub log_q: f64,
    pub log_l: f64,
    pub log_ell: f64,
    pub small_mass: f64,
    pub large_mass: f64,
    pub h: Option<Ratio<u64>>,
    pub margin: Option<f64>,
    pub normalized_gap: Option<f64>,
    /// Exact big-integer confirmation, when requested.
    pub exact_holds: Option<bool>,
}

impl BoundReport {
    /// Floating tolerance on an exactly-true inequality.
    pub fn margin_ok(&self) -> bool {
        match self.margin {
            Some(m) => m >= -1e-6 * self.large_mass.max(1.0),
            None => true,
        }
    }
}

/// Trend sequences from a growth scan, one entry per grid point.
#[derive(Clone, Debug, Default)]
pub struct GrowthTrends {
    pub n: Vec<u64>,
    /// (log Q - d N log N) / N
    pub q_gap: Vec<f64>,
    /// (small_mass - N log N) / N
    pub small_gap: Vec<f64>,
    /// log L / (N log N)
    pub l_ratio: Vec<f64>,
    /// log ell / (N log N)
    pub ell_ratio: Vec<f64>,
    /// (log L - N log N) / N, the secondary-term estimate for quadratics
    pub b_estimate: Vec<f64>,
}

/// Enforce the irreducibility policy on an input polynomial.
pub fn gate_polynomial(f: &Polynomial, cfg: &ExperimentConfig) -> Result<()> {
    match f.irreducibility_witness(cfg.witness_budget) {
        IrreducibilityVerdict::Irreducible { .. } => Ok(()),
        IrreducibilityVerdict::Reducible { factor } => {
            if cfg.allow_reducible {
                Ok(())
            } else {
                Err(Error::Reducible(crate::poly::render_poly(&factor)))
            }
        }
        IrreducibilityVerdict::Unknown => {
            if cfg.allow_unknown {
                Ok(())
            } else {
                Err(Error::IrreducibilityUnknown(cfg.witness_budget))
            }
        }
    }
}

/// Per-cutoff list of primes whose valuation profile violates the filter.
pub type CutoffViolations = Vec<(Ratio<u64>, Vec<BigUint>)>;

/// Violations of `filter` among the valuation profiles of primes above each
/// grid cutoff, plus the minimal violation-free cutoff. This is the
/// data-driven substitute for the unspecified "p large enough" constant.
pub fn minimal_admissible_cutoff(
    table: &FactorizationTable,
    filter: &AdmissibilityFilter,
    grid: &[Ratio<u64>],
) -> Result<(CutoffViolations, Option<Ratio<u64>>)> {
    let mut grid: Vec<Ratio<u64>> = grid.to_vec();
    grid.sort();
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::Config("empty cutoff grid".into()));
    }
    let min_bound = cutoff_bound(grid[0], table.n_max());
    let profiles: Vec<(BigUint, ValuationProfile)> = table
        .prime_profiles_above(min_bound)
        .into_iter()
        .map(|(p, values)| ValuationProfile::new(values).map(|prof| (p, prof)))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut minimal_free = None;
    for &c in &grid {
        let bound = BigUint::from(cutoff_bound(c, table.n_max()));
        let violating: Vec<BigUint> = profiles
            .iter()
            .filter(|(p, prof)| *p > bound && !filter.admits(prof))
            .map(|(p, _)| p.clone())
            .collect();
        if violating.is_empty() && minimal_free.is_none() {
            minimal_free = Some(c);
        }
        out.push((c, violating));
    }
    Ok((out, minimal_free))
}

fn grid_display(grid: &[Ratio<u64>]) -> String {
    grid.iter()
        .map(|c| format_ratio(*c))
        .collect::<Vec<_>>()
        .join(", ")
}

/// h * log(target) - large_mass plus the trend gap against coef * N log N.
fn assemble(
    table: &FactorizationTable,
    target_is_radical: bool,
    h: Ratio<u64>,
    coef: Ratio<u64>,
    exact: Option<bool>,
) -> BoundReport {
    let mass = table.mass_split();
    let n = table.n_max();
    let nlogn = n as f64 * (n as f64).ln();
    let target = if target_is_radical {
        mass.log_ell
    } else {
        mass.log_l
    };
    let h_f = *h.numer() as f64 / *h.denom() as f64;
    let coef_f = *coef.numer() as f64 / *coef.denom() as f64;
    BoundReport {
        poly: table.poly().to_string(),
        n,
        c: table.cutoff(),
        log_q: mass.log_q,
        log_l: mass.log_l,
        log_ell: mass.log_ell,
        small_mass: mass.small_mass,
        large_mass: mass.large_mass,
        h: Some(h),
        margin: Some(h_f * target - mass.large_mass),
        normalized_gap: Some((target - coef_f * nlogn) / n as f64),
        exact_holds: exact,
    }
}

/// target^h >= prod_{p>cN} p^{alpha_p} in exact integers, h = a/b rational.
fn exact_inequality(
    table: &FactorizationTable,
    target_is_radical: bool,
    h: Ratio<u64>,
) -> Result<bool> {
    if table.n_max() > 500 {
        return Err(Error::Config(
            "exact big-integer check is limited to N <= 500".into(),
        ));
    }
    let target = if target_is_radical {
        table.ell_exact()
    } else {
        table.l_exact()
    };
    let product = table.large_product_exact(table.cutoff());
    let a = u32::try_from(*h.numer()).expect("exponent fits u32");
    let b = u32::try_from(*h.denom()).expect("exponent fits u32");
    Ok(target.pow(a) >= product.pow(b))
}

fn require_min_n(n: u64) -> Result<()> {
    if n < 100 {
        return Err(Error::Config(
            "theorem checks need N >= 100 to be meaningful".into(),
        ));
    }
    Ok(())
}

/// L^{d/2} against the primes above 2N. Needs even f; the inequality is a
/// theorem, so a negative margin beyond float tolerance is an
/// implementation bug, which is exactly what makes it a strong oracle.
pub fn check_theorem2(
    f: &Polynomial,
    n: u64,
    cfg: &ExperimentConfig,
    store: &TableStore,
) -> Result<BoundReport> {
    if !f.is_even() {
        return Err(Error::NotEven);
    }
    require_min_n(n)?;
    gate_polynomial(f, cfg)?;
    let d = f.degree() as u64;
    let table = store.get_or_build(f, n, Ratio::from_integer(2))?;
    let h = Ratio::new(d, 2);
    let coef = Ratio::new(2 * (d - 1), d);
    let exact = if cfg.exact_check {
        Some(exact_inequality(&table, false, h)?)
    } else {
        None
    };
    Ok(assemble(&table, false, h, coef, exact))
}

/// ell^{(d-u/2)(u-1)} against the primes above cN, with u from the negation
/// pairing and c defaulting to the minimal cutoff at which every prime
/// profile passes the combined per-depth filter.
pub fn check_theorem3(
    f: &Polynomial,
    n: u64,
    c: Option<Ratio<u64>>,
    cfg: &ExperimentConfig,
    store: &TableStore,
) -> Result<BoundReport> {
    if !f.is_even() {
        return Err(Error::NotEven);
    }
    require_min_n(n)?;
    gate_polynomial(f, cfg)?;
    let d = f.degree();
    let roots = zerosum::find_roots(f)?;
    let mu = zerosum::minimal_u(&roots);
    if !mu.usable {
        return Err(Error::NoPairingU);
    }
    let u = mu.value;
    let h_weight = tuples::generic_u_exponent(d, u)?;
    let h = Ratio::from_integer(h_weight);
    let table = store.get_or_build(f, n, Ratio::from_integer(2))?;
    let c = match c {
        Some(c) => c,
        None => {
            let filter = AdmissibilityFilter::generic_u(d, u);
            let (_, free) = minimal_admissible_cutoff(&table, &filter, &cfg.cutoff_grid)?;
            free.ok_or_else(|| Error::NoCutoff(grid_display(&cfg.cutoff_grid)))?
        }
    };
    let table = table.with_cutoff(c);
    let d = d as u64;
    let coef = Ratio::new(8 * (d - 1), d * (3 * d - 2));
    let exact = if cfg.exact_check {
        Some(exact_inequality(&table, true, h)?)
    } else {
        None
    };
    Ok(assemble(&table, true, h, coef, exact))
}

/// f = X^{2^eta} + 1.
pub fn cyclotomic_power_poly(eta: u32) -> Polynomial {
    let d = 1usize << eta;
    let mut coeffs = vec![num_bigint::BigInt::from(0); d + 1];
    coeffs[0] = num_bigint::BigInt::one();
    coeffs[d] = num_bigint::BigInt::one();
    Polynomial::new(coeffs).expect("X^{2^eta}+1 is monic of degree >= 2")
}

/// ell^{eta 2^{eta-1}} against the primes above cN for f = X^{2^eta}+1,
/// the exponent cross-checked against the positional-filter enumeration.
/// The family is the known-irreducible power-of-two cyclotomic, so no
/// witness gate applies (its members defeat the mod-p witness anyway).
pub fn check_theorem4(
    eta: u32,
    n: u64,
    c: Option<Ratio<u64>>,
    cfg: &ExperimentConfig,
    store: &TableStore,
) -> Result<BoundReport> {
    if !(1..=3).contains(&eta) {
        return Err(Error::Config(format!(
            "eta must be in 1..=3 at desk scale, got {eta}"
        )));
    }
    require_min_n(n)?;
    let f = cyclotomic_power_poly(eta);
    let h_weight = tuples::max_weight(&AdmissibilityFilter::baier_dey(eta))?;
    let closed_form = eta as u64 * (1u64 << (eta - 1));
    assert_eq!(
        h_weight, closed_form,
        "enumerated exponent disagrees with eta 2^(eta-1) at eta={eta}"
    );
    let h = Ratio::from_integer(h_weight);
    let table = store.get_or_build(&f, n, Ratio::from_integer(2))?;
    let c = match c {
        Some(c) => c,
        None => {
            let filter = AdmissibilityFilter::baier_dey(eta);
            let (_, free) = minimal_admissible_cutoff(&table, &filter, &cfg.cutoff_grid)?;
            free.ok_or_else(|| Error::NoCutoff(grid_display(&cfg.cutoff_grid)))?
        }
    };
    let table = table.with_cutoff(c);
    let coef = Ratio::new((1u64 << eta) - 1, closed_form);
    let exact = if cfg.exact_check {
        Some(exact_inequality(&table, true, h)?)
    } else {
        None
    };
    Ok(assemble(&table, true, h, coef, exact))
}

/// Per-N mass reports over an increasing grid, plus the trend sequences
/// used to eyeball the growth laws (the asymptotics themselves are not
/// assertable at finite N).
pub fn growth_scan(
    f: &Polynomial,
    grid: &[u64],
    c: Ratio<u64>,
    cfg: &ExperimentConfig,
    store: &TableStore,
) -> Result<(Vec<BoundReport>, GrowthTrends)> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("grid must be strictly increasing".into()));
    }
    if grid[0] < 100 {
        return Err(Error::Config("growth grid starts at N >= 100".into()));
    }
    gate_polynomial(f, cfg)?;
    let d = f.degree() as f64;
    let mut reports = Vec::new();
    let mut trends = GrowthTrends::default();
    for &n in grid {
        let table = store.get_or_build(f, n, c)?;
        let mass = table.mass_split();
        let nf = n as f64;
        let nlogn = nf * nf.ln();
        trends.n.push(n);
        trends.q_gap.push((mass.log_q - d * nlogn) / nf);
        trends.small_gap.push((mass.small_mass - nlogn) / nf);
        trends.l_ratio.push(mass.log_l / nlogn);
        trends.ell_ratio.push(mass.log_ell / nlogn);
        trends.b_estimate.push((mass.log_l - nlogn) / nf);
        reports.push(BoundReport {
            poly: f.to_string(),
            n,
            c,
            log_q: mass.log_q,
            log_l: mass.log_l,
            log_ell: mass.log_ell,
            small_mass: mass.small_mass,
            large_mass: mass.large_mass,
            h: None,
            margin: None,
            normalized_gap: None,
            exact_holds: None,
        });
    }
    Ok((reports, trends))
}

// ---- report export ----

fn csv_field_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// CSV export; the optional timestamp becomes a leading comment line so
/// that suppressed-timestamp runs are byte-identical.
pub fn reports_to_csv(reports: &[BoundReport], timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# lcmlab report, generated_unix={ts}\n"));
    }
    out.push_str("poly,N,c,logQ,logL,logell,small_mass,large_mass,h,margin,normalized_gap\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.poly,
            r.n,
            format_ratio(r.c),
            r.log_q,
            r.log_l,
            r.log_ell,
            r.small_mass,
            r.large_mass,
            r.h.map(format_ratio).unwrap_or_default(),
            csv_field_opt(&r.margin),
            csv_field_opt(&r.normalized_gap),
        ));
    }
    out
}

/// JSON mirror of the CSV schema.
pub fn reports_to_json(reports: &[BoundReport], timestamp: Option<u64>) -> String {
    let rows: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "poly": r.poly,
                "N": r.n,
                "c": format_ratio(r.c),
                "logQ": r.log_q,
                "logL": r.log_l,
                "logell": r.log_ell,
                "small_mass": r.small_mass,
                "large_mass": r.large_mass,
                "h": r.h.map(format_ratio),
                "margin": r.margin,
                "normalized_gap": r.normalized_gap,
            })
        })
        .collect();
    let doc = match timestamp {
        Some(ts) => serde_json::json!({ "generated_unix": ts, "reports": rows }),
        None => serde_json::json!({ "reports": rows }),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
