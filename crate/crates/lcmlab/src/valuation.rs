//! Exact prime-valuation anatomy of f(1),...,f(N).
//!
//! The table construction follows one contract: for every prime p up to the
//! cutoff floor(c*N), find all roots of f mod p by scanning residues, then
//! walk the arithmetic progressions n = r (mod p) and divide p out of a
//! residual copy of |f(n)| until it no longer divides. Whatever survives has
//! all prime factors above the cutoff and is finished off by primality
//! test, perfect-power check, and deterministic Pollard rho.
//!
//! Every aggregate downstream — alpha_p (exponent of p in the full product
//! Q), beta_p (exponent in the lcm L), mu_{p^nu} (number of n with p^nu
//! dividing f(n)), the log masses and their small/large split — is computed
//! from this one table, and the table itself is checked against the exact
//! conservation identity: the product of the recorded prime powers equals
//! |f(n)| for every n.
//!
//! Values f(n) = ±1 carry the empty factorization. A value f(n) = 0 cannot
//! occur for irreducible f of degree >= 2, but reducible inputs are
//! tolerated: such n are recorded as skipped and excluded from every
//! aggregate.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::factoring::{self, splitmix64, RhoConfig};
use crate::numeric::{ln_biguint, KahanSum};
use crate::poly::{reduce_mod_p, roots_mod_p, Polynomial};
use crate::sieve::primes_up_to;
use crate::Result;

/// Cutoff for the small/large prime split: p is small iff p <= floor(c*N).
pub fn cutoff_bound(c: Ratio<u64>, n: u64) -> u64 {
    ((*c.numer() as u128 * n as u128) / *c.denom() as u128) as u64
}

/// Parse "2" or "3/2" into an exact nonnegative rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let parse_part = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("bad rational component {t:?}")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let denom = parse_part(b)?;
            if denom == 0 {
                return Err(Error::Config("zero denominator".into()));
            }
            Ok(Ratio::new(parse_part(a)?, denom))
        }
        None => Ok(Ratio::from_integer(parse_part(s)?)),
    }
}

pub fn format_ratio(c: Ratio<u64>) -> String {
    if *c.denom() == 1 {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// One row of the table: the complete factorization of |f(n)|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub n: u64,
    /// |f(n)|; zero is recorded but excluded from all aggregates.
    pub value_abs: BigUint,
    /// (prime, exponent), primes ascending; empty when |f(n)| <= 1.
    pub factors: Vec<(BigUint, u32)>,
}

/// Per-prime aggregates over n <= N.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeStats {
    /// Total exponent of p in Q = prod |f(n)|.
    pub alpha: u64,
    /// Max exponent of p over the f(n), i.e. the exponent of p in the lcm.
    pub beta: u32,
    /// mu[nu] = number of n <= N with p^nu | f(n), for nu up to beta.
    pub mu: BTreeMap<u32, u64>,
}

impl PrimeStats {
    /// Exponent multiset over n, weakly decreasing. mu determines it: the
    /// count of entries >= nu is mu(nu).
    pub fn profile(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut prev = 0u64;
        for (&nu, &count) in self.mu.iter().rev() {
            for _ in prev..count {
                out.push(nu);
            }
            prev = count;
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

/// Natural-log masses of the three protagonists and the cutoff split.
#[derive(Clone, Copy, Debug)]
pub struct MassSplit {
    pub log_q: f64,
    pub log_l: f64,
    pub log_ell: f64,
    /// sum over p <= floor(cN) of alpha_p log p
    pub small_mass: f64,
    /// sum over p > floor(cN) of alpha_p log p
    pub large_mass: f64,
}

impl MassSplit {
    /// |small + large - log Q|, which should vanish up to float error.
    pub fn conservation_error(&self) -> f64 {
        (self.small_mass + self.large_mass - self.log_q).abs()
    }
}

#[derive(Clone, Debug)]
pub struct SahViolation {
    pub p: BigUint,
    pub nu: u32,
    pub mu: u64,
    /// the bound d - nu that was exceeded (may be <= 0)
    pub bound: i64,
}

/// Output of the mu-bound verifier: violations of the pairing bound above
/// 2N, and per grid cutoff the violations of mu_{p^nu} <= d - nu together
/// with the minimal violation-free cutoff.
#[derive(Clone, Debug)]
pub struct MuBoundReport {
    pub u: u32,
    pub algnt_bound: u64,
    pub algnt_violations: Vec<(BigUint, u64)>,
    pub sah_per_cutoff: Vec<(Ratio<u64>, Vec<SahViolation>)>,
    pub minimal_sah_free: Option<Ratio<u64>>,
}

impl MuBoundReport {
    pub fn is_clean_at(&self, c: Ratio<u64>) -> bool {
        self.algnt_violations.is_empty()
            && self
                .sah_per_cutoff
                .iter()
                .find(|(g, _)| *g == c)
                .map(|(_, v)| v.is_empty())
                .unwrap_or(false)
    }
}

/// The default cutoff grid scanned by the verifier.
pub fn default_cutoff_grid() -> Vec<Ratio<u64>> {
    vec![
        Ratio::from_integer(1),
        Ratio::new(3, 2),
        Ratio::from_integer(2),
        Ratio::from_integer(3),
        Ratio::from_integer(4),
        Ratio::from_integer(6),
        Ratio::from_integer(8),
    ]
}

#[derive(Clone, Debug)]
pub struct FactorizationTable {
    poly: Polynomial,
    n_max: u64,
    cutoff: Ratio<u64>,
    entries: Arc<Vec<Entry>>,
    stats: Arc<OnceLock<BTreeMap<BigUint, PrimeStats>>>,
}

const FORMAT_NAME: &str = "lcmlab-factor-table";
const FORMAT_VERSION: u64 = 1;

/// Deterministic seed for the rho schedule, derived from (coefficients, N).
fn table_seed(f: &Polynomial, n_max: u64) -> u64 {
    let mut acc = splitmix64(n_max);
    for b in f.coeff_string().bytes() {
        acc = splitmix64(acc ^ b as u64);
    }
    acc
}

/// Build the complete factorization table for |f(n)|, n = 1..=N.
pub fn build_table(
    f: &Polynomial,
    n_max: u64,
    cutoff: Ratio<u64>,
    rho_budget: u64,
) -> Result<FactorizationTable> {
    if n_max < 2 {
        return Err(Error::Config("N must be at least 2".into()));
    }
    if cutoff < Ratio::one() {
        return Err(Error::Config("cutoff c must be at least 1".into()));
    }
    let bound = cutoff_bound(cutoff, n_max);
    let small_primes = primes_up_to(bound);
    // roots of f mod p for every small prime, residue scan
    let prime_roots: Vec<(u64, Vec<u64>)> = small_primes
        .par_iter()
        .map(|&p| (p, roots_mod_p(&reduce_mod_p(f.coeffs(), p), p)))
        .filter(|(_, roots)| !roots.is_empty())
        .collect();
    let rho = RhoConfig {
        budget: rho_budget,
        seed: table_seed(f, n_max),
    };

    const BLOCK: u64 = 1024;
    let n_blocks = n_max.div_ceil(BLOCK);
    let blocks: Vec<Vec<Entry>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = 1 + b * BLOCK;
            let hi = (lo + BLOCK - 1).min(n_max);
            process_block(f, lo, hi, &prime_roots, &rho)
        })
        .collect::<Result<_>>()?;
    let entries: Vec<Entry> = blocks.into_iter().flatten().collect();
    debug_assert_eq!(entries.len() as u64, n_max);

    Ok(FactorizationTable {
        poly: f.clone(),
        n_max,
        cutoff,
        entries: Arc::new(entries),
        stats: Arc::new(OnceLock::new()),
    })
}

fn process_block(
    f: &Polynomial,
    lo: u64,
    hi: u64,
    prime_roots: &[(u64, Vec<u64>)],
    rho: &RhoConfig,
) -> Result<Vec<Entry>> {
    let len = (hi - lo + 1) as usize;
    let mut values: Vec<BigUint> = Vec::with_capacity(len);
    for n in lo..=hi {
        values.push(f.evaluate(n as i64).magnitude().clone());
    }
    let mut residuals = values.clone();
    let mut factors: Vec<Vec<(BigUint, u32)>> = vec![Vec::new(); len];
    let one = BigUint::one();

    for (p, roots) in prime_roots {
        let p = *p;
        for &r in roots {
            // first n >= lo with n = r (mod p)
            let mut n = lo + (r + p - lo % p) % p;
            while n <= hi {
                let idx = (n - lo) as usize;
                let residual = &mut residuals[idx];
                if !residual.is_zero() && *residual > one {
                    let mut e = 0u32;
                    while (&*residual % p).is_zero() {
                        *residual /= p;
                        e += 1;
                    }
                    if e > 0 {
                        factors[idx].push((BigUint::from(p), e));
                    }
                }
                n += p;
            }
        }
    }

    let mut out = Vec::with_capacity(len);
    for (idx, residual) in residuals.into_iter().enumerate() {
        let n = lo + idx as u64;
        let mut fs = std::mem::take(&mut factors[idx]);
        fs.sort_by(|a, b| a.0.cmp(&b.0));
        if residual > one {
            let large = factoring::factor(&residual, rho).map_err(|resisting| {
                Error::FactoringBudget {
                    n,
                    residual: resisting.to_string(),
                }
            })?;
            fs.extend(large);
        }
        debug_assert!(fs.windows(2).all(|w| w[0].0 < w[1].0));
        out.push(Entry {
            n,
            value_abs: values[idx].clone(),
            factors: fs,
        });
    }
    Ok(out)
}

impl FactorizationTable {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn cutoff(&self) -> Ratio<u64> {
        self.cutoff
    }

    /// floor(c*N): the largest prime treated as small.
    pub fn cutoff_bound(&self) -> u64 {
        cutoff_bound(self.cutoff, self.n_max)
    }

    /// Same table viewed under a different cutoff; the factorizations are
    /// cutoff-independent, so this is free.
    pub fn with_cutoff(&self, cutoff: Ratio<u64>) -> FactorizationTable {
        FactorizationTable {
            cutoff,
            ..self.clone()
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// n with f(n) in {-1, 0, +1}: empty factorizations.
    pub fn skipped(&self) -> Vec<u64> {
        self.entries
            .iter()
            .filter(|e| e.value_abs <= BigUint::one())
            .map(|e| e.n)
            .collect()
    }

    pub fn is_small(&self, p: &BigUint) -> bool {
        *p <= BigUint::from(self.cutoff_bound())
    }

    pub fn prime_stats(&self) -> &BTreeMap<BigUint, PrimeStats> {
        self.stats.get_or_init(|| {
            let mut map: BTreeMap<BigUint, PrimeStats> = BTreeMap::new();
            for entry in self.entries.iter() {
                for (p, e) in &entry.factors {
                    let stats = map.entry(p.clone()).or_default();
                    stats.alpha += *e as u64;
                    stats.beta = stats.beta.max(*e);
                    for nu in 1..=*e {
                        *stats.mu.entry(nu).or_insert(0) += 1;
                    }
                }
            }
            map
        })
    }

    pub fn mass_split(&self) -> MassSplit {
        let bound = BigUint::from(self.cutoff_bound());
        let mut log_q = KahanSum::new();
        for e in self.entries.iter() {
            if !e.value_abs.is_zero() && !e.value_abs.is_one() {
                log_q.add(ln_biguint(&e.value_abs));
            }
        }
        let mut log_l = KahanSum::new();
        let mut log_ell = KahanSum::new();
        let mut small = KahanSum::new();
        let mut large = KahanSum::new();
        for (p, st) in self.prime_stats() {
            let lp = ln_biguint(p);
            log_l.add(st.beta as f64 * lp);
            log_ell.add(lp);
            if *p <= bound {
                small.add(st.alpha as f64 * lp);
            } else {
                large.add(st.alpha as f64 * lp);
            }
        }
        MassSplit {
            log_q: log_q.value(),
            log_l: log_l.value(),
            log_ell: log_ell.value(),
            small_mass: small.value(),
            large_mass: large.value(),
        }
    }

    /// Q = prod |f(n)| over non-skipped n, exactly.
    pub fn q_exact(&self) -> BigUint {
        self.entries
            .iter()
            .filter(|e| !e.value_abs.is_zero())
            .fold(BigUint::one(), |acc, e| acc * &e.value_abs)
    }

    /// L = lcm of the values = prod p^beta_p, exactly.
    pub fn l_exact(&self) -> BigUint {
        self.prime_stats()
            .iter()
            .fold(BigUint::one(), |acc, (p, st)| acc * p.pow(st.beta))
    }

    /// rad Q = prod of the distinct primes, exactly.
    pub fn ell_exact(&self) -> BigUint {
        self.prime_stats()
            .iter()
            .fold(BigUint::one(), |acc, (p, _)| acc * p)
    }

    /// prod over p > floor(cN) of p^alpha_p, exactly.
    pub fn large_product_exact(&self, cutoff: Ratio<u64>) -> BigUint {
        let bound = BigUint::from(cutoff_bound(cutoff, self.n_max));
        self.prime_stats()
            .iter()
            .filter(|(p, _)| **p > bound)
            .fold(BigUint::one(), |acc, (p, st)| {
                acc * p.pow(u32::try_from(st.alpha).expect("alpha fits u32"))
            })
    }

    /// Valuation profiles (weakly decreasing exponent multisets) of every
    /// prime exceeding `min_exclusive`.
    pub fn prime_profiles_above(&self, min_exclusive: u64) -> Vec<(BigUint, Vec<u32>)> {
        let bound = BigUint::from(min_exclusive);
        self.prime_stats()
            .iter()
            .filter(|(p, _)| **p > bound)
            .map(|(p, st)| (p.clone(), st.profile()))
            .collect()
    }

    /// Scan for primes p > 2N with mu_p >= u, and for each grid cutoff c'
    /// for pairs (p > c'N, nu) with mu_{p^nu} > d - nu; also report the
    /// minimal violation-free grid cutoff.
    pub fn verify_mu_bounds(&self, u: u32, grid: &[Ratio<u64>]) -> MuBoundReport {
        assert!(u >= 2, "u must be at least 2");
        let d = self.poly.degree() as i64;
        let stats = self.prime_stats();
        let algnt_bound = 2 * self.n_max;
        let two_n = BigUint::from(algnt_bound);
        let mut algnt_violations = Vec::new();
        for (p, st) in stats.iter() {
            if *p > two_n {
                let mu1 = st.mu.get(&1).copied().unwrap_or(0);
                if mu1 >= u as u64 {
                    algnt_violations.push((p.clone(), mu1));
                }
            }
        }
        let mut grid: Vec<Ratio<u64>> = grid.to_vec();
        grid.sort();
        grid.dedup();
        let mut sah_per_cutoff = Vec::new();
        let mut minimal_sah_free = None;
        for &c in &grid {
            let bound = BigUint::from(cutoff_bound(c, self.n_max));
            let mut violations = Vec::new();
            for (p, st) in stats.iter() {
                if *p <= bound {
                    continue;
                }
                for (&nu, &mu) in &st.mu {
                    let sah_bound = d - nu as i64;
                    if (mu as i64) > sah_bound {
                        violations.push(SahViolation {
                            p: p.clone(),
                            nu,
                            mu,
                            bound: sah_bound,
                        });
                    }
                }
            }
            if violations.is_empty() && minimal_sah_free.is_none() {
                minimal_sah_free = Some(c);
            }
            sah_per_cutoff.push((c, violations));
        }
        MuBoundReport {
            u,
            algnt_bound,
            algnt_violations,
            sah_per_cutoff,
            minimal_sah_free,
        }
    }

    // ---- JSON-lines cache ----

    /// Serialize: a header line with the polynomial, N, c and format
    /// version, then one record per n, sorted by n, primes ascending.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let coeffs = self.poly.coeff_string();
        let _ = writeln!(
            out,
            "{{\"format\":\"{FORMAT_NAME}\",\"version\":{FORMAT_VERSION},\"coeffs\":[{coeffs}],\"N\":{},\"c\":\"{}\"}}",
            self.n_max,
            format_ratio(self.cutoff),
        );
        for e in self.entries.iter() {
            let factors = e
                .factors
                .iter()
                .map(|(p, ex)| format!("[{p},{ex}]"))
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(out, "{{\"n\":{},\"factors\":[{factors}]}}", e.n);
        }
        out
    }

    /// Parse and fully verify a cached table: conservation against freshly
    /// evaluated |f(n)|, ascending primes, and primality of every factor.
    /// The cutoff is the caller's; the split is recomputed, not trusted.
    pub fn from_jsonl(text: &str, cutoff: Ratio<u64>) -> Result<FactorizationTable> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Cache("empty cache file".into()))?;
        let header: serde_json::Value = serde_json::from_str(header)
            .map_err(|e| Error::Cache(format!("bad header: {e}")))?;
        if header["format"].as_str() != Some(FORMAT_NAME) {
            return Err(Error::Cache("unrecognized format tag".into()));
        }
        if header["version"].as_u64() != Some(FORMAT_VERSION) {
            return Err(Error::Cache("unsupported version".into()));
        }
        let coeffs: Vec<BigInt> = header["coeffs"]
            .as_array()
            .ok_or_else(|| Error::Cache("coeffs missing".into()))?
            .iter()
            .map(|v| {
                parse_big_number(v).and_then(|s| {
                    s.parse::<BigInt>()
                        .map_err(|_| Error::Cache(format!("bad coefficient {s}")))
                })
            })
            .collect::<Result<_>>()?;
        let poly = Polynomial::new(coeffs)?;
        let n_max = header["N"]
            .as_u64()
            .ok_or_else(|| Error::Cache("N missing".into()))?;

        let mut entries = Vec::with_capacity(n_max as usize);
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: serde_json::Value = serde_json::from_str(line)
                .map_err(|e| Error::Cache(format!("record {}: {e}", i + 1)))?;
            let n = rec["n"]
                .as_u64()
                .ok_or_else(|| Error::Cache(format!("record {}: n missing", i + 1)))?;
            let mut factors = Vec::new();
            for pair in rec["factors"]
                .as_array()
                .ok_or_else(|| Error::Cache(format!("record n={n}: factors missing")))?
            {
                let items = pair
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Cache(format!("record n={n}: bad factor pair")))?;
                let p: BigUint = parse_big_number(&items[0])?
                    .parse()
                    .map_err(|_| Error::Cache(format!("record n={n}: bad prime")))?;
                let e = items[1]
                    .as_u64()
                    .ok_or_else(|| Error::Cache(format!("record n={n}: bad exponent")))?;
                factors.push((p, e as u32));
            }
            let value_abs = poly.evaluate(n as i64).magnitude().clone();
            verify_entry(n, &value_abs, &factors)?;
            entries.push(Entry {
                n,
                value_abs,
                factors,
            });
        }
        if entries.len() as u64 != n_max
            || entries.iter().enumerate().any(|(i, e)| e.n != i as u64 + 1)
        {
            return Err(Error::Cache("records do not cover 1..=N in order".into()));
        }
        Ok(FactorizationTable {
            poly,
            n_max,
            cutoff,
            entries: Arc::new(entries),
            stats: Arc::new(OnceLock::new()),
        })
    }
}

fn parse_big_number(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Cache(format!("expected number, got {v}"))),
    }
}

fn verify_entry(n: u64, value_abs: &BigUint, factors: &[(BigUint, u32)]) -> Result<()> {
    if !factors.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::Cache(format!("record n={n}: primes not ascending")));
    }
    if value_abs.is_zero() || value_abs.is_one() {
        if !factors.is_empty() {
            return Err(Error::Cache(format!(
                "record n={n}: skipped value must have empty factorization"
            )));
        }
        return Ok(());
    }
    let product = factors
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    if product != *value_abs {
        return Err(Error::Cache(format!(
            "record n={n}: conservation violated ({product} != {value_abs})"
        )));
    }
    for (p, _) in factors {
        if !factoring::is_prime(p) {
            return Err(Error::Cache(format!("record n={n}: {p} is not prime")));
        }
    }
    Ok(())
}

/// In-memory table cache with an optional JSON-lines directory behind it.
/// The cache key is (coefficients, N); the cutoff is a view parameter.
pub struct TableStore {
    dir: Option<PathBuf>,
    mem: Mutex<HashMap<(String, u64), Arc<FactorizationTable>>>,
    pub rho_budget: u64,
}

impl TableStore {
    pub fn in_memory() -> TableStore {
        TableStore {
            dir: None,
            mem: Mutex::new(HashMap::new()),
            rho_budget: RhoConfig::default().budget,
        }
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> TableStore {
        TableStore {
            dir: Some(dir.into()),
            mem: Mutex::new(HashMap::new()),
            rho_budget: RhoConfig::default().budget,
        }
    }

    fn file_path(&self, f: &Polynomial, n_max: u64) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let mut hasher = Sha256::new();
        hasher.update(f.coeff_string().as_bytes());
        hasher.update(b"|");
        hasher.update(n_max.to_le_bytes());
        let digest = hasher.finalize();
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Some(dir.join(format!("table-{hex}-N{n_max}.jsonl")))
    }

    pub fn get_or_build(
        &self,
        f: &Polynomial,
        n_max: u64,
        cutoff: Ratio<u64>,
    ) -> Result<Arc<FactorizationTable>> {
        let key = (f.coeff_string(), n_max);
        if let Some(t) = self.mem.lock().unwrap().get(&key) {
            return Ok(Arc::new(t.with_cutoff(cutoff)));
        }
        if let Some(path) = self.file_path(f, n_max) {
            if path.exists() {
                let text = fs::read_to_string(&path)?;
                let table = FactorizationTable::from_jsonl(&text, cutoff)?;
                if table.poly() != f {
                    return Err(Error::Cache(format!(
                        "cache file {} holds a different polynomial",
                        path.display()
                    )));
                }
                let table = Arc::new(table);
                self.mem.lock().unwrap().insert(key, table.clone());
                return Ok(table);
            }
        }
        let table = Arc::new(build_table(f, n_max, cutoff, self.rho_budget)?);
        if let Some(path) = self.file_path(f, n_max) {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, table.to_jsonl())?;
        }
        self.mem.lock().unwrap().insert(key, table.clone());
        Ok(table)
    }
}

/// Save a standalone table to `path` (used by the CLI cache flag).
pub fn save_table(table: &FactorizationTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, table.to_jsonl())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn poly(s: &str) -> Polynomial {
        Polynomial::from_str(s).unwrap()
    }

    fn table(s: &str, n: u64, c: Ratio<u64>) -> FactorizationTable {
        build_table(&poly(s), n, c, 1 << 24).unwrap()
    }

    fn fac(pairs: &[(u64, u32)]) -> Vec<(BigUint, u32)> {
        pairs.iter().map(|&(p, e)| (BigUint::from(p), e)).collect()
    }

    #[test]
    fn x2_plus_1_n3() {
        let t = table("X^2+1", 3, Ratio::from_integer(1));
        assert_eq!(t.entries()[0].factors, fac(&[(2, 1)]));
        assert_eq!(t.entries()[1].factors, fac(&[(5, 1)]));
        assert_eq!(t.entries()[2].factors, fac(&[(2, 1), (5, 1)]));
        assert!(t.skipped().is_empty());
        // c=1: bound 3, so 5 is large
        assert!(t.is_small(&BigUint::from(2u32)));
        assert!(!t.is_small(&BigUint::from(5u32)));
        // c=2: bound 6, both small, no large mass
        let t2 = t.with_cutoff(Ratio::from_integer(2));
        assert!(t2.is_small(&BigUint::from(5u32)));
        assert_eq!(t2.mass_split().large_mass, 0.0);
    }

    #[test]
    fn x4_minus_2_n3() {
        let t = table("X^4-2", 3, Ratio::from_integer(1));
        assert_eq!(t.entries()[0].factors, vec![]);
        assert_eq!(t.entries()[0].value_abs, BigUint::one());
        assert_eq!(t.entries()[1].factors, fac(&[(2, 1), (7, 1)]));
        assert_eq!(t.entries()[2].factors, fac(&[(79, 1)]));
        assert_eq!(t.skipped(), vec![1]);
    }

    #[test]
    fn stats_x2_plus_1_n3() {
        let t = table("X^2+1", 3, Ratio::from_integer(1));
        let stats = t.prime_stats();
        let s2 = &stats[&BigUint::from(2u32)];
        assert_eq!((s2.alpha, s2.beta), (2, 1));
        assert_eq!(s2.mu[&1], 2);
        let s5 = &stats[&BigUint::from(5u32)];
        assert_eq!((s5.alpha, s5.beta), (2, 1));
        assert_eq!(s5.mu[&1], 2);
        assert_eq!(s2.profile(), vec![1, 1]);
    }

    #[test]
    fn stats_x4_minus_2_n3() {
        let t = table("X^4-2", 3, Ratio::from_integer(1));
        let s79 = &t.prime_stats()[&BigUint::from(79u32)];
        assert_eq!((s79.alpha, s79.beta), (1, 1));
        assert_eq!(s79.mu[&1], 1);
    }

    #[test]
    fn mass_split_examples() {
        let t = table("X^2+1", 3, Ratio::from_integer(1));
        let m = t.mass_split();
        assert!((m.log_q - 100f64.ln()).abs() < 1e-12);
        assert!((m.log_l - 10f64.ln()).abs() < 1e-12);
        assert!((m.log_ell - 10f64.ln()).abs() < 1e-12);
        assert!(m.conservation_error() < 1e-12);

        let t = table("X^4-2", 3, Ratio::from_integer(1));
        let m = t.mass_split();
        assert!((m.log_l - 1106f64.ln()).abs() < 1e-12);
        assert_eq!(t.l_exact(), BigUint::from(1106u32));
        assert_eq!(t.q_exact(), BigUint::from(14u32 * 79));
    }

    #[test]
    fn zero_values_are_skipped_not_fatal() {
        // X^2 - 4 has f(2) = 0; reducible, but the engine tolerates it
        let t = table("X^2-4", 5, Ratio::from_integer(1));
        assert_eq!(t.skipped(), vec![2]);
        assert!(t.entries()[1].value_abs.is_zero());
        assert!(t.entries()[1].factors.is_empty());
        // f(1) = -3, f(3) = 5, f(4) = 12, f(5) = 21
        assert_eq!(t.q_exact(), BigUint::from(3u32 * 5 * 12 * 21));
        let m = t.mass_split();
        assert!(m.conservation_error() < 1e-12);
    }

    #[test]
    fn conservation_and_sandwich_small_oracle() {
        // independent trial-division oracle on a small range
        for s in ["X^2+1", "X^4-2", "X^2+X+1", "X^3-2"] {
            let f = poly(s);
            let t = table(s, 60, Ratio::from_integer(2));
            for e in t.entries() {
                let expect = f.evaluate(e.n as i64).magnitude().clone();
                assert_eq!(e.value_abs, expect);
                let mut m = expect.clone();
                let mut oracle: Vec<(BigUint, u32)> = Vec::new();
                if m > BigUint::one() {
                    let mut d = 2u64;
                    while BigUint::from(d) * BigUint::from(d) <= m {
                        let mut cnt = 0;
                        while (&m % d).is_zero() {
                            m /= d;
                            cnt += 1;
                        }
                        if cnt > 0 {
                            oracle.push((BigUint::from(d), cnt));
                        }
                        d += 1;
                    }
                    if m > BigUint::one() {
                        oracle.push((m, 1));
                    }
                }
                assert_eq!(e.factors, oracle, "{s} at n={}", e.n);
            }
            // beta <= alpha <= mu(1) * beta, and alpha telescopes over mu
            for (p, st) in t.prime_stats() {
                let mu1 = st.mu[&1];
                assert!(st.beta as u64 <= st.alpha, "p={p}");
                assert!(st.alpha <= mu1 * st.beta as u64, "p={p}");
                let total: u64 = st.mu.values().sum();
                assert_eq!(st.alpha, total, "telescoping at p={p}");
            }
        }
    }

    #[test]
    fn mu_bounds_degenerate_n2() {
        let t = table("X^2+1", 2, Ratio::from_integer(1));
        for u in [2, 3] {
            let r = t.verify_mu_bounds(u, &default_cutoff_grid());
            assert!(r.algnt_violations.is_empty());
        }
    }

    #[test]
    fn mu_bounds_quadratic_n200() {
        let t = table("X^2+1", 200, Ratio::from_integer(2));
        let r = t.verify_mu_bounds(2, &default_cutoff_grid());
        assert!(r.algnt_violations.is_empty());
        assert!(r.minimal_sah_free.is_some());
    }

    #[test]
    fn profiles_match_mu() {
        let t = table("X^4-2", 100, Ratio::from_integer(2));
        for (p, st) in t.prime_stats() {
            let profile = st.profile();
            assert!(profile.windows(2).all(|w| w[0] >= w[1]));
            for (&nu, &mu) in &st.mu {
                let count = profile.iter().filter(|&&v| v >= nu).count() as u64;
                assert_eq!(count, mu, "p={p}, nu={nu}");
            }
        }
    }

    #[test]
    fn cutoff_floor_semantics() {
        // c = 3/2, N = 3: floor(4.5) = 4, so p = 3 is small and 5 is large
        let t = table("X^2+1", 3, Ratio::new(3, 2));
        assert_eq!(t.cutoff_bound(), 4);
        assert!(t.is_small(&BigUint::from(3u32)));
        assert!(!t.is_small(&BigUint::from(5u32)));
        // tie: p = floor(cN) is small
        let t = table("X^2+1", 5, Ratio::from_integer(1));
        assert_eq!(t.cutoff_bound(), 5);
        assert!(t.is_small(&BigUint::from(5u32)));
    }

    #[test]
    fn cache_round_trip() {
        let t = table("X^4-2", 40, Ratio::from_integer(2));
        let text = t.to_jsonl();
        let back = FactorizationTable::from_jsonl(&text, Ratio::from_integer(2)).unwrap();
        assert_eq!(back.entries(), t.entries());
        assert_eq!(back.poly(), t.poly());
        assert_eq!(back.to_jsonl(), text);
        // the c split is recomputed on load: a different cutoff is accepted
        let other = FactorizationTable::from_jsonl(&text, Ratio::from_integer(1)).unwrap();
        assert_eq!(other.cutoff(), Ratio::from_integer(1));
        assert!(other.mass_split().large_mass > 0.0);
    }

    #[test]
    fn cache_detects_corruption() {
        let t = table("X^2+1", 10, Ratio::from_integer(1));
        let text = t.to_jsonl();
        let tampered = text.replace("[[2,1],[5,1]]", "[[2,1],[7,1]]");
        assert_ne!(text, tampered);
        assert!(FactorizationTable::from_jsonl(&tampered, Ratio::from_integer(1)).is_err());
    }

    #[test]
    fn store_roundtrip_and_reuse() {
        let dir = tempfile::tempdir().unwrap();
        let store = TableStore::with_dir(dir.path());
        let f = poly("X^2+1");
        let a = store.get_or_build(&f, 30, Ratio::from_integer(2)).unwrap();
        // cold store, same dir: must load the identical table from disk
        let store2 = TableStore::with_dir(dir.path());
        let b = store2.get_or_build(&f, 30, Ratio::from_integer(2)).unwrap();
        assert_eq!(a.entries(), b.entries());
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        // different cutoff hits the same cached factorizations
        let c = store2.get_or_build(&f, 30, Ratio::from_integer(1)).unwrap();
        assert_eq!(c.cutoff(), Ratio::from_integer(1));
        assert_eq!(c.entries(), a.entries());
    }

    #[test]
    fn budget_error_reports_n() {
        // craft f(1) = (2^89-1)(2^107-1), far beyond a 1000-iteration rho
        let p = BigUint::from_str("618970019642690137449562111").unwrap();
        let q = BigUint::from_str("162259276829213363391578010288127").unwrap();
        let pq = BigInt::from(&p * &q);
        let f = Polynomial::new(vec![&pq - 1, BigInt::from(0), BigInt::from(1)]).unwrap();
        let err = build_table(&f, 2, Ratio::from_integer(1), 1000);
        match err {
            Err(Error::FactoringBudget { n, residual }) => {
                assert_eq!(n, 1);
                assert_eq!(residual, pq.to_string());
            }
            other => panic!("expected budget error, got {:?}", other.map(|t| t.n_max())),
        }
    }

    #[test]
    fn parse_ratio_forms() {
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert_eq!(parse_ratio("3/2").unwrap(), Ratio::new(3, 2));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert_eq!(format_ratio(Ratio::new(6, 4)), "3/2");
        assert_eq!(format_ratio(Ratio::from_integer(2)), "2");
    }
}
