//! Zero-sum structure among the complex roots of f.
//!
//! Roots are computed to double-double accuracy and certified by expanding
//! prod (X - r_i) back into coefficients; a certification failure is an
//! error, never a silent degradation. Negation pairing — which roots come
//! in (r, -r) couples — feeds the pigeonhole count `minimal_u`, and an
//! exhaustive search over {-1, 0, +1} coefficient vectors finds all small
//! zero sums among the roots.
//!
//! For even f the pairing is derived from the symmetry f(X) = g(X^2)
//! exactly: every root is produced together with its negative, so no
//! numerical matching is involved. Everything else goes through a greedy
//! matcher with a tolerance band and a 10x separation guard.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::dd::{Cdd, Dd};
use crate::error::Error;
use crate::poly::Polynomial;
use crate::Result;

/// Roots with multiplicity plus the negation pairing on root indices.
#[derive(Clone, Debug)]
pub struct RootSet {
    roots: Vec<Cdd>,
    pairing: Vec<(usize, usize)>,
    unpaired: Vec<usize>,
    tol: f64,
    max_abs: f64,
    exact_pairing: bool,
}

impl RootSet {
    pub fn roots(&self) -> &[Cdd] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Matched index pairs (i, j) with roots[i] + roots[j] = 0.
    pub fn pairing(&self) -> &[(usize, usize)] {
        &self.pairing
    }

    pub fn unpaired(&self) -> &[usize] {
        &self.unpaired
    }

    /// Pairing tolerance 2^-30 * max|root|.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_root_abs(&self) -> f64 {
        self.max_abs
    }

    /// True when the pairing came from evenness, not numerics.
    pub fn exact_pairing(&self) -> bool {
        self.exact_pairing
    }
}

/// The least u such that any u distinct roots must contain a negation pair,
/// computed from the pairing alone: 1 + (#pairs + #unpaired). When no pair
/// exists at all this exceeds the degree and `usable` is false (the value
/// is then the sentinel d + 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimalU {
    pub value: u32,
    pub usable: bool,
}

/// A vanishing combination sum b_m * root_m with b_m in {-1, 0, +1}.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSum {
    /// One coefficient per root index; first nonzero is +1 (sign canonical).
    pub coefficients: Vec<i8>,
    /// |sum| re-verified in double-double arithmetic.
    pub residual: f64,
}

impl ZeroSum {
    pub fn support(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c != 0).count()
    }
}

/// Exhaustive-search output: certified zero sums plus the near misses
/// (residual within [tol, 1000*tol)) that an honest report must surface.
#[derive(Clone, Debug, Default)]
pub struct ZeroSumReport {
    pub zero_sums: Vec<ZeroSum>,
    pub near_misses: Vec<ZeroSum>,
}

fn bigint_to_dd(x: &BigInt) -> Dd {
    let hi = x.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let hi_int = BigInt::from_f64(hi).expect("finite");
    let lo = (x - hi_int).to_f64().unwrap_or(0.0);
    Dd::new(hi, lo)
}

fn horner(coeffs: &[Cdd], z: Cdd) -> Cdd {
    let mut acc = Cdd::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc * z + *c;
    }
    acc
}

/// Aberth-Ehrlich simultaneous iteration, run entirely in double-double.
/// Assumes monic input with nonzero constant term and degree >= 1.
fn aberth(coeffs: &[Cdd]) -> Vec<Cdd> {
    let d = coeffs.len() - 1;
    let radius = 1.0 + coeffs
        .iter()
        .take(d)
        .map(|c| c.abs_f64())
        .fold(0.0, f64::max);
    let mut z: Vec<Cdd> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64) + 0.4 / (d as f64);
            Cdd::from_f64(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    let deriv: Vec<Cdd> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| *c * Cdd::from_f64(i as f64, 0.0))
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let fz = horner(coeffs, z[k]);
            let dz = horner(&deriv, z[k]);
            if dz.abs_f64() == 0.0 {
                // sitting on a critical point; nudge off and retry next sweep
                z[k] = z[k] + Cdd::from_f64(1e-4 * radius, 1e-4 * radius);
                max_step = f64::INFINITY;
                continue;
            }
            let newton = fz / dz;
            let mut repulsion = Cdd::ZERO;
            for j in 0..d {
                if j != k {
                    repulsion = repulsion + Cdd::ONE / (z[k] - z[j]);
                }
            }
            let denom = Cdd::ONE - newton * repulsion;
            let w = if denom.abs_f64() == 0.0 { newton } else { newton / denom };
            z[k] = z[k] - w;
            max_step = max_step.max(w.abs_f64() / (1.0 + z[k].abs_f64()));
        }
        if max_step < 1e-30 {
            break;
        }
    }
    z
}

/// Roots of a monic integer polynomial, ascending-coefficient input.
/// Zero roots are stripped exactly; even layers are folded through
/// f(X) = g(X^2) so that each g-root contributes the pair ±sqrt(root).
fn complex_roots(coeffs: &[BigInt]) -> Vec<Cdd> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut roots = vec![Cdd::ZERO; zeros];
    let rest = &coeffs[zeros..];
    let rd = rest.len() - 1;
    if rd == 0 {
        return roots;
    }
    let is_even_poly = rest.iter().skip(1).step_by(2).all(|c| c.is_zero());
    if is_even_poly && rd >= 2 {
        let g: Vec<BigInt> = rest.iter().step_by(2).cloned().collect();
        for r in complex_roots(&g) {
            let s = r.sqrt();
            roots.push(s);
            roots.push(-s);
        }
        return roots;
    }
    let c: Vec<Cdd> = rest
        .iter()
        .map(|x| Cdd::new(bigint_to_dd(x), Dd::ZERO))
        .collect();
    if rd == 1 {
        roots.push(-c[0]);
        return roots;
    }
    if rd == 2 {
        // X^2 + bX + c: the larger root from the formula, the other by Vieta
        let b = c[1];
        let c0 = c[0];
        let half = Cdd::from_f64(0.5, 0.0);
        let disc = b * b - Cdd::from_f64(4.0, 0.0) * c0;
        let s = disc.sqrt();
        let r1 = (-b + s) * half;
        let r2 = (-b - s) * half;
        let big = if r1.abs_f64() >= r2.abs_f64() { r1 } else { r2 };
        let small = c0 / big;
        roots.push(big);
        roots.push(small);
        return roots;
    }
    roots.extend(aberth(&c));
    roots
}

/// All complex roots with multiplicity, certified against the coefficients,
/// with the negation pairing attached.
pub fn find_roots(f: &Polynomial) -> Result<RootSet> {
    let coeffs = f.coeffs();
    let mut roots = complex_roots(coeffs);
    let full: Vec<Cdd> = coeffs
        .iter()
        .map(|x| Cdd::new(bigint_to_dd(x), Dd::ZERO))
        .collect();
    let deriv: Vec<Cdd> = full
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| *c * Cdd::from_f64(i as f64, 0.0))
        .collect();
    // Newton polish against the full polynomial
    for z in roots.iter_mut() {
        if z.abs_f64() == 0.0 {
            continue;
        }
        for _ in 0..2 {
            let dz = horner(&deriv, *z);
            if dz.abs_f64() == 0.0 {
                break;
            }
            let step = horner(&full, *z) / dz;
            if step.abs_f64() < 0.5 * (1.0 + z.abs_f64()) {
                *z = *z - step;
            } else {
                break;
            }
        }
    }

    // certification: expand prod (X - r) and compare coefficient by coefficient
    let mut recon = vec![Cdd::ONE];
    for r in &roots {
        let mut next = vec![Cdd::ZERO; recon.len() + 1];
        for (i, c) in recon.iter().enumerate() {
            next[i + 1] = next[i + 1] + *c;
            next[i] = next[i] - *c * *r;
        }
        recon = next;
    }
    let max_coeff = coeffs
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs())
        .fold(0.0, f64::max);
    let tol_rec = (2.0f64).powi(-40) * (1.0 + max_coeff);
    let mut err = 0.0f64;
    for (i, c) in coeffs.iter().enumerate() {
        let target = bigint_to_dd(c);
        let delta = (recon[i].re - target).abs().to_f64().abs();
        err = err.max(delta).max(recon[i].im.to_f64().abs());
    }
    // NaN (a diverged iteration) must land in the error path too
    if err > tol_rec || err.is_nan() {
        return Err(Error::RootCertification {
            err,
            tol: tol_rec,
            cond: err / tol_rec,
        });
    }

    let max_abs = roots.iter().map(|r| r.abs_f64()).fold(0.0, f64::max);
    let tol = (2.0f64).powi(-30) * max_abs.max(1e-300);
    let guard = 10.0 * tol;

    let zeros: Vec<usize> = roots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs_f64() == 0.0)
        .map(|(i, _)| i)
        .collect();
    let nonzero: Vec<usize> = (0..roots.len()).filter(|i| !zeros.contains(i)).collect();

    let mut pairing: Vec<(usize, usize)> = Vec::new();
    let mut unpaired: Vec<usize> = Vec::new();
    // zero roots pair among themselves exactly
    for pair in zeros.chunks(2) {
        match pair {
            [a, b] => pairing.push((*a, *b)),
            [a] => unpaired.push(*a),
            _ => unreachable!(),
        }
    }
    let exact_pairing = f.is_even();
    if exact_pairing {
        // layout from the construction: after the zeros, roots come in
        // adjacent (s, -s) couples
        let mut i = zeros.len();
        while i < roots.len() {
            pairing.push((i, i + 1));
            i += 2;
        }
    } else {
        // greedy matching by ascending |r_i + r_j|
        let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
        for (a, &i) in nonzero.iter().enumerate() {
            for &j in &nonzero[a + 1..] {
                candidates.push((i, j, (roots[i] + roots[j]).abs_f64()));
            }
        }
        candidates.sort_by(|x, y| x.2.total_cmp(&y.2));
        let mut used = vec![false; roots.len()];
        for (i, j, s) in &candidates {
            if *s < tol && !used[*i] && !used[*j] {
                used[*i] = true;
                used[*j] = true;
                pairing.push((*i, *j));
            }
        }
        // separation guard: an unmatched root must be clearly unmatched
        for &i in &nonzero {
            if used[i] {
                continue;
            }
            unpaired.push(i);
            for &j in &nonzero {
                if i != j {
                    let gap = (roots[i] + roots[j]).abs_f64();
                    if gap < guard && !(used[i] && used[j]) {
                        return Err(Error::PairingAmbiguous { gap, tol, guard });
                    }
                }
            }
            if !zeros.is_empty() && roots[i].abs_f64() < guard {
                return Err(Error::PairingAmbiguous {
                    gap: roots[i].abs_f64(),
                    tol,
                    guard,
                });
            }
        }
    }
    pairing.sort_unstable();
    unpaired.sort_unstable();

    Ok(RootSet {
        roots,
        pairing,
        unpaired,
        tol,
        max_abs,
        exact_pairing,
    })
}

/// 1 + (#pairs + #unpaired) = degree - #pairs + 1. Even polynomials give
/// d/2 + 1. Without any pair the value is the sentinel d + 1, flagged
/// unusable.
pub fn minimal_u(rs: &RootSet) -> MinimalU {
    let pairs = rs.pairing.len() as u32;
    let d = rs.degree() as u32;
    MinimalU {
        value: d - pairs + 1,
        usable: pairs > 0,
    }
}

/// Exhaustive scan of coefficient vectors in {-1,0,+1}^d with support at
/// most `max_support`: every candidate whose f64 sum is small gets
/// re-verified in double-double; residuals below tol^2 are zero sums,
/// anything in [tol^2, 1000*tol) is reported as a near miss. Output is
/// deduplicated by the sign convention (first nonzero coefficient +1) and
/// sorted lexicographically. Zero roots are excluded from supports: a
/// coefficient there never changes the sum.
pub fn search_zero_sums(rs: &RootSet, max_support: u32) -> Result<ZeroSumReport> {
    let d = rs.degree();
    if max_support as usize > d {
        return Err(Error::Config(format!(
            "support {max_support} exceeds degree {d}"
        )));
    }
    // big roots first makes the remaining-weight prune effective
    let mut order: Vec<usize> = (0..d).filter(|&i| rs.roots[i].abs_f64() > 0.0).collect();
    order.sort_by(|&a, &b| rs.roots[b].abs_f64().total_cmp(&rs.roots[a].abs_f64()));
    let pos_roots: Vec<(f64, f64)> = order
        .iter()
        .map(|&i| (rs.roots[i].re.to_f64(), rs.roots[i].im.to_f64()))
        .collect();
    let mut suffix = vec![0.0f64; order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix[i] = suffix[i + 1] + pos_roots[i].0.hypot(pos_roots[i].1);
    }
    let loose = 1000.0 * rs.tol;

    struct Search<'a> {
        pos_roots: &'a [(f64, f64)],
        suffix: &'a [f64],
        max_support: u32,
        loose: f64,
        coeffs: Vec<i8>,
        hits: Vec<Vec<i8>>,
    }

    impl Search<'_> {
        fn dfs(&mut self, pos: usize, sum: (f64, f64), support: u32, seen_nonzero: bool) {
            let mag = sum.0.hypot(sum.1);
            if mag > self.suffix[pos] + self.loose {
                return;
            }
            if pos == self.pos_roots.len() {
                if seen_nonzero && mag < self.loose {
                    self.hits.push(self.coeffs.clone());
                }
                return;
            }
            let (re, im) = self.pos_roots[pos];
            // +1 before -1, and -1 only after a nonzero: fixes the global sign
            let choices: &[i8] = if support == self.max_support {
                &[0]
            } else if seen_nonzero {
                &[0, 1, -1]
            } else {
                &[0, 1]
            };
            for &b in choices {
                self.coeffs[pos] = b;
                let next = match b {
                    0 => sum,
                    1 => (sum.0 + re, sum.1 + im),
                    _ => (sum.0 - re, sum.1 - im),
                };
                self.dfs(pos + 1, next, support + u32::from(b != 0), seen_nonzero || b != 0);
            }
            self.coeffs[pos] = 0;
        }
    }

    let mut search = Search {
        pos_roots: &pos_roots,
        suffix: &suffix,
        max_support,
        loose,
        coeffs: vec![0i8; order.len()],
        hits: Vec::new(),
    };
    search.dfs(0, (0.0, 0.0), 0, false);
    let hits = search.hits;

    let tol2 = rs.tol * rs.tol;
    let mut report = ZeroSumReport::default();
    for hit in hits {
        // re-verify at doubled precision
        let mut sum = Cdd::ZERO;
        for (k, &b) in hit.iter().enumerate() {
            match b {
                1 => sum = sum + rs.roots[order[k]],
                -1 => sum = sum - rs.roots[order[k]],
                _ => {}
            }
        }
        let residual = sum.abs_f64();
        // map back to original root indices
        let mut full = vec![0i8; d];
        for (k, &b) in hit.iter().enumerate() {
            full[order[k]] = b;
        }
        if full.iter().find(|&&b| b != 0) == Some(&-1) {
            for b in full.iter_mut() {
                *b = -*b;
            }
        }
        let sum_rec = ZeroSum {
            coefficients: full,
            residual,
        };
        if residual < tol2 {
            report.zero_sums.push(sum_rec);
        } else if residual < loose {
            report.near_misses.push(sum_rec);
        }
    }
    report.zero_sums.sort_by(|a, b| a.coefficients.cmp(&b.coefficients));
    report.zero_sums.dedup_by(|a, b| a.coefficients == b.coefficients);
    report.near_misses.sort_by(|a, b| a.coefficients.cmp(&b.coefficients));
    report.near_misses.dedup_by(|a, b| a.coefficients == b.coefficients);
    Ok(report)
}
