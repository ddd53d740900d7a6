//! Monic integer polynomials: parsing, exact evaluation, evenness,
//! squarefreeness, and a best-effort irreducibility verdict.
//!
//! Irreducibility is certified by a mod-p witness (a prime p not dividing
//! the discriminant such that f stays irreducible mod p). Reducibility is
//! certified by an explicit factor, found either through the rational-root
//! scan or a bounded search over monic factor candidates with coefficients
//! up to a Mignotte-style bound. Neither side is complete — X^4+1 is
//! reducible mod every prime yet irreducible over Q — so `Unknown` is a
//! legitimate outcome and downstream consumers must opt in to proceed.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::sieve::primes_up_to;

/// Monic integer polynomial of degree >= 2. `coeffs[i]` is the coefficient
/// of X^i; the top coefficient is always 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrreducibilityVerdict {
    /// f mod `witness_prime` is irreducible, which certifies f irreducible over Q.
    Irreducible { witness_prime: u64 },
    /// An explicit monic factor (ascending coefficients) that exactly divides f.
    Reducible { factor: Vec<BigInt> },
    /// Neither certificate found within the budget.
    Unknown,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self, Error> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::DegreeTooSmall);
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(Error::NotMonic);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> BigUint {
        self.coeffs
            .iter()
            .map(|c| c.magnitude().clone())
            .max()
            .unwrap()
    }

    /// Canonical text form used in cache headers and cache keys.
    pub fn coeff_string(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn evaluate(&self, n: i64) -> BigInt {
        self.evaluate_big(&BigInt::from(n))
    }

    pub fn evaluate_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// f(-X) == f(X), i.e. every odd-index coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .skip(1)
            .step_by(2)
            .all(|c| c.is_zero())
    }

    /// For even f, the polynomial g with f(X) = g(X^2) (ascending coefficients).
    pub fn even_part(&self) -> Option<Vec<BigInt>> {
        if !self.is_even() {
            return None;
        }
        Some(self.coeffs.iter().step_by(2).cloned().collect())
    }

    pub fn derivative(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect()
    }

    /// disc(f) = (-1)^{d(d-1)/2} Res(f, f') for monic f.
    pub fn discriminant(&self) -> BigInt {
        let res = resultant(&self.coeffs, &self.derivative());
        let d = self.degree() as u64;
        if (d * (d - 1) / 2) % 2 == 1 {
            -res
        } else {
            res
        }
    }

    /// gcd(f, f') has degree 0 over the rationals, equivalently disc != 0.
    pub fn is_squarefree(&self) -> bool {
        !self.discriminant().is_zero()
    }

    /// Scan primes up to `prime_budget` for a mod-p irreducibility witness,
    /// interleaved with the bounded reducibility search. See module docs.
    pub fn irreducibility_witness(&self, prime_budget: u64) -> IrreducibilityVerdict {
        assert!(prime_budget >= 2, "prime budget must be at least 2");
        let disc = self.discriminant();
        if disc.is_zero() {
            // repeated factor; gcd(f, f') is a proper monic divisor
            let g = primitive_gcd(&self.coeffs, &self.derivative());
            debug_assert!(divides_exactly(&self.coeffs, &g));
            return IrreducibilityVerdict::Reducible { factor: g };
        }
        let primes = primes_up_to(prime_budget);
        let quick = 50u64.min(prime_budget);
        for &p in primes.iter().take_while(|&&p| p <= quick) {
            if (&disc % BigInt::from(p)).is_zero() {
                continue;
            }
            if irreducible_mod_p(&self.coeffs, p) {
                return IrreducibilityVerdict::Irreducible { witness_prime: p };
            }
        }
        if let Some(factor) = self.bounded_factor_search(2_000_000) {
            return IrreducibilityVerdict::Reducible { factor };
        }
        for &p in primes.iter().skip_while(|&&p| p <= quick) {
            if (&disc % BigInt::from(p)).is_zero() {
                continue;
            }
            if irreducible_mod_p(&self.coeffs, p) {
                return IrreducibilityVerdict::Irreducible { witness_prime: p };
            }
        }
        IrreducibilityVerdict::Unknown
    }

    /// Search monic factors of degree k = 1..d/2 with coefficients bounded by
    /// 2^d * max|coeff|, trying at most `cap` candidates per degree. Degree 1
    /// is a complete rational-root scan (roots of a monic polynomial are
    /// integers within the Cauchy bound); higher degrees are a desk-scale
    /// certificate only.
    fn bounded_factor_search(&self, cap: u64) -> Option<Vec<BigInt>> {
        let d = self.degree();
        let max_c = BigInt::from(self.max_abs_coeff());

        // degree 1: integer roots a, |a| <= 1 + max|c|
        let cauchy: BigInt = &max_c + 1i32;
        let root_bound = cauchy.to_u64().unwrap_or(u64::MAX).min(cap);
        for a in signed_magnitude(root_bound) {
            if self.evaluate(a).is_zero() {
                return Some(vec![BigInt::from(-a), BigInt::one()]);
            }
        }

        // when the bound itself is astronomic, give up on k >= 2
        let bound = ((BigInt::one() << d) * &max_c).to_u64()? as i64;
        for k in 2..=(d / 2) {
            let width = 2.0 * bound as f64 + 1.0;
            if width.powi(k as i32) > cap as f64 {
                continue;
            }
            let mut digits = vec![0usize; k as usize];
            let values: Vec<i64> = signed_magnitude(bound as u64).collect();
            loop {
                let mut g: Vec<BigInt> =
                    digits.iter().map(|&i| BigInt::from(values[i])).collect();
                g.push(BigInt::one());
                if divides_exactly(&self.coeffs, &g) {
                    return Some(g);
                }
                // odometer over the signed-magnitude digit order
                let mut pos = 0;
                loop {
                    if pos == digits.len() {
                        break;
                    }
                    digits[pos] += 1;
                    if digits[pos] < values.len() {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
                if pos == digits.len() {
                    break;
                }
            }
        }
        None
    }
}

/// 0, 1, -1, 2, -2, ..., bound, -bound
fn signed_magnitude(bound: u64) -> impl Iterator<Item = i64> {
    (0..=bound).flat_map(|m| {
        let m = m as i64;
        if m == 0 {
            vec![0]
        } else {
            vec![m, -m]
        }
    })
}

/// Remainder of f by monic g is zero? Exact synthetic division over Z.
pub fn divides_exactly(f: &[BigInt], g: &[BigInt]) -> bool {
    debug_assert!(g.last().is_some_and(|c| c.is_one()));
    if g.len() > f.len() {
        return false;
    }
    let mut rem = f.to_vec();
    let dg = g.len() - 1;
    for i in (dg..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let q = rem[i].clone();
        for (j, gc) in g.iter().enumerate() {
            let idx = i - dg + j;
            rem[idx] -= &q * gc;
        }
        debug_assert!(rem[i].is_zero());
    }
    rem.iter().take(dg).all(|c| c.is_zero())
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn primitive_part(v: Vec<BigInt>) -> Vec<BigInt> {
    let v = trim(v);
    if v.is_empty() {
        return v;
    }
    let mut c = content(&v);
    if v.last().unwrap().is_negative() {
        c = -c;
    }
    v.into_iter().map(|x| x / &c).collect()
}

/// lc(b)^(deg a - deg b + 1) * a mod b, exact over Z.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while r.len() > db {
        let lr = r.last().unwrap().clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Primitive gcd over Z (primitive pseudo-remainder sequence), sign
/// normalized to a positive leading coefficient.
pub fn primitive_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive_part(a.to_vec());
    let mut b = primitive_part(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive_part(pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    a
}

/// Determinant of the Sylvester matrix via fraction-free (Bareiss) elimination.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let a = trim(a.to_vec());
    let b = trim(b.to_vec());
    if a.is_empty() || b.is_empty() {
        return BigInt::zero();
    }
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m == 0 {
        return a[0].pow(n as u32);
    }
    if n == 0 {
        return b[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            mat[n + row][row + j] = c.clone();
        }
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..size - 1 {
        if mat[k][k].is_zero() {
            match (k + 1..size).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &mat[k][k] * &mat[i][j] - &mat[i][k] * &mat[k][j];
                mat[i][j] = num / &prev;
            }
            mat[i][k] = BigInt::zero();
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

// ---- arithmetic mod p (u64 primes, u128 intermediates) ----

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub fn reduce_mod_p(coeffs: &[BigInt], p: u64) -> Vec<u64> {
    let pm = BigInt::from(p);
    let mut v: Vec<u64> = coeffs
        .iter()
        .map(|c| {
            let r = c.mod_floor(&pm);
            r.to_u64().unwrap()
        })
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Roots of f mod p by scanning all residues (the valuation engine's
/// per-prime root finder; O(p·d), fine at desk scale).
pub fn roots_mod_p(coeffs_mod_p: &[u64], p: u64) -> Vec<u64> {
    let mut roots = Vec::new();
    for r in 0..p {
        let mut acc = 0u64;
        for c in coeffs_mod_p.iter().rev() {
            acc = (mulmod(acc, r, p) + c) % p;
        }
        if acc == 0 {
            roots.push(r);
        }
    }
    roots
}

fn pm_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// a * b mod (m, p) where m is monic.
fn pm_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(ai, bj, p)) % p;
        }
    }
    let dm = m.len() - 1;
    for i in (dm..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &mj) in m.iter().enumerate().take(dm) {
            let idx = i - dm + j;
            prod[idx] = (prod[idx] + p - mulmod(c, mj, p)) % p;
        }
    }
    prod.truncate(dm);
    pm_trim(&mut prod);
    prod
}

fn pm_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = pm_mulmod(&acc, &b, m, p);
        }
        b = pm_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn pm_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    pm_trim(&mut a);
    pm_trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let db = b.len() - 1;
        let inv = invmod(*b.last().unwrap(), p);
        while a.len() > db {
            let la = *a.last().unwrap();
            if la == 0 {
                a.pop();
                continue;
            }
            let q = mulmod(la, inv, p);
            let shift = a.len() - 1 - db;
            for (j, &bj) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + p - mulmod(q, bj, p)) % p;
            }
            pm_trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
        pm_trim(&mut b);
    }
    a
}

fn pm_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    pm_trim(&mut out);
    out
}

/// Rabin's irreducibility test for f mod p: f is irreducible over F_p iff
/// X^{p^d} == X (mod f) and gcd(X^{p^{d/q}} - X, f) = 1 for every prime q | d.
pub fn irreducible_mod_p(coeffs: &[BigInt], p: u64) -> bool {
    let f = reduce_mod_p(coeffs, p);
    if f.len() < 2 {
        return false;
    }
    let d = (f.len() - 1) as u64;
    if d == 1 {
        return true;
    }
    let prime_divs: Vec<u64> = {
        let mut divs = Vec::new();
        let mut m = d;
        let mut q = 2;
        while q * q <= m {
            if m.is_multiple_of(q) {
                divs.push(q);
                while m.is_multiple_of(q) {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            divs.push(m);
        }
        divs
    };
    let checkpoints: Vec<u64> = prime_divs.iter().map(|q| d / q).collect();
    let x = vec![0u64, 1];
    let mut h = x.clone(); // X^{p^k} mod f, starting at k = 0
    for k in 1..=d {
        h = pm_powmod(&h, p, &f, p);
        if checkpoints.contains(&k) {
            let g = pm_gcd(&pm_sub(&h, &x, p), &f, p);
            if g.len() != 1 {
                return false;
            }
        }
    }
    h == x
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_poly(&self.coeffs))
    }
}

/// Symbolic rendering of ascending coefficients, highest term first.
pub fn render_poly(coeffs: &[BigInt]) -> String {
    let coeffs = {
        let mut v = coeffs.to_vec();
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    };
    if coeffs.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.magnitude();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push('-');
        } else {
            out.push('+');
        }
        let show_coeff = i == 0 || !mag.is_one();
        if show_coeff {
            out.push_str(&mag.to_string());
        }
        if i > 0 {
            if show_coeff {
                out.push('*');
            }
            out.push('X');
            if i > 1 {
                out.push_str(&format!("^{i}"));
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Accepts either a coefficient list "c0,c1,...,cd" or a symbolic form
    /// like "X^4-2" / "x^2+x+1" / "X^3-2*X+5". Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        if compact.contains(',') || !compact.to_ascii_lowercase().contains('x') {
            let coeffs: Result<Vec<BigInt>, _> = compact
                .split(',')
                .map(|t| {
                    BigInt::from_str(t)
                        .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
                })
                .collect();
            return Polynomial::new(coeffs?);
        }
        parse_symbolic(&compact)
    }
}

fn parse_symbolic(s: &str) -> Result<Polynomial, Error> {
    let bytes = s.as_bytes();
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        }
        if i >= bytes.len() {
            return Err(Error::Parse("dangling sign".into()));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut coeff = if i > start {
            BigInt::from_str(&s[start..i]).unwrap()
        } else {
            BigInt::one()
        };
        coeff *= sign;
        let mut exp = 0u32;
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'x' || bytes[i] == b'X') {
            i += 1;
            exp = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let e_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == e_start {
                    return Err(Error::Parse("missing exponent after '^'".into()));
                }
                exp = s[e_start..i]
                    .parse::<u32>()
                    .map_err(|_| Error::Parse("exponent out of range".into()))?;
            }
        } else if i == start {
            return Err(Error::Parse(format!(
                "unexpected character {:?}",
                s[i..].chars().next().unwrap()
            )));
        }
        let idx = exp as usize;
        if coeffs.len() <= idx {
            coeffs.resize(idx + 1, BigInt::zero());
        }
        coeffs[idx] += coeff;
    }
    Polynomial::new(coeffs)
}
