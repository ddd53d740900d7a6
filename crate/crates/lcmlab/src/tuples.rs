//! Weakly decreasing valuation profiles and their admissibility filters.
//!
//! A profile (nu_1 >= nu_2 >= ... >= nu_s >= 1) records, for one prime p,
//! how often the powers p^nu divide values in a run: position r says the
//! r-th deepest value is divisible by p^{nu_r}. Three filters decide which
//! profiles survive for large primes:
//!
//! - `Sah(d)`: at most d - nu positions may reach depth nu;
//! - `BaierDey(eta)`: position r is forbidden once
//!   r >= floor(2^{eta-1-floor(log2 nu_r)}) + 1 (the cyclotomic descent
//!   constraint for X^{2^eta}+1);
//! - `GenericU(d, u)`: the conjunction of the Sah cap with a flat cap of
//!   u - 1 positions per depth, as produced by the negation-pairing bound.
//!
//! All three are downward closed (shrinking a profile keeps it admissible),
//! which justifies enumerating by depth-first extension with pruning. The
//! extremal statistics `max_weight` and `max_weight_over_height` are the
//! exponents that drive the lcm lower bounds.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

use crate::error::Error;
use crate::Result;

/// Weakly decreasing tuple of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuationProfile {
    values: Vec<u32>,
}

impl ValuationProfile {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("profile must be nonempty".into()));
        }
        if values.contains(&0) {
            return Err(Error::Config("profile entries must be positive".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Config("profile must be weakly decreasing".into()));
        }
        Ok(ValuationProfile { values })
    }

    /// Sort an exponent multiset into canonical decreasing order.
    pub fn from_multiset(mut values: Vec<u32>) -> Result<Self> {
        values.sort_unstable_by(|a, b| b.cmp(a));
        ValuationProfile::new(values)
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of the entries.
    pub fn weight(&self) -> u64 {
        self.values.iter().map(|&v| v as u64).sum()
    }

    /// Largest entry nu_1.
    pub fn height(&self) -> u32 {
        self.values[0]
    }

    /// Number of positions with depth >= nu.
    fn count_at_least(&self, nu: u32) -> usize {
        self.values.iter().take_while(|&&v| v >= nu).count()
    }
}

impl fmt::Display for ValuationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityFilter {
    Sah { d: u32 },
    BaierDey { eta: u32 },
    GenericU { d: u32, u: u32 },
    Conjunction(Vec<AdmissibilityFilter>),
}

/// floor(2^{eta-1-floor(log2 nu)}), the largest position allowed for an
/// entry of value nu; zero when the exponent goes negative. Bit arithmetic
/// only: floor(log2 nu) is the position of nu's highest set bit.
fn baier_dey_allowance(eta: u32, nu: u32) -> u64 {
    debug_assert!(nu >= 1);
    let k = nu.ilog2();
    if eta > k {
        1u64 << (eta - 1 - k)
    } else {
        0
    }
}

impl AdmissibilityFilter {
    pub fn sah(d: u32) -> Self {
        AdmissibilityFilter::Sah { d }
    }

    pub fn baier_dey(eta: u32) -> Self {
        AdmissibilityFilter::BaierDey { eta }
    }

    pub fn generic_u(d: u32, u: u32) -> Self {
        AdmissibilityFilter::GenericU { d, u }
    }

    pub fn admits(&self, profile: &ValuationProfile) -> bool {
        match self {
            AdmissibilityFilter::Sah { d } => (1..=profile.height()).all(|nu| {
                nu < *d && profile.count_at_least(nu) <= (*d - nu) as usize
            }),
            AdmissibilityFilter::BaierDey { eta } => profile
                .values
                .iter()
                .enumerate()
                .all(|(i, &nu)| (i as u64 + 1) <= baier_dey_allowance(*eta, nu)),
            AdmissibilityFilter::GenericU { d, u } => (1..=profile.height()).all(|nu| {
                let cap = ((*u as i64 - 1).min(*d as i64 - nu as i64)).max(-1);
                (profile.count_at_least(nu) as i64) <= cap
            }),
            AdmissibilityFilter::Conjunction(fs) => fs.iter().all(|f| f.admits(profile)),
        }
    }

    /// (max entry value, max length) ensuring the admissible set is finite,
    /// or None when no cap is derivable.
    fn caps(&self) -> Option<(u32, usize)> {
        match self {
            AdmissibilityFilter::Sah { d } => {
                Some((d.saturating_sub(1), d.saturating_sub(1) as usize))
            }
            AdmissibilityFilter::BaierDey { eta } => {
                if *eta == 0 {
                    return Some((0, 0));
                }
                // values nu with floor(log2 nu) >= eta have allowance 0, and
                // even value 1 is confined to the first 2^{eta-1} positions
                Some(((1u32 << eta) - 1, 1usize << (eta - 1)))
            }
            AdmissibilityFilter::GenericU { d, u } => Some((
                d.saturating_sub(1),
                (u.saturating_sub(1) as usize).min(d.saturating_sub(1) as usize),
            )),
            AdmissibilityFilter::Conjunction(fs) => fs
                .iter()
                .filter_map(|f| f.caps())
                .reduce(|(v1, l1), (v2, l2)| (v1.min(v2), l1.min(l2))),
        }
    }
}

impl fmt::Display for AdmissibilityFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibilityFilter::Sah { d } => write!(f, "sah(d={d})"),
            AdmissibilityFilter::BaierDey { eta } => write!(f, "baierdey(eta={eta})"),
            AdmissibilityFilter::GenericU { d, u } => write!(f, "generic(d={d},u={u})"),
            AdmissibilityFilter::Conjunction(fs) => {
                let parts: Vec<String> = fs.iter().map(|x| x.to_string()).collect();
                write!(f, "all({})", parts.join(","))
            }
        }
    }
}

/// The complete admissible set, by depth-first extension: append a new last
/// entry no larger than the current last, prune whenever the extension is
/// inadmissible. Downward closure makes the pruning exhaustive.
pub fn enumerate(filter: &AdmissibilityFilter) -> Result<BTreeSet<ValuationProfile>> {
    let (value_cap, len_cap) = filter.caps().ok_or(Error::UnboundedFilter)?;
    let mut out = BTreeSet::new();
    if value_cap == 0 || len_cap == 0 {
        return Ok(out);
    }
    let mut stack: Vec<u32> = Vec::new();
    extend(filter, value_cap, len_cap, &mut stack, &mut out);
    Ok(out)
}

fn extend(
    filter: &AdmissibilityFilter,
    value_cap: u32,
    len_cap: usize,
    prefix: &mut Vec<u32>,
    out: &mut BTreeSet<ValuationProfile>,
) {
    if prefix.len() == len_cap {
        return;
    }
    let last = prefix.last().copied().unwrap_or(value_cap);
    for v in 1..=last.min(value_cap) {
        prefix.push(v);
        let candidate = ValuationProfile {
            values: prefix.clone(),
        };
        if filter.admits(&candidate) {
            out.insert(candidate);
            extend(filter, value_cap, len_cap, prefix, out);
        }
        prefix.pop();
    }
}

/// Max over admissible profiles of the entry sum; 0 when nothing is admissible.
pub fn max_weight(filter: &AdmissibilityFilter) -> Result<u64> {
    Ok(enumerate(filter)?
        .iter()
        .map(|p| p.weight())
        .max()
        .unwrap_or(0))
}

/// All profiles attaining `max_weight`, in lexicographic order.
pub fn max_weight_profiles(filter: &AdmissibilityFilter) -> Result<Vec<ValuationProfile>> {
    let set = enumerate(filter)?;
    let best = set.iter().map(|p| p.weight()).max().unwrap_or(0);
    Ok(set.into_iter().filter(|p| p.weight() == best).collect())
}

/// Max over admissible profiles of (entry sum) / (largest entry), exactly.
pub fn max_weight_over_height(filter: &AdmissibilityFilter) -> Result<Ratio<u64>> {
    Ok(enumerate(filter)?
        .iter()
        .map(|p| Ratio::new(p.weight(), p.height() as u64))
        .max()
        .unwrap_or_else(|| Ratio::from_integer(0)))
}

/// max_weight of GenericU(d, u), checked against the closed form
/// (d - u/2)(u - 1) in exact rationals. A mismatch is a bug, not an input
/// error, hence the hard assert.
pub fn generic_u_exponent(d: u32, u: u32) -> Result<u64> {
    if !(2 <= u && u <= d) {
        return Err(Error::Config(format!(
            "generic exponent needs 2 <= u <= d, got d={d}, u={u}"
        )));
    }
    let weight = max_weight(&AdmissibilityFilter::generic_u(d, u))?;
    let closed_form = Ratio::new((2 * d as u64 - u as u64) * (u as u64 - 1), 2);
    assert_eq!(
        Ratio::from_integer(weight),
        closed_form,
        "enumerated max weight disagrees with (d-u/2)(u-1) at d={d}, u={u}"
    );
    Ok(weight)
}

/// The extension tree the admissible set lives in: a node's children are
/// (a) the profile with its last entry incremented and (b) the profile with
/// a fresh 1 appended, in that order. Both moves preserve admissibility
/// going down to the parent, so pruning is exact, and every admissible
/// profile is reachable from the root (1).
fn tree_children(
    filter: &AdmissibilityFilter,
    value_cap: u32,
    len_cap: usize,
    node: &ValuationProfile,
) -> Vec<ValuationProfile> {
    let mut out = Vec::new();
    let values = &node.values;
    let last = *values.last().unwrap();
    let bumped_ok = match values.len() {
        1 => last < value_cap,
        _ => last < values[values.len() - 2],
    };
    if bumped_ok {
        let mut v = values.clone();
        *v.last_mut().unwrap() += 1;
        let cand = ValuationProfile { values: v };
        if filter.admits(&cand) {
            out.push(cand);
        }
    }
    if values.len() < len_cap {
        let mut v = values.clone();
        v.push(1);
        let cand = ValuationProfile { values: v };
        if filter.admits(&cand) {
            out.push(cand);
        }
    }
    out
}

/// Indented UTF-8 rendering of the extension tree.
pub fn render_tree(filter: &AdmissibilityFilter) -> Result<String> {
    let (value_cap, len_cap) = filter.caps().ok_or(Error::UnboundedFilter)?;
    let root = ValuationProfile { values: vec![1] };
    let mut out = String::new();
    if value_cap == 0 || len_cap == 0 || !filter.admits(&root) {
        out.push_str("(empty)\n");
        return Ok(out);
    }
    out.push_str(&root.to_string());
    out.push('\n');
    fn walk(
        filter: &AdmissibilityFilter,
        value_cap: u32,
        len_cap: usize,
        node: &ValuationProfile,
        prefix: &str,
        out: &mut String,
    ) {
        let children = tree_children(filter, value_cap, len_cap, node);
        for (i, child) in children.iter().enumerate() {
            let is_last = i + 1 == children.len();
            out.push_str(prefix);
            out.push_str(if is_last { "└── " } else { "├── " });
            out.push_str(&child.to_string());
            out.push('\n');
            let next_prefix = format!("{prefix}{}", if is_last { "    " } else { "│   " });
            walk(filter, value_cap, len_cap, child, &next_prefix, out);
        }
    }
    walk(filter, value_cap, len_cap, &root, "", &mut out);
    Ok(out)
}

/// DOT digraph of the extension tree, nodes in depth-first preorder.
pub fn render_dot(filter: &AdmissibilityFilter) -> Result<String> {
    let (value_cap, len_cap) = filter.caps().ok_or(Error::UnboundedFilter)?;
    let mut out = String::from("digraph profiles {\n    node [shape=box];\n");
    let root = ValuationProfile { values: vec![1] };
    if value_cap > 0 && len_cap > 0 && filter.admits(&root) {
        fn walk(
            filter: &AdmissibilityFilter,
            value_cap: u32,
            len_cap: usize,
            node: &ValuationProfile,
            out: &mut String,
        ) {
            for child in tree_children(filter, value_cap, len_cap, node) {
                out.push_str(&format!("    \"{node}\" -> \"{child}\";\n"));
                walk(filter, value_cap, len_cap, &child, out);
            }
        }
        out.push_str(&format!("    \"{root}\";\n"));
        walk(filter, value_cap, len_cap, &root, &mut out);
    }
    out.push_str("}\n");
    Ok(out)
}
