//! Exact subgraph counts, the closed formula for `c(n, F)` and its
//! brute-force oracle, and the leading coefficient `alpha_F`.
//!
//! Everything here is exact: copy counts are integers and the formula is
//! evaluated over arbitrary-precision rationals.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_turan, build_turan_plus_edge_in_part, edge, Edge, Graph, VertexPartition,
};
use crate::pattern::{ColoringProfile, PatternProfile};

/// Largest pattern order accepted by the copy counters.
pub const MAX_PATTERN_ORDER: usize = 8;
/// Default number of partial-map extensions before a count is abandoned.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountLimits {
    pub max_pattern_order: usize,
    pub budget: u64,
}

impl Default for CountLimits {
    fn default() -> Self {
        CountLimits {
            max_pattern_order: MAX_PATTERN_ORDER,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Formula,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    /// Exact value: a decimal integer, or `p/q` for rationals.
    pub value: String,
    pub method: CountMethod,
    pub pattern: String,
    pub host: String,
    pub elapsed_ms: f64,
}

impl CountReport {
    pub fn timed<T: std::fmt::Display>(
        method: CountMethod,
        pattern: &str,
        host: &str,
        run: impl FnOnce() -> Result<T>,
    ) -> Result<Self> {
        let start = Instant::now();
        let value = run()?;
        Ok(CountReport {
            value: value.to_string(),
            method,
            pattern: pattern.to_string(),
            host: host.to_string(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }
}

/// `p/q` in lowest terms, or just `p` when the denominator is one.
pub fn fraction_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Keeps only injections whose image meets the partition's parts in exactly
/// the pinned edge.
struct IntraFilter {
    part: Vec<Option<usize>>,
    allowed: Edge,
}

struct Matcher<'a> {
    g: &'a Graph,
    f: &'a Graph,
    order: Vec<usize>,
    /// earlier pattern neighbors of `order[i]`
    back: Vec<Vec<usize>>,
    filter: Option<IntraFilter>,
    budget: u64,
    spent: AtomicU64,
    aborted: AtomicBool,
}

impl<'a> Matcher<'a> {
    fn new(
        g: &'a Graph,
        f: &'a Graph,
        pinned: &[usize],
        filter: Option<IntraFilter>,
        budget: u64,
    ) -> Self {
        let k = f.n();
        let mut placed = vec![false; k];
        let mut order = Vec::with_capacity(k);
        for &p in pinned {
            placed[p] = true;
            order.push(p);
        }
        while order.len() < k {
            let next = (0..k)
                .filter(|&p| !placed[p])
                .max_by_key(|&p| {
                    let linked = f.neighbors(p).iter().filter(|&&q| placed[q]).count();
                    (linked, f.degree(p), std::cmp::Reverse(p))
                })
                .expect("an unplaced pattern vertex remains");
            placed[next] = true;
            order.push(next);
        }
        let mut position = vec![0; k];
        for (i, &p) in order.iter().enumerate() {
            position[p] = i;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                f.neighbors(p)
                    .iter()
                    .copied()
                    .filter(|&q| position[q] < i)
                    .collect()
            })
            .collect();
        Matcher {
            g,
            f,
            order,
            back,
            filter,
            budget,
            spent: AtomicU64::new(0),
            aborted: AtomicBool::new(false),
        }
    }

    fn fits(&self, i: usize, h: usize, map: &[usize], used: &[bool]) -> bool {
        if used[h] || self.g.degree(h) < self.f.degree(self.order[i]) {
            return false;
        }
        self.back[i].iter().all(|&q| {
            let hq = map[q];
            if !self.g.has_edge(h, hq) {
                return false;
            }
            match &self.filter {
                Some(flt) => match (flt.part[h], flt.part[hq]) {
                    (Some(a), Some(b)) if a == b => edge(h, hq) == flt.allowed,
                    _ => true,
                },
                None => true,
            }
        })
    }

    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        if self.spent.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn extend(&self, i: usize, map: &mut [usize], used: &mut [bool]) -> u64 {
        if i == self.order.len() {
            return 1;
        }
        let p = self.order[i];
        let mut total = 0;
        let candidates: &[usize] = match self.back[i].first() {
            Some(&q) => self.g.neighbors(map[q]),
            None => &[],
        };
        let mut visit = |h: usize, map: &mut [usize], used: &mut [bool]| {
            if self.fits(i, h, map, used) && self.tick() {
                map[p] = h;
                used[h] = true;
                total += self.extend(i + 1, map, used);
                used[h] = false;
                map[p] = usize::MAX;
            }
        };
        if self.back[i].is_empty() {
            for h in 0..self.g.n() {
                visit(h, map, used);
            }
        } else {
            for &h in candidates {
                visit(h, map, used);
            }
        }
        total
    }

    /// Injections extending `pins` (pattern vertex, host vertex), in `order` prefix.
    fn count(&self, pins: &[usize]) -> std::result::Result<u64, u64> {
        let k = self.f.n();
        let mut map = vec![usize::MAX; k];
        let mut used = vec![false; self.g.n()];
        for (i, &h) in pins.iter().enumerate() {
            if !self.fits(i, h, &map, &used) {
                return Ok(0);
            }
            map[self.order[i]] = h;
            used[h] = true;
        }
        let start = pins.len();
        let total = if start == 0 && k > 0 {
            // shard on the image of the first pattern vertex
            let p = self.order[0];
            (0..self.g.n())
                .into_par_iter()
                .map(|h| {
                    let mut map = map.clone();
                    let mut used = used.clone();
                    if !self.fits(0, h, &map, &used) || !self.tick() {
                        return 0;
                    }
                    map[p] = h;
                    used[h] = true;
                    self.extend(1, &mut map, &mut used)
                })
                .sum()
        } else {
            self.extend(start, &mut map, &mut used)
        };
        if self.aborted.load(Ordering::Relaxed) {
            Err(total)
        } else {
            Ok(total)
        }
    }
}

fn check_order(f: &Graph, limits: &CountLimits) -> Result<()> {
    if f.n() > limits.max_pattern_order {
        return Err(Error::Guardrail(format!(
            "pattern order {} exceeds the counting limit of {}",
            f.n(),
            limits.max_pattern_order
        )));
    }
    Ok(())
}

/// Number of injections `V(F) -> V(G)` mapping edges to edges.
pub fn count_injections(g: &Graph, f: &Graph, limits: &CountLimits) -> Result<u64> {
    check_order(f, limits)?;
    if f.n() > g.n() {
        return Ok(0);
    }
    let matcher = Matcher::new(g, f, &[], None, limits.budget);
    matcher.count(&[]).map_err(|partial| Error::BudgetExceeded {
        budget: limits.budget,
        lower_bound: partial,
    })
}

/// `N_F(G)`: subgraphs of `G` isomorphic to `F`.
pub fn count_copies(g: &Graph, f: &PatternProfile) -> Result<u64> {
    count_copies_with(g, f, &CountLimits::default())
}

pub fn count_copies_with(g: &Graph, f: &PatternProfile, limits: &CountLimits) -> Result<u64> {
    check_order(&f.graph, limits)?;
    if f.f > g.n() {
        return Ok(0);
    }
    let matcher = Matcher::new(g, &f.graph, &[], None, limits.budget);
    match matcher.count(&[]) {
        Ok(inj) => Ok(exact_div(inj, f.aut)),
        Err(partial) => Err(Error::BudgetExceeded {
            budget: limits.budget,
            lower_bound: partial / f.aut,
        }),
    }
}

fn exact_div(a: u64, b: u64) -> u64 {
    let (q, r) = a.div_rem(&b);
    assert_eq!(r, 0, "injection count {a} is not a multiple of |Aut| = {b}");
    q
}

/// Copies of `F` in `G` using the edge `e`. With a partition, only copies whose
/// one and only intra-part edge is `e` are counted.
pub fn count_copies_through_edge(
    g: &Graph,
    f: &PatternProfile,
    e: Edge,
    exclusive_within: Option<&VertexPartition>,
) -> Result<u64> {
    count_copies_through_edge_with(g, f, e, exclusive_within, &CountLimits::default())
}

pub fn count_copies_through_edge_with(
    g: &Graph,
    f: &PatternProfile,
    e: Edge,
    exclusive_within: Option<&VertexPartition>,
    limits: &CountLimits,
) -> Result<u64> {
    let (u, v) = edge(e.0, e.1);
    if !g.has_edge(u, v) {
        return Err(Error::EdgeNotInGraph(u, v));
    }
    check_order(&f.graph, limits)?;
    if let Some(p) = exclusive_within {
        if !p.is_intra_part(u, v) {
            return Err(Error::EdgeNotIntraPart(u, v));
        }
    }
    let spent = AtomicU64::new(0);
    let mut total = 0u64;
    // every injection whose image uses e sends exactly one pattern edge onto it
    for &(a, b) in f.graph.edges() {
        for pins in [[u, v], [v, u]] {
            let filter = exclusive_within.map(|p| IntraFilter {
                part: p.assignment(g.n()),
                allowed: (u, v),
            });
            let remaining = limits.budget.saturating_sub(spent.load(Ordering::Relaxed));
            let matcher = Matcher::new(g, &f.graph, &[a, b], filter, remaining);
            match matcher.count(&pins) {
                Ok(c) => total += c,
                Err(c) => {
                    return Err(Error::BudgetExceeded {
                        budget: limits.budget,
                        lower_bound: (total + c) / f.aut,
                    })
                }
            }
            spent.fetch_add(matcher.spent.load(Ordering::Relaxed), Ordering::Relaxed);
        }
    }
    Ok(exact_div(total, f.aut))
}

/// `x (x - 1) ... (x - k + 1)`; the empty product is one.
pub fn falling_factorial(x: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term -= BigRational::one();
    }
    acc
}

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `2 (n/r - 2)_{tau_1} prod_{i >= 2} (n/r)_{tau_i}`, defined when `r | n`.
pub fn coloring_contribution(profile: &ColoringProfile, n: usize, r: usize) -> Result<BigRational> {
    if r == 0 || !n.is_multiple_of(r) {
        return Err(Error::NotDivisible { n, r });
    }
    if profile.tau.len() != r {
        return Err(Error::InvalidParameter(format!(
            "coloring has {} classes, expected {r}",
            profile.tau.len()
        )));
    }
    let q = int(n / r);
    let mut acc = int(2) * falling_factorial(&(q.clone() - int(2)), profile.tau[0]);
    for &t in &profile.tau[1..] {
        acc *= falling_factorial(&q, t);
    }
    Ok(acc)
}

/// `c(n, F)` from the closed formula over good edges and their colorings.
///
/// Requires `r | n` and `n / r >= 2`, so every falling factorial has a
/// nonnegative integer argument and counts embeddings directly.
pub fn c_exact(n: usize, f: &PatternProfile) -> Result<BigInt> {
    f.require_color_critical()?;
    let r = f.r;
    if !n.is_multiple_of(r) {
        return Err(Error::NotDivisible { n, r });
    }
    if n / r < 2 {
        return Err(Error::InvalidParameter(format!(
            "parts of T_{{{n},{r}}} have fewer than two vertices"
        )));
    }
    let mut sum = BigRational::zero();
    for c in f.all_colorings() {
        sum += coloring_contribution(c, n, r)?;
    }
    let value = sum / int(f.aut as usize);
    assert!(
        value.is_integer() && !value.is_negative(),
        "formula produced {value}, not a nonnegative integer"
    );
    Ok(value.to_integer())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartCount {
    pub part: usize,
    pub part_size: usize,
    pub copies: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceCount {
    pub value: u64,
    /// One entry per distinct part size able to take an edge.
    pub per_part: Vec<PartCount>,
}

/// `c(n, F)` by definition: the fewest copies of `F` over all ways of adding
/// one edge inside a part of `T_{n,r}`, with `r = chi(F) - 1`.
pub fn c_bruteforce(n: usize, f: &PatternProfile) -> Result<u64> {
    Ok(c_bruteforce_detail(n, f, &CountLimits::default())?.value)
}

pub fn c_bruteforce_detail(
    n: usize,
    f: &PatternProfile,
    limits: &CountLimits,
) -> Result<BruteForceCount> {
    if f.chi < 2 {
        return Err(Error::ChromaticTooSmall(f.chi));
    }
    let r = f.r;
    let turan = build_turan(n, r)?;
    let partition = turan.partition.expect("Turan graphs carry a partition");
    let mut per_part = Vec::new();
    let mut seen_sizes = Vec::new();
    for (i, part) in partition.parts().iter().enumerate() {
        // parts of equal size give isomorphic hosts
        if part.len() < 2 || seen_sizes.contains(&part.len()) {
            continue;
        }
        seen_sizes.push(part.len());
        let host = build_turan_plus_edge_in_part(n, r, i)?.graph;
        per_part.push(PartCount {
            part: i,
            part_size: part.len(),
            copies: count_copies_with(&host, f, limits)?,
        });
    }
    let value = per_part.iter().map(|p| p.copies).min().ok_or_else(|| {
        Error::InvalidParameter(format!("no part of T_{{{n},{r}}} has two vertices"))
    })?;
    Ok(BruteForceCount { value, per_part })
}

/// `alpha_F = 2 * (number of colorings) / (|Aut F| * r^(f-2))`.
pub fn alpha_exact(f: &PatternProfile) -> Result<BigRational> {
    f.require_color_critical()?;
    let colorings = f.coloring_count();
    let denom = BigInt::from(f.aut) * BigInt::from(f.r).pow((f.f - 2) as u32);
    Ok(BigRational::new(BigInt::from(2 * colorings), denom))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub n: usize,
    pub c: String,
    pub method: CountMethod,
    /// `alpha_F n^(f-2)`
    pub leading: String,
    /// `|c - alpha_F n^(f-2)| / n^(f-3)`
    pub residual: String,
    pub residual_f64: f64,
    /// `c / (alpha_F n^(f-2))`
    pub ratio: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl ScanPoint {
    pub fn sandwich_holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaScan {
    pub alpha: String,
    pub f: usize,
    pub r: usize,
    pub points: Vec<ScanPoint>,
    /// Values of `n` where `alpha n^(f-2) / 2 < c < 2 alpha n^(f-2)` fails.
    pub findings: Vec<usize>,
}

/// Evaluates `c(n, F)` against `alpha_F n^(f-2)` at each `n`. Uses the formula
/// when `r | n` and the brute-force count otherwise. A failed sandwich is
/// recorded in `findings`, not raised.
pub fn alpha_residual_scan(f: &PatternProfile, n_values: &[usize]) -> Result<AlphaScan> {
    let alpha = alpha_exact(f)?;
    let r = f.r;
    let mut points = Vec::new();
    let mut findings = Vec::new();
    for &n in n_values {
        let (c, method) = if n % r == 0 && n / r >= 2 {
            (
                BigRational::from_integer(c_exact(n, f)?),
                CountMethod::Formula,
            )
        } else {
            (
                BigRational::from_integer(BigInt::from(c_bruteforce(n, f)?)),
                CountMethod::BruteForce,
            )
        };
        let nn = int(n);
        let leading = &alpha * num_traits::pow(nn.clone(), f.f - 2);
        let scale = if f.f >= 3 {
            num_traits::pow(nn, f.f - 3)
        } else {
            BigRational::one()
        };
        let residual = (&c - &leading).abs() / scale;
        let half = &leading / int(2);
        let double = &leading * int(2);
        let point = ScanPoint {
            n,
            c: fraction_string(&c),
            method,
            leading: fraction_string(&leading),
            residual_f64: residual.to_f64().unwrap_or(f64::NAN),
            residual: fraction_string(&residual),
            ratio: (&c / &leading).to_f64().unwrap_or(f64::NAN),
            lower_holds: half < c,
            upper_holds: c < double,
        };
        if !point.sandwich_holds() {
            findings.push(n);
        }
        points.push(point);
    }
    Ok(AlphaScan {
        alpha: fraction_string(&alpha),
        f: f.f,
        r,
        points,
        findings,
    })
}
