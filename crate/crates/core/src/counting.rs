//! Counting oracles behind the union-bound lower-bound arguments.
//!
//! Colorings of `[1, N]` are `u32` masks (bit `x - 1` holds the color of
//! `x`), so a `k`-term progression with term mask `m` is monochromatic in
//! `x` exactly when `x & m` is `0` or `m`. Full enumeration is capped at
//! `N <= 24`; the closure check at `N <= 20`.
//!
//! Inequalities from the proofs are *reported* (as booleans in the result
//! types) rather than asserted, so that a failing claim shows up as data.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::concentration::{chunk_bounds, ChunkRunner, Rng, Sequential, CHUNK_SAMPLES};
use crate::error::{invalid, Error, Result};
use crate::progressions::{visit_progressions, ProgressionKind};
use crate::search::MonoChecker;

/// Largest `N` counted by full enumeration.
pub const ENUMERATION_LIMIT: usize = 24;
/// Largest `N` for [`closure_property_check`].
pub const CLOSURE_LIMIT: usize = 20;

fn check_budget(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::BudgetExceeded {
            what: "full enumeration (N)",
            limit: limit as u64,
            requested: n as u64,
        });
    }
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    Ok(())
}

fn mask_of(terms: &[usize]) -> u32 {
    terms.iter().fold(0u32, |m, &x| m | (1 << (x - 1)))
}

/// Term masks of every progression with first term `a` and difference `d`.
pub fn progression_masks(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize) -> Result<Vec<u32>> {
    check_budget(n, ENUMERATION_LIMIT)?;
    let mut out = Vec::new();
    visit_progressions(n, kind, k, a, d, |terms| {
        out.push(mask_of(terms));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// The pairs `(a, d)` admitting at least one `k`-term progression in `[1, n]`,
/// ordered by `a` then `d`.
pub fn admissible_pairs(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..=n {
        let mut d = 1;
        while a + (k.max(1) - 1) * d <= n {
            out.push((a, d));
            if k <= 1 {
                break;
            }
            d += 1;
        }
    }
    out
}

/// Distinct term masks of every `k`-term progression of `kind` in `[1, n]`.
pub fn all_progression_masks(n: usize, kind: ProgressionKind, k: usize) -> Result<Vec<u32>> {
    check_budget(n, ENUMERATION_LIMIT)?;
    let mut out = Vec::new();
    for (a, d) in admissible_pairs(n, k) {
        out.extend(progression_masks(n, kind, k, a, d)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[inline]
fn hits_any(x: u32, masks: &[u32]) -> bool {
    masks.iter().any(|&m| {
        let y = x & m;
        y == 0 || y == m
    })
}

/// Number of colorings `x` in `lo..hi` that are monochromatic on at least one
/// of `masks`. Disjoint ranges add up, which is how drivers parallelize.
pub fn count_monochromatic_in_range(masks: &[u32], lo: u64, hi: u64) -> u64 {
    (lo..hi).filter(|&x| hits_any(x as u32, masks)).count() as u64
}

/// `T_{a,d,k}`: colorings of `[1, n]` with a monochromatic `k`-term
/// progression of `kind` that starts at `a` with difference `d`.
pub fn count_t(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize) -> Result<u64> {
    let masks = progression_masks(n, kind, k, a, d)?;
    Ok(count_monochromatic_in_range(&masks, 0, 1u64 << n))
}

/// `S_k`: colorings of `[1, n]` with any monochromatic `k`-term progression
/// of `kind`.
pub fn count_s(n: usize, kind: ProgressionKind, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let masks = all_progression_masks(n, kind, k)?;
    Ok(count_monochromatic_in_range(&masks, 0, 1u64 << n))
}

/// Exact counts for one `(N, kind, k)` and the union-bound chain
/// `S <= ΣT <= (N-k+1)(N/k) max T`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub n: usize,
    pub k: usize,
    pub kind: ProgressionKind,
    pub s: u64,
    /// `T_{a,d,k}` for every admissible `(a, d)`; all other pairs count 0.
    pub t: BTreeMap<(usize, usize), u64>,
    pub sum_t: u64,
    pub max_t: u64,
    /// Least `(a, d)` attaining `max_t`.
    pub argmax: Option<(usize, usize)>,
    /// `(N - k + 1) · (N / k) · max T`.
    pub union_bound: BigRational,
    pub s_le_sum_t: bool,
    pub sum_t_le_union_bound: bool,
    /// `T_{1,1,k}` equals `max T`.
    pub origin_attains_max: bool,
    /// `N >= 2k - 1`, the regime where the maximum is claimed at `(1, 1)`.
    pub origin_claim_applies: bool,
}

impl CountReport {
    pub fn chain_holds(&self) -> bool {
        self.s_le_sum_t && self.sum_t_le_union_bound
    }

    pub fn t_at(&self, a: usize, d: usize) -> u64 {
        self.t.get(&(a, d)).copied().unwrap_or(0)
    }
}

/// Fills a [`CountReport`] by full enumeration.
pub fn union_bound_check(n: usize, kind: ProgressionKind, k: usize) -> Result<CountReport> {
    union_bound_check_with(n, kind, k, &Sequential)
}

/// [`union_bound_check`] with the coloring ranges spread over `runner`.
pub fn union_bound_check_with(n: usize, kind: ProgressionKind, k: usize, runner: &dyn ChunkRunner) -> Result<CountReport> {
    kind.validate()?;
    check_budget(n, ENUMERATION_LIMIT)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let total = 1u64 << n;
    let count = |masks: &[u32]| count_partitioned(masks, total, runner);

    let mut t = BTreeMap::new();
    for (a, d) in admissible_pairs(n, k) {
        let masks = progression_masks(n, kind, k, a, d)?;
        t.insert((a, d), count(&masks));
    }
    let s = count(&all_progression_masks(n, kind, k)?);
    let sum_t: u64 = t.values().sum();
    let max_t = t.values().copied().max().unwrap_or(0);
    let argmax = t.iter().find(|(_, &v)| v == max_t && !t.is_empty()).map(|(&p, _)| p);
    let union_bound = if n + 1 >= k {
        BigRational::new(BigInt::from(n + 1 - k) * BigInt::from(n) * BigInt::from(max_t), BigInt::from(k))
    } else {
        BigRational::zero()
    };
    Ok(CountReport {
        n,
        k,
        kind,
        s,
        sum_t,
        max_t,
        argmax,
        s_le_sum_t: s <= sum_t,
        sum_t_le_union_bound: BigRational::from_integer(BigInt::from(sum_t)) <= union_bound,
        origin_attains_max: t.get(&(1, 1)).is_some_and(|&v| v == max_t),
        origin_claim_applies: n + 1 >= 2 * k,
        union_bound,
        t,
    })
}

/// Splits `0..total` into equal ranges, counts each through `runner`, and
/// sums. The ranges depend only on `total`, so the sum never depends on how
/// many workers ran them.
pub fn count_partitioned(masks: &[u32], total: u64, runner: &dyn ChunkRunner) -> u64 {
    const RANGES: u64 = 64;
    let chunks = RANGES.min(total);
    let job = |c: usize| {
        let lo = total * c as u64 / chunks;
        let hi = total * (c as u64 + 1) / chunks;
        alloc::vec![count_monochromatic_in_range(masks, lo, hi) as f64]
    };
    runner.run(chunks as usize, &job).iter().map(|v| v[0] as u64).sum()
}

/// The set `R_{a,d}` of integers that can appear in a `k`-term progression
/// starting at `a` with difference `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSet {
    pub n: usize,
    pub k: usize,
    pub a: usize,
    pub d: usize,
    pub kind: ProgressionKind,
    pub elements: Vec<usize>,
    /// `|R_{a,d}|`.
    pub s: usize,
    /// Quasi: extent of the final block `P_{a,d,k-1}`. Semi and arithmetic:
    /// the number `r` of extra multiples of `d` reachable within `[1, N]`.
    pub t: usize,
    /// Quasi only: the blocks `P_{a,d,i}`, `i = 0..k-1`, clipped to `[1, N]`.
    pub blocks: Vec<Vec<usize>>,
}

impl RSet {
    /// `w = k(k-1)/2 + t - s`, the correction for overlapping blocks.
    pub fn overlap_correction(&self) -> i64 {
        (self.k * (self.k - 1) / 2 + self.t) as i64 - self.s as i64
    }

    /// Bit mask of the elements (`N <= 32`).
    pub fn mask(&self) -> u32 {
        mask_of(&self.elements)
    }
}

pub fn build_r_set(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize) -> Result<RSet> {
    kind.validate()?;
    if k == 0 || a == 0 || d == 0 {
        return Err(invalid("k, a and d must be at least 1"));
    }
    let last_start = a + (k - 1) * d;
    if last_start > n {
        return Err(invalid(alloc::format!(
            "no {k}-term progression fits: a + (k-1)d = {last_start} > N = {n}"
        )));
    }
    let (elements, t, blocks) = match kind {
        ProgressionKind::Quasi(diam) => {
            let mut blocks: Vec<Vec<usize>> = (0..k - 1)
                .map(|i| {
                    let lo = a + i * d;
                    (lo..=(lo + diam * i).min(n)).collect()
                })
                .collect();
            let t = (diam * (k - 1)).min(n - last_start);
            blocks.push((last_start..=last_start + t).collect());
            let mut elements: Vec<usize> = blocks.iter().flatten().copied().collect();
            elements.sort_unstable();
            elements.dedup();
            (elements, t, blocks)
        }
        ProgressionKind::Semi(_) | ProgressionKind::Arithmetic => {
            let m = kind.param().max(1);
            let r = ((n - a) / d - (k - 1)).min((m - 1) * (k - 1));
            ((0..k + r).map(|q| a + q * d).collect(), r, Vec::new())
        }
    };
    Ok(RSet {
        n,
        k,
        a,
        d,
        kind,
        s: elements.len(),
        elements,
        t,
        blocks,
    })
}

/// Whether membership in `γ_{a,d}` (colorings with a monochromatic
/// progression starting at `a` with difference `d`) is unchanged by
/// recoloring any single element outside `R_{a,d}`, checked over all
/// colorings of `[1, n]`.
pub fn closure_property_check(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize) -> Result<bool> {
    check_budget(n, CLOSURE_LIMIT)?;
    let r = build_r_set(n, kind, k, a, d)?;
    let masks = progression_masks(n, kind, k, a, d)?;
    let total = 1usize << n;
    let mut gamma = alloc::vec![0u64; total.div_ceil(64)];
    for x in 0..total {
        if hits_any(x as u32, &masks) {
            gamma[x >> 6] |= 1 << (x & 63);
        }
    }
    let member = |x: usize| gamma[x >> 6] >> (x & 63) & 1 == 1;
    let outside: Vec<usize> = (0..n).filter(|&b| r.mask() >> b & 1 == 0).collect();
    Ok((0..total).all(|x| outside.iter().all(|&b| member(x) == member(x ^ (1 << b)))))
}

/// `(λ_{k,0}, λ_{k,1})`: weighted counts of jump tuples ending in 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaVector {
    pub k: usize,
    pub v0: BigRational,
    pub v1: BigRational,
}

impl LambdaVector {
    pub fn sum(&self) -> BigRational {
        &self.v0 + &self.v1
    }

    /// Multiplies by `A = [[1, 1/2], [1, 1]]`, giving the vector for `k + 1`.
    pub fn step(&self) -> LambdaVector {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        LambdaVector {
            k: self.k + 1,
            v0: &self.v0 + &self.v1 * half,
            v1: &self.v0 + &self.v1,
        }
    }
}

/// The transfer matrix `A` as exact rationals, row-major.
pub fn transfer_matrix() -> [[BigRational; 2]; 2] {
    let one = BigRational::one;
    [[one(), BigRational::new(BigInt::one(), BigInt::from(2))], [one(), one()]]
}

/// `A^(k-1) (1, 1)`.
pub fn lambda_vector(k: usize) -> Result<LambdaVector> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(lambda_sequence(k).pop().expect("k >= 1"))
}

/// `λ`-vectors for `k = 1..=kmax`.
pub fn lambda_sequence(kmax: usize) -> Vec<LambdaVector> {
    let mut out = Vec::with_capacity(kmax);
    let mut v = LambdaVector {
        k: 1,
        v0: BigRational::one(),
        v1: BigRational::one(),
    };
    for _ in 0..kmax {
        let next = v.step();
        out.push(v);
        v = next;
    }
    out
}

/// Dominant eigenvalue of `A` by power iteration on exact rationals,
/// converted to `f64` once the ratio of successive sums stops moving.
pub fn dominant_eigenvalue() -> f64 {
    let mut v = LambdaVector {
        k: 1,
        v0: BigRational::one(),
        v1: BigRational::one(),
    };
    let mut prev = f64::NAN;
    for _ in 0..200 {
        let next = v.step();
        let ratio = (next.sum() / v.sum()).to_f64().unwrap_or(f64::NAN);
        if ratio == prev {
            return ratio;
        }
        prev = ratio;
        v = next;
    }
    prev
}

/// `c = λ_kmax / b^kmax` for `b = 1 + 1/√2`, and whether `λ_k <= c b^k` for
/// every `k <= kmax` (with relative slack `1e-12` for rounding).
pub fn lambda_growth_check(kmax: usize) -> (f64, bool) {
    let b = 1.0 + core::f64::consts::FRAC_1_SQRT_2;
    let sums: Vec<f64> = lambda_sequence(kmax)
        .iter()
        .map(|l| l.sum().to_f64().unwrap_or(f64::INFINITY))
        .collect();
    let c = sums[kmax - 1] / libm::pow(b, kmax as f64);
    let ok = sums
        .iter()
        .enumerate()
        .all(|(i, &l)| l <= c * libm::pow(b, (i + 1) as f64) * (1.0 + 1e-12));
    (c, ok)
}

/// An exact sum and the closed-form bound it is compared with.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSum {
    pub sum: BigInt,
    pub bound: BigRational,
}

impl ClosedSum {
    pub fn within_bound(&self) -> bool {
        BigRational::from_integer(self.sum.clone()) <= self.bound
    }

    pub fn attains_bound(&self) -> bool {
        BigRational::from_integer(self.sum.clone()) == self.bound
    }
}

fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    BigInt::from(acc)
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// `Σ_{l=0}^{r} C(k-1, l) 2^(r+1-l)` against `2^(r+1) (3/2)^(k-1)`.
pub fn scope2_closed_sum(k: usize, r: usize) -> Result<ClosedSum> {
    if k == 0 || r > k - 1 {
        return Err(invalid("requires k >= 1 and 0 <= r <= k - 1"));
    }
    let sum = (0..=r).map(|l| binomial(k - 1, l) * pow2(r + 1 - l)).sum();
    let bound = BigRational::from_integer(pow2(r + 1)) * BigRational::new(BigInt::from(3), BigInt::from(2)).pow((k - 1) as i32);
    Ok(ClosedSum { sum, bound })
}

fn compositions(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut impl FnMut(&[usize])) {
    if cur.len() + 1 == parts {
        cur.push(total);
        out(cur);
        cur.pop();
        return;
    }
    for x in 0..=total {
        cur.push(x);
        compositions(total - x, parts, cur, out);
        cur.pop();
    }
}

/// Sum over compositions `(x_1..x_m)` of `k-1` with `Σ(i-1)x_i <= r` of
/// `multinomial(k-1; x) · 2^(r+1-Σ(i-1)x_i)`, against
/// `2^(r+1) 2^(k-1) ((2^m - 1)/2^m)^(k-1)`.
pub fn scopem_multinomial_sum(k: usize, m: usize, r: usize) -> Result<ClosedSum> {
    if k == 0 || m == 0 || r > (m - 1) * (k - 1) {
        return Err(invalid("requires k >= 1, m >= 1 and 0 <= r <= (m-1)(k-1)"));
    }
    let factorial = |n: usize| (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let top = factorial(k - 1);
    let mut sum = BigInt::zero();
    compositions(k - 1, m, &mut Vec::with_capacity(m), &mut |x| {
        let weight: usize = x.iter().enumerate().map(|(i, &xi)| i * xi).sum();
        if weight <= r {
            let denom = x.iter().fold(BigInt::one(), |acc, &xi| acc * factorial(xi));
            sum += &top / denom * pow2(r + 1 - weight);
        }
    });
    let two_m = pow2(m);
    let ratio = BigRational::new(&two_m - 1, two_m);
    let bound = BigRational::from_integer(pow2(r + 1 + k - 1)) * ratio.pow((k - 1) as i32);
    Ok(ClosedSum { sum, bound })
}

/// Observed versus claimed number of colorings of `R_{a,d}` whose least
/// number of `2d` jumps in a monochromatic scope-2 progression is `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCount {
    pub l: usize,
    pub observed: u64,
    /// `C(k-1, l) · 2^(r+1-l)`.
    pub claimed: BigInt,
}

/// Per-level counts for scope-2 semi-progressions with first term `a` and
/// difference `d`, over the colorings of `R_{a,d}` alone.
pub fn scope2_level_counts(n: usize, k: usize, a: usize, d: usize) -> Result<Vec<LevelCount>> {
    check_budget(n, ENUMERATION_LIMIT)?;
    let kind = ProgressionKind::Semi(2);
    let rset = build_r_set(n, kind, k, a, d)?;
    if rset.s > CLOSURE_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "R-set size",
            limit: CLOSURE_LIMIT as u64,
            requested: rset.s as u64,
        });
    }
    // Progressions as (mask over R-indices, number of 2d jumps).
    let index = |x: usize| (x - a) / d;
    let mut progs: Vec<(u32, usize)> = Vec::new();
    visit_progressions(n, kind, k, a, d, |terms| {
        let mask = terms.iter().fold(0u32, |m, &x| m | (1 << index(x)));
        let doubles = terms.windows(2).filter(|w| w[1] - w[0] == 2 * d).count();
        progs.push((mask, doubles));
        ControlFlow::Continue(())
    })?;
    let mut observed = alloc::vec![0u64; k];
    for x in 0u32..(1 << rset.s) {
        let least = progs
            .iter()
            .filter(|(m, _)| {
                let y = x & m;
                y == 0 || y == *m
            })
            .map(|&(_, l)| l)
            .min();
        if let Some(l) = least {
            observed[l] += 1;
        }
    }
    let r = rset.t;
    Ok((0..=r.min(k - 1))
        .map(|l| LevelCount {
            l,
            observed: observed[l],
            claimed: binomial(k - 1, l) * pow2(r + 1 - l),
        })
        .collect())
}

/// The relation `Ω_k = 2^(N-s) Ψ_k` and the claimed `Ω_k = 2^(N-k) λ_k` for
/// quasi-progressions of diameter 1 with `a = d = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaRelation {
    pub n: usize,
    pub k: usize,
    /// `T_{1,1,k}`.
    pub omega: u64,
    pub s: usize,
    /// `Ω_k / 2^(N-s)`.
    pub psi: BigRational,
    pub lambda: BigRational,
    /// `2^(N-k) λ_k`.
    pub predicted: BigRational,
}

impl OmegaRelation {
    /// `Ψ_k` is an integer, as the closure property implies.
    pub fn psi_is_integer(&self) -> bool {
        self.psi.is_integer()
    }

    pub fn omega_within_prediction(&self) -> bool {
        BigRational::from_integer(BigInt::from(self.omega)) <= self.predicted
    }
}

pub fn omega_relation(n: usize, k: usize) -> Result<OmegaRelation> {
    if k < 2 || n < k {
        return Err(invalid("requires 2 <= k <= N"));
    }
    let kind = ProgressionKind::Quasi(1);
    let omega = count_t(n, kind, k, 1, 1)?;
    let s = build_r_set(n, kind, k, 1, 1)?.s;
    let lambda = lambda_vector(k)?.sum();
    Ok(OmegaRelation {
        n,
        k,
        omega,
        s,
        psi: BigRational::new(BigInt::from(omega), pow2(n - s)),
        predicted: BigRational::from_integer(pow2(n - k)) * &lambda,
        lambda,
    })
}

/// A Monte-Carlo proportion with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub samples: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl Proportion {
    pub fn from_hits(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Proportion {
            samples,
            estimate: p,
            std_error: libm::sqrt(p * (1.0 - p) / samples as f64),
        }
    }
}

/// Fraction of uniformly random colorings of `[1, n]` with no monochromatic
/// `k`-term progression of `kind`.
pub fn mc_good_fraction(n: usize, kind: ProgressionKind, k: usize, samples: u64, seed: u64) -> Result<Proportion> {
    mc_good_fraction_with(n, kind, k, samples, seed, &Sequential)
}

pub fn mc_good_fraction_with(
    n: usize,
    kind: ProgressionKind,
    k: usize,
    samples: u64,
    seed: u64,
    runner: &dyn ChunkRunner,
) -> Result<Proportion> {
    kind.validate()?;
    if samples == 0 || n == 0 || k == 0 {
        return Err(invalid("samples, n and k must be at least 1"));
    }
    let chunks = samples.div_ceil(CHUNK_SAMPLES) as usize;
    let job = |c: usize| {
        let (lo, hi) = chunk_bounds(samples, c);
        let mut rng = Rng::new(seed, c as u64);
        let mut checker = MonoChecker::new(kind, k, n);
        let mut colors = alloc::vec![0u8; n + 1];
        (lo..hi)
            .map(|_| {
                for c in colors[1..].iter_mut() {
                    *c = (rng.next_u64() >> 63) as u8;
                }
                let mut good = true;
                let mut placed = 0;
                for (pos, &c) in colors.iter().enumerate().skip(1) {
                    if checker.closes_progression(pos, c) {
                        good = false;
                        break;
                    }
                    checker.set(pos, c);
                    placed = pos;
                }
                for (pos, &c) in colors.iter().enumerate().take(placed + 1).skip(1) {
                    checker.unset(pos, c);
                }
                if good {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    };
    let hits: f64 = runner.run(chunks, &job).iter().flatten().sum();
    Ok(Proportion::from_hits(hits as u64, samples))
}
