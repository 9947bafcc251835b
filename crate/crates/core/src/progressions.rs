//! Progression families over `[1, n]` and the primitives every other module
//! builds on: membership tests, enumeration by first term and difference,
//! and the scan for monochromatic progressions in a 2-coloring.
//!
//! All three families share one shape: for a witness difference `d >= 1`,
//! each consecutive jump must lie in an arithmetic set of allowed jumps
//! ([`JumpSet`]):
//!
//! | kind            | allowed jumps            |
//! |-----------------|--------------------------|
//! | `Arithmetic`    | `{d}`                    |
//! | `Semi(m)`       | `{d, 2d, .., md}`        |
//! | `Quasi(n)`      | `{d, d+1, .., d+n}`      |
//!
//! `Semi(1)` and `Quasi(0)` therefore describe exactly the arithmetic family.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};

/// A 2-coloring of `[1, n]`. `colors()[i]` is the color of the integer `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    colors: Vec<u8>,
}

impl Coloring {
    pub fn new(colors: Vec<u8>) -> Result<Self> {
        if colors.is_empty() {
            return Err(invalid("a coloring must cover at least one integer"));
        }
        if let Some(pos) = colors.iter().position(|&c| c > 1) {
            return Err(invalid(alloc::format!("color of {} is {}, expected 0 or 1", pos + 1, colors[pos])));
        }
        Ok(Coloring { colors })
    }

    /// The all-0 coloring of `[1, n]`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "a coloring must cover at least one integer");
        Coloring { colors: alloc::vec![0; n] }
    }

    /// Builds a coloring from the low `n` bits of `bits`; bit `i` colors `i + 1`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n > 0 && n <= 64, "from_bits supports 1 <= n <= 64");
        Coloring {
            colors: (0..n).map(|i| ((bits >> i) & 1) as u8).collect(),
        }
    }

    pub(crate) fn from_raw(colors: Vec<u8>) -> Self {
        debug_assert!(!colors.is_empty() && colors.iter().all(|&c| c <= 1));
        Coloring { colors }
    }

    /// The size `n` of the colored interval.
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Color of the integer `position` (1-based).
    pub fn color(&self, position: usize) -> u8 {
        self.colors[position - 1]
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Swaps the two colors everywhere.
    pub fn complement(&self) -> Coloring {
        Coloring {
            colors: self.colors.iter().map(|c| c ^ 1).collect(),
        }
    }

    /// Restriction to `[1, n]`.
    pub fn truncated(&self, n: usize) -> Result<Coloring> {
        if n == 0 || n > self.len() {
            return Err(invalid(alloc::format!(
                "cannot restrict a coloring of [1,{}] to [1,{n}]",
                self.len()
            )));
        }
        Ok(Coloring {
            colors: self.colors[..n].to_vec(),
        })
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.colors {
            f.write_str(if c == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let colors = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(alloc::format!("unexpected character {other:?} in coloring"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Coloring::new(colors)
    }
}

/// Which progression family is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProgressionKind {
    Arithmetic,
    /// Semi-progressions of the given scope `m >= 1`.
    Semi(usize),
    /// Quasi-progressions of the given diameter `n >= 0`.
    Quasi(usize),
}

impl ProgressionKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            ProgressionKind::Semi(0) => Err(invalid("semi-progression scope must be at least 1")),
            kind => Ok(kind),
        }
    }

    /// Builds a kind from its command-line spelling (`ap`, `semi`, `quasi`)
    /// and parameter. The parameter is ignored for `ap`.
    pub fn from_name(name: &str, param: usize) -> Result<Self> {
        let kind = match name {
            "ap" | "arithmetic" => ProgressionKind::Arithmetic,
            "semi" | "sp" => ProgressionKind::Semi(param),
            "quasi" | "qp" => ProgressionKind::Quasi(param),
            other => return Err(Error::Parse(alloc::format!("unknown progression kind {other:?}"))),
        };
        kind.validate()
    }

    /// Short family name: `ap`, `semi`, or `quasi`.
    pub fn name(self) -> &'static str {
        match self {
            ProgressionKind::Arithmetic => "ap",
            ProgressionKind::Semi(_) => "semi",
            ProgressionKind::Quasi(_) => "quasi",
        }
    }

    /// Scope or diameter; 0 for arithmetic progressions.
    pub fn param(self) -> usize {
        match self {
            ProgressionKind::Arithmetic => 0,
            ProgressionKind::Semi(m) => m,
            ProgressionKind::Quasi(n) => n,
        }
    }

    /// True for the kinds whose jump set is always the single jump `{d}`.
    pub fn is_arithmetic_family(self) -> bool {
        matches!(
            self,
            ProgressionKind::Arithmetic | ProgressionKind::Semi(1) | ProgressionKind::Quasi(0)
        )
    }

    /// The allowed jumps for witness difference `d`.
    pub fn jumps(self, d: usize) -> JumpSet {
        match self {
            ProgressionKind::Arithmetic => JumpSet {
                first: d,
                step: d,
                count: 1,
            },
            ProgressionKind::Semi(m) => JumpSet {
                first: d,
                step: d,
                count: m,
            },
            ProgressionKind::Quasi(n) => JumpSet {
                first: d,
                step: 1,
                count: n + 1,
            },
        }
    }
}

impl fmt::Display for ProgressionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgressionKind::Arithmetic => f.write_str("ap"),
            ProgressionKind::Semi(m) => write!(f, "semi({m})"),
            ProgressionKind::Quasi(n) => write!(f, "quasi({n})"),
        }
    }
}

/// The jumps `first, first + step, .., first + (count-1)·step`, ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JumpSet {
    pub first: usize,
    pub step: usize,
    pub count: usize,
}

impl JumpSet {
    pub fn min(&self) -> usize {
        self.first
    }

    pub fn max(&self) -> usize {
        self.first + (self.count - 1) * self.step
    }

    pub fn contains(&self, jump: usize) -> bool {
        jump >= self.first && jump <= self.max() && (jump - self.first) % self.step == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + Clone {
        let JumpSet { first, step, count } = *self;
        (0..count).map(move |i| first + i * step)
    }
}

/// A verified progression: strictly increasing terms plus the least
/// witness difference.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Progression {
    terms: Vec<usize>,
    kind: ProgressionKind,
    difference: Option<usize>,
}

impl Progression {
    /// Checks `terms` against `kind` and records the least feasible
    /// difference (absent for a single term).
    pub fn verified(terms: Vec<usize>, kind: ProgressionKind) -> Result<Self> {
        kind.validate()?;
        match terms.len() {
            0 => Err(invalid("a progression needs at least one term")),
            1 if terms[0] >= 1 => Ok(Progression {
                terms,
                kind,
                difference: None,
            }),
            1 => Err(invalid("terms must be positive integers")),
            _ => {
                let ds = feasible_differences(&terms, kind)?;
                match ds.first() {
                    Some(&d) => Ok(Progression {
                        terms,
                        kind,
                        difference: Some(d),
                    }),
                    None => Err(invalid(alloc::format!("{} is not a {kind} progression", join_terms(&terms)))),
                }
            }
        }
    }

    fn with_difference(terms: Vec<usize>, kind: ProgressionKind, d: usize) -> Self {
        Progression {
            terms,
            kind,
            difference: Some(d),
        }
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn kind(&self) -> ProgressionKind {
        self.kind
    }

    pub fn difference(&self) -> Option<usize> {
        self.difference
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn first(&self) -> usize {
        self.terms[0]
    }

    pub fn last(&self) -> usize {
        self.terms[self.terms.len() - 1]
    }

    /// Bit mask of the terms (bit `x - 1` for term `x`); terms must be <= 64.
    pub fn mask(&self) -> u64 {
        terms_mask(&self.terms)
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_terms(&self.terms))
    }
}

pub(crate) fn terms_mask(terms: &[usize]) -> u64 {
    terms.iter().fold(0u64, |m, &x| m | (1u64 << (x - 1)))
}

/// Formats terms as a comma-separated list.
pub fn join_terms(terms: &[usize]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&alloc::format!("{t}"));
    }
    out
}

/// Parses a comma-separated list of positive integers.
pub fn parse_terms(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            match tok.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(Error::Parse(alloc::format!("{tok:?} is not a positive integer"))),
            }
        })
        .collect()
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every `d >= 1` for which all consecutive jumps of `terms` lie in the
/// kind's jump set, in increasing order.
pub fn feasible_differences(terms: &[usize], kind: ProgressionKind) -> Result<Vec<usize>> {
    kind.validate()?;
    if terms.len() < 2 {
        return Err(invalid("need at least two terms to determine a difference"));
    }
    if terms[0] == 0 {
        return Err(invalid("terms must be positive integers"));
    }
    if terms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("terms must be strictly increasing"));
    }
    let jumps = || terms.windows(2).map(|w| w[1] - w[0]);
    let min_jump = jumps().min().unwrap_or(0);
    let max_jump = jumps().max().unwrap_or(0);

    let ds = match kind {
        ProgressionKind::Arithmetic => {
            if min_jump == max_jump {
                alloc::vec![min_jump]
            } else {
                Vec::new()
            }
        }
        ProgressionKind::Semi(m) => {
            // d divides every jump and the largest jump is at most m·d.
            let g = jumps().fold(0, gcd);
            let lo = max_jump.div_ceil(m);
            (1..=g).filter(|d| g % d == 0 && *d >= lo).collect()
        }
        ProgressionKind::Quasi(n) => {
            let lo = max_jump.saturating_sub(n).max(1);
            (lo..=min_jump).collect()
        }
    };
    debug_assert!(ds.iter().all(|&d| jumps().all(|j| kind.jumps(d).contains(j))));
    Ok(ds)
}

/// Whether `terms` forms a progression of the given kind. One term is a
/// progression of every kind; empty or non-increasing input is not.
pub fn is_progression(terms: &[usize], kind: ProgressionKind) -> bool {
    match terms.len() {
        0 => false,
        1 => terms[0] >= 1 && kind.validate().is_ok(),
        _ => feasible_differences(terms, kind).map(|ds| !ds.is_empty()).unwrap_or(false),
    }
}

fn check_enumeration_args(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize) -> Result<()> {
    kind.validate()?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if a == 0 || a > n {
        return Err(invalid(alloc::format!("first term {a} outside [1,{n}]")));
    }
    if d == 0 {
        return Err(invalid("difference d must be at least 1"));
    }
    Ok(())
}

/// Calls `visit` on the terms of every `k`-term progression of `kind` with
/// first term `a`, witness difference `d`, and all terms `<= n`, in
/// lexicographic order of the jump pattern. Stops early on `Break`.
pub fn visit_progressions<F>(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    check_enumeration_args(n, kind, k, a, d)?;
    if a + (k - 1) * d > n {
        return Ok(());
    }
    let jumps = kind.jumps(d);
    let mut terms = Vec::with_capacity(k);
    terms.push(a);
    let _ = visit_rec(n, jumps, k, &mut terms, &mut visit);
    Ok(())
}

fn visit_rec<F>(n: usize, jumps: JumpSet, k: usize, terms: &mut Vec<usize>, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if terms.len() == k {
        return visit(terms);
    }
    let last = terms[terms.len() - 1];
    let remaining = k - terms.len();
    for j in jumps.iter() {
        // Every later jump is at least jumps.min().
        if last + j + (remaining - 1) * jumps.min() > n {
            break;
        }
        terms.push(last + j);
        let flow = visit_rec(n, jumps, k, terms, visit);
        terms.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// All `k`-term progressions with first term `a` and witness difference `d`
/// inside `[1, n]`, ordered by jump pattern.
pub fn enumerate_progressions(n: usize, kind: ProgressionKind, k: usize, a: usize, d: usize) -> Result<Vec<Progression>> {
    let mut out = Vec::new();
    visit_progressions(n, kind, k, a, d, |terms| {
        out.push(Progression::with_difference(terms.to_vec(), kind, d));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Full scan for a monochromatic `k`-term progression of `kind` in `c`.
///
/// Candidates are tried by first term, then difference, then jump pattern,
/// so the result is the first such progression in that order.
pub fn find_monochromatic(c: &Coloring, kind: ProgressionKind, k: usize) -> Option<Progression> {
    if k == 0 || kind.validate().is_err() {
        return None;
    }
    let n = c.len();
    let mut terms = Vec::with_capacity(k);
    for a in 1..=n {
        if k == 1 {
            return Some(Progression {
                terms: alloc::vec![a],
                kind,
                difference: None,
            });
        }
        let col = c.color(a);
        for d in 1.. {
            if a + (k - 1) * d > n {
                break;
            }
            terms.clear();
            terms.push(a);
            if extend_forward(c, col, kind.jumps(d), k, &mut terms) {
                return Some(Progression::with_difference(terms, kind, d));
            }
        }
    }
    None
}

fn extend_forward(c: &Coloring, col: u8, jumps: JumpSet, k: usize, terms: &mut Vec<usize>) -> bool {
    if terms.len() == k {
        return true;
    }
    let last = terms[terms.len() - 1];
    let remaining = k - terms.len();
    for j in jumps.iter() {
        let next = last + j;
        if next + (remaining - 1) * jumps.min() > c.len() {
            break;
        }
        if c.color(next) != col {
            continue;
        }
        terms.push(next);
        if extend_forward(c, col, jumps, k, terms) {
            return true;
        }
        terms.pop();
    }
    false
}

/// Like [`find_monochromatic`] but restricted to progressions whose last
/// term is `last`. Only positions `<= last` are inspected.
pub fn find_monochromatic_ending_at(c: &Coloring, kind: ProgressionKind, k: usize, last: usize) -> Option<Progression> {
    if k == 0 || last == 0 || last > c.len() || kind.validate().is_err() {
        return None;
    }
    if k == 1 {
        return Some(Progression {
            terms: alloc::vec![last],
            kind,
            difference: None,
        });
    }
    let col = c.color(last);
    let mut rev = Vec::with_capacity(k);
    for d in 1.. {
        if (k - 1) * d >= last {
            break;
        }
        rev.clear();
        rev.push(last);
        if extend_backward(c, col, kind.jumps(d), k, &mut rev) {
            rev.reverse();
            return Some(Progression::with_difference(rev, kind, d));
        }
    }
    None
}

fn extend_backward(c: &Coloring, col: u8, jumps: JumpSet, k: usize, rev: &mut Vec<usize>) -> bool {
    if rev.len() == k {
        return true;
    }
    let cur = rev[rev.len() - 1];
    let remaining = k - rev.len();
    for j in jumps.iter() {
        if cur <= j + (remaining - 1) * jumps.min() {
            break;
        }
        let prev = cur - j;
        if c.color(prev) != col {
            continue;
        }
        rev.push(prev);
        if extend_backward(c, col, jumps, k, rev) {
            return true;
        }
        rev.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use ProgressionKind::*;

    fn col(s: &str) -> Coloring {
        s.parse().unwrap()
    }

    #[test]
    fn feasible_differences_examples() {
        assert_eq!(feasible_differences(&[1, 2, 3], Arithmetic).unwrap(), vec![1]);
        assert_eq!(feasible_differences(&[1, 2, 3, 5, 6, 7], Semi(2)).unwrap(), vec![1]);
        assert_eq!(feasible_differences(&[1, 2, 4], Quasi(1)).unwrap(), vec![1]);
        assert_eq!(feasible_differences(&[2, 6, 10], Semi(2)).unwrap(), vec![2, 4]);
        assert_eq!(feasible_differences(&[1, 5, 8], Quasi(2)).unwrap(), vec![2, 3]);
    }

    #[test]
    fn feasible_differences_rejects_bad_input() {
        assert!(feasible_differences(&[3], Arithmetic).is_err());
        assert!(feasible_differences(&[3, 2], Arithmetic).is_err());
        assert!(feasible_differences(&[5, 5, 5], Quasi(3)).is_err());
        assert!(feasible_differences(&[1, 2], Semi(0)).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(!is_progression(&[1, 2, 3, 5, 6, 7], Arithmetic));
        assert!(is_progression(&[1, 2, 3, 5, 6, 7], Semi(2)));
        for kind in [Arithmetic, Semi(3), Quasi(4)] {
            assert!(!is_progression(&[5, 5, 5], kind));
            assert!(is_progression(&[7], kind));
            assert!(is_progression(&[3, 11], kind));
            assert!(!is_progression(&[], kind));
        }
    }

    #[test]
    fn enumeration_examples() {
        let got: Vec<Vec<usize>> = enumerate_progressions(5, Quasi(1), 3, 1, 1)
            .unwrap()
            .into_iter()
            .map(|p| p.terms().to_vec())
            .collect();
        assert_eq!(got, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![1, 3, 5]]);

        let ap = enumerate_progressions(9, Arithmetic, 3, 1, 4).unwrap();
        assert_eq!(ap.len(), 1);
        assert_eq!(ap[0].terms(), &[1, 5, 9]);

        assert!(enumerate_progressions(5, Arithmetic, 3, 4, 1).unwrap().is_empty());
        assert!(enumerate_progressions(5, Arithmetic, 3, 6, 1).is_err());
        assert!(enumerate_progressions(5, Arithmetic, 3, 1, 0).is_err());
    }

    #[test]
    fn monochromatic_examples() {
        let p = find_monochromatic(&Coloring::zeros(9), Arithmetic, 3).unwrap();
        assert_eq!(p.terms(), &[1, 2, 3]);
        assert!(find_monochromatic(&col("00110011"), Arithmetic, 3).is_none());
        let p = find_monochromatic(&col("01010101"), Arithmetic, 3).unwrap();
        assert!(p.terms().iter().all(|t| [1, 3, 5, 7].contains(t)));
    }

    #[test]
    fn ending_at_matches_last_term() {
        let c = col("0110100110010110");
        for kind in [Arithmetic, Semi(2), Quasi(1)] {
            for last in 1..=c.len() {
                if let Some(p) = find_monochromatic_ending_at(&c, kind, 3, last) {
                    assert_eq!(p.last(), last);
                    assert!(is_progression(p.terms(), kind));
                    assert!(p.terms().iter().all(|&t| c.color(t) == c.color(last)));
                }
            }
        }
    }

    #[test]
    fn coloring_text_round_trip() {
        let c = col("0011010");
        assert_eq!(alloc::format!("{c}"), "0011010");
        assert!("0120".parse::<Coloring>().is_err());
        assert!("".parse::<Coloring>().is_err());
        assert_eq!(parse_terms("1, 3,5").unwrap(), vec![1, 3, 5]);
        assert!(parse_terms("1,0").is_err());
    }
}
