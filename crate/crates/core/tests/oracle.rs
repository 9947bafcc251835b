//! Exhaustive search checked against a direct enumeration of all 2^N
//! colorings with an independent progression test.

use ramsey_core::progressions::Coloring;
use ramsey_core::search::{exists_good_coloring, ramsey_number, verify_certificate, SearchConfig};
use ramsey_core::ProgressionKind::{self, *};

fn allowed_jumps(kind: ProgressionKind, d: usize) -> Vec<usize> {
    match kind {
        Arithmetic => vec![d],
        Semi(m) => (1..=m).map(|i| i * d).collect(),
        Quasi(n) => (d..=d + n).collect(),
    }
}

fn extends(colors: &[u8], jumps: &[usize], pos: usize, left: usize) -> bool {
    if left == 0 {
        return true;
    }
    jumps.iter().any(|&j| {
        let next = pos + j;
        next <= colors.len() && colors[next - 1] == colors[pos - 1] && extends(colors, jumps, next, left - 1)
    })
}

fn has_mono(colors: &[u8], kind: ProgressionKind, k: usize) -> bool {
    let n = colors.len();
    (1..=n).any(|a| (1..n.max(2)).any(|d| extends(colors, &allowed_jumps(kind, d), a, k - 1)))
}

/// Colors of position 1..=n read from the high bit down, so increasing
/// `bits` walks colorings in lexicographic order.
fn coloring(n: usize, bits: u64) -> Vec<u8> {
    (0..n).map(|i| (bits >> (n - 1 - i) & 1) as u8).collect()
}

fn least_good(n: usize, kind: ProgressionKind, k: usize) -> Option<Vec<u8>> {
    (0..1u64 << (n - 1)).map(|b| coloring(n, b)).find(|c| !has_mono(c, kind, k))
}

fn oracle_value(kind: ProgressionKind, k: usize) -> usize {
    (k..).find(|&n| least_good(n, kind, k).is_none()).unwrap()
}

const CASES: [(ProgressionKind, usize); 10] = [
    (Arithmetic, 3),
    (Semi(2), 3),
    (Semi(3), 3),
    (Semi(2), 4),
    (Semi(3), 4),
    (Semi(3), 5),
    (Quasi(1), 3),
    (Quasi(2), 3),
    (Quasi(1), 4),
    (Quasi(2), 4),
];

#[test]
fn values_match_enumeration() {
    for (kind, k) in CASES {
        let expected = oracle_value(kind, k);
        let r = ramsey_number(&SearchConfig::new(kind, k, 40)).unwrap();
        assert_eq!(r.value, expected, "{kind} k={k}");
        assert!(verify_certificate(&r.witness));
        assert_eq!(r.witness.n, expected - 1);
    }
}

#[test]
fn witness_is_least_good_coloring() {
    for (kind, k) in CASES {
        let r = ramsey_number(&SearchConfig::new(kind, k, 40)).unwrap();
        let least = least_good(r.value - 1, kind, k).unwrap();
        assert_eq!(r.witness.coloring.colors(), &least[..], "{kind} k={k}");
    }
}

#[test]
fn existence_matches_enumeration() {
    for kind in [Arithmetic, Semi(2), Quasi(1)] {
        for n in 3..=14 {
            let found = exists_good_coloring(n, kind, 3).unwrap();
            assert_eq!(found.is_some(), least_good(n, kind, 3).is_some(), "{kind} n={n}");
            if let Some(c) = found {
                assert!(!has_mono(c.colors(), kind, 3));
            }
        }
    }
}

#[test]
fn oracle_agrees_with_library_scan() {
    for kind in [Arithmetic, Semi(2), Semi(3), Quasi(1), Quasi(2)] {
        for bits in 0..1u64 << 11 {
            let c = coloring(11, bits);
            let lib = ramsey_core::progressions::find_monochromatic(&Coloring::new(c.clone()).unwrap(), kind, 4);
            assert_eq!(lib.is_some(), has_mono(&c, kind, 4), "{kind} {bits:b}");
        }
    }
}

#[test]
fn known_values() {
    let w = |kind, k| ramsey_number(&SearchConfig::new(kind, k, 100)).unwrap().value;
    assert_eq!(w(Arithmetic, 4), 35);
    assert_eq!(w(Semi(2), 5), 33);
    assert_eq!(w(Quasi(1), 5), 33);
}
