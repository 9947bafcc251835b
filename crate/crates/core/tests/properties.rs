use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use ramsey_core::concentration::{chromatic_number, clique_number, lis_length, RandomGraph, Rng};
use ramsey_core::counting::{
    build_r_set, closure_property_check, count_s, count_t, lambda_sequence, scope2_closed_sum, scopem_multinomial_sum, union_bound_check,
};
use ramsey_core::progressions::{enumerate_progressions, find_monochromatic, is_progression, visit_progressions};
use ramsey_core::{Coloring, ProgressionKind};

fn kind() -> impl Strategy<Value = ProgressionKind> {
    prop_oneof![
        Just(ProgressionKind::Arithmetic),
        (1usize..4).prop_map(ProgressionKind::Semi),
        (0usize..3).prop_map(ProgressionKind::Quasi),
    ]
}

fn coloring(max_n: usize) -> impl Strategy<Value = Coloring> {
    (1..=max_n)
        .prop_flat_map(|n| prop::collection::vec(0u8..2, n))
        .prop_map(|v| Coloring::new(v).unwrap())
}

fn brute_mono(c: &Coloring, kind: ProgressionKind, k: usize) -> bool {
    let n = c.len();
    (1..=n).any(|a| {
        (1..=n).any(|d| {
            let mut hit = false;
            let _ = visit_progressions(n, kind, k, a, d, |terms| {
                if terms.iter().all(|&x| c.color(x) == c.color(a)) {
                    hit = true;
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            hit
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scan_matches_enumeration(c in coloring(16), kind in kind(), k in 2usize..6) {
        let found = find_monochromatic(&c, kind, k);
        prop_assert_eq!(found.is_some(), brute_mono(&c, kind, k));
        if let Some(p) = found {
            prop_assert!(is_progression(p.terms(), kind));
            prop_assert!(p.terms().iter().all(|&x| c.color(x) == c.color(p.first())));
        }
    }

    #[test]
    fn degenerate_kinds_agree(c in coloring(20), k in 2usize..6) {
        let ap = find_monochromatic(&c, ProgressionKind::Arithmetic, k).is_some();
        prop_assert_eq!(ap, find_monochromatic(&c, ProgressionKind::Semi(1), k).is_some());
        prop_assert_eq!(ap, find_monochromatic(&c, ProgressionKind::Quasi(0), k).is_some());
    }

    #[test]
    fn wider_families_only_add_progressions(c in coloring(20), k in 2usize..6, m in 1usize..4) {
        let f = |kind| find_monochromatic(&c, kind, k).is_some();
        prop_assert!(!f(ProgressionKind::Semi(m)) || f(ProgressionKind::Semi(m + 1)));
        prop_assert!(!f(ProgressionKind::Quasi(m - 1)) || f(ProgressionKind::Quasi(m)));
        prop_assert!(!f(ProgressionKind::Arithmetic) || f(ProgressionKind::Semi(m)));
    }

    #[test]
    fn complement_preserves_monochromatic(c in coloring(16), kind in kind(), k in 2usize..5) {
        prop_assert_eq!(find_monochromatic(&c, kind, k).is_some(), find_monochromatic(&c.complement(), kind, k).is_some());
    }

    #[test]
    fn enumeration_invariants(n in 1usize..30, kind in kind(), k in 1usize..6, a in 1usize..10, d in 1usize..6) {
        if a > n {
            prop_assert!(enumerate_progressions(n, kind, k, a, d).is_err());
            return Ok(());
        }
        let progs = enumerate_progressions(n, kind, k, a, d).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for p in &progs {
            prop_assert_eq!(p.len(), k);
            prop_assert_eq!(p.first(), a);
            prop_assert!(p.last() <= n);
            prop_assert!(p.terms().windows(2).all(|w| kind.jumps(d).contains(w[1] - w[0])));
            prop_assert!(seen.insert(p.terms().to_vec()));
        }
        if a + (k - 1) * d > n {
            prop_assert!(progs.is_empty());
        }
    }

    #[test]
    fn union_chain(n in 3usize..11, k in 3usize..5, kind in kind()) {
        let r = union_bound_check(n, kind, k).unwrap();
        prop_assert!(r.chain_holds());
        prop_assert_eq!(r.s, count_s(n, kind, k).unwrap());
        for (&(a, d), &t) in &r.t {
            prop_assert_eq!(t, count_t(n, kind, k, a, d).unwrap());
        }
    }

    #[test]
    fn closure_holds(n in 3usize..13, k in 2usize..5, kind in kind(), a in 1usize..5, d in 1usize..4) {
        prop_assume!(a + (k - 1) * d <= n);
        prop_assert!(closure_property_check(n, kind, k, a, d).unwrap());
        let r = build_r_set(n, kind, k, a, d).unwrap();
        prop_assert!(r.elements.iter().all(|&x| (1..=n).contains(&x)));
        prop_assert!(r.s >= k);
    }

    #[test]
    fn scope2_sums(k in 1usize..21, r in 0usize..21) {
        prop_assume!(r < k);
        let s = scope2_closed_sum(k, r).unwrap();
        prop_assert!(s.within_bound());
        prop_assert_eq!(s.attains_bound(), r == k - 1);
        prop_assert_eq!(scopem_multinomial_sum(k, 2, r).unwrap().sum, s.sum);
    }

    #[test]
    fn scopem_sums(k in 1usize..11, m in 1usize..5, r in 0usize..31) {
        prop_assume!(r <= (m - 1) * (k - 1));
        prop_assert!(scopem_multinomial_sum(k, m, r).unwrap().within_bound());
    }

    #[test]
    fn rng_is_deterministic(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = Rng::new(seed, stream);
        let mut b = Rng::new(seed, stream);
        for _ in 0..32 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn lis_matches_subsets(x in prop::collection::vec(0u8..6, 0..=12)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let best = (0u32..1 << x.len())
            .filter(|s| {
                let picked: Vec<f64> = (0..x.len()).filter(|i| s >> i & 1 == 1).map(|i| x[i]).collect();
                picked.windows(2).all(|w| w[0] < w[1])
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0);
        prop_assert_eq!(lis_length(&x), best);
    }

    #[test]
    fn graph_solvers_match_brute_force(n in 1usize..=8, edges in any::<u32>(), extra in any::<u32>()) {
        let bits = (edges as u64) << 32 | extra as u64;
        let mut pairs = Vec::new();
        let mut i = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits >> i & 1 == 1 {
                    pairs.push((u, v));
                }
                i += 1;
            }
        }
        let g = RandomGraph::from_edges(n, &pairs).unwrap();
        let clique = (1u32..1 << n)
            .filter(|s| (0..n).all(|u| (0..n).all(|v| u == v || s >> u & 1 == 0 || s >> v & 1 == 0 || g.adjacent(u, v))))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap();
        prop_assert_eq!(clique_number(&g).unwrap(), clique);
        prop_assert_eq!(chromatic_number(&g).unwrap(), brute_chromatic(&g));
    }
}

/// Fewest blocks over all set partitions into independent sets.
fn brute_chromatic(g: &RandomGraph) -> usize {
    fn go(g: &RandomGraph, v: usize, blocks: &mut Vec<Vec<usize>>, best: &mut usize) {
        if v == g.n() {
            *best = (*best).min(blocks.len());
            return;
        }
        for b in 0..blocks.len() {
            if blocks[b].iter().all(|&u| !g.adjacent(u, v)) {
                blocks[b].push(v);
                go(g, v + 1, blocks, best);
                blocks[b].pop();
            }
        }
        blocks.push(vec![v]);
        go(g, v + 1, blocks, best);
        blocks.pop();
    }
    let mut best = usize::MAX;
    go(g, 0, &mut Vec::new(), &mut best);
    best
}

#[test]
fn lambda_recurrence_is_exact() {
    let seq = lambda_sequence(64);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    for w in seq.windows(2) {
        assert_eq!(w[1].v0, &w[0].v0 + &w[0].v1 * &half);
        assert_eq!(w[1].v1, &w[0].v0 + &w[0].v1);
    }
}
