mod common;

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use sps_core::congruence::CongruenceError;
use sps_core::fixtures;
use sps_core::{
    all_congruences_oracle, congruence_lattice, filter_candidate, is_prime_ideal, lattice_isomorphic,
    prime_ideal_congruence, principal_congruence, principal_ideal, DualAtoms, FiniteLattice, GridSpec, Partition,
};

fn small_lattices() -> Vec<(String, FiniteLattice)> {
    let mut out: Vec<(String, FiniteLattice)> = common::corpus()
        .into_iter()
        .filter(|(_, d)| d.len() <= 8)
        .map(|(n, d)| (n, d.into_lattice()))
        .collect();
    out.push(("B_3".into(), fixtures::boolean(3)));
    out
}

/// Every partition of 0..n that is compatible with meets and joins,
/// checked directly against the substitution property.
fn brute_congruences(l: &FiniteLattice) -> BTreeSet<Partition> {
    let n = l.len();
    let mut found = BTreeSet::new();
    let mut labels = vec![0usize; n];
    loop {
        let compatible = (0..n).all(|a| {
            (0..n).all(|b| {
                labels[a] != labels[b]
                    || (0..n).all(|c| {
                        labels[l.meet(a, c)] == labels[l.meet(b, c)] && labels[l.join(a, c)] == labels[l.join(b, c)]
                    })
            })
        });
        if compatible {
            found.insert(Partition::from_labels(&labels));
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return found;
            }
            i -= 1;
            let cap = labels[..i].iter().max().copied().unwrap_or(0) + 1;
            if labels[i] < cap {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

#[test]
fn congruence_lattice_matches_brute_force() {
    for (name, l) in small_lattices() {
        let fast: BTreeSet<Partition> = congruence_lattice(&l).members().iter().cloned().collect();
        let brute = brute_congruences(&l);
        assert_eq!(fast, brute, "{name}");
        let oracle: BTreeSet<Partition> = all_congruences_oracle(&l).unwrap().members().iter().cloned().collect();
        assert_eq!(oracle, brute, "{name}");
    }
}

#[test]
fn principal_congruence_is_least() {
    for (name, l) in small_lattices() {
        let all = brute_congruences(&l);
        for a in 0..l.len() {
            for b in 0..l.len() {
                let expect = all
                    .iter()
                    .filter(|p| p.same(a, b))
                    .fold(Partition::total(l.len()), |acc, p| acc.meet(p));
                assert_eq!(principal_congruence(&l, a, b), expect, "{name} con({a},{b})");
            }
        }
    }
}

/// Down-sets of the join-irreducible congruences, counted over all subsets.
fn down_set_count_by_subsets(ji: &sps_core::JiPoset) -> usize {
    let k = ji.len();
    assert!(k <= 14);
    (0u32..1 << k)
        .filter(|&mask| (0..k).all(|j| mask & (1 << j) == 0 || (0..k).all(|i| !ji.lt(i, j) || mask & (1 << i) != 0)))
        .count()
}

#[test]
fn distributive_structure() {
    for (name, d) in common::corpus() {
        let con = congruence_lattice(&d);
        assert!(con.is_distributive(), "{name}");
        let ji = con.ji_poset();
        if ji.len() <= 14 {
            assert_eq!(down_set_count_by_subsets(&ji), con.len(), "{name}");
        }
        assert_eq!(ji.down_set_count(), con.len(), "{name}");
        assert_eq!(con.dual_atoms().len(), ji.maximal().len(), "{name}");
        assert_eq!(con.dual_atom_count(), con.dual_atoms().len(), "{name}");
        for p in con.members() {
            assert!(p.is_congruence(&d), "{name}");
        }
    }
}

#[test]
fn grids_have_boolean_congruence_lattices() {
    for p in 2..=4 {
        for q in 2..=4 {
            let g = sps_core::grid(GridSpec::new(p, q)).unwrap();
            let con = congruence_lattice(&g);
            assert_eq!(con.ji_poset().len(), g.join_irreducibles().len());
            assert!(lattice_isomorphic(con.order(), &fixtures::boolean((p + q - 2) as u32)));
        }
    }
}

#[test]
fn principal_congruence_is_monotone() {
    let mut rng = StdRng::seed_from_u64(5);
    for (name, d) in common::corpus() {
        let n = d.len();
        for _ in 0..200 {
            let mut v: Vec<usize> = (0..4).map(|_| rng.random_range(0..n)).collect();
            // force a <= c <= e <= b by folding through joins
            v[1] = d.join(v[0], v[1]);
            v[2] = d.join(v[1], v[2]);
            v[3] = d.join(v[2], v[3]);
            let (a, c, e, b) = (v[0], v[1], v[2], v[3]);
            let inner = principal_congruence(&d, c, e);
            let outer = principal_congruence(&d, a, b);
            assert!(inner.refines(&outer), "{name}: con({c},{e}) vs con({a},{b})");
        }
    }
}

#[test]
fn s7_examples() {
    let s7 = fixtures::s7();
    let (bottom, u_l, u_r) = (0, 5, 6);
    let c = principal_congruence(&s7, bottom, u_l);
    assert_eq!(c.blocks(), vec![vec![0, 2, 5], vec![1, 3, 4, 6]]);
    let con = congruence_lattice(&s7);
    let atoms: BTreeSet<&Partition> = con.dual_atoms().into_iter().collect();
    let expect_r = principal_congruence(&s7, bottom, u_r);
    assert_eq!(atoms, [&c, &expect_r].into_iter().collect());
    assert!(!lattice_isomorphic(con.order(), &fixtures::chain(5)));
    let sq = sps_core::grid(GridSpec::new(2, 2)).unwrap();
    assert!(lattice_isomorphic(
        congruence_lattice(&sq).order(),
        &fixtures::boolean(2)
    ));
}

#[test]
fn prime_ideal_examples() {
    let g = sps_core::grid(GridSpec::new(3, 3)).unwrap();
    // (2,0) and (1,0) have ids 6 and 3
    let corner = principal_ideal(&g, 6);
    assert_eq!(corner.members, vec![0, 3, 6]);
    assert!(is_prime_ideal(&g, &corner.members).unwrap());
    assert_eq!(prime_ideal_congruence(&g, &corner.members).unwrap().block_count(), 2);
    let lower = principal_ideal(&g, 3);
    assert!(!is_prime_ideal(&g, &lower.members).unwrap());

    let sq = sps_core::grid(GridSpec::new(2, 2)).unwrap();
    assert!(matches!(
        prime_ideal_congruence(&sq, &[0]),
        Err(CongruenceError::NotPrime)
    ));
    assert!(matches!(is_prime_ideal(&sq, &[1]), Err(CongruenceError::NotAnIdeal(_))));
}

#[test]
fn candidate_filter_examples() {
    let c3 = filter_candidate(&fixtures::chain(3)).unwrap();
    assert!(c3.p1_ok && !c3.p2_ok);
    let b2 = filter_candidate(&fixtures::boolean(2)).unwrap();
    assert!(b2.passes());
    assert!(matches!(
        filter_candidate(&fixtures::n5()),
        Err(CongruenceError::NotDistributive { kind: "N_5", .. })
    ));
    assert!(matches!(
        filter_candidate(&fixtures::chain(2)),
        Err(CongruenceError::TooSmall { n: 2 })
    ));
}

#[test]
fn oracle_refuses_large_inputs() {
    let g = sps_core::grid(GridSpec::new(3, 3)).unwrap();
    assert!(matches!(
        all_congruences_oracle(&g),
        Err(CongruenceError::TooLarge { n: 9, .. })
    ));
}
