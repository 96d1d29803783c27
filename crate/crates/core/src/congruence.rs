//! Congruences of finite lattices.
//!
//! Principal congruences are computed by a union-find closure. The
//! congruence lattice is assembled from the principal congruences of
//! covering pairs, which are exactly its join-irreducible members: every
//! congruence is the join of the down-set of join-irreducibles below it, and
//! distinct down-sets give distinct congruences because `Con L` is
//! distributive. A Bell-number enumeration of all partitions serves as an
//! independent oracle on small lattices.

use std::collections::{BTreeSet, VecDeque};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{DualAtoms, FiniteLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("brute-force enumeration is limited to {limit} elements, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("ideal is not prime")]
    NotPrime,
    #[error("lattice is not distributive ({kind} sublattice at {witness:?})")]
    NotDistributive { kind: &'static str, witness: [usize; 5] },
    #[error("candidate needs more than two elements, got {n}")]
    TooSmall { n: usize },
}

/// An equivalence relation on `0..n`, stored as a block index per element.
/// Blocks are numbered in order of their least element, so equal relations
/// have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    block: Vec<u32>,
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Partition {
            block: (0..n as u32).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Partition { block: vec![0; n] }
    }

    /// Canonicalises an arbitrary block labelling.
    pub fn from_labels<T: PartialEq + Copy>(labels: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let block = labels
            .iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(i) => i as u32,
                None => {
                    seen.push(*l);
                    (seen.len() - 1) as u32
                }
            })
            .collect();
        Partition { block }
    }

    /// Builds a partition from explicit blocks; elements not mentioned are
    /// singletons.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut uf = UnionFind::new(n);
        for b in blocks {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.partition()
    }

    pub fn len(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.block.iter().max().map_or(0, |&m| m as usize + 1)
    }

    #[inline]
    pub fn same(&self, x: usize, y: usize) -> bool {
        self.block[x] == self.block[y]
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block[x] as usize
    }

    /// Sorted blocks of sorted ids, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block.iter().enumerate() {
            out[b as usize].push(x);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.block_count() == self.len()
    }

    pub fn is_total(&self) -> bool {
        self.block_count() <= 1
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let mut image = vec![u32::MAX; self.block_count()];
        for (x, &b) in self.block.iter().enumerate() {
            let slot = &mut image[b as usize];
            if *slot == u32::MAX {
                *slot = other.block[x];
            } else if *slot != other.block[x] {
                return false;
            }
        }
        true
    }

    /// Transitive closure of the union of the two relations.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.len());
        uf.absorb(self);
        uf.absorb(other);
        uf.partition()
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        let pairs: Vec<(u32, u32)> = self.block.iter().zip(&other.block).map(|(&a, &b)| (a, b)).collect();
        Partition::from_labels(&pairs)
    }

    /// Compatible with meet and join of `lattice`.
    pub fn is_congruence(&self, lattice: &FiniteLattice) -> bool {
        let n = self.len();
        if n != lattice.len() {
            return false;
        }
        let mut rep = vec![usize::MAX; self.block_count()];
        for x in 0..n {
            let r = &mut rep[self.block[x] as usize];
            if *r == usize::MAX {
                *r = x;
                continue;
            }
            let r = *r;
            for z in 0..n {
                if !self.same(lattice.join(x, z), lattice.join(r, z))
                    || !self.same(lattice.meet(x, z), lattice.meet(r, z))
                {
                    return false;
                }
            }
        }
        true
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.blocks())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when two distinct blocks were merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    fn absorb(&mut self, p: &Partition) {
        let mut first = vec![usize::MAX; p.block_count()];
        for (x, &b) in p.block.iter().enumerate() {
            let f = &mut first[b as usize];
            if *f == usize::MAX {
                *f = x;
            } else {
                self.union(*f, x);
            }
        }
    }

    pub(crate) fn partition(&mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Partition::from_labels(&roots)
    }
}

/// The least congruence collapsing `a` and `b`.
///
/// Every pair that merges two blocks is queued once; its translates by
/// `_ ∨ z` and `_ ∧ z` for all `z` are merged in turn. The merging pairs span
/// the final relation, so closing them under translations makes the whole
/// relation compatible.
pub fn principal_congruence(lattice: &FiniteLattice, a: usize, b: usize) -> Partition {
    let n = lattice.len();
    let mut uf = UnionFind::new(n);
    let mut queue = VecDeque::new();
    if uf.union(a, b) {
        queue.push_back((a, b));
    }
    while let Some((x, y)) = queue.pop_front() {
        for z in 0..n {
            let (p, q) = (lattice.join(x, z), lattice.join(y, z));
            if uf.union(p, q) {
                queue.push_back((p, q));
            }
            let (p, q) = (lattice.meet(x, z), lattice.meet(y, z));
            if uf.union(p, q) {
                queue.push_back((p, q));
            }
        }
    }
    uf.partition()
}

pub const ORACLE_LIMIT: usize = 8;

/// Tests every partition of the element set (restricted growth strings) for
/// compatibility with meet and join.
pub fn all_congruences_oracle(lattice: &FiniteLattice) -> Result<CongruenceLattice, CongruenceError> {
    let n = lattice.len();
    if n > ORACLE_LIMIT {
        return Err(CongruenceError::TooLarge { n, limit: ORACLE_LIMIT });
    }
    let mut found = Vec::new();
    let mut rgs = vec![0u32; n];
    loop {
        let p = Partition { block: rgs.clone() };
        if p.is_congruence(lattice) {
            found.push(p);
        }
        if !next_restricted_growth(&mut rgs) {
            break;
        }
    }
    Ok(CongruenceLattice::from_members(found))
}

fn next_restricted_growth(rgs: &mut [u32]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            for r in rgs[i + 1..].iter_mut() {
                *r = 0;
            }
            return true;
        }
    }
    false
}

/// All congruences of a lattice ordered by refinement. Members are sorted
/// from the identity (most blocks) to the total relation.
#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    members: Vec<Partition>,
    order: FiniteLattice,
}

impl CongruenceLattice {
    pub fn from_members(mut members: Vec<Partition>) -> Self {
        members.sort_by(|a, b| b.block_count().cmp(&a.block_count()).then_with(|| a.cmp(b)));
        members.dedup();
        let order = FiniteLattice::from_order(members.len(), |i, j| members[i].refines(&members[j]))
            .expect("refinement order on congruences is a lattice");
        CongruenceLattice { members, order }
    }

    pub fn members(&self) -> &[Partition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The refinement order as an abstract lattice on member indices.
    pub fn order(&self) -> &FiniteLattice {
        &self.order
    }

    pub fn bottom(&self) -> &Partition {
        &self.members[self.order.bottom()]
    }

    pub fn top(&self) -> &Partition {
        &self.members[self.order.top()]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.members.iter().position(|m| m == p)
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.index_of(p).is_some()
    }

    /// Congruences covered by the total relation.
    pub fn dual_atoms(&self) -> Vec<&Partition> {
        if self.len() == 1 {
            return Vec::new();
        }
        self.order
            .lower(self.order.top())
            .iter()
            .map(|&i| &self.members[i])
            .collect()
    }

    pub fn is_dual_atom(&self, p: &Partition) -> bool {
        self.len() > 1 && self.index_of(p).is_some_and(|i| self.order.covers(i, self.order.top()))
    }

    /// Members with exactly one lower cover.
    pub fn ji_poset(&self) -> JiPoset {
        let ji: Vec<Partition> = (0..self.len())
            .filter(|&i| self.order.lower(i).len() == 1)
            .map(|i| self.members[i].clone())
            .collect();
        JiPoset::new(ji)
    }

    pub fn is_distributive(&self) -> bool {
        self.order.is_distributive()
    }

    /// Member partitions as a set, for comparisons.
    pub fn member_set(&self) -> BTreeSet<&Partition> {
        self.members.iter().collect()
    }
}

impl DualAtoms for CongruenceLattice {
    fn dual_atom_count(&self) -> usize {
        self.order.dual_atom_count()
    }
}

/// Join-irreducible congruences under refinement.
#[derive(Clone, Debug)]
pub struct JiPoset {
    members: Vec<Partition>,
    below: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
}

impl JiPoset {
    fn new(members: Vec<Partition>) -> Self {
        let k = members.len();
        let lt = |i: usize, j: usize| i != j && members[i].refines(&members[j]);
        let below: Vec<Vec<usize>> = (0..k).map(|j| (0..k).filter(|&i| lt(i, j)).collect()).collect();
        let upper_covers = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| lt(i, j) && !(0..k).any(|z| lt(i, z) && lt(z, j)))
                    .collect()
            })
            .collect();
        JiPoset {
            members,
            below,
            upper_covers,
        }
    }

    pub fn members(&self) -> &[Partition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(&i)
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.upper_covers[i]
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.upper_covers[i].is_empty()).collect()
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.members.iter().position(|m| m == p)
    }

    /// Number of down-sets, counted by direct enumeration.
    pub fn down_set_count(&self) -> usize {
        let order = linear_extension(&self.below);
        let mut included = vec![false; self.len()];
        count_down_sets(&order, &self.below, 0, &mut included)
    }
}

fn linear_extension(below: &[Vec<usize>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..below.len()).collect();
    order.sort_by_key(|&i| (below[i].len(), i));
    order
}

fn count_down_sets(order: &[usize], below: &[Vec<usize>], pos: usize, included: &mut [bool]) -> usize {
    if pos == order.len() {
        return 1;
    }
    let x = order[pos];
    let mut total = count_down_sets(order, below, pos + 1, included);
    if below[x].iter().all(|&y| included[y]) {
        included[x] = true;
        total += count_down_sets(order, below, pos + 1, included);
        included[x] = false;
    }
    total
}

/// `Con L`, built as joins of down-sets of the principal congruences of
/// covering pairs.
pub fn congruence_lattice(lattice: &FiniteLattice) -> CongruenceLattice {
    let n = lattice.len();
    let mut generators: Vec<Partition> = lattice
        .cover_pairs()
        .map(|(a, b)| principal_congruence(lattice, a, b))
        .collect();
    generators.sort();
    generators.dedup();

    let k = generators.len();
    let below: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            (0..k)
                .filter(|&i| i != j && generators[i].refines(&generators[j]))
                .collect()
        })
        .collect();
    let order = linear_extension(&below);
    let mut included = vec![false; k];
    let mut out = Vec::new();
    collect_joins(
        &order,
        &below,
        &generators,
        0,
        &mut included,
        Partition::identity(n),
        &mut out,
    );
    CongruenceLattice::from_members(out)
}

fn collect_joins(
    order: &[usize],
    below: &[Vec<usize>],
    generators: &[Partition],
    pos: usize,
    included: &mut [bool],
    current: Partition,
    out: &mut Vec<Partition>,
) {
    if pos == order.len() {
        out.push(current);
        return;
    }
    let x = order[pos];
    if below[x].iter().all(|&y| included[y]) {
        included[x] = true;
        let joined = current.join(&generators[x]);
        collect_joins(order, below, generators, pos + 1, included, joined, out);
        included[x] = false;
    }
    collect_joins(order, below, generators, pos + 1, included, current, out);
}

pub fn ji_congruence_poset(lattice: &FiniteLattice) -> JiPoset {
    congruence_lattice(lattice).ji_poset()
}

/// Cover counts of an abstract finite poset on `0..n`.
pub fn poset_upper_cover_counts(n: usize, lt: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| lt(i, j) && !(0..n).any(|z| lt(i, z) && lt(z, j)))
                .count()
        })
        .collect()
}

/// Every join-irreducible congruence has at most two covers among the
/// join-irreducible congruences.
pub fn check_p1(lattice: &FiniteLattice) -> bool {
    ji_poset_has_at_most_two_covers(&ji_congruence_poset(lattice))
}

pub fn ji_poset_has_at_most_two_covers(ji: &JiPoset) -> bool {
    (0..ji.len()).all(|i| ji.upper_covers(i).len() <= 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum P2Status {
    Holds,
    Exempt,
    Fails,
}

/// At least two dual atoms in `Con L`; lattices with at most two elements
/// are exempt.
pub fn check_p2(lattice: &FiniteLattice) -> (P2Status, usize) {
    let con = congruence_lattice(lattice);
    let count = con.dual_atom_count();
    let status = if lattice.len() <= 2 {
        P2Status::Exempt
    } else if count >= 2 {
        P2Status::Holds
    } else {
        P2Status::Fails
    };
    (status, count)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrincipalIdeal {
    pub generator: usize,
    pub members: Vec<usize>,
}

pub fn principal_ideal(lattice: &FiniteLattice, x: usize) -> PrincipalIdeal {
    PrincipalIdeal {
        generator: x,
        members: lattice.tables().down_set(x),
    }
}

fn membership(lattice: &FiniteLattice, members: &[usize]) -> Result<Vec<bool>, CongruenceError> {
    let n = lattice.len();
    let mut inside = vec![false; n];
    for &x in members {
        if x >= n {
            return Err(CongruenceError::NotAnIdeal(format!("element {x} out of range")));
        }
        inside[x] = true;
    }
    for x in (0..n).filter(|&x| inside[x]) {
        if let Some(&y) = lattice.lower(x).iter().find(|&&y| !inside[y]) {
            return Err(CongruenceError::NotAnIdeal(format!(
                "{y} lies below member {x} but is missing"
            )));
        }
        for y in (0..n).filter(|&y| inside[y]) {
            if !inside[lattice.join(x, y)] {
                return Err(CongruenceError::NotAnIdeal(format!(
                    "join of members {x} and {y} is missing"
                )));
            }
        }
    }
    Ok(inside)
}

/// Proper, nonempty, and `x ∧ y ∈ I` forces `x ∈ I` or `y ∈ I`.
pub fn is_prime_ideal(lattice: &FiniteLattice, members: &[usize]) -> Result<bool, CongruenceError> {
    let inside = membership(lattice, members)?;
    Ok(prime(lattice, &inside))
}

fn prime(lattice: &FiniteLattice, inside: &[bool]) -> bool {
    let n = lattice.len();
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 || count == n {
        return false;
    }
    let outside: Vec<usize> = (0..n).filter(|&x| !inside[x]).collect();
    outside
        .iter()
        .all(|&x| outside.iter().all(|&y| !inside[lattice.meet(x, y)]))
}

/// The two-block partition `{I, L ∖ I}` of a prime ideal.
pub fn prime_ideal_congruence(lattice: &FiniteLattice, members: &[usize]) -> Result<Partition, CongruenceError> {
    let inside = membership(lattice, members)?;
    if !prime(lattice, &inside) {
        return Err(CongruenceError::NotPrime);
    }
    Ok(Partition::from_labels(&inside))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateFilter {
    pub p1_ok: bool,
    pub p2_ok: bool,
}

impl CandidateFilter {
    pub fn passes(&self) -> bool {
        self.p1_ok && self.p2_ok
    }
}

/// Necessary conditions for a finite distributive lattice to be `Con L` of
/// a slim semimodular lattice, read through the join-irreducible elements
/// of the candidate.
pub fn filter_candidate(target: &FiniteLattice) -> Result<CandidateFilter, CongruenceError> {
    if target.len() <= 2 {
        return Err(CongruenceError::TooSmall { n: target.len() });
    }
    if let Some(witness) = target.find_n5() {
        return Err(CongruenceError::NotDistributive { kind: "N_5", witness });
    }
    if let Some(witness) = target.find_m3() {
        return Err(CongruenceError::NotDistributive { kind: "M_3", witness });
    }
    let ji = target.join_irreducibles();
    let counts = poset_upper_cover_counts(ji.len(), |i, j| i != j && target.leq(ji[i], ji[j]));
    Ok(CandidateFilter {
        p1_ok: counts.iter().all(|&c| c <= 2),
        p2_ok: target.dual_atom_count() >= 2,
    })
}

pub fn lattice_isomorphic(a: &FiniteLattice, b: &FiniteLattice) -> bool {
    a.is_isomorphic(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rect::{grid, GridSpec};

    #[test]
    fn identity_for_equal_pair() {
        let g = grid(GridSpec::new(3, 3)).unwrap();
        assert_eq!(principal_congruence(&g, 4, 4), Partition::identity(9));
    }

    #[test]
    fn square_principal() {
        // ids: 0, b = (0,1) = 1, a = (1,0) = 2, 1 = 3
        let sq = fixtures::boolean_square();
        let p = principal_congruence(&sq, 0, 2);
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn restricted_growth_counts_bell_numbers() {
        for (n, bell) in [(1, 1), (4, 15), (7, 877)] {
            let mut rgs = vec![0u32; n];
            let mut count = 1;
            while next_restricted_growth(&mut rgs) {
                count += 1;
            }
            assert_eq!(count, bell);
        }
    }

    #[test]
    fn oracle_size_limit() {
        let g = grid(GridSpec::new(3, 3)).unwrap();
        assert_eq!(
            all_congruences_oracle(&g).unwrap_err(),
            CongruenceError::TooLarge { n: 9, limit: 8 }
        );
    }

    #[test]
    fn two_chain_has_two_congruences() {
        let c2 = fixtures::chain(2);
        assert_eq!(all_congruences_oracle(&c2).unwrap().len(), 2);
        assert_eq!(congruence_lattice(&c2).len(), 2);
        assert_eq!(ji_congruence_poset(&c2).len(), 1);
        assert_eq!(check_p2(&c2).0, P2Status::Exempt);
    }

    #[test]
    fn partition_ops() {
        let a = Partition::from_blocks(4, &[vec![0, 1]]);
        let b = Partition::from_blocks(4, &[vec![1, 2]]);
        assert_eq!(a.join(&b).blocks(), vec![vec![0, 1, 2], vec![3]]);
        assert!(a.meet(&b).is_identity());
        assert!(a.refines(&a.join(&b)));
        assert!(!a.refines(&b));
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[0,1],[2],[3]]");
    }

    #[test]
    fn claw_fails_two_cover_bound() {
        // bottom 0 under the antichain 1, 2, 3
        let counts = poset_upper_cover_counts(4, |i, j| i == 0 && j > 0);
        assert_eq!(counts, vec![3, 0, 0, 0]);
        assert!(counts.iter().any(|&c| c > 2));
    }

    #[test]
    fn ideal_validation() {
        let sq = fixtures::boolean_square();
        assert!(matches!(is_prime_ideal(&sq, &[2]), Err(CongruenceError::NotAnIdeal(_))));
        assert!(matches!(
            is_prime_ideal(&sq, &[0, 1, 2]),
            Err(CongruenceError::NotAnIdeal(_))
        ));
        assert_eq!(is_prime_ideal(&sq, &[]), Ok(false));
        assert_eq!(is_prime_ideal(&sq, &[0, 1, 2, 3]), Ok(false));
        assert_eq!(prime_ideal_congruence(&sq, &[0]), Err(CongruenceError::NotPrime));
    }

    #[test]
    fn filter_rejects_small_and_non_distributive() {
        assert_eq!(
            filter_candidate(&fixtures::chain(2)).unwrap_err(),
            CongruenceError::TooSmall { n: 2 }
        );
        assert!(matches!(
            filter_candidate(&fixtures::n5()),
            Err(CongruenceError::NotDistributive { kind: "N_5", .. })
        ));
        assert!(matches!(
            filter_candidate(&fixtures::m3()),
            Err(CongruenceError::NotDistributive { kind: "M_3", .. })
        ));
    }
}
