//! Finite lattices given by their cover relation, with cached order,
//! meet and join tables and the structural validators used throughout
//! the crate.

use thiserror::Error;

use crate::bits::{ones, BitMatrix};
use crate::canon;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("diagram has no elements")]
    Empty,
    #[error("cover {lower} -> {upper} references an element outside 0..{n}")]
    OutOfRange { lower: usize, upper: usize, n: usize },
    #[error("cover relation has a cycle through element {element}")]
    CycleDetected { element: usize },
    #[error("cover {lower} -> {upper} is listed more than once")]
    DuplicateCover { lower: usize, upper: usize },
    #[error("edge {lower} -> {upper} is implied by transitivity and is not a cover")]
    NotACover { lower: usize, upper: usize },
    #[error("order is not bounded (minimal elements {minimal:?}, maximal elements {maximal:?})")]
    NotBounded { minimal: Vec<usize>, maximal: Vec<usize> },
    #[error("elements {x} and {y} have no unique {which}")]
    NotALattice { x: usize, y: usize, which: &'static str },
}

impl DiagramError {
    /// Rewrites the element ids carried by the error.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> DiagramError {
        use DiagramError::*;
        match self {
            Empty => Empty,
            OutOfRange { lower, upper, n } => OutOfRange {
                lower: f(*lower),
                upper: *upper,
                n: *n,
            },
            CycleDetected { element } => CycleDetected { element: f(*element) },
            DuplicateCover { lower, upper } => DuplicateCover {
                lower: f(*lower),
                upper: f(*upper),
            },
            NotACover { lower, upper } => NotACover {
                lower: f(*lower),
                upper: f(*upper),
            },
            NotBounded { minimal, maximal } => NotBounded {
                minimal: minimal.iter().map(|&x| f(x)).collect(),
                maximal: maximal.iter().map(|&x| f(x)).collect(),
            },
            NotALattice { x, y, which } => NotALattice {
                x: f(*x),
                y: f(*y),
                which,
            },
        }
    }
}

/// Reachability, meet/join tables and heights of a finite lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderTables {
    n: usize,
    below: BitMatrix,
    above: BitMatrix,
    meet: Vec<u32>,
    join: Vec<u32>,
    height: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl OrderTables {
    fn build(upper: &[Vec<usize>], lower: &[Vec<usize>]) -> Result<Self, DiagramError> {
        let n = upper.len();
        let topo = topological_order(upper, lower)?;

        let mut below = BitMatrix::new(n);
        for &x in &topo {
            below.set(x, x);
            for &l in &lower[x] {
                below.or_row_into(l, x);
            }
        }
        let mut above = BitMatrix::new(n);
        for &x in topo.iter().rev() {
            above.set(x, x);
            for &u in &upper[x] {
                above.or_row_into(u, x);
            }
        }

        for (y, lows) in lower.iter().enumerate() {
            for &a in lows {
                for &b in lows {
                    if a != b && below.get(b, a) {
                        return Err(DiagramError::NotACover { lower: a, upper: y });
                    }
                }
            }
        }

        let minimal: Vec<usize> = (0..n).filter(|&x| lower[x].is_empty()).collect();
        let maximal: Vec<usize> = (0..n).filter(|&x| upper[x].is_empty()).collect();
        if minimal.len() != 1 || maximal.len() != 1 {
            return Err(DiagramError::NotBounded { minimal, maximal });
        }

        let mut height = vec![0usize; n];
        for &x in &topo {
            height[x] = lower[x].iter().map(|&l| height[l] + 1).max().unwrap_or(0);
        }

        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        let words = below.words();
        let mut common = vec![0u64; words];
        for x in 0..n {
            meet[x * n + x] = x as u32;
            join[x * n + x] = x as u32;
            for y in x + 1..n {
                for (c, (a, b)) in common.iter_mut().zip(below.row(x).iter().zip(below.row(y))) {
                    *c = a & b;
                }
                let m = ones(&common)
                    .max_by_key(|&z| (height[z], std::cmp::Reverse(z)))
                    .filter(|&m| below.row(m) == common.as_slice())
                    .ok_or(DiagramError::NotALattice { x, y, which: "meet" })?;
                meet[x * n + y] = m as u32;
                meet[y * n + x] = m as u32;

                for (c, (a, b)) in common.iter_mut().zip(above.row(x).iter().zip(above.row(y))) {
                    *c = a & b;
                }
                let j = ones(&common)
                    .min_by_key(|&z| (height[z], z))
                    .filter(|&j| above.row(j) == common.as_slice())
                    .ok_or(DiagramError::NotALattice { x, y, which: "join" })?;
                join[x * n + y] = j as u32;
                join[y * n + x] = j as u32;
            }
        }

        Ok(OrderTables {
            n,
            below,
            above,
            meet,
            join,
            height,
            bottom: minimal[0],
            top: maximal[0],
        })
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.below.get(y, x)
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.n + y] as usize
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.n + y] as usize
    }

    #[inline]
    pub fn height(&self, x: usize) -> usize {
        self.height[x]
    }

    /// Elements `z <= x`, ascending.
    pub fn down_set(&self, x: usize) -> Vec<usize> {
        ones(self.below.row(x)).collect()
    }

    /// Elements `z >= x`, ascending.
    pub fn up_set(&self, x: usize) -> Vec<usize> {
        ones(self.above.row(x)).collect()
    }
}

fn topological_order(upper: &[Vec<usize>], lower: &[Vec<usize>]) -> Result<Vec<usize>, DiagramError> {
    let n = upper.len();
    let mut indeg: Vec<usize> = lower.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..n).rev().filter(|&x| indeg[x] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = stack.pop() {
        order.push(x);
        for &u in upper[x].iter().rev() {
            indeg[u] -= 1;
            if indeg[u] == 0 {
                stack.push(u);
            }
        }
    }
    if order.len() != n {
        let element = (0..n).find(|&x| indeg[x] > 0).unwrap_or(0);
        return Err(DiagramError::CycleDetected { element });
    }
    Ok(order)
}

/// A finite lattice stored as its cover relation. Lists of upper and lower
/// covers keep the order they were supplied in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    tables: OrderTables,
}

impl FiniteLattice {
    /// Builds a lattice from per-element upper cover lists. Lower cover lists
    /// are derived in ascending id order.
    pub fn from_upper_covers(upper: Vec<Vec<usize>>) -> Result<Self, DiagramError> {
        let lower = derive_lower(&upper)?;
        Self::from_cover_lists(upper, lower)
    }

    pub(crate) fn from_cover_lists(upper: Vec<Vec<usize>>, lower: Vec<Vec<usize>>) -> Result<Self, DiagramError> {
        let tables = OrderTables::build(&upper, &lower)?;
        Ok(FiniteLattice { upper, lower, tables })
    }

    pub(crate) fn with_lower_lists(mut lattice: FiniteLattice, lower: Vec<Vec<usize>>) -> FiniteLattice {
        debug_assert!(lower
            .iter()
            .zip(&lattice.lower)
            .all(|(a, b)| a.len() == b.len() && a.iter().all(|x| b.contains(x))));
        lattice.lower = lower;
        lattice
    }

    /// Builds a lattice on `0..n` from an order predicate. Covers are read
    /// off the strict up-sets.
    pub fn from_order(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self, DiagramError> {
        let mut strict_up = BitMatrix::new(n);
        for x in 0..n {
            for y in 0..n {
                if x != y && leq(x, y) {
                    if leq(y, x) {
                        return Err(DiagramError::CycleDetected { element: x });
                    }
                    strict_up.set(x, y);
                }
            }
        }
        let mut upper = vec![Vec::new(); n];
        let mut reach = vec![0u64; strict_up.words()];
        for (x, ups) in upper.iter_mut().enumerate() {
            reach.iter_mut().for_each(|w| *w = 0);
            for z in ones(strict_up.row(x)) {
                for (r, w) in reach.iter_mut().zip(strict_up.row(z)) {
                    *r |= w;
                }
            }
            ups.extend(ones(strict_up.row(x)).filter(|&y| reach[y / 64] >> (y % 64) & 1 == 0));
        }
        Self::from_upper_covers(upper)
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn tables(&self) -> &OrderTables {
        &self.tables
    }

    pub fn bottom(&self) -> usize {
        self.tables.bottom
    }

    pub fn top(&self) -> usize {
        self.tables.top
    }

    pub fn upper(&self, x: usize) -> &[usize] {
        &self.upper[x]
    }

    pub fn lower(&self, x: usize) -> &[usize] {
        &self.lower[x]
    }

    pub fn upper_lists(&self) -> &[Vec<usize>] {
        &self.upper
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.tables.leq(x, y)
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.tables.meet(x, y)
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.tables.join(x, y)
    }

    #[inline]
    pub fn height(&self, x: usize) -> usize {
        self.tables.height(x)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `x ⋖ y`
    pub fn covers(&self, x: usize, y: usize) -> bool {
        self.upper[x].contains(&y)
    }

    pub fn cover_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.upper
            .iter()
            .enumerate()
            .flat_map(|(x, ups)| ups.iter().map(move |&y| (x, y)))
    }

    pub fn cover_count(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    /// `x ∧ y ⋖ x` implies `y ⋖ x ∨ y`, for all `x`, `y`.
    pub fn is_semimodular(&self) -> bool {
        self.semimodularity_witness().is_none()
    }

    pub fn semimodularity_witness(&self) -> Option<(usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                if self.covers(self.meet(x, y), x) && !self.covers(y, self.join(x, y)) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Every cover raises the height by exactly one.
    pub fn is_graded(&self) -> bool {
        self.cover_pairs().all(|(x, y)| self.height(y) == self.height(x) + 1)
    }

    /// No M_3 sublattice.
    pub fn is_slim(&self) -> bool {
        self.find_m3().is_none()
    }

    /// Returns `[o, x, y, z, t]` forming a diamond sublattice, if any.
    pub fn find_m3(&self) -> Option<[usize; 5]> {
        let n = self.len();
        for x in 0..n {
            for y in x + 1..n {
                if self.comparable(x, y) {
                    continue;
                }
                let o = self.meet(x, y);
                let t = self.join(x, y);
                for z in y + 1..n {
                    if self.comparable(x, z) || self.comparable(y, z) {
                        continue;
                    }
                    if self.meet(x, z) == o && self.meet(y, z) == o && self.join(x, z) == t && self.join(y, z) == t {
                        return Some([o, x, y, z, t]);
                    }
                }
            }
        }
        None
    }

    /// Returns `[o, a, b, c, t]` with `a < b` forming a pentagon sublattice.
    pub fn find_n5(&self) -> Option<[usize; 5]> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if a == b || !self.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.comparable(c, a) || self.comparable(c, b) {
                        continue;
                    }
                    let o = self.meet(a, c);
                    let t = self.join(a, c);
                    if self.meet(b, c) == o && self.join(b, c) == t {
                        return Some([o, a, b, c, t]);
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.find_n5().is_none() && self.find_m3().is_none()
    }

    /// Elements with exactly one lower cover, ascending.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.lower[x].len() == 1).collect()
    }

    /// Elements covered by the top, ascending.
    pub fn coatoms(&self) -> Vec<usize> {
        let mut c = self.lower[self.top()].clone();
        c.sort_unstable();
        c
    }

    /// Elements covering the bottom, ascending.
    pub fn atoms(&self) -> Vec<usize> {
        let mut a = self.upper[self.bottom()].clone();
        a.sort_unstable();
        a
    }

    /// Canonical byte encoding of the unlabeled order; equal keys iff the
    /// lattices are order-isomorphic.
    pub fn canonical_key(&self) -> Vec<u8> {
        canon::canonical_key(&self.upper)
    }

    pub fn is_isomorphic(&self, other: &FiniteLattice) -> bool {
        self.len() == other.len()
            && self.cover_count() == other.cover_count()
            && self.canonical_key() == other.canonical_key()
    }

    pub fn chain(k: usize) -> Self {
        assert!(k >= 1, "a chain needs at least one element");
        let upper = (0..k)
            .map(|i| if i + 1 < k { vec![i + 1] } else { Vec::new() })
            .collect();
        Self::from_upper_covers(upper).expect("chain is a lattice")
    }
}

pub(crate) fn derive_lower(upper: &[Vec<usize>]) -> Result<Vec<Vec<usize>>, DiagramError> {
    let n = upper.len();
    if n == 0 {
        return Err(DiagramError::Empty);
    }
    let mut lower = vec![Vec::new(); n];
    for (x, ups) in upper.iter().enumerate() {
        for (k, &y) in ups.iter().enumerate() {
            if y >= n {
                return Err(DiagramError::OutOfRange { lower: x, upper: y, n });
            }
            if y == x {
                return Err(DiagramError::CycleDetected { element: x });
            }
            if ups[..k].contains(&y) {
                return Err(DiagramError::DuplicateCover { lower: x, upper: y });
            }
            lower[y].push(x);
        }
    }
    Ok(lower)
}

/// The number of elements covered by the top.
pub trait DualAtoms {
    fn dual_atom_count(&self) -> usize;
}

impl DualAtoms for FiniteLattice {
    fn dual_atom_count(&self) -> usize {
        if self.len() == 1 {
            return 0;
        }
        self.lower(self.top()).len()
    }
}
