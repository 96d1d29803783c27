//! Planar Hasse diagrams: a lattice whose cover lists are ordered left to
//! right, plus the cell and boundary structure read off that ordering.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::lattice::{derive_lower, DiagramError, FiniteLattice};

pub type ElementId = usize;

/// A finite lattice with left-to-right ordered cover lists.
///
/// Upper cover lists are taken as given. Lower cover lists are derived: two
/// lower covers `a`, `b` of the same element are ordered by looking at
/// `c = a ∧ b` and comparing the leftmost upper covers of `c` lying below `a`
/// and below `b`. In a planar drawing those two sets of covers never
/// interleave, so this recovers the drawing's left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarDiagram {
    lattice: FiniteLattice,
    labels: Vec<Option<String>>,
}

impl Deref for PlanarDiagram {
    type Target = FiniteLattice;

    fn deref(&self) -> &FiniteLattice {
        &self.lattice
    }
}

/// A covering square `{o, a_l, a_r, t}` with `a_l` left of `a_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FourCell {
    pub o: ElementId,
    pub a_l: ElementId,
    pub a_r: ElementId,
    pub t: ElementId,
}

impl PlanarDiagram {
    pub fn build(upper: Vec<Vec<usize>>) -> Result<Self, DiagramError> {
        let n = upper.len();
        Self::build_labelled(upper, vec![None; n])
    }

    pub fn build_labelled(upper: Vec<Vec<usize>>, labels: Vec<Option<String>>) -> Result<Self, DiagramError> {
        let lower = derive_lower(&upper)?;
        let mut lattice = FiniteLattice::from_cover_lists(upper, lower)?;
        let ordered: Vec<Vec<usize>> = (0..lattice.len())
            .map(|y| left_to_right_in(&lattice, lattice.lower(y)))
            .collect();
        lattice = FiniteLattice::with_lower_lists(lattice, ordered);
        let mut labels = labels;
        labels.resize(lattice.len(), None);
        Ok(PlanarDiagram { lattice, labels })
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn into_lattice(self) -> FiniteLattice {
        self.lattice
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn label(&self, x: ElementId) -> Option<&str> {
        self.labels[x].as_deref()
    }

    pub fn set_label(&mut self, x: ElementId, label: impl Into<String>) {
        self.labels[x] = Some(label.into());
    }

    /// `x` lies strictly left of `y`. Comparable elements are never left of
    /// each other.
    pub fn left_of(&self, x: ElementId, y: ElementId) -> bool {
        left_of_in(&self.lattice, x, y)
    }

    /// Sorts pairwise incomparable elements left to right.
    pub fn left_to_right(&self, elements: &[ElementId]) -> Vec<ElementId> {
        left_to_right_in(&self.lattice, elements)
    }

    /// Checks that every ordered cover list agrees with the left-of relation
    /// computed through meets (for lower lists) and through joins (for upper
    /// lists), and that both computations order every incomparable pair the
    /// same way. Holds for every diagram drawn in the plane without crossings.
    pub fn is_planar_consistent(&self) -> bool {
        let l = &self.lattice;
        for x in 0..l.len() {
            for y in x + 1..l.len() {
                if l.comparable(x, y) {
                    continue;
                }
                let by_meet = self.left_of(x, y);
                if by_meet == self.left_of(y, x) || by_meet != self.left_of_through_join(x, y) {
                    return false;
                }
            }
        }
        for y in 0..l.len() {
            let lows = l.lower(y);
            for i in 0..lows.len() {
                for j in i + 1..lows.len() {
                    if !self.left_of(lows[i], lows[j]) {
                        return false;
                    }
                }
            }
            let ups = l.upper(y);
            for i in 0..ups.len() {
                for j in i + 1..ups.len() {
                    if !self.left_of_through_join(ups[i], ups[j]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn left_of_through_join(&self, x: ElementId, y: ElementId) -> bool {
        let l = &self.lattice;
        if l.comparable(x, y) {
            return false;
        }
        let d = l.join(x, y);
        let pos = |target: usize| l.lower(d).iter().position(|&c| l.leq(target, c));
        matches!((pos(x), pos(y)), (Some(px), Some(py)) if px < py)
    }

    /// Leftmost and rightmost upper-cover walks from the bottom to the top.
    pub fn boundary_chains(&self) -> (Vec<ElementId>, Vec<ElementId>) {
        let walk = |pick: fn(&[usize]) -> usize| {
            let mut chain = vec![self.bottom()];
            let mut x = self.bottom();
            while x != self.top() {
                x = pick(self.upper(x));
                chain.push(x);
            }
            chain
        };
        (walk(|u| u[0]), walk(|u| u[u.len() - 1]))
    }

    pub fn is_four_cell(&self, cell: &FourCell) -> bool {
        let FourCell { o, a_l, a_r, t } = *cell;
        let n = self.len();
        if [o, a_l, a_r, t].iter().any(|&x| x >= n) {
            return false;
        }
        adjacent(self.upper(o), a_l, a_r)
            && adjacent(self.lower(t), a_l, a_r)
            && self.covers(a_l, t)
            && self.covers(a_r, t)
            && self.meet(a_l, a_r) == o
            && self.join(a_l, a_r) == t
    }

    /// All covering squares, ordered by bottom element then by the position
    /// of `a_l` in the bottom's upper list.
    pub fn four_cells(&self) -> Vec<FourCell> {
        let mut cells = Vec::new();
        for o in 0..self.len() {
            let ups = self.upper(o);
            for w in ups.windows(2) {
                let (a_l, a_r) = (w[0], w[1]);
                let cell = FourCell {
                    o,
                    a_l,
                    a_r,
                    t: self.join(a_l, a_r),
                };
                if self.is_four_cell(&cell) {
                    cells.push(cell);
                }
            }
        }
        cells
    }

    /// Cells whose bottom element is `o`.
    pub fn cells_at(&self, o: ElementId) -> Vec<FourCell> {
        self.four_cells().into_iter().filter(|c| c.o == o).collect()
    }

    /// Relabels elements: element `x` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<PlanarDiagram, DiagramError> {
        let n = self.len();
        let mut upper = vec![Vec::new(); n];
        let mut labels = vec![None; n];
        for x in 0..n {
            upper[perm[x]] = self.upper(x).iter().map(|&y| perm[y]).collect();
            labels[perm[x]] = self.labels[x].clone();
        }
        PlanarDiagram::build_labelled(upper, labels)
    }
}

fn adjacent(list: &[usize], a: usize, b: usize) -> bool {
    list.windows(2).any(|w| w[0] == a && w[1] == b)
}

fn left_of_in(l: &FiniteLattice, x: usize, y: usize) -> bool {
    if l.comparable(x, y) {
        return false;
    }
    let c = l.meet(x, y);
    let pos = |target: usize| l.upper(c).iter().position(|&u| l.leq(u, target));
    matches!((pos(x), pos(y)), (Some(px), Some(py)) if px < py)
}

/// Orders by the number of elements each one is left of, which is the exact
/// left-to-right order whenever the relation is a strict total order on the
/// input. Ties fall back to ids.
fn left_to_right_in(l: &FiniteLattice, elements: &[usize]) -> Vec<usize> {
    let mut scored: Vec<(usize, usize)> = elements
        .iter()
        .map(|&x| {
            let wins = elements.iter().filter(|&&y| left_of_in(l, x, y)).count();
            (x, wins)
        })
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().map(|(x, _)| x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rect::{grid, GridSpec};

    #[test]
    fn grid_boundaries_follow_row_major_ids() {
        let g = grid(GridSpec::new(3, 2)).unwrap();
        let (left, right) = g.boundary_chains();
        // (0,0),(1,0),(2,0),(2,1)
        assert_eq!(left, vec![0, 2, 4, 5]);
        // (0,0),(0,1),(1,1),(2,1)
        assert_eq!(right, vec![0, 1, 3, 5]);
    }

    #[test]
    fn chain_boundaries_are_the_whole_chain() {
        let c4 = PlanarDiagram::build(vec![vec![1], vec![2], vec![3], vec![]]).unwrap();
        let (l, r) = c4.boundary_chains();
        assert_eq!(l, vec![0, 1, 2, 3]);
        assert_eq!(l, r);
    }

    #[test]
    fn grid_lower_lists_are_left_to_right() {
        let g = grid(GridSpec::new(3, 3)).unwrap();
        // (1,1) has lower covers (1,0) on the left and (0,1) on the right
        assert_eq!(g.lower(4), &[3, 1]);
        assert!(g.is_planar_consistent());
    }

    #[test]
    fn cell_counts() {
        assert_eq!(grid(GridSpec::new(2, 2)).unwrap().four_cells().len(), 1);
        assert_eq!(grid(GridSpec::new(3, 3)).unwrap().four_cells().len(), 4);
        assert_eq!(fixtures::s7().four_cells().len(), 3);
    }

    #[test]
    fn s7_left_boundary() {
        let s7 = fixtures::s7();
        let (left, _) = s7.boundary_chains();
        let names: Vec<_> = left.iter().map(|&x| s7.label(x).unwrap()).collect();
        assert_eq!(names, vec!["0", "u_l", "a_l", "1"]);
    }

    #[test]
    fn crossed_upper_lists_are_inconsistent() {
        // grid(2,2) drawn with the bottom's covers swapped but the top kept
        let g = grid(GridSpec::new(2, 2)).unwrap();
        assert!(g.is_planar_consistent());
        let mut upper: Vec<Vec<usize>> = g.upper_lists().to_vec();
        upper[0].reverse();
        let swapped = PlanarDiagram::build(upper).unwrap();
        // a consistent mirror image is still planar
        assert!(swapped.is_planar_consistent());
    }

    #[test]
    fn non_cell_rejected() {
        let g = grid(GridSpec::new(3, 3)).unwrap();
        let bogus = FourCell {
            o: 0,
            a_l: 1,
            a_r: 3,
            t: 4,
        };
        assert!(!g.is_four_cell(&bogus));
    }
}
