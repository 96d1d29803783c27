//! Small named lattices used by tests, examples and the command line.

use crate::diagram::PlanarDiagram;
use crate::lattice::FiniteLattice;
use crate::rect::{grid, insert_fork, GridSpec};

/// The chain with `k` elements, `0 ⋖ 1 ⋖ … ⋖ k-1`.
pub fn chain(k: usize) -> PlanarDiagram {
    let upper = (0..k)
        .map(|i| if i + 1 < k { vec![i + 1] } else { Vec::new() })
        .collect();
    PlanarDiagram::build(upper).expect("chain")
}

/// Pentagon: `0 ⋖ a ⋖ b ⋖ 1`, `0 ⋖ c ⋖ 1` with ids `0, a=1, b=2, c=3, 1=4`.
pub fn n5() -> PlanarDiagram {
    let mut d = PlanarDiagram::build(vec![vec![1, 3], vec![2], vec![4], vec![4], vec![]]).expect("N_5");
    for (x, name) in ["0", "a", "b", "c", "1"].into_iter().enumerate() {
        d.set_label(x, name);
    }
    d
}

/// Diamond: `0` under three atoms under `1`.
pub fn m3() -> PlanarDiagram {
    PlanarDiagram::build(vec![vec![1, 2, 3], vec![4], vec![4], vec![4], vec![]]).expect("M_3")
}

/// The four-element Boolean lattice as the grid `C_2 × C_2`.
pub fn boolean_square() -> PlanarDiagram {
    grid(GridSpec::new(2, 2)).expect("grid")
}

/// The Boolean lattice on `k` atoms, element `x` being a bitmask.
pub fn boolean(k: u32) -> FiniteLattice {
    let n = 1usize << k;
    FiniteLattice::from_order(n, |x, y| x & y == x).expect("Boolean lattice")
}

/// `S_7`: the fork of the grid `C_2 × C_2` at its only cell, labelled
/// `0, a_r, a_l, 1, m, u_l, u_r` by id.
pub fn s7() -> PlanarDiagram {
    let g = boolean_square();
    let cell = g.four_cells()[0];
    let mut d = insert_fork(&g, &cell).expect("S_7").diagram;
    for (x, name) in ["0", "a_r", "a_l", "1", "m", "u_l", "u_r"].into_iter().enumerate() {
        d.set_label(x, name);
    }
    d
}
