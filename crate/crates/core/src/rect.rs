//! Grids, rectangularity, and fork insertion.
//!
//! Every slim rectangular lattice is reachable from a grid `C_p × C_q` by a
//! finite sequence of fork insertions at 4-cells. A [`ForkScript`] records
//! such a sequence so that any lattice produced here can be rebuilt exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{ElementId, FourCell, PlanarDiagram};
use crate::lattice::DiagramError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RectError {
    #[error("grid {p}x{q} is too small; both chains need at least 2 elements")]
    SpecTooSmall { p: usize, q: usize },
    #[error("diagram is not rectangular: {0}")]
    NotRectangular(NotRectangular),
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum NotRectangular {
    #[error("left boundary has doubly irreducible elements {0:?}, expected exactly one")]
    LeftCandidates(Vec<ElementId>),
    #[error("right boundary has doubly irreducible elements {0:?}, expected exactly one")]
    RightCandidates(Vec<ElementId>),
    #[error("corners {c_l} and {c_r} are not complementary")]
    NotComplementary { c_l: ElementId, c_r: ElementId },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForkError {
    #[error("{0:?} is not a 4-cell of the diagram")]
    NotACell(FourCell),
    #[error("fork insertion produced an invalid diagram: {0}")]
    ValidatorFailed(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScriptError {
    #[error(transparent)]
    Grid(#[from] RectError),
    #[error("step {step}: no 4-cell has bottom element {selector}")]
    NoCellAt { step: usize, selector: ElementId },
    #[error("step {step}: {count} 4-cells have bottom element {selector}")]
    AmbiguousSelector {
        step: usize,
        selector: ElementId,
        count: usize,
    },
    #[error("step {step}: {source}")]
    Fork {
        step: usize,
        #[source]
        source: ForkError,
    },
    #[error("step {step}: {reason}")]
    NotRectangular { step: usize, reason: NotRectangular },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridSpec {
    pub p: usize,
    pub q: usize,
}

impl GridSpec {
    pub fn new(p: usize, q: usize) -> Self {
        GridSpec { p, q }
    }
}

/// `C_p × C_q`. Element `(i, j)` has id `i·q + j`; its upper covers are
/// `(i+1, j)` on the left and `(i, j+1)` on the right.
pub fn grid(spec: GridSpec) -> Result<PlanarDiagram, RectError> {
    let GridSpec { p, q } = spec;
    if p < 2 || q < 2 {
        return Err(RectError::SpecTooSmall { p, q });
    }
    let id = |i: usize, j: usize| i * q + j;
    let mut upper = vec![Vec::new(); p * q];
    for i in 0..p {
        for j in 0..q {
            if i + 1 < p {
                upper[id(i, j)].push(id(i + 1, j));
            }
            if j + 1 < q {
                upper[id(i, j)].push(id(i, j + 1));
            }
        }
    }
    Ok(PlanarDiagram::build(upper).expect("grids are planar lattices"))
}

/// The corners `c_l`, `c_r` of a rectangular diagram.
///
/// The prime-ideal claim assumes `c_l ≠ 1̂` and `c_r ≠ 1̂`. Since `1̂` is
/// never doubly irreducible, both hold for every profile this module
/// returns; [`RectangularProfile::corners_below_top`]
/// states the check explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangularProfile {
    pub c_l: ElementId,
    pub c_r: ElementId,
}

impl RectangularProfile {
    pub fn corners_below_top(&self, d: &PlanarDiagram) -> bool {
        self.c_l != d.top() && self.c_r != d.top()
    }
}

fn doubly_irreducible(d: &PlanarDiagram, x: ElementId) -> bool {
    d.upper(x).len() == 1 && d.lower(x).len() == 1
}

pub fn rectangular_profile(d: &PlanarDiagram) -> Result<RectangularProfile, NotRectangular> {
    let (left, right) = d.boundary_chains();
    let candidates = |chain: &[ElementId]| -> Vec<ElementId> {
        chain.iter().copied().filter(|&x| doubly_irreducible(d, x)).collect()
    };
    let ls = candidates(&left);
    let rs = candidates(&right);
    if ls.len() != 1 {
        return Err(NotRectangular::LeftCandidates(ls));
    }
    if rs.len() != 1 {
        return Err(NotRectangular::RightCandidates(rs));
    }
    let (c_l, c_r) = (ls[0], rs[0]);
    if c_l == c_r || d.meet(c_l, c_r) != d.bottom() || d.join(c_l, c_r) != d.top() {
        return Err(NotRectangular::NotComplementary { c_l, c_r });
    }
    Ok(RectangularProfile { c_l, c_r })
}

/// Result of a fork insertion. New ids are assigned in the order
/// `m`, left leg top-down, right leg top-down, starting at the old size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForkResult {
    pub diagram: PlanarDiagram,
    pub m: ElementId,
    pub left_leg: Vec<ElementId>,
    pub right_leg: Vec<ElementId>,
}

impl ForkResult {
    pub fn added(&self) -> usize {
        1 + self.left_leg.len() + self.right_leg.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Edges `(o_k, corner_k)` subdivided on one side, starting with the cell's
/// own lower-left (or lower-right) edge and walking down through adjacent
/// cells until the edge lies on the boundary chain of that side.
fn staircase(d: &PlanarDiagram, cell: &FourCell, side: Side) -> Result<Vec<(ElementId, ElementId)>, ForkError> {
    let (left, right) = d.boundary_chains();
    let chain = if side == Side::Left { left } else { right };
    let on_boundary = |a: ElementId, b: ElementId| chain.windows(2).any(|w| w[0] == a && w[1] == b);

    let mut edges = vec![match side {
        Side::Left => (cell.o, cell.a_l),
        Side::Right => (cell.o, cell.a_r),
    }];
    loop {
        let (o, corner) = *edges.last().expect("non-empty");
        if on_boundary(o, corner) {
            return Ok(edges);
        }
        let lows = d.lower(corner);
        let pos = lows.iter().position(|&x| x == o).expect("o is a lower cover");
        let neighbour = match side {
            Side::Left => pos.checked_sub(1).map(|p| lows[p]),
            Side::Right => lows.get(pos + 1).copied(),
        }
        .ok_or_else(|| {
            ForkError::ValidatorFailed(format!(
                "edge {o} -> {corner} is off the boundary but has no neighbouring cell"
            ))
        })?;
        let bottom = d.meet(o, neighbour);
        let next = match side {
            Side::Left => FourCell {
                o: bottom,
                a_l: neighbour,
                a_r: o,
                t: corner,
            },
            Side::Right => FourCell {
                o: bottom,
                a_l: o,
                a_r: neighbour,
                t: corner,
            },
        };
        if !d.is_four_cell(&next) {
            return Err(ForkError::ValidatorFailed(format!(
                "staircase step {next:?} is not a 4-cell"
            )));
        }
        edges.push((bottom, neighbour));
    }
}

/// Inserts a fork into `cell`: a new element `m` under the cell's top, and
/// two staircases of edge-subdividing elements running down to the left and
/// right boundaries. The result is re-validated; any failure is fatal.
pub fn insert_fork(d: &PlanarDiagram, cell: &FourCell) -> Result<ForkResult, ForkError> {
    if !d.is_four_cell(cell) {
        return Err(ForkError::NotACell(*cell));
    }
    let left = staircase(d, cell, Side::Left)?;
    let right = staircase(d, cell, Side::Right)?;

    let n = d.len();
    let m = n;
    let left_leg: Vec<ElementId> = (0..left.len()).map(|k| n + 1 + k).collect();
    let right_leg: Vec<ElementId> = (0..right.len()).map(|k| n + 1 + left.len() + k).collect();

    let mut upper: Vec<Vec<usize>> = d.upper_lists().to_vec();
    upper.resize(n + 1 + left.len() + right.len(), Vec::new());
    upper[m] = vec![cell.t];
    for (k, &(o, corner)) in left.iter().enumerate() {
        let u = left_leg[k];
        let slot = upper[o].iter().position(|&x| x == corner).expect("edge exists");
        upper[o][slot] = u;
        let above = if k == 0 { m } else { left_leg[k - 1] };
        upper[u] = vec![corner, above];
    }
    for (k, &(o, corner)) in right.iter().enumerate() {
        let v = right_leg[k];
        let slot = upper[o].iter().position(|&x| x == corner).expect("edge exists");
        upper[o][slot] = v;
        let above = if k == 0 { m } else { right_leg[k - 1] };
        upper[v] = vec![above, corner];
    }

    let mut labels = d.labels().to_vec();
    labels.resize(upper.len(), None);
    let diagram = PlanarDiagram::build_labelled(upper, labels)
        .map_err(|e: DiagramError| ForkError::ValidatorFailed(e.to_string()))?;

    let result = ForkResult {
        diagram,
        m,
        left_leg,
        right_leg,
    };
    validate_fork(d, &result)?;
    Ok(result)
}

fn validate_fork(before: &PlanarDiagram, r: &ForkResult) -> Result<(), ForkError> {
    let after = &r.diagram;
    let fail = |what: &str| Err(ForkError::ValidatorFailed(what.to_owned()));
    if after.len() != before.len() + r.added() {
        return fail("element count");
    }
    if after.height(after.top()) != before.height(before.top()) + 1 {
        return fail("height of the top did not grow by one");
    }
    if !after.is_graded() {
        return fail("not graded");
    }
    if let Some((x, y)) = after.semimodularity_witness() {
        return Err(ForkError::ValidatorFailed(format!(
            "not semimodular (witness {x}, {y})"
        )));
    }
    if let Some(m3) = after.find_m3() {
        return Err(ForkError::ValidatorFailed(format!("not slim (M_3 at {m3:?})")));
    }
    if !after.is_planar_consistent() {
        return fail("cover lists are not planar-consistent");
    }
    Ok(())
}

/// A grid size plus the bottom elements of the cells forked, in order. Each
/// selector is an id in the diagram current at that step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ForkScript {
    pub grid: [usize; 2],
    pub steps: Vec<ElementId>,
}

impl ForkScript {
    pub fn new(p: usize, q: usize, steps: Vec<ElementId>) -> Self {
        ForkScript { grid: [p, q], steps }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid[0], self.grid[1])
    }

    pub fn then(&self, selector: ElementId) -> Self {
        let mut s = self.clone();
        s.steps.push(selector);
        s
    }
}

/// Resolves a selector to the unique cell with that bottom element.
pub fn resolve_selector(d: &PlanarDiagram, step: usize, selector: ElementId) -> Result<FourCell, ScriptError> {
    if selector >= d.len() {
        return Err(ScriptError::NoCellAt { step, selector });
    }
    let cells = d.cells_at(selector);
    match cells.len() {
        0 => Err(ScriptError::NoCellAt { step, selector }),
        1 => Ok(cells[0]),
        count => Err(ScriptError::AmbiguousSelector { step, selector, count }),
    }
}

/// Builds the grid and applies each fork in turn. The trace holds every
/// diagram of the sequence, grid first; each one is checked to be
/// rectangular. Step 0 is the grid; fork steps are numbered from 1.
pub fn run_script(script: &ForkScript) -> Result<(PlanarDiagram, Vec<PlanarDiagram>), ScriptError> {
    let mut current = grid(script.grid_spec())?;
    rectangular_profile(&current).map_err(|reason| ScriptError::NotRectangular { step: 0, reason })?;
    let mut trace = vec![current.clone()];
    for (i, &selector) in script.steps.iter().enumerate() {
        let step = i + 1;
        let cell = resolve_selector(&current, step, selector)?;
        let forked = insert_fork(&current, &cell).map_err(|source| ScriptError::Fork { step, source })?;
        rectangular_profile(&forked.diagram).map_err(|reason| ScriptError::NotRectangular { step, reason })?;
        current = forked.diagram;
        trace.push(current.clone());
    }
    Ok((current, trace))
}
