//! Construction and verification toolkit for slim rectangular lattices.
//!
//! Lattices are built from grids by fork insertion ([`rect`]), their
//! congruence lattices are computed exactly ([`congruence`]), and families
//! of them are enumerated up to isomorphism and checked against dual-atom,
//! prime-ideal and join-irreducible-cover properties ([`search`]).

mod bits;
pub mod canon;
pub mod cli;
pub mod congruence;
pub mod diagram;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod lattice;
pub mod rect;
pub mod search;

pub use congruence::{
    all_congruences_oracle, check_p1, check_p2, congruence_lattice, filter_candidate, is_prime_ideal,
    ji_congruence_poset, lattice_isomorphic, prime_ideal_congruence, principal_congruence, principal_ideal,
    CongruenceLattice, JiPoset, P2Status, Partition,
};
pub use diagram::{ElementId, FourCell, PlanarDiagram};
pub use exec::Execution;
pub use lattice::{DiagramError, DualAtoms, FiniteLattice};
pub use rect::{grid, insert_fork, rectangular_profile, run_script, ForkResult, ForkScript, GridSpec};
pub use search::{enumerate_family, search_representation, verify_claims, ClaimReport, EnumSpec, FamilyIndex};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
