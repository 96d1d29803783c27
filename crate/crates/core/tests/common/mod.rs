#![allow(dead_code)]

use sps_core::diagram::PlanarDiagram;
use sps_core::fixtures;
use sps_core::rect::{grid, run_script, ForkScript, GridSpec};
use sps_core::search::{enumerate_family, CampaignOptions, EnumSpec};

/// Named diagrams shared by the integration tests: small fixtures, grids
/// up to 5x5, and every class with at most two forks on grids up to 3x3.
pub fn corpus() -> Vec<(String, PlanarDiagram)> {
    let mut out: Vec<(String, PlanarDiagram)> = vec![
        ("C_1".into(), fixtures::chain(1)),
        ("C_2".into(), fixtures::chain(2)),
        ("C_3".into(), fixtures::chain(3)),
        ("C_5".into(), fixtures::chain(5)),
        ("N_5".into(), fixtures::n5()),
        ("M_3".into(), fixtures::m3()),
        ("S_7".into(), fixtures::s7()),
    ];
    for p in 2..=5 {
        for q in 2..=5 {
            out.push((format!("grid({p},{q})"), grid(GridSpec::new(p, q)).unwrap()));
        }
    }
    let fam = enumerate_family(&EnumSpec::new(3, 3, 2), CampaignOptions::default()).unwrap();
    for e in fam.members().filter(|e| !e.script.steps.is_empty()) {
        out.push((format!("{:?}", e.script), e.diagram.clone()));
    }
    out
}

pub fn script(p: usize, q: usize, steps: &[usize]) -> PlanarDiagram {
    run_script(&ForkScript::new(p, q, steps.to_vec())).unwrap().0
}

/// Relabels with the permutation `perm` (element `x` becomes `perm[x]`).
pub fn relabel(d: &PlanarDiagram, perm: &[usize]) -> PlanarDiagram {
    d.permuted(perm).unwrap()
}
