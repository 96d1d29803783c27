use std::collections::BTreeSet;

use sps_core::fixtures;
use sps_core::search::{
    CampaignOptions, ExpansionOrder, SearchError, CLAIM_NOT_C3, CLAIM_P1, CLAIM_P2, CLAIM_PRIME, NOTE_SINGLE_DUAL_ATOM,
};
use sps_core::{
    congruence_lattice, enumerate_family, principal_congruence, search_representation, verify_claims, EnumSpec,
    Execution, ForkScript, Partition,
};

fn opts(exec: Execution, order: ExpansionOrder) -> CampaignOptions {
    CampaignOptions { exec, order }
}

#[test]
fn small_family_passes_every_claim() {
    let spec = EnumSpec::new(3, 3, 1);
    let fam = enumerate_family(&spec, CampaignOptions::default()).unwrap();
    // grids 2x2, 2x3, 3x3 (transposes coincide) plus their single forks
    assert_eq!(fam.members_by_forks()[&0], 3);
    let report = verify_claims(&fam, Some(&spec), Execution::default());
    assert!(report.all_pass(), "{:?}", report.counterexamples);
    for claim in [CLAIM_P2, CLAIM_P1, CLAIM_PRIME, CLAIM_NOT_C3] {
        let t = report.tally(claim);
        assert_eq!(t.checked, fam.len(), "{claim}");
        assert_eq!(t.failed, 0, "{claim}");
    }
}

#[test]
fn s7_dual_atoms_in_the_square_family() {
    let fam = enumerate_family(&EnumSpec::new(2, 2, 2), CampaignOptions::default()).unwrap();
    let entry = fam
        .members()
        .find(|e| e.script == ForkScript::new(2, 2, vec![0]))
        .expect("S_7 is the first fork of the square");
    assert!(entry.diagram.is_isomorphic(&fixtures::s7()));
    let d = &entry.diagram;
    // the two doubly irreducible atoms are the new elements below m
    let atoms: Vec<usize> = d.upper(d.bottom()).to_vec();
    assert_eq!(atoms.len(), 2);
    let expect: BTreeSet<Partition> = atoms.iter().map(|&u| principal_congruence(d, d.bottom(), u)).collect();
    let con = congruence_lattice(d);
    let got: BTreeSet<Partition> = con.dual_atoms().into_iter().cloned().collect();
    assert_eq!(got, expect);
}

#[test]
fn two_element_target_has_no_witness() {
    let spec = EnumSpec::new(4, 4, 3).with_max_elements(40);
    let out = search_representation(&fixtures::chain(2), &spec, CampaignOptions::default()).unwrap();
    assert!(out.scanned);
    assert!(out.witnesses.is_empty());
    assert!(out.family_size > 0);
}

#[test]
fn chain_target_is_rejected_without_scanning() {
    let spec = EnumSpec::new(4, 4, 3);
    let out = search_representation(&fixtures::chain(3), &spec, CampaignOptions::default()).unwrap();
    assert!(!out.scanned);
    assert_eq!(out.note.as_deref(), Some(NOTE_SINGLE_DUAL_ATOM));
}

#[test]
fn boolean_square_is_found() {
    let spec = EnumSpec::new(3, 3, 1);
    let out = search_representation(&fixtures::boolean(2), &spec, CampaignOptions::default()).unwrap();
    assert_eq!(out.witnesses, vec![ForkScript::new(2, 2, vec![])]);
}

#[test]
fn parallel_and_sequential_agree() {
    let spec = EnumSpec::new(3, 4, 2);
    let runs: Vec<_> = [
        opts(Execution::default(), ExpansionOrder::Sorted),
        opts(Execution::Sequential, ExpansionOrder::Sorted),
        opts(Execution::Sequential, ExpansionOrder::Shuffled(11)),
    ]
    .into_iter()
    .map(|o| {
        let fam = enumerate_family(&spec, o).unwrap();
        let report = verify_claims(&fam, Some(&spec), o.exec);
        let scripts: Vec<ForkScript> = fam.members().map(|e| e.script.clone()).collect();
        (fam.keys(), scripts, report.to_json(false))
    })
    .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn budgets() {
    let err = enumerate_family(
        &EnumSpec {
            max_classes: 5,
            ..EnumSpec::new(3, 3, 2)
        },
        CampaignOptions::default(),
    );
    assert!(matches!(err, Err(SearchError::BudgetExceeded { .. })));

    // a 9-element cap keeps grids up to 3x3 and drops every fork that grows past it
    let fam = enumerate_family(&EnumSpec::new(3, 3, 2).with_max_elements(9), CampaignOptions::default()).unwrap();
    assert!(fam.members().all(|e| e.stats.elements <= 9));

    assert!(matches!(
        enumerate_family(&EnumSpec::new(1, 3, 1), CampaignOptions::default()),
        Err(SearchError::BadSpec(_))
    ));
}

#[test]
fn min_forks_drops_shallow_levels() {
    let fam = enumerate_family(&EnumSpec::new(3, 3, 2).with_min_forks(1), CampaignOptions::default()).unwrap();
    assert!(fam.members().all(|e| e.stats.forks >= 1));
}
