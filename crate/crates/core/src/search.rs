//! Bounded enumeration of grid-plus-fork lattices up to isomorphism, the
//! claim checks run over the family, and the representation search.
//!
//! Enumeration is breadth first by number of forks. Each frontier diagram is
//! one unit of work: all its fork insertions are computed (in parallel when
//! enabled) and the candidates are merged by canonical key. Ties between
//! witnesses of the same class are broken by the smallest script, so the
//! resulting index does not depend on the order the work was done in.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{
    congruence_lattice, filter_candidate, ji_poset_has_at_most_two_covers, lattice_isomorphic, prime_ideal_congruence,
    principal_ideal, CandidateFilter, CongruenceError, CongruenceLattice, Partition,
};
use crate::diagram::PlanarDiagram;
use crate::exec::{map_ordered, Execution};
use crate::lattice::{DualAtoms, FiniteLattice};
use crate::rect::{
    grid, insert_fork, rectangular_profile, resolve_selector, ForkError, ForkScript, GridSpec, NotRectangular,
};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid enumeration bounds: {0}")]
    BadSpec(String),
    #[error("family exceeds the class budget ({classes} > {limit})")]
    BudgetExceeded { classes: usize, limit: usize },
    #[error("fork failed for {script:?}: {source}")]
    Fork {
        script: ForkScript,
        #[source]
        source: ForkError,
    },
    #[error("selector is ambiguous for {script:?}")]
    Selector { script: ForkScript },
    #[error("{script:?} produced a non-rectangular diagram: {reason}")]
    NotRectangular { script: ForkScript, reason: NotRectangular },
    #[error("invalid target: {0}")]
    Target(#[from] CongruenceError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub p_max: usize,
    pub q_max: usize,
    pub max_forks: usize,
    #[serde(default)]
    pub min_forks: usize,
    pub max_elements: usize,
    pub max_classes: usize,
}

impl Default for EnumSpec {
    fn default() -> Self {
        EnumSpec {
            p_max: 4,
            q_max: 4,
            max_forks: 3,
            min_forks: 0,
            max_elements: 40,
            max_classes: 100_000,
        }
    }
}

impl EnumSpec {
    pub fn new(p_max: usize, q_max: usize, max_forks: usize) -> Self {
        EnumSpec {
            p_max,
            q_max,
            max_forks,
            ..EnumSpec::default()
        }
    }

    pub fn with_max_elements(mut self, max_elements: usize) -> Self {
        self.max_elements = max_elements;
        self
    }

    pub fn with_min_forks(mut self, min_forks: usize) -> Self {
        self.min_forks = min_forks;
        self
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.p_max < 2 || self.q_max < 2 {
            return Err(SearchError::BadSpec(format!(
                "grid bounds must be at least 2, got {}x{}",
                self.p_max, self.q_max
            )));
        }
        if self.min_forks > self.max_forks {
            return Err(SearchError::BadSpec(format!(
                "min_forks {} exceeds max_forks {}",
                self.min_forks, self.max_forks
            )));
        }
        Ok(())
    }
}

/// Order in which frontier diagrams are handed out for expansion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExpansionOrder {
    #[default]
    Sorted,
    Shuffled(u64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CampaignOptions {
    pub exec: Execution,
    pub order: ExpansionOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryStats {
    pub elements: usize,
    pub forks: usize,
    pub height: usize,
    pub cells: usize,
}

#[derive(Clone, Debug)]
pub struct FamilyEntry {
    pub diagram: PlanarDiagram,
    pub script: ForkScript,
    pub stats: EntryStats,
}

/// One entry per isomorphism class, keyed and ordered by canonical key.
#[derive(Clone, Debug, Default)]
pub struct FamilyIndex {
    entries: BTreeMap<Vec<u8>, FamilyEntry>,
    insertions: usize,
}

impl FamilyIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u8>, &FamilyEntry)> {
        self.entries.iter()
    }

    pub fn members(&self) -> impl Iterator<Item = &FamilyEntry> {
        self.entries.values()
    }

    pub fn keys(&self) -> Vec<Vec<u8>> {
        self.entries.keys().cloned().collect()
    }

    pub fn get(&self, key: &[u8]) -> Option<&FamilyEntry> {
        self.entries.get(key)
    }

    /// Fork insertions performed while building the family.
    pub fn insertions(&self) -> usize {
        self.insertions
    }

    pub fn members_by_forks(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in self.members() {
            *h.entry(e.stats.forks).or_insert(0) += 1;
        }
        h
    }
}

struct Candidate {
    key: Vec<u8>,
    diagram: PlanarDiagram,
    script: ForkScript,
}

fn candidate(diagram: PlanarDiagram, script: ForkScript) -> Candidate {
    Candidate {
        key: diagram.canonical_key(),
        diagram,
        script,
    }
}

fn expand(d: &PlanarDiagram, script: &ForkScript, max_elements: usize) -> Result<(Vec<Candidate>, usize), SearchError> {
    let step = script.steps.len() + 1;
    let mut out = Vec::new();
    let mut performed = 0;
    for cell in d.four_cells() {
        let next = script.then(cell.o);
        match resolve_selector(d, step, cell.o) {
            Ok(c) if c == cell => {}
            _ => return Err(SearchError::Selector { script: next }),
        }
        let forked = insert_fork(d, &cell).map_err(|source| SearchError::Fork {
            script: next.clone(),
            source,
        })?;
        performed += 1;
        if let Err(reason) = rectangular_profile(&forked.diagram) {
            return Err(SearchError::NotRectangular { script: next, reason });
        }
        if forked.diagram.len() <= max_elements {
            out.push(candidate(forked.diagram, next));
        }
    }
    Ok((out, performed))
}

/// Merges candidates into the index; returns the keys of new classes.
fn merge(
    index: &mut BTreeMap<Vec<u8>, FamilyEntry>,
    mut candidates: Vec<Candidate>,
    limit: usize,
) -> Result<Vec<Vec<u8>>, SearchError> {
    candidates.sort_by(|a, b| a.key.cmp(&b.key).then_with(|| a.script.cmp(&b.script)));
    let mut fresh = Vec::new();
    for c in candidates {
        if index.contains_key(&c.key) {
            continue;
        }
        let stats = EntryStats {
            elements: c.diagram.len(),
            forks: c.script.steps.len(),
            height: c.diagram.height(c.diagram.top()),
            cells: c.diagram.four_cells().len(),
        };
        fresh.push(c.key.clone());
        index.insert(
            c.key,
            FamilyEntry {
                diagram: c.diagram,
                script: c.script,
                stats,
            },
        );
        if index.len() > limit {
            return Err(SearchError::BudgetExceeded {
                classes: index.len(),
                limit,
            });
        }
    }
    Ok(fresh)
}

pub fn enumerate_family(spec: &EnumSpec, opts: CampaignOptions) -> Result<FamilyIndex, SearchError> {
    spec.validate()?;
    let mut index = BTreeMap::new();
    let mut grids = Vec::new();
    for p in 2..=spec.p_max {
        for q in 2..=spec.q_max {
            if p * q > spec.max_elements {
                continue;
            }
            let g = grid(GridSpec::new(p, q)).expect("bounds validated");
            if let Err(reason) = rectangular_profile(&g) {
                return Err(SearchError::NotRectangular {
                    script: ForkScript::new(p, q, vec![]),
                    reason,
                });
            }
            grids.push(candidate(g, ForkScript::new(p, q, vec![])));
        }
    }
    let mut frontier = merge(&mut index, grids, spec.max_classes)?;
    let mut insertions = 0;

    for level in 1..=spec.max_forks {
        let mut work: Vec<(PlanarDiagram, ForkScript)> = frontier
            .iter()
            .map(|k| {
                let e = &index[k];
                (e.diagram.clone(), e.script.clone())
            })
            .collect();
        if let ExpansionOrder::Shuffled(seed) = opts.order {
            let mut rng = StdRng::seed_from_u64(seed.wrapping_add(level as u64));
            work.shuffle(&mut rng);
        }
        let results = map_ordered(opts.exec, &work, |(d, s)| expand(d, s, spec.max_elements));
        let mut candidates = Vec::new();
        for r in results {
            let (c, performed) = r?;
            insertions += performed;
            candidates.extend(c);
        }
        frontier = merge(&mut index, candidates, spec.max_classes)?;
        if frontier.is_empty() {
            break;
        }
    }

    if spec.min_forks > 0 {
        index.retain(|_, e| e.stats.forks >= spec.min_forks);
    }
    Ok(FamilyIndex {
        entries: index,
        insertions,
    })
}

pub const CLAIM_P2: &str = "p2_two_dual_atoms";
pub const CLAIM_P1: &str = "p1_two_ji_covers";
pub const CLAIM_PRIME: &str = "corner_prime_ideals";
pub const CLAIM_NOT_C3: &str = "con_not_three_chain";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClaimTally {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub exempt: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub claim: String,
    pub script: ForkScript,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub tool_version: String,
    pub spec: Option<EnumSpec>,
    pub family_size: usize,
    pub insertions: usize,
    pub members_by_forks: BTreeMap<usize, usize>,
    pub claims: BTreeMap<String, ClaimTally>,
    pub counterexamples: Vec<Counterexample>,
    pub wall_time_ms: u64,
}

impl ClaimReport {
    pub fn all_pass(&self) -> bool {
        self.counterexamples.is_empty() && self.claims.values().all(|t| t.failed == 0)
    }

    pub fn tally(&self, claim: &str) -> ClaimTally {
        self.claims.get(claim).cloned().unwrap_or_default()
    }

    /// Pretty JSON with sorted keys; `wall_time_ms` is zeroed unless
    /// `with_timing` is set, so reruns compare byte for byte.
    pub fn to_json(&self, with_timing: bool) -> String {
        let mut r = self.clone();
        if !with_timing {
            r.wall_time_ms = 0;
        }
        let value = serde_json::to_value(&r).expect("report serialises");
        serde_json::to_string_pretty(&value).expect("report serialises")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Outcome {
    Pass,
    Exempt,
    Fail(String),
}

/// The two corner prime ideals and their congruences, each checked
/// directly: the partition is a congruence and nothing strictly between it
/// and the total relation exists.
fn corner_prime_claim(d: &PlanarDiagram, con: &CongruenceLattice) -> Outcome {
    let prof = match rectangular_profile(d) {
        Ok(p) => p,
        Err(e) => return Outcome::Fail(format!("not rectangular: {e}")),
    };
    if !prof.corners_below_top(d) {
        return Outcome::Exempt;
    }
    let il = principal_ideal(d, prof.c_l);
    let ir = principal_ideal(d, prof.c_r);
    if il.members == ir.members {
        return Outcome::Fail("corner ideals coincide".into());
    }
    let mut thetas: Vec<Partition> = Vec::new();
    for ideal in [&il, &ir] {
        let theta = match prime_ideal_congruence(d, &ideal.members) {
            Ok(t) => t,
            Err(e) => return Outcome::Fail(format!("[0, {}]: {e}", ideal.generator)),
        };
        if !theta.is_congruence(d) {
            return Outcome::Fail(format!("[0, {}] partition is not a congruence", ideal.generator));
        }
        let strictly_above_is_total = con
            .members()
            .iter()
            .filter(|m| *m != &theta && theta.refines(m))
            .all(Partition::is_total);
        if theta.is_total() || !strictly_above_is_total || !con.is_dual_atom(&theta) {
            return Outcome::Fail(format!("[0, {}] congruence is not a dual atom", ideal.generator));
        }
        thetas.push(theta);
    }
    if thetas[0] == thetas[1] {
        return Outcome::Fail("corner congruences coincide".into());
    }
    Outcome::Pass
}

fn verify_member(d: &PlanarDiagram) -> Vec<(&'static str, Outcome)> {
    let con = congruence_lattice(d);
    let ji = con.ji_poset();
    let coatoms = con.dual_atom_count();
    let maxima = ji.maximal().len();

    let p2 = if coatoms != maxima {
        Outcome::Fail(format!("{coatoms} coatoms but {maxima} maximal join-irreducibles"))
    } else if d.len() <= 2 {
        Outcome::Exempt
    } else if coatoms >= 2 {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("{coatoms} dual atoms"))
    };
    let p1 = if ji_poset_has_at_most_two_covers(&ji) {
        Outcome::Pass
    } else {
        Outcome::Fail("a join-irreducible congruence has three or more covers".into())
    };
    let prime = corner_prime_claim(d, &con);
    let not_c3 = if con.len() == 3 && lattice_isomorphic(con.order(), &FiniteLattice::chain(3)) {
        Outcome::Fail("Con L is the three-element chain".into())
    } else {
        Outcome::Pass
    };
    vec![
        (CLAIM_P2, p2),
        (CLAIM_P1, p1),
        (CLAIM_PRIME, prime),
        (CLAIM_NOT_C3, not_c3),
    ]
}

pub fn verify_claims(family: &FamilyIndex, spec: Option<&EnumSpec>, exec: Execution) -> ClaimReport {
    let start = Instant::now();
    let members: Vec<&FamilyEntry> = family.members().collect();
    let verdicts = map_ordered(exec, &members, |e| verify_member(&e.diagram));

    let mut claims: BTreeMap<String, ClaimTally> = [CLAIM_P2, CLAIM_P1, CLAIM_PRIME, CLAIM_NOT_C3]
        .into_iter()
        .map(|c| (c.to_owned(), ClaimTally::default()))
        .collect();
    let mut counterexamples = Vec::new();
    for (entry, outcomes) in members.iter().zip(verdicts) {
        for (claim, outcome) in outcomes {
            let t = claims.get_mut(claim).expect("known claim");
            t.checked += 1;
            match outcome {
                Outcome::Pass => t.passed += 1,
                Outcome::Exempt => t.exempt += 1,
                Outcome::Fail(detail) => {
                    t.failed += 1;
                    counterexamples.push(Counterexample {
                        claim: claim.to_owned(),
                        script: entry.script.clone(),
                        detail,
                    });
                }
            }
        }
    }

    ClaimReport {
        tool_version: crate::VERSION.to_owned(),
        spec: spec.cloned(),
        family_size: family.len(),
        insertions: family.insertions(),
        members_by_forks: family.members_by_forks(),
        claims,
        counterexamples,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}

pub const NOTE_SINGLE_DUAL_ATOM: &str = "single dual atom";
pub const NOTE_P1: &str = "join-irreducible with more than two covers";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepresentationOutcome {
    pub witnesses: Vec<ForkScript>,
    pub note: Option<String>,
    pub filter: Option<CandidateFilter>,
    pub scanned: bool,
    pub family_size: usize,
}

/// Looks for family members whose congruence lattice is isomorphic to
/// `target`. Candidates failing a necessary condition are rejected before
/// any enumeration happens.
pub fn search_representation(
    target: &FiniteLattice,
    spec: &EnumSpec,
    opts: CampaignOptions,
) -> Result<RepresentationOutcome, SearchError> {
    let filter = if target.len() > 2 {
        Some(filter_candidate(target)?)
    } else {
        None
    };
    let rejected = filter.and_then(|f| {
        if !f.p2_ok {
            Some(NOTE_SINGLE_DUAL_ATOM)
        } else if !f.p1_ok {
            Some(NOTE_P1)
        } else {
            None
        }
    });
    if let Some(note) = rejected {
        return Ok(RepresentationOutcome {
            witnesses: Vec::new(),
            note: Some(note.to_owned()),
            filter,
            scanned: false,
            family_size: 0,
        });
    }

    let family = enumerate_family(spec, opts)?;
    let members: Vec<&FamilyEntry> = family.members().collect();
    let hits = map_ordered(opts.exec, &members, |e| {
        let con = congruence_lattice(&e.diagram);
        con.len() == target.len()
            && con.order().cover_count() == target.cover_count()
            && lattice_isomorphic(con.order(), target)
    });
    let witnesses = members
        .iter()
        .zip(hits)
        .filter(|(_, hit)| *hit)
        .map(|(e, _)| e.script.clone())
        .collect();
    Ok(RepresentationOutcome {
        witnesses,
        note: None,
        filter,
        scanned: true,
        family_size: family.len(),
    })
}
