//! Depth-truncated group analysis: triviality with witnesses, equality,
//! orders, commutation, growth profiles, relation suites, and a
//! self-similarity falsifier.
//!
//! Everything here is finite evidence. A `Nontrivial` verdict carries a
//! witness word and is a global certificate; a `Trivial(d)` verdict only
//! says that no word of length at most `d` distinguishes the element from
//! the identity. The engine explores the section tree rather than the word
//! tree: a subtree is trivial iff the root permutation is the identity and
//! every section is trivial one level lower, and sections are memoized on
//! their simplified factor words, which collapses the search on the highly
//! self-referential elements this crate cares about.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::action::{advance_factors, simplify_factors, Factor, GroupElement};
use crate::alphabet::TreeWord;
use crate::automaton::TVAutomaton;
use crate::Result;

/// Outcome of a truncated word-problem query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialityVerdict {
    /// The element fixes every word of length at most `depth`. Evidence,
    /// never a global claim.
    Trivial { depth: usize },
    /// The element moves `witness` — a global certificate of nontriviality.
    Nontrivial { witness: TreeWord },
}

impl TrivialityVerdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, TrivialityVerdict::Trivial { .. })
    }

    pub fn witness(&self) -> Option<&TreeWord> {
        match self {
            TrivialityVerdict::Trivial { .. } => None,
            TrivialityVerdict::Nontrivial { witness } => Some(witness),
        }
    }
}

impl fmt::Display for TrivialityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrivialityVerdict::Trivial { depth } => write!(f, "Trivial({depth})"),
            TrivialityVerdict::Nontrivial { witness } => {
                write!(f, "Nontrivial(witness={witness})")
            }
        }
    }
}

/// Memoized section-tree explorer. One engine per top-level query family;
/// entries are keyed on (level, simplified factor word) and record both the
/// depth to which the word is known trivial and the best witness found so
/// far together with the budget it was searched under.
struct Engine {
    automaton: TVAutomaton,
    memo: HashMap<(usize, Vec<Factor>), MemoEntry>,
}

#[derive(Default)]
struct MemoEntry {
    trivial_to: usize,
    /// Lexicographically smallest witness found, with the budget of the
    /// search that found it. A stored witness answers a query of budget `b`
    /// only when `witness.len() <= b <= searched`: smaller budgets may admit
    /// no witness at all, larger ones a lexicographically smaller one.
    witness: Option<(Vec<usize>, usize)>,
}

impl Engine {
    fn new(automaton: &TVAutomaton) -> Self {
        Engine {
            automaton: automaton.clone(),
            memo: HashMap::new(),
        }
    }

    fn verdict(&mut self, element: &GroupElement, depth: usize) -> Result<TrivialityVerdict> {
        debug_assert!(element.automaton().same_machine(&self.automaton));
        let factors = simplify_factors(element.factors().iter().copied());
        Ok(match self.search(element.base_level(), factors, depth)? {
            None => TrivialityVerdict::Trivial { depth },
            Some(letters) => TrivialityVerdict::Nontrivial {
                witness: TreeWord::new(element.base_level(), letters),
            },
        })
    }

    /// Lexicographically smallest word of length ≤ `budget` moved by the
    /// factor word, or `None`. Letters are explored in increasing order, so
    /// the first failure found is the smallest: a misplaced first letter
    /// beats every longer word below it, and clean subtrees are fully
    /// recursed before the next letter is considered.
    fn search(
        &mut self,
        level: usize,
        factors: Vec<Factor>,
        budget: usize,
    ) -> Result<Option<Vec<usize>>> {
        if factors.is_empty() || budget == 0 {
            return Ok(None);
        }
        let key = (level, factors);
        if let Some(entry) = self.memo.get(&key) {
            if budget <= entry.trivial_to {
                return Ok(None);
            }
            if let Some((witness, searched)) = &entry.witness {
                if witness.len() <= budget && budget <= *searched {
                    return Ok(Some(witness.clone()));
                }
            }
        }
        let tables = self.automaton.tables_at(level)?;
        let mut found = None;
        for x in 0..tables.size() {
            let (section, image) =
                advance_factors(&self.automaton, &tables, level, &key.1, x)?;
            if image != x {
                found = Some(vec![x]);
                break;
            }
            let section = simplify_factors(section);
            if let Some(tail) = self.search(level + 1, section, budget - 1)? {
                let mut word = Vec::with_capacity(tail.len() + 1);
                word.push(x);
                word.extend(tail);
                found = Some(word);
                break;
            }
        }
        let entry = self.memo.entry(key).or_default();
        match &found {
            None => entry.trivial_to = entry.trivial_to.max(budget),
            Some(witness) => {
                let replace = match &entry.witness {
                    None => true,
                    Some((_, searched)) => budget > *searched,
                };
                if replace {
                    entry.witness = Some((witness.clone(), budget));
                }
            }
        }
        Ok(found)
    }
}

fn assert_same_machine(e1: &GroupElement, e2: &GroupElement) {
    assert!(
        e1.same_machine(e2),
        "analysis requires elements of one machine at one base level"
    );
}

/// Whether the element fixes every word of length at most `depth`; if not,
/// the lexicographically smallest moved word.
pub fn is_trivial_to_depth(element: &GroupElement, depth: usize) -> Result<TrivialityVerdict> {
    Engine::new(element.automaton()).verdict(element, depth)
}

/// Verdict for `e1 · e2⁻¹`: trivial means the two elements agree on every
/// word of length at most `depth`.
///
/// # Panics
/// When the elements live on different machines or base levels.
pub fn equal_to_depth(
    e1: &GroupElement,
    e2: &GroupElement,
    depth: usize,
) -> Result<TrivialityVerdict> {
    assert_same_machine(e1, e2);
    is_trivial_to_depth(&e1.mul(&e2.inverse()), depth)
}

/// Verdict for the commutator `e1⁻¹ e2⁻¹ e1 e2`.
///
/// # Panics
/// When the elements live on different machines or base levels.
pub fn commutes_to_depth(
    e1: &GroupElement,
    e2: &GroupElement,
    depth: usize,
) -> Result<TrivialityVerdict> {
    assert_same_machine(e1, e2);
    is_trivial_to_depth(&e1.commutator(e2), depth)
}

/// Result of an order search on the depth-truncated tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderVerdict {
    /// Exact order of the induced automorphism of the depth-`d` truncation.
    /// The order of the element itself, when finite, is a multiple of every
    /// truncation order; `Exact` never claims finiteness of the element.
    Exact(u64),
    /// No power up to the bound acts trivially on the truncation.
    ExceedsBound,
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderVerdict::Exact(m) => write!(f, "Exact({m})"),
            OrderVerdict::ExceedsBound => write!(f, "ExceedsBound"),
        }
    }
}

/// Smallest `m ≤ bound` with `element^m` trivial to `depth`.
pub fn order_on_truncation(
    element: &GroupElement,
    depth: usize,
    bound: u64,
) -> Result<OrderVerdict> {
    let mut engine = Engine::new(element.automaton());
    let mut power = GroupElement::identity(element.automaton(), element.base_level());
    for m in 1..=bound {
        power = power.mul(element);
        if engine.verdict(&power, depth)?.is_trivial() {
            return Ok(OrderVerdict::Exact(m));
        }
    }
    Ok(OrderVerdict::ExceedsBound)
}

/// For `r = 0..=radius`, the number of distinct depth-`depth` truncated
/// actions among products of at most `r` generators and inverse generators.
/// Counts with no generators are all 1 (the identity alone).
///
/// # Panics
/// When the generators do not share one machine and base level.
pub fn ball_profile(
    generators: &[GroupElement],
    radius: usize,
    depth: usize,
) -> Result<Vec<u64>> {
    let mut counts = vec![1u64];
    let first = match generators.first() {
        Some(first) => first,
        None => return Ok(vec![1; radius + 1]),
    };
    for g in generators {
        assert_same_machine(first, g);
    }
    let mut engine = Engine::new(first.automaton());
    let identity = GroupElement::identity(first.automaton(), first.base_level());
    let mut steps: Vec<GroupElement> = Vec::new();
    for g in generators {
        steps.push(g.clone());
        steps.push(g.inverse());
    }

    let mut seen_words: HashSet<Vec<Factor>> = HashSet::new();
    seen_words.insert(Vec::new());
    let mut representatives: Vec<GroupElement> = vec![identity.clone()];
    let mut frontier: Vec<GroupElement> = vec![identity];
    for _ in 1..=radius {
        let mut next_frontier = Vec::new();
        for e in &frontier {
            for s in &steps {
                let candidate = e.mul(s).simplify();
                if !seen_words.insert(candidate.factors().to_vec()) {
                    continue;
                }
                let mut new = true;
                for rep in &representatives {
                    let difference = candidate.mul(&rep.inverse());
                    if engine.verdict(&difference, depth)?.is_trivial() {
                        new = false;
                        break;
                    }
                }
                if new {
                    representatives.push(candidate.clone());
                    next_frontier.push(candidate);
                }
            }
        }
        counts.push(representatives.len() as u64);
        frontier = next_frontier;
    }
    Ok(counts)
}

/// Default depth cap for [`ball_profile_stabilized`].
pub const DEFAULT_STABILIZE_CAP: usize = 16;

/// A ball profile together with the depth search that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizedProfile {
    pub profile: Vec<u64>,
    /// Depth at which the returned profile was computed.
    pub depth: usize,
    /// True when the profile agreed with the one computed at the previous
    /// (half) depth; false when the cap was reached without agreement.
    pub stabilized: bool,
}

/// Doubles the comparison depth — 2, 4, 8, … up to `cap` — until two
/// consecutive profiles agree. Deeper comparison can only split truncated
/// classes further, so agreement is evidence (not proof) that the profile
/// has converged.
pub fn ball_profile_stabilized(
    generators: &[GroupElement],
    radius: usize,
    cap: usize,
) -> Result<StabilizedProfile> {
    let cap = cap.max(2);
    let mut depth = 2;
    let mut profile = ball_profile(generators, radius, depth)?;
    while depth < cap {
        let next_depth = (depth * 2).min(cap);
        let next = ball_profile(generators, radius, next_depth)?;
        if next == profile {
            return Ok(StabilizedProfile {
                profile: next,
                depth: next_depth,
                stabilized: true,
            });
        }
        depth = next_depth;
        profile = next;
    }
    Ok(StabilizedProfile {
        profile,
        depth,
        stabilized: false,
    })
}

/// A relator that distinguishes two shifts of one machine: trivial to the
/// full depth at one, moving a concrete witness at the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Factor text of the relator.
    pub relator: String,
    pub shift_trivial: usize,
    pub shift_nontrivial: usize,
    pub witness: TreeWord,
}

/// Looks for a relator whose triviality verdict differs between two shifts.
/// `None` means no counterexample at this depth — never a proof that the
/// shifts generate isomorphic groups. Relators are re-anchored at each
/// shift; the first counterexample in (relator, shift-pair) order is
/// returned.
pub fn selfsim_falsify(
    relators: &[GroupElement],
    shifts: &[usize],
    depth: usize,
) -> Result<Option<Counterexample>> {
    for relator in relators {
        let mut engine = Engine::new(relator.automaton());
        let mut verdicts = Vec::with_capacity(shifts.len());
        for &k in shifts {
            verdicts.push(engine.verdict(&relator.at_level(k), depth)?);
        }
        for i in 0..shifts.len() {
            for j in (i + 1)..shifts.len() {
                let pair = match (&verdicts[i], &verdicts[j]) {
                    (
                        TrivialityVerdict::Trivial { .. },
                        TrivialityVerdict::Nontrivial { witness },
                    ) => Some((shifts[i], shifts[j], witness.clone())),
                    (
                        TrivialityVerdict::Nontrivial { witness },
                        TrivialityVerdict::Trivial { .. },
                    ) => Some((shifts[j], shifts[i], witness.clone())),
                    _ => None,
                };
                if let Some((shift_trivial, shift_nontrivial, witness)) = pair {
                    return Ok(Some(Counterexample {
                        relator: relator.factor_text(),
                        shift_trivial,
                        shift_nontrivial,
                        witness,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// What a suite relation is expected to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expectation {
    Trivial,
    Nontrivial,
}

/// One named relation of a preset suite.
#[derive(Clone)]
pub struct SuiteRelation {
    pub name: String,
    pub element: GroupElement,
    pub expect: Expectation,
}

/// A named set of relations shipped with a preset.
#[derive(Clone, Default)]
pub struct RelationSuite {
    pub name: String,
    pub relations: Vec<SuiteRelation>,
}

/// Evaluation record of one relation.
#[derive(Debug, Clone, Serialize)]
pub struct RelationRecord {
    pub name: String,
    pub element: String,
    pub base_level: usize,
    pub expected: Expectation,
    pub verdict: String,
    /// Witness in display letters, present for nontrivial verdicts.
    pub witness: Option<String>,
    pub depth: usize,
    pub millis: u128,
    pub ok: bool,
}

/// Evaluation of a whole suite.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub suite: String,
    pub depth: usize,
    pub records: Vec<RelationRecord>,
}

impl RelationReport {
    /// Evaluates every relation of the suite at `depth`, sharing one memo.
    pub fn run(suite: &RelationSuite, depth: usize) -> Result<RelationReport> {
        let mut records = Vec::with_capacity(suite.relations.len());
        let mut engine = suite
            .relations
            .first()
            .map(|r| Engine::new(r.element.automaton()));
        for relation in &suite.relations {
            let engine = engine.as_mut().expect("nonempty suite has an engine");
            let start = Instant::now();
            let verdict = engine.verdict(&relation.element, depth)?;
            let millis = start.elapsed().as_millis();
            let ok = match relation.expect {
                Expectation::Trivial => verdict.is_trivial(),
                Expectation::Nontrivial => !verdict.is_trivial(),
            };
            let offset = relation.element.automaton().display_offset();
            records.push(RelationRecord {
                name: relation.name.clone(),
                element: relation.element.factor_text(),
                base_level: relation.element.base_level(),
                expected: relation.expect,
                verdict: match &verdict {
                    TrivialityVerdict::Trivial { depth } => format!("Trivial({depth})"),
                    TrivialityVerdict::Nontrivial { .. } => "Nontrivial".to_string(),
                },
                witness: verdict.witness().map(|w| w.display_with(offset)),
                depth,
                millis,
                ok,
            });
        }
        Ok(RelationReport {
            suite: suite.name.clone(),
            depth,
            records,
        })
    }

    pub fn all_ok(&self) -> bool {
        self.records.iter().all(|r| r.ok)
    }

    /// One line per relation, deterministic apart from the timings.
    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} (depth {})\n", self.suite, self.depth);
        for r in &self.records {
            let witness = r
                .witness
                .as_deref()
                .map(|w| format!(" witness=[{w}]"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{} {:width$} {} expected={:?} got={}{witness} ({}ms)\n",
                if r.ok { "PASS" } else { "FAIL" },
                r.name,
                if r.element.is_empty() {
                    "(empty)".to_string()
                } else {
                    r.element.clone()
                },
                r.expected,
                r.verdict,
                r.millis,
                width = self.records.iter().map(|x| x.name.len()).max().unwrap_or(0),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
