//! Ready-made automata: the Grigorchuk machine, the rank-2 free-group
//! machine and its diagonal variant, and the lamplighter family, together
//! with per-preset relation suites used by the `verify` command.

use std::sync::Arc;

use crate::action::GroupElement;
use crate::alphabet::{ChangingAlphabet, ParamSeq};
use crate::analysis::{Expectation, RelationSuite, SuiteRelation};
use crate::automaton::{LevelTables, TableSource, TVAutomaton};
use crate::lamplighter::{KSpec, LayoutStyle, WreathAutomaton};
use crate::{Error, Result};

/// The five-state machine on two letters generating the first Grigorchuk
/// group: `a` swaps the letters and halts, `b`, `c`, `d` cycle through each
/// other along the right branch, `e` is the identity.
pub fn grigorchuk() -> TVAutomaton {
    let alphabet = ChangingAlphabet::constant(2).expect("two letters");
    let states = ["a", "b", "c", "d", "e"].map(String::from).to_vec();
    let (a, b, c, d, e) = (0, 1, 2, 3, 4);
    let transitions = vec![
        vec![e, e], // a
        vec![a, c], // b
        vec![a, d], // c
        vec![e, b], // d
        vec![e, e], // e
    ];
    let id = vec![0, 1];
    let swap = vec![1, 0];
    let outputs = vec![swap, id.clone(), id.clone(), id.clone(), id];
    let tables = LevelTables::new(2, 5, transitions, outputs).expect("static tables");
    TVAutomaton::mealy(alphabet, states, tables).expect("constant alphabet")
}

/// Shared program of the two-state machines over the growing alphabet
/// `{0, …, r_i − 1}`: state `a` outputs the transposition `(0 1)`, state `b`
/// the full cycle `(0 1 … r_i − 1)`. With `reset_at_zero` the states swap
/// exactly on letter 0 (the free-group machine); without it the states never
/// change (the diagonal variant).
struct TwoStateSource {
    alphabet: ChangingAlphabet,
    reset_at_zero: bool,
}

impl TableSource for TwoStateSource {
    fn tables(&self, level: usize) -> Result<LevelTables> {
        let size = self.alphabet.size_at(level)?;
        let mut alpha: Vec<usize> = (0..size).collect();
        alpha.swap(0, 1);
        let beta: Vec<usize> = (0..size).map(|x| (x + 1) % size).collect();
        let (a_row, b_row) = if self.reset_at_zero {
            let mut a_row = vec![0; size];
            let mut b_row = vec![1; size];
            a_row[0] = 1;
            b_row[0] = 0;
            (a_row, b_row)
        } else {
            (vec![0; size], vec![1; size])
        };
        LevelTables::new(size, 2, vec![a_row, b_row], vec![alpha, beta])
    }
}

fn two_state(seq: ParamSeq, reset_at_zero: bool) -> Result<TVAutomaton> {
    let alphabet = ChangingAlphabet::parametric(1, 0, seq)?;
    let source = TwoStateSource {
        alphabet: alphabet.clone(),
        reset_at_zero,
    };
    Ok(TVAutomaton::from_source(
        alphabet,
        vec!["a".to_string(), "b".to_string()],
        Arc::new(source),
        1,
    ))
}

/// The two-state machine over `{0, …, r_i − 1}` whose states generate a free
/// group of rank 2: outputs as in [`ex1_diagonal`], and the states swap on
/// letter 0.
pub fn free2(seq: ParamSeq) -> Result<TVAutomaton> {
    two_state(seq, true)
}

/// The diagonal variant of [`free2`]: same outputs, but states never change.
/// Unlike the free-group machine, this one does not coincide with its own
/// shifts in any level-respecting sense; see the `falsify` analysis.
pub fn ex1_diagonal(seq: ParamSeq) -> Result<TVAutomaton> {
    two_state(seq, false)
}

/// Rejects preset parameters that do not apply to the chosen family.
pub(crate) fn reject_params(name: &str, given: &[(&str, bool)]) -> Result<()> {
    for (param, present) in given {
        if *present {
            return Err(Error::BadParameters(format!(
                "preset `{name}` does not take --{param}"
            )));
        }
    }
    Ok(())
}

/// Every name [`build_preset`] accepts.
pub const PRESET_NAMES: &[&str] = &[
    "grigorchuk",
    "free2",
    "ex1_diagonal",
    "Z_wr_Z",
    "Zn_wr_Z",
    "Cr_wr_Z",
    "lamplighter_A",
    "lamplighter_D",
];

/// Optional parameters of [`build_preset`]; families reject the ones they do
/// not take.
#[derive(Debug, Clone, Default)]
pub struct PresetParams {
    /// Size sequence parameter, defaults to `i+2` where applicable.
    pub seq: Option<ParamSeq>,
    /// Number of free components of the `Zn_wr_Z` family (default 2).
    pub n: Option<usize>,
    /// Torsion order of the `Cr_wr_Z` family (default 3).
    pub r: Option<u32>,
    /// Free rank of the generic lamplighter families (default 1).
    pub free_rank: Option<usize>,
    /// Torsion orders of the generic lamplighter families (default none).
    pub torsion: Option<Vec<u32>>,
    /// Selects the seeded-shuffle layout of the generic lamplighter
    /// families; without it the canonical block layout is used.
    pub seed: Option<u64>,
}

impl PresetParams {
    fn seq(&self) -> Result<ParamSeq> {
        match &self.seq {
            Some(seq) => Ok(seq.clone()),
            None => ParamSeq::affine(1, 2),
        }
    }

    fn presence(&self) -> [(&'static str, bool); 6] {
        [
            ("seq", self.seq.is_some()),
            ("n", self.n.is_some()),
            ("r", self.r.is_some()),
            ("free-rank", self.free_rank.is_some()),
            ("torsion", self.torsion.is_some()),
            ("seed", self.seed.is_some()),
        ]
    }

    fn reject_all_but(&self, name: &str, allowed: &[&str]) -> Result<()> {
        let given: Vec<(&str, bool)> = self
            .presence()
            .into_iter()
            .filter(|(param, _)| !allowed.contains(param))
            .collect();
        reject_params(name, &given)
    }
}

/// A named automaton bundled with its wreath structure (when it has one) and
/// the relation suite the `verify` command runs.
#[derive(Clone)]
pub struct PresetBundle {
    pub name: String,
    pub automaton: TVAutomaton,
    pub wreath: Option<WreathAutomaton>,
    pub suite: RelationSuite,
}

/// Builds a preset by name. Unknown names raise [`Error::UnknownPreset`];
/// parameters a family does not take raise [`Error::BadParameters`].
pub fn build_preset(name: &str, params: &PresetParams) -> Result<PresetBundle> {
    match name {
        "grigorchuk" => {
            params.reject_all_but(name, &[])?;
            let automaton = grigorchuk();
            let suite = grigorchuk_suite(&automaton);
            Ok(PresetBundle {
                name: name.to_string(),
                automaton,
                wreath: None,
                suite,
            })
        }
        "free2" => {
            params.reject_all_but(name, &["seq"])?;
            let automaton = free2(params.seq()?)?;
            let suite = free2_suite(&automaton);
            Ok(PresetBundle {
                name: name.to_string(),
                automaton,
                wreath: None,
                suite,
            })
        }
        "ex1_diagonal" => {
            params.reject_all_but(name, &["seq"])?;
            let automaton = ex1_diagonal(params.seq()?)?;
            let suite = ex1_suite(&automaton);
            Ok(PresetBundle {
                name: name.to_string(),
                automaton,
                wreath: None,
                suite,
            })
        }
        "Z_wr_Z" => {
            params.reject_all_but(name, &["seq"])?;
            let wreath = WreathAutomaton::z_wr_z(params.seq()?)?;
            wrap_wreath(name, wreath)
        }
        "Zn_wr_Z" => {
            params.reject_all_but(name, &["seq", "n"])?;
            let wreath = WreathAutomaton::zn_wr_z(params.n.unwrap_or(2), params.seq()?)?;
            wrap_wreath(name, wreath)
        }
        "Cr_wr_Z" => {
            params.reject_all_but(name, &["seq", "r"])?;
            let wreath = WreathAutomaton::cr_wr_z(params.r.unwrap_or(3), params.seq()?)?;
            wrap_wreath(name, wreath)
        }
        "lamplighter_A" | "lamplighter_D" => {
            params.reject_all_but(name, &["seq", "free-rank", "torsion", "seed"])?;
            let kspec = KSpec::new(
                params.free_rank.unwrap_or(1),
                params.torsion.clone().unwrap_or_default(),
            )?;
            let style = match params.seed {
                Some(seed) => LayoutStyle::Shuffled { seed },
                None => LayoutStyle::Canonical,
            };
            let wreath = if name == "lamplighter_A" {
                WreathAutomaton::with_resets(kspec, params.seq()?, style)?
            } else {
                WreathAutomaton::diagonal(kspec, params.seq()?, style)?
            };
            wrap_wreath(name, wreath)
        }
        _ => Err(Error::UnknownPreset(name.to_string())),
    }
}

fn wrap_wreath(name: &str, wreath: WreathAutomaton) -> Result<PresetBundle> {
    let suite = if name == "lamplighter_D" {
        diagonal_suite(name, &wreath)
    } else {
        wreath_suite(name, &wreath)?
    };
    Ok(PresetBundle {
        name: name.to_string(),
        automaton: wreath.automaton().clone(),
        wreath: Some(wreath),
        suite,
    })
}

fn rel(name: impl Into<String>, element: GroupElement, expect: Expectation) -> SuiteRelation {
    SuiteRelation {
        name: name.into(),
        element,
        expect,
    }
}

fn grigorchuk_suite(aut: &TVAutomaton) -> RelationSuite {
    let g = |text: &str| GroupElement::parse(aut, 0, text).expect("known generators");
    let mut relations = Vec::new();
    for text in ["a^2", "b^2", "c^2", "d^2", "b c d"] {
        relations.push(rel(text, g(text), Expectation::Trivial));
    }
    for (x, y) in [("b", "c"), ("b", "d"), ("c", "d")] {
        relations.push(rel(
            format!("[{x},{y}]"),
            g(x).commutator(&g(y)),
            Expectation::Trivial,
        ));
    }
    for text in ["a", "b", "a b"] {
        relations.push(rel(text, g(text), Expectation::Nontrivial));
    }
    RelationSuite {
        name: "grigorchuk".to_string(),
        relations,
    }
}

fn free2_suite(aut: &TVAutomaton) -> RelationSuite {
    let g = |text: &str| GroupElement::parse(aut, 0, text).expect("known generators");
    let mut relations = vec![rel("a a^-1", g("a a^-1"), Expectation::Trivial)];
    for text in ["[a,b]", "a^2", "b^3", "a b^2 a^-1 b^-2"] {
        let element = match text {
            "[a,b]" => g("a").commutator(&g("b")),
            other => g(other),
        };
        relations.push(rel(text, element, Expectation::Nontrivial));
    }
    RelationSuite {
        name: "free2".to_string(),
        relations,
    }
}

/// The diagonal two-state machine acts level-by-level, so the relator
/// `W = (a b^2 a b^-2)^2` is sensitive to where the level sequence starts:
/// it is nontrivial read from level 0 but trivial read from level 2 — the
/// behaviour the `falsify` analysis reports as a counterexample.
fn ex1_suite(aut: &TVAutomaton) -> RelationSuite {
    let w = |level: usize| {
        GroupElement::parse(aut, level, "a b^2 a b^-2")
            .expect("known generators")
            .pow(2)
    };
    let relations = vec![
        rel("W at level 0", w(0), Expectation::Nontrivial),
        rel("W at level 2", w(2), Expectation::Trivial),
        rel(
            "[a,b] at level 0",
            GroupElement::parse(aut, 0, "a")
                .unwrap()
                .commutator(&GroupElement::parse(aut, 0, "b").unwrap()),
            Expectation::Nontrivial,
        ),
    ];
    RelationSuite {
        name: "ex1_diagonal".to_string(),
        relations,
    }
}

/// Suite of a reset machine: conjugates `d_k = a⁻ᵏ·c·aᵏ` of each component
/// commute pairwise, torsion components have their stated order, free
/// components have certified-nontrivial powers, and `a` is nontrivial.
fn wreath_suite(name: &str, wreath: &WreathAutomaton) -> Result<RelationSuite> {
    let n = wreath.kspec().components();
    let mut relations = Vec::new();
    for s in 0..n {
        for s2 in s..n {
            let pairs: &[(i64, i64)] = if s == s2 {
                &[(0, 1), (-1, 1), (1, 2)]
            } else {
                &[(0, 0), (1, -1)]
            };
            for &(k, k2) in pairs {
                let d1 = wreath.element_d(k, s, 0)?;
                let d2 = wreath.element_d(k2, s2, 0)?;
                relations.push(rel(
                    format!("[d({k},{}), d({k2},{})]", s + 1, s2 + 1),
                    d1.commutator(&d2),
                    Expectation::Trivial,
                ));
            }
        }
    }
    for s in 0..n {
        let c = wreath.element_c(s, 0)?;
        match wreath.kspec().component_order(s) {
            Some(order) => {
                relations.push(rel(
                    format!("c_{}^{order}", s + 1),
                    c.pow(order as i64),
                    Expectation::Trivial,
                ));
                for m in 1..order.min(4) {
                    relations.push(rel(
                        format!("c_{}^{m}", s + 1),
                        c.pow(m as i64),
                        Expectation::Nontrivial,
                    ));
                }
            }
            None => {
                for m in [1, 2, 3] {
                    relations.push(rel(
                        format!("c_{}^{m}", s + 1),
                        c.pow(m),
                        Expectation::Nontrivial,
                    ));
                }
            }
        }
    }
    relations.push(rel(
        "a",
        wreath.gen_a(0),
        Expectation::Nontrivial,
    ));
    Ok(RelationSuite {
        name: name.to_string(),
        relations,
    })
}

/// Suite of a diagonal machine: every pair of states commutes, torsion
/// components still have their stated order, and free components stay
/// nontrivial.
fn diagonal_suite(name: &str, wreath: &WreathAutomaton) -> RelationSuite {
    let n = wreath.kspec().components();
    let a = wreath.gen_a(0);
    let mut relations = Vec::new();
    for s in 0..n {
        let b = wreath.gen_b(s, 0).expect("component in range");
        relations.push(rel(
            format!("[a,b{}]", s + 1),
            a.commutator(&b),
            Expectation::Trivial,
        ));
        for s2 in s + 1..n {
            let b2 = wreath.gen_b(s2, 0).expect("component in range");
            relations.push(rel(
                format!("[b{},b{}]", s + 1, s2 + 1),
                b.commutator(&b2),
                Expectation::Trivial,
            ));
        }
    }
    for s in 0..n {
        let c = wreath.element_c(s, 0).expect("component in range");
        match wreath.kspec().component_order(s) {
            Some(order) => {
                relations.push(rel(
                    format!("c_{}^{order}", s + 1),
                    c.pow(order as i64),
                    Expectation::Trivial,
                ));
                relations.push(rel(format!("c_{}", s + 1), c, Expectation::Nontrivial));
            }
            None => {
                relations.push(rel(
                    format!("c_{}^2", s + 1),
                    c.pow(2),
                    Expectation::Nontrivial,
                ));
            }
        }
    }
    relations.push(rel("a", a, Expectation::Nontrivial));
    RelationSuite {
        name: name.to_string(),
        relations,
    }
}
