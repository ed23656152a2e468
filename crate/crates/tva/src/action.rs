//! Group elements: signed words in automaton states acting on tree words.
//!
//! States act on the right, so the product `f·g` means "apply `f`, then
//! `g`", and the factor list of an element is read left to right. Elements
//! are anchored at a base level: an element at level `k` transforms words
//! starting at level `k` and its sections live at level `k + 1`.

use std::fmt;

use crate::alphabet::TreeWord;
use crate::automaton::{LevelTables, StateId, TVAutomaton};
use crate::perm::LevelPermutation;
use crate::{Error, Result};

/// One signed factor of a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub state: StateId,
    pub inverse: bool,
}

impl Factor {
    pub fn new(state: StateId) -> Self {
        Factor {
            state,
            inverse: false,
        }
    }

    pub fn inverted(self) -> Self {
        Factor {
            state: self.state,
            inverse: !self.inverse,
        }
    }
}

/// A formal product of automaton states and their inverses, acting on the
/// subtree of words that start at `base_level`.
#[derive(Clone)]
pub struct GroupElement {
    automaton: TVAutomaton,
    base_level: usize,
    factors: Vec<Factor>,
}

impl GroupElement {
    /// The identity element at `base_level`.
    pub fn identity(automaton: &TVAutomaton, base_level: usize) -> Self {
        GroupElement {
            automaton: automaton.clone(),
            base_level,
            factors: Vec::new(),
        }
    }

    /// An element from an explicit factor list; state ids must be valid.
    pub fn new(automaton: &TVAutomaton, base_level: usize, factors: Vec<Factor>) -> Result<Self> {
        let n = automaton.states().len();
        if let Some(bad) = factors.iter().find(|f| f.state >= n) {
            return Err(Error::UnknownState(format!("#{}", bad.state)));
        }
        Ok(GroupElement {
            automaton: automaton.clone(),
            base_level,
            factors,
        })
    }

    /// The single-state element for `name`.
    pub fn generator(automaton: &TVAutomaton, base_level: usize, name: &str) -> Result<Self> {
        let state = automaton.state_id(name)?;
        Ok(GroupElement {
            automaton: automaton.clone(),
            base_level,
            factors: vec![Factor::new(state)],
        })
    }

    /// Parses whitespace-separated state names with optional integer
    /// exponents: `b a^-1`, `a^3 b^-2`. The empty string is the identity.
    pub fn parse(automaton: &TVAutomaton, base_level: usize, text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for token in text.split_whitespace() {
            let (name, exponent) = match token.rsplit_once('^') {
                Some((name, exp)) if !name.is_empty() => match exp.parse::<i64>() {
                    Ok(e) => (name, e),
                    Err(_) => (token, 1),
                },
                _ => (token, 1),
            };
            let state = automaton.state_id(name)?;
            let factor = Factor {
                state,
                inverse: exponent < 0,
            };
            for _ in 0..exponent.unsigned_abs() {
                factors.push(factor);
            }
        }
        Ok(GroupElement {
            automaton: automaton.clone(),
            base_level,
            factors,
        })
    }

    pub fn automaton(&self) -> &TVAutomaton {
        &self.automaton
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Number of factors (not a group-theoretic length).
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// Whether the factor word is empty (the element is then trivially the
    /// identity; the converse is the word problem).
    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The factor word in parseable text, runs compressed: `a^3 b^-1`.
    /// The identity prints as the empty string.
    pub fn factor_text(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let f = self.factors[i];
            let mut run = 1;
            while i + run < self.factors.len() && self.factors[i + run] == f {
                run += 1;
            }
            let name = self.automaton.state_name(f.state);
            let exp = if f.inverse { -(run as i64) } else { run as i64 };
            parts.push(if exp == 1 {
                name.to_string()
            } else {
                format!("{name}^{exp}")
            });
            i += run;
        }
        parts.join(" ")
    }

    /// True when both elements live on the same machine view at the same
    /// base level, so their factor words can be concatenated.
    pub fn same_machine(&self, other: &GroupElement) -> bool {
        self.automaton.same_machine(&other.automaton) && self.base_level == other.base_level
    }

    /// The product `self · other` (apply `self` first).
    ///
    /// # Panics
    /// When the elements live on different machines or base levels.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        assert!(
            self.same_machine(other),
            "cannot multiply elements of different machines or base levels"
        );
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        GroupElement {
            automaton: self.automaton.clone(),
            base_level: self.base_level,
            factors,
        }
    }

    /// The group inverse: reversed factor word with flipped signs.
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            automaton: self.automaton.clone(),
            base_level: self.base_level,
            factors: self.factors.iter().rev().map(|f| f.inverted()).collect(),
        }
    }

    /// `self` raised to an integer power.
    pub fn pow(&self, exponent: i64) -> GroupElement {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut factors = Vec::with_capacity(self.factors.len() * exponent.unsigned_abs() as usize);
        for _ in 0..exponent.unsigned_abs() {
            factors.extend_from_slice(&base.factors);
        }
        GroupElement {
            automaton: self.automaton.clone(),
            base_level: self.base_level,
            factors,
        }
    }

    /// The conjugate `g⁻¹ · self · g`.
    pub fn conjugated_by(&self, g: &GroupElement) -> GroupElement {
        g.inverse().mul(self).mul(g)
    }

    /// The commutator `self⁻¹ · other⁻¹ · self · other`.
    pub fn commutator(&self, other: &GroupElement) -> GroupElement {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// Free cancellation of adjacent mutually inverse factors; the result
    /// acts identically on every word.
    pub fn simplify(&self) -> GroupElement {
        GroupElement {
            automaton: self.automaton.clone(),
            base_level: self.base_level,
            factors: simplify_factors(self.factors.iter().copied()),
        }
    }

    /// The same factor word anchored at another level.
    pub fn at_level(&self, base_level: usize) -> GroupElement {
        GroupElement {
            automaton: self.automaton.clone(),
            base_level,
            factors: self.factors.clone(),
        }
    }

    /// Applies the element to a word, factor by factor: each factor
    /// transforms the whole word before the next one reads it.
    pub fn apply(&self, word: &TreeWord) -> Result<TreeWord> {
        self.check_level(word)?;
        let mut letters = word.letters().to_vec();
        for &f in &self.factors {
            self.apply_factor(f, &mut letters)?;
        }
        Ok(TreeWord::new(self.base_level, letters))
    }

    /// Applies the element in one pass over the word, advancing all factor
    /// states together letter by letter. Agrees with [`apply`] everywhere.
    ///
    /// [`apply`]: GroupElement::apply
    pub fn apply_fused(&self, word: &TreeWord) -> Result<TreeWord> {
        self.check_level(word)?;
        let mut factors = self.factors.clone();
        let mut out = Vec::with_capacity(word.len());
        for (j, &x) in word.letters().iter().enumerate() {
            let level = self.base_level + j;
            let tables = self.automaton.tables_at(level)?;
            check_letter(&tables, level, x)?;
            let mut cur = x;
            for f in factors.iter_mut() {
                let (next, y) = advance(&self.automaton, &tables, level, *f, cur)?;
                f.state = next;
                cur = y;
            }
            out.push(cur);
        }
        Ok(TreeWord::new(self.base_level, out))
    }

    /// The image of the first letter together with the element continuing
    /// the action below it.
    pub fn section_with_image(&self, letter: usize) -> Result<(GroupElement, usize)> {
        let tables = self.automaton.tables_at(self.base_level)?;
        check_letter(&tables, self.base_level, letter)?;
        let (factors, cur) =
            advance_factors(&self.automaton, &tables, self.base_level, &self.factors, letter)?;
        Ok((
            GroupElement {
                automaton: self.automaton.clone(),
                base_level: self.base_level + 1,
                factors,
            },
            cur,
        ))
    }

    /// The element acting below `letter`: for every word `w`,
    /// `apply(letter·w) = root_permutation(letter) · section(letter)(w)`.
    pub fn section(&self, letter: usize) -> Result<GroupElement> {
        self.section_with_image(letter).map(|(e, _)| e)
    }

    /// The action on the first letter as a permutation.
    pub fn root_permutation(&self) -> Result<LevelPermutation> {
        let tables = self.automaton.tables_at(self.base_level)?;
        let mut images = Vec::with_capacity(tables.size());
        for x in 0..tables.size() {
            let mut cur = x;
            for &f in &self.factors {
                let (_, y) = advance(&self.automaton, &tables, self.base_level, f, cur)?;
                cur = y;
            }
            images.push(cur);
        }
        LevelPermutation::from_images(self.base_level, images).map_err(|_| {
            let culprit = self
                .factors
                .iter()
                .find(|f| !f.inverse && tables.output_inverse_row(f.state).is_none())
                .map(|f| self.automaton.state_name(f.state).to_string())
                .unwrap_or_else(|| self.factor_text());
            Error::NotInvertible {
                level: self.base_level,
                state: culprit,
            }
        })
    }

    /// Builds the product automaton of the factor machines (inverse factors
    /// contribute the inverse automaton) and the flattened start state that
    /// evaluates this element. `None` for the empty factor word.
    pub fn product_machine(&self) -> Result<Option<(TVAutomaton, StateId)>> {
        let mut it = self.factors.iter();
        let first = match it.next() {
            Some(f) => f,
            None => return Ok(None),
        };
        let machine_of = |f: &Factor| {
            if f.inverse {
                self.automaton.inverse()
            } else {
                self.automaton.clone()
            }
        };
        let mut machine = machine_of(first);
        let mut state = first.state;
        for f in it {
            let next = machine_of(f);
            state = machine.product_state(&next, state, f.state);
            machine = machine.product(&next)?;
        }
        Ok(Some((machine, state)))
    }

    fn check_level(&self, word: &TreeWord) -> Result<()> {
        if word.start_level() != self.base_level {
            return Err(Error::LevelMismatch {
                element: self.base_level,
                word: word.start_level(),
            });
        }
        Ok(())
    }

    fn apply_factor(&self, f: Factor, letters: &mut [usize]) -> Result<()> {
        let mut state = f.state;
        for (j, x) in letters.iter_mut().enumerate() {
            let level = self.base_level + j;
            let tables = self.automaton.tables_at(level)?;
            check_letter(&tables, level, *x)?;
            let (next, y) = advance(&self.automaton, &tables, level, Factor { state, ..f }, *x)?;
            state = next;
            *x = y;
        }
        Ok(())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.factor_text())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement@{}[{}]", self.base_level, self.factor_text())
    }
}

/// Applies the tree map of a single state, read from the word's start
/// level, to the whole word.
pub fn apply_state(automaton: &TVAutomaton, state: StateId, word: &TreeWord) -> Result<TreeWord> {
    let mut q = state;
    let mut out = Vec::with_capacity(word.len());
    for (j, &x) in word.letters().iter().enumerate() {
        let level = word.start_level() + j;
        let (next, y) = automaton.step(level, q, x)?;
        q = next;
        out.push(y);
    }
    Ok(TreeWord::new(word.start_level(), out))
}

fn check_letter(tables: &LevelTables, level: usize, letter: usize) -> Result<()> {
    if letter >= tables.size() {
        return Err(Error::LetterOutOfRange {
            level,
            letter,
            size: tables.size(),
        });
    }
    Ok(())
}

/// Free cancellation on a raw factor sequence.
pub(crate) fn simplify_factors(factors: impl IntoIterator<Item = Factor>) -> Vec<Factor> {
    let mut stack: Vec<Factor> = Vec::new();
    for f in factors {
        match stack.last() {
            Some(top) if top.state == f.state && top.inverse != f.inverse => {
                stack.pop();
            }
            _ => stack.push(f),
        }
    }
    stack
}

/// Threads one letter through a factor sequence: the successor factors (the
/// section word) and the image letter.
pub(crate) fn advance_factors(
    automaton: &TVAutomaton,
    tables: &LevelTables,
    level: usize,
    factors: &[Factor],
    letter: usize,
) -> Result<(Vec<Factor>, usize)> {
    let mut cur = letter;
    let mut next = Vec::with_capacity(factors.len());
    for &f in factors {
        let (state, y) = advance(automaton, tables, level, f, cur)?;
        next.push(Factor {
            state,
            inverse: f.inverse,
        });
        cur = y;
    }
    Ok((next, cur))
}

/// One move of a signed factor on a letter: the successor factor state and
/// the image letter. An inverse factor reads through the inverted output
/// row and advances along the preimage.
fn advance(
    automaton: &TVAutomaton,
    tables: &LevelTables,
    level: usize,
    f: Factor,
    x: usize,
) -> Result<(StateId, usize)> {
    if f.inverse {
        let inv = tables
            .output_inverse_row(f.state)
            .ok_or_else(|| Error::NotInvertible {
                level,
                state: automaton.state_name(f.state).to_string(),
            })?;
        let y = inv[x];
        Ok((tables.next_state(f.state, y), y))
    } else {
        Ok((tables.next_state(f.state, x), tables.output(f.state, x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::ParamSeq;
    use crate::presets;

    fn grig_element(text: &str) -> GroupElement {
        GroupElement::parse(&presets::grigorchuk(), 0, text).unwrap()
    }

    fn word(text: &str) -> TreeWord {
        text.parse().unwrap()
    }

    #[test]
    fn single_state_application() {
        let b = grig_element("b");
        assert_eq!(b.apply(&word("0: 0 0 1")).unwrap(), word("0: 0 1 1"));
        assert_eq!(b.apply(&word("0:")).unwrap(), word("0:"));
    }

    #[test]
    fn identity_fixes_everything() {
        let aut = presets::grigorchuk();
        let e = GroupElement::identity(&aut, 0);
        for w in aut.alphabet().words(0, 4).unwrap() {
            assert_eq!(e.apply(&w).unwrap(), w);
        }
    }

    #[test]
    fn right_action_concatenates() {
        let aut = presets::grigorchuk();
        let f = GroupElement::parse(&aut, 0, "a b").unwrap();
        let g = GroupElement::parse(&aut, 0, "c a").unwrap();
        let fg = f.mul(&g);
        for w in aut.alphabet().words(0, 4).unwrap() {
            let step = g.apply(&f.apply(&w).unwrap()).unwrap();
            assert_eq!(fg.apply(&w).unwrap(), step);
        }
    }

    #[test]
    fn sections_follow_transitions() {
        let b = grig_element("b");
        let (below, image) = b.section_with_image(1).unwrap();
        assert_eq!(image, 1);
        assert_eq!(below.factor_text(), "c");
        assert_eq!(below.base_level(), 1);
        let (below0, image0) = b.section_with_image(0).unwrap();
        assert_eq!(image0, 0);
        assert_eq!(below0.factor_text(), "a");
    }

    #[test]
    fn section_law_holds() {
        let aut = presets::grigorchuk();
        let e = grig_element("b a d^-1 c");
        let size = aut.alphabet().size_at(0).unwrap();
        let root = e.root_permutation().unwrap();
        for x in 0..size {
            let section = e.section(x).unwrap();
            for w in aut.alphabet().words(1, 3).unwrap() {
                let mut long = vec![x];
                long.extend_from_slice(w.letters());
                let image = e.apply(&TreeWord::new(0, long)).unwrap();
                assert_eq!(image.letters()[0], root.apply(x));
                assert_eq!(image.letters()[1..], *section.apply(&w).unwrap().letters());
            }
        }
    }

    #[test]
    fn fused_and_naive_agree() {
        let seq: ParamSeq = "i+2".parse().unwrap();
        let aut = presets::free2(seq).unwrap();
        let e = GroupElement::parse(&aut, 0, "a b^-1 a^-1 b").unwrap();
        for w in aut.alphabet().words(0, 3).unwrap() {
            assert_eq!(e.apply(&w).unwrap(), e.apply_fused(&w).unwrap());
        }
    }

    #[test]
    fn product_machine_matches_apply() {
        let seq: ParamSeq = "i+2".parse().unwrap();
        let aut = presets::free2(seq).unwrap();
        let e = GroupElement::parse(&aut, 0, "b a^-1 b").unwrap();
        let (machine, start) = e.product_machine().unwrap().unwrap();
        assert_eq!(machine.states().len(), 8);
        for w in aut.alphabet().words(0, 3).unwrap() {
            assert_eq!(apply_state(&machine, start, &w).unwrap(), e.apply(&w).unwrap());
        }
        let identity = GroupElement::identity(&aut, 0);
        assert!(identity.product_machine().unwrap().is_none());
    }

    #[test]
    fn inverse_cancels_on_words() {
        let aut = presets::grigorchuk();
        let e = grig_element("a b c");
        let full = e.mul(&e.inverse());
        for w in aut.alphabet().words(0, 4).unwrap() {
            assert_eq!(full.apply(&w).unwrap(), w);
        }
    }

    #[test]
    fn parse_round_trips_and_expands() {
        let e = grig_element("a^3 b^-2 c");
        assert_eq!(e.len(), 6);
        assert_eq!(e.factor_text(), "a^3 b^-2 c");
        assert_eq!(grig_element("").factor_text(), "");
        assert_eq!(grig_element("a^0 b").factor_text(), "b");
        assert!(matches!(
            GroupElement::parse(&presets::grigorchuk(), 0, "a z"),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn simplify_cancels_freely() {
        assert_eq!(grig_element("a a^-1").simplify().factor_text(), "");
        assert_eq!(grig_element("b a^-1 a b").simplify().factor_text(), "b^2");
        assert_eq!(grig_element("a b b^-1 a^-1").simplify().factor_text(), "");
        let e = grig_element("b a^-1 a b");
        let aut = presets::grigorchuk();
        for w in aut.alphabet().words(0, 4).unwrap() {
            assert_eq!(e.apply(&w).unwrap(), e.simplify().apply(&w).unwrap());
        }
    }

    #[test]
    fn algebraic_constructors_produce_expected_words() {
        let aut = presets::grigorchuk();
        let c = GroupElement::parse(&aut, 0, "c").unwrap();
        let a = GroupElement::parse(&aut, 0, "a").unwrap();
        assert_eq!(c.conjugated_by(&a.pow(2)).factor_text(), "a^-2 c a^2");
        assert_eq!(a.pow(-2).factor_text(), "a^-2");
        assert_eq!(c.commutator(&a).factor_text(), "c^-1 a^-1 c a");
    }

    #[test]
    fn root_permutation_of_generators() {
        let a = grig_element("a");
        assert_eq!(a.root_permutation().unwrap().cycle_string(0), "(0 1)");
        let b = grig_element("b");
        assert!(b.root_permutation().unwrap().is_identity());
    }

    #[test]
    fn level_mismatch_is_reported() {
        let b = grig_element("b");
        assert!(matches!(
            b.apply(&word("1: 0")),
            Err(Error::LevelMismatch { element: 0, word: 1 })
        ));
        let shifted = b.at_level(1);
        assert_eq!(shifted.apply(&word("1: 0")).unwrap(), word("1: 0"));
    }

    #[test]
    fn inverse_factors_need_invertible_rows() {
        use crate::alphabet::ChangingAlphabet;
        use crate::automaton::LevelTables;
        let alphabet = ChangingAlphabet::constant(2).unwrap();
        let tables = LevelTables::new(2, 1, vec![vec![0, 0]], vec![vec![0, 0]]).unwrap();
        let squash = TVAutomaton::mealy(alphabet, vec!["s".into()], tables).unwrap();
        let e = GroupElement::parse(&squash, 0, "s^-1").unwrap();
        assert!(matches!(
            e.apply(&word("0: 1")),
            Err(Error::NotInvertible { level: 0, .. })
        ));
        let forward = GroupElement::parse(&squash, 0, "s").unwrap();
        assert!(matches!(
            forward.root_permutation(),
            Err(Error::NotInvertible { .. })
        ));
    }
}
