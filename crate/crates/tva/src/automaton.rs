//! Time-varying automata.
//!
//! An automaton has one finite state set but per-level transition and output
//! tables: reading letter `x` of level `i` in state `q` emits
//! `outputs[i][q][x]` and continues at level `i + 1` in state
//! `transitions[i][q][x]`. Tables come from a program (constant, explicit
//! per-level, or computed on demand) and are cached per level; automata are
//! immutable and cheap to clone.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::alphabet::ChangingAlphabet;
use crate::perm::LevelPermutation;
use crate::{Error, Result};

/// Index into the state list of an automaton.
pub type StateId = usize;

/// Transition and output tables of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTables {
    size: usize,
    /// `transitions[q][x]` is the next state.
    transitions: Vec<Vec<StateId>>,
    /// `outputs[q][x]` is the emitted letter; rows need not be bijective.
    outputs: Vec<Vec<usize>>,
    /// Inverted output rows, present exactly when every row is a bijection.
    output_inv: Option<Vec<Vec<usize>>>,
}

impl LevelTables {
    /// Validates totality and ranges and precomputes row inverses when the
    /// rows are bijections.
    pub fn new(
        size: usize,
        n_states: usize,
        transitions: Vec<Vec<StateId>>,
        outputs: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if transitions.len() != n_states || outputs.len() != n_states {
            return Err(Error::BadParameters(format!(
                "expected rows for {n_states} states, got {} transition rows and {} output rows",
                transitions.len(),
                outputs.len()
            )));
        }
        for (q, row) in transitions.iter().enumerate() {
            if row.len() != size {
                return Err(Error::BadParameters(format!(
                    "transition row of state {q} has {} entries, alphabet size is {size}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&s| s >= n_states) {
                return Err(Error::BadParameters(format!(
                    "transition row of state {q} names state {bad}, automaton has {n_states}"
                )));
            }
        }
        for (q, row) in outputs.iter().enumerate() {
            if row.len() != size {
                return Err(Error::BadParameters(format!(
                    "output row of state {q} has {} entries, alphabet size is {size}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&y| y >= size) {
                return Err(Error::BadParameters(format!(
                    "output row of state {q} emits letter {bad}, alphabet size is {size}"
                )));
            }
        }
        let output_inv = invert_rows(size, &outputs);
        Ok(LevelTables {
            size,
            transitions,
            outputs,
            output_inv,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn next_state(&self, q: StateId, x: usize) -> StateId {
        self.transitions[q][x]
    }

    pub fn output(&self, q: StateId, x: usize) -> usize {
        self.outputs[q][x]
    }

    pub fn output_row(&self, q: StateId) -> &[usize] {
        &self.outputs[q]
    }

    /// Whether every output row is a bijection.
    pub fn invertible(&self) -> bool {
        self.output_inv.is_some()
    }

    /// Index of the first state whose output row is not a bijection.
    pub fn first_non_bijective_state(&self) -> Option<StateId> {
        self.outputs.iter().position(|row| !row_bijective(row))
    }

    pub(crate) fn output_inverse_row(&self, q: StateId) -> Option<&[usize]> {
        self.output_inv.as_ref().map(|rows| rows[q].as_slice())
    }
}

fn row_bijective(row: &[usize]) -> bool {
    let mut seen = vec![false; row.len()];
    row.iter().all(|&y| {
        if y >= row.len() || seen[y] {
            false
        } else {
            seen[y] = true;
            true
        }
    })
}

fn invert_rows(size: usize, outputs: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let mut inv = Vec::with_capacity(outputs.len());
    for row in outputs {
        if !row_bijective(row) {
            return None;
        }
        let mut back = vec![0; size];
        for (x, &y) in row.iter().enumerate() {
            back[y] = x;
        }
        inv.push(back);
    }
    Some(inv)
}

/// Produces level tables on demand. Levels are counted in the source's own
/// frame; an automaton adds its base shift before asking.
pub(crate) trait TableSource: Send + Sync {
    fn tables(&self, level: usize) -> Result<LevelTables>;

    /// True when every level returns the same tables.
    fn is_constant(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InvertFlag {
    Unchecked,
    UpTo(usize),
    FailsAt(usize),
}

/// A time-varying automaton over a changing alphabet.
#[derive(Clone)]
pub struct TVAutomaton {
    alphabet: ChangingAlphabet,
    states: Arc<Vec<String>>,
    source: Arc<dyn TableSource>,
    base: usize,
    display_offset: usize,
    cache: Arc<Mutex<HashMap<usize, Arc<LevelTables>>>>,
    invert: Arc<Mutex<InvertFlag>>,
}

impl TVAutomaton {
    pub(crate) fn from_source(
        alphabet: ChangingAlphabet,
        states: Vec<String>,
        source: Arc<dyn TableSource>,
        display_offset: usize,
    ) -> Self {
        TVAutomaton {
            alphabet,
            states: Arc::new(states),
            source,
            base: 0,
            display_offset,
            cache: Arc::new(Mutex::new(HashMap::new())),
            invert: Arc::new(Mutex::new(InvertFlag::Unchecked)),
        }
    }

    /// An automaton given by explicit per-level tables. The alphabet must be
    /// a horizon alphabet of exactly matching length and sizes.
    pub fn from_level_tables(
        alphabet: ChangingAlphabet,
        states: Vec<String>,
        levels: Vec<LevelTables>,
    ) -> Result<Self> {
        let horizon = alphabet.horizon().ok_or_else(|| {
            Error::BadParameters(
                "explicit level tables require a horizon alphabet".to_string(),
            )
        })?;
        if horizon != levels.len() {
            return Err(Error::BadParameters(format!(
                "alphabet has {horizon} levels but {} table levels were given",
                levels.len()
            )));
        }
        for (i, tables) in levels.iter().enumerate() {
            if tables.size() != alphabet.size_at(i)? {
                return Err(Error::BadParameters(format!(
                    "tables at level {i} cover {} letters, alphabet size is {}",
                    tables.size(),
                    alphabet.size_at(i)?
                )));
            }
            if tables.n_states() != states.len() {
                return Err(Error::BadParameters(format!(
                    "tables at level {i} cover {} states, automaton has {}",
                    tables.n_states(),
                    states.len()
                )));
            }
        }
        let source = HorizonSource { levels };
        Ok(Self::from_source(alphabet, states, Arc::new(source), 0))
    }

    /// An automaton whose tables do not depend on the level. Requires a
    /// constant alphabet; such a machine coincides with all of its shifts.
    pub fn mealy(
        alphabet: ChangingAlphabet,
        states: Vec<String>,
        tables: LevelTables,
    ) -> Result<Self> {
        let size = alphabet.size_at(0)?;
        if alphabet != alphabet.shift(1) {
            return Err(Error::BadParameters(
                "a constant program needs a constant alphabet".to_string(),
            ));
        }
        if tables.size() != size || tables.n_states() != states.len() {
            return Err(Error::BadParameters(format!(
                "constant tables cover {} letters and {} states, expected {size} and {}",
                tables.size(),
                tables.n_states(),
                states.len()
            )));
        }
        let source = ConstantSource { tables };
        Ok(Self::from_source(alphabet, states, Arc::new(source), 0))
    }

    /// An automaton that never changes state: every state acts letterwise by
    /// the permutation `perms(level, state)`.
    pub fn diagonal<F>(
        alphabet: ChangingAlphabet,
        states: Vec<String>,
        display_offset: usize,
        perms: F,
    ) -> Self
    where
        F: Fn(usize, StateId) -> Result<LevelPermutation> + Send + Sync + 'static,
    {
        let source = DiagonalSource {
            alphabet: alphabet.clone(),
            n_states: states.len(),
            perms: Box::new(perms),
        };
        Self::from_source(alphabet, states, Arc::new(source), display_offset)
    }

    pub(crate) fn with_display_offset(mut self, display_offset: usize) -> Self {
        self.display_offset = display_offset;
        self
    }

    pub fn alphabet(&self) -> &ChangingAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    /// Offset added to letters in human-facing output (1 for presets whose
    /// traditional alphabets start at 1).
    pub fn display_offset(&self) -> usize {
        self.display_offset
    }

    /// Whether tables and alphabet are level-independent.
    pub fn is_mealy(&self) -> bool {
        self.source.is_constant() && self.alphabet == self.alphabet.shift(1)
    }

    /// True when `self` and `other` are views of one underlying program at
    /// the same shift, so elements of both can be mixed freely.
    pub fn same_machine(&self, other: &TVAutomaton) -> bool {
        Arc::ptr_eq(&self.source, &other.source) && self.base == other.base
    }

    pub(crate) fn tables_at(&self, level: usize) -> Result<Arc<LevelTables>> {
        let abs = self.base + level;
        let mut cache = self.cache.lock().expect("table cache poisoned");
        if let Some(tables) = cache.get(&abs) {
            return Ok(Arc::clone(tables));
        }
        let tables = Arc::new(self.source.tables(abs).map_err(|e| reframe(e, self.base))?);
        cache.insert(abs, Arc::clone(&tables));
        Ok(tables)
    }

    /// One move: reading `letter` at `level` in `state` gives the next state
    /// and the emitted letter.
    pub fn step(&self, level: usize, state: StateId, letter: usize) -> Result<(StateId, usize)> {
        let tables = self.tables_at(level)?;
        if letter >= tables.size() {
            return Err(Error::LetterOutOfRange {
                level,
                letter,
                size: tables.size(),
            });
        }
        Ok((tables.next_state(state, letter), tables.output(state, letter)))
    }

    /// The output action of `state` at `level` as a permutation. Fails with
    /// `NotInvertible` when that row is not a bijection.
    pub fn output_perm(&self, level: usize, state: StateId) -> Result<LevelPermutation> {
        let tables = self.tables_at(level)?;
        LevelPermutation::from_images(level, tables.output_row(state).to_vec()).map_err(|_| {
            Error::NotInvertible {
                level,
                state: self.states[state].clone(),
            }
        })
    }

    /// Checks that every output row of the first `horizon` levels is a
    /// bijection; the result is remembered on the automaton.
    pub fn is_invertible_up_to(&self, horizon: usize) -> Result<bool> {
        {
            let flag = self.invert.lock().expect("invert flag poisoned");
            match *flag {
                InvertFlag::UpTo(h) if h >= horizon => return Ok(true),
                InvertFlag::FailsAt(level) if level < horizon => return Ok(false),
                _ => {}
            }
        }
        for level in 0..horizon {
            let tables = self.tables_at(level)?;
            if !tables.invertible() {
                *self.invert.lock().expect("invert flag poisoned") = InvertFlag::FailsAt(level);
                return Ok(false);
            }
        }
        let mut flag = self.invert.lock().expect("invert flag poisoned");
        if !matches!(*flag, InvertFlag::UpTo(h) if h >= horizon) {
            *flag = InvertFlag::UpTo(horizon);
        }
        Ok(true)
    }

    /// The horizon up to which invertibility has been certified, if any.
    pub fn certified_invertible_horizon(&self) -> Option<usize> {
        match *self.invert.lock().expect("invert flag poisoned") {
            InvertFlag::UpTo(h) => Some(h),
            _ => None,
        }
    }

    /// The automaton read from `k` levels further down: level `i` of the
    /// result is level `k + i` of `self`.
    pub fn shift(&self, k: usize) -> TVAutomaton {
        TVAutomaton {
            alphabet: self.alphabet.shift(k),
            states: Arc::clone(&self.states),
            source: Arc::clone(&self.source),
            base: self.base + k,
            display_offset: self.display_offset,
            cache: Arc::clone(&self.cache),
            invert: Arc::new(Mutex::new(InvertFlag::Unchecked)),
        }
    }

    /// The automaton whose state `q` acts as the inverse tree map of state
    /// `q` in `self`. Levels with non-bijective rows fail on access.
    pub fn inverse(&self) -> TVAutomaton {
        let source = InverseSource {
            inner: self.clone(),
        };
        Self::from_source(
            self.alphabet.clone(),
            self.states.as_ref().clone(),
            Arc::new(source),
            self.display_offset,
        )
    }

    /// The product automaton: state `(p, q)` acts as `p` followed by `q`.
    /// State pairs are flattened row-major into fresh names `(p,q)`.
    pub fn product(&self, other: &TVAutomaton) -> Result<TVAutomaton> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "left factor has alphabet `{}` (base {}), right factor `{}` (base {})",
                self.alphabet.describe(),
                self.alphabet.base_shift(),
                other.alphabet.describe(),
                other.alphabet.base_shift()
            )));
        }
        let mut states = Vec::with_capacity(self.states.len() * other.states.len());
        for p in self.states.iter() {
            for q in other.states.iter() {
                states.push(format!("({p},{q})"));
            }
        }
        let source = ProductSource {
            left: self.clone(),
            right: other.clone(),
        };
        Ok(Self::from_source(
            self.alphabet.clone(),
            states,
            Arc::new(source),
            self.display_offset,
        ))
    }

    /// Flattened id of the product state `(p, q)`.
    pub fn product_state(&self, other: &TVAutomaton, p: StateId, q: StateId) -> StateId {
        p * other.states.len() + q
    }

    /// Compares the tables of the first `levels` levels, ignoring state
    /// names.
    pub fn tables_equal_up_to(&self, other: &TVAutomaton, levels: usize) -> Result<bool> {
        if self.states.len() != other.states.len() {
            return Ok(false);
        }
        for level in 0..levels {
            if self.tables_at(level)? != other.tables_at(level)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Renders the level-indexed diagram as DOT: one node per (level, state)
    /// for the first `levels` levels plus the following sink level, edges
    /// `(i, q) -> (i + 1, next)` grouped by target with comma-joined letter
    /// labels.
    pub fn to_dot(&self, levels: usize, options: &DotOptions) -> Result<String> {
        let offset = self.display_offset;
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=box];\n");
        if levels > 0 {
            for level in 0..levels {
                let tables = self.tables_at(level)?;
                for (q, name) in self.states.iter().enumerate() {
                    let row = tables.output_row(q);
                    let action = match LevelPermutation::from_images(level, row.to_vec()) {
                        Ok(perm) => perm.cycle_string(offset),
                        Err(_) => format!(
                            "[{}]",
                            row.iter()
                                .map(|y| (y + offset).to_string())
                                .collect::<Vec<_>>()
                                .join(" ")
                        ),
                    };
                    out.push_str(&format!(
                        "  \"{level}:{name}\" [label=\"{name}: {action}\"];\n"
                    ));
                }
            }
            for (q, name) in self.states.iter().enumerate() {
                let _ = q;
                out.push_str(&format!("  \"{levels}:{name}\" [label=\"{name}\"];\n"));
            }
            for level in 0..levels {
                let tables = self.tables_at(level)?;
                for (q, name) in self.states.iter().enumerate() {
                    // Letters grouped by target state, emitted in state order.
                    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
                    for x in 0..tables.size() {
                        groups[tables.next_state(q, x)].push(x);
                    }
                    let largest = groups
                        .iter()
                        .enumerate()
                        .max_by_key(|(_, letters)| letters.len())
                        .map(|(target, _)| target)
                        .unwrap_or(0);
                    let unique_largest = groups
                        .iter()
                        .filter(|letters| letters.len() == groups[largest].len())
                        .count()
                        == 1;
                    for (target, letters) in groups.iter().enumerate() {
                        if letters.is_empty() {
                            continue;
                        }
                        let implied = groups.iter().filter(|l| !l.is_empty()).count() == 1
                            || (unique_largest && target == largest);
                        let label = letters
                            .iter()
                            .map(|x| (x + offset).to_string())
                            .collect::<Vec<_>>()
                            .join(",");
                        let target_name = &self.states[target];
                        if options.elide_implied_labels && implied {
                            out.push_str(&format!(
                                "  \"{level}:{name}\" -> \"{}:{target_name}\";\n",
                                level + 1
                            ));
                        } else {
                            out.push_str(&format!(
                                "  \"{level}:{name}\" -> \"{}:{target_name}\" [label=\"{label}\"];\n",
                                level + 1
                            ));
                        }
                    }
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// Options for [`TVAutomaton::to_dot`].
#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    /// Omit the label of an edge whose letters are implied by the labels of
    /// its sibling edges (the lone edge of a state, or the unique largest
    /// letter group). Off by default: every edge is labelled.
    pub elide_implied_labels: bool,
}

// Levels of composite automata are counted in the frame of the composite;
// errors from inner shifted automata already carry composite-relative levels,
// but errors from this automaton's own source carry absolute ones.
fn reframe(e: Error, base: usize) -> Error {
    match e {
        Error::HorizonExceeded { level, horizon } => Error::HorizonExceeded {
            level: level.saturating_sub(base),
            horizon,
        },
        other => other,
    }
}

struct ConstantSource {
    tables: LevelTables,
}

impl TableSource for ConstantSource {
    fn tables(&self, _level: usize) -> Result<LevelTables> {
        Ok(self.tables.clone())
    }

    fn is_constant(&self) -> bool {
        true
    }
}

struct HorizonSource {
    levels: Vec<LevelTables>,
}

impl TableSource for HorizonSource {
    fn tables(&self, level: usize) -> Result<LevelTables> {
        self.levels
            .get(level)
            .cloned()
            .ok_or_else(|| Error::HorizonExceeded {
                level,
                horizon: self.levels.len(),
            })
    }
}

struct DiagonalSource {
    alphabet: ChangingAlphabet,
    n_states: usize,
    #[allow(clippy::type_complexity)]
    perms: Box<dyn Fn(usize, StateId) -> Result<LevelPermutation> + Send + Sync>,
}

impl TableSource for DiagonalSource {
    fn tables(&self, level: usize) -> Result<LevelTables> {
        let size = self.alphabet.size_at(level)?;
        let mut outputs = Vec::with_capacity(self.n_states);
        let mut transitions = Vec::with_capacity(self.n_states);
        for q in 0..self.n_states {
            let perm = (self.perms)(level, q)?;
            if perm.size() != size {
                return Err(Error::BadPermutation(format!(
                    "state {q} was given a permutation of {} letters at level {level}, \
                     alphabet size is {size}",
                    perm.size()
                )));
            }
            outputs.push(perm.images().to_vec());
            transitions.push(vec![q; size]);
        }
        LevelTables::new(size, self.n_states, transitions, outputs)
    }
}

struct InverseSource {
    inner: TVAutomaton,
}

impl TableSource for InverseSource {
    fn tables(&self, level: usize) -> Result<LevelTables> {
        let tables = self.inner.tables_at(level)?;
        if let Some(state) = tables.first_non_bijective_state() {
            return Err(Error::NotInvertible {
                level,
                state: self.inner.states[state].clone(),
            });
        }
        let n = tables.n_states();
        let size = tables.size();
        let mut transitions = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        for q in 0..n {
            let inv = tables.output_inverse_row(q).expect("checked bijective");
            // Reading x, the inverse emits y with outputs[q][y] = x and the
            // state advances as the original would have on y.
            let trans_row = (0..size).map(|x| tables.next_state(q, inv[x])).collect();
            transitions.push(trans_row);
            outputs.push(inv.to_vec());
        }
        LevelTables::new(size, n, transitions, outputs)
    }

    fn is_constant(&self) -> bool {
        self.inner.source.is_constant()
    }
}

struct ProductSource {
    left: TVAutomaton,
    right: TVAutomaton,
}

impl TableSource for ProductSource {
    fn tables(&self, level: usize) -> Result<LevelTables> {
        let lt = self.left.tables_at(level)?;
        let rt = self.right.tables_at(level)?;
        if lt.size() != rt.size() {
            return Err(Error::AlphabetMismatch(format!(
                "product factors have sizes {} and {} at level {level}",
                lt.size(),
                rt.size()
            )));
        }
        let size = lt.size();
        let n = lt.n_states() * rt.n_states();
        let mut transitions = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        for p in 0..lt.n_states() {
            for q in 0..rt.n_states() {
                let mut trans_row = Vec::with_capacity(size);
                let mut out_row = Vec::with_capacity(size);
                for x in 0..size {
                    let y = lt.output(p, x);
                    trans_row.push(lt.next_state(p, x) * rt.n_states() + rt.next_state(q, y));
                    out_row.push(rt.output(q, y));
                }
                transitions.push(trans_row);
                outputs.push(out_row);
            }
        }
        LevelTables::new(size, n, transitions, outputs)
    }

    fn is_constant(&self) -> bool {
        self.left.source.is_constant() && self.right.source.is_constant()
    }
}
