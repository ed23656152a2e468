//! Time-varying automata over changing alphabets.
//!
//! A changing alphabet is a sequence `X = (X_0, X_1, ...)` of finite
//! alphabets; the words with letters drawn level by level from `X` form a
//! rooted tree. A time-varying automaton assigns every state a transition
//! row and an output map *per level*, so the machine read at level `i` may
//! differ from the machine read at level `i + 1`. States act on the tree by
//! rewriting words letter by letter, and signed products of states form
//! groups whose structure this crate probes up to a chosen depth.
//!
//! The crate is organised bottom-up:
//!
//! * [`alphabet`]: alphabet descriptors, level shifts, tree words;
//! * [`perm`]: single-level permutations with cycle notation;
//! * [`automaton`]: the automaton type and its structural operations
//!   (shift, inverse, product, diagram export);
//! * [`action`]: signed state words acting on tree words;
//! * [`analysis`]: bounded-depth triviality, equality, order, commutation,
//!   growth profiles, relation suites, and a self-similarity falsifier;
//! * [`lamplighter`]: wreath-product automaton families over growing
//!   alphabets together with their distinguished elements;
//! * [`presets`]: ready-made automata with relation suites;
//! * [`jsonspec`]: a JSON interchange format for automata.

pub mod action;
pub mod alphabet;
pub mod analysis;
pub mod automaton;
pub mod jsonspec;
pub mod lamplighter;
pub mod perm;
pub mod presets;

pub use action::{Factor, GroupElement};
pub use alphabet::{ChangingAlphabet, ParamSeq, TreeWord};
pub use analysis::TrivialityVerdict;
pub use automaton::{StateId, TVAutomaton};
pub use lamplighter::{CycleLayout, ExponentVector, KSpec, LayoutStyle, WreathAutomaton};
pub use perm::LevelPermutation;
pub use presets::{build_preset, PresetBundle, PresetParams};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A level past the explicit horizon of a descriptor was queried.
    #[error("level {level} is beyond the descriptor horizon of {horizon} levels")]
    HorizonExceeded { level: usize, horizon: usize },
    /// A letter does not fit the alphabet of its level.
    #[error("letter {letter} out of range at level {level} (alphabet size {size})")]
    LetterOutOfRange {
        level: usize,
        letter: usize,
        size: usize,
    },
    /// An inverse was requested where an output row is not a bijection.
    #[error("state `{state}` has a non-bijective output row at level {level}")]
    NotInvertible { level: usize, state: String },
    /// Two automata that must share an alphabet do not.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    /// Images or cycles do not describe a valid permutation.
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    /// A state name not present in the automaton.
    #[error("unknown state `{0}`")]
    UnknownState(String),
    /// A word is anchored at a different level than the acting element.
    #[error("word starts at level {word} but the element is anchored at level {element}")]
    LevelMismatch { element: usize, word: usize },
    /// An exponent vector entry violates the torsion bounds of its component.
    #[error("exponent {value} out of range for torsion component {component} of order {order}")]
    BadExponent {
        component: usize,
        value: i64,
        order: u32,
    },
    /// A preset name that the registry does not know.
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    /// Structurally valid input with inconsistent or unsupported parameters.
    #[error("bad parameters: {0}")]
    BadParameters(String),
    /// Malformed textual input (words, elements, sequences, JSON).
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
