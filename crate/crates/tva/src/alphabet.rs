//! Changing alphabets and the tree words they span.
//!
//! A changing alphabet fixes, for every level `i`, a finite letter set
//! `0..size_at(i)`. Words carry the level their first letter lives on, so a
//! word is a path in the rooted tree whose branching varies with depth.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::{Error, Result};

/// An integer sequence `r_i >= 2`, affine except for an optional explicit
/// prefix: `r_i = prefix[i]` while the prefix lasts, `slope * i + intercept`
/// afterwards. The sequence is unbounded exactly when `slope >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamSeq {
    prefix: Vec<usize>,
    slope: usize,
    intercept: usize,
}

impl ParamSeq {
    /// `r_i = slope * i + intercept`; `intercept` must be at least 2.
    pub fn affine(slope: usize, intercept: usize) -> Result<Self> {
        Self::with_prefix(Vec::new(), slope, intercept)
    }

    /// Explicit leading values followed by the affine tail.
    pub fn with_prefix(prefix: Vec<usize>, slope: usize, intercept: usize) -> Result<Self> {
        if intercept < 2 {
            return Err(Error::BadParameters(format!(
                "sequence intercept must be at least 2, got {intercept}"
            )));
        }
        if let Some(&bad) = prefix.iter().find(|&&r| r < 2) {
            return Err(Error::BadParameters(format!(
                "sequence entries must be at least 2, got {bad}"
            )));
        }
        Ok(ParamSeq {
            prefix,
            slope,
            intercept,
        })
    }

    pub fn value(&self, i: usize) -> usize {
        match self.prefix.get(i) {
            Some(&r) => r,
            None => self.slope * i + self.intercept,
        }
    }

    /// Whether the values grow without bound.
    pub fn is_unbounded(&self) -> bool {
        self.slope >= 1
    }
}

impl fmt::Display for ParamSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            let list = self
                .prefix
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",");
            write!(f, "list:{list}")?;
            if self.slope != 1 || self.intercept != 2 {
                write!(f, ";{}", affine_text(self.slope, self.intercept))?;
            }
            Ok(())
        } else {
            f.write_str(&affine_text(self.slope, self.intercept))
        }
    }
}

fn affine_text(slope: usize, intercept: usize) -> String {
    match slope {
        0 => intercept.to_string(),
        1 => format!("i+{intercept}"),
        _ => format!("{slope}*i+{intercept}"),
    }
}

impl FromStr for ParamSeq {
    type Err = Error;

    /// Accepts `"i+2"`, `"3*i+5"`, a bare constant `"4"`, and
    /// `"list:2,3,4"`. A list may append an affine tail after `;`, e.g.
    /// `"list:5,5;i+2"`; without one the tail defaults to `i+2`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("list:") {
            let (list, tail) = match rest.split_once(';') {
                Some((list, tail)) => (list, Some(tail)),
                None => (rest, None),
            };
            let prefix = list
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad sequence entry `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if prefix.is_empty() {
                return Err(Error::Parse("empty sequence list".to_string()));
            }
            let (slope, intercept) = match tail {
                Some(tail) => parse_affine(tail)?,
                None => (1, 2),
            };
            return ParamSeq::with_prefix(prefix, slope, intercept);
        }
        let (slope, intercept) = parse_affine(text)?;
        ParamSeq::affine(slope, intercept)
    }
}

fn parse_affine(text: &str) -> Result<(usize, usize)> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let parse_num = |tok: &str| {
        tok.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad number `{tok}` in sequence `{text}`")))
    };
    match compact.split_once('i') {
        None => Ok((0, parse_num(&compact)?)),
        Some((head, tail)) => {
            let slope = match head.strip_suffix('*') {
                Some("") | None if head.is_empty() => 1,
                Some(num) => parse_num(num)?,
                None => {
                    return Err(Error::Parse(format!(
                        "expected `a*i+b`, `i+b`, `b`, or `list:...`, got `{text}`"
                    )))
                }
            };
            let intercept = match tail.strip_prefix('+') {
                Some(num) => parse_num(num)?,
                None if tail.is_empty() => 0,
                None => {
                    return Err(Error::Parse(format!(
                        "expected `+b` after `i` in sequence `{text}`"
                    )))
                }
            };
            Ok((slope, intercept))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum AlphabetKind {
    Constant(usize),
    /// Explicit sizes; levels at or past the end are errors.
    Horizon(Vec<usize>),
    /// `size_at(i) = multiplier * seq(i) + offset`.
    Parametric {
        multiplier: usize,
        offset: usize,
        seq: ParamSeq,
    },
}

/// A level-indexed family of alphabets, shiftable to start at a later level.
#[derive(Debug, Clone)]
pub struct ChangingAlphabet {
    kind: Arc<AlphabetKind>,
    base: usize,
}

impl PartialEq for ChangingAlphabet {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.kind, &*other.kind) {
            // A constant alphabet reads the same from any base level.
            (AlphabetKind::Constant(a), AlphabetKind::Constant(b)) => a == b,
            (a, b) => a == b && self.base == other.base,
        }
    }
}

impl Eq for ChangingAlphabet {}

impl ChangingAlphabet {
    /// The same `size` at every level.
    pub fn constant(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::BadParameters(
                "alphabet size must be at least 1".to_string(),
            ));
        }
        Ok(Self::with_kind(AlphabetKind::Constant(size)))
    }

    /// Explicit sizes for levels `0..sizes.len()`; anything past the end is
    /// a `HorizonExceeded` error.
    pub fn with_horizon(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::BadParameters(
                "horizon alphabet needs at least one level".to_string(),
            ));
        }
        if sizes.contains(&0) {
            return Err(Error::BadParameters(
                "alphabet size must be at least 1 on every level".to_string(),
            ));
        }
        Ok(Self::with_kind(AlphabetKind::Horizon(sizes)))
    }

    /// `size_at(i) = multiplier * seq(i) + offset`.
    pub fn parametric(multiplier: usize, offset: usize, seq: ParamSeq) -> Result<Self> {
        if multiplier == 0 && offset == 0 {
            return Err(Error::BadParameters(
                "parametric alphabet would be empty".to_string(),
            ));
        }
        Ok(Self::with_kind(AlphabetKind::Parametric {
            multiplier,
            offset,
            seq,
        }))
    }

    fn with_kind(kind: AlphabetKind) -> Self {
        ChangingAlphabet {
            kind: Arc::new(kind),
            base: 0,
        }
    }

    /// How many levels the alphabet has been shifted from its descriptor.
    pub fn base_shift(&self) -> usize {
        self.base
    }

    /// Remaining queryable levels for a horizon descriptor, `None` when the
    /// alphabet extends forever.
    pub fn horizon(&self) -> Option<usize> {
        match &*self.kind {
            AlphabetKind::Horizon(sizes) => Some(sizes.len().saturating_sub(self.base)),
            _ => None,
        }
    }

    pub fn size_at(&self, level: usize) -> Result<usize> {
        let abs = self.base + level;
        match &*self.kind {
            AlphabetKind::Constant(size) => Ok(*size),
            AlphabetKind::Horizon(sizes) => {
                sizes
                    .get(abs)
                    .copied()
                    .ok_or_else(|| Error::HorizonExceeded {
                        level,
                        horizon: sizes.len().saturating_sub(self.base),
                    })
            }
            AlphabetKind::Parametric {
                multiplier,
                offset,
                seq,
            } => Ok(multiplier * seq.value(abs) + offset),
        }
    }

    /// The alphabet as seen from `k` levels further down.
    pub fn shift(&self, k: usize) -> Self {
        ChangingAlphabet {
            kind: Arc::clone(&self.kind),
            base: self.base + k,
        }
    }

    pub fn check_letter(&self, level: usize, letter: usize) -> Result<()> {
        let size = self.size_at(level)?;
        if letter >= size {
            return Err(Error::LetterOutOfRange {
                level,
                letter,
                size,
            });
        }
        Ok(())
    }

    pub fn check_word(&self, word: &TreeWord) -> Result<()> {
        for (offset, &letter) in word.letters().iter().enumerate() {
            self.check_letter(word.start_level() + offset, letter)?;
        }
        Ok(())
    }

    /// All words of length exactly `depth` starting at `start_level`, in
    /// lexicographic order. Fails eagerly if any touched level is past the
    /// horizon.
    pub fn words(&self, start_level: usize, depth: usize) -> Result<Words> {
        let mut sizes = Vec::with_capacity(depth);
        for j in 0..depth {
            sizes.push(self.size_at(start_level + j)?);
        }
        Ok(Words {
            start: start_level,
            sizes,
            next: Some(vec![0; depth]),
        })
    }

    /// Short human-readable description of the level sizes.
    pub fn describe(&self) -> String {
        match &*self.kind {
            AlphabetKind::Constant(size) => format!("constant {size}"),
            AlphabetKind::Horizon(sizes) => format!(
                "explicit sizes for {} levels",
                sizes.len().saturating_sub(self.base)
            ),
            AlphabetKind::Parametric {
                multiplier,
                offset,
                seq,
            } => {
                let mut text = match multiplier {
                    1 => "r(i)".to_string(),
                    m => format!("{m}*r(i)"),
                };
                if *offset > 0 {
                    text.push_str(&format!("+{offset}"));
                }
                text.push_str(&format!(", r(i) = {seq}"));
                if self.base > 0 {
                    text.push_str(&format!(", shifted by {}", self.base));
                }
                text
            }
        }
    }
}

/// A path in the tree: the level of its first letter plus the letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeWord {
    start: usize,
    letters: Vec<usize>,
}

impl TreeWord {
    pub fn new(start: usize, letters: Vec<usize>) -> Self {
        TreeWord { start, letters }
    }

    pub fn empty(start: usize) -> Self {
        TreeWord {
            start,
            letters: Vec::new(),
        }
    }

    pub fn start_level(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Appends `tail`, which must start exactly where `self` ends.
    pub fn concat(&self, tail: &TreeWord) -> Result<TreeWord> {
        if tail.start != self.start + self.letters.len() {
            return Err(Error::LevelMismatch {
                element: self.start + self.letters.len(),
                word: tail.start,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&tail.letters);
        Ok(TreeWord {
            start: self.start,
            letters,
        })
    }

    /// Parses `"<start>: <letters>"` with `offset` subtracted from each
    /// letter; `"2:"` is the empty word at level 2.
    pub fn parse(text: &str, offset: usize) -> Result<Self> {
        let Some((head, tail)) = text.split_once(':') else {
            return Err(Error::Parse(format!(
                "word `{text}` is missing the `start:` prefix"
            )));
        };
        let start: usize = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad start level `{}`", head.trim())))?;
        let mut letters = Vec::new();
        for tok in tail.split_whitespace() {
            let raw: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter `{tok}` in word `{text}`")))?;
            let letter = raw.checked_sub(offset).ok_or_else(|| {
                Error::Parse(format!("letter {raw} below display offset {offset}"))
            })?;
            letters.push(letter);
        }
        Ok(TreeWord { start, letters })
    }

    /// `"<start>: <letters>"` with `offset` added to each letter.
    pub fn display_with(&self, offset: usize) -> String {
        let mut text = format!("{}:", self.start);
        for &letter in &self.letters {
            text.push_str(&format!(" {}", letter + offset));
        }
        text
    }
}

impl fmt::Display for TreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(0))
    }
}

impl FromStr for TreeWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        TreeWord::parse(text, 0)
    }
}

/// Lexicographic iterator over the words of one length; see
/// [`ChangingAlphabet::words`].
pub struct Words {
    start: usize,
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for Words {
    type Item = TreeWord;

    fn next(&mut self) -> Option<TreeWord> {
        let current = self.next.take()?;
        let word = TreeWord::new(self.start, current.clone());
        let mut digits = current;
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < self.sizes[pos] {
                self.next = Some(digits);
                return Some(word);
            }
            digits[pos] = 0;
        }
        // Length zero yields the empty word exactly once.
        Some(word)
    }
}
