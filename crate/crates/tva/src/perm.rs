//! Permutations of the letters of a single tree level.
//!
//! Letters are `0..size` internally; parsing and printing take a display
//! offset so that presets whose traditional letters start at 1 round-trip
//! unchanged.

use crate::{Error, Result};

/// A bijection of `0..size` attached to a tree level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelPermutation {
    level: usize,
    images: Vec<usize>,
}

impl LevelPermutation {
    /// The identity on `size` letters at `level`.
    pub fn identity(level: usize, size: usize) -> Self {
        LevelPermutation {
            level,
            images: (0..size).collect(),
        }
    }

    /// Builds a permutation from its image table. Fails unless the table is
    /// a bijection of `0..images.len()`.
    pub fn from_images(level: usize, images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            if y >= images.len() || seen[y] {
                return Err(Error::BadPermutation(format!(
                    "images {images:?} are not a bijection of 0..{}",
                    images.len()
                )));
            }
            seen[y] = true;
        }
        Ok(LevelPermutation { level, images })
    }

    /// Builds a permutation on `size` letters as the composition of the
    /// given cycles, applied left to right. Cycles need not be disjoint but
    /// must not repeat a letter internally.
    pub fn from_cycles(level: usize, size: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut perm = LevelPermutation::identity(level, size);
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x >= size {
                    return Err(Error::BadPermutation(format!(
                        "cycle letter {x} out of range for size {size}"
                    )));
                }
                if cycle[..pos].contains(&x) {
                    return Err(Error::BadPermutation(format!(
                        "cycle {cycle:?} repeats letter {x}"
                    )));
                }
            }
            if cycle.is_empty() {
                continue;
            }
            let mut next = LevelPermutation::identity(level, size);
            for (pos, &x) in cycle.iter().enumerate() {
                next.images[x] = cycle[(pos + 1) % cycle.len()];
            }
            perm = perm.then(&next)?;
        }
        Ok(perm)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of one letter.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        LevelPermutation {
            level: self.level,
            images,
        }
    }

    /// `self` applied first, then `other`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::BadPermutation(format!(
                "cannot compose permutations of sizes {} and {}",
                self.size(),
                other.size()
            )));
        }
        Ok(LevelPermutation {
            level: self.level,
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        })
    }

    /// Integer power, negative exponents via the inverse.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = LevelPermutation::identity(self.level, self.size());
        for _ in 0..k.unsigned_abs() {
            acc = acc.then(&base).expect("sizes agree");
        }
        acc
    }

    /// Cycle decomposition: each cycle starts at its least letter, cycles
    /// sorted by first letter, fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle notation with letters shifted by `offset`, `"id"` for the
    /// identity.
    pub fn cycle_string(&self, offset: usize) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "id".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let inner = c
                    .iter()
                    .map(|x| (x + offset).to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("({inner})")
            })
            .collect()
    }

    /// Parses cycle notation such as `"(0 1)(2 4 3)"`. Accepts `"id"` and
    /// `"()"` for the identity and both spaces and commas as separators.
    /// Letters are read with `offset` subtracted.
    pub fn parse_cycles(level: usize, size: usize, text: &str, offset: usize) -> Result<Self> {
        let text = text.trim();
        if text == "id" || text == "()" {
            return Ok(LevelPermutation::identity(level, size));
        }
        let mut cycles = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let Some(open) = rest.find('(') else {
                return Err(Error::BadPermutation(format!(
                    "unexpected trailing text `{rest}` in cycle notation"
                )));
            };
            if !rest[..open].trim().is_empty() {
                return Err(Error::BadPermutation(format!(
                    "unexpected text `{}` before cycle",
                    rest[..open].trim()
                )));
            }
            let Some(close) = rest[open..].find(')') else {
                return Err(Error::BadPermutation("unbalanced `(`".to_string()));
            };
            let body = &rest[open + 1..open + close];
            let mut cycle = Vec::new();
            for token in body.split(|c: char| c.is_whitespace() || c == ',') {
                if token.is_empty() {
                    continue;
                }
                let raw: usize = token.parse().map_err(|_| {
                    Error::BadPermutation(format!("bad letter `{token}` in cycle notation"))
                })?;
                let letter = raw.checked_sub(offset).ok_or_else(|| {
                    Error::BadPermutation(format!(
                        "letter {raw} below display offset {offset}"
                    ))
                })?;
                cycle.push(letter);
            }
            cycles.push(cycle);
            rest = rest[open + close + 1..].trim_start();
        }
        LevelPermutation::from_cycles(level, size, &cycles)
    }
}

impl std::fmt::Display for LevelPermutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.cycle_string(0))
    }
}
