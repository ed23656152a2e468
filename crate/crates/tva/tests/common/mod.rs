//! Independent oracles shared by the integration tests.
//!
//! Everything here is deliberately naive: word enumeration instead of
//! section search, direct cycle-index arithmetic instead of table lookups,
//! and abstract group arithmetic instead of automata. The tests compare the
//! fast implementations against these.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet, VecDeque};

use tva::lamplighter::{CycleLayout, WreathAutomaton};
use tva::GroupElement;

/// Enumeration oracle: an element is trivial to `depth` iff it fixes every
/// word of every length up to `depth`.
pub fn oracle_trivial(element: &GroupElement, depth: usize) -> bool {
    let alphabet = element.automaton().alphabet();
    for d in 0..=depth {
        for word in alphabet.words(element.base_level(), d).unwrap() {
            if element.apply(&word).unwrap() != word {
                return false;
            }
        }
    }
    true
}

/// Applies `cycle^power` to `x` by index arithmetic; `x` outside the cycle
/// is fixed.
fn cycle_pow(cycle: &[usize], power: i64, x: usize) -> usize {
    match cycle.iter().position(|&c| c == x) {
        Some(t) => {
            let len = cycle.len() as i64;
            cycle[(t as i64 + power).rem_euclid(len) as usize]
        }
        None => x,
    }
}

/// Materializes the per-level layouts once; the oracles are pure cycle
/// arithmetic over these.
pub fn layouts(wreath: &WreathAutomaton, levels: usize) -> Vec<CycleLayout> {
    (0..levels).map(|i| wreath.layout(i).unwrap()).collect()
}

/// `α_i^k(x)`: every `π` cycle of the level raised to `k`.
fn alpha_pow(layout: &CycleLayout, k: i64, x: usize) -> usize {
    for s in 0..layout.components() {
        let image = cycle_pow(layout.pi(s), k, x);
        if image != x {
            return image;
        }
    }
    x
}

/// `Σ_{M,i}(x)`: the σ cycles raised to the component exponents.
fn sigma_m(layout: &CycleLayout, m: &[i64], x: usize) -> usize {
    for s in 0..layout.components() {
        let image = cycle_pow(layout.sigma(s), m[s], x);
        if image != x {
            return image;
        }
    }
    x
}

/// Direct recursion for `c_s` read from `level`: a word starting with the
/// marked letter is fixed entirely; otherwise the head moves by `σ_s` and
/// the recursion continues one level down.
pub fn oracle_c(layouts: &[CycleLayout], s: usize, word: &[usize]) -> Vec<usize> {
    let Some((&x, tail)) = word.split_first() else {
        return Vec::new();
    };
    let layout = &layouts[0];
    if x == layout.marked(s) {
        return word.to_vec();
    }
    let mut out = vec![cycle_pow(layout.sigma(s), 1, x)];
    out.extend(oracle_c(&layouts[1..], s, tail));
    out
}

/// Direct recursion for `c_s^k`: as [`oracle_c`] with `σ_s^k` at the head.
pub fn oracle_c_pow(layouts: &[CycleLayout], s: usize, k: i64, word: &[usize]) -> Vec<usize> {
    let Some((&x, tail)) = word.split_first() else {
        return Vec::new();
    };
    let layout = &layouts[0];
    if x == layout.marked(s) {
        return word.to_vec();
    }
    let mut out = vec![cycle_pow(layout.sigma(s), k, x)];
    out.extend(oracle_c_pow(&layouts[1..], s, k, tail));
    out
}

/// Direct recursion for the combined product over an exponent vector: a
/// marked head letter of component `s` zeroes that component and recurses;
/// any other head letter moves by `Σ_M`.
pub fn oracle_c_product(layouts: &[CycleLayout], m: &[i64], word: &[usize]) -> Vec<usize> {
    let Some((&x, tail)) = word.split_first() else {
        return Vec::new();
    };
    let layout = &layouts[0];
    for s in 0..layout.components() {
        if x == layout.marked(s) {
            let mut zeroed = m.to_vec();
            zeroed[s] = 0;
            let mut out = vec![x];
            out.extend(oracle_c_product(&layouts[1..], &zeroed, tail));
            return out;
        }
    }
    let mut out = vec![sigma_m(layout, m, x)];
    out.extend(oracle_c_product(&layouts[1..], m, tail));
    out
}

/// Direct recursion for the conjugate `a⁻ᵏ · C_M · aᵏ`: the marked letters
/// move to their `α^k` images, everything else still moves by `Σ_M`.
pub fn oracle_d_product(layouts: &[CycleLayout], k: i64, m: &[i64], word: &[usize]) -> Vec<usize> {
    let Some((&x, tail)) = word.split_first() else {
        return Vec::new();
    };
    let layout = &layouts[0];
    for s in 0..layout.components() {
        if x == alpha_pow(layout, k, layout.marked(s)) {
            let mut zeroed = m.to_vec();
            zeroed[s] = 0;
            let mut out = vec![x];
            out.extend(oracle_d_product(&layouts[1..], k, &zeroed, tail));
            return out;
        }
    }
    let mut out = vec![sigma_m(layout, m, x)];
    out.extend(oracle_d_product(&layouts[1..], k, m, tail));
    out
}

/// Cumulative counts of reduced words of length ≤ radius in a free group of
/// the given rank: 1, then each step multiplies the frontier by `2·rank − 1`
/// (the first step by `2·rank`).
pub fn free_group_ball(rank: usize, radius: usize) -> Vec<u64> {
    let mut counts = vec![1u64];
    let mut frontier = 1u64;
    for step in 0..radius {
        frontier *= if step == 0 {
            2 * rank as u64
        } else {
            2 * rank as u64 - 1
        };
        counts.push(counts.last().unwrap() + frontier);
    }
    counts
}

/// An element of the restricted wreath product `ℤ ≀ ℤ`: a finitely supported
/// lamp configuration and a cursor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WreathElem {
    /// Lamp values by position, zero entries removed.
    lamps: BTreeMap<i64, i64>,
    cursor: i64,
}

impl WreathElem {
    pub fn identity() -> Self {
        WreathElem {
            lamps: BTreeMap::new(),
            cursor: 0,
        }
    }

    /// Product `(φ₁,t₁)·(φ₂,t₂) = (φ₁ + φ₂(·−t₁), t₁+t₂)`.
    pub fn mul(&self, other: &WreathElem) -> WreathElem {
        let mut lamps = self.lamps.clone();
        for (&pos, &v) in &other.lamps {
            let entry = lamps.entry(pos + self.cursor).or_insert(0);
            *entry += v;
            if *entry == 0 {
                lamps.remove(&(pos + self.cursor));
            }
        }
        WreathElem {
            lamps,
            cursor: self.cursor + other.cursor,
        }
    }

    pub fn inverse(&self) -> WreathElem {
        let mut lamps = BTreeMap::new();
        for (&pos, &v) in &self.lamps {
            lamps.insert(pos - self.cursor, -v);
        }
        WreathElem {
            lamps,
            cursor: -self.cursor,
        }
    }

    /// The cursor move `u`.
    pub fn gen_u() -> Self {
        WreathElem {
            lamps: BTreeMap::new(),
            cursor: 1,
        }
    }

    /// The lamp-then-move generator `η·u`.
    pub fn gen_eta_u() -> Self {
        let mut lamps = BTreeMap::new();
        lamps.insert(0, 1);
        WreathElem { lamps, cursor: 1 }
    }
}

/// Ball profile of `ℤ ≀ ℤ` with the given generators, by breadth-first
/// search over the group arithmetic.
pub fn wreath_ball(generators: &[WreathElem], radius: usize) -> Vec<u64> {
    let mut steps = Vec::new();
    for g in generators {
        steps.push(g.clone());
        steps.push(g.inverse());
    }
    let mut seen: HashSet<WreathElem> = HashSet::new();
    seen.insert(WreathElem::identity());
    let mut frontier = vec![WreathElem::identity()];
    let mut counts = vec![1u64];
    for _ in 0..radius {
        let mut next = Vec::new();
        for e in &frontier {
            for g in &steps {
                let product = e.mul(g);
                if seen.insert(product.clone()) {
                    next.push(product);
                }
            }
        }
        counts.push(seen.len() as u64);
        frontier = next;
    }
    counts
}

/// An element of `K × ℤ` for `K = ℤ^{n₁} × C_{r₁} × … `: component
/// exponents (torsion reduced) plus the separate integer coordinate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CartesianElem {
    components: Vec<i64>,
    shift: i64,
}

impl CartesianElem {
    pub fn identity(n: usize) -> Self {
        CartesianElem {
            components: vec![0; n],
            shift: 0,
        }
    }

    /// Generator images: the plain shift for `a`, a component bump plus the
    /// shift for each `b_s`.
    pub fn generator(n: usize, torsion: &[(usize, u32)], which: Option<usize>) -> Self {
        let mut e = CartesianElem::identity(n);
        e.shift = 1;
        if let Some(s) = which {
            e.components[s] = 1;
        }
        e.reduce(torsion);
        e
    }

    pub fn mul(&self, other: &CartesianElem, torsion: &[(usize, u32)]) -> CartesianElem {
        let mut out = self.clone();
        for (i, v) in other.components.iter().enumerate() {
            out.components[i] += v;
        }
        out.shift += other.shift;
        out.reduce(torsion);
        out
    }

    pub fn inverse(&self, torsion: &[(usize, u32)]) -> CartesianElem {
        let mut out = CartesianElem {
            components: self.components.iter().map(|v| -v).collect(),
            shift: -self.shift,
        };
        out.reduce(torsion);
        out
    }

    fn reduce(&mut self, torsion: &[(usize, u32)]) {
        for &(s, order) in torsion {
            self.components[s] = self.components[s].rem_euclid(order as i64);
        }
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.components.iter().all(|&v| v == 0)
    }
}

/// Ball profile of `K × ℤ` by breadth-first search.
pub fn cartesian_ball(
    n: usize,
    torsion: &[(usize, u32)],
    generators: &[CartesianElem],
    radius: usize,
) -> Vec<u64> {
    let mut steps = Vec::new();
    for g in generators {
        steps.push(g.clone());
        steps.push(g.inverse(torsion));
    }
    let mut seen: HashSet<CartesianElem> = HashSet::new();
    seen.insert(CartesianElem::identity(n));
    let mut frontier: VecDeque<CartesianElem> = VecDeque::new();
    frontier.push_back(CartesianElem::identity(n));
    let mut counts = vec![1u64];
    for _ in 0..radius {
        let mut next = VecDeque::new();
        for e in &frontier {
            for g in &steps {
                let product = e.mul(g, torsion);
                if seen.insert(product.clone()) {
                    next.push_back(product);
                }
            }
        }
        counts.push(seen.len() as u64);
        frontier = next;
    }
    counts
}
