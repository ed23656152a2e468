//! Wreath-product automata over growing alphabets.
//!
//! For an abelian group `K = ℤ^{n₁} × (C_{r₁} × … × C_{r_{n₂}})` and an
//! unbounded size sequence, each level's alphabet carries `2n` pairwise
//! disjoint cycles `π_s`, `σ_s` (`n = n₁ + n₂`): state `a` acts by the
//! product `α` of all `π` cycles, state `b_s` by `σ_s·α`, and each `π_s`
//! carries a marked letter. The diagonal machine never changes state and
//! generates `K × ℤ`; rerouting `b_s` to `a` exactly at the marked letter
//! yields the reset machine, whose states generate the wreath product
//! `K ≀ ℤ`. The distinguished elements `c_s = b_s·a⁻¹`, their conjugates
//! `d_{k,s} = a⁻ᵏ·c_s·aᵏ`, the combined products over exponent vectors, and
//! the marked-letter witness words are what the analysis suites probe.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::GroupElement;
use crate::alphabet::{ChangingAlphabet, ParamSeq, TreeWord};
use crate::automaton::{LevelTables, StateId, TVAutomaton, TableSource};
use crate::perm::LevelPermutation;
use crate::{Error, Result};

/// Shape of the abelian base group `K`: the free rank `n₁` and the torsion
/// orders `r₁..r_{n₂}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSpec {
    free_rank: usize,
    torsion: Vec<u32>,
}

impl KSpec {
    pub fn new(free_rank: usize, torsion: Vec<u32>) -> Result<Self> {
        if free_rank + torsion.len() == 0 {
            return Err(Error::BadParameters(
                "the base group needs at least one cyclic component".to_string(),
            ));
        }
        if let Some(&bad) = torsion.iter().find(|&&r| r < 2) {
            return Err(Error::BadParameters(format!(
                "torsion order {bad} is below 2"
            )));
        }
        Ok(KSpec { free_rank, torsion })
    }

    /// `ℤ^{free_rank}` with no torsion part.
    pub fn free(free_rank: usize) -> Result<Self> {
        Self::new(free_rank, Vec::new())
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[u32] {
        &self.torsion
    }

    /// Number of cyclic components `n`.
    pub fn components(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Order of the 0-based component `s`: `None` for free components.
    pub fn component_order(&self, s: usize) -> Option<u32> {
        if s < self.free_rank {
            None
        } else {
            self.torsion.get(s - self.free_rank).copied()
        }
    }

    fn torsion_total(&self) -> usize {
        self.torsion.iter().map(|&r| r as usize).sum()
    }
}

impl fmt::Display for KSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for &r in &self.torsion {
            parts.push(format!("C{r}"));
        }
        f.write_str(&parts.join(" x "))
    }
}

/// An exponent vector `(m_1..m_n)` over the components of a [`KSpec`]:
/// arbitrary integers on free components, `0 ≤ m_s < order` on torsion ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(kspec: &KSpec, components: Vec<i64>) -> Result<Self> {
        if components.len() != kspec.components() {
            return Err(Error::BadParameters(format!(
                "exponent vector has {} components, the base group {}",
                components.len(),
                kspec.components()
            )));
        }
        for (s, &m) in components.iter().enumerate() {
            if let Some(order) = kspec.component_order(s) {
                if m < 0 || m >= order as i64 {
                    return Err(Error::BadExponent {
                        component: s,
                        value: m,
                        order,
                    });
                }
            }
        }
        Ok(ExponentVector(components))
    }

    pub fn zero(kspec: &KSpec) -> Self {
        ExponentVector(vec![0; kspec.components()])
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// The vector with component `s` replaced by 0.
    pub fn zeroed_at(&self, s: usize) -> Self {
        let mut v = self.0.clone();
        v[s] = 0;
        ExponentVector(v)
    }

    /// `‖M‖ = Σ|m_s|`.
    pub fn weight(&self) -> u64 {
        self.0.iter().map(|m| m.unsigned_abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }
}

/// The cycle structure of one level: `n` cycles `π_s` with a marked letter
/// each, and `n` cycles `σ_s`, all pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleLayout {
    level: usize,
    size: usize,
    pi: Vec<Vec<usize>>,
    sigma: Vec<Vec<usize>>,
    marked: Vec<usize>,
}

impl CycleLayout {
    pub fn new(
        level: usize,
        size: usize,
        pi: Vec<Vec<usize>>,
        sigma: Vec<Vec<usize>>,
        marked: Vec<usize>,
    ) -> Result<Self> {
        if pi.len() != sigma.len() || pi.len() != marked.len() || pi.is_empty() {
            return Err(Error::BadParameters(format!(
                "layout at level {level} needs matching nonempty cycle and mark lists \
                 (got {} pi, {} sigma, {} marks)",
                pi.len(),
                sigma.len(),
                marked.len()
            )));
        }
        let mut used = vec![false; size];
        for cycle in pi.iter().chain(sigma.iter()) {
            if cycle.len() < 2 {
                return Err(Error::BadParameters(format!(
                    "layout at level {level} has a cycle of length {}",
                    cycle.len()
                )));
            }
            for &x in cycle {
                if x >= size {
                    return Err(Error::BadParameters(format!(
                        "layout at level {level} names letter {x}, alphabet size is {size}"
                    )));
                }
                if used[x] {
                    return Err(Error::BadParameters(format!(
                        "layout at level {level} reuses letter {x}; cycles must be disjoint"
                    )));
                }
                used[x] = true;
            }
        }
        for (s, &x) in marked.iter().enumerate() {
            if !pi[s].contains(&x) {
                return Err(Error::BadParameters(format!(
                    "marked letter {x} of component {s} does not lie on its pi cycle"
                )));
            }
        }
        Ok(CycleLayout {
            level,
            size,
            pi,
            sigma,
            marked,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn components(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self, s: usize) -> &[usize] {
        &self.pi[s]
    }

    pub fn sigma(&self, s: usize) -> &[usize] {
        &self.sigma[s]
    }

    /// The marked letter `x_s` on `π_s`.
    pub fn marked(&self, s: usize) -> usize {
        self.marked[s]
    }

    /// `α`: the product of all `π` cycles.
    pub fn alpha(&self) -> LevelPermutation {
        let mut images: Vec<usize> = (0..self.size).collect();
        for cycle in &self.pi {
            overlay_cycle_power(&mut images, cycle, 1);
        }
        LevelPermutation::from_images(self.level, images).expect("disjoint cycles are a bijection")
    }

    /// `β_s = σ_s·α` (disjoint supports, so the order does not matter).
    pub fn beta(&self, s: usize) -> LevelPermutation {
        let mut images = self.alpha().images().to_vec();
        overlay_cycle_power(&mut images, &self.sigma[s], 1);
        LevelPermutation::from_images(self.level, images).expect("disjoint cycles are a bijection")
    }

    /// The single cycle `σ_s` as a permutation.
    pub fn sigma_perm(&self, s: usize) -> LevelPermutation {
        let mut images: Vec<usize> = (0..self.size).collect();
        overlay_cycle_power(&mut images, &self.sigma[s], 1);
        LevelPermutation::from_images(self.level, images).expect("a cycle is a bijection")
    }

    /// `Σ_M = σ_1^{m_1}·…·σ_n^{m_n}` for an exponent vector.
    pub fn sigma_product(&self, exponents: &[i64]) -> LevelPermutation {
        assert_eq!(exponents.len(), self.components(), "one exponent per component");
        let mut images: Vec<usize> = (0..self.size).collect();
        for (cycle, &m) in self.sigma.iter().zip(exponents) {
            overlay_cycle_power(&mut images, cycle, m);
        }
        LevelPermutation::from_images(self.level, images).expect("disjoint cycles are a bijection")
    }

    /// One line of cycle notation, e.g.
    /// `level 0: pi_1=(0 1) sigma_1=(2 3) x_1=0`.
    pub fn describe(&self, offset: usize) -> String {
        let list = |cycle: &[usize]| {
            cycle
                .iter()
                .map(|x| (x + offset).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = format!("level {}:", self.level);
        for s in 0..self.components() {
            out.push_str(&format!(
                " pi_{}=({}) sigma_{}=({}) x_{}={}",
                s + 1,
                list(&self.pi[s]),
                s + 1,
                list(&self.sigma[s]),
                s + 1,
                self.marked[s] + offset
            ));
        }
        out
    }
}

/// Writes `cycle^power` into an image table; letters outside the cycle are
/// untouched.
fn overlay_cycle_power(images: &mut [usize], cycle: &[usize], power: i64) {
    let len = cycle.len() as i64;
    for (t, &x) in cycle.iter().enumerate() {
        let target = (t as i64 + power).rem_euclid(len) as usize;
        images[x] = cycle[target];
    }
}

/// How letters are laid out into cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutStyle {
    /// Contiguous ascending blocks: the `π` blocks for `s = 1..n`, then the
    /// `σ` blocks; each marked letter is the first of its `π` block.
    Canonical,
    /// Per-level seeded shuffle of the letter set before dealing the same
    /// block lengths; exercises the freedom the construction allows.
    Shuffled { seed: u64 },
}

fn block_lengths(kspec: &KSpec, r_i: usize) -> (Vec<usize>, Vec<usize>) {
    let n = kspec.components();
    let pi_lens = vec![r_i; n];
    let sigma_lens = (0..n)
        .map(|s| match kspec.component_order(s) {
            None => r_i,
            Some(order) => order as usize,
        })
        .collect();
    (pi_lens, sigma_lens)
}

fn layout_size(kspec: &KSpec, r_i: usize) -> usize {
    (kspec.components() + kspec.free_rank) * r_i + kspec.torsion_total()
}

fn deal_layout(
    kspec: &KSpec,
    level: usize,
    r_i: usize,
    letters: Vec<usize>,
) -> Result<CycleLayout> {
    let (pi_lens, sigma_lens) = block_lengths(kspec, r_i);
    let mut it = letters.into_iter();
    let mut take = |len: usize| -> Vec<usize> { it.by_ref().take(len).collect() };
    let pi: Vec<Vec<usize>> = pi_lens.into_iter().map(&mut take).collect();
    let sigma: Vec<Vec<usize>> = sigma_lens.into_iter().map(&mut take).collect();
    let marked = pi.iter().map(|cycle| cycle[0]).collect();
    CycleLayout::new(level, layout_size(kspec, r_i), pi, sigma, marked)
}

/// The deterministic block layout of one level.
pub fn canonical_layout(kspec: &KSpec, seq: &ParamSeq, level: usize) -> Result<CycleLayout> {
    let r_i = seq.value(level);
    deal_layout(kspec, level, r_i, (0..layout_size(kspec, r_i)).collect())
}

/// The seeded-shuffle layout of one level; deterministic in `(seed, level)`.
pub fn shuffled_layout(
    kspec: &KSpec,
    seq: &ParamSeq,
    seed: u64,
    level: usize,
) -> Result<CycleLayout> {
    let r_i = seq.value(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(level as u64);
    let mut letters: Vec<usize> = (0..layout_size(kspec, r_i)).collect();
    letters.shuffle(&mut rng);
    deal_layout(kspec, level, r_i, letters)
}

/// Per-level layout provider.
pub type LayoutFn = Arc<dyn Fn(usize) -> Result<CycleLayout> + Send + Sync>;

/// A wreath-product machine together with its layout and base-group shape,
/// giving access to the distinguished elements and witness words.
#[derive(Clone)]
pub struct WreathAutomaton {
    automaton: TVAutomaton,
    kspec: KSpec,
    layout: LayoutFn,
}

struct LampSource {
    layout: LayoutFn,
    n: usize,
    resets: bool,
}

impl TableSource for LampSource {
    fn tables(&self, level: usize) -> Result<LevelTables> {
        let layout = (self.layout)(level)?;
        if layout.components() != self.n {
            return Err(Error::BadParameters(format!(
                "layout at level {level} has {} components, machine expects {}",
                layout.components(),
                self.n
            )));
        }
        let size = layout.size();
        let n_states = self.n + 1;
        let mut outputs = Vec::with_capacity(n_states);
        let mut transitions = Vec::with_capacity(n_states);
        outputs.push(layout.alpha().images().to_vec());
        transitions.push(vec![0; size]);
        for s in 0..self.n {
            outputs.push(layout.beta(s).images().to_vec());
            let mut row = vec![s + 1; size];
            if self.resets {
                row[layout.marked(s)] = 0;
            }
            transitions.push(row);
        }
        LevelTables::new(size, n_states, transitions, outputs)
    }
}

impl WreathAutomaton {
    fn assemble(
        kspec: KSpec,
        alphabet: ChangingAlphabet,
        states: Vec<String>,
        layout: LayoutFn,
        resets: bool,
        display_offset: usize,
    ) -> Self {
        let source = LampSource {
            layout: Arc::clone(&layout),
            n: kspec.components(),
            resets,
        };
        let automaton =
            TVAutomaton::from_source(alphabet, states, Arc::new(source), display_offset);
        WreathAutomaton {
            automaton,
            kspec,
            layout,
        }
    }

    fn generic(kspec: KSpec, seq: ParamSeq, style: LayoutStyle, resets: bool) -> Result<Self> {
        if !seq.is_unbounded() {
            return Err(Error::BadParameters(
                "the wreath construction needs an unbounded size sequence".to_string(),
            ));
        }
        let alphabet = ChangingAlphabet::parametric(
            kspec.components() + kspec.free_rank,
            kspec.torsion_total(),
            seq.clone(),
        )?;
        let mut states = vec!["a".to_string()];
        states.extend((1..=kspec.components()).map(|s| format!("b{s}")));
        let layout: LayoutFn = {
            let kspec = kspec.clone();
            match style {
                LayoutStyle::Canonical => {
                    Arc::new(move |level| canonical_layout(&kspec, &seq, level))
                }
                LayoutStyle::Shuffled { seed } => {
                    Arc::new(move |level| shuffled_layout(&kspec, &seq, seed, level))
                }
            }
        };
        Ok(Self::assemble(kspec, alphabet, states, layout, resets, 0))
    }

    /// The reset machine: states generate `K ≀ ℤ`.
    pub fn with_resets(kspec: KSpec, seq: ParamSeq, style: LayoutStyle) -> Result<Self> {
        Self::generic(kspec, seq, style, true)
    }

    /// The diagonal machine: states generate `K × ℤ`.
    pub fn diagonal(kspec: KSpec, seq: ParamSeq, style: LayoutStyle) -> Result<Self> {
        Self::generic(kspec, seq, style, false)
    }

    /// The two-state `ℤ ≀ ℤ` machine over `{0, …, 2r_i − 1}`, cycles
    /// interleaved: `π = (0 2 … 2r_i−2)`, `σ = (1 3 … 2r_i−1)`, marked
    /// letter 0. Display letters are 1-based.
    pub fn z_wr_z(seq: ParamSeq) -> Result<Self> {
        let kspec = KSpec::free(1)?;
        Self::interleaved(kspec, seq, 1, vec!["a".into(), "b".into()])
    }

    /// The `(n + 1)`-state `ℤⁿ ≀ ℤ` machine over `{0, …, 2nr_i − 1}`: block
    /// `s` holds `π_s` on its even and `σ_s` on its odd letters, marked
    /// letters `2sr_i`. Display letters are 1-based.
    pub fn zn_wr_z(n: usize, seq: ParamSeq) -> Result<Self> {
        let kspec = KSpec::free(n)?;
        let mut states = vec!["a".to_string()];
        states.extend((0..n).map(|s| format!("b{s}")));
        Self::interleaved(kspec, seq, n, states)
    }

    fn interleaved(
        kspec: KSpec,
        seq: ParamSeq,
        n: usize,
        states: Vec<String>,
    ) -> Result<Self> {
        if !seq.is_unbounded() {
            return Err(Error::BadParameters(
                "the wreath construction needs an unbounded size sequence".to_string(),
            ));
        }
        let alphabet = ChangingAlphabet::parametric(2 * n, 0, seq.clone())?;
        let layout: LayoutFn = Arc::new(move |level| {
            let r_i = seq.value(level);
            let pi = (0..n)
                .map(|s| (0..r_i).map(|t| 2 * s * r_i + 2 * t).collect())
                .collect();
            let sigma = (0..n)
                .map(|s| (0..r_i).map(|t| 2 * s * r_i + 2 * t + 1).collect())
                .collect();
            let marked = (0..n).map(|s| 2 * s * r_i).collect();
            CycleLayout::new(level, 2 * n * r_i, pi, sigma, marked)
        });
        Ok(Self::assemble(kspec, alphabet, states, layout, true, 1))
    }

    /// The two-state `C_r ≀ ℤ` machine over `{0, …, r_i + r − 1}`:
    /// `π = (0 … r_i−1)`, `σ = (r_i … r_i+r−1)`, marked letter 0. Display
    /// letters are 1-based.
    pub fn cr_wr_z(r: u32, seq: ParamSeq) -> Result<Self> {
        let kspec = KSpec::new(0, vec![r])?;
        if !seq.is_unbounded() {
            return Err(Error::BadParameters(
                "the wreath construction needs an unbounded size sequence".to_string(),
            ));
        }
        let alphabet = ChangingAlphabet::parametric(1, r as usize, seq.clone())?;
        let r = r as usize;
        let layout: LayoutFn = Arc::new(move |level| {
            let r_i = seq.value(level);
            CycleLayout::new(
                level,
                r_i + r,
                vec![(0..r_i).collect()],
                vec![(r_i..r_i + r).collect()],
                vec![0],
            )
        });
        Ok(Self::assemble(
            kspec,
            alphabet,
            vec!["a".into(), "b".into()],
            layout,
            true,
            1,
        ))
    }

    pub fn automaton(&self) -> &TVAutomaton {
        &self.automaton
    }

    pub fn kspec(&self) -> &KSpec {
        &self.kspec
    }

    pub fn layout(&self, level: usize) -> Result<CycleLayout> {
        (self.layout)(level)
    }

    fn state_b(&self, s: usize) -> Result<StateId> {
        if s >= self.kspec.components() {
            return Err(Error::BadParameters(format!(
                "component {s} out of range; the base group has {}",
                self.kspec.components()
            )));
        }
        Ok(s + 1)
    }

    /// The generator `a` as an element at `level`.
    pub fn gen_a(&self, level: usize) -> GroupElement {
        GroupElement::new(&self.automaton, level, vec![crate::action::Factor::new(0)])
            .expect("state a exists")
    }

    /// The generator `b_s` (0-based component index) at `level`.
    pub fn gen_b(&self, s: usize, level: usize) -> Result<GroupElement> {
        let state = self.state_b(s)?;
        GroupElement::new(
            &self.automaton,
            level,
            vec![crate::action::Factor::new(state)],
        )
    }

    /// `c_s = b_s · a⁻¹`.
    pub fn element_c(&self, s: usize, level: usize) -> Result<GroupElement> {
        Ok(self.gen_b(s, level)?.mul(&self.gen_a(level).inverse()))
    }

    /// `d_{k,s} = a⁻ᵏ · c_s · aᵏ`.
    pub fn element_d(&self, k: i64, s: usize, level: usize) -> Result<GroupElement> {
        Ok(self
            .element_c(s, level)?
            .conjugated_by(&self.gen_a(level).pow(k)))
    }

    /// `C_M = c_1^{m_1} · … · c_n^{m_n}`.
    pub fn element_c_product(
        &self,
        exponents: &ExponentVector,
        level: usize,
    ) -> Result<GroupElement> {
        let mut out = GroupElement::identity(&self.automaton, level);
        for (s, &m) in exponents.components().iter().enumerate() {
            out = out.mul(&self.element_c(s, level)?.pow(m));
        }
        Ok(out)
    }

    /// `d_{k,M} = a⁻ᵏ · C_M · aᵏ`.
    pub fn element_d_product(
        &self,
        k: i64,
        exponents: &ExponentVector,
        level: usize,
    ) -> Result<GroupElement> {
        Ok(self
            .element_c_product(exponents, level)?
            .conjugated_by(&self.gen_a(level).pow(k)))
    }

    /// The word of marked letters `x_{s,level} x_{s,level+1} … x_{s,level+j}`.
    pub fn witness_word(&self, s: usize, level: usize, j: usize) -> Result<TreeWord> {
        self.state_b(s)?;
        let mut letters = Vec::with_capacity(j + 1);
        for i in level..=level + j {
            letters.push(self.layout(i)?.marked(s));
        }
        Ok(TreeWord::new(level, letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq() -> ParamSeq {
        "i+2".parse().unwrap()
    }

    #[test]
    fn canonical_blocks_partition_the_alphabet() {
        let kspec = KSpec::new(1, vec![3]).unwrap();
        for level in 0..4 {
            let layout = canonical_layout(&kspec, &seq(), level).unwrap();
            let r_i = level + 2;
            assert_eq!(layout.size(), 3 * r_i + 3);
            assert_eq!(layout.pi(0), (0..r_i).collect::<Vec<_>>());
            assert_eq!(layout.pi(1), (r_i..2 * r_i).collect::<Vec<_>>());
            assert_eq!(layout.sigma(0), (2 * r_i..3 * r_i).collect::<Vec<_>>());
            assert_eq!(
                layout.sigma(1),
                (3 * r_i..3 * r_i + 3).collect::<Vec<_>>()
            );
            assert_eq!(layout.marked(0), 0);
            assert_eq!(layout.marked(1), r_i);
        }
    }

    #[test]
    fn canonical_free_rank_one_level_zero() {
        let kspec = KSpec::free(1).unwrap();
        let layout = canonical_layout(&kspec, &seq(), 0).unwrap();
        assert_eq!(layout.size(), 4);
        assert_eq!(layout.pi(0), [0, 1]);
        assert_eq!(layout.sigma(0), [2, 3]);
        assert_eq!(layout.marked(0), 0);
        assert_eq!(
            layout.describe(0),
            "level 0: pi_1=(0 1) sigma_1=(2 3) x_1=0"
        );
    }

    #[test]
    fn shuffled_layout_is_deterministic_and_valid() {
        let kspec = KSpec::new(2, vec![3, 4]).unwrap();
        for level in 0..5 {
            let one = shuffled_layout(&kspec, &seq(), 11, level).unwrap();
            let two = shuffled_layout(&kspec, &seq(), 11, level).unwrap();
            assert_eq!(one, two);
            let other = shuffled_layout(&kspec, &seq(), 12, level).unwrap();
            assert_eq!(one.size(), other.size());
            assert_eq!(one.marked(0), one.pi(0)[0]);
        }
        let canonical = canonical_layout(&kspec, &seq(), 3).unwrap();
        let shuffled = shuffled_layout(&kspec, &seq(), 11, 3).unwrap();
        assert_eq!(canonical.size(), shuffled.size());
        assert_ne!(canonical, shuffled);
    }

    #[test]
    fn layout_validation_rejects_overlaps_and_stray_marks() {
        assert!(matches!(
            CycleLayout::new(0, 4, vec![vec![0, 1]], vec![vec![1, 2]], vec![0]),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            CycleLayout::new(0, 4, vec![vec![0, 1]], vec![vec![2, 3]], vec![2]),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            CycleLayout::new(0, 3, vec![vec![0, 1]], vec![vec![3, 4]], vec![0]),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn z_wr_z_level_zero_tables_match_the_display() {
        let wreath = WreathAutomaton::z_wr_z(seq()).unwrap();
        let aut = wreath.automaton();
        assert_eq!(aut.display_offset(), 1);
        assert_eq!(aut.alphabet().size_at(0).unwrap(), 4);
        let alpha = aut.output_perm(0, 0).unwrap();
        let beta = aut.output_perm(0, 1).unwrap();
        assert_eq!(alpha.images(), [2, 1, 0, 3]);
        assert_eq!(beta.images(), [2, 3, 0, 1]);
        assert_eq!(alpha.cycle_string(1), "(1 3)");
        assert_eq!(beta.cycle_string(1), "(1 3)(2 4)");
        // State b resets to a exactly on the marked letter (display 1),
        // emitting display letter 3.
        assert_eq!(aut.step(0, 1, 0).unwrap(), (0, 2));
        assert_eq!(aut.step(0, 1, 1).unwrap(), (1, 3));
        assert_eq!(aut.step(0, 0, 3).unwrap(), (0, 3));
    }

    #[test]
    fn z_wr_z_element_c_applies_sigma_off_the_mark() {
        let wreath = WreathAutomaton::z_wr_z(seq()).unwrap();
        let c = wreath.element_c(0, 0).unwrap();
        assert_eq!(c.factor_text(), "b a^-1");
        // Display word "2 2" maps to "4 4" (sigma cycles (2 4) and (2 4 6)).
        let word = TreeWord::new(0, vec![1, 1]);
        assert_eq!(c.apply(&word).unwrap().letters(), [3, 3]);
        // Marked-letter prefix is fixed along with everything below it.
        let marked = TreeWord::new(0, vec![0, 5]);
        assert_eq!(c.apply(&marked).unwrap(), marked);
    }

    #[test]
    fn zn_blocks_interleave_evens_and_odds() {
        let wreath = WreathAutomaton::zn_wr_z(2, seq()).unwrap();
        let aut = wreath.automaton();
        assert_eq!(aut.states(), ["a", "b0", "b1"]);
        assert_eq!(aut.alphabet().size_at(0).unwrap(), 8);
        let layout = wreath.layout(0).unwrap();
        assert_eq!(layout.pi(0), [0, 2]);
        assert_eq!(layout.sigma(0), [1, 3]);
        assert_eq!(layout.pi(1), [4, 6]);
        assert_eq!(layout.sigma(1), [5, 7]);
        assert_eq!(layout.marked(1), 4);
        // b1 resets at its own marked letter only.
        assert_eq!(aut.step(0, 2, 4).unwrap().0, 0);
        assert_eq!(aut.step(0, 2, 0).unwrap().0, 2);
    }

    #[test]
    fn cr_wr_z_level_zero_tables_match_the_display() {
        let wreath = WreathAutomaton::cr_wr_z(3, seq()).unwrap();
        let aut = wreath.automaton();
        assert_eq!(aut.alphabet().size_at(0).unwrap(), 5);
        assert_eq!(aut.output_perm(0, 0).unwrap().images(), [1, 0, 2, 3, 4]);
        assert_eq!(aut.output_perm(0, 1).unwrap().images(), [1, 0, 3, 4, 2]);
        assert_eq!(wreath.kspec().component_order(0), Some(3));
    }

    #[test]
    fn element_words_take_the_documented_shape() {
        let wreath = WreathAutomaton::z_wr_z(seq()).unwrap();
        let d = wreath.element_d(2, 0, 0).unwrap();
        assert_eq!(d.factor_text(), "a^-2 b a^-1 a^2");
        let d0 = wreath.element_d(0, 0, 0).unwrap();
        assert_eq!(d0.factor_text(), wreath.element_c(0, 0).unwrap().factor_text());
        let kspec = wreath.kspec().clone();
        let m = ExponentVector::new(&kspec, vec![3]).unwrap();
        assert_eq!(wreath.element_c_product(&m, 0).unwrap().factor_text(), "b a^-1 b a^-1 b a^-1");
        assert_eq!(
            wreath.element_d_product(-1, &m, 0).unwrap().factor_text(),
            "a b a^-1 b a^-1 b a^-2"
        );
        let zero = ExponentVector::zero(&kspec);
        assert!(wreath.element_c_product(&zero, 0).unwrap().is_empty());
    }

    #[test]
    fn exponent_vectors_respect_torsion_bounds() {
        let kspec = KSpec::new(1, vec![3]).unwrap();
        assert!(ExponentVector::new(&kspec, vec![-5, 2]).is_ok());
        assert!(matches!(
            ExponentVector::new(&kspec, vec![0, 3]),
            Err(Error::BadExponent {
                component: 1,
                value: 3,
                order: 3
            })
        ));
        assert!(matches!(
            ExponentVector::new(&kspec, vec![0, -1]),
            Err(Error::BadExponent { .. })
        ));
        let m = ExponentVector::new(&kspec, vec![-5, 2]).unwrap();
        assert_eq!(m.weight(), 7);
        assert_eq!(m.zeroed_at(0).components(), [0, 2]);
    }

    #[test]
    fn witness_words_collect_marked_letters() {
        let wreath = WreathAutomaton::z_wr_z(seq()).unwrap();
        let w = wreath.witness_word(0, 0, 2).unwrap();
        assert_eq!(w.letters(), [0, 0, 0]);
        assert_eq!(w.start_level(), 0);
        let kspec = KSpec::new(1, vec![3]).unwrap();
        let shuffled =
            WreathAutomaton::with_resets(kspec, seq(), LayoutStyle::Shuffled { seed: 7 }).unwrap();
        let w = shuffled.witness_word(1, 1, 3).unwrap();
        assert_eq!(w.len(), 4);
        for (i, &x) in w.letters().iter().enumerate() {
            assert_eq!(x, shuffled.layout(1 + i).unwrap().marked(1));
        }
    }

    #[test]
    fn kspec_display_and_validation() {
        assert_eq!(KSpec::new(2, vec![3]).unwrap().to_string(), "Z^2 x C3");
        assert_eq!(KSpec::new(0, vec![2]).unwrap().to_string(), "C2");
        assert!(KSpec::new(0, vec![]).is_err());
        assert!(KSpec::new(1, vec![1]).is_err());
    }

    #[test]
    fn bounded_sequences_are_rejected() {
        let bounded: ParamSeq = "4".parse().unwrap();
        assert!(matches!(
            WreathAutomaton::z_wr_z(bounded),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn generic_reset_machine_is_invertible_and_resets() {
        let kspec = KSpec::new(1, vec![3]).unwrap();
        let wreath =
            WreathAutomaton::with_resets(kspec, seq(), LayoutStyle::Canonical).unwrap();
        let aut = wreath.automaton();
        assert_eq!(aut.states(), ["a", "b1", "b2"]);
        assert!(aut.is_invertible_up_to(8).unwrap());
        let layout = wreath.layout(0).unwrap();
        assert_eq!(aut.step(0, 1, layout.marked(0)).unwrap().0, 0);
        assert_eq!(aut.step(0, 2, layout.marked(0)).unwrap().0, 2);

        let diagonal =
            WreathAutomaton::diagonal(wreath.kspec().clone(), seq(), LayoutStyle::Canonical)
                .unwrap();
        assert_eq!(
            diagonal.automaton().step(0, 1, layout.marked(0)).unwrap().0,
            1
        );
        // Outputs agree between the two machines.
        for q in 0..3 {
            assert_eq!(
                diagonal.automaton().output_perm(1, q).unwrap(),
                aut.output_perm(1, q).unwrap()
            );
        }
    }
}
