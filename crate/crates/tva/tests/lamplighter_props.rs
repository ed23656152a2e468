//! Properties of the wreath-product machines: the distinguished elements
//! agree with their direct letter-level recursions, the conjugation and
//! stabilizer laws hold, and the two-state interleaved machine is a
//! relabeling of the canonical block build.

mod common;

use common::{layouts, oracle_c, oracle_c_pow, oracle_c_product, oracle_d_product};
use tva::analysis::{commutes_to_depth, equal_to_depth, is_trivial_to_depth, order_on_truncation, OrderVerdict};
use tva::lamplighter::{ExponentVector, KSpec, LayoutStyle, WreathAutomaton};
use tva::{GroupElement, ParamSeq, TreeWord};

fn seq() -> ParamSeq {
    "i+2".parse().unwrap()
}

fn machines() -> Vec<(String, WreathAutomaton)> {
    let mixed = KSpec::new(1, vec![3]).unwrap();
    vec![
        ("interleaved".into(), WreathAutomaton::z_wr_z(seq()).unwrap()),
        (
            "canonical".into(),
            WreathAutomaton::with_resets(mixed.clone(), seq(), LayoutStyle::Canonical).unwrap(),
        ),
        (
            "shuffled".into(),
            WreathAutomaton::with_resets(mixed, seq(), LayoutStyle::Shuffled { seed: 42 })
                .unwrap(),
        ),
    ]
}

fn exponent_sample(kspec: &KSpec) -> Vec<ExponentVector> {
    let mut out = Vec::new();
    let free_values = [-2i64, -1, 0, 1, 2];
    match kspec.components() {
        1 => {
            for v in match kspec.component_order(0) {
                None => free_values.to_vec(),
                Some(order) => (0..order as i64).collect(),
            } {
                out.push(ExponentVector::new(kspec, vec![v]).unwrap());
            }
        }
        2 => {
            let firsts = match kspec.component_order(0) {
                None => free_values.to_vec(),
                Some(order) => (0..order as i64).collect(),
            };
            let seconds = match kspec.component_order(1) {
                None => vec![-1, 0, 2],
                Some(order) => (0..order as i64).collect(),
            };
            for &v1 in &firsts {
                for &v2 in &seconds {
                    out.push(ExponentVector::new(kspec, vec![v1, v2]).unwrap());
                }
            }
        }
        _ => unreachable!("samples cover one- and two-component machines"),
    }
    out
}

/// Runs `check` on every word of every length up to `depth`.
fn for_words(wreath: &WreathAutomaton, depth: usize, mut check: impl FnMut(&TreeWord)) {
    let alphabet = wreath.automaton().alphabet();
    for d in 0..=depth {
        for word in alphabet.words(0, d).unwrap() {
            check(&word);
        }
    }
}

#[test]
fn layouts_are_disjoint_and_sigma_fixes_the_marked_letter() {
    for (name, wreath) in machines() {
        for level in 0..8 {
            let layout = wreath.layout(level).unwrap();
            let mut used = vec![false; layout.size()];
            for s in 0..layout.components() {
                for &x in layout.pi(s).iter().chain(layout.sigma(s)) {
                    assert!(!used[x], "{name}: letter {x} reused at level {level}");
                    used[x] = true;
                }
                let marked = layout.marked(s);
                assert!(layout.pi(s).contains(&marked), "{name}");
                assert_eq!(
                    layout.sigma_perm(s).apply(marked),
                    marked,
                    "{name}: sigma must fix the marked letter"
                );
            }
        }
    }
}

#[test]
fn element_c_matches_the_direct_recursion() {
    for (name, wreath) in machines() {
        let depth = if name == "interleaved" { 6 } else { 4 };
        let tables = layouts(&wreath, depth);
        for s in 0..wreath.kspec().components() {
            let c = wreath.element_c(s, 0).unwrap();
            for_words(&wreath, depth, |word| {
                let image = c.apply(word).unwrap();
                let direct = oracle_c(&tables, s, word.letters());
                assert_eq!(image.letters(), direct, "{name} s={s} word={word:?}");
            });
        }
    }
}

#[test]
fn element_c_powers_match_the_power_recursion() {
    for (name, wreath) in machines() {
        let tables = layouts(&wreath, 4);
        for s in 0..wreath.kspec().components() {
            let c = wreath.element_c(s, 0).unwrap();
            for k in -3i64..=3 {
                let ck = c.pow(k);
                for_words(&wreath, 4, |word| {
                    let image = ck.apply(word).unwrap();
                    let direct = oracle_c_pow(&tables, s, k, word.letters());
                    assert_eq!(image.letters(), direct, "{name} s={s} k={k} word={word:?}");
                });
            }
        }
    }
}

#[test]
fn element_c_product_matches_the_combined_recursion() {
    let z = WreathAutomaton::z_wr_z(seq()).unwrap();
    let z_tables = layouts(&z, 5);
    for m in exponent_sample(z.kspec()) {
        let element = z.element_c_product(&m, 0).unwrap();
        for_words(&z, 5, |word| {
            let image = element.apply(word).unwrap();
            let direct = oracle_c_product(&z_tables, m.components(), word.letters());
            assert_eq!(image.letters(), direct, "m={:?} word={word:?}", m.components());
        });
    }
    for (name, wreath) in machines().into_iter().skip(1) {
        let tables = layouts(&wreath, 3);
        for m in exponent_sample(wreath.kspec()) {
            let element = wreath.element_c_product(&m, 0).unwrap();
            for_words(&wreath, 3, |word| {
                let image = element.apply(word).unwrap();
                let direct = oracle_c_product(&tables, m.components(), word.letters());
                assert_eq!(
                    image.letters(),
                    direct,
                    "{name} m={:?} word={word:?}",
                    m.components()
                );
            });
        }
    }
}

#[test]
fn element_d_matches_the_conjugated_recursion() {
    for (name, wreath) in machines() {
        let depth = if name == "interleaved" { 4 } else { 3 };
        let tables = layouts(&wreath, depth);
        let sample = exponent_sample(wreath.kspec());
        for k in -2i64..=2 {
            for m in &sample {
                let element = wreath.element_d_product(k, m, 0).unwrap();
                for_words(&wreath, depth, |word| {
                    let image = element.apply(word).unwrap();
                    let direct = oracle_d_product(&tables, k, m.components(), word.letters());
                    assert_eq!(
                        image.letters(),
                        direct,
                        "{name} k={k} m={:?} word={word:?}",
                        m.components()
                    );
                });
            }
        }
    }
}

#[test]
fn combined_conjugates_factor_into_single_component_conjugates() {
    let kspec = KSpec::new(1, vec![3]).unwrap();
    let wreath = WreathAutomaton::with_resets(kspec, seq(), LayoutStyle::Canonical).unwrap();
    for k in [-2i64, 0, 1] {
        for m in exponent_sample(wreath.kspec()) {
            let combined = wreath.element_d_product(k, &m, 0).unwrap();
            let mut factored = GroupElement::identity(wreath.automaton(), 0);
            for (s, &exp) in m.components().iter().enumerate() {
                factored = factored.mul(&wreath.element_d(k, s, 0).unwrap().pow(exp));
            }
            assert!(
                equal_to_depth(&combined, &factored, 5).unwrap().is_trivial(),
                "k={k} m={:?}",
                m.components()
            );
        }
    }
}

#[test]
fn shift_conjugation_moves_the_conjugate_indices() {
    let wreath = WreathAutomaton::z_wr_z(seq()).unwrap();
    let a = wreath.gen_a(0);
    let m = |v: i64| ExponentVector::new(wreath.kspec(), vec![v]).unwrap();
    for k in -2i64..=2 {
        for (k1, m1, k2, m2) in [
            (0i64, 1i64, 1i64, -1i64),
            (1, 2, -1, 1),
            (-2, -2, 2, 2),
            (2, 1, 0, -2),
        ] {
            let lhs = wreath
                .element_d_product(k1, &m(m1), 0)
                .unwrap()
                .mul(&wreath.element_d_product(k2, &m(m2), 0).unwrap())
                .conjugated_by(&a.pow(k));
            let rhs = wreath
                .element_d_product(k + k1, &m(m1), 0)
                .unwrap()
                .mul(&wreath.element_d_product(k + k2, &m(m2), 0).unwrap());
            assert!(
                equal_to_depth(&lhs, &rhs, 6).unwrap().is_trivial(),
                "k={k} k1={k1} k2={k2}"
            );
        }
    }
}

#[test]
fn conjugates_fix_the_marked_letter_words_exactly() {
    for (name, wreath) in machines() {
        let sample = exponent_sample(wreath.kspec());
        for s in 0..wreath.kspec().components() {
            for j in 0..=4 {
                let word = wreath.witness_word(s, 0, j).unwrap();
                for k in [-2i64, 0, 2] {
                    for m in sample.iter().take(4) {
                        let d = wreath.element_d_product(k, m, 0).unwrap();
                        assert_eq!(
                            d.apply(&word).unwrap(),
                            word,
                            "{name} s={s} j={j} k={k} m={:?}",
                            m.components()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn shifts_of_the_state_a_move_some_marked_word() {
    for (name, wreath) in machines() {
        let a = wreath.gen_a(0);
        for k in [-3i64, -2, -1, 1, 2, 3] {
            let ak = a.pow(k);
            let moved = (0..=2).any(|j| {
                let word = wreath.witness_word(0, 0, j).unwrap();
                ak.apply(&word).unwrap() != word
            });
            assert!(moved, "{name}: a^{k} must move a marked word with j <= 2");
        }
    }
}

#[test]
fn interleaved_two_state_machine_is_a_relabeling_of_the_block_build() {
    let interleaved = WreathAutomaton::z_wr_z(seq()).unwrap();
    let blocks =
        WreathAutomaton::with_resets(KSpec::free(1).unwrap(), seq(), LayoutStyle::Canonical)
            .unwrap();
    for level in 0..6 {
        let r = level + 2;
        // Block letters: pi block 0..r-1, sigma block r..2r-1. Interleaved
        // letters: pi on evens, sigma on odds.
        let relabel = |x: usize| if x < r { 2 * x } else { 2 * (x - r) + 1 };
        for q in 0..2 {
            for x in 0..2 * r {
                let (p_block, y_block) = blocks.automaton().step(level, q, x).unwrap();
                let (p_inter, y_inter) =
                    interleaved.automaton().step(level, q, relabel(x)).unwrap();
                assert_eq!(p_block, p_inter, "level {level} q={q} x={x}");
                assert_eq!(relabel(y_block), y_inter, "level {level} q={q} x={x}");
            }
        }
    }
}

#[test]
fn component_conjugates_commute_and_have_the_component_orders() {
    let kspec = KSpec::new(1, vec![3]).unwrap();
    for style in [LayoutStyle::Canonical, LayoutStyle::Shuffled { seed: 5 }] {
        let wreath = WreathAutomaton::with_resets(kspec.clone(), seq(), style).unwrap();
        let c1 = wreath.element_c(0, 0).unwrap();
        let c2 = wreath.element_c(1, 0).unwrap();
        assert!(commutes_to_depth(&c1, &c2, 6).unwrap().is_trivial());
        assert_eq!(
            order_on_truncation(&c2, 5, 10).unwrap(),
            OrderVerdict::Exact(3)
        );
        for m in 1..=6 {
            assert!(
                !is_trivial_to_depth(&c1.pow(m), 8).unwrap().is_trivial(),
                "free component power {m} stays nontrivial"
            );
        }
    }
}

#[test]
fn products_of_distinct_conjugates_are_nontrivial() {
    let wreath = WreathAutomaton::z_wr_z(seq()).unwrap();
    let m = |v: i64| ExponentVector::new(wreath.kspec(), vec![v]).unwrap();
    for m0 in [-2i64, -1, 1, 2] {
        for m1 in [-2i64, -1, 1, 2] {
            let product = wreath
                .element_d_product(0, &m(m0), 0)
                .unwrap()
                .mul(&wreath.element_d_product(1, &m(m1), 0).unwrap());
            let verdict = is_trivial_to_depth(&product, 8).unwrap();
            assert!(!verdict.is_trivial(), "m0={m0} m1={m1}");
        }
    }
}
