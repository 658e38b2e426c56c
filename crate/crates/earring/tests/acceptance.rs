//! End-to-end acceptance checks. Each test prints one PASS/FAIL line for the
//! clause it certifies; `cargo test --test acceptance -- --nocapture` shows
//! the full list.

use earring::corpus;
use earring::expr::{remark_interval, SeqIndex};
use earring::homotopy::{
    build_decomposition, verify_decomposition, CaseTag, DecompositionNode, DecompositionTree,
    Markers,
};
use earring::pairing::{
    enumerate_pairings, find_complete_pairing, maximal_pairing, project_pairing, residual_word,
    validate_pairing,
};
use earring::path::{is_null_loop, reduce_path, word_of_path, LoopAnswer};
use earring::rat::{int, inv_factorial, inv_pow2, ratio, Rational};
use earring::space::{
    distance, quotient, quotient_distance, retract, BasePoint, EPoint, SpaceModel,
};
use earring::word::{FiniteWord, Letter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn report(ok: bool, criterion: u32, what: &str) {
    println!("{} criterion {criterion}: {what}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {what}");
}

fn random_word<R: Rng>(rng: &mut R, max_len: usize, gens: u32) -> FiniteWord {
    let len = rng.gen_range(0..=max_len);
    FiniteWord::new(
        (0..len)
            .map(|_| {
                let index = rng.gen_range(1..=gens);
                if rng.gen_bool(0.5) {
                    Letter::positive(index)
                } else {
                    Letter::negative(index)
                }
            })
            .collect(),
    )
}

fn all_words(max_len: usize, gens: u32) -> Vec<FiniteWord> {
    let alphabet: Vec<Letter> = (1..=gens)
        .flat_map(|i| [Letter::positive(i), Letter::negative(i)])
        .collect();
    let mut out = vec![FiniteWord::empty()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for stem in &frontier {
            for &letter in &alphabet {
                let mut word = stem.clone();
                word.push(letter);
                out.push(FiniteWord::new(word.clone()));
                next.push(word);
            }
        }
        frontier = next;
    }
    out
}

/// A complete pairing exists exactly for trivial words, and every pairing
/// the finder returns is a valid complete one.
#[test]
fn criterion_1_pairing_existence_matches_triviality() {
    let mut checked = 0usize;
    let mut agree = true;
    let mut certified = true;
    let mut check = |word: &FiniteWord| {
        let trivial = word.free_reduce().is_empty();
        match find_complete_pairing(word) {
            Some(gamma) => {
                agree &= trivial;
                let valid = validate_pairing(&gamma, word).map(|r| r.is_ok()).unwrap_or(false);
                certified &= valid && gamma.is_complete(word);
            }
            None => agree &= !trivial,
        }
    };
    for word in all_words(8, 2) {
        check(&word);
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10_000 {
        check(&random_word(&mut rng, 14, 4));
        checked += 1;
    }
    report(
        agree && certified,
        1,
        &format!("complete pairing exists iff word is trivial ({checked} words, certificates valid)"),
    );
}

/// The constructive finder and the brute-force enumerator agree.
#[test]
fn criterion_2_finder_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut agree = true;
    for _ in 0..1_000 {
        let word = random_word(&mut rng, 10, 3);
        let enumerated = !enumerate_pairings(&word, true).unwrap().is_empty();
        agree &= enumerated == find_complete_pairing(&word).is_some();
    }
    report(agree, 2, "enumerate(complete) nonempty iff finder succeeds (1000 words)");
}

/// The residual of the maximal pairing is the freely reduced word.
#[test]
fn criterion_3_residual_is_free_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut agree = true;
    for _ in 0..10_000 {
        let word = random_word(&mut rng, 12, 4);
        agree &= residual_word(&word, &maximal_pairing(&word)).unwrap() == word.free_reduce();
    }
    report(agree, 3, "residual of maximal pairing equals free reduction (10000 words)");
}

fn random_epoint<R: Rng>(rng: &mut R, model: &SpaceModel) -> EPoint {
    if rng.gen_bool(0.4) {
        let (x, y) = match model {
            SpaceModel::UnitDisk => loop {
                let x = rng.gen_range(-1.0..=1.0);
                let y = rng.gen_range(-1.0..=1.0);
                if x * x + y * y <= 1.0 {
                    break (x, y);
                }
            },
            _ => (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)),
        };
        EPoint::Base(BasePoint::plane(x, y))
    } else {
        EPoint::circle(rng.gen_range(1..=25), rng.gen_range(0.0..1.0), model).unwrap()
    }
}

/// The space metric is a metric and the quotient does not expand it.
#[test]
fn criterion_4_metric_axioms() {
    let tol = 1e-12;
    let mut good = true;
    for model in [SpaceModel::UnitSquare, SpaceModel::UnitDisk] {
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        for _ in 0..10_000 {
            let p = random_epoint(&mut rng, &model);
            let q = random_epoint(&mut rng, &model);
            let r = random_epoint(&mut rng, &model);
            let pq = distance(&p, &q, &model).unwrap();
            good &= distance(&p, &p, &model).unwrap() == 0.0;
            good &= (pq > 0.0) || p == q;
            good &= (pq - distance(&q, &p, &model).unwrap()).abs() <= tol;
            good &= distance(&p, &r, &model).unwrap()
                <= pq + distance(&q, &r, &model).unwrap() + tol;
            good &= model
                .base_distance(&retract(&p, &model).unwrap(), &retract(&q, &model).unwrap())
                .unwrap()
                <= pq + tol;
            good &= quotient_distance(&quotient(&p), &quotient(&q)).unwrap() <= pq + tol;
        }
    }
    report(good, 4, "identity, symmetry, triangle, retraction and quotient nonexpansive (2×10000 triples)");
}

fn classification_corpus() -> (Vec<FiniteWord>, Vec<FiniteWord>) {
    (corpus::trivial_corpus(105, 100, 20, 4), corpus::reduced_corpus(106, 100, 14, 4))
}

/// Loops realized from trivial words are recognized as null-homotopic with a
/// valid certificate; loops from reduced words are refuted.
#[test]
fn criterion_5_null_homotopy_classification() {
    let model = SpaceModel::UnitSquare;
    let (trivial, reduced) = classification_corpus();
    let mut good = true;
    for word in &trivial {
        let f = corpus::loop_for_word(word, &model).unwrap();
        match is_null_loop(&f, &model).unwrap() {
            LoopAnswer::Null { certificate } => {
                good &= validate_pairing(&certificate, word).map(|r| r.is_ok()).unwrap_or(false)
                    && certificate.is_complete(word);
            }
            LoopAnswer::NotNull { .. } => good = false,
        }
    }
    for word in &reduced {
        let f = corpus::loop_for_word(word, &model).unwrap();
        match is_null_loop(&f, &model).unwrap() {
            LoopAnswer::Null { .. } => good = false,
            LoopAnswer::NotNull { reduced } => good &= reduced == *word,
        }
    }
    report(good, 5, "200-loop corpus classified with validating certificates");
}

/// Path reduction realizes free reduction at the word level.
#[test]
fn criterion_6_path_reduction() {
    let model = SpaceModel::UnitSquare;
    let (trivial, reduced) = classification_corpus();
    let mut good = true;
    for word in trivial.iter().chain(&reduced) {
        let f = corpus::loop_for_word(word, &model).unwrap();
        let g = reduce_path(&f, &model).unwrap();
        good &= word_of_path(&g) == word.free_reduce();
    }
    report(good, 6, "word of reduced path equals freely reduced word (200 loops)");
}

/// The interval family: exact endpoints, lengths, and disjointness.
#[test]
fn criterion_7_interval_family_arithmetic() {
    let sequences = SeqIndex::enumerate(5);
    let mut good = true;
    let mut intervals: Vec<(Rational, Rational)> = Vec::new();
    for s in &sequences {
        let (a, b) = remark_interval(s);
        let n = s.len() as u32;
        good &= b.clone() - &a == inv_pow2(n) * inv_factorial(n + 1);
        good &= a >= int(0) && b <= int(1);
        intervals.push((a, b));
    }
    intervals.sort();
    for w in intervals.windows(2) {
        good &= w[0].1 <= w[1].0;
    }
    good &= remark_interval(&SeqIndex::new(vec![0]).unwrap()).0 == int(0);
    good &= remark_interval(&SeqIndex::new(vec![1]).unwrap()).0 == ratio(1, 2);
    report(
        good,
        7,
        &format!("{} intervals to depth 5: disjoint, exact lengths, anchors 0 and 1/2", sequences.len()),
    );
}

fn first_leaf(node: &mut DecompositionNode) -> &mut DecompositionNode {
    if node.children.is_empty() {
        node
    } else {
        first_leaf(&mut node.children[0])
    }
}

/// One of ten always-detectable corruptions, chosen by index.
fn mutate(tree: &mut DecompositionTree, kind: usize) {
    match kind % 10 {
        0 => tree.delta0 = tree.delta0.clone() * int(2),
        1 => tree.delta0 = tree.delta0.clone() / int(3),
        2 => tree.delta = tree.delta.clone() * int(2),
        3 => tree.root.interval.1 = tree.root.interval.1.clone() + int(1),
        4 => tree.root.budget_m += 7,
        5 => {
            let leaf = first_leaf(&mut tree.root);
            leaf.interval.1 = leaf.interval.1.clone() + int(1);
        }
        6 => {
            let child = tree.root.children[0].clone();
            tree.root.children.push(child);
        }
        7 => {
            tree.root.children.pop();
        }
        8 => {
            let child = &mut tree.root.children[0];
            child.interval.0 = child.interval.0.clone() - ratio(1, 1000);
        }
        _ => {
            tree.root.case_tag = CaseTag::BaseCase;
            tree.root.markers = Markers::None;
        }
    }
}

/// Decomposition round-trip over the corpus, plus adversarial mutations.
#[test]
fn criterion_8_decomposition_soundness() {
    let model = SpaceModel::UnitSquare;
    let loops: Vec<FiniteWord> = corpus::trivial_corpus(108, 100, 20, 4);
    let deltas = [ratio(1, 4), ratio(1, 8), ratio(1, 16), ratio(1, 32)];
    let mut good = true;
    let mut kept: Vec<(FiniteWord, Rational, DecompositionTree)> = Vec::new();
    for word in &loops {
        let f = corpus::loop_for_word(word, &model).unwrap();
        let gamma = find_complete_pairing(word).unwrap();
        for delta in &deltas {
            let tree = build_decomposition(&f, &gamma, delta, &model).unwrap();
            let clean =
                verify_decomposition(&tree, &f, &gamma, delta, &model).unwrap().is_clean();
            if !clean {
                eprintln!("unclean tree for {word} at delta {delta}");
            }
            good &= clean;
            if kept.len() < 20 {
                kept.push((word.clone(), delta.clone(), tree));
            }
        }
    }
    let mut mutations_caught = true;
    for (i, (word, delta, tree)) in kept.iter_mut().enumerate() {
        let f = corpus::loop_for_word(word, &model).unwrap();
        let gamma = find_complete_pairing(word).unwrap();
        mutate(tree, i);
        let report = verify_decomposition(tree, &f, &gamma, delta, &model).unwrap();
        if report.is_clean() {
            eprintln!("mutation {i} went undetected on {word}");
            mutations_caught = false;
        }
    }
    report(
        good && mutations_caught,
        8,
        "400 built trees verify cleanly; 20 mutated trees each rejected",
    );
}

/// Complete pairings restrict to complete pairings on every small projection.
#[test]
fn criterion_9_projection_compatibility() {
    let words = corpus::trivial_corpus(109, 1_000, 16, 4);
    let mut good = true;
    for word in &words {
        let gamma = find_complete_pairing(word).unwrap();
        let supp = word.supp();
        let mut families: Vec<BTreeSet<u32>> = Vec::new();
        for &a in &supp {
            families.push([a].into());
            for &b in supp.iter().filter(|&&b| b > a) {
                families.push([a, b].into());
            }
        }
        for family in &families {
            let projected_word = word.project(family);
            let projected = project_pairing(word, &gamma, family);
            let valid = validate_pairing(&projected, &projected_word)
                .map(|r| r.is_ok())
                .unwrap_or(false);
            good &= valid && projected.is_complete(&projected_word);
        }
    }
    report(good, 9, "restrictions to all singleton/pair generator sets stay valid and complete (1000 words)");
}
