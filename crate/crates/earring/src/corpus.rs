//! Seeded test-corpus generation: trivial words built from nested and
//! concatenated cancelling patterns, reduced words, and the realization of a
//! word as a proper loop based at `d_1`.

use crate::path::{PathError, ProperPath, Segment};
use crate::space::SpaceModel;
use crate::word::{FiniteWord, Letter};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A word equivalent to ε by construction: a random balanced nesting of
/// inverse pairs, at most `max_len` letters (and at least 2 when
/// `max_len >= 2`).
pub fn random_trivial_word<R: Rng>(rng: &mut R, max_len: usize, gens: u32) -> FiniteWord {
    fn build<R: Rng>(rng: &mut R, pairs: usize, gens: u32, out: &mut Vec<Letter>) {
        if pairs == 0 {
            return;
        }
        // first block wraps j-1 pairs, the rest follow it
        let j = rng.gen_range(1..=pairs);
        let index = rng.gen_range(1..=gens);
        let first = if rng.gen_bool(0.5) {
            Letter::positive(index)
        } else {
            Letter::negative(index)
        };
        out.push(first);
        build(rng, j - 1, gens, out);
        out.push(first.inverse());
        build(rng, pairs - j, gens, out);
    }
    let pairs = (max_len / 2).max(1);
    let pairs = rng.gen_range(1..=pairs);
    let mut letters = Vec::with_capacity(2 * pairs);
    build(rng, pairs, gens, &mut letters);
    FiniteWord::new(letters)
}

/// A nonempty reduced word: no letter is adjacent to its inverse.
pub fn random_reduced_word<R: Rng>(rng: &mut R, len: usize, gens: u32) -> FiniteWord {
    let len = len.max(1);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let index = rng.gen_range(1..=gens);
        let letter = if rng.gen_bool(0.5) {
            Letter::positive(index)
        } else {
            Letter::negative(index)
        };
        if letters.last().is_some_and(|prev| prev.is_inverse_of(letter)) {
            continue;
        }
        letters.push(letter);
    }
    FiniteWord::new(letters)
}

pub fn trivial_corpus(seed: u64, count: usize, max_len: usize, gens: u32) -> Vec<FiniteWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_trivial_word(&mut rng, max_len, gens)).collect()
}

pub fn reduced_corpus(seed: u64, count: usize, max_len: usize, gens: u32) -> Vec<FiniteWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            random_reduced_word(&mut rng, len, gens)
        })
        .collect()
}

/// Realizes a word as a proper loop on `model` based at `d_1`: straight
/// base arcs walk to each winding's attachment point and back home at the
/// end, with uniform breakpoints on `[0,1]`.
pub fn loop_for_word(word: &FiniteWord, model: &SpaceModel) -> Result<ProperPath, PathError> {
    let home = model.dense_point(1)?;
    let mut current = home;
    let mut segments = Vec::with_capacity(2 * word.len() + 1);
    for letter in word.letters() {
        let target = model.dense_point(letter.index)?;
        segments.push(Segment::arc(if current == target {
            vec![current]
        } else {
            vec![current, target]
        }));
        segments.push(Segment::winding(letter.index, letter.sign));
        current = target;
    }
    segments.push(Segment::arc(if current == home {
        vec![current]
    } else {
        vec![current, home]
    }));
    ProperPath::new_uniform(segments)
}
