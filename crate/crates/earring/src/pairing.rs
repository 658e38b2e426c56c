//! Noncrossing inverse pairings: validation, the Cannon-Conner existence
//! construction, maximal pairings, residual words, restriction, and a
//! brute-force enumerator used as an independent oracle.
//!
//! A complete pairing (one covering every position) is the certificate that a
//! word is trivial; the residual of a maximal pairing is the reduced word.

use crate::word::FiniteWord;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// A set of unordered position pairs on a word, stored with the smaller
/// position first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncrossingPairing {
    pairs: BTreeSet<(usize, usize)>,
}

/// Which noncrossing clause to enforce. The definition as printed forbids
/// nesting, which contradicts the coverage clause and the nesting order; the
/// proof's clause (disjoint-or-nested) is the default. The printed clause is
/// retained for documentation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    #[default]
    DisjointOrNested,
    PrintedDisjointOnly,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("position {position} is out of range for a word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("pairing does not validate on the word: {0}")]
    Invalid(ValidationReport),
    #[error("span-restriction hypothesis ({clause}) fails")]
    HypothesisViolated { clause: u8 },
    #[error("enumeration limited to words of length <= {limit}, got {len}")]
    TooLong { len: usize, limit: usize },
    #[error("malformed pairing text `{text}`")]
    Parse { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Two pairs share a position.
    Overlap { pair_a: (usize, usize), pair_b: (usize, usize) },
    /// A position between the two elements of a pair is unpaired.
    CoverageGap { pair: (usize, usize), position: usize },
    /// Interleaved pairs.
    Crossing { pair_a: (usize, usize), pair_b: (usize, usize) },
    /// Nested pairs; a violation only under the printed-definition clause.
    Nesting { outer: (usize, usize), inner: (usize, usize) },
    /// The two paired letters are not mutually inverse.
    NotInverse { pair: (usize, usize) },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match v {
                Violation::Overlap { pair_a, pair_b } => {
                    write!(f, "overlap {pair_a:?} {pair_b:?}")?
                }
                Violation::CoverageGap { pair, position } => {
                    write!(f, "coverage gap at {position} inside {pair:?}")?
                }
                Violation::Crossing { pair_a, pair_b } => {
                    write!(f, "crossing {pair_a:?} {pair_b:?}")?
                }
                Violation::Nesting { outer, inner } => {
                    write!(f, "nesting {inner:?} inside {outer:?}")?
                }
                Violation::NotInverse { pair } => write!(f, "not inverse {pair:?}")?,
            }
        }
        Ok(())
    }
}

impl NoncrossingPairing {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> NoncrossingPairing {
        let pairs = pairs
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        NoncrossingPairing { pairs }
    }

    pub fn empty() -> NoncrossingPairing {
        NoncrossingPairing::default()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The set of paired positions.
    pub fn support(&self) -> BTreeSet<usize> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// `⋃Γ = W̄`.
    pub fn is_complete(&self, word: &FiniteWord) -> bool {
        self.support().len() == word.len()
    }

    /// Pairs not nested inside any other pair, in position order.
    pub fn maximal_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !self
                    .pairs
                    .iter()
                    .any(|&(c, d)| (c, d) != (a, b) && c <= a && b <= d)
            })
            .collect()
    }

    /// Textual format `{(0,3),(1,2)}`; `{}` is the empty pairing.
    pub fn parse(text: &str) -> Result<NoncrossingPairing, PairingError> {
        let err = || PairingError::Parse { text: text.to_owned() };
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(err)?;
        let mut pairs = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(err)?;
            let (pair, tail) = body.split_once(')').ok_or_else(err)?;
            let (a, b) = pair.split_once(',').ok_or_else(err)?;
            let a: usize = a.trim().parse().map_err(|_| err())?;
            let b: usize = b.trim().parse().map_err(|_| err())?;
            if a == b {
                return Err(err());
            }
            pairs.push((a, b));
            rest = tail.trim().strip_prefix(',').unwrap_or(tail).trim();
        }
        Ok(NoncrossingPairing::new(pairs))
    }
}

impl fmt::Display for NoncrossingPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

/// Checks the definition clause by clause. Out-of-range positions are a
/// domain error, distinct from a validation failure.
pub fn validate_pairing(
    gamma: &NoncrossingPairing,
    word: &FiniteWord,
) -> Result<ValidationReport, PairingError> {
    validate_pairing_with(gamma, word, Strictness::default())
}

pub fn validate_pairing_with(
    gamma: &NoncrossingPairing,
    word: &FiniteWord,
    strictness: Strictness,
) -> Result<ValidationReport, PairingError> {
    for (a, b) in gamma.pairs() {
        for position in [a, b] {
            if position >= word.len() {
                return Err(PairingError::PositionOutOfRange { position, len: word.len() });
            }
        }
    }
    let pairs: Vec<(usize, usize)> = gamma.pairs().collect();
    let support = gamma.support();
    let mut violations = Vec::new();

    for (i, &pa) in pairs.iter().enumerate() {
        for &pb in &pairs[i + 1..] {
            if pa.0 == pb.0 || pa.0 == pb.1 || pa.1 == pb.0 || pa.1 == pb.1 {
                violations.push(Violation::Overlap { pair_a: pa, pair_b: pb });
                continue;
            }
            let (outer, inner) = if pa.0 < pb.0 { (pa, pb) } else { (pb, pa) };
            let disjoint = outer.1 < inner.0;
            let nested = inner.1 < outer.1;
            if !disjoint && !nested {
                violations.push(Violation::Crossing { pair_a: pa, pair_b: pb });
            } else if nested && strictness == Strictness::PrintedDisjointOnly {
                violations.push(Violation::Nesting { outer, inner });
            }
        }
    }
    for &(a, b) in &pairs {
        for position in a..=b {
            if !support.contains(&position) {
                violations.push(Violation::CoverageGap { pair: (a, b), position });
                break;
            }
        }
        if !word.letter(a).is_inverse_of(word.letter(b)) {
            violations.push(Violation::NotInverse { pair: (a, b) });
        }
    }
    Ok(ValidationReport { violations })
}

/// The Cannon-Conner construction: a complete noncrossing inverse pairing
/// exists iff the word is trivial. Generator indices are processed in
/// increasing order; within a stage, occurrences are matched by the
/// leftmost-innermost cancellation of the intermediate word.
pub fn find_complete_pairing(word: &FiniteWord) -> Option<NoncrossingPairing> {
    let len = word.len();
    if len == 0 {
        return Some(NoncrossingPairing::empty());
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut paired = vec![false; len];

    for index in word.supp() {
        let occurrences: Vec<usize> =
            (0..len).filter(|&p| word.letter(p).index == index).collect();
        for &beta in &occurrences {
            if paired[beta] {
                continue;
            }
            // V̄: the maximal section around beta not split by an existing
            // pair, i.e. the intersection of open spans of pairs strictly
            // containing beta.
            let mut lo = 0usize;
            let mut hi = len - 1;
            for &(a, b) in &pairs {
                if a < beta && beta < b {
                    lo = lo.max(a + 1);
                    hi = hi.min(b - 1);
                }
            }
            // U: delete the closed spans of pairs lying inside V̄.
            let mut excluded = vec![false; hi - lo + 1];
            for &(a, b) in &pairs {
                if lo <= a && b <= hi {
                    for position in a..=b {
                        excluded[position - lo] = true;
                    }
                }
            }
            let remaining: Vec<usize> =
                (lo..=hi).filter(|&p| !excluded[p - lo]).collect();
            // Leftmost-innermost cancellation of U; record pairs of the
            // current index only.
            let mut stack: Vec<usize> = Vec::new();
            for &p in &remaining {
                if stack
                    .last()
                    .is_some_and(|&q| word.letter(q).is_inverse_of(word.letter(p)))
                {
                    let q = stack.pop().unwrap();
                    if word.letter(p).index == index {
                        pairs.push((q, p));
                        paired[q] = true;
                        paired[p] = true;
                    }
                } else {
                    stack.push(p);
                }
            }
            if stack.iter().any(|&p| word.letter(p).index == index) {
                return None;
            }
        }
    }
    debug_assert!(paired.iter().all(|&p| p));
    let gamma = NoncrossingPairing::new(pairs);
    debug_assert!(validate_pairing(&gamma, word).map(|r| r.is_ok()).unwrap_or(false));
    Some(gamma)
}

/// Greedy maximal pairing: repeatedly pair the leftmost
/// adjacent-after-removal inverse pair, mirroring free reduction. The
/// residual of the result equals the free reduction letter-for-letter.
pub fn maximal_pairing(word: &FiniteWord) -> NoncrossingPairing {
    let mut stack: Vec<usize> = Vec::new();
    let mut pairs = Vec::new();
    for p in 0..word.len() {
        if stack
            .last()
            .is_some_and(|&q| word.letter(q).is_inverse_of(word.letter(p)))
        {
            pairs.push((stack.pop().unwrap(), p));
        } else {
            stack.push(p);
        }
    }
    NoncrossingPairing::new(pairs)
}

/// The subword on unpaired positions. For a maximal pairing this is the
/// reduced word of `word`.
pub fn residual_word(
    word: &FiniteWord,
    gamma: &NoncrossingPairing,
) -> Result<FiniteWord, PairingError> {
    let report = validate_pairing(gamma, word)?;
    if !report.is_ok() {
        return Err(PairingError::Invalid(report));
    }
    let support = gamma.support();
    Ok(FiniteWord::new(
        (0..word.len())
            .filter(|p| !support.contains(p))
            .map(|p| word.letter(p))
            .collect(),
    ))
}

/// Positions covered by the span of some pair.
pub fn bound_positions(
    word: &FiniteWord,
    gamma: &NoncrossingPairing,
) -> Result<BTreeSet<usize>, PairingError> {
    let report = validate_pairing(gamma, word)?;
    if !report.is_ok() {
        return Err(PairingError::Invalid(report));
    }
    let mut out = BTreeSet::new();
    for (a, b) in gamma.pairs() {
        out.extend(a..=b);
    }
    Ok(out)
}

/// Inclusive position span.
pub type Span = (usize, usize);

/// Restriction of a pairing to the concatenation `UV` of two spans, after
/// checking the three hypotheses under which the restriction is again a
/// valid pairing of `UV`.
pub fn restrict_pairing(
    word: &FiniteWord,
    gamma: &NoncrossingPairing,
    u_span: Span,
    v_span: Span,
) -> Result<NoncrossingPairing, PairingError> {
    let report = validate_pairing(gamma, word)?;
    if !report.is_ok() {
        return Err(PairingError::Invalid(report));
    }
    for &(lo, hi) in [&u_span, &v_span] {
        if lo > hi {
            return Err(PairingError::HypothesisViolated { clause: 1 });
        }
        if hi >= word.len() {
            return Err(PairingError::PositionOutOfRange { position: hi, len: word.len() });
        }
    }
    // (1) U lies entirely before V.
    if u_span.1 >= v_span.0 {
        return Err(PairingError::HypothesisViolated { clause: 1 });
    }
    // (2) the stretch from U's start to V's end is bound by the pairing.
    let bound = bound_positions(word, gamma)?;
    if (u_span.0..=v_span.1).any(|p| !bound.contains(&p)) {
        return Err(PairingError::HypothesisViolated { clause: 2 });
    }
    // (3) every U-position sits left of a pair into V, and dually.
    let in_u = |p: usize| u_span.0 <= p && p <= u_span.1;
    let in_v = |p: usize| v_span.0 <= p && p <= v_span.1;
    let cross: Vec<(usize, usize)> = gamma
        .pairs()
        .filter(|&(a, b)| in_u(a) && in_v(b))
        .collect();
    for alpha in u_span.0..=u_span.1 {
        if !cross.iter().any(|&(a, _)| alpha <= a) {
            return Err(PairingError::HypothesisViolated { clause: 3 });
        }
    }
    for beta in v_span.0..=v_span.1 {
        if !cross.iter().any(|&(_, b)| b <= beta) {
            return Err(PairingError::HypothesisViolated { clause: 3 });
        }
    }

    let u_len = u_span.1 - u_span.0 + 1;
    let reindex = |p: usize| {
        if in_u(p) {
            Some(p - u_span.0)
        } else if in_v(p) {
            Some(u_len + p - v_span.0)
        } else {
            None
        }
    };
    let restricted = NoncrossingPairing::new(gamma.pairs().filter_map(|(a, b)| {
        match (reindex(a), reindex(b)) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }));
    Ok(restricted)
}

/// The word `UV` the restricted pairing lives on.
pub fn span_concat(word: &FiniteWord, u_span: Span, v_span: Span) -> FiniteWord {
    let mut letters = word.letters()[u_span.0..=u_span.1].to_vec();
    letters.extend_from_slice(&word.letters()[v_span.0..=v_span.1]);
    FiniteWord::new(letters)
}

const ENUMERATION_LIMIT: usize = 12;

/// Brute-force enumeration of all valid pairings; the independent oracle for
/// the Cannon-Conner construction.
pub fn enumerate_pairings(
    word: &FiniteWord,
    complete_only: bool,
) -> Result<Vec<NoncrossingPairing>, PairingError> {
    if word.len() > ENUMERATION_LIMIT {
        return Err(PairingError::TooLong { len: word.len(), limit: ENUMERATION_LIMIT });
    }
    let mut out = Vec::new();
    let mut used = vec![false; word.len()];
    let mut current = Vec::new();
    recurse(word, 0, &mut used, &mut current, complete_only, &mut out);
    Ok(out)
}

fn recurse(
    word: &FiniteWord,
    from: usize,
    used: &mut Vec<bool>,
    current: &mut Vec<(usize, usize)>,
    complete_only: bool,
    out: &mut Vec<NoncrossingPairing>,
) {
    let Some(p) = (from..word.len()).find(|&p| !used[p]) else {
        let gamma = NoncrossingPairing::new(current.iter().copied());
        if complete_only && !gamma.is_complete(word) {
            return;
        }
        if validate_pairing(&gamma, word).map(|r| r.is_ok()).unwrap_or(false) {
            out.push(gamma);
        }
        return;
    };
    // leave p unpaired
    if !complete_only {
        used[p] = true;
        recurse(word, p + 1, used, current, complete_only, out);
        used[p] = false;
    } else {
        // completeness needs every position paired, but a candidate that
        // skips p can still complete it later only via a pair (q, p) with
        // q < p, which this enumeration has already decided against; prune.
    }
    for q in p + 1..word.len() {
        if used[q] || !word.letter(p).is_inverse_of(word.letter(q)) {
            continue;
        }
        // cheap noncrossing prune against already-chosen pairs
        let crossing = current.iter().any(|&(a, b)| {
            let (outer, inner) = if a < p { ((a, b), (p, q)) } else { ((p, q), (a, b)) };
            !(outer.1 < inner.0 || inner.1 < outer.1)
        });
        if crossing {
            continue;
        }
        used[p] = true;
        used[q] = true;
        current.push((p, q));
        recurse(word, p + 1, used, current, complete_only, out);
        current.pop();
        used[p] = false;
        used[q] = false;
    }
}

/// Restricts a pairing to the positions of `W_F`, re-indexed to the
/// projection. A complete pairing restricts to a complete pairing.
pub fn project_pairing(
    word: &FiniteWord,
    gamma: &NoncrossingPairing,
    indices: &BTreeSet<u32>,
) -> NoncrossingPairing {
    let kept: Vec<usize> = (0..word.len())
        .filter(|&p| indices.contains(&word.letter(p).index))
        .collect();
    let position_of = |p: usize| kept.binary_search(&p).ok();
    NoncrossingPairing::new(gamma.pairs().filter_map(|(a, b)| {
        match (position_of(a), position_of(b)) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }))
}
