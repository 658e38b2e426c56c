//! Finitely-describable infinitary words with computable projections, and
//! the exact interval recursion behind the truncated-loop construction.
//!
//! An infinitary word is represented intensionally: a word *is* its family of
//! finite projections, so an expression only has to certify, per generator
//! index, which terms of an infinite concatenation can mention it. The
//! certificate keeps every projection finite and computable.

use crate::rat::{self, Rational};
use crate::word::{FiniteWord, Letter, Sign};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("occurrence bound violated: term {k} mentions generator {index} without certifying it")]
    CertificateViolation { k: u64, index: u32 },
    #[error("sequence index out of the admissible set: entry {value} at position {position} exceeds {limit}")]
    NotInSigma { position: usize, value: u32, limit: u32 },
    #[error("sequence index must be nonempty")]
    EmptySequence,
    #[error("depth must be >= 1")]
    ZeroDepth,
    #[error("malformed expression near `{text}`")]
    Parse { text: String },
}

/// `family(k) = base` with every generator index `i` replaced by `i + k - 1`,
/// for `k = 1, 2, ...`. Each index then occurs in finitely many terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaRule {
    Shifted { base: FiniteWord },
}

impl OmegaRule {
    pub fn term(&self, k: u64) -> FiniteWord {
        match self {
            OmegaRule::Shifted { base } => FiniteWord::new(
                base.letters()
                    .iter()
                    .map(|l| Letter::new(l.index + (k - 1) as u32, l.sign))
                    .collect(),
            ),
        }
    }

    /// Terms in which generator `index` may occur.
    pub fn derived_bound(&self, index: u32) -> BTreeSet<u64> {
        match self {
            OmegaRule::Shifted { base } => base
                .supp()
                .into_iter()
                .filter(|&i| index >= i)
                .map(|i| (index - i) as u64 + 1)
                .collect(),
        }
    }
}

/// Occurrence-bound certificate for an infinite concatenation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OccurrenceBound {
    /// Computed from the rule itself.
    Derived,
    /// Supplied explicitly; expansion checks it and reports violations.
    Explicit(BTreeMap<u32, BTreeSet<u64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordExpression {
    Leaf(Letter),
    Cat(Vec<WordExpression>),
    Inv(Box<WordExpression>),
    Omega { rule: OmegaRule, bound: OccurrenceBound },
}

impl WordExpression {
    pub fn empty() -> WordExpression {
        WordExpression::Cat(Vec::new())
    }

    pub fn leaf(letter: Letter) -> WordExpression {
        WordExpression::Leaf(letter)
    }

    pub fn omega(rule: OmegaRule) -> WordExpression {
        WordExpression::Omega { rule, bound: OccurrenceBound::Derived }
    }

    /// The finite word `E_F`: exactly the `F`-indexed letters, in expression
    /// order.
    pub fn project(&self, indices: &BTreeSet<u32>) -> Result<FiniteWord, ExprError> {
        match self {
            WordExpression::Leaf(letter) => Ok(if indices.contains(&letter.index) {
                FiniteWord::new(vec![*letter])
            } else {
                FiniteWord::empty()
            }),
            WordExpression::Cat(parts) => {
                let mut out = FiniteWord::empty();
                for part in parts {
                    out = out.concat(&part.project(indices)?);
                }
                Ok(out)
            }
            WordExpression::Inv(inner) => Ok(inner.project(indices)?.inverse()),
            WordExpression::Omega { rule, bound } => {
                let bound_of = |index: u32| match bound {
                    OccurrenceBound::Derived => rule.derived_bound(index),
                    OccurrenceBound::Explicit(map) => {
                        map.get(&index).cloned().unwrap_or_default()
                    }
                };
                let relevant: BTreeSet<u64> =
                    indices.iter().flat_map(|&n| bound_of(n)).collect();
                let mut out = FiniteWord::empty();
                for &k in &relevant {
                    let term = rule.term(k);
                    for letter in term.letters() {
                        if indices.contains(&letter.index) && !bound_of(letter.index).contains(&k)
                        {
                            return Err(ExprError::CertificateViolation {
                                k,
                                index: letter.index,
                            });
                        }
                    }
                    out = out.concat(&term.project(indices));
                }
                Ok(out)
            }
        }
    }

    /// Semi-decision of equivalence: equality of the projections to
    /// `F = {1..n}` in the free group. A `true` answer is evidence for
    /// equivalence over the first `n` generators only, not a proof of full
    /// equivalence; `false` is a definitive refutation.
    pub fn equivalent_upto(&self, other: &WordExpression, n: u32) -> Result<bool, ExprError> {
        let indices: BTreeSet<u32> = (1..=n).collect();
        Ok(self
            .project(&indices)?
            .free_reduce()
            == other.project(&indices)?.free_reduce())
    }

    /// S-expression format: `d3`, `d3^-`, `ε`, `(cat E...)`, `(inv E)`,
    /// `(omega shift d1 d1^-)`.
    pub fn parse(text: &str) -> Result<WordExpression, ExprError> {
        let tokens = tokenize(text);
        let mut position = 0;
        let expression = parse_tokens(&tokens, &mut position)?;
        if position != tokens.len() {
            return Err(ExprError::Parse { text: tokens[position..].join(" ") });
        }
        Ok(expression)
    }
}

fn tokenize(text: &str) -> Vec<String> {
    text.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

fn parse_tokens(tokens: &[String], position: &mut usize) -> Result<WordExpression, ExprError> {
    let err = |at: usize| ExprError::Parse {
        text: tokens.get(at).cloned().unwrap_or_else(|| "<end>".into()),
    };
    let token = tokens.get(*position).ok_or_else(|| err(*position))?;
    if token == "(" {
        *position += 1;
        let head = tokens.get(*position).ok_or_else(|| err(*position))?.clone();
        *position += 1;
        let expression = match head.as_str() {
            "cat" => {
                let mut parts = Vec::new();
                while tokens.get(*position).is_some_and(|t| t != ")") {
                    parts.push(parse_tokens(tokens, position)?);
                }
                WordExpression::Cat(parts)
            }
            "inv" => WordExpression::Inv(Box::new(parse_tokens(tokens, position)?)),
            "omega" => {
                let rule = tokens.get(*position).ok_or_else(|| err(*position))?.clone();
                *position += 1;
                if rule != "shift" {
                    return Err(ExprError::Parse { text: rule });
                }
                let mut letters = Vec::new();
                while let Some(t) = tokens.get(*position) {
                    if t == ")" {
                        break;
                    }
                    let word = FiniteWord::parse(t)
                        .map_err(|_| ExprError::Parse { text: t.clone() })?;
                    letters.extend_from_slice(word.letters());
                    *position += 1;
                }
                WordExpression::omega(OmegaRule::Shifted { base: FiniteWord::new(letters) })
            }
            other => return Err(ExprError::Parse { text: other.to_owned() }),
        };
        if tokens.get(*position).map(String::as_str) != Some(")") {
            return Err(err(*position));
        }
        *position += 1;
        Ok(expression)
    } else if token == "ε" || token == "e" {
        *position += 1;
        Ok(WordExpression::empty())
    } else {
        let word = FiniteWord::parse(token)
            .map_err(|_| ExprError::Parse { text: token.clone() })?;
        *position += 1;
        Ok(WordExpression::Leaf(word.letter(0)))
    }
}

impl fmt::Display for WordExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpression::Leaf(letter) => write!(f, "{letter}"),
            WordExpression::Cat(parts) if parts.is_empty() => write!(f, "ε"),
            WordExpression::Cat(parts) => {
                write!(f, "(cat")?;
                for part in parts {
                    write!(f, " {part}")?;
                }
                write!(f, ")")
            }
            WordExpression::Inv(inner) => write!(f, "(inv {inner})"),
            WordExpression::Omega { rule: OmegaRule::Shifted { base }, .. } => {
                write!(f, "(omega shift")?;
                for letter in base.letters() {
                    write!(f, " {letter}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite sequence indexing the interval family: nonempty, with
/// `s(i) <= i + 1` at every position. (Both children of the root exist: the
/// length-1 sequences are `(0)` and `(1)`.)
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeqIndex {
    entries: Vec<u32>,
}

impl SeqIndex {
    pub fn new(entries: Vec<u32>) -> Result<SeqIndex, ExprError> {
        if entries.is_empty() {
            return Err(ExprError::EmptySequence);
        }
        for (position, &value) in entries.iter().enumerate() {
            let limit = position as u32 + 1;
            if value > limit {
                return Err(ExprError::NotInSigma { position, value, limit });
            }
        }
        Ok(SeqIndex { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    fn parent(&self) -> Option<(SeqIndex, u32)> {
        if self.entries.len() == 1 {
            return None;
        }
        let mut entries = self.entries.clone();
        let last = entries.pop().unwrap();
        Some((SeqIndex { entries }, last))
    }

    /// All admissible sequences of length `1..=depth`.
    pub fn enumerate(depth: u32) -> Vec<SeqIndex> {
        let mut out: Vec<SeqIndex> = Vec::new();
        let mut level: Vec<Vec<u32>> = vec![vec![0], vec![1]];
        for _ in 1..=depth {
            out.extend(level.iter().cloned().map(|entries| SeqIndex { entries }));
            let mut next = Vec::new();
            for entries in &level {
                let limit = entries.len() as u32 + 1;
                for i in 0..=limit {
                    let mut child = entries.clone();
                    child.push(i);
                    next.push(child);
                }
            }
            level = next;
        }
        out
    }
}

impl fmt::Display for SeqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, entry) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{entry}")?;
        }
        write!(f, ")")
    }
}

/// The exact interval `[a_s, b_s]` of the recursion
/// `b_s = a_s + 2^{-n}/(n+1)!` and `a_{t*(i)} = b_t + 2^{-(n-1)} (1/n!) (i/(n+1))`
/// with `n = lh(s)`, anchored at `a_{(0)} = 0`, `a_{(1)} = 1/2`.
pub fn remark_interval(s: &SeqIndex) -> (Rational, Rational) {
    let n = s.len() as u32;
    let a = match s.parent() {
        None => {
            if s.entries()[0] == 0 {
                Rational::zero()
            } else {
                rat::ratio(1, 2)
            }
        }
        Some((t, i)) => {
            let (_, b_t) = remark_interval(&t);
            b_t + rat::inv_pow2(n - 1)
                * rat::inv_factorial(n)
                * rat::ratio(i as i64, n as i64 + 1)
        }
    };
    let b = &a + rat::inv_pow2(n) * rat::inv_factorial(n + 1);
    (a, b)
}

/// The word shadow of the truncated loop: for every admissible sequence of
/// length at most `depth`, ordered by interval position, the block
/// `d_n d_n^-` with `n = lh(s)`. Every projection of the result free-reduces
/// to the empty word.
pub fn build_remark_expression(depth: u32) -> Result<WordExpression, ExprError> {
    if depth == 0 {
        return Err(ExprError::ZeroDepth);
    }
    let mut blocks: Vec<(Rational, u32)> = SeqIndex::enumerate(depth)
        .into_iter()
        .map(|s| {
            let n = s.len() as u32;
            (remark_interval(&s).0, n)
        })
        .collect();
    blocks.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(WordExpression::Cat(
        blocks
            .into_iter()
            .flat_map(|(_, n)| {
                [
                    WordExpression::Leaf(Letter::new(n, Sign::Plus)),
                    WordExpression::Leaf(Letter::new(n, Sign::Minus)),
                ]
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, ratio};

    fn seq(entries: &[u32]) -> SeqIndex {
        SeqIndex::new(entries.to_vec()).unwrap()
    }

    fn f(indices: &[u32]) -> BTreeSet<u32> {
        indices.iter().copied().collect()
    }

    fn w(text: &str) -> FiniteWord {
        FiniteWord::parse(text).unwrap()
    }

    #[test]
    fn project_examples() {
        // k -> [d_{k+1}, d_{k+1}^-]
        let e = WordExpression::omega(OmegaRule::Shifted { base: w("d2 d2^-") });
        assert_eq!(e.project(&f(&[2])).unwrap(), w("d2 d2^-"));

        let e = WordExpression::Inv(Box::new(WordExpression::Cat(vec![
            WordExpression::leaf(Letter::positive(1)),
            WordExpression::leaf(Letter::positive(2)),
        ])));
        assert_eq!(e.project(&f(&[1, 2])).unwrap(), w("d2^- d1^-"));

        assert_eq!(e.project(&f(&[])).unwrap(), FiniteWord::empty());
    }

    #[test]
    fn omega_expansion_is_ordered() {
        let e = WordExpression::omega(OmegaRule::Shifted { base: w("d1") });
        assert_eq!(e.project(&f(&[1, 3])).unwrap(), w("d1 d3"));
        assert_eq!(e.project(&f(&[2])).unwrap(), w("d2"));
    }

    #[test]
    fn explicit_bound_violation_is_reported() {
        let e = WordExpression::Omega {
            rule: OmegaRule::Shifted { base: w("d1 d2") },
            // claims index 2 occurs only in term 2, but term 1 = [d1 d2]
            bound: OccurrenceBound::Explicit(BTreeMap::from([
                (1, BTreeSet::from([1])),
                (2, BTreeSet::from([2])),
            ])),
        };
        assert_eq!(
            e.project(&f(&[1, 2])),
            Err(ExprError::CertificateViolation { k: 1, index: 2 })
        );
    }

    #[test]
    fn equivalent_upto_examples() {
        let e = WordExpression::omega(OmegaRule::Shifted { base: w("d3 d1^-") });
        assert!(e.equivalent_upto(&e, 7).unwrap());

        let cancelling = WordExpression::omega(OmegaRule::Shifted { base: w("d1 d1^-") });
        assert!(cancelling.equivalent_upto(&WordExpression::empty(), 10).unwrap());

        let singles = WordExpression::omega(OmegaRule::Shifted { base: w("d1") });
        assert!(!singles.equivalent_upto(&WordExpression::empty(), 1).unwrap());
    }

    /// Projecting to F∪G and then restricting to F equals projecting to F.
    #[test]
    fn projection_coherence() {
        let expressions = vec![
            WordExpression::omega(OmegaRule::Shifted { base: w("d1 d2 d1^-") }),
            WordExpression::Inv(Box::new(WordExpression::omega(OmegaRule::Shifted {
                base: w("d1 d1^-"),
            }))),
            WordExpression::Cat(vec![
                WordExpression::leaf(Letter::positive(2)),
                WordExpression::omega(OmegaRule::Shifted { base: w("d1") }),
            ]),
            build_remark_expression(3).unwrap(),
        ];
        let sets = [f(&[1]), f(&[2]), f(&[1, 3]), f(&[2, 4]), f(&[1, 2, 3])];
        for e in &expressions {
            for fs in &sets {
                for gs in &sets {
                    let union: BTreeSet<u32> = fs.union(gs).copied().collect();
                    assert_eq!(
                        e.project(&union).unwrap().project(fs),
                        e.project(fs).unwrap(),
                        "{e} F={fs:?} G={gs:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_membership() {
        assert!(SeqIndex::new(vec![0]).is_ok());
        assert!(SeqIndex::new(vec![1]).is_ok());
        assert_eq!(
            SeqIndex::new(vec![2]),
            Err(ExprError::NotInSigma { position: 0, value: 2, limit: 1 })
        );
        assert_eq!(SeqIndex::new(vec![]), Err(ExprError::EmptySequence));
        assert!(SeqIndex::new(vec![0, 2]).is_ok());
        assert!(SeqIndex::new(vec![0, 3]).is_err());
    }

    #[test]
    fn interval_examples() {
        assert_eq!(remark_interval(&seq(&[0])), (int(0), ratio(1, 4)));
        assert_eq!(remark_interval(&seq(&[1])), (ratio(1, 2), ratio(3, 4)));
        assert_eq!(remark_interval(&seq(&[0, 0])), (ratio(1, 4), ratio(7, 24)));
    }

    #[test]
    fn intervals_disjoint_and_sized_up_to_depth_4() {
        let mut intervals: Vec<(Rational, Rational)> = Vec::new();
        for s in SeqIndex::enumerate(4) {
            let n = s.len() as u32;
            let (a, b) = remark_interval(&s);
            assert_eq!(&b - &a, rat::inv_pow2(n) * rat::inv_factorial(n + 1), "{s}");
            assert!(a >= int(0) && b <= int(1), "{s}");
            intervals.push((a, b));
        }
        intervals.sort();
        for pair in intervals.windows(2) {
            assert!(pair[0].1 <= pair[1].0, "{pair:?}");
        }
    }

    #[test]
    fn sibling_intervals_ordered() {
        // within a fixed parent, consecutive children are ordered and disjoint
        let parent = seq(&[0]);
        let mut previous_b: Option<Rational> = None;
        for i in 0..=2 {
            let mut entries = parent.entries().to_vec();
            entries.push(i);
            let (a, b) = remark_interval(&seq(&entries));
            assert!(a < b);
            if let Some(pb) = previous_b {
                assert!(pb <= a);
            }
            previous_b = Some(b);
        }
    }

    #[test]
    fn remark_expression_examples() {
        assert_eq!(
            build_remark_expression(1)
                .unwrap()
                .project(&f(&[1]))
                .unwrap(),
            w("d1 d1^- d1 d1^-")
        );
        assert_eq!(build_remark_expression(0), Err(ExprError::ZeroDepth));

        // at level n the number of admissible sequences is (n+1)!
        for depth in 1..=4u32 {
            let e = build_remark_expression(depth).unwrap();
            for n in 1..=depth {
                let count = SeqIndex::enumerate(depth)
                    .into_iter()
                    .filter(|s| s.len() as u32 == n)
                    .count();
                let projection = e.project(&f(&[n])).unwrap();
                assert_eq!(projection.len(), 2 * count);
                for (i, letter) in projection.letters().iter().enumerate() {
                    assert_eq!(letter.index, n);
                    assert_eq!(
                        letter.sign,
                        if i % 2 == 0 { Sign::Plus } else { Sign::Minus }
                    );
                }
            }
            assert!(e
                .equivalent_upto(&WordExpression::empty(), depth)
                .unwrap());
        }
    }

    #[test]
    fn expression_text_round_trip() {
        for text in [
            "d1",
            "d2^-",
            "ε",
            "(cat d1 (inv d2))",
            "(omega shift d1 d1^-)",
            "(inv (omega shift d2))",
        ] {
            let e = WordExpression::parse(text).unwrap();
            assert_eq!(WordExpression::parse(&e.to_string()).unwrap(), e, "{text}");
        }
        assert!(WordExpression::parse("(frob d1)").is_err());
        assert!(WordExpression::parse("(cat d1").is_err());
    }
}
