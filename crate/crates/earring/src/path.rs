//! Proper paths in the earring space: segment-encoded paths whose circle
//! excursions are whole windings, the word read off a path, properization of
//! labelled raw paths, the null-homotopy decision on simply-connected models,
//! path reduction, and maximal pairing-bound parameter intervals.

use crate::pairing::{
    find_complete_pairing, maximal_pairing, validate_pairing, NoncrossingPairing, PairingError,
};
use crate::rat::{int, parse_rational, ratio, to_f64, Rational};
use crate::space::{BasePoint, EPoint, SpaceError, SpaceModel};
use crate::word::{FiniteWord, Letter, Sign};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("a path needs at least one segment")]
    NoSegments,
    #[error("expected {expected} breakpoints, got {got}")]
    BreakpointCount { expected: usize, got: usize },
    #[error("breakpoints must be strictly increasing (violated at index {index})")]
    BreakpointsNotIncreasing { index: usize },
    #[error("arc segment {index} has no waypoints")]
    EmptyArc { index: usize },
    #[error("segment {index} does not start where the previous segment ends")]
    ChainBroken { index: usize },
    #[error("operation requires a loop (start = end)")]
    NotALoop,
    #[error("operation not supported on model `{model}`")]
    UnsupportedModel { model: String },
    #[error("parameter outside the path domain")]
    ParameterOutOfDomain,
    #[error("malformed path text: {0}")]
    Parse(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

/// One piece of a proper path: either a polyline in the base space or one
/// full (reverse) traversal of the circle attached at `d_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    BaseArc { waypoints: Vec<BasePoint> },
    Winding { n: u32, sign: Sign },
}

impl Segment {
    pub fn arc(waypoints: Vec<BasePoint>) -> Segment {
        Segment::BaseArc { waypoints }
    }

    pub fn winding(n: u32, sign: Sign) -> Segment {
        Segment::Winding { n, sign }
    }

    fn start(&self, model: &SpaceModel) -> Result<BasePoint, PathError> {
        match self {
            Segment::BaseArc { waypoints } => Ok(waypoints[0]),
            Segment::Winding { n, .. } => Ok(model.dense_point(*n)?),
        }
    }

    fn end(&self, model: &SpaceModel) -> Result<BasePoint, PathError> {
        match self {
            Segment::BaseArc { waypoints } => Ok(*waypoints.last().unwrap()),
            Segment::Winding { n, .. } => Ok(model.dense_point(*n)?),
        }
    }
}

/// A proper path: chained segments over a partition of `[a,b]` with exact
/// rational breakpoints (one more breakpoint than segments, strictly
/// increasing).
#[derive(Clone, Debug, PartialEq)]
pub struct ProperPath {
    breakpoints: Vec<Rational>,
    segments: Vec<Segment>,
}

impl ProperPath {
    /// Uniform breakpoints over `[0,1]`.
    pub fn new_uniform(segments: Vec<Segment>) -> Result<ProperPath, PathError> {
        let k = segments.len();
        if k == 0 {
            return Err(PathError::NoSegments);
        }
        let breakpoints = (0..=k).map(|i| ratio(i as i64, k as i64)).collect();
        ProperPath::with_breakpoints(breakpoints, segments)
    }

    pub fn with_breakpoints(
        breakpoints: Vec<Rational>,
        segments: Vec<Segment>,
    ) -> Result<ProperPath, PathError> {
        if segments.is_empty() {
            return Err(PathError::NoSegments);
        }
        if breakpoints.len() != segments.len() + 1 {
            return Err(PathError::BreakpointCount {
                expected: segments.len() + 1,
                got: breakpoints.len(),
            });
        }
        for i in 1..breakpoints.len() {
            if breakpoints[i] <= breakpoints[i - 1] {
                return Err(PathError::BreakpointsNotIncreasing { index: i });
            }
        }
        for (index, seg) in segments.iter().enumerate() {
            if matches!(seg, Segment::BaseArc { waypoints } if waypoints.is_empty()) {
                return Err(PathError::EmptyArc { index });
            }
        }
        Ok(ProperPath { breakpoints, segments })
    }

    /// Endpoint chaining against a concrete model.
    pub fn validate(&self, model: &SpaceModel) -> Result<(), PathError> {
        for i in 1..self.segments.len() {
            if self.segments[i - 1].end(model)? != self.segments[i].start(model)? {
                return Err(PathError::ChainBroken { index: i });
            }
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (self.breakpoints.first().unwrap(), self.breakpoints.last().unwrap())
    }

    pub fn segment_span(&self, i: usize) -> (&Rational, &Rational) {
        (&self.breakpoints[i], &self.breakpoints[i + 1])
    }

    pub fn start_point(&self, model: &SpaceModel) -> Result<BasePoint, PathError> {
        self.segments.first().unwrap().start(model)
    }

    pub fn end_point(&self, model: &SpaceModel) -> Result<BasePoint, PathError> {
        self.segments.last().unwrap().end(model)
    }

    pub fn is_loop(&self, model: &SpaceModel) -> Result<bool, PathError> {
        Ok(self.start_point(model)? == self.end_point(model)?)
    }

    /// Segment indices of the windings, in word order.
    pub fn winding_segments(&self) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Segment::Winding { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    /// Parameter span of the k-th winding (k = word position).
    pub fn winding_span(&self, position: usize) -> Option<(Rational, Rational)> {
        let seg = *self.winding_segments().get(position)?;
        Some((self.breakpoints[seg].clone(), self.breakpoints[seg + 1].clone()))
    }

    /// Reversal: `f^-(s) = f(a+b-s)`.
    pub fn reverse(&self) -> ProperPath {
        let (a, b) = self.domain();
        let total = a.clone() + b.clone();
        let breakpoints: Vec<Rational> =
            self.breakpoints.iter().rev().map(|t| total.clone() - t).collect();
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| match s {
                Segment::BaseArc { waypoints } => {
                    Segment::BaseArc { waypoints: waypoints.iter().rev().copied().collect() }
                }
                Segment::Winding { n, sign } => Segment::Winding { n: *n, sign: sign.flip() },
            })
            .collect();
        ProperPath { breakpoints, segments }
    }

    /// Concatenation; `other`'s domain is translated to start at `self`'s end.
    pub fn concat(&self, other: &ProperPath) -> ProperPath {
        let shift = self.domain().1.clone() - other.domain().0;
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend(other.breakpoints.iter().skip(1).map(|t| t + shift.clone()));
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        ProperPath { breakpoints, segments }
    }

    fn segment_at(&self, t: &Rational) -> Result<usize, PathError> {
        let (a, b) = self.domain();
        if t < a || t > b {
            return Err(PathError::ParameterOutOfDomain);
        }
        // last segment whose start is <= t
        let mut i = match self.breakpoints.binary_search_by(|p| p.cmp(t)) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        if i == self.segments.len() {
            i -= 1;
        }
        Ok(i)
    }

    /// Evaluation at a parameter; arcs interpolate linearly between
    /// uniformly spaced waypoints (plane models only).
    pub fn eval(&self, t: &Rational, model: &SpaceModel) -> Result<EPoint, PathError> {
        let i = self.segment_at(t)?;
        let (lo, hi) = self.segment_span(i);
        let frac = to_f64(&((t - lo) / (hi - lo)));
        match &self.segments[i] {
            Segment::BaseArc { waypoints } => {
                if waypoints.len() == 1 {
                    return Ok(EPoint::Base(waypoints[0]));
                }
                let scaled = frac * (waypoints.len() - 1) as f64;
                let k = (scaled.floor() as usize).min(waypoints.len() - 2);
                let u = scaled - k as f64;
                let (p, q) = (waypoints[k], waypoints[k + 1]);
                match (p, q) {
                    (BasePoint::Plane { x: x1, y: y1 }, BasePoint::Plane { x: x2, y: y2 }) => {
                        Ok(EPoint::Base(BasePoint::plane(
                            x1 + u * (x2 - x1),
                            y1 + u * (y2 - y1),
                        )))
                    }
                    _ => Err(PathError::UnsupportedModel { model: model.name().to_owned() }),
                }
            }
            Segment::Winding { n, sign } => {
                let theta = match sign {
                    Sign::Plus => frac,
                    Sign::Minus => 1.0 - frac,
                };
                let theta = if (0.0..1.0).contains(&theta) { theta } else { 0.0 };
                Ok(EPoint::circle(*n, theta, model)?)
            }
        }
    }

    /// Exact-rational Lipschitz constant of one segment: polyline length over
    /// parameter span for arcs (rounded up to a dyadic), circumference over
    /// scaled span for windings.
    pub fn segment_lipschitz(&self, i: usize, model: &SpaceModel) -> Result<Rational, PathError> {
        let (lo, hi) = self.segment_span(i);
        let span = hi.clone() - lo;
        match &self.segments[i] {
            Segment::BaseArc { waypoints } => {
                let mut length = 0.0_f64;
                for w in waypoints.windows(2) {
                    length += model.base_distance(&w[0], &w[1])?;
                }
                if length == 0.0 {
                    return Ok(int(0));
                }
                Ok(crate::rat::dyadic_ceil(length) / span)
            }
            Segment::Winding { n, .. } => Ok(ratio(1, i64::from(*n)) / span),
        }
    }

    pub fn max_lipschitz(&self, model: &SpaceModel) -> Result<Rational, PathError> {
        let mut best = int(0);
        for i in 0..self.segments.len() {
            let l = self.segment_lipschitz(i, model)?;
            if l > best {
                best = l;
            }
        }
        Ok(best)
    }

    /// Sound upper bound on the image diameter of `f|[lo,hi]`: the summed
    /// Lipschitz path length of the overlapped segment portions.
    pub fn diameter_bound(
        &self,
        lo: &Rational,
        hi: &Rational,
        model: &SpaceModel,
    ) -> Result<Rational, PathError> {
        let (a, b) = self.domain();
        if lo < a || hi > b || lo > hi {
            return Err(PathError::ParameterOutOfDomain);
        }
        let mut total = int(0);
        for i in 0..self.segments.len() {
            let (s, e) = self.segment_span(i);
            let left = if lo > s { lo.clone() } else { s.clone() };
            let right = if hi < e { hi.clone() } else { e.clone() };
            if right > left {
                total += self.segment_lipschitz(i, model)? * (right - left);
            }
        }
        Ok(total)
    }

    /// Path file format: `format: 1` header, optional `breaks:` line of
    /// rationals, then one `arc x,y …` or `wind n +|-` line per segment.
    pub fn parse(text: &str) -> Result<ProperPath, PathError> {
        let err = |msg: &str| PathError::Parse(msg.to_owned());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
        if lines.next() != Some("format: 1") {
            return Err(err("missing `format: 1` header"));
        }
        let mut breakpoints: Option<Vec<Rational>> = None;
        if let Some(line) = lines.peek() {
            if let Some(body) = line.strip_prefix("breaks:") {
                let parsed: Option<Vec<Rational>> =
                    body.split_whitespace().map(parse_rational).collect();
                breakpoints = Some(parsed.ok_or_else(|| err("bad breakpoint"))?);
                lines.next();
            }
        }
        let mut segments = Vec::new();
        for line in lines {
            if let Some(body) = line.strip_prefix("arc") {
                let waypoints: Result<Vec<BasePoint>, PathError> = body
                    .split_whitespace()
                    .map(|tok| {
                        let (x, y) =
                            tok.split_once(',').ok_or_else(|| err(&format!("bad waypoint `{tok}`")))?;
                        Ok(BasePoint::plane(
                            x.parse().map_err(|_| err(&format!("bad waypoint `{tok}`")))?,
                            y.parse().map_err(|_| err(&format!("bad waypoint `{tok}`")))?,
                        ))
                    })
                    .collect();
                segments.push(Segment::BaseArc { waypoints: waypoints? });
            } else if let Some(body) = line.strip_prefix("wind") {
                let mut parts = body.split_whitespace();
                let n: u32 = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err("bad winding index"))?;
                let sign = match parts.next() {
                    Some("+") => Sign::Plus,
                    Some("-") => Sign::Minus,
                    _ => return Err(err("winding sign must be + or -")),
                };
                segments.push(Segment::Winding { n, sign });
            } else {
                return Err(err(&format!("unrecognized line `{line}`")));
            }
        }
        match breakpoints {
            Some(b) => ProperPath::with_breakpoints(b, segments),
            None => ProperPath::new_uniform(segments),
        }
    }
}

impl fmt::Display for ProperPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "format: 1")?;
        let breaks: Vec<String> =
            self.breakpoints.iter().map(crate::rat::format_rational).collect();
        writeln!(f, "breaks: {}", breaks.join(" "))?;
        for seg in &self.segments {
            match seg {
                Segment::BaseArc { waypoints } => {
                    let pts: Vec<String> = waypoints
                        .iter()
                        .map(|p| match p {
                            BasePoint::Plane { x, y } => format!("{x},{y}"),
                            BasePoint::Discrete(i) => format!("{i},{i}"),
                        })
                        .collect();
                    writeln!(f, "arc {}", pts.join(" "))?;
                }
                Segment::Winding { n, sign } => {
                    writeln!(f, "wind {} {}", n, if *sign == Sign::Plus { "+" } else { "-" })?;
                }
            }
        }
        Ok(())
    }
}

/// The word read off a proper path: one letter per winding, in order.
pub fn word_of_path(f: &ProperPath) -> FiniteWord {
    let letters = f
        .segments
        .iter()
        .filter_map(|s| match s {
            Segment::Winding { n, sign } => Some(Letter { index: *n, sign: *sign }),
            Segment::BaseArc { .. } => None,
        })
        .collect();
    FiniteWord::new(letters)
}

/// A path whose circle excursions carry labels: a labelled excursion either
/// winds (+1/-1) or is nullhomotopic within its circle (trivial).
#[derive(Clone, Debug, PartialEq)]
pub enum ExcursionLabel {
    Trivial,
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawSegment {
    BaseArc { waypoints: Vec<BasePoint> },
    Excursion { n: u32, label: ExcursionLabel },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawPath {
    pub breakpoints: Vec<Rational>,
    pub segments: Vec<RawSegment>,
}

impl RawPath {
    pub fn new_uniform(segments: Vec<RawSegment>) -> Result<RawPath, PathError> {
        let k = segments.len();
        if k == 0 {
            return Err(PathError::NoSegments);
        }
        let breakpoints = (0..=k).map(|i| ratio(i as i64, k as i64)).collect();
        Ok(RawPath { breakpoints, segments })
    }
}

/// Collapses trivial-labelled excursions to their attachment point (merging
/// into adjacent arcs) and promotes the winding labels to winding segments.
pub fn properize(g: &RawPath, model: &SpaceModel) -> Result<ProperPath, PathError> {
    let mut segments = Vec::with_capacity(g.segments.len());
    for seg in &g.segments {
        segments.push(match seg {
            RawSegment::BaseArc { waypoints } => Segment::BaseArc { waypoints: waypoints.clone() },
            RawSegment::Excursion { n, label } => match label {
                ExcursionLabel::Plus => Segment::Winding { n: *n, sign: Sign::Plus },
                ExcursionLabel::Minus => Segment::Winding { n: *n, sign: Sign::Minus },
                ExcursionLabel::Trivial => {
                    Segment::BaseArc { waypoints: vec![model.dense_point(*n)?] }
                }
            },
        });
    }
    let path = ProperPath::with_breakpoints(g.breakpoints.clone(), segments)?;
    Ok(merge_arcs(&path))
}

/// Joins consecutive arc segments into one (dropping the duplicated junction
/// waypoint); windings are untouched.
fn merge_arcs(f: &ProperPath) -> ProperPath {
    let mut breakpoints = vec![f.breakpoints[0].clone()];
    let mut segments: Vec<Segment> = Vec::new();
    for (i, seg) in f.segments.iter().enumerate() {
        let end = f.breakpoints[i + 1].clone();
        match (segments.last_mut(), seg) {
            (
                Some(Segment::BaseArc { waypoints: acc }),
                Segment::BaseArc { waypoints },
            ) => {
                let skip = usize::from(acc.last() == waypoints.first());
                acc.extend(waypoints.iter().skip(skip).copied());
                *breakpoints.last_mut().unwrap() = end;
            }
            _ => {
                segments.push(seg.clone());
                breakpoints.push(end);
            }
        }
    }
    ProperPath { breakpoints, segments }
}

/// Outcome of the null-homotopy decision: a complete pairing certifies the
/// loop contracts; otherwise the reduced word refutes it.
#[derive(Clone, Debug, PartialEq)]
pub enum LoopAnswer {
    Null { certificate: NoncrossingPairing },
    NotNull { reduced: FiniteWord },
}

/// Decides null-homotopy of a loop on the built-in simply-connected models,
/// where triviality of the loop reduces to triviality of its word.
pub fn is_null_loop(f: &ProperPath, model: &SpaceModel) -> Result<LoopAnswer, PathError> {
    if !model.is_simply_connected_builtin() {
        return Err(PathError::UnsupportedModel { model: model.name().to_owned() });
    }
    f.validate(model)?;
    if !f.is_loop(model)? {
        return Err(PathError::NotALoop);
    }
    let word = word_of_path(f);
    match find_complete_pairing(&word) {
        Some(certificate) => Ok(LoopAnswer::Null { certificate }),
        None => Ok(LoopAnswer::NotNull { reduced: word.free_reduce() }),
    }
}

/// Collapses the span of every nesting-maximal pair of the maximal pairing
/// to a constant arc at its attachment point, so the resulting path reads
/// off the freely reduced word.
pub fn reduce_path(f: &ProperPath, model: &SpaceModel) -> Result<ProperPath, PathError> {
    let word = word_of_path(f);
    let gamma = maximal_pairing(&word);
    let winding_segs = f.winding_segments();
    // (first segment, last segment, attachment circle) per nesting-maximal pair
    let mut collapses: Vec<(usize, usize, u32)> = gamma
        .maximal_pairs()
        .into_iter()
        .map(|(p, q)| (winding_segs[p], winding_segs[q], word.letter(p).index))
        .collect();
    collapses.sort();

    let mut breakpoints = vec![f.breakpoints[0].clone()];
    let mut segments: Vec<Segment> = Vec::new();
    let mut i = 0;
    let mut next = collapses.iter().peekable();
    while i < f.segments.len() {
        if let Some(&&(s, e, n)) = next.peek() {
            if s == i {
                segments.push(Segment::BaseArc { waypoints: vec![model.dense_point(n)?] });
                breakpoints.push(f.breakpoints[e + 1].clone());
                i = e + 1;
                next.next();
                continue;
            }
        }
        segments.push(f.segments[i].clone());
        breakpoints.push(f.breakpoints[i + 1].clone());
        i += 1;
    }
    Ok(merge_arcs(&ProperPath { breakpoints, segments }))
}

/// A maximal pairing-bound parameter interval with its witnessing pair.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaBoundInterval {
    pub span: (Rational, Rational),
    /// word positions of the witnessing pair
    pub pair: (usize, usize),
}

/// The maximal pairwise-disjoint family of maximal Γ-bound intervals: the
/// outer winding spans of the nesting-maximal pairs.
pub fn gamma_bound_intervals(
    f: &ProperPath,
    gamma: &NoncrossingPairing,
) -> Result<Vec<GammaBoundInterval>, PathError> {
    let word = word_of_path(f);
    let report = validate_pairing(gamma, &word)?;
    if !report.is_ok() {
        return Err(PairingError::Invalid(report).into());
    }
    let mut intervals: Vec<GammaBoundInterval> = gamma
        .maximal_pairs()
        .into_iter()
        .map(|(p, q)| GammaBoundInterval {
            span: (f.winding_span(p).unwrap().0, f.winding_span(q).unwrap().1),
            pair: (p, q),
        })
        .collect();
    intervals.sort_by(|x, y| x.span.0.cmp(&y.span.0));
    Ok(intervals)
}
