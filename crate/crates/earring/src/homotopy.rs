//! Punctured-homotopy certificates and the Case 0 / Case 1 decomposition of
//! a trivial loop: a finite tree of parameter intervals, each certified
//! contractible relative to its children, with exact-rational size budgets
//! and an independent verifier that re-derives every clause.

use crate::pairing::{validate_pairing, NoncrossingPairing, PairingError};
use crate::path::{word_of_path, PathError, ProperPath};
use crate::rat::{format_rational, int, Rational};
use crate::space::{distance, EPoint, SpaceModel};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HomotopyError {
    #[error("scale parameter must be positive")]
    NonPositiveScale,
    #[error("operation requires a loop (start = end)")]
    NotALoop,
    #[error("pairing does not completely pair the loop's word")]
    IncompletePairing,
    #[error("operation not supported on model `{model}`")]
    UnsupportedModel { model: String },
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("serialization failed: {0}")]
    Serialize(String),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

/// A gap `δ₀` such that parameter gaps below it map to image gaps below
/// `δ/2`, from exact per-segment Lipschitz constants. A constant path puts
/// no constraint, so its `δ₀` is the whole parameter length.
pub fn modulus_delta0(
    f: &ProperPath,
    delta: &Rational,
    model: &SpaceModel,
) -> Result<Rational, HomotopyError> {
    if !delta.is_positive() {
        return Err(HomotopyError::NonPositiveScale);
    }
    let lip = f.max_lipschitz(model)?;
    if lip.is_zero() {
        let (a, b) = f.domain();
        Ok(b.clone() - a)
    } else {
        Ok(delta / (int(2) * lip))
    }
}

/// The contraction scale used at neighborhood size `ε` on the built-in
/// convex models, where local contractions need no extra shrinking: `ε/3`.
pub fn delta_schedule(epsilon: &Rational, model: &SpaceModel) -> Result<Rational, HomotopyError> {
    if !model.is_simply_connected_builtin() {
        return Err(HomotopyError::UnsupportedModel { model: model.name().to_owned() });
    }
    if !epsilon.is_positive() {
        return Err(HomotopyError::NonPositiveScale);
    }
    Ok(epsilon / int(3))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub s: (Rational, Rational),
    pub t: (Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCurve {
    Bottom,
    Left,
    Right,
    Top,
    Hole(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub curve: BoundaryCurve,
    /// position along the curve (s for horizontal edges, t for vertical)
    pub at: Rational,
    pub value: EPoint,
}

/// Recorded boundary data of a punctured homotopy: a rectangle, disjoint
/// open holes, and sampled values on the boundary curves. The bottom and
/// both sides must carry one common constant; each hole boundary must carry
/// its own constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuncturedCertificate {
    pub rectangle: Rect,
    pub holes: Vec<Rect>,
    pub samples: Vec<BoundarySample>,
    /// diameter of the recorded values
    pub size: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub ok: bool,
    /// first violating sample, when not ok
    pub witness: Option<BoundarySample>,
}

const VALUE_TOLERANCE: f64 = 1e-9;

fn rects_overlap(a: &Rect, b: &Rect) -> bool {
    a.s.0 < b.s.1 && b.s.0 < a.s.1 && a.t.0 < b.t.1 && b.t.0 < a.t.1
}

fn rect_contains(outer: &Rect, inner: &Rect) -> bool {
    outer.s.0 <= inner.s.0 && inner.s.1 <= outer.s.1 && outer.t.0 <= inner.t.0 && inner.t.1 <= outer.t.1
}

/// Checks the constant-boundary condition: bottom, left, and right edges
/// carry one common value, and every hole boundary is internally constant.
pub fn check_bound_for_constant(
    cert: &PuncturedCertificate,
    model: &SpaceModel,
) -> Result<BoundCheck, HomotopyError> {
    for (i, hole) in cert.holes.iter().enumerate() {
        if !rect_contains(&cert.rectangle, hole) {
            return Err(HomotopyError::MalformedCertificate(format!(
                "hole {i} leaves the rectangle"
            )));
        }
        for (j, other) in cert.holes.iter().enumerate().skip(i + 1) {
            if rects_overlap(hole, other) {
                return Err(HomotopyError::MalformedCertificate(format!(
                    "holes {i} and {j} overlap"
                )));
            }
        }
    }
    let on = |curve: BoundaryCurve| -> Vec<&BoundarySample> {
        cert.samples.iter().filter(|s| s.curve == curve).collect()
    };
    let mut required = vec![BoundaryCurve::Bottom, BoundaryCurve::Left, BoundaryCurve::Right];
    required.extend((0..cert.holes.len()).map(BoundaryCurve::Hole));
    for curve in &required {
        if on(curve.clone()).is_empty() {
            return Err(HomotopyError::MalformedCertificate(format!(
                "no samples on {curve:?}"
            )));
        }
    }

    let near = |p: &EPoint, q: &EPoint| -> Result<bool, HomotopyError> {
        Ok(distance(p, q, model).map_err(PathError::from)? <= VALUE_TOLERANCE)
    };
    let anchor = on(BoundaryCurve::Bottom)[0].value;
    for sample in cert.samples.iter().filter(|s| {
        matches!(s.curve, BoundaryCurve::Bottom | BoundaryCurve::Left | BoundaryCurve::Right)
    }) {
        if !near(&sample.value, &anchor)? {
            return Ok(BoundCheck { ok: false, witness: Some(sample.clone()) });
        }
    }
    for i in 0..cert.holes.len() {
        let curve = BoundaryCurve::Hole(i);
        let hole_anchor = on(curve.clone())[0].value;
        for sample in on(curve) {
            if !near(&sample.value, &hole_anchor)? {
                return Ok(BoundCheck { ok: false, witness: Some(sample.clone()) });
            }
        }
    }
    Ok(BoundCheck { ok: true, witness: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CaseTag {
    BaseCase,
    FirstProcedure,
    Case0,
    Case1,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CaseTag::BaseCase => "base-case",
            CaseTag::FirstProcedure => "first-procedure",
            CaseTag::Case0 => "case0",
            CaseTag::Case1 => "case1",
        };
        write!(f, "{name}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Markers {
    None,
    /// winding spans `(u0,v0)`, `(u1,v1)` of the selected pair
    Case0 { first: (Rational, Rational), second: (Rational, Rational) },
    Case1 { u_star: Rational, v_star: Rational, bounds: Vec<(Rational, Rational)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionNode {
    pub interval: (Rational, Rational),
    pub case_tag: CaseTag,
    /// smallest m with interval length <= m·δ₀ (clamped to >= 2)
    pub budget_m: u64,
    pub markers: Markers,
    pub children: Vec<DecompositionNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTree {
    pub delta: Rational,
    pub delta0: Rational,
    pub root: DecompositionNode,
}

struct Ctx<'a> {
    f: &'a ProperPath,
    model: &'a SpaceModel,
    delta: &'a Rational,
    delta0: Rational,
    /// winding parameter spans by word position
    spans: Vec<(Rational, Rational)>,
    pairs: Vec<(usize, usize)>,
}

impl<'a> Ctx<'a> {
    fn new(
        f: &'a ProperPath,
        gamma: &NoncrossingPairing,
        delta: &'a Rational,
        model: &'a SpaceModel,
    ) -> Result<Ctx<'a>, HomotopyError> {
        let word = word_of_path(f);
        let report = validate_pairing(gamma, &word)?;
        if !report.is_ok() {
            return Err(PairingError::Invalid(report).into());
        }
        if !gamma.is_complete(&word) {
            return Err(HomotopyError::IncompletePairing);
        }
        let delta0 = modulus_delta0(f, delta, model)?;
        let spans = (0..word.len()).map(|p| f.winding_span(p).unwrap()).collect();
        Ok(Ctx { f, model, delta, delta0, spans, pairs: gamma.pairs().collect() })
    }

    fn budget(&self, length: &Rational) -> u64 {
        let m = (length / &self.delta0).floor().to_integer().to_u64().unwrap_or(u64::MAX - 1) + 1;
        m.max(2)
    }

    fn diameter_bound(&self, lo: &Rational, hi: &Rational) -> Result<Rational, HomotopyError> {
        Ok(self.f.diameter_bound(lo, hi, self.model)?)
    }

    /// Γ-pairs both of whose winding spans lie inside `[lo, hi]`.
    fn pairs_within(&self, lo: &Rational, hi: &Rational) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .copied()
            .filter(|&(p, q)| self.spans[p].0 >= *lo && self.spans[q].1 <= *hi)
            .collect()
    }

    /// Pairs within `[lo, hi]` not nested inside another pair within it;
    /// their outer spans are the maximal Γ-bound intervals of the piece.
    fn maximal_pairs_within(&self, lo: &Rational, hi: &Rational) -> Vec<(usize, usize)> {
        let within = self.pairs_within(lo, hi);
        let mut maximal: Vec<(usize, usize)> = within
            .iter()
            .copied()
            .filter(|&(p, q)| !within.iter().any(|&(x, y)| x < p && q < y))
            .collect();
        maximal.sort();
        maximal
    }

    fn bound_interval(&self, pair: (usize, usize)) -> (Rational, Rational) {
        (self.spans[pair.0].0.clone(), self.spans[pair.1].1.clone())
    }

    /// Pairs within the piece whose first winding starts within δ₀ of `a`
    /// and whose second winding ends within δ₀ of `b`. The piece's own
    /// witnessing pair always qualifies, so this is never empty on a
    /// maximal-bound piece.
    fn qualifying_pairs(&self, a: &Rational, b: &Rational) -> Vec<(usize, usize)> {
        let lo_cut = a.clone() + &self.delta0;
        let hi_cut = b.clone() - &self.delta0;
        self.pairs_within(a, b)
            .into_iter()
            .filter(|&(p, q)| self.spans[p].0 < lo_cut && self.spans[q].1 > hi_cut)
            .collect()
    }

    /// Deterministic Case 0 selection: minimal `u0`, then maximal `v1`.
    fn case0_choice(&self, a: &Rational, b: &Rational) -> Option<(usize, usize)> {
        let lo_cut = a.clone() + &self.delta0;
        let hi_cut = b.clone() - &self.delta0;
        self.qualifying_pairs(a, b)
            .into_iter()
            .filter(|&(p, q)| self.spans[p].1 >= lo_cut || self.spans[q].0 <= hi_cut)
            .min_by(|&(p1, q1), &(p2, q2)| {
                self.spans[p1]
                    .0
                    .cmp(&self.spans[p2].0)
                    .then(self.spans[q2].1.cmp(&self.spans[q1].1))
            })
    }

    /// Case 1 markers: innermost extent reached by qualifying pairs.
    fn case1_markers(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let qualifying = self.qualifying_pairs(a, b);
        let u_star = qualifying.iter().map(|&(p, _)| self.spans[p].1.clone()).max().unwrap();
        let v_star = qualifying.iter().map(|&(_, q)| self.spans[q].0.clone()).min().unwrap();
        (u_star, v_star)
    }

    /// Piece whose word is completely paired within it.
    fn expand_closed(&self, lo: Rational, hi: Rational) -> Result<DecompositionNode, HomotopyError> {
        let length = hi.clone() - &lo;
        let m = self.budget(&length);
        if self.diameter_bound(&lo, &hi)? < *self.delta {
            return Ok(DecompositionNode {
                interval: (lo, hi),
                case_tag: CaseTag::BaseCase,
                budget_m: m,
                markers: Markers::None,
                children: Vec::new(),
            });
        }
        let children = self
            .maximal_pairs_within(&lo, &hi)
            .into_iter()
            .map(|pair| self.expand_bound(pair))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DecompositionNode {
            interval: (lo, hi),
            case_tag: CaseTag::FirstProcedure,
            budget_m: m,
            markers: Markers::None,
            children,
        })
    }

    /// Piece that is the outer span of one maximal Γ-bound pair.
    fn expand_bound(&self, pair: (usize, usize)) -> Result<DecompositionNode, HomotopyError> {
        let (a, b) = self.bound_interval(pair);
        let length = b.clone() - &a;
        let m = self.budget(&length);
        if self.diameter_bound(&a, &b)? < *self.delta {
            return Ok(DecompositionNode {
                interval: (a, b),
                case_tag: CaseTag::BaseCase,
                budget_m: m,
                markers: Markers::None,
                children: Vec::new(),
            });
        }
        if let Some((p, q)) = self.case0_choice(&a, &b) {
            let first = self.spans[p].clone();
            let second = self.spans[q].clone();
            let child = self.expand_closed(first.1.clone(), second.0.clone())?;
            return Ok(DecompositionNode {
                interval: (a, b),
                case_tag: CaseTag::Case0,
                budget_m: m,
                markers: Markers::Case0 { first, second },
                children: vec![child],
            });
        }
        let (u_star, v_star) = self.case1_markers(&a, &b);
        let bounds_pairs = self.maximal_pairs_within(&u_star, &v_star);
        let bounds = bounds_pairs.iter().map(|&p| self.bound_interval(p)).collect();
        let children = bounds_pairs
            .into_iter()
            .map(|p| self.expand_bound(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DecompositionNode {
            interval: (a, b),
            case_tag: CaseTag::Case1,
            budget_m: m,
            markers: Markers::Case1 { u_star, v_star, bounds },
            children,
        })
    }
}

/// Builds the decomposition tree of a trivial loop: the whole domain is
/// split along maximal Γ-bound intervals, every oversized bound piece is
/// shrunk through Case 0 or Case 1 (each cutting at least δ₀ off the
/// parameter length), and pieces whose image-diameter bound drops below δ
/// become leaves.
pub fn build_decomposition(
    f: &ProperPath,
    gamma: &NoncrossingPairing,
    delta: &Rational,
    model: &SpaceModel,
) -> Result<DecompositionTree, HomotopyError> {
    f.validate(model)?;
    if !f.is_loop(model)? {
        return Err(HomotopyError::NotALoop);
    }
    let ctx = Ctx::new(f, gamma, delta, model)?;
    let (a, b) = f.domain();
    let root = ctx.expand_closed(a.clone(), b.clone())?;
    Ok(DecompositionTree { delta: delta.clone(), delta0: ctx.delta0, root })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            writeln!(f, "all clauses pass")
        } else {
            for failure in &self.failures {
                writeln!(f, "FAIL {failure}")?;
            }
            Ok(())
        }
    }
}

/// Re-derives every clause the builder promises: interval containment and
/// disjointness, budget formulas and monotonicity, first-procedure children
/// matching the recomputed maximal Γ-bounds, Case 0 pair selection and the
/// exact length inequality, Case 1 markers and bound lists, Γ-closure of
/// middles, and leaf diameter bounds.
pub fn verify_decomposition(
    tree: &DecompositionTree,
    f: &ProperPath,
    gamma: &NoncrossingPairing,
    delta: &Rational,
    model: &SpaceModel,
) -> Result<VerifyReport, HomotopyError> {
    let mut report = VerifyReport::default();
    let ctx = match Ctx::new(f, gamma, delta, model) {
        Ok(ctx) => ctx,
        Err(e) => {
            report.failures.push(format!("root: inputs rejected: {e}"));
            return Ok(report);
        }
    };
    if tree.delta != *delta {
        report.failures.push(format!(
            "root: recorded delta {} differs from {}",
            format_rational(&tree.delta),
            format_rational(delta)
        ));
    }
    if tree.delta0 != ctx.delta0 {
        report.failures.push(format!(
            "root: recorded delta0 {} differs from recomputed {}",
            format_rational(&tree.delta0),
            format_rational(&ctx.delta0)
        ));
    }
    let (a, b) = f.domain();
    if tree.root.interval != (a.clone(), b.clone()) {
        report.failures.push("root: interval is not the loop domain".to_owned());
    }
    verify_node(&ctx, &tree.root, None, "root", &mut report)?;
    Ok(report)
}

fn verify_node(
    ctx: &Ctx<'_>,
    node: &DecompositionNode,
    parent: Option<(&DecompositionNode, bool)>, // (parent, edge is a Case edge)
    label: &str,
    report: &mut VerifyReport,
) -> Result<(), HomotopyError> {
    let fail = |report: &mut VerifyReport, msg: String| report.failures.push(format!("{label}: {msg}"));
    let (lo, hi) = &node.interval;
    if lo > hi {
        fail(report, "interval is reversed".to_owned());
        return Ok(());
    }
    let length = hi.clone() - lo;

    if let Some((p, case_edge)) = parent {
        let (plo, phi) = &p.interval;
        if lo < plo || hi > phi {
            fail(report, "interval leaves the parent interval".to_owned());
        }
        if case_edge {
            if node.budget_m >= p.budget_m {
                fail(
                    report,
                    format!("budget must drop across a case edge ({} >= {})", node.budget_m, p.budget_m),
                );
            }
        } else if node.budget_m > p.budget_m {
            fail(report, "budget grows across a first-procedure edge".to_owned());
        }
    }
    if node.budget_m != ctx.budget(&length) {
        fail(
            report,
            format!("budget {} differs from recomputed {}", node.budget_m, ctx.budget(&length)),
        );
    }
    let m_rat = Rational::from_integer(num_bigint::BigInt::from(node.budget_m));
    if length > m_rat * &ctx.delta0 {
        fail(report, "interval length exceeds m·δ₀".to_owned());
    }
    // children: ordered, disjoint, inside the node
    for w in node.children.windows(2) {
        if w[1].interval.0 < w[0].interval.1 {
            fail(report, "children overlap or are out of order".to_owned());
        }
    }

    let diam = match ctx.diameter_bound(lo, hi) {
        Ok(d) => d,
        Err(_) => {
            fail(report, "interval leaves the path domain".to_owned());
            return Ok(());
        }
    };
    match node.case_tag {
        CaseTag::BaseCase => {
            if !node.children.is_empty() {
                fail(report, "base-case leaf has children".to_owned());
            }
            if diam >= *ctx.delta {
                fail(report, "leaf diameter bound is not below δ".to_owned());
            }
            if node.markers != Markers::None {
                fail(report, "base-case leaf carries markers".to_owned());
            }
        }
        CaseTag::FirstProcedure => {
            if node.markers != Markers::None {
                fail(report, "first-procedure node carries markers".to_owned());
            }
            if diam < *ctx.delta {
                fail(report, "first-procedure node is small enough to be a leaf".to_owned());
            }
            let expected: Vec<(Rational, Rational)> = ctx
                .maximal_pairs_within(lo, hi)
                .into_iter()
                .map(|p| ctx.bound_interval(p))
                .collect();
            let got: Vec<(Rational, Rational)> =
                node.children.iter().map(|c| c.interval.clone()).collect();
            if expected != got {
                fail(report, "children do not match the maximal Γ-bound intervals".to_owned());
            }
            for child in &node.children {
                if child.case_tag == CaseTag::FirstProcedure {
                    fail(report, "first-procedure child of a first-procedure node".to_owned());
                }
            }
        }
        CaseTag::Case0 => {
            let Markers::Case0 { first, second } = &node.markers else {
                fail(report, "case0 node lacks case0 markers".to_owned());
                return Ok(());
            };
            match ctx.case0_choice(lo, hi) {
                None => fail(report, "no pair satisfies the case0 side condition here".to_owned()),
                Some((p, q)) => {
                    if ctx.spans[p] != *first || ctx.spans[q] != *second {
                        fail(report, "case0 markers differ from the selected pair".to_owned());
                    }
                }
            }
            let (v0, u1) = (&first.1, &second.0);
            if u1.clone() - v0 > length.clone() - &ctx.delta0 {
                fail(report, "case0 middle is not shorter by δ₀".to_owned());
            }
            if node.children.len() != 1 {
                fail(report, "case0 node must have exactly the middle child".to_owned());
            } else {
                let child = &node.children[0];
                if child.interval != (v0.clone(), u1.clone()) {
                    fail(report, "case0 child interval is not [v0,u1]".to_owned());
                }
                if !matches!(child.case_tag, CaseTag::FirstProcedure | CaseTag::BaseCase) {
                    fail(report, "case0 child must restart the first procedure".to_owned());
                }
                // middle closed under Γ
                for &(p, q) in &ctx.pairs {
                    let p_in = ctx.spans[p].0 >= *v0 && ctx.spans[p].1 <= *u1;
                    let q_in = ctx.spans[q].0 >= *v0 && ctx.spans[q].1 <= *u1;
                    if p_in != q_in {
                        fail(report, "case0 middle word is not closed under Γ".to_owned());
                        break;
                    }
                }
            }
        }
        CaseTag::Case1 => {
            let Markers::Case1 { u_star, v_star, bounds } = &node.markers else {
                fail(report, "case1 node lacks case1 markers".to_owned());
                return Ok(());
            };
            if ctx.case0_choice(lo, hi).is_some() {
                fail(report, "a case0 pair exists, so case1 does not apply".to_owned());
            }
            if ctx.qualifying_pairs(lo, hi).is_empty() {
                fail(report, "no qualifying pair on a case1 node".to_owned());
            } else {
                let (u, v) = ctx.case1_markers(lo, hi);
                if (u_star, v_star) != (&u, &v) {
                    fail(report, "case1 markers differ from the recomputed u*, v*".to_owned());
                }
            }
            if u_star > v_star {
                fail(report, "case1 markers violate u* <= v*".to_owned());
            }
            let expected: Vec<(Rational, Rational)> = ctx
                .maximal_pairs_within(u_star, v_star)
                .into_iter()
                .map(|p| ctx.bound_interval(p))
                .collect();
            let got: Vec<(Rational, Rational)> =
                node.children.iter().map(|c| c.interval.clone()).collect();
            if expected != got || *bounds != got {
                fail(report, "case1 bound list does not match the maximal Γ-bounds in [u*,v*]".to_owned());
            }
            for child in &node.children {
                let clen = child.interval.1.clone() - &child.interval.0;
                if clen > length.clone() - &ctx.delta0 {
                    fail(report, "case1 child is not shorter by δ₀".to_owned());
                }
                if child.case_tag == CaseTag::FirstProcedure {
                    fail(report, "case1 children are bound pieces, not first-procedure".to_owned());
                }
            }
        }
    }

    let case_edge = matches!(node.case_tag, CaseTag::Case0 | CaseTag::Case1);
    for (i, child) in node.children.iter().enumerate() {
        verify_node(ctx, child, Some((node, case_edge)), &format!("{label}.{i}"), report)?;
    }
    Ok(())
}

/// Boundary certificate of one tree node: the piece contracts on the
/// rectangle `interval × [0,1]` with one hole per child above `t = 1/2`;
/// bottom and sides sit at the piece's common endpoint value, hole sides at
/// each child's attachment value, and the top samples the path itself.
pub fn node_certificate(
    f: &ProperPath,
    node: &DecompositionNode,
    model: &SpaceModel,
    samples_per_edge: usize,
) -> Result<PuncturedCertificate, HomotopyError> {
    let k = samples_per_edge.max(2);
    let (lo, hi) = &node.interval;
    let rectangle = Rect { s: (lo.clone(), hi.clone()), t: (int(0), int(1)) };
    let half = crate::rat::ratio(1, 2);
    let holes: Vec<Rect> = node
        .children
        .iter()
        .map(|c| Rect { s: c.interval.clone(), t: (half.clone(), int(1)) })
        .collect();
    let anchor = f.eval(lo, model)?;
    let mut samples = Vec::new();
    let grid = |a: &Rational, b: &Rational, i: usize| {
        a.clone() + (b.clone() - a) * crate::rat::ratio(i as i64, (k - 1) as i64)
    };
    for i in 0..k {
        samples.push(BoundarySample {
            curve: BoundaryCurve::Bottom,
            at: grid(lo, hi, i),
            value: anchor,
        });
        let t = grid(&int(0), &int(1), i);
        samples.push(BoundarySample { curve: BoundaryCurve::Left, at: t.clone(), value: anchor });
        samples.push(BoundarySample { curve: BoundaryCurve::Right, at: t, value: anchor });
        let s = grid(lo, hi, i);
        let value = f.eval(&s, model)?;
        samples.push(BoundarySample { curve: BoundaryCurve::Top, at: s, value });
    }
    for (h, child) in node.children.iter().enumerate() {
        let value = f.eval(&child.interval.0, model)?;
        for i in 0..k {
            samples.push(BoundarySample {
                curve: BoundaryCurve::Hole(h),
                at: grid(&half, &int(1), i),
                value,
            });
        }
    }
    let mut size = 0.0_f64;
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            size = size.max(distance(&a.value, &b.value, model).map_err(PathError::from)?);
        }
    }
    Ok(PuncturedCertificate { rectangle, holes, samples, size })
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    format: u32,
    #[serde(flatten)]
    tree: DecompositionTree,
}

pub fn tree_to_json(tree: &DecompositionTree) -> Result<String, HomotopyError> {
    serde_json::to_string_pretty(&TreeFile { format: 1, tree: tree.clone() })
        .map_err(|e| HomotopyError::Serialize(e.to_string()))
}

pub fn tree_from_json(text: &str) -> Result<DecompositionTree, HomotopyError> {
    let file: TreeFile =
        serde_json::from_str(text).map_err(|e| HomotopyError::Serialize(e.to_string()))?;
    if file.format != 1 {
        return Err(HomotopyError::Serialize(format!("unsupported format {}", file.format)));
    }
    Ok(file.tree)
}

impl DecompositionNode {
    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        write!(
            f,
            "{pad}[{}, {}] {} m={}",
            format_rational(&self.interval.0),
            format_rational(&self.interval.1),
            self.case_tag,
            self.budget_m
        )?;
        match &self.markers {
            Markers::None => {}
            Markers::Case0 { first, second } => {
                write!(
                    f,
                    " pair=({},{})x({},{})",
                    format_rational(&first.0),
                    format_rational(&first.1),
                    format_rational(&second.0),
                    format_rational(&second.1)
                )?;
            }
            Markers::Case1 { u_star, v_star, .. } => {
                write!(f, " u*={} v*={}", format_rational(u_star), format_rational(v_star))?;
            }
        }
        writeln!(f)?;
        for child in &self.children {
            child.fmt_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for DecompositionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "delta={} delta0={}",
            format_rational(&self.delta),
            format_rational(&self.delta0)
        )?;
        self.root.fmt_indented(f, 0)
    }
}
