//! The earring space `E(X,D)`: a base space with a countable dense
//! enumeration, a circle of metric scale `1/n` attached at the n-th dense
//! point, the retraction onto the base, and the metric quotient collapsing
//! the base to a point.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("circle coordinate {0} outside [0,1)")]
    CoordinateOutOfRange(f64),
    #[error("circle index must be >= 1")]
    ZeroIndex,
    #[error("dense-point index {index} unknown in model `{model}`")]
    UnknownIndex { index: u32, model: String },
    #[error("point does not belong to model `{model}`")]
    ForeignPoint { model: String },
    #[error("diameter of the empty set is undefined")]
    EmptySet,
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("malformed point `{0}` (expected b:x,y or c:n:theta)")]
    ParsePoint(String),
    #[error("malformed model file: {0}")]
    ParseModel(String),
    #[error("distance matrix is not a metric: {0}")]
    NotAMetric(String),
}

/// A point of the base space `X`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BasePoint {
    Plane { x: f64, y: f64 },
    Discrete(usize),
}

impl BasePoint {
    pub fn plane(x: f64, y: f64) -> BasePoint {
        BasePoint::Plane { x, y }
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Plane { x, y } => write!(f, "b:{x},{y}"),
            BasePoint::Discrete(i) => write!(f, "b:{i}"),
        }
    }
}

/// A finite metric space given by an explicit distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteModel {
    pub name: String,
    distances: Vec<Vec<f64>>,
}

const METRIC_TOLERANCE: f64 = 1e-12;

impl FiniteModel {
    pub fn new(name: String, distances: Vec<Vec<f64>>) -> Result<FiniteModel, SpaceError> {
        let n = distances.len();
        if n == 0 || distances.iter().any(|row| row.len() != n) {
            return Err(SpaceError::ParseModel("matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            if distances[i][i].abs() > METRIC_TOLERANCE {
                return Err(SpaceError::NotAMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                if i != j && distances[i][j] <= 0.0 {
                    return Err(SpaceError::NotAMetric(format!("d({i},{j}) <= 0")));
                }
                if (distances[i][j] - distances[j][i]).abs() > METRIC_TOLERANCE {
                    return Err(SpaceError::NotAMetric(format!("d({i},{j}) != d({j},{i})")));
                }
                for k in 0..n {
                    if distances[i][k] > distances[i][j] + distances[j][k] + METRIC_TOLERANCE {
                        return Err(SpaceError::NotAMetric(format!(
                            "triangle fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteModel { name, distances })
    }

    /// File format: a `format: 1` header, a `name:` line, then one
    /// whitespace-separated matrix row per line.
    pub fn parse(text: &str) -> Result<FiniteModel, SpaceError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().unwrap_or_default().trim();
        if header != "format: 1" {
            return Err(SpaceError::ParseModel("missing `format: 1` header".into()));
        }
        let name_line = lines.next().unwrap_or_default().trim().to_owned();
        let name = name_line
            .strip_prefix("name:")
            .ok_or_else(|| SpaceError::ParseModel("missing `name:` line".into()))?
            .trim()
            .to_owned();
        let mut distances = Vec::new();
        for line in lines {
            let row: Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            distances
                .push(row.map_err(|e| SpaceError::ParseModel(format!("bad entry: {e}")))?);
        }
        FiniteModel::new(name, distances)
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

/// A base-space oracle together with its dense enumeration `d_1, d_2, ...`.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceModel {
    /// `[0,1]^2` with the Euclidean metric; dense points are the dyadic
    /// grid, refined level by level, row-major within a level.
    UnitSquare,
    /// The closed Euclidean unit disk; dyadic grid of `[-1,1]^2` filtered to
    /// the disk.
    UnitDisk,
    Finite(FiniteModel),
}

impl SpaceModel {
    pub fn by_name(name: &str) -> Result<SpaceModel, SpaceError> {
        match name {
            "unit-square" => Ok(SpaceModel::UnitSquare),
            "unit-disk" => Ok(SpaceModel::UnitDisk),
            other => Err(SpaceError::UnknownModel(other.to_owned())),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            SpaceModel::UnitSquare => "unit-square",
            SpaceModel::UnitDisk => "unit-disk",
            SpaceModel::Finite(m) => &m.name,
        }
    }

    /// Simply connected, locally simply connected, and convex; the models on
    /// which the null-homotopy decision and the contraction schedule apply.
    pub fn is_simply_connected_builtin(&self) -> bool {
        matches!(self, SpaceModel::UnitSquare | SpaceModel::UnitDisk)
    }

    pub fn base_distance(&self, p: &BasePoint, q: &BasePoint) -> Result<f64, SpaceError> {
        match (self, p, q) {
            (
                SpaceModel::UnitSquare | SpaceModel::UnitDisk,
                BasePoint::Plane { x: x1, y: y1 },
                BasePoint::Plane { x: x2, y: y2 },
            ) => Ok(((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt()),
            (SpaceModel::Finite(m), BasePoint::Discrete(i), BasePoint::Discrete(j))
                if *i < m.len() && *j < m.len() =>
            {
                Ok(m.distances[*i][*j])
            }
            _ => Err(SpaceError::ForeignPoint { model: self.name().to_owned() }),
        }
    }

    /// The n-th dense point, `n >= 1`.
    pub fn dense_point(&self, n: u32) -> Result<BasePoint, SpaceError> {
        if n == 0 {
            return Err(SpaceError::ZeroIndex);
        }
        match self {
            SpaceModel::UnitSquare => Ok(nth_dyadic(n, 0.0, 1.0, |_, _| true)),
            SpaceModel::UnitDisk => {
                Ok(nth_dyadic(n, -1.0, 1.0, |x, y| x * x + y * y <= 1.0))
            }
            SpaceModel::Finite(m) => {
                let index = (n - 1) as usize;
                if index < m.len() {
                    Ok(BasePoint::Discrete(index))
                } else {
                    Err(SpaceError::UnknownIndex { index: n, model: self.name().to_owned() })
                }
            }
        }
    }
}

/// Dyadic grid enumeration on `[lo, hi]^2`: level 0 lists all grid corners,
/// deeper levels list the points with an odd numerator, rows before columns.
fn nth_dyadic(n: u32, lo: f64, hi: f64, keep: impl Fn(f64, f64) -> bool) -> BasePoint {
    let mut remaining = n;
    let span = hi - lo;
    for level in 0u32.. {
        let cells = 1u64 << level;
        for j in 0..=cells {
            for i in 0..=cells {
                if level > 0 && i % 2 == 0 && j % 2 == 0 {
                    continue; // appeared at an earlier level
                }
                let x = lo + span * (i as f64) / (cells as f64);
                let y = lo + span * (j as f64) / (cells as f64);
                if !keep(x, y) {
                    continue;
                }
                remaining -= 1;
                if remaining == 0 {
                    return BasePoint::plane(x, y);
                }
            }
        }
    }
    unreachable!()
}

/// Arc metric on the unit-circumference circle; diameter 1/2.
pub fn circle_metric(theta1: f64, theta2: f64) -> Result<f64, SpaceError> {
    for theta in [theta1, theta2] {
        if !(0.0..1.0).contains(&theta) {
            return Err(SpaceError::CoordinateOutOfRange(theta));
        }
    }
    let gap = (theta1 - theta2).abs();
    Ok(gap.min(1.0 - gap))
}

/// A point of `E(X,D)`. The attachment point of each circle is identified
/// with its base point, so the canonical form of `Circle(n, 0)` is
/// `Base(d_n)`; circle coordinates are kept in `(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EPoint {
    Base(BasePoint),
    Circle { n: u32, theta: f64 },
}

impl EPoint {
    pub fn base(point: BasePoint) -> EPoint {
        EPoint::Base(point)
    }

    /// Canonicalizing constructor: `theta = 0` becomes the attachment point.
    pub fn circle(n: u32, theta: f64, model: &SpaceModel) -> Result<EPoint, SpaceError> {
        if n == 0 {
            return Err(SpaceError::ZeroIndex);
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(SpaceError::CoordinateOutOfRange(theta));
        }
        if theta == 0.0 {
            Ok(EPoint::Base(model.dense_point(n)?))
        } else {
            Ok(EPoint::Circle { n, theta })
        }
    }

    /// Point syntax `b:x,y` (or `b:i` for finite models) and `c:n:theta`.
    pub fn parse(text: &str, model: &SpaceModel) -> Result<EPoint, SpaceError> {
        let err = || SpaceError::ParsePoint(text.to_owned());
        if let Some(body) = text.strip_prefix("b:") {
            return match model {
                SpaceModel::Finite(_) => {
                    let i: usize = body.trim().parse().map_err(|_| err())?;
                    Ok(EPoint::Base(BasePoint::Discrete(i)))
                }
                _ => {
                    let (x, y) = body.split_once(',').ok_or_else(err)?;
                    let x: f64 = x.trim().parse().map_err(|_| err())?;
                    let y: f64 = y.trim().parse().map_err(|_| err())?;
                    Ok(EPoint::Base(BasePoint::plane(x, y)))
                }
            };
        }
        if let Some(body) = text.strip_prefix("c:") {
            let (n, theta) = body.split_once(':').ok_or_else(err)?;
            let n: u32 = n.trim().parse().map_err(|_| err())?;
            let theta: f64 = theta.trim().parse().map_err(|_| err())?;
            return EPoint::circle(n, theta, model);
        }
        Err(err())
    }
}

impl fmt::Display for EPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EPoint::Base(p) => write!(f, "{p}"),
            EPoint::Circle { n, theta } => write!(f, "c:{n}:{theta}"),
        }
    }
}

/// The metric of `E(X,D)`: within one attached circle the scaled arc metric,
/// otherwise the base distance plus both arc distances to the attachment
/// points.
pub fn distance(p: &EPoint, q: &EPoint, model: &SpaceModel) -> Result<f64, SpaceError> {
    let arc_to_base = |n: u32, theta: f64| -> Result<f64, SpaceError> {
        Ok(circle_metric(theta, 0.0)? / f64::from(n))
    };
    match (p, q) {
        (EPoint::Base(x), EPoint::Base(y)) => model.base_distance(x, y),
        (EPoint::Circle { n, theta: t1 }, EPoint::Circle { n: m, theta: t2 }) => {
            if n == m {
                Ok(circle_metric(*t1, *t2)? / f64::from(*n))
            } else {
                let dn = model.dense_point(*n)?;
                let dm = model.dense_point(*m)?;
                Ok(model.base_distance(&dn, &dm)? + arc_to_base(*n, *t1)? + arc_to_base(*m, *t2)?)
            }
        }
        (EPoint::Base(x), EPoint::Circle { n, theta })
        | (EPoint::Circle { n, theta }, EPoint::Base(x)) => {
            let dn = model.dense_point(*n)?;
            if *x == dn {
                arc_to_base(*n, *theta)
            } else {
                Ok(model.base_distance(x, &dn)? + arc_to_base(*n, *theta)?)
            }
        }
    }
}

/// `r(x, u) = x`.
pub fn retract(p: &EPoint, model: &SpaceModel) -> Result<BasePoint, SpaceError> {
    match p {
        EPoint::Base(x) => Ok(*x),
        EPoint::Circle { n, .. } => model.dense_point(*n),
    }
}

/// A point of the metric quotient: the collapsed base `*` or a circle point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HPoint {
    Star,
    Circle { n: u32, theta: f64 },
}

pub fn quotient(p: &EPoint) -> HPoint {
    match p {
        EPoint::Base(_) => HPoint::Star,
        EPoint::Circle { n, theta } => HPoint::Circle { n: *n, theta: *theta },
    }
}

pub fn quotient_distance(h1: &HPoint, h2: &HPoint) -> Result<f64, SpaceError> {
    let arc_to_star = |n: u32, theta: f64| -> Result<f64, SpaceError> {
        Ok(circle_metric(theta, 0.0)? / f64::from(n))
    };
    match (h1, h2) {
        (HPoint::Star, HPoint::Star) => Ok(0.0),
        (HPoint::Star, HPoint::Circle { n, theta })
        | (HPoint::Circle { n, theta }, HPoint::Star) => arc_to_star(*n, *theta),
        (HPoint::Circle { n, theta: t1 }, HPoint::Circle { n: m, theta: t2 }) => {
            if n == m {
                Ok(circle_metric(*t1, *t2)? / f64::from(*n))
            } else {
                Ok(arc_to_star(*n, *t1)? + arc_to_star(*m, *t2)?)
            }
        }
    }
}

/// Max pairwise distance over a nonempty finite set.
pub fn diam(points: &[EPoint], model: &SpaceModel) -> Result<f64, SpaceError> {
    if points.is_empty() {
        return Err(SpaceError::EmptySet);
    }
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(distance(p, q, model)?);
        }
    }
    Ok(best)
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use testutil::random_epoint;

    #[test]
    fn circle_metric_examples() {
        assert_eq!(circle_metric(0.0, 0.5).unwrap(), 0.5);
        assert_eq!(circle_metric(0.3, 0.3).unwrap(), 0.0);
        assert!((circle_metric(0.1, 0.9).unwrap() - 0.2).abs() < 1e-15);
        assert!(circle_metric(1.0, 0.0).is_err());
    }

    #[test]
    fn dense_enumeration_starts_at_the_corners() {
        let m = SpaceModel::UnitSquare;
        assert_eq!(m.dense_point(1).unwrap(), BasePoint::plane(0.0, 0.0));
        assert_eq!(m.dense_point(2).unwrap(), BasePoint::plane(1.0, 0.0));
        assert_eq!(m.dense_point(3).unwrap(), BasePoint::plane(0.0, 1.0));
        assert_eq!(m.dense_point(4).unwrap(), BasePoint::plane(1.0, 1.0));
        assert_eq!(m.dense_point(5).unwrap(), BasePoint::plane(0.5, 0.0));
        // pairwise distinct over a prefix
        let points: Vec<_> = (1..=64).map(|n| m.dense_point(n).unwrap()).collect();
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn disk_points_stay_in_the_disk() {
        let m = SpaceModel::UnitDisk;
        for n in 1..=64 {
            let BasePoint::Plane { x, y } = m.dense_point(n).unwrap() else { panic!() };
            assert!(x * x + y * y <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn distance_examples() {
        let m = SpaceModel::UnitSquare;
        let x = EPoint::Base(BasePoint::plane(0.3, 0.7));
        assert_eq!(distance(&x, &x, &m).unwrap(), 0.0);

        let p = EPoint::circle(3, 0.2, &m).unwrap();
        let q = EPoint::circle(3, 0.4, &m).unwrap();
        assert!((distance(&p, &q, &m).unwrap() - 0.2 / 3.0).abs() < 1e-15);

        // d1 = (0,0), d2 = (1,0)
        let p = EPoint::circle(1, 0.5, &m).unwrap();
        let q = EPoint::circle(2, 0.5, &m).unwrap();
        assert!((distance(&p, &q, &m).unwrap() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn attachment_point_is_canonicalized() {
        let m = SpaceModel::UnitSquare;
        let p = EPoint::circle(1, 0.0, &m).unwrap();
        assert_eq!(p, EPoint::Base(BasePoint::plane(0.0, 0.0)));
        assert_eq!(distance(&p, &EPoint::circle(1, 0.5, &m).unwrap(), &m).unwrap(), 0.5);
    }

    #[test]
    fn retract_examples() {
        let m = SpaceModel::UnitSquare;
        let x = BasePoint::plane(0.2, 0.9);
        assert_eq!(retract(&EPoint::Base(x), &m).unwrap(), x);
        assert_eq!(
            retract(&EPoint::circle(3, 0.25, &m).unwrap(), &m).unwrap(),
            m.dense_point(3).unwrap()
        );
    }

    #[test]
    fn quotient_examples() {
        let m = SpaceModel::UnitSquare;
        assert_eq!(quotient(&EPoint::Base(BasePoint::plane(0.5, 0.5))), HPoint::Star);
        let h = quotient(&EPoint::circle(4, 0.5, &m).unwrap());
        assert!((quotient_distance(&HPoint::Star, &h).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(
            quotient_distance(
                &HPoint::Circle { n: 1, theta: 0.25 },
                &HPoint::Circle { n: 2, theta: 0.25 }
            )
            .unwrap(),
            0.375
        );
    }

    #[test]
    fn diam_examples() {
        let m = SpaceModel::UnitSquare;
        let single = [EPoint::Base(BasePoint::plane(0.1, 0.1))];
        assert_eq!(diam(&single, &m).unwrap(), 0.0);

        let antipodal = [
            m.dense_point(1).map(EPoint::Base).unwrap(),
            EPoint::circle(1, 0.5, &m).unwrap(),
        ];
        assert_eq!(diam(&antipodal, &m).unwrap(), 0.5);

        assert_eq!(diam(&[], &m), Err(SpaceError::EmptySet));

        let mut bigger = antipodal.to_vec();
        bigger.push(EPoint::Base(BasePoint::plane(1.0, 1.0)));
        assert!(diam(&antipodal, &m).unwrap() <= diam(&bigger, &m).unwrap());
    }

    #[test]
    fn metric_axioms_sampled() {
        for model in [SpaceModel::UnitSquare, SpaceModel::UnitDisk] {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..2000 {
                let p = random_epoint(&mut rng, &model);
                let q = random_epoint(&mut rng, &model);
                let r = random_epoint(&mut rng, &model);
                let pq = distance(&p, &q, &model).unwrap();
                let qp = distance(&q, &p, &model).unwrap();
                let pr = distance(&p, &r, &model).unwrap();
                let qr = distance(&q, &r, &model).unwrap();
                assert!(pq >= 0.0);
                assert!((pq - qp).abs() <= 1e-12);
                assert!(pr <= pq + qr + 1e-12, "triangle: {p:?} {q:?} {r:?}");
                assert_eq!(distance(&p, &p, &model).unwrap(), 0.0);
                if pq == 0.0 {
                    assert_eq!(p, q);
                }
                // retraction is 1-Lipschitz
                let rp = retract(&p, &model).unwrap();
                let rq = retract(&q, &model).unwrap();
                assert!(model.base_distance(&rp, &rq).unwrap() <= pq + 1e-12);
                // quotient is nonexpansive and a metric on samples
                let hp = quotient(&p);
                let hq = quotient(&q);
                let hr = quotient(&r);
                let hpq = quotient_distance(&hp, &hq).unwrap();
                assert!(hpq <= pq + 1e-12);
                assert!((hpq - quotient_distance(&hq, &hp).unwrap()).abs() <= 1e-12);
                assert!(
                    quotient_distance(&hp, &hr).unwrap()
                        <= hpq + quotient_distance(&hq, &hr).unwrap() + 1e-12
                );
            }
        }
    }

    #[test]
    fn finite_model_validation() {
        let text = "format: 1\nname: triangle\n0 1 2\n1 0 1.5\n2 1.5 0\n";
        let m = FiniteModel::parse(text).unwrap();
        assert_eq!(m.name, "triangle");
        let model = SpaceModel::Finite(m);
        assert_eq!(
            model
                .base_distance(&BasePoint::Discrete(0), &BasePoint::Discrete(2))
                .unwrap(),
            2.0
        );
        assert_eq!(model.dense_point(2).unwrap(), BasePoint::Discrete(1));
        assert!(model.dense_point(4).is_err());

        let asymmetric = "format: 1\nname: bad\n0 1\n2 0\n";
        assert!(matches!(FiniteModel::parse(asymmetric), Err(SpaceError::NotAMetric(_))));
        let no_triangle = "format: 1\nname: bad\n0 1 5\n1 0 1\n5 1 0\n";
        assert!(matches!(FiniteModel::parse(no_triangle), Err(SpaceError::NotAMetric(_))));
    }

    #[test]
    fn point_parsing() {
        let m = SpaceModel::UnitSquare;
        assert_eq!(
            EPoint::parse("b:0.2,0.3", &m).unwrap(),
            EPoint::Base(BasePoint::plane(0.2, 0.3))
        );
        assert_eq!(
            EPoint::parse("c:1:0.5", &m).unwrap(),
            EPoint::Circle { n: 1, theta: 0.5 }
        );
        assert!(EPoint::parse("c:0:0.5", &m).is_err());
        assert!(EPoint::parse("q:1", &m).is_err());
    }
}
