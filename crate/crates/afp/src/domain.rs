//! Convex domains with exactly decidable membership.
//!
//! Finite-dimensional domains (boxes and bounded polytopes) also know how to
//! produce a deterministic sampling grid, walked center-first so that
//! fixed-point searches meet the interesting region early. The two
//! infinite-dimensional domains only answer membership questions.

use crate::rational::{serde_rational, Rational};
use crate::vector::{Index, SparseVector};
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }
}

// JSON form: a two-element array ["lo", "hi"] of rational strings.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use crate::rational::format_rational;
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use crate::rational::parse_rational;
        let [lo, hi] = <[String; 2]>::deserialize(de)?;
        let lo = parse_rational(&lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&hi).map_err(D::Error::custom)?;
        if lo > hi {
            return Err(D::Error::custom("interval with lo > hi"));
        }
        Ok(Interval { lo, hi })
    }
}

/// Half-space `normal . x <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpace {
    pub normal: SparseVector,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Product of closed intervals on coordinates `1..=intervals.len()`.
    Box { intervals: Vec<Interval> },
    /// Intersection of half-spaces with a bounding box on coordinates
    /// `1..=dim`; the box is part of the definition, which keeps the set
    /// bounded and the grid finite.
    Polytope {
        dim: usize,
        inequalities: Vec<HalfSpace>,
        bounding_box: Vec<Interval>,
    },
    /// Nonnegative vectors with total mass exactly 1, any support.
    ProbabilitySimplex,
    /// Nonnegative vectors with l1 norm at most 1, any support.
    PositiveUnitBall,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("invalid domain: {0}")]
    Invalid(String),
    #[error("domain kind {0:?} has no finite sampling grid")]
    NotSampleable(&'static str),
    #[error("grid would have {points} points (cap {cap})")]
    GridTooLarge { points: u128, cap: u128 },
}

const GRID_CAP: u128 = 1 << 21;

impl Domain {
    pub fn unit_box(dim: usize) -> Self {
        Domain::Box {
            intervals: vec![Interval::new(Rational::zero(), Rational::one()); dim],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Box { .. } => "box",
            Domain::Polytope { .. } => "polytope",
            Domain::ProbabilitySimplex => "probability_simplex",
            Domain::PositiveUnitBall => "positive_unit_ball",
        }
    }

    /// Ambient dimension for the finite-dimensional kinds.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Domain::Box { intervals } => Some(intervals.len()),
            Domain::Polytope { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        match self {
            Domain::Box { intervals } => {
                if intervals.is_empty() {
                    return Err(DomainError::Invalid("box needs at least one axis".into()));
                }
                for iv in intervals {
                    if iv.lo > iv.hi {
                        return Err(DomainError::Invalid("interval with lo > hi".into()));
                    }
                }
                Ok(())
            }
            Domain::Polytope {
                dim,
                inequalities,
                bounding_box,
            } => {
                if *dim == 0 {
                    return Err(DomainError::Invalid("polytope dimension must be >= 1".into()));
                }
                if bounding_box.len() != *dim {
                    return Err(DomainError::Invalid(format!(
                        "bounding box has {} axes for dimension {dim}",
                        bounding_box.len()
                    )));
                }
                for iv in bounding_box {
                    if iv.lo > iv.hi {
                        return Err(DomainError::Invalid("interval with lo > hi".into()));
                    }
                }
                for hs in inequalities {
                    if let Some(max) = hs.normal.max_index() {
                        if max > *dim as Index {
                            return Err(DomainError::Invalid(format!(
                                "half-space touches coordinate {max} beyond dimension {dim}"
                            )));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &SparseVector) -> bool {
        match self {
            Domain::Box { intervals } => {
                let dim = intervals.len() as Index;
                if x.support().any(|i| i == 0 || i > dim) {
                    return false;
                }
                intervals
                    .iter()
                    .enumerate()
                    .all(|(i, iv)| iv.contains(&x.get(i as Index + 1)))
            }
            Domain::Polytope {
                dim,
                inequalities,
                bounding_box,
            } => {
                let dim = *dim as Index;
                if x.support().any(|i| i == 0 || i > dim) {
                    return false;
                }
                let in_box = bounding_box
                    .iter()
                    .enumerate()
                    .all(|(i, iv)| iv.contains(&x.get(i as Index + 1)));
                in_box && inequalities.iter().all(|hs| hs.normal.dot(x) <= hs.rhs)
            }
            Domain::ProbabilitySimplex => {
                x.iter().all(|(_, v)| v.is_positive()) && x.total() == Rational::one()
            }
            Domain::PositiveUnitBall => {
                x.iter().all(|(_, v)| v.is_positive()) && x.total() <= Rational::one()
            }
        }
    }

    /// A canonical member, used as the perturbation anchor by the
    /// fixed-point finder. Box: the midpoint. Polytope: the bounding-box
    /// midpoint if it qualifies, otherwise the first grid point found at
    /// increasing resolutions. Simplex: the first unit mass. Ball: zero.
    pub fn anchor(&self) -> Option<SparseVector> {
        match self {
            Domain::Box { intervals } => Some(SparseVector::from_entries(
                intervals
                    .iter()
                    .enumerate()
                    .map(|(i, iv)| (i as Index + 1, iv.midpoint())),
            )),
            Domain::Polytope { bounding_box, .. } => {
                let mid = SparseVector::from_entries(
                    bounding_box
                        .iter()
                        .enumerate()
                        .map(|(i, iv)| (i as Index + 1, iv.midpoint())),
                );
                if self.contains(&mid) {
                    return Some(mid);
                }
                for resolution in [1u32, 2, 4, 8, 16] {
                    if let Ok(points) = self.grid(resolution) {
                        if let Some(p) = points.into_iter().next() {
                            return Some(p);
                        }
                    }
                }
                None
            }
            Domain::ProbabilitySimplex => Some(SparseVector::basis(1)),
            Domain::PositiveUnitBall => Some(SparseVector::zero()),
        }
    }

    /// Deterministic sampling grid with `resolution + 1` points per axis,
    /// ordered by exact l1 distance from the box midpoint (nearest first,
    /// ties by coordinate order). Polytopes keep only members.
    pub fn grid(&self, resolution: u32) -> Result<Vec<SparseVector>, DomainError> {
        if resolution == 0 {
            return Err(DomainError::Invalid("resolution must be >= 1".into()));
        }
        let intervals = match self {
            Domain::Box { intervals } => intervals,
            Domain::Polytope { bounding_box, .. } => bounding_box,
            other => return Err(DomainError::NotSampleable(other.kind_name())),
        };
        self.validate()?;

        let mut axis_points: Vec<Vec<Rational>> = Vec::with_capacity(intervals.len());
        let mut count: u128 = 1;
        for iv in intervals {
            let points = if iv.lo == iv.hi {
                vec![iv.lo.clone()]
            } else {
                let step = (&iv.hi - &iv.lo) / Rational::from_integer(resolution.into());
                (0..=resolution)
                    .map(|t| &iv.lo + &step * Rational::from_integer(t.into()))
                    .collect()
            };
            count = count.saturating_mul(points.len() as u128);
            if count > GRID_CAP {
                return Err(DomainError::GridTooLarge {
                    points: count,
                    cap: GRID_CAP,
                });
            }
            axis_points.push(points);
        }

        let center: Vec<Rational> = intervals.iter().map(|iv| iv.midpoint()).collect();
        let mut tuples: Vec<Vec<Rational>> = vec![vec![]];
        for points in &axis_points {
            let mut next = Vec::with_capacity(tuples.len() * points.len());
            for t in &tuples {
                for p in points {
                    let mut row = t.clone();
                    row.push(p.clone());
                    next.push(row);
                }
            }
            tuples = next;
        }

        let mut keyed: Vec<(Rational, Vec<Rational>)> = tuples
            .into_iter()
            .map(|t| {
                let dist: Rational = t
                    .iter()
                    .zip(&center)
                    .map(|(v, c)| (v - c).abs())
                    .sum();
                (dist, t)
            })
            .collect();
        keyed.sort();

        let points = keyed
            .into_iter()
            .map(|(_, t)| SparseVector::from_dense(&t))
            .filter(|p| match self {
                Domain::Polytope { .. } => self.contains(p),
                _ => true,
            })
            .collect();
        Ok(points)
    }
}

// Same strict-parsing story as the seminorm: one explicit representation
// struct instead of an internally tagged enum.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    intervals: Option<Vec<Interval>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inequalities: Option<Vec<HalfSpace>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounding_box: Option<Vec<Interval>>,
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Domain::Box { intervals } => DomainRepr {
                kind: "box".into(),
                intervals: Some(intervals.clone()),
                dim: None,
                inequalities: None,
                bounding_box: None,
            },
            Domain::Polytope {
                dim,
                inequalities,
                bounding_box,
            } => DomainRepr {
                kind: "polytope".into(),
                intervals: None,
                dim: Some(*dim),
                inequalities: Some(inequalities.clone()),
                bounding_box: Some(bounding_box.clone()),
            },
            Domain::ProbabilitySimplex => DomainRepr {
                kind: "probability_simplex".into(),
                intervals: None,
                dim: None,
                inequalities: None,
                bounding_box: None,
            },
            Domain::PositiveUnitBall => DomainRepr {
                kind: "positive_unit_ball".into(),
                intervals: None,
                dim: None,
                inequalities: None,
                bounding_box: None,
            },
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = DomainRepr::deserialize(de)?;
        let bare = |name: &str, ok: Domain, repr: &DomainRepr| {
            if repr.intervals.is_some()
                || repr.dim.is_some()
                || repr.inequalities.is_some()
                || repr.bounding_box.is_some()
            {
                Err(D::Error::custom(format!("domain kind {name:?} takes no fields")))
            } else {
                Ok(ok)
            }
        };
        let domain = match repr.kind.as_str() {
            "box" => {
                let intervals = repr
                    .intervals
                    .ok_or_else(|| D::Error::custom("box requires intervals"))?;
                if repr.dim.is_some() || repr.inequalities.is_some() || repr.bounding_box.is_some()
                {
                    return Err(D::Error::custom("box takes only intervals"));
                }
                Domain::Box { intervals }
            }
            "polytope" => Domain::Polytope {
                dim: repr
                    .dim
                    .ok_or_else(|| D::Error::custom("polytope requires dim"))?,
                inequalities: repr
                    .inequalities
                    .ok_or_else(|| D::Error::custom("polytope requires inequalities"))?,
                bounding_box: repr
                    .bounding_box
                    .ok_or_else(|| D::Error::custom("polytope requires bounding_box"))?,
            },
            "probability_simplex" => bare("probability_simplex", Domain::ProbabilitySimplex, &repr)?,
            "positive_unit_ball" => bare("positive_unit_ball", Domain::PositiveUnitBall, &repr)?,
            other => {
                return Err(D::Error::custom(format!("unknown domain kind {other:?}")))
            }
        };
        domain.validate().map_err(D::Error::custom)?;
        Ok(domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn pt(coords: &[(i64, i64)]) -> SparseVector {
        SparseVector::from_dense(&coords.iter().map(|&(n, d)| rat(n, d)).collect::<Vec<_>>())
    }

    #[test]
    fn box_membership_handles_absent_coordinates() {
        let unit = Domain::unit_box(2);
        assert!(unit.contains(&pt(&[(1, 2), (1, 3)])));
        assert!(unit.contains(&SparseVector::zero()));
        assert!(unit.contains(&pt(&[(1, 1), (1, 1)])));
        assert!(!unit.contains(&pt(&[(3, 2), (0, 1)])));
        // Support beyond the ambient dimension disqualifies.
        assert!(!unit.contains(&SparseVector::basis(3)));
        // A box that excludes zero rejects vectors missing that coordinate.
        let shifted = Domain::Box {
            intervals: vec![Interval::new(rat(1, 4), rat_int(1))],
        };
        assert!(!shifted.contains(&SparseVector::zero()));
        assert!(shifted.contains(&SparseVector::single(1, rat(1, 2))));
    }

    #[test]
    fn grid_counts_and_center_first_order() {
        let unit = Domain::unit_box(1);
        let g = unit.grid(4).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], SparseVector::single(1, rat(1, 2)));

        let square = Domain::unit_box(2);
        let g = square.grid(2).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], pt(&[(1, 2), (1, 2)]));
        // Corners arrive last, in coordinate order.
        assert_eq!(g[g.len() - 4..], [
            pt(&[(0, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ]);
    }

    #[test]
    fn degenerate_axis_collapses_to_one_point() {
        let slab = Domain::Box {
            intervals: vec![Interval::new(rat(1, 3), rat(1, 3)), Interval::new(rat_int(0), rat_int(1))],
        };
        let g = slab.grid(2).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|p| p.get(1) == rat(1, 3)));
    }

    #[test]
    fn polytope_filters_grid_and_membership() {
        // Triangle x + y <= 1 inside the unit square.
        let tri = Domain::Polytope {
            dim: 2,
            inequalities: vec![HalfSpace {
                normal: pt(&[(1, 1), (1, 1)]),
                rhs: rat_int(1),
            }],
            bounding_box: vec![
                Interval::new(rat_int(0), rat_int(1)),
                Interval::new(rat_int(0), rat_int(1)),
            ],
        };
        assert!(tri.contains(&pt(&[(1, 4), (1, 4)])));
        assert!(!tri.contains(&pt(&[(3, 4), (1, 2)])));
        let g = tri.grid(2).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.iter().all(|p| tri.contains(p)));
        assert_eq!(g[0], pt(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn simplex_and_ball_membership() {
        let simplex = Domain::ProbabilitySimplex;
        let ball = Domain::PositiveUnitBall;
        let half_half = SparseVector::from_entries([(0, rat(1, 2)), (7, rat(1, 2))]);
        assert!(simplex.contains(&half_half));
        assert!(ball.contains(&half_half));
        assert!(!simplex.contains(&SparseVector::single(1, rat(1, 2))));
        assert!(ball.contains(&SparseVector::single(1, rat(1, 2))));
        assert!(ball.contains(&SparseVector::zero()));
        assert!(!simplex.contains(&SparseVector::zero()));
        assert!(!ball.contains(&SparseVector::single(1, rat(-1, 2))));
        assert!(simplex.grid(4).is_err());
        assert!(ball.grid(4).is_err());
    }

    #[test]
    fn anchors_belong_to_their_domains() {
        let domains = [
            Domain::unit_box(3),
            Domain::Polytope {
                dim: 2,
                inequalities: vec![HalfSpace {
                    // x + y >= 3/2 cuts away the bounding-box midpoint.
                    normal: pt(&[(-1, 1), (-1, 1)]),
                    rhs: rat(-3, 2),
                }],
                bounding_box: vec![
                    Interval::new(rat_int(0), rat_int(1)),
                    Interval::new(rat_int(0), rat_int(1)),
                ],
            },
            Domain::ProbabilitySimplex,
            Domain::PositiveUnitBall,
        ];
        for d in &domains {
            let a = d.anchor().expect("anchor exists");
            assert!(d.contains(&a), "anchor escaped {:?}", d.kind_name());
        }
    }

    #[test]
    fn serde_round_trip_and_strictness() {
        let tri = Domain::Polytope {
            dim: 2,
            inequalities: vec![HalfSpace {
                normal: pt(&[(1, 1), (1, 1)]),
                rhs: rat_int(1),
            }],
            bounding_box: vec![
                Interval::new(rat_int(0), rat_int(1)),
                Interval::new(rat_int(0), rat_int(1)),
            ],
        };
        for d in [Domain::unit_box(2), tri, Domain::ProbabilitySimplex] {
            let json = serde_json::to_string(&d).unwrap();
            let back: Domain = serde_json::from_str(&json).unwrap();
            assert_eq!(back, d);
        }
        assert!(serde_json::from_str::<Domain>(r#"{"kind":"sphere"}"#).is_err());
        assert!(serde_json::from_str::<Domain>(r#"{"kind":"box"}"#).is_err());
        assert!(serde_json::from_str::<Domain>(
            r#"{"kind":"box","intervals":[["0","1"]],"dim":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Domain>(
            r#"{"kind":"box","intervals":[["1","0"]]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Domain>(
            r#"{"kind":"probability_simplex","intervals":[]}"#
        )
        .is_err());
    }

    #[test]
    fn grid_cap_guards_explosions() {
        let big = Domain::unit_box(8);
        assert!(matches!(
            big.grid(16),
            Err(DomainError::GridTooLarge { .. })
        ));
    }
}
