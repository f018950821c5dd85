//! Exact geometry of the chained-triangle set in sparse l1.
//!
//! The set Delta is the union over n >= 1 of the filled triangles
//! co{0, e_n, e_{n+1}}. Every point has the unique canonical form
//! `a*e_n + b*e_{n+1}` captured by [`DeltaPoint`], the l1 metric restricted
//! to Delta collapses to a three-case closed form, and the nearest-point map
//! from the ambient positive cone back onto Delta is computable exactly one
//! triangle at a time.
//!
//! On top of the geometry sit the displacement tools: seeded samplers over
//! regions of Delta or the positive unit ball, Lipschitz/min-displacement
//! estimators for self-maps, the four-term combination bounds with their
//! closed-form constants, and the retraction pipeline that turns a self-map
//! of Delta into a self-map of a larger region with a certified lower bound
//! on its displacement.

use crate::maps::PointMap;
use crate::rational::{
    format_rational, parse_rational, serde_rational, serde_rational_opt, Rational,
};
use crate::spaces::SeparationParams;
use crate::vector::{Index, SparseVector};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeltaError {
    #[error("invalid triangle point: {0}")]
    InvalidPoint(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("chain link {n} is linearly dependent; triangles would be flat")]
    DegenerateChain { n: usize },
    #[error("triangle index {n} exceeds the chain (max {max})")]
    TriangleOutOfRange { n: u64, max: u64 },
    #[error("region sampler could not find a point satisfying the constraints")]
    RegionExhausted,
    #[error("no usable sample pairs (all coincided)")]
    NoUsablePairs,
    #[error("map image left its declared codomain: {0}")]
    ImageEscapedCodomain(String),
    #[error("claimed retraction moves points of its own target set: {0}")]
    NotARetraction(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// A point of Delta in canonical coordinates: `a*e_n + b*e_{n+1}` with
/// `a, b >= 0`, `a + b <= 1`. Canonical means `a > 0` unless the point is
/// the apex `(1, 0, 0)` (the origin), and points on a shared edge always
/// use the lowest possible triangle with weight on its first vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaPoint {
    triangle: u64,
    a: Rational,
    b: Rational,
}

impl DeltaPoint {
    pub fn new(triangle: u64, a: Rational, b: Rational) -> Result<Self, DeltaError> {
        if triangle < 1 {
            return Err(DeltaError::InvalidPoint("triangle index starts at 1".into()));
        }
        if a.is_negative() || b.is_negative() {
            return Err(DeltaError::InvalidPoint("weights must be nonnegative".into()));
        }
        if &a + &b > Rational::one() {
            return Err(DeltaError::InvalidPoint("weights exceed the simplex".into()));
        }
        Ok(Self { triangle, a, b }.canonicalize())
    }

    fn canonicalize(self) -> Self {
        if self.a.is_zero() {
            if self.b.is_zero() {
                return Self {
                    triangle: 1,
                    a: Rational::zero(),
                    b: Rational::zero(),
                };
            }
            return Self {
                triangle: self.triangle + 1,
                a: self.b,
                b: Rational::zero(),
            };
        }
        self
    }

    /// The origin, shared by every triangle.
    pub fn apex() -> Self {
        Self {
            triangle: 1,
            a: Rational::zero(),
            b: Rational::zero(),
        }
    }

    /// The basis vector `e_n` as a point of Delta.
    pub fn vertex(n: u64) -> Self {
        assert!(n >= 1);
        Self {
            triangle: n,
            a: Rational::one(),
            b: Rational::zero(),
        }
    }

    pub fn is_apex(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn triangle(&self) -> u64 {
        self.triangle
    }

    pub fn weight_a(&self) -> &Rational {
        &self.a
    }

    pub fn weight_b(&self) -> &Rational {
        &self.b
    }

    pub fn l1_norm(&self) -> Rational {
        &self.a + &self.b
    }

    pub fn embed(&self) -> SparseVector {
        SparseVector::from_entries([
            (self.triangle as Index, self.a.clone()),
            (self.triangle as Index + 1, self.b.clone()),
        ])
    }
}

impl fmt::Display for DeltaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.triangle,
            format_rational(&self.a),
            format_rational(&self.b)
        )
    }
}

/// Compact literal `n:a:b`, e.g. `1:1/2:1/4`.
pub fn parse_delta_point(s: &str) -> Result<DeltaPoint, DeltaError> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let [n, a, b] = parts.as_slice() else {
        return Err(DeltaError::InvalidPoint(format!(
            "expected n:a:b, got {s:?}"
        )));
    };
    let n: u64 = n
        .trim()
        .parse()
        .map_err(|_| DeltaError::InvalidPoint(format!("bad triangle index {n:?}")))?;
    let a = parse_rational(a).map_err(|e| DeltaError::InvalidPoint(e.to_string()))?;
    let b = parse_rational(b).map_err(|e| DeltaError::InvalidPoint(e.to_string()))?;
    DeltaPoint::new(n, a, b)
}

/// Exact l1 distance between canonical points, by triangle adjacency:
/// same triangle compares weights, adjacent triangles share one vertex,
/// and farther triangles have disjoint supports.
pub fn delta_distance(p: &DeltaPoint, q: &DeltaPoint) -> Rational {
    let (p, q) = if p.triangle <= q.triangle { (p, q) } else { (q, p) };
    match q.triangle - p.triangle {
        0 => (&p.a - &q.a).abs() + (&p.b - &q.b).abs(),
        1 => &p.a + (&p.b - &q.a).abs() + &q.b,
        _ => &p.a + &p.b + &q.a + &q.b,
    }
}

/// Pushes a point one triangle to the right: `a*e_n + b*e_{n+1}` becomes
/// `a*e_{n+1} + b*e_{n+2}`. An isometry of Delta whose only fixed point is
/// the apex.
pub fn shift_map(p: &DeltaPoint) -> DeltaPoint {
    DeltaPoint {
        triangle: p.triangle + 1,
        a: p.a.clone(),
        b: p.b.clone(),
    }
    .canonicalize()
}

/// Closed form for `delta_distance(p, shift_map(p))`: the shared vertex
/// absorbs `min(a, b)`, leaving `a + |a - b| + b`.
pub fn shift_displacement(p: &DeltaPoint) -> Rational {
    &p.a + (&p.a - &p.b).abs() + &p.b
}

/// The same shift on raw vectors: every index moves up by one.
pub fn shift_vector(x: &SparseVector) -> SparseVector {
    x.map_indices(|i| i + 1)
}

/// Self-map of the positive unit ball: shift the mass up one index and
/// refill the slack at `e_1`. Affine, lands on the unit sphere, and has no
/// fixed point (the fixed-point equation forces an infinite flat tail).
pub fn baker_affine(x: &SparseVector) -> SparseVector {
    let slack = Rational::one() - x.l1_norm();
    let mut out = shift_vector(x);
    out.add_to(1, &slack);
    out
}

/// Replays the fixed-point equation of [`baker_affine`] for candidates
/// supported in `1..=support_bound`: `x = (1 - ||x||) e_1 + shift(x)`
/// forces `x_1 = x_2 = ... = x_{bound+1}`, and the entry beyond the bound
/// must vanish, so all entries do; then the slack equation reads `1 = 0`.
/// Returns the chain of forced equalities for display.
pub fn baker_fixed_point_infeasible(support_bound: u64) -> Vec<String> {
    let mut chain = Vec::new();
    chain.push("x_{n+1} = x_n for every n >= 1 (shift alignment)".to_string());
    chain.push(format!(
        "x_{} = 0 (support bound), hence x_1 = ... = x_{} = 0",
        support_bound + 1,
        support_bound + 1
    ));
    chain.push("x_1 = 1 - ||x|| = 1 - 0 = 1, contradicting x_1 = 0".to_string());
    chain
}

/// Nearest point of Delta under l1, negatives clamped to zero first.
/// Only triangles touching the support can win, so the candidate set is
/// finite; per triangle the projection has a two-case closed form. Ties
/// break to the lowest triangle index, and within a triangle to the
/// lexicographically smallest `(a, b)` on the optimal face.
pub fn nearest_point_retraction(x: &SparseVector) -> DeltaPoint {
    let clamped = x.positive_part();
    if clamped.is_zero() {
        return DeltaPoint::apex();
    }
    let total = clamped.l1_norm();

    let mut candidates: BTreeSet<u64> = BTreeSet::new();
    for idx in clamped.support() {
        let n = u64::try_from(idx).expect("triangle index fits u64");
        if n >= 2 {
            candidates.insert(n - 1);
        }
        candidates.insert(n);
    }

    let mut best: Option<(Rational, DeltaPoint)> = None;
    for n in candidates {
        let sa = clamped.get(n as Index);
        let sb = clamped.get(n as Index + 1);
        let rest = &total - &sa - &sb;
        let (dist, a, b) = if &sa + &sb <= Rational::one() {
            (rest, sa, sb)
        } else {
            let excess = &sa + &sb - Rational::one();
            // Optimal face: a + b = 1 with a <= sa, b <= sb; smallest a.
            let a = (Rational::one() - &sb).max(Rational::zero());
            let b = Rational::one() - &a;
            (rest + excess, a, b)
        };
        let point = DeltaPoint { triangle: n, a, b }.canonicalize();
        match &best {
            Some((best_dist, _)) if *best_dist <= dist => {}
            _ => best = Some((dist, point)),
        }
    }
    best.expect("nonzero vector touches at least one triangle").1
}

/// Exact l1 distance from `x` to Delta.
pub fn distance_to_delta(x: &SparseVector) -> Rational {
    (x - &nearest_point_retraction(x).embed()).l1_norm()
}

/// Maps from a region into itself, with a retraction in the middle:
/// `x -> g(retract(x))`.
pub trait RetractionMap: Send + Sync {
    fn retract(&self, x: &SparseVector) -> DeltaPoint;
    fn name(&self) -> &'static str;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NearestPointRetraction;

impl RetractionMap for NearestPointRetraction {
    fn retract(&self, x: &SparseVector) -> DeltaPoint {
        nearest_point_retraction(x)
    }
    fn name(&self) -> &'static str {
        "nearest_point"
    }
}

/// Sampling region for the estimators: a slab of Delta or of the positive
/// unit ball, with optional norm floor, reached by seeded rejection
/// sampling on a rational grid of grain `grain`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub kind: RegionKind,
    /// Largest triangle (Delta) or coordinate (ball) the sampler touches.
    pub max_extent: u64,
    #[serde(default, with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub min_norm: Option<Rational>,
    pub grain: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Delta,
    PositiveBall,
}

impl Default for Region {
    fn default() -> Self {
        Region {
            kind: RegionKind::Delta,
            max_extent: 8,
            min_norm: None,
            grain: 16,
        }
    }
}

impl Region {
    pub fn validate(&self) -> Result<(), DeltaError> {
        if self.max_extent < 1 {
            return Err(DeltaError::InvalidParams("max_extent must be >= 1".into()));
        }
        if self.grain < 1 {
            return Err(DeltaError::InvalidParams("grain must be >= 1".into()));
        }
        if let Some(m) = &self.min_norm {
            if m.is_negative() || *m > Rational::one() {
                return Err(DeltaError::InvalidParams(
                    "min_norm must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }

    /// Membership in the base set (Delta or the ball), ignoring the norm
    /// floor; this is the codomain the estimators check images against.
    pub fn base_contains(&self, x: &SparseVector) -> bool {
        match self.kind {
            RegionKind::Delta => {
                x.iter().all(|(_, v)| v.is_positive()) && distance_to_delta(x).is_zero()
            }
            RegionKind::PositiveBall => {
                x.iter().all(|(_, v)| v.is_positive()) && x.total() <= Rational::one()
            }
        }
    }

    pub fn contains(&self, x: &SparseVector) -> bool {
        if !self.base_contains(x) {
            return false;
        }
        match &self.min_norm {
            Some(m) => x.l1_norm() >= *m,
            None => true,
        }
    }

    pub fn sample_delta_point<R: Rng>(&self, rng: &mut R) -> Result<DeltaPoint, DeltaError> {
        if self.kind != RegionKind::Delta {
            return Err(DeltaError::InvalidParams(
                "delta-point sampling needs a delta region".into(),
            ));
        }
        let g = self.grain as i64;
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=self.max_extent);
            let i = rng.gen_range(0..=g);
            let j = rng.gen_range(0..=g - i);
            let p = DeltaPoint::new(
                n,
                Rational::new(i.into(), g.into()),
                Rational::new(j.into(), g.into()),
            )
            .expect("grid weights are valid");
            if let Some(m) = &self.min_norm {
                if p.l1_norm() < *m {
                    continue;
                }
            }
            return Ok(p);
        }
        Err(DeltaError::RegionExhausted)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<SparseVector, DeltaError> {
        match self.kind {
            RegionKind::Delta => Ok(self.sample_delta_point(rng)?.embed()),
            RegionKind::PositiveBall => {
                let g = self.grain as i64;
                for _ in 0..10_000 {
                    let support = rng.gen_range(1..=self.max_extent.min(3).max(1));
                    let mut remaining = g;
                    let mut entries = Vec::new();
                    for _ in 0..support {
                        let idx = rng.gen_range(1..=self.max_extent) as Index;
                        let mass = rng.gen_range(0..=remaining);
                        remaining -= mass;
                        entries.push((idx, Rational::new(mass.into(), g.into())));
                    }
                    let v = SparseVector::from_entries(entries);
                    if let Some(m) = &self.min_norm {
                        if v.l1_norm() < *m {
                            continue;
                        }
                    }
                    return Ok(v);
                }
                Err(DeltaError::RegionExhausted)
            }
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            RegionKind::Delta => "delta",
            RegionKind::PositiveBall => "ball",
        };
        write!(f, "{kind},max-extent={},grain={}", self.max_extent, self.grain)?;
        if let Some(m) = &self.min_norm {
            write!(f, ",min-norm={}", format_rational(m))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Region {
    type Err = DeltaError;

    /// Compact form: `delta,max-extent=8,min-norm=1/2,grain=16`. The kind
    /// token is optional (default delta), as is every key.
    fn from_str(s: &str) -> Result<Self, DeltaError> {
        let mut region = Region::default();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "delta" => region.kind = RegionKind::Delta,
                "ball" => region.kind = RegionKind::PositiveBall,
                _ => {
                    let (key, value) = token.split_once('=').ok_or_else(|| {
                        DeltaError::InvalidParams(format!("bad region token {token:?}"))
                    })?;
                    match key.trim() {
                        "max-extent" => {
                            region.max_extent = value.trim().parse().map_err(|_| {
                                DeltaError::InvalidParams(format!("bad max-extent {value:?}"))
                            })?
                        }
                        "grain" => {
                            region.grain = value.trim().parse().map_err(|_| {
                                DeltaError::InvalidParams(format!("bad grain {value:?}"))
                            })?
                        }
                        "min-norm" => {
                            region.min_norm = Some(parse_rational(value).map_err(|e| {
                                DeltaError::InvalidParams(e.to_string())
                            })?)
                        }
                        other => {
                            return Err(DeltaError::InvalidParams(format!(
                                "unknown region key {other:?}"
                            )))
                        }
                    }
                }
            }
        }
        region.validate()?;
        Ok(region)
    }
}

/// Largest sampled ratio `||f(p) - f(q)|| / ||p - q||` over `pairs` seeded
/// pairs; coinciding pairs are skipped. Every image is checked against the
/// region's base set. This is a sampled lower estimate of the true
/// Lipschitz constant, reported as the working value.
pub fn estimate_lipschitz(
    map: &dyn PointMap,
    region: &Region,
    pairs: usize,
    seed: u64,
) -> Result<Rational, DeltaError> {
    if pairs < 1 {
        return Err(DeltaError::InvalidParams("pairs must be >= 1".into()));
    }
    region.validate()?;
    let mut rng = seeded_rng(seed);
    let mut best: Option<Rational> = None;
    for _ in 0..pairs {
        let p = region.sample(&mut rng)?;
        let q = region.sample(&mut rng)?;
        if p == q {
            continue;
        }
        let fp = checked_apply(map, &p, region)?;
        let fq = checked_apply(map, &q, region)?;
        let ratio = (&fp - &fq).l1_norm() / (&p - &q).l1_norm();
        if best.as_ref().is_none_or(|b| ratio > *b) {
            best = Some(ratio);
        }
    }
    best.ok_or(DeltaError::NoUsablePairs)
}

/// Smallest sampled displacement `||x - f(x)||` over `samples` seeded
/// points: an upper estimate of the true infimum.
pub fn estimate_min_displacement(
    map: &dyn PointMap,
    region: &Region,
    samples: usize,
    seed: u64,
) -> Result<Rational, DeltaError> {
    if samples < 1 {
        return Err(DeltaError::InvalidParams("samples must be >= 1".into()));
    }
    region.validate()?;
    let mut rng = seeded_rng(seed);
    let mut best: Option<Rational> = None;
    for _ in 0..samples {
        let x = region.sample(&mut rng)?;
        let fx = checked_apply(map, &x, region)?;
        let disp = (&x - &fx).l1_norm();
        if best.as_ref().is_none_or(|b| disp < *b) {
            best = Some(disp);
        }
    }
    Ok(best.expect("samples >= 1"))
}

fn checked_apply(
    map: &dyn PointMap,
    x: &SparseVector,
    region: &Region,
) -> Result<SparseVector, DeltaError> {
    let fx = map.apply(x);
    if !region.base_contains(&fx) {
        return Err(DeltaError::ImageEscapedCodomain(format!(
            "{} sent {x} to {fx}",
            map.name()
        )));
    }
    Ok(fx)
}

fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// The closed-form constants of the four-term combination bounds for a
/// delta-separated family with norms at most `norm_bound`: coefficients
/// `c_i = (1/2^(2i+1)) * (delta/M)^(i-1)` and the lower factor
/// `m = delta^4 / (32 M^3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Constants {
    pub delta: Rational,
    pub norm_bound: Rational,
    pub coefficients: [Rational; 4],
    pub lower_factor: Rational,
}

impl E1Constants {
    pub fn new(params: &SeparationParams) -> Self {
        let delta = params.delta.clone();
        let m_bound = params.norm_bound.clone();
        let ratio = &delta / &m_bound;
        let mut coefficients: [Rational; 4] = Default::default();
        let mut ratio_power = Rational::one();
        for (i, slot) in coefficients.iter_mut().enumerate() {
            let shift = 2 * (i as u32 + 1) + 1;
            let denom = Rational::from_integer((1i64 << shift).into());
            *slot = &ratio_power / denom;
            ratio_power *= &ratio;
        }
        let lower_factor = &delta * &delta * &delta * &delta
            / (Rational::from_integer(32.into()) * &m_bound * &m_bound * &m_bound);
        let sum: Rational = coefficients.iter().cloned().sum();
        assert!(sum < Rational::one(), "coefficient sum must stay below 1");
        E1Constants {
            delta,
            norm_bound: m_bound,
            coefficients,
            lower_factor,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct E1Report {
    pub trials: usize,
    pub violations: usize,
    #[serde(with = "serde_rational")]
    pub min_lower_slack: Rational,
    #[serde(with = "serde_rational")]
    pub min_upper_slack: Rational,
    pub seed: u64,
}

/// Checks `m * sum|alpha| <= rho(sum alpha_i x_{k_i}) <= M * sum|alpha|`
/// on seeded random four-term combinations drawn from `points`. The
/// hypothesis `rho(x) <= M` is re-verified for every point first. Slacks
/// are the smallest observed margins of each inequality.
pub fn e1_bounds_check(
    points: &[SparseVector],
    rho: &crate::seminorm::PolyhedralSeminorm,
    constants: &E1Constants,
    trials: usize,
    seed: u64,
) -> Result<E1Report, DeltaError> {
    if points.len() < 4 {
        return Err(DeltaError::InvalidParams(
            "need at least four points for four-term combinations".into(),
        ));
    }
    for (i, x) in points.iter().enumerate() {
        let norm = rho.eval(x);
        if norm > constants.norm_bound {
            return Err(DeltaError::HypothesisViolation(format!(
                "rho(x_{i}) = {} exceeds the norm bound {}",
                format_rational(&norm),
                format_rational(&constants.norm_bound)
            )));
        }
    }
    let mut rng = seeded_rng(seed);
    let mut violations = 0usize;
    let mut min_lower: Option<Rational> = None;
    let mut min_upper: Option<Rational> = None;
    for _ in 0..trials {
        // Four strictly increasing indices plus rational weights, not all
        // zero.
        let mut idx: Vec<usize> = Vec::with_capacity(4);
        while idx.len() < 4 {
            let i = rng.gen_range(0..points.len());
            if !idx.contains(&i) {
                idx.push(i);
            }
        }
        idx.sort_unstable();
        let mut alphas: Vec<Rational> = Vec::with_capacity(4);
        loop {
            alphas.clear();
            for _ in 0..4 {
                alphas.push(Rational::new(
                    rng.gen_range(-12i64..=12).into(),
                    rng.gen_range(1i64..=8).into(),
                ));
            }
            if alphas.iter().any(|a| !a.is_zero()) {
                break;
            }
        }
        let mut combo = SparseVector::zero();
        for (i, alpha) in idx.iter().zip(&alphas) {
            combo = combo.add_scaled(&points[*i], alpha);
        }
        let weight: Rational = alphas.iter().map(|a| a.abs()).sum();
        let value = rho.eval(&combo);
        let lower = &constants.lower_factor * &weight;
        let upper = &constants.norm_bound * &weight;
        if value < lower || value > upper {
            violations += 1;
            continue;
        }
        let lower_slack = &value - &lower;
        let upper_slack = &upper - &value;
        if min_lower.as_ref().is_none_or(|m| lower_slack < *m) {
            min_lower = Some(lower_slack);
        }
        if min_upper.as_ref().is_none_or(|m| upper_slack < *m) {
            min_upper = Some(upper_slack);
        }
    }
    Ok(E1Report {
        trials,
        violations,
        min_lower_slack: min_lower.unwrap_or_else(Rational::zero),
        min_upper_slack: min_upper.unwrap_or_else(Rational::zero),
        seed,
    })
}

/// The chained-triangle set built on an explicit separated family:
/// the union of triangles `co{0, x_n, x_{n+1}}`.
#[derive(Debug, Clone)]
pub struct ChainedTriangles {
    points: Vec<SparseVector>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    #[serde(with = "serde_rational")]
    pub min_ratio: Rational,
    #[serde(with = "serde_rational")]
    pub max_ratio: Rational,
    pub pairs_used: usize,
    pub seed: u64,
}

impl ChainedTriangles {
    /// Builds the chain; adjacent generators must be linearly independent
    /// (they are whenever the family is span-separated).
    pub fn new(points: Vec<SparseVector>) -> Result<Self, DeltaError> {
        if points.len() < 2 {
            return Err(DeltaError::InvalidParams(
                "need at least two generators".into(),
            ));
        }
        for (n, pair) in points.windows(2).enumerate() {
            if !linearly_independent(&pair[0], &pair[1]) {
                return Err(DeltaError::DegenerateChain { n: n + 1 });
            }
        }
        Ok(Self { points })
    }

    pub fn generators(&self) -> &[SparseVector] {
        &self.points
    }

    pub fn max_triangle(&self) -> u64 {
        (self.points.len() - 1) as u64
    }

    /// The correspondence `(n, a, b) -> a*x_n + b*x_{n+1}`. Canonical
    /// points with `b = 0` only use vertex `x_n`, so the final edge of the
    /// chain (triangle index one past the last full triangle) still embeds.
    pub fn embed(&self, p: &DeltaPoint) -> Result<SparseVector, DeltaError> {
        if p.is_apex() {
            return Ok(SparseVector::zero());
        }
        let n = p.triangle();
        if p.weight_b().is_zero() && n <= self.points.len() as u64 {
            return Ok(self.points[(n - 1) as usize].scale(p.weight_a()));
        }
        if n > self.max_triangle() {
            return Err(DeltaError::TriangleOutOfRange {
                n,
                max: self.max_triangle(),
            });
        }
        let xn = &self.points[(n - 1) as usize];
        let xn1 = &self.points[n as usize];
        Ok(xn.scale(p.weight_a()).add_scaled(xn1, p.weight_b()))
    }

    /// Exact membership: some triangle admits barycentric coordinates.
    pub fn contains(&self, x: &SparseVector) -> bool {
        if x.is_zero() {
            return true;
        }
        for n in 1..=self.max_triangle() {
            if let Some((a, b)) =
                solve_two_term(&self.points[(n - 1) as usize], &self.points[n as usize], x)
            {
                if !a.is_negative() && !b.is_negative() && &a + &b <= Rational::one() {
                    return true;
                }
            }
        }
        false
    }

    /// Samples canonical pairs, embeds them, and compares ambient
    /// seminorm distances against the intrinsic triangle metric. Ratios
    /// near 1 certify the chain is metrically faithful to Delta.
    pub fn distortion_estimate(
        &self,
        rho0: &crate::seminorm::PolyhedralSeminorm,
        pairs: usize,
        seed: u64,
    ) -> Result<DistortionReport, DeltaError> {
        if pairs < 1 {
            return Err(DeltaError::InvalidParams("pairs must be >= 1".into()));
        }
        let region = Region {
            kind: RegionKind::Delta,
            max_extent: self.max_triangle(),
            min_norm: None,
            grain: 16,
        };
        let mut rng = seeded_rng(seed);
        let mut min_ratio: Option<Rational> = None;
        let mut max_ratio: Option<Rational> = None;
        let mut used = 0usize;
        for _ in 0..pairs {
            let p = region.sample_delta_point(&mut rng)?;
            let q = region.sample_delta_point(&mut rng)?;
            let intrinsic = delta_distance(&p, &q);
            if intrinsic.is_zero() {
                continue;
            }
            let ambient = rho0.eval(&(&self.embed(&p)? - &self.embed(&q)?));
            let ratio = ambient / intrinsic;
            if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                min_ratio = Some(ratio.clone());
            }
            if max_ratio.as_ref().is_none_or(|m| ratio > *m) {
                max_ratio = Some(ratio);
            }
            used += 1;
        }
        let (Some(min_ratio), Some(max_ratio)) = (min_ratio, max_ratio) else {
            return Err(DeltaError::NoUsablePairs);
        };
        Ok(DistortionReport {
            min_ratio,
            max_ratio,
            pairs_used: used,
            seed,
        })
    }
}

fn linearly_independent(u: &SparseVector, v: &SparseVector) -> bool {
    if u.is_zero() || v.is_zero() {
        return false;
    }
    // u, v dependent iff v = t*u with t from the first shared coordinate.
    let Some(first_u) = u.support().next() else {
        return false;
    };
    let Some(first_v) = v.support().next() else {
        return false;
    };
    if first_u != first_v {
        return true;
    }
    let t = &v.get(first_u) / &u.get(first_u);
    v != &u.scale(&t)
}

/// Solves `a*u + b*v = x` exactly when `u, v` are independent; None when
/// the system is inconsistent.
fn solve_two_term(
    u: &SparseVector,
    v: &SparseVector,
    x: &SparseVector,
) -> Option<(Rational, Rational)> {
    let mut coords: BTreeSet<Index> = u.support().collect();
    coords.extend(v.support());
    coords.extend(x.support());
    // Find two rows forming an invertible 2x2 system.
    let rows: Vec<(Rational, Rational, Rational)> = coords
        .iter()
        .map(|&c| (u.get(c), v.get(c), x.get(c)))
        .collect();
    let mut pivot: Option<((usize, usize), Rational)> = None;
    'outer: for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let det = &rows[i].0 * &rows[j].1 - &rows[j].0 * &rows[i].1;
            if !det.is_zero() {
                pivot = Some(((i, j), det));
                break 'outer;
            }
        }
    }
    let ((i, j), det) = pivot?;
    let a = (&rows[i].2 * &rows[j].1 - &rows[j].2 * &rows[i].1) / &det;
    let b = (&rows[i].0 * &rows[j].2 - &rows[j].0 * &rows[i].2) / &det;
    // Verify on every coordinate.
    for (cu, cv, cx) in &rows {
        if &(&a * cu) + &b * cv != *cx {
            return None;
        }
    }
    Some((a, b))
}

/// Composition of a retraction with a self-map of its target.
pub struct ComposedMap {
    inner: Arc<dyn PointMap>,
    retraction: Arc<dyn RetractionMap>,
    label: String,
}

impl ComposedMap {
    pub fn new(inner: Arc<dyn PointMap>, retraction: Arc<dyn RetractionMap>) -> Self {
        let label = format!("{}.{}", inner.name(), retraction.name());
        Self {
            inner,
            retraction,
            label,
        }
    }
}

impl PointMap for ComposedMap {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        self.inner.apply(&self.retraction.retract(x).embed())
    }
    fn name(&self) -> &str {
        &self.label
    }
    fn declared_affine(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainViolation {
    pub sample: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub map: String,
    pub retraction: String,
    pub region: String,
    pub samples: usize,
    pub pairs: usize,
    pub seed: u64,
    #[serde(with = "serde_rational")]
    pub lipschitz_estimate: Rational,
    #[serde(with = "serde_rational")]
    pub min_displacement_estimate: Rational,
    #[serde(with = "serde_rational")]
    pub epsilon_bound: Rational,
    /// False when a sampled fixed point forces the bound to zero.
    pub has_displacement_certificate: bool,
    pub chain_checked: usize,
    pub chain_violations: Vec<ChainViolation>,
}

pub struct CertifyParams {
    pub samples: usize,
    pub pairs: usize,
    pub seed: u64,
}

/// Builds `f = g . retract` on the sampled region and certifies it: the
/// displacement floor eta over retracted points, the Lipschitz estimate L
/// of f over region pairs, the bound `epsilon = eta / (L + 2)`, and the
/// sampled inequality `dist(x, f x) >= eta - (1 + L) * dist(x, target)`
/// near the target set (`>= epsilon` away from it). Violations are listed,
/// not hidden: they mean the sampled constants are unsound.
pub fn compose_pipeline(
    g: Arc<dyn PointMap>,
    retraction: Arc<dyn RetractionMap>,
    region: &Region,
    params: &CertifyParams,
) -> Result<(ComposedMap, CertificationReport), DeltaError> {
    if params.samples < 1 || params.pairs < 1 {
        return Err(DeltaError::InvalidParams(
            "samples and pairs must be >= 1".into(),
        ));
    }
    region.validate()?;
    let composed = ComposedMap::new(g.clone(), retraction.clone());
    let mut rng = seeded_rng(params.seed);

    let samples: Vec<SparseVector> = (0..params.samples)
        .map(|_| region.sample(&mut rng))
        .collect::<Result<_, _>>()?;

    // Retraction sanity: retracted points are fixed by the retraction.
    let mut retracted: Vec<DeltaPoint> = Vec::with_capacity(samples.len());
    for x in &samples {
        let d = retraction.retract(x);
        let again = retraction.retract(&d.embed());
        if again != d {
            return Err(DeltaError::NotARetraction(format!(
                "{} moves {} to {}",
                retraction.name(),
                d,
                again
            )));
        }
        retracted.push(d);
    }

    // Displacement floor of g over the retracted points.
    let delta_region = Region {
        kind: RegionKind::Delta,
        max_extent: region.max_extent + 1,
        min_norm: None,
        grain: region.grain,
    };
    let mut eta: Option<Rational> = None;
    for d in &retracted {
        let dv = d.embed();
        let gd = checked_apply(g.as_ref(), &dv, &delta_region)?;
        let disp = (&dv - &gd).l1_norm();
        if eta.as_ref().is_none_or(|e| disp < *e) {
            eta = Some(disp);
        }
    }
    let eta = eta.expect("samples >= 1");

    // Lipschitz estimate of the composition over fresh region pairs from
    // the same stream.
    let mut lipschitz: Option<Rational> = None;
    for _ in 0..params.pairs {
        let p = region.sample(&mut rng)?;
        let q = region.sample(&mut rng)?;
        if p == q {
            continue;
        }
        let fp = composed.apply(&p);
        let fq = composed.apply(&q);
        let ratio = (&fp - &fq).l1_norm() / (&p - &q).l1_norm();
        if lipschitz.as_ref().is_none_or(|b| ratio > *b) {
            lipschitz = Some(ratio);
        }
    }
    let lipschitz = lipschitz.ok_or(DeltaError::NoUsablePairs)?;

    let epsilon = &eta / (&lipschitz + Rational::from_integer(2.into()));

    // The displacement chain at every sample.
    let one_plus_l = Rational::one() + &lipschitz;
    let mut violations = Vec::new();
    for (i, x) in samples.iter().enumerate() {
        let fx = composed.apply(x);
        let displacement = (x - &fx).l1_norm();
        let to_target = (x - &retracted[i].embed()).l1_norm();
        let required = if to_target < epsilon {
            &eta - &one_plus_l * &to_target
        } else {
            epsilon.clone()
        };
        if displacement < required {
            violations.push(ChainViolation {
                sample: i,
                detail: format!(
                    "displacement {} below required {}",
                    format_rational(&displacement),
                    format_rational(&required)
                ),
            });
        }
    }

    let report = CertificationReport {
        map: g.name().to_string(),
        retraction: retraction.name().to_string(),
        region: region.to_string(),
        samples: params.samples,
        pairs: params.pairs,
        seed: params.seed,
        lipschitz_estimate: lipschitz,
        min_displacement_estimate: eta.clone(),
        epsilon_bound: epsilon,
        has_displacement_certificate: !eta.is_zero(),
        chain_checked: samples.len(),
        chain_violations: violations,
    };
    Ok((composed, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, Constraint, LinearProgram, LpOutcome, VarBound};
    use crate::rational::{rat, rat_int};
    use crate::seminorm::PolyhedralSeminorm;
    use rand::SeedableRng;

    fn dp(n: u64, a: (i64, i64), b: (i64, i64)) -> DeltaPoint {
        DeltaPoint::new(n, rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    #[test]
    fn canonical_form_is_unique() {
        // Shared edge: e_2 via either triangle.
        assert_eq!(dp(1, (0, 1), (1, 1)), dp(2, (1, 1), (0, 1)));
        // Apex from any triangle.
        assert_eq!(DeltaPoint::new(7, rat_int(0), rat_int(0)).unwrap(), DeltaPoint::apex());
        // Invalid points rejected.
        assert!(DeltaPoint::new(0, rat_int(0), rat_int(0)).is_err());
        assert!(DeltaPoint::new(1, rat(3, 4), rat(1, 2)).is_err());
        assert!(DeltaPoint::new(1, rat(-1, 4), rat_int(0)).is_err());
    }

    #[test]
    fn distance_closed_form_examples() {
        let e1 = DeltaPoint::vertex(1);
        let e2 = DeltaPoint::vertex(2);
        assert_eq!(delta_distance(&e1, &e2), rat_int(2));
        assert_eq!(
            delta_distance(&dp(1, (1, 2), (1, 4)), &dp(1, (1, 4), (1, 2))),
            rat(1, 2)
        );
        assert_eq!(
            delta_distance(&dp(1, (1, 2), (0, 1)), &dp(3, (1, 2), (0, 1))),
            rat_int(1)
        );
        assert_eq!(delta_distance(&DeltaPoint::apex(), &dp(5, (1, 3), (1, 3))), rat(2, 3));
    }

    #[test]
    fn distance_matches_dense_oracle_on_random_pairs() {
        let region = Region {
            kind: RegionKind::Delta,
            max_extent: 9,
            min_norm: None,
            grain: 12,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let p = region.sample_delta_point(&mut rng).unwrap();
            let q = region.sample_delta_point(&mut rng).unwrap();
            let dense = (&p.embed() - &q.embed()).l1_norm();
            assert_eq!(delta_distance(&p, &q), dense, "pair {p} {q}");
        }
    }

    #[test]
    fn shift_is_an_isometry_with_apex_fixed() {
        let region = Region {
            kind: RegionKind::Delta,
            max_extent: 7,
            min_norm: None,
            grain: 10,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..1000 {
            let p = region.sample_delta_point(&mut rng).unwrap();
            let q = region.sample_delta_point(&mut rng).unwrap();
            assert_eq!(
                delta_distance(&shift_map(&p), &shift_map(&q)),
                delta_distance(&p, &q)
            );
            assert_eq!(shift_displacement(&p), delta_distance(&p, &shift_map(&p)));
        }
        assert_eq!(shift_map(&DeltaPoint::apex()), DeltaPoint::apex());
        assert_eq!(shift_displacement(&DeltaPoint::apex()), rat_int(0));
        // e1 -> e2 with displacement 2; (1,1/2,1/4) moves by 1.
        assert_eq!(shift_map(&DeltaPoint::vertex(1)), DeltaPoint::vertex(2));
        assert_eq!(shift_displacement(&DeltaPoint::vertex(1)), rat_int(2));
        assert_eq!(shift_displacement(&dp(1, (1, 2), (1, 4))), rat_int(1));
    }

    #[test]
    fn retraction_examples() {
        // Inside Delta: identity.
        let p = dp(3, (1, 3), (1, 5));
        assert_eq!(nearest_point_retraction(&p.embed()), p);
        // e1 + e3 splits the tie toward the lower triangle.
        let x = &SparseVector::basis(1) + &SparseVector::basis(3);
        assert_eq!(nearest_point_retraction(&x), DeltaPoint::vertex(1));
        assert_eq!(distance_to_delta(&x), rat_int(1));
        // Half an atom high up is already in Delta.
        let x = SparseVector::single(5, rat(1, 2));
        assert_eq!(nearest_point_retraction(&x), dp(5, (1, 2), (0, 1)));
        // Negative coordinates are clamped first.
        let x = SparseVector::from_entries([(1, rat(1, 2)), (4, rat(-3, 4))]);
        assert_eq!(nearest_point_retraction(&x), dp(1, (1, 2), (0, 1)));
        assert_eq!(distance_to_delta(&x), rat(3, 4));
        // The zero vector retracts to the apex.
        assert_eq!(nearest_point_retraction(&SparseVector::zero()), DeltaPoint::apex());
    }

    // Independent check: per-triangle projection distance via the exact LP
    // min ||x - a e_n - b e_{n+1}||_1 with a, b >= 0, a + b <= 1.
    fn triangle_lp_distance(x: &SparseVector, n: u64) -> Rational {
        let coords: Vec<Index> = {
            let mut s: BTreeSet<Index> = x.support().collect();
            s.insert(n as Index);
            s.insert(n as Index + 1);
            s.into_iter().collect()
        };
        let nv = 2 + coords.len();
        let mut constraints = vec![Constraint {
            coeffs: {
                let mut c = vec![Rational::zero(); nv];
                c[0] = Rational::one();
                c[1] = Rational::one();
                c
            },
            rhs: Rational::one(),
        }];
        for (row, &c) in coords.iter().enumerate() {
            let mut base = vec![Rational::zero(); nv];
            if c == n as Index {
                base[0] = rat_int(-1);
            }
            if c == n as Index + 1 {
                base[1] = rat_int(-1);
            }
            // |x_c - a[c == n] - b[c == n+1]| <= u_row, as two one-sided rows.
            let mut plus = base.clone();
            plus[2 + row] = rat_int(-1);
            let mut minus: Vec<Rational> = base.iter().map(|v| -v.clone()).collect();
            minus[2 + row] = rat_int(-1);
            constraints.push(Constraint {
                coeffs: plus,
                rhs: -x.get(c),
            });
            constraints.push(Constraint {
                coeffs: minus,
                rhs: x.get(c),
            });
        }
        let mut objective = vec![Rational::zero(); nv];
        for slot in objective.iter_mut().skip(2) {
            *slot = Rational::one();
        }
        let lp = LinearProgram {
            objective,
            bounds: vec![VarBound::NonNegative; nv],
            constraints,
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, .. } => value,
            other => panic!("projection LP failed: {other:?}"),
        }
    }

    #[test]
    fn retraction_is_optimal_against_the_lp_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..60 {
            let support = rng.gen_range(1..=3);
            let x = SparseVector::from_entries((0..support).map(|_| {
                (
                    rng.gen_range(1..=6u128),
                    rat(rng.gen_range(0..=8), rng.gen_range(4..=8)),
                )
            }));
            let retracted = nearest_point_retraction(&x);
            let dist = (&x - &retracted.embed()).l1_norm();
            let lp_best = (1..=7u64)
                .map(|n| triangle_lp_distance(&x, n))
                .min()
                .unwrap();
            assert_eq!(dist, lp_best, "x = {x}");
        }
    }

    #[test]
    fn baker_map_properties() {
        // 0 -> e1 with displacement 1.
        let image = baker_affine(&SparseVector::zero());
        assert_eq!(image, SparseVector::basis(1));
        // Image always lands on the unit sphere.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let region = Region {
            kind: RegionKind::PositiveBall,
            max_extent: 6,
            min_norm: None,
            grain: 12,
        };
        for _ in 0..300 {
            let x = region.sample(&mut rng).unwrap();
            let fx = baker_affine(&x);
            assert_eq!(fx.l1_norm(), rat_int(1));
            assert!(fx.iter().all(|(_, v)| v.is_positive()));
        }
        // Truncated geometric vectors push the displacement down.
        let geo = |r: Rational, len: u128| {
            let mut entries = Vec::new();
            let mut pow = Rational::one() - &r;
            for i in 1..=len {
                entries.push((i, pow.clone()));
                pow *= &r;
            }
            SparseVector::from_entries(entries)
        };
        let coarse = geo(rat(1, 2), 6);
        let fine = geo(rat(9, 10), 40);
        let disp = |x: &SparseVector| (x - &baker_affine(x)).l1_norm();
        assert!(disp(&fine) < disp(&coarse));
        assert!(disp(&fine) < rat(1, 4));
        assert_eq!(baker_fixed_point_infeasible(8).len(), 3);
    }

    #[test]
    fn e1_constants_closed_forms() {
        let at_one = E1Constants::new(&SeparationParams::new(rat_int(1), rat_int(1)).unwrap());
        assert_eq!(at_one.coefficients[0], rat(1, 8));
        assert_eq!(at_one.coefficients[1], rat(1, 32));
        assert_eq!(at_one.coefficients[2], rat(1, 128));
        assert_eq!(at_one.coefficients[3], rat(1, 512));
        assert_eq!(at_one.lower_factor, rat(1, 32));
        assert_eq!(
            at_one.coefficients.iter().cloned().sum::<Rational>(),
            rat(85, 512)
        );
        let benchmark = E1Constants::new(&SeparationParams::new(rat(9, 10), rat_int(1)).unwrap());
        assert_eq!(benchmark.lower_factor, rat(6561, 320000));
        assert_eq!(benchmark.coefficients[0], rat(1, 8));
        assert_eq!(benchmark.coefficients[1], rat(9, 320));
    }

    #[test]
    fn e1_bounds_hold_on_the_basis_family() {
        let points: Vec<SparseVector> = (1..=10).map(SparseVector::basis).collect();
        let constants = E1Constants::new(&SeparationParams::new(rat(9, 10), rat_int(1)).unwrap());
        let report =
            e1_bounds_check(&points, &PolyhedralSeminorm::L1, &constants, 500, 11).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.min_lower_slack >= Rational::zero());
        // On the basis family the value is exactly the weight, so the upper
        // slack reaches zero.
        assert_eq!(report.min_upper_slack, rat_int(0));
    }

    #[test]
    fn e1_single_term_forces_norm_window() {
        // With alpha = (1,0,0,0) the combination is x_{k_1} itself, so any
        // norm outside [m, M] must be flagged.
        let mut points: Vec<SparseVector> = (1..=4).map(SparseVector::basis).collect();
        let constants = E1Constants::new(&SeparationParams::new(rat_int(1), rat_int(1)).unwrap());
        let report =
            e1_bounds_check(&points, &PolyhedralSeminorm::L1, &constants, 200, 3).unwrap();
        assert_eq!(report.violations, 0);
        // A point with norm above M violates the hypothesis outright.
        points.push(SparseVector::single(9, rat_int(2)));
        assert!(matches!(
            e1_bounds_check(&points, &PolyhedralSeminorm::L1, &constants, 10, 3),
            Err(DeltaError::HypothesisViolation(_))
        ));
        // A uniformly shrunken family passes the norm hypothesis but sits
        // below the lower bound on every combination: the check must flag
        // all of them.
        let shrunken: Vec<SparseVector> = (1..=4)
            .map(|n| SparseVector::basis(n).scale(&rat(1, 100)))
            .collect();
        let report =
            e1_bounds_check(&shrunken, &PolyhedralSeminorm::L1, &constants, 400, 3).unwrap();
        assert_eq!(report.violations, 400);
    }

    #[test]
    fn chained_triangles_on_the_basis_reproduce_delta() {
        let chain = ChainedTriangles::new((1..=6).map(SparseVector::basis).collect()).unwrap();
        let p = dp(2, (1, 3), (1, 2));
        assert_eq!(chain.embed(&p).unwrap(), p.embed());
        assert!(chain.contains(&p.embed()));
        assert!(!chain.contains(&SparseVector::from_entries([
            (1, rat(1, 2)),
            (3, rat(1, 2))
        ])));
        let report = chain
            .distortion_estimate(&PolyhedralSeminorm::L1, 300, 13)
            .unwrap();
        assert_eq!(report.min_ratio, rat_int(1));
        assert_eq!(report.max_ratio, rat_int(1));
        // Doubled generators scale every distance by 2.
        let doubled = ChainedTriangles::new(
            (1..=6)
                .map(|n| SparseVector::basis(n).scale(&rat_int(2)))
                .collect(),
        )
        .unwrap();
        let report = doubled
            .distortion_estimate(&PolyhedralSeminorm::L1, 300, 13)
            .unwrap();
        assert_eq!(report.min_ratio, rat_int(2));
        assert_eq!(report.max_ratio, rat_int(2));
        // Dependent adjacent generators are rejected.
        assert!(matches!(
            ChainedTriangles::new(vec![
                SparseVector::basis(1),
                SparseVector::basis(1).scale(&rat_int(3)),
            ]),
            Err(DeltaError::DegenerateChain { n: 1 })
        ));
    }

    #[test]
    fn region_parsing_round_trip() {
        let r: Region = "delta,max-extent=8,min-norm=1/2,grain=16".parse().unwrap();
        assert_eq!(r.kind, RegionKind::Delta);
        assert_eq!(r.min_norm, Some(rat(1, 2)));
        assert_eq!(r.to_string().parse::<Region>().unwrap(), r);
        let b: Region = "ball,max-extent=5".parse().unwrap();
        assert_eq!(b.kind, RegionKind::PositiveBall);
        assert_eq!(b.grain, 16);
        assert!("delta,min-norm=3/2".parse::<Region>().is_err());
        assert!("delta,unknown=1".parse::<Region>().is_err());
    }
}
