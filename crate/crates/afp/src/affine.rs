//! Orbit iteration and Cesaro averaging with exact residuals.
//!
//! For a self-map f of a convex domain, the running averages
//! `x_k = (y_1 + ... + y_k) / k` of the orbit `y_{i+1} = f(y_i)` are the
//! cheapest candidates for approximate fixed points. When f is affine the
//! residual collapses by telescoping:
//!
//! ```text
//! x_k - f(x_k) = (y_1 - y_{k+1}) / k
//! ```
//!
//! so each step costs one map application and no averaging at all. The
//! averager uses that fast path only for maps that declare themselves
//! affine, and cross-checks the identity against the direct residual at
//! every power-of-two step; a map that lied is reported, not trusted.

use crate::domain::Domain;
use crate::maps::PointMap;
use crate::rational::{format_rational, rat_int, serde_rational, Rational};
use crate::seminorm::PolyhedralSeminorm;
use crate::vector::{Index, SparseVector};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AffineError {
    #[error("orbit left the domain at step {step}")]
    DomainEscape { step: u64 },
    #[error("map declared affine but is not: {0}")]
    NotAffine(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// The orbit `y_1 = start, y_2 = f(y_1), ..., y_{steps+1}`, each point
/// checked against the domain.
pub fn iterate_orbit(
    map: &dyn PointMap,
    domain: &Domain,
    start: &SparseVector,
    steps: u64,
) -> Result<Vec<SparseVector>, AffineError> {
    let mut orbit = Vec::with_capacity(steps as usize + 1);
    if !domain.contains(start) {
        return Err(AffineError::DomainEscape { step: 1 });
    }
    orbit.push(start.clone());
    for i in 0..steps {
        let next = map.apply(orbit.last().expect("nonempty"));
        if !domain.contains(&next) {
            return Err(AffineError::DomainEscape { step: i + 2 });
        }
        orbit.push(next);
    }
    Ok(orbit)
}

/// One recorded step of the averaging run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CesaroStep {
    pub k: u64,
    #[serde(with = "serde_rational")]
    pub residual: Rational,
}

/// Streaming Cesaro averager. State is one orbit tail plus a running sum;
/// the average itself is only materialized on demand.
pub struct CesaroAverager {
    map: Arc<dyn PointMap>,
    domain: Domain,
    rho: PolyhedralSeminorm,
    telescoped: bool,
    k: u64,
    y_first: SparseVector,
    y_tail: SparseVector, // y_{k+1}
    sum: SparseVector,    // y_1 + ... + y_k
}

impl CesaroAverager {
    pub fn new(
        map: Arc<dyn PointMap>,
        domain: Domain,
        rho: PolyhedralSeminorm,
        start: SparseVector,
    ) -> Result<Self, AffineError> {
        if !domain.contains(&start) {
            return Err(AffineError::DomainEscape { step: 1 });
        }
        let y_tail = map.apply(&start);
        if !domain.contains(&y_tail) {
            return Err(AffineError::DomainEscape { step: 2 });
        }
        let telescoped = map.declared_affine();
        Ok(Self {
            map,
            domain,
            rho,
            telescoped,
            k: 1,
            y_first: start.clone(),
            y_tail,
            sum: start,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Whether residuals come from the telescoped identity.
    pub fn telescoped(&self) -> bool {
        self.telescoped
    }

    pub fn average(&self) -> SparseVector {
        self.sum.scale(&(rat_int(1) / rat_int(self.k as i64)))
    }

    fn telescoped_residual_vector(&self) -> SparseVector {
        (&self.y_first - &self.y_tail).scale(&(rat_int(1) / rat_int(self.k as i64)))
    }

    fn direct_residual_vector(&self) -> Result<SparseVector, AffineError> {
        let x = self.average();
        let fx = self.map.apply(&x);
        if !self.domain.contains(&fx) {
            return Err(AffineError::DomainEscape { step: self.k });
        }
        Ok(&x - &fx)
    }

    /// The residual `rho(x_k - f(x_k))` at the current k. On the fast path
    /// the vector identity is re-verified exactly against the direct
    /// computation whenever k is a power of two.
    pub fn residual(&self) -> Result<Rational, AffineError> {
        if self.telescoped {
            let quick = self.telescoped_residual_vector();
            if self.k.is_power_of_two() {
                let direct = self.direct_residual_vector()?;
                if direct != quick {
                    return Err(AffineError::NotAffine(format!(
                        "telescoped residual diverged from the direct one at k = {}",
                        self.k
                    )));
                }
            }
            Ok(self.rho.eval(&quick))
        } else {
            Ok(self.rho.eval(&self.direct_residual_vector()?))
        }
    }

    pub fn advance(&mut self) -> Result<(), AffineError> {
        self.sum.add_assign(&self.y_tail);
        self.k += 1;
        let next = self.map.apply(&self.y_tail);
        if !self.domain.contains(&next) {
            return Err(AffineError::DomainEscape { step: self.k + 1 });
        }
        self.y_tail = next;
        Ok(())
    }

    /// Runs through `k = 1..=steps`, recording every residual.
    pub fn run(&mut self, steps: u64) -> Result<Vec<CesaroStep>, AffineError> {
        if steps < self.k {
            return Err(AffineError::InvalidParams(format!(
                "already past step {steps}"
            )));
        }
        let mut out = Vec::with_capacity((steps - self.k + 1) as usize);
        loop {
            out.push(CesaroStep {
                k: self.k,
                residual: self.residual()?,
            });
            if self.k == steps {
                break;
            }
            self.advance()?;
        }
        Ok(out)
    }
}

/// Convenience wrapper: the full residual sequence for `k = 1..=steps`.
pub fn cesaro_sequence(
    map: Arc<dyn PointMap>,
    domain: Domain,
    rho: PolyhedralSeminorm,
    start: SparseVector,
    steps: u64,
) -> Result<Vec<CesaroStep>, AffineError> {
    if steps < 1 {
        return Err(AffineError::InvalidParams("steps must be >= 1".into()));
    }
    CesaroAverager::new(map, domain, rho, start)?.run(steps)
}

/// Spot-checks the affine identity `f(t x + (1-t) y) = t f(x) + (1-t) f(y)`
/// on seeded random pairs from `points` with random rational t in [0, 1].
/// Exact equality or a counterexample.
pub fn verify_affine(
    map: &dyn PointMap,
    points: &[SparseVector],
    trials: usize,
    seed: u64,
) -> Result<(), AffineError> {
    if points.len() < 2 {
        return Err(AffineError::InvalidParams(
            "need at least two points to test segments".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x = &points[rng.gen_range(0..points.len())];
        let y = &points[rng.gen_range(0..points.len())];
        let den = rng.gen_range(1i64..=16);
        let t = Rational::new(rng.gen_range(0..=den).into(), den.into());
        let s = rat_int(1) - &t;
        let mix = x.scale(&t).add_scaled(y, &s);
        let expected = map.apply(x).scale(&t).add_scaled(&map.apply(y), &s);
        let got = map.apply(&mix);
        if got != expected {
            return Err(AffineError::NotAffine(format!(
                "f({} * {x} + {} * {y}) = {got}, expected {expected}",
                format_rational(&t),
                format_rational(&s),
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterPoint {
    pub point: SparseVector,
    #[serde(with = "serde_rational")]
    pub residual: Rational,
    /// Samples remaining in the final cell.
    pub members: usize,
    /// Width of the widest coordinate interval of the final cell.
    #[serde(with = "serde_rational")]
    pub cell_width: Rational,
    pub rounds: u32,
}

/// Locates a cluster point of a finite sample sequence by majority
/// halving: repeatedly split the bounding box along its widest coordinate
/// and keep the half holding at least half the remaining samples. The
/// candidate returned is the latest sample in the final cell, with its
/// displacement under the map. With samples from a convergent averaging
/// run this pins down an approximate fixed point without any limit talk.
pub fn cluster_fixed_point(
    map: &dyn PointMap,
    rho: &PolyhedralSeminorm,
    samples: &[SparseVector],
    tolerance: &Rational,
    budget: u32,
) -> Result<ClusterPoint, AffineError> {
    if samples.is_empty() {
        return Err(AffineError::InvalidParams("no samples".into()));
    }
    if !tolerance.is_positive() {
        return Err(AffineError::InvalidParams("tolerance must be > 0".into()));
    }

    let coords: BTreeSet<Index> = samples.iter().flat_map(|s| s.support()).collect();
    let mut members: Vec<usize> = (0..samples.len()).collect();
    let mut rounds = 0u32;

    let widest = |members: &[usize]| -> Option<(Index, Rational, Rational)> {
        coords
            .iter()
            .map(|&c| {
                let mut lo = samples[members[0]].get(c);
                let mut hi = lo.clone();
                for &m in &members[1..] {
                    let v = samples[m].get(c);
                    if v < lo {
                        lo = v.clone();
                    }
                    if v > hi {
                        hi = v;
                    }
                }
                (c, lo, hi)
            })
            .max_by(|a, b| (&a.2 - &a.1).cmp(&(&b.2 - &b.1)))
    };

    let mut cell_width = Rational::zero();
    while rounds < budget {
        let Some((coord, lo, hi)) = widest(&members) else {
            break;
        };
        cell_width = &hi - &lo;
        if cell_width <= *tolerance || members.len() == 1 {
            break;
        }
        let mid = (&lo + &hi) / rat_int(2);
        let (left, right): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&m| samples[m].get(coord) <= mid);
        members = if left.len() >= right.len() { left } else { right };
        rounds += 1;
    }
    if let Some((_, lo, hi)) = widest(&members) {
        cell_width = &hi - &lo;
    }

    let best = *members.iter().max().expect("nonempty");
    let point = samples[best].clone();
    let fx = map.apply(&point);
    let residual = rho.eval(&(&point - &fx));
    Ok(ClusterPoint {
        point,
        residual,
        members: members.len(),
        cell_width,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{builtin, Affine1D, PiecewiseAffineMap, SquareMap, MAP_SCHEMA};
    use crate::rational::rat;

    fn one_d(p: i64, q: i64) -> SparseVector {
        SparseVector::single(1, rat(p, q))
    }

    #[test]
    fn hand_checked_half_step_averages() {
        // Orbit from 0: 0, 1/2, 3/4, 7/8, ...; x_3 = 5/12 and the residual
        // is 5/12 - 17/24 = -7/24.
        let map = builtin("half-step").unwrap();
        let mut avg = CesaroAverager::new(
            map,
            Domain::unit_box(1),
            PolyhedralSeminorm::LInf,
            SparseVector::zero(),
        )
        .unwrap();
        avg.advance().unwrap();
        avg.advance().unwrap();
        assert_eq!(avg.k(), 3);
        assert_eq!(avg.average(), one_d(5, 12));
        assert_eq!(avg.residual().unwrap(), rat(7, 24));
        // Telescoped form agrees: (y_1 - y_4)/3 = (0 - 7/8)/3.
        assert!(avg.telescoped());
    }

    #[test]
    fn orbit_iteration_checks_the_domain() {
        let map = builtin("half-step").unwrap();
        let orbit = iterate_orbit(map.as_ref(), &Domain::unit_box(1), &SparseVector::zero(), 3)
            .unwrap();
        assert_eq!(
            orbit,
            vec![SparseVector::zero(), one_d(1, 2), one_d(3, 4), one_d(7, 8)]
        );
        // Doubling leaves the unit interval at the third orbit point.
        let double = Affine1D::new(rat_int(2), rat_int(0), "double");
        let err = iterate_orbit(&double, &Domain::unit_box(1), &one_d(1, 2), 3).unwrap_err();
        assert_eq!(err, AffineError::DomainEscape { step: 3 });
    }

    #[test]
    fn baker_residuals_follow_the_exact_one_over_k_law() {
        // From the zero measure the orbit walks e_1, e_2, ..., so
        // y_1 - y_{k+1} = -e_{k} and the l1 residual is exactly 1/k.
        let map = builtin("baker").unwrap();
        let steps = cesaro_sequence(
            map,
            Domain::PositiveUnitBall,
            PolyhedralSeminorm::L1,
            SparseVector::zero(),
            300,
        )
        .unwrap();
        assert_eq!(steps.len(), 300);
        for step in &steps {
            assert_eq!(step.residual, rat(1, step.k as i64));
        }
    }

    #[test]
    fn rotation_averages_hit_the_center_every_four_steps() {
        let map = builtin("rotation90").unwrap();
        let mut avg = CesaroAverager::new(
            map,
            Domain::unit_box(2),
            PolyhedralSeminorm::L1,
            SparseVector::zero(),
        )
        .unwrap();
        let center = SparseVector::from_entries([(1, rat(1, 2)), (2, rat(1, 2))]);
        for _ in 1..12 {
            avg.advance().unwrap();
            if avg.k() % 4 == 0 {
                assert_eq!(avg.average(), center);
                assert_eq!(avg.residual().unwrap(), rat_int(0));
            } else {
                assert!(avg.residual().unwrap() > Rational::zero());
            }
        }
    }

    #[test]
    fn telescoped_and_direct_residuals_agree_for_affine_maps() {
        for name in ["half-step", "toward-half", "rotation90", "shift", "ex2"] {
            let map = builtin(name).unwrap();
            let domain = crate::maps::default_domain(name).unwrap();
            let start = domain.anchor().unwrap();
            let mut avg = CesaroAverager::new(
                map.clone(),
                domain,
                PolyhedralSeminorm::L1,
                start,
            )
            .unwrap();
            for _ in 0..20 {
                let quick = avg.telescoped_residual_vector();
                let direct = avg.direct_residual_vector().unwrap();
                assert_eq!(quick, direct, "map {name} at k = {}", avg.k());
                avg.advance().unwrap();
            }
        }
    }

    // Claims affinity, is secretly the coordinate square.
    struct Liar;
    impl PointMap for Liar {
        fn apply(&self, x: &SparseVector) -> SparseVector {
            SquareMap.apply(x)
        }
        fn name(&self) -> &str {
            "liar"
        }
        fn declared_affine(&self) -> bool {
            true
        }
    }

    #[test]
    fn lying_about_affinity_is_caught_at_a_power_of_two_step() {
        let mut avg = CesaroAverager::new(
            Arc::new(Liar),
            Domain::unit_box(1),
            PolyhedralSeminorm::L1,
            one_d(1, 3),
        )
        .unwrap();
        let mut caught = false;
        for _ in 0..8 {
            match avg.residual() {
                Err(AffineError::NotAffine(_)) => {
                    caught = true;
                    break;
                }
                Ok(_) => avg.advance().unwrap(),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(caught, "cross-check never fired");
        // And the segment checker rejects it directly.
        let points = vec![SparseVector::zero(), one_d(1, 1), one_d(1, 2)];
        assert!(matches!(
            verify_affine(&Liar, &points, 50, 7),
            Err(AffineError::NotAffine(_))
        ));
        let rotation = builtin("rotation90").unwrap();
        let square_pts = vec![
            SparseVector::zero(),
            SparseVector::basis(1),
            SparseVector::basis(2),
            SparseVector::from_entries([(1, rat(1, 1)), (2, rat(1, 1))]),
        ];
        verify_affine(rotation.as_ref(), &square_pts, 100, 7).unwrap();
    }

    fn contractive_rotation() -> PiecewiseAffineMap {
        // 3/5-scaled rotation about (1/2, 1/2) using the 3-4-5 angle:
        // A = [[9/25, -12/25], [12/25, 9/25]], offset (14/25, 2/25).
        // Row sums stay below 1, so the unit square is invariant.
        serde_json::from_value(serde_json::json!({
            "schema": MAP_SCHEMA,
            "name": "spiral",
            "pieces": [{
                "linear": [
                    {"out": 1, "row": {"1": "9/25", "2": "-12/25"}},
                    {"out": 2, "row": {"1": "12/25", "2": "9/25"}}
                ],
                "offset": {"1": "14/25", "2": "2/25"}
            }]
        }))
        .unwrap()
    }

    #[test]
    fn cluster_point_of_a_contracting_spiral() {
        let map = contractive_rotation();
        map.validate().unwrap();
        assert!(map.declared_affine());
        let orbit = iterate_orbit(&map, &Domain::unit_box(2), &SparseVector::zero(), 40).unwrap();
        let center = SparseVector::from_entries([(1, rat(1, 2)), (2, rat(1, 2))]);
        let cluster = cluster_fixed_point(
            &map,
            &PolyhedralSeminorm::L1,
            &orbit[10..],
            &rat(1, 64),
            64,
        )
        .unwrap();
        assert!(cluster.cell_width <= rat(1, 64));
        assert!((&cluster.point - &center).l1_norm() < rat(1, 32));
        assert!(cluster.residual < rat(1, 32));
        // Exact fixed point check: the center maps to itself.
        assert_eq!(map.apply(&center), center);
    }

    #[test]
    fn cluster_point_of_rotation_averages_is_the_center() {
        let map = builtin("rotation90").unwrap();
        let mut avg = CesaroAverager::new(
            map.clone(),
            Domain::unit_box(2),
            PolyhedralSeminorm::L1,
            SparseVector::zero(),
        )
        .unwrap();
        let mut averages = Vec::new();
        for _ in 1..=64 {
            averages.push(avg.average());
            avg.advance().unwrap();
        }
        let cluster = cluster_fixed_point(
            map.as_ref(),
            &PolyhedralSeminorm::L1,
            &averages[32..],
            &rat(1, 16),
            64,
        )
        .unwrap();
        let center = SparseVector::from_entries([(1, rat(1, 2)), (2, rat(1, 2))]);
        assert_eq!(cluster.point, center);
        assert_eq!(cluster.residual, rat_int(0));
    }

    #[test]
    fn sequence_runner_validates_inputs() {
        let map = builtin("half-step").unwrap();
        assert!(matches!(
            cesaro_sequence(
                map.clone(),
                Domain::unit_box(1),
                PolyhedralSeminorm::L1,
                SparseVector::zero(),
                0
            ),
            Err(AffineError::InvalidParams(_))
        ));
        // Start outside the domain is an immediate escape at step 1.
        assert_eq!(
            cesaro_sequence(
                map,
                Domain::unit_box(1),
                PolyhedralSeminorm::L1,
                one_d(3, 2),
                5
            )
            .unwrap_err(),
            AffineError::DomainEscape { step: 1 }
        );
    }
}
