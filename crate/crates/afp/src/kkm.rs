//! A combinatorial finder for approximate fixed points.
//!
//! Given a self-map f of a compact convex domain and a target epsilon, the
//! finder builds a finite net of sampled f-values, spans the simplex on
//! those centers, and walks subdivision lattices of growing order. Each
//! lattice vertex x tries to pick a carrier index i with
//! `rho(f(x) - z_i) >= epsilon/2`; a vertex where every carrier index fails
//! is already a witness, because then
//!
//! ```text
//! rho(x - f(x)) = rho(sum_i w_i (z_i - f(x))) <= max_i rho(z_i - f(x)) < epsilon/2.
//! ```
//!
//! The labeling is Sperner-admissible by construction, so on instances
//! where every vertex is labelable the classical parity argument applies:
//! the subdivision carries an odd number of fully-labeled cells, which
//! [`sperner_fully_labeled`] counts directly.

use crate::domain::{Domain, DomainError};
use crate::maps::PointMap;
use crate::rational::{format_rational, rat_int, serde_rational, Rational};
use crate::seminorm::PolyhedralSeminorm;
use crate::vector::SparseVector;
use num_integer::binomial;
use num_traits::{Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KkmError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("the sample grid produced no net centers")]
    EmptyNet,
    #[error("map image left the domain at sample {sample}")]
    MapEscapesDomain { sample: String },
    #[error("domain provides no anchor point")]
    AnchorUnavailable,
    #[error("cannot pull centers into the domain closely enough: theta {theta} shifts by {shift}, budget {budget}")]
    AlmostConvexInfeasible {
        theta: String,
        shift: String,
        budget: String,
    },
    #[error("labeling is not Sperner-admissible: {0}")]
    ImproperLabeling(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// A finite cover of the sampled f-values: centers are themselves
/// f-values, pairwise more than `radius` apart, and every sampled f-value
/// lies within `radius` (closed) of some center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetCover {
    pub centers: Vec<SparseVector>,
    pub radius: Rational,
    pub samples_used: usize,
}

/// Greedy net construction over the domain's sample grid, visited in the
/// domain's center-first order.
pub fn build_net(
    map: &dyn PointMap,
    domain: &Domain,
    rho: &PolyhedralSeminorm,
    radius: &Rational,
    resolution: u32,
) -> Result<NetCover, KkmError> {
    if !radius.is_positive() {
        return Err(KkmError::InvalidParams("radius must be > 0".into()));
    }
    let grid = domain.grid(resolution)?;
    if grid.is_empty() {
        return Err(KkmError::EmptyNet);
    }
    let mut centers: Vec<SparseVector> = Vec::new();
    for x in &grid {
        let fx = map.apply(x);
        if !domain.contains(&fx) {
            return Err(KkmError::MapEscapesDomain {
                sample: x.to_string(),
            });
        }
        let covered = centers
            .iter()
            .any(|z| rho.eval_diff(&fx, z) <= *radius);
        if !covered {
            centers.push(fx);
        }
    }
    Ok(NetCover {
        centers,
        radius: radius.clone(),
        samples_used: grid.len(),
    })
}

/// Replacement centers pulled toward the domain anchor:
/// `y_i = (1 - theta) z_i + theta a` with the smallest feasible theta, so
/// their convex hull surely sits inside the domain while each center moves
/// by less than `epsilon/2`. For self-maps the centers are f-values and
/// already lie in the domain, so theta comes out 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmostConvexWitness {
    pub theta: Rational,
    pub adjusted: Vec<SparseVector>,
    pub max_shift: Rational,
}

pub fn almost_convex_witness(
    net: &NetCover,
    domain: &Domain,
    rho: &PolyhedralSeminorm,
    epsilon: &Rational,
) -> Result<AlmostConvexWitness, KkmError> {
    let anchor = domain.anchor().ok_or(KkmError::AnchorUnavailable)?;
    let mut theta = Rational::zero();
    for z in &net.centers {
        let needed = minimal_theta(domain, z, &anchor)?;
        if needed > theta {
            theta = needed;
        }
    }
    let budget = epsilon / rat_int(2);
    let mut adjusted = Vec::with_capacity(net.centers.len());
    let mut max_shift = Rational::zero();
    for z in &net.centers {
        let y = if theta.is_zero() {
            z.clone()
        } else {
            z.scale(&(rat_int(1) - &theta)).add_scaled(&anchor, &theta)
        };
        let shift = rho.eval_diff(&y, z);
        if shift >= budget {
            return Err(KkmError::AlmostConvexInfeasible {
                theta: format_rational(&theta),
                shift: format_rational(&shift),
                budget: format_rational(&budget),
            });
        }
        if shift > max_shift {
            max_shift = shift.clone();
        }
        adjusted.push(y);
    }
    Ok(AlmostConvexWitness {
        theta,
        adjusted,
        max_shift,
    })
}

/// A feasible theta in [0, 1] with `(1 - theta) z + theta a` in the
/// domain, within 2^-64 of the smallest such value. All domain membership
/// constraints are closed and linear along the segment, so exact dyadic
/// bisection keeps the upper endpoint feasible throughout.
fn minimal_theta(
    domain: &Domain,
    z: &SparseVector,
    anchor: &SparseVector,
) -> Result<Rational, KkmError> {
    if domain.contains(z) {
        return Ok(Rational::zero());
    }
    let mut lo = Rational::zero(); // infeasible end
    let mut hi = rat_int(1); // the anchor itself
    let point_at = |t: &Rational| z.scale(&(rat_int(1) - t)).add_scaled(anchor, t);
    if !domain.contains(&point_at(&hi)) {
        return Err(KkmError::AnchorUnavailable);
    }
    for _ in 0..64 {
        let mid = (&lo + &hi) / rat_int(2);
        if domain.contains(&point_at(&mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Barycentric weights over the net centers; always nonnegative, summing
/// to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarycentricPoint {
    pub weights: Vec<Rational>,
}

impl BarycentricPoint {
    pub fn from_composition(composition: &[u64], order: u64) -> Self {
        assert!(order >= 1);
        debug_assert_eq!(composition.iter().sum::<u64>(), order);
        let r = rat_int(order as i64);
        BarycentricPoint {
            weights: composition
                .iter()
                .map(|&w| rat_int(w as i64) / &r)
                .collect(),
        }
    }

    pub fn carrier(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn embed(&self, centers: &[SparseVector]) -> SparseVector {
        assert_eq!(self.weights.len(), centers.len());
        let mut out = SparseVector::zero();
        for (w, z) in self.weights.iter().zip(centers) {
            if !w.is_zero() {
                out = out.add_scaled(z, w);
            }
        }
        out
    }
}

/// The order-r subdivision of the simplex on n centers: vertices are the
/// compositions of r into n parts, enumerated in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubdivisionLattice {
    pub centers: usize,
    pub order: u64,
}

impl SubdivisionLattice {
    pub fn new(centers: usize, order: u64) -> Result<Self, KkmError> {
        if centers < 1 || order < 1 {
            return Err(KkmError::InvalidParams(
                "need at least one center and order >= 1".into(),
            ));
        }
        Ok(Self { centers, order })
    }

    /// `C(n - 1 + r, r)` vertices.
    pub fn vertex_count(&self) -> u128 {
        binomial(
            (self.centers as u128 - 1) + self.order as u128,
            self.order as u128,
        )
    }

    pub fn vertices(&self) -> Compositions {
        Compositions::new(self.centers, self.order)
    }
}

/// Enumerates compositions of `total` into `parts` nonnegative summands,
/// starting from `[total, 0, ..., 0]`. The successor rule moves the
/// leftmost nonzero block one slot right and resets the prefix, which
/// visits every composition exactly once.
pub struct Compositions {
    next: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(parts: usize, total: u64) -> Self {
        assert!(parts >= 1);
        let mut first = vec![0u64; parts];
        first[0] = total;
        Compositions { next: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let n = current.len();
        if let Some(i) = (0..n - 1).find(|&i| current[i] > 0) {
            let mut succ = current.clone();
            let v = succ[i];
            succ[i] = 0;
            succ[0] = v - 1;
            succ[i + 1] += 1;
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// The label of one lattice vertex: the lowest carrier index whose center
/// stays `epsilon/2`-far from the image, or the news that none exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelOutcome {
    Label(usize),
    Unlabelable,
}

pub fn kkm_label(
    fx: &SparseVector,
    centers: &[SparseVector],
    carrier: &[usize],
    rho: &PolyhedralSeminorm,
    epsilon_half: &Rational,
) -> LabelOutcome {
    for &i in carrier {
        if rho.eval_diff(fx, &centers[i]) >= *epsilon_half {
            return LabelOutcome::Label(i);
        }
    }
    LabelOutcome::Unlabelable
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub point: SparseVector,
    #[serde(with = "serde_rational")]
    pub residual: Rational,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub order: u64,
    pub net_size: usize,
    pub lattice_vertices_scanned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FinderOutcome {
    Witness(Witness),
    DepthExhausted {
        max_order: u64,
        net_size: usize,
        lattice_vertices_scanned: u64,
    },
}

#[derive(Debug, Clone)]
pub struct FinderParams {
    pub epsilon: Rational,
    pub resolution: u32,
    pub max_order: u64,
    /// Skip vertices whose carrier is not a clique of the center
    /// closeness graph; such vertices can never be unlabelable, so the
    /// outcome is unchanged and only map evaluations are saved.
    pub prune_carriers: bool,
}

impl FinderParams {
    pub fn new(epsilon: Rational) -> Result<Self, KkmError> {
        if !epsilon.is_positive() {
            return Err(KkmError::InvalidParams("epsilon must be > 0".into()));
        }
        Ok(FinderParams {
            epsilon,
            resolution: 8,
            max_order: 16,
            prune_carriers: true,
        })
    }
}

/// Runs the lattice search over orders 1, 2, 4, ... up to `max_order`.
/// An unlabelable vertex is re-verified exactly and returned as a witness;
/// otherwise the scan reports how much ground it covered.
pub fn find_epsilon_fixed_point(
    map: &dyn PointMap,
    domain: &Domain,
    rho: &PolyhedralSeminorm,
    params: &FinderParams,
) -> Result<FinderOutcome, KkmError> {
    if !params.epsilon.is_positive() {
        return Err(KkmError::InvalidParams("epsilon must be > 0".into()));
    }
    if params.max_order < 1 {
        return Err(KkmError::InvalidParams("max_order must be >= 1".into()));
    }
    let epsilon_half = &params.epsilon / rat_int(2);
    let net = build_net(map, domain, rho, &epsilon_half, params.resolution)?;
    let witness_adjust = almost_convex_witness(&net, domain, rho, &params.epsilon)?;
    let centers = witness_adjust.adjusted;
    let n = centers.len();

    // Carriers of unlabelable vertices are cliques of the closeness graph
    // (centers within epsilon of each other), by the triangle inequality
    // through f(x).
    let close: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rho.eval_diff(&centers[i], &centers[j]) < params.epsilon)
                .collect()
        })
        .collect();

    let mut scanned = 0u64;
    let mut order = 1u64;
    while order <= params.max_order {
        let lattice = SubdivisionLattice::new(n, order)?;
        for composition in lattice.vertices() {
            scanned += 1;
            let point = BarycentricPoint::from_composition(&composition, order);
            let carrier = point.carrier();
            if params.prune_carriers {
                let clique = carrier
                    .iter()
                    .all(|&i| carrier.iter().all(|&j| close[i][j]));
                if !clique {
                    continue;
                }
            }
            let x = point.embed(&centers);
            let fx = map.apply(&x);
            if let LabelOutcome::Unlabelable =
                kkm_label(&fx, &centers, &carrier, rho, &epsilon_half)
            {
                let residual = rho.eval_diff(&x, &fx);
                debug_assert!(residual < params.epsilon);
                return Ok(FinderOutcome::Witness(Witness {
                    point: x,
                    residual,
                    epsilon: params.epsilon.clone(),
                    order,
                    net_size: n,
                    lattice_vertices_scanned: scanned,
                }));
            }
        }
        order *= 2;
    }
    Ok(FinderOutcome::DepthExhausted {
        max_order: params.max_order,
        net_size: n,
        lattice_vertices_scanned: scanned,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpernerCount {
    pub cells: u128,
    pub fully_labeled: u64,
}

/// Counts fully-labeled cells of the order-r edgewise subdivision of the
/// simplex on `centers` vertices, for a labeling given per lattice vertex
/// (as a composition of r). The labeling must be Sperner-admissible: each
/// vertex's label lies in its carrier. Cells are enumerated through the
/// staircase model: suffix-sum coordinates turn the simplex into the
/// monotone cone over a cube grid, where the standard simplicial
/// decomposition of each unit cube applies; exactly `r^(n-1)` cells
/// survive the monotonicity filter.
pub fn sperner_fully_labeled(
    centers: usize,
    order: u64,
    label: &mut dyn FnMut(&[u64]) -> usize,
) -> Result<SpernerCount, KkmError> {
    if centers < 1 || order < 1 {
        return Err(KkmError::InvalidParams(
            "need at least one center and order >= 1".into(),
        ));
    }
    let check_label = |composition: &[u64], lbl: usize| -> Result<(), KkmError> {
        if lbl >= composition.len() || composition[lbl] == 0 {
            return Err(KkmError::ImproperLabeling(format!(
                "vertex {composition:?} labeled {lbl}, outside its carrier"
            )));
        }
        Ok(())
    };

    if centers == 1 {
        // Zero-dimensional simplex: the single point is its own cell.
        let composition = vec![order];
        let lbl = label(&composition);
        check_label(&composition, lbl)?;
        return Ok(SpernerCount {
            cells: 1,
            fully_labeled: 1,
        });
    }

    let d = centers - 1;
    let r = order;
    // y-coordinates: y_k = w_{k+1} + ... + w_n, so r >= y_1 >= ... >= y_d >= 0.
    let to_composition = |y: &[u64]| -> Vec<u64> {
        let mut w = Vec::with_capacity(d + 1);
        w.push(r - y[0]);
        for k in 1..d {
            w.push(y[k - 1] - y[k]);
        }
        w.push(y[d - 1]);
        w
    };
    let monotone = |y: &[u64]| -> bool {
        if y[0] > r {
            return false;
        }
        y.windows(2).all(|p| p[0] >= p[1])
    };

    let mut cells: u128 = 0;
    let mut fully_labeled: u64 = 0;
    let mut base = vec![0u64; d];
    let mut perm: Vec<usize> = (0..d).collect();

    loop {
        // All permutations of insertion order for this base cube.
        permute_all(&mut perm, &mut |p: &[usize]| -> Result<(), KkmError> {
            let mut vertex = base.clone();
            let mut ys = Vec::with_capacity(d + 1);
            ys.push(vertex.clone());
            for &axis in p {
                vertex[axis] += 1;
                ys.push(vertex.clone());
            }
            if !ys.iter().all(|y| monotone(y)) {
                return Ok(());
            }
            cells += 1;
            let mut seen = vec![false; d + 1];
            let mut distinct = 0usize;
            for y in &ys {
                let composition = to_composition(y);
                let lbl = label(&composition);
                check_label(&composition, lbl)?;
                if !seen[lbl] {
                    seen[lbl] = true;
                    distinct += 1;
                }
            }
            if distinct == d + 1 {
                fully_labeled += 1;
            }
            Ok(())
        })?;

        // Advance the base cube within {0..r-1}^d.
        let mut k = 0;
        loop {
            if k == d {
                let expected = (r as u128).pow(d as u32);
                debug_assert_eq!(cells, expected, "staircase filter miscounted");
                return Ok(SpernerCount {
                    cells,
                    fully_labeled,
                });
            }
            base[k] += 1;
            if base[k] < r {
                break;
            }
            base[k] = 0;
            k += 1;
        }
    }
}

/// Heap's algorithm, calling `visit` on every permutation of `items`.
fn permute_all(
    items: &mut [usize],
    visit: &mut dyn FnMut(&[usize]) -> Result<(), KkmError>,
) -> Result<(), KkmError> {
    fn inner(
        k: usize,
        items: &mut [usize],
        visit: &mut dyn FnMut(&[usize]) -> Result<(), KkmError>,
    ) -> Result<(), KkmError> {
        if k <= 1 {
            return visit(items);
        }
        for i in 0..k {
            inner(k - 1, items, visit)?;
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
        Ok(())
    }
    let n = items.len();
    inner(n, items, visit)
}

/// Brute-force floor: the smallest displacement over the sample grid, with
/// its first minimizer in grid order. An upper bound on the true infimum,
/// used to cross-examine the finder.
pub fn grid_oracle_min_displacement(
    map: &dyn PointMap,
    domain: &Domain,
    rho: &PolyhedralSeminorm,
    resolution: u32,
) -> Result<(SparseVector, Rational), KkmError> {
    let grid = domain.grid(resolution)?;
    let mut best: Option<(SparseVector, Rational)> = None;
    for x in grid {
        let fx = map.apply(&x);
        let disp = rho.eval_diff(&x, &fx);
        if best.as_ref().is_none_or(|(_, b)| disp < *b) {
            best = Some((x, disp));
        }
    }
    best.ok_or(KkmError::EmptyNet)
}
