//! Self-maps of convex domains: a common trait, a registry of named
//! builtins, and piecewise-affine plugins loaded from JSON files.
//!
//! Everything downstream (orbit averaging, the lattice search, the
//! displacement estimators) talks to maps through [`PointMap`]. A map
//! declares whether it is affine; the averaging fast path trusts that flag
//! only after spot-checking it on random segments.

use crate::delta::{baker_affine, shift_vector};
use crate::domain::{Domain, HalfSpace};
use crate::measure::{Ex2Map, DIFFUSE_SLOT};
use crate::rational::{rat, Rational};
use crate::vector::{Index, SparseVector};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

pub trait PointMap: Send + Sync {
    fn apply(&self, x: &SparseVector) -> SparseVector;

    fn name(&self) -> &str;

    /// True when the map promises `f(t x + (1-t) y) = t f(x) + (1-t) f(y)`.
    /// Consumers that exploit the promise re-check it on random segments.
    fn declared_affine(&self) -> bool {
        false
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("unknown map name {0:?} (builtins: {})", BUILTIN_NAMES.join(", "))]
    UnknownName(String),
    #[error("could not read plugin file: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not parse plugin file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid plugin map: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl PointMap for Identity {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        x.clone()
    }
    fn name(&self) -> &str {
        "identity"
    }
    fn declared_affine(&self) -> bool {
        true
    }
}

/// One-dimensional affine map on coordinate 1: `x -> slope*x + offset`.
#[derive(Debug, Clone)]
pub struct Affine1D {
    pub slope: Rational,
    pub offset: Rational,
    label: &'static str,
}

impl Affine1D {
    pub fn new(slope: Rational, offset: Rational, label: &'static str) -> Self {
        Self {
            slope,
            offset,
            label,
        }
    }
}

impl PointMap for Affine1D {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        SparseVector::single(1, &self.slope * &x.get(1) + &self.offset)
    }
    fn name(&self) -> &str {
        self.label
    }
    fn declared_affine(&self) -> bool {
        true
    }
}

/// Squares every coordinate. Keeps any unit box invariant; not affine.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareMap;

impl PointMap for SquareMap {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        SparseVector::from_entries(x.iter().map(|(i, v)| (i, v * v)))
    }
    fn name(&self) -> &str {
        "square"
    }
}

/// Quarter turn of the plane about (1/2, 1/2): `(x, y) -> (1 - y, x)`.
/// Keeps the unit square invariant; the center is the unique fixed point.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rotation90;

impl PointMap for Rotation90 {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        SparseVector::from_entries([
            (1 as Index, Rational::one() - x.get(2)),
            (2 as Index, x.get(1)),
        ])
    }
    fn name(&self) -> &str {
        "rotation90"
    }
    fn declared_affine(&self) -> bool {
        true
    }
}

/// The measure-space benchmark map acting on its vector encoding (slot 0 is
/// the diffuse mass, slots `n >= 1` are atoms): diffuse mass becomes an atom
/// at 1, and each atom at `n` moves to the forward index of its partition
/// class. Linear, hence usable on signed vectors as well.
pub struct Ex2PointMap {
    inner: Ex2Map,
}

impl Ex2PointMap {
    pub fn dyadic() -> Self {
        Self {
            inner: Ex2Map::dyadic(),
        }
    }

    pub fn with_inner(inner: Ex2Map) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &Ex2Map {
        &self.inner
    }
}

impl PointMap for Ex2PointMap {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        let mut out = SparseVector::zero();
        for (idx, mass) in x.iter() {
            if idx == DIFFUSE_SLOT {
                out.add_to(1, mass);
                continue;
            }
            let j = self.inner.partition().class_of(idx);
            let k = self
                .inner
                .forward_index(j)
                .expect("forward index must stay within the index type");
            out.add_to(k, mass);
        }
        out
    }
    fn name(&self) -> &str {
        "ex2"
    }
    fn declared_affine(&self) -> bool {
        true
    }
}

/// Index shift `e_n -> e_{n+1}` on raw vectors; a linear isometry of l1.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftMap;

impl PointMap for ShiftMap {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        shift_vector(x)
    }
    fn name(&self) -> &str {
        "shift"
    }
    fn declared_affine(&self) -> bool {
        true
    }
}

/// Shift plus slack refill at `e_1`; affine self-map of the positive unit
/// ball with empty fixed-point set.
#[derive(Debug, Clone, Copy, Default)]
pub struct BakerMap;

impl PointMap for BakerMap {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        baker_affine(x)
    }
    fn name(&self) -> &str {
        "baker"
    }
    fn declared_affine(&self) -> bool {
        true
    }
}

pub const MAP_SCHEMA: &str = "afp-map/1";

/// One output coordinate of a linear piece: `out` receives `row . x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearRow {
    pub out: u64,
    pub row: SparseVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapPiece {
    /// Conjunction of half-space tests `normal . x <= rhs`; empty means
    /// always applicable.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guard: Vec<HalfSpace>,
    pub linear: Vec<LinearRow>,
    #[serde(default = "SparseVector::zero")]
    pub offset: SparseVector,
}

impl MapPiece {
    fn applies(&self, x: &SparseVector) -> bool {
        self.guard.iter().all(|h| h.normal.dot(x) <= h.rhs)
    }

    fn eval(&self, x: &SparseVector) -> SparseVector {
        let mut out = self.offset.clone();
        for LinearRow { out: i, row } in &self.linear {
            out.add_to(*i as Index, &row.dot(x));
        }
        out
    }
}

/// A map given piecewise by guarded affine pieces, first match wins. The
/// final piece must be guard-free so the map is total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseAffineMap {
    pub schema: String,
    pub name: String,
    pub pieces: Vec<MapPiece>,
}

impl PiecewiseAffineMap {
    pub fn validate(&self) -> Result<(), MapError> {
        if self.schema != MAP_SCHEMA {
            return Err(MapError::Invalid(format!(
                "schema must be {MAP_SCHEMA:?}, got {:?}",
                self.schema
            )));
        }
        if self.name.trim().is_empty() {
            return Err(MapError::Invalid("map name must be nonempty".into()));
        }
        let Some(last) = self.pieces.last() else {
            return Err(MapError::Invalid("at least one piece required".into()));
        };
        if !last.guard.is_empty() {
            return Err(MapError::Invalid(
                "the final piece must be guard-free so every input matches".into(),
            ));
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            for row in &piece.linear {
                if row.out < 1 {
                    return Err(MapError::Invalid(format!(
                        "piece {i}: output coordinates start at 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl PointMap for PiecewiseAffineMap {
    fn apply(&self, x: &SparseVector) -> SparseVector {
        for piece in &self.pieces {
            if piece.applies(x) {
                return piece.eval(x);
            }
        }
        unreachable!("validated maps end in a guard-free piece")
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn declared_affine(&self) -> bool {
        self.pieces.len() == 1
    }
}

pub fn load_plugin_map(path: &Path) -> Result<PiecewiseAffineMap, MapError> {
    let text = std::fs::read_to_string(path)?;
    let map: PiecewiseAffineMap = serde_json::from_str(&text)?;
    map.validate()?;
    Ok(map)
}

pub const BUILTIN_NAMES: &[&str] = &[
    "identity",
    "half-step",
    "toward-half",
    "square",
    "rotation90",
    "ex2",
    "shift",
    "baker",
];

pub fn builtin(name: &str) -> Result<Arc<dyn PointMap>, MapError> {
    Ok(match name {
        "identity" => Arc::new(Identity),
        // (x + 1) / 2: walks the unit interval halfway toward 1.
        "half-step" => Arc::new(Affine1D::new(rat(1, 2), rat(1, 2), "half-step")),
        // x/2 + 1/4: contracts the unit interval toward 1/2.
        "toward-half" => Arc::new(Affine1D::new(rat(1, 2), rat(1, 4), "toward-half")),
        "square" => Arc::new(SquareMap),
        "rotation90" => Arc::new(Rotation90),
        "ex2" => Arc::new(Ex2PointMap::dyadic()),
        "shift" => Arc::new(ShiftMap),
        "baker" => Arc::new(BakerMap),
        other => return Err(MapError::UnknownName(other.to_string())),
    })
}

/// The domain each builtin is usually run on. Plugins carry no default and
/// must be paired with an explicit domain by the caller.
pub fn default_domain(name: &str) -> Result<Domain, MapError> {
    Ok(match name {
        "identity" | "half-step" | "toward-half" | "square" => Domain::unit_box(1),
        "rotation90" => Domain::unit_box(2),
        "ex2" => Domain::ProbabilitySimplex,
        "shift" | "baker" => Domain::PositiveUnitBall,
        other => return Err(MapError::UnknownName(other.to_string())),
    })
}

/// Resolves a CLI map spec: a builtin name, or `plugin:<path>` for a JSON
/// piecewise-affine map.
pub fn resolve(spec: &str) -> Result<Arc<dyn PointMap>, MapError> {
    if let Some(path) = spec.strip_prefix("plugin:") {
        return Ok(Arc::new(load_plugin_map(Path::new(path))?));
    }
    builtin(spec)
}
