//! Finitely supported measures with a diffuse remainder, and the affine
//! self-map on them that provably has no fixed point.
//!
//! A measure here is a nonnegative atom vector on the positive integers plus
//! one nonnegative scalar of "diffuse" mass sitting off the integers. The
//! self-map reads only the diffuse mass and the masses of partition classes
//! `A_j`, so this two-part model evaluates the map exactly.
//!
//! The map sends `mu` to `mu(diffuse) * delta_1 + sum_j mu(A_j) * delta_{k_j}`
//! where the forward indices `k_j` are chosen greedily so that `k_1 >= 2`,
//! `k_1` avoids `A_1`, and each `k_{j+1} > k_j` avoids `A_1 ... A_{j+1}`.
//! Those two avoidance rules are exactly what makes the fixed-point equation
//! collapse to the zero measure; `no_fixed_point_certificate` replays that
//! collapse as machine-checked steps.

use crate::rational::{format_rational, Rational};
use crate::vector::{Index, SparseVector};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::sync::{Arc, Mutex};

/// Vector slot holding the diffuse mass when a measure is flattened into a
/// [`SparseVector`]; atoms live at their own indices `>= 1`.
pub const DIFFUSE_SLOT: Index = 0;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("negative mass at {0}")]
    NegativeMass(String),
    #[error("atom index 0 is reserved for the diffuse slot")]
    ReservedAtomIndex,
    #[error("forward-index search for class bound {class_bound} exhausted its scan budget")]
    ForwardIndexSearchExhausted { class_bound: u64 },
    #[error("forward index {index} for j = {j} violates its defining conditions: {reason}")]
    ForwardIndexInvalid { j: u64, index: Index, reason: String },
    #[error("orbit start must be a probability measure, total is {0}")]
    NotProbability(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMeasureModel {
    atoms: SparseVector,
    diffuse: Rational,
}

impl FiniteMeasureModel {
    pub fn new(atoms: SparseVector, diffuse: Rational) -> Result<Self, MeasureError> {
        if atoms.coeff(DIFFUSE_SLOT).is_some() {
            return Err(MeasureError::ReservedAtomIndex);
        }
        if let Some((n, v)) = atoms.iter().find(|(_, v)| v.is_negative()) {
            return Err(MeasureError::NegativeMass(format!(
                "atom {n} has mass {}",
                format_rational(v)
            )));
        }
        if diffuse.is_negative() {
            return Err(MeasureError::NegativeMass(format!(
                "diffuse mass {}",
                format_rational(&diffuse)
            )));
        }
        Ok(Self { atoms, diffuse })
    }

    pub fn zero() -> Self {
        Self {
            atoms: SparseVector::zero(),
            diffuse: Rational::zero(),
        }
    }

    pub fn dirac(n: Index) -> Self {
        assert!(n >= 1, "atoms live on indices >= 1");
        Self {
            atoms: SparseVector::basis(n),
            diffuse: Rational::zero(),
        }
    }

    pub fn pure_diffuse(mass: Rational) -> Result<Self, MeasureError> {
        Self::new(SparseVector::zero(), mass)
    }

    pub fn atoms(&self) -> &SparseVector {
        &self.atoms
    }

    pub fn diffuse(&self) -> &Rational {
        &self.diffuse
    }

    pub fn total(&self) -> Rational {
        self.atoms.total() + &self.diffuse
    }

    pub fn is_probability(&self) -> bool {
        self.total().is_one()
    }

    /// Total-variation norm; with nonnegative parts this equals the total.
    pub fn tv_norm(&self) -> Rational {
        self.atoms.l1_norm() + self.diffuse.abs()
    }

    pub fn tv_distance(&self, other: &Self) -> Rational {
        (&self.atoms - &other.atoms).l1_norm() + (&self.diffuse - &other.diffuse).abs()
    }

    /// Flattens into a vector with the diffuse mass at slot 0; the l1 norm
    /// of the result is the TV norm.
    pub fn to_vector(&self) -> SparseVector {
        let mut v = self.atoms.clone();
        v.set(DIFFUSE_SLOT, self.diffuse.clone());
        v
    }

    pub fn from_vector(v: &SparseVector) -> Result<Self, MeasureError> {
        let diffuse = v.get(DIFFUSE_SLOT);
        let mut atoms = v.clone();
        atoms.set(DIFFUSE_SLOT, Rational::zero());
        Self::new(atoms, diffuse)
    }

    pub fn convex_combination(t: &Rational, a: &Self, b: &Self) -> Self {
        let s = Rational::one() - t;
        Self {
            atoms: a.atoms.scale(t).add_scaled(&b.atoms, &s),
            diffuse: t * &a.diffuse + s * &b.diffuse,
        }
    }
}

/// A decomposition of the positive integers into disjoint classes
/// `A_1, A_2, ...`, each infinite.
pub trait Partition: Send + Sync {
    /// The class index `j >= 1` with `n` in `A_j`; total for `n >= 1`.
    fn class_of(&self, n: Index) -> u64;

    fn name(&self) -> &'static str;

    /// Smallest `n > after` lying outside `A_1 ... A_{class_bound}`, i.e.
    /// with `class_of(n) > class_bound`. The default linear scan gives up
    /// (returns None) after 2^20 candidates; partitions whose classes thin
    /// out fast should override with a closed form.
    fn first_outside_first_classes(&self, class_bound: u64, after: Index) -> Option<Index> {
        let budget: Index = 1 << 20;
        (after + 1..=after.saturating_add(budget)).find(|&n| self.class_of(n) > class_bound)
    }
}

/// Classes by dyadic valuation: `A_j` holds the integers divisible by
/// `2^(j-1)` but not `2^j`. So `A_1` is the odd numbers, `A_2` the singly
/// even ones, and so on; every class is infinite.
#[derive(Debug, Clone, Copy, Default)]
pub struct DyadicPartition;

impl Partition for DyadicPartition {
    fn class_of(&self, n: Index) -> u64 {
        assert!(n >= 1, "partition classes cover n >= 1");
        n.trailing_zeros() as u64 + 1
    }

    fn name(&self) -> &'static str {
        "dyadic"
    }

    // class_of(n) > bound exactly when 2^bound divides n, so the answer is
    // the next multiple of 2^bound.
    fn first_outside_first_classes(&self, class_bound: u64, after: Index) -> Option<Index> {
        if class_bound >= 127 {
            return None;
        }
        let step: Index = 1 << class_bound;
        Some((after / step + 1) * step)
    }
}

/// Classes by odd part: `A_j` holds the numbers `(2j-1) * 2^a`. Every
/// class is infinite, like the dyadic one, but the greedy forward chain
/// is `k_j = 2j + 1` instead of `2^j`, so long orbits stay at small
/// indices. Orbit experiments with thousands of steps want this one; the
/// dyadic chain overflows the index type near step 120.
#[derive(Debug, Clone, Copy, Default)]
pub struct OddPartPartition;

fn odd_part(n: Index) -> Index {
    n >> n.trailing_zeros()
}

impl Partition for OddPartPartition {
    fn class_of(&self, n: Index) -> u64 {
        assert!(n >= 1, "partition classes cover n >= 1");
        u64::try_from((odd_part(n) + 1) / 2).expect("class index exceeds u64")
    }

    fn name(&self) -> &'static str {
        "odd-part"
    }

    // Wanted: the first n > after with odd part >= 2*bound + 1. Below the
    // threshold nothing qualifies (even candidates would need twice the
    // threshold); past it, n or n + 1 is odd and is its own odd part.
    fn first_outside_first_classes(&self, class_bound: u64, after: Index) -> Option<Index> {
        let threshold = 2 * (class_bound as Index) + 1;
        let mut n = after.checked_add(1)?;
        if n < threshold {
            return Some(threshold);
        }
        loop {
            if odd_part(n) >= threshold {
                return Some(n);
            }
            n = n.checked_add(1)?;
        }
    }
}

/// Greedy forward indices `k_1 < k_2 < ... < k_{j_max}`: each `k_j` is the
/// smallest index above its predecessor avoiding `A_1 ... A_j`. The output
/// is re-verified against those conditions before it is returned.
pub fn forward_indices(partition: &dyn Partition, j_max: u64) -> Result<Vec<Index>, MeasureError> {
    let mut out: Vec<Index> = Vec::with_capacity(j_max as usize);
    let mut prev: Index = 1;
    for j in 1..=j_max {
        let next = partition
            .first_outside_first_classes(j, prev)
            .ok_or(MeasureError::ForwardIndexSearchExhausted { class_bound: j })?;
        if next <= prev {
            return Err(MeasureError::ForwardIndexInvalid {
                j,
                index: next,
                reason: "not strictly increasing".into(),
            });
        }
        let class = partition.class_of(next);
        if class <= j {
            return Err(MeasureError::ForwardIndexInvalid {
                j,
                index: next,
                reason: format!("lies in A_{class}, which is among the first {j} classes"),
            });
        }
        out.push(next);
        prev = next;
    }
    Ok(out)
}

/// The fixed-point-free affine self-map of the probability measures:
/// diffuse mass becomes an atom at 1, and the mass of each class `A_j` is
/// swept onto the single atom `k_j`.
pub struct Ex2Map {
    partition: Arc<dyn Partition>,
    memo: Mutex<Vec<Index>>,
}

impl Ex2Map {
    pub fn dyadic() -> Self {
        Self::with_partition(Arc::new(DyadicPartition))
    }

    pub fn with_partition(partition: Arc<dyn Partition>) -> Self {
        Self {
            partition,
            memo: Mutex::new(Vec::new()),
        }
    }

    pub fn partition(&self) -> &dyn Partition {
        self.partition.as_ref()
    }

    /// `k_j`, extending the greedy sequence on demand.
    pub fn forward_index(&self, j: u64) -> Result<Index, MeasureError> {
        assert!(j >= 1);
        let mut memo = self.memo.lock().unwrap();
        while (memo.len() as u64) < j {
            let next_j = memo.len() as u64 + 1;
            let prev = memo.last().copied().unwrap_or(1);
            let next = self
                .partition
                .first_outside_first_classes(next_j, prev)
                .ok_or(MeasureError::ForwardIndexSearchExhausted { class_bound: next_j })?;
            if next <= prev || self.partition.class_of(next) <= next_j {
                return Err(MeasureError::ForwardIndexInvalid {
                    j: next_j,
                    index: next,
                    reason: "accelerated search returned an invalid index".into(),
                });
            }
            memo.push(next);
        }
        Ok(memo[j as usize - 1])
    }

    pub fn eval(&self, mu: &FiniteMeasureModel) -> Result<FiniteMeasureModel, MeasureError> {
        let mut atoms = SparseVector::zero();
        atoms.add_to(1, mu.diffuse());
        for (n, mass) in mu.atoms().iter() {
            let j = self.partition.class_of(n);
            let k = self.forward_index(j)?;
            atoms.add_to(k, mass);
        }
        Ok(FiniteMeasureModel {
            atoms,
            diffuse: Rational::zero(),
        })
    }
}

/// Free-function spelling of [`Ex2Map::eval`].
pub fn eval_f_ex2(map: &Ex2Map, mu: &FiniteMeasureModel) -> Result<FiniteMeasureModel, MeasureError> {
    map.eval(mu)
}

/// Projection killing the diffuse mass and keeping every atom. Linear,
/// idempotent, TV-nonexpansive.
pub fn project_p(mu: &FiniteMeasureModel) -> FiniteMeasureModel {
    FiniteMeasureModel {
        atoms: mu.atoms.clone(),
        diffuse: Rational::zero(),
    }
}

/// Iterates the map from `mu0` (a probability measure) and reports the
/// exact TV displacement `(k, ||f(mu_k) - mu_k||)` for `k = 1..=steps`,
/// with `mu_1 = mu0`.
pub fn orbit_displacement(
    map: &Ex2Map,
    mu0: &FiniteMeasureModel,
    steps: usize,
) -> Result<Vec<(usize, Rational)>, MeasureError> {
    if !mu0.is_probability() {
        return Err(MeasureError::NotProbability(format_rational(&mu0.total())));
    }
    let mut out = Vec::with_capacity(steps);
    let mut current = mu0.clone();
    for k in 1..=steps {
        let next = map.eval(&current)?;
        out.push((k, next.tv_distance(&current)));
        current = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CertificateStep {
    /// The image of the map always has diffuse mass 0, so a fixed point
    /// must as well.
    DiffuseMustVanish,
    /// Atom 1 only ever receives the diffuse mass (every forward index is
    /// at least 2), which step one already forced to zero.
    AtomOneMustVanish { smallest_forward_index: Index },
    /// With the diffuse part gone, the image is supported on the forward
    /// indices; a fixed point within the bound is supported on these.
    SupportRestricted { allowed_atoms: Vec<Index> },
    /// mu(k_j) = mu(A_j), and A_j contains no forward index k_l with l >= j,
    /// while every k_l with l < j already carries zero mass. Hence
    /// mu(k_j) = 0. `class_members_among_allowed` lists which allowed atoms
    /// even lie in A_j (only already-eliminated ones can).
    ForwardMassMustVanish {
        j: u64,
        forward_index: Index,
        class_members_among_allowed: Vec<Index>,
    },
    /// All masses are forced to zero but a probability measure has total 1.
    TotalMassContradiction { forced_total: String, required_total: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub support_bound: Index,
    pub partition: String,
    pub steps: Vec<CertificateStep>,
    /// Whether any fixed point survives the constraint propagation.
    pub feasible: bool,
}

/// Machine-checked proof that the map has no fixed point among probability
/// measures with atoms supported in `1..=support_bound` (plus any diffuse
/// mass). The steps replay the defining avoidance conditions of the forward
/// indices as exact checks; any violated check is an error, not a silently
/// weaker certificate.
pub fn no_fixed_point_certificate(
    map: &Ex2Map,
    support_bound: Index,
) -> Result<CertificateReport, MeasureError> {
    assert!(support_bound >= 1);
    let mut steps = Vec::new();

    // Step 1: image diffuse mass is identically zero.
    steps.push(CertificateStep::DiffuseMustVanish);

    // Step 2: atom 1 receives only the (now zero) diffuse mass. This needs
    // k_j >= 2 for every j, which follows from k_1 >= 2 and monotonicity;
    // both were re-verified when the indices were built.
    let k1 = map.forward_index(1)?;
    if k1 < 2 {
        return Err(MeasureError::ForwardIndexInvalid {
            j: 1,
            index: k1,
            reason: "k_1 must be at least 2".into(),
        });
    }
    steps.push(CertificateStep::AtomOneMustVanish {
        smallest_forward_index: k1,
    });

    // Step 3: within the support bound, a fixed point lives on the forward
    // indices only.
    let mut allowed: Vec<(u64, Index)> = Vec::new();
    for j in 1.. {
        let k = map.forward_index(j)?;
        if k > support_bound {
            break;
        }
        allowed.push((j, k));
    }
    steps.push(CertificateStep::SupportRestricted {
        allowed_atoms: allowed.iter().map(|&(_, k)| k).collect(),
    });

    // Step 4: ascending elimination. mu(k_j) = mu(A_j), and the only
    // allowed atoms inside A_j are forward indices k_l with l < j (the
    // avoidance condition excludes l >= j), whose masses are already zero.
    for &(j, k) in &allowed {
        let members: Vec<Index> = allowed
            .iter()
            .filter(|&&(_, other)| map.partition().class_of(other) == j)
            .map(|&(_, other)| other)
            .collect();
        for &member in &members {
            let l = allowed.iter().find(|&&(_, o)| o == member).unwrap().0;
            if l >= j {
                return Err(MeasureError::ForwardIndexInvalid {
                    j: l,
                    index: member,
                    reason: format!("lies in A_{j} with j <= {l}, breaking the elimination order"),
                });
            }
        }
        steps.push(CertificateStep::ForwardMassMustVanish {
            j,
            forward_index: k,
            class_members_among_allowed: members,
        });
    }

    // Step 5: everything vanished, so the total cannot be 1.
    steps.push(CertificateStep::TotalMassContradiction {
        forced_total: "0".into(),
        required_total: "1".into(),
    });

    Ok(CertificateReport {
        support_bound,
        partition: map.partition().name().to_string(),
        steps,
        feasible: false,
    })
}
