//! Polyhedral seminorms evaluated exactly on sparse vectors.
//!
//! Three shapes cover everything the toolkit needs: the l1 norm, the sup
//! norm, and `max_i |<a_i, x>|` for a finite family of rational functionals.
//! The third one is genuinely a seminorm, not a norm: any vector orthogonal
//! to every functional evaluates to zero, which is exactly the degeneracy
//! the separation probes have to survive.

use crate::rational::Rational;
use crate::vector::SparseVector;
use num_traits::{Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyhedralSeminorm {
    L1,
    LInf,
    MaxOfFunctionals { functionals: Vec<SparseVector> },
}

// Serialized as {"kind": "l1" | "linf" | "max_of_functionals", ...}. A
// derived internally-tagged enum would silently ignore unknown fields, so
// the (de)serializers go through an explicit strict representation.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeminormRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    functionals: Option<Vec<SparseVector>>,
}

impl Serialize for PolyhedralSeminorm {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            PolyhedralSeminorm::L1 => SeminormRepr {
                kind: "l1".into(),
                functionals: None,
            },
            PolyhedralSeminorm::LInf => SeminormRepr {
                kind: "linf".into(),
                functionals: None,
            },
            PolyhedralSeminorm::MaxOfFunctionals { functionals } => SeminormRepr {
                kind: "max_of_functionals".into(),
                functionals: Some(functionals.clone()),
            },
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PolyhedralSeminorm {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = SeminormRepr::deserialize(de)?;
        match (repr.kind.as_str(), repr.functionals) {
            ("l1", None) => Ok(PolyhedralSeminorm::L1),
            ("linf", None) => Ok(PolyhedralSeminorm::LInf),
            ("max_of_functionals", Some(functionals)) => {
                Ok(PolyhedralSeminorm::MaxOfFunctionals { functionals })
            }
            ("max_of_functionals", None) => Err(D::Error::custom(
                "max_of_functionals requires a functionals array",
            )),
            (kind, Some(_)) => Err(D::Error::custom(format!(
                "seminorm kind {kind:?} does not take functionals"
            ))),
            (kind, None) => Err(D::Error::custom(format!(
                "unknown seminorm kind {kind:?} (expected l1, linf, or max_of_functionals)"
            ))),
        }
    }
}

impl PolyhedralSeminorm {
    pub fn eval(&self, x: &SparseVector) -> Rational {
        match self {
            PolyhedralSeminorm::L1 => x.l1_norm(),
            PolyhedralSeminorm::LInf => x.linf_norm(),
            PolyhedralSeminorm::MaxOfFunctionals { functionals } => functionals
                .iter()
                .map(|a| a.dot(x).abs())
                .max()
                .unwrap_or_else(Rational::zero),
        }
    }

    /// Evaluates on a difference without materializing it when cheap.
    pub fn eval_diff(&self, x: &SparseVector, y: &SparseVector) -> Rational {
        match self {
            PolyhedralSeminorm::MaxOfFunctionals { functionals } => functionals
                .iter()
                .map(|a| (a.dot(x) - a.dot(y)).abs())
                .max()
                .unwrap_or_else(Rational::zero),
            _ => self.eval(&(x - y)),
        }
    }

    /// True when this instance is a norm on vectors supported in
    /// `1..=dim` (l1 and linf always; functional families only if they
    /// separate points, which we do not try to decide here).
    pub fn is_standard_norm(&self) -> bool {
        matches!(self, PolyhedralSeminorm::L1 | PolyhedralSeminorm::LInf)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PolyhedralSeminorm::L1 => "l1",
            PolyhedralSeminorm::LInf => "linf",
            PolyhedralSeminorm::MaxOfFunctionals { .. } => "max_of_functionals",
        }
    }

    /// Checks the three seminorm axioms exactly on one triple: nonnegativity
    /// at `x`, absolute homogeneity for `lambda * x`, and subadditivity for
    /// `x + y`. Used by the axiom sweep in the test suite and by examples.
    pub fn axioms_hold_on(&self, x: &SparseVector, y: &SparseVector, lambda: &Rational) -> bool {
        let px = self.eval(x);
        if px.is_negative() {
            return false;
        }
        if self.eval(&x.scale(lambda)) != lambda.abs() * &px {
            return false;
        }
        self.eval(&(x + y)) <= &px + self.eval(y)
    }
}
