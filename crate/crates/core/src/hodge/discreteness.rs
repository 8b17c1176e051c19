//! Discreteness of the projective action, one rule per geometry class.
//!
//! Rules live in a [`Registry`] and are tried in registration order; the
//! first whose [`DiscretenessRule::applies`] accepts the geometry decides.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::tables::{finiteness_lookup, Finiteness};
use super::{geometry_from_turns, triangle_from_turns, GeometryClass, TriangleData};
use crate::abelian::{AbelianGroup, Character, RationalTurn};
use crate::cohomology::CharContext;
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::registry::{Named, Registry};
use crate::surface::BranchTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Discreteness {
    Discrete,
    NotDiscrete,
    Unknown,
}

impl fmt::Display for Discreteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReasonCode {
    /// the form vanishes, the action is through a finite abelian group
    TrivialCharacter,
    DegenerateFiniteAbelian,
    SphericalFiniteTable,
    SphericalInfinite,
    /// a rotation order outside {1, 2, 3, 4, 6}
    EuclideanForbiddenRotation,
    EuclideanCrystallographic,
    EuclideanUndecided,
    /// every angle is 0 or pi/n
    HyperbolicTriangleGroup,
    HyperbolicUndecided,
}

impl ReasonCode {
    /// Rules that go beyond the spherical classification.
    pub fn is_extension(&self) -> bool {
        matches!(
            self,
            ReasonCode::EuclideanForbiddenRotation
                | ReasonCode::EuclideanCrystallographic
                | ReasonCode::EuclideanUndecided
                | ReasonCode::HyperbolicTriangleGroup
                | ReasonCode::HyperbolicUndecided
        )
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        let s = s.as_str().expect("string tag");
        if self.is_extension() {
            write!(f, "{s} (extension)")
        } else {
            f.write_str(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretenessVerdict {
    pub verdict: Discreteness,
    pub reason: ReasonCode,
    pub rule: String,
    pub extension: bool,
    pub finiteness: Option<Finiteness>,
    /// orders of `rho(g1 g2)` and `rho(g2 g3)` in the definite case
    pub rotation_orders: Option<[i64; 2]>,
}

/// Everything a rule may look at.
pub struct RuleInput {
    pub turns: [RationalTurn; 4],
    pub geometry: GeometryClass,
}

impl RuleInput {
    pub fn from_turns(turns: [RationalTurn; 4]) -> Result<Self> {
        Ok(Self {
            geometry: geometry_from_turns(&turns)?,
            turns,
        })
    }

    pub fn triangle(&self) -> Result<TriangleData> {
        triangle_from_turns(&self.turns)
    }
}

pub trait DiscretenessRule: Named + Send + Sync {
    fn applies(&self, geometry: &GeometryClass) -> bool;
    fn decide(&self, input: &RuleInput) -> Result<DiscretenessVerdict>;
}

fn verdict(rule: &dyn Named, verdict: Discreteness, reason: ReasonCode) -> DiscretenessVerdict {
    DiscretenessVerdict {
        verdict,
        reason,
        rule: rule.name().to_string(),
        extension: reason.is_extension(),
        finiteness: None,
        rotation_orders: None,
    }
}

struct FiniteAbelian;

impl Named for FiniteAbelian {
    fn name(&self) -> &'static str {
        "finite-abelian"
    }
}

impl DiscretenessRule for FiniteAbelian {
    fn applies(&self, geometry: &GeometryClass) -> bool {
        matches!(geometry, GeometryClass::Trivial | GeometryClass::Degenerate)
    }

    fn decide(&self, input: &RuleInput) -> Result<DiscretenessVerdict> {
        let reason = if input.geometry == GeometryClass::Trivial {
            ReasonCode::TrivialCharacter
        } else {
            ReasonCode::DegenerateFiniteAbelian
        };
        Ok(verdict(self, Discreteness::Discrete, reason))
    }
}

struct SphericalTables;

impl Named for SphericalTables {
    fn name(&self) -> &'static str {
        "spherical-tables"
    }
}

impl DiscretenessRule for SphericalTables {
    fn applies(&self, geometry: &GeometryClass) -> bool {
        geometry.is_spherical()
    }

    fn decide(&self, input: &RuleInput) -> Result<DiscretenessVerdict> {
        let t = &input.turns;
        let finiteness = finiteness_lookup(t)?;
        let orders = [(t[0] + t[1]).order(), (t[1] + t[2]).order()];
        // two rotations of order > 5 about distinct points generate no finite group
        if orders.iter().all(|&o| o > 5) && finiteness.is_finite() {
            return Err(Error::Consistency(format!(
                "turns {t:?}: table says {finiteness} but rotation orders are {orders:?}"
            )));
        }
        let mut v = if finiteness.is_finite() {
            verdict(self, Discreteness::Discrete, ReasonCode::SphericalFiniteTable)
        } else {
            verdict(self, Discreteness::NotDiscrete, ReasonCode::SphericalInfinite)
        };
        v.finiteness = Some(finiteness);
        v.rotation_orders = Some(orders);
        Ok(v)
    }
}

struct Crystallographic;

impl Named for Crystallographic {
    fn name(&self) -> &'static str {
        "euclidean-crystallographic"
    }
}

impl DiscretenessRule for Crystallographic {
    fn applies(&self, geometry: &GeometryClass) -> bool {
        geometry.is_euclidean()
    }

    fn decide(&self, input: &RuleInput) -> Result<DiscretenessVerdict> {
        let angles = input.triangle()?.sorted_angles();
        let orders: Vec<i64> = angles.iter().map(|a| a.denom()).collect();
        if orders.iter().any(|o| ![1, 2, 3, 4, 6].contains(o)) {
            return Ok(verdict(self, Discreteness::NotDiscrete, ReasonCode::EuclideanForbiddenRotation));
        }
        let f = Fraction::new;
        let shapes = [
            [f(1, 3), f(1, 3), f(1, 3)],
            [f(1, 4), f(1, 4), f(1, 2)],
            [f(1, 6), f(1, 3), f(1, 2)],
        ];
        if shapes.iter().any(|s| s[..] == angles[..]) {
            Ok(verdict(self, Discreteness::Discrete, ReasonCode::EuclideanCrystallographic))
        } else {
            Ok(verdict(self, Discreteness::Unknown, ReasonCode::EuclideanUndecided))
        }
    }
}

struct HyperbolicTriangle;

impl Named for HyperbolicTriangle {
    fn name(&self) -> &'static str {
        "hyperbolic-triangle"
    }
}

impl DiscretenessRule for HyperbolicTriangle {
    fn applies(&self, geometry: &GeometryClass) -> bool {
        *geometry == GeometryClass::Hyperbolic
    }

    fn decide(&self, input: &RuleInput) -> Result<DiscretenessVerdict> {
        let tri = input.triangle()?;
        let ok = tri.vertices.iter().all(|v| v.angle.is_zero() || v.angle.numer() == 1);
        if ok {
            Ok(verdict(self, Discreteness::Discrete, ReasonCode::HyperbolicTriangleGroup))
        } else {
            Ok(verdict(self, Discreteness::Unknown, ReasonCode::HyperbolicUndecided))
        }
    }
}

pub fn default_rules() -> Registry<dyn DiscretenessRule> {
    let mut r: Registry<dyn DiscretenessRule> = Registry::new("discreteness rule");
    r.register(Box::new(FiniteAbelian))
        .register(Box::new(SphericalTables))
        .register(Box::new(Crystallographic))
        .register(Box::new(HyperbolicTriangle));
    r
}

pub fn discreteness_verdict_with(
    rules: &Registry<dyn DiscretenessRule>,
    turns: [RationalTurn; 4],
) -> Result<DiscretenessVerdict> {
    let input = RuleInput::from_turns(turns)?;
    let rule = rules
        .iter()
        .find(|r| r.applies(&input.geometry))
        .ok_or_else(|| Error::Capability(format!("no discreteness rule for {}", input.geometry)))?;
    rule.decide(&input)
}

pub fn discreteness_verdict(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> Result<DiscretenessVerdict> {
    discreteness_verdict_with(&default_rules(), CharContext::turns_of(group, tuple, character))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decide(s: [&str; 4]) -> DiscretenessVerdict {
        discreteness_verdict_with(&default_rules(), s.map(|x| x.parse().unwrap())).unwrap()
    }

    #[test]
    fn spherical_cases() {
        let v = decide(["1/6", "1/8", "1/10", "73/120"]);
        assert_eq!((v.verdict, v.reason), (Discreteness::NotDiscrete, ReasonCode::SphericalInfinite));
        assert_eq!(v.rotation_orders, Some([24, 40]));
        assert!(!v.extension);
        let v = decide(["1/8", "1/8", "1/8", "5/8"]);
        assert_eq!(v.verdict, Discreteness::NotDiscrete);
        let v = decide(["1/6", "1/6", "1/6", "1/2"]);
        assert_eq!((v.verdict, v.reason), (Discreteness::Discrete, ReasonCode::SphericalFiniteTable));
    }

    #[test]
    fn euclidean_cases() {
        let v = decide(["0", "1/3", "1/3", "1/3"]);
        assert_eq!((v.verdict, v.reason), (Discreteness::Discrete, ReasonCode::EuclideanCrystallographic));
        assert!(v.extension && v.reason.to_string().contains("extension"));
        let v = decide(["0", "1/5", "2/5", "2/5"]);
        assert_eq!(v.verdict, Discreteness::NotDiscrete);
        let v = decide(["0", "1/6", "1/6", "2/3"]);
        assert_eq!(v.verdict, Discreteness::Unknown);
    }

    #[test]
    fn hyperbolic_and_degenerate() {
        assert_eq!(decide(["1/2", "1/2", "1/2", "1/2"]).verdict, Discreteness::Discrete);
        let v = decide(["1/5", "2/5", "3/5", "4/5"]);
        assert_eq!(v.reason, ReasonCode::HyperbolicUndecided);
        assert_eq!(decide(["1/2", "1/2", "0", "0"]).reason, ReasonCode::DegenerateFiniteAbelian);
        assert_eq!(decide(["0", "0", "0", "0"]).reason, ReasonCode::TrivialCharacter);
    }

    #[test]
    fn every_geometry_has_a_rule() {
        let rules = default_rules();
        assert_eq!(
            rules.names(),
            ["finite-abelian", "spherical-tables", "euclidean-crystallographic", "hyperbolic-triangle"]
        );
        assert!(rules.get("spherical-tables").unwrap().applies(&GeometryClass::Spherical(super::super::Sign::Minus)));
    }
}
