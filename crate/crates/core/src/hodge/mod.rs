//! The invariant Hermitian form on isotypic summands, its signature, and the
//! projective geometry it induces.
//!
//! On `D_rho`-coordinates `x = (a, b, c, d)` the form is `A(x, y) = y^H Q x`
//! with `Q` from [`hodge_form_matrix`]. Translating by `h` acts on `D_rho` as
//! multiplication by `rho(h)`, and the group pairing becomes `|G| x conj(y)`.

pub mod discreteness;
pub mod search;
pub mod tables;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abelian::{AbelianGroup, Character, Cyclotomic, RationalTurn};
use crate::cohomology::{isotypic_basis_ctx, CharContext};
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::fraction::Fraction;
use crate::surface::BranchTuple;

pub use discreteness::{
    default_rules, discreteness_verdict, discreteness_verdict_with, Discreteness, DiscretenessRule,
    DiscretenessVerdict, ReasonCode, RuleInput,
};
pub use search::{
    minimal_square_search, minimal_square_search_capped, search_definite_nondiscrete, AffEvidence,
    DefiniteHit, MinimalHit, DEFAULT_SQUARE_CAP,
};
pub use tables::{finiteness_lookup, finiteness_tables, Finiteness, FinitenessTable, PolyhedralType};

/// Gram matrix of the form on a chosen basis of `H^1(rho)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianForm {
    pub gram: Matrix,
}

impl HermitianForm {
    pub fn dimension(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.gram.is_hermitian()
    }

    pub fn is_zero(&self) -> bool {
        self.gram.is_zero()
    }

    /// `A(v_j, v_i)` for basis vectors `v_i`, `v_j`.
    pub fn entry(&self, i: usize, j: usize) -> &Cyclotomic {
        self.gram.get(i, j)
    }
}

/// The 4x4 matrix `Q` with `A(x, y) = y^H Q x` on `D_rho`-coordinates.
pub fn hodge_form_matrix(ctx: &CharContext) -> Matrix {
    let f = &ctx.field;
    let order = ctx.group.order() as i64;
    let i = Cyclotomic::imaginary_unit(f).expect("field order is a multiple of 4");
    // |G| / 4i = -i |G| / 4
    let c = (-&i).scale(&BigRational::new(BigInt::from(order), BigInt::from(4)));
    let one = Cyclotomic::one(f);
    let r2 = ctx.rho(1);
    let r4 = ctx.rho(3);
    let mut q = Matrix::zeros(f, 4, 4);
    q.set(0, 1, &c * &(&one - &r2));
    q.set(1, 0, -(&c * &(&one - &r2.conj())));
    q.set(2, 3, &c * &(&one - &r4));
    q.set(3, 2, -(&c * &(&one - &r4.conj())));
    q
}

pub fn hodge_gram_ctx(ctx: &CharContext, basis: &[Vec<Cyclotomic>]) -> HermitianForm {
    let v = Matrix::from_columns(&ctx.field, basis);
    let q = hodge_form_matrix(ctx);
    let gram = if basis.is_empty() {
        Matrix::zeros(&ctx.field, 0, 0)
    } else {
        v.conj_transpose().mul(&q).mul(&v)
    };
    HermitianForm { gram }
}

pub fn hodge_gram(
    group: &AbelianGroup,
    tuple: &BranchTuple,
    character: &Character,
    basis: &[Vec<Cyclotomic>],
) -> HermitianForm {
    hodge_gram_ctx(&CharContext::new(group, tuple, character), basis)
}

/// Gram matrix on the standard isotypic basis.
pub fn summand_form(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> HermitianForm {
    let ctx = CharContext::new(group, tuple, character);
    let summand = isotypic_basis_ctx(&ctx);
    hodge_gram_ctx(&ctx, &summand.basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n0: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Signature {
    pub fn new(n0: usize, n_plus: usize, n_minus: usize) -> Self {
        Self { n0, n_plus, n_minus }
    }

    pub fn dimension(&self) -> usize {
        self.n0 + self.n_plus + self.n_minus
    }

    /// Signature on the conjugate summand.
    pub fn conjugate(&self) -> Self {
        Self::new(self.n0, self.n_minus, self.n_plus)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n0, self.n_plus, self.n_minus)
    }
}

pub fn turn_sum(turns: &[RationalTurn; 4]) -> Fraction {
    turns.iter().map(|&t| Fraction::from(t)).sum()
}

/// Signature from the turns of `rho(g_j)` in `[0, 1)`.
pub fn signature_from_turns(turns: &[RationalTurn; 4]) -> Result<Signature> {
    let nonzero = turns.iter().filter(|t| !t.is_zero()).count();
    if nonzero == 0 {
        return Err(Error::Domain(
            "the form vanishes identically on the trivial summand".into(),
        ));
    }
    let sum = turn_sum(turns);
    let n_minus = sum - Fraction::one();
    let n_plus = Fraction::integer(nonzero as i64) - sum - Fraction::one();
    let count = |f: Fraction| -> Result<usize> {
        if f.is_integer() && f.numer() >= 0 {
            Ok(f.numer() as usize)
        } else {
            Err(Error::Consistency(format!(
                "turns {turns:?} give a non-integral signature entry {f}"
            )))
        }
    };
    Ok(Signature::new(4 - nonzero, count(n_plus)?, count(n_minus)?))
}

pub fn signature_exact(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> Result<Signature> {
    if character.is_trivial() {
        return Err(Error::Domain(
            "the form vanishes identically on the trivial summand".into(),
        ));
    }
    signature_from_turns(&CharContext::turns_of(group, tuple, character))
}

/// Signature of an exact Gram matrix by Hermitian congruence.
///
/// Real parts of the diagonal pivots are read in floating point only to take
/// their sign; exact zero tests decide degeneracy.
pub fn gram_signature(form: &HermitianForm) -> Result<Signature> {
    let mut a = form.gram.clone();
    let n = a.nrows();
    let mut sig = Signature::new(0, 0, 0);
    let mut live: Vec<usize> = (0..n).collect();
    while !live.is_empty() {
        let pivot = live.iter().copied().find(|&k| !a.get(k, k).is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = live
                    .iter()
                    .flat_map(|&i| live.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a.get(i, j).is_zero());
                let Some((i, j)) = pair else {
                    sig.n0 += live.len();
                    break;
                };
                // e_i += conj(a_ij) e_j makes the new a_ii = 2 |a_ij|^2
                let coef = a.get(i, j).conj();
                add_congruence(&mut a, i, j, &coef);
                i
            }
        };
        let d = a.get(p, p).clone();
        let re = d.to_complex().re;
        if re.abs() < 1e-12 {
            return Err(Error::Conditioning(format!("pivot {d} too close to zero to sign")));
        }
        if re > 0.0 {
            sig.n_plus += 1;
        } else {
            sig.n_minus += 1;
        }
        let dinv = d.inv()?;
        for &k in &live {
            if k != p && !a.get(p, k).is_zero() {
                let coef = -(&(a.get(p, k) * &dinv));
                add_congruence(&mut a, k, p, &coef);
            }
        }
        live.retain(|&k| k != p);
    }
    Ok(sig)
}

/// `e_i <- e_i + coef * e_j` applied as a congruence `E^H A E`.
fn add_congruence(a: &mut Matrix, i: usize, j: usize, coef: &Cyclotomic) {
    let n = a.nrows();
    for r in 0..n {
        let v = a.get(r, i) + &(a.get(r, j) * coef);
        a.set(r, i, v);
    }
    let cc = coef.conj();
    for c in 0..n {
        let v = a.get(i, c) + &(&cc * a.get(j, c));
        a.set(i, c, v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryClass {
    Trivial,
    Degenerate,
    Euclidean(Sign),
    Spherical(Sign),
    Hyperbolic,
}

impl GeometryClass {
    pub fn from_signature(sig: &Signature) -> Result<Self> {
        Ok(match (sig.n0, sig.n_plus, sig.n_minus) {
            (0, 2, 0) => GeometryClass::Spherical(Sign::Plus),
            (0, 0, 2) => GeometryClass::Spherical(Sign::Minus),
            (1, 1, 0) => GeometryClass::Euclidean(Sign::Plus),
            (1, 0, 1) => GeometryClass::Euclidean(Sign::Minus),
            (0, 1, 1) => GeometryClass::Hyperbolic,
            (n0, _, _) if n0 >= 2 => GeometryClass::Degenerate,
            _ => return Err(Error::Consistency(format!("no geometry for signature {sig}"))),
        })
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self, GeometryClass::Spherical(_))
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, GeometryClass::Euclidean(_))
    }

    pub fn has_triangle(&self) -> bool {
        matches!(
            self,
            GeometryClass::Spherical(_) | GeometryClass::Euclidean(_) | GeometryClass::Hyperbolic
        )
    }
}

impl fmt::Display for GeometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |s: &Sign| if *s == Sign::Plus { "+" } else { "-" };
        match self {
            GeometryClass::Trivial => write!(f, "Trivial"),
            GeometryClass::Degenerate => write!(f, "Degenerate"),
            GeometryClass::Euclidean(sg) => write!(f, "Euclidean({})", s(sg)),
            GeometryClass::Spherical(sg) => write!(f, "Spherical({})", s(sg)),
            GeometryClass::Hyperbolic => write!(f, "Hyperbolic"),
        }
    }
}

impl FromStr for GeometryClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Trivial" => GeometryClass::Trivial,
            "Degenerate" => GeometryClass::Degenerate,
            "Euclidean(+)" => GeometryClass::Euclidean(Sign::Plus),
            "Euclidean(-)" => GeometryClass::Euclidean(Sign::Minus),
            "Spherical(+)" => GeometryClass::Spherical(Sign::Plus),
            "Spherical(-)" => GeometryClass::Spherical(Sign::Minus),
            "Hyperbolic" => GeometryClass::Hyperbolic,
            _ => return Err(Error::InvalidInput(format!("unknown geometry class {s:?}"))),
        })
    }
}

impl Serialize for GeometryClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GeometryClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn geometry_from_turns(turns: &[RationalTurn; 4]) -> Result<GeometryClass> {
    if turns.iter().all(|t| t.is_zero()) {
        return Ok(GeometryClass::Trivial);
    }
    GeometryClass::from_signature(&signature_from_turns(turns)?)
}

pub fn geometry_class(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> Result<GeometryClass> {
    geometry_from_turns(&CharContext::turns_of(group, tuple, character))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Elliptic,
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleVertex {
    /// zero-based indices `(a, b)` of the product `rho(g_a g_b)` governing the vertex
    pub pair: (usize, usize),
    /// interior angle as a multiple of pi
    pub angle: Fraction,
    /// turn of `rho(g_a g_b)`
    pub rotation_turn: RationalTurn,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleData {
    pub geometry: GeometryClass,
    pub vertices: Vec<TriangleVertex>,
    pub angle_sum: Fraction,
}

impl TriangleData {
    pub fn sorted_angles(&self) -> Vec<Fraction> {
        let mut a: Vec<Fraction> = self.vertices.iter().map(|v| v.angle).collect();
        a.sort();
        a
    }
}

pub fn triangle_from_turns(turns: &[RationalTurn; 4]) -> Result<TriangleData> {
    let geometry = geometry_from_turns(turns)?;
    let t: Vec<Fraction> = turns.iter().map(|&x| Fraction::from(x)).collect();
    let vertex = |a: usize, b: usize, angle: Fraction| {
        let rotation_turn = turns[a] + turns[b];
        TriangleVertex {
            pair: (a, b),
            angle,
            rotation_turn,
            kind: if rotation_turn.is_zero() {
                VertexKind::Parabolic
            } else {
                VertexKind::Elliptic
            },
        }
    };
    let vertices = match geometry {
        GeometryClass::Spherical(_) | GeometryClass::Hyperbolic => [(0, 1), (1, 2), (0, 2)]
            .into_iter()
            .map(|(a, b)| vertex(a, b, (Fraction::one() - (t[a] + t[b])).abs()))
            .collect::<Vec<_>>(),
        GeometryClass::Euclidean(_) => {
            let zero = turns.iter().position(|x| x.is_zero()).expect("one unit value");
            let rest: Vec<usize> = (0..4).filter(|&j| j != zero).collect();
            let small = rest.iter().map(|&j| t[j]).sum::<Fraction>() == Fraction::one();
            rest.iter()
                .map(|&j| {
                    let angle = if small { t[j] } else { Fraction::one() - t[j] };
                    vertex(j.min(zero), j.max(zero), angle)
                })
                .collect()
        }
        GeometryClass::Trivial | GeometryClass::Degenerate => {
            return Err(Error::Domain(format!("no triangle for geometry {geometry}")));
        }
    };
    let angle_sum = vertices.iter().map(|v| v.angle).sum();
    Ok(TriangleData {
        geometry,
        vertices,
        angle_sum,
    })
}

pub fn triangle_data(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> Result<TriangleData> {
    triangle_from_turns(&CharContext::turns_of(group, tuple, character))
}
