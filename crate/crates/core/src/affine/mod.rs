//! Basic affine maps between covers, paths of them, and their actions.
//!
//! An edge `source -> target` labelled by a move is the affine map
//! `M(source) -> M(target)`. Its pullback sends `(a, b, c, d)`-coordinates on
//! the target to coordinates on the source and is written with `h` the target
//! tuple. Along a path the pullback is the product of the edge pullbacks in
//! traversal order and the derivative is the product in reverse order.

pub mod algebra;
pub mod gamma;
pub mod graph;

use std::fmt;

use crate::abelian::{AbelianGroup, Character, Cyclotomic, GroupAutomorphism, GroupElement};
use crate::cohomology::CharContext;
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::surface::BranchTuple;

use algebra::{AlgMatrix, GroupRing};

pub use gamma::{
    aff_equals_gamma_sufficient, gamma_generators, projectively_parabolic, AffGammaVerdict,
    GammaOneGenerators,
};
pub use graph::{affine_generators, build_tuple_graph, realized_automorphisms, GraphEdge, TupleGraph};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    /// rotation by a quarter turn
    T,
    /// horizontal shear
    S,
    /// exchange of the two layers
    F,
    /// deck transformation
    R(GroupElement),
    /// relabelling by an automorphism
    M(GroupAutomorphism),
}

impl Move {
    pub fn label(&self) -> String {
        match self {
            Move::T => "t".into(),
            Move::S => "s".into(),
            Move::F => "f".into(),
            Move::R(g) => format!("r[{g}]"),
            Move::M(psi) => format!("m{psi}"),
        }
    }

    pub fn derivative(&self) -> Derivative {
        match self {
            Move::T => Derivative::new([[0, -1], [1, 0]]),
            Move::S => Derivative::new([[1, -1], [0, 1]]),
            _ => Derivative::identity(),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Unique source of the edge labelled `mv` ending at `target`.
pub fn move_source(group: &AbelianGroup, mv: &Move, target: &BranchTuple) -> BranchTuple {
    let [h1, h2, h3, h4] = target.elems().clone();
    let elems = match mv {
        Move::T => [h2, h3, h4, h1],
        Move::S => [h2, h1, h3, h4],
        Move::F => [h2, h1, h4, h3],
        Move::R(_) => [h1, h2, h3, h4],
        Move::M(psi) => {
            let inv = psi.inverse(group);
            [h1, h2, h3, h4].map(|h| inv.apply(group, &h))
        }
    };
    BranchTuple::from_elems_unchecked(elems)
}

/// Integer 2x2 matrix up to sign, normalised so the first nonzero entry is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Derivative(pub [[i64; 2]; 2]);

impl Derivative {
    pub fn new(m: [[i64; 2]; 2]) -> Self {
        Self(m).canonical()
    }

    pub fn identity() -> Self {
        Self([[1, 0], [0, 1]])
    }

    fn canonical(self) -> Self {
        let first = self.0.iter().flatten().copied().find(|&x| x != 0).unwrap_or(1);
        if first < 0 {
            Self(self.0.map(|r| r.map(|x| -x)))
        } else {
            self
        }
    }

    pub fn mul(&self, other: &Derivative) -> Derivative {
        let (a, b) = (self.0, other.0);
        Derivative::new([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    /// Inverse of a determinant `+-1` matrix.
    pub fn inverse(&self) -> Derivative {
        let [[a, b], [c, d]] = self.0;
        let det = a * d - b * c;
        Derivative::new([[d * det, -b * det], [-c * det, a * det]])
    }
}

impl fmt::Display for Derivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// Pullback of the edge labelled `mv` into `target`, for the character `ctx`
/// on the target, in `(a, b, c, d)`-coordinates.
pub fn move_pullback(mv: &Move, ctx: &CharContext) -> Matrix {
    let f = &ctx.field;
    let z = || Cyclotomic::zero(f);
    let one = || Cyclotomic::one(f);
    let rows = match mv {
        Move::T => vec![
            vec![z(), one(), z(), z()],
            vec![z(), z(), one(), z()],
            vec![z(), z(), z(), one()],
            vec![one(), z(), z(), z()],
        ],
        Move::S => {
            let r1 = ctx.rho(0);
            vec![
                vec![-&r1, z(), z(), z()],
                vec![one(), one(), z(), z()],
                vec![z(), z(), one(), z()],
                vec![r1, z(), z(), one()],
            ]
        }
        Move::F => vec![
            vec![-&one(), z(), z(), z()],
            vec![z(), z(), z(), -&ctx.rho_sum(&[1, 2, 3])],
            vec![z(), z(), -&ctx.rho_sum(&[1, 2]), z()],
            vec![z(), -&ctx.rho(1), z(), z()],
        ],
        Move::R(g) => return Matrix::scalar(f, 4, &ctx.root(g)),
        Move::M(_) => return Matrix::identity(f, 4),
    };
    Matrix::from_rows(f, rows)
}

/// Pullback on packed cochains over `Z[G]`; `None` for relabelling moves,
/// which are not `Z[G]`-linear.
pub fn move_pullback_algebra(ring: &GroupRing, mv: &Move, target: &BranchTuple) -> Option<AlgMatrix> {
    let group = ring.group();
    let e = group.zero();
    let [h1, h2, h3, h4] = target.elems();
    let m = match mv {
        Move::T => AlgMatrix::sparse(ring, &[(0, 1, e.clone(), 1), (1, 2, e.clone(), 1), (2, 3, e.clone(), 1), (3, 0, e, 1)]),
        Move::S => AlgMatrix::sparse(
            ring,
            &[(0, 0, h1.clone(), -1), (1, 0, e.clone(), 1), (1, 1, e.clone(), 1), (2, 2, e.clone(), 1), (3, 0, h1.clone(), 1), (3, 3, e, 1)],
        ),
        Move::F => {
            let h23 = group.add(h2, h3);
            let h234 = group.add(&h23, h4);
            AlgMatrix::sparse(ring, &[(0, 0, e, -1), (1, 3, h234, -1), (2, 2, h23, -1), (3, 1, h2.clone(), -1)])
        }
        Move::R(g) => AlgMatrix::sparse(ring, &[(0, 0, g.clone(), 1), (1, 1, g.clone(), 1), (2, 2, g.clone(), 1), (3, 3, g.clone(), 1)]),
        Move::M(_) => return None,
    };
    Some(m)
}

/// Explicit inverse of [`move_pullback_algebra`].
pub fn move_pullback_algebra_inverse(ring: &GroupRing, mv: &Move, target: &BranchTuple) -> Option<AlgMatrix> {
    let group = ring.group();
    let e = group.zero();
    let [h1, h2, h3, h4] = target.elems();
    let m = match mv {
        Move::T => AlgMatrix::sparse(ring, &[(0, 3, e.clone(), 1), (1, 0, e.clone(), 1), (2, 1, e.clone(), 1), (3, 2, e, 1)]),
        Move::S => {
            let h1i = group.neg(h1);
            AlgMatrix::sparse(
                ring,
                &[(0, 0, h1i.clone(), -1), (1, 0, h1i, 1), (1, 1, e.clone(), 1), (2, 2, e.clone(), 1), (3, 0, e.clone(), 1), (3, 3, e, 1)],
            )
        }
        Move::F => {
            let h23 = group.add(h2, h3);
            let h234 = group.add(&h23, h4);
            AlgMatrix::sparse(
                ring,
                &[(0, 0, e, -1), (1, 3, group.neg(h2), -1), (2, 2, group.neg(&h23), -1), (3, 1, group.neg(&h234), -1)],
            )
        }
        Move::R(g) => {
            let gi = group.neg(g);
            AlgMatrix::sparse(ring, &[(0, 0, gi.clone(), 1), (1, 1, gi.clone(), 1), (2, 2, gi.clone(), 1), (3, 3, gi, 1)])
        }
        Move::M(_) => return None,
    };
    Some(m)
}

/// One traversal of a labelled edge, along or against its direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub mv: Move,
    pub source: BranchTuple,
    pub target: BranchTuple,
    pub forward: bool,
}

impl Step {
    pub fn from_tuple(&self) -> &BranchTuple {
        if self.forward {
            &self.source
        } else {
            &self.target
        }
    }

    pub fn to_tuple(&self) -> &BranchTuple {
        if self.forward {
            &self.target
        } else {
            &self.source
        }
    }

    pub fn reversed(&self) -> Step {
        Step {
            forward: !self.forward,
            ..self.clone()
        }
    }
}

/// A path of basic moves starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineWord {
    pub start: BranchTuple,
    pub steps: Vec<Step>,
}

impl AffineWord {
    pub fn identity(start: &BranchTuple) -> Self {
        Self {
            start: start.clone(),
            steps: Vec::new(),
        }
    }

    /// Single edge traversed forward from its source.
    pub fn edge(group: &AbelianGroup, mv: Move, target: &BranchTuple) -> Self {
        let source = move_source(group, &mv, target);
        Self {
            start: source.clone(),
            steps: vec![Step {
                mv,
                source,
                target: target.clone(),
                forward: true,
            }],
        }
    }

    pub fn end(&self) -> &BranchTuple {
        self.steps.last().map_or(&self.start, Step::to_tuple)
    }

    pub fn is_loop(&self) -> bool {
        self.end() == &self.start
    }

    pub fn is_path(&self) -> bool {
        let mut at = &self.start;
        for s in &self.steps {
            if s.from_tuple() != at {
                return false;
            }
            at = s.to_tuple();
        }
        true
    }

    pub fn inverse(&self) -> Self {
        Self {
            start: self.end().clone(),
            steps: self.steps.iter().rev().map(Step::reversed).collect(),
        }
    }

    /// Traverse `self`, then `then`.
    pub fn then(&self, then: &AffineWord) -> Result<Self> {
        if then.start != *self.end() {
            return Err(Error::InvalidInput(format!(
                "cannot continue a path ending at {} with one starting at {}",
                self.end(),
                then.start
            )));
        }
        let mut steps = self.steps.clone();
        steps.extend(then.steps.iter().cloned());
        Ok(Self {
            start: self.start.clone(),
            steps,
        })
    }

    /// `w1 o w2`: traverse `w2` first.
    pub fn compose(w1: &AffineWord, w2: &AffineWord) -> Result<Self> {
        w2.then(w1)
    }

    pub fn derivative(&self) -> Derivative {
        self.steps.iter().fold(Derivative::identity(), |acc, s| {
            let d = s.mv.derivative();
            let d = if s.forward { d } else { d.inverse() };
            d.mul(&acc)
        })
    }

    /// Induced automorphism of the deck group.
    pub fn automorphism(&self, group: &AbelianGroup) -> GroupAutomorphism {
        self.steps.iter().fold(GroupAutomorphism::identity(group), |acc, s| match &s.mv {
            Move::M(psi) if s.forward => psi.compose(group, &acc),
            Move::M(psi) => psi.inverse(group).compose(group, &acc),
            _ => acc,
        })
    }

    /// Pullback along the path for the character `end_character` at the end
    /// vertex; returns the matrix and the character it lands in at the start.
    pub fn pullback(&self, group: &AbelianGroup, end_character: &Character) -> Result<(Matrix, Character)> {
        let mut chi = end_character.clone();
        let mut factors = Vec::with_capacity(self.steps.len());
        for s in self.steps.iter().rev() {
            // chi lives on s.to_tuple(); find it on the edge's target
            let at_target = match (&s.mv, s.forward) {
                (Move::M(psi), false) => chi.compose(group, psi.inverse(group).images()),
                _ => chi.clone(),
            };
            let ctx = CharContext::new(group, &s.target, &at_target);
            let p = move_pullback(&s.mv, &ctx);
            let at_source = match &s.mv {
                Move::M(psi) => at_target.compose(group, psi.images()),
                _ => at_target.clone(),
            };
            if s.forward {
                factors.push(p);
                chi = at_source;
            } else {
                factors.push(p.inverse()?);
                chi = at_target;
            }
        }
        let field = crate::exact::field_for(group);
        let m = factors
            .iter()
            .rev()
            .fold(Matrix::identity(&field, 4), |acc, p| acc.mul(p));
        Ok((m, chi))
    }

    /// Pullback on packed cochains over `Z[G]`; fails for paths with relabelling moves.
    pub fn pullback_algebra(&self, ring: &GroupRing) -> Result<AlgMatrix> {
        self.steps.iter().try_fold(AlgMatrix::identity(ring), |acc, s| {
            let p = if s.forward {
                move_pullback_algebra(ring, &s.mv, &s.target)
            } else {
                move_pullback_algebra_inverse(ring, &s.mv, &s.target)
            };
            let p = p.ok_or_else(|| {
                Error::Capability("relabelling moves act semilinearly on cochains".into())
            })?;
            Ok(acc.mul(ring, &p))
        })
    }

    /// Word in composition order (rightmost step first), each step subscripted
    /// by the target tuple of its edge.
    pub fn to_word_string(&self) -> String {
        if self.steps.is_empty() {
            return format!("id_{}", self.start);
        }
        self.steps
            .iter()
            .rev()
            .map(|s| {
                let inv = if s.forward { "" } else { "^-1" };
                format!("{}_{}{inv}", s.mv.label(), s.target)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for AffineWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word_string())
    }
}

/// Derivative of a word.
pub fn word_derivative(word: &AffineWord) -> Derivative {
    word.derivative()
}

/// Matrix of the pullback on isotypic bases: the `M` with
/// `P * target_basis = source_basis * M`.
pub fn induced_matrix(p: &Matrix, source_basis: &Matrix, target_basis: &Matrix) -> Result<Matrix> {
    let image = p.mul(target_basis);
    let columns = image
        .columns()
        .iter()
        .map(|col| {
            source_basis.solve(col).ok_or_else(|| {
                Error::Consistency("pullback leaves the isotypic summand".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(p.field(), &columns))
}
