//! Lifts of the horizontal and vertical Dehn twists and their closed forms.

use serde::{Deserialize, Serialize};

use crate::abelian::{enumerate_characters, AbelianGroup, Cyclotomic};
use crate::cohomology::{isotypic_basis_ctx, CharContext};
use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::surface::BranchTuple;

use super::algebra::{AlgMatrix, GroupRing};
use super::{induced_matrix, move_source, AffineWord, Move, Step};

/// Characters are checked one by one up to this group order.
pub const GAMMA_CHARACTER_CHECK_BOUND: usize = 128;

#[derive(Debug, Clone)]
pub struct GammaOneGenerators {
    pub gamma1: AffineWord,
    pub gamma2: AffineWord,
    /// closed forms on packed cochains
    pub gamma1_closed: AlgMatrix,
    pub gamma2_closed: AlgMatrix,
}

fn forward(mv: Move, source: &BranchTuple, target: &BranchTuple) -> Step {
    Step {
        mv,
        source: source.clone(),
        target: target.clone(),
        forward: true,
    }
}

/// `gamma1 = s_g s_(g2,g1,g3,g4)`, two shears through the swapped tuple.
pub fn gamma1_word(group: &AbelianGroup, base: &BranchTuple) -> AffineWord {
    let mid = move_source(group, &Move::S, base);
    AffineWord {
        start: base.clone(),
        steps: vec![forward(Move::S, base, &mid), forward(Move::S, &mid, base)],
    }
}

/// `gamma2 = t_g s_(g2,g3,g4,g1) s_(g3,g2,g4,g1) t_g^{-1}`.
pub fn gamma2_word(group: &AbelianGroup, base: &BranchTuple) -> AffineWord {
    let rotated = move_source(group, &Move::T, base);
    let swapped = move_source(group, &Move::S, &rotated);
    let t = forward(Move::T, &rotated, base);
    AffineWord {
        start: base.clone(),
        steps: vec![
            t.reversed(),
            forward(Move::S, &rotated, &swapped),
            forward(Move::S, &swapped, &rotated),
            t,
        ],
    }
}

/// `(g1g2 a, b + a - g1 a, c, d + g1 a - g1g2 a)`
pub fn gamma1_closed_form(ring: &GroupRing, base: &BranchTuple) -> AlgMatrix {
    let group = ring.group();
    let e = group.zero();
    let g1 = base.get(0).clone();
    let g12 = group.add(&g1, base.get(1));
    AlgMatrix::sparse(
        ring,
        &[
            (0, 0, g12.clone(), 1),
            (1, 0, e.clone(), 1),
            (1, 0, g1.clone(), -1),
            (1, 1, e.clone(), 1),
            (2, 2, e.clone(), 1),
            (3, 0, g1, 1),
            (3, 0, g12, -1),
            (3, 3, e, 1),
        ],
    )
}

/// `(a + g2 b - g2g3 b, g2g3 b, c + b - g2 b, d)`
pub fn gamma2_closed_form(ring: &GroupRing, base: &BranchTuple) -> AlgMatrix {
    let group = ring.group();
    let e = group.zero();
    let g2 = base.get(1).clone();
    let g23 = group.add(&g2, base.get(2));
    AlgMatrix::sparse(
        ring,
        &[
            (0, 0, e.clone(), 1),
            (0, 1, g2.clone(), 1),
            (0, 1, g23.clone(), -1),
            (1, 1, g23, 1),
            (2, 1, e.clone(), 1),
            (2, 1, g2, -1),
            (2, 2, e.clone(), 1),
            (3, 3, e, 1),
        ],
    )
}

/// Closed forms evaluated at a character.
pub fn gamma_closed_forms_rho(ctx: &CharContext) -> (Matrix, Matrix) {
    let f = &ctx.field;
    let z = || Cyclotomic::zero(f);
    let one = || Cyclotomic::one(f);
    let r1 = ctx.rho(0);
    let r12 = ctx.rho_sum(&[0, 1]);
    let g1 = Matrix::from_rows(
        f,
        vec![
            vec![r12.clone(), z(), z(), z()],
            vec![&one() - &r1, one(), z(), z()],
            vec![z(), z(), one(), z()],
            vec![&r1 - &r12, z(), z(), one()],
        ],
    );
    let r2 = ctx.rho(1);
    let r23 = ctx.rho_sum(&[1, 2]);
    let g2 = Matrix::from_rows(
        f,
        vec![
            vec![one(), &r2 - &r23, z(), z()],
            vec![z(), r23, z(), z()],
            vec![z(), &one() - &r2, one(), z()],
            vec![z(), z(), z(), one()],
        ],
    );
    (g1, g2)
}

/// Checks the word pullbacks against the closed forms for one character,
/// on all four coordinates and on the isotypic basis.
pub fn verify_gamma_on_character(gens: &GammaOneGenerators, ctx: &CharContext) -> Result<()> {
    let (c1, c2) = gamma_closed_forms_rho(ctx);
    let basis = isotypic_basis_ctx(ctx).basis_matrix(&ctx.field);
    for (name, word, closed) in [("gamma1", &gens.gamma1, c1), ("gamma2", &gens.gamma2, c2)] {
        let (p, chi) = word.pullback(&ctx.group, &ctx.character)?;
        if chi != ctx.character || p != closed {
            return Err(Error::Consistency(format!(
                "{name} word pullback differs from its closed form for {} on {}",
                ctx.character, ctx.tuple
            )));
        }
        let restricted = induced_matrix(&p, &basis, &basis)?;
        let closed_restricted = induced_matrix(&closed, &basis, &basis)?;
        if restricted != closed_restricted {
            return Err(Error::Consistency(format!(
                "{name} restriction to H^1 differs from its closed form for {}",
                ctx.character
            )));
        }
    }
    Ok(())
}

/// Builds both words and checks them against their closed forms exactly.
pub fn gamma_generators(group: &AbelianGroup, base: &BranchTuple) -> Result<GammaOneGenerators> {
    let base = BranchTuple::new(group, base.elems().clone())?;
    let ring = GroupRing::new(group);
    let gens = GammaOneGenerators {
        gamma1: gamma1_word(group, &base),
        gamma2: gamma2_word(group, &base),
        gamma1_closed: gamma1_closed_form(&ring, &base),
        gamma2_closed: gamma2_closed_form(&ring, &base),
    };
    if gens.gamma1.pullback_algebra(&ring)? != gens.gamma1_closed {
        return Err(Error::Consistency(format!(
            "gamma1 word pullback differs from its closed form on cochains of {base}"
        )));
    }
    if gens.gamma2.pullback_algebra(&ring)? != gens.gamma2_closed {
        return Err(Error::Consistency(format!(
            "gamma2 word pullback differs from its closed form on cochains of {base}"
        )));
    }
    if group.order() <= GAMMA_CHARACTER_CHECK_BOUND {
        for chi in enumerate_characters(group) {
            verify_gamma_on_character(&gens, &CharContext::new(group, &base, &chi))?;
        }
    }
    Ok(gens)
}

/// A 2x2 matrix acts parabolically on the projective line: one repeated
/// eigenvalue without being scalar.
pub fn projectively_parabolic(m: &Matrix) -> bool {
    if m.nrows() != 2 || m.ncols() != 2 {
        return false;
    }
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let tr = a + d;
    let det = &(a * d) - &(b * c);
    let four = Cyclotomic::from_int(m.field(), 4);
    let disc = &(&tr * &tr) - &(&four * &det);
    let scalar = b.is_zero() && c.is_zero() && a == d;
    disc.is_zero() && !scalar
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AffGammaVerdict {
    YesByOrders,
    YesByCyclicForm,
    Unknown,
}

/// Sufficient tests for every affine map acting trivially on `G`.
pub fn aff_equals_gamma_sufficient(group: &AbelianGroup, tuple: &BranchTuple) -> AffGammaVerdict {
    let orders = tuple.orders(group);
    let distinct = (0..4).all(|i| (i + 1..4).all(|j| orders[i] != orders[j]));
    if distinct {
        return AffGammaVerdict::YesByOrders;
    }
    if group.is_cyclic() && group.order() >= 4 {
        let n = group.exponent();
        let mut target = vec![1, 1, 1, n - 3];
        target.sort_unstable();
        let units = (1..n).filter(|&u| num_integer::Integer::gcd(&u, &n) == 1);
        for u in units {
            let mut scaled: Vec<i64> = tuple.elems().iter().map(|x| (x.coords()[0] * u).rem_euclid(n)).collect();
            scaled.sort_unstable();
            if scaled == target {
                return AffGammaVerdict::YesByCyclicForm;
            }
        }
    }
    AffGammaVerdict::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{Character, GroupElement};
    use crate::affine::Derivative;

    fn cyclic(n: i64, t: [i64; 4]) -> (AbelianGroup, BranchTuple) {
        let g = AbelianGroup::cyclic(n);
        let tuple = BranchTuple::new(&g, t.map(|x| GroupElement(vec![x]))).unwrap();
        (g, tuple)
    }

    #[test]
    fn words_match_closed_forms() {
        for (g, t) in [cyclic(4, [1, 1, 1, 1]), cyclic(6, [1, 1, 1, 3]), cyclic(3, [0, 1, 1, 1]), cyclic(8, [1, 1, 1, 5])] {
            let gens = gamma_generators(&g, &t).unwrap();
            assert_eq!(gens.gamma1.derivative(), Derivative::new([[1, -2], [0, 1]]));
            assert_eq!(gens.gamma2.derivative(), Derivative::new([[1, 0], [2, 1]]));
            assert!(gens.gamma1.is_loop() && gens.gamma2.is_loop());
        }
    }

    #[test]
    fn word_strings_follow_composition_order() {
        let (g, t) = cyclic(12, [1, 2, 3, 6]);
        let gens = gamma_generators(&g, &t).unwrap();
        assert_eq!(gens.gamma1.to_word_string(), "s_(1,2,3,6) s_(2,1,3,6)");
        assert_eq!(
            gens.gamma2.to_word_string(),
            "t_(1,2,3,6) s_(2,3,6,1) s_(3,2,6,1) t_(1,2,3,6)^-1"
        );
    }

    fn restriction(word: &AffineWord, ctx: &CharContext) -> Matrix {
        let (p, _) = word.pullback(&ctx.group, &ctx.character).unwrap();
        let b = isotypic_basis_ctx(ctx).basis_matrix(&ctx.field);
        induced_matrix(&p, &b, &b).unwrap()
    }

    #[test]
    fn wollmilchsau_gamma1_eigenvalues() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        let gens = gamma_generators(&g, &t).unwrap();
        // rho(1) = i: rho(g1 g2) = -1, eigenvalues {-1, 1}
        let ctx = CharContext::new(&g, &t, &Character::new(&g, &[1]).unwrap());
        let m = restriction(&gens.gamma1, &ctx);
        let tr = m.get(0, 0) + m.get(1, 1);
        let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
        assert!(tr.is_zero());
        assert_eq!(det, ctx.int(-1));
        // rho(1) = -1: parabolic
        let ctx = CharContext::new(&g, &t, &Character::new(&g, &[2]).unwrap());
        assert!(projectively_parabolic(&restriction(&gens.gamma1, &ctx)));
        // trivial: identity
        let ctx = CharContext::new(&g, &t, &Character::trivial(&g));
        let m = restriction(&gens.gamma1, &ctx);
        assert_eq!(m, Matrix::identity(&ctx.field, 3));
        assert_eq!(restriction(&gens.gamma2, &ctx), Matrix::identity(&ctx.field, 3));
    }

    #[test]
    fn sufficient_tests() {
        let (g, t) = cyclic(8, [1, 1, 1, 5]);
        assert_eq!(aff_equals_gamma_sufficient(&g, &t), AffGammaVerdict::YesByCyclicForm);
        let (g, t) = cyclic(8, [3, 3, 3, 7]);
        assert_eq!(aff_equals_gamma_sufficient(&g, &t), AffGammaVerdict::YesByCyclicForm);
        let (g, t) = cyclic(12, [1, 2, 3, 6]);
        assert_eq!(aff_equals_gamma_sufficient(&g, &t), AffGammaVerdict::YesByOrders);
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        assert_eq!(aff_equals_gamma_sufficient(&g, &t), AffGammaVerdict::YesByCyclicForm);
        let (g, t) = cyclic(6, [1, 2, 1, 2]);
        assert_eq!(aff_equals_gamma_sufficient(&g, &t), AffGammaVerdict::Unknown);
    }
}
