//! Relative cochains of `(M, Sigma)`, the isotypic pieces `H^1(rho)` and the
//! restriction map to absolute cohomology.
//!
//! A 1-cochain `m` is packed into four group-algebra elements
//! `a = sum_g m(e1[g]) g^{-1}`, and likewise `b, c, d` for `e2, e3, e4`, so the
//! table entry at `u` is the value on the edge labelled `-u`. With this packing
//! the coboundary is `(a+b+c+d, a + g2 b + (g2+g3) c + (g2+g3+g4) d)` where
//! multiplying by `h` shifts a table by `h`.
//!
//! On the `rho`-isotypic piece a cochain has tables `x_j * conj(rho(u))`; the
//! scalars `(a, b, c, d)` are its coordinates.

use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::abelian::{
    enumerate_characters, root_of_unity, AbelianGroup, Character, Cyclotomic, Field,
    GroupElement, RationalTurn,
};
use crate::error::{Error, Result};
use crate::exact::{field_for, Matrix};
use crate::surface::BranchTuple;

/// A character on a fixed surface together with its exact values.
#[derive(Debug, Clone)]
pub struct CharContext {
    pub group: AbelianGroup,
    pub tuple: BranchTuple,
    pub character: Character,
    pub field: Field,
    pub turns: [RationalTurn; 4],
}

impl CharContext {
    pub fn new(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> Self {
        let turns = Self::turns_of(group, tuple, character);
        Self {
            group: group.clone(),
            tuple: tuple.clone(),
            character: character.clone(),
            field: field_for(group),
            turns,
        }
    }

    /// Turns of `rho(g_1), ..., rho(g_4)` without building the field.
    pub fn turns_of(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> [RationalTurn; 4] {
        [0, 1, 2, 3].map(|j| character.value(group, tuple.get(j)))
    }

    /// `rho(x)`
    pub fn root(&self, x: &GroupElement) -> Cyclotomic {
        root_of_unity(self.character.value(&self.group, x), &self.field)
            .expect("field order is a multiple of the exponent")
    }

    /// `rho(g_{j+1})`
    pub fn rho(&self, j: usize) -> Cyclotomic {
        root_of_unity(self.turns[j], &self.field).expect("field order is a multiple of the exponent")
    }

    /// `rho` of the sum of the listed zero-based branch indices.
    pub fn rho_sum(&self, js: &[usize]) -> Cyclotomic {
        let t = js.iter().fold(RationalTurn::ZERO, |acc, &j| acc + self.turns[j]);
        root_of_unity(t, &self.field).expect("field order is a multiple of the exponent")
    }

    pub fn is_trivial(&self) -> bool {
        self.character.is_trivial()
    }

    pub fn int(&self, n: i64) -> Cyclotomic {
        Cyclotomic::from_int(&self.field, n)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(&self.group, &self.tuple, &self.character.conjugate(&self.group))
    }
}

/// Four coefficient tables over `G` in the packing described in the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct CochainVector<S> {
    pub tables: [Vec<S>; 4],
}

impl<S: Clone> CochainVector<S> {
    /// Packs edge values `m(e^j[g])`, each indexed by `g`.
    pub fn from_edge_values(group: &AbelianGroup, values: &[Vec<S>; 4]) -> Self {
        let flip = |v: &Vec<S>| -> Vec<S> {
            group
                .elements()
                .map(|u| v[group.index_of(&group.neg(&u))].clone())
                .collect()
        };
        Self {
            tables: [flip(&values[0]), flip(&values[1]), flip(&values[2]), flip(&values[3])],
        }
    }

    /// Inverse of [`CochainVector::from_edge_values`].
    pub fn edge_values(&self, group: &AbelianGroup) -> [Vec<S>; 4] {
        // the packing is an involution on indices
        Self::from_edge_values(group, &self.tables).tables
    }
}

/// Both components of the coboundary, as tables over `G`.
pub fn coboundary<S>(group: &AbelianGroup, tuple: &BranchTuple, m: &CochainVector<S>) -> [Vec<S>; 2]
where
    S: Clone + Add<Output = S>,
{
    let offsets = tuple.top_offsets(group);
    let [a, b, c, d] = &m.tables;
    let first = (0..group.order())
        .map(|u| a[u].clone() + b[u].clone() + c[u].clone() + d[u].clone())
        .collect();
    let second = group
        .elements()
        .map(|u| {
            let at = |t: &Vec<S>, o: &GroupElement| t[group.index_of(&group.sub(&u, o))].clone();
            at(a, &offsets[0]) + at(b, &offsets[1]) + at(c, &offsets[2]) + at(d, &offsets[3])
        })
        .collect();
    [first, second]
}

/// Cochain with tables `x_j * conj(rho(u))`.
pub fn embed(ctx: &CharContext, x: &[Cyclotomic]) -> CochainVector<Cyclotomic> {
    let conj: Vec<Cyclotomic> = ctx.group.elements().map(|u| ctx.root(&u).conj()).collect();
    let table = |j: usize| conj.iter().map(|c| &x[j] * c).collect::<Vec<_>>();
    CochainVector {
        tables: [table(0), table(1), table(2), table(3)],
    }
}

/// The two equations cutting out `H^1(rho)` inside the isotypic cochains.
pub fn constraint_matrix(ctx: &CharContext) -> Matrix {
    let one = ctx.int(1);
    Matrix::from_rows(
        &ctx.field,
        vec![
            vec![one.clone(), one.clone(), one.clone(), one.clone()],
            vec![one, ctx.rho(1), ctx.rho_sum(&[1, 2]), ctx.rho_sum(&[1, 2, 3])],
        ],
    )
}

#[derive(Debug, Clone)]
pub struct IsotypicSummand {
    pub character: Character,
    pub turns: [RationalTurn; 4],
    pub dimension: usize,
    pub basis: Vec<Vec<Cyclotomic>>,
    pub h1_a: Option<Vec<Cyclotomic>>,
    pub h1_a_prime: Option<Vec<Cyclotomic>>,
}

impl IsotypicSummand {
    /// Basis vectors as the columns of a `4 x dim` matrix.
    pub fn basis_matrix(&self, field: &Field) -> Matrix {
        Matrix::from_columns(field, &self.basis)
    }
}

/// `(rho(g2) - rho(g1)^{-1}, rho(g1)^{-1} - 1, 0, 1 - rho(g2))`
pub fn h1_a_vector(ctx: &CharContext) -> Vec<Cyclotomic> {
    let r1_inv = ctx.rho(0).conj();
    let r2 = ctx.rho(1);
    let one = ctx.int(1);
    vec![&r2 - &r1_inv, &r1_inv - &one, Cyclotomic::zero(&ctx.field), &one - &r2]
}

/// `(0, rho(g2+g3+g4) - rho(g2+g3), rho(g2) - rho(g2+g3+g4), rho(g2+g3) - rho(g2))`
pub fn h1_a_prime_vector(ctx: &CharContext) -> Vec<Cyclotomic> {
    let r2 = ctx.rho(1);
    let r23 = ctx.rho_sum(&[1, 2]);
    let r234 = ctx.rho_sum(&[1, 2, 3]);
    vec![Cyclotomic::zero(&ctx.field), &r234 - &r23, &r2 - &r234, &r23 - &r2]
}

pub fn isotypic_basis(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> IsotypicSummand {
    isotypic_basis_ctx(&CharContext::new(group, tuple, character))
}

pub fn isotypic_basis_ctx(ctx: &CharContext) -> IsotypicSummand {
    let int_vec = |v: [i64; 4]| v.iter().map(|&x| ctx.int(x)).collect::<Vec<_>>();
    let (basis, h1_a, h1_a_prime) = if ctx.is_trivial() {
        (
            vec![int_vec([1, -1, 0, 0]), int_vec([0, 1, -1, 0]), int_vec([0, 0, 1, -1])],
            None,
            None,
        )
    } else if !ctx.rho_sum(&[0, 1]).is_one() {
        let a = h1_a_vector(ctx);
        let ap = h1_a_prime_vector(ctx);
        (vec![a.clone(), ap.clone()], Some(a), Some(ap))
    } else {
        (constraint_matrix(ctx).kernel(), None, None)
    };
    IsotypicSummand {
        character: ctx.character.clone(),
        turns: ctx.turns,
        dimension: basis.len(),
        basis,
        h1_a,
        h1_a_prime,
    }
}

pub fn total_dimension(group: &AbelianGroup, tuple: &BranchTuple) -> usize {
    enumerate_characters(group)
        .iter()
        .map(|chi| isotypic_basis(group, tuple, chi).dimension)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionCase {
    /// two or four branch values equal 1: restriction vanishes
    Case1,
    /// exactly one branch value equals 1: one-dimensional kernel, non-split
    Case2,
    /// no branch value equals 1: restriction is bijective
    Case3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionClass {
    pub case: RestrictionCase,
    pub unit_count: usize,
    pub abs_dim: usize,
    pub splits: bool,
    /// zero-based `j` with `rho(g_j) = 1` in Case2; selects the kernel vector
    pub unit_index: Option<usize>,
    /// kernel of the restriction in `(a, b, c, d)` coordinates, Case2 only
    pub kernel: Option<[i64; 4]>,
}

/// Coboundary of the function on the vertices over `z_{j+1}`: `+1` on the edge
/// ending there and `-1` on the edge starting there.
pub fn rel_vector(j: usize) -> [i64; 4] {
    match j {
        0 => [1, 0, 0, -1],
        1 => [1, -1, 0, 0],
        2 => [0, 1, -1, 0],
        _ => [0, 0, 1, -1],
    }
}

pub fn restriction_classify(group: &AbelianGroup, tuple: &BranchTuple, character: &Character) -> RestrictionClass {
    let units: Vec<usize> = (0..4)
        .filter(|&j| character.value(group, tuple.get(j)).is_zero())
        .collect();
    match units.len() {
        1 => RestrictionClass {
            case: RestrictionCase::Case2,
            unit_count: 1,
            abs_dim: 1,
            splits: false,
            unit_index: Some(units[0]),
            kernel: Some(rel_vector(units[0])),
        },
        0 => RestrictionClass {
            case: RestrictionCase::Case3,
            unit_count: 0,
            abs_dim: 2,
            splits: true,
            unit_index: None,
            kernel: None,
        },
        n => RestrictionClass {
            // three units force the fourth
            case: RestrictionCase::Case1,
            unit_count: n,
            abs_dim: 0,
            splits: true,
            unit_index: None,
            kernel: None,
        },
    }
}

/// Why branch index `i` cannot carry a Case2 character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitClause {
    /// `<g_i>` contains `g_j`
    ContainsOther { i: usize, j: usize },
    /// `G / <g_i>` is the Klein four group
    KleinQuotient { i: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitWitness {
    Certificate(Vec<SplitClause>),
    Case2Character { character: Character, unit_index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelSplit {
    pub splits: bool,
    pub witness: SplitWitness,
}

/// Subgroup criterion: for every `i`, `<g_i>` contains another `g_j` or the
/// quotient by it is `(Z/2)^2`. Returns the failing index on `Err`.
pub fn subgroup_split_criterion(group: &AbelianGroup, tuple: &BranchTuple) -> std::result::Result<Vec<SplitClause>, usize> {
    let mut clauses = Vec::new();
    for i in 0..4 {
        let span = group.subgroup_elements(std::slice::from_ref(tuple.get(i)));
        if let Some(j) = (0..4).find(|&j| j != i && span.contains(tuple.get(j))) {
            clauses.push(SplitClause::ContainsOther { i, j });
        } else if group.quotient(std::slice::from_ref(tuple.get(i))).moduli() == [2, 2] {
            clauses.push(SplitClause::KleinQuotient { i });
        } else {
            return Err(i);
        }
    }
    Ok(clauses)
}

/// Whether the restriction map splits on all of `H^1(M, Sigma)`, decided both
/// by scanning characters and by the subgroup criterion.
pub fn global_rel_split(group: &AbelianGroup, tuple: &BranchTuple) -> Result<RelSplit> {
    let witness = enumerate_characters(group).into_iter().find_map(|chi| {
        let class = restriction_classify(group, tuple, &chi);
        class.unit_index.map(|j| (chi, j))
    });
    let by_subgroups = subgroup_split_criterion(group, tuple);
    match (witness, by_subgroups) {
        (None, Ok(clauses)) => Ok(RelSplit {
            splits: true,
            witness: SplitWitness::Certificate(clauses),
        }),
        (Some((character, unit_index)), Err(_)) => Ok(RelSplit {
            splits: false,
            witness: SplitWitness::Case2Character { character, unit_index },
        }),
        (Some((character, _)), Ok(_)) => Err(Error::Consistency(format!(
            "subgroup criterion says split but {character} is a Case2 character on {tuple}"
        ))),
        (None, Err(i)) => Err(Error::Consistency(format!(
            "subgroup criterion fails at g{} but no Case2 character exists on {tuple}",
            i + 1
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::character_from_turns;

    fn cyclic(n: i64, t: [i64; 4]) -> (AbelianGroup, BranchTuple) {
        let g = AbelianGroup::cyclic(n);
        let tuple = BranchTuple::new(&g, t.map(|x| GroupElement(vec![x]))).unwrap();
        (g, tuple)
    }

    fn chi(g: &AbelianGroup, a: i64) -> Character {
        Character::new(g, &[a]).unwrap()
    }

    #[test]
    fn coboundary_of_identity_indicator_on_z2() {
        let (g, t) = cyclic(2, [1, 1, 1, 1]);
        let m = CochainVector {
            tables: [vec![1i64, 0], vec![0, 0], vec![0, 0], vec![0, 0]],
        };
        let [x, y] = coboundary(&g, &t, &m);
        assert_eq!(x, vec![1, 0]);
        assert_eq!(y, vec![1, 0]);
        let zero = CochainVector { tables: [vec![0i64; 2], vec![0; 2], vec![0; 2], vec![0; 2]] };
        assert_eq!(coboundary(&g, &t, &zero), [vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn packing_round_trip() {
        let g = AbelianGroup::cyclic(5);
        let vals: [Vec<i64>; 4] = std::array::from_fn(|j| (0..5).map(|i| 10 * j as i64 + i).collect());
        let packed = CochainVector::from_edge_values(&g, &vals);
        assert_eq!(packed.tables[0][1], 4);
        assert_eq!(packed.edge_values(&g), vals);
    }

    #[test]
    fn basis_vectors_are_exact_cocycles() {
        for (g, t) in [cyclic(4, [1, 1, 1, 1]), cyclic(6, [1, 1, 1, 3]), cyclic(3, [0, 1, 1, 1]), cyclic(8, [1, 1, 1, 5])] {
            for c in enumerate_characters(&g) {
                let ctx = CharContext::new(&g, &t, &c);
                let s = isotypic_basis_ctx(&ctx);
                assert_eq!(s.dimension, if c.is_trivial() { 3 } else { 2 });
                assert_eq!(s.basis_matrix(&ctx.field).rank(), s.dimension);
                for v in &s.basis {
                    assert!(constraint_matrix(&ctx).mul_vec(v).iter().all(Cyclotomic::is_zero));
                    // the embedded cochain is closed on every square
                    let [x, y] = coboundary(&g, &t, &embed(&ctx, v));
                    assert!(x.iter().chain(&y).all(Cyclotomic::is_zero));
                }
            }
        }
    }

    #[test]
    fn wollmilchsau_i_has_dimension_two() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        assert_eq!(isotypic_basis(&g, &t, &chi(&g, 1)).dimension, 2);
        assert_eq!(isotypic_basis(&g, &t, &chi(&g, 0)).dimension, 3);
    }

    #[test]
    fn h1_a_collapses_to_shear_direction_when_rho_g2_is_one() {
        // Z/6 with g = (1,3,...) and a character trivial on g2 = 3: rho(1) = e^{2 pi i/3}
        let (g, t) = cyclic(6, [1, 3, 1, 1]);
        let c = chi(&g, 2);
        let ctx = CharContext::new(&g, &t, &c);
        assert!(ctx.rho(1).is_one());
        let a = isotypic_basis_ctx(&ctx).h1_a.unwrap();
        assert!((&a[0] + &a[1]).is_zero());
        assert!(!a[0].is_zero() && a[2].is_zero() && a[3].is_zero());
    }

    #[test]
    fn total_dimensions() {
        let (g4, t4) = cyclic(4, [1, 1, 1, 1]);
        assert_eq!(total_dimension(&g4, &t4), 9);
        let (g6, t6) = cyclic(6, [1, 1, 1, 3]);
        assert_eq!(total_dimension(&g6, &t6), 13);
        let g1 = AbelianGroup::trivial();
        let t1 = BranchTuple::new(&g1, std::array::from_fn(|_| g1.zero())).unwrap();
        assert_eq!(total_dimension(&g1, &t1), 3);
    }

    #[test]
    fn restriction_cases() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        let r = restriction_classify(&g, &t, &chi(&g, 1));
        assert_eq!((r.case, r.abs_dim, r.splits), (RestrictionCase::Case3, 2, true));
        let r = restriction_classify(&g, &t, &chi(&g, 0));
        assert_eq!((r.case, r.abs_dim), (RestrictionCase::Case1, 0));

        let (g, t) = cyclic(3, [0, 1, 1, 1]);
        let r = restriction_classify(&g, &t, &chi(&g, 1));
        assert_eq!((r.case, r.abs_dim, r.splits), (RestrictionCase::Case2, 1, false));
        assert_eq!(r.kernel, Some([1, 0, 0, -1]));

        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        let c = chi(&g, 2);
        let turns: Vec<String> = (0..4).map(|j| c.value(&g, t.get(j)).to_string()).collect();
        assert_eq!(turns, ["1/3", "1/3", "1/3", "0"]);
        assert_eq!(restriction_classify(&g, &t, &c).case, RestrictionCase::Case2);
    }

    #[test]
    fn case2_kernel_is_in_the_summand() {
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        for c in enumerate_characters(&g) {
            let r = restriction_classify(&g, &t, &c);
            if let Some(k) = r.kernel {
                let ctx = CharContext::new(&g, &t, &c);
                let v: Vec<Cyclotomic> = k.iter().map(|&x| ctx.int(x)).collect();
                assert!(constraint_matrix(&ctx).mul_vec(&v).iter().all(Cyclotomic::is_zero));
            }
        }
    }

    #[test]
    fn rel_split_examples() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        assert!(global_rel_split(&g, &t).unwrap().splits);
        let (g, t) = cyclic(3, [0, 1, 1, 1]);
        let r = global_rel_split(&g, &t).unwrap();
        assert!(!r.splits);
        assert!(matches!(r.witness, SplitWitness::Case2Character { .. }));
        let k = AbelianGroup::new(vec![2, 2]).unwrap();
        let t = BranchTuple::from_coords(&k, [&[1, 0], &[0, 1], &[1, 0], &[0, 1]]).unwrap();
        assert!(global_rel_split(&k, &t).unwrap().splits);
    }

    #[test]
    fn prop_character_has_no_unit_values() {
        let (g, gens) = crate::abelian::canonicalize_subgroup(
            &[120, 120, 120],
            &[vec![20, 0, 0], vec![0, 15, 0], vec![0, 0, 12], vec![100, 105, 108]],
        )
        .unwrap();
        let t = BranchTuple::new(&g, gens.try_into().unwrap()).unwrap();
        let turns = ["1/6", "1/8", "1/10", "73/120"].map(|s| s.parse().unwrap());
        let c = character_from_turns(&g, t.elems(), &turns).unwrap();
        let ctx = CharContext::new(&g, &t, &c);
        let s = isotypic_basis_ctx(&ctx);
        for v in &s.basis {
            assert!(constraint_matrix(&ctx).mul_vec(v).iter().all(Cyclotomic::is_zero));
        }
        assert_eq!(restriction_classify(&g, &t, &c).case, RestrictionCase::Case3);
    }
}
