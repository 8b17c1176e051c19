use proptest::prelude::*;

use pillowcase::abelian::{canonicalize_subgroup, enumerate_characters, AbelianGroup, GroupElement, RationalTurn};
use pillowcase::affine::{gamma_generators, Derivative};
use pillowcase::backend::{CohomologyBackend, ExactBackend};
use pillowcase::cohomology::{isotypic_basis_ctx, restriction_classify, total_dimension, CharContext, RestrictionCase};
use pillowcase::hodge::{finiteness_lookup, finiteness_tables, hodge_form_matrix, signature_exact};
use pillowcase::surface::{build_surface, geometric_invariants, BranchTuple};

const MODULI: [&[i64]; 10] = [&[2], &[3], &[4], &[5], &[6], &[8], &[2, 2], &[2, 4], &[12], &[2, 6]];

/// A surface over one of a few small groups, or `None` when the sampled
/// elements do not generate.
fn surface() -> impl Strategy<Value = Option<(AbelianGroup, BranchTuple)>> {
    (0..MODULI.len(), prop::collection::vec(0i64..24, 6)).prop_map(|(i, raw)| {
        let moduli = MODULI[i];
        let g = AbelianGroup::new(moduli.to_vec()).unwrap();
        let mut elems: Vec<GroupElement> = raw
            .chunks(2)
            .map(|c| g.reduce(&c[..moduli.len()]))
            .collect();
        let sum = g.sum(elems.iter());
        elems.push(g.neg(&sum));
        BranchTuple::new(&g, elems.try_into().unwrap()).ok().map(|t| (g, t))
    })
}

fn turn() -> impl Strategy<Value = RationalTurn> {
    (1i64..60, 2i64..61).prop_filter_map("proper fraction", |(p, q)| (p < q).then(|| RationalTurn::new(p, q).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn character_values_have_dividing_denominators(s in surface()) {
        let Some((g, _)) = s else { return Ok(()) };
        for chi in enumerate_characters(&g) {
            for x in g.elements() {
                prop_assert_eq!(g.element_order(&x) % chi.value(&g, &x).denom(), 0);
            }
        }
    }

    #[test]
    fn canonicalization_is_idempotent(rows in prop::collection::vec(prop::collection::vec(0i64..12, 2), 1..4)) {
        let (g, gens) = canonicalize_subgroup(&[12, 12], &rows).unwrap();
        // an empty ambient with generators is rejected by contract
        prop_assume!(!g.is_trivial());
        let again: Vec<Vec<i64>> = gens.iter().map(|x| x.coords().to_vec()).collect();
        let (h, _) = canonicalize_subgroup(g.moduli(), &again).unwrap();
        prop_assert_eq!(g.moduli(), h.moduli());
    }

    #[test]
    fn decomposition_is_complete(s in surface()) {
        let Some((g, t)) = s else { return Ok(()) };
        prop_assert_eq!(total_dimension(&g, &t), 2 * g.order() + 1);
        let genus = geometric_invariants(&build_surface(&g, &t).unwrap()).genus;
        let abs: usize = ExactBackend.abs_dims(&g, &t, &enumerate_characters(&g)).unwrap().iter().map(|d| d.1).sum();
        prop_assert_eq!(abs as i64, 2 * genus);
    }

    #[test]
    fn euler_characteristic_two_ways(s in surface()) {
        let Some((g, t)) = s else { return Ok(()) };
        let model = build_surface(&g, &t).unwrap();
        let inv = geometric_invariants(&model);
        prop_assert_eq!(model.cell_euler_characteristic(), inv.euler_characteristic);
        let sigma: i64 = t.orders(&g).iter().map(|&o| g.order() as i64 / o).sum();
        prop_assert_eq!(inv.sigma_size as i64, sigma);
        for h in g.elements() {
            let mut moved = model.translate(&h);
            let mut original = model.squares().to_vec();
            moved.sort_by_key(|s| (s.layer, s.index));
            original.sort_by_key(|s| (s.layer, s.index));
            prop_assert_eq!(moved, original);
        }
    }

    #[test]
    fn restriction_case_counts_unit_values(s in surface()) {
        let Some((g, t)) = s else { return Ok(()) };
        for chi in enumerate_characters(&g) {
            let ones = t.elems().iter().filter(|x| chi.value(&g, x).is_zero()).count();
            let class = restriction_classify(&g, &t, &chi);
            let expected = match ones {
                2 | 4 => (RestrictionCase::Case1, 0),
                1 => (RestrictionCase::Case2, 1),
                _ => (RestrictionCase::Case3, 2),
            };
            prop_assert_eq!((class.case, class.abs_dim), expected);
        }
    }

    #[test]
    fn conjugate_signature_swaps_signs(s in surface()) {
        let Some((g, t)) = s else { return Ok(()) };
        for chi in enumerate_characters(&g).into_iter().filter(|c| !c.is_trivial()) {
            let sig = signature_exact(&g, &t, &chi).unwrap();
            prop_assert_eq!(sig.dimension(), 2);
            prop_assert_eq!(signature_exact(&g, &t, &chi.conjugate(&g)).unwrap(), sig.conjugate());
        }
    }

    #[test]
    fn gamma_words_match_closed_forms_and_preserve_the_form(s in surface()) {
        let Some((g, t)) = s else { return Ok(()) };
        prop_assume!(g.order() <= 12);
        let gens = gamma_generators(&g, &t).unwrap();
        prop_assert_eq!(gens.gamma1.derivative(), Derivative::new([[1, -2], [0, 1]]));
        for chi in enumerate_characters(&g) {
            let ctx = CharContext::new(&g, &t, &chi);
            let q = hodge_form_matrix(&ctx);
            let b = isotypic_basis_ctx(&ctx).basis_matrix(&ctx.field);
            let form = b.conj_transpose().mul(&q).mul(&b);
            for word in [&gens.gamma1, &gens.gamma2] {
                let (p, end) = word.pullback(&g, &chi).unwrap();
                prop_assert_eq!(&end, &chi);
                let pb = p.mul(&b);
                prop_assert_eq!(pb.conj_transpose().mul(&q).mul(&pb), form.clone());
            }
        }
    }

    #[test]
    fn derivative_is_multiplicative(s in surface()) {
        let Some((g, t)) = s else { return Ok(()) };
        let gens = gamma_generators(&g, &t).unwrap();
        let both = pillowcase::affine::AffineWord::compose(&gens.gamma1, &gens.gamma2).unwrap();
        prop_assert_eq!(both.derivative(), gens.gamma1.derivative().mul(&gens.gamma2.derivative()));
    }

    #[test]
    fn finiteness_respects_mirroring(a in turn(), b in turn(), c in turn()) {
        // complete to sum 1 or 3 when possible
        let partial = a.fraction() + b.fraction() + c.fraction();
        let target = if partial < num_rational::Ratio::from_integer(1) { 1 } else { 3 };
        let d = num_rational::Ratio::from_integer(target) - partial;
        prop_assume!(d > num_rational::Ratio::from_integer(0) && d < num_rational::Ratio::from_integer(1));
        let d = RationalTurn::new(*d.numer(), *d.denom()).unwrap();
        let turns = [a, b, c, d];
        let mirrored = turns.map(|x| RationalTurn::new(x.denom() - x.numer(), x.denom()).unwrap());
        let permuted = [c, a, d, b];
        let found = finiteness_lookup(&turns).unwrap();
        prop_assert_eq!(finiteness_lookup(&mirrored).unwrap(), found);
        prop_assert_eq!(finiteness_lookup(&permuted).unwrap(), found);
    }
}

#[test]
fn sum_three_rows_mirror_sum_one_rows() {
    let tables = finiteness_tables();
    let one = tables.table(1).unwrap();
    let three = tables.table(3).unwrap();
    let key = |t: [pillowcase::fraction::Fraction; 4]| {
        let mut v = t.to_vec();
        v.sort();
        v
    };
    for row in &three.rows {
        let mirrored = key(row.turns.map(|x| pillowcase::fraction::Fraction::one() - x));
        assert!(one.rows.iter().any(|r| key(r.turns) == mirrored && r.group == row.group), "{row:?}");
    }
}

#[test]
fn characters_are_distinct() {
    for moduli in MODULI {
        let g = AbelianGroup::new(moduli.to_vec()).unwrap();
        let tables: std::collections::BTreeSet<Vec<(i64, i64)>> = enumerate_characters(&g)
            .iter()
            .map(|chi| g.basis().iter().map(|x| { let v = chi.value(&g, x); (v.numer(), v.denom()) }).collect())
            .collect();
        assert_eq!(tables.len(), g.order());
    }
}
