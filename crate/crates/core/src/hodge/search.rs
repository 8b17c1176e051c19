//! Searches for definite summands on which the affine action is not discrete.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::tables::{finiteness_lookup, Finiteness};
use super::{signature_from_turns, turn_sum, Signature};
use crate::abelian::{
    character_from_turns, enumerate_automorphisms, enumerate_characters, AbelianGroup, Character,
    RationalTurn, DEFAULT_AUT_BOUND,
};
use crate::affine::{aff_equals_gamma_sufficient, build_tuple_graph, realized_automorphisms, AffGammaVerdict};
use crate::cohomology::CharContext;
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::surface::BranchTuple;

pub const DEFAULT_SQUARE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AffEvidence {
    /// every affine map acts trivially on `G`
    Sufficient { verdict: AffGammaVerdict },
    /// orbit of the character under automorphisms realized by loops
    RealizedOrbit { automorphisms: usize, within_conjugates: bool },
    Unavailable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiniteHit {
    pub character: Character,
    pub turns: [RationalTurn; 4],
    pub turn_sum: Fraction,
    pub signature: Signature,
    pub finiteness: Finiteness,
    /// orders of `rho(g1 g2)` and `rho(g2 g3)`
    pub rotation_orders: [i64; 2],
    pub aff_evidence: AffEvidence,
    /// the character with value -1 on every `g_j`, when one exists
    pub tangent_character: Option<Character>,
    /// tangent character exists and differs from `rho` and its conjugate
    pub tangent_outside_conjugates: bool,
}

/// Definite characters with all four values nontrivial and infinite image.
fn definite_infinite(group: &AbelianGroup, tuple: &BranchTuple) -> Result<Vec<(Character, [RationalTurn; 4], Finiteness)>> {
    let mut out = Vec::new();
    for chi in enumerate_characters(group) {
        let turns = CharContext::turns_of(group, tuple, &chi);
        if turns.iter().any(|t| t.is_zero()) {
            continue;
        }
        let sum = turn_sum(&turns);
        if sum != Fraction::integer(1) && sum != Fraction::integer(3) {
            continue;
        }
        let fin = finiteness_lookup(&turns)?;
        if !fin.is_finite() {
            out.push((chi, turns, fin));
        }
    }
    Ok(out)
}

fn evidence_for(group: &AbelianGroup, tuple: &BranchTuple) -> Result<Box<dyn Fn(&Character) -> AffEvidence>> {
    let verdict = aff_equals_gamma_sufficient(group, tuple);
    if verdict != AffGammaVerdict::Unknown {
        return Ok(Box::new(move |_| AffEvidence::Sufficient { verdict }));
    }
    if group.order() > DEFAULT_AUT_BOUND {
        let reason = format!("|G| = {} is above the automorphism bound {DEFAULT_AUT_BOUND}", group.order());
        return Ok(Box::new(move |_| AffEvidence::Unavailable { reason: reason.clone() }));
    }
    let graph = build_tuple_graph(group, tuple, true)?;
    let realized = realized_automorphisms(&graph)?;
    let g = group.clone();
    Ok(Box::new(move |chi: &Character| {
        let conj = chi.conjugate(&g);
        let within = realized.iter().all(|r| {
            r.character_map
                .iter()
                .filter(|(c, _)| c == chi)
                .all(|(_, image)| image == chi || *image == conj)
        });
        AffEvidence::RealizedOrbit {
            automorphisms: realized.len(),
            within_conjugates: within,
        }
    }))
}

pub fn search_definite_nondiscrete(group: &AbelianGroup, tuple: &BranchTuple) -> Result<Vec<DefiniteHit>> {
    let found = definite_infinite(group, tuple)?;
    if found.is_empty() {
        return Ok(Vec::new());
    }
    let evidence = evidence_for(group, tuple)?;
    let half = [RationalTurn::HALF; 4];
    let tangent = character_from_turns(group, tuple.elems(), &half).ok();
    found
        .into_iter()
        .map(|(chi, turns, finiteness)| {
            let conj = chi.conjugate(group);
            let outside = tangent.as_ref().is_some_and(|t| *t != chi && *t != conj);
            Ok(DefiniteHit {
                signature: signature_from_turns(&turns)?,
                turn_sum: turn_sum(&turns),
                rotation_orders: [(turns[0] + turns[1]).order(), (turns[1] + turns[2]).order()],
                aff_evidence: evidence(&chi),
                tangent_character: tangent.clone(),
                tangent_outside_conjugates: outside,
                character: chi,
                turns,
                finiteness,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalHit {
    pub group: AbelianGroup,
    pub tuple: BranchTuple,
    pub squares: usize,
    pub hit: DefiniteHit,
}

/// Invariant-factor lists `m_1 | m_2 | ...` with product at most `bound`.
fn groups_up_to(bound: usize, max_rank: usize) -> Vec<AbelianGroup> {
    fn rec(prefix: &mut Vec<i64>, product: usize, bound: usize, max_rank: usize, out: &mut Vec<Vec<i64>>) {
        out.push(prefix.clone());
        if prefix.len() == max_rank {
            return;
        }
        let last = prefix.last().copied().unwrap_or(1);
        let mut m = if prefix.is_empty() { 2 } else { last };
        while product * m as usize <= bound {
            if m % last == 0 {
                prefix.push(m);
                rec(prefix, product * m as usize, bound, max_rank, out);
                prefix.pop();
            }
            m += 1;
        }
    }
    let mut lists = Vec::new();
    rec(&mut Vec::new(), 1, bound, max_rank, &mut lists);
    let mut groups: Vec<AbelianGroup> = lists
        .into_iter()
        .map(|l| AbelianGroup::new(l).expect("divisibility chain"))
        .collect();
    groups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.moduli().cmp(b.moduli())));
    groups
}

/// Generating zero-sum tuples of `group`, one per orbit of coordinate
/// permutations and automorphisms, with every order even and at least 4.
fn qualifying_tuples(group: &AbelianGroup) -> Result<Vec<BranchTuple>> {
    let elems: Vec<_> = group.elements().collect();
    let n = elems.len();
    let orders: Vec<i64> = elems.iter().map(|x| group.element_order(x)).collect();
    let idx = |x: &crate::abelian::GroupElement| group.index_of(x);
    let auts: Vec<Vec<usize>> = enumerate_automorphisms(group, DEFAULT_AUT_BOUND)?
        .iter()
        .map(|psi| elems.iter().map(|x| group.index_of(&psi.apply(group, x))).collect())
        .collect();
    let good = |i: usize| orders[i] % 2 == 0 && orders[i] != 2;
    let mut seen: HashSet<[usize; 4]> = HashSet::new();
    let mut out = Vec::new();
    for a in (0..n).filter(|&i| good(i)) {
        for b in (0..n).filter(|&i| good(i)) {
            for c in (0..n).filter(|&i| good(i)) {
                let s = group.add(&group.add(&elems[a], &elems[b]), &elems[c]);
                let minus = group.neg(&s);
                let d = idx(&minus);
                if !good(d) {
                    continue;
                }
                let key = auts
                    .iter()
                    .map(|p| {
                        let mut k = [p[a], p[b], p[c], p[d]];
                        k.sort_unstable();
                        k
                    })
                    .min()
                    .expect("identity automorphism");
                if !seen.insert(key) {
                    continue;
                }
                let t = key.map(|i| elems[i].clone());
                if group.generates(&t) {
                    out.push(BranchTuple::new(group, t)?);
                }
            }
        }
    }
    Ok(out)
}

pub fn minimal_square_search(max_squares: usize) -> Result<Vec<MinimalHit>> {
    minimal_square_search_capped(max_squares, DEFAULT_SQUARE_CAP)
}

/// Every qualifying `(G, tuple, rho)` with `2 |G| <= max_squares`.
///
/// Groups need rank at most 3 since three entries of a zero-sum tuple
/// generate. Tuples are taken up to permutation and automorphisms, both of
/// which preserve the search conditions.
pub fn minimal_square_search_capped(max_squares: usize, cap: usize) -> Result<Vec<MinimalHit>> {
    if max_squares > cap {
        return Err(Error::Capability(format!(
            "max_squares {max_squares} exceeds the cap {cap}"
        )));
    }
    let mut hits = Vec::new();
    for group in groups_up_to(max_squares / 2, 3) {
        if group.is_trivial() {
            continue;
        }
        for tuple in qualifying_tuples(&group)? {
            for hit in search_definite_nondiscrete(&group, &tuple)? {
                hits.push(MinimalHit {
                    group: group.clone(),
                    tuple: tuple.clone(),
                    squares: 2 * group.order(),
                    hit,
                });
            }
        }
    }
    hits.sort_by(|x, y| {
        x.squares
            .cmp(&y.squares)
            .then_with(|| x.group.moduli().cmp(y.group.moduli()))
            .then_with(|| x.tuple.elems().cmp(y.tuple.elems()))
            .then_with(|| x.hit.character.cmp(&y.hit.character))
    });
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::GroupElement;

    fn cyclic(n: i64, t: [i64; 4]) -> (AbelianGroup, BranchTuple) {
        let g = AbelianGroup::cyclic(n);
        let tuple = BranchTuple::new(&g, t.map(|x| GroupElement(vec![x]))).unwrap();
        (g, tuple)
    }

    #[test]
    fn group_enumeration() {
        let names: Vec<Vec<i64>> = groups_up_to(8, 3).iter().map(|g| g.moduli().to_vec()).collect();
        assert_eq!(
            names,
            vec![vec![], vec![2], vec![3], vec![2, 2], vec![4], vec![5], vec![6], vec![7], vec![2, 2, 2], vec![2, 4], vec![8]]
        );
    }

    #[test]
    fn wollmilchsau_has_no_hits() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        assert!(search_definite_nondiscrete(&g, &t).unwrap().is_empty());
    }

    #[test]
    fn z8_hit() {
        let (g, t) = cyclic(8, [1, 1, 1, 5]);
        let hits = search_definite_nondiscrete(&g, &t).unwrap();
        let h = hits.iter().find(|h| h.character.dual_coords() == [1]).expect("rho(1) = e^(2 pi i/8)");
        assert_eq!(h.signature, Signature::new(0, 2, 0));
        assert_eq!(h.aff_evidence, AffEvidence::Sufficient { verdict: AffGammaVerdict::YesByCyclicForm });
        assert!(h.tangent_outside_conjugates);
    }

    #[test]
    fn small_caps() {
        assert!(minimal_square_search(4).unwrap().is_empty());
        assert!(matches!(minimal_square_search(66), Err(Error::Capability(_))));
    }
}
