use std::fmt;

use serde::{Deserialize, Serialize};

use super::group::{AbelianGroup, GroupElement};
use crate::error::{Error, Result};

/// Default ceiling on `|G|` for full automorphism enumeration.
pub const DEFAULT_AUT_BOUND: usize = 64;

/// Automorphism stored by the images of the invariant-factor basis;
/// column `i` of the matrix is `psi(e_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupAutomorphism {
    images: Vec<GroupElement>,
}

impl GroupAutomorphism {
    pub fn identity(group: &AbelianGroup) -> Self {
        Self {
            images: group.basis(),
        }
    }

    /// Validates well-definedness (`m_i psi(e_i) = 0`) and bijectivity.
    pub fn from_images(group: &AbelianGroup, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != group.rank() {
            return Err(Error::InvalidInput("wrong number of basis images".into()));
        }
        for (img, &m) in images.iter().zip(group.moduli()) {
            if !group.is_zero(&group.scale(m, img)) {
                return Err(Error::InvalidInput(format!(
                    "image {img} of a basis element of order {m} has incompatible order"
                )));
            }
        }
        if !group.generates(&images) {
            return Err(Error::InvalidInput("map is not surjective".into()));
        }
        Ok(Self { images })
    }

    /// Multiplication by a unit on a cyclic group.
    pub fn scalar(group: &AbelianGroup, u: i64) -> Result<Self> {
        Self::from_images(group, group.basis().iter().map(|e| group.scale(u, e)).collect())
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, group: &AbelianGroup, x: &GroupElement) -> GroupElement {
        x.coords()
            .iter()
            .zip(&self.images)
            .fold(group.zero(), |acc, (&c, img)| group.add(&acc, &group.scale(c, img)))
    }

    /// `self o other`
    pub fn compose(&self, group: &AbelianGroup, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|x| self.apply(group, x)).collect(),
        }
    }

    pub fn inverse(&self, group: &AbelianGroup) -> Self {
        // the inverse sends psi(x) back to x; locate the preimages of the basis
        let mut images = vec![group.zero(); group.rank()];
        let basis = group.basis();
        for x in group.elements() {
            let y = self.apply(group, &x);
            if let Some(i) = basis.iter().position(|b| *b == y) {
                images[i] = x;
            }
        }
        Self { images }
    }

    pub fn is_identity(&self, group: &AbelianGroup) -> bool {
        self.images == group.basis()
    }
}

impl fmt::Display for GroupAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Every automorphism of `group`, built column by column: a partial choice of
/// basis images is kept only while the subgroup it generates has the order of
/// the corresponding partial product of moduli.
pub fn enumerate_automorphisms(group: &AbelianGroup, bound: usize) -> Result<Vec<GroupAutomorphism>> {
    if group.order() > bound {
        return Err(Error::Capability(format!(
            "|G| = {} exceeds the automorphism enumeration bound {bound}; \
             use the sufficient tests (distinct generator orders, cyclic (1,1,1,n-3) form) instead",
            group.order()
        )));
    }
    let mut candidates: Vec<Vec<GroupElement>> = Vec::new();
    for &m in group.moduli() {
        candidates.push(
            group
                .elements()
                .filter(|x| group.element_order(x) == m)
                .collect(),
        );
    }
    let mut out = Vec::new();
    let mut chosen: Vec<GroupElement> = Vec::new();
    extend(group, &candidates, &mut chosen, &mut out);
    Ok(out)
}

fn extend(
    group: &AbelianGroup,
    candidates: &[Vec<GroupElement>],
    chosen: &mut Vec<GroupElement>,
    out: &mut Vec<GroupAutomorphism>,
) {
    let i = chosen.len();
    if i == group.rank() {
        out.push(GroupAutomorphism {
            images: chosen.clone(),
        });
        return;
    }
    let target: usize = group.moduli()[..=i].iter().product::<i64>() as usize;
    for x in &candidates[i] {
        chosen.push(x.clone());
        if group.subgroup_order(chosen) == target {
            extend(group, candidates, chosen, out);
        }
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_of_z6() {
        let g = AbelianGroup::cyclic(6);
        let auts = enumerate_automorphisms(&g, 64).unwrap();
        assert_eq!(auts.len(), 2);
        let multipliers: Vec<i64> = auts.iter().map(|a| a.images()[0].coords()[0]).collect();
        assert_eq!(multipliers, vec![1, 5]);
    }

    #[test]
    fn z4_has_two() {
        assert_eq!(enumerate_automorphisms(&AbelianGroup::cyclic(4), 64).unwrap().len(), 2);
    }

    /// Brute force over all 2x2 matrices mod 2 with nonzero determinant.
    #[test]
    fn klein_four_matches_gl2_f2() {
        let mut brute = 0;
        for m in 0..16u32 {
            let (a, b, c, d) = (m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1);
            if (a * d + b * c) % 2 == 1 {
                brute += 1;
            }
        }
        let g = AbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(enumerate_automorphisms(&g, 64).unwrap().len(), brute);
        assert_eq!(brute, 6);
    }

    #[test]
    fn automorphisms_are_bijective_homomorphisms() {
        let g = AbelianGroup::new(vec![2, 4]).unwrap();
        for a in enumerate_automorphisms(&g, 64).unwrap() {
            let mut imgs: Vec<_> = g.elements().map(|x| a.apply(&g, &x)).collect();
            for x in g.elements() {
                for y in g.elements() {
                    assert_eq!(a.apply(&g, &g.add(&x, &y)), g.add(&a.apply(&g, &x), &a.apply(&g, &y)));
                }
            }
            imgs.sort();
            imgs.dedup();
            assert_eq!(imgs.len(), g.order());
            assert!(a.compose(&g, &a.inverse(&g)).is_identity(&g));
        }
    }

    #[test]
    fn bound_is_enforced() {
        let g = AbelianGroup::cyclic(65);
        assert!(matches!(enumerate_automorphisms(&g, 64), Err(Error::Capability(_))));
    }
}
