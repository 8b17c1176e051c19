//! 4x4 matrices over the integral group ring `Z[G]`, acting on packed cochains.
//!
//! A ring element is a dense coefficient vector indexed like `G::elements`.

use crate::abelian::{AbelianGroup, GroupElement};

/// Group with a precomputed addition table for fast convolution.
#[derive(Debug, Clone)]
pub struct GroupRing {
    group: AbelianGroup,
    add: Vec<usize>,
    neg: Vec<usize>,
}

pub type RingElem = Vec<i64>;

impl GroupRing {
    pub fn new(group: &AbelianGroup) -> Self {
        let n = group.order();
        let elems: Vec<GroupElement> = group.elements().collect();
        let mut add = vec![0; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                add[i * n + j] = group.index_of(&group.add(x, y));
            }
        }
        let neg = elems.iter().map(|x| group.index_of(&group.neg(x))).collect();
        Self {
            group: group.clone(),
            add,
            neg,
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.neg.len()
    }

    pub fn zero(&self) -> RingElem {
        vec![0; self.order()]
    }

    /// `c * h`
    pub fn monomial(&self, h: &GroupElement, c: i64) -> RingElem {
        let mut v = self.zero();
        v[self.group.index_of(h)] = c;
        v
    }

    pub fn mul(&self, x: &RingElem, y: &RingElem) -> RingElem {
        let n = self.order();
        let mut out = self.zero();
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b != 0 {
                    out[self.add[i * n + j]] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, x: &RingElem, y: &RingElem) -> RingElem {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn neg_index(&self, h: usize) -> usize {
        self.neg[h]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgMatrix {
    pub entries: [[RingElem; 4]; 4],
}

impl AlgMatrix {
    pub fn zero(ring: &GroupRing) -> Self {
        Self {
            entries: std::array::from_fn(|_| std::array::from_fn(|_| ring.zero())),
        }
    }

    pub fn identity(ring: &GroupRing) -> Self {
        let mut m = Self::zero(ring);
        let e = ring.group().zero();
        for i in 0..4 {
            m.entries[i][i] = ring.monomial(&e, 1);
        }
        m
    }

    /// Matrix with `entries[i][j] = c * h` for each `(i, j, h, c)`.
    pub fn sparse(ring: &GroupRing, terms: &[(usize, usize, GroupElement, i64)]) -> Self {
        let mut m = Self::zero(ring);
        for (i, j, h, c) in terms {
            let t = ring.monomial(h, *c);
            m.entries[*i][*j] = ring.add(&m.entries[*i][*j], &t);
        }
        m
    }

    pub fn mul(&self, ring: &GroupRing, other: &AlgMatrix) -> AlgMatrix {
        let mut out = Self::zero(ring);
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ring.zero();
                for k in 0..4 {
                    acc = ring.add(&acc, &ring.mul(&self.entries[i][k], &other.entries[k][j]));
                }
                out.entries[i][j] = acc;
            }
        }
        out
    }
}
