use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::snf::{integer_kernel, smith, IntMatrix};
use crate::error::{Error, Result};

/// Finite abelian group `Z/m_1 x ... x Z/m_k` in invariant-factor form
/// (`m_i | m_{i+1}`, every `m_i >= 2`). The trivial group has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    moduli: Vec<i64>,
}

/// Element of an [`AbelianGroup`], reduced componentwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [x] => write!(f, "{x}"),
            xs => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl AbelianGroup {
    /// Accepts invariant factors; factors equal to 1 are dropped.
    pub fn new(moduli: Vec<i64>) -> Result<Self> {
        if moduli.iter().any(|&m| m < 1) {
            return Err(Error::InvalidInput(format!(
                "moduli must be positive, got {moduli:?}"
            )));
        }
        let moduli: Vec<i64> = moduli.into_iter().filter(|&m| m > 1).collect();
        if moduli.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidInput(format!(
                "moduli {moduli:?} are not invariant factors (each must divide the next)"
            )));
        }
        Ok(Self { moduli })
    }

    pub fn trivial() -> Self {
        Self { moduli: vec![] }
    }

    pub fn cyclic(n: i64) -> Self {
        Self::new(vec![n]).expect("positive modulus")
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product::<i64>() as usize
    }

    /// Largest element order; 1 for the trivial group.
    pub fn exponent(&self) -> i64 {
        self.moduli.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.moduli.len() <= 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "element {coords:?} has {} coordinates, group {self} needs {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(self.reduce(coords))
    }

    pub fn reduce(&self, coords: &[i64]) -> GroupElement {
        GroupElement(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(x, m)| x.rem_euclid(*m))
                .collect(),
        )
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((a, b), m)| (a + b) % m)
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(a, m)| (m - a) % m)
                .collect(),
        )
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, n: i64, x: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(a, m)| (n.rem_euclid(*m) * a) % m)
                .collect(),
        )
    }

    pub fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn is_zero(&self, x: &GroupElement) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    /// Smallest `n >= 1` with `n x = 0`.
    pub fn element_order(&self, x: &GroupElement) -> i64 {
        x.0.iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| m / a.gcd(&m))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// Mixed-radix index in `0..order`, the first coordinate varying slowest.
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.0.iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&a, &m)| acc * m as usize + a as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (c, &m) in coords.iter_mut().zip(&self.moduli).rev() {
            *c = (index % m as usize) as i64;
            index /= m as usize;
        }
        GroupElement(coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }

    /// The standard basis `e_i` of the invariant-factor decomposition.
    pub fn basis(&self) -> Vec<GroupElement> {
        (0..self.rank())
            .map(|i| {
                let mut c = vec![0; self.rank()];
                c[i] = 1;
                GroupElement(c)
            })
            .collect()
    }

    /// Order of the subgroup generated by `gens`, by closure.
    pub fn subgroup_order(&self, gens: &[GroupElement]) -> usize {
        self.subgroup_elements(gens).len()
    }

    pub fn subgroup_elements(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        let mut seen = vec![false; self.order()];
        let zero = self.zero();
        seen[self.index_of(&zero)] = true;
        let mut out = vec![zero];
        let mut i = 0;
        while i < out.len() {
            let x = out[i].clone();
            for g in gens {
                let y = self.add(&x, g);
                let idx = self.index_of(&y);
                if !seen[idx] {
                    seen[idx] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    pub fn generates(&self, gens: &[GroupElement]) -> bool {
        self.subgroup_order(gens) == self.order()
    }

    /// Invariant factors of `G / <gens>`.
    pub fn quotient(&self, gens: &[GroupElement]) -> AbelianGroup {
        let k = self.rank();
        if k == 0 {
            return AbelianGroup::trivial();
        }
        let cols = k + gens.len();
        let mut m: IntMatrix = vec![vec![0; cols]; k];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = i128::from(self.moduli[i]);
            for (j, g) in gens.iter().enumerate() {
                row[k + j] = i128::from(g.0[i]);
            }
        }
        let s = smith(&m, cols);
        let moduli = s.diag.iter().filter(|&&d| d > 1).map(|&d| d as i64).collect();
        AbelianGroup::new(moduli).expect("smith diagonal is divisibility ordered")
    }

    /// Integer relations `c` with `sum c_j x_j = 0`, as a lattice generating set
    /// in row-Hermite form (pivots positive, entries above pivots reduced).
    pub fn relation_lattice(&self, xs: &[GroupElement]) -> Vec<Vec<i64>> {
        let r = xs.len();
        let k = self.rank();
        let mut m: IntMatrix = vec![vec![0; r + k]; k];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in xs.iter().enumerate() {
                row[j] = i128::from(x.0[i]);
            }
            row[r + i] = i128::from(self.moduli[i]);
        }
        let kernel = if k == 0 {
            (0..r)
                .map(|j| (0..r).map(|i| i128::from(i == j)).collect())
                .collect()
        } else {
            integer_kernel(&m, r + k)
        };
        let rows: Vec<Vec<i128>> = kernel.into_iter().map(|v| v[..r].to_vec()).collect();
        hermite_rows(rows, r)
            .into_iter()
            .map(|v| v.into_iter().map(|x| x as i64).collect())
            .collect()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "1");
        }
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z/{m}")?;
        }
        Ok(())
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
fn hermite_rows(mut rows: Vec<Vec<i128>>, width: usize) -> Vec<Vec<i128>> {
    let mut out: Vec<Vec<i128>> = Vec::new();
    for col in 0..width {
        loop {
            let live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if live.len() <= 1 {
                break;
            }
            let p = *live.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &live {
                if i != p {
                    let q = rows[i][col].div_euclid(rows[p][col]);
                    let pivot = rows[p].clone();
                    for (a, b) in rows[i].iter_mut().zip(&pivot) {
                        *a -= q * b;
                    }
                }
            }
        }
        if let Some(i) = rows.iter().position(|r| r[col] != 0) {
            let mut row = rows.remove(i);
            if row[col] < 0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            out.push(row);
        }
    }
    // reduce entries above each pivot
    for i in 0..out.len() {
        let col = out[i].iter().position(|&v| v != 0).unwrap();
        for j in 0..i {
            let q = out[j][col].div_euclid(out[i][col]);
            let pivot = out[i].clone();
            for (a, b) in out[j].iter_mut().zip(&pivot) {
                *a -= q * b;
            }
        }
    }
    out
}

/// Subgroup of `Z/n_1 x ... x Z/n_k` generated by `generators`, brought to
/// invariant-factor form, together with each generator in the new coordinates.
///
/// When the generators fill an ambient group that is already in
/// invariant-factor form, the ambient coordinates are kept as given.
pub fn canonicalize_subgroup(
    ambient_moduli: &[i64],
    generators: &[Vec<i64>],
) -> Result<(AbelianGroup, Vec<GroupElement>)> {
    if ambient_moduli.is_empty() && !generators.is_empty() {
        return Err(Error::InvalidInput(
            "empty ambient moduli with nonempty generators".into(),
        ));
    }
    if ambient_moduli.iter().any(|&m| m < 1) {
        return Err(Error::InvalidInput(format!(
            "ambient moduli must be positive, got {ambient_moduli:?}"
        )));
    }
    for g in generators {
        if g.len() != ambient_moduli.len() {
            return Err(Error::InvalidInput(format!(
                "generator {g:?} does not match ambient rank {}",
                ambient_moduli.len()
            )));
        }
    }
    let r = generators.len();
    if r == 0 {
        return Ok((AbelianGroup::trivial(), vec![]));
    }
    let k = ambient_moduli.len();
    // relations among the generators: kernel of [A | diag(n)] restricted to the first r coordinates
    let mut a: IntMatrix = vec![vec![0; r + k]; k];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, g) in generators.iter().enumerate() {
            row[j] = i128::from(g[i].rem_euclid(ambient_moduli[i]));
        }
        row[r + i] = i128::from(ambient_moduli[i]);
    }
    let relations: Vec<Vec<i128>> = integer_kernel(&a, r + k)
        .into_iter()
        .map(|v| v[..r].to_vec())
        .collect();
    // relation matrix with relations as columns
    let mut rel: IntMatrix = vec![vec![0; relations.len()]; r];
    for (j, v) in relations.iter().enumerate() {
        for i in 0..r {
            rel[i][j] = v[i];
        }
    }
    let s = smith(&rel, relations.len());
    if s.rank < r {
        return Err(Error::Consistency(
            "relation lattice of a finite subgroup must have full rank".into(),
        ));
    }
    let keep: Vec<usize> = (0..r).filter(|&i| s.diag[i] > 1).collect();
    let moduli: Vec<i64> = keep.iter().map(|&i| s.diag[i] as i64).collect();
    let group = AbelianGroup::new(moduli)?;
    let ambient_order: i128 = ambient_moduli.iter().map(|&m| i128::from(m)).product();
    let chain = ambient_moduli.iter().all(|&m| m > 1) && ambient_moduli.windows(2).all(|w| w[1] % w[0] == 0);
    if chain && group.order() as i128 == ambient_order {
        let ambient = AbelianGroup::new(ambient_moduli.to_vec())?;
        let gens = generators.iter().map(|g| ambient.reduce(g)).collect();
        return Ok((ambient, gens));
    }
    let recoords = (0..r)
        .map(|j| {
            let coords: Vec<i64> = keep
                .iter()
                .map(|&i| s.left[i][j].rem_euclid(s.diag[i]) as i64)
                .collect();
            GroupElement(coords)
        })
        .collect();
    Ok((group, recoords))
}

pub fn element_order(group: &AbelianGroup, x: &GroupElement) -> i64 {
    group.element_order(x)
}
