//! The square-tiled cover `M(G, g)` of the pillowcase as an explicit cell complex.
//!
//! Over the pillowcase the four edges run `z_j -> z_{j+1}` (indices mod 4).
//! The bottom square `B1[g]` is bounded counterclockwise by
//! `e1[g], e2[g], e3[g], e4[g]`, each traversed along its own direction; the top
//! square `B2[g]` is bounded by `e1[g], e2[g+g2], e3[g+g2+g3], e4[g+g2+g3+g4]`,
//! each traversed against its direction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::{canonicalize_subgroup, AbelianGroup, GroupElement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchTuple {
    elems: [GroupElement; 4],
}

impl BranchTuple {
    /// Checks `g1+g2+g3+g4 = 0` and that the entries generate `group`.
    pub fn new(group: &AbelianGroup, elems: [GroupElement; 4]) -> Result<Self> {
        for x in &elems {
            if x.coords().len() != group.rank() {
                return Err(Error::InvalidInput(format!(
                    "element {x} does not belong to {group}"
                )));
            }
        }
        let elems = elems.map(|x| group.reduce(x.coords()));
        let total = group.sum(&elems);
        if !group.is_zero(&total) {
            return Err(Error::InvalidInput(format!(
                "branch tuple violates g1+g2+g3+g4 = 0 (sum is {total})"
            )));
        }
        if !group.generates(&elems) {
            return Err(Error::InvalidInput(format!(
                "branch tuple does not generate {group} (the cover would be disconnected)"
            )));
        }
        Ok(Self { elems })
    }

    /// Convenience constructor from coordinate rows.
    pub fn from_coords(group: &AbelianGroup, rows: [&[i64]; 4]) -> Result<Self> {
        Self::new(group, rows.map(|r| GroupElement(r.to_vec())))
    }

    /// Tuple without validation; used for moves that provably preserve validity.
    pub(crate) fn from_elems_unchecked(elems: [GroupElement; 4]) -> Self {
        Self { elems }
    }

    pub fn elems(&self) -> &[GroupElement; 4] {
        &self.elems
    }

    /// `g_{j+1}` for zero-based `j`.
    pub fn get(&self, j: usize) -> &GroupElement {
        &self.elems[j]
    }

    pub fn orders(&self, group: &AbelianGroup) -> [i64; 4] {
        [0, 1, 2, 3].map(|j| group.element_order(&self.elems[j]))
    }

    /// Offsets `0, g2, g2+g3, g2+g3+g4` of the edges on the top square.
    pub fn top_offsets(&self, group: &AbelianGroup) -> [GroupElement; 4] {
        let o1 = group.zero();
        let o2 = self.elems[1].clone();
        let o3 = group.add(&o2, &self.elems[2]);
        let o4 = group.add(&o3, &self.elems[3]);
        [o1, o2, o3, o4]
    }
}

impl fmt::Display for BranchTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.elems[0], self.elems[1], self.elems[2], self.elems[3]
        )
    }
}

/// Bottom (`B1`) or top (`B2`) layer of squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    Bottom,
    Top,
}

/// Edge cell `e^{kind+1}_g`, identified by its kind `0..4` and the index of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub kind: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub layer: Layer,
    pub index: usize,
    /// counterclockwise boundary starting at the top side; `+1` when the
    /// traversal agrees with the edge direction
    pub boundary: [(EdgeId, i8); 4],
}

#[derive(Debug, Clone)]
pub struct SurfaceModel {
    group: AbelianGroup,
    tuple: BranchTuple,
    squares: Vec<Square>,
    /// vertex class of the start point of every edge, indexed like `edge_slot`
    edge_start_vertex: Vec<usize>,
    vertex_over: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn build_surface(group: &AbelianGroup, tuple: &BranchTuple) -> Result<SurfaceModel> {
    // revalidate: the tuple may come from a different group
    let tuple = BranchTuple::new(group, tuple.elems.clone())?;
    let n = group.order();
    let offsets = tuple.top_offsets(group);
    let mut squares = Vec::with_capacity(2 * n);
    for (index, g) in group.elements().enumerate() {
        let boundary = [0, 1, 2, 3].map(|kind| (EdgeId { kind, index }, 1i8));
        squares.push(Square {
            layer: Layer::Bottom,
            index,
            boundary,
        });
        let boundary = [0, 1, 2, 3].map(|kind| {
            let h = group.add(&g, &offsets[kind]);
            (
                EdgeId {
                    kind,
                    index: group.index_of(&h),
                },
                -1i8,
            )
        });
        squares.push(Square {
            layer: Layer::Top,
            index,
            boundary,
        });
    }

    // endpoints: node 2*slot is the start of the edge, 2*slot+1 its end.
    // At each corner the end of one side meets the start of the next.
    let mut uf = UnionFind::new(8 * n);
    for sq in &squares {
        for kind in 0..4 {
            let prev = sq.boundary[(kind + 3) % 4].0;
            let cur = sq.boundary[kind].0;
            uf.union(2 * edge_slot(n, prev) + 1, 2 * edge_slot(n, cur));
        }
    }
    let mut labels: Vec<usize> = Vec::new();
    let mut edge_start_vertex = vec![0; 4 * n];
    let mut vertex_over = Vec::new();
    for slot in 0..4 * n {
        let root = uf.find(2 * slot);
        let v = match labels.iter().position(|&r| r == root) {
            Some(v) => v,
            None => {
                labels.push(root);
                vertex_over.push(slot / n);
                labels.len() - 1
            }
        };
        edge_start_vertex[slot] = v;
    }
    Ok(SurfaceModel {
        group: group.clone(),
        tuple,
        squares,
        edge_start_vertex,
        vertex_over,
    })
}

/// Position of an edge in kind-major order.
pub fn edge_slot(order: usize, e: EdgeId) -> usize {
    e.kind * order + e.index
}

/// Per branch point data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchData {
    pub order: i64,
    pub preimages: usize,
    /// cone angle of each preimage as a multiple of `pi`
    pub cone_angle_pi: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StratumKind {
    Abelian,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub kind: StratumKind,
    /// singularity orders, descending, regular points omitted
    pub orders: Vec<i64>,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            StratumKind::Abelian => "H",
            StratumKind::Quadratic => "Q",
        };
        let body: Vec<String> = self.orders.iter().map(i64::to_string).collect();
        write!(f, "{letter}({})", body.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSignature {
    pub branch: [BranchData; 4],
    pub squares: usize,
    pub sigma_size: usize,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub translation: bool,
    /// every point over a branch point has order different from 2
    pub all_sigma_singular: bool,
    /// some branch element has order 1, i.e. cone angle `pi` points
    pub has_order_one: bool,
    pub stratum: Stratum,
}

impl SurfaceModel {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn tuple(&self) -> &BranchTuple {
        &self.tuple
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn edge_count(&self) -> usize {
        4 * self.group.order()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_over.len()
    }

    /// For each vertex class, the branch point `z_{j+1}` it lies over.
    pub fn vertex_over(&self) -> &[usize] {
        &self.vertex_over
    }

    /// Vertex class at the start of an edge.
    pub fn edge_start(&self, e: EdgeId) -> usize {
        self.edge_start_vertex[edge_slot(self.group.order(), e)]
    }

    /// Vertex class at the end of an edge.
    pub fn edge_end(&self, e: EdgeId) -> usize {
        // the end of e^j_h is glued to the start of e^{j+1}_h on B1[h]
        self.edge_start(EdgeId {
            kind: (e.kind + 1) % 4,
            index: e.index,
        })
    }

    /// Squares glued along shared edges form one component.
    pub fn is_connected(&self) -> bool {
        let n = self.group.order();
        let mut uf = UnionFind::new(2 * n + 4 * n);
        for (s, sq) in self.squares.iter().enumerate() {
            for (e, _) in sq.boundary {
                uf.union(s, 2 * n + edge_slot(n, e));
            }
        }
        let root = uf.find(0);
        (0..2 * n).all(|s| uf.find(s) == root)
    }

    /// Deck transformation `g -> g + h` applied to every label.
    pub fn translate(&self, h: &GroupElement) -> Vec<Square> {
        let shift = |i: usize| {
            let g = self.group.element_at(i);
            self.group.index_of(&self.group.add(&g, h))
        };
        self.squares
            .iter()
            .map(|sq| Square {
                layer: sq.layer,
                index: shift(sq.index),
                boundary: sq.boundary.map(|(e, s)| {
                    (
                        EdgeId {
                            kind: e.kind,
                            index: shift(e.index),
                        },
                        s,
                    )
                }),
            })
            .collect()
    }

    /// One line per square: `B1[g]: +e1[g] +e2[g] +e3[g] +e4[g]`.
    pub fn gluing_listing(&self) -> String {
        let mut out = String::new();
        for sq in &self.squares {
            let name = match sq.layer {
                Layer::Bottom => "B1",
                Layer::Top => "B2",
            };
            out.push_str(&format!("{name}[{}]:", self.group.element_at(sq.index)));
            for (e, s) in sq.boundary {
                let sign = if s > 0 { '+' } else { '-' };
                out.push_str(&format!(
                    " {sign}e{}[{}]",
                    e.kind + 1,
                    self.group.element_at(e.index)
                ));
            }
            out.push('\n');
        }
        out
    }

    /// Euler characteristic counted from cells.
    pub fn cell_euler_characteristic(&self) -> i64 {
        self.squares.len() as i64 - self.edge_count() as i64 + self.vertex_count() as i64
    }
}

pub fn geometric_invariants(model: &SurfaceModel) -> StratumSignature {
    let group = model.group();
    let n = group.order() as i64;
    let orders = model.tuple().orders(group);
    let branch = orders.map(|o| BranchData {
        order: o,
        preimages: (n / o) as usize,
        cone_angle_pi: o,
    });
    // Riemann-Hurwitz over the pillowcase (Euler characteristic 2)
    let euler = 2 * n - orders.iter().map(|&o| n - n / o).sum::<i64>();
    let translation = orders.iter().all(|o| o % 2 == 0);
    let mut sing = Vec::new();
    for b in &branch {
        let order = if translation {
            // cone angle 2 pi (m+1)
            b.order / 2 - 1
        } else {
            // cone angle pi (k+2)
            b.order - 2
        };
        if order != 0 {
            sing.extend(std::iter::repeat_n(order, b.preimages));
        }
    }
    sing.sort_unstable_by(|a, b| b.cmp(a));
    StratumSignature {
        squares: 2 * group.order(),
        sigma_size: branch.iter().map(|b| b.preimages).sum(),
        euler_characteristic: euler,
        genus: (2 - euler) / 2,
        translation,
        all_sigma_singular: orders.iter().all(|&o| o != 2),
        has_order_one: orders.contains(&1),
        stratum: Stratum {
            kind: if translation {
                StratumKind::Abelian
            } else {
                StratumKind::Quadratic
            },
            orders: sing,
        },
        branch,
    }
}

/// JSON description of a surface: the group is the subgroup of
/// `Z/n_1 x ... x Z/n_k` generated by the four rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub ambient_moduli: Vec<i64>,
    pub branch_tuple: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<CharacterSelector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CharacterSelector {
    Turns { turns: Vec<String> },
    DualCoords { dual_coords: Vec<i64> },
    All(AllMarker),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllMarker {
    All,
}

impl SurfaceSpec {
    pub fn new(ambient_moduli: Vec<i64>, branch_tuple: Vec<Vec<i64>>) -> Self {
        Self {
            ambient_moduli,
            branch_tuple,
            character: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::InvalidInput(format!(
                "surface spec at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn resolve(&self) -> Result<(AbelianGroup, BranchTuple)> {
        if self.branch_tuple.len() != 4 {
            return Err(Error::InvalidInput(format!(
                "branch_tuple must have 4 rows, found {}",
                self.branch_tuple.len()
            )));
        }
        if self.ambient_moduli.is_empty() {
            // the pillowcase itself: every row must be empty
            if self.branch_tuple.iter().any(|r| !r.is_empty()) {
                return Err(Error::InvalidInput(
                    "branch_tuple rows must be empty when ambient_moduli is empty".into(),
                ));
            }
            let g = AbelianGroup::trivial();
            let t = BranchTuple::new(&g, std::array::from_fn(|_| g.zero()))?;
            return Ok((g, t));
        }
        for (j, row) in self.branch_tuple.iter().enumerate() {
            if row.len() != self.ambient_moduli.len() {
                return Err(Error::InvalidInput(format!(
                    "branch_tuple[{j}] has length {} but ambient_moduli has {}",
                    row.len(),
                    self.ambient_moduli.len()
                )));
            }
        }
        for (i, &m) in self.ambient_moduli.iter().enumerate() {
            let s: i64 = self.branch_tuple.iter().map(|r| r[i]).sum();
            if m < 1 || s.rem_euclid(m.max(1)) != 0 {
                return Err(Error::InvalidInput(format!(
                    "branch tuple violates g1+g2+g3+g4 = 0 in coordinate {i} (sum {s} mod {m})"
                )));
            }
        }
        let (group, gens) = canonicalize_subgroup(&self.ambient_moduli, &self.branch_tuple)?;
        let elems: [GroupElement; 4] = gens.try_into().expect("four generators");
        let tuple = BranchTuple::new(&group, elems)?;
        Ok((group, tuple))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: i64, t: [i64; 4]) -> (AbelianGroup, BranchTuple) {
        let g = AbelianGroup::cyclic(n);
        let tuple = BranchTuple::new(&g, t.map(|x| GroupElement(vec![x]))).unwrap();
        (g, tuple)
    }

    #[test]
    fn z8_is_genus_seven_in_h3333() {
        let (g, t) = cyclic(8, [1, 1, 1, 5]);
        let m = build_surface(&g, &t).unwrap();
        let inv = geometric_invariants(&m);
        assert_eq!(inv.squares, 16);
        assert!(inv.translation);
        assert_eq!(inv.genus, 7);
        assert_eq!(inv.stratum.to_string(), "H(3,3,3,3)");
        assert_eq!(m.cell_euler_characteristic(), inv.euler_characteristic);
    }

    #[test]
    fn ornithorynque_invariants() {
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        let inv = geometric_invariants(&build_surface(&g, &t).unwrap());
        assert_eq!(inv.genus, 4);
        assert_eq!(inv.branch[3].preimages, 3);
        assert_eq!(inv.branch[3].cone_angle_pi, 2);
        assert!(!inv.all_sigma_singular);
        assert_eq!(inv.stratum.to_string(), "H(2,2,2)");
    }

    #[test]
    fn wollmilchsau_invariants() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        let m = build_surface(&g, &t).unwrap();
        let inv = geometric_invariants(&m);
        assert_eq!(inv.genus, 3);
        assert!(inv.all_sigma_singular);
        assert_eq!(m.vertex_count(), 4);
    }

    #[test]
    fn wollmilchsau_gluing_rows() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        let listing = build_surface(&g, &t).unwrap().gluing_listing();
        let lines: Vec<&str> = listing.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "B1[0]: +e1[0] +e2[0] +e3[0] +e4[0]");
        // e3 on top of B2[0] carries label 2
        assert_eq!(lines[1], "B2[0]: -e1[0] -e2[1] -e3[2] -e4[3]");
    }

    #[test]
    fn pillowcase_itself() {
        let g = AbelianGroup::trivial();
        let t = BranchTuple::new(&g, std::array::from_fn(|_| g.zero())).unwrap();
        let m = build_surface(&g, &t).unwrap();
        assert_eq!(m.squares().len(), 2);
        assert_eq!(m.edge_count(), 4);
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(geometric_invariants(&m).genus, 0);
    }

    #[test]
    fn z3_half_translation() {
        let (g, t) = cyclic(3, [0, 1, 1, 1]);
        let m = build_surface(&g, &t).unwrap();
        let inv = geometric_invariants(&m);
        assert_eq!(m.squares().len(), 6);
        assert!(!inv.translation);
        assert!(inv.has_order_one);
        assert_eq!(inv.stratum.kind, StratumKind::Quadratic);
    }

    #[test]
    fn every_edge_used_twice_with_opposite_signs() {
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        let m = build_surface(&g, &t).unwrap();
        let mut uses = vec![Vec::new(); m.edge_count()];
        for sq in m.squares() {
            for (e, s) in sq.boundary {
                uses[edge_slot(6, e)].push(s);
            }
        }
        for u in uses {
            let mut u = u;
            u.sort();
            assert_eq!(u, vec![-1, 1]);
        }
    }

    #[test]
    fn deck_translation_preserves_incidence() {
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        let m = build_surface(&g, &t).unwrap();
        let mut base = m.squares().to_vec();
        base.sort_by_key(|s| (s.index, s.layer));
        for h in g.elements() {
            let mut moved = m.translate(&h);
            moved.sort_by_key(|s| (s.index, s.layer));
            assert_eq!(moved, base);
        }
    }

    #[test]
    fn vertex_classes_match_branch_orders() {
        let g = AbelianGroup::new(vec![2, 4]).unwrap();
        let t = BranchTuple::from_coords(&g, [&[1, 0], &[0, 1], &[1, 1], &[0, 2]]).unwrap();
        for (g, t) in [cyclic(6, [1, 1, 1, 3]), cyclic(3, [0, 1, 1, 1]), (g, t)] {
            let m = build_surface(&g, &t).unwrap();
            let inv = geometric_invariants(&m);
            for j in 0..4 {
                let count = m.vertex_over().iter().filter(|&&z| z == j).count();
                assert_eq!(count, inv.branch[j].preimages, "{t} at z{}", j + 1);
            }
            assert_eq!(m.vertex_count(), inv.sigma_size);
            assert_eq!(m.cell_euler_characteristic(), inv.euler_characteristic);
            assert!(m.is_connected());
        }
    }

    #[test]
    fn non_generating_or_nonzero_sum_rejected() {
        let g = AbelianGroup::cyclic(4);
        assert!(BranchTuple::from_coords(&g, [&[2], &[2], &[2], &[2]]).is_err());
        assert!(BranchTuple::from_coords(&g, [&[1], &[1], &[1], &[2]]).is_err());
    }

    #[test]
    fn spec_resolution() {
        let spec = SurfaceSpec::from_json(
            r#"{"ambient_moduli":[120,120,120],
                "branch_tuple":[[20,0,0],[0,15,0],[0,0,12],[100,105,108]]}"#,
        )
        .unwrap();
        let (g, t) = spec.resolve().unwrap();
        assert_eq!(g.order(), 480);
        assert_eq!(t.orders(&g), [6, 8, 10, 120]);
        let bad = SurfaceSpec::new(vec![8], vec![vec![1], vec![1], vec![1], vec![1]]);
        let err = bad.resolve().unwrap_err().to_string();
        assert!(err.contains("g1+g2+g3+g4 = 0"), "{err}");
    }

    #[test]
    fn selector_forms_parse() {
        for (text, ok) in [
            (r#""all""#, true),
            (r#"{"turns":["1/6","1/8","1/10","73/120"]}"#, true),
            (r#"{"dual_coords":[1,2]}"#, true),
            (r#""some""#, false),
        ] {
            assert_eq!(serde_json::from_str::<CharacterSelector>(text).is_ok(), ok, "{text}");
        }
    }
}
