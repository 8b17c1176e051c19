//! The graph of branch tuples connected by basic moves, and loop generators.

use std::collections::{HashMap, VecDeque};

use crate::abelian::{
    enumerate_automorphisms, enumerate_characters, AbelianGroup, Character, GroupAutomorphism,
    DEFAULT_AUT_BOUND,
};
use crate::error::{Error, Result};
use crate::surface::BranchTuple;

use super::{move_source, AffineWord, Move, Step};

pub const DEFAULT_VERTEX_BOUND: usize = 1_000_000;

/// Deck loops use every nonzero element up to this group order, a basis above it.
pub const ALL_DECK_LOOPS_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub source: usize,
    pub target: usize,
    pub mv: Move,
}

#[derive(Debug, Clone)]
pub struct TupleGraph {
    group: AbelianGroup,
    include_m: bool,
    vertices: Vec<BranchTuple>,
    index: HashMap<BranchTuple, usize>,
    edges: Vec<GraphEdge>,
    /// edge through which each vertex was discovered; `None` for the base
    parent: Vec<Option<usize>>,
}

pub fn build_tuple_graph(group: &AbelianGroup, base: &BranchTuple, include_m: bool) -> Result<TupleGraph> {
    build_tuple_graph_bounded(group, base, include_m, DEFAULT_VERTEX_BOUND)
}

pub fn build_tuple_graph_bounded(
    group: &AbelianGroup,
    base: &BranchTuple,
    include_m: bool,
    max_vertices: usize,
) -> Result<TupleGraph> {
    let base = BranchTuple::new(group, base.elems().clone())?;
    let mut moves = vec![Move::T, Move::S, Move::F];
    if include_m {
        for psi in enumerate_automorphisms(group, DEFAULT_AUT_BOUND)? {
            if !psi.is_identity(group) {
                moves.push(Move::M(psi));
            }
        }
    }
    let mut g = TupleGraph {
        group: group.clone(),
        include_m,
        vertices: vec![base.clone()],
        index: HashMap::from([(base, 0)]),
        edges: Vec::new(),
        parent: vec![None],
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for mv in &moves {
            let src = move_source(group, mv, &g.vertices[v]);
            let u = match g.index.get(&src) {
                Some(&u) => u,
                None => {
                    if g.vertices.len() >= max_vertices {
                        return Err(Error::Capability(format!(
                            "tuple graph exceeds {max_vertices} vertices"
                        )));
                    }
                    let u = g.vertices.len();
                    g.vertices.push(src.clone());
                    g.index.insert(src, u);
                    g.parent.push(Some(g.edges.len()));
                    queue.push_back(u);
                    u
                }
            };
            g.edges.push(GraphEdge {
                source: u,
                target: v,
                mv: mv.clone(),
            });
        }
    }
    Ok(g)
}

impl TupleGraph {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn base(&self) -> &BranchTuple {
        &self.vertices[0]
    }

    pub fn includes_m(&self) -> bool {
        self.include_m
    }

    pub fn vertices(&self) -> &[BranchTuple] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn vertex_index(&self, t: &BranchTuple) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.parent.contains(&Some(e))
    }

    fn step(&self, e: usize, forward: bool) -> Step {
        let edge = &self.edges[e];
        Step {
            mv: edge.mv.clone(),
            source: self.vertices[edge.source].clone(),
            target: self.vertices[edge.target].clone(),
            forward,
        }
    }

    /// Path from the base to `v` inside the spanning tree.
    pub fn tree_path(&self, v: usize) -> AffineWord {
        let mut steps = Vec::new();
        let mut at = v;
        while let Some(e) = self.parent[at] {
            // vertex `at` was discovered as the source of edge e
            steps.push(self.step(e, false));
            at = self.edges[e].target;
        }
        steps.reverse();
        AffineWord {
            start: self.base().clone(),
            steps,
        }
    }

    /// `source | label | target`, one edge per line, in discovery order.
    pub fn edge_listing(&self) -> String {
        self.edges
            .iter()
            .map(|e| format!("{} | {} | {}\n", self.vertices[e.source], e.mv.label(), self.vertices[e.target]))
            .collect()
    }

    /// Loops at the base that carry one non-tree edge each.
    pub fn cycle_loops(&self) -> Vec<AffineWord> {
        (0..self.edges.len())
            .filter(|&e| !self.is_tree_edge(e))
            .map(|e| {
                let edge = &self.edges[e];
                let mut w = self.tree_path(edge.source);
                w.steps.push(self.step(e, true));
                w.steps.extend(self.tree_path(edge.target).inverse().steps);
                w
            })
            .collect()
    }

    pub fn deck_loops(&self) -> Vec<AffineWord> {
        let group = &self.group;
        let elems = if group.order() <= ALL_DECK_LOOPS_BOUND {
            group.elements().filter(|x| !group.is_zero(x)).collect()
        } else {
            group.basis()
        };
        elems
            .into_iter()
            .map(|g| AffineWord {
                start: self.base().clone(),
                steps: vec![Step {
                    mv: Move::R(g),
                    source: self.base().clone(),
                    target: self.base().clone(),
                    forward: true,
                }],
            })
            .collect()
    }
}

/// Non-tree-edge loops followed by deck loops; together they generate the
/// affine group (the subgroup acting trivially on `G` without relabelling).
pub fn affine_generators(graph: &TupleGraph) -> Vec<AffineWord> {
    let mut out = graph.cycle_loops();
    out.extend(graph.deck_loops());
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedAutomorphism {
    pub automorphism: GroupAutomorphism,
    /// `(rho, rho o psi^{-1})` for every character
    pub character_map: Vec<(Character, Character)>,
}

/// Automorphisms of `G` induced by loops at the base, closed under composition.
pub fn realized_automorphisms(graph: &TupleGraph) -> Result<Vec<RealizedAutomorphism>> {
    if !graph.includes_m() {
        return Err(Error::InvalidInput(
            "realized automorphisms need a graph built with relabelling edges".into(),
        ));
    }
    let group = graph.group();
    let gens: Vec<GroupAutomorphism> = graph
        .cycle_loops()
        .iter()
        .map(|w| w.automorphism(group))
        .collect();
    let mut found = vec![GroupAutomorphism::identity(group)];
    let mut i = 0;
    while i < found.len() {
        for g in &gens {
            let next = g.compose(group, &found[i]);
            if !found.contains(&next) {
                found.push(next);
            }
        }
        i += 1;
    }
    found.sort();
    let chars = enumerate_characters(group);
    Ok(found
        .into_iter()
        .map(|psi| {
            let inv = psi.inverse(group);
            let character_map = chars
                .iter()
                .map(|c| (c.clone(), c.compose(group, inv.images())))
                .collect();
            RealizedAutomorphism {
                automorphism: psi,
                character_map,
            }
        })
        .collect())
}
