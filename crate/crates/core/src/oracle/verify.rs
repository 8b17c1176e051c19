//! Pass/fail reports: named cocycles, pullback invariance and block structure.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    column_space, max_abs, null_space, CMatrix, NumericComplex, CLOSEDNESS_THRESHOLD, RESIDUAL_THRESHOLD,
};
use crate::abelian::{enumerate_characters, AbelianGroup, Character};
use crate::affine::{affine_generators, build_tuple_graph, AffineWord, Move};
use crate::error::{Error, Result};
use crate::surface::{BranchTuple, Layer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub surface: String,
    pub character: Option<String>,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub fn surface_label(group: &AbelianGroup, tuple: &BranchTuple) -> String {
    let g = if group.is_trivial() {
        "1".to_string()
    } else {
        group.moduli().iter().map(|m| format!("Z/{m}")).collect::<Vec<_>>().join(" x ")
    };
    format!("{g} {tuple}")
}

const TABLES: [&str; 4] = ["a", "b", "c", "d"];

/// Real edge values given as four packed tables: `tables[j][u]` is the
/// value on `e^{j+1}_{-u}`, so index `u` plays the role of `k` in closed
/// forms written against `g^{-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainSpec {
    pub name: String,
    pub moduli: Vec<i64>,
    pub tuple: Vec<Vec<i64>>,
    /// dual coordinates of the character whose real part should contain the cochain
    pub character: Vec<i64>,
    pub tables: [Vec<f64>; 4],
}

impl CochainSpec {
    pub fn resolve(&self) -> Result<(AbelianGroup, BranchTuple, Character)> {
        let group = AbelianGroup::new(self.moduli.clone())?;
        if self.tuple.len() != 4 {
            return Err(Error::InvalidInput(format!("expected 4 tuple entries, got {}", self.tuple.len())));
        }
        let rows: [&[i64]; 4] = std::array::from_fn(|j| self.tuple[j].as_slice());
        let tuple = BranchTuple::from_coords(&group, rows)?;
        let chi = Character::new(&group, &self.character)?;
        if let Some(t) = self.tables.iter().find(|t| t.len() != group.order()) {
            return Err(Error::InvalidInput(format!(
                "cochain table has {} entries, the group has {}",
                t.len(),
                group.order()
            )));
        }
        Ok((group, tuple, chi))
    }

    pub fn zero(&self) -> Self {
        Self {
            name: format!("{} (zero)", self.name),
            tables: self.tables.clone().map(|t| vec![0.0; t.len()]),
            ..self.clone()
        }
    }

    pub fn negate_table(&self, j: usize) -> Self {
        let mut out = self.clone();
        out.name = format!("{} ({} negated)", self.name, TABLES[j]);
        out.tables[j].iter_mut().for_each(|x| *x = -*x);
        out
    }
}

/// The real cocycle on `Z/8 (1,1,1,5)` in the summand of `rho(1) = e^{2 pi i/8}`.
pub fn alpha_cocycle() -> CochainSpec {
    let c8 = (PI / 8.0).cos();
    let k = |k: usize| k as f64 * PI / 4.0;
    CochainSpec {
        name: "alpha".into(),
        moduli: vec![8],
        tuple: vec![vec![1], vec![1], vec![1], vec![5]],
        character: vec![1],
        tables: [
            (0..8).map(|i| -2.0 * c8 * k(i).cos()).collect(),
            (0..8).map(|i| (PI / 8.0 + k(i)).cos()).collect(),
            vec![0.0; 8],
            (0..8).map(|i| (PI / 8.0 - k(i)).cos()).collect(),
        ],
    }
}

/// Closedness and membership in `H1(rho) + H1(conj rho)`.
pub fn verify_named_cocycle(spec: &CochainSpec) -> Result<VerificationReport> {
    let (group, tuple, chi) = spec.resolve()?;
    let cx = NumericComplex::new(&group, &tuple)?;
    let packed = CMatrix::from_iterator(
        4 * group.order(),
        1,
        spec.tables.iter().flatten().map(|&x| Complex64::new(x, 0.0)),
    );
    let pk = cx.packing();
    let edge = pk.transpose() * &packed;
    let boundary = cx.coboundary() * &edge;
    let closed = max_abs(&boundary);
    let mut detail = None;
    if closed > CLOSEDNESS_THRESHOLD {
        let (row, _) = boundary
            .iter()
            .enumerate()
            .find(|(_, z)| z.norm() > CLOSEDNESS_THRESHOLD)
            .expect("some entry exceeds the threshold");
        let sq = &cx.model().squares()[row];
        let layer = match sq.layer {
            Layer::Bottom => "bottom",
            Layer::Top => "top",
        };
        let failing: Vec<usize> = boundary
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > CLOSEDNESS_THRESHOLD)
            .map(|(r, _)| r)
            .collect();
        let tops = failing
            .iter()
            .filter(|&&r| cx.model().squares()[r].layer == Layer::Top)
            .count();
        detail = Some(format!(
            "first violated square: {layer} {} (element {}), residual {:.3e}; {} bottom and {tops} top squares fail",
            sq.index,
            group.element_at(sq.index),
            boundary[row].norm(),
            failing.len() - tops,
        ));
    }
    let conj = chi.conjugate(&group);
    let mut cols = Vec::new();
    for c in if conj == chi { vec![chi.clone()] } else { vec![chi.clone(), conj] } {
        let u = cx.summand(&c)?;
        cols.extend(u.column_iter().map(|c| c.into_owned()));
    }
    let basis = if cols.is_empty() {
        CMatrix::zeros(edge.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    };
    let projected = &basis * (basis.adjoint() * &edge);
    let projection = max_abs(&(&projected - &edge));
    let residuals = BTreeMap::from([
        ("closedness".to_string(), closed),
        ("projection".to_string(), projection),
        ("norm".to_string(), edge.norm()),
    ]);
    Ok(VerificationReport {
        check: format!("named-cocycle {}", spec.name),
        surface: surface_label(&group, &tuple),
        character: Some(chi.to_string()),
        pass: closed <= CLOSEDNESS_THRESHOLD && projection <= RESIDUAL_THRESHOLD,
        residuals,
        detail,
    })
}

fn step_matrix(cx: &NumericComplex, mv: &Move, target: &BranchTuple) -> Result<CMatrix> {
    let group = cx.group();
    let n = cx.order();
    let [h1, h2, h3, h4] = target.elems();
    let e = group.zero();
    let h23 = group.add(h2, h3);
    let h234 = group.add(&h23, h4);
    // (row, column, shift, coefficient): row indexes the source table
    let terms = match mv {
        Move::T => vec![(0, 1, e.clone(), 1.0), (1, 2, e.clone(), 1.0), (2, 3, e.clone(), 1.0), (3, 0, e, 1.0)],
        Move::S => vec![
            (0, 0, h1.clone(), -1.0),
            (1, 0, e.clone(), 1.0),
            (1, 1, e.clone(), 1.0),
            (2, 2, e.clone(), 1.0),
            (3, 0, h1.clone(), 1.0),
            (3, 3, e, 1.0),
        ],
        Move::F => vec![(0, 0, e, -1.0), (1, 3, h234, -1.0), (2, 2, h23, -1.0), (3, 1, h2.clone(), -1.0)],
        Move::R(g) => (0..4).map(|i| (i, i, g.clone(), 1.0)).collect(),
        Move::M(_) => {
            return Err(Error::Capability(
                "relabelling moves are not linear over the group ring".into(),
            ))
        }
    };
    let mut p = CMatrix::zeros(4 * n, 4 * n);
    for (i, j, h, coef) in terms {
        let s = cx.shift(&h) * Complex64::new(coef, 0.0);
        let mut blk = p.view_mut((i * n, j * n), (n, n));
        blk += s;
    }
    Ok(p)
}

/// Pullback of a loop on packed coordinates, from the move formulas.
pub fn word_pullback(cx: &NumericComplex, word: &AffineWord) -> Result<CMatrix> {
    if !word.is_loop() {
        return Err(Error::InvalidInput("pullback comparison needs a loop".into()));
    }
    let mut acc = CMatrix::identity(cx.dim(), cx.dim());
    for s in &word.steps {
        let p = step_matrix(cx, &s.mv, &s.target)?;
        let p = if s.forward {
            p
        } else {
            p.try_inverse()
                .ok_or_else(|| Error::Conditioning(format!("pullback of {} is singular", s.mv.label())))?
        };
        acc *= p;
    }
    Ok(acc)
}

/// Checks a list of packed pullbacks against the form and the summands.
///
/// `chars` restricts which source summands are examined; the invariance
/// residual is always taken over all cocycles.
pub fn verify_pullbacks(
    cx: &NumericComplex,
    pullbacks: &[(String, CMatrix)],
    chars: &[Character],
) -> Result<VerificationReport> {
    let pk = cx.packing();
    let m = cx.hodge_packed();
    let d_packed = cx.coboundary() * pk.transpose();
    let k = null_space(&d_packed)?;
    let all = enumerate_characters(cx.group());
    let mut summands = Vec::new();
    for chi in &all {
        summands.push(column_space(&(&pk * cx.projector(chi) * pk.transpose() * &k))?);
    }
    let (mut inv, mut closed, mut leak) = (0.0f64, 0.0f64, 0.0f64);
    let mut worst: Option<(f64, String)> = None;
    for (label, p) in pullbacks {
        closed = closed.max(max_abs(&(&d_packed * p * &k)));
        let e = p.adjoint() * &m * p - &m;
        inv = inv.max(max_abs(&(k.adjoint() * &e * &k)));
        for (chi, u) in all.iter().zip(&summands) {
            if u.ncols() == 0 || !chars.contains(chi) {
                continue;
            }
            let form = max_abs(&(u.adjoint() * &e * u));
            // the image lies in a single summand, possibly a different one
            let image = p * u;
            let (target, spill) = all
                .iter()
                .zip(&summands)
                .map(|(c, v)| (c, max_abs(&(&image - v * (v.adjoint() * &image)))))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("at least one character");
            inv = inv.max(form);
            leak = leak.max(spill);
            let bad = form.max(spill);
            if bad > RESIDUAL_THRESHOLD && worst.as_ref().is_none_or(|w| bad > w.0) {
                worst = Some((
                    bad,
                    format!("{label}: summand {chi} (image nearest {target}) has form residual {form:.3e} and leakage {spill:.3e}"),
                ));
            }
        }
    }
    let pass = inv <= RESIDUAL_THRESHOLD && leak <= RESIDUAL_THRESHOLD && closed <= RESIDUAL_THRESHOLD;
    let chars_label = if chars.len() == all.len() {
        "all".to_string()
    } else {
        chars.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    };
    Ok(VerificationReport {
        check: "invariance".into(),
        surface: surface_label(cx.group(), cx.model().tuple()),
        character: Some(chars_label),
        residuals: BTreeMap::from([
            ("form".to_string(), inv),
            ("leakage".to_string(), leak),
            ("cocycles".to_string(), closed),
            ("words".to_string(), pullbacks.len() as f64),
        ]),
        pass,
        detail: if pass { None } else { worst.map(|w| w.1) },
    })
}

pub fn verify_invariance(
    group: &AbelianGroup,
    tuple: &BranchTuple,
    words: &[AffineWord],
    chars: Option<&[Character]>,
) -> Result<VerificationReport> {
    let cx = NumericComplex::new(group, tuple)?;
    let pullbacks = words
        .iter()
        .map(|w| Ok((w.to_word_string(), word_pullback(&cx, w)?)))
        .collect::<Result<Vec<_>>>()?;
    let all = enumerate_characters(group);
    verify_pullbacks(&cx, &pullbacks, chars.unwrap_or(&all))
}

/// Random products of the affine generators and their inverses, of length 1 to 6.
pub fn random_loop_words(group: &AbelianGroup, tuple: &BranchTuple, count: usize, seed: u64) -> Result<Vec<AffineWord>> {
    let graph = build_tuple_graph(group, tuple, false)?;
    let gens = affine_generators(&graph);
    if gens.is_empty() {
        return Ok(vec![AffineWord::identity(tuple); count]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            let mut w = AffineWord::identity(tuple);
            for _ in 0..len {
                let g = &gens[rng.gen_range(0..gens.len())];
                let g = if rng.gen_bool(0.5) { g.clone() } else { g.inverse() };
                w = w.then(&g)?;
            }
            Ok(w)
        })
        .collect()
}
