//! Floating-point cross-checks built directly from the square complex.
//!
//! Nothing here reads exact bases, exact pullbacks or signature formulas:
//! the coboundary comes from the square boundaries, the form from the cup
//! product on packed coefficient tables, and characters are evaluated as
//! `exp(2 pi i t)`.
//!
//! Cochains live either in edge coordinates (slot `kind * |G| + index(g)`
//! holds `m(e^{kind+1}_g)`) or in packed coordinates, where table `k` at
//! `u` holds `m(e^{k+1}_{-u})` and translation by `h` is `T[u] -> T[u - h]`.

pub mod verify;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::abelian::{enumerate_characters, AbelianGroup, Character, GroupElement};
use crate::error::{Error, Result};
use crate::hodge::Signature;
use crate::surface::{build_surface, edge_slot, BranchTuple, SurfaceModel};

pub use verify::{
    alpha_cocycle, random_loop_words, verify_invariance, verify_named_cocycle, verify_pullbacks,
    word_pullback, CochainSpec, VerificationReport,
};

pub type CMatrix = DMatrix<Complex64>;

pub const RANK_THRESHOLD: f64 = 1e-8;
pub const GAP_RATIO: f64 = 1e3;
pub const RESIDUAL_THRESHOLD: f64 = 1e-9;
pub const CLOSEDNESS_THRESHOLD: f64 = 1e-12;
pub const ZERO_FLOOR: f64 = 1e-12;
pub const EIGEN_THRESHOLD: f64 = 1e-8;
pub const ORACLE_ORDER_BOUND: usize = 64;
/// Bound for the single-summand route, which never forms `4|G| x 4|G|` matrices.
pub const ISOTYPIC_ORDER_BOUND: usize = 4096;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(2 pi i t)` for a turn given as a float in `[0, 1)`.
pub fn unit(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

pub struct NumericComplex {
    model: SurfaceModel,
    elements: Vec<GroupElement>,
    /// `add[i * n + j]` is the index of `g_i + g_j`
    add: Vec<usize>,
    neg: Vec<usize>,
    coboundary: CMatrix,
}

impl NumericComplex {
    pub fn new(group: &AbelianGroup, tuple: &BranchTuple) -> Result<Self> {
        if group.order() > ORACLE_ORDER_BOUND {
            return Err(Error::Capability(format!(
                "the oracle handles |G| <= {ORACLE_ORDER_BOUND}, got {}",
                group.order()
            )));
        }
        let model = build_surface(group, tuple)?;
        let n = group.order();
        let elements: Vec<GroupElement> = group.elements().collect();
        let mut add = vec![0; n * n];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                add[i * n + j] = group.index_of(&group.add(x, y));
            }
        }
        let neg = elements.iter().map(|x| group.index_of(&group.neg(x))).collect();
        let mut coboundary = CMatrix::zeros(2 * n, 4 * n);
        for (row, sq) in model.squares().iter().enumerate() {
            for (e, sign) in sq.boundary {
                coboundary[(row, edge_slot(n, e))] += c(f64::from(sign));
            }
        }
        Ok(Self {
            model,
            elements,
            add,
            neg,
            coboundary,
        })
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn group(&self) -> &AbelianGroup {
        self.model.group()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        4 * self.order()
    }

    /// Dense `2|G| x 4|G|` coboundary in edge coordinates, rows in square order.
    pub fn coboundary(&self) -> &CMatrix {
        &self.coboundary
    }

    pub fn index(&self, x: &GroupElement) -> usize {
        self.group().index_of(x)
    }

    /// `rho(g)` for every element, in element order.
    pub fn character_values(&self, chi: &Character) -> Vec<Complex64> {
        self.elements
            .iter()
            .map(|x| unit(chi.value(self.group(), x).to_f64()))
            .collect()
    }

    /// Deck action on edge coordinates: `(R_h m)(e_g) = m(e_{g + h})`.
    pub fn deck(&self, h: usize) -> CMatrix {
        let n = self.order();
        let mut r = CMatrix::zeros(4 * n, 4 * n);
        for k in 0..4 {
            for g in 0..n {
                r[(k * n + g, k * n + self.add[g * n + h])] = c(1.0);
            }
        }
        r
    }

    /// `(1/|G|) sum_h conj(rho(h)) R_h`.
    pub fn projector(&self, chi: &Character) -> CMatrix {
        let n = self.order();
        let vals = self.character_values(chi);
        let mut p = CMatrix::zeros(4 * n, 4 * n);
        for (h, v) in vals.iter().enumerate() {
            p += self.deck(h) * (v.conj() / n as f64);
        }
        p
    }

    /// Permutation taking edge coordinates to packed coordinates.
    pub fn packing(&self) -> CMatrix {
        let n = self.order();
        let mut p = CMatrix::zeros(4 * n, 4 * n);
        for k in 0..4 {
            for u in 0..n {
                p[(k * n + u, k * n + self.neg[u])] = c(1.0);
            }
        }
        p
    }

    /// Translation by `h` on one packed table: `T[u] -> T[u - h]`.
    pub fn shift(&self, h: &GroupElement) -> CMatrix {
        let n = self.order();
        let h = self.index(h);
        let mut s = CMatrix::zeros(n, n);
        for u in 0..n {
            s[(self.add[u * n + h], u)] = c(1.0);
        }
        s
    }

    /// Orthonormal basis of the cocycles, in edge coordinates.
    pub fn cocycles(&self) -> Result<CMatrix> {
        null_space(&self.coboundary)
    }

    /// Orthonormal basis of the `rho`-isotypic cocycles, in edge coordinates.
    pub fn summand(&self, chi: &Character) -> Result<CMatrix> {
        let k = self.cocycles()?;
        column_space(&(self.projector(chi) * k))
    }

    /// `M` with `A(x, y) = y^H M x` on packed coordinates.
    pub fn hodge_packed(&self) -> CMatrix {
        let n = self.order();
        let group = self.group();
        let h = self.model.tuple().top_offsets(group);
        let id = CMatrix::identity(n, n);
        let s2 = self.shift(&h[1]);
        let s23 = self.shift(&h[2]);
        let s234 = self.shift(&h[3]);
        let scale = Complex64::new(0.0, -0.25);
        let mut m = CMatrix::zeros(4 * n, 4 * n);
        let mut put = |bi: usize, bj: usize, blk: CMatrix| {
            m.view_mut((bi * n, bj * n), (n, n)).copy_from(&(blk * scale));
        };
        // (b,a') - (h2 b, a') and the adjoint pairs, read off the cup product
        put(0, 1, &id - &s2);
        put(1, 0, s2.adjoint() - &id);
        put(2, 3, &id - s23.adjoint() * &s234);
        put(3, 2, s234.adjoint() * &s23 - &id);
        m
    }

    /// The form on edge coordinates.
    pub fn hodge_edge(&self) -> CMatrix {
        let p = self.packing();
        p.transpose() * self.hodge_packed() * p
    }

    /// Vertex coboundary `f -> f(end) - f(start)` on edges.
    pub fn vertex_coboundary(&self) -> CMatrix {
        let n = self.order();
        let v = self.model.vertex_count();
        let mut d0 = CMatrix::zeros(4 * n, v);
        for kind in 0..4 {
            for index in 0..n {
                let e = crate::surface::EdgeId { kind, index };
                let row = edge_slot(n, e);
                d0[(row, self.model.edge_end(e))] += c(1.0);
                d0[(row, self.model.edge_start(e))] -= c(1.0);
            }
        }
        d0
    }
}

/// Rank by singular-value gap; refuses when the gap is too small to call.
pub fn numeric_rank(m: &CMatrix) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    rank_of(&sorted_svd(m).0)
}

fn sorted_svd(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested u");
    let vt = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMatrix::from_columns(&order.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let vt = CMatrix::from_rows(&order.iter().map(|&i| vt.row(i).into_owned()).collect::<Vec<_>>());
    (s, u, vt)
}

fn rank_of(s: &[f64]) -> Result<usize> {
    let Some(&top) = s.first() else { return Ok(0) };
    // inputs have entries of size one, so a tiny top value is rounding noise
    if top <= ZERO_FLOOR {
        return Ok(0);
    }
    let r = s.iter().take_while(|&&x| x > RANK_THRESHOLD * top).count();
    if r < s.len() && s[r] > 0.0 && s[r - 1] / s[r] < GAP_RATIO {
        return Err(Error::Conditioning(format!(
            "ambiguous rank {r}: singular values {:.3e} and {:.3e} have gap {:.3e} < {GAP_RATIO:.0e}",
            s[r - 1],
            s[r],
            s[r - 1] / s[r]
        )));
    }
    Ok(r)
}

/// Orthonormal basis of the right null space.
pub fn null_space(m: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    if rows == 0 {
        return Ok(CMatrix::identity(cols, cols));
    }
    // pad to a square so the SVD returns a full set of right singular vectors
    let mut sq = CMatrix::zeros(rows.max(cols), cols);
    sq.view_mut((0, 0), (rows, cols)).copy_from(m);
    let (s, _, vt) = sorted_svd(&sq);
    let r = rank_of(&s)?;
    let cols_out: Vec<_> = (r..cols).map(|i| vt.row(i).adjoint()).collect();
    Ok(if cols_out.is_empty() {
        CMatrix::zeros(cols, 0)
    } else {
        CMatrix::from_columns(&cols_out)
    })
}

/// Orthonormal basis of the column space.
pub fn column_space(m: &CMatrix) -> Result<CMatrix> {
    if m.ncols() == 0 {
        return Ok(m.clone());
    }
    let (s, u, _) = sorted_svd(m);
    let r = rank_of(&s)?;
    Ok(u.columns(0, r).into_owned())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn numeric_h1_dims(group: &AbelianGroup, tuple: &BranchTuple) -> Result<Vec<(Character, usize)>> {
    numeric_rel_dims_for(group, tuple, &enumerate_characters(group))
}

pub fn numeric_rel_dims_for(group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<Vec<(Character, usize)>> {
    let cx = NumericComplex::new(group, tuple)?;
    let k = cx.cocycles()?;
    chars
        .iter()
        .map(|chi| Ok((chi.clone(), numeric_rank(&(cx.projector(chi) * &k))?)))
        .collect()
}

/// Dimensions of the isotypic parts of absolute cohomology: cocycles modulo
/// coboundaries of functions on the vertices.
pub fn numeric_abs_dims(group: &AbelianGroup, tuple: &BranchTuple) -> Result<Vec<(Character, usize)>> {
    numeric_abs_dims_for(group, tuple, &enumerate_characters(group))
}

pub fn numeric_abs_dims_for(group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<Vec<(Character, usize)>> {
    let cx = NumericComplex::new(group, tuple)?;
    let k = cx.cocycles()?;
    let d0 = cx.vertex_coboundary();
    chars
        .iter()
        .map(|chi| {
            let p = cx.projector(chi);
            let rel = numeric_rank(&(&p * &k))?;
            let exact_part = numeric_rank(&(&p * &d0))?;
            let abs = rel.checked_sub(exact_part).ok_or_else(|| {
                Error::Consistency(format!("{chi}: vertex coboundaries of rank {exact_part} exceed cocycles of rank {rel}"))
            })?;
            Ok((chi.clone(), abs))
        })
        .collect()
}

/// Gram matrix of the form on an orthonormal basis of the summand.
pub fn numeric_gram(cx: &NumericComplex, chi: &Character) -> Result<CMatrix> {
    let u = cx.summand(chi)?;
    Ok(u.adjoint() * cx.hodge_edge() * &u)
}

pub fn signature_of_hermitian(g: &CMatrix) -> Signature {
    if g.nrows() == 0 {
        return Signature::new(0, 0, 0);
    }
    let eig = g.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let mut sig = Signature::new(0, 0, 0);
    for &l in eig.eigenvalues.iter() {
        if l.abs() <= EIGEN_THRESHOLD * scale {
            sig.n0 += 1;
        } else if l > 0.0 {
            sig.n_plus += 1;
        } else {
            sig.n_minus += 1;
        }
    }
    sig
}

/// Signature on `H1(rho)`: the full complex when `|G|` is within the oracle
/// bound, the single-summand route above it.
pub fn numeric_signature(group: &AbelianGroup, tuple: &BranchTuple, chi: &Character) -> Result<Signature> {
    if chi.is_trivial() {
        return Err(Error::Domain("the form vanishes on the trivial summand".into()));
    }
    if group.order() > ORACLE_ORDER_BOUND {
        return Ok(signature_of_hermitian(&isotypic_gram(group, tuple, chi)?));
    }
    let cx = NumericComplex::new(group, tuple)?;
    Ok(signature_of_hermitian(&numeric_gram(&cx, chi)?))
}

/// Gram matrix on an orthonormal basis of the `rho`-isotypic cocycles, built
/// without any `4|G| x 4|G|` matrix.
///
/// Isotypic cochains are `m(e^k_g) = x_k rho(g)`; the square boundaries give
/// a `2|G| x 4` system for `x`, and the form is applied table by table with
/// index maps in place of shift matrices.
pub fn isotypic_gram(group: &AbelianGroup, tuple: &BranchTuple, chi: &Character) -> Result<CMatrix> {
    let n = group.order();
    if n > ISOTYPIC_ORDER_BOUND {
        return Err(Error::Capability(format!(
            "the single-summand oracle handles |G| <= {ISOTYPIC_ORDER_BOUND}, got {n}"
        )));
    }
    let model = build_surface(group, tuple)?;
    let elements: Vec<GroupElement> = group.elements().collect();
    let rho: Vec<Complex64> = elements.iter().map(|x| unit(chi.value(group, x).to_f64())).collect();
    let norm = 1.0 / (n as f64).sqrt();
    // columns: unit-norm isotypic cochains supported on one edge kind
    let mut system = CMatrix::zeros(2 * n, 4);
    for (row, sq) in model.squares().iter().enumerate() {
        for (e, sign) in sq.boundary {
            system[(row, e.kind)] += rho[e.index] * (f64::from(sign) * norm);
        }
    }
    let x = null_space(&system)?;
    // every column carries the same packed table t[u] = rho(-u) / sqrt(n),
    // so y^H M x reduces to Q[i][j] = t^H M_ij t
    let t: Vec<Complex64> = elements.iter().map(|u| rho[group.index_of(&group.neg(u))] * norm).collect();
    // (S_s t)[v] = t[v - s]
    let shifted = |s: &GroupElement| -> Vec<Complex64> {
        elements.iter().map(|v| t[group.index_of(&group.sub(v, s))]).collect()
    };
    let g2 = tuple.get(1);
    let g4 = tuple.get(3);
    let s2 = shifted(g2);
    let s2h = shifted(&group.neg(g2));
    let s4 = shifted(g4);
    let s4h = shifted(&group.neg(g4));
    let pair = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        t.iter().zip(a.iter().zip(b)).map(|(y, (p, q))| y.conj() * (p - q)).sum::<Complex64>() * Complex64::new(0.0, -0.25)
    };
    let mut q = CMatrix::zeros(4, 4);
    q[(0, 1)] = pair(&t, &s2);
    q[(1, 0)] = pair(&s2h, &t);
    // S_{h23}^H S_{h234} = S_{g4}
    q[(2, 3)] = pair(&t, &s4);
    q[(3, 2)] = pair(&s4h, &t);
    Ok(x.adjoint() * q * &x)
}

/// Largest entry of the form between distinct summands.
pub fn cross_summand_max(cx: &NumericComplex) -> Result<f64> {
    let chars = enumerate_characters(cx.group());
    let bases: Vec<CMatrix> = chars.iter().map(|c| cx.summand(c)).collect::<Result<_>>()?;
    let m = cx.hodge_edge();
    let mut worst = 0.0f64;
    for (i, a) in bases.iter().enumerate() {
        for (j, b) in bases.iter().enumerate() {
            if i != j && a.ncols() > 0 && b.ncols() > 0 {
                worst = worst.max(max_abs(&(b.adjoint() * &m * a)));
            }
        }
    }
    Ok(worst)
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
    fn coboundary_entries_are_signs() {
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        let cx = NumericComplex::new(&g, &t).unwrap();
        for z in cx.coboundary().iter() {
            assert!(z.im == 0.0 && [-1.0, 0.0, 1.0].contains(&z.re));
        }
        let p = cx.projector(&Character::new(&g, &[1]).unwrap());
        assert!(max_abs(&(&p * &p - &p)) <= 1e-12);
    }

    #[test]
    fn dims_on_small_surfaces() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        let dims = numeric_h1_dims(&g, &t).unwrap();
        let v: Vec<usize> = dims.iter().map(|d| d.1).collect();
        assert_eq!(v, [3, 2, 2, 2]);
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        assert_eq!(numeric_h1_dims(&g, &t).unwrap().iter().map(|d| d.1).sum::<usize>(), 13);
        let g = AbelianGroup::trivial();
        let t = BranchTuple::new(&g, std::array::from_fn(|_| g.zero())).unwrap();
        assert_eq!(numeric_h1_dims(&g, &t).unwrap().iter().map(|d| d.1).collect::<Vec<_>>(), [3]);
    }

    #[test]
    fn signatures_on_small_surfaces() {
        let (g, t) = cyclic(4, [1, 1, 1, 1]);
        let s = |d| numeric_signature(&g, &t, &Character::new(&g, &[d]).unwrap()).unwrap();
        assert_eq!(s(1), Signature::new(0, 2, 0));
        assert_eq!(s(2), Signature::new(0, 1, 1));
        let (g, t) = cyclic(3, [0, 1, 1, 1]);
        let s = numeric_signature(&g, &t, &Character::new(&g, &[1]).unwrap()).unwrap();
        assert_eq!(s, Signature::new(1, 1, 0));
    }

    #[test]
    fn both_routes_agree() {
        for (n, tup) in [(4, [1, 1, 1, 1]), (6, [1, 1, 1, 3]), (8, [1, 1, 1, 5]), (12, [1, 2, 4, 5]), (3, [0, 1, 1, 1])] {
            let (g, t) = cyclic(n, tup);
            let cx = NumericComplex::new(&g, &t).unwrap();
            for chi in enumerate_characters(&g).into_iter().filter(|c| !c.is_trivial()) {
                let full = signature_of_hermitian(&numeric_gram(&cx, &chi).unwrap());
                let single = signature_of_hermitian(&isotypic_gram(&g, &t, &chi).unwrap());
                assert_eq!(full, single, "Z/{n} {tup:?} {chi}");
            }
        }
    }

    #[test]
    fn summands_are_orthogonal() {
        let (g, t) = cyclic(6, [1, 1, 1, 3]);
        let cx = NumericComplex::new(&g, &t).unwrap();
        assert!(cross_summand_max(&cx).unwrap() <= RESIDUAL_THRESHOLD);
    }

    #[test]
    fn rank_refuses_small_gaps() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1e-7), c(1e-9)]));
        assert!(matches!(numeric_rank(&m), Err(Error::Conditioning(_))));
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1e-15)]));
        assert_eq!(numeric_rank(&m).unwrap(), 1);
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3e-16), c(1e-16)]));
        assert_eq!(numeric_rank(&m).unwrap(), 0);
    }

    #[test]
    fn oversized_groups_are_refused() {
        let (g, t) = cyclic(66, [1, 1, 1, 63]);
        assert!(matches!(NumericComplex::new(&g, &t), Err(Error::Capability(_))));
    }
}
