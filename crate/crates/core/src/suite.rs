//! Exact results checked against the floating-point oracle, surface by surface.

use std::collections::BTreeMap;

use crate::abelian::{enumerate_characters, AbelianGroup, Character};
use crate::backend::{CohomologyBackend, ExactBackend};
use crate::error::{Error, Result};
use crate::hodge::signature_exact;
use crate::oracle::{
    self, alpha_cocycle, cross_summand_max, max_abs, random_loop_words, verify_invariance, verify_named_cocycle,
    verify_pullbacks, word_pullback, NumericComplex, VerificationReport, CLOSEDNESS_THRESHOLD, RESIDUAL_THRESHOLD,
};
use crate::surface::{build_surface, geometric_invariants, BranchTuple};

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub words: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { words: 100, seed: 2024 }
    }
}

fn report(
    check: &str,
    group: &AbelianGroup,
    tuple: &BranchTuple,
    residuals: &[(&str, f64)],
    pass: bool,
    detail: Option<String>,
) -> VerificationReport {
    VerificationReport {
        check: check.into(),
        surface: oracle::verify::surface_label(group, tuple),
        character: None,
        residuals: residuals.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
        pass,
        detail,
    }
}

fn mismatch_detail<T: std::fmt::Debug>(bad: &[(Character, T, T)]) -> Option<String> {
    bad.first().map(|(chi, a, b)| format!("{} mismatches, first {chi}: exact {a:?}, numeric {b:?}", bad.len()))
}

pub fn check_dimensions(group: &AbelianGroup, tuple: &BranchTuple) -> Result<VerificationReport> {
    let chars = enumerate_characters(group);
    let exact = ExactBackend.rel_dims(group, tuple, &chars)?;
    let numeric = oracle::numeric_rel_dims_for(group, tuple, &chars)?;
    let bad: Vec<_> = exact
        .iter()
        .zip(&numeric)
        .filter(|(a, b)| a.1 != b.1)
        .map(|(a, b)| (a.0.clone(), a.1, b.1))
        .collect();
    let total: usize = exact.iter().map(|d| d.1).sum();
    let expected = 2 * group.order() + 1;
    let shape = exact.iter().all(|(chi, d)| *d == if chi.is_trivial() { 3 } else { 2 });
    Ok(report(
        "dimensions",
        group,
        tuple,
        &[("mismatches", bad.len() as f64), ("total", total as f64), ("expected_total", expected as f64)],
        bad.is_empty() && total == expected && shape,
        mismatch_detail(&bad),
    ))
}

pub fn check_signatures(group: &AbelianGroup, tuple: &BranchTuple) -> Result<VerificationReport> {
    let mut bad = Vec::new();
    let mut count = 0;
    for chi in enumerate_characters(group).into_iter().filter(|c| !c.is_trivial()) {
        let formula = signature_exact(group, tuple, &chi)?;
        let numeric = oracle::numeric_signature(group, tuple, &chi)?;
        count += 1;
        if formula != numeric {
            bad.push((chi, formula, numeric));
        }
    }
    Ok(report(
        "signatures",
        group,
        tuple,
        &[("mismatches", bad.len() as f64), ("characters", count as f64)],
        bad.is_empty(),
        mismatch_detail(&bad),
    ))
}

pub fn check_genus(group: &AbelianGroup, tuple: &BranchTuple) -> Result<VerificationReport> {
    let genus = geometric_invariants(&build_surface(group, tuple)?).genus;
    let chars = enumerate_characters(group);
    let exact: usize = ExactBackend.abs_dims(group, tuple, &chars)?.iter().map(|d| d.1).sum();
    let numeric: usize = oracle::numeric_abs_dims_for(group, tuple, &chars)?.iter().map(|d| d.1).sum();
    let target = 2 * genus;
    Ok(report(
        "genus",
        group,
        tuple,
        &[("exact_abs_total", exact as f64), ("numeric_abs_total", numeric as f64), ("two_genus", target as f64)],
        exact as i64 == target && numeric as i64 == target,
        None,
    ))
}

pub fn check_projectors(group: &AbelianGroup, tuple: &BranchTuple) -> Result<VerificationReport> {
    let cx = NumericComplex::new(group, tuple)?;
    let mut idem = 0.0f64;
    for chi in enumerate_characters(group) {
        let p = cx.projector(&chi);
        idem = idem.max(max_abs(&(&p * &p - &p)));
    }
    let cross = cross_summand_max(&cx)?;
    Ok(report(
        "projectors",
        group,
        tuple,
        &[("idempotence", idem), ("cross_summand_form", cross)],
        idem <= CLOSEDNESS_THRESHOLD && cross <= RESIDUAL_THRESHOLD,
        None,
    ))
}

pub fn check_invariance(group: &AbelianGroup, tuple: &BranchTuple, opts: SuiteOptions) -> Result<VerificationReport> {
    let words = random_loop_words(group, tuple, opts.words, opts.seed)?;
    verify_invariance(group, tuple, &words, None)
}

/// Every check that applies to the surface.
pub fn verify_surface(group: &AbelianGroup, tuple: &BranchTuple, opts: SuiteOptions) -> Result<Vec<VerificationReport>> {
    let mut out = vec![
        check_dimensions(group, tuple)?,
        check_genus(group, tuple)?,
        check_projectors(group, tuple)?,
        check_invariance(group, tuple, opts)?,
    ];
    if !group.is_trivial() {
        out.insert(1, check_signatures(group, tuple)?);
    }
    let alpha = alpha_cocycle();
    let (ag, at, _) = alpha.resolve()?;
    if ag == *group && at == *tuple {
        out.push(verify_named_cocycle(&alpha)?);
    }
    Ok(out)
}

pub const FIXTURES: [&str; 4] = ["alpha", "alpha-zero", "alpha-negated-b", "corrupted-pullback"];

/// Built-in fixtures; the last two are expected to fail.
pub fn fixture_report(name: &str) -> Result<VerificationReport> {
    let alpha = alpha_cocycle();
    match name {
        "alpha" => verify_named_cocycle(&alpha),
        "alpha-zero" => verify_named_cocycle(&alpha.zero()),
        "alpha-negated-b" => verify_named_cocycle(&alpha.negate_table(1)),
        "corrupted-pullback" => {
            let (g, t, chi) = alpha.resolve()?;
            let cx = NumericComplex::new(&g, &t)?;
            let words = random_loop_words(&g, &t, 1, 1)?;
            let p = word_pullback(&cx, &words[0])?;
            let u = cx.packing() * cx.summand(&chi)?;
            let u0 = u.column(0).into_owned();
            let p = &p + &p * (&u0 * u0.adjoint());
            let mut r = verify_pullbacks(&cx, &[("corrupted".into(), p)], &enumerate_characters(&g))?;
            r.check = "invariance (corrupted fixture)".into();
            Ok(r)
        }
        other => Err(Error::InvalidInput(format!(
            "unknown fixture {other:?}; known: {}",
            FIXTURES.join(", ")
        ))),
    }
}
