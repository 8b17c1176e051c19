//! Interchangeable computations of dimensions and signatures.
//!
//! `exact` works in cyclotomic arithmetic on the four-dimensional summand
//! coordinates; `numeric` rebuilds everything in floating point on the full
//! cochain complex.

use crate::abelian::{AbelianGroup, Character};
use crate::cohomology::{isotypic_basis, restriction_classify};
use crate::error::{Error, Result};
use crate::hodge::{gram_signature, summand_form, Signature};
use crate::oracle;
use crate::registry::{Named, Registry};
use crate::surface::BranchTuple;

pub type DimensionMap = Vec<(Character, usize)>;

pub trait CohomologyBackend: Named + Send + Sync {
    /// `dim H^1(M, Sigma)_rho` for each listed character.
    fn rel_dims(&self, group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<DimensionMap>;
    /// `dim H^1(M)_rho` for each listed character.
    fn abs_dims(&self, group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<DimensionMap>;
    /// Signature of the Hermitian form on a nontrivial summand.
    fn signature(&self, group: &AbelianGroup, tuple: &BranchTuple, chi: &Character) -> Result<Signature>;
}

pub struct ExactBackend;

impl Named for ExactBackend {
    fn name(&self) -> &'static str {
        "exact"
    }
}

impl CohomologyBackend for ExactBackend {
    fn rel_dims(&self, group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<DimensionMap> {
        Ok(chars
            .iter()
            .map(|chi| (chi.clone(), isotypic_basis(group, tuple, chi).dimension))
            .collect())
    }

    fn abs_dims(&self, group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<DimensionMap> {
        Ok(chars
            .iter()
            .map(|chi| (chi.clone(), restriction_classify(group, tuple, chi).abs_dim))
            .collect())
    }

    fn signature(&self, group: &AbelianGroup, tuple: &BranchTuple, chi: &Character) -> Result<Signature> {
        if chi.is_trivial() {
            return Err(Error::Domain("the form vanishes on the trivial summand".into()));
        }
        gram_signature(&summand_form(group, tuple, chi))
    }
}

pub struct NumericBackend;

impl Named for NumericBackend {
    fn name(&self) -> &'static str {
        "numeric"
    }
}

impl CohomologyBackend for NumericBackend {
    fn rel_dims(&self, group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<DimensionMap> {
        oracle::numeric_rel_dims_for(group, tuple, chars)
    }

    fn abs_dims(&self, group: &AbelianGroup, tuple: &BranchTuple, chars: &[Character]) -> Result<DimensionMap> {
        oracle::numeric_abs_dims_for(group, tuple, chars)
    }

    fn signature(&self, group: &AbelianGroup, tuple: &BranchTuple, chi: &Character) -> Result<Signature> {
        oracle::numeric_signature(group, tuple, chi)
    }
}

pub fn default_backends() -> Registry<dyn CohomologyBackend> {
    let mut r: Registry<dyn CohomologyBackend> = Registry::new("backend");
    r.register(Box::new(ExactBackend)).register(Box::new(NumericBackend));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{enumerate_characters, GroupElement};

    #[test]
    fn backends_agree_on_z6() {
        let g = AbelianGroup::cyclic(6);
        let t = BranchTuple::new(&g, [1, 1, 1, 3].map(|x| GroupElement(vec![x]))).unwrap();
        let backends = default_backends();
        let exact = backends.get("exact").unwrap();
        let numeric = backends.get("numeric").unwrap();
        let all = enumerate_characters(&g);
        assert_eq!(exact.rel_dims(&g, &t, &all).unwrap(), numeric.rel_dims(&g, &t, &all).unwrap());
        assert_eq!(exact.abs_dims(&g, &t, &all).unwrap(), numeric.abs_dims(&g, &t, &all).unwrap());
        for chi in enumerate_characters(&g).into_iter().filter(|c| !c.is_trivial()) {
            assert_eq!(exact.signature(&g, &t, &chi).unwrap(), numeric.signature(&g, &t, &chi).unwrap());
        }
        assert!(backends.get("quadruple").is_err());
    }
}
