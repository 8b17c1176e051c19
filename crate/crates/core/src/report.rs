//! Serializable summaries of a surface and its isotypic summands.
//!
//! Classification fields are exact: turns and angles are fractions, and
//! angles are multiples of pi.

use serde::{Deserialize, Serialize};

use crate::abelian::{character_from_turns, enumerate_characters, AbelianGroup, Character, RationalTurn};
use crate::backend::CohomologyBackend;
use crate::cohomology::{global_rel_split, restriction_classify, CharContext, RelSplit, RestrictionCase};
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::hodge::{
    discreteness_verdict, signature_from_turns, triangle_from_turns, Discreteness, Finiteness, GeometryClass,
    ReasonCode, Signature, TriangleData,
};
use crate::surface::{build_surface, geometric_invariants, BranchTuple, CharacterSelector};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub format: u32,
}

impl Default for Header {
    fn default() -> Self {
        Self {
            tool: "pillowcase".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format: FORMAT_VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceBlock {
    pub moduli: Vec<i64>,
    pub tuple: Vec<Vec<i64>>,
    pub order: usize,
    pub squares: usize,
    pub genus: i64,
    pub euler_characteristic: i64,
    pub stratum: String,
    pub translation: bool,
    pub branch_orders: [i64; 4],
    pub all_sigma_singular: bool,
    /// some branch element is trivial, giving cone angle `pi` points
    pub has_order_one: bool,
    pub rel_dimension: usize,
    pub rel_split: RelSplit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRow {
    pub character: Character,
    pub turns: [RationalTurn; 4],
    pub turn_sum: Fraction,
    pub dim: usize,
    pub abs_dim: usize,
    pub restriction: RestrictionCase,
    pub signature: Option<Signature>,
    pub geometry: GeometryClass,
    pub triangle: Option<TriangleData>,
    pub finiteness: Option<Finiteness>,
    pub discreteness: Discreteness,
    pub reason: ReasonCode,
    pub rule: String,
    pub extension: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    pub surface: SurfaceBlock,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub characters: Vec<CharacterRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("report: {e}")))
    }
}

pub fn surface_block(group: &AbelianGroup, tuple: &BranchTuple) -> Result<SurfaceBlock> {
    let model = build_surface(group, tuple)?;
    let inv = geometric_invariants(&model);
    Ok(SurfaceBlock {
        moduli: group.moduli().to_vec(),
        tuple: tuple.elems().iter().map(|x| x.coords().to_vec()).collect(),
        order: group.order(),
        squares: inv.squares,
        genus: inv.genus,
        euler_characteristic: inv.euler_characteristic,
        stratum: inv.stratum.to_string(),
        translation: inv.translation,
        branch_orders: tuple.orders(group),
        all_sigma_singular: inv.all_sigma_singular,
        has_order_one: inv.has_order_one,
        rel_dimension: 2 * group.order() + 1,
        rel_split: global_rel_split(group, tuple)?,
    })
}

/// Characters picked by a selector; `None` means all of them.
pub fn select_characters(
    group: &AbelianGroup,
    tuple: &BranchTuple,
    selector: Option<&CharacterSelector>,
) -> Result<Vec<Character>> {
    match selector {
        None | Some(CharacterSelector::All(_)) => Ok(enumerate_characters(group)),
        Some(CharacterSelector::DualCoords { dual_coords }) => Ok(vec![Character::new(group, dual_coords)?]),
        Some(CharacterSelector::Turns { turns }) => {
            let turns: Vec<RationalTurn> = turns.iter().map(|t| t.parse()).collect::<Result<_>>()?;
            Ok(vec![character_from_turns(group, tuple.elems(), &turns)?])
        }
    }
}

/// Parses `"p/q,p/q,p/q,p/q"`.
pub fn parse_turn_list(text: &str) -> Result<CharacterSelector> {
    let turns: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    if turns.len() != 4 {
        return Err(Error::InvalidInput(format!("expected 4 comma-separated turns, got {}", turns.len())));
    }
    for t in &turns {
        t.parse::<RationalTurn>()?;
    }
    Ok(CharacterSelector::Turns { turns })
}

/// One row per character. Dimensions and signatures come from `backend`;
/// the signature is also checked against the turn-sum formula.
pub fn character_rows(
    group: &AbelianGroup,
    tuple: &BranchTuple,
    chars: &[Character],
    backend: &dyn CohomologyBackend,
) -> Result<Vec<CharacterRow>> {
    let rel = backend.rel_dims(group, tuple, chars)?;
    let abs = backend.abs_dims(group, tuple, chars)?;
    chars
        .iter()
        .zip(rel.into_iter().zip(abs))
        .map(|(chi, ((_, dim), (_, abs_dim)))| {
            let turns = CharContext::turns_of(group, tuple, chi);
            let signature = if chi.is_trivial() {
                None
            } else {
                let computed = backend.signature(group, tuple, chi)?;
                let formula = signature_from_turns(&turns)?;
                if computed != formula {
                    return Err(Error::Consistency(format!(
                        "{chi}: {} backend gives signature {computed}, the turn formula {formula}",
                        backend.name()
                    )));
                }
                Some(computed)
            };
            let verdict = discreteness_verdict(group, tuple, chi)?;
            let geometry = crate::hodge::geometry_from_turns(&turns)?;
            let triangle = if geometry.has_triangle() {
                Some(triangle_from_turns(&turns)?)
            } else {
                None
            };
            Ok(CharacterRow {
                character: chi.clone(),
                turn_sum: crate::hodge::turn_sum(&turns),
                turns,
                dim,
                abs_dim,
                restriction: restriction_classify(group, tuple, chi).case,
                signature,
                geometry,
                triangle,
                finiteness: verdict.finiteness,
                discreteness: verdict.verdict,
                reason: verdict.reason,
                rule: verdict.rule,
                extension: verdict.extension,
            })
        })
        .collect()
}

pub fn build_report(
    group: &AbelianGroup,
    tuple: &BranchTuple,
    chars: &[Character],
    backend: &dyn CohomologyBackend,
) -> Result<Report> {
    Ok(Report {
        header: Header::default(),
        surface: surface_block(group, tuple)?,
        characters: character_rows(group, tuple, chars, backend)?,
    })
}
