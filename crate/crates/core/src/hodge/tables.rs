//! Turn tuples whose definite action factors through a finite rotation group.
//!
//! The data ships as a text asset; see its header for the row format.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::abelian::RationalTurn;
use crate::error::{Error, Result};
use crate::fraction::Fraction;

pub const TABLE_ASSET: &str = include_str!("../../assets/finite_tuples.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "lowercase")]
pub enum PolyhedralType {
    /// family member with turns `d/2n, d/2n, (n-d)/2n, (n-d)/2n` after
    /// reduction to the sum-one table
    Dihedral { n: i64, d: i64 },
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl PolyhedralType {
    pub fn family_name(&self) -> &'static str {
        match self {
            PolyhedralType::Dihedral { .. } => "dihedral",
            PolyhedralType::Tetrahedral => "tetrahedral",
            PolyhedralType::Octahedral => "octahedral",
            PolyhedralType::Icosahedral => "icosahedral",
        }
    }
}

impl fmt::Display for PolyhedralType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyhedralType::Dihedral { n, d } => write!(f, "Dihedral({n},{d})"),
            PolyhedralType::Tetrahedral => write!(f, "Tetrahedral"),
            PolyhedralType::Octahedral => write!(f, "Octahedral"),
            PolyhedralType::Icosahedral => write!(f, "Icosahedral"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Finiteness {
    Finite {
        #[serde(flatten)]
        group: PolyhedralType,
    },
    Infinite,
}

impl Finiteness {
    pub fn is_finite(&self) -> bool {
        matches!(self, Finiteness::Finite { .. })
    }
}

impl fmt::Display for Finiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finiteness::Finite { group } => write!(f, "Finite({group})"),
            Finiteness::Infinite => write!(f, "Infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub turns: [Fraction; 4],
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessTable {
    /// common sum of the four turns
    pub sum: i64,
    /// `x + y` for the dihedral family `{x, x, y, y}`
    pub dihedral_pair_sum: Fraction,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessTables {
    pub format: u32,
    pub tables: Vec<FinitenessTable>,
}

impl FinitenessTables {
    pub fn table(&self, sum: i64) -> Option<&FinitenessTable> {
        self.tables.iter().find(|t| t.sum == sum)
    }

    /// Plain-text dump in the asset's row format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&format!("[sum {}]\n", t.sum));
            out.push_str(&format!("dihedral x+y={} | dihedral\n", t.dihedral_pair_sum));
            for r in &t.rows {
                let cells: Vec<String> = r.turns.iter().map(|f| f.to_string()).collect();
                out.push_str(&format!("{} | {}\n", cells.join(" "), r.group));
            }
        }
        out
    }
}

pub fn parse_tables(text: &str) -> Result<FinitenessTables> {
    let mut format = None;
    let mut tables: Vec<FinitenessTable> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let bad = |msg: &str| Error::InvalidInput(format!("table line {}: {msg}: {raw:?}", lineno + 1));
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(v) = line.strip_prefix("format ") {
            format = Some(v.trim().parse().map_err(|_| bad("bad format version"))?);
            continue;
        }
        if let Some(v) = line.strip_prefix("[sum ").and_then(|v| v.strip_suffix(']')) {
            tables.push(FinitenessTable {
                sum: v.trim().parse().map_err(|_| bad("bad section sum"))?,
                dihedral_pair_sum: Fraction::zero(),
                rows: Vec::new(),
            });
            continue;
        }
        let table = tables.last_mut().ok_or_else(|| bad("row before any section"))?;
        let (lhs, group) = line.split_once('|').ok_or_else(|| bad("missing group column"))?;
        let group = group.trim().to_string();
        if let Some(v) = lhs.trim().strip_prefix("dihedral x+y=") {
            table.dihedral_pair_sum = v.trim().parse().map_err(|_| bad("bad pair sum"))?;
            continue;
        }
        let turns: Vec<Fraction> = lhs
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_>>()
            .map_err(|_| bad("bad fraction"))?;
        let turns: [Fraction; 4] = turns.try_into().map_err(|_| bad("expected four turns"))?;
        table.rows.push(TableRow { turns, group });
    }
    let format = format.ok_or_else(|| Error::InvalidInput("table asset has no format line".into()))?;
    if format != 1 {
        return Err(Error::InvalidInput(format!("unsupported table format {format}")));
    }
    Ok(FinitenessTables { format, tables })
}

pub fn finiteness_tables() -> &'static FinitenessTables {
    static TABLES: OnceLock<FinitenessTables> = OnceLock::new();
    TABLES.get_or_init(|| parse_tables(TABLE_ASSET).expect("shipped table asset parses"))
}

fn sorted(mut v: [Fraction; 4]) -> [Fraction; 4] {
    v.sort();
    v
}

fn exceptional_type(name: &str) -> Option<PolyhedralType> {
    match name {
        "tetrahedral" => Some(PolyhedralType::Tetrahedral),
        "octahedral" => Some(PolyhedralType::Octahedral),
        "icosahedral" => Some(PolyhedralType::Icosahedral),
        _ => None,
    }
}

/// `(n, d)` with `x = d/2n` in lowest terms.
fn dihedral_parameters(x: Fraction) -> (i64, i64) {
    let (p, q) = (x.numer(), x.denom());
    if q % 2 == 0 {
        (q / 2, p)
    } else {
        (q, 2 * p)
    }
}

/// Finite-image test for a definite character from its four turns.
pub fn finiteness_lookup(turns: &[RationalTurn; 4]) -> Result<Finiteness> {
    if turns.iter().any(|t| t.is_zero()) {
        return Err(Error::Domain("finiteness tables need four nontrivial values".into()));
    }
    let t = sorted(turns.map(Fraction::from));
    let sum: Fraction = t.iter().copied().sum();
    if !(sum == Fraction::integer(1) || sum == Fraction::integer(3)) {
        return Err(Error::Domain(format!("turn sum {sum} is neither 1 nor 3")));
    }
    let table = finiteness_tables()
        .table(sum.numer())
        .ok_or_else(|| Error::Consistency(format!("no table for sum {sum}")))?;
    for row in &table.rows {
        if sorted(row.turns) == t {
            let group = exceptional_type(&row.group)
                .ok_or_else(|| Error::Consistency(format!("unknown group {:?} in table", row.group)))?;
            return Ok(Finiteness::Finite { group });
        }
    }
    if t[0] == t[1] && t[2] == t[3] && t[0] + t[2] == table.dihedral_pair_sum {
        // bring the pair to the sum-one normalization before reading (n, d)
        let x = if sum == Fraction::one() { t[0] } else { Fraction::one() - t[3] };
        let (n, d) = dihedral_parameters(x);
        return Ok(Finiteness::Finite {
            group: PolyhedralType::Dihedral { n, d },
        });
    }
    Ok(Finiteness::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn turns(s: [&str; 4]) -> [RationalTurn; 4] {
        s.map(|x| x.parse().unwrap())
    }

    fn lookup(s: [&str; 4]) -> Finiteness {
        finiteness_lookup(&turns(s)).unwrap()
    }

    #[test]
    fn table_checksum() {
        let t = finiteness_tables();
        assert_eq!(t.format, 1);
        assert_eq!(t.tables.len(), 2);
        let one = t.table(1).unwrap();
        let three = t.table(3).unwrap();
        // fourteen exceptional rows below the dihedral family, fifteen rows in all
        assert_eq!((one.rows.len(), three.rows.len()), (14, 14));
        assert_eq!(one.dihedral_pair_sum, Fraction::new(1, 2));
        assert_eq!(three.dihedral_pair_sum, Fraction::new(3, 2));
        for table in [one, three] {
            for row in &table.rows {
                let s: Fraction = row.turns.iter().copied().sum();
                assert_eq!(s, Fraction::integer(table.sum), "{row:?}");
            }
        }
        for row in &three.rows {
            let flipped = sorted(row.turns.map(|x| Fraction::one() - x));
            let partner = one.rows.iter().find(|r| sorted(r.turns) == flipped);
            let partner = partner.unwrap_or_else(|| panic!("no partner for {row:?}"));
            assert_eq!(partner.group, row.group);
        }
    }

    #[test]
    fn every_row_is_found() {
        for table in &finiteness_tables().tables {
            for row in &table.rows {
                let ts = row.turns.map(|f| f.turn());
                let v = finiteness_lookup(&ts).unwrap();
                assert_eq!(v, Finiteness::Finite { group: exceptional_type(&row.group).unwrap() });
                // exceptional rows never collide with the dihedral family
                let s = sorted(row.turns);
                assert!(!(s[0] == s[1] && s[2] == s[3] && s[0] + s[2] == table.dihedral_pair_sum));
            }
        }
    }

    #[test]
    fn named_examples() {
        assert_eq!(lookup(["1/6", "1/6", "1/6", "1/2"]), Finiteness::Finite { group: PolyhedralType::Tetrahedral });
        assert_eq!(lookup(["1/2", "5/6", "5/6", "5/6"]), Finiteness::Finite { group: PolyhedralType::Tetrahedral });
        assert_eq!(lookup(["1/4", "1/4", "1/4", "1/4"]), Finiteness::Finite { group: PolyhedralType::Dihedral { n: 2, d: 1 } });
        assert_eq!(lookup(["1/8", "1/8", "1/8", "5/8"]), Finiteness::Infinite);
        assert_eq!(lookup(["1/6", "1/8", "1/10", "73/120"]), Finiteness::Infinite);
        assert_eq!(lookup(["1/10", "2/5", "1/10", "2/5"]), Finiteness::Finite { group: PolyhedralType::Dihedral { n: 5, d: 1 } });
        assert_eq!(lookup(["9/10", "3/5", "9/10", "3/5"]), Finiteness::Finite { group: PolyhedralType::Dihedral { n: 5, d: 1 } });
    }

    #[test]
    fn preconditions() {
        assert!(matches!(finiteness_lookup(&turns(["0", "1/2", "1/4", "1/4"])), Err(Error::Domain(_))));
        assert!(matches!(finiteness_lookup(&turns(["1/2", "1/2", "1/2", "1/2"])), Err(Error::Domain(_))));
    }

    #[test]
    fn render_parses_back() {
        let t = finiteness_tables();
        let again = parse_tables(&format!("format 1\n{}", t.render())).unwrap();
        assert_eq!(&again, t);
    }

    #[test]
    fn json_shape() {
        let v = Finiteness::Finite { group: PolyhedralType::Dihedral { n: 2, d: 1 } };
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"verdict":"Finite","group":"dihedral","n":2,"d":1}"#);
        assert_eq!(serde_json::from_str::<Finiteness>(&s).unwrap(), v);
        assert_eq!(serde_json::to_string(&Finiteness::Infinite).unwrap(), r#"{"verdict":"Infinite"}"#);
    }
}
