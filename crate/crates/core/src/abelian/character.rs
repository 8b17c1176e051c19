use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::group::{AbelianGroup, GroupElement};
use super::snf::{smith, IntMatrix};
use crate::error::{Error, Result};

/// A point of `Q/Z`, stored as a reduced fraction `p/q` with `0 <= p < q`.
/// Multiplying by `2 pi` gives an argument in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTurn {
    num: i64,
    den: i64,
}

impl RationalTurn {
    pub const ZERO: RationalTurn = RationalTurn { num: 0, den: 1 };
    pub const HALF: RationalTurn = RationalTurn { num: 1, den: 2 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("turn with zero denominator".into()));
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let num = num.rem_euclid(den);
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Multiplicative order of `exp(2 pi i t)`.
    pub fn order(&self) -> i64 {
        self.den
    }

    /// The fraction as a rational in `[0, 1)`.
    pub fn fraction(&self) -> num_rational::Ratio<i64> {
        num_rational::Ratio::new(self.num, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn scale(&self, n: i64) -> Self {
        Self::new(
            (i128::from(self.num) * i128::from(n)).rem_euclid(i128::from(self.den)) as i64,
            self.den,
        )
        .unwrap()
    }
}

impl Add for RationalTurn {
    type Output = RationalTurn;
    fn add(self, rhs: Self) -> Self {
        let l = self.den.lcm(&rhs.den);
        RationalTurn::new(self.num * (l / self.den) + rhs.num * (l / rhs.den), l).unwrap()
    }
}

impl Neg for RationalTurn {
    type Output = RationalTurn;
    fn neg(self) -> Self {
        RationalTurn::new(-self.num, self.den).unwrap()
    }
}

impl Sub for RationalTurn {
    type Output = RationalTurn;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialOrd for RationalTurn {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalTurn {
    fn cmp(&self, other: &Self) -> Ordering {
        (i128::from(self.num) * i128::from(other.den))
            .cmp(&(i128::from(other.num) * i128::from(self.den)))
    }
}

impl fmt::Display for RationalTurn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for RationalTurn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse turn {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => RationalTurn::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => RationalTurn::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for RationalTurn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalTurn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One-dimensional character `x -> sum_i a_i x_i / m_i  (mod 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    dual: Vec<i64>,
}

impl Character {
    pub fn new(group: &AbelianGroup, dual: &[i64]) -> Result<Self> {
        if dual.len() != group.rank() {
            return Err(Error::InvalidInput(format!(
                "dual coordinates {dual:?} do not match group {group}"
            )));
        }
        Ok(Self {
            dual: dual
                .iter()
                .zip(group.moduli())
                .map(|(a, m)| a.rem_euclid(*m))
                .collect(),
        })
    }

    pub fn trivial(group: &AbelianGroup) -> Self {
        Self {
            dual: vec![0; group.rank()],
        }
    }

    pub fn dual_coords(&self) -> &[i64] {
        &self.dual
    }

    pub fn is_trivial(&self) -> bool {
        self.dual.iter().all(|&a| a == 0)
    }

    pub fn value(&self, group: &AbelianGroup, x: &GroupElement) -> RationalTurn {
        let n = group.exponent();
        let total: i128 = self
            .dual
            .iter()
            .zip(x.coords())
            .zip(group.moduli())
            .map(|((&a, &c), &m)| i128::from(a) * i128::from(c) * i128::from(n / m))
            .sum();
        RationalTurn::new(total.rem_euclid(i128::from(n)) as i64, n).unwrap()
    }

    pub fn conjugate(&self, group: &AbelianGroup) -> Self {
        Self {
            dual: self
                .dual
                .iter()
                .zip(group.moduli())
                .map(|(a, m)| (m - a) % m)
                .collect(),
        }
    }

    /// `x -> chi(psi(x))` for an endomorphism given by its images of the basis.
    pub fn compose(&self, group: &AbelianGroup, images: &[GroupElement]) -> Self {
        let dual = images
            .iter()
            .zip(group.moduli())
            .map(|(img, &m)| {
                let t = self.value(group, img);
                // t has denominator dividing m since m * e_i = 0
                t.numer() * (m / t.denom())
            })
            .collect();
        Self { dual }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi{:?}", self.dual)
    }
}

/// All `|G|` characters, trivial first, in dual-coordinate index order.
pub fn enumerate_characters(group: &AbelianGroup) -> Vec<Character> {
    group
        .elements()
        .map(|x| Character {
            dual: x.coords().to_vec(),
        })
        .collect()
}

/// Unique character taking the prescribed turns on a generating tuple.
pub fn character_from_turns(
    group: &AbelianGroup,
    tuple: &[GroupElement],
    turns: &[RationalTurn],
) -> Result<Character> {
    if tuple.len() != turns.len() {
        return Err(Error::InvalidInput(format!(
            "{} turns for {} generators",
            turns.len(),
            tuple.len()
        )));
    }
    if !group.generates(tuple) {
        return Err(Error::InvalidInput(
            "tuple does not generate the group".into(),
        ));
    }
    // A character exists iff every integer relation among the generators
    // is respected by the turns.
    for rel in group.relation_lattice(tuple) {
        let total = rel
            .iter()
            .zip(turns)
            .fold(RationalTurn::ZERO, |acc, (&c, t)| acc + t.scale(c));
        if !total.is_zero() {
            return Err(Error::Validation(format!(
                "turns violate the relation {} = 0 (evaluates to {total})",
                describe_relation(&rel)
            )));
        }
    }
    if group.is_trivial() {
        return Ok(Character::trivial(group));
    }
    // Solve  sum_i a_i * x_{j,i} * (N / m_i) = t_j * N  (mod N)  for the dual coordinates a.
    let n = group.exponent();
    let k = group.rank();
    let rows = tuple.len();
    let mut b: IntMatrix = vec![vec![0; k]; rows];
    for (j, x) in tuple.iter().enumerate() {
        for i in 0..k {
            b[j][i] = i128::from(x.coords()[i] * (n / group.moduli()[i]));
        }
    }
    let rhs: Vec<i128> = turns
        .iter()
        .map(|t| {
            if n % t.denom() != 0 {
                return None;
            }
            Some(i128::from(t.numer() * (n / t.denom())))
        })
        .collect::<Option<_>>()
        .ok_or_else(|| {
            Error::Validation(format!(
                "a turn has denominator not dividing the group exponent {n}"
            ))
        })?;
    let s = smith(&b, k);
    let nn = i128::from(n);
    let urhs: Vec<i128> = (0..rows)
        .map(|r| (0..rows).map(|c| s.left[r][c] * rhs[c]).sum::<i128>())
        .collect();
    let mut sol = vec![0i128; k];
    for i in 0..k.min(rows) {
        let d = s.diag[i].rem_euclid(nn);
        let g = d.gcd(&nn);
        let target = urhs[i].rem_euclid(nn);
        if target % g != 0 {
            return Err(Error::Consistency(
                "linear system for the character has no solution".into(),
            ));
        }
        if d != 0 {
            let inv = mod_inverse(d / g, nn / g);
            sol[i] = ((target / g) * inv).rem_euclid(nn / g);
        }
    }
    let dual: Vec<i64> = (0..k)
        .map(|r| {
            let v: i128 = (0..k).map(|c| s.right[r][c] * sol[c]).sum();
            v.rem_euclid(i128::from(group.moduli()[r])) as i64
        })
        .collect();
    let chi = Character::new(group, &dual)?;
    for (x, t) in tuple.iter().zip(turns) {
        if chi.value(group, x) != *t {
            return Err(Error::Consistency(
                "solved character does not reproduce the turns".into(),
            ));
        }
    }
    Ok(chi)
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let e = a.extended_gcd(&m);
    e.x.rem_euclid(m)
}

fn describe_relation(rel: &[i64]) -> String {
    let terms: Vec<String> = rel
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| match c {
            1 => format!("g{}", j + 1),
            -1 => format!("-g{}", j + 1),
            c => format!("{c}g{}", j + 1),
        })
        .collect();
    terms.join(" + ").replace("+ -", "- ")
}
