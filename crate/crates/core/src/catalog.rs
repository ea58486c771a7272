//! Registry of flag manifolds with two or three isotropy summands.
//!
//! Every entry carries its summand dimensions and the non-zero structure
//! constants, which are fixed by requiring the Kähler–Einstein metric
//! `(1, 2)` or `(1, 2, 3)` to be Einstein. Classical two-summand spaces come
//! in families indexed by `(ℓ, p)` and are built on demand.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::curvature::TripleTable;
use crate::error::{Error, Result};
use crate::poly::{int, Rational};

/// Classical families with two isotropy summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassicalFamily {
    /// `SO(2ℓ+1)/U(p)×SO(2(ℓ−p)+1)`, `2 ≤ p ≤ ℓ`.
    B,
    /// `Sp(ℓ)/U(p)×Sp(ℓ−p)`, `1 ≤ p ≤ ℓ−1`.
    C,
    /// `SO(2ℓ)/U(p)×SO(2(ℓ−p))`, `2 ≤ p ≤ ℓ−2`.
    D,
}

impl ClassicalFamily {
    pub const ALL: [ClassicalFamily; 3] = [Self::B, Self::C, Self::D];

    pub fn letter(self) -> char {
        match self {
            Self::B => 'B',
            Self::C => 'C',
            Self::D => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'B' => Some(Self::B),
            'C' => Some(Self::C),
            'D' => Some(Self::D),
            _ => None,
        }
    }

    /// Human readable parameter range.
    pub fn bound(self) -> &'static str {
        match self {
            Self::B => "2 ≤ p ≤ ℓ",
            Self::C => "1 ≤ p ≤ ℓ−1",
            Self::D => "2 ≤ p ≤ ℓ−2",
        }
    }

    /// Template of the space name, with `l` and `p` as placeholders.
    pub fn template(self) -> &'static str {
        match self {
            Self::B => "SO(2l+1)/U(p)xSO(2(l-p)+1)",
            Self::C => "Sp(l)/U(p)xSp(l-p)",
            Self::D => "SO(2l)/U(p)xSO(2(l-p))",
        }
    }

    pub fn admits(self, l: u32, p: u32) -> bool {
        match self {
            Self::B => 2 <= p && p <= l,
            Self::C => 1 <= p && p < l,
            Self::D => 2 <= p && p + 2 <= l,
        }
    }

    /// The instance with the smallest rank.
    pub fn smallest(self) -> (u32, u32) {
        match self {
            Self::B => (2, 2),
            Self::C => (2, 1),
            Self::D => (4, 2),
        }
    }

    fn dims(self, l: u32, p: u32) -> [u32; 2] {
        match self {
            Self::B => [2 * p * (2 * (l - p) + 1), p * (p - 1)],
            Self::C => [4 * p * (l - p), p * (p + 1)],
            Self::D => [4 * p * (l - p), p * (p - 1)],
        }
    }

    fn name(self, l: u32, p: u32) -> String {
        match self {
            Self::B if l == p => format!("SO({})/U({})", 2 * l + 1, p),
            Self::B => format!("SO({})/U({})xSO({})", 2 * l + 1, p, 2 * (l - p) + 1),
            Self::C => format!("Sp({})/U({})xSp({})", l, p, l - p),
            Self::D => format!("SO({})/U({})xSO({})", 2 * l, p, 2 * (l - p)),
        }
    }
}

impl fmt::Display for ClassicalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// The non-zero structure constants of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureConstants {
    /// `[2;11] = [1;12] = [1;21]`.
    Two { triple211: Rational },
    /// `c112 = [2;11]` and `c123 = [3;12]` with all their permutations.
    Three { c112: Rational, c123: Rational },
}

impl StructureConstants {
    pub fn summands(&self) -> usize {
        match self {
            Self::Two { .. } => 2,
            Self::Three { .. } => 3,
        }
    }

    /// Named values, in a fixed order.
    pub fn named(&self) -> Vec<(&'static str, &Rational)> {
        match self {
            Self::Two { triple211 } => vec![("triple211", triple211)],
            Self::Three { c112, c123 } => vec![("c112", c112), ("c123", c123)],
        }
    }

    /// The fully symmetric triple table these constants determine.
    pub fn triple_table(&self) -> TripleTable {
        match self {
            Self::Two { triple211 } => {
                let mut t = TripleTable::zeros(2);
                t.set_symmetric(1, 0, 0, triple211.clone());
                t
            }
            Self::Three { c112, c123 } => {
                let mut t = TripleTable::zeros(3);
                t.set_symmetric(1, 0, 0, c112.clone());
                t.set_symmetric(2, 0, 1, c123.clone());
                t
            }
        }
    }
}

/// A generalized flag manifold `G/K` with two or three isotropy summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSpace {
    id: String,
    group: String,
    dims: Vec<u32>,
    family_params: Option<(ClassicalFamily, u32, u32)>,
    constants: StructureConstants,
}

impl FlagSpace {
    fn build(id: &str, group: &str, dims: &[u32]) -> Self {
        Self {
            id: id.to_string(),
            group: group.to_string(),
            dims: dims.to_vec(),
            family_params: None,
            constants: structure_constants(dims).expect("catalog dimensions are valid"),
        }
    }

    /// Canonical name, e.g. `"G2/U(2)-short"`.
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Label of the simple group, e.g. `"E7"` or `"B3"`.
    pub fn group(&self) -> &str {
        &self.group
    }

    /// Number of isotropy summands.
    pub fn s(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// `n = dim G/K`.
    pub fn n(&self) -> u32 {
        self.dims.iter().sum()
    }

    pub fn family_params(&self) -> Option<(ClassicalFamily, u32, u32)> {
        self.family_params
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn triple_table(&self) -> TripleTable {
        self.constants.triple_table()
    }

    /// The Kähler–Einstein metric in its `x₁ = 1` normalization.
    pub fn kahler_einstein(&self) -> Vec<f64> {
        (1..=self.s()).map(|k| k as f64).collect()
    }

    pub fn is_type_one(&self) -> bool {
        self.s() == 3
    }
}

impl fmt::Display for FlagSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

const TWO_SUMMAND: [(&str, &str, [u32; 2]); 10] = [
    ("G2/U(2)-short", "G2", [8, 2]),
    ("F4/SO(7)xU(1)", "F4", [16, 14]),
    ("F4/Sp(3)xU(1)", "F4", [28, 2]),
    ("E6/SU(6)xU(1)", "E6", [40, 2]),
    ("E6/SU(2)xSU(5)xU(1)", "E6", [40, 10]),
    ("E7/SU(7)xU(1)", "E7", [70, 14]),
    ("E7/SU(2)xSO(10)xU(1)", "E7", [64, 20]),
    ("E7/SO(12)xU(1)", "E7", [64, 2]),
    ("E8/E7xU(1)", "E8", [112, 2]),
    ("E8/SO(14)xU(1)", "E8", [128, 28]),
];

const TYPE_ONE: [(&str, &str, [u32; 3]); 7] = [
    ("E8/E6xSU(2)xU(1)", "E8", [108, 54, 4]),
    ("E8/SU(8)xU(1)", "E8", [112, 56, 16]),
    ("E7/SU(5)xSU(3)xU(1)", "E7", [60, 30, 8]),
    ("E7/SU(6)xSU(2)xU(1)", "E7", [60, 30, 4]),
    ("E6/SU(3)xSU(3)xSU(2)xU(1)", "E6", [36, 18, 4]),
    ("F4/SU(3)xSU(2)xU(1)", "F4", [24, 12, 4]),
    ("G2/U(2)-long", "G2", [4, 2, 4]),
];

/// All fixed catalog entries: ten two-summand spaces followed by the seven
/// three-summand spaces of Type I. Classical families are not enumerated;
/// see [`instantiate_classical`].
pub fn list_spaces() -> Vec<FlagSpace> {
    TWO_SUMMAND
        .iter()
        .map(|(id, g, d)| FlagSpace::build(id, g, d))
        .chain(TYPE_ONE.iter().map(|(id, g, d)| FlagSpace::build(id, g, d)))
        .collect()
}

/// The fixed entries plus the smallest instance of each classical family.
pub fn default_sweep() -> Vec<FlagSpace> {
    let mut spaces = list_spaces();
    for fam in ClassicalFamily::ALL {
        let (l, p) = fam.smallest();
        spaces.push(instantiate_classical(fam, l, p).expect("smallest instance is valid"));
    }
    spaces
}

/// Builds the classical space of family `family` with parameters `(ℓ, p)`.
pub fn instantiate_classical(family: ClassicalFamily, l: u32, p: u32) -> Result<FlagSpace> {
    if !family.admits(l, p) {
        return Err(Error::ParameterOutOfRange {
            family: family.letter(),
            bound: family.bound(),
            l,
            p,
        });
    }
    let dims = family.dims(l, p);
    Ok(FlagSpace {
        id: family.name(l, p),
        group: format!("{}{}", family.letter(), l),
        dims: dims.to_vec(),
        family_params: Some((family, l, p)),
        constants: structure_constants(&dims)?,
    })
}

/// Resolves a space by catalog id (case-insensitive, `×` accepted for `x`) or
/// by the family shorthand `B(ℓ,p)`, `C(ℓ,p)`, `D(ℓ,p)`.
pub fn find_space(name: &str) -> Result<FlagSpace> {
    let wanted = normalize(name);
    if let Some(space) = list_spaces().into_iter().find(|s| normalize(s.id()) == wanted) {
        return Ok(space);
    }
    if let Some((family, l, p)) = parse_family(name) {
        return instantiate_classical(family, l, p);
    }
    // Instantiated classical names, e.g. "Sp(2)/U(1)xSp(1)", for small ranks.
    for family in ClassicalFamily::ALL {
        for l in 2..=64 {
            for p in 1..=l {
                if family.admits(l, p) && normalize(&family.name(l, p)) == wanted {
                    return instantiate_classical(family, l, p);
                }
            }
        }
    }
    Err(Error::UnknownSpace(name.to_string()))
}

fn normalize(name: &str) -> String {
    name.trim().replace('×', "x").replace(' ', "").to_ascii_lowercase()
}

fn parse_family(name: &str) -> Option<(ClassicalFamily, u32, u32)> {
    let name = name.trim();
    let mut chars = name.chars();
    let family = ClassicalFamily::from_letter(chars.next()?)?;
    let inner = chars.as_str().strip_prefix('(')?.strip_suffix(')')?;
    let (l, p) = inner.split_once(',')?;
    Some((family, l.trim().parse().ok()?, p.trim().parse().ok()?))
}

/// Structure constants determined by the dimensions.
///
/// Two summands: `[2;11] = d₁d₂/(d₁+4d₂)`. Three summands:
/// `c112 = (d₁d₂ + 2d₁d₃ − d₂d₃)/(d₁+4d₂+9d₃)` and
/// `c123 = (d₁+d₂)d₃/(d₁+4d₂+9d₃)`.
pub fn structure_constants(dims: &[u32]) -> Result<StructureConstants> {
    if dims.contains(&0) {
        return Err(Error::InvalidDimensions(format!(
            "all dimensions must be at least 1, got {dims:?}"
        )));
    }
    let d: Vec<Rational> = dims.iter().map(|&x| int(i64::from(x))).collect();
    match d.as_slice() {
        [d1, d2] => Ok(StructureConstants::Two {
            triple211: d1 * d2 / (d1 + int(4) * d2),
        }),
        [d1, d2, d3] => {
            let den = d1 + int(4) * d2 + int(9) * d3;
            let num = d1 * d2 + int(2) * d1 * d3 - d2 * d3;
            if !num.is_positive() {
                return Err(Error::InvalidDimensions(format!(
                    "d1d2 + 2d1d3 - d2d3 must be positive, got {num} for {dims:?}"
                )));
            }
            let c112 = num / &den;
            let c123 = (d1 + d2) * d3 / den;
            debug_assert!(!c123.is_zero());
            Ok(StructureConstants::Three { c112, c123 })
        }
        _ => Err(Error::InvalidDimensions(format!(
            "expected 2 or 3 summands, got {}",
            dims.len()
        ))),
    }
}
