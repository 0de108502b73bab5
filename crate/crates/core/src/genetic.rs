//! The p-adic genetic code: codons numbered in base 5, 5-adic and 2-adic
//! codon distances, the degeneracy structure of the vertebrate mitochondrial
//! code, and the 2-adic plane of codons.

use crate::error::{invalid, Error, Result};
use crate::padic::padic_norm;
use crate::Rational;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nucleotide {
    C,
    A,
    U,
    G,
}

impl Nucleotide {
    pub const ALL: [Nucleotide; 4] = [Nucleotide::C, Nucleotide::A, Nucleotide::U, Nucleotide::G];

    /// `C, A, U, G → 1, 2, 3, 4`.
    pub fn digit(self) -> u32 {
        match self {
            Nucleotide::C => 1,
            Nucleotide::A => 2,
            Nucleotide::U => 3,
            Nucleotide::G => 4,
        }
    }

    pub fn from_digit(d: u32) -> Result<Self> {
        Self::ALL.get((d as usize).wrapping_sub(1)).copied().ok_or_else(|| invalid(format!("no nucleotide has digit {d}")))
    }

    /// Two-bit code `A = 00, G = 01, U = 10, C = 11`.
    pub fn bits(self) -> (u32, u32) {
        match self {
            Nucleotide::A => (0, 0),
            Nucleotide::G => (0, 1),
            Nucleotide::U => (1, 0),
            Nucleotide::C => (1, 1),
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'C' => Ok(Nucleotide::C),
            'A' => Ok(Nucleotide::A),
            'U' | 'T' => Ok(Nucleotide::U),
            'G' => Ok(Nucleotide::G),
            _ => Err(Error::Parse(format!("invalid nucleotide {c:?}"))),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Nucleotide::C => 'C',
            Nucleotide::A => 'A',
            Nucleotide::U => 'U',
            Nucleotide::G => 'G',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Codon(pub [Nucleotide; 3]);

impl Codon {
    /// All 64 codons in increasing numbering.
    pub fn all() -> Vec<Codon> {
        (0..64).map(|i| Codon([0, 1, 2].map(|k| Nucleotide::ALL[(i >> (2 * k)) & 3]))).collect()
    }

    /// `c0 + 5 c1 + 25 c2`, where `c0` is the first letter.
    pub fn number(&self) -> u32 {
        self.0.iter().rev().fold(0, |acc, n| acc * 5 + n.digit())
    }

    pub fn from_number(n: u32) -> Result<Self> {
        let digits = [n % 5, n / 5 % 5, n / 25];
        if n / 25 > 4 || digits.contains(&0) {
            return Err(invalid(format!("{n} is not a codon number")));
        }
        Ok(Codon([Nucleotide::from_digit(digits[0])?, Nucleotide::from_digit(digits[1])?, Nucleotide::from_digit(digits[2])?]))
    }

    /// Digits `c0 c1 c2` as written in the code table.
    pub fn digits(&self) -> String {
        self.0.iter().map(|n| char::from_digit(n.digit(), 10).unwrap()).collect()
    }
}

pub fn encode_codon(c: &Codon) -> u32 {
    c.number()
}

pub fn decode_codon(n: u32) -> Result<Codon> {
    Codon::from_number(n)
}

impl FromStr for Codon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 3 {
            return Err(Error::Parse(format!("a codon has three letters, got {s:?}")));
        }
        Ok(Codon([Nucleotide::from_char(chars[0])?, Nucleotide::from_char(chars[1])?, Nucleotide::from_char(chars[2])?]))
    }
}

impl fmt::Display for Codon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|n| write!(f, "{}", n.letter()))
    }
}

impl From<Codon> for String {
    fn from(c: Codon) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Codon {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn int_distance(a: i64, b: i64, p: u64) -> Rational {
    padic_norm(&Rational::from_integer(BigInt::from(a - b)), p)
}

/// `|n1 − n2|_p` on codon numbers.
pub fn codon_distance(c1: &Codon, c2: &Codon, p: u64) -> Result<Rational> {
    crate::padic::check_prime(p)?;
    Ok(int_distance(c1.number() as i64, c2.number() as i64, p))
}

pub fn distance_5adic(c1: &Codon, c2: &Codon) -> Rational {
    int_distance(c1.number() as i64, c2.number() as i64, 5)
}

pub fn distance_2adic(c1: &Codon, c2: &Codon) -> Rational {
    int_distance(c1.number() as i64, c2.number() as i64, 2)
}

/// Positionwise sum of `|n1 − n2|_p` over two codon sequences.
pub fn modified_hamming(s1: &[Codon], s2: &[Codon], p: u64) -> Result<Rational> {
    if s1.len() != s2.len() {
        return Err(Error::ShapeMismatch(format!("sequences of length {} and {}", s1.len(), s2.len())));
    }
    s1.iter().zip(s2).try_fold(Rational::zero(), |acc, (a, b)| Ok(acc + codon_distance(a, b, p)?))
}

/// Positionwise sum over nucleotide sequences. For `p = 5` the nucleotides are
/// compared through their digits, for `p = 2` through their two-bit codes.
pub fn modified_hamming_nucleotides(s1: &[Nucleotide], s2: &[Nucleotide], p: u64) -> Result<Rational> {
    if s1.len() != s2.len() {
        return Err(Error::ShapeMismatch(format!("sequences of length {} and {}", s1.len(), s2.len())));
    }
    let label = |n: &Nucleotide| -> Result<i64> {
        match p {
            5 => Ok(n.digit() as i64),
            2 => {
                let (hi, lo) = n.bits();
                Ok((2 * hi + lo) as i64)
            }
            _ => Err(invalid(format!("nucleotide distances are defined for p = 2 and p = 5, not {p}"))),
        }
    };
    s1.iter().zip(s2).try_fold(Rational::zero(), |acc, (a, b)| Ok(acc + int_distance(label(a)?, label(b)?, p)))
}

/// Reads plain or FASTA text as a codon sequence; headers and whitespace are skipped.
pub fn parse_codon_sequence(text: &str) -> Result<Vec<Codon>> {
    let letters: Vec<Nucleotide> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('>'))
        .flat_map(|l| l.chars().filter(|c| !c.is_whitespace()))
        .map(Nucleotide::from_char)
        .collect::<Result<_>>()?;
    if !letters.len().is_multiple_of(3) {
        return Err(Error::Parse(format!("{} nucleotides do not form whole codons", letters.len())));
    }
    Ok(letters.chunks(3).map(|c| Codon([c[0], c[1], c[2]])).collect())
}

pub const TER: &str = "Ter";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeTable {
    pub name: String,
    pub assignments: BTreeMap<Codon, String>,
}

const VERTEBRATE_MITOCHONDRIAL: &str = include_str!("../data/vmc.tsv");

impl CodeTable {
    pub fn vertebrate_mitochondrial() -> Self {
        Self::from_tsv("vertebrate mitochondrial", VERTEBRATE_MITOCHONDRIAL).expect("bundled table is valid")
    }

    /// Rows `digits<TAB>codon<TAB>amino_acid`; `#` starts a comment. The
    /// digits must agree with the letters and all 64 codons must appear once.
    pub fn from_tsv(name: &str, text: &str) -> Result<Self> {
        let mut assignments = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [digits, letters, aa] = fields[..] else {
                return Err(Error::Parse(format!("line {}: expected 3 tab-separated fields", i + 1)));
            };
            let codon: Codon = letters.parse()?;
            if codon.digits() != digits {
                return Err(Error::Parse(format!("line {}: digits {digits} do not match {letters}", i + 1)));
            }
            if assignments.insert(codon, aa.to_string()).is_some() {
                return Err(Error::Parse(format!("line {}: codon {codon} assigned twice", i + 1)));
            }
        }
        if assignments.len() != 64 {
            return Err(Error::Parse(format!("table covers {} of 64 codons", assignments.len())));
        }
        Ok(Self { name: name.to_string(), assignments })
    }

    pub fn get(&self, c: &Codon) -> &str {
        &self.assignments[c]
    }

    /// Distinct outputs, amino acids and `Ter`.
    pub fn image(&self) -> BTreeSet<&str> {
        self.assignments.values().map(String::as_str).collect()
    }

    pub fn preimage(&self, aa: &str) -> Vec<Codon> {
        self.assignments.iter().filter(|(_, a)| *a == aa).map(|(c, _)| *c).collect()
    }
}

/// Codons sharing the first two letters: pairwise 5-adic distance 1/25.
pub fn quadruplets() -> Vec<[Codon; 4]> {
    let mut out = Vec::new();
    for &a in &Nucleotide::ALL {
        for &b in &Nucleotide::ALL {
            out.push(Nucleotide::ALL.map(|c| Codon([b, a, c])));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Doublet {
    pub codons: [Codon; 2],
    pub outputs: [String; 2],
}

impl Doublet {
    pub fn consistent(&self) -> bool {
        self.outputs[0] == self.outputs[1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubletReport {
    pub doublets: Vec<Doublet>,
    pub consistent: usize,
    pub violations: Vec<Doublet>,
}

/// Splits every quadruplet into its two pairs at 2-adic distance 1/2 and
/// checks that each pair has a single output.
pub fn doublet_degeneracy_check(table: &CodeTable) -> DoubletReport {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let mut doublets = Vec::new();
    for quad in quadruplets() {
        for (i, a) in quad.iter().enumerate() {
            for b in &quad[i + 1..] {
                if distance_2adic(a, b) == half {
                    doublets.push(Doublet {
                        codons: [*a, *b],
                        outputs: [table.get(a).to_string(), table.get(b).to_string()],
                    });
                }
            }
        }
    }
    let violations: Vec<Doublet> = doublets.iter().filter(|d| !d.consistent()).cloned().collect();
    DoubletReport { consistent: doublets.len() - violations.len(), doublets, violations }
}

/// 2-adic coordinates `x = Σ_i b₂(l_i) 2^{i−1}`, `y = Σ_i b₁(l_i) 2^{i−1}`
/// of a codon `l₁l₂l₃`, with `b₁ b₂` the two-bit code of a letter.
pub fn two_adic_plane(c: &Codon) -> (u32, u32) {
    c.0.iter().enumerate().fold((0, 0), |(x, y), (i, n)| {
        let (hi, lo) = n.bits();
        (x | lo << i, y | hi << i)
    })
}

/// One cell of the 4×4 plane table: a single output or an upper/lower split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneCell {
    Whole(String),
    Split(String, String),
}

/// The amino acid table on the 2-adic plane; rows by `y mod 4`, columns by `x mod 4`.
pub fn plane_table() -> [[PlaneCell; 4]; 4] {
    let s = |a: &str, b: &str| PlaneCell::Split(a.into(), b.into());
    let w = |a: &str| PlaneCell::Whole(a.into());
    [
        [s("Lys", "Asn"), s("Glu", "Asp"), s("Ter", "Ser"), w("Gly")],
        [s("Ter", "Tyr"), s("Gln", "His"), s("Trp", "Cys"), w("Arg")],
        [s("Met", "Ile"), w("Val"), w("Thr"), w("Ala")],
        [s("Leu", "Phe"), w("Leu"), w("Ser"), w("Pro")],
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneMismatch {
    pub codon: Codon,
    pub x: u32,
    pub y: u32,
    pub table: String,
    pub plane: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneReport {
    pub checked: usize,
    pub mismatches: Vec<PlaneMismatch>,
    /// Whole cells whose four codons share one output.
    pub constant_cells: usize,
    /// Split cells constant on each half but not on the whole cell.
    pub split_cells: usize,
}

/// Compares a code table with the plane table codon by codon. A cell is
/// indexed by the two low bits of each coordinate; the third letter's high
/// bit (bit 2 of `y`) picks the upper or lower half of a split cell.
pub fn plane_constancy_check(table: &CodeTable) -> PlaneReport {
    let plane = plane_table();
    let mut mismatches = Vec::new();
    for c in Codon::all() {
        let (x, y) = two_adic_plane(&c);
        let expected = match &plane[(y & 3) as usize][(x & 3) as usize] {
            PlaneCell::Whole(a) => a,
            PlaneCell::Split(upper, lower) => if y & 4 == 0 { upper } else { lower },
        };
        if table.get(&c) != expected {
            mismatches.push(PlaneMismatch { codon: c, x, y, table: table.get(&c).to_string(), plane: expected.clone() });
        }
    }
    let mut cells: BTreeMap<(u32, u32), Vec<(u32, &str)>> = BTreeMap::new();
    for c in Codon::all() {
        let (x, y) = two_adic_plane(&c);
        cells.entry((x & 3, y & 3)).or_default().push((y >> 2, table.get(&c)));
    }
    let (mut constant_cells, mut split_cells) = (0, 0);
    for members in cells.values() {
        let all: BTreeSet<&str> = members.iter().map(|m| m.1).collect();
        let halves_constant = [0, 1].iter().all(|h| {
            members.iter().filter(|m| m.0 == *h).map(|m| m.1).collect::<BTreeSet<_>>().len() == 1
        });
        if all.len() == 1 {
            constant_cells += 1;
        } else if halves_constant {
            split_cells += 1;
        }
    }
    PlaneReport { checked: 64, mismatches, constant_cells, split_cells }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Codon {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn numbering() {
        assert_eq!(encode_codon(&c("CCC")), 31);
        assert_eq!(encode_codon(&c("GGG")), 124);
        assert_eq!(decode_codon(56).unwrap(), c("CCA"));
        assert_eq!(c("TTT"), c("UUU"));
        assert!(decode_codon(30).is_err());
        assert!(decode_codon(125).is_err());
        assert!("CCX".parse::<Codon>().is_err());
        assert_eq!(c("CCA").digits(), "112");
    }

    #[test]
    fn distances_by_hand() {
        assert_eq!(distance_5adic(&c("CCC"), &c("CCA")), q(1, 25));
        assert_eq!(distance_5adic(&c("CCC"), &c("CAC")), q(1, 5));
        assert_eq!(distance_5adic(&c("CCC"), &c("ACC")), q(1, 1));
        assert_eq!(distance_2adic(&c("CCC"), &c("CCU")), q(1, 2));
        assert_eq!(distance_2adic(&c("CCA"), &c("CCG")), q(1, 2));
        assert_eq!(distance_2adic(&c("GAU"), &c("GAU")), q(0, 1));
    }

    #[test]
    fn hamming_by_hand() {
        let s1 = [c("CCC"), c("CCC")];
        let s2 = [c("CCA"), c("CAC")];
        assert_eq!(modified_hamming(&s1, &s2, 5).unwrap(), q(6, 25));
        assert_eq!(modified_hamming(&s1, &s1, 5).unwrap(), q(0, 1));
        assert!(modified_hamming(&s1, &s2[..1], 5).is_err());
        let n = |s: &str| s.chars().map(|ch| Nucleotide::from_char(ch).unwrap()).collect::<Vec<_>>();
        // A=00, G=01, U=10, C=11: |0−2|₂ = 1/2, |1−0|₂ = 1
        assert_eq!(modified_hamming_nucleotides(&n("AG"), &n("UA"), 2).unwrap(), q(3, 2));
        assert!(modified_hamming_nucleotides(&n("A"), &n("G"), 3).is_err());
    }

    #[test]
    fn plane_coordinates() {
        assert_eq!(two_adic_plane(&c("AAA")), (0, 0));
        assert_eq!(two_adic_plane(&c("CCC")), (7, 7));
        // Gly cell: GG* shares x mod 4 = 3, y mod 4 = 0
        for third in Nucleotide::ALL {
            let (x, y) = two_adic_plane(&Codon([Nucleotide::G, Nucleotide::G, third]));
            assert_eq!((x & 3, y & 3), (3, 0));
        }
    }

    #[test]
    fn fasta_input() {
        let seq = parse_codon_sequence(">seq1 test\nAUG GCA\nTTT\n").unwrap();
        assert_eq!(seq, vec![c("AUG"), c("GCA"), c("UUU")]);
        assert!(parse_codon_sequence("AUGG").is_err());
    }

    #[test]
    fn table_parsing_errors() {
        assert!(CodeTable::from_tsv("x", "111\tCCC\tPro\n").is_err());
        assert!(CodeTable::from_tsv("x", "112\tCCC\tPro\n").is_err());
    }
}
