//! Phased Pauli operators in bit-packed symplectic form.
//!
//! A Pauli string on up to 64 qubits is stored as two masks `x` and `z`;
//! qubit `j` carries `X` when only `x` is set, `Z` when only `z` is set and
//! `Y` when both are. The phase-free string is always the Hermitian tensor
//! product of `{I, X, Y, Z}`; phases live in [`PhasedPauli`].

mod clifford;
mod group;
mod sum;

pub use clifford::{
    conjugate_exponential, conjugate_exponential_numeric, conjugate_layer, pauli_rotation_adjoint_action, CliffordLayer,
    Frame, SingleClifford,
};
pub use group::{check_generators, normalizer, span_contains, symplectic_rank, NORMALIZER_QUBIT_CAP};
pub use sum::{commutator_i, Grade, Rational, WeightedPauliSum};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, StrobeError};

pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Phase-free Pauli string. Field order gives the canonical `(z, x)`
/// lexicographic ordering used by every sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pauli {
    pub z: u64,
    pub x: u64,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { z: 0, x: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Pauli { z, x }
    }

    pub fn single(qubit: usize, letter: Letter) -> Self {
        let (x, z) = letter.bits();
        let bit = 1u64 << qubit;
        Pauli {
            x: if x { bit } else { 0 },
            z: if z { bit } else { 0 },
        }
    }

    /// Builds a string from `(qubit, letter)` pairs (0-indexed).
    pub fn from_sites(sites: &[(usize, Letter)]) -> Self {
        sites.iter().fold(Pauli::IDENTITY, |acc, &(q, l)| {
            let s = Pauli::single(q, l);
            Pauli {
                x: acc.x ^ s.x,
                z: acc.z ^ s.z,
            }
        })
    }

    pub fn xs(qubits: &[usize]) -> Self {
        Pauli::from_sites(&qubits.iter().map(|&q| (q, Letter::X)).collect::<Vec<_>>())
    }

    pub fn zs(qubits: &[usize]) -> Self {
        Pauli::from_sites(&qubits.iter().map(|&q| (q, Letter::Z)).collect::<Vec<_>>())
    }

    pub fn support(self) -> u64 {
        self.x | self.z
    }

    pub fn weight(self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn letter(self, qubit: usize) -> Letter {
        Letter::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    /// Highest occupied qubit index plus one.
    pub fn extent(self) -> usize {
        64 - self.support().leading_zeros() as usize
    }

    pub fn commutes(self, other: Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self · other = i^k · r`, returning `(k, r)`.
    pub fn mul_phase(self, other: Pauli) -> (u8, Pauli) {
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        // cyclic pairs XY, YZ, ZX give +i; the reversed ones give -i
        let pos = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
        let neg = (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2) | (x1 & !z1 & !x2 & z2);
        let k = (pos.count_ones() as i64 - neg.count_ones() as i64).rem_euclid(4) as u8;
        (
            k,
            Pauli {
                x: x1 ^ x2,
                z: z1 ^ z2,
            },
        )
    }

    /// Restrict to the qubits in `mask`.
    pub fn restrict(self, mask: u64) -> Pauli {
        Pauli {
            x: self.x & mask,
            z: self.z & mask,
        }
    }

    pub fn shifted(self, offset: usize) -> Pauli {
        Pauli {
            x: self.x << offset,
            z: self.z << offset,
        }
    }

    /// Render with 1-indexed qubits, e.g. `X1 Y2 Z4`; identity renders as `I`.
    pub fn label(self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        (0..self.extent())
            .filter(|&q| self.support() >> q & 1 == 1)
            .map(|q| format!("{}{}", self.letter(q).as_char(), q + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parse `X1 Y2 Z4`, `X1X2`, or `I`.
    pub fn parse(s: &str) -> Result<Pauli> {
        let err = || StrobeError::PauliParse(s.to_string());
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "I" {
            return Ok(Pauli::IDENTITY);
        }
        let mut out = Pauli::IDENTITY;
        let chars: Vec<char> = trimmed.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let mut i = 0;
        while i < chars.len() {
            let letter = match chars[i] {
                'X' | 'x' => Letter::X,
                'Y' | 'y' => Letter::Y,
                'Z' | 'z' => Letter::Z,
                'I' | 'i' => Letter::I,
                _ => return Err(err()),
            };
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(err());
            }
            let idx: usize = chars[start..i].iter().collect::<String>().parse().map_err(|_| err())?;
            if idx == 0 || idx > MAX_QUBITS {
                return Err(err());
            }
            let q = idx - 1;
            if out.support() >> q & 1 == 1 {
                return Err(err());
            }
            let p = Pauli::single(q, letter);
            out.x |= p.x;
            out.z |= p.z;
        }
        Ok(out)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Pauli {
    type Err = StrobeError;
    fn from_str(s: &str) -> Result<Self> {
        Pauli::parse(s)
    }
}

impl Serialize for Pauli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Pauli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Pauli::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// An n-qubit Pauli operator with a phase in `{1, i, -1, -i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    n: usize,
    pauli: Pauli,
    /// power of `i`
    phase: u8,
}

impl PhasedPauli {
    pub fn new(n: usize, pauli: Pauli, phase: u8) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(StrobeError::RegisterTooLarge(n));
        }
        if pauli.extent() > n {
            return Err(StrobeError::OutsideRegister(pauli.label()));
        }
        Ok(PhasedPauli {
            n,
            pauli,
            phase: phase % 4,
        })
    }

    pub fn hermitian(n: usize, pauli: Pauli) -> Result<Self> {
        Self::new(n, pauli, 0)
    }

    pub fn identity(n: usize) -> Self {
        PhasedPauli {
            n,
            pauli: Pauli::IDENTITY,
            phase: 0,
        }
    }

    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        Self::new(n, Pauli::parse(body.trim_start_matches('*'))?, phase)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pauli(&self) -> Pauli {
        self.pauli
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn weight(&self) -> u32 {
        self.pauli.weight()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Real sign for Hermitian operators.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn multiply(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        if self.n != other.n {
            return Err(StrobeError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let (k, p) = self.pauli.mul_phase(other.pauli);
        Ok(PhasedPauli {
            n: self.n,
            pauli: p,
            phase: (self.phase + other.phase + k) % 4,
        })
    }

    pub fn commutes(&self, other: &PhasedPauli) -> Result<bool> {
        if self.n != other.n {
            return Err(StrobeError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.pauli.commutes(other.pauli))
    }

    pub fn adjoint(&self) -> PhasedPauli {
        PhasedPauli {
            phase: (4 - self.phase) % 4,
            ..*self
        }
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i*", "-", "-i*"][self.phase as usize];
        write!(f, "{}{}", prefix, self.pauli.label())
    }
}

/// Dense 2^n x 2^n matrix of a phase-free Pauli string, little-endian
/// qubit order (qubit 0 is the least significant index bit).
pub fn dense_matrix(n: usize, p: Pauli) -> nalgebra::DMatrix<num_complex::Complex64> {
    use num_complex::Complex64;
    let dim = 1usize << n;
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    let y_count = (p.x & p.z).count_ones();
    // Y = i X Z, so the string equals i^{#Y} X^x Z^z
    let base = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][(y_count % 4) as usize];
    for col in 0..dim {
        let row = col ^ (p.x as usize);
        // X^x Z^z |col> : Z acts first
        let sign = if ((col as u64) & p.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[(row, col)] = base * sign;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(n: usize, s: &str) -> PhasedPauli {
        PhasedPauli::parse(n, s).unwrap()
    }

    #[test]
    fn single_qubit_table() {
        assert_eq!(pp(1, "X1").multiply(&pp(1, "Y1")).unwrap(), pp(1, "iZ1"));
        assert_eq!(pp(1, "X1").multiply(&pp(1, "X1")).unwrap(), PhasedPauli::identity(1));
        assert_eq!(pp(1, "Z1").multiply(&pp(1, "X1")).unwrap(), pp(1, "iY1"));
        assert_eq!(pp(1, "Y1").multiply(&pp(1, "X1")).unwrap(), pp(1, "-iZ1"));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            pp(2, "X1").multiply(&pp(3, "X1")),
            Err(StrobeError::DimensionMismatch { .. })
        ));
        assert!(pp(2, "X1").commutes(&pp(3, "Z1")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(!pp(1, "X1").commutes(&pp(1, "Z1")).unwrap());
        assert!(pp(2, "Z1 Z2").commutes(&pp(2, "X1 X2")).unwrap());
        assert!(pp(4, "Z1 Y2").commutes(&pp(4, "X1 X2 X3 X4")).unwrap());
        assert!(!pp(4, "Z1 Y2").commutes(&pp(4, "Y1 Y2 X3 X4")).unwrap());
    }

    #[test]
    fn three_qubit_product_matches_dense() {
        let a = pp(3, "X1 X2");
        let b = pp(3, "Z2 Z3");
        let c = a.multiply(&b).unwrap();
        let dense = dense_matrix(3, a.pauli()) * dense_matrix(3, b.pauli());
        let phase = [
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(0.0, 1.0),
            num_complex::Complex64::new(-1.0, 0.0),
            num_complex::Complex64::new(0.0, -1.0),
        ][c.phase() as usize];
        let expect = dense_matrix(3, c.pauli()) * phase;
        assert!((dense - expect).norm() < 1e-12);
        // X1 X2 Z2 Z3 = X1 (X Z)_2 Z3 = -i X1 Y2 Z3
        assert_eq!(c, pp(3, "-i X1 Y2 Z3"));
    }

    #[test]
    fn weight_and_parse() {
        let p = Pauli::parse("X1 Y2 Z4").unwrap();
        assert_eq!(p.weight(), 3);
        assert_eq!(p.label(), "X1 Y2 Z4");
        assert_eq!(Pauli::parse("X1X2X3X4").unwrap(), Pauli::xs(&[0, 1, 2, 3]));
        assert!(Pauli::parse("Q1").is_err());
        assert!(Pauli::parse("X1 Z1").is_err());
        assert!(Pauli::parse("X0").is_err());
    }

    #[test]
    fn dense_y_is_correct() {
        let y = dense_matrix(1, Pauli::single(0, Letter::Y));
        assert_eq!(y[(0, 1)], num_complex::Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], num_complex::Complex64::new(0.0, 1.0));
    }
}
