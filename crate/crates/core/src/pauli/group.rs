//! Stabilizer-group utilities over GF(2).

use super::Pauli;
use crate::error::{Result, StrobeError};

pub const NORMALIZER_QUBIT_CAP: usize = 16;

fn row(p: Pauli) -> u128 {
    (p.x as u128) | ((p.z as u128) << 64)
}

/// XOR basis indexed by leading bit.
struct Basis([u128; 128]);

impl Basis {
    fn new() -> Self {
        Basis([0; 128])
    }

    fn reduce(&self, mut v: u128) -> u128 {
        while v != 0 {
            let top = 127 - v.leading_zeros() as usize;
            if self.0[top] == 0 {
                return v;
            }
            v ^= self.0[top];
        }
        0
    }

    fn insert(&mut self, v: u128) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.0[127 - r.leading_zeros() as usize] = r;
        true
    }
}

/// Rank of the symplectic vectors of `gens`.
pub fn symplectic_rank(gens: &[Pauli]) -> usize {
    let mut basis = Basis::new();
    gens.iter().filter(|&&g| basis.insert(row(g))).count()
}

/// Whether `p` lies in the group generated by `gens`, up to phase.
pub fn span_contains(gens: &[Pauli], p: Pauli) -> bool {
    let mut basis = Basis::new();
    for &g in gens {
        basis.insert(row(g));
    }
    basis.reduce(row(p)) == 0
}

/// All Pauli strings on `n` qubits commuting with every generator,
/// identity included, so the count is `4^n / 2^m`. Enumeration is capped at
/// [`NORMALIZER_QUBIT_CAP`] qubits.
pub fn normalizer(n: usize, gens: &[Pauli]) -> Result<Vec<Pauli>> {
    if n > NORMALIZER_QUBIT_CAP {
        return Err(StrobeError::EnumerationCap {
            qubits: n,
            cap: NORMALIZER_QUBIT_CAP,
        });
    }
    check_generators(gens)?;
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    for x in 0..=mask {
        for z in 0..=mask {
            let p = Pauli::new(x, z);
            if gens.iter().all(|g| g.commutes(p)) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Generators must mutually commute and be independent.
pub fn check_generators(gens: &[Pauli]) -> Result<()> {
    for (i, a) in gens.iter().enumerate() {
        if gens[i + 1..].iter().any(|b| !a.commutes(*b)) {
            return Err(StrobeError::NonCommutingGenerators);
        }
    }
    let rank = symplectic_rank(gens);
    if rank < gens.len() {
        return Err(StrobeError::DependentGenerators {
            rank,
            count: gens.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Pauli {
        Pauli::parse(s).unwrap()
    }

    #[test]
    fn span() {
        let gens = [p("Z1 Z2"), p("Z2 Z3")];
        assert!(span_contains(&gens, p("Z1 Z3")));
        assert!(span_contains(&gens, Pauli::IDENTITY));
        assert!(!span_contains(&gens, p("Z1")));
        assert_eq!(symplectic_rank(&[p("Z1 Z2"), p("Z2 Z3"), p("Z1 Z3")]), 2);
    }

    #[test]
    fn normalizer_of_bell_pair() {
        let gens = [p("X1 X2"), p("Z1 Z2")];
        let nz = normalizer(2, &gens).unwrap();
        assert_eq!(nz.len(), 4);
        assert_eq!(normalizer(2, &[p("X1 X2")]).unwrap().len(), 8);
        assert_eq!(normalizer(4, &[p("X1 X2"), p("X2 X3"), p("X3 X4")]).unwrap().len(), 32);
        assert_eq!(normalizer(2, &[]).unwrap().len(), 16);
        assert!(normalizer(3, &[p("X1"), p("Z1")]).is_err());
        assert!(normalizer(17, &[]).is_err());
        assert!(matches!(
            check_generators(&[p("Z1"), p("Z1")]),
            Err(StrobeError::DependentGenerators { .. })
        ));
    }
}
