//! Finite qubit-register bath models.

use rand::Rng;

use crate::error::{Result, StrobeError};
use crate::pauli::{commutator_i, Grade, Letter, Pauli, Rational, WeightedPauliSum};

/// One coupling term `σ_i^α ⊗ B_i^α`; `op` acts on bath-local indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub qubit: usize,
    pub axis: Letter,
    pub op: WeightedPauliSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathModel {
    pub n_bath: usize,
    /// Bath Hamiltonian on bath-local indices.
    pub h_b: WeightedPauliSum,
    pub couplings: Vec<Coupling>,
    /// Beyond this distance the bath operators of two sites commute.
    pub r: f64,
    /// Beyond this distance pieces of `H_B` commute with bath operators.
    pub r_prime: f64,
}

impl BathModel {
    pub fn new(n_bath: usize, h_b: WeightedPauliSum) -> Self {
        BathModel {
            n_bath,
            h_b,
            couplings: Vec::new(),
            r: f64::INFINITY,
            r_prime: f64::INFINITY,
        }
    }

    pub fn couple(mut self, qubit: usize, axis: Letter, op: WeightedPauliSum) -> Self {
        self.couplings.push(Coupling { qubit, axis, op });
        self
    }

    fn check(&self, n_sys: usize) -> Result<()> {
        if self.h_b.extent() > self.n_bath {
            return Err(StrobeError::OutsideRegister("bath Hamiltonian".into()));
        }
        for c in &self.couplings {
            if c.qubit >= n_sys || c.op.extent() > self.n_bath {
                return Err(StrobeError::OutsideRegister(format!("coupling on qubit {}", c.qubit + 1)));
            }
        }
        Ok(())
    }

    /// `H_B` embedded after `n_sys` system qubits.
    pub fn h_b_full(&self, n_sys: usize) -> Result<WeightedPauliSum> {
        self.check(n_sys)?;
        Ok(self.h_b.map_paulis(|p| (1, p.shifted(n_sys))))
    }

    /// `H_SB` on the combined register, graded `λ¹`.
    pub fn h_sb_full(&self, n_sys: usize) -> Result<WeightedPauliSum> {
        self.check(n_sys)?;
        let mut out = WeightedPauliSum::new();
        for c in &self.couplings {
            let sys = Pauli::single(c.qubit, c.axis);
            for (p, g, coeff) in c.op.iter() {
                let b = p.shifted(n_sys);
                let full = Pauli::new(sys.x | b.x, sys.z | b.z);
                out.add_term(full, g + Grade::new(0, 1), *coeff);
            }
        }
        Ok(out)
    }

    /// `H_B + λ H_SB` with `λ` left symbolic in the grading.
    pub fn full_hamiltonian(&self, n_sys: usize) -> Result<WeightedPauliSum> {
        Ok(self.h_b_full(n_sys)?.add(&self.h_sb_full(n_sys)?))
    }

    /// Verify the declared radii against the actual commutators, given a
    /// distance function between system qubits.
    pub fn check_radii<D: Fn(usize, usize) -> f64>(&self, dist: D) -> Result<()> {
        for (i, a) in self.couplings.iter().enumerate() {
            for b in &self.couplings[i + 1..] {
                if dist(a.qubit, b.qubit) > self.r && !a.op.commutes_with(&b.op) {
                    return Err(StrobeError::Invalid(format!(
                        "bath operators on qubits {} and {} beyond r do not commute",
                        a.qubit + 1,
                        b.qubit + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Random 1-local coupling of every system qubit and axis to a random
    /// bath Pauli, with coefficients in `[-1, 1]` on a 1/8 grid.
    pub fn random_one_local<R: Rng>(n_sys: usize, n_bath: usize, h_b: WeightedPauliSum, rng: &mut R) -> Self {
        let mut m = BathModel::new(n_bath, h_b);
        let bath_mask = (1u64 << n_bath) - 1;
        for q in 0..n_sys {
            for axis in [Letter::X, Letter::Y, Letter::Z] {
                let p = loop {
                    let p = Pauli::new(rng.gen::<u64>() & bath_mask, rng.gen::<u64>() & bath_mask);
                    if !p.is_identity() || n_bath == 0 {
                        break p;
                    }
                };
                let c = Rational::new(rng.gen_range(-8..=8), 8);
                m.couplings.push(Coupling {
                    qubit: q,
                    axis,
                    op: WeightedPauliSum::single(p, c),
                });
            }
        }
        m
    }

    /// Whether every coupling's bath operator commutes with `H_B`.
    pub fn couplings_commute_with_bath(&self) -> bool {
        self.couplings.iter().all(|c| commutator_i(&c.op, &self.h_b).is_zero())
    }
}
