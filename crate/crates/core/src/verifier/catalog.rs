//! Locality, count and geometric-spread bounds on effective-noise terms,
//! with an enumeration of the nested commutators that produce them.
//!
//! At order `δt^m` every term is an `(m-1)`-fold nested commutator of
//! segment Hamiltonians `H_X + H_B + λ H_SB`. Pauli decoupling frames only
//! flip signs, so the supports that can appear are those of nested
//! commutators of single Pauli terms drawn from the three pieces.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::bath::BathModel;
use crate::error::{Result, StrobeError};
use crate::lattice::GridLayout;
use crate::pauli::Pauli;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalogParams {
    /// `δt` order.
    pub m: u32,
    /// `λ` order.
    pub q: u32,
    /// Locality of the system Hamiltonian.
    pub k_local: u32,
    /// Locality of the system–bath coupling on the system.
    pub l_local: u32,
    pub n_dd: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    System,
    Coupling,
    Bath,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogTerm {
    pub pauli: String,
    /// Copies of `H_B` in the commutator that produced it.
    pub b: u32,
    pub weight: u32,
    pub diameter: f64,
    pub locality_bound: u32,
    pub spread_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Catalog {
    pub params: CatalogParams,
    /// `q l + (m - q)(k - 1)`.
    pub locality_bound: u32,
    /// `N_DD^m (3N)^q`.
    pub count_bound: f64,
    pub r: f64,
    pub r_prime: f64,
    /// Distinct system–bath Pauli strings at `(δt^m, λ^q)`.
    pub terms: Vec<CatalogTerm>,
    pub locality_violations: usize,
    pub spread_violations: usize,
}

impl Catalog {
    pub fn count(&self) -> usize {
        self.terms.len()
    }

    pub fn within_bounds(&self) -> bool {
        self.locality_violations == 0 && self.spread_violations == 0 && (self.count() as f64) <= self.count_bound
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "locality_bound": self.locality_bound,
            "count_bound": self.count_bound,
            "count": self.count(),
            "r": self.r,
            "r_prime": self.r_prime,
            "locality_violations": self.locality_violations,
            "spread_violations": self.spread_violations,
            "terms": self.terms,
        })
    }
}

pub fn locality_bound(p: &CatalogParams) -> u32 {
    p.q * p.l_local + (p.m - p.q) * p.k_local.saturating_sub(1)
}

pub fn count_bound(p: &CatalogParams, n_qubits: usize) -> f64 {
    (p.n_dd as f64).powi(p.m as i32) * (3.0 * n_qubits as f64).powi(p.q as i32)
}

/// Spread of the qubits a `λ^q` term with `b` bath copies can touch:
/// `(q-1) r`, or `b r' + (q-2) r` once the bath Hamiltonian links sites,
/// plus one coupling length for every system-Hamiltonian factor.
pub fn spread_bound(p: &CatalogParams, b: u32, r: f64, r_prime: f64, edge: f64) -> f64 {
    let q = p.q as f64;
    let base = if p.q <= 1 {
        0.0
    } else if b == 0 {
        (q - 1.0) * r
    } else {
        ((q - 1.0) * r).max(b as f64 * r_prime + (q - 2.0) * r)
    };
    base + (p.m - p.q - b) as f64 * edge
}

fn diameter(grid: &GridLayout, support: u64) -> f64 {
    let qs: Vec<usize> = (0..64).filter(|q| support >> q & 1 == 1).collect();
    let mut d: f64 = 0.0;
    for (i, &a) in qs.iter().enumerate() {
        for &b in &qs[i + 1..] {
            d = d.max(grid.distance(a, b));
        }
    }
    d
}

/// Bounds, plus the enumerated terms when `enumerate` is set.
pub fn catalog_error_terms(p: &CatalogParams, grid: &GridLayout, bath: &BathModel, enumerate: bool) -> Result<Catalog> {
    if p.m == 0 || p.q > p.m {
        return Err(StrobeError::Invalid(format!("need m ≥ 1 and 0 ≤ q ≤ m, got m={}, q={}", p.m, p.q)));
    }
    let n = grid.n_qubits();
    if n + bath.n_bath > crate::pauli::MAX_QUBITS {
        return Err(StrobeError::RegisterTooLarge(n + bath.n_bath));
    }
    bath.check_radii(|a, b| grid.distance(a, b))?;
    let mut cat = Catalog {
        params: *p,
        locality_bound: locality_bound(p),
        count_bound: count_bound(p, n),
        r: bath.r,
        r_prime: bath.r_prime,
        terms: Vec::new(),
        locality_violations: 0,
        spread_violations: 0,
    };
    if !enumerate {
        return Ok(cat);
    }

    let mut pieces: Vec<(Piece, Pauli)> = Vec::new();
    pieces.extend(grid.system_hamiltonian().iter().map(|(t, _, _)| (Piece::System, t)));
    pieces.extend(bath.h_sb_full(n)?.iter().map(|(t, _, _)| (Piece::Coupling, t)));
    pieces.extend(bath.h_b_full(n)?.iter().map(|(t, _, _)| (Piece::Bath, t)));
    let edge = grid.edges().iter().map(|&(a, b)| grid.distance(a, b)).fold(0.0, f64::max);
    let sys_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // (product, couplings used, bath copies); a nested commutator of Paulis
    // is nonzero exactly when each new factor anticommutes with the product
    let start: Vec<(Pauli, u32, u32)> = pieces
        .iter()
        .map(|&(k, t)| (t, (k == Piece::Coupling) as u32, (k == Piece::Bath) as u32))
        .filter(|&(_, c, _)| c <= p.q)
        .collect();
    let found: BTreeMap<Pauli, u32> = start
        .par_iter()
        .map(|&seed| {
            let mut level = vec![seed];
            for _ in 1..p.m {
                let mut next = Vec::new();
                for &(prod, c, b) in &level {
                    for &(kind, t) in &pieces {
                        let c2 = c + (kind == Piece::Coupling) as u32;
                        if c2 > p.q || prod.commutes(t) {
                            continue;
                        }
                        let (_, np) = t.mul_phase(prod);
                        next.push((np, c2, b + (kind == Piece::Bath) as u32));
                    }
                }
                level = next;
            }
            let mut out: BTreeMap<Pauli, u32> = BTreeMap::new();
            for (prod, c, b) in level {
                if c == p.q {
                    let e = out.entry(prod).or_insert(b);
                    *e = (*e).min(b);
                }
            }
            out
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                let e = a.entry(k).or_insert(v);
                *e = (*e).min(v);
            }
            a
        });

    for (pauli, b) in found {
        let sys = pauli.restrict(sys_mask);
        let weight = sys.weight();
        let diam = diameter(grid, sys.support());
        let lb = p.q * p.l_local + (p.m - p.q - b) * p.k_local.saturating_sub(1);
        let sb = spread_bound(p, b, bath.r, bath.r_prime, edge);
        if weight > lb {
            cat.locality_violations += 1;
        }
        if diam > sb + 1e-9 {
            cat.spread_violations += 1;
        }
        cat.terms.push(CatalogTerm {
            pauli: pauli.label(),
            b,
            weight,
            diameter: diam,
            locality_bound: lb,
            spread_bound: sb,
        });
    }
    Ok(cat)
}

/// One bath qubit per system qubit, coupled through a random Pauli per
/// axis, with `Z Z` bath couplings between nearest-neighbour sites.
/// Radii: `r = 1`, `r' = 1.5`.
pub fn local_bath<R: rand::Rng>(grid: &GridLayout, rng: &mut R) -> BathModel {
    use crate::pauli::{Letter, Rational, WeightedPauliSum};
    let n = grid.n_qubits();
    let mut h_b = WeightedPauliSum::new();
    for a in 0..n {
        for b in a + 1..n {
            if (grid.distance(a, b) - 1.0).abs() < 1e-9 {
                h_b.add_term(Pauli::zs(&[a, b]), crate::pauli::Grade::ZERO, Rational::from_integer(1));
            }
        }
    }
    let mut m = BathModel::new(n, h_b);
    for q in 0..n {
        for axis in [Letter::X, Letter::Y, Letter::Z] {
            let l = [Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..3)];
            m = m.couple(q, axis, WeightedPauliSum::single(Pauli::single(q, l), Rational::from_integer(1)));
        }
    }
    m.r = 1.0;
    m.r_prime = 1.5;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Connectivity;
    use rand::SeedableRng;

    fn params(m: u32, q: u32) -> CatalogParams {
        CatalogParams {
            m,
            q,
            k_local: 2,
            l_local: 1,
            n_dd: 8,
        }
    }

    #[test]
    fn bounds_for_our_construction() {
        assert_eq!(locality_bound(&params(3, 1)), 3);
        // the simulated Hamiltonian at λ⁰ is (m+1)-local
        assert_eq!(locality_bound(&params(3, 0)) + 1, 4);
        assert_eq!(count_bound(&params(3, 2), 9), 512.0 * 729.0);
    }

    #[test]
    fn enumeration_on_three_by_three() {
        let grid = GridLayout::new(3, 3, Connectivity::Diagonal).unwrap();
        let bath = local_bath(&grid, &mut rand::rngs::StdRng::seed_from_u64(3));
        assert!(catalog_error_terms(&params(3, 0), &grid, &bath, true).unwrap().terms.is_empty());
        for q in [1, 2] {
            let c = catalog_error_terms(&params(3, q), &grid, &bath, true).unwrap();
            eprintln!("q={q}: {} terms, bound {}", c.count(), c.count_bound);
            assert!(c.count() > 0);
            assert!(c.within_bounds(), "q={q}: {} {}", c.locality_violations, c.spread_violations);
        }
    }
}
