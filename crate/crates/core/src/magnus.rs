//! Exact Magnus expansion of piecewise-constant segment products.
//!
//! For segments `exp(-i w_k δt H_k)` applied in order `k = 1..n` we write
//! `X_k = w_k H_k` and expand the accumulated generator `Φ` of
//! `U = exp(-i Φ)` up to `δt³`:
//!
//! ```text
//! Φ₁ = δt Σ X_k
//! Φ₂ = -δt²/2 Σ_{l>k} i[X_l, X_k]
//! Φ₃ = δt³/6  Σ_{m>l>k} ( c(X_m, c(X_l, X_k)) - c(X_k, c(X_m, X_l)) )
//!    + δt³/12 Σ_{l>k}   ( c(X_l, c(X_l, X_k)) + c(X_k, c(X_k, X_l)) )
//! ```
//!
//! with `c(A, B) = i[A, B]`. The effective Hamiltonian orders are
//! `H_eff^(k) = Φ_{k+1} / T_n`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Result, StrobeError};
use crate::pauli::{commutator_i, Grade, Rational, WeightedPauliSum};
use crate::schedule::{toggling_frame, PulseSchedule, Segment};

#[derive(Debug, Clone, PartialEq)]
pub struct MagnusReport {
    /// `Φ₁, Φ₂, …`, each graded by its `δt` power.
    pub phases: Vec<WeightedPauliSum>,
    /// `H_eff^(0), H_eff^(1), …`; empty when no time elapses.
    pub orders: Vec<WeightedPauliSum>,
    pub segment_count: usize,
    /// `T_n / δt`.
    pub total_weight: Rational,
    /// Label of the residual pulse frame (`I` for closed schedules).
    pub residual_frame: String,
}

impl MagnusReport {
    /// The accumulated generator `Φ = Σ Φ_m`.
    pub fn phase(&self) -> WeightedPauliSum {
        let mut out = WeightedPauliSum::new();
        for p in &self.phases {
            out.add_assign_sum(p);
        }
        out
    }

    /// Terms of `Φ` at `δt^k`.
    pub fn phase_at(&self, k: u32) -> WeightedPauliSum {
        self.phase().at_dt(k)
    }

    pub fn to_json(&self) -> Value {
        let grading = |s: &WeightedPauliSum| {
            let mut groups = serde_json::Map::new();
            for g in s.grades() {
                let key = format!("dt{}_lambda{}", g.dt_power, g.lambda_power);
                let terms: Vec<Value> = s
                    .at_grade(g)
                    .iter()
                    .map(|(p, _, c)| json!({"pauli": p.label(), "coeff": format!("{c}")}))
                    .collect();
                groups.insert(key, Value::Array(terms));
            }
            Value::Object(groups)
        };
        json!({
            "segment_count": self.segment_count,
            "total_weight": format!("{}", self.total_weight),
            "residual_frame": self.residual_frame,
            "phases": self.phases.iter().map(grading).collect::<Vec<_>>(),
            "orders": self.orders.iter().map(grading).collect::<Vec<_>>(),
        })
    }
}

/// Merge runs of mutually commuting neighbours. The product is unchanged,
/// so every graded coefficient of `Φ` is unchanged too.
fn merge_commuting(gens: Vec<WeightedPauliSum>) -> Vec<WeightedPauliSum> {
    let mut out: Vec<WeightedPauliSum> = Vec::with_capacity(gens.len());
    for g in gens {
        if g.is_zero() {
            continue;
        }
        if let Some(last) = out.last_mut() {
            if last.support() & g.support() == 0 || last.commutes_with(&g) {
                last.add_assign_sum(&g);
                continue;
            }
        }
        out.push(g);
    }
    out
}

fn pruned_ic(a: &WeightedPauliSum, b: &WeightedPauliSum) -> WeightedPauliSum {
    if a.support() & b.support() == 0 {
        WeightedPauliSum::new()
    } else {
        commutator_i(a, b)
    }
}

fn ordered_sum(parts: Vec<WeightedPauliSum>) -> WeightedPauliSum {
    let mut out = WeightedPauliSum::new();
    for p in &parts {
        out.add_assign_sum(p);
    }
    out
}

/// `Φ₁..Φ_{max_order+1}` for generators `X_k` (already multiplied by weights).
pub fn magnus_phases(gens: &[WeightedPauliSum], max_order: usize) -> Result<Vec<WeightedPauliSum>> {
    if max_order > 2 {
        return Err(StrobeError::UnsupportedOrder(max_order));
    }
    let x = merge_commuting(gens.to_vec());
    let n = x.len();
    let mut prefix = Vec::with_capacity(n);
    let mut acc = WeightedPauliSum::new();
    for g in &x {
        prefix.push(acc.clone());
        acc.add_assign_sum(g);
    }
    let total = acc;
    let mut phases = vec![total.shift_grade(Grade::dt(1))];
    if max_order >= 1 {
        let parts: Vec<_> = (0..n).into_par_iter().map(|l| pruned_ic(&x[l], &prefix[l])).collect();
        phases.push(ordered_sum(parts).scale(Rational::new(-1, 2)).shift_grade(Grade::dt(2)));
    }
    if max_order >= 2 {
        let mut suffix = vec![WeightedPauliSum::new(); n];
        let mut acc = WeightedPauliSum::new();
        for l in (0..n).rev() {
            suffix[l] = acc.clone();
            acc.add_assign_sum(&x[l]);
        }
        let parts: Vec<(WeightedPauliSum, WeightedPauliSum)> = (0..n)
            .into_par_iter()
            .map(|l| {
                let (xl, s, r) = (&x[l], &prefix[l], &suffix[l]);
                let xs = pruned_ic(xl, s);
                let rx = pruned_ic(r, xl);
                // Σ_{m>l>k}: c(R_l, c(X_l, S_l)) - c(S_l, c(R_l, X_l))
                let triple = pruned_ic(r, &xs).sub(&pruned_ic(s, &rx));
                // Σ_{l>k} c(X_l, c(X_l, X_k)) and Σ_{l>k} c(X_k, c(X_k, X_l)) with k ↔ l
                let pair = pruned_ic(xl, &xs).add(&pruned_ic(xl, &pruned_ic(xl, r)));
                (triple, pair)
            })
            .collect();
        let mut triple = WeightedPauliSum::new();
        let mut pair = WeightedPauliSum::new();
        for (t, p) in &parts {
            triple.add_assign_sum(t);
            pair.add_assign_sum(p);
        }
        let phi3 = triple.scale(Rational::new(1, 6)).add(&pair.scale(Rational::new(1, 12)));
        phases.push(phi3.shift_grade(Grade::dt(3)));
    }
    Ok(phases)
}

fn orders_from_phases(phases: &[WeightedPauliSum], total_weight: Rational) -> Vec<WeightedPauliSum> {
    use num_traits::Zero;
    if total_weight.is_zero() {
        return Vec::new();
    }
    phases
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let mut out = WeightedPauliSum::new();
            for (pauli, g, c) in p.iter() {
                debug_assert_eq!(g.dt_power as usize, m + 1);
                out.add_term(pauli, Grade::new(g.dt_power - 1, g.lambda_power), c / total_weight);
            }
            out
        })
        .collect()
}

/// Magnus expansion of `(H_k, duration_k)` pairs, durations in `δt` units.
pub fn magnus_orders(segments: &[(WeightedPauliSum, Rational)], max_order: usize) -> Result<MagnusReport> {
    use num_traits::Zero;
    if segments.is_empty() {
        return Err(StrobeError::Invalid("empty segment list".into()));
    }
    let gens: Vec<_> = segments.iter().map(|(h, w)| h.scale(*w)).collect();
    let total = segments.iter().fold(Rational::zero(), |a, (_, w)| a + w);
    let phases = magnus_phases(&gens, max_order)?;
    Ok(MagnusReport {
        orders: orders_from_phases(&phases, total),
        phases,
        segment_count: segments.len(),
        total_weight: total,
        residual_frame: "I".into(),
    })
}

/// Magnus expansion of toggling-frame segments.
pub fn magnus_segments(segments: &[Segment], max_order: usize) -> Result<MagnusReport> {
    use num_traits::Zero;
    let gens: Vec<_> = segments.iter().map(|s| s.hamiltonian.scale(s.weight)).collect();
    let total = segments
        .iter()
        .filter(|s| s.elapsed)
        .fold(Rational::zero(), |a, s| a + s.weight);
    let phases = magnus_phases(&gens, max_order)?;
    Ok(MagnusReport {
        orders: orders_from_phases(&phases, total),
        phases,
        segment_count: segments.len(),
        total_weight: total,
        residual_frame: "I".into(),
    })
}

/// Toggling frame followed by the Magnus expansion.
pub fn effective_hamiltonian(s: &PulseSchedule, max_order: usize) -> Result<MagnusReport> {
    let tf = toggling_frame(s)?;
    let mut r = magnus_segments(&tf.segments, max_order)?;
    r.residual_frame = tf.residual.label();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(items: &[(i64, &str)]) -> WeightedPauliSum {
        WeightedPauliSum::from_labels(items).unwrap()
    }

    fn one() -> Rational {
        Rational::from_integer(1)
    }

    #[test]
    fn two_segment_first_order() {
        let r = magnus_orders(&[(sum(&[(1, "X1")]), one()), (sum(&[(1, "Z1")]), one())], 1).unwrap();
        // H^(1) = (δt/2) Y
        let mut expect = WeightedPauliSum::new();
        expect.add_term(crate::Pauli::parse("Y1").unwrap(), Grade::dt(1), Rational::new(1, 2));
        assert_eq!(r.orders[1], expect);
        assert_eq!(r.orders[0], sum(&[(1, "X1"), (1, "Z1")]).scale(Rational::new(1, 2)));
    }

    #[test]
    fn identical_segments_have_no_corrections() {
        let h = sum(&[(1, "X1 X2"), (2, "Z1")]);
        let r = magnus_orders(&[(h.clone(), one()), (h.clone(), one()), (h, one())], 2).unwrap();
        assert!(r.orders[1].is_zero() && r.orders[2].is_zero());
    }

    #[test]
    fn palindrome_has_no_first_order() {
        let a = sum(&[(1, "X1"), (1, "Z1 Z2")]);
        let b = sum(&[(1, "Y2"), (-1, "X1 Y2")]);
        let c = sum(&[(3, "Z1")]);
        let segs: Vec<_> = [&a, &b, &c, &c, &b, &a].iter().map(|h| ((*h).clone(), one())).collect();
        let r = magnus_orders(&segs, 2).unwrap();
        assert!(r.orders[1].is_zero());
        assert!(!r.orders[2].is_zero());
    }

    #[test]
    fn rejects_high_order() {
        assert_eq!(
            magnus_orders(&[(sum(&[(1, "X1")]), one())], 3),
            Err(StrobeError::UnsupportedOrder(3))
        );
    }
}
