//! Effective noise strength of a decoupled evolution and its bound.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::bath::BathModel;
use super::dense::{
    expm_sum, extract_generator, pauli_decompose, phase_optimized_distance, simulate_dense, spectral_norm, CMat,
};
use super::fit::{fit_scaling, ScalingFit};
use crate::error::{Result, StrobeError};
use crate::pauli::{Pauli, WeightedPauliSum};
use crate::schedule::PulseSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaReport {
    /// `‖U − U_ideal‖`.
    pub raw: f64,
    /// Minimised over a global phase.
    pub phase_optimized: f64,
}

fn single_hamiltonian(s: &PulseSchedule) -> Result<&WeightedPauliSum> {
    let mut it = s.hamiltonians.values();
    match (it.next(), it.next()) {
        (Some(h), None) => Ok(h),
        _ => Err(StrobeError::Invalid(
            "η needs a schedule with exactly one system Hamiltonian".into(),
        )),
    }
}

/// Distance between the pulsed evolution with the bath and
/// `exp(-i (H_B + H_X) T)`, `T` the schedule duration.
pub fn eta(s: &PulseSchedule, bath: &BathModel, dt: f64, lambda: f64) -> Result<EtaReport> {
    let hx = single_hamiltonian(s)?;
    let u = simulate_dense(s, Some(bath), dt, lambda)?;
    let ideal_h = hx.add(&bath.h_b_full(s.n_qubits)?);
    let ideal = expm_sum(u.n, &ideal_h, s.total_duration(dt), dt, lambda);
    Ok(EtaReport {
        raw: spectral_norm(&(&u.matrix - &ideal)),
        phase_optimized: phase_optimized_distance(&u.matrix, &ideal),
    })
}

/// Constants of the parametric bound; no defaults are shipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct EtaBoundParams {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaBound {
    /// Bound on `‖H_eff^(2)‖`.
    pub second_order: f64,
    /// Bound on `‖Σ_{k≥3} H_eff^(k)‖`.
    pub higher_order: f64,
    /// `N_DD δt` times the sum of both.
    pub eta: f64,
}

/// `norm_sb = ‖H_SB‖`, `norm_sys = ‖H_B + H_X‖`.
pub fn eta_bound(p: &EtaBoundParams, norm_sb: f64, norm_sys: f64, n_dd: usize, dt: f64, lambda: f64) -> Result<EtaBound> {
    if !(norm_sb >= 0.0 && norm_sys >= 0.0 && dt >= 0.0 && lambda >= 0.0) {
        return Err(StrobeError::Invalid("norms, δt and λ must be nonnegative".into()));
    }
    let ndt = n_dd as f64 * dt;
    let ls = lambda * norm_sb;
    let second = ndt.powi(2) * ls.powi(2) * (p.c0 * ls + p.c1 * norm_sys);
    let e = ls + norm_sys;
    let higher = ndt.powi(3) * ls * e.powi(3) * (p.c2 + p.c3 * e * ndt);
    Ok(EtaBound {
        second_order: second,
        higher_order: higher,
        eta: ndt * (second + higher),
    })
}

/// Dense generator of a schedule against a reference, with a residual
/// scaling fit over `δt`.
#[derive(Debug, Clone)]
pub struct EffectiveReport {
    /// Pauli coefficients of the generator at the first `δt`.
    pub generator: Vec<(Pauli, f64)>,
    pub identity: f64,
    /// `T‖H − H_ref‖` at every `δt`.
    pub residuals: Vec<(f64, f64)>,
    pub fit: Option<ScalingFit>,
    /// 95% interval of the exponent.
    pub interval: Option<(f64, f64)>,
    pub eta: Option<EtaReport>,
}

impl EffectiveReport {
    pub fn to_json(&self) -> Value {
        json!({
            "generator": self.generator.iter().map(|(p, c)| json!({"pauli": p.label(), "coeff": c})).collect::<Vec<_>>(),
            "identity": self.identity,
            "residuals": self.residuals,
            "fit": self.fit,
            "interval": self.interval,
            "eta": self.eta,
        })
    }
}

/// `reference` is graded in `δt` and `λ` and evaluated at every point;
/// the residual is measured on the phase `T·H`.
pub fn effective_report(
    s: &PulseSchedule,
    bath: Option<&BathModel>,
    dts: &[f64],
    lambda: f64,
    reference: &WeightedPauliSum,
) -> Result<EffectiveReport> {
    if dts.is_empty() {
        return Err(StrobeError::Invalid("need at least one δt".into()));
    }
    let points: Vec<Result<(f64, f64, CMat, f64)>> = dts
        .par_iter()
        .map(|&dt| {
            let u = simulate_dense(s, bath, dt, lambda)?;
            let t = s.total_duration(dt);
            let g = extract_generator(&u, t)?;
            let r = reference.dense(u.n, dt, lambda);
            let res = spectral_norm(&((g.traceless() - r) * num_complex::Complex64::new(t, 0.0)));
            Ok((dt, res, g.matrix, g.identity))
        })
        .collect();
    let mut residuals = Vec::new();
    let mut first = None;
    for p in points {
        let (dt, res, m, id) = p?;
        if first.is_none() {
            first = Some((m, id));
        }
        residuals.push((dt, res));
    }
    let n = s.n_qubits + bath.map_or(0, |b| b.n_bath);
    let (m, identity) = first.ok_or_else(|| StrobeError::Invalid("no points".into()))?;
    let fit = if residuals.len() >= 4 { fit_scaling(&residuals).ok() } else { None };
    let interval = fit.map(|f| (f.exponent - 1.96 * f.stderr, f.exponent + 1.96 * f.stderr));
    let eta = match bath {
        Some(b) if s.hamiltonians.len() == 1 => Some(eta(s, b, dts[0], lambda)?),
        _ => None,
    };
    Ok(EffectiveReport {
        generator: pauli_decompose(&m, n, 1e-12),
        identity,
        residuals,
        fit,
        interval,
        eta,
    })
}

/// `‖H‖` of a Pauli sum evaluated at `(δt, λ)`, bounded by the `ℓ¹` norm
/// and computed exactly when small enough for dense work.
pub fn operator_norm(h: &WeightedPauliSum, n: usize, dt: f64, lambda: f64) -> f64 {
    if n <= 10 {
        spectral_norm(&h.dense(n, dt, lambda))
    } else {
        h.evaluate(dt, lambda).iter().map(|(_, c)| c.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoupling::universal_sequence;
    use crate::pauli::Letter;

    fn sum(items: &[(i64, &str)]) -> WeightedPauliSum {
        WeightedPauliSum::from_labels(items).unwrap()
    }

    fn setup() -> (PulseSchedule, BathModel) {
        let t = PulseSchedule::new(2).with_hamiltonian("hx", sum(&[(1, "X1 X2")]));
        let s = universal_sequence(2).unwrap().to_schedule(&t, "hx").unwrap();
        let bath = BathModel::new(1, sum(&[(1, "Z1")]))
            .couple(0, Letter::Y, sum(&[(1, "X1")]))
            .couple(1, Letter::Z, sum(&[(1, "Y1")]));
        (s, bath)
    }

    #[test]
    fn eta_vanishes_without_coupling() {
        let (s, bath) = setup();
        let e = eta(&s, &bath, 0.05, 0.0).unwrap();
        assert!(e.raw < 1e-10 && e.phase_optimized <= e.raw + 1e-12, "{e:?}");
        assert!(eta(&s, &bath, 0.05, 0.1).unwrap().raw > 1e-6);
    }

    #[test]
    fn bound_scaling() {
        let p = EtaBoundParams {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
        };
        assert_eq!(eta_bound(&p, 2.0, 3.0, 8, 0.01, 0.0).unwrap().eta, 0.0);
        let a = eta_bound(&p, 2.0, 3.0, 8, 0.01, 1e-6).unwrap();
        let b = eta_bound(&p, 2.0, 3.0, 8, 0.01, 2e-6).unwrap();
        assert!((b.second_order / a.second_order - 4.0).abs() < 1e-4);
        // c = 1 everywhere, N_DD δt = 0.08, λ‖H_SB‖ = 0.2, ‖H_B + H_X‖ = 3
        let g = eta_bound(&p, 2.0, 3.0, 8, 0.01, 0.1).unwrap();
        let second = 0.08f64.powi(2) * 0.04 * (0.2 + 3.0);
        let higher = 0.08f64.powi(3) * 0.2 * 3.2f64.powi(3) * (1.0 + 3.2 * 0.08);
        assert!((g.second_order - second).abs() < 1e-15);
        assert!((g.higher_order - higher).abs() < 1e-15);
        assert!((g.eta - 0.08 * (second + higher)).abs() < 1e-15);
    }

    #[test]
    fn usec_generator_residual_is_third_order() {
        let (s, bath) = setup();
        let reference = sum(&[(1, "X1 X2"), (1, "Z3")]);
        let r = effective_report(&s, Some(&bath), &[0.04, 0.02, 0.01, 0.005], 0.1, &reference).unwrap();
        let f = r.fit.unwrap();
        assert!(f.exponent > 2.9, "{f:?}");
        assert!(r.eta.is_some());
    }
}
