//! `strobe verify`: symbolic Magnus certification plus a dense `δt` sweep.

use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use strobe_core::magnus::effective_hamiltonian;
use strobe_core::schedule::PulseSchedule;
use strobe_core::verifier::{
    eta, expm_sum, extract_generator, fit_scaling, log_space, phase_optimized_distance, simulate_dense, BathModel,
    DENSE_QUBIT_CAP,
};
use strobe_core::{Pauli, Rational, StrobeError, WeightedPauliSum};

use crate::config::{read_json, write_json, CertificationFailure};

/// Residuals below this are treated as exact.
const EXACT_TOL: f64 = 1e-12;
/// Allowed shortfall of the fitted exponent.
const SLOPE_TOL: f64 = 0.1;
/// Allowed relative error of the target coefficients at the smallest `δt`.
const COEFF_TOL: f64 = 0.01;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub dt_min: f64,
    #[arg(long, default_value_t = 10f64.powf(-1.5))]
    pub dt_max: f64,
    #[arg(long, default_value_t = 6)]
    pub points: usize,
    /// System–bath coupling strength.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Bath qubits of a random one-local bath; 0 disables the bath.
    #[arg(long, default_value_t = 0)]
    pub bath_qubits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest register simulated densely.
    #[arg(long, default_value_t = DENSE_QUBIT_CAP)]
    pub dense_cap: usize,
    /// Skip the dense sweep.
    #[arg(long)]
    pub symbolic_only: bool,
    /// Sweep CSV; defaults to `<schedule>.sweep.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report; defaults to `<schedule>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl VerifyArgs {
    fn grid(&self) -> anyhow::Result<Vec<f64>> {
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_max && self.dt_max.is_finite()) {
            return Err(anyhow!("sweep needs 0 < dt-min < dt-max, got {} and {}", self.dt_min, self.dt_max));
        }
        if self.points < 2 {
            return Err(anyhow!("sweep needs at least two points"));
        }
        Ok(log_space(self.dt_min, self.dt_max, self.points))
    }
}

fn max_dt_power(s: &WeightedPauliSum) -> Option<u32> {
    s.grades().iter().map(|g| g.dt_power).max()
}

/// Symbolic comparison of the Magnus phase with the target up to the
/// target's highest `δt` power (`δt³` for an empty target).
fn symbolic(s: &PulseSchedule, target: Option<&WeightedPauliSum>) -> anyhow::Result<Value> {
    let r = match effective_hamiltonian(s, 2) {
        Ok(r) => r,
        Err(StrobeError::NonStepSegment | StrobeError::InexactPulse) => {
            return Ok(json!({"status": "unavailable", "reason": "schedule has absolute-time segments or inexact pulses"}));
        }
        Err(e) => return Err(e.into()),
    };
    let phase = r.phase();
    let Some(t) = target else {
        return Ok(json!({"status": "no target", "phase": phase.to_json(), "residual_frame": r.residual_frame}));
    };
    let top = match max_dt_power(t) {
        Some(p) if p > 0 => p,
        Some(_) => {
            return Ok(json!({"status": "unavailable", "reason": "target is not graded in dt"}));
        }
        None => 3,
    };
    let mut diff = WeightedPauliSum::new();
    for k in 0..=top {
        diff.add_assign_sum(&phase.at_dt(k).sub(&t.at_dt(k)));
    }
    let ok = diff.is_zero() && r.residual_frame == "I";
    Ok(json!({
        "status": if ok { "match" } else { "mismatch" },
        "through_dt_power": top,
        "expected_residual_order": top + 1,
        "difference": diff.to_json(),
        "residual_frame": r.residual_frame,
    }))
}

struct Point {
    dt: f64,
    residual: Option<f64>,
    eta: Option<f64>,
}

fn random_bath(n_sys: usize, n_bath: usize, seed: u64) -> BathModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_b = WeightedPauliSum::from_terms((0..n_bath).map(|b| (Pauli::single(b, strobe_core::Letter::Z), Rational::from_integer(1))));
    BathModel::random_one_local(n_sys, n_bath, h_b, &mut rng)
}

fn coefficient_check(s: &PulseSchedule, target: &WeightedPauliSum, dt: f64, lambda: f64) -> anyhow::Result<Value> {
    let u = simulate_dense(s, None, dt, lambda)?;
    let g = extract_generator(&u, 1.0)?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    let mut want_by_pauli = std::collections::BTreeMap::new();
    for (p, c) in target.evaluate(dt, lambda) {
        *want_by_pauli.entry(p).or_insert(0.0) += c;
    }
    for (p, want) in want_by_pauli {
        let got = g.coefficient(p);
        let rel = if want == 0.0 { got.abs() } else { (got - want).abs() / want.abs() };
        worst = worst.max(rel);
        rows.push(json!({"pauli": p.label(), "expected": want, "measured": got, "relative_error": rel}));
    }
    Ok(json!({"dt": dt, "terms": rows, "max_relative_error": worst, "pass": worst <= COEFF_TOL}))
}

pub fn run(path: &Path, args: &VerifyArgs) -> anyhow::Result<()> {
    let dts = args.grid()?;
    let s = PulseSchedule::from_json(&read_json(path)?)?;
    s.validate()?;
    let target = s.declared_target.clone();
    let exact_target = target.as_ref().is_some_and(|t| max_dt_power(t) == Some(0));

    let sym = symbolic(&s, target.as_ref())?;
    let sym_status = sym["status"].as_str().unwrap_or("").to_string();
    let n_total = s.n_qubits + args.bath_qubits;
    let dense_fits = n_total <= args.dense_cap.min(DENSE_QUBIT_CAP);
    let run_dense = dense_fits && !args.symbolic_only;
    if !run_dense && !matches!(sym_status.as_str(), "match" | "mismatch" | "no target") {
        return Err(StrobeError::DenseCap { qubits: n_total, cap: args.dense_cap.min(DENSE_QUBIT_CAP) }.into());
    }

    let mut points = Vec::new();
    let mut dense = Value::Null;
    if run_dense {
        let bath = (args.bath_qubits > 0).then(|| random_bath(s.n_qubits, args.bath_qubits, args.seed));
        let with_eta = bath.is_some() && s.hamiltonians.len() == 1;
        points = dts
            .par_iter()
            .map(|&dt| -> anyhow::Result<Point> {
                let residual = match &target {
                    Some(t) => {
                        let u = simulate_dense(&s, None, dt, args.lambda)?;
                        let want = expm_sum(s.n_qubits, t, 1.0, dt, args.lambda);
                        Some(phase_optimized_distance(&u.matrix, &want))
                    }
                    None => None,
                };
                let eta = match (&bath, with_eta) {
                    (Some(b), true) => Some(eta(&s, b, dt, args.lambda)?.phase_optimized),
                    _ => None,
                };
                Ok(Point { dt, residual, eta })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;

        let residuals: Vec<(f64, f64)> = points.iter().filter_map(|p| p.residual.map(|r| (p.dt, r))).collect();
        let expected = sym["expected_residual_order"].as_u64();
        let (fit, status) = if residuals.is_empty() {
            (Value::Null, "no target")
        } else if residuals.iter().all(|&(_, r)| r <= EXACT_TOL) {
            (Value::Null, "exact")
        } else if exact_target {
            (Value::Null, "inexact")
        } else {
            match fit_scaling(&residuals) {
                Ok(f) => {
                    let ok = expected.is_none_or(|e| f.exponent >= e as f64 - SLOPE_TOL);
                    (json!(f), if ok { "scaling" } else { "slope too low" })
                }
                Err(StrobeError::NoiseFloor | StrobeError::TooFewPoints { .. }) => (Value::Null, "unfit"),
                Err(e) => return Err(e.into()),
            }
        };
        let coeff = match &target {
            Some(t) if !t.is_zero() && status != "exact" => Some(coefficient_check(&s, t, dts[0], args.lambda)?),
            _ => None,
        };
        dense = json!({
            "status": status,
            "expected_residual_order": expected,
            "fit": fit,
            "coefficient_check": coeff,
            "bath_qubits": args.bath_qubits,
            "lambda": args.lambda,
            "seed": args.seed,
        });
    }

    let dense_status = dense["status"].as_str().map(str::to_string);
    let coeff_ok = dense["coefficient_check"]["pass"].as_bool().unwrap_or(true);
    let sym_ok = sym_status != "mismatch";
    let dense_ok = match dense_status.as_deref() {
        None | Some("exact" | "scaling" | "no target" | "unfit") => true,
        Some(_) => false,
    };
    let mode = match (run_dense, matches!(sym_status.as_str(), "match" | "mismatch")) {
        (true, true) => "dense+symbolic",
        (true, false) => "dense",
        (false, _) => "symbolic",
    };
    let certified = sym_ok && dense_ok && coeff_ok;

    let stem = path.with_extension("");
    let csv_path = args.csv.clone().unwrap_or_else(|| PathBuf::from(format!("{}.sweep.csv", stem.display())));
    let report_path = args.report.clone().unwrap_or_else(|| PathBuf::from(format!("{}.report.json", stem.display())));
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["dt", "residual", "eta"])?;
    for p in &points {
        let f = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        w.write_record([format!("{:e}", p.dt), f(p.residual), f(p.eta)])?;
    }
    w.flush()?;

    let report = json!({
        "mode": mode,
        "certified": certified,
        "n_qubits": s.n_qubits,
        "step_count": s.step_count(),
        "segment_count": s.segment_count(),
        "declared_target": target.as_ref().map(|t| t.to_json()),
        "exact_target": exact_target,
        "symbolic": sym,
        "dense": dense,
        "sweep": points.iter().map(|p| json!({"dt": p.dt, "residual": p.residual, "eta": p.eta})).collect::<Vec<_>>(),
    });
    write_json(&report_path, &report)?;

    println!("mode: {mode}");
    println!("symbolic: {sym_status}");
    if let Some(st) = &dense_status {
        println!("dense: {st}");
        if let Some(e) = dense["fit"]["exponent"].as_f64() {
            println!("fitted exponent: {e:.3}");
        }
        if let Some(c) = dense["coefficient_check"]["max_relative_error"].as_f64() {
            println!("coefficient error: {c:.3e}");
        }
        if let Some(m) = points.iter().filter_map(|p| p.residual).reduce(f64::max) {
            println!("max residual: {m:.3e}");
        }
    }
    println!("certified: {certified}");
    println!("csv: {}", csv_path.display());
    println!("report: {}", report_path.display());
    if !certified {
        return Err(CertificationFailure(format!("symbolic {sym_status}, dense {}", dense_status.unwrap_or("skipped".into()))).into());
    }
    Ok(())
}
