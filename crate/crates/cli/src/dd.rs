//! `strobe dd`: decoupling sequences with averaging self-tests.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use strobe_core::decoupling::{
    interleave, lambda1_extension, symmetrize_local, symmetrize_protecting, universal_sequence, DDSequence,
};
use strobe_core::pauli::span_contains;
use strobe_core::schedule::PulseSchedule;
use strobe_core::{Pauli, Rational, WeightedPauliSum};

use crate::config::{parse_list, read_json, write_json, CertificationFailure};

/// Above this many (error, pulse) pairs the self-test samples errors.
const EXHAUSTIVE_WORK: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DdKind {
    Universal,
    Lemma1,
    Lemma2,
    Interleave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DdName {
    /// Eight-segment universal sequence.
    USec,
    /// Universal sequence followed by its `X⊗N`-conjugated copy.
    USecExt,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DdArgs {
    /// Register size; `lemma1` defaults to the generators' extent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated stabilizer generators for `lemma1`, e.g. `X1X2,X2X3`.
    #[arg(long)]
    pub gens: Option<String>,
    /// Locality of the suppressed errors for `lemma2`.
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    /// Lattice dimension for `lemma2`, each axis of extent `n`.
    #[arg(long = "D", default_value_t = 1)]
    #[serde(rename = "D")]
    pub dim: usize,
    /// Explicit extents per axis for `lemma2`, overriding `n` and `D`.
    #[arg(long)]
    pub dims: Option<String>,
    /// Append the `X⊗N`-conjugated copy (`universal`).
    #[arg(long)]
    pub extend: bool,
    /// Sequence to interleave.
    #[arg(long, value_enum, default_value = "u-sec")]
    pub dd: DdName,
    /// Schedule to protect (`interleave`).
    #[arg(long)]
    pub sim: Option<PathBuf>,
    /// Errors drawn when the exhaustive self-test is too large (default 2000).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; defaults to `dd_<kind>.json`.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

struct SelfTest {
    checked: usize,
    failures: Vec<String>,
    sampled: bool,
}

impl SelfTest {
    fn to_json(&self) -> Value {
        json!({
            "checked": self.checked,
            "failures": self.failures.len(),
            "first_failures": self.failures.iter().take(5).collect::<Vec<_>>(),
            "sampled": self.sampled,
            "pass": self.failures.is_empty(),
        })
    }
}

fn twirl_vanishes(seq: &DDSequence, p: Pauli) -> bool {
    seq.twirl(&WeightedPauliSum::single(p, Rational::from_integer(1))).is_zero()
}

/// Run `check` on every error from `errors`, or on `samples` seeded draws
/// when the exhaustive run is too large.
fn run_checks<F, G>(total: u64, pulses: usize, samples: usize, seed: u64, nth: G, check: F) -> SelfTest
where
    F: Fn(Pauli) -> Option<String>,
    G: Fn(u64) -> Pauli,
{
    let mut t = SelfTest {
        checked: 0,
        failures: Vec::new(),
        sampled: false,
    };
    let visit = |p: Pauli, t: &mut SelfTest| {
        t.checked += 1;
        if let Some(f) = check(p) {
            t.failures.push(f);
        }
    };
    if total.saturating_mul(pulses as u64) <= EXHAUSTIVE_WORK {
        for k in 0..total {
            visit(nth(k), &mut t);
        }
    } else {
        t.sampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            visit(nth(rng.gen_range(0..total)), &mut t);
        }
    }
    t
}

/// The `k`-th Pauli in base-4 order on the listed qubits.
fn pauli_on(qubits: &[usize], mut k: u64) -> Pauli {
    use strobe_core::Letter::{I, X, Y, Z};
    let mut sites = Vec::new();
    for &q in qubits {
        let l = [I, X, Y, Z][(k % 4) as usize];
        k /= 4;
        if l != I {
            sites.push((q, l));
        }
    }
    Pauli::from_sites(&sites)
}

fn universal_test(seq: &DDSequence) -> SelfTest {
    let n = seq.n_qubits;
    // every single-qubit error averages out
    run_checks(3 * n as u64, seq.n_segments, 0, 0, |k| pauli_on(&[(k / 3) as usize], k % 3 + 1), |p| {
        (!twirl_vanishes(seq, p)).then(|| p.label())
    })
}

fn lemma1_test(seq: &DDSequence, gens: &[Pauli], samples: usize, seed: u64) -> SelfTest {
    let n = seq.n_qubits;
    let all: Vec<usize> = (0..n).collect();
    let total = if n >= 32 { u64::MAX } else { 4u64.pow(n as u32) };
    run_checks(total, seq.n_segments, samples, seed, |k| pauli_on(&all, k), |p| {
        // survivors are exactly the protected group, up to phase
        let survives = !twirl_vanishes(seq, p);
        (survives != span_contains(gens, p)).then(|| format!("{} survives={survives}", p.label()))
    })
}

fn windows(l: usize, dims: &[usize]) -> Vec<Vec<usize>> {
    let d = dims.len();
    let count: Vec<usize> = dims.iter().map(|&m| m - l + 1).collect();
    let n_win: usize = count.iter().product();
    let cell = l.pow(d as u32);
    (0..n_win)
        .map(|w| {
            let mut origin = vec![0; d];
            let mut r = w;
            for a in (0..d).rev() {
                origin[a] = r % count[a];
                r /= count[a];
            }
            (0..cell)
                .map(|c| {
                    let mut off = vec![0; d];
                    let mut r = c;
                    for a in (0..d).rev() {
                        off[a] = r % l;
                        r /= l;
                    }
                    // last axis fastest
                    (0..d).fold(0, |q, a| q * dims[a] + origin[a] + off[a])
                })
                .collect()
        })
        .collect()
}

fn lemma2_test(seq: &DDSequence, l: usize, dims: &[usize], samples: usize, seed: u64) -> SelfTest {
    let wins = windows(l, dims);
    let per = 4u64.pow(l.pow(dims.len() as u32) as u32) - 1;
    let total = per * wins.len() as u64;
    run_checks(total, seq.n_segments, samples, seed, |k| pauli_on(&wins[(k / per) as usize], k % per + 1), |p| {
        (!twirl_vanishes(seq, p)).then(|| p.label())
    })
}

pub fn run(kind: DdKind, args: &DdArgs) -> anyhow::Result<()> {
    let samples = args.samples.unwrap_or(2000);
    let (seq, test, extra): (Option<DDSequence>, Option<SelfTest>, Value) = match kind {
        DdKind::Universal => {
            let n = args.n.ok_or_else(|| anyhow!("universal needs --n"))?;
            let mut s = universal_sequence(n)?;
            if args.extend {
                s = lambda1_extension(&s)?;
            }
            let t = universal_test(&s);
            (Some(s), Some(t), Value::Null)
        }
        DdKind::Lemma1 => {
            let spec = args.gens.as_deref().ok_or_else(|| anyhow!("lemma1 needs --gens"))?;
            let gens: Vec<Pauli> = spec
                .split(',')
                .filter(|g| !g.trim().is_empty())
                .map(Pauli::parse)
                .collect::<Result<_, _>>()?;
            let n = args.n.unwrap_or_else(|| gens.iter().map(|g| g.extent()).max().unwrap_or(1));
            let s = symmetrize_protecting(n, &gens)?;
            let t = lemma1_test(&s, &gens, samples, args.seed);
            (Some(s), Some(t), json!({"generators": gens.iter().map(|g| g.label()).collect::<Vec<_>>()}))
        }
        DdKind::Lemma2 => {
            let dims = match &args.dims {
                Some(d) => parse_list::<usize>(d, "dims")?,
                None => vec![args.n.ok_or_else(|| anyhow!("lemma2 needs --n or --dims"))?; args.dim],
            };
            let s = symmetrize_local(args.l, &dims, None)?;
            let t = lemma2_test(&s, args.l, &dims, samples, args.seed);
            (Some(s), Some(t), json!({"l": args.l, "dims": dims}))
        }
        DdKind::Interleave => {
            let path = args.sim.as_ref().ok_or_else(|| anyhow!("interleave needs --sim"))?;
            let sim = PulseSchedule::from_json(&read_json(path)?)?;
            let mut dd = universal_sequence(sim.n_qubits)?;
            if args.dd == DdName::USecExt {
                dd = lambda1_extension(&dd)?;
            }
            let combined = interleave(&dd, &sim)?;
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("dd_interleave.json"));
            write_json(&out, &combined.to_json())?;
            println!("dd segments: {}", dd.n_segments);
            println!("simulation steps: {}", sim.step_count());
            println!("segments: {}", combined.segment_count());
            println!("steps: {}", combined.step_count());
            println!("schedule: {}", out.display());
            return Ok(());
        }
    };
    let seq = seq.expect("set for every sequence kind");
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("dd_{}.json", kind_name(kind))));
    let mut doc = json!({
        "kind": kind_name(kind),
        "pulses": seq.n_segments,
        "non_identity_layers": seq.pulse_count(),
        "sequence": seq.to_json(),
        "parameters": extra,
    });
    if let Some(t) = &test {
        doc["self_test"] = t.to_json();
    }
    write_json(&out, &doc)?;
    println!("pulses: {}", seq.n_segments);
    println!("non-identity layers: {}", seq.pulse_count());
    if let Some(t) = &test {
        let how = if t.sampled { "sampled" } else { "exhaustive" };
        let verdict = if t.failures.is_empty() { "pass" } else { "FAIL" };
        println!("self-test: {verdict} ({} errors, {how})", t.checked);
    }
    println!("sequence: {}", out.display());
    if let Some(t) = test.filter(|t| !t.failures.is_empty()) {
        return Err(CertificationFailure(format!("{} errors survive averaging", t.failures.len())).into());
    }
    Ok(())
}

fn kind_name(k: DdKind) -> &'static str {
    match k {
        DdKind::Universal => "universal",
        DdKind::Lemma1 => "lemma1",
        DdKind::Lemma2 => "lemma2",
        DdKind::Interleave => "interleave",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_tile_the_lattice() {
        assert_eq!(windows(2, &[4]), vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
        let w = windows(2, &[3, 3]);
        assert_eq!(w.len(), 4);
        assert_eq!(w[3], vec![4, 5, 7, 8]);
    }

    #[test]
    fn base_four_order() {
        assert_eq!(pauli_on(&[2, 5], 0), Pauli::IDENTITY);
        assert_eq!(pauli_on(&[2, 5], 1 + 3 * 4), Pauli::parse("X3 Z6").unwrap());
    }
}
