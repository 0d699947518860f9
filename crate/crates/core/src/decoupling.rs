//! Dynamical-decoupling sequences and their interleaving with simulation
//! schedules.
//!
//! A sequence is stored as the pulse list of one cycle: pulse `k` precedes
//! segment `k`, and the final pulse closes the cycle. The toggling frame of
//! segment `k` is the product of the first `k + 1` pulses.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Result, StrobeError};
use crate::pauli::{check_generators, conjugate_layer, normalizer, CliffordLayer, Letter, Pauli, Rational, WeightedPauliSum};
use crate::schedule::{from_layer_frames, Angle, Duration, Event, PulseSchedule};

/// Largest hypercube `l^D` accepted by [`symmetrize_local`].
pub const LOCAL_PATTERN_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct DDSequence {
    pub n_qubits: usize,
    /// `n_segments + 1` layers; the last one closes the cycle.
    pub pulses: Vec<CliffordLayer>,
    pub n_segments: usize,
    pub cyclic: bool,
    pub protected_group: Option<Vec<Pauli>>,
}

impl DDSequence {
    /// Sequence whose segment `k` runs in toggling frame `frames[k]`.
    pub fn from_frames(n: usize, frames: &[CliffordLayer]) -> Result<Self> {
        if frames.is_empty() {
            return Err(StrobeError::Invalid("empty decoupling sequence".into()));
        }
        if let Some(f) = frames.iter().find(|f| f.n() != n) {
            return Err(StrobeError::DimensionMismatch { left: f.n(), right: n });
        }
        let mut pulses = Vec::with_capacity(frames.len() + 1);
        let mut cur = CliffordLayer::identity(n);
        for f in frames {
            pulses.push(f.compose(&cur.inverse()));
            cur = f.clone();
        }
        pulses.push(cur.inverse());
        Ok(DDSequence {
            n_qubits: n,
            n_segments: frames.len(),
            pulses,
            cyclic: true,
            protected_group: None,
        })
    }

    fn from_paulis(n: usize, frames: &[Pauli]) -> Result<Self> {
        let layers: Vec<_> = frames.iter().map(|&p| CliffordLayer::from_pauli(n, p)).collect();
        Self::from_frames(n, &layers)
    }

    pub fn frames(&self) -> Vec<CliffordLayer> {
        let mut cur = CliffordLayer::identity(self.n_qubits);
        self.pulses[..self.n_segments]
            .iter()
            .map(|p| {
                cur = p.compose(&cur);
                cur.clone()
            })
            .collect()
    }

    /// Whether the pulse product over one cycle is the identity.
    pub fn closes(&self) -> bool {
        self.pulses
            .iter()
            .fold(CliffordLayer::identity(self.n_qubits), |acc, p| p.compose(&acc))
            .is_identity()
    }

    /// Non-identity pulses, the closing layer included.
    pub fn pulse_count(&self) -> usize {
        self.pulses.iter().filter(|p| !p.is_identity()).count()
    }

    /// Toggled average `Σ_k F_k† s F_k`.
    pub fn twirl(&self, s: &WeightedPauliSum) -> WeightedPauliSum {
        let mut out = WeightedPauliSum::new();
        for f in self.frames() {
            out.add_assign_sum(&conjugate_layer(&f.inverse(), s));
        }
        out
    }

    /// Every pulse leaves `h` invariant.
    pub fn commutes_with(&self, h: &WeightedPauliSum) -> bool {
        self.pulses.iter().all(|p| conjugate_layer(p, h) == *h)
    }

    /// One cycle under `hamiltonian`, one step per segment, on a register of
    /// `template.n_qubits ≥ n_qubits` (extra qubits untouched).
    pub fn to_schedule(&self, template: &PulseSchedule, hamiltonian: &str) -> Result<PulseSchedule> {
        template.hamiltonian(hamiltonian)?;
        if template.n_qubits < self.n_qubits {
            return Err(StrobeError::DimensionMismatch {
                left: self.n_qubits,
                right: template.n_qubits,
            });
        }
        let frames: Vec<_> = self
            .frames()
            .into_iter()
            .map(|f| {
                (
                    widen(&f, template.n_qubits),
                    Event::Evolve {
                        hamiltonian: hamiltonian.to_string(),
                        duration: Duration::Steps(1),
                    },
                )
            })
            .collect();
        let mut s = from_layer_frames(template, &frames);
        s.cyclic = self.cyclic;
        s.declared_target = None;
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_qubits": self.n_qubits,
            "n_segments": self.n_segments,
            "cyclic": self.cyclic,
            "pulses": self.pulses.iter().map(|p| p.label()).collect::<Vec<_>>(),
            "protected_group": self.protected_group.as_ref().map(|g| g.iter().map(|p| p.label()).collect::<Vec<_>>()),
        })
    }
}

fn widen(l: &CliffordLayer, n: usize) -> CliffordLayer {
    let mut out = CliffordLayer::identity(n);
    for (q, g) in l.gates().iter().enumerate() {
        out.set(q, *g);
    }
    out
}

fn global(n: usize, l: Letter) -> Pauli {
    let all: Vec<usize> = (0..n).collect();
    Pauli::from_sites(&all.iter().map(|&q| (q, l)).collect::<Vec<_>>())
}

/// Symmetric eight-segment sequence with frames `I X Y Z Z Y X I` of global
/// Paulis. The inter-pulse form is `X Z X · X Z X`, up to phase.
pub fn universal_sequence(n: usize) -> Result<DDSequence> {
    if n == 0 || n > crate::pauli::MAX_QUBITS {
        return Err(StrobeError::Invalid(format!("universal sequence needs 1..=64 qubits, got {n}")));
    }
    use Letter::{I, X, Y, Z};
    let frames: Vec<Pauli> = [I, X, Y, Z, Z, Y, X, I].iter().map(|&l| global(n, l)).collect();
    DDSequence::from_paulis(n, &frames)
}

/// Append a copy of the cycle conjugated by `X⊗N`.
pub fn lambda1_extension(seq: &DDSequence) -> Result<DDSequence> {
    if !seq.cyclic {
        return Err(StrobeError::NotCyclic);
    }
    let x = CliffordLayer::from_pauli(seq.n_qubits, global(seq.n_qubits, Letter::X));
    let mut frames = seq.frames();
    let copy: Vec<_> = frames.iter().map(|f| f.compose(&x)).collect();
    frames.extend(copy);
    let mut out = DDSequence::from_frames(seq.n_qubits, &frames)?;
    out.protected_group = seq.protected_group.clone();
    Ok(out)
}

/// Twirl over the normalizer `N(P)` of the group generated by `generators`.
pub fn symmetrize_protecting(n: usize, generators: &[Pauli]) -> Result<DDSequence> {
    if let Some(g) = generators.iter().find(|g| g.extent() > n) {
        return Err(StrobeError::OutsideRegister(g.label()));
    }
    check_generators(generators)?;
    let group = normalizer(n, generators)?;
    let mut seq = DDSequence::from_paulis(n, &group)?;
    seq.protected_group = Some(generators.to_vec());
    Ok(seq)
}

/// Periodic extension, with period `l` along every axis, of every Pauli
/// pattern on an `l^D` hypercube. `dims` lists the lattice extent per axis,
/// with the last axis fastest in the qubit index. When `commute_with` is
/// given, only patterns whose extension commutes with all of its terms are
/// kept.
pub fn symmetrize_local(l: usize, dims: &[usize], commute_with: Option<&WeightedPauliSum>) -> Result<DDSequence> {
    let d = dims.len();
    if l == 0 || d == 0 {
        return Err(StrobeError::Invalid("need l ≥ 1 and at least one axis".into()));
    }
    if let Some(&m) = dims.iter().find(|&&m| m < l) {
        return Err(StrobeError::Invalid(format!("lattice extent {m} smaller than l = {l}")));
    }
    let cell = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(l));
    let cell = match cell {
        Some(c) if c <= LOCAL_PATTERN_CAP => c,
        _ => {
            return Err(StrobeError::EnumerationCap {
                qubits: cell.unwrap_or(usize::MAX),
                cap: LOCAL_PATTERN_CAP,
            })
        }
    };
    let n: usize = dims.iter().product();
    if n > crate::pauli::MAX_QUBITS {
        return Err(StrobeError::RegisterTooLarge(n));
    }
    // hypercube cell of every qubit
    let cell_of: Vec<usize> = (0..n)
        .map(|mut q| {
            let mut idx = 0;
            let mut stride = 1;
            for &m in dims.iter().rev() {
                idx += (q % m % l) * stride;
                stride *= l;
                q /= m;
            }
            idx
        })
        .collect();
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let extend = |code: u64| -> Pauli {
        let sites: Vec<(usize, Letter)> = (0..n)
            .map(|q| (q, letters[((code >> (2 * cell_of[q])) & 3) as usize]))
            .collect();
        Pauli::from_sites(&sites)
    };
    let total = 1u64 << (2 * cell);
    let keep: Vec<Pauli> = (0..total)
        .into_par_iter()
        .map(extend)
        .filter(|p| commute_with.map_or(true, |h| h.iter().all(|(q, _, _)| q.commutes(*p))))
        .collect();
    DDSequence::from_paulis(n, &keep)
}

/// Embed every segment of `sim` into one cycle of `dd`. Segment durations
/// carry over to every sub-segment, so the simulation step becomes
/// `N_DD · δt` and a `δt^p` target term gains `N_DD^p`. `δt`-graded
/// rotations are stretched to match; absolute-time evolutions are split.
pub fn interleave(dd: &DDSequence, sim: &PulseSchedule) -> Result<PulseSchedule> {
    if !dd.cyclic || !dd.closes() {
        return Err(StrobeError::NotCyclic);
    }
    if dd.n_qubits > sim.n_qubits {
        return Err(StrobeError::DimensionMismatch {
            left: dd.n_qubits,
            right: sim.n_qubits,
        });
    }
    let widened = DDSequence {
        pulses: dd.pulses.iter().map(|p| widen(p, sim.n_qubits)).collect(),
        n_qubits: sim.n_qubits,
        ..dd.clone()
    };
    for (name, h) in &sim.hamiltonians {
        if !widened.commutes_with(h) {
            return Err(StrobeError::PulseCommutation(name.clone()));
        }
    }
    let n_dd = dd.n_segments as u32;
    let mut out = PulseSchedule {
        events: Vec::new(),
        ..sim.clone()
    };
    for e in &sim.events {
        match e {
            Event::Pulse(l) => out.pulse(l.clone()),
            Event::Rotation {
                axis,
                angle: Angle::Steps(k),
            } => out.rotate(axis.clone(), Angle::Steps(k * n_dd)),
            Event::Rotation { .. } => out.events.push(e.clone()),
            Event::Evolve { hamiltonian, duration } => {
                let sub = match *duration {
                    Duration::Steps(k) => Duration::Steps(k),
                    Duration::Time(t) => Duration::Time(t / n_dd as f64),
                };
                for (k, p) in widened.pulses.iter().enumerate() {
                    out.pulse(p.clone());
                    if k < dd.n_segments {
                        out.events.push(Event::Evolve {
                            hamiltonian: hamiltonian.clone(),
                            duration: sub,
                        });
                    }
                }
            }
        }
    }
    out.declared_target = sim.declared_target.as_ref().map(|t| {
        let mut scaled = WeightedPauliSum::new();
        for (p, g, c) in t.iter() {
            let f = Rational::from_integer((n_dd as i128).pow(g.dt_power));
            scaled.add_term(p, g, c * f);
        }
        scaled
    });
    Ok(out)
}

/// Appendix-style counting argument against decoupling `Y_i Y_j` errors
/// with few Pauli pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub n_qubits: usize,
    pub n_pulses: usize,
    /// Bit `k` is set when `Y_i` anticommutes with pulse `k`.
    pub signatures: Vec<u64>,
    /// First pair `(i, j)` with equal signatures: `Y_i Y_j` commutes with
    /// every pulse and survives averaging.
    pub collision: Option<(usize, usize)>,
    /// `2^|P| < N`, so a collision is forced.
    pub forced: bool,
}

impl LowerBoundReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n_qubits": self.n_qubits,
            "n_pulses": self.n_pulses,
            "signatures": self.signatures,
            "collision": self.collision.map(|(i, j)| [i + 1, j + 1]),
            "forced": self.forced,
        })
    }
}

pub fn lower_bound_check(n: usize, pulses: &[Pauli]) -> Result<LowerBoundReport> {
    if n == 0 || n > crate::pauli::MAX_QUBITS {
        return Err(StrobeError::Invalid(format!("need 1..=64 qubits, got {n}")));
    }
    if pulses.len() > 64 {
        return Err(StrobeError::Invalid("at most 64 pulses".into()));
    }
    if let Some(p) = pulses.iter().find(|p| p.extent() > n) {
        return Err(StrobeError::OutsideRegister(p.label()));
    }
    let signatures: Vec<u64> = (0..n)
        .map(|i| {
            let y = Pauli::single(i, Letter::Y);
            pulses
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.commutes(y))
                .fold(0, |acc, (k, _)| acc | 1 << k)
        })
        .collect();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut collision = None;
    for (j, s) in signatures.iter().enumerate() {
        if let Some(&i) = seen.get(s) {
            collision = Some((i, j));
            break;
        }
        seen.insert(*s, j);
    }
    let forced = pulses.len() < 64 && (1u128 << pulses.len()) < n as u128;
    Ok(LowerBoundReport {
        n_qubits: n,
        n_pulses: pulses.len(),
        signatures,
        collision,
        forced,
    })
}

/// Averaged toggled operator `(1/N_DD) Σ_k F_k† s F_k`.
pub fn survivors(seq: &DDSequence, s: &WeightedPauliSum) -> WeightedPauliSum {
    seq.twirl(s).scale(Rational::new(1, seq.n_segments as i128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnus::effective_hamiltonian;
    use crate::pauli::Grade;

    fn p(s: &str) -> Pauli {
        Pauli::parse(s).unwrap()
    }

    fn sum(items: &[(i64, &str)]) -> WeightedPauliSum {
        WeightedPauliSum::from_labels(items).unwrap()
    }

    #[test]
    fn universal_pulses() {
        let u = universal_sequence(3).unwrap();
        assert_eq!(u.n_segments, 8);
        assert!(u.closes());
        let labels: Vec<String> = u.pulses.iter().map(|l| l.label()).collect();
        assert_eq!(
            labels,
            ["I", "X1 X2 X3", "Z1 Z2 Z3", "X1 X2 X3", "I", "X1 X2 X3", "Z1 Z2 Z3", "X1 X2 X3", "I"]
        );
        for i in 1..=3 {
            for l in ["X", "Y", "Z"] {
                assert!(u.twirl(&sum(&[(1, &format!("{l}{i}"))])).is_zero());
            }
        }
        assert!(u.commutes_with(&sum(&[(1, "X1 X2"), (1, "X2 X3")])));
    }

    #[test]
    fn universal_magnus_with_bath() {
        // two system qubits, one bath qubit, λ-graded couplings
        let hx = sum(&[(1, "X1 X2")]);
        let hb = sum(&[(1, "Z3")]);
        let mut hsb = WeightedPauliSum::new();
        for (c, s) in [(1, "X1 X3"), (2, "Y1 Z3"), (-1, "Z2 Y3"), (3, "Y2 X3")] {
            hsb.add_term(p(s), Grade::new(0, 1), Rational::from_integer(c));
        }
        let h = hx.add(&hb).add(&hsb);
        let t = PulseSchedule::new(3).with_hamiltonian("h", h);
        let s = universal_sequence(2).unwrap().to_schedule(&t, "h").unwrap();
        let r = effective_hamiltonian(&s, 2).unwrap();
        assert_eq!(r.residual_frame, "I");
        assert_eq!(r.orders[0], hx.add(&hb));
        assert!(r.orders[1].is_zero());
    }

    #[test]
    fn extension_doubles() {
        let e = lambda1_extension(&universal_sequence(4).unwrap()).unwrap();
        assert_eq!(e.n_segments, 16);
        assert!(e.closes());
        let f = e.frames();
        assert_eq!(f[8].label(), "X1 X2 X3 X4");
    }

    #[test]
    fn normalizer_sequence() {
        let gens = [p("X1 X2"), p("X2 X3"), p("X3 X4")];
        let s = symmetrize_protecting(4, &gens).unwrap();
        assert_eq!(s.n_segments, 32);
        for g in &gens {
            assert!(s.commutes_with(&WeightedPauliSum::single(*g, Rational::from_integer(1))));
        }
        let one = symmetrize_protecting(1, &[]).unwrap();
        assert_eq!(one.n_segments, 4);
    }

    #[test]
    fn local_sequences() {
        let s = symmetrize_local(1, &[5], None).unwrap();
        let f: Vec<String> = s.frames().iter().map(|l| l.label()).collect();
        assert_eq!(f, ["I", "X1 X2 X3 X4 X5", "Y1 Y2 Y3 Y4 Y5", "Z1 Z2 Z3 Z4 Z5"]);
        assert_eq!(symmetrize_local(2, &[6], None).unwrap().n_segments, 16);
        let g = crate::lattice::GridLayout::new(3, 3, crate::lattice::Connectivity::Diagonal).unwrap();
        let c = symmetrize_local(3, &[3, 3], Some(&g.system_hamiltonian())).unwrap();
        assert_eq!(c.n_segments, 4usize.pow(9) / 2usize.pow(8));
        assert!(matches!(
            symmetrize_local(4, &[4, 4], None),
            Err(StrobeError::EnumerationCap { .. })
        ));
    }

    #[test]
    fn interleave_counts() {
        let grid = crate::lattice::GridLayout::new(2, 2, crate::lattice::Connectivity::Diagonal).unwrap();
        let r = crate::compiler::compile_plaquette(&grid, &[0, 1, 3, 2]).unwrap();
        let dd = universal_sequence(4).unwrap();
        let s = interleave(&dd, &r.schedule).unwrap();
        assert_eq!(s.segment_count(), 320);
        assert!(s.pulses_close().unwrap());
        let m = effective_hamiltonian(&s, 2).unwrap();
        let want = r.declared_target.scale_int(512);
        assert_eq!(m.phase_at(3), want);
        assert_eq!(s.declared_target.clone().unwrap(), want);

        let id = DDSequence::from_frames(4, &[CliffordLayer::identity(4)]).unwrap();
        assert_eq!(interleave(&id, &r.schedule).unwrap().events, r.schedule.events);

        let bad = DDSequence::from_paulis(4, &[Pauli::IDENTITY, p("Z1")]).unwrap();
        assert!(matches!(
            interleave(&bad, &r.schedule),
            Err(StrobeError::PulseCommutation(_))
        ));
    }

    #[test]
    fn lower_bound() {
        let r = lower_bound_check(8, &[p("Z1 Z2 Z3 Z4"), p("Z1 Z2 Z5 Z6")]).unwrap();
        assert!(r.forced);
        let (i, j) = r.collision.unwrap();
        assert_eq!(r.signatures[i], r.signatures[j]);
        let ok = lower_bound_check(2, &[Pauli::IDENTITY, p("X1")]).unwrap();
        assert!(ok.collision.is_none() && !ok.forced);
    }
}
