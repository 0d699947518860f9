//! Pulse-schedule intermediate representation.
//!
//! A schedule is an ordered list of instantaneous Clifford pulses, Pauli
//! rotations and evolutions under named Hamiltonians. Evolution lengths are
//! integer multiples of the step `δt`, which is only bound at verification
//! time, so one compiled schedule serves a whole `δt` sweep.

mod toggle;

pub use toggle::{from_layer_frames, layer_frames, toggling_frame, Segment, TogglingFrame};

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Result, StrobeError};
use crate::pauli::{CliffordLayer, Frame, WeightedPauliSum};

/// Length of an evolution segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Duration {
    /// Integer number of `δt` steps.
    Steps(u32),
    /// Absolute time, independent of `δt`.
    Time(f64),
}

impl Duration {
    pub fn value(&self, dt: f64) -> f64 {
        match *self {
            Duration::Steps(k) => k as f64 * dt,
            Duration::Time(t) => t,
        }
    }
}

/// Angle of a Pauli rotation `exp(-i angle · axis)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// Fixed angle in radians.
    Radians(f64),
    /// `k · δt`; such rotations act as pseudo-evolutions graded in `δt`.
    Steps(u32),
}

impl Angle {
    pub fn value(&self, dt: f64) -> f64 {
        match *self {
            Angle::Radians(a) => a,
            Angle::Steps(k) => k as f64 * dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Pulse(CliffordLayer),
    Rotation { axis: WeightedPauliSum, angle: Angle },
    Evolve { hamiltonian: String, duration: Duration },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub n_qubits: usize,
    pub hamiltonians: BTreeMap<String, WeightedPauliSum>,
    pub events: Vec<Event>,
    /// Expected generator `D` with `U ≈ exp(-i D)`, graded by `δt` powers.
    pub declared_target: Option<WeightedPauliSum>,
    pub cyclic: bool,
}

impl PulseSchedule {
    pub fn new(n_qubits: usize) -> Self {
        PulseSchedule {
            n_qubits,
            hamiltonians: BTreeMap::new(),
            events: Vec::new(),
            declared_target: None,
            cyclic: false,
        }
    }

    pub fn with_hamiltonian(mut self, name: &str, h: WeightedPauliSum) -> Self {
        self.hamiltonians.insert(name.to_string(), h);
        self
    }

    pub fn pulse(&mut self, layer: CliffordLayer) {
        if layer.is_identity() {
            return;
        }
        // adjacent pulses fuse into one layer
        if let Some(Event::Pulse(prev)) = self.events.last_mut() {
            *prev = layer.compose(prev);
            if prev.is_identity() {
                self.events.pop();
            }
            return;
        }
        self.events.push(Event::Pulse(layer));
    }

    pub fn pulse_str(&mut self, spec: &str) -> Result<()> {
        let l = CliffordLayer::parse(self.n_qubits, spec)?;
        self.pulse(l);
        Ok(())
    }

    pub fn evolve(&mut self, hamiltonian: &str, steps: u32) {
        if steps == 0 {
            return;
        }
        self.events.push(Event::Evolve {
            hamiltonian: hamiltonian.to_string(),
            duration: Duration::Steps(steps),
        });
    }

    pub fn evolve_time(&mut self, hamiltonian: &str, time: f64) {
        self.events.push(Event::Evolve {
            hamiltonian: hamiltonian.to_string(),
            duration: Duration::Time(time),
        });
    }

    pub fn rotate(&mut self, axis: WeightedPauliSum, angle: Angle) {
        self.events.push(Event::Rotation { axis, angle });
    }

    /// Append another schedule on the same register; Hamiltonian tables merge.
    pub fn extend(&mut self, other: &PulseSchedule) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(StrobeError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        for (k, v) in &other.hamiltonians {
            match self.hamiltonians.get(k) {
                Some(existing) if existing != v => {
                    return Err(StrobeError::Invalid(format!("conflicting Hamiltonian `{k}`")))
                }
                _ => {
                    self.hamiltonians.insert(k.clone(), v.clone());
                }
            }
        }
        for e in &other.events {
            match e {
                Event::Pulse(l) => self.pulse(l.clone()),
                other => self.events.push(other.clone()),
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, name: &str) -> Result<&WeightedPauliSum> {
        self.hamiltonians
            .get(name)
            .ok_or_else(|| StrobeError::UnknownHamiltonian(name.to_string()))
    }

    /// Number of `δt`-step segments.
    pub fn step_count(&self) -> u32 {
        self.events
            .iter()
            .map(|e| match e {
                Event::Evolve {
                    duration: Duration::Steps(k),
                    ..
                } => *k,
                _ => 0,
            })
            .sum()
    }

    pub fn total_duration(&self, dt: f64) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                Event::Evolve { duration, .. } => duration.value(dt),
                _ => 0.0,
            })
            .sum()
    }

    pub fn pulse_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Pulse(_))).count()
    }

    /// Evolution segments in order (pulses and rotations skipped).
    pub fn segment_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Evolve { .. })).count()
    }

    /// Cumulative product of pulses and exact rotations as a Clifford frame.
    pub fn pulse_frame(&self) -> Result<Frame> {
        let mut f = Frame::identity(self.n_qubits);
        for e in &self.events {
            match e {
                Event::Pulse(l) => f.push_layer(l),
                Event::Rotation {
                    axis,
                    angle: Angle::Radians(a),
                } => toggle::push_exact_rotation(&mut f, axis, *a)?,
                _ => {}
            }
        }
        Ok(f)
    }

    /// Whether the pulses over the schedule multiply to the identity.
    pub fn pulses_close(&self) -> Result<bool> {
        Ok(self.pulse_frame()?.is_identity())
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.events {
            match e {
                Event::Pulse(l) if l.n() != self.n_qubits => {
                    return Err(StrobeError::DimensionMismatch {
                        left: l.n(),
                        right: self.n_qubits,
                    })
                }
                Event::Evolve { hamiltonian, duration } => {
                    self.hamiltonian(hamiltonian)?;
                    if duration.value(1.0) <= 0.0 {
                        return Err(StrobeError::Invalid("durations must be positive".into()));
                    }
                }
                Event::Rotation { axis, .. } if !axis.mutually_commuting() => {
                    return Err(StrobeError::NonCommutingExponent)
                }
                _ => {}
            }
        }
        for (name, h) in &self.hamiltonians {
            if h.extent() > self.n_qubits {
                return Err(StrobeError::OutsideRegister(name.clone()));
            }
        }
        if self.cyclic && !self.pulses_close()? {
            return Err(StrobeError::NotCyclic);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let hams: serde_json::Map<String, Value> =
            self.hamiltonians.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let events: Vec<Value> = self
            .events
            .iter()
            .map(|e| match e {
                Event::Pulse(l) => json!({"type": "pulse", "payload": l.label()}),
                Event::Rotation { axis, angle } => {
                    let mut v = json!({"type": "rotation", "payload": axis.to_json()});
                    match angle {
                        Angle::Radians(a) => v["angle"] = json!(a),
                        Angle::Steps(k) => v["angle_steps"] = json!(k),
                    }
                    v
                }
                Event::Evolve { hamiltonian, duration } => {
                    let mut v = json!({"type": "evolve", "payload": hamiltonian});
                    match duration {
                        Duration::Steps(k) => v["duration"] = json!(k),
                        Duration::Time(t) => v["duration_time"] = json!(t),
                    }
                    v
                }
            })
            .collect();
        json!({
            "n_qubits": self.n_qubits,
            "hamiltonians": hams,
            "events": events,
            "declared_target": self.declared_target.as_ref().map(|t| t.to_json()),
            "cyclic": self.cyclic,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| StrobeError::Invalid(format!("schedule JSON: {m}"));
        let n = v.get("n_qubits").and_then(Value::as_u64).ok_or_else(|| bad("missing n_qubits"))? as usize;
        let mut s = PulseSchedule::new(n);
        if let Some(h) = v.get("hamiltonians").and_then(Value::as_object) {
            for (k, sum) in h {
                s.hamiltonians.insert(k.clone(), WeightedPauliSum::from_json(sum)?);
            }
        }
        let events = v.get("events").and_then(Value::as_array).ok_or_else(|| bad("missing events"))?;
        for e in events {
            let ty = e.get("type").and_then(Value::as_str).ok_or_else(|| bad("event without type"))?;
            let payload = e.get("payload").ok_or_else(|| bad("event without payload"))?;
            match ty {
                "pulse" => {
                    let spec = payload.as_str().ok_or_else(|| bad("pulse payload must be a string"))?;
                    s.events.push(Event::Pulse(CliffordLayer::parse(n, spec)?));
                }
                "rotation" => {
                    let axis = WeightedPauliSum::from_json(payload)?;
                    let angle = if let Some(k) = e.get("angle_steps").and_then(Value::as_u64) {
                        Angle::Steps(k as u32)
                    } else {
                        Angle::Radians(e.get("angle").and_then(Value::as_f64).ok_or_else(|| bad("rotation angle"))?)
                    };
                    s.events.push(Event::Rotation { axis, angle });
                }
                "evolve" => {
                    let name = payload.as_str().ok_or_else(|| bad("evolve payload must name a Hamiltonian"))?;
                    let duration = if let Some(k) = e.get("duration").and_then(Value::as_u64) {
                        Duration::Steps(k as u32)
                    } else {
                        Duration::Time(e.get("duration_time").and_then(Value::as_f64).ok_or_else(|| bad("duration"))?)
                    };
                    s.events.push(Event::Evolve {
                        hamiltonian: name.to_string(),
                        duration,
                    });
                }
                other => return Err(bad(&format!("unknown event type `{other}`"))),
            }
        }
        s.declared_target = match v.get("declared_target") {
            None | Some(Value::Null) => None,
            Some(t) => Some(WeightedPauliSum::from_json(t)?),
        };
        s.cyclic = v.get("cyclic").and_then(Value::as_bool).unwrap_or(false);
        s.validate()?;
        Ok(s)
    }
}

/// Wrap the schedule as `u† · U · u`: `u` first, `u†` last.
pub fn conjugate_schedule(s: &PulseSchedule, u: &CliffordLayer) -> PulseSchedule {
    if u.is_identity() {
        return s.clone();
    }
    let mut out = PulseSchedule {
        events: Vec::new(),
        ..s.clone()
    };
    out.pulse(u.clone());
    for e in &s.events {
        match e {
            Event::Pulse(l) => out.pulse(l.clone()),
            other => out.events.push(other.clone()),
        }
    }
    let inv = u.inverse();
    out.pulse(inv.clone());
    out.declared_target = s.declared_target.as_ref().map(|t| crate::pauli::conjugate_layer(&inv, t));
    out
}

/// Append the time-reversed pulse pattern so the toggling-frame segment
/// list becomes a palindrome.
pub fn symmetrize(s: &PulseSchedule) -> Result<PulseSchedule> {
    if s.events.is_empty() {
        return Ok(s.clone());
    }
    let (frames, closing) = layer_frames(s)?;
    if !closing.is_identity() {
        return Err(StrobeError::NotCyclic);
    }
    let mut list = frames.clone();
    list.extend(frames.iter().rev().cloned());
    let mut out = toggle::from_layer_frames(s, &list);
    out.cyclic = true;
    out.declared_target = None;
    Ok(out)
}
