//! Toggling-frame transformation of a schedule into rotated segments.

use num_traits::Zero;

use super::{Angle, Duration, Event, PulseSchedule};
use crate::error::{Result, StrobeError};
use crate::pauli::{CliffordLayer, Frame, Rational, WeightedPauliSum};

/// One piecewise-constant piece `exp(-i weight·δt · hamiltonian)` seen from
/// the toggling frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub hamiltonian: WeightedPauliSum,
    /// Length in units of `δt`.
    pub weight: Rational,
    /// False for `δt`-graded rotations, which generate without elapsing time.
    pub elapsed: bool,
}

/// `U = C_final · T∏_k exp(-i weight_k δt H̃_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TogglingFrame {
    pub segments: Vec<Segment>,
    pub residual: Frame,
}

impl TogglingFrame {
    /// Total elapsed time in units of `δt`.
    pub fn total_weight(&self) -> Rational {
        self.segments
            .iter()
            .filter(|s| s.elapsed)
            .fold(Rational::zero(), |acc, s| acc + s.weight)
    }

    /// Duration-weighted sum `Σ weight_k H̃_k`.
    pub fn weighted_sum(&self) -> WeightedPauliSum {
        let mut out = WeightedPauliSum::new();
        for s in &self.segments {
            out.add_assign_sum(&s.hamiltonian.scale(s.weight));
        }
        out
    }
}

const QUARTER: f64 = std::f64::consts::FRAC_PI_4;

fn exact_quarters(x: f64) -> Option<u8> {
    let q = x / QUARTER;
    let r = q.round();
    if (q - r).abs() < 1e-9 {
        Some((r as i64).rem_euclid(8) as u8)
    } else {
        None
    }
}

/// Absorb `exp(-i a · axis)` into the frame when every term angle is a
/// multiple of `π/4`.
pub(crate) fn push_exact_rotation(frame: &mut Frame, axis: &WeightedPauliSum, a: f64) -> Result<()> {
    use num_traits::ToPrimitive;
    if !axis.mutually_commuting() {
        return Err(StrobeError::NonCommutingExponent);
    }
    let mut quarters = Vec::new();
    for (p, _, c) in axis.iter() {
        let q = exact_quarters(a * c.to_f64().unwrap_or(f64::NAN)).ok_or(StrobeError::InexactPulse)?;
        quarters.push((p, q));
    }
    for (p, q) in quarters {
        frame.push_rotation(p, q);
    }
    Ok(())
}

/// Absorb every pulse into frame rotations.
pub fn toggling_frame(s: &PulseSchedule) -> Result<TogglingFrame> {
    let mut frame = Frame::identity(s.n_qubits);
    let mut segments = Vec::new();
    for e in &s.events {
        match e {
            Event::Pulse(l) => frame.push_layer(l),
            Event::Rotation {
                axis,
                angle: Angle::Radians(a),
            } => push_exact_rotation(&mut frame, axis, *a)?,
            Event::Rotation {
                axis,
                angle: Angle::Steps(k),
            } => segments.push(Segment {
                hamiltonian: frame.apply_sum(axis),
                weight: Rational::from_integer(*k as i128),
                elapsed: false,
            }),
            Event::Evolve {
                hamiltonian,
                duration: Duration::Steps(k),
            } => segments.push(Segment {
                hamiltonian: frame.apply_sum(s.hamiltonian(hamiltonian)?),
                weight: Rational::from_integer(*k as i128),
                elapsed: true,
            }),
            Event::Evolve {
                hamiltonian,
                duration: Duration::Time(t),
            } => push_exact_rotation(&mut frame, s.hamiltonian(hamiltonian)?, *t)?,
        }
    }
    Ok(TogglingFrame {
        segments,
        residual: frame,
    })
}

/// Express a layer-pulse schedule as `(frame before event, event)` pairs
/// plus the closing frame. Only non-pulse events are listed.
pub fn layer_frames(s: &PulseSchedule) -> Result<(Vec<(CliffordLayer, Event)>, CliffordLayer)> {
    let mut cur = CliffordLayer::identity(s.n_qubits);
    let mut out = Vec::new();
    for e in &s.events {
        match e {
            Event::Pulse(l) => cur = l.compose(&cur),
            Event::Rotation {
                angle: Angle::Radians(_),
                ..
            }
            | Event::Evolve {
                duration: Duration::Time(_),
                ..
            } => {
                return Err(StrobeError::Invalid(
                    "frame rewriting requires layer pulses and step-length segments".into(),
                ))
            }
            other => out.push((cur.clone(), other.clone())),
        }
    }
    Ok((out, cur))
}

/// Rebuild a schedule from frame/event pairs, closing back to the identity.
pub fn from_layer_frames(template: &PulseSchedule, list: &[(CliffordLayer, Event)]) -> PulseSchedule {
    let mut out = PulseSchedule {
        events: Vec::new(),
        ..template.clone()
    };
    let mut cur = CliffordLayer::identity(template.n_qubits);
    for (f, e) in list {
        out.pulse(f.compose(&cur.inverse()));
        out.events.push(e.clone());
        cur = f.clone();
    }
    out.pulse(cur.inverse());
    out
}
