//! Pulse-schedule compilation of many-body terms from XX couplings.
//!
//! Every construction here is expressed as a list of toggling frames: the
//! segment evolving under `H` while the accumulated pulse layer is `C`
//! contributes `C† H C`. Wrapping a sub-sequence in a layer `g` (applied
//! first, undone last) right-multiplies all of its frames by `g`.

mod boundary;
mod components;
mod grid;
mod trotter;

pub use boundary::{compile_boundary, compile_pi4, BoundaryKind};
pub use grid::{compile_grid, compile_grid_faces};
pub use trotter::{
    compile_deformation, deformation_ops, exact_deformation_dense, trotter_plan, trotter_product_dense, trotter_unit, Block,
    DeformationOps, DeformationReport, TrotterFactor, TrotterVariant,
};
pub use components::{commutator_sequence, compile_nn_vertex, compile_plaquette, gen_component, Component, Components};

use serde_json::{json, Value};

use crate::error::{Result, StrobeError};
use crate::magnus::effective_hamiltonian;
use crate::pauli::{CliffordLayer, Rational, SingleClifford, WeightedPauliSum};
use crate::schedule::{Event, PulseSchedule};

/// A constant quoted for comparison with the computed one.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceConstant {
    pub label: String,
    pub value: Rational,
    pub computed: Rational,
}

impl ReferenceConstant {
    pub fn matches(&self) -> bool {
        self.value == self.computed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileReport {
    pub schedule: PulseSchedule,
    /// Number of `δt` steps.
    pub step_count: u32,
    /// Phase-level target `D` with `U ≈ exp(-i D)`, graded by `δt` power.
    pub declared_target: WeightedPauliSum,
    /// Leading `δt` power of the residual `‖U - exp(-i D)‖`.
    pub expected_residual_order: u32,
    pub reference: Option<ReferenceConstant>,
    pub notes: Vec<String>,
}

impl CompileReport {
    pub fn to_json(&self) -> Value {
        json!({
            "step_count": self.step_count,
            "pulse_count": self.schedule.pulse_count(),
            "declared_target": self.declared_target.to_json(),
            "expected_residual_order": self.expected_residual_order,
            "reference": self.reference.as_ref().map(|r| json!({
                "label": r.label,
                "value": format!("{}", r.value),
                "computed": format!("{}", r.computed),
                "matches": r.matches(),
            })),
            "notes": self.notes,
            "schedule": self.schedule.to_json(),
        })
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "steps: {}\npulses: {}\ntarget: {}\nresidual order: dt^{}\n",
            self.step_count,
            self.schedule.pulse_count(),
            self.declared_target,
            self.expected_residual_order
        );
        if let Some(r) = &self.reference {
            out += &format!(
                "reference {}: {} (computed {}, {})\n",
                r.label,
                r.value,
                r.computed,
                if r.matches() { "match" } else { "mismatch" }
            );
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }
}

/// Frame/event pairs, the working representation of a construction.
pub(crate) type Frames = Vec<(CliffordLayer, Event)>;

/// Layer acting with `gates` on plaquette-relative positions (1-based).
pub(crate) fn site_layer(n: usize, site: &[usize], gates: &[(usize, SingleClifford)]) -> CliffordLayer {
    let mut l = CliffordLayer::identity(n);
    for &(k, g) in gates {
        let q = site[k - 1];
        l.set(q, g.compose(&l.gates()[q]));
    }
    l
}

pub(crate) fn wrap(frames: &Frames, g: &CliffordLayer) -> Frames {
    frames.iter().map(|(f, e)| (f.compose(g), e.clone())).collect()
}

pub(crate) fn step(hamiltonian: &str) -> Event {
    Event::Evolve {
        hamiltonian: hamiltonian.into(),
        duration: crate::schedule::Duration::Steps(1),
    }
}

/// Symbolic third-order phase of a closed schedule; errors if anything
/// survives below `δt³`.
pub(crate) fn third_order_phase(s: &PulseSchedule) -> Result<WeightedPauliSum> {
    let r = effective_hamiltonian(s, 2)?;
    if r.residual_frame != "I" {
        return Err(StrobeError::Invalid(format!("schedule does not close: {}", r.residual_frame)));
    }
    Ok(r.phase())
}
