//! Plaquette components, the nested-commutator sequence and the
//! single-plaquette constructions built from it.

use super::{site_layer, step, third_order_phase, wrap, CompileReport, Frames, ReferenceConstant};
use crate::error::{Result, StrobeError};
use crate::lattice::{Connectivity, GridLayout};
use crate::pauli::{commutator_i, CliffordLayer, Grade, Letter, Rational, SingleClifford, WeightedPauliSum};
use crate::schedule::{from_layer_frames, layer_frames, toggling_frame, PulseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    A,
    B,
    C,
    NegA,
    NegB,
    NegC,
}

impl Component {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "a" => Component::A,
            "b" => Component::B,
            "c" => Component::C,
            "neg_a" => Component::NegA,
            "neg_b" => Component::NegB,
            "neg_c" => Component::NegC,
            _ => return Err(StrobeError::Invalid(format!("unknown component `{s}`"))),
        })
    }
}

fn w() -> SingleClifford {
    SingleClifford::w()
}

fn z() -> SingleClifford {
    SingleClifford::pauli(Letter::Z)
}

fn x() -> SingleClifford {
    SingleClifford::pauli(Letter::X)
}

fn y() -> SingleClifford {
    SingleClifford::pauli(Letter::Y)
}

/// XX couplings among the site qubits; all six pairs must be coupled.
fn site_hamiltonian(grid: &GridLayout, site: &[usize; 4]) -> Result<WeightedPauliSum> {
    let mut h = WeightedPauliSum::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let (a, b) = (site[i].min(site[j]), site[i].max(site[j]));
            if !grid.has_edge(a, b) {
                return Err(StrobeError::MissingCouplings(format!("qubits {} and {}", a + 1, b + 1)));
            }
            h.add_term(crate::Pauli::xs(&[a, b]), Grade::ZERO, Rational::from_integer(1));
        }
    }
    Ok(h)
}

fn component_frames(n: usize, site: &[usize; 4], which: Component) -> Frames {
    let (pre, purge, neg): (Vec<(usize, SingleClifford)>, Vec<(usize, SingleClifford)>, Vec<(usize, SingleClifford)>) =
        match which {
            Component::A | Component::NegA => (vec![(1, w()), (2, w())], vec![(1, z()), (2, z())], vec![(1, x()), (3, z())]),
            Component::B | Component::NegB => (vec![(1, SingleClifford::s_dag())], vec![(1, z()), (4, z())], vec![(1, x()), (2, z())]),
            Component::C | Component::NegC => (vec![(2, SingleClifford::s_dag())], vec![(1, z()), (4, z())], vec![(1, z()), (2, z())]),
        };
    let v = site_layer(n, site, &pre);
    let u = site_layer(n, site, &purge);
    let frames = vec![(v.clone(), step("hx")), (u.compose(&v), step("hx"))];
    match which {
        Component::NegA | Component::NegB | Component::NegC => wrap(&frames, &site_layer(n, site, &neg)),
        _ => frames,
    }
}

/// Two-step schedule generating one plaquette component over `H_x`.
pub fn gen_component(grid: &GridLayout, site: &[usize; 4], which: Component) -> Result<PulseSchedule> {
    let hx = site_hamiltonian(grid, site)?;
    let n = grid.n_qubits();
    let template = PulseSchedule::new(n).with_hamiltonian("hx", hx);
    Ok(from_layer_frames(&template, &component_frames(n, site, which)))
}

/// Component schedules feeding a nested-commutator sequence.
#[derive(Debug, Clone)]
pub struct Components {
    pub a: PulseSchedule,
    pub b: PulseSchedule,
    pub c: PulseSchedule,
    pub neg_a: PulseSchedule,
    pub neg_b: PulseSchedule,
    pub neg_c: PulseSchedule,
}

impl Components {
    pub fn plaquette(grid: &GridLayout, site: &[usize; 4]) -> Result<Self> {
        let g = |c| gen_component(grid, site, c);
        Ok(Components {
            a: g(Component::A)?,
            b: g(Component::B)?,
            c: g(Component::C)?,
            neg_a: g(Component::NegA)?,
            neg_b: g(Component::NegB)?,
            neg_c: g(Component::NegC)?,
        })
    }
}

fn frames_of(s: &PulseSchedule) -> Result<Frames> {
    let (f, closing) = layer_frames(s)?;
    if !closing.is_identity() {
        return Err(StrobeError::NotCyclic);
    }
    Ok(f)
}

fn effective(s: &PulseSchedule) -> Result<WeightedPauliSum> {
    Ok(toggling_frame(s)?.weighted_sum())
}

/// Split `h` into the terms commuting and anticommuting with `u`.
fn split_by(h: &WeightedPauliSum, u: crate::Pauli) -> (WeightedPauliSum, WeightedPauliSum) {
    let mut keep = WeightedPauliSum::new();
    let mut kill = WeightedPauliSum::new();
    for (p, g, c) in h.iter() {
        if p.commutes(u) {
            keep.add_term(p, g, *c);
        } else {
            kill.add_term(p, g, *c);
        }
    }
    (keep, kill)
}

/// Group-commutator ordering `+a +b -a -b +c +a -b -a +b -c`.
pub(crate) fn nested_frames(a: &Frames, b: &Frames, c: &Frames, na: &Frames, nb: &Frames, nc: &Frames) -> Frames {
    let mut once = Frames::new();
    for f in [a, b, na, nb, c, a, nb, na, b, nc] {
        once.extend(f.iter().cloned());
    }
    once
}

/// Check that the phase up to `δt³` is `expected` at `δt^order` (up to a
/// nonzero factor, or exactly zero) and vanishes at every other order.
/// Returns the phase.
pub(crate) fn certify_order(sched: &PulseSchedule, expected: &WeightedPauliSum, order: u32) -> Result<WeightedPauliSum> {
    let phase = third_order_phase(sched)?;
    for k in (1..=3).filter(|&k| k != order) {
        if !phase.at_dt(k).is_zero() {
            return Err(StrobeError::PurgeCertification(format!(
                "terms survive at dt^{k}: {}",
                phase.at_dt(k)
            )));
        }
    }
    let target = phase.at_dt(order);
    let flat = target.at_grade(Grade::dt(order));
    match (expected.is_zero(), flat.is_zero()) {
        (true, true) => {}
        (false, false) if flat.proportionality(expected).is_some() => {}
        _ => {
            return Err(StrobeError::PurgeCertification(format!(
                "phase at dt^{order} {flat} is not proportional to {expected}"
            )))
        }
    }
    Ok(target)
}

pub(crate) fn certify(sched: &PulseSchedule, expected: &WeightedPauliSum) -> Result<WeightedPauliSum> {
    certify_order(sched, expected, 3)
}

/// `V U V U` with `U` the ten-component group-commutator product and `V`
/// the purge pulse; the declared target is the third-order phase.
pub fn commutator_sequence(parts: &Components, purge: &CliffordLayer) -> Result<PulseSchedule> {
    let u = purge
        .as_pauli()
        .ok_or_else(|| StrobeError::PurgeCertification("purge layer must be a Pauli string".into()))?;
    let [a, b, c, na, nb, nc] = [&parts.a, &parts.b, &parts.c, &parts.neg_a, &parts.neg_b, &parts.neg_c];
    let once = nested_frames(
        &frames_of(a)?,
        &frames_of(b)?,
        &frames_of(c)?,
        &frames_of(na)?,
        &frames_of(nb)?,
        &frames_of(nc)?,
    );
    let mut full = wrap(&once, purge);
    full.extend(once);
    let mut template = a.clone();
    for s in [b, c] {
        for (name, h) in &s.hamiltonians {
            if template.hamiltonians.get(name).is_some_and(|g| g != h) {
                return Err(StrobeError::Invalid(format!("components disagree on hamiltonian `{name}`")));
            }
            template.hamiltonians.insert(name.clone(), h.clone());
        }
    }
    template.declared_target = None;
    let mut sched = from_layer_frames(&template, &full);

    // the nested commutator's extra terms must anticommute with the purge
    let (ha, hb, hc) = (effective(a)?, effective(b)?, effective(c)?);
    let nested = commutator_i(&commutator_i(&ha, &hb), &hc);
    let (keep, _) = split_by(&nested, u);
    sched.declared_target = Some(certify(&sched, &keep)?);
    sched.cyclic = true;
    Ok(sched)
}

fn report(schedule: PulseSchedule, reference: Option<(&str, Rational, crate::Pauli)>) -> CompileReport {
    let target = schedule.declared_target.clone().unwrap_or_default();
    let reference = reference.map(|(label, value, p)| ReferenceConstant {
        label: label.into(),
        value,
        computed: target.coeff(p, Grade::dt(3)),
    });
    CompileReport {
        step_count: schedule.step_count(),
        schedule,
        declared_target: target,
        expected_residual_order: 4,
        reference,
        notes: Vec::new(),
    }
}

/// `exp(-i 64 δt³ X⊗4)` on one plaquette in 40 steps.
pub fn compile_plaquette(grid: &GridLayout, site: &[usize; 4]) -> Result<CompileReport> {
    let parts = Components::plaquette(grid, site)?;
    let purge = site_layer(grid.n_qubits(), site, &[(1, z()), (2, y())]);
    let s = commutator_sequence(&parts, &purge)?;
    let x4 = crate::Pauli::xs(site);
    Ok(report(s, Some(("plaquette constant", Rational::from_integer(64), x4))))
}

fn nn_component(n: usize, site: &[usize; 4], gates: &[(usize, SingleClifford)], negate: bool) -> Frames {
    let frames = vec![(site_layer(n, site, gates), step("hx"))];
    if negate {
        wrap(&frames, &site_layer(n, site, &[(2, x()), (4, z())]))
    } else {
        frames
    }
}

/// Nearest-neighbour variant: `H_x = (X₁+X₃)(X₂+X₄)`, 20 steps, `16 δt³ X⊗4`.
pub fn compile_nn_vertex(grid: &GridLayout, site: &[usize; 4]) -> Result<CompileReport> {
    if grid.connectivity != Connectivity::Nearest {
        return Err(StrobeError::WrongConnectivity("nearest-neighbour couplings required".into()));
    }
    let n = grid.n_qubits();
    let mut hx = WeightedPauliSum::new();
    for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
        let (a, b) = (site[i].min(site[j]), site[i].max(site[j]));
        if !grid.has_edge(a, b) {
            return Err(StrobeError::MissingCouplings(format!("qubits {} and {}", a + 1, b + 1)));
        }
        hx.add_term(crate::Pauli::xs(&[a, b]), Grade::ZERO, Rational::from_integer(1));
    }
    let template = PulseSchedule::new(n).with_hamiltonian("hx", hx);
    let sd = SingleClifford::s_dag();
    let a = [(1, sd), (2, sd)];
    let b = [(1, w()), (2, sd)];
    let c = [(2, w())];
    let mk = |g: &[(usize, SingleClifford)], neg| from_layer_frames(&template, &nn_component(n, site, g, neg));
    let parts = Components {
        a: mk(&a, false),
        b: mk(&b, false),
        c: mk(&c, false),
        neg_a: mk(&a, true),
        neg_b: mk(&b, true),
        neg_c: mk(&c, true),
    };
    let purge = site_layer(n, site, &[(1, z()), (2, y())]);
    let s = commutator_sequence(&parts, &purge)?;
    let x4 = crate::Pauli::xs(site);
    Ok(report(s, Some(("nearest-neighbour constant", Rational::from_integer(16), x4))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(items: &[(i64, &str)]) -> WeightedPauliSum {
        WeightedPauliSum::from_labels(items).unwrap()
    }

    fn grid() -> GridLayout {
        GridLayout::new(2, 2, Connectivity::Diagonal).unwrap()
    }

    const SITE: [usize; 4] = [0, 1, 3, 2];

    #[test]
    fn components() {
        let g = grid();
        let e = |c| effective(&gen_component(&g, &SITE, c).unwrap()).unwrap();
        // site order 1 2 3 4 = grid qubits 1 2 4 3
        assert_eq!(e(Component::A), sum(&[(2, "Z1 Z2"), (2, "X4 X3")]));
        assert_eq!(e(Component::B), sum(&[(2, "Y1 X3"), (2, "X2 X4")]));
        assert_eq!(e(Component::C), sum(&[(2, "X1 X3"), (2, "Y2 X4")]));
        for (p, n) in [(Component::A, Component::NegA), (Component::B, Component::NegB), (Component::C, Component::NegC)] {
            assert_eq!(e(n), e(p).scale(Rational::from_integer(-1)));
        }
    }

    #[test]
    fn plaquette() {
        let r = compile_plaquette(&grid(), &SITE).unwrap();
        eprintln!("{}", r.summary());
        assert_eq!(r.step_count, 40);
        assert!(r.reference.as_ref().unwrap().matches());
    }

    #[test]
    fn nn_vertex() {
        let g = GridLayout::new(2, 2, Connectivity::Nearest).unwrap();
        let r = compile_nn_vertex(&g, &SITE).unwrap();
        eprintln!("{}", r.summary());
        assert_eq!(r.step_count, 20);
        assert!(r.reference.as_ref().unwrap().matches());
    }

    fn dense_phase(s: &PulseSchedule, dt: f64, p: crate::Pauli) -> f64 {
        use crate::verifier::{extract_generator, simulate_dense};
        let u = simulate_dense(s, None, dt, 0.0).unwrap();
        extract_generator(&u, 1.0).unwrap().coefficient(p)
    }

    #[test]
    fn plaquette_dense() {
        let r = compile_plaquette(&grid(), &SITE).unwrap();
        let x4 = crate::Pauli::parse("X1 X2 X3 X4").unwrap();
        for (dt, tol) in [(1e-2, 1e-2), (1e-3, 1e-4)] {
            let got = dense_phase(&r.schedule, dt, x4);
            let want = 64.0 * dt * dt * dt;
            assert!(((got - want) / want).abs() < tol, "dt={dt}: {got} vs {want}");
        }
    }

    #[test]
    fn negation_inverts_component_dense() {
        use crate::verifier::simulate_dense;
        let g = grid();
        for (p, n) in [(Component::A, Component::NegA), (Component::B, Component::NegB), (Component::C, Component::NegC)] {
            let mut s = gen_component(&g, &SITE, p).unwrap();
            // a component followed by its negation undoes it only to leading order
            s.extend(&gen_component(&g, &SITE, n).unwrap()).unwrap();
            let dt = 1e-3;
            let u = simulate_dense(&s, None, dt, 0.0).unwrap();
            let id = crate::verifier::DenseUnitary::identity(4);
            let d = crate::verifier::phase_optimized_distance(&u.matrix, &id.matrix);
            assert!(d < 50.0 * dt * dt, "{p:?}: {d}");
        }
    }
}
