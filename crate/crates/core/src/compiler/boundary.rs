//! Holes, three-body boundary terms and the exact π/4-conjugation method.

use super::components::{certify_order, nested_frames};
use super::{site_layer, step, wrap, CompileReport, Frames};
use crate::error::{Result, StrobeError};
use crate::lattice::GridLayout;
use crate::pauli::{CliffordLayer, Grade, Letter, Pauli, Rational, SingleClifford, WeightedPauliSum};
use crate::schedule::{from_layer_frames, Angle, Event, PulseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Zero at `δt³`: the third component commutes with `[H_a, H_b]`.
    Hole,
    /// `X₁X₂X₄` at `δt²` from a single commutator.
    ThreeBody,
    /// `X₁X₂X₄` at `δt³` with a single-qubit rotation inside `H_c`.
    SingleBody,
}

impl BoundaryKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "hole" => BoundaryKind::Hole,
            "three_body" | "three-body" => BoundaryKind::ThreeBody,
            "single_body" | "single-body" => BoundaryKind::SingleBody,
            _ => return Err(StrobeError::Invalid(format!("unknown boundary kind `{s}`"))),
        })
    }
}

type Gates<'a> = &'a [(usize, SingleClifford)];

fn pauli(l: Letter) -> SingleClifford {
    SingleClifford::pauli(l)
}

pub(crate) fn site_hx(grid: &GridLayout, site: &[usize; 4]) -> Result<WeightedPauliSum> {
    let mut h = WeightedPauliSum::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let (a, b) = (site[i].min(site[j]), site[i].max(site[j]));
            if !grid.has_edge(a, b) {
                return Err(StrobeError::MissingCouplings(format!("qubits {} and {}", a + 1, b + 1)));
            }
            h.add_term(Pauli::xs(&[a, b]), Grade::ZERO, Rational::from_integer(1));
        }
    }
    Ok(h)
}

/// Two-step component: frames `V`, `uV`, optionally wrapped in `neg`.
fn two_step(n: usize, site: &[usize; 4], pre: Gates, u: Gates, neg: Option<Gates>) -> Frames {
    let v = site_layer(n, site, pre);
    let u = site_layer(n, site, u);
    let f = vec![(v.clone(), step("hx")), (u.compose(&v), step("hx"))];
    match neg {
        Some(g) => wrap(&f, &site_layer(n, site, g)),
        None => f,
    }
}

/// Integer combination of site-relative Pauli strings.
fn site_sum(site: &[usize; 4], items: &[(i64, &[(usize, Letter)])]) -> WeightedPauliSum {
    WeightedPauliSum::from_terms(items.iter().map(|(c, sites)| {
        let p = Pauli::from_sites(&sites.iter().map(|&(k, l)| (site[k - 1], l)).collect::<Vec<_>>());
        (p, Rational::from_integer(*c as i128))
    }))
}

pub fn compile_boundary(grid: &GridLayout, site: &[usize; 4], kind: BoundaryKind) -> Result<CompileReport> {
    use Letter::{X, Y, Z};
    let n = grid.n_qubits();
    let template = PulseSchedule::new(n).with_hamiltonian("hx", site_hx(grid, site)?);
    let zz = [(1, pauli(Z)), (2, pauli(Z))];
    let z14 = [(1, pauli(Z)), (4, pauli(Z))];
    let neg_a = [(1, pauli(X)), (3, pauli(Z))];
    let neg_b = [(1, pauli(X)), (2, pauli(Z))];
    let sd1 = [(1, SingleClifford::s_dag())];
    let b = two_step(n, site, &sd1, &z14, None);
    let nb = two_step(n, site, &sd1, &z14, Some(&neg_b));
    let purge = site_layer(n, site, &[(1, pauli(Z)), (2, pauli(Y))]);
    let x124: &[(usize, Letter)] = &[(1, X), (2, X), (4, X)];
    let w1 = [(1, SingleClifford::w())];

    let (frames, expected, order, notes) = match kind {
        BoundaryKind::Hole => {
            let w12 = [(1, SingleClifford::w()), (2, SingleClifford::w())];
            let a = two_step(n, site, &w12, &zz, None);
            let na = two_step(n, site, &w12, &zz, Some(&neg_a));
            let hole_c = [(2, SingleClifford::w())];
            let c = two_step(n, site, &hole_c, &z14, None);
            let nc = two_step(n, site, &hole_c, &z14, Some(&[(1, pauli(Z)), (2, pauli(X))]));
            let once = nested_frames(&a, &b, &c, &na, &nb, &nc);
            let mut f = wrap(&once, &purge);
            f.extend(once);
            (f, WeightedPauliSum::new(), 3, vec![])
        }
        BoundaryKind::ThreeBody => {
            // H_a = 2(Z₁X₂ + X₃X₄) needs the Hadamard on qubit 1 only
            let a = two_step(n, site, &w1, &zz, None);
            let na = two_step(n, site, &w1, &zz, Some(&neg_a));
            let mut once = Frames::new();
            for f in [&a, &b, &na, &nb] {
                once.extend(f.iter().cloned());
            }
            let mut f = wrap(&once, &site_layer(n, site, &[(1, pauli(X))]));
            f.extend(once);
            (f, site_sum(site, &[(1, x124)]), 2, vec![])
        }
        BoundaryKind::SingleBody => {
            let a = two_step(n, site, &w1, &zz, None);
            let na = two_step(n, site, &w1, &zz, Some(&neg_a));
            // H_c = 2(X₁X₄ + X₃X₄ + X₁X₃ + Y₂): Z₂-toggled H_x plus a Y₂ kick
            let kicked = |s: i64| -> Frames {
                let id = CliffordLayer::identity(n);
                let z2 = site_layer(n, site, &[(2, pauli(Z))]);
                let kick = Event::Rotation {
                    axis: site_sum(site, &[(2 * s, &[(2, Y)])]),
                    angle: Angle::Steps(1),
                };
                vec![(id.clone(), step("hx")), (z2, step("hx")), (id, kick)]
            };
            // no Pauli negates the X₁X₄, X₃X₄, X₁X₃ triangle; Z₃ flips the
            // two pairs through qubit 3 and the purge removes X₁X₄
            let nc = wrap(&kicked(-1), &site_layer(n, site, &[(3, pauli(Z))]));
            let once = nested_frames(&a, &b, &kicked(1), &na, &nb, &nc);
            let mut f = wrap(&once, &purge);
            f.extend(once);
            // the nested commutator comes out as X₁Z₂X₄; a Hadamard on
            // qubit 2 turns it into X₁X₂X₄
            let f = wrap(&f, &site_layer(n, site, &[(2, SingleClifford::w())]));
            (
                f,
                site_sum(site, &[(1, x124)]),
                3,
                vec![],
            )
        }
    };
    let mut sched = from_layer_frames(&template, &frames);
    let target = certify_order(&sched, &expected, order)?;
    sched.declared_target = Some(target.clone());
    sched.cyclic = true;
    Ok(CompileReport {
        step_count: sched.step_count(),
        schedule: sched,
        declared_target: target,
        expected_residual_order: order + 1,
        reference: None,
        notes,
    })
}

/// Exact `i·exp(-iθ X⊗4)` from two `π/(4c)` evolutions under `c H_x`.
pub fn compile_pi4(grid: &GridLayout, site: &[usize; 4], theta: f64, c: Rational) -> Result<PulseSchedule> {
    use num_traits::{ToPrimitive, Zero};
    if c.is_zero() {
        return Err(StrobeError::Invalid("entangling strength must be nonzero".into()));
    }
    let n = grid.n_qubits();
    let hx = site_hx(grid, site)?.scale(c);
    if !hx.mutually_commuting() {
        return Err(StrobeError::NonCommutingExponent);
    }
    let t = std::f64::consts::FRAC_PI_4 / c.to_f64().unwrap_or(f64::NAN);
    let mut s = PulseSchedule::new(n).with_hamiltonian("hx", hx);
    let w1 = site_layer(n, site, &[(1, SingleClifford::w())]);
    let y1 = site_layer(n, site, &[(1, pauli(Letter::Y))]);
    s.pulse(w1.clone());
    s.pulse(y1.clone());
    s.evolve_time("hx", t);
    s.pulse(y1);
    s.rotate(
        WeightedPauliSum::single(Pauli::single(site[0], Letter::Y), Rational::from_integer(-1)),
        Angle::Radians(theta),
    );
    s.evolve_time("hx", t);
    s.pulse(w1);
    // exact up to the global phase i; θ is stored as its nearest small rational
    let theta_q = Rational::approximate_float(theta)
        .ok_or_else(|| StrobeError::Invalid(format!("angle {theta} is not representable")))?;
    let x4 = Pauli::xs(site);
    s.declared_target = Some(WeightedPauliSum::single(x4, theta_q));
    Ok(s)
}
