//! Parallel plaquette construction over a whole grid.
//!
//! Faces are processed in four passes, one per (row parity, column parity)
//! class; faces inside a class share no qubits. During a pass every step of
//! a component is split into four `δt` segments under the Z sign masks
//! `{I, M₁, M₂, M₁M₂}`, where `M₁`, `M₂` are the two bits of a 4-colouring
//! of the coupling graph: an `X_i X_j` coupling survives the four segments
//! only if `i` and `j` share a colour. Colourings are chosen so that exactly
//! the component's two pairs on each active face survive.

use rayon::prelude::*;

use super::components::{certify, nested_frames};
use super::{site_layer, step, wrap, CompileReport, Frames, ReferenceConstant};
use crate::error::{Result, StrobeError};
use crate::lattice::{Boundary, CodeLayout, Connectivity, HpSign, StabilizerKind};
use crate::pauli::{CliffordLayer, Grade, Letter, Pauli, Rational, SingleClifford, WeightedPauliSum};
use crate::schedule::{from_layer_frames, PulseSchedule};

type Gates = Vec<(usize, SingleClifford)>;

struct ComponentShape {
    /// Site-relative pairs kept by the masks.
    pairs: [(usize, usize); 2],
    pre: Gates,
    neg: Gates,
}

fn shape(which: char, hole: bool) -> ComponentShape {
    let p = SingleClifford::pauli;
    match which {
        'a' => ComponentShape {
            pairs: [(1, 2), (3, 4)],
            pre: vec![(1, SingleClifford::w()), (2, SingleClifford::w())],
            neg: vec![(1, p(Letter::X)), (3, p(Letter::Z))],
        },
        'b' => ComponentShape {
            pairs: [(1, 4), (2, 3)],
            pre: vec![(1, SingleClifford::s_dag())],
            neg: vec![(1, p(Letter::X)), (2, p(Letter::Z))],
        },
        // a Hadamard in place of the phase gate leaves H_c' = Z₂X₃ + X₁X₄,
        // which commutes with [H_a, H_b]
        _ if hole => ComponentShape {
            pairs: [(1, 4), (2, 3)],
            pre: vec![(2, SingleClifford::w())],
            neg: vec![(1, p(Letter::Z)), (2, p(Letter::X))],
        },
        _ => ComponentShape {
            pairs: [(1, 4), (2, 3)],
            pre: vec![(2, SingleClifford::s_dag())],
            neg: vec![(1, p(Letter::Z)), (2, p(Letter::Z))],
        },
    }
}

/// Colour every qubit with one of four colours so that `same` pairs share
/// a colour and every other grid edge joins different colours.
fn four_colouring(n: usize, edges: &[(usize, usize)], same: &[(usize, usize)]) -> Result<Vec<u8>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in same {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root: Vec<usize> = (0..n).map(|q| find(&mut parent, q)).collect();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if same.contains(&(a, b)) || same.contains(&(b, a)) {
            continue;
        }
        let (ra, rb) = (root[a], root[b]);
        if ra == rb {
            return Err(StrobeError::NoColouring);
        }
        adj[ra].push(rb);
        adj[rb].push(ra);
    }
    let mut order: Vec<usize> = Vec::new();
    for &r in &root {
        if !order.contains(&r) {
            order.push(r);
        }
    }
    let mut colour = vec![u8::MAX; n];
    fn solve(k: usize, order: &[usize], adj: &[Vec<usize>], colour: &mut [u8]) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for c in 0..4u8 {
            if adj[v].iter().all(|&w| colour[w] != c) {
                colour[v] = c;
                if solve(k + 1, order, adj, colour) {
                    return true;
                }
            }
        }
        colour[v] = u8::MAX;
        false
    }
    if !solve(0, &order, &adj, &mut colour) {
        return Err(StrobeError::NoColouring);
    }
    Ok(root.iter().map(|&r| colour[r]).collect())
}

fn z_mask(n: usize, colours: &[u8], bit: u8) -> CliffordLayer {
    let mut l = CliffordLayer::identity(n);
    for (q, &c) in colours.iter().enumerate() {
        if c >> bit & 1 == 1 {
            l.set(q, SingleClifford::pauli(Letter::Z));
        }
    }
    l
}

fn layer_on_faces(n: usize, sites: &[[usize; 4]], gates: impl Fn(usize) -> Gates) -> CliffordLayer {
    let mut l = CliffordLayer::identity(n);
    for (k, site) in sites.iter().enumerate() {
        l = site_layer(n, site, &gates(k)).compose(&l);
    }
    l
}

/// Frames of one pass over a face class.
fn pass_frames(code: &CodeLayout, class: (usize, usize), selected: &[(usize, usize)]) -> Result<Option<Frames>> {
    let g = &code.grid;
    let n = g.n_qubits();
    let faces: Vec<(usize, usize)> = selected.iter().copied().filter(|&(i, j)| (i % 2, j % 2) == class).collect();
    if faces.is_empty() {
        return Ok(None);
    }
    let sites: Vec<[usize; 4]> = faces.iter().map(|&(i, j)| g.face_qubits(i, j)).collect();
    let holes: Vec<bool> = faces
        .iter()
        .map(|f| code.holes.iter().any(|h| h.face == *f))
        .collect();
    let edges = g.edges();
    let mut comp = std::collections::BTreeMap::new();
    for which in ['a', 'b', 'c'] {
        let shapes: Vec<ComponentShape> = holes.iter().map(|&h| shape(which, h)).collect();
        let same: Vec<(usize, usize)> = sites
            .iter()
            .zip(&shapes)
            .flat_map(|(s, sh)| sh.pairs.iter().map(move |&(a, b)| (s[a - 1], s[b - 1])))
            .collect();
        let colours = four_colouring(n, &edges, &same)?;
        let (m1, m2) = (z_mask(n, &colours, 0), z_mask(n, &colours, 1));
        let pre = layer_on_faces(n, &sites, |k| shapes[k].pre.clone());
        let neg = layer_on_faces(n, &sites, |k| shapes[k].neg.clone());
        let masks = [CliffordLayer::identity(n), m1.clone(), m2.clone(), m1.compose(&m2)];
        let frames: Frames = masks.iter().map(|m| (m.compose(&pre), step("hx"))).collect();
        comp.insert(which, (wrap(&frames, &neg), frames));
    }
    let (a, na) = (&comp[&'a'].1, &comp[&'a'].0);
    let (b, nb) = (&comp[&'b'].1, &comp[&'b'].0);
    let (c, nc) = (&comp[&'c'].1, &comp[&'c'].0);
    let once = nested_frames(a, b, c, na, nb, nc);
    let p = SingleClifford::pauli;
    let purge = layer_on_faces(n, &sites, |_| vec![(1, p(Letter::Z)), (2, p(Letter::Y))]);
    let mut frames = wrap(&once, &purge);
    frames.extend(once);
    // the sign flip and the Hadamard wrap act first, so they conjugate the
    // face's X⊗4 target directly
    if code.sign == HpSign::Negative {
        frames = wrap(&frames, &layer_on_faces(n, &sites, |_| vec![(1, p(Letter::Z))]));
    }
    let kind = StabilizerKind::of_face(class.0, class.1);
    if kind == StabilizerKind::Plaquette {
        let w = SingleClifford::w();
        frames = wrap(&frames, &layer_on_faces(n, &sites, |_| (1..=4).map(|k| (k, w)).collect()));
    }
    Ok(Some(frames))
}

/// `H_p` on every interior face in 320 steps, scaled by `2⁹ δt³`.
pub fn compile_grid(code: &CodeLayout) -> Result<CompileReport> {
    let g = &code.grid;
    if g.rows < 3 || g.cols < 3 {
        return Err(StrobeError::GridTooSmall(format!(
            "{}x{} grid has fewer than two faces of each type",
            g.rows, g.cols
        )));
    }
    compile_grid_faces(code, &code.grid.faces())
}

/// Like [`compile_grid`] but only for the listed faces; passes whose face
/// class has no listed face are skipped.
pub fn compile_grid_faces(code: &CodeLayout, selected: &[(usize, usize)]) -> Result<CompileReport> {
    let g = &code.grid;
    if g.connectivity != Connectivity::Diagonal {
        return Err(StrobeError::WrongConnectivity("grid construction needs diagonal couplings".into()));
    }
    if code.boundary == Boundary::Torus {
        return Err(StrobeError::Invalid("periodic faces need couplings the grid does not have".into()));
    }
    if let Some(f) = selected.iter().find(|&&(i, j)| i >= g.face_rows() || j >= g.face_cols()) {
        return Err(StrobeError::Invalid(format!("face {f:?} is outside the grid")));
    }
    let n = g.n_qubits();
    let classes = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let passes: Vec<Option<Frames>> = classes
        .par_iter()
        .map(|&c| pass_frames(code, c, selected))
        .collect::<Result<_>>()?;
    let all: Frames = passes.into_iter().flatten().flatten().collect();
    let template = PulseSchedule::new(n).with_hamiltonian("hx", g.system_hamiltonian());
    let mut sched = from_layer_frames(&template, &all);
    sched.cyclic = true;

    let interior: Vec<Pauli> = code
        .enabled()
        .iter()
        .filter(|s| !s.boundary && selected.contains(&(s.face.0 as usize, s.face.1 as usize)))
        .map(|s| s.pauli)
        .collect();
    let sign = if code.sign == HpSign::Negative { -1 } else { 1 };
    let expected = WeightedPauliSum::from_terms(interior.iter().map(|&p| (p, Rational::from_integer(sign))));
    let target = certify(&sched, &expected)?;
    sched.declared_target = Some(target.clone());
    let computed = target
        .at_grade(Grade::dt(3))
        .proportionality(&expected)
        .unwrap_or_default();
    let mut notes = Vec::new();
    if code.boundary == Boundary::Planar {
        notes.push("two-body boundary stabilizers are not part of this schedule".into());
    }
    if !code.holes.is_empty() {
        notes.push(format!("{} hole face(s) compiled to zero at dt^3", code.holes.len()));
    }
    Ok(CompileReport {
        step_count: sched.step_count(),
        schedule: sched,
        declared_target: target,
        expected_residual_order: 4,
        reference: Some(ReferenceConstant {
            label: "grid constant".into(),
            value: Rational::from_integer(512),
            computed,
        }),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_code_terms, GridLayout, Hole, HoleKind};

    fn code(r: usize, c: usize) -> CodeLayout {
        let g = GridLayout::new(r, c, Connectivity::Diagonal).unwrap();
        build_code_terms(&g, Boundary::Open, &[]).unwrap()
    }

    #[test]
    fn four_by_four() {
        let r = compile_grid(&code(4, 4)).unwrap();
        assert_eq!(r.step_count, 320);
        let rf = r.reference.unwrap();
        assert!(rf.matches(), "{rf:?}");
        let flat = r.declared_target.at_grade(Grade::dt(3));
        assert_eq!(flat.len(), 9);
    }

    #[test]
    fn negative_sign_and_holes() {
        let g = GridLayout::new(3, 3, Connectivity::Diagonal).unwrap();
        let c = build_code_terms(&g, Boundary::Open, &[Hole { face: (0, 1), kind: HoleKind::ZCut }])
            .unwrap()
            .with_sign(HpSign::Negative);
        let r = compile_grid(&c).unwrap();
        assert_eq!(r.reference.unwrap().computed, Rational::from_integer(512));
        assert_eq!(r.declared_target.at_grade(Grade::dt(3)).len(), 3);
    }

    #[test]
    fn rejects_small_or_nearest() {
        let g = GridLayout::new(2, 3, Connectivity::Diagonal).unwrap();
        let c = build_code_terms(&g, Boundary::Open, &[]).unwrap();
        assert!(matches!(compile_grid(&c), Err(StrobeError::GridTooSmall(_))));
        let g = GridLayout::new(3, 3, Connectivity::Nearest).unwrap();
        let c = build_code_terms(&g, Boundary::Open, &[]).unwrap();
        assert!(matches!(compile_grid(&c), Err(StrobeError::WrongConnectivity(_))));
    }
}
