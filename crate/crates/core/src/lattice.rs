//! Grid geometry, the XX system Hamiltonian and surface-code stabilizers.
//!
//! Qubits sit on the sites of a `rows × cols` grid, indexed row-major.
//! Every unit square ("face") of the grid carries one four-body stabilizer;
//! faces alternate in a checkerboard between vertex operators `A_v = X⊗4`
//! (face row + column even) and plaquette operators `B_p = Z⊗4` (odd).
//! Face corners are listed clockwise from the top-left, matching the
//! single-plaquette labelling `1 2 / 4 3`.

use serde_json::{json, Value};

use crate::error::{Result, StrobeError};
use crate::pauli::{check_generators, span_contains, Letter, Pauli, Rational, WeightedPauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Nearest and next-nearest (diagonal) neighbours.
    Diagonal,
    /// Nearest neighbours only.
    Nearest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    pub connectivity: Connectivity,
}

impl GridLayout {
    pub fn new(rows: usize, cols: usize, connectivity: Connectivity) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(StrobeError::DegenerateGrid { rows, cols });
        }
        if rows * cols > crate::pauli::MAX_QUBITS {
            return Err(StrobeError::RegisterTooLarge(rows * cols));
        }
        Ok(GridLayout { rows, cols, connectivity })
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn qubit(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn coords(&self, q: usize) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let dr = ra as f64 - rb as f64;
        let dc = ca as f64 - cb as f64;
        (dr * dr + dc * dc).sqrt()
    }

    /// Coupled pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let q = self.qubit(r, c);
                if c + 1 < self.cols {
                    out.push((q, self.qubit(r, c + 1)));
                }
                if r + 1 < self.rows {
                    out.push((q, self.qubit(r + 1, c)));
                }
                if self.connectivity == Connectivity::Diagonal && r + 1 < self.rows {
                    if c + 1 < self.cols {
                        out.push((q, self.qubit(r + 1, c + 1)));
                    }
                    if c > 0 {
                        out.push((self.qubit(r + 1, c - 1), q));
                    }
                }
            }
        }
        out.iter_mut().for_each(|e| {
            if e.0 > e.1 {
                *e = (e.1, e.0)
            }
        });
        out.sort();
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let dr = ra.abs_diff(rb);
        let dc = ca.abs_diff(cb);
        match self.connectivity {
            Connectivity::Diagonal => dr <= 1 && dc <= 1 && (dr + dc) > 0,
            Connectivity::Nearest => dr + dc == 1,
        }
    }

    /// Unit-coefficient `X_i X_j` on every edge.
    pub fn system_hamiltonian(&self) -> WeightedPauliSum {
        WeightedPauliSum::from_terms(
            self.edges()
                .into_iter()
                .map(|(a, b)| (Pauli::xs(&[a, b]), Rational::from_integer(1))),
        )
    }

    pub fn face_rows(&self) -> usize {
        self.rows - 1
    }

    pub fn face_cols(&self) -> usize {
        self.cols - 1
    }

    /// Corner qubits of open face `(i, j)`, clockwise from the top-left.
    pub fn face_qubits(&self, i: usize, j: usize) -> [usize; 4] {
        [
            self.qubit(i, j),
            self.qubit(i, j + 1),
            self.qubit(i + 1, j + 1),
            self.qubit(i + 1, j),
        ]
    }

    pub fn faces(&self) -> Vec<(usize, usize)> {
        (0..self.face_rows())
            .flat_map(|i| (0..self.face_cols()).map(move |j| (i, j)))
            .collect()
    }

    /// Faces in an odd row and an odd column, counted 1-based from the
    /// top-left corner.
    pub fn odd_odd_faces(&self) -> Vec<(usize, usize)> {
        self.faces().into_iter().filter(|&(i, j)| i % 2 == 0 && j % 2 == 0).collect()
    }

    /// Qubit mask covered by the odd-row, odd-column faces.
    pub fn odd_odd_mask(&self) -> u64 {
        self.odd_odd_faces()
            .iter()
            .flat_map(|&(i, j)| self.face_qubits(i, j))
            .fold(0, |m, q| m | 1u64 << q)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rows": self.rows,
            "cols": self.cols,
            "connectivity": match self.connectivity {
                Connectivity::Diagonal => "diagonal",
                Connectivity::Nearest => "nearest",
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StabilizerKind {
    /// `A_v`, X-type.
    Vertex,
    /// `B_p`, Z-type.
    Plaquette,
}

impl StabilizerKind {
    pub fn of_face(i: usize, j: usize) -> Self {
        if (i + j) % 2 == 0 {
            StabilizerKind::Vertex
        } else {
            StabilizerKind::Plaquette
        }
    }

    pub fn letter(self) -> Letter {
        match self {
            StabilizerKind::Vertex => Letter::X,
            StabilizerKind::Plaquette => Letter::Z,
        }
    }
}

/// Position of a stabilizer: a face `(i, j)`, where boundary faces may sit
/// one step outside the grid.
pub type FaceIndex = (isize, isize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub kind: StabilizerKind,
    pub face: FaceIndex,
    pub pauli: Pauli,
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Interior faces only.
    Open,
    /// Two-body truncated faces along the edges (one logical qubit).
    Planar,
    /// Periodic faces; needs even dimensions of at least 4.
    Torus,
}

/// Hole kind, named after the stabilizer type that is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoleKind {
    /// Removes an `A_v` (X-type) stabilizer.
    XCut,
    /// Removes a `B_p` (Z-type) stabilizer.
    ZCut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hole {
    pub face: (usize, usize),
    pub kind: HoleKind,
}

/// Global sign of `H_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalString {
    pub letter: Letter,
    pub pauli: Pauli,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeLayout {
    pub grid: GridLayout,
    pub boundary: Boundary,
    /// Every stabilizer, including disabled ones.
    pub stabilizers: Vec<Stabilizer>,
    pub holes: Vec<Hole>,
    pub logical_strings: Vec<LogicalString>,
    pub sign: HpSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Detectable,
    StabilizerElement,
    Logical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorClassification {
    pub kind: ErrorKind,
    /// Number of enabled generators anticommuting with the error.
    pub c: usize,
}

fn face_pauli(qubits: &[usize], letter: Letter) -> Pauli {
    Pauli::from_sites(&qubits.iter().map(|&q| (q, letter)).collect::<Vec<_>>())
}

/// Build the code for a grid with the requested boundary and holes.
pub fn build_code_terms(grid: &GridLayout, boundary: Boundary, holes: &[Hole]) -> Result<CodeLayout> {
    let mut stabs = Vec::new();
    match boundary {
        Boundary::Torus => {
            if grid.rows % 2 == 1 || grid.cols % 2 == 1 || grid.rows < 4 || grid.cols < 4 {
                return Err(StrobeError::GridTooSmall("torus needs even dimensions of at least 4".into()));
            }
            for i in 0..grid.rows {
                for j in 0..grid.cols {
                    let (i1, j1) = ((i + 1) % grid.rows, (j + 1) % grid.cols);
                    let qs = [grid.qubit(i, j), grid.qubit(i, j1), grid.qubit(i1, j1), grid.qubit(i1, j)];
                    let kind = StabilizerKind::of_face(i, j);
                    stabs.push(Stabilizer {
                        kind,
                        face: (i as isize, j as isize),
                        pauli: face_pauli(&qs, kind.letter()),
                        boundary: false,
                    });
                }
            }
        }
        Boundary::Open | Boundary::Planar => {
            for (i, j) in grid.faces() {
                let kind = StabilizerKind::of_face(i, j);
                stabs.push(Stabilizer {
                    kind,
                    face: (i as isize, j as isize),
                    pauli: face_pauli(&grid.face_qubits(i, j), kind.letter()),
                    boundary: false,
                });
            }
            if boundary == Boundary::Planar {
                stabs.extend(planar_boundary(grid));
            }
        }
    }
    let mut seen = Vec::new();
    for h in holes {
        if seen.contains(&h.face) {
            return Err(StrobeError::InvalidHole(format!("overlapping holes at face {:?}", h.face)));
        }
        seen.push(h.face);
        let st = stabs
            .iter()
            .find(|s| s.face == (h.face.0 as isize, h.face.1 as isize) && !s.boundary)
            .ok_or_else(|| StrobeError::InvalidHole(format!("no stabilizer at face {:?}", h.face)))?;
        let expect = match st.kind {
            StabilizerKind::Vertex => HoleKind::XCut,
            StabilizerKind::Plaquette => HoleKind::ZCut,
        };
        if expect != h.kind {
            return Err(StrobeError::InvalidHole(format!(
                "face {:?} carries a {:?} stabilizer",
                h.face, st.kind
            )));
        }
    }
    let mut code = CodeLayout {
        grid: grid.clone(),
        boundary,
        stabilizers: stabs,
        holes: holes.to_vec(),
        logical_strings: Vec::new(),
        sign: HpSign::Positive,
    };
    check_generators_commute(&code)?;
    code.logical_strings = find_logicals(&code);
    Ok(code)
}

fn check_generators_commute(code: &CodeLayout) -> Result<()> {
    let en = code.enabled_paulis();
    for (i, a) in en.iter().enumerate() {
        if en[i + 1..].iter().any(|b| !a.commutes(*b)) {
            return Err(StrobeError::NonCommutingGenerators);
        }
    }
    Ok(())
}

/// Two-body halves of the outside faces: X-type on the top and bottom
/// edges, Z-type on the left and right edges.
fn planar_boundary(grid: &GridLayout) -> Vec<Stabilizer> {
    let mut out = Vec::new();
    let (r, c) = (grid.rows as isize, grid.cols as isize);
    let mut push = |face: FaceIndex, qs: [usize; 2], want: StabilizerKind| {
        let kind = StabilizerKind::of_face(face.0.rem_euclid(2) as usize, face.1.rem_euclid(2) as usize);
        if kind == want {
            out.push(Stabilizer {
                kind,
                face,
                pauli: face_pauli(&qs, kind.letter()),
                boundary: true,
            });
        }
    };
    for j in 0..(c - 1) {
        let ju = j as usize;
        push((-1, j), [grid.qubit(0, ju), grid.qubit(0, ju + 1)], StabilizerKind::Vertex);
        push(
            (r - 1, j),
            [grid.qubit(grid.rows - 1, ju), grid.qubit(grid.rows - 1, ju + 1)],
            StabilizerKind::Vertex,
        );
    }
    for i in 0..(r - 1) {
        let iu = i as usize;
        push((i, -1), [grid.qubit(iu, 0), grid.qubit(iu + 1, 0)], StabilizerKind::Plaquette);
        push(
            (i, c - 1),
            [grid.qubit(iu, grid.cols - 1), grid.qubit(iu + 1, grid.cols - 1)],
            StabilizerKind::Plaquette,
        );
    }
    out
}

/// Diagonal walk between two faces of equal parity, returning the shared
/// corners crossed on the way.
fn face_path(grid: &GridLayout, from: (usize, usize), to: (usize, usize)) -> Vec<usize> {
    let (mut i, mut j) = (from.0 as isize, from.1 as isize);
    let (ti, tj) = (to.0 as isize, to.1 as isize);
    let (fr, fc) = (grid.face_rows() as isize, grid.face_cols() as isize);
    let mut qubits = Vec::new();
    while (i, j) != (ti, tj) {
        // once a coordinate is aligned, zig-zag around it
        let di = if ti != i { (ti - i).signum() } else if i + 1 < fr { 1 } else { -1 };
        let dj = if tj != j { (tj - j).signum() } else if j + 1 < fc { 1 } else { -1 };
        let qr = if di > 0 { i + 1 } else { i };
        let qc = if dj > 0 { j + 1 } else { j };
        qubits.push(grid.qubit(qr as usize, qc as usize));
        i += di;
        j += dj;
    }
    qubits
}

fn find_logicals(code: &CodeLayout) -> Vec<LogicalString> {
    let g = &code.grid;
    let enabled = code.enabled_paulis();
    let mut out: Vec<LogicalString> = Vec::new();
    let consider = |p: Pauli, letter: Letter, description: String, out: &mut Vec<LogicalString>| {
        if enabled.iter().all(|s| s.commutes(p)) && !span_contains(&enabled, p) {
            out.push(LogicalString {
                letter,
                pauli: p,
                description,
            });
        }
    };
    for letter in [Letter::X, Letter::Z] {
        for r in 0..g.rows {
            let qs: Vec<usize> = (0..g.cols).map(|c| g.qubit(r, c)).collect();
            consider(face_pauli(&qs, letter), letter, format!("row {}", r + 1), &mut out);
        }
        for c in 0..g.cols {
            let qs: Vec<usize> = (0..g.rows).map(|r| g.qubit(r, c)).collect();
            consider(face_pauli(&qs, letter), letter, format!("column {}", c + 1), &mut out);
        }
    }
    for (a, ha) in code.holes.iter().enumerate() {
        for hb in &code.holes[a + 1..] {
            if ha.kind != hb.kind {
                continue;
            }
            // removing Z faces leaves X chains between them as logicals
            let letter = match ha.kind {
                HoleKind::ZCut => Letter::X,
                HoleKind::XCut => Letter::Z,
            };
            let path = face_path(g, ha.face, hb.face);
            consider(
                face_pauli(&path, letter),
                letter,
                format!("string between holes at {:?} and {:?}", ha.face, hb.face),
                &mut out,
            );
        }
    }
    out
}

impl CodeLayout {
    pub fn is_enabled(&self, s: &Stabilizer) -> bool {
        s.boundary
            || !self
                .holes
                .iter()
                .any(|h| (h.face.0 as isize, h.face.1 as isize) == s.face)
    }

    pub fn enabled(&self) -> Vec<&Stabilizer> {
        self.stabilizers.iter().filter(|s| self.is_enabled(s)).collect()
    }

    pub fn enabled_paulis(&self) -> Vec<Pauli> {
        self.enabled().iter().map(|s| s.pauli).collect()
    }

    pub fn vertex_ops(&self) -> Vec<Pauli> {
        self.enabled()
            .iter()
            .filter(|s| s.kind == StabilizerKind::Vertex)
            .map(|s| s.pauli)
            .collect()
    }

    pub fn plaquette_ops(&self) -> Vec<Pauli> {
        self.enabled()
            .iter()
            .filter(|s| s.kind == StabilizerKind::Plaquette)
            .map(|s| s.pauli)
            .collect()
    }

    pub fn with_sign(mut self, sign: HpSign) -> Self {
        self.sign = sign;
        self
    }

    fn sign_value(&self) -> i128 {
        match self.sign {
            HpSign::Positive => 1,
            HpSign::Negative => -1,
        }
    }

    /// `H_p = ±(Σ A_v + Σ B_p)` over enabled stabilizers.
    pub fn h_p(&self) -> WeightedPauliSum {
        WeightedPauliSum::from_terms(
            self.enabled_paulis()
                .into_iter()
                .map(|p| (p, Rational::from_integer(self.sign_value()))),
        )
    }

    /// Eigenvalue of `H_p` on the code space (+1 eigenspace of every stabilizer).
    pub fn epsilon0(&self) -> i64 {
        self.sign_value() as i64 * self.enabled().len() as i64
    }

    /// Independent enabled generators (redundant products dropped).
    pub fn independent_generators(&self) -> Vec<Pauli> {
        let mut out: Vec<Pauli> = Vec::new();
        for p in self.enabled_paulis() {
            if !span_contains(&out, p) {
                out.push(p);
            }
        }
        debug_assert!(check_generators(&out).is_ok());
        out
    }

    pub fn classify_error(&self, e: Pauli) -> ErrorClassification {
        let en = self.enabled_paulis();
        let c = en.iter().filter(|s| !s.commutes(e)).count();
        let kind = if c > 0 {
            ErrorKind::Detectable
        } else if span_contains(&en, e) {
            ErrorKind::StabilizerElement
        } else {
            ErrorKind::Logical
        };
        ErrorClassification { kind, c }
    }

    pub fn to_json(&self) -> Value {
        let st = |kind: StabilizerKind| -> Vec<String> {
            self.enabled()
                .iter()
                .filter(|s| s.kind == kind)
                .map(|s| s.pauli.label())
                .collect()
        };
        json!({
            "grid": self.grid.to_json(),
            "boundary": format!("{:?}", self.boundary).to_lowercase(),
            "holes": self.holes.iter().map(|h| json!({"face": [h.face.0, h.face.1], "kind": format!("{:?}", h.kind)})).collect::<Vec<_>>(),
            "vertex_ops": st(StabilizerKind::Vertex),
            "plaquette_ops": st(StabilizerKind::Plaquette),
            "logical_strings": self.logical_strings.iter().map(|l| json!({"pauli": l.pauli.label(), "description": l.description})).collect::<Vec<_>>(),
            "sign": format!("{:?}", self.sign).to_lowercase(),
            "epsilon0": self.epsilon0(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(r: usize, c: usize) -> GridLayout {
        GridLayout::new(r, c, Connectivity::Diagonal).unwrap()
    }

    #[test]
    fn edge_counts() {
        assert_eq!(grid(2, 2).system_hamiltonian().len(), 6);
        assert_eq!(grid(3, 3).system_hamiltonian().len(), 20);
        let nn = GridLayout::new(2, 2, Connectivity::Nearest).unwrap();
        assert_eq!(nn.system_hamiltonian().len(), 4);
        assert!(GridLayout::new(1, 4, Connectivity::Nearest).is_err());
    }

    #[test]
    fn distances() {
        let g = grid(3, 3);
        assert_eq!(g.distance(0, 1), 1.0);
        assert!((g.distance(0, 4) - 2f64.sqrt()).abs() < 1e-15);
        for (a, b) in g.edges() {
            assert!(g.has_edge(a, b) && a != b);
        }
    }

    #[test]
    fn open_patch_counts() {
        let code = build_code_terms(&grid(3, 3), Boundary::Open, &[]).unwrap();
        assert_eq!(code.vertex_ops().len(), 2);
        assert_eq!(code.plaquette_ops().len(), 2);
    }

    #[test]
    fn planar_code_has_one_logical_pair() {
        let code = build_code_terms(&grid(3, 3), Boundary::Planar, &[]).unwrap();
        assert_eq!(code.enabled().len(), 8);
        assert_eq!(code.independent_generators().len(), 8);
        assert!(code.logical_strings.iter().any(|l| l.letter == Letter::X));
        assert!(code.logical_strings.iter().any(|l| l.letter == Letter::Z));
    }

    #[test]
    fn torus_classification() {
        let code = build_code_terms(&grid(4, 4), Boundary::Torus, &[]).unwrap();
        let e = Pauli::single(5, Letter::X);
        assert_eq!(code.classify_error(e), ErrorClassification { kind: ErrorKind::Detectable, c: 2 });
        let av = code.vertex_ops()[0];
        assert_eq!(code.classify_error(av).kind, ErrorKind::StabilizerElement);
        for l in &code.logical_strings {
            assert_eq!(code.classify_error(l.pauli).kind, ErrorKind::Logical);
        }
        assert!(!code.logical_strings.is_empty());
    }

    #[test]
    fn holes() {
        let g = grid(5, 5);
        // faces (0,1) and (2,3) are Z-type
        let holes = [
            Hole { face: (0, 1), kind: HoleKind::ZCut },
            Hole { face: (2, 3), kind: HoleKind::ZCut },
        ];
        let code = build_code_terms(&g, Boundary::Open, &holes).unwrap();
        let removed = face_pauli(&g.face_qubits(0, 1), Letter::Z);
        assert!(!code.enabled_paulis().contains(&removed));
        let s = code
            .logical_strings
            .iter()
            .find(|l| l.description.contains("holes"))
            .expect("connecting string");
        assert!(code.enabled_paulis().iter().all(|p| p.commutes(s.pauli)));
        assert!(build_code_terms(&g, Boundary::Open, &[holes[0], holes[0]]).is_err());
        assert!(build_code_terms(&g, Boundary::Open, &[Hole { face: (0, 0), kind: HoleKind::ZCut }]).is_err());
    }

    #[test]
    fn odd_odd_mask_on_even_grid_covers_everything() {
        assert_eq!(grid(4, 4).odd_odd_mask(), 0xffff);
        assert_eq!(grid(3, 4).odd_odd_faces(), vec![(0, 0), (0, 2)]);
    }

    #[test]
    fn epsilon0_sign() {
        let code = build_code_terms(&grid(3, 3), Boundary::Open, &[]).unwrap();
        assert_eq!(code.epsilon0(), 4);
        assert_eq!(code.with_sign(HpSign::Negative).epsilon0(), -4);
    }
}
