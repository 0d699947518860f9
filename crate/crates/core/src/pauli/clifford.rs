//! Clifford pulses and Clifford frames acting on Pauli strings.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{Letter, Pauli, WeightedPauliSum};
use crate::error::{Result, StrobeError};

type Signed = (i8, Letter);

/// A single-qubit Clifford gate, identified by its conjugation action
/// `P ↦ C P C†` on `X` and `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SingleClifford {
    x_img: Signed,
    z_img: Signed,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn letter_matrix(l: Letter) -> Matrix2<Complex64> {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match l {
        Letter::I => Matrix2::new(o, z, z, o),
        Letter::X => Matrix2::new(z, o, o, z),
        Letter::Y => Matrix2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        Letter::Z => Matrix2::new(o, z, z, -o),
    }
}

fn match_signed(m: &Matrix2<Complex64>) -> Signed {
    for l in [Letter::X, Letter::Y, Letter::Z] {
        let p = letter_matrix(l);
        if (m - p).norm() < 1e-9 {
            return (1, l);
        }
        if (m + p).norm() < 1e-9 {
            return (-1, l);
        }
    }
    panic!("matrix is not a signed Pauli");
}

fn mul_signed(a: Signed, b: Signed) -> (u8, Signed) {
    // returns i^k * sign * letter
    let (k, p) = Pauli::single(0, a.1).mul_phase(Pauli::single(0, b.1));
    (k, (a.0 * b.0, p.letter(0)))
}

struct Table {
    /// canonical matrix for every element
    matrices: HashMap<SingleClifford, Matrix2<Complex64>>,
}

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let seeds = [
            letter_matrix(Letter::I),
            letter_matrix(Letter::X),
            letter_matrix(Letter::Y),
            letter_matrix(Letter::Z),
            Matrix2::new(c(s2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-s2, 0.0)),
            Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)),
            Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)),
        ];
        let mut matrices = HashMap::new();
        let mut queue: Vec<Matrix2<Complex64>> = seeds.to_vec();
        let mut i = 0;
        while i < queue.len() {
            let m = queue[i];
            i += 1;
            let g = SingleClifford::from_matrix(&m);
            if matrices.contains_key(&g) {
                continue;
            }
            matrices.insert(g, m);
            for s in &seeds[4..6] {
                queue.push(s * m);
            }
        }
        assert_eq!(matrices.len(), 24);
        Table { matrices }
    })
}

impl SingleClifford {
    pub const IDENTITY: SingleClifford = SingleClifford {
        x_img: (1, Letter::X),
        z_img: (1, Letter::Z),
    };

    fn from_matrix(m: &Matrix2<Complex64>) -> Self {
        let ad = m.adjoint();
        SingleClifford {
            x_img: match_signed(&(m * letter_matrix(Letter::X) * ad)),
            z_img: match_signed(&(m * letter_matrix(Letter::Z) * ad)),
        }
    }

    pub fn pauli(l: Letter) -> Self {
        Self::from_matrix(&letter_matrix(l))
    }

    /// Hadamard.
    pub fn w() -> Self {
        SingleClifford {
            x_img: (1, Letter::Z),
            z_img: (1, Letter::X),
        }
    }

    /// Phase gate `diag(1, i)`.
    pub fn s() -> Self {
        SingleClifford {
            x_img: (1, Letter::Y),
            z_img: (1, Letter::Z),
        }
    }

    pub fn s_dag() -> Self {
        Self::s().inverse()
    }

    pub fn all() -> Vec<SingleClifford> {
        let mut v: Vec<_> = table().matrices.keys().copied().collect();
        v.sort_by_key(|g| format!("{g:?}"));
        v
    }

    fn parse_atom(name: &str) -> Result<Self> {
        Ok(match name {
            "I" => Self::IDENTITY,
            "X" => Self::pauli(Letter::X),
            "Y" => Self::pauli(Letter::Y),
            "Z" => Self::pauli(Letter::Z),
            "W" | "H" => Self::w(),
            "S" => Self::s(),
            "Sdg" | "S†" | "Sd" => Self::s_dag(),
            _ => return Err(StrobeError::Invalid(format!("unknown Clifford `{name}`"))),
        })
    }

    /// Parse a gate name or a `.`-separated product such as `W.S`
    /// (leftmost factor applied last).
    pub fn parse(name: &str) -> Result<Self> {
        name.split('.')
            .try_fold(Self::IDENTITY, |acc, atom| Ok(acc.compose(&Self::parse_atom(atom)?)))
    }

    /// Shortest product word over the named gates.
    pub fn name(&self) -> String {
        const ATOMS: [&str; 7] = ["I", "X", "Y", "Z", "W", "S", "Sdg"];
        for a in ATOMS {
            if Self::parse_atom(a).unwrap() == *self {
                return a.to_string();
            }
        }
        for a in &ATOMS[1..] {
            for b in &ATOMS[1..] {
                let word = format!("{a}.{b}");
                if Self::parse(&word).unwrap() == *self {
                    return word;
                }
            }
        }
        for a in &ATOMS[1..] {
            for b in &ATOMS[1..] {
                for c in &ATOMS[1..] {
                    let word = format!("{a}.{b}.{c}");
                    if Self::parse(&word).unwrap() == *self {
                        return word;
                    }
                }
            }
        }
        unreachable!("every single-qubit Clifford is a word of length <= 3")
    }

    /// Canonical unitary, fixed up to a global phase.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        table().matrices[self]
    }

    pub fn is_pauli(&self) -> bool {
        self.x_img.1 == Letter::X && self.z_img.1 == Letter::Z
    }

    /// `C P C†` for a single-qubit letter.
    pub fn conjugate(&self, l: Letter) -> Signed {
        match l {
            Letter::I => (1, Letter::I),
            Letter::X => self.x_img,
            Letter::Z => self.z_img,
            Letter::Y => {
                // Y = i X Z
                let (k, (s, r)) = mul_signed(self.x_img, self.z_img);
                let total = (k + 1) % 4;
                debug_assert!(total % 2 == 0);
                (if total == 2 { -s } else { s }, r)
            }
        }
    }

    /// Composition `self ∘ other`, i.e. the gate `self · other`.
    pub fn compose(&self, other: &SingleClifford) -> SingleClifford {
        let apply = |(s, l): Signed| {
            let (s2, l2) = self.conjugate(l);
            (s * s2, l2)
        };
        SingleClifford {
            x_img: apply(other.x_img),
            z_img: apply(other.z_img),
        }
    }

    pub fn inverse(&self) -> SingleClifford {
        *table()
            .matrices
            .keys()
            .find(|g| g.compose(self) == Self::IDENTITY)
            .expect("group element has an inverse")
    }
}

fn sign_str(s: i8) -> &'static str {
    if s < 0 {
        "-"
    } else {
        ""
    }
}

impl fmt::Display for SingleClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Tensor product of single-qubit Cliffords applied simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordLayer {
    gates: Vec<SingleClifford>,
}

impl CliffordLayer {
    pub fn identity(n: usize) -> Self {
        CliffordLayer {
            gates: vec![SingleClifford::IDENTITY; n],
        }
    }

    pub fn n(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[SingleClifford] {
        &self.gates
    }

    pub fn set(&mut self, qubit: usize, g: SingleClifford) {
        self.gates[qubit] = g;
    }

    pub fn with(mut self, qubits: &[usize], g: SingleClifford) -> Self {
        for &q in qubits {
            self.gates[q] = g.compose(&self.gates[q]);
        }
        self
    }

    /// Layer equal to the Pauli string `p` (global phase dropped).
    pub fn from_pauli(n: usize, p: Pauli) -> Self {
        let mut l = Self::identity(n);
        for q in 0..n {
            let letter = p.letter(q);
            if letter != Letter::I {
                l.gates[q] = SingleClifford::pauli(letter);
            }
        }
        l
    }

    /// Parse `W1 S2 Z4`-style specifications. Repeated qubits compose,
    /// leftmost applied last.
    pub fn parse(n: usize, spec: &str) -> Result<Self> {
        let mut l = Self::identity(n);
        let tokens: Vec<&str> = spec.split_whitespace().collect();
        for tok in tokens.iter().rev() {
            if *tok == "I" {
                continue;
            }
            let split = tok
                .find(|ch: char| ch.is_ascii_digit())
                .ok_or_else(|| StrobeError::Invalid(format!("bad pulse token `{tok}`")))?;
            let g = SingleClifford::parse(&tok[..split])?;
            let q: usize = tok[split..]
                .parse()
                .map_err(|_| StrobeError::Invalid(format!("bad pulse token `{tok}`")))?;
            if q == 0 || q > n {
                return Err(StrobeError::OutsideRegister(tok.to_string()));
            }
            l.gates[q - 1] = g.compose(&l.gates[q - 1]);
        }
        Ok(l)
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| **g != SingleClifford::IDENTITY)
            .map(|(q, g)| format!("{}{}", g.name(), q + 1))
            .collect();
        if parts.is_empty() {
            "I".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn is_identity(&self) -> bool {
        self.gates.iter().all(|g| *g == SingleClifford::IDENTITY)
    }

    /// The layer as a Pauli string, if every factor is a Pauli.
    pub fn as_pauli(&self) -> Option<Pauli> {
        let mut p = Pauli::IDENTITY;
        for (q, g) in self.gates.iter().enumerate() {
            if !g.is_pauli() {
                return None;
            }
            let letter = match (g.x_img.0, g.z_img.0) {
                (1, 1) => Letter::I,
                (1, -1) => Letter::X,
                (-1, 1) => Letter::Z,
                _ => Letter::Y,
            };
            let s = Pauli::single(q, letter);
            p.x |= s.x;
            p.z |= s.z;
        }
        Some(p)
    }

    /// `L P L†`.
    pub fn conjugate(&self, p: Pauli) -> (i8, Pauli) {
        let mut sign = 1i8;
        let mut out = Pauli::IDENTITY;
        let mut sup = p.support();
        while sup != 0 {
            let q = sup.trailing_zeros() as usize;
            sup &= sup - 1;
            let (s, l) = self.gates[q].conjugate(p.letter(q));
            sign *= s;
            let sp = Pauli::single(q, l);
            out.x |= sp.x;
            out.z |= sp.z;
        }
        (sign, out)
    }

    pub fn inverse(&self) -> Self {
        CliffordLayer {
            gates: self.gates.iter().map(|g| g.inverse()).collect(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &CliffordLayer) -> CliffordLayer {
        CliffordLayer {
            gates: self.gates.iter().zip(&other.gates).map(|(a, b)| a.compose(b)).collect(),
        }
    }

    /// Support of non-identity gates.
    pub fn support(&self) -> u64 {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| **g != SingleClifford::IDENTITY)
            .fold(0, |acc, (q, _)| acc | 1u64 << q)
    }
}

impl fmt::Display for CliffordLayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `exp(-i (q π/4) P)` conjugation `R† Q R`.
pub fn pauli_rotation_adjoint_action(p: Pauli, quarter: u8, q: Pauli) -> (i8, Pauli) {
    let quarter = quarter % 8;
    if p.commutes(q) || quarter % 4 == 0 {
        return (1, q);
    }
    match quarter % 4 {
        2 => (-1, q),
        // R† Q R = Q e^{-2iθP}; at θ = π/4 this is -i Q P, at 3π/4 +i Q P
        odd => {
            let (k, r) = q.mul_phase(p);
            let extra = if odd == 1 { 3 } else { 1 };
            let tot = (k + extra) % 4;
            debug_assert!(tot % 2 == 0);
            (if tot == 0 { 1 } else { -1 }, r)
        }
    }
}

/// `u · target · u†` for a pulse layer.
pub fn conjugate_layer(layer: &CliffordLayer, target: &WeightedPauliSum) -> WeightedPauliSum {
    target.map_paulis(|p| layer.conjugate(p))
}

fn check_axis(axis: &WeightedPauliSum) -> Result<()> {
    if axis.mutually_commuting() {
        Ok(())
    } else {
        Err(StrobeError::NonCommutingExponent)
    }
}

/// `u · target · u†` with `u = exp(-i θ A)`, `θ = quarter_turns · π/4`.
/// Exact only when every `θ·a_j` is a multiple of `π/4`.
pub fn conjugate_exponential(
    axis: &WeightedPauliSum,
    quarter_turns: super::Rational,
    target: &WeightedPauliSum,
) -> Result<WeightedPauliSum> {
    check_axis(axis)?;
    let mut out = target.clone();
    for (p, _, a) in axis.iter() {
        let q = a * quarter_turns;
        if !q.is_integer() {
            return Err(StrobeError::InexactPulse);
        }
        // u Q u† = R'† Q R' with R' = exp(+i θ a P)
        let quarter = (-*q.numer()).rem_euclid(8) as u8;
        out = out.map_paulis(|t| pauli_rotation_adjoint_action(p, quarter, t));
    }
    Ok(out)
}

/// Floating-point variant of [`conjugate_exponential`] for arbitrary `θ`.
pub fn conjugate_exponential_numeric(
    axis: &WeightedPauliSum,
    theta: f64,
    target: &[(Pauli, f64)],
) -> Result<Vec<(Pauli, f64)>> {
    use num_traits::ToPrimitive;
    check_axis(axis)?;
    let mut cur: std::collections::BTreeMap<Pauli, f64> = std::collections::BTreeMap::new();
    for &(p, c) in target {
        *cur.entry(p).or_insert(0.0) += c;
    }
    for (p, _, a) in axis.iter() {
        let phi = theta * a.to_f64().unwrap_or(0.0);
        let mut next = std::collections::BTreeMap::new();
        for (&q, &c) in &cur {
            if p.commutes(q) {
                *next.entry(q).or_insert(0.0) += c;
                continue;
            }
            // e^{-iφP} Q e^{iφP} = cos 2φ Q + i sin 2φ QP
            let (k, r) = q.mul_phase(p);
            let s = if (k + 1) % 4 == 0 { 1.0 } else { -1.0 };
            *next.entry(q).or_insert(0.0) += c * (2.0 * phi).cos();
            *next.entry(r).or_insert(0.0) += c * s * (2.0 * phi).sin();
        }
        cur = next;
    }
    Ok(cur.into_iter().filter(|(_, c)| *c != 0.0).collect())
}

/// A general Clifford unitary `C`, stored through the map `P ↦ C† P C`
/// on the generators `X_j`, `Z_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    n: usize,
    x_imgs: Vec<(i8, Pauli)>,
    z_imgs: Vec<(i8, Pauli)>,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        Frame {
            n,
            x_imgs: (0..n).map(|j| (1, Pauli::single(j, Letter::X))).collect(),
            z_imgs: (0..n).map(|j| (1, Pauli::single(j, Letter::Z))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C† P C` for a Hermitian Pauli string.
    pub fn apply(&self, p: Pauli) -> (i8, Pauli) {
        // P = i^{#Y} Π_j X_j^{x_j} Z_j^{z_j}
        let mut phase = (p.x & p.z).count_ones() as u8 % 4;
        let mut acc = Pauli::IDENTITY;
        let mut sign = 1i8;
        let mut sup = p.support();
        while sup != 0 {
            let j = sup.trailing_zeros() as usize;
            sup &= sup - 1;
            if p.x >> j & 1 == 1 {
                let (s, img) = self.x_imgs[j];
                let (k, r) = acc.mul_phase(img);
                phase = (phase + k) % 4;
                sign *= s;
                acc = r;
            }
            if p.z >> j & 1 == 1 {
                let (s, img) = self.z_imgs[j];
                let (k, r) = acc.mul_phase(img);
                phase = (phase + k) % 4;
                sign *= s;
                acc = r;
            }
        }
        debug_assert!(phase % 2 == 0, "Clifford image of Hermitian Pauli must be Hermitian");
        (if phase == 2 { -sign } else { sign }, acc)
    }

    pub fn apply_sum(&self, h: &WeightedPauliSum) -> WeightedPauliSum {
        h.map_paulis(|p| self.apply(p))
    }

    fn update<F: Fn(Pauli) -> (i8, Pauli)>(&mut self, adjoint_action: F) {
        // new map: P ↦ T(Q† P Q)
        let old = self.clone();
        for j in 0..self.n {
            let (s, q) = adjoint_action(Pauli::single(j, Letter::X));
            let (s2, r) = old.apply(q);
            self.x_imgs[j] = (s * s2, r);
            let (s, q) = adjoint_action(Pauli::single(j, Letter::Z));
            let (s2, r) = old.apply(q);
            self.z_imgs[j] = (s * s2, r);
        }
    }

    /// Left-multiply the frame by a pulse layer: `C ← L C`.
    pub fn push_layer(&mut self, layer: &CliffordLayer) {
        let inv = layer.inverse();
        self.update(|p| inv.conjugate(p));
    }

    /// Left-multiply by `exp(-i q π/4 · P)`.
    pub fn push_rotation(&mut self, p: Pauli, quarter: u8) {
        self.update(|q| pauli_rotation_adjoint_action(p, quarter, q));
    }

    /// `self · other` as unitaries.
    pub fn compose(&self, other: &Frame) -> Frame {
        // (AB)† P (AB) = B† (A† P A) B
        let mut out = self.clone();
        for j in 0..self.n {
            let (s, q) = self.x_imgs[j];
            let (s2, r) = other.apply(q);
            out.x_imgs[j] = (s * s2, r);
            let (s, q) = self.z_imgs[j];
            let (s2, r) = other.apply(q);
            out.z_imgs[j] = (s * s2, r);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == Frame::identity(self.n)
    }

    /// If the frame is a Pauli string (up to phase), return it.
    pub fn as_pauli(&self) -> Option<Pauli> {
        let mut p = Pauli::IDENTITY;
        for j in 0..self.n {
            let (sx, px) = self.x_imgs[j];
            let (sz, pz) = self.z_imgs[j];
            if px != Pauli::single(j, Letter::X) || pz != Pauli::single(j, Letter::Z) {
                return None;
            }
            // R† X R = -X iff R has Z or Y at j
            if sx < 0 {
                p.z |= 1 << j;
            }
            if sz < 0 {
                p.x |= 1 << j;
            }
        }
        Some(p)
    }

    pub fn label(&self) -> String {
        if self.is_identity() {
            return "I".into();
        }
        if let Some(p) = self.as_pauli() {
            return p.label();
        }
        let mut parts = Vec::new();
        for j in 0..self.n {
            let (sx, px) = self.x_imgs[j];
            let (sz, pz) = self.z_imgs[j];
            if px != Pauli::single(j, Letter::X) || sx < 0 {
                parts.push(format!("X{}->{}{}", j + 1, sign_str(sx), px));
            }
            if pz != Pauli::single(j, Letter::Z) || sz < 0 {
                parts.push(format!("Z{}->{}{}", j + 1, sign_str(sz), pz));
            }
        }
        format!("Clifford[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_has_24_elements() {
        let all = SingleClifford::all();
        assert_eq!(all.len(), 24);
        for g in &all {
            assert_eq!(g.compose(&g.inverse()), SingleClifford::IDENTITY);
        }
    }

    #[test]
    fn conjugation_matches_matrices() {
        for g in SingleClifford::all() {
            let m = g.matrix();
            for l in [Letter::X, Letter::Y, Letter::Z] {
                let (s, r) = g.conjugate(l);
                let lhs = m * letter_matrix(l) * m.adjoint();
                let rhs = letter_matrix(r) * c(s as f64, 0.0);
                assert!((lhs - rhs).norm() < 1e-12, "{g} on {l:?}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for g in SingleClifford::all() {
            assert_eq!(SingleClifford::parse(&g.name()).unwrap(), g);
        }
        let l = CliffordLayer::parse(3, "W.S1 Sdg3").unwrap();
        assert_eq!(CliffordLayer::parse(3, &l.label()).unwrap(), l);
    }

    #[test]
    fn s_maps_x_to_y() {
        assert_eq!(SingleClifford::s().conjugate(Letter::X), (1, Letter::Y));
        assert_eq!(SingleClifford::s_dag().conjugate(Letter::X), (-1, Letter::Y));
        assert_eq!(SingleClifford::w().conjugate(Letter::Y), (-1, Letter::Y));
    }

    #[test]
    fn layer_parse_and_conjugate() {
        let l = CliffordLayer::parse(4, "W1 W2").unwrap();
        let (s, p) = l.conjugate(Pauli::parse("X1 X2 X3").unwrap());
        assert_eq!((s, p), (1, Pauli::parse("Z1 Z2 X3").unwrap()));
        assert_eq!(CliffordLayer::parse(2, "Z1 Y2").unwrap().as_pauli(), Some(Pauli::parse("Z1 Y2").unwrap()));
    }

    #[test]
    fn frame_tracks_layers() {
        let mut f = Frame::identity(2);
        let l = CliffordLayer::parse(2, "S1 W2").unwrap();
        f.push_layer(&l);
        // C = L, so C† X1 C = S† X S = -Y
        assert_eq!(f.apply(Pauli::parse("X1").unwrap()), (-1, Pauli::parse("Y1").unwrap()));
        f.push_layer(&l.inverse());
        assert!(f.is_identity());
        f.push_layer(&CliffordLayer::parse(2, "X1 Z2").unwrap());
        assert_eq!(f.as_pauli(), Some(Pauli::parse("X1 Z2").unwrap()));
    }

    #[test]
    fn exponential_conjugation_matches_dense() {
        use crate::pauli::{dense_matrix, Rational};
        let axis = WeightedPauliSum::from_labels(&[(1, "X1 X2")]).unwrap();
        let y = WeightedPauliSum::from_labels(&[(1, "Y1")]).unwrap();
        let got = conjugate_exponential(&axis, Rational::from_integer(1), &y).unwrap();
        assert_eq!(got, WeightedPauliSum::from_labels(&[(1, "Z1 X2")]).unwrap());
        let th = std::f64::consts::FRAC_PI_4;
        let xx = dense_matrix(2, Pauli::parse("X1 X2").unwrap());
        let id = nalgebra::DMatrix::<Complex64>::identity(4, 4);
        let u = id * c(th.cos(), 0.0) - xx * c(0.0, th.sin());
        let lhs = &u * dense_matrix(2, Pauli::parse("Y1").unwrap()) * u.adjoint();
        assert!((lhs - got.dense(2, 1.0, 1.0)).norm() < 1e-12);
        let num = conjugate_exponential_numeric(&axis, 0.3, &[(Pauli::parse("Y1").unwrap(), 1.0)]).unwrap();
        let u = nalgebra::DMatrix::<Complex64>::identity(4, 4) * c(0.3f64.cos(), 0.0)
            - dense_matrix(2, Pauli::parse("X1 X2").unwrap()) * c(0.0, 0.3f64.sin());
        let lhs = &u * dense_matrix(2, Pauli::parse("Y1").unwrap()) * u.adjoint();
        let mut rhs = nalgebra::DMatrix::<Complex64>::zeros(4, 4);
        for (p, v) in num {
            rhs += dense_matrix(2, p) * c(v, 0.0);
        }
        assert!((lhs - rhs).norm() < 1e-12);
        let bad = WeightedPauliSum::from_labels(&[(1, "X1"), (1, "Z1")]).unwrap();
        assert!(conjugate_exponential(&bad, Rational::from_integer(1), &y).is_err());
    }

    #[test]
    fn quarter_rotation() {
        // e^{iπ/4 Z} X e^{-iπ/4 Z} = -Y ... check against dense
        let z = Pauli::parse("Z1").unwrap();
        let x = Pauli::parse("X1").unwrap();
        let (s, r) = pauli_rotation_adjoint_action(z, 1, x);
        let th = std::f64::consts::FRAC_PI_4;
        let rot = Matrix2::new(c(th.cos(), -th.sin()), c(0.0, 0.0), c(0.0, 0.0), c(th.cos(), th.sin()));
        let lhs = rot.adjoint() * letter_matrix(Letter::X) * rot;
        assert!((lhs - letter_matrix(r.letter(0)) * c(s as f64, 0.0)).norm() < 1e-12);
    }
}
