//! Dense unitary simulation, matrix logarithm and norms.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::bath::BathModel;
use crate::error::{Result, StrobeError};
use crate::pauli::{dense_matrix, CliffordLayer, Pauli, WeightedPauliSum};
use crate::schedule::{Event, PulseSchedule};

pub type CMat = DMatrix<Complex64>;

pub const DENSE_QUBIT_CAP: usize = 14;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A dense unitary on `n` qubits (qubit 0 is the least significant bit).
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    pub n: usize,
    pub matrix: CMat,
}

impl DenseUnitary {
    pub fn identity(n: usize) -> Self {
        DenseUnitary {
            n,
            matrix: CMat::identity(1 << n, 1 << n),
        }
    }

    /// `‖U†U − I‖` in Frobenius norm.
    pub fn unitarity_defect(&self) -> f64 {
        let d = 1 << self.n;
        (self.matrix.adjoint() * &self.matrix - CMat::identity(d, d)).norm()
    }
}

pub fn check_cap(n: usize) -> Result<()> {
    if n > DENSE_QUBIT_CAP {
        Err(StrobeError::DenseCap {
            qubits: n,
            cap: DENSE_QUBIT_CAP,
        })
    } else {
        Ok(())
    }
}

/// Dense matrix of a real-coefficient Pauli list.
pub fn dense_from_terms(n: usize, terms: &[(Pauli, f64)]) -> CMat {
    let dim = 1usize << n;
    let mut m = CMat::zeros(dim, dim);
    for &(p, c) in terms {
        if c == 0.0 {
            continue;
        }
        m += dense_matrix(n, p) * cx(c);
    }
    m
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t));
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// `exp(-i t Σ c P)` evaluated at the given grade values.
pub fn expm_sum(n: usize, h: &WeightedPauliSum, t: f64, dt: f64, lambda: f64) -> CMat {
    let terms = h.evaluate(dt, lambda);
    expm_terms(n, &terms, t)
}

pub fn expm_terms(n: usize, terms: &[(Pauli, f64)], t: f64) -> CMat {
    let commuting = terms
        .iter()
        .enumerate()
        .all(|(i, (a, _))| terms[i + 1..].iter().all(|(b, _)| a.commutes(*b)));
    let dim = 1usize << n;
    if commuting {
        // product of cos/sin factors is exact and cheaper
        let mut u = CMat::identity(dim, dim);
        for &(p, c) in terms {
            if c == 0.0 || p.is_identity() {
                if p.is_identity() {
                    u *= Complex64::from_polar(1.0, -c * t);
                }
                continue;
            }
            let (s, co) = (c * t).sin_cos();
            let f = CMat::identity(dim, dim) * cx(co) - dense_matrix(n, p) * Complex64::new(0.0, s);
            u = f * u;
        }
        u
    } else {
        expm_hermitian(&dense_from_terms(n, terms), t)
    }
}

/// Left-multiply `u` by a pulse layer acting on the first `layer.n()` qubits.
pub fn apply_layer(u: &mut CMat, layer: &CliffordLayer) {
    let dim = u.nrows();
    for (q, g) in layer.gates().iter().enumerate() {
        if *g == crate::pauli::SingleClifford::IDENTITY {
            continue;
        }
        let m = g.matrix();
        let bit = 1usize << q;
        for r0 in 0..dim {
            if r0 & bit != 0 {
                continue;
            }
            let r1 = r0 | bit;
            for c in 0..u.ncols() {
                let (a, b) = (u[(r0, c)], u[(r1, c)]);
                u[(r0, c)] = m[(0, 0)] * a + m[(0, 1)] * b;
                u[(r1, c)] = m[(1, 0)] * a + m[(1, 1)] * b;
            }
        }
    }
}

/// Dense unitary of a layer on `n` qubits.
pub fn layer_matrix(n: usize, layer: &CliffordLayer) -> CMat {
    let mut u = CMat::identity(1 << n, 1 << n);
    apply_layer(&mut u, layer);
    u
}

/// Exact ordered product of all schedule events. With a bath, every
/// evolution also runs `H_B + λ H_SB` on the combined register.
pub fn simulate_dense(s: &PulseSchedule, bath: Option<&BathModel>, dt: f64, lambda: f64) -> Result<DenseUnitary> {
    let n_bath = bath.map_or(0, |b| b.n_bath);
    let n = s.n_qubits + n_bath;
    check_cap(n)?;
    let extra = match bath {
        Some(b) => b.full_hamiltonian(s.n_qubits)?,
        None => WeightedPauliSum::new(),
    };
    let dim = 1usize << n;
    let mut u = CMat::identity(dim, dim);
    let mut cache: HashMap<(String, u64), CMat> = HashMap::new();
    for e in &s.events {
        match e {
            Event::Pulse(l) => {
                let mut full = CliffordLayer::identity(n);
                for (q, g) in l.gates().iter().enumerate() {
                    full.set(q, *g);
                }
                apply_layer(&mut u, &full);
            }
            Event::Rotation { axis, angle } => {
                let m = expm_sum(n, axis, angle.value(dt), dt, lambda);
                u = m * u;
            }
            Event::Evolve { hamiltonian, duration } => {
                let t = duration.value(dt);
                let key = (hamiltonian.clone(), t.to_bits());
                if !cache.contains_key(&key) {
                    let h = s.hamiltonian(hamiltonian)?.add(&extra);
                    cache.insert(key.clone(), expm_sum(n, &h, t, dt, lambda));
                }
                u = &cache[&key] * u;
            }
        }
    }
    Ok(DenseUnitary { n, matrix: u })
}

/// Time-ordered `T exp(-i ∫₀^T H(t) dt)` with the fourth-order two-point
/// Magnus integrator on `steps` equal steps.
pub fn time_ordered<F: Fn(f64) -> CMat>(h: F, t_total: f64, steps: usize) -> CMat {
    let dim = h(0.0).nrows();
    let mut u = CMat::identity(dim, dim);
    let dt = t_total / steps as f64;
    let off = 3f64.sqrt() / 6.0;
    for k in 0..steps {
        let t0 = k as f64 * dt;
        let h1 = h(t0 + dt * (0.5 - off));
        let h2 = h(t0 + dt * (0.5 + off));
        let comm = &h2 * &h1 - &h1 * &h2;
        let gen = (&h1 + &h2) * cx(dt / 2.0) - comm * Complex64::new(0.0, 3f64.sqrt() / 12.0 * dt * dt);
        u = expm_hermitian(&gen, 1.0) * u;
    }
    u
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// `min_φ ‖A − e^{iφ} B‖`.
pub fn phase_optimized_distance(a: &CMat, b: &CMat) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phi0 = overlap.arg();
    let f = |phi: f64| spectral_norm(&(a - b * Complex64::from_polar(1.0, phi)));
    // golden-section refinement around the trace-optimal phase
    let (mut lo, mut hi) = (phi0 - 0.1, phi0 + 0.1);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = f(phi0);
    for _ in 0..40 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        let (f1, f2) = (f(m1), f(m2));
        best = best.min(f1).min(f2);
        if f1 < f2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best
}

/// Principal matrix logarithm generator `H = i log(U) / T`, decomposed in
/// the Pauli basis.
#[derive(Debug, Clone)]
pub struct ExtractedGenerator {
    pub n: usize,
    /// Identity (global phase) coefficient.
    pub identity: f64,
    pub matrix: CMat,
}

impl ExtractedGenerator {
    /// `Tr(P H) / 2^n`.
    pub fn coefficient(&self, p: Pauli) -> f64 {
        pauli_coefficient(&self.matrix, self.n, p)
    }

    /// All Pauli coefficients above `threshold` (identity excluded).
    pub fn terms(&self, threshold: f64) -> Vec<(Pauli, f64)> {
        pauli_decompose(&self.matrix, self.n, threshold)
    }

    /// Matrix of `H` with the identity component removed.
    pub fn traceless(&self) -> CMat {
        let dim = 1usize << self.n;
        &self.matrix - CMat::identity(dim, dim) * cx(self.identity)
    }
}

pub fn pauli_coefficient(h: &CMat, n: usize, p: Pauli) -> f64 {
    let dim = 1usize << n;
    let y = (p.x & p.z).count_ones();
    let base = [cx(1.0), Complex64::new(0.0, 1.0), cx(-1.0), Complex64::new(0.0, -1.0)][(y % 4) as usize];
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..dim {
        let row = col ^ (p.x as usize);
        let sign = if ((col as u64) & p.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        // Tr(P H) = Σ_col P[row, col] H[col, row]
        acc += base * sign * h[(col, row)];
    }
    acc.re / dim as f64
}

pub fn pauli_decompose(h: &CMat, n: usize, threshold: f64) -> Vec<(Pauli, f64)> {
    let mask = (1u64 << n) - 1;
    let mut out = Vec::new();
    for z in 0..=mask {
        for x in 0..=mask {
            let p = Pauli::new(x, z);
            if p.is_identity() {
                continue;
            }
            let c = pauli_coefficient(h, n, p);
            if c.abs() > threshold {
                out.push((p, c));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn extract_generator(u: &DenseUnitary, t: f64) -> Result<ExtractedGenerator> {
    let dim = 1usize << u.n;
    // strip a global phase first so the spectrum sits near 1
    let tr = u.matrix.trace();
    let alpha = if tr.norm() > 1e-6 * dim as f64 { tr.arg() } else { 0.0 };
    let v = &u.matrix * Complex64::from_polar(1.0, -alpha);
    // U is normal, so its Hermitian and anti-Hermitian parts commute and a
    // generic real combination of them shares U's eigenvectors
    let herm = (&v + v.adjoint()) * cx(0.5);
    let anti = (&v - v.adjoint()) * Complex64::new(0.0, -0.5);
    let eig = SymmetricEigen::new(&herm + anti * cx(0.618_033_988_749_894_8));
    let q = eig.eigenvectors;
    let diag = q.adjoint() * &v * &q;
    let mut logd = CMat::zeros(dim, dim);
    for j in 0..dim {
        let lam = diag[(j, j)];
        let phi = lam.arg();
        if std::f64::consts::PI - phi.abs() < 1e-9 {
            return Err(StrobeError::BranchCut);
        }
        // U = e^{-iHT}: eigenphase -φ of H·T is the negative argument
        logd[(j, j)] = cx(-phi / t);
    }
    let h = &q * logd * q.adjoint();
    let h = (&h + h.adjoint()) * cx(0.5) - CMat::identity(dim, dim) * cx(alpha / t);
    let identity = h.trace().re / dim as f64;
    Ok(ExtractedGenerator {
        n: u.n,
        identity,
        matrix: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_generator() {
        let h = WeightedPauliSum::from_labels(&[(1, "Z1 Z2")]).unwrap();
        let u = DenseUnitary {
            n: 2,
            matrix: expm_sum(2, &h, 0.05, 1.0, 1.0),
        };
        let g = extract_generator(&u, 1.0).unwrap();
        let terms = g.terms(1e-10);
        assert_eq!(terms.len(), 1);
        assert!((terms[0].1 - 0.05).abs() < 1e-12);
    }

    #[test]
    fn empty_schedule_is_identity() {
        let s = PulseSchedule::new(3);
        let u = simulate_dense(&s, None, 0.1, 0.0).unwrap();
        assert!((u.matrix - CMat::identity(8, 8)).norm() < 1e-14);
    }

    #[test]
    fn branch_cut_detected() {
        // spectrum {-1, 1, 1, -1}: no global phase can move it off the cut
        let h = WeightedPauliSum::from_labels(&[(1, "Z1"), (1, "Z2")]).unwrap();
        let u = DenseUnitary {
            n: 2,
            matrix: expm_sum(2, &h, std::f64::consts::FRAC_PI_2, 1.0, 1.0),
        };
        assert_eq!(extract_generator(&u, 1.0).unwrap_err(), StrobeError::BranchCut);
    }

    #[test]
    fn eigen_and_product_exponentials_agree() {
        let terms = [(Pauli::parse("X1 X2").unwrap(), 0.7), (Pauli::parse("Z1 Z2").unwrap(), -0.2)];
        let a = expm_terms(2, &terms, 0.9);
        let b = expm_hermitian(&dense_from_terms(2, &terms), 0.9);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn layer_matrix_matches_kron() {
        let l = CliffordLayer::parse(2, "W1 S2").unwrap();
        let m = layer_matrix(2, &l);
        let w = crate::pauli::SingleClifford::w().matrix();
        let s = crate::pauli::SingleClifford::s().matrix();
        // little endian: qubit 1 is the high bit
        let kron = DMatrix::from_fn(4, 4, |r, c| s[(r >> 1, c >> 1)] * w[(r & 1, c & 1)]);
        assert!((m - kron).norm() < 1e-12);
    }
}
