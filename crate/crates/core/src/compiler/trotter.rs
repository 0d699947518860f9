//! Trotterized code deformation: shrinking one plaquette term `B₂` while
//! ramping up a single-qubit field `X₁`,
//!
//! ```text
//! H(t) = s·J((1 - t/t₁) B₂ + (t/t₁) X₁ + Σ_{p≠1,2} B_p + Σ_v A_v),
//! ```
//!
//! with `s` the sign of the code Hamiltonian. Every factor of the product
//! formula is a power of a building block whose phase is one unit
//! `h δt³`.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::compile_grid_faces;
use crate::error::{Result, StrobeError};
use crate::lattice::{CodeLayout, HpSign, StabilizerKind};
use crate::pauli::{Grade, Letter, Pauli, Rational, WeightedPauliSum};
use crate::schedule::{Angle, PulseSchedule};
use crate::verifier::{dense_from_terms, expm_hermitian, time_ordered, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrotterVariant {
    /// Left-endpoint slices `m = 0..=N` with exponents `(N-m, N, m, N)`.
    Literal,
    /// Midpoint slices `m = 0..N`, each split symmetrically around `X₁`.
    Symmetric,
}

impl TrotterVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(TrotterVariant::Literal),
            "symmetric" => Ok(TrotterVariant::Symmetric),
            _ => Err(StrobeError::Invalid(format!("unknown Trotter variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    B2,
    /// `Σ_{p≠1,2} B_p`.
    Plaquettes,
    X1,
    /// `Σ_v A_v`.
    Vertices,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrotterFactor {
    pub block: Block,
    pub power: u32,
}

/// Factors of every slice, in time order.
pub fn trotter_plan(n_tr: u32, variant: TrotterVariant) -> Result<Vec<Vec<TrotterFactor>>> {
    if n_tr == 0 {
        return Err(StrobeError::Invalid("N_tr must be positive".into()));
    }
    let f = |block, power| TrotterFactor { block, power };
    let n = n_tr;
    Ok(match variant {
        TrotterVariant::Literal => (0..=n)
            .map(|m| {
                vec![
                    f(Block::Vertices, n),
                    f(Block::X1, m),
                    f(Block::B2, n - m),
                    f(Block::Plaquettes, n),
                ]
            })
            .collect(),
        // unit JΔt/(4N): half slices of the commuting part around X₁
        TrotterVariant::Symmetric => (0..n)
            .map(|m| {
                let half = [
                    f(Block::Vertices, 2 * n),
                    f(Block::B2, 2 * n - 2 * m - 1),
                    f(Block::Plaquettes, 2 * n),
                ];
                let mut slice = half.to_vec();
                slice.push(f(Block::X1, 4 * m + 2));
                slice.extend(half.iter().rev());
                slice
            })
            .collect(),
    })
}

/// Phase `J·(time)` carried by one power of a block.
pub fn trotter_unit(j: f64, t1: f64, n_tr: u32, variant: TrotterVariant) -> f64 {
    let dt = t1 / n_tr as f64;
    match variant {
        TrotterVariant::Literal => j * dt / n_tr as f64,
        TrotterVariant::Symmetric => j * dt / (4 * n_tr) as f64,
    }
}

/// The four operators of the deformation (unsigned).
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationOps {
    pub n: usize,
    pub sign: i8,
    pub b2: WeightedPauliSum,
    pub plaquettes: WeightedPauliSum,
    pub x1: WeightedPauliSum,
    pub vertices: WeightedPauliSum,
    pub b2_face: (usize, usize),
    pub plaquette_faces: Vec<(usize, usize)>,
    pub vertex_faces: Vec<(usize, usize)>,
}

impl DeformationOps {
    pub fn block(&self, b: Block) -> &WeightedPauliSum {
        match b {
            Block::B2 => &self.b2,
            Block::Plaquettes => &self.plaquettes,
            Block::X1 => &self.x1,
            Block::Vertices => &self.vertices,
        }
    }

    fn dense(&self, b: Block) -> CMat {
        let terms: Vec<(Pauli, f64)> = self
            .block(b)
            .iter()
            .map(|(p, _, c)| (p, c.to_f64().unwrap_or(f64::NAN)))
            .collect();
        dense_from_terms(self.n, &terms)
    }
}

pub fn deformation_ops(code: &CodeLayout, b2_face: (usize, usize), x1_qubit: usize) -> Result<DeformationOps> {
    let n = code.grid.n_qubits();
    if x1_qubit >= n {
        return Err(StrobeError::OutsideRegister(format!("qubit {}", x1_qubit + 1)));
    }
    let mut ops = DeformationOps {
        n,
        sign: if code.sign == HpSign::Negative { -1 } else { 1 },
        b2: WeightedPauliSum::new(),
        plaquettes: WeightedPauliSum::new(),
        x1: WeightedPauliSum::single(Pauli::single(x1_qubit, Letter::X), Rational::from_integer(1)),
        vertices: WeightedPauliSum::new(),
        b2_face,
        plaquette_faces: Vec::new(),
        vertex_faces: Vec::new(),
    };
    let one = Rational::from_integer(1);
    for s in code.enabled().into_iter().filter(|s| !s.boundary) {
        let face = (s.face.0 as usize, s.face.1 as usize);
        match s.kind {
            StabilizerKind::Plaquette if face == b2_face => ops.b2.add_term(s.pauli, Grade::ZERO, one),
            StabilizerKind::Plaquette => {
                ops.plaquettes.add_term(s.pauli, Grade::ZERO, one);
                ops.plaquette_faces.push(face);
            }
            StabilizerKind::Vertex => {
                ops.vertices.add_term(s.pauli, Grade::ZERO, one);
                ops.vertex_faces.push(face);
            }
        }
    }
    if ops.b2.is_zero() {
        return Err(StrobeError::Invalid(format!("face {b2_face:?} is not an enabled plaquette")));
    }
    Ok(ops)
}

/// Dense product formula built from exact block exponentials.
pub fn trotter_product_dense(ops: &DeformationOps, plan: &[Vec<TrotterFactor>], unit: f64) -> CMat {
    let blocks = [Block::B2, Block::Plaquettes, Block::X1, Block::Vertices];
    let mats: Vec<CMat> = blocks.iter().map(|&b| ops.dense(b)).collect();
    let dim = 1usize << ops.n;
    let mut u = CMat::identity(dim, dim);
    for slice in plan {
        for f in slice {
            if f.power == 0 {
                continue;
            }
            let k = blocks.iter().position(|&b| b == f.block).unwrap_or(0);
            u = expm_hermitian(&mats[k], ops.sign as f64 * unit * f.power as f64) * u;
        }
    }
    u
}

/// Exact time-ordered deformation over `[0, t₁]`.
pub fn exact_deformation_dense(ops: &DeformationOps, j: f64, t1: f64, steps: usize) -> CMat {
    let (b2, bp, x1, av) = (
        ops.dense(Block::B2),
        ops.dense(Block::Plaquettes),
        ops.dense(Block::X1),
        ops.dense(Block::Vertices),
    );
    let fixed = &bp + &av;
    let s = ops.sign as f64 * j;
    let c = |x: f64| num_complex::Complex64::new(x, 0.0);
    time_ordered(
        |t| (&b2 * c(1.0 - t / t1) + &x1 * c(t / t1) + &fixed) * c(s),
        t1,
        steps,
    )
}

#[derive(Debug, Clone)]
pub struct DeformationReport {
    pub schedule: PulseSchedule,
    pub variant: TrotterVariant,
    pub n_tr: u32,
    pub plan: Vec<Vec<TrotterFactor>>,
    /// Phase per block power, `J Δt / N_tr` (literal) in units of time·J.
    pub unit: f64,
    /// Block constant `h` in `unit = h δt³`.
    pub h: Rational,
    /// Step length that realises the binding.
    pub dt: f64,
}

impl DeformationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "variant": format!("{:?}", self.variant).to_lowercase(),
            "n_tr": self.n_tr,
            "unit": self.unit,
            "h": format!("{}", self.h),
            "dt": self.dt,
            "step_count": self.schedule.step_count(),
            "slices": self.plan.iter().map(|s| s.iter().map(|f| json!([format!("{:?}", f.block), f.power])).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "schedule": self.schedule.to_json(),
        })
    }
}

/// Pulse-level product formula. Each power of a four-body block repeats the
/// grid construction for that face set; `X₁` is a `δt³` rotation.
pub fn compile_deformation(
    code: &CodeLayout,
    b2_face: (usize, usize),
    x1_qubit: usize,
    n_tr: u32,
    j: f64,
    t1: f64,
    variant: TrotterVariant,
) -> Result<DeformationReport> {
    if !(j.is_finite() && t1.is_finite() && j > 0.0 && t1 > 0.0) {
        return Err(StrobeError::Binding(format!("J={j}, t1={t1} must be positive")));
    }
    let ops = deformation_ops(code, b2_face, x1_qubit)?;
    let plan = trotter_plan(n_tr, variant)?;
    let unit = trotter_unit(j, t1, n_tr, variant);

    let b2 = compile_grid_faces(code, &[b2_face])?;
    let h = b2
        .reference
        .as_ref()
        .map(|r| r.computed)
        .ok_or_else(|| StrobeError::Binding("block constant unavailable".into()))?;
    let h_f = h.to_f64().unwrap_or(f64::NAN).abs();
    let dt = (unit / h_f).cbrt();
    if !(dt.is_finite() && dt > 0.0 && dt < 1.0) {
        return Err(StrobeError::Binding(format!(
            "J dt / N_tr = {unit} needs a step of {dt}, outside (0, 1)"
        )));
    }
    let bp = if ops.plaquette_faces.is_empty() {
        None
    } else {
        Some(compile_grid_faces(code, &ops.plaquette_faces)?.schedule)
    };
    let av = if ops.vertex_faces.is_empty() {
        None
    } else {
        Some(compile_grid_faces(code, &ops.vertex_faces)?.schedule)
    };

    let mut s = PulseSchedule::new(ops.n).with_hamiltonian("hx", code.grid.system_hamiltonian());
    for slice in &plan {
        for f in slice {
            if f.power == 0 {
                continue;
            }
            let block = match f.block {
                Block::B2 => Some(&b2.schedule),
                Block::Plaquettes => bp.as_ref(),
                Block::Vertices => av.as_ref(),
                Block::X1 => {
                    let coeff = h * Rational::from_integer(ops.sign as i128 * f.power as i128);
                    let mut axis = WeightedPauliSum::new();
                    axis.add_term(Pauli::single(x1_qubit, Letter::X), Grade::dt(2), coeff);
                    s.rotate(axis, Angle::Steps(1));
                    None
                }
            };
            if let Some(b) = block {
                for _ in 0..f.power {
                    s.extend(b)?;
                }
            }
        }
    }
    s.declared_target = None;
    Ok(DeformationReport {
        schedule: s,
        variant,
        n_tr,
        plan,
        unit,
        h,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_code_terms, Boundary, Connectivity, GridLayout};
    use crate::verifier::{fit_scaling, phase_optimized_distance};

    fn small() -> (CodeLayout, DeformationOps) {
        let g = GridLayout::new(2, 3, Connectivity::Diagonal).unwrap();
        let code = build_code_terms(&g, Boundary::Open, &[]).unwrap().with_sign(HpSign::Negative);
        let ops = deformation_ops(&code, (0, 1), 1).unwrap();
        (code, ops)
    }

    #[test]
    fn exponents_follow_the_product() {
        let plan = trotter_plan(3, TrotterVariant::Literal).unwrap();
        assert_eq!(plan.len(), 4);
        let powers: Vec<u32> = plan[1].iter().map(|f| f.power).collect();
        assert_eq!(powers, vec![3, 1, 2, 3]);
        // one slice: a pure B₂ endpoint and a pure X₁ endpoint
        let one = trotter_plan(1, TrotterVariant::Literal).unwrap();
        assert_eq!(one[0][1].power, 0);
        assert_eq!(one[1][2].power, 0);
    }

    #[test]
    fn symmetric_converges_quadratically() {
        let (_, ops) = small();
        let exact = exact_deformation_dense(&ops, 1.0, 1.0, 400);
        let mut pts = Vec::new();
        for n in [4u32, 8, 16, 32] {
            let plan = trotter_plan(n, TrotterVariant::Symmetric).unwrap();
            let u = trotter_product_dense(&ops, &plan, trotter_unit(1.0, 1.0, n, TrotterVariant::Symmetric));
            pts.push((1.0 / n as f64, phase_optimized_distance(&u, &exact)));
        }
        let fit = fit_scaling(&pts).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.2, "{fit:?}");
    }

    #[test]
    fn pulse_level_matches_product() {
        // residual per block is O(δt⁴) against a δt³ unit
        let (code, ops) = small();
        let rel = |t1: f64| {
            let r = compile_deformation(&code, (0, 1), 1, 1, 1.0, t1, TrotterVariant::Literal).unwrap();
            let u = crate::verifier::simulate_dense(&r.schedule, None, r.dt, 0.0).unwrap();
            let ideal = trotter_product_dense(&ops, &r.plan, r.unit);
            (r.dt, phase_optimized_distance(&u.matrix, &ideal) / r.unit)
        };
        let (dt_a, a) = rel(1e-4);
        let (dt_b, b) = rel(1e-7);
        assert!(a < 0.5 && b < 0.05, "{a} {b}");
        let slope = (a / b).ln() / (dt_a / dt_b).ln();
        assert!((slope - 1.0).abs() < 0.2, "{slope}");
    }

    #[test]
    fn binding_rejects_long_steps() {
        let (code, _) = small();
        let r = compile_deformation(&code, (0, 1), 1, 1, 1.0, 1e4, TrotterVariant::Literal);
        assert!(matches!(r, Err(StrobeError::Binding(_))));
    }
}
