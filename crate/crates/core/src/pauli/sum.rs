//! Real-weighted sums of Pauli strings, graded by powers of `δt` and `λ`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::Pauli;

pub type Rational = Ratio<i128>;

/// Formal grade of a term: the coefficient multiplies `δt^dt_power · λ^lambda_power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Grade {
    pub dt_power: u32,
    pub lambda_power: u32,
}

impl Grade {
    pub const ZERO: Grade = Grade {
        dt_power: 0,
        lambda_power: 0,
    };

    pub fn new(dt_power: u32, lambda_power: u32) -> Self {
        Grade {
            dt_power,
            lambda_power,
        }
    }

    pub fn dt(dt_power: u32) -> Self {
        Grade::new(dt_power, 0)
    }
}

impl std::ops::Add for Grade {
    type Output = Grade;
    fn add(self, o: Grade) -> Grade {
        Grade::new(self.dt_power + o.dt_power, self.lambda_power + o.lambda_power)
    }
}

/// Hermitian operator `Σ c · δt^a λ^b · P` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedPauliSum {
    terms: BTreeMap<(Pauli, Grade), Rational>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    pauli: Pauli,
    coeff: String,
    #[serde(default)]
    dt_power: u32,
    #[serde(default)]
    lambda_power: u32,
}

fn rat_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: i128 = a.trim().parse().ok()?;
        let d: i128 = b.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Rational::new(n, d))
    } else if let Ok(n) = s.parse::<i128>() {
        Some(Rational::from_integer(n))
    } else {
        let f: f64 = s.parse().ok()?;
        Rational::approximate_float(f)
    }
}

impl WeightedPauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Pauli, Rational)>>(it: I) -> Self {
        let mut s = Self::new();
        for (p, c) in it {
            s.add_term(p, Grade::ZERO, c);
        }
        s
    }

    /// Convenience constructor from integer coefficients and label strings.
    pub fn from_labels(items: &[(i64, &str)]) -> crate::Result<Self> {
        let mut s = Self::new();
        for &(c, label) in items {
            s.add_term(Pauli::parse(label)?, Grade::ZERO, Rational::from_integer(c as i128));
        }
        Ok(s)
    }

    pub fn single(p: Pauli, c: Rational) -> Self {
        Self::from_terms([(p, c)])
    }

    pub fn add_term(&mut self, p: Pauli, g: Grade, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (p, g);
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pauli, Grade, &Rational)> {
        self.terms.iter().map(|(&(p, g), c)| (p, g, c))
    }

    pub fn coeff(&self, p: Pauli, g: Grade) -> Rational {
        self.terms.get(&(p, g)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> u64 {
        self.terms.keys().fold(0, |acc, (p, _)| acc | p.support())
    }

    pub fn extent(&self) -> usize {
        self.terms.keys().map(|(p, _)| p.extent()).max().unwrap_or(0)
    }

    /// Terms at a fixed grade.
    pub fn at_grade(&self, g: Grade) -> WeightedPauliSum {
        let mut out = Self::new();
        for (&(p, gg), c) in &self.terms {
            if gg == g {
                out.terms.insert((p, Grade::ZERO), *c);
            }
        }
        out
    }

    /// Terms with `δt` power `k`, any `λ` power retained.
    pub fn at_dt(&self, k: u32) -> WeightedPauliSum {
        let mut out = Self::new();
        for (&(p, g), c) in &self.terms {
            if g.dt_power == k {
                out.terms.insert((p, g), *c);
            }
        }
        out
    }

    pub fn grades(&self) -> Vec<Grade> {
        let mut g: Vec<Grade> = self.terms.keys().map(|&(_, g)| g).collect();
        g.sort();
        g.dedup();
        g
    }

    pub fn shift_grade(&self, by: Grade) -> WeightedPauliSum {
        WeightedPauliSum {
            terms: self.terms.iter().map(|(&(p, g), c)| ((p, g + by), *c)).collect(),
        }
    }

    pub fn scale(&self, s: Rational) -> WeightedPauliSum {
        if s.is_zero() {
            return Self::new();
        }
        WeightedPauliSum {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    pub fn scale_int(&self, s: i128) -> WeightedPauliSum {
        self.scale(Rational::from_integer(s))
    }

    pub fn add_assign_sum(&mut self, other: &WeightedPauliSum) {
        for (&(p, g), c) in &other.terms {
            self.add_term(p, g, *c);
        }
    }

    pub fn add(&self, other: &WeightedPauliSum) -> WeightedPauliSum {
        let mut out = self.clone();
        out.add_assign_sum(other);
        out
    }

    pub fn sub(&self, other: &WeightedPauliSum) -> WeightedPauliSum {
        let mut out = self.clone();
        out.add_assign_sum(&other.scale_int(-1));
        out
    }

    /// Maps every string through `f(P) = sign · P'`.
    pub fn map_paulis<F: Fn(Pauli) -> (i8, Pauli)>(&self, f: F) -> WeightedPauliSum {
        let mut out = Self::new();
        for (&(p, g), c) in &self.terms {
            let (s, q) = f(p);
            out.add_term(q, g, if s < 0 { -c } else { *c });
        }
        out
    }

    /// Drops the grade information, summing equal strings.
    pub fn flatten(&self) -> WeightedPauliSum {
        let mut out = Self::new();
        for (&(p, _), c) in &self.terms {
            out.add_term(p, Grade::ZERO, *c);
        }
        out
    }

    /// True if every pair of terms commutes.
    pub fn mutually_commuting(&self) -> bool {
        let ps: Vec<Pauli> = self.terms.keys().map(|&(p, _)| p).collect();
        ps.iter()
            .enumerate()
            .all(|(i, a)| ps[i + 1..].iter().all(|b| a.commutes(*b)))
    }

    pub fn commutes_with(&self, other: &WeightedPauliSum) -> bool {
        commutator_i(self, other).is_zero()
    }

    /// Sum of absolute coefficients, a cheap upper bound on the spectral norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum()
    }

    /// Coefficient-wise ratio `self = r · other`, if one exists.
    pub fn proportionality(&self, other: &WeightedPauliSum) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        let mut ratio: Option<Rational> = None;
        if self.terms.keys().any(|k| !other.terms.contains_key(k)) {
            return None;
        }
        for (k, c) in &other.terms {
            let a = self.terms.get(k)?;
            let r = a / c;
            match ratio {
                None => ratio = Some(r),
                Some(prev) if prev != r => return None,
                _ => {}
            }
        }
        ratio
    }

    /// Evaluate the grades at numeric `δt`, `λ` and return `(P, coefficient)`.
    pub fn evaluate(&self, dt: f64, lambda: f64) -> Vec<(Pauli, f64)> {
        let mut acc: BTreeMap<Pauli, f64> = BTreeMap::new();
        for (&(p, g), c) in &self.terms {
            let v = c.to_f64().unwrap_or(0.0) * dt.powi(g.dt_power as i32) * lambda.powi(g.lambda_power as i32);
            *acc.entry(p).or_insert(0.0) += v;
        }
        acc.into_iter().collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let recs: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(&(p, g), c)| TermRecord {
                pauli: p,
                coeff: rat_to_string(c),
                dt_power: g.dt_power,
                lambda_power: g.lambda_power,
            })
            .collect();
        serde_json::to_value(recs).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> crate::Result<Self> {
        let invalid = |m: String| crate::StrobeError::Invalid(m);
        let arr = v.as_array().ok_or_else(|| invalid("expected an array of terms".into()))?;
        let mut out = Self::new();
        for item in arr {
            let coeff = match item.get("coeff") {
                Some(serde_json::Value::String(s)) => parse_rational(s),
                Some(serde_json::Value::Number(n)) => {
                    if let Some(i) = n.as_i64() {
                        Some(Rational::from_integer(i as i128))
                    } else {
                        n.as_f64().and_then(Rational::approximate_float)
                    }
                }
                _ => None,
            }
            .ok_or_else(|| invalid(format!("bad coefficient in {item}")))?;
            let label = item
                .get("pauli")
                .and_then(|p| p.as_str())
                .ok_or_else(|| invalid(format!("missing pauli in {item}")))?;
            let dt = item.get("dt_power").and_then(|x| x.as_u64()).unwrap_or(0) as u32;
            let lam = item.get("lambda_power").and_then(|x| x.as_u64()).unwrap_or(0) as u32;
            out.add_term(Pauli::parse(label)?, Grade::new(dt, lam), coeff);
        }
        Ok(out)
    }

    /// Dense matrix of the flattened sum at the given grade values.
    pub fn dense(&self, n: usize, dt: f64, lambda: f64) -> nalgebra::DMatrix<num_complex::Complex64> {
        let dim = 1usize << n;
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for (p, c) in self.evaluate(dt, lambda) {
            m += super::dense_matrix(n, p) * num_complex::Complex64::new(c, 0.0);
        }
        m
    }
}

impl fmt::Display for WeightedPauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(p, g), c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if !mag.is_one() {
                write!(f, "{}*", rat_to_string(&mag))?;
            }
            if g.dt_power > 0 {
                write!(f, "dt^{}*", g.dt_power)?;
            }
            if g.lambda_power > 0 {
                write!(f, "lam^{}*", g.lambda_power)?;
            }
            write!(f, "{}", p.label())?;
        }
        Ok(())
    }
}

/// `i[A, B]`, which is Hermitian for Hermitian `A`, `B`.
pub fn commutator_i(a: &WeightedPauliSum, b: &WeightedPauliSum) -> WeightedPauliSum {
    let mut out = WeightedPauliSum::new();
    if a.is_zero() || b.is_zero() {
        return out;
    }
    let two = Rational::from_integer(2);
    for (&(p, gp), cp) in &a.terms {
        let sp = p.support();
        for (&(q, gq), cq) in &b.terms {
            if sp & q.support() == 0 || p.commutes(q) {
                continue;
            }
            // PQ = i^k R with k odd; i[P,Q] = 2 i^{k+1} R
            let (k, r) = p.mul_phase(q);
            let s = if k == 1 { -two } else { two };
            out.add_term(r, gp + gq, cp * cq * s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[(i64, &str)]) -> WeightedPauliSum {
        WeightedPauliSum::from_labels(items).unwrap()
    }

    #[test]
    fn basic_commutator() {
        // i[X, Y] = i (2iZ) = -2Z
        assert_eq!(commutator_i(&s(&[(1, "X1")]), &s(&[(1, "Y1")])), s(&[(-2, "Z1")]));
        assert!(commutator_i(&s(&[(1, "Z1 Z2")]), &s(&[(1, "X1 X2")])).is_zero());
    }

    #[test]
    fn plaquette_nested_commutator() {
        let ha = s(&[(1, "Z1 Z2"), (1, "X3 X4")]);
        let hb = s(&[(1, "Y1 X4"), (1, "X2 X3")]);
        let hc = s(&[(1, "Y2 X3"), (1, "X1 X4")]);
        let got = commutator_i(&commutator_i(&ha, &hb), &hc);
        assert_eq!(got, s(&[(4, "X1 X2 X3 X4"), (4, "Y1 Y2 X3 X4")]));
    }

    #[test]
    fn json_roundtrip() {
        let mut a = s(&[(3, "X1 Z2"), (-1, "Y3")]);
        a.add_term(Pauli::parse("Z1").unwrap(), Grade::new(2, 1), Rational::new(1, 3));
        let b = WeightedPauliSum::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn proportionality() {
        let a = s(&[(2, "X1"), (4, "Z2")]);
        let b = s(&[(1, "X1"), (2, "Z2")]);
        assert_eq!(a.proportionality(&b), Some(Rational::from_integer(2)));
        assert_eq!(s(&[(2, "X1"), (3, "Z2")]).proportionality(&b), None);
    }

    #[test]
    fn commutator_matches_dense() {
        let a = s(&[(1, "X1 Y2"), (2, "Z1"), (-1, "Y2 X3")]);
        let b = s(&[(3, "Z2 Z3"), (1, "X1")]);
        let c = commutator_i(&a, &b);
        let (da, db) = (a.dense(3, 1.0, 1.0), b.dense(3, 1.0, 1.0));
        let expect = (&da * &db - &db * &da) * num_complex::Complex64::new(0.0, 1.0);
        assert!((c.dense(3, 1.0, 1.0) - expect).norm() < 1e-10);
    }
}
