//! Small quantum product, relation residuals and the `Γ_ijk` generating series.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::chow::{chow, CohVector, CurveClass, CODIM, IOTA, NUM_BASIS};
use crate::coeffring::{coeff_prefix, int, CoeffError, QMonomial, QSeries, Rational};
use crate::gw_engine::{Engine, EngineError, InvariantKey, InvariantValue};
use crate::relation::{Relation, WordKind};

pub fn q_of_beta(beta: CurveClass) -> QMonomial {
    QMonomial::new(beta.b as u32, beta.a as u32, beta.c as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumError {
    #[error("missing invariant {key}: {reason}")]
    Missing { key: String, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A class with coefficients in `Q[q1,q2][[q3]]`, coordinates in the `T` basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCohVector {
    pub coords: [QSeries; NUM_BASIS],
}

impl QCohVector {
    pub fn zero(c_max: u32) -> Self {
        QCohVector { coords: std::array::from_fn(|_| QSeries::zero(c_max)) }
    }

    pub fn basis(i: usize, c_max: u32) -> Self {
        Self::classical(&CohVector::basis(i), c_max)
    }

    pub fn classical(x: &CohVector, c_max: u32) -> Self {
        QCohVector { coords: std::array::from_fn(|i| QSeries::constant(x.0[i].clone(), c_max)) }
    }

    pub fn c_max(&self) -> u32 {
        self.coords[0].c_max()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(QSeries::is_zero)
    }

    /// The classical part, at `q1 = q2 = q3 = 0`.
    pub fn at_q_zero(&self) -> CohVector {
        CohVector(std::array::from_fn(|i| self.coords[i].at_zero()))
    }

    pub fn add_scaled(&mut self, o: &QCohVector, s: &QSeries) {
        for (x, y) in self.coords.iter_mut().zip(&o.coords) {
            if !y.is_zero() {
                *x = &*x + &(y * s);
            }
        }
    }

    pub fn scale(&self, s: &QSeries) -> QCohVector {
        let mut out = QCohVector::zero(self.c_max());
        out.add_scaled(self, s);
        out
    }

    /// Coordinates permuted by the involution and `q1 <-> q2`.
    pub fn iota(&self) -> QCohVector {
        let mut out = QCohVector::zero(self.c_max());
        for (i, s) in self.coords.iter().enumerate() {
            out.coords[IOTA[i]] = s.swap12();
        }
        out
    }

    /// Degree under `deg Tj = codim Tj`, `deg q1 = deg q2 = 2`, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for (i, s) in self.coords.iter().enumerate() {
            for (m, _) in s.terms() {
                let d = CODIM[i] as u32 + m.degree();
                if *deg.get_or_insert(d) != d {
                    return None;
                }
            }
        }
        deg
    }

    /// `(q-monomial, basis index, coefficient)` in rendering order.
    pub fn entries(&self) -> Vec<(QMonomial, usize, Rational)> {
        let mut v: Vec<(QMonomial, usize, Rational)> = self
            .coords
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.terms().map(move |(m, c)| (*m, i, c.clone())))
            .collect();
        v.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        v
    }
}

impl std::ops::Add<&QCohVector> for &QCohVector {
    type Output = QCohVector;
    fn add(self, o: &QCohVector) -> QCohVector {
        let mut out = self.clone();
        out.add_scaled(o, &QSeries::one(self.c_max()));
        out
    }
}

impl std::ops::Sub<&QCohVector> for &QCohVector {
    type Output = QCohVector;
    fn sub(self, o: &QCohVector) -> QCohVector {
        let mut out = self.clone();
        out.add_scaled(o, &QSeries::one(self.c_max()).neg());
        out
    }
}

impl fmt::Display for QCohVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries = self.entries();
        if entries.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, i, c)) in entries.iter().enumerate() {
            let q = if m.is_one() { String::new() } else { format!("{m} ") };
            let body = format!("{}{q}T{i}", coeff_prefix(&c.abs()));
            match (n, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// The small quantum product at the engine's truncation. Basis products are
/// computed once and cached.
pub struct SmallQuantum<'e> {
    engine: &'e Engine,
    c_max: u32,
    cache: Mutex<HashMap<(usize, usize), QCohVector>>,
}

fn known(engine: &Engine, beta: CurveClass, ins: &[usize]) -> Result<Rational, QuantumError> {
    match engine.invariant(beta, ins)? {
        InvariantValue::Known(v) => Ok(v),
        InvariantValue::Unknown(reason) => {
            let key = InvariantKey::new(beta, ins.iter().map(|&i| i as u8).collect());
            Err(QuantumError::Missing { key: key.to_string(), reason })
        }
    }
}

impl<'e> SmallQuantum<'e> {
    pub fn new(engine: &'e Engine) -> Self {
        SmallQuantum { engine, c_max: engine.config().c_max, cache: Mutex::new(HashMap::new()) }
    }

    pub fn c_max(&self) -> u32 {
        self.c_max
    }

    /// `Ti * Tj = Ti ∪ Tj + Σ ⟨Ti Tj Te⟩_β g^{ef} Tf q^β`.
    pub fn basis_product(&self, i: usize, j: usize) -> Result<QCohVector, QuantumError> {
        let key = (i.min(j), i.max(j));
        if let Some(v) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(v.clone());
        }
        let r = chow();
        let mut out = QCohVector::classical(r.cup_basis(i, j), self.c_max);
        let top = CODIM[i] + CODIM[j];
        for s in 0..=(top / 2) as i64 {
            for a in 0..=s {
                for c in 0..=self.c_max as i64 {
                    let beta = CurveClass::new(a, s - a, c);
                    if beta.is_zero() {
                        continue;
                    }
                    let q = q_of_beta(beta);
                    for e in 0..NUM_BASIS {
                        if (top + CODIM[e]) as i64 != 2 * s + 4 {
                            continue;
                        }
                        let v = known(self.engine, beta, &[i, j, e])?;
                        if v.is_zero() {
                            continue;
                        }
                        for f in 0..NUM_BASIS {
                            let g = r.g_inv(e, f);
                            if !g.is_zero() {
                                out.coords[f].add_term(q, &v * g);
                            }
                        }
                    }
                }
            }
        }
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, out.clone());
        Ok(out)
    }

    pub fn product(&self, x: &QCohVector, y: &QCohVector) -> Result<QCohVector, QuantumError> {
        let mut out = QCohVector::zero(self.c_max);
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let p = self.basis_product(i, j)?;
                out.add_scaled(&p, &xi.try_mul(yj)?);
            }
        }
        Ok(out)
    }

    /// Left-associated quantum product of generators; the empty word is `T0`.
    pub fn star_word(&self, word: &[usize]) -> Result<QCohVector, QuantumError> {
        let mut acc = QCohVector::basis(0, self.c_max);
        for &g in word {
            acc = self.product(&acc, &QCohVector::basis(g, self.c_max))?;
        }
        Ok(acc)
    }

    /// Residual of a relation; zero exactly when it holds up to `q3^c_max`.
    pub fn verify_relation(&self, rel: &Relation) -> Result<QCohVector, QuantumError> {
        let mut out = QCohVector::zero(self.c_max);
        for t in &rel.terms {
            let word = match t.kind {
                WordKind::Star => self.star_word(&t.word)?,
                WordKind::Cup => QCohVector::classical(&chow().normal_form(&t.word), self.c_max),
            };
            let mut coef = QSeries::zero(self.c_max);
            let last = if t.q3_tail { self.c_max } else { t.q.e3 };
            for e3 in t.q.e3..=last {
                coef.add_term(QMonomial::new(t.q.e1, t.q.e2, e3), t.coeff.clone());
            }
            out.add_scaled(&word, &coef);
        }
        Ok(out)
    }
}

pub const Y_INDICES: std::ops::Range<usize> = 4..NUM_BASIS;

/// Exponents of `y4..y13`.
pub type YDegree = [u8; 10];

/// Coefficients of `Γ_ijk` in `q^β y^ν`, up to total `y` degree
/// `y_truncation` and `q3` degree `c_max`. Unknown coefficients are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaSeries {
    pub terms: BTreeMap<(CurveClass, YDegree), InvariantValue>,
    pub y_truncation: u32,
    pub c_max: u32,
}

impl GammaSeries {
    pub fn coeff(&self, beta: CurveClass, nu: &YDegree) -> InvariantValue {
        self.terms.get(&(beta, *nu)).cloned().unwrap_or(InvariantValue::Known(Rational::zero()))
    }
}

fn y_degrees(n: u32) -> Vec<YDegree> {
    fn go(pos: usize, left: u32, cur: &mut YDegree, out: &mut Vec<YDegree>) {
        if pos == cur.len() {
            if left == 0 {
                out.push(*cur);
            }
            return;
        }
        for e in 0..=left {
            cur[pos] = e as u8;
            go(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    go(0, n, &mut [0; 10], &mut out);
    out
}

fn factorial(n: u8) -> Rational {
    (1..=n as i64).map(int).product()
}

/// `Γ_ijk = Σ_{β, ν} ⟨T^ν Ti Tj Tk⟩_β / ν! q^β y^ν`, with the classical term at `β = 0`.
pub fn gamma(
    engine: &Engine,
    i: usize,
    j: usize,
    k: usize,
    y_truncation: u32,
    c_max: u32,
) -> Result<GammaSeries, QuantumError> {
    let mut terms = BTreeMap::new();
    let mut out = GammaSeries { terms: BTreeMap::new(), y_truncation, c_max };
    if i == 0 || j == 0 || k == 0 {
        return Ok(out);
    }
    let base = (CODIM[i] + CODIM[j] + CODIM[k]) as i64;
    for n in 0..=y_truncation {
        for nu in y_degrees(n) {
            let mut ins = vec![i, j, k];
            let mut weight = Rational::one();
            let mut codim = base;
            for (p, &e) in nu.iter().enumerate() {
                let idx = Y_INDICES.start + p;
                ins.extend(std::iter::repeat_n(idx, e as usize));
                codim += (CODIM[idx] * e as usize) as i64;
                weight /= factorial(e);
            }
            let twice_s = codim - 4 - n as i64;
            if twice_s < 0 || twice_s % 2 != 0 {
                continue;
            }
            let s = twice_s / 2;
            for a in 0..=s {
                for c in 0..=c_max as i64 {
                    let beta = CurveClass::new(a, s - a, c);
                    let v = if beta.is_zero() {
                        if n > 0 {
                            continue;
                        }
                        InvariantValue::Known(chow().triple(i, j, k))
                    } else {
                        engine.invariant(beta, &ins)?
                    };
                    let v = match v {
                        InvariantValue::Known(x) if x.is_zero() => continue,
                        InvariantValue::Known(x) => InvariantValue::Known(x * &weight),
                        u => u,
                    };
                    terms.insert((beta, nu), v);
                }
            }
        }
    }
    out.terms = terms;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gw_engine::EngineConfig;

    #[test]
    fn q_exponents() {
        assert_eq!(q_of_beta(CurveClass::new(1, 0, 1)), QMonomial::new(0, 1, 1));
        assert_eq!(q_of_beta(CurveClass::new(2, 3, 1)), QMonomial::new(3, 2, 1));
        assert_eq!(q_of_beta(CurveClass::ZERO), QMonomial::ONE);
    }

    #[test]
    fn products_render() {
        let e = Engine::new(EngineConfig { c_max: 2, ..Default::default() });
        let qh = SmallQuantum::new(&e);
        assert_eq!(qh.basis_product(4, 4).unwrap().to_string(), "T13 + 2 q1 q2 q3^2 T0");
        assert_eq!(qh.basis_product(1, 3).unwrap().to_string(), "T8 + 2 q1 q3 T0");
        assert_eq!(qh.basis_product(0, 7).unwrap().to_string(), "T7");
    }

    #[test]
    fn y_degree_count() {
        assert_eq!(y_degrees(0).len(), 1);
        assert_eq!(y_degrees(2).len(), 55);
    }
}
