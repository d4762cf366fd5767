//! The classical Chow ring `A*(H)` in the fixed basis `T0..T13`.
//!
//! Cup products are found by reducing generator monomials modulo the `q = 0`
//! parts of the quantum relations, normalized by `T4^2 = T13` and `∫ T13 = 1`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffring::{coeff_prefix, int, Rational};
use crate::linalg;
use crate::relation::{standard_relations, Relation};

pub const NUM_BASIS: usize = 14;

/// Codimension of `T_i`.
pub const CODIM: [usize; NUM_BASIS] = [0, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 4];

/// Action of the involution on basis indices.
pub const IOTA: [usize; NUM_BASIS] = [0, 2, 1, 3, 4, 5, 7, 6, 9, 8, 11, 10, 12, 13];

/// Codimension-3 classes paired against the divisors `T1, T2, T3`.
pub const CURVE_PAIRING: [[i64; 3]; 3] = [[1, 0, 1], [0, 1, 1], [1, 1, 1]];

pub const POINT: usize = 13;

/// Generator monomial of the basis classes that are products of `T1..T4`.
fn basis_monomial(i: usize) -> Option<&'static [usize]> {
    Some(match i {
        0 => &[],
        1 => &[1],
        2 => &[2],
        3 => &[3],
        4 => &[4],
        5 => &[1, 2],
        6 => &[1, 1],
        7 => &[2, 2],
        8 => &[1, 3],
        9 => &[2, 3],
        13 => &[4, 4],
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisClass(usize);

impl BasisClass {
    pub fn new(index: usize) -> Option<Self> {
        (index < NUM_BASIS).then_some(BasisClass(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn codim(self) -> usize {
        CODIM[self.0]
    }

    pub fn iota(self) -> Self {
        BasisClass(IOTA[self.0])
    }
}

impl fmt::Display for BasisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// `a C1 + b C2 + c F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct CurveClass {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CurveClass {
    pub const ZERO: CurveClass = CurveClass { a: 0, b: 0, c: 0 };

    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        CurveClass { a, b, c }
    }

    pub fn is_effective(&self) -> bool {
        self.a >= 0 && self.b >= 0 && self.c >= 0
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn iota(&self) -> CurveClass {
        CurveClass::new(self.b, self.a, self.c)
    }

    /// `2a + 2b + 1`, the dimension of the space of unpointed maps.
    pub fn virtual_dim(&self) -> i64 {
        2 * self.a + 2 * self.b + 1
    }

    /// All ordered decompositions `self = b1 + b2` into effective classes.
    pub fn splittings(&self) -> Vec<(CurveClass, CurveClass)> {
        let mut out = Vec::new();
        for a in 0..=self.a {
            for b in 0..=self.b {
                for c in 0..=self.c {
                    let b1 = CurveClass::new(a, b, c);
                    out.push((b1, *self - b1));
                }
            }
        }
        out
    }
}

impl Sub for CurveClass {
    type Output = CurveClass;
    fn sub(self, o: CurveClass) -> CurveClass {
        CurveClass::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Add for CurveClass {
    type Output = CurveClass;
    fn add(self, o: CurveClass) -> CurveClass {
        CurveClass::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl FromStr for CurveClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let v: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad curve class `{s}`: {e}")))
            .collect::<Result<_, _>>()?;
        match v[..] {
            [a, b, c] => Ok(CurveClass::new(a, b, c)),
            _ => Err(format!("curve class `{s}` needs three entries a,b,c")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChowError {
    #[error("T{0} is not a divisor class")]
    NotADivisor(usize),
    #[error("pairing matrix is singular; the cup table is inconsistent")]
    SingularPairing,
    #[error("relations do not reduce degree {degree} to dimension {expected} (got {got})")]
    WrongDimension { degree: usize, expected: usize, got: usize },
    #[error("relation f{0} is not homogeneous at q = 0")]
    Inhomogeneous(u32),
}

/// A rational class in `A*(H)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohVector(pub [Rational; NUM_BASIS]);

impl Default for CohVector {
    fn default() -> Self {
        Self::zero()
    }
}

impl CohVector {
    pub fn zero() -> Self {
        CohVector(std::array::from_fn(|_| Rational::zero()))
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = Rational::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        CohVector(std::array::from_fn(|i| &self.0[i] * k))
    }

    /// Nonzero coordinates.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Codimension if the vector is homogeneous and nonzero.
    pub fn homogeneous_codim(&self) -> Option<usize> {
        let mut it = self.support().map(|(i, _)| CODIM[i]);
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    pub fn iota(&self) -> Self {
        let mut v = Self::zero();
        for (i, c) in self.support() {
            v.0[IOTA[i]] = c.clone();
        }
        v
    }
}

impl Add for &CohVector {
    type Output = CohVector;
    fn add(self, o: &CohVector) -> CohVector {
        CohVector(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl Sub for &CohVector {
    type Output = CohVector;
    fn sub(self, o: &CohVector) -> CohVector {
        CohVector(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl Mul<&Rational> for &CohVector {
    type Output = CohVector;
    fn mul(self, k: &Rational) -> CohVector {
        self.scale(k)
    }
}

impl fmt::Display for CohVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            let sep = match (first, neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            write!(f, "{sep}{}T{i}", coeff_prefix(&mag))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Poincaré pairing and its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMatrix {
    pub g: Vec<Vec<Rational>>,
    pub g_inv: Vec<Vec<Rational>>,
}

/// Exponents of `T1..T4` in a generator monomial.
type Mono = [u8; 4];

fn weight(m: &Mono) -> usize {
    m[0] as usize + m[1] as usize + m[2] as usize + 2 * m[3] as usize
}

fn mono_of(gens: &[usize]) -> Mono {
    let mut m = [0u8; 4];
    for &g in gens {
        if g != 0 {
            m[g - 1] += 1;
        }
    }
    m
}

fn monomials_of_weight(d: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    for e4 in 0..=d / 2 {
        let rest = d - 2 * e4;
        for e1 in (0..=rest).rev() {
            for e2 in (0..=rest - e1).rev() {
                let e3 = rest - e1 - e2;
                out.push([e1 as u8, e2 as u8, e3 as u8, e4 as u8]);
            }
        }
    }
    out
}

/// Reduction of weight-`d` monomials onto a fixed set of standard monomials.
#[derive(Debug, Clone)]
struct Reducer {
    table: HashMap<Mono, Vec<Rational>>,
}

/// Deterministic permutation driven by a tiny xorshift generator.
fn shuffled<T>(mut v: Vec<T>, seed: u64) -> Vec<T> {
    let mut s = seed | 1;
    for i in (1..v.len()).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        v.swap(i, (s % (i as u64 + 1)) as usize);
    }
    v
}

impl Reducer {
    fn build(
        d: usize,
        standard: Vec<Mono>,
        relations: &[(u32, Vec<(Rational, Mono)>)],
        shuffle: Option<u64>,
    ) -> Result<Self, ChowError> {
        let mut others: Vec<Mono> =
            monomials_of_weight(d).into_iter().filter(|m| !standard.contains(m)).collect();
        if let Some(seed) = shuffle {
            others = shuffled(others, seed);
        }
        let cols: Vec<Mono> = others.iter().chain(standard.iter()).copied().collect();
        let index: HashMap<Mono, usize> = cols.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut rows = Vec::new();
        for (_, poly) in relations {
            let w = weight(&poly[0].1);
            if w > d {
                continue;
            }
            for mult in monomials_of_weight(d - w) {
                let mut row = vec![Rational::zero(); cols.len()];
                for (c, m) in poly {
                    let prod = [m[0] + mult[0], m[1] + mult[1], m[2] + mult[2], m[3] + mult[3]];
                    row[index[&prod]] += c;
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        if let Some(seed) = shuffle {
            rows = shuffled(rows, seed.rotate_left(17));
        }
        let pivots = linalg::rref(&mut rows, cols.len());
        let quotient = cols.len() - pivots.len();
        if quotient != standard.len() || pivots.iter().any(|&p| p >= others.len()) {
            return Err(ChowError::WrongDimension { degree: d, expected: standard.len(), got: quotient });
        }
        let mut table = HashMap::new();
        for (r, &p) in pivots.iter().enumerate() {
            let coords = (0..standard.len()).map(|k| -rows[r][others.len() + k].clone()).collect();
            table.insert(cols[p], coords);
        }
        for (k, m) in standard.iter().enumerate() {
            let mut coords = vec![Rational::zero(); standard.len()];
            coords[k] = Rational::one();
            table.insert(*m, coords);
        }
        Ok(Reducer { table })
    }

    fn reduce(&self, m: &Mono) -> &[Rational] {
        &self.table[m]
    }
}

/// The classical ring: cup table, pairing, normal forms.
#[derive(Debug, Clone)]
pub struct Chow {
    deg2: Reducer,
    deg4: Reducer,
    cup: Vec<Vec<CohVector>>,
    pairing: PairingMatrix,
}

const DEG2_STANDARD: [(Mono, usize); 6] = [
    ([0, 0, 0, 1], 4),
    ([1, 1, 0, 0], 5),
    ([2, 0, 0, 0], 6),
    ([0, 2, 0, 0], 7),
    ([1, 0, 1, 0], 8),
    ([0, 1, 1, 0], 9),
];

fn classical_polys(relations: &[Relation]) -> Result<Vec<(u32, Vec<(Rational, Mono)>)>, ChowError> {
    let mut out = Vec::new();
    for r in relations {
        let mut poly: Vec<(Rational, Mono)> = Vec::new();
        for (c, w) in r.classical_part() {
            let m = mono_of(&w);
            match poly.iter_mut().find(|(_, n)| *n == m) {
                Some(slot) => slot.0 += c,
                None => poly.push((c, m)),
            }
        }
        poly.retain(|(c, _)| !c.is_zero());
        if poly.is_empty() {
            continue;
        }
        let w = weight(&poly[0].1);
        if poly.iter().any(|(_, m)| weight(m) != w) {
            return Err(ChowError::Inhomogeneous(r.id));
        }
        out.push((r.id, poly));
    }
    Ok(out)
}

impl Chow {
    /// Builds the ring from the `q = 0` parts of `relations`.
    pub fn from_relations(relations: &[Relation]) -> Result<Self, ChowError> {
        Self::build(relations, None)
    }

    /// Same as [`Chow::from_relations`] but eliminates monomials and relations
    /// in a scrambled order. The result must not depend on `seed`.
    pub fn from_relations_shuffled(relations: &[Relation], seed: u64) -> Result<Self, ChowError> {
        Self::build(relations, Some(seed))
    }

    fn build(relations: &[Relation], shuffle: Option<u64>) -> Result<Self, ChowError> {
        let polys = classical_polys(relations)?;
        let deg2 = Reducer::build(2, DEG2_STANDARD.iter().map(|(m, _)| *m).collect(), &polys, shuffle)?;
        let deg4 = Reducer::build(4, vec![[0, 0, 0, 2]], &polys, shuffle)?;
        let mut chow = Chow {
            deg2,
            deg4,
            cup: Vec::new(),
            pairing: PairingMatrix { g: Vec::new(), g_inv: Vec::new() },
        };
        chow.cup = (0..NUM_BASIS)
            .map(|i| (0..NUM_BASIS).map(|j| chow.cup_basis_uncached(i, j)).collect())
            .collect();
        let g: Vec<Vec<Rational>> = (0..NUM_BASIS)
            .map(|i| (0..NUM_BASIS).map(|j| chow.cup[i][j].0[POINT].clone()).collect())
            .collect();
        let g_inv = linalg::invert(&g).ok_or(ChowError::SingularPairing)?;
        chow.pairing = PairingMatrix { g, g_inv };
        Ok(chow)
    }

    fn integral_of_monomial(&self, m: &Mono) -> Rational {
        self.deg4.reduce(m)[0].clone()
    }

    /// Class of the product of the generators in `gens` (entries in `1..=4`).
    pub fn normal_form(&self, gens: &[usize]) -> CohVector {
        let m = mono_of(gens);
        let mut v = CohVector::zero();
        match weight(&m) {
            0 => v.0[0] = Rational::one(),
            1 => v.0[gens.iter().copied().find(|&g| g != 0).unwrap()] = Rational::one(),
            2 => {
                for (c, (_, idx)) in self.deg2.reduce(&m).iter().zip(DEG2_STANDARD.iter()) {
                    v.0[*idx] = c.clone();
                }
            }
            3 => {
                let p: Vec<Rational> = (0..3)
                    .map(|d| {
                        let mut md = m;
                        md[d] += 1;
                        self.integral_of_monomial(&md)
                    })
                    .collect();
                for (e, c) in resolve_codim3(&p).into_iter().enumerate() {
                    v.0[10 + e] = c;
                }
            }
            4 => v.0[POINT] = self.integral_of_monomial(&m),
            _ => {}
        }
        v
    }

    fn cup_basis_uncached(&self, i: usize, j: usize) -> CohVector {
        if i == 0 {
            return CohVector::basis(j);
        }
        if j == 0 {
            return CohVector::basis(i);
        }
        if CODIM[i] + CODIM[j] > 4 {
            return CohVector::zero();
        }
        if CODIM[i] == 3 || CODIM[j] == 3 {
            let (e, d) = if CODIM[i] == 3 { (i, j) } else { (j, i) };
            let mut v = CohVector::zero();
            v.0[POINT] = int(CURVE_PAIRING[e - 10][d - 1]);
            return v;
        }
        let mut gens = basis_monomial(i).unwrap().to_vec();
        gens.extend_from_slice(basis_monomial(j).unwrap());
        self.normal_form(&gens)
    }

    pub fn cup_basis(&self, i: usize, j: usize) -> &CohVector {
        &self.cup[i][j]
    }

    pub fn cup(&self, x: &CohVector, y: &CohVector) -> CohVector {
        let mut out = CohVector::zero();
        for (i, a) in x.support() {
            for (j, b) in y.support() {
                let k = a * b;
                for (f, c) in self.cup[i][j].support() {
                    out.0[f] += &k * c;
                }
            }
        }
        out
    }

    pub fn integrate(&self, x: &CohVector) -> Rational {
        x.0[POINT].clone()
    }

    /// `∫ T_i T_j T_k`.
    pub fn triple(&self, i: usize, j: usize, k: usize) -> Rational {
        if CODIM[i] + CODIM[j] + CODIM[k] != 4 {
            return Rational::zero();
        }
        self.cup(&self.cup[i][j], &CohVector::basis(k)).0[POINT].clone()
    }

    pub fn pairing(&self) -> &PairingMatrix {
        &self.pairing
    }

    pub fn g_inv(&self, e: usize, f: usize) -> &Rational {
        &self.pairing.g_inv[e][f]
    }

    /// Nonzero entries of the inverse pairing.
    pub fn g_inv_support(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for e in 0..NUM_BASIS {
            for f in 0..NUM_BASIS {
                let c = &self.pairing.g_inv[e][f];
                if !c.is_zero() {
                    out.push((e, f, c.clone()));
                }
            }
        }
        out
    }

    /// The cup table in golden-file format, one line per ordered pair.
    pub fn cup_table_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for i in 0..NUM_BASIS {
            for j in 0..NUM_BASIS {
                let row: Vec<String> = self.cup[i][j].0.iter().map(ToString::to_string).collect();
                lines.push(format!("{i} {j} -> {}", row.join(",")));
            }
        }
        lines
    }
}

/// Coordinates on `T10, T11, T12` of the codim-3 class with the given pairings
/// against `T1, T2, T3`.
fn resolve_codim3(p: &[Rational]) -> Vec<Rational> {
    // Inverse of CURVE_PAIRING, which is symmetric.
    const INV: [[i64; 3]; 3] = [[0, -1, 1], [-1, 0, 1], [1, 1, -1]];
    (0..3).map(|e| (0..3).map(|d| int(INV[e][d]) * &p[d]).sum()).collect()
}

pub fn involution(x: &CohVector) -> CohVector {
    x.iota()
}

/// `∫_β T_i` for a divisor index `i`.
pub fn divisor_degree(i: usize, beta: &CurveClass) -> Result<i64, ChowError> {
    match i {
        1 => Ok(beta.b),
        2 => Ok(beta.a),
        3 => Ok(beta.c),
        _ => Err(ChowError::NotADivisor(i)),
    }
}

/// The shared ring built from the shipped relations.
pub fn chow() -> &'static Chow {
    static CHOW: OnceLock<Chow> = OnceLock::new();
    CHOW.get_or_init(|| Chow::from_relations(&standard_relations()).expect("shipped relations define the ring"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::rat;

    #[test]
    fn graded_dimensions() {
        let mut dims = [0; 5];
        for c in CODIM {
            dims[c] += 1;
        }
        assert_eq!(dims, [1, 3, 6, 3, 1]);
        for d in 0..=4 {
            assert_eq!(CODIM.iter().filter(|&&c| c == d).count(), dims[d]);
        }
    }

    #[test]
    fn normal_form_examples() {
        let ch = chow();
        assert_eq!(ch.normal_form(&[1, 2]), CohVector::basis(5));
        assert_eq!(ch.normal_form(&[4, 4]), CohVector::basis(13));
        assert!(ch.normal_form(&[1, 1, 1]).is_zero());
        assert_eq!(ch.normal_form(&[1, 2, 3, 3]), CohVector::basis(13).scale(&int(2)));
        assert!(ch.normal_form(&[1, 1, 2, 2, 3]).is_zero());
    }

    #[test]
    fn codim_three_generators() {
        let ch = chow();
        assert_eq!(ch.normal_form(&[2, 4]), CohVector::basis(10));
        assert_eq!(ch.normal_form(&[1, 4]), CohVector::basis(11));
        assert_eq!(ch.normal_form(&[3, 4]), CohVector::basis(12));
    }

    #[test]
    fn cup_examples() {
        let ch = chow();
        let x = CohVector::basis(7).scale(&rat(3, 2));
        assert_eq!(ch.cup(&CohVector::basis(0), &x), x);
        assert_eq!(ch.cup_basis(1, 3), &CohVector::basis(8));
        assert_eq!(ch.cup_basis(6, 7), &CohVector::basis(13).scale(&int(2)));
        assert_eq!(ch.integrate(ch.cup_basis(4, 4)), int(1));
        assert_eq!(ch.integrate(ch.cup_basis(3, 10)), int(1));
        assert_eq!(ch.integrate(&CohVector::basis(13)), int(1));
    }

    #[test]
    fn pairing_entries() {
        let g = &chow().pairing().g;
        assert_eq!(g[1][10], int(1));
        assert_eq!(g[1][11], int(0));
        assert_eq!(g[1][12], int(1));
        assert_eq!(g[3][12], int(1));
        assert_eq!(g[0][13], int(1));
        assert_eq!(g[5][5], int(2));
    }

    #[test]
    fn involution_examples() {
        assert_eq!(involution(&CohVector::basis(1)), CohVector::basis(2));
        assert_eq!(involution(&CohVector::basis(12)), CohVector::basis(12));
        assert_eq!(involution(&involution(&CohVector::basis(10))), CohVector::basis(10));
    }

    #[test]
    fn divisor_degrees() {
        assert_eq!(divisor_degree(3, &CurveClass::new(1, 0, 1)), Ok(1));
        assert_eq!(divisor_degree(1, &CurveClass::ZERO), Ok(0));
        assert_eq!(divisor_degree(2, &CurveClass::new(2, 3, 1)), Ok(2));
        assert_eq!(divisor_degree(4, &CurveClass::ZERO), Err(ChowError::NotADivisor(4)));
    }

    #[test]
    fn curve_class_parsing() {
        assert_eq!("1,0,1".parse::<CurveClass>(), Ok(CurveClass::new(1, 0, 1)));
        assert_eq!("(3, 2, 2)".parse::<CurveClass>(), Ok(CurveClass::new(3, 2, 2)));
        assert!("1,2".parse::<CurveClass>().is_err());
    }

    #[test]
    fn rendering() {
        let v = &CohVector::basis(13) + &CohVector::basis(0).scale(&int(-2));
        assert_eq!(v.to_string(), "T13 - 2 T0");
    }
}
