//! Hyperelliptic curve counts on `P1 x P1` from invariants of the Hilbert
//! scheme, through the binomial transform
//! `I(g) = Σ_{h >= g} C(2h+2, h-g) E(h)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use thiserror::Error;

use crate::chow::CurveClass;
use crate::coeffring::Rational;
use crate::gw_engine::{Derivation, Engine, EngineError, InvariantValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("genus {g} is too large for bidegree ({d1},{d2}); the largest is {}", d1 + d2 - 1)]
    GenusTooLarge { d1: u32, d2: u32, g: u32 },
    #[error("bidegree ({d1},{d2}) needs d1, d2 >= 1")]
    BadBidegree { d1: u32, d2: u32 },
    #[error("l = {l} leaves a negative number of T4 insertions (r = {r})")]
    TooManyPairs { l: u32, r: u32 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `(a, b, c) = (d2, d1, d1 + d2 - g - 1)`.
pub fn beta_of(d1: u32, d2: u32, g: u32) -> Result<CurveClass, HyperError> {
    if g + 1 > d1 + d2 {
        return Err(HyperError::GenusTooLarge { d1, d2, g });
    }
    Ok(CurveClass::new(d2 as i64, d1 as i64, (d1 + d2 - g - 1) as i64))
}

/// Whether `d1 d2 - d1 - d2 - 1 < 0`, in which case curves through the
/// generic point configuration are expected not to exist for `l = 0`.
pub fn seed_vanishing(d1: u32, d2: u32) -> bool {
    let (d1, d2) = (d1 as i64, d2 as i64);
    d1 * d2 - d1 - d2 - 1 < 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HyperellipticQuery {
    pub d1: u32,
    pub d2: u32,
    pub l: u32,
}

impl HyperellipticQuery {
    pub fn new(d1: u32, d2: u32, l: u32) -> Result<Self, HyperError> {
        if d1 == 0 || d2 == 0 {
            return Err(HyperError::BadBidegree { d1, d2 });
        }
        let q = HyperellipticQuery { d1, d2, l };
        if 3 * l > q.r() {
            return Err(HyperError::TooManyPairs { l, r: q.r() });
        }
        Ok(q)
    }

    /// Number of points, `2 d1 + 2 d2 + 1`.
    pub fn r(&self) -> u32 {
        2 * self.d1 + 2 * self.d2 + 1
    }

    /// Number of general points, `r - 3l`.
    pub fn k(&self) -> u32 {
        self.r() - 3 * self.l
    }

    pub fn h_max(&self) -> u32 {
        self.d1 + self.d2 - 1
    }

    /// `T13^l T4^k`.
    pub fn insertions(&self) -> Vec<usize> {
        let mut v = vec![13; self.l as usize];
        v.extend(std::iter::repeat_n(4, self.k() as usize));
        v
    }
}

fn binom(n: u32, k: u32) -> Rational {
    Rational::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
}

/// `⟨T13^l T4^k⟩_β(g)` for `g_min <= g <= d1 + d2 - 1`.
pub fn forward_invariants(
    engine: &Engine,
    q: &HyperellipticQuery,
    g_min: u32,
) -> Result<BTreeMap<u32, Derivation>, HyperError> {
    let ins = q.insertions();
    let mut out = BTreeMap::new();
    for g in g_min..=q.h_max() {
        let beta = beta_of(q.d1, q.d2, g)?;
        out.insert(g, engine.derivation(beta, &ins)?);
    }
    Ok(out)
}

/// `I(g) = Σ_{h >= g} C(2h+2, h-g) E(h)` over the keys of `counts`.
pub fn transform(counts: &BTreeMap<u32, Rational>) -> BTreeMap<u32, Rational> {
    counts
        .keys()
        .map(|&g| {
            let s = counts.range(g..).map(|(&h, e)| binom(2 * h + 2, h - g) * e).sum();
            (g, s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticTable {
    pub d1: u32,
    pub d2: u32,
    pub l: u32,
    pub counts: BTreeMap<u32, InvariantValue>,
    pub provenance: BTreeMap<u32, String>,
}

/// Solves the transform for `E` by descending recursion. Entries that need an
/// unknown invariant are unknown.
pub fn invert_counts(invariants: &BTreeMap<u32, InvariantValue>) -> BTreeMap<u32, InvariantValue> {
    let mut out: BTreeMap<u32, InvariantValue> = BTreeMap::new();
    for (&g, ig) in invariants.iter().rev() {
        assert_eq!(binom(2 * g + 2, 0), Rational::from_integer(1.into()));
        let mut v = match ig {
            InvariantValue::Known(x) => x.clone(),
            u => {
                out.insert(g, u.clone());
                continue;
            }
        };
        let mut unknown = None;
        for (&h, e) in out.range(g + 1..) {
            match e {
                InvariantValue::Known(x) => v -= binom(2 * h + 2, h - g) * x,
                InvariantValue::Unknown(r) => {
                    unknown = Some(format!("depends on the genus {h} count: {r}"));
                    break;
                }
            }
        }
        out.insert(g, unknown.map_or(InvariantValue::Known(v), InvariantValue::Unknown));
    }
    out
}

/// The full table for one query.
pub fn hyperelliptic_table(
    engine: &Engine,
    q: &HyperellipticQuery,
    g_min: u32,
) -> Result<HyperellipticTable, HyperError> {
    let inv = forward_invariants(engine, q, g_min)?;
    let values: BTreeMap<u32, InvariantValue> = inv.iter().map(|(&g, d)| (g, d.value.clone())).collect();
    let counts = invert_counts(&values);
    let mut provenance = BTreeMap::new();
    let mut sources = 0u16;
    let mut steps = 0u64;
    for (&g, d) in inv.iter().rev() {
        sources |= d.sources;
        steps = steps.saturating_add(d.steps);
        let text = match &counts[&g] {
            InvariantValue::Unknown(r) => r.clone(),
            InvariantValue::Known(_) => {
                let labels = Derivation { value: d.value.clone(), sources, steps }.provenance();
                let text = if labels.is_empty() { "axioms".to_string() } else { labels.join("+") };
                format!("{text}; {steps} WDVV steps")
            }
        };
        provenance.insert(g, text);
    }
    Ok(HyperellipticTable { d1: q.d1, d2: q.d2, l: q.l, counts, provenance })
}

impl HyperellipticTable {
    pub fn is_all_zero(&self) -> bool {
        self.counts.values().all(|v| matches!(v, InvariantValue::Known(x) if x.is_zero()))
    }

    /// `d1,d2,l,h,count-or-UNKNOWN,provenance` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("d1,d2,l,h,count,provenance\n");
        for (h, v) in &self.counts {
            let count = match v {
                InvariantValue::Known(x) => x.to_string(),
                InvariantValue::Unknown(_) => "UNKNOWN".to_string(),
            };
            let prov = self.provenance.get(h).map_or(String::new(), |p| p.replace('"', "\"\""));
            s.push_str(&format!("{},{},{},{h},{count},\"{prov}\"\n", self.d1, self.d2, self.l));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::int;

    #[test]
    fn classes() {
        assert_eq!(beta_of(3, 2, 2).unwrap(), CurveClass::new(2, 3, 2));
        assert_eq!(beta_of(1, 1, 1).unwrap(), CurveClass::new(1, 1, 0));
        assert_eq!(beta_of(4, 2, 5).unwrap(), CurveClass::new(2, 4, 0));
        assert!(beta_of(1, 1, 2).is_err());
    }

    #[test]
    fn vanishing_rule() {
        assert!(!seed_vanishing(2, 3));
        assert!(seed_vanishing(2, 2));
        for d in 0..20 {
            assert!(seed_vanishing(1, d));
        }
    }

    #[test]
    fn single_term_transform() {
        let mut e = BTreeMap::new();
        for h in 0..=4 {
            e.insert(h, int(if h == 3 { 1 } else { 0 }));
        }
        let i = transform(&e);
        for g in 0..=3 {
            assert_eq!(i[&g], binom(8, 3 - g));
        }
        assert_eq!(i[&4], int(0));
        let back = invert_counts(&i.into_iter().map(|(g, v)| (g, InvariantValue::Known(v))).collect());
        assert_eq!(back[&3], InvariantValue::Known(int(1)));
    }

    #[test]
    fn unknown_propagates_down() {
        let mut i = BTreeMap::new();
        i.insert(0, InvariantValue::Known(int(5)));
        i.insert(1, InvariantValue::Unknown("x".into()));
        i.insert(2, InvariantValue::Known(int(0)));
        let e = invert_counts(&i);
        assert!(e[&2].is_known());
        assert!(!e[&1].is_known());
        assert!(!e[&0].is_known());
    }
}
