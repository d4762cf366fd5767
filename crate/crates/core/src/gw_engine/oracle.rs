//! Brute-force reference: at every curve class, treat all normalized keys with
//! at most `max_points` insertions as unknowns and solve the complete system of
//! WDVV equations whose terms stay within that bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;

use super::{normalize, sub_multisets, with, InvariantKey, Normal, SeedTable};
use crate::chow::{chow, CurveClass, CODIM, NUM_BASIS};
use crate::coeffring::{int, Rational};
use crate::linalg;

pub struct WdvvOracle {
    seeds: SeedTable,
    max_points: usize,
    values: HashMap<InvariantKey, Rational>,
    done: BTreeSet<CurveClass>,
}

fn multisets(lo: u8, len: usize, out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>) {
    out.push(cur.clone());
    if cur.len() == len {
        return;
    }
    for i in lo..NUM_BASIS as u8 {
        cur.push(i);
        multisets(i, len, out, cur);
        cur.pop();
    }
}

enum Lookup {
    Value(Rational),
    Symbol(Rational, InvariantKey),
    Missing,
}

impl WdvvOracle {
    pub fn new(seeds: SeedTable, max_points: usize) -> Self {
        assert!(max_points >= 3);
        WdvvOracle { seeds, max_points, values: HashMap::new(), done: BTreeSet::new() }
    }

    /// Value of a key after `solve` has run on its class.
    pub fn value(&self, key: &InvariantKey) -> Option<Rational> {
        self.seeds.lookup(key).map(|s| s.0).or_else(|| self.values.get(key).cloned())
    }

    /// Solves every effective class below and including `beta`.
    pub fn solve(&mut self, beta: CurveClass) {
        let mut classes: Vec<CurveClass> = beta.splittings().into_iter().map(|s| s.0).filter(|b| !b.is_zero()).collect();
        classes.sort_by_key(|b| (b.a + b.b + b.c, *b));
        for b in classes {
            if self.done.insert(b) {
                self.solve_class(b);
            }
        }
    }

    fn lookup(&self, beta: CurveClass, top: CurveClass, ins: &[usize]) -> Lookup {
        if beta.is_zero() {
            return Lookup::Value(match ins {
                [i, j, k] => chow().triple(*i, *j, *k),
                _ => Rational::zero(),
            });
        }
        match normalize(beta, ins) {
            Normal::Zero => Lookup::Value(Rational::zero()),
            Normal::Key(k, key) => match self.seeds.lookup(&key) {
                Some((v, _)) => Lookup::Value(v * k),
                None if beta == top => Lookup::Symbol(k, key),
                None => match self.values.get(&key) {
                    Some(v) => Lookup::Value(v * k),
                    None => Lookup::Missing,
                },
            },
        }
    }

    /// `F(ij|kl) - F(ik|jl)` as symbol coefficients and a constant, or `None`
    /// if it needs a lower value that is not determined.
    fn equation(
        &self,
        beta: CurveClass,
        ijkl: [u8; 4],
        extra: &[u8],
    ) -> Option<(BTreeMap<InvariantKey, Rational>, Rational)> {
        let [i, j, k, l] = ijkl;
        let g_inv = chow().g_inv_support();
        let mut coeffs: BTreeMap<InvariantKey, Rational> = BTreeMap::new();
        let mut constant = Rational::zero();
        for (sign, p, q, r, t) in [(int(1), i, j, k, l), (int(-1), i, k, j, l)] {
            for (b1, b2) in beta.splittings() {
                for (a, b, mult) in sub_multisets(extra) {
                    for (e, f, g) in &g_inv {
                        let x = self.lookup(b1, beta, &with(&[p, q, *e as u8], &a));
                        let y = self.lookup(b2, beta, &with(&[r, t, *f as u8], &b));
                        let w = &sign * g * &mult;
                        match (x, y) {
                            (Lookup::Value(u), _) | (_, Lookup::Value(u)) if u.is_zero() => {}
                            (Lookup::Value(u), Lookup::Value(v)) => constant += u * v * w,
                            (Lookup::Value(u), Lookup::Symbol(k, key)) | (Lookup::Symbol(k, key), Lookup::Value(u)) => {
                                *coeffs.entry(key).or_insert_with(Rational::zero) += u * k * w;
                            }
                            _ => return None,
                        }
                    }
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Some((coeffs, constant))
    }

    fn solve_class(&mut self, beta: CurveClass) {
        let vd = beta.virtual_dim();
        let mut extras = Vec::new();
        multisets(4, self.max_points - 3, &mut extras, &mut Vec::new());
        let mut eqs = Vec::new();
        for extra in &extras {
            let es: i64 = extra.iter().map(|&e| CODIM[e as usize] as i64).sum();
            let want = vd + 3 + extra.len() as i64 - es;
            for w in 1..NUM_BASIS as u8 {
                for x in w..NUM_BASIS as u8 {
                    for y in x..NUM_BASIS as u8 {
                        for z in y..NUM_BASIS as u8 {
                            let s: i64 = [w, x, y, z].iter().map(|&i| CODIM[i as usize] as i64).sum();
                            if s != want {
                                continue;
                            }
                            for ijkl in [[w, x, y, z], [w, x, z, y]] {
                                if let Some(eq) = self.equation(beta, ijkl, extra) {
                                    if !eq.0.is_empty() {
                                        eqs.push(eq);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let vars: Vec<InvariantKey> =
            eqs.iter().flat_map(|e| e.0.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<&InvariantKey, usize> = vars.iter().enumerate().map(|(n, k)| (k, n)).collect();
        let rows = eqs
            .iter()
            .map(|(c, k)| {
                let mut row = vec![Rational::zero(); vars.len() + 1];
                for (key, v) in c {
                    row[index[key]] = v.clone();
                }
                row[vars.len()] = -k.clone();
                row
            })
            .collect();
        let sol = linalg::solve(rows, vars.len());
        assert!(sol.inconsistent.is_empty(), "WDVV system at {beta} is inconsistent");
        for (n, v) in sol.determined {
            self.values.insert(vars[n].clone(), v);
        }
    }
}
