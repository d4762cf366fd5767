//! Seed invariants and vanishing rules that the recursion starts from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::InvariantKey;
use crate::chow::{chow, CurveClass, CODIM, IOTA};
use crate::coeffring::{int, parse_rational, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeedGroup {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    S8,
    S9,
    Override,
}

impl SeedGroup {
    pub const ALL: [SeedGroup; 10] = [
        SeedGroup::S1,
        SeedGroup::S2,
        SeedGroup::S3,
        SeedGroup::S4,
        SeedGroup::S5,
        SeedGroup::S6,
        SeedGroup::S7,
        SeedGroup::S8,
        SeedGroup::S9,
        SeedGroup::Override,
    ];

    pub fn bit(self) -> u16 {
        1 << (self as u16)
    }

    pub fn label(self) -> &'static str {
        match self {
            SeedGroup::S1 => "s1",
            SeedGroup::S2 => "s2",
            SeedGroup::S3 => "s3",
            SeedGroup::S4 => "s4",
            SeedGroup::S5 => "s5",
            SeedGroup::S6 => "s6",
            SeedGroup::S7 => "s7",
            SeedGroup::S8 => "s8",
            SeedGroup::S9 => "s9",
            SeedGroup::Override => "override",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            SeedGroup::S1 => "fiber multiple covers: <T8>_(0,0,c) = <T9>_(0,0,c) = 4/c^2",
            SeedGroup::S2 => "fiber classes: <T4>, <T5>, <T6>, <T7> vanish on (0,0,c)",
            SeedGroup::S3 => "line classes: <T13>_(1,0,1) = 2, <T4 T10>_(1,0,1) = <T4 T12>_(1,0,1) = 1, others zero",
            SeedGroup::S4 => "three-point invariants on (1,0,c), (0,1,c) vanish for c > 2",
            SeedGroup::S5 => "associativity table for <T5 Te> and <T6 Te> on line classes",
            SeedGroup::S6 => "<T11 T6>_(0,1,c) = 1, 2, 1 for c = 0, 1, 2",
            SeedGroup::S7 => "<T13 Te>_(1,1,1) = integral of T3 Te",
            SeedGroup::S8 => "<T4^m> vanishes for m = 1, 3",
            SeedGroup::S9 => "pure T4 invariants vanish when d1 d2 - d1 - d2 - 1 < 0",
            SeedGroup::Override => "user override",
        }
    }

    pub fn from_label(s: &str) -> Option<SeedGroup> {
        SeedGroup::ALL.into_iter().find(|g| g.label().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for SeedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedEntry {
    pub value: Rational,
    pub citation: String,
    pub group: SeedGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{key} fails the dimension axiom")]
    Dimension { key: String },
    #[error("{key} is seeded twice with different values ({old} and {new})")]
    Conflict { key: String, old: String, new: String },
}

/// Seed values keyed by normalized invariant, together with the rule-based
/// vanishing statements.
#[derive(Debug, Clone, Default)]
pub struct SeedTable {
    entries: BTreeMap<InvariantKey, SeedEntry>,
    rules: BTreeSet<SeedGroup>,
}

fn is_pure_t4(key: &InvariantKey) -> bool {
    key.insertions.iter().all(|&i| i == 4)
}

impl SeedTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The shipped seeds for all fiber degrees up to `c_max`. The bidegree
    /// rule `s9` is included only when `bidegree_vanishing` is set.
    pub fn standard(c_max: u32, bidegree_vanishing: bool) -> Self {
        let mut t = SeedTable::empty();
        let c_max = c_max as i64;
        let b = CurveClass::new;
        let mut put = |beta: CurveClass, ins: &[u8], v: Rational, g: SeedGroup| {
            t.insert_closed(InvariantKey::new(beta, ins.to_vec()), v, g.description().to_string(), g)
                .expect("shipped seeds are consistent");
        };
        for c in 1..=c_max {
            put(b(0, 0, c), &[8], rat(4, c * c), SeedGroup::S1);
            for i in [4, 5, 6, 7] {
                put(b(0, 0, c), &[i], int(0), SeedGroup::S2);
            }
        }
        for c in 0..=c_max {
            put(b(1, 0, c), &[13], int(if c == 1 { 2 } else { 0 }), SeedGroup::S3);
            for e in [10, 11, 12] {
                let v = if c == 1 && e != 11 { 1 } else { 0 };
                put(b(1, 0, c), &[4, e], int(v), SeedGroup::S3);
            }
        }
        for c in 0..=c_max {
            for e in [10u8, 11, 12] {
                let v = match (c, e) {
                    (1, 11) | (1, 12) => 2,
                    _ => 0,
                };
                put(b(0, 1, c), &[5, e], int(v), SeedGroup::S5);
                put(b(1, 0, c), &[6, e], int(0), SeedGroup::S5);
            }
        }
        for (c, v) in [(0, 1), (1, 2), (2, 1)] {
            if c <= c_max {
                put(b(0, 1, c), &[6, 11], int(v), SeedGroup::S6);
            }
        }
        if c_max >= 1 {
            for e in [10u8, 11, 12] {
                put(b(1, 1, 1), &[e, 13], chow().triple(3, e as usize, 0), SeedGroup::S7);
            }
        }
        t.rules.insert(SeedGroup::S4);
        t.rules.insert(SeedGroup::S8);
        if bidegree_vanishing {
            t.rules.insert(SeedGroup::S9);
        }
        t
    }

    /// Removes every entry and rule of the given groups.
    pub fn without(mut self, groups: &BTreeSet<SeedGroup>) -> Self {
        self.entries.retain(|_, e| !groups.contains(&e.group));
        self.rules.retain(|g| !groups.contains(g));
        self
    }

    pub fn has_rule(&self, g: SeedGroup) -> bool {
        self.rules.contains(&g)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&InvariantKey, &SeedEntry)> {
        self.entries.iter()
    }

    /// Inserts `key` and its image under the involution.
    pub fn insert_closed(
        &mut self,
        key: InvariantKey,
        value: Rational,
        citation: String,
        group: SeedGroup,
    ) -> Result<(), SeedError> {
        if !key.dimension_ok() {
            return Err(SeedError::Dimension { key: key.to_string() });
        }
        let image = key.iota();
        for k in [key, image] {
            if let Some(old) = self.entries.get(&k) {
                if old.value != value && group != SeedGroup::Override {
                    return Err(SeedError::Conflict {
                        key: k.to_string(),
                        old: old.value.to_string(),
                        new: value.to_string(),
                    });
                }
            }
            self.entries.insert(k, SeedEntry { value: value.clone(), citation: citation.clone(), group });
        }
        Ok(())
    }

    /// Value and group of a seeded or rule-covered key.
    pub fn lookup(&self, key: &InvariantKey) -> Option<(Rational, SeedGroup)> {
        if let Some(e) = self.entries.get(key) {
            return Some((e.value.clone(), e.group));
        }
        let CurveClass { a, b, c } = key.beta;
        if self.has_rule(SeedGroup::S4) && a + b == 1 && c > 2 && key.insertions.len() <= 3 {
            return Some((Rational::zero(), SeedGroup::S4));
        }
        if is_pure_t4(key) {
            let m = key.insertions.len();
            if self.has_rule(SeedGroup::S8) && (m == 1 || m == 3) {
                return Some((Rational::zero(), SeedGroup::S8));
            }
            if self.has_rule(SeedGroup::S9) && a * b - a - b - 1 < 0 {
                return Some((Rational::zero(), SeedGroup::S9));
            }
        }
        None
    }

    /// Parses override lines `a,b,c | i1 i2 ... | p/q | citation` and adds them.
    pub fn load_overrides(&mut self, text: &str) -> Result<usize, SeedError> {
        let mut n = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let err = |msg: String| SeedError::Parse { line, msg };
            let fields: Vec<&str> = body.splitn(4, '|').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(err("expected `a,b,c | insertions | value | citation`".into()));
            }
            let beta: CurveClass = fields[0].parse().map_err(err)?;
            if !beta.is_effective() || beta.is_zero() {
                return Err(err(format!("{beta} is not a nonzero effective class")));
            }
            let mut ins = Vec::new();
            for tok in fields[1].split_whitespace() {
                let (cls, exp) = tok.split_once('^').unwrap_or((tok, "1"));
                let bad = || err(format!("bad insertion `{tok}`"));
                let i: usize = cls.trim_start_matches(['T', 't']).parse().map_err(|_| bad())?;
                let exp: usize = exp.parse().map_err(|_| bad())?;
                if i >= CODIM.len() || CODIM[i] < 2 {
                    return Err(err(format!("insertion `{tok}` must be a basis class of codim >= 2")));
                }
                ins.extend(std::iter::repeat_n(i as u8, exp));
            }
            let value = parse_rational(fields[2]).ok_or_else(|| err(format!("bad value `{}`", fields[2])))?;
            let citation = fields.get(3).copied().unwrap_or("").to_string();
            self.insert_closed(InvariantKey::new(beta, ins), value, citation, SeedGroup::Override)?;
            n += 1;
        }
        Ok(n)
    }

    /// All entries in override-file format.
    pub fn to_lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(k, e)| format_seed_line(k, &e.value, &format!("{}: {}", e.group, e.citation)))
            .collect()
    }
}

pub fn format_seed_line(key: &InvariantKey, value: &Rational, citation: &str) -> String {
    let ins: Vec<String> = key.insertions.iter().map(|i| i.to_string()).collect();
    let CurveClass { a, b, c } = key.beta;
    format!("{a},{b},{c} | {} | {value} | {citation}", ins.join(" "))
}

/// Index images of an insertion list under the involution.
pub(crate) fn iota_insertions(ins: &[u8]) -> Vec<u8> {
    ins.iter().map(|&i| IOTA[i as usize] as u8).collect()
}
