//! Textual relations between the generators `T1..T4` of the quantum ring.
//!
//! A relation is a sum of terms `coeff * q^m * word`. Words joined by `*` are
//! quantum products, words joined by `∪` are cup products, and a single
//! generator (or `T0`) is just that class.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coeffring::{coeff_prefix, parse_rational, QMonomial, Rational};

pub const RELATIONS_SOURCE: &str = include_str!("../data/relations.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordKind {
    Star,
    Cup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    /// Lowest `q`-monomial of the term. When `q3_tail` is set the term stands
    /// for the sum of `q * q3^k` over all `k >= 0`.
    pub q: QMonomial,
    pub q3_tail: bool,
    /// Generator indices in `0..=4`; empty means the unit `T0`.
    pub word: Vec<usize>,
    pub kind: WordKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub id: u32,
    pub terms: Vec<Term>,
    /// Set for relations produced by the `T1 <-> T2` symmetry.
    pub mirror_of: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("mirror source f{0} is not defined")]
    MissingMirror(u32),
}

fn swap_gen(g: usize) -> usize {
    match g {
        1 => 2,
        2 => 1,
        g => g,
    }
}

impl Term {
    pub fn is_classical(&self) -> bool {
        self.q.is_one()
    }

    fn mirrored(&self) -> Term {
        Term {
            coeff: self.coeff.clone(),
            q: self.q.swap12(),
            q3_tail: self.q3_tail,
            word: self.word.iter().map(|&g| swap_gen(g)).collect(),
            kind: self.kind,
        }
    }
}

impl Relation {
    pub fn mirrored(&self, id: u32) -> Relation {
        Relation {
            id,
            terms: self.terms.iter().map(Term::mirrored).collect(),
            mirror_of: Some(self.id),
        }
    }

    /// The `q = 0` part as a list of `(coefficient, generator multiset)`.
    pub fn classical_part(&self) -> Vec<(Rational, Vec<usize>)> {
        self.terms
            .iter()
            .filter(|t| t.is_classical())
            .map(|t| {
                let mut w: Vec<usize> = t.word.iter().copied().filter(|&g| g != 0).collect();
                w.sort_unstable();
                (t.coeff.clone(), w)
            })
            .collect()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match self.kind {
            WordKind::Star => "*",
            WordKind::Cup => "∪",
        };
        let word = if self.word.is_empty() {
            "T0".to_string()
        } else {
            self.word.iter().map(|g| format!("T{g}")).collect::<Vec<_>>().join(sep)
        };
        let mut q = String::new();
        if !self.q.is_one() || self.q3_tail {
            let head = QMonomial::new(self.q.e1, self.q.e2, 0);
            if !head.is_one() {
                q.push_str(&head.to_string());
                q.push(' ');
            }
            match (self.q.e3, self.q3_tail) {
                (c, true) => q.push_str(&format!("q3^{{{c}..}} ")),
                (0, false) => {}
                (1, false) => q.push_str("q3 "),
                (c, false) => q.push_str(&format!("q3^{c} ")),
            }
        }
        write!(f, "{}{q}{word}", coeff_prefix(&self.coeff))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.id)?;
        for (n, t) in self.terms.iter().enumerate() {
            let mut t = t.clone();
            let neg = t.coeff.is_negative();
            if neg {
                t.coeff = -t.coeff;
            }
            match (n, neg) {
                (0, false) => write!(f, " {t}")?,
                (0, true) => write!(f, " -{t}")?,
                (_, false) => write!(f, " + {t}")?,
                (_, true) => write!(f, " - {t}")?,
            }
        }
        Ok(())
    }
}

fn parse_q(tok: &str) -> Option<(QMonomial, bool)> {
    let (var, exp) = match tok.split_once('^') {
        Some((v, e)) => (v, Some(e)),
        None => (tok, None),
    };
    let (e, tail) = match exp {
        None => (1, false),
        Some(e) if e.starts_with('{') && e.ends_with("..}") => {
            (e[1..e.len() - 3].parse().ok()?, true)
        }
        Some(e) => (e.parse().ok()?, false),
    };
    let m = match var {
        "q1" if !tail => QMonomial::new(e, 0, 0),
        "q2" if !tail => QMonomial::new(0, e, 0),
        "q3" => QMonomial::new(0, 0, e),
        _ => return None,
    };
    Some((m, tail))
}

fn parse_word(tok: &str) -> Option<(Vec<usize>, WordKind)> {
    let star = tok.contains('*');
    let cup = tok.contains('∪');
    if star && cup {
        return None;
    }
    let kind = if star { WordKind::Star } else { WordKind::Cup };
    let mut word = Vec::new();
    for part in tok.split(['*', '∪']) {
        let g: usize = part.strip_prefix('T')?.parse().ok()?;
        if g > 4 {
            return None;
        }
        if g != 0 {
            word.push(g);
        }
    }
    Some((word, kind))
}

fn parse_line(id: u32, body: &str, line: usize) -> Result<Relation, RelationParseError> {
    let err = |msg: String| RelationParseError::Syntax { line, msg };
    let mut terms = Vec::new();
    let mut sign = Rational::one();
    let mut coeff: Option<Rational> = None;
    let mut q = QMonomial::ONE;
    let mut tail = false;
    for tok in body.split_whitespace() {
        match tok {
            "+" => sign = Rational::one(),
            "-" => sign = -Rational::one(),
            t if t.starts_with('T') => {
                let (word, kind) = parse_word(t).ok_or_else(|| err(format!("bad word `{t}`")))?;
                let c = coeff.take().unwrap_or_else(Rational::one) * &sign;
                if !c.is_zero() {
                    terms.push(Term { coeff: c, q, q3_tail: tail, word, kind });
                }
                sign = Rational::one();
                q = QMonomial::ONE;
                tail = false;
            }
            t if t.starts_with('q') => {
                let (m, t_tail) = parse_q(t).ok_or_else(|| err(format!("bad q factor `{t}`")))?;
                q = q.mul(&m);
                tail |= t_tail;
            }
            t => {
                if coeff.is_some() {
                    return Err(err(format!("two coefficients before `{t}`")));
                }
                coeff = Some(parse_rational(t).ok_or_else(|| err(format!("bad coefficient `{t}`")))?);
            }
        }
    }
    if coeff.is_some() || !q.is_one() {
        return Err(err("dangling coefficient at end of relation".into()));
    }
    if terms.is_empty() {
        return Err(err("empty relation".into()));
    }
    Ok(Relation { id, terms, mirror_of: None })
}

/// Parses a relation file. Mirrored relations are appended with consecutive ids.
pub fn parse_relations(src: &str) -> Result<Vec<Relation>, RelationParseError> {
    let mut rels = Vec::new();
    let mut mirrors = Vec::new();
    for (n, raw) in src.lines().enumerate() {
        let line = n + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (head, body) = text
            .split_once(':')
            .ok_or_else(|| RelationParseError::Syntax { line, msg: "missing `:`".into() })?;
        if head.trim() == "mirrors" {
            for t in body.split_whitespace() {
                mirrors.push(t.parse::<u32>().map_err(|_| RelationParseError::Syntax {
                    line,
                    msg: format!("bad mirror id `{t}`"),
                })?);
            }
            continue;
        }
        let id = head.trim().parse::<u32>().map_err(|_| RelationParseError::Syntax {
            line,
            msg: format!("bad relation id `{head}`"),
        })?;
        rels.push(parse_line(id, body, line)?);
    }
    let mut next = rels.iter().map(|r| r.id).max().unwrap_or(0) + 1;
    for m in mirrors {
        let src = rels.iter().find(|r| r.id == m).ok_or(RelationParseError::MissingMirror(m))?;
        let r = src.mirrored(next);
        rels.push(r);
        next += 1;
    }
    Ok(rels)
}

/// The seventeen shipped relations.
pub fn standard_relations() -> Vec<Relation> {
    parse_relations(RELATIONS_SOURCE).expect("shipped relation file parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::rat;

    #[test]
    fn shipped_file_has_seventeen() {
        let rels = standard_relations();
        assert_eq!(rels.len(), 17);
        assert_eq!(rels[11].mirror_of, Some(2));
        assert_eq!(rels[16].mirror_of, Some(11));
        let ids: Vec<u32> = rels.iter().map(|r| r.id).collect();
        assert_eq!(ids, (1..=17).collect::<Vec<_>>());
    }

    #[test]
    fn parses_terms() {
        let r = &parse_relations("9: T1*T1*T4 - 1/2 q1 T2∪T3 - q1 q2 q3^{1..} T0").unwrap()[0];
        assert_eq!(r.terms.len(), 3);
        assert_eq!(r.terms[0].kind, WordKind::Star);
        assert_eq!(r.terms[0].word, vec![1, 1, 4]);
        assert_eq!(r.terms[1].coeff, rat(-1, 2));
        assert_eq!(r.terms[1].kind, WordKind::Cup);
        assert_eq!(r.terms[2].q, QMonomial::new(1, 1, 1));
        assert!(r.terms[2].q3_tail);
        assert!(r.terms[2].word.is_empty());
    }

    #[test]
    fn display_round_trips() {
        for r in standard_relations() {
            let text = r.to_string();
            let body = text.split_once(':').unwrap().1;
            let back = parse_line(r.id, body, 0).unwrap();
            assert_eq!(back.terms, r.terms, "{text}");
        }
    }

    #[test]
    fn mirror_swaps_generators() {
        let rels = standard_relations();
        let f12 = &rels[11];
        assert_eq!(f12.terms[0].word, vec![2, 2, 2]);
        assert_eq!(f12.terms[1].q, QMonomial::new(0, 1, 0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_relations("1: T1*T9").is_err());
        assert!(parse_relations("1: T1*T2∪T3").is_err());
        assert!(parse_relations("1: T1 + 2").is_err());
        assert!(parse_relations("mirrors: 4\n1: T1").is_err());
    }
}
