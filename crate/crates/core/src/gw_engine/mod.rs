//! Genus-zero two-point-class Gromov-Witten invariants by WDVV recursion.
//!
//! Every invariant is first normalized with the fundamental class, divisor and
//! dimension axioms. A normalized key is then either seeded, a base unknown
//! (one or two insertions from the divisor subring, pure `T4` powers, or
//! `<T4 x>`), or reduced by one WDVV instance whose boundary terms live at the
//! same curve class and whose other terms live at strictly smaller classes.
//! Base unknowns at a curve class with `a + b <= 2` are solved from the full
//! set of four-point WDVV equations at that class.

pub mod oracle;
mod seeds;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::RwLock;

use num_integer::binomial;
use num_traits::{One, Zero};
use thiserror::Error;

pub use seeds::{format_seed_line, SeedEntry, SeedError, SeedGroup, SeedTable};

use crate::chow::{chow, divisor_degree, CohVector, CurveClass, CODIM, IOTA, NUM_BASIS};
use crate::coeffring::{int, rat, Rational};
use crate::linalg;

/// Provenance bit set when a value came out of a per-class linear solve.
pub const TWO_POINT_SOLVE: u16 = 1 << 10;

/// A normalized invariant: insertions sorted, no `T0`, no divisors (unless a
/// single divisor is all that is left), dimension axiom satisfied.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantKey {
    pub beta: CurveClass,
    pub insertions: Vec<u8>,
}

impl InvariantKey {
    pub fn new(beta: CurveClass, mut insertions: Vec<u8>) -> Self {
        insertions.sort_unstable();
        InvariantKey { beta, insertions }
    }

    pub fn codim_sum(&self) -> i64 {
        self.insertions.iter().map(|&i| CODIM[i as usize] as i64).sum()
    }

    pub fn dimension_ok(&self) -> bool {
        self.codim_sum() == self.beta.virtual_dim() + self.insertions.len() as i64
    }

    pub fn iota(&self) -> InvariantKey {
        InvariantKey::new(self.beta.iota(), seeds::iota_insertions(&self.insertions))
    }

    fn t4_count(&self) -> usize {
        self.insertions.iter().filter(|&&i| i == 4).count()
    }

    /// Keys the recursion never reduces.
    pub fn is_base(&self) -> bool {
        let m = self.t4_count();
        let n = self.insertions.len() - m;
        (m == 0 && n <= 2) || (m >= 1 && n == 0) || (m == 1 && n == 1)
    }
}

impl fmt::Display for InvariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let mut it = self.insertions.iter().peekable();
        while let Some(&i) = it.next() {
            let mut e = 1;
            while it.peek() == Some(&&i) {
                it.next();
                e += 1;
            }
            parts.push(if e == 1 { format!("T{i}") } else { format!("T{i}^{e}") });
        }
        write!(f, "⟨{}⟩_{}", parts.join(" "), self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantValue {
    Known(Rational),
    Unknown(String),
}

impl InvariantValue {
    pub fn known(&self) -> Option<&Rational> {
        match self {
            InvariantValue::Known(v) => Some(v),
            InvariantValue::Unknown(_) => None,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, InvariantValue::Known(_))
    }
}

impl fmt::Display for InvariantValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantValue::Known(v) => write!(f, "{v}"),
            InvariantValue::Unknown(r) => write!(f, "UNKNOWN ({r})"),
        }
    }
}

/// A value together with the seed groups it rests on and the number of WDVV
/// reductions used to reach it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub value: InvariantValue,
    pub sources: u16,
    pub steps: u64,
}

impl Derivation {
    fn known(v: Rational) -> Self {
        Derivation { value: InvariantValue::Known(v), sources: 0, steps: 0 }
    }

    fn unknown(reason: String) -> Self {
        Derivation { value: InvariantValue::Unknown(reason), sources: 0, steps: 0 }
    }

    fn scaled(mut self, k: &Rational) -> Self {
        if let InvariantValue::Known(v) = &mut self.value {
            *v *= k;
        }
        self
    }

    fn is_zero(&self) -> bool {
        matches!(&self.value, InvariantValue::Known(v) if v.is_zero())
    }

    /// Labels of the seed groups and solves behind this value.
    pub fn provenance(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> =
            SeedGroup::ALL.iter().filter(|g| self.sources & g.bit() != 0).map(|g| g.label()).collect();
        if self.sources & TWO_POINT_SOLVE != 0 {
            out.push("two-point-solve");
        }
        out
    }
}

/// One WDVV instance `F(ij|kl) = F(ik|jl)` at `beta` with extra insertions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WdvvInstance {
    pub beta: CurveClass,
    pub ijkl: [u8; 4],
    pub extra: Vec<u8>,
}

impl fmt::Display for WdvvInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k, l] = self.ijkl;
        let extra: Vec<String> = self.extra.iter().map(|e| format!("T{e}")).collect();
        write!(f, "WDVV(T{i} T{j} | T{k} T{l}; [{}]) at {}", extra.join(" "), self.beta)
    }
}

/// The linear equation an instance produces: invariants at the instance's
/// own class stay symbolic, lower classes are evaluated into `constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WdvvRelation {
    pub instance: WdvvInstance,
    pub coeffs: BTreeMap<InvariantKey, Rational>,
    pub constant: InvariantValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("inconsistent WDVV system at {beta}: {}", instances.join("; "))]
    Inconsistent { beta: CurveClass, instances: Vec<String> },
    #[error("{0} is not an effective curve class")]
    NotEffective(CurveClass),
    #[error("T{0} is not a basis class")]
    BadInsertion(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub c_max: u32,
    pub bidegree_vanishing: bool,
    pub excluded_seeds: BTreeSet<SeedGroup>,
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { c_max: 6, bidegree_vanishing: false, excluded_seeds: BTreeSet::new(), trace: false }
    }
}

/// `gamma = lambda * (alpha ∪ alpha1)` with `alpha1` a divisor.
pub(crate) fn factor(gamma: u8) -> (Rational, u8, u8) {
    match gamma {
        5 => (int(1), 1, 2),
        6 => (int(1), 1, 1),
        7 => (int(1), 2, 2),
        8 => (int(1), 1, 3),
        9 => (int(1), 2, 3),
        10 => (rat(1, 2), 5, 2),
        11 => (rat(1, 2), 5, 1),
        12 => (rat(1, 2), 5, 3),
        13 => (int(1), 12, 1),
        _ => panic!("T{gamma} has no factorization through a divisor"),
    }
}

pub(crate) enum Normal {
    Zero,
    Key(Rational, InvariantKey),
}

/// Applies the fundamental class, dimension and divisor axioms at a nonzero
/// class. Divisors are removed while at least one other insertion remains.
pub(crate) fn normalize(beta: CurveClass, ins: &[usize]) -> Normal {
    if !beta.is_effective() || ins.contains(&0) {
        return Normal::Zero;
    }
    let codim: i64 = ins.iter().map(|&i| CODIM[i] as i64).sum();
    if codim != beta.virtual_dim() + ins.len() as i64 {
        return Normal::Zero;
    }
    let mut coef = Rational::one();
    let mut rest: Vec<u8> = Vec::with_capacity(ins.len());
    let mut divisors = Vec::new();
    for &i in ins {
        if CODIM[i] == 1 {
            divisors.push(i);
        } else {
            rest.push(i as u8);
        }
    }
    let keep_one = rest.is_empty();
    for (n, &d) in divisors.iter().enumerate() {
        if keep_one && n + 1 == divisors.len() {
            rest.push(d as u8);
            break;
        }
        let deg = divisor_degree(d, &beta).expect("codim one classes are divisors");
        if deg == 0 {
            return Normal::Zero;
        }
        coef *= int(deg);
    }
    Normal::Key(coef, InvariantKey::new(beta, rest))
}

/// Classical triple intersection, or zero for other point counts.
fn classical(ins: &[usize]) -> Rational {
    match ins {
        [i, j, k] => chow().triple(*i, *j, *k),
        _ => Rational::zero(),
    }
}

/// Partial evaluation at one curve class: a constant plus a combination of
/// that class's base unknowns.
#[derive(Debug, Clone, Default)]
struct Form {
    constant: Rational,
    terms: BTreeMap<InvariantKey, Rational>,
    unknown: Option<String>,
    sources: u16,
    steps: u64,
}

impl Form {
    fn constant(v: Rational, sources: u16) -> Self {
        Form { constant: v, sources, ..Default::default() }
    }

    fn var(key: InvariantKey) -> Self {
        let mut f = Form::default();
        f.terms.insert(key, Rational::one());
        f
    }

    fn add_form(&mut self, o: &Form, k: &Rational) {
        if k.is_zero() {
            return;
        }
        self.sources |= o.sources;
        if !o.constant.is_zero() {
            self.constant += &o.constant * k;
        }
        for (key, c) in &o.terms {
            let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
            *slot += c * k;
            if slot.is_zero() {
                self.terms.remove(key);
            }
        }
        if self.unknown.is_none() {
            self.unknown.clone_from(&o.unknown);
        }
        self.sources |= o.sources;
        self.steps = self.steps.saturating_add(o.steps);
    }

    fn add_product(&mut self, x: &Derivation, y: &Derivation, k: &Rational) {
        if k.is_zero() {
            return;
        }
        if x.is_zero() || y.is_zero() {
            self.sources |= if x.is_zero() { x.sources } else { y.sources };
            return;
        }
        match (&x.value, &y.value) {
            (InvariantValue::Known(a), InvariantValue::Known(b)) => self.constant += a * b * k,
            (InvariantValue::Unknown(r), _) | (_, InvariantValue::Unknown(r)) => {
                if self.unknown.is_none() {
                    self.unknown = Some(r.clone());
                }
            }
        }
        self.sources |= x.sources | y.sources;
        self.steps = self.steps.saturating_add(x.steps).saturating_add(y.steps);
    }

    fn scale(&mut self, k: &Rational) {
        self.constant *= k;
        for c in self.terms.values_mut() {
            *c *= k;
        }
    }
}

#[derive(Debug, Clone, Default)]
struct BetaSolve {
    values: BTreeMap<InvariantKey, Rational>,
    sources: u16,
}

#[derive(Default)]
struct State {
    forms: HashMap<InvariantKey, Form>,
    solved: HashMap<CurveClass, BetaSolve>,
    values: HashMap<InvariantKey, Derivation>,
    in_progress: HashSet<InvariantKey>,
    used: BTreeSet<WdvvInstance>,
    trace: Vec<String>,
    fatal: Option<EngineError>,
}

/// How an instance treats invariants at its own class.
#[derive(Clone, Copy)]
enum Mode<'k> {
    /// Expand them through the recursion, isolating `target` if given.
    Reduce(Option<&'k InvariantKey>),
    /// Keep every normalized key as a symbol.
    Symbolic,
}

struct Ctx<'a> {
    seeds: &'a SeedTable,
    cfg: &'a EngineConfig,
    st: &'a mut State,
}

/// Sub-multisets of `extra`, grouped, with their multiplicities.
fn sub_multisets(extra: &[u8]) -> Vec<(Vec<u8>, Vec<u8>, Rational)> {
    let mut groups: Vec<(u8, usize)> = Vec::new();
    for &e in extra {
        match groups.last_mut() {
            Some((g, n)) if *g == e => *n += 1,
            _ => groups.push((e, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new(), Rational::one())];
    for (g, n) in groups {
        let mut next = Vec::with_capacity(out.len() * (n + 1));
        for (a, b, m) in &out {
            for take in 0..=n {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2.extend(std::iter::repeat_n(g, take));
                b2.extend(std::iter::repeat_n(g, n - take));
                next.push((a2, b2, m * int(binomial(n as i64, take as i64))));
            }
        }
        out = next;
    }
    out
}

fn with(base: &[u8], extra: &[u8]) -> Vec<usize> {
    base.iter().chain(extra).map(|&i| i as usize).collect()
}

impl Ctx<'_> {
    fn value(&mut self, beta: CurveClass, ins: &[usize]) -> Derivation {
        if beta.is_zero() {
            return Derivation::known(classical(ins));
        }
        match normalize(beta, ins) {
            Normal::Zero => Derivation::known(Rational::zero()),
            Normal::Key(k, key) => self.value_key(&key).scaled(&k),
        }
    }

    fn value_key(&mut self, key: &InvariantKey) -> Derivation {
        if key.beta.c > self.cfg.c_max as i64 {
            return Derivation::unknown(format!("{key} exceeds c_max = {}", self.cfg.c_max));
        }
        if let Some(d) = self.st.values.get(key) {
            return d.clone();
        }
        self.ensure_resolved(key.beta);
        let f = self.form(key);
        let d = self.evaluate(&f, key.beta);
        self.st.values.insert(key.clone(), d.clone());
        d
    }

    fn evaluate(&self, f: &Form, beta: CurveClass) -> Derivation {
        if let Some(r) = &f.unknown {
            return Derivation { value: InvariantValue::Unknown(r.clone()), sources: f.sources, steps: f.steps };
        }
        let solve = self.st.solved.get(&beta);
        let mut v = f.constant.clone();
        let mut sources = f.sources;
        for (key, c) in &f.terms {
            match solve.and_then(|s| s.values.get(key)) {
                Some(x) => {
                    v += c * x;
                    sources |= TWO_POINT_SOLVE | solve.map_or(0, |s| s.sources);
                }
                None => {
                    let reason = format!("requires {key}, which WDVV leaves undetermined; supply it as a seed");
                    return Derivation { value: InvariantValue::Unknown(reason), sources, steps: f.steps };
                }
            }
        }
        Derivation { value: InvariantValue::Known(v), sources, steps: f.steps }
    }

    fn form(&mut self, key: &InvariantKey) -> Form {
        if let Some(f) = self.st.forms.get(key) {
            return f.clone();
        }
        let f = if let Some((v, g)) = self.seeds.lookup(key) {
            Form::constant(v, g.bit())
        } else if key.is_base() {
            Form::var(key.clone())
        } else {
            if !self.st.in_progress.insert(key.clone()) {
                panic!("cyclic WDVV recursion at {key}");
            }
            let inst = recursion_instance(key);
            let (lam, mut rest) = self.instance_eq(&inst, Mode::Reduce(Some(key)));
            assert!(!lam.is_zero(), "{inst} does not isolate {key}");
            rest.scale(&(-Rational::one() / lam));
            rest.steps = rest.steps.saturating_add(1);
            if self.cfg.trace {
                self.st.trace.push(format!("{key} <- {inst}"));
            }
            self.st.used.insert(inst);
            self.st.in_progress.remove(key);
            rest
        };
        self.st.forms.insert(key.clone(), f.clone());
        f
    }

    fn add_key(&mut self, beta: CurveClass, ins: &[usize], c: &Rational, mode: Mode, lam: &mut Rational, rest: &mut Form) {
        let Normal::Key(k, key) = normalize(beta, ins) else {
            return;
        };
        let c = c * k;
        match mode {
            Mode::Reduce(Some(t)) if *t == key => *lam += c,
            Mode::Reduce(_) => {
                let f = self.form(&key);
                rest.add_form(&f, &c);
            }
            Mode::Symbolic => rest.add_form(&Form::var(key), &c),
        }
    }

    /// Expands `F(ij|kl) - F(ik|jl)` into `lam * target + rest`.
    fn instance_eq(&mut self, inst: &WdvvInstance, mode: Mode) -> (Rational, Form) {
        let beta = inst.beta;
        let [i, j, k, l] = inst.ijkl;
        let splits = sub_multisets(&inst.extra);
        let g_inv = chow().g_inv_support();
        let mut lam = Rational::zero();
        let mut rest = Form::default();
        for (sign, p, q, r, t) in [(int(1), i, j, k, l), (int(-1), i, k, j, l)] {
            let cup_pq = chow().cup_basis(p as usize, q as usize).clone();
            let cup_rt = chow().cup_basis(r as usize, t as usize).clone();
            for (b1, b2) in beta.splittings() {
                if b1.is_zero() {
                    for (f, c) in cup_pq.support() {
                        let ins = with(&[r, t, f as u8], &inst.extra);
                        self.add_key(beta, &ins, &(&sign * c), mode, &mut lam, &mut rest);
                    }
                } else if b2.is_zero() {
                    for (e, c) in cup_rt.support() {
                        let ins = with(&[p, q, e as u8], &inst.extra);
                        self.add_key(beta, &ins, &(&sign * c), mode, &mut lam, &mut rest);
                    }
                } else {
                    for (a, b, mult) in &splits {
                        for (e, f, g) in &g_inv {
                            let v1 = self.value(b1, &with(&[p, q, *e as u8], a));
                            if v1.is_zero() {
                                rest.sources |= v1.sources;
                                continue;
                            }
                            let v2 = self.value(b2, &with(&[r, t, *f as u8], b));
                            rest.add_product(&v1, &v2, &(&sign * g * mult));
                        }
                    }
                }
            }
        }
        (lam, rest)
    }

    fn ensure_resolved(&mut self, beta: CurveClass) {
        if self.st.solved.contains_key(&beta) {
            return;
        }
        let solve = if beta.a + beta.b <= 2 { self.derive(beta) } else { BetaSolve::default() };
        self.st.solved.insert(beta, solve);
    }

    /// Solves the base unknowns at `beta` from every four-point instance.
    fn derive(&mut self, beta: CurveClass) -> BetaSolve {
        let want = 2 * (beta.a + beta.b) + 4;
        let mut eqs: Vec<(WdvvInstance, Form)> = Vec::new();
        let mut skipped = 0;
        for w in 1..NUM_BASIS as u8 {
            for x in w..NUM_BASIS as u8 {
                for y in x..NUM_BASIS as u8 {
                    for z in y..NUM_BASIS as u8 {
                        let s: usize = [w, x, y, z].iter().map(|&i| CODIM[i as usize]).sum();
                        if s as i64 != want {
                            continue;
                        }
                        for ijkl in [[w, x, y, z], [w, x, z, y]] {
                            let inst = WdvvInstance { beta, ijkl, extra: Vec::new() };
                            let (_, f) = self.instance_eq(&inst, Mode::Reduce(None));
                            if f.unknown.is_some() {
                                skipped += 1;
                                continue;
                            }
                            if f.terms.is_empty() && f.constant.is_zero() {
                                continue;
                            }
                            eqs.push((inst, f));
                        }
                    }
                }
            }
        }
        let vars: Vec<InvariantKey> =
            eqs.iter().flat_map(|(_, f)| f.terms.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<&InvariantKey, usize> = vars.iter().enumerate().map(|(n, k)| (k, n)).collect();
        let mut sources = 0;
        let rows: Vec<Vec<Rational>> = eqs
            .iter()
            .map(|(_, f)| {
                sources |= f.sources;
                let mut row = vec![Rational::zero(); vars.len() + 1];
                for (k, c) in &f.terms {
                    row[index[k]] = c.clone();
                }
                row[vars.len()] = -f.constant.clone();
                row
            })
            .collect();
        let sol = linalg::solve(rows, vars.len());
        if !sol.inconsistent.is_empty() && self.st.fatal.is_none() {
            let instances = sol.inconsistent.iter().map(|&r| eqs[r].0.to_string()).collect();
            self.st.fatal = Some(EngineError::Inconsistent { beta, instances });
        }
        if self.cfg.trace {
            self.st.trace.push(format!(
                "solve {beta}: {} equations ({skipped} skipped), {} unknowns, {} determined",
                eqs.len(),
                vars.len(),
                sol.determined.len()
            ));
        }
        for (inst, _) in eqs {
            self.st.used.insert(inst);
        }
        let values = sol.determined.into_iter().map(|(n, v)| (vars[n].clone(), v)).collect();
        BetaSolve { values, sources }
    }
}

/// The instance that reduces a non-base key.
fn recursion_instance(key: &InvariantKey) -> WdvvInstance {
    let m = key.t4_count();
    let mut gam: Vec<u8> = key.insertions.iter().copied().filter(|&i| i != 4).collect();
    gam.sort_by_key(|&i| (std::cmp::Reverse(CODIM[i as usize]), i));
    let n = gam.len();
    let t4 = |c: usize| std::iter::repeat_n(4u8, c);
    let (ijkl, extra): ([u8; 4], Vec<u8>) = match (m, n) {
        (0, n) if n >= 3 => {
            let (_, a, a1) = factor(gam[n - 1]);
            ([gam[0], gam[1], a, a1], gam[2..n - 1].to_vec())
        }
        (1, n) if n >= 2 => {
            let (_, a, a1) = factor(gam[n - 1]);
            ([4, gam[0], a, a1], gam[1..n - 1].to_vec())
        }
        (m, 1) if m >= 2 => {
            let g = gam[0];
            let (k, l) = if CODIM[g as usize] == 4 {
                (5, 5)
            } else {
                let (_, a, a1) = factor(g);
                (a, a1)
            };
            ([4, 4, k, l], t4(m - 2).collect())
        }
        (m, n) if m >= 2 && n >= 2 => {
            let (_, a, a1) = factor(gam[n - 1]);
            ([4, gam[0], a, a1], t4(m - 1).chain(gam[1..n - 1].iter().copied()).collect())
        }
        _ => unreachable!("{key} is a base key"),
    };
    let mut extra = extra;
    extra.sort_unstable();
    WdvvInstance { beta: key.beta, ijkl, extra }
}

/// One row of the per-class two-point table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub key: InvariantKey,
    pub derivation: Derivation,
}

/// Memoizing invariant engine. Computation takes an exclusive lock; cached
/// reads share it.
pub struct Engine {
    cfg: EngineConfig,
    seeds: SeedTable,
    state: RwLock<State>,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Self {
        let seeds = SeedTable::standard(cfg.c_max, cfg.bidegree_vanishing).without(&cfg.excluded_seeds);
        Self::with_seeds(cfg, seeds)
    }

    /// Uses `seeds` as given; `excluded_seeds` in the config is not applied.
    pub fn with_seeds(cfg: EngineConfig, seeds: SeedTable) -> Self {
        Engine { cfg, seeds, state: RwLock::new(State::default()) }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn seeds(&self) -> &SeedTable {
        &self.seeds
    }

    fn run<T>(&self, f: impl FnOnce(&mut Ctx) -> T) -> Result<T, EngineError> {
        let mut st = self.state.write().unwrap_or_else(|e| e.into_inner());
        if let Some(e) = &st.fatal {
            return Err(e.clone());
        }
        let mut ctx = Ctx { seeds: &self.seeds, cfg: &self.cfg, st: &mut st };
        let out = f(&mut ctx);
        match &st.fatal {
            Some(e) => Err(e.clone()),
            None => Ok(out),
        }
    }

    fn check(beta: CurveClass, ins: &[usize]) -> Result<(), EngineError> {
        if !beta.is_effective() {
            return Err(EngineError::NotEffective(beta));
        }
        match ins.iter().find(|&&i| i >= NUM_BASIS) {
            Some(&i) => Err(EngineError::BadInsertion(i)),
            None => Ok(()),
        }
    }

    /// `<T_i1 ... T_in>_beta` with its provenance.
    pub fn derivation(&self, beta: CurveClass, ins: &[usize]) -> Result<Derivation, EngineError> {
        Self::check(beta, ins)?;
        if !beta.is_zero() {
            if let Normal::Key(k, key) = normalize(beta, ins) {
                let st = self.state.read().unwrap_or_else(|e| e.into_inner());
                if let Some(d) = st.values.get(&key) {
                    return Ok(d.clone().scaled(&k));
                }
            }
        }
        self.run(|ctx| ctx.value(beta, ins))
    }

    pub fn invariant(&self, beta: CurveClass, ins: &[usize]) -> Result<InvariantValue, EngineError> {
        Ok(self.derivation(beta, ins)?.value)
    }

    /// Multilinear extension to arbitrary classes.
    pub fn invariant_of_classes(&self, beta: CurveClass, ins: &[CohVector]) -> Result<InvariantValue, EngineError> {
        let mut combos: Vec<(Vec<usize>, Rational)> = vec![(Vec::new(), Rational::one())];
        for x in ins {
            let mut next = Vec::new();
            for (w, c) in &combos {
                for (i, xi) in x.support() {
                    let mut w2 = w.clone();
                    w2.push(i);
                    next.push((w2, c * xi));
                }
            }
            combos = next;
        }
        let mut total = Rational::zero();
        for (w, c) in combos {
            match self.invariant(beta, &w)? {
                InvariantValue::Known(v) => total += v * c,
                u @ InvariantValue::Unknown(_) => return Ok(u),
            }
        }
        Ok(InvariantValue::Known(total))
    }

    /// The equation `F(ij|kl) = F(ik|jl)` at `beta` with `extra` insertions.
    pub fn wdvv_instance(
        &self,
        ijkl: [usize; 4],
        extra: &[usize],
        beta: CurveClass,
    ) -> Result<WdvvRelation, EngineError> {
        Self::check(beta, &ijkl)?;
        Self::check(beta, extra)?;
        let mut ex: Vec<u8> = extra.iter().map(|&e| e as u8).collect();
        ex.sort_unstable();
        let inst = WdvvInstance { beta, ijkl: ijkl.map(|i| i as u8), extra: ex };
        self.run(|ctx| {
            let (_, f) = ctx.instance_eq(&inst, Mode::Symbolic);
            let constant = match f.unknown {
                Some(r) => InvariantValue::Unknown(r),
                None => InvariantValue::Known(f.constant),
            };
            WdvvRelation { instance: inst.clone(), coeffs: f.terms, constant }
        })
    }

    /// Evaluates a relation with the engine's own values; zero if they satisfy it.
    pub fn residual(&self, rel: &WdvvRelation) -> Result<InvariantValue, EngineError> {
        let InvariantValue::Known(mut total) = rel.constant.clone() else {
            return Ok(rel.constant.clone());
        };
        for (key, c) in &rel.coeffs {
            let ins: Vec<usize> = key.insertions.iter().map(|&i| i as usize).collect();
            match self.invariant(key.beta, &ins)? {
                InvariantValue::Known(v) => total += v * c,
                u => return Ok(u),
            }
        }
        Ok(InvariantValue::Known(total))
    }

    /// Base unknowns (and seeds in their place) for every class with
    /// `a + b <= 2` and `c <= c_max`.
    pub fn derive_two_point_table(&self) -> Result<Vec<TableEntry>, EngineError> {
        let mut out = Vec::new();
        let c_max = self.cfg.c_max as i64;
        for s in 0..=2i64 {
            for a in 0..=s {
                for c in 0..=c_max {
                    let beta = CurveClass::new(a, s - a, c);
                    if beta.is_zero() {
                        continue;
                    }
                    for key in base_keys(beta) {
                        let ins: Vec<usize> = key.insertions.iter().map(|&i| i as usize).collect();
                        let derivation = self.derivation(beta, &ins)?;
                        out.push(TableEntry { key, derivation });
                    }
                }
            }
        }
        Ok(out)
    }

    /// All computed keys with known values.
    pub fn known_values(&self) -> Vec<(InvariantKey, Rational)> {
        let st = self.state.read().unwrap_or_else(|e| e.into_inner());
        let mut v: Vec<_> = st
            .values
            .iter()
            .filter_map(|(k, d)| d.value.known().map(|x| (k.clone(), x.clone())))
            .collect();
        v.sort();
        v
    }

    /// Instances used so far, by recursion steps and per-class solves.
    pub fn used_instances(&self) -> BTreeSet<WdvvInstance> {
        self.state.read().unwrap_or_else(|e| e.into_inner()).used.clone()
    }

    pub fn trace(&self) -> Vec<String> {
        self.state.read().unwrap_or_else(|e| e.into_inner()).trace.clone()
    }
}

/// Dimension-compatible base keys at `beta`: one or two codim-two-or-more
/// insertions, and the pure `T4` power.
pub fn base_keys(beta: CurveClass) -> Vec<InvariantKey> {
    let vd = beta.virtual_dim();
    let mut out = Vec::new();
    for i in 4..NUM_BASIS {
        if CODIM[i] as i64 == vd + 1 {
            out.push(InvariantKey::new(beta, vec![i as u8]));
        }
        for j in i..NUM_BASIS {
            if (CODIM[i] + CODIM[j]) as i64 == vd + 2 {
                out.push(InvariantKey::new(beta, vec![i as u8, j as u8]));
            }
        }
    }
    let m = vd as usize;
    if m > 2 {
        out.push(InvariantKey::new(beta, vec![4; m]));
    }
    out
}

/// Invariant indices under the involution, for equivariance checks.
pub fn iota_index(i: usize) -> usize {
    IOTA[i]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(a: i64, b_: i64, c: i64) -> CurveClass {
        CurveClass::new(a, b_, c)
    }

    fn eng(c_max: u32) -> Engine {
        Engine::new(EngineConfig { c_max, ..Default::default() })
    }

    fn known(e: &Engine, beta: CurveClass, ins: &[usize]) -> Rational {
        match e.invariant(beta, ins).unwrap() {
            InvariantValue::Known(v) => v,
            InvariantValue::Unknown(r) => panic!("{beta} {ins:?}: {r}"),
        }
    }

    #[test]
    fn factorizations_hold() {
        for g in 5..=13u8 {
            let (lam, a, a1) = factor(g);
            assert_eq!(CODIM[a1 as usize], 1);
            let prod = chow().cup_basis(a as usize, a1 as usize).scale(&lam);
            assert_eq!(prod, CohVector::basis(g as usize), "T{g}");
        }
        assert_eq!(chow().cup_basis(5, 5), &CohVector::basis(13).scale(&int(2)));
    }

    #[test]
    fn normalization() {
        assert!(matches!(normalize(b(1, 1, 1), &[0, 13, 4]), Normal::Zero));
        assert!(matches!(normalize(b(0, 1, 1), &[4, 4, 4, 12]), Normal::Zero));
        let Normal::Key(k, key) = normalize(b(1, 2, 2), &[1, 3, 13, 12, 4, 4]) else { panic!() };
        assert_eq!(k, int(4));
        assert_eq!(key.insertions, vec![4, 4, 12, 13]);
        let Normal::Key(_, key) = normalize(b(0, 0, 1), &[3, 9]) else { panic!() };
        assert_eq!(key.insertions, vec![9]);
    }

    #[test]
    fn seeds_come_back() {
        let e = eng(3);
        assert_eq!(known(&e, b(0, 0, 2), &[8]), rat(1, 1));
        assert_eq!(known(&e, b(0, 0, 3), &[9]), rat(4, 9));
        assert_eq!(known(&e, b(1, 0, 1), &[13]), int(2));
        assert_eq!(known(&e, b(0, 1, 1), &[6, 11]), int(2));
        let d = e.derivation(b(0, 1, 1), &[6, 11]).unwrap();
        assert_eq!(d.provenance(), vec!["s6"]);
    }

    #[test]
    fn low_degree_values() {
        let e = eng(2);
        assert_eq!(known(&e, b(1, 1, 1), &[4, 5, 13]), int(1));
        assert_eq!(known(&e, b(1, 1, 1), &[4, 6, 13]), int(1));
        assert_eq!(known(&e, b(1, 1, 2), &[10, 13]), int(2));
        assert_eq!(known(&e, b(1, 1, 2), &[12, 13]), int(4));
    }

    #[test]
    fn beyond_truncation_is_unknown() {
        let e = eng(2);
        assert!(!e.invariant(b(1, 0, 3), &[13]).unwrap().is_known());
    }

    #[test]
    fn pure_t4_needs_seed() {
        let e = eng(2);
        match e.invariant(b(3, 2, 2), &[4; 11]).unwrap() {
            InvariantValue::Unknown(r) => assert!(r.contains("T4^11"), "{r}"),
            v => panic!("{v}"),
        }
    }

    #[test]
    fn sub_multiset_weights() {
        let s = sub_multisets(&[4, 4, 7]);
        assert_eq!(s.len(), 6);
        let total: Rational = s.iter().map(|t| t.2.clone()).sum();
        assert_eq!(total, int(8));
    }
}
