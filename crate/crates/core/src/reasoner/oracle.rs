//! Brute-force finite-model search, independent of the tableau.
//!
//! Interpretations over the ontology signature are enumerated for every
//! domain size up to a bound. Individuals are assigned in restricted-growth
//! order, which removes most of the symmetric duplicates. Only usable on
//! tiny signatures.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::concept::Concept;
use crate::error::{Error, Result};
use crate::ontology::{Axiom, Ontology};

/// Default cap on `n·|N_C| + n²·|N_R|` enumeration bits.
pub const DEFAULT_ORACLE_BOUND: usize = 24;

/// An explicit interpretation with domain `0..domain_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteInterpretation {
    pub domain_size: usize,
    pub concepts: BTreeMap<String, BTreeSet<usize>>,
    pub roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub individuals: BTreeMap<String, usize>,
}

impl FiniteInterpretation {
    /// Extension of `c` as a membership vector over the domain.
    pub fn extension(&self, c: &Concept) -> Vec<bool> {
        let n = self.domain_size;
        match c {
            Concept::Top => vec![true; n],
            Concept::Bottom => vec![false; n],
            Concept::Atomic(a) => {
                let mut v = vec![false; n];
                if let Some(ext) = self.concepts.get(a) {
                    for &x in ext {
                        v[x] = true;
                    }
                }
                v
            }
            Concept::Not(inner) => self.extension(inner).into_iter().map(|b| !b).collect(),
            Concept::And(l, r) => {
                let (l, r) = (self.extension(l), self.extension(r));
                l.iter().zip(&r).map(|(a, b)| *a && *b).collect()
            }
            Concept::Or(l, r) => {
                let (l, r) = (self.extension(l), self.extension(r));
                l.iter().zip(&r).map(|(a, b)| *a || *b).collect()
            }
            Concept::Exists(role, inner) => {
                let f = self.extension(inner);
                let mut v = vec![false; n];
                if let Some(pairs) = self.roles.get(role) {
                    for &(x, y) in pairs {
                        v[x] |= f[y];
                    }
                }
                v
            }
            Concept::ForAll(role, inner) => {
                let f = self.extension(inner);
                let mut v = vec![true; n];
                if let Some(pairs) = self.roles.get(role) {
                    for &(x, y) in pairs {
                        v[x] &= f[y];
                    }
                }
                v
            }
        }
    }

    pub fn satisfies(&self, ax: &Axiom) -> bool {
        match ax {
            Axiom::Subsumption { lhs, rhs } => {
                let (l, r) = (self.extension(lhs), self.extension(rhs));
                l.iter().zip(&r).all(|(a, b)| !*a || *b)
            }
            Axiom::ClassAssertion { concept, individual } => match self.individuals.get(individual) {
                Some(&x) => self.extension(concept)[x],
                None => false,
            },
            Axiom::RoleAssertion { role, subject, object } => {
                match (self.individuals.get(subject), self.individuals.get(object)) {
                    (Some(&a), Some(&b)) => self.roles.get(role).is_some_and(|p| p.contains(&(a, b))),
                    _ => false,
                }
            }
        }
    }

    pub fn is_model_of(&self, o: &Ontology) -> bool {
        self.domain_size > 0 && o.iter().all(|ax| self.satisfies(ax))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Model(FiniteInterpretation),
    /// No model with at most this many elements.
    NoModelUpTo(usize),
}

impl OracleOutcome {
    pub fn found_model(&self) -> bool {
        matches!(self, OracleOutcome::Model(_))
    }
}

enum Expr {
    Top,
    Bottom,
    Atom(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Exists(usize, Box<Expr>),
    Forall(usize, Box<Expr>),
}

enum Check {
    Gci(Expr, Expr),
    Class(Expr, usize),
    Role(usize, usize, usize),
}

struct Sig {
    concepts: Vec<String>,
    roles: Vec<String>,
    individuals: Vec<String>,
}

impl Sig {
    fn of(o: &Ontology) -> Self {
        let s = o.signature();
        Sig {
            concepts: s.concepts.into_iter().collect(),
            roles: s.roles.into_iter().collect(),
            individuals: s.individuals.into_iter().collect(),
        }
    }

    fn idx(v: &[String], name: &str) -> usize {
        v.iter().position(|x| x == name).expect("name in signature")
    }

    fn expr(&self, c: &Concept) -> Expr {
        match c {
            Concept::Top => Expr::Top,
            Concept::Bottom => Expr::Bottom,
            Concept::Atomic(a) => Expr::Atom(Self::idx(&self.concepts, a)),
            Concept::Not(i) => Expr::Not(Box::new(self.expr(i))),
            Concept::And(l, r) => Expr::And(Box::new(self.expr(l)), Box::new(self.expr(r))),
            Concept::Or(l, r) => Expr::Or(Box::new(self.expr(l)), Box::new(self.expr(r))),
            Concept::Exists(r, i) => Expr::Exists(Self::idx(&self.roles, r), Box::new(self.expr(i))),
            Concept::ForAll(r, i) => Expr::Forall(Self::idx(&self.roles, r), Box::new(self.expr(i))),
        }
    }

    fn check(&self, ax: &Axiom) -> Check {
        match ax {
            Axiom::Subsumption { lhs, rhs } => Check::Gci(self.expr(lhs), self.expr(rhs)),
            Axiom::ClassAssertion { concept, individual } => {
                Check::Class(self.expr(concept), Self::idx(&self.individuals, individual))
            }
            Axiom::RoleAssertion { role, subject, object } => Check::Role(
                Self::idx(&self.roles, role),
                Self::idx(&self.individuals, subject),
                Self::idx(&self.individuals, object),
            ),
        }
    }
}

/// Bitmask interpretation; bit `x` of a mask is domain element `x`.
struct Masks {
    full: u64,
    concepts: Vec<u64>,
    /// `succ[r][x]` is the successor mask of `x` under role `r`.
    succ: Vec<Vec<u64>>,
    individuals: Vec<usize>,
}

impl Masks {
    fn eval(&self, e: &Expr) -> u64 {
        match e {
            Expr::Top => self.full,
            Expr::Bottom => 0,
            Expr::Atom(a) => self.concepts[*a],
            Expr::Not(i) => self.full & !self.eval(i),
            Expr::And(l, r) => self.eval(l) & self.eval(r),
            Expr::Or(l, r) => self.eval(l) | self.eval(r),
            Expr::Exists(r, i) => {
                let f = self.eval(i);
                let mut m = 0;
                for (x, s) in self.succ[*r].iter().enumerate() {
                    if s & f != 0 {
                        m |= 1 << x;
                    }
                }
                m
            }
            Expr::Forall(r, i) => {
                let f = self.eval(i);
                let mut m = 0;
                for (x, s) in self.succ[*r].iter().enumerate() {
                    if s & !f == 0 {
                        m |= 1 << x;
                    }
                }
                m
            }
        }
    }

    fn holds(&self, c: &Check) -> bool {
        match c {
            Check::Gci(l, r) => self.eval(l) & !self.eval(r) == 0,
            Check::Class(e, i) => self.eval(e) >> self.individuals[*i] & 1 == 1,
            Check::Role(r, a, b) => self.succ[*r][self.individuals[*a]] >> self.individuals[*b] & 1 == 1,
        }
    }

    fn to_interpretation(&self, n: usize, sig: &Sig) -> FiniteInterpretation {
        let bits = |m: u64| (0..n).filter(|x| m >> x & 1 == 1).collect::<BTreeSet<_>>();
        FiniteInterpretation {
            domain_size: n,
            concepts: sig.concepts.iter().cloned().zip(self.concepts.iter().map(|&m| bits(m))).collect(),
            roles: sig
                .roles
                .iter()
                .zip(&self.succ)
                .map(|(name, succ)| {
                    let pairs =
                        succ.iter().enumerate().flat_map(|(x, &s)| bits(s).into_iter().map(move |y| (x, y))).collect();
                    (name.clone(), pairs)
                })
                .collect(),
            individuals: sig.individuals.iter().cloned().zip(self.individuals.iter().copied()).collect(),
        }
    }
}

fn enumeration_bits(sig: &Sig, n: usize) -> usize {
    n * sig.concepts.len() + n * n * sig.roles.len()
}

/// Calls `f` on every interpretation of `sig` with domain size `n`.
fn for_each_interpretation(sig: &Sig, n: usize, f: &mut impl FnMut(&Masks) -> ControlFlow<()>) -> ControlFlow<()> {
    let bits = enumeration_bits(sig, n);
    let nc = sig.concepts.len();
    let mut assign = vec![0usize; sig.individuals.len()];
    loop {
        let mut m = Masks {
            full: (1u64 << n) - 1,
            concepts: vec![0; nc],
            succ: vec![vec![0; n]; sig.roles.len()],
            individuals: assign.clone(),
        };
        for code in 0u64..(1u64 << bits) {
            let mut c = code;
            let elem = (1u64 << n) - 1;
            for a in 0..nc {
                m.concepts[a] = c & elem;
                c >>= n;
            }
            for succ in m.succ.iter_mut() {
                for s in succ.iter_mut() {
                    *s = c & elem;
                    c >>= n;
                }
            }
            f(&m)?;
        }
        if !next_restricted_growth(&mut assign, n) {
            return ControlFlow::Continue(());
        }
    }
}

/// Advances a restricted-growth string with values below `n`.
fn next_restricted_growth(a: &mut [usize], n: usize) -> bool {
    for i in (0..a.len()).rev() {
        let max_prefix = a[..i].iter().copied().max().map_or(0, |m| m + 1);
        if a[i] + 1 < n && a[i] < max_prefix {
            a[i] += 1;
            for x in a[i + 1..].iter_mut() {
                *x = 0;
            }
            return true;
        }
    }
    false
}

fn guard(sig: &Sig, max_domain: usize, bound: usize) -> Result<()> {
    let needed = enumeration_bits(sig, max_domain);
    if needed > bound || max_domain > 8 {
        return Err(Error::OracleBound { needed, bound });
    }
    Ok(())
}

/// Searches for a model of `o` with at most `max_domain` elements.
pub fn oracle_consistency(o: &Ontology, max_domain: usize) -> Result<OracleOutcome> {
    oracle_consistency_with_bound(o, max_domain, DEFAULT_ORACLE_BOUND)
}

pub fn oracle_consistency_with_bound(o: &Ontology, max_domain: usize, bound: usize) -> Result<OracleOutcome> {
    let sig = Sig::of(o);
    guard(&sig, max_domain, bound)?;
    let checks: Vec<Check> = o.iter().map(|ax| sig.check(ax)).collect();
    for n in 1..=max_domain {
        let mut found = None;
        let flow = for_each_interpretation(&sig, n, &mut |m| {
            if checks.iter().all(|c| m.holds(c)) {
                found = Some(m.to_interpretation(n, &sig));
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if flow.is_break() {
            return Ok(OracleOutcome::Model(found.expect("model recorded")));
        }
    }
    Ok(OracleOutcome::NoModelUpTo(max_domain))
}

/// Whether every model of `o` with at most `max_domain` elements satisfies
/// `ax`. Sound only up to the domain bound.
pub fn oracle_entails(o: &Ontology, ax: &Axiom, max_domain: usize) -> Result<bool> {
    oracle_entails_with_bound(o, ax, max_domain, DEFAULT_ORACLE_BOUND)
}

pub fn oracle_entails_with_bound(o: &Ontology, ax: &Axiom, max_domain: usize, bound: usize) -> Result<bool> {
    let sig = Sig::of(&o.with(ax.clone()));
    guard(&sig, max_domain, bound)?;
    let checks: Vec<Check> = o.iter().map(|a| sig.check(a)).collect();
    let goal = sig.check(ax);
    for n in 1..=max_domain {
        let flow = for_each_interpretation(&sig, n, &mut |m| {
            if checks.iter().all(|c| m.holds(c)) && !m.holds(&goal) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if flow.is_break() {
            return Ok(false);
        }
    }
    Ok(true)
}
