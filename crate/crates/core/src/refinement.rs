//! Covers and refinement operators over a reference ontology.
//!
//! `upcov(C)` collects the most specific concepts of `sub(T)` that subsume
//! `C`; `downcov(C)` is the dual. The abstract operator [`RefinementContext::zeta`]
//! refines one subterm at a time, and instantiating it with the two covers
//! gives the generalisation operator γ and the specialisation operator ρ.

use std::collections::BTreeSet;

use crate::concept::Concept;
use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::reasoner::ReasonerSession;

/// Default bound on the size of concepts expanded by [`RefinementContext::refine_iter`].
pub const DEFAULT_SIZE_CAP: usize = 50;

/// Which way a refinement moves in the subsumption order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Generalisation: γ, built from upward covers.
    Up,
    /// Specialisation: ρ, built from downward covers.
    Down,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

#[derive(Clone)]
pub struct RefinementContext {
    reference: Ontology,
    session: ReasonerSession,
    sub: Vec<Concept>,
}

impl RefinementContext {
    /// Fails with [`Error::InconsistentReference`] unless `reference` is consistent.
    pub fn new(reference: Ontology) -> Result<Self> {
        let mut ctx = Self::new_unchecked(reference);
        if !ctx.session.is_consistent()? {
            return Err(Error::InconsistentReference);
        }
        ctx.session.reset_counter();
        Ok(ctx)
    }

    /// Skips the consistency check. Over an inconsistent reference every
    /// subsumption holds and each cover is the whole of `sub(T)`.
    pub fn new_unchecked(reference: Ontology) -> Self {
        let sub = reference.subconcepts().into_iter().collect();
        RefinementContext { session: ReasonerSession::new(reference.clone()), reference, sub }
    }

    pub fn reference(&self) -> &Ontology {
        &self.reference
    }

    /// The cached `sub(T)`, sorted.
    pub fn subconcepts(&self) -> &[Concept] {
        &self.sub
    }

    pub fn session(&self) -> &ReasonerSession {
        &self.session
    }

    pub fn session_mut(&mut self) -> &mut ReasonerSession {
        &mut self.session
    }

    fn in_sub(&self, c: &Concept) -> bool {
        self.sub.binary_search(c).is_ok()
    }

    /// Decides all subsumptions between members of `sub(T)` up front, so
    /// later cover computations (and clones of this context) hit the cache.
    pub fn precompute(&mut self) -> Result<()> {
        let sub = self.sub.clone();
        for c in &sub {
            for d in &sub {
                self.session.is_subsumed(c, d)?;
            }
        }
        Ok(())
    }

    fn le(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        self.session.is_subsumed(c, d)
    }

    /// Upward (`Up`) or downward (`Down`) cover of `c`.
    pub fn cover(&mut self, dir: Direction, c: &Concept) -> Result<BTreeSet<Concept>> {
        let sub = std::mem::take(&mut self.sub);
        let out = self.cover_in(dir, c, &sub);
        self.sub = sub;
        out
    }

    fn cover_in(&mut self, dir: Direction, c: &Concept, sub: &[Concept]) -> Result<BTreeSet<Concept>> {
        // `below(x, y)` is `x ⊑ y` for Up and `y ⊑ x` for Down.
        let below = |s: &mut Self, x: &Concept, y: &Concept| match dir {
            Direction::Up => s.le(x, y),
            Direction::Down => s.le(y, x),
        };
        let mut candidates = Vec::new();
        for d in sub {
            if below(self, c, d)? {
                let equivalent = below(self, d, c)?;
                candidates.push((d, equivalent));
            }
        }
        let mut out = BTreeSet::new();
        'outer: for (i, &(d, _)) in candidates.iter().enumerate() {
            for (j, &(e, e_equiv)) in candidates.iter().enumerate() {
                if i == j || e_equiv {
                    continue;
                }
                if below(self, e, d)? && !below(self, d, e)? {
                    continue 'outer;
                }
            }
            out.insert(d.clone());
        }
        Ok(out)
    }

    pub fn upcov(&mut self, c: &Concept) -> Result<BTreeSet<Concept>> {
        self.cover(Direction::Up, c)
    }

    pub fn downcov(&mut self, c: &Concept) -> Result<BTreeSet<Concept>> {
        self.cover(Direction::Down, c)
    }

    /// One application of the abstract refinement operator, with `up` the
    /// cover used for the concept itself and its flip used under negation.
    pub fn zeta(&mut self, up: Direction, c: &Concept) -> Result<BTreeSet<Concept>> {
        self.zeta_nnf(up, &c.nnf())
    }

    fn zeta_nnf(&mut self, up: Direction, c: &Concept) -> Result<BTreeSet<Concept>> {
        let mut out = match c {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => BTreeSet::new(),
            Concept::Not(a) => self.cover(up.flip(), a)?.into_iter().map(|x| x.negated_nnf()).collect(),
            Concept::And(l, r) | Concept::Or(l, r) => {
                let rebuild = |x: Concept, y: Concept| match c {
                    Concept::And(..) => Concept::and(x, y),
                    _ => Concept::or(x, y),
                };
                let mut out = BTreeSet::new();
                for x in self.zeta_nnf(up, l)? {
                    out.insert(rebuild(x, (**r).clone()));
                }
                for y in self.zeta_nnf(up, r)? {
                    out.insert(rebuild((**l).clone(), y));
                }
                out
            }
            Concept::Exists(role, f) | Concept::ForAll(role, f) => {
                let exists = matches!(c, Concept::Exists(..));
                self.zeta_nnf(up, f)?
                    .into_iter()
                    .map(|x| if exists { Concept::some(role.clone(), x) } else { Concept::all(role.clone(), x) })
                    .collect()
            }
        };
        out.extend(self.cover(up, c)?);
        Ok(out)
    }

    /// γ(c).
    pub fn generalize(&mut self, c: &Concept) -> Result<BTreeSet<Concept>> {
        self.zeta(Direction::Up, c)
    }

    /// ρ(c).
    pub fn specialize(&mut self, c: &Concept) -> Result<BTreeSet<Concept>> {
        self.zeta(Direction::Down, c)
    }

    /// `zeta(dir, c)` without members equivalent to `c`.
    pub fn refine_strict(&mut self, dir: Direction, c: &Concept) -> Result<BTreeSet<Concept>> {
        let all = self.zeta(dir, c)?;
        let mut out = BTreeSet::new();
        for x in all {
            if !self.session.is_equivalent(&x, c)? {
                out.insert(x);
            }
        }
        Ok(out)
    }

    /// `depth` iterations of the operator. Members larger than `size_cap`
    /// are kept but not refined further.
    pub fn refine_iter(
        &mut self,
        dir: Direction,
        c: &Concept,
        depth: usize,
        size_cap: usize,
    ) -> Result<BTreeSet<Concept>> {
        let mut all = BTreeSet::from([c.clone()]);
        let mut frontier = vec![c.clone()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for x in frontier {
                if x.size() > size_cap {
                    continue;
                }
                for y in self.zeta(dir, &x)? {
                    if all.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(all)
    }

    /// Decides `d ∈ cover(c)` with at most `1 + 4·card(sub(T))` subsumption
    /// decisions.
    pub fn cover_membership(&mut self, dir: Direction, c: &Concept, d: &Concept) -> Result<bool> {
        if !self.in_sub(d) {
            return Ok(false);
        }
        let le = |s: &mut Self, x: &Concept, y: &Concept| match dir {
            Direction::Up => s.le(x, y),
            Direction::Down => s.le(y, x),
        };
        if !le(self, c, d)? {
            return Ok(false);
        }
        for i in 0..self.sub.len() {
            let e = self.sub[i].clone();
            if le(self, c, &e)? && le(self, &e, d)? && !le(self, &e, c)? && !le(self, d, &e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn upcov_membership(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        self.cover_membership(Direction::Up, c, d)
    }

    pub fn downcov_membership(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        self.cover_membership(Direction::Down, c, d)
    }

    /// Decides `d ∈ zeta(dir, c)` by following the structure of `c`.
    pub fn refinement_membership(&mut self, dir: Direction, c: &Concept, d: &Concept) -> Result<bool> {
        self.membership_nnf(dir, &c.nnf(), d)
    }

    fn membership_nnf(&mut self, dir: Direction, c: &Concept, d: &Concept) -> Result<bool> {
        let structural = match (c, d) {
            (Concept::Not(a), _) => {
                let mut hit = false;
                for i in 0..self.sub.len() {
                    let x = self.sub[i].clone();
                    if &x.negated_nnf() == d && self.cover_membership(dir.flip(), a, &x)? {
                        hit = true;
                        break;
                    }
                }
                hit
            }
            (Concept::And(l, r), Concept::And(l2, r2)) | (Concept::Or(l, r), Concept::Or(l2, r2))
                if std::mem::discriminant(c) == std::mem::discriminant(d) =>
            {
                (r == r2 && self.membership_nnf(dir, l, l2)?) || (l == l2 && self.membership_nnf(dir, r, r2)?)
            }
            (Concept::Exists(p, f), Concept::Exists(q, g)) | (Concept::ForAll(p, f), Concept::ForAll(q, g))
                if std::mem::discriminant(c) == std::mem::discriminant(d) =>
            {
                p == q && self.membership_nnf(dir, f, g)?
            }
            _ => false,
        };
        Ok(structural || self.cover_membership(dir, c, d)?)
    }

    pub fn gamma_membership(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        self.refinement_membership(Direction::Up, c, d)
    }

    pub fn rho_membership(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        self.refinement_membership(Direction::Down, c, d)
    }
}
