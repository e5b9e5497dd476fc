//! Tableau procedure for ALC with general TBoxes.
//!
//! GCIs whose left-hand side is (or contains, as a conjunct) a concept name
//! are absorbed and unfolded lazily; everything else is internalised into
//! every node as `¬C ⊔ D`. Disjunctions are expanded with semantic
//! branching and dependency-directed backjumping.
//!
//! Without inverse roles an anonymous element is fully determined by its
//! initial label: the filler of the existential that created it, the
//! fillers of matching universals, and the TBox. Satisfiability of such
//! label sets is memoised per TBox. A set that is still being decided
//! further up the recursion is assumed satisfiable, which plays the role
//! of equality blocking. Satisfiable results that rest on such an
//! assumption are kept only once the assumption is discharged.

use std::rc::Rc;

use indexmap::IndexMap;
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};

use super::store::{CId, ConceptStore, Node};
use crate::concept::Concept;
use crate::error::{Error, Result};

/// The TBox compiled against a concept store.
#[derive(Clone, Debug, Default)]
pub(crate) struct CompiledTbox {
    unfold: FxHashMap<CId, Vec<CId>>,
    universal: Vec<CId>,
}

impl CompiledTbox {
    pub fn compile<'a>(store: &mut ConceptStore, gcis: impl IntoIterator<Item = (&'a Concept, &'a Concept)>) -> Self {
        let mut tbox = CompiledTbox::default();
        for (lhs, rhs) in gcis {
            let l = store.intern(lhs);
            let r = store.intern(rhs);
            tbox.absorb(store, l, r);
        }
        for v in tbox.unfold.values_mut() {
            sort_dedup(v);
        }
        sort_dedup(&mut tbox.universal);
        tbox
    }

    fn absorb(&mut self, store: &mut ConceptStore, lhs: CId, rhs: CId) {
        if matches!(store.node(rhs), Node::Top) || lhs == rhs {
            return;
        }
        match store.node(lhs) {
            Node::Bottom => {}
            Node::Top => self.universal.push(rhs),
            Node::Atom(_) => self.unfold.entry(lhs).or_default().push(rhs),
            Node::Or(a, b) => {
                self.absorb(store, a, rhs);
                self.absorb(store, b, rhs);
            }
            Node::And(..) => {
                let mut conj = Vec::new();
                flatten_and(store, lhs, &mut conj);
                if let Some(pos) = conj.iter().position(|&c| matches!(store.node(c), Node::Atom(_))) {
                    let atom = conj.remove(pos);
                    let rest = conj.into_iter().reduce(|a, b| store.mk(Node::And(a, b)));
                    let body = match rest {
                        Some(rest) => {
                            let n = store.neg(rest);
                            store.mk(Node::Or(n, rhs))
                        }
                        None => rhs,
                    };
                    self.unfold.entry(atom).or_default().push(body);
                } else {
                    self.internalise(store, lhs, rhs);
                }
            }
            _ => self.internalise(store, lhs, rhs),
        }
    }

    fn internalise(&mut self, store: &mut ConceptStore, lhs: CId, rhs: CId) {
        let n = store.neg(lhs);
        let c = store.mk(Node::Or(n, rhs));
        self.universal.push(c);
    }

    pub fn universal(&self) -> &[CId] {
        &self.universal
    }
}

fn flatten_and(store: &ConceptStore, c: CId, out: &mut Vec<CId>) {
    match store.node(c) {
        Node::And(l, r) => {
            flatten_and(store, l, out);
            flatten_and(store, r, out);
        }
        _ => out.push(c),
    }
}

fn sort_dedup(v: &mut Vec<CId>) {
    v.sort_unstable();
    v.dedup();
}

/// A set of branch points a fact depends on.
#[derive(Clone, Debug, Default)]
struct Deps(Option<Rc<Vec<u32>>>);

impl Deps {
    fn single(b: u32) -> Self {
        Deps(Some(Rc::new(vec![b])))
    }

    fn as_slice(&self) -> &[u32] {
        self.0.as_deref().map_or(&[], |v| v.as_slice())
    }

    fn contains(&self, b: u32) -> bool {
        self.as_slice().binary_search(&b).is_ok()
    }

    fn union(&self, other: &Deps) -> Deps {
        let (a, b) = (self.as_slice(), other.as_slice());
        if b.is_empty() {
            return self.clone();
        }
        if a.is_empty() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Deps(Some(Rc::new(out)))
    }

    fn without(&self, b: u32) -> Deps {
        let v: Vec<u32> = self.as_slice().iter().copied().filter(|&x| x != b).collect();
        if v.is_empty() {
            Deps(None)
        } else {
            Deps(Some(Rc::new(v)))
        }
    }
}

#[derive(Clone, Debug)]
struct Edge {
    role: u32,
    target: usize,
    deps: Deps,
}

#[derive(Clone, Debug, Default)]
struct TNode {
    label: IndexMap<CId, Deps, FxBuildHasher>,
    ors: Vec<CId>,
    exists: Vec<CId>,
    foralls: Vec<CId>,
    edges: Vec<Edge>,
}

/// Local completion state: the named elements of a query, or the single
/// anonymous element whose label set is being decided.
#[derive(Clone, Debug, Default)]
struct State {
    nodes: Vec<TNode>,
    todo: Vec<(usize, CId, Deps)>,
}

impl State {
    fn push(&mut self, x: usize, c: CId, d: Deps) {
        self.todo.push((x, c, d));
    }

    fn add_edge(&mut self, store: &ConceptStore, from: usize, role: u32, to: usize, deps: Deps) {
        for i in 0..self.nodes[from].foralls.len() {
            let f = self.nodes[from].foralls[i];
            if let Node::Forall(r, filler) = store.node(f) {
                if r == role {
                    let d = self.nodes[from].label[&f].union(&deps);
                    self.todo.push((to, filler, d));
                }
            }
        }
        self.nodes[from].edges.push(Edge { role, target: to, deps });
    }
}

/// Sorted initial label of an anonymous element, without `⊤` and the
/// universal concepts every element carries.
type Key = Vec<CId>;

#[derive(Clone, Debug)]
struct Witness {
    label: Vec<CId>,
    children: Vec<(u32, Key)>,
}

/// Memoised satisfiability of label sets, valid for one compiled TBox.
#[derive(Clone, Debug, Default)]
pub(crate) struct SatCache {
    status: FxHashMap<Key, bool>,
    witness: FxHashMap<Key, Witness>,
}

/// Named part of a query: one root per individual (or query element) with
/// its asserted concepts, plus asserted role edges.
#[derive(Clone, Debug, Default)]
pub(crate) struct Query {
    pub roots: Vec<Vec<CId>>,
    pub edges: Vec<(usize, u32, usize)>,
}

/// A finite model read off a successful run. Named elements come first,
/// followed by one element per reachable anonymous label set.
#[derive(Clone, Debug)]
pub(crate) struct Completion {
    labels: Vec<FxHashSet<CId>>,
    succ: Vec<Vec<(u32, usize)>>,
}

impl Completion {
    pub fn element_count(&self) -> usize {
        self.labels.len()
    }

    /// Whether element `x` belongs to the extension of `c` in the model.
    pub fn holds(&self, store: &ConceptStore, x: usize, c: CId) -> bool {
        let mut memo = FxHashMap::default();
        self.holds_memo(store, x, c, &mut memo)
    }

    fn holds_memo(&self, store: &ConceptStore, x: usize, c: CId, memo: &mut FxHashMap<(usize, CId), bool>) -> bool {
        if let Some(&v) = memo.get(&(x, c)) {
            return v;
        }
        let v = match store.node(c) {
            Node::Top => true,
            Node::Bottom => false,
            Node::Atom(_) => self.labels[x].contains(&c),
            Node::NegAtom(_) => !self.labels[x].contains(&store.neg(c)),
            Node::And(l, r) => self.holds_memo(store, x, l, memo) && self.holds_memo(store, x, r, memo),
            Node::Or(l, r) => self.holds_memo(store, x, l, memo) || self.holds_memo(store, x, r, memo),
            Node::Exists(role, f) => self.succ[x].iter().any(|&(r, y)| r == role && self.holds_memo(store, y, f, memo)),
            Node::Forall(role, f) => self.succ[x].iter().all(|&(r, y)| r != role || self.holds_memo(store, y, f, memo)),
        };
        memo.insert((x, c), v);
        v
    }

    pub fn atoms(&self, store: &ConceptStore, x: usize) -> Vec<u32> {
        let mut v: Vec<u32> = self.labels[x]
            .iter()
            .filter_map(|&c| match store.node(c) {
                Node::Atom(a) => Some(a),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v
    }

    pub fn successors(&self, x: usize) -> &[(u32, usize)] {
        &self.succ[x]
    }
}

type Children = Vec<(usize, u32, Key)>;

enum Outcome {
    Sat(State, Children),
    Clash,
}

enum Step {
    Progress,
    Branch(usize, CId, Deps),
    Done,
}

struct Choice {
    saved: State,
    x: usize,
    or: CId,
    deps: Deps,
    b: u32,
}

/// Deepest nesting of anonymous label sets decided at once.
const MAX_NESTING: usize = 1000;

pub(crate) struct Tableau<'a> {
    store: &'a ConceptStore,
    tbox: &'a CompiledTbox,
    cache: &'a mut SatCache,
    budget: usize,
    created: usize,
    next_branch: u32,
    /// Label sets being decided, with their nesting depth.
    open: FxHashMap<Key, usize>,
    /// Shallowest open set the current decision assumed satisfiable.
    leaned_on: usize,
    /// Sets found satisfiable on the assumption that the open set at the
    /// given depth is.
    tentative: FxHashMap<Key, usize>,
    /// Witness writes with their previous values, undone when an
    /// enclosing set turns out unsatisfiable.
    log: Vec<(Key, Option<Witness>)>,
}

impl<'a> Tableau<'a> {
    pub fn new(store: &'a ConceptStore, tbox: &'a CompiledTbox, cache: &'a mut SatCache, budget: usize) -> Self {
        Tableau {
            store,
            tbox,
            cache,
            budget,
            created: 0,
            next_branch: 0,
            open: FxHashMap::default(),
            leaned_on: usize::MAX,
            tentative: FxHashMap::default(),
            log: Vec::new(),
        }
    }

    fn key(&self, concepts: impl IntoIterator<Item = CId>) -> Key {
        let top = self.store.top();
        let mut k: Key =
            concepts.into_iter().filter(|&c| c != top && self.tbox.universal.binary_search(&c).is_err()).collect();
        sort_dedup(&mut k);
        k
    }

    fn charge(&mut self) -> Result<()> {
        self.created += 1;
        if self.created > self.budget {
            return Err(Error::ResourceLimit { budget: self.budget });
        }
        Ok(())
    }

    fn fresh_node(&mut self, st: &mut State) -> Result<usize> {
        self.charge()?;
        let x = st.nodes.len();
        st.nodes.push(TNode::default());
        st.push(x, self.store.top(), Deps::default());
        for &u in self.tbox.universal() {
            st.push(x, u, Deps::default());
        }
        Ok(x)
    }

    /// Satisfiability of one anonymous element carrying `concepts`.
    pub fn satisfiable(&mut self, concepts: &[CId]) -> Result<bool> {
        let key = self.key(concepts.iter().copied());
        self.sat_key(key)
    }

    fn sat_key(&mut self, key: Key) -> Result<bool> {
        if let Some(&b) = self.cache.status.get(&key) {
            return Ok(b);
        }
        if let Some(&d) = self.open.get(&key).or_else(|| self.tentative.get(&key)) {
            self.leaned_on = self.leaned_on.min(d);
            return Ok(true);
        }
        let depth = self.open.len();
        if depth >= MAX_NESTING {
            return Err(Error::ResourceLimit { budget: self.budget });
        }
        self.open.insert(key.clone(), depth);
        let outer = std::mem::replace(&mut self.leaned_on, usize::MAX);
        let mark = self.log.len();
        let mut st = State::default();
        let result = self.fresh_node(&mut st).and_then(|x| {
            for &c in &key {
                st.push(x, c, Deps::default());
            }
            self.solve(st)
        });
        self.open.remove(&key);
        let result = match result {
            Ok(r) => r,
            Err(e) => {
                self.leaned_on = outer;
                return Err(e);
            }
        };
        match result {
            Outcome::Sat(st, children) => {
                let label = st.nodes[0].label.keys().copied().collect();
                let children = children.into_iter().map(|(_, r, k)| (r, k)).collect();
                let old = self.cache.witness.insert(key.clone(), Witness { label, children });
                self.log.push((key.clone(), old));
                let lean = self.leaned_on;
                if lean >= depth {
                    // Everything decided since this set was opened rests
                    // on sets that are now known to be satisfiable.
                    for (k, _) in self.log.drain(mark..) {
                        self.tentative.remove(&k);
                        self.cache.status.insert(k, true);
                    }
                    self.leaned_on = outer;
                } else {
                    for (k, _) in &self.log[mark..] {
                        let d = self.tentative.entry(k.clone()).or_insert(lean);
                        if *d >= depth {
                            *d = lean;
                        }
                    }
                    self.leaned_on = lean.min(outer);
                }
                Ok(true)
            }
            Outcome::Clash => {
                // Anything decided while this set was assumed satisfiable
                // may depend on it.
                for (k, old) in self.log.drain(mark..).rev() {
                    if self.cache.status.get(&k) == Some(&true) {
                        continue;
                    }
                    self.tentative.remove(&k);
                    match old {
                        Some(w) => self.cache.witness.insert(k, w),
                        None => self.cache.witness.remove(&k),
                    };
                }
                self.cache.witness.remove(&key);
                self.cache.status.insert(key, false);
                self.leaned_on = outer;
                Ok(false)
            }
        }
    }

    /// Runs a named query; `Ok(None)` means every branch closed.
    pub fn run(&mut self, query: &Query) -> Result<Option<Completion>> {
        let mut st = State::default();
        for concepts in &query.roots {
            let x = self.fresh_node(&mut st)?;
            for &c in concepts {
                st.push(x, c, Deps::default());
            }
        }
        for &(from, role, to) in &query.edges {
            st.add_edge(self.store, from, role, to, Deps::default());
        }
        match self.solve(st)? {
            Outcome::Sat(st, children) => {
                let labels = st.nodes.iter().map(|n| n.label.keys().copied().collect()).collect();
                let succ = st.nodes.iter().map(|n| n.edges.iter().map(|e| (e.role, e.target)).collect()).collect();
                Ok(Some(self.assemble(labels, succ, children)))
            }
            Outcome::Clash => Ok(None),
        }
    }

    /// A model whose first element carries `concepts`, if there is one.
    pub fn model(&mut self, concepts: &[CId]) -> Result<Option<Completion>> {
        let key = self.key(concepts.iter().copied());
        if !self.sat_key(key.clone())? {
            return Ok(None);
        }
        Ok(Some(self.assemble(Vec::new(), Vec::new(), vec![(usize::MAX, 0, key)])))
    }

    /// Appends one element per label set reachable from `children`. An
    /// entry with source `usize::MAX` only introduces its element.
    fn assemble(
        &self,
        mut labels: Vec<FxHashSet<CId>>,
        mut succ: Vec<Vec<(u32, usize)>>,
        children: Children,
    ) -> Completion {
        let mut index: FxHashMap<Key, usize> = FxHashMap::default();
        let mut queue: Vec<(usize, Key)> = Vec::new();
        let mut element = |k: Key,
                           labels: &mut Vec<FxHashSet<CId>>,
                           succ: &mut Vec<Vec<(u32, usize)>>,
                           queue: &mut Vec<(usize, Key)>| {
            *index.entry(k.clone()).or_insert_with(|| {
                labels.push(FxHashSet::default());
                succ.push(Vec::new());
                queue.push((labels.len() - 1, k));
                labels.len() - 1
            })
        };
        for (x, r, k) in children {
            let y = element(k, &mut labels, &mut succ, &mut queue);
            if x != usize::MAX {
                succ[x].push((r, y));
            }
        }
        let mut next = 0;
        while next < queue.len() {
            let (y, k) = queue[next].clone();
            next += 1;
            let w = &self.cache.witness[&k];
            labels[y] = w.label.iter().copied().collect();
            for (r, ck) in &w.children {
                let z = element(ck.clone(), &mut labels, &mut succ, &mut queue);
                succ[y].push((*r, z));
            }
        }
        Completion { labels, succ }
    }

    fn solve(&mut self, mut st: State) -> Result<Outcome> {
        let mut choices: Vec<Choice> = Vec::new();
        loop {
            let clash = match self.saturate(&mut st) {
                Err(d) => d,
                Ok(Step::Branch(x, or, deps)) => {
                    let Node::Or(d1, _) = self.store.node(or) else { unreachable!() };
                    let b = self.next_branch;
                    self.next_branch += 1;
                    choices.push(Choice { saved: st.clone(), x, or, deps: deps.clone(), b });
                    st.push(x, d1, deps.union(&Deps::single(b)));
                    continue;
                }
                Ok(_) => match self.expand_exists(&st)? {
                    Ok(children) => return Ok(Outcome::Sat(st, children)),
                    Err(d) => d,
                },
            };
            // Backjump to the latest choice the clash depends on.
            loop {
                let Some(c) = choices.pop() else {
                    return Ok(Outcome::Clash);
                };
                if clash.contains(c.b) {
                    let Node::Or(d1, d2) = self.store.node(c.or) else { unreachable!() };
                    let dd = c.deps.union(&clash.without(c.b));
                    st = c.saved;
                    st.push(c.x, self.store.neg(d1), dd.clone());
                    st.push(c.x, d2, dd);
                    break;
                }
            }
        }
    }

    /// Deterministic rules and unit propagation to a fixpoint, then the
    /// next branching point, if any.
    fn saturate(&self, st: &mut State) -> std::result::Result<Step, Deps> {
        loop {
            self.propagate(st)?;
            match self.select_disjunction(st) {
                Step::Progress => continue,
                other => return Ok(other),
            }
        }
    }

    fn propagate(&self, st: &mut State) -> std::result::Result<(), Deps> {
        let store = self.store;
        while let Some((x, c, d)) = st.todo.pop() {
            if st.nodes[x].label.contains_key(&c) {
                continue;
            }
            if let Some(nd) = st.nodes[x].label.get(&store.neg(c)) {
                return Err(d.union(nd));
            }
            st.nodes[x].label.insert(c, d.clone());
            match store.node(c) {
                Node::Bottom => return Err(d),
                Node::Top | Node::NegAtom(_) => {}
                Node::Atom(_) => {
                    if let Some(bodies) = self.tbox.unfold.get(&c) {
                        for &b in bodies {
                            st.push(x, b, d.clone());
                        }
                    }
                }
                Node::And(l, r) => {
                    st.push(x, l, d.clone());
                    st.push(x, r, d);
                }
                Node::Or(..) => st.nodes[x].ors.push(c),
                Node::Exists(..) => st.nodes[x].exists.push(c),
                Node::Forall(role, filler) => {
                    st.nodes[x].foralls.push(c);
                    for i in 0..st.nodes[x].edges.len() {
                        let e = &st.nodes[x].edges[i];
                        if e.role == role {
                            let (t, dd) = (e.target, d.union(&e.deps));
                            st.push(t, filler, dd);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Drops satisfied disjunctions and propagates those with a refuted
    /// disjunct. Otherwise picks a branching point.
    fn select_disjunction(&self, st: &mut State) -> Step {
        let store = self.store;
        let mut choice = None;
        for x in 0..st.nodes.len() {
            let node = &mut st.nodes[x];
            let mut progress = false;
            let mut i = 0;
            while i < node.ors.len() {
                let or = node.ors[i];
                let Node::Or(d1, d2) = store.node(or) else { unreachable!() };
                if node.label.contains_key(&d1) || node.label.contains_key(&d2) {
                    node.ors.swap_remove(i);
                    continue;
                }
                let forced = match (node.label.get(&store.neg(d1)), node.label.get(&store.neg(d2))) {
                    (Some(n1), Some(n2)) => Some((d2, n1.union(n2))),
                    (Some(n1), None) => Some((d2, n1.clone())),
                    (None, Some(n2)) => Some((d1, n2.clone())),
                    (None, None) => None,
                };
                match forced {
                    Some((d, why)) => {
                        let deps = node.label[&or].union(&why);
                        st.todo.push((x, d, deps));
                        progress = true;
                        node.ors.swap_remove(i);
                    }
                    None => {
                        if choice.is_none() {
                            choice = Some((x, or, node.label[&or].clone()));
                        }
                        i += 1;
                    }
                }
            }
            if progress {
                return Step::Progress;
            }
        }
        match choice {
            Some((x, or, d)) => Step::Branch(x, or, d),
            None => Step::Done,
        }
    }

    /// Decides the label set of every successor demanded by an existential
    /// that no named neighbour satisfies. On failure returns the
    /// dependencies of the existential and of the universals involved.
    fn expand_exists(&mut self, st: &State) -> Result<std::result::Result<Children, Deps>> {
        let store = self.store;
        let mut children = Vec::new();
        for (x, node) in st.nodes.iter().enumerate() {
            for &ex in &node.exists {
                let Node::Exists(role, filler) = store.node(ex) else { unreachable!() };
                let by_neighbour =
                    node.edges.iter().any(|e| e.role == role && st.nodes[e.target].label.contains_key(&filler));
                if by_neighbour {
                    continue;
                }
                let mut concepts = vec![filler];
                let mut deps = node.label[&ex].clone();
                for &f in &node.foralls {
                    if let Node::Forall(r, g) = store.node(f) {
                        if r == role {
                            concepts.push(g);
                            deps = deps.union(&node.label[&f]);
                        }
                    }
                }
                let key = self.key(concepts);
                if !self.sat_key(key.clone())? {
                    return Ok(Err(deps));
                }
                children.push((x, role, key));
            }
        }
        Ok(Ok(children))
    }
}
