//! Hash-consed NNF concepts used by the tableau.
//!
//! Every interned concept has its NNF negation interned alongside it, so
//! `neg` is a table lookup and structurally equal concepts share one id.

use rustc_hash::FxHashMap;

use crate::concept::Concept;

pub(crate) type CId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    Bottom,
    Atom(u32),
    NegAtom(u32),
    And(CId, CId),
    Or(CId, CId),
    Exists(u32, CId),
    Forall(u32, CId),
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ConceptStore {
    nodes: Vec<Node>,
    neg: Vec<CId>,
    index: FxHashMap<Node, CId>,
    names: Vec<String>,
    name_index: FxHashMap<String, u32>,
    roles: Vec<String>,
    role_index: FxHashMap<String, u32>,
}

impl ConceptStore {
    pub fn new() -> Self {
        let mut s = ConceptStore::default();
        s.mk(Node::Top);
        s
    }

    pub fn node(&self, id: CId) -> Node {
        self.nodes[id as usize]
    }

    pub fn neg(&self, id: CId) -> CId {
        self.neg[id as usize]
    }

    pub fn top(&self) -> CId {
        self.index[&Node::Top]
    }

    pub fn name(&self, atom: u32) -> &str {
        &self.names[atom as usize]
    }

    pub fn role_name(&self, role: u32) -> &str {
        &self.roles[role as usize]
    }

    pub fn name_id(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.name_index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.name_index.insert(name.to_string(), i);
        i
    }

    pub fn role_id(&mut self, role: &str) -> u32 {
        if let Some(&i) = self.role_index.get(role) {
            return i;
        }
        let i = self.roles.len() as u32;
        self.roles.push(role.to_string());
        self.role_index.insert(role.to_string(), i);
        i
    }

    fn negated_node(&self, n: Node) -> Node {
        match n {
            Node::Top => Node::Bottom,
            Node::Bottom => Node::Top,
            Node::Atom(a) => Node::NegAtom(a),
            Node::NegAtom(a) => Node::Atom(a),
            Node::And(l, r) => Node::Or(self.neg(l), self.neg(r)),
            Node::Or(l, r) => Node::And(self.neg(l), self.neg(r)),
            Node::Exists(role, c) => Node::Forall(role, self.neg(c)),
            Node::Forall(role, c) => Node::Exists(role, self.neg(c)),
        }
    }

    /// Interns `n` (whose children must already be interned) and its negation.
    pub fn mk(&mut self, n: Node) -> CId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as CId;
        self.nodes.push(n);
        self.neg.push(id);
        self.index.insert(n, id);
        let nn = self.negated_node(n);
        let nid = self.nodes.len() as CId;
        self.nodes.push(nn);
        self.neg.push(id);
        self.index.insert(nn, nid);
        self.neg[id as usize] = nid;
        id
    }

    /// Interns `nnf(c)`.
    pub fn intern(&mut self, c: &Concept) -> CId {
        match c {
            Concept::Top => self.mk(Node::Top),
            Concept::Bottom => self.mk(Node::Bottom),
            Concept::Atomic(n) => {
                let a = self.name_id(n);
                self.mk(Node::Atom(a))
            }
            Concept::Not(inner) => {
                let id = self.intern(inner);
                self.neg(id)
            }
            Concept::And(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                self.mk(Node::And(l, r))
            }
            Concept::Or(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                self.mk(Node::Or(l, r))
            }
            Concept::ForAll(role, inner) => {
                let role = self.role_id(role);
                let c = self.intern(inner);
                self.mk(Node::Forall(role, c))
            }
            Concept::Exists(role, inner) => {
                let role = self.role_id(role);
                let c = self.intern(inner);
                self.mk(Node::Exists(role, c))
            }
        }
    }

    /// Rebuilds the (NNF) concept for an id.
    #[cfg(test)]
    pub fn concept(&self, id: CId) -> Concept {
        match self.node(id) {
            Node::Top => Concept::Top,
            Node::Bottom => Concept::Bottom,
            Node::Atom(a) => Concept::atomic(self.name(a)),
            Node::NegAtom(a) => Concept::not(Concept::atomic(self.name(a))),
            Node::And(l, r) => Concept::and(self.concept(l), self.concept(r)),
            Node::Or(l, r) => Concept::or(self.concept(l), self.concept(r)),
            Node::Exists(role, c) => Concept::some(self.role_name(role), self.concept(c)),
            Node::Forall(role, c) => Concept::all(self.role_name(role), self.concept(c)),
        }
    }
}
