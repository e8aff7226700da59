//! Finite nontrivial out-trees.
//!
//! Nodes are stored in term order and addressed internally by index; the
//! public surface speaks in [`Term`]s.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("DanglingEdge: edge ({from},{to}) has an endpoint outside the node set")]
    DanglingEdge { from: Term, to: Term },
    #[error("NotAntisymmetric: edges ({a},{b}) and ({b},{a}) are both present")]
    NotAntisymmetric { a: Term, b: Term },
    #[error("Trivial: the edge set is empty")]
    Trivial,
    #[error("NoRoot: no node lacks an incoming edge")]
    NoRoot,
    #[error("MultipleRoots: several nodes lack an incoming edge: {candidates:?}")]
    MultipleRoots { candidates: Vec<Term> },
    #[error("HasCycle: edge ({from},{to}) closes a cycle")]
    HasCycle { from: Term, to: Term },
    #[error("NotConnected: node {node} is not connected to the root")]
    NotConnected { node: Term },
    #[error("UnknownNode: {0}")]
    UnknownNode(Term),
    #[error("NoNodes: the node set is empty")]
    NoNodes,
}

#[derive(Clone, PartialEq, Eq)]
pub struct OutTree {
    nodes: Vec<Term>,
    index: BTreeMap<Term, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    subtree: Vec<usize>,
    root: usize,
}

impl std::fmt::Debug for OutTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OutTree")
            .field("root", &self.nodes[self.root])
            .field("edges", &self.edges())
            .finish()
    }
}

fn find(uf: &mut [usize], mut i: usize) -> usize {
    while uf[i] != i {
        uf[i] = uf[uf[i]];
        i = uf[i];
    }
    i
}

/// Validates `(X, E)` as a nontrivial out-tree and derives its root,
/// predecessor function and decision/end split.
pub fn validate_out_tree(nodes: &BTreeSet<Term>, edges: &BTreeSet<(Term, Term)>) -> Result<OutTree, TreeError> {
    if nodes.is_empty() {
        return Err(TreeError::NoNodes);
    }
    let list: Vec<Term> = nodes.iter().cloned().collect();
    let index: BTreeMap<Term, usize> = list.iter().cloned().zip(0..).collect();

    let mut pairs = Vec::with_capacity(edges.len());
    for (from, to) in edges {
        match (index.get(from), index.get(to)) {
            (Some(&a), Some(&b)) => pairs.push((a, b)),
            _ => {
                return Err(TreeError::DanglingEdge {
                    from: from.clone(),
                    to: to.clone(),
                })
            }
        }
    }
    for (from, to) in edges {
        if from == to || edges.contains(&(to.clone(), from.clone())) {
            return Err(TreeError::NotAntisymmetric {
                a: from.clone(),
                b: to.clone(),
            });
        }
    }
    if pairs.is_empty() {
        return Err(TreeError::Trivial);
    }

    let n = list.len();
    let mut has_incoming = vec![false; n];
    for &(_, b) in &pairs {
        has_incoming[b] = true;
    }
    let roots: Vec<usize> = (0..n).filter(|&i| !has_incoming[i]).collect();
    let root = match roots.as_slice() {
        [] => return Err(TreeError::NoRoot),
        [r] => *r,
        many => {
            return Err(TreeError::MultipleRoots {
                candidates: many.iter().map(|&i| list[i].clone()).collect(),
            })
        }
    };

    let mut uf: Vec<usize> = (0..n).collect();
    for &(a, b) in &pairs {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            return Err(TreeError::HasCycle {
                from: list[a].clone(),
                to: list[b].clone(),
            });
        }
        uf[ra] = rb;
    }
    let root_class = find(&mut uf, root);
    if let Some(stray) = (0..n).find(|&i| find(&mut uf, i) != root_class) {
        return Err(TreeError::NotConnected {
            node: list[stray].clone(),
        });
    }

    // Acyclic, connected, and every non-root node has an incoming edge:
    // with |E| = |X| - 1 each non-root node has exactly one parent.
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for &(a, b) in &pairs {
        parent[b] = Some(a);
        children[a].push(b);
    }
    for c in &mut children {
        c.sort_unstable();
    }

    let mut order = vec![root];
    let mut depth = vec![0; n];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for &c in &children[x] {
            depth[c] = depth[x] + 1;
            order.push(c);
        }
        i += 1;
    }
    let mut subtree = vec![1; n];
    for &x in order.iter().rev() {
        if let Some(p) = parent[x] {
            subtree[p] += subtree[x];
        }
    }

    Ok(OutTree {
        nodes: list,
        index,
        parent,
        children,
        depth,
        subtree,
        root,
    })
}

impl OutTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Term] {
        &self.nodes
    }

    pub fn node_set(&self) -> BTreeSet<Term> {
        self.nodes.iter().cloned().collect()
    }

    pub fn node(&self, i: usize) -> &Term {
        &self.nodes[i]
    }

    pub fn index_of(&self, x: &Term) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub(crate) fn require(&self, x: &Term) -> Result<usize, TreeError> {
        self.index_of(x).ok_or_else(|| TreeError::UnknownNode(x.clone()))
    }

    pub fn root(&self) -> &Term {
        &self.nodes[self.root]
    }

    pub fn root_index(&self) -> usize {
        self.root
    }

    pub fn parent_index(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// `p(y)`, or `None` at the root.
    pub fn pred(&self, y: &Term) -> Result<Option<&Term>, TreeError> {
        let i = self.require(y)?;
        Ok(self.parent[i].map(|p| &self.nodes[p]))
    }

    pub fn children_indices(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// Number of nodes in the subtree rooted at `i`, including `i`.
    pub fn subtree_size(&self, i: usize) -> usize {
        self.subtree[i]
    }

    pub fn is_decision_index(&self, i: usize) -> bool {
        !self.children[i].is_empty()
    }

    pub fn is_decision(&self, x: &Term) -> bool {
        self.index_of(x).is_some_and(|i| self.is_decision_index(i))
    }

    pub fn decision_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_decision_index(i))
    }

    pub fn end_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.is_decision_index(i))
    }

    /// `W`, the nodes with outgoing edges.
    pub fn decision_nodes(&self) -> BTreeSet<Term> {
        self.decision_indices().map(|i| self.nodes[i].clone()).collect()
    }

    pub fn end_nodes(&self) -> BTreeSet<Term> {
        self.end_indices().map(|i| self.nodes[i].clone()).collect()
    }

    pub fn edges(&self) -> BTreeSet<(Term, Term)> {
        (0..self.len())
            .filter_map(|y| self.parent[y].map(|x| (self.nodes[x].clone(), self.nodes[y].clone())))
            .collect()
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).filter_map(|y| self.parent[y].map(|x| (x, y)))
    }

    pub fn leq_index(&self, x: usize, mut y: usize) -> bool {
        if self.depth[x] > self.depth[y] {
            return false;
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].expect("non-root has a parent");
        }
        x == y
    }

    /// `x ⪯ y`: `x` lies on the root path of `y`.
    pub fn leq(&self, x: &Term, y: &Term) -> Result<bool, TreeError> {
        Ok(self.leq_index(self.require(x)?, self.require(y)?))
    }

    /// Root path of `y`, from the root to `y` inclusive.
    pub fn path_indices(&self, y: usize) -> Vec<usize> {
        let mut path = vec![y];
        let mut cur = y;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// `P(y)` in root-to-`y` order.
    pub fn strict_predecessors(&self, y: &Term) -> Result<Vec<Term>, TreeError> {
        let i = self.require(y)?;
        let mut path = self.path_indices(i);
        path.pop();
        Ok(path.into_iter().map(|j| self.nodes[j].clone()).collect())
    }

    /// The node set of the run ending at end node `end`.
    pub fn run_of_end(&self, end: usize) -> BTreeSet<Term> {
        self.path_indices(end)
            .into_iter()
            .map(|j| self.nodes[j].clone())
            .collect()
    }

    /// `Z`: all root-to-end paths, ordered by end node.
    pub fn runs(&self) -> Vec<BTreeSet<Term>> {
        self.end_indices().map(|e| self.run_of_end(e)).collect()
    }

    /// End node of a run given as a node set, if it is one.
    pub fn run_end(&self, run: &BTreeSet<Term>) -> Option<usize> {
        let deepest = run
            .iter()
            .map(|x| self.index_of(x))
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .max_by_key(|&i| self.depth[i])?;
        (!self.is_decision_index(deepest) && self.run_of_end(deepest) == *run).then_some(deepest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::atoms;

    fn edges(pairs: &[(&str, &str)]) -> BTreeSet<(Term, Term)> {
        pairs.iter().map(|&(a, b)| (Term::atom(a), Term::atom(b))).collect()
    }

    fn chain() -> OutTree {
        validate_out_tree(&atoms(["0", "1", "2"]), &edges(&[("0", "1"), ("1", "2")])).unwrap()
    }

    #[test]
    fn fork_tree() {
        let t = validate_out_tree(&atoms(["0", "1", "2"]), &edges(&[("0", "1"), ("0", "2")])).unwrap();
        assert_eq!(t.root(), &Term::atom("0"));
        assert_eq!(t.decision_nodes(), atoms(["0"]));
        assert_eq!(t.end_nodes(), atoms(["1", "2"]));
        assert_eq!(t.runs(), vec![atoms(["0", "1"]), atoms(["0", "2"])]);
    }

    #[test]
    fn rejects_bad_trees() {
        assert_eq!(
            validate_out_tree(&atoms(["0"]), &BTreeSet::new()),
            Err(TreeError::Trivial)
        );
        assert!(matches!(
            validate_out_tree(&atoms(["0", "1"]), &edges(&[("0", "1"), ("1", "0")])),
            Err(TreeError::NotAntisymmetric { .. })
        ));
        assert!(matches!(
            validate_out_tree(&atoms(["0", "1"]), &edges(&[("0", "5")])),
            Err(TreeError::DanglingEdge { .. })
        ));
        assert!(matches!(
            validate_out_tree(&atoms(["0", "1", "2", "3"]), &edges(&[("0", "1"), ("2", "3")])),
            Err(TreeError::MultipleRoots { .. })
        ));
        assert!(matches!(
            validate_out_tree(&atoms(["0", "1", "2"]), &edges(&[("0", "1"), ("1", "2"), ("0", "2")])),
            Err(TreeError::HasCycle { .. })
        ));
        assert!(matches!(
            validate_out_tree(&atoms(["1", "2"]), &edges(&[("1", "2"), ("2", "1")])),
            Err(TreeError::NotAntisymmetric { .. })
        ));
        // 1 -> 2 -> 3 -> 1 plus isolated root 0: every cycle node has a parent.
        assert!(matches!(
            validate_out_tree(
                &atoms(["0", "1", "2", "3", "4"]),
                &edges(&[("0", "4"), ("1", "2"), ("2", "3"), ("3", "1")])
            ),
            Err(TreeError::HasCycle { .. })
        ));
        assert_eq!(
            validate_out_tree(&BTreeSet::new(), &BTreeSet::new()),
            Err(TreeError::NoNodes)
        );
    }

    #[test]
    fn order_and_predecessors() {
        let t = chain();
        let n = |s: &str| Term::atom(s);
        assert!(t.leq(&n("0"), &n("2")).unwrap());
        assert!(!t.leq(&n("2"), &n("0")).unwrap());
        assert!(t.leq(&n("1"), &n("1")).unwrap());
        assert_eq!(t.strict_predecessors(&n("2")).unwrap(), vec![n("0"), n("1")]);
        assert!(t.strict_predecessors(&n("0")).unwrap().is_empty());
        assert_eq!(t.runs(), vec![atoms(["0", "1", "2"])]);
        assert!(matches!(t.leq(&n("7"), &n("0")), Err(TreeError::UnknownNode(_))));
        assert_eq!(t.run_end(&atoms(["0", "1", "2"])), Some(2));
        assert_eq!(t.run_end(&atoms(["0", "1"])), None);
        assert_eq!(t.subtree_size(0), 3);
    }
}
