//! Continuously labeled trees: an out-tree with an information partition of
//! its decision nodes and a deterministic edge labeling whose feasible sets
//! are constant on every information set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::Term;
use crate::tree::{OutTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionFault {
    EmptyCell,
    /// A node listed in two cells.
    Overlap(Term),
    /// A cell member that is an end node or not a node at all.
    NotDecision(Term),
    /// A decision node in no cell.
    Uncovered(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CltError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("PartitionBad: information sets do not partition the decision nodes: {0:?}")]
    PartitionBad(PartitionFault),
    #[error("LabelMissing: edge ({from},{to}) has no label")]
    LabelMissing { from: Term, to: Term },
    #[error("LabelExtraneous: label given for ({from},{to}), which is not an edge")]
    LabelExtraneous { from: Term, to: Term },
    #[error("NonDeterministic: two edges leaving {node} carry the label {action}")]
    NonDeterministic { node: Term, action: Term },
    #[error("FeasibilityNotConstant: feasible sets differ at {x1} and {x2} inside one information set")]
    FeasibilityNotConstant { x1: Term, x2: Term },
    #[error("NotDecision: {0} is not a decision node")]
    NotDecision(Term),
    #[error("NotFeasible: action {action} is not feasible at {node}")]
    NotFeasible { node: Term, action: Term },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Clt {
    tree: OutTree,
    infosets: Vec<Vec<usize>>,
    info_of: Vec<Option<usize>>,
    label: Vec<Option<Term>>,
    feasible: Vec<BTreeMap<Term, usize>>,
    actions: BTreeSet<Term>,
}

impl std::fmt::Debug for Clt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Clt")
            .field("tree", &self.tree)
            .field("infosets", &self.infosets())
            .finish()
    }
}

/// Validates `(X, E, H, λ)` given a validated tree.
///
/// Checks run in a fixed order: labels total on `E`, `H` a partition of `W`,
/// determinism, then feasibility constancy.
pub fn validate_clt(
    tree: OutTree,
    infosets: &[BTreeSet<Term>],
    labels: &BTreeMap<(Term, Term), Term>,
) -> Result<Clt, CltError> {
    let n = tree.len();
    let mut label: Vec<Option<Term>> = vec![None; n];
    for ((from, to), a) in labels {
        let edge = match (tree.index_of(from), tree.index_of(to)) {
            (Some(x), Some(y)) if tree.parent_index(y) == Some(x) => y,
            _ => {
                return Err(CltError::LabelExtraneous {
                    from: from.clone(),
                    to: to.clone(),
                })
            }
        };
        label[edge] = Some(a.clone());
    }
    for (x, y) in tree.edge_indices() {
        if label[y].is_none() {
            return Err(CltError::LabelMissing {
                from: tree.node(x).clone(),
                to: tree.node(y).clone(),
            });
        }
    }

    let mut info_of: Vec<Option<usize>> = vec![None; n];
    let mut cells: Vec<BTreeSet<Term>> = Vec::with_capacity(infosets.len());
    for cell in infosets {
        if cell.is_empty() {
            return Err(CltError::PartitionBad(PartitionFault::EmptyCell));
        }
        for x in cell {
            match tree.index_of(x) {
                Some(i) if tree.is_decision_index(i) => {
                    if info_of[i].is_some() {
                        return Err(CltError::PartitionBad(PartitionFault::Overlap(x.clone())));
                    }
                    info_of[i] = Some(usize::MAX);
                }
                _ => return Err(CltError::PartitionBad(PartitionFault::NotDecision(x.clone()))),
            }
        }
        cells.push(cell.clone());
    }
    if let Some(i) = tree.decision_indices().find(|&i| info_of[i].is_none()) {
        return Err(CltError::PartitionBad(PartitionFault::Uncovered(tree.node(i).clone())));
    }
    cells.sort();
    let infosets: Vec<Vec<usize>> = cells
        .iter()
        .map(|cell| cell.iter().map(|x| tree.index_of(x).unwrap()).collect())
        .collect();
    for (h, cell) in infosets.iter().enumerate() {
        for &i in cell {
            info_of[i] = Some(h);
        }
    }

    let mut feasible: Vec<BTreeMap<Term, usize>> = vec![BTreeMap::new(); n];
    for x in tree.decision_indices() {
        for &y in tree.children_indices(x) {
            let a = label[y].clone().expect("labels checked total");
            if feasible[x].insert(a.clone(), y).is_some() {
                return Err(CltError::NonDeterministic {
                    node: tree.node(x).clone(),
                    action: a,
                });
            }
        }
    }
    for cell in &infosets {
        let first = cell[0];
        for &other in &cell[1..] {
            if !feasible[first].keys().eq(feasible[other].keys()) {
                return Err(CltError::FeasibilityNotConstant {
                    x1: tree.node(first).clone(),
                    x2: tree.node(other).clone(),
                });
            }
        }
    }
    let actions = label.iter().flatten().cloned().collect();

    Ok(Clt {
        tree,
        infosets,
        info_of,
        label,
        feasible,
        actions,
    })
}

impl Clt {
    pub fn tree(&self) -> &OutTree {
        &self.tree
    }

    /// `A`, the image of the labeling.
    pub fn actions(&self) -> &BTreeSet<Term> {
        &self.actions
    }

    pub fn infoset_count(&self) -> usize {
        self.infosets.len()
    }

    /// Members of infoset `h` (ascending node index, i.e. term order).
    pub fn infoset_members(&self, h: usize) -> &[usize] {
        &self.infosets[h]
    }

    pub fn infoset_terms(&self, h: usize) -> BTreeSet<Term> {
        self.infosets[h].iter().map(|&i| self.tree.node(i).clone()).collect()
    }

    /// `H`, in term order of the cells.
    pub fn infosets(&self) -> Vec<BTreeSet<Term>> {
        (0..self.infosets.len()).map(|h| self.infoset_terms(h)).collect()
    }

    pub fn info_of_index(&self, i: usize) -> Option<usize> {
        self.info_of[i]
    }

    pub fn infoset_index(&self, cell: &BTreeSet<Term>) -> Option<usize> {
        let first = self.tree.index_of(cell.iter().next()?)?;
        let h = self.info_of[first]?;
        (self.infoset_terms(h) == *cell).then_some(h)
    }

    /// The information set containing decision node `x`.
    pub fn infoset_of(&self, x: &Term) -> Result<BTreeSet<Term>, CltError> {
        let i = self.tree.require(x)?;
        let h = self.info_of[i].ok_or_else(|| CltError::NotDecision(x.clone()))?;
        Ok(self.infoset_terms(h))
    }

    /// Label of the edge entering node `y`.
    pub fn label_into(&self, y: usize) -> Option<&Term> {
        self.label[y].as_ref()
    }

    pub fn label(&self, from: &Term, to: &Term) -> Option<&Term> {
        let (x, y) = (self.tree.index_of(from)?, self.tree.index_of(to)?);
        (self.tree.parent_index(y) == Some(x))
            .then(|| self.label[y].as_ref())
            .flatten()
    }

    /// `λ` as a map from edges.
    pub fn labels(&self) -> BTreeMap<(Term, Term), Term> {
        self.tree
            .edge_indices()
            .map(|(x, y)| {
                (
                    (self.tree.node(x).clone(), self.tree.node(y).clone()),
                    self.label[y].clone().unwrap(),
                )
            })
            .collect()
    }

    /// Feasible actions at node index `x` with their successors; empty at ends.
    pub fn feasible_index(&self, x: usize) -> &BTreeMap<Term, usize> {
        &self.feasible[x]
    }

    /// Feasible actions of infoset `h`.
    pub fn infoset_actions(&self, h: usize) -> impl Iterator<Item = &Term> + '_ {
        self.feasible[self.infosets[h][0]].keys()
    }

    pub fn feasible(&self, x: &Term) -> Result<BTreeSet<Term>, CltError> {
        let i = self.tree.require(x)?;
        if !self.tree.is_decision_index(i) {
            return Err(CltError::NotDecision(x.clone()));
        }
        Ok(self.feasible[i].keys().cloned().collect())
    }

    pub fn next_index(&self, x: usize, a: &Term) -> Option<usize> {
        self.feasible[x].get(a).copied()
    }

    /// `n(x, a)`: the successor of `x` along the edge labeled `a`.
    pub fn next_node(&self, x: &Term, a: &Term) -> Result<Term, CltError> {
        let i = self.tree.require(x)?;
        if !self.tree.is_decision_index(i) {
            return Err(CltError::NotDecision(x.clone()));
        }
        self.next_index(i, a)
            .map(|y| self.tree.node(y).clone())
            .ok_or_else(|| CltError::NotFeasible {
                node: x.clone(),
                action: a.clone(),
            })
    }
}
