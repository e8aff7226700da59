//! Selten subCLTs and subgames.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::clt::{validate_clt, Clt};
use crate::game::{validate_game, Game};
use crate::morphism::{validate_game_morphism, GameMorphism};
use crate::term::Term;
use crate::tree::validate_out_tree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgameError {
    #[error("NotDecisionNode: {0}")]
    NotDecisionNode(Term),
    #[error("NotExists: infoset {} straddles the subtree at {root}", Term::set(straddling.iter().cloned()))]
    NotExists { root: Term, straddling: BTreeSet<Term> },
}

pub struct SeltenResult {
    pub root: Term,
    pub subgame: Arc<Game>,
    /// `[Γ, Γ', inc]`.
    pub inclusion: GameMorphism,
}

fn decision_root(clt: &Clt, r: &Term) -> Result<usize, SubgameError> {
    clt.tree()
        .index_of(r)
        .filter(|&i| clt.tree().is_decision_index(i))
        .ok_or_else(|| SubgameError::NotDecisionNode(r.clone()))
}

/// Indices of `{y | r ⪯ y}`.
fn below(clt: &Clt, r: usize) -> Vec<usize> {
    let tree = clt.tree();
    (0..tree.len()).filter(|&y| tree.leq_index(r, y)).collect()
}

/// The first information set that has members both inside and outside the
/// subtree at `r`.
fn straddler(clt: &Clt, inside: &[usize]) -> Option<usize> {
    let inside: BTreeSet<usize> = inside.iter().copied().collect();
    (0..clt.infoset_count()).find(|&h| {
        let members = clt.infoset_members(h);
        let n = members.iter().filter(|x| inside.contains(x)).count();
        n != 0 && n != members.len()
    })
}

pub fn selten_subclt(clt: &Clt, r: &Term) -> Result<Clt, SubgameError> {
    let ri = decision_root(clt, r)?;
    let tree = clt.tree();
    let inside = below(clt, ri);
    if let Some(h) = straddler(clt, &inside) {
        return Err(SubgameError::NotExists {
            root: r.clone(),
            straddling: clt.infoset_terms(h),
        });
    }
    let nodes: BTreeSet<Term> = inside.iter().map(|&y| tree.node(y).clone()).collect();
    let edges: BTreeSet<(Term, Term)> = tree
        .edges()
        .into_iter()
        .filter(|(x, y)| nodes.contains(x) && nodes.contains(y))
        .collect();
    let infosets: Vec<BTreeSet<Term>> = clt
        .infosets()
        .into_iter()
        .filter(|h| h.iter().all(|x| nodes.contains(x)))
        .collect();
    let labels: BTreeMap<(Term, Term), Term> = edges
        .iter()
        .map(|(x, y)| ((x.clone(), y.clone()), clt.label(x, y).unwrap().clone()))
        .collect();
    let sub_tree = validate_out_tree(&nodes, &edges).expect("a subtree below a decision node is nontrivial");
    Ok(validate_clt(sub_tree, &infosets, &labels).expect("condition [*] makes the Selten tuple a CLT"))
}

pub fn selten_subgame(game: &Arc<Game>, r: &Term) -> Result<SeltenResult, SubgameError> {
    let sub_clt = selten_subclt(game.clt(), r)?;
    let tree = game.tree();
    let sub_tree = sub_clt.tree();
    let mover: BTreeMap<Term, Term> = sub_tree
        .decision_nodes()
        .into_iter()
        .map(|x| {
            let i = game.mover(&x).unwrap().clone();
            (x, i)
        })
        .collect();
    let players: BTreeSet<&Term> = mover.values().collect();
    // ends of the subtree are ends of the whole tree, so U_i(Z) = U'_i(P'(r) ∪ Z)
    // reads off the same end node.
    let mut utilities = BTreeMap::new();
    for e in sub_tree.end_nodes() {
        let ei = tree.index_of(&e).unwrap();
        for &i in &players {
            let p = game.player_index(i).unwrap();
            utilities.insert((i.clone(), e.clone()), game.utility_at(p, ei).clone());
        }
    }
    let subgame =
        Arc::new(validate_game(sub_clt, &mover, &utilities).expect("restricted movers and utilities form a game"));
    let inclusion = inclusion_map(&subgame);
    let inclusion =
        validate_game_morphism(subgame.clone(), game.clone(), &inclusion).expect("the inclusion is a morphism");
    Ok(SeltenResult {
        root: r.clone(),
        subgame,
        inclusion,
    })
}

fn inclusion_map(sub: &Game) -> BTreeMap<Term, Term> {
    sub.tree().nodes().iter().map(|x| (x.clone(), x.clone())).collect()
}

/// `R`: the decision nodes at which a Selten subgame exists.
pub fn subgame_roots(game: &Game) -> BTreeSet<Term> {
    let clt = game.clt();
    clt.tree()
        .decision_indices()
        .filter(|&r| straddler(clt, &below(clt, r)).is_none())
        .map(|r| clt.tree().node(r).clone())
        .collect()
}

/// Whether `sub` is a Selten subgame of `sup`, by the four-part
/// characterization for the inclusion node map.
pub fn is_selten_subgame(sub: &Arc<Game>, sup: &Arc<Game>) -> bool {
    let (st, tt) = (sub.tree(), sup.tree());
    if st.nodes().iter().any(|x| tt.index_of(x).is_none()) {
        return false;
    }
    // (i*): inclusion is a morphism with identity α and inclusion ι.
    let Ok(inc) = validate_game_morphism(sub.clone(), sup.clone(), &inclusion_map(sub)) else {
        return false;
    };
    for x in st.decision_indices() {
        if inc.clt_morphism().alpha_index(x).iter().any(|(a, b)| a != b) {
            return false;
        }
    }
    if inc.player_transform().iter().any(|(i, j)| i != j) {
        return false;
    }
    // (ii)
    let r = tt.index_of(st.root()).unwrap();
    let expected: BTreeSet<Term> = (0..tt.len())
        .filter(|&y| tt.leq_index(r, y))
        .map(|y| tt.node(y).clone())
        .collect();
    if expected != st.node_set() {
        return false;
    }
    // (iii)
    let sup_cells: BTreeSet<BTreeSet<Term>> = sup.clt().infosets().into_iter().collect();
    if sub.clt().infosets().iter().any(|h| !sup_cells.contains(h)) {
        return false;
    }
    // (iv)
    for (i, player) in sub.players().iter().enumerate() {
        let j = sup.player_index(player).unwrap();
        for &e in sub.end_indices() {
            if sub.utility_at(i, e) != sup.utility_at(j, inc.zeta_index(e)) {
                return false;
            }
        }
    }
    true
}
