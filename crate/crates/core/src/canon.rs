//! Representation properties and converters to canonical isomorphs.
//!
//! Each converter returns the new game together with an isomorphism from
//! the input to it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::clt::Clt;
use crate::game::Game;
use crate::morphism::{pushforward, relabel_nodes, ActionBijections, GameMorphism};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GameProperties {
    pub distinguished_actions: bool,
    pub uses_sequences: bool,
    pub uses_action_sets: bool,
    pub no_absentmindedness: bool,
    pub perfect_information: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("Absentminded: infoset {} contains {x} and its successor {y}", Term::set(infoset.iter().cloned()))]
    Absentminded { infoset: BTreeSet<Term>, x: Term, y: Term },
}

pub struct ConversionResult {
    pub game: Arc<Game>,
    /// An isomorphism from the input game to `game`.
    pub certificate: GameMorphism,
}

pub fn has_distinguished_actions(clt: &Clt) -> bool {
    let tree = clt.tree();
    clt.actions().iter().all(|a| {
        let holders: BTreeSet<Term> = tree
            .decision_indices()
            .filter(|&x| clt.feasible_index(x).contains_key(a))
            .map(|x| tree.node(x).clone())
            .collect();
        clt.infoset_index(&holders).is_some()
    })
}

pub fn uses_sequences(clt: &Clt) -> bool {
    let tree = clt.tree();
    if tree.nodes().iter().any(|x| x.as_tuple().is_none()) {
        return false;
    }
    let mut expected = BTreeSet::new();
    for y in tree.nodes() {
        let items = y.as_tuple().unwrap();
        if let Some((last, init)) = items.split_last() {
            let x = Term::tuple(init.iter().cloned());
            if clt.label(&x, y) != Some(last) {
                return false;
            }
            expected.insert((x, y.clone()));
        }
    }
    expected == tree.edges()
}

pub fn uses_action_sets(clt: &Clt) -> bool {
    let tree = clt.tree();
    if !has_distinguished_actions(clt) || tree.index_of(&Term::empty_set()).is_none() {
        return false;
    }
    let Some(sets) = tree.nodes().iter().map(|x| x.as_set()).collect::<Option<Vec<_>>>() else {
        return false;
    };
    let mut expected = BTreeSet::new();
    for (i, x) in sets.iter().enumerate() {
        for (j, y) in sets.iter().enumerate() {
            if x.is_subset(y) && y.len() == x.len() + 1 {
                let added = y.difference(x).next().unwrap();
                let edge = (tree.node(i).clone(), tree.node(j).clone());
                if clt.label(&edge.0, &edge.1) != Some(added) {
                    return false;
                }
                expected.insert(edge);
            }
        }
    }
    expected == tree.edges()
}

/// An information set holding a node together with one of its successors.
pub fn absentminded_witness(clt: &Clt) -> Option<(BTreeSet<Term>, Term, Term)> {
    let tree = clt.tree();
    for h in 0..clt.infoset_count() {
        let members = clt.infoset_members(h);
        for &x in members {
            for &y in members {
                if x != y && tree.leq_index(x, y) {
                    return Some((clt.infoset_terms(h), tree.node(x).clone(), tree.node(y).clone()));
                }
            }
        }
    }
    None
}

pub fn is_perfect_information(clt: &Clt) -> bool {
    clt.infosets().iter().all(|h| h.len() == 1)
}

pub fn properties(game: &Game) -> GameProperties {
    let clt = game.clt();
    GameProperties {
        distinguished_actions: has_distinguished_actions(clt),
        uses_sequences: uses_sequences(clt),
        uses_action_sets: uses_action_sets(clt),
        no_absentmindedness: absentminded_witness(clt).is_none(),
        perfect_information: is_perfect_information(clt),
    }
}

/// `α*_x(a) = (H_x, a)`, with nodes and players unchanged.
pub fn to_distinguished(game: &Arc<Game>) -> ConversionResult {
    let clt = game.clt();
    let tree = clt.tree();
    let nodes: BTreeMap<Term, Term> = tree.nodes().iter().map(|x| (x.clone(), x.clone())).collect();
    let actions: ActionBijections = tree
        .decision_indices()
        .map(|x| {
            let cell = Term::set(clt.infoset_terms(clt.info_of_index(x).unwrap()));
            let alpha = clt
                .feasible_index(x)
                .keys()
                .map(|a| (a.clone(), Term::pair(cell.clone(), a.clone())))
                .collect();
            (tree.node(x).clone(), alpha)
        })
        .collect();
    let players = game.players().iter().map(|i| (i.clone(), i.clone())).collect();
    let (image, certificate) = pushforward(game, &nodes, &actions, &players).expect("tagging actions is bijective");
    ConversionResult {
        game: image,
        certificate,
    }
}

/// Sequence of edge labels on the root path of node index `y`.
fn label_sequence(clt: &Clt, y: usize) -> Term {
    let path = clt.tree().path_indices(y);
    Term::tuple(path[1..].iter().map(|&z| clt.label_into(z).unwrap().clone()))
}

/// Renames every node to the sequence of actions leading to it.
pub fn to_sequence(game: &Arc<Game>) -> ConversionResult {
    let clt = game.clt();
    let tree = clt.tree();
    let nodes: BTreeMap<Term, Term> = (0..tree.len())
        .map(|y| (tree.node(y).clone(), label_sequence(clt, y)))
        .collect();
    let (image, certificate) = relabel_nodes(game, &nodes).expect("action sequences identify nodes");
    ConversionResult {
        game: image,
        certificate,
    }
}

pub fn to_distinguished_sequence(game: &Arc<Game>) -> ConversionResult {
    let first = to_distinguished(game);
    let second = to_sequence(&first.game);
    let certificate = second
        .certificate
        .compose(&first.certificate)
        .expect("stage certificates compose");
    ConversionResult {
        game: second.game,
        certificate,
    }
}

/// `R`: a sequence to the set of its entries.
pub fn range(sequence: &Term) -> Option<Term> {
    Some(Term::set(sequence.as_tuple()?.iter().cloned()))
}

/// Distinguishes actions, passes to sequences, then replaces each sequence by
/// its range.
pub fn to_action_set(game: &Arc<Game>) -> Result<ConversionResult, CanonError> {
    if let Some((infoset, x, y)) = absentminded_witness(game.clt()) {
        return Err(CanonError::Absentminded { infoset, x, y });
    }
    let first = to_distinguished(game);
    let second = to_sequence(&first.game);
    let nodes: BTreeMap<Term, Term> = second
        .game
        .tree()
        .nodes()
        .iter()
        .map(|x| (x.clone(), range(x).unwrap()))
        .collect();
    let (image, third) = relabel_nodes(&second.game, &nodes).expect("ranges identify nodes without absentmindedness");
    let certificate = third
        .compose(&second.certificate)
        .and_then(|m| m.compose(&first.certificate))
        .expect("stage certificates compose");
    Ok(ConversionResult {
        game: image,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clt::validate_clt;
    use crate::game::one_player_zero_game;
    use crate::term::atoms;
    use crate::tree::validate_out_tree;

    fn t(s: &str) -> Term {
        Term::atom(s)
    }

    fn zero(spec: &[(&str, &str, &str)], cells: &[&[&str]]) -> Arc<Game> {
        let nodes = spec.iter().flat_map(|&(a, b, _)| [t(a), t(b)]).collect();
        let edges = spec.iter().map(|&(a, b, _)| (t(a), t(b))).collect();
        let labels = spec.iter().map(|&(a, b, l)| ((t(a), t(b)), t(l))).collect();
        let cells: Vec<BTreeSet<Term>> = cells.iter().map(|c| atoms(c.iter().copied())).collect();
        let clt = validate_clt(validate_out_tree(&nodes, &edges).unwrap(), &cells, &labels).unwrap();
        Arc::new(one_player_zero_game(clt))
    }

    fn absentminded() -> Arc<Game> {
        zero(
            &[
                ("0", "1", "a"),
                ("0", "2", "b"),
                ("1", "4", "c"),
                ("1", "5", "d"),
                ("2", "3", "c"),
                ("2", "6", "d"),
                ("3", "7", "c"),
                ("3", "8", "d"),
            ],
            &[&["0"], &["1"], &["2", "3"]],
        )
    }

    #[test]
    fn absentminded_games_have_no_action_set_isomorph() {
        let g = absentminded();
        assert!(!properties(&g).no_absentmindedness);
        assert_eq!(
            to_action_set(&g).err(),
            Some(CanonError::Absentminded {
                infoset: atoms(["2", "3"]),
                x: t("2"),
                y: t("3")
            })
        );
        let ds = to_distinguished_sequence(&g);
        assert!(ds.certificate.is_iso());
        let p = properties(&ds.game);
        assert!(p.distinguished_actions && p.uses_sequences && !p.uses_action_sets);
    }

    #[test]
    fn pipeline_shapes() {
        let g = zero(
            &[
                ("0", "1", "a"),
                ("0", "2", "b"),
                ("1", "3", "c"),
                ("1", "4", "d"),
                ("2", "5", "c"),
                ("2", "6", "d"),
            ],
            &[&["0"], &["1", "2"]],
        );
        assert_eq!(
            properties(&g),
            GameProperties {
                distinguished_actions: true,
                no_absentmindedness: true,
                ..Default::default()
            }
        );
        let seq = to_sequence(&g);
        assert!(seq.game.tree().index_of(&Term::tuple([t("b"), t("c")])).is_some());
        assert_eq!(seq.game.tree().root(), &Term::empty_tuple());
        let sets = to_action_set(&g).unwrap();
        assert_eq!(sets.game.tree().root(), &Term::empty_set());
        assert!(sets.certificate.is_iso());
        assert_eq!(sets.certificate.source(), &g);
        let p = properties(&sets.game);
        assert!(p.uses_action_sets && p.no_absentmindedness && p.distinguished_actions && !p.uses_sequences);
        let h1 = Term::set(atoms(["1", "2"]));
        let image = sets.certificate.clt_morphism().image(&t("5")).unwrap().clone();
        assert_eq!(
            image,
            Term::set([Term::pair(Term::set(atoms(["0"])), t("b")), Term::pair(h1, t("c"))])
        );
    }
}
