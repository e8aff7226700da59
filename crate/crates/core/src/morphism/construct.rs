use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Zero;

use super::{from_index_map, game_from_index_map, CltMorphism, GameMorphism, MorphismError};
use crate::clt::{validate_clt, Clt};
use crate::game::{validate_game, Game, Utility};
use crate::term::Term;
use crate::tree::validate_out_tree;

/// `α*_x` for every decision node `x`.
pub type ActionBijections = BTreeMap<Term, BTreeMap<Term, Term>>;

fn injective<'a>(values: impl Iterator<Item = &'a Term>) -> Option<&'a Term> {
    let mut seen = BTreeSet::new();
    values.into_iter().find(|v| !seen.insert(*v))
}

/// Builds the isomorph of `game` along `node_bij`, `action_bijs` and
/// `player_bij`, together with the certifying isomorphism.
pub fn pushforward(
    game: &Arc<Game>,
    node_bij: &BTreeMap<Term, Term>,
    action_bijs: &ActionBijections,
    player_bij: &BTreeMap<Term, Term>,
) -> Result<(Arc<Game>, GameMorphism), MorphismError> {
    let tree = game.tree();
    let clt = game.clt();
    for x in node_bij.keys() {
        if tree.index_of(x).is_none() {
            return Err(MorphismError::MapUnknownSource(x.clone()));
        }
    }
    if let Some(x) = tree.nodes().iter().find(|x| !node_bij.contains_key(*x)) {
        return Err(MorphismError::MapMissing(x.clone()));
    }
    if let Some(dup) = injective(node_bij.values()) {
        return Err(MorphismError::NotBijective(format!("node map hits {dup} twice")));
    }

    for x in tree.decision_indices() {
        let xt = tree.node(x);
        let alpha = action_bijs
            .get(xt)
            .ok_or_else(|| MorphismError::NotBijective(format!("no action bijection at {xt}")))?;
        let feasible: BTreeSet<&Term> = clt.feasible_index(x).keys().collect();
        if alpha.keys().collect::<BTreeSet<_>>() != feasible {
            return Err(MorphismError::NotBijective(format!(
                "action bijection at {xt} is not defined on exactly F({xt})"
            )));
        }
        if let Some(dup) = injective(alpha.values()) {
            return Err(MorphismError::NotBijective(format!(
                "action bijection at {xt} hits {dup} twice"
            )));
        }
    }
    if let Some(x) = action_bijs
        .keys()
        .find(|x| !tree.index_of(x).is_some_and(|i| tree.is_decision_index(i)))
    {
        return Err(MorphismError::NotBijective(format!("{x} is not a decision node")));
    }
    for h in 0..clt.infoset_count() {
        let members = clt.infoset_members(h);
        let first = tree.node(members[0]);
        for &other in &members[1..] {
            let other = tree.node(other);
            if action_bijs[first] != action_bijs[other] {
                return Err(MorphismError::ActionBijsNotConstantOnInfoset {
                    x1: first.clone(),
                    x2: other.clone(),
                });
            }
        }
    }

    let players: BTreeSet<&Term> = game.players().iter().collect();
    if player_bij.keys().collect::<BTreeSet<_>>() != players {
        return Err(MorphismError::NotBijective(
            "player map is not defined on exactly I".into(),
        ));
    }
    if let Some(dup) = injective(player_bij.values()) {
        return Err(MorphismError::NotBijective(format!("player map hits {dup} twice")));
    }

    let tau = |x: &Term| node_bij[x].clone();
    let nodes: BTreeSet<Term> = node_bij.values().cloned().collect();
    let edges: BTreeSet<(Term, Term)> = tree.edges().iter().map(|(x, y)| (tau(x), tau(y))).collect();
    let infosets: Vec<BTreeSet<Term>> = clt.infosets().iter().map(|h| h.iter().map(tau).collect()).collect();
    let labels: BTreeMap<(Term, Term), Term> = clt
        .labels()
        .iter()
        .map(|((x, y), a)| ((tau(x), tau(y)), action_bijs[x][a].clone()))
        .collect();
    let mover: BTreeMap<Term, Term> = game
        .movers()
        .iter()
        .map(|(x, i)| (tau(x), player_bij[i].clone()))
        .collect();
    let utilities: BTreeMap<(Term, Term), Utility> = game
        .utilities()
        .into_iter()
        .map(|((i, e), u)| ((player_bij[&i].clone(), tau(&e)), u))
        .collect();

    let image_tree = validate_out_tree(&nodes, &edges).map_err(|e| MorphismError::Construction(e.to_string()))?;
    let image_clt =
        validate_clt(image_tree, &infosets, &labels).map_err(|e| MorphismError::Construction(e.to_string()))?;
    let image =
        Arc::new(validate_game(image_clt, &mover, &utilities).map_err(|e| MorphismError::Construction(e.to_string()))?);
    let map = tree
        .nodes()
        .iter()
        .map(|x| image.tree().index_of(&node_bij[x]).unwrap())
        .collect();
    let certificate = game_from_index_map(game.clone(), image.clone(), map)?;
    Ok((image, certificate))
}

/// Pushforward along a node renaming with identity actions and players.
pub fn relabel_nodes(
    game: &Arc<Game>,
    node_bij: &BTreeMap<Term, Term>,
) -> Result<(Arc<Game>, GameMorphism), MorphismError> {
    let clt = game.clt();
    let tree = clt.tree();
    let actions: ActionBijections = tree
        .decision_indices()
        .map(|x| {
            let id = clt.feasible_index(x).keys().map(|a| (a.clone(), a.clone())).collect();
            (tree.node(x).clone(), id)
        })
        .collect();
    let players = game.players().iter().map(|i| (i.clone(), i.clone())).collect();
    pushforward(game, node_bij, &actions, &players)
}

fn star() -> Arc<Clt> {
    let (zero, one) = (Term::atom("0*"), Term::atom("1*"));
    let tree = validate_out_tree(
        &[zero.clone(), one.clone()].into_iter().collect(),
        &[(zero.clone(), one.clone())].into_iter().collect(),
    )
    .unwrap();
    let labels = [((zero.clone(), one), Term::atom("b"))].into_iter().collect();
    Arc::new(validate_clt(tree, &[[zero].into_iter().collect()], &labels).unwrap())
}

/// Two distinct morphisms out of the two-node CLT that `m` identifies, or
/// `None` when `τ` is injective.
pub fn clt_mono_witness(m: &CltMorphism) -> Option<(CltMorphism, CltMorphism)> {
    let (x1, x2) = m.collision()?;
    let source = m.source();
    let tree = source.tree();
    let star = star();
    let leg = |x: usize| {
        let p = tree.parent_index(x).expect("colliding nodes are not the root");
        // Θ* nodes in index order: 0*, 1*.
        from_index_map(star.clone(), source.clone(), vec![p, x]).expect("a leg of Θ* is a morphism")
    };
    Some((leg(x1), leg(x2)))
}

/// Two distinct game morphisms out of a single-run path game that `gm`
/// identifies, or `None` when `ζ` is injective.
pub fn mono_witness(gm: &GameMorphism) -> Option<(GameMorphism, GameMorphism)> {
    let (e1, e2) = gm.run_collision()?;
    let source = gm.source();
    let tree = source.tree();
    let path1 = tree.path_indices(e1);
    let path2 = tree.path_indices(e2);

    let nodes: BTreeSet<Term> = path1.iter().map(|&x| tree.node(x).clone()).collect();
    let edges: BTreeSet<(Term, Term)> = path1
        .windows(2)
        .map(|w| (tree.node(w[0]).clone(), tree.node(w[1]).clone()))
        .collect();
    let b = Term::atom("b");
    let labels = edges.iter().map(|e| (e.clone(), b.clone())).collect();
    let decisions = &path1[..path1.len() - 1];
    let infosets: Vec<BTreeSet<Term>> = decisions
        .iter()
        .map(|&x| [tree.node(x).clone()].into_iter().collect())
        .collect();
    let path_tree = validate_out_tree(&nodes, &edges).expect("a run is a nontrivial path");
    let path_clt = validate_clt(path_tree, &infosets, &labels).expect("a labeled path is a CLT");
    let mover = decisions
        .iter()
        .map(|&x| (tree.node(x).clone(), tree.node(x).clone()))
        .collect();
    let end = tree.node(e1).clone();
    let utilities = decisions
        .iter()
        .map(|&x| ((tree.node(x).clone(), end.clone()), Utility::zero()))
        .collect();
    let path_game = Arc::new(validate_game(path_clt, &mover, &utilities).expect("the path game is a game"));

    // δ sends each node of the first run to the node of the second with the same image.
    let image_to_second: BTreeMap<usize, usize> = path2.iter().map(|&x| (gm.index_map()[x], x)).collect();
    let pt = path_game.tree();
    let inc: Vec<usize> = (0..pt.len()).map(|k| tree.index_of(pt.node(k)).unwrap()).collect();
    let delta: Vec<usize> = inc.iter().map(|&x| image_to_second[&gm.index_map()[x]]).collect();

    let g1 = game_from_index_map(path_game.clone(), source.clone(), inc).expect("the inclusion is a morphism");
    let g2 = game_from_index_map(path_game, source.clone(), delta).expect("the shifted inclusion is a morphism");
    Some((g1, g2))
}
