//! Seeded generators for games, morphisms and isomorphs, used by property
//! tests and the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::clt::{validate_clt, Clt};
use crate::game::{validate_game, Game, Utility};
use crate::morphism::{game_from_index_map, pushforward, ActionBijections, GameMorphism};
use crate::term::Term;
use crate::tree::validate_out_tree;

const ALPHABET: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

#[derive(Debug, Clone, Copy)]
pub struct GameShape {
    pub max_nodes: usize,
    pub max_players: usize,
    /// Upper bound on the out-degree of a decision node.
    pub max_actions: usize,
    pub max_infosets: usize,
    /// Utilities are drawn from `-range..=range`.
    pub utility_range: i64,
}

impl Default for GameShape {
    fn default() -> Self {
        GameShape {
            max_nodes: 10,
            max_players: 3,
            max_actions: 3,
            max_infosets: usize::MAX,
            utility_range: 2,
        }
    }
}

/// `count` distinct atom names in random order, drawn from a range wide
/// enough that names of different lengths mix.
fn node_names<R: Rng>(rng: &mut R, count: usize) -> Vec<Term> {
    let mut pool: Vec<usize> = (0..count.max(1) * 4 + 10).collect();
    pool.shuffle(rng);
    pool.truncate(count);
    pool.into_iter().map(|k| Term::atom(k.to_string())).collect()
}

fn random_partition<R: Rng, T: Clone>(rng: &mut R, items: &[T]) -> Vec<Vec<T>> {
    let mut cells: Vec<Vec<T>> = Vec::new();
    for item in items {
        let k = rng.gen_range(0..=cells.len());
        if k == cells.len() {
            cells.push(vec![item.clone()]);
        } else {
            cells[k].push(item.clone());
        }
    }
    cells
}

/// Parent links of a random tree with between 2 and `max_nodes` nodes,
/// in creation order (node 0 is the root).
fn random_shape<R: Rng>(rng: &mut R, max_nodes: usize, max_actions: usize) -> Vec<Vec<usize>> {
    let target = rng.gen_range(2..=max_nodes.max(2));
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut leaves = vec![0];
    while children.len() < target {
        let room = target - children.len();
        let at = leaves.swap_remove(rng.gen_range(0..leaves.len()));
        let k = rng.gen_range(1..=max_actions.min(room));
        for _ in 0..k {
            let id = children.len();
            children.push(Vec::new());
            children[at].push(id);
            leaves.push(id);
        }
    }
    children
}

pub fn random_clt<R: Rng>(rng: &mut R, shape: &GameShape) -> Clt {
    loop {
        if let Some(clt) = try_clt(rng, shape) {
            return clt;
        }
    }
}

fn try_clt<R: Rng>(rng: &mut R, shape: &GameShape) -> Option<Clt> {
    let children = random_shape(rng, shape.max_nodes, shape.max_actions);
    let n = children.len();
    let names = node_names(rng, n);

    let mut by_degree: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, c) in children.iter().enumerate() {
        if !c.is_empty() {
            by_degree.entry(c.len()).or_default().push(x);
        }
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for members in by_degree.values() {
        cells.extend(random_partition(rng, members));
    }
    // Merge cells of equal degree until the bound holds.
    while cells.len() > shape.max_infosets {
        let pair = (0..cells.len())
            .flat_map(|i| (i + 1..cells.len()).map(move |j| (i, j)))
            .find(|&(i, j)| children[cells[i][0]].len() == children[cells[j][0]].len())?;
        let moved = cells.remove(pair.1);
        cells[pair.0].extend(moved);
    }

    let mut labels = BTreeMap::new();
    for cell in &cells {
        let mut alphabet = ALPHABET.to_vec();
        alphabet.shuffle(rng);
        let actions = &alphabet[..children[cell[0]].len()];
        for &x in cell {
            let mut order = children[x].clone();
            order.shuffle(rng);
            for (&y, a) in order.iter().zip(actions) {
                labels.insert((names[x].clone(), names[y].clone()), Term::atom(*a));
            }
        }
    }
    let nodes: BTreeSet<Term> = names.iter().cloned().collect();
    let edges: BTreeSet<(Term, Term)> = labels.keys().cloned().collect();
    let infosets: Vec<BTreeSet<Term>> = cells
        .iter()
        .map(|c| c.iter().map(|&x| names[x].clone()).collect())
        .collect();
    let tree = validate_out_tree(&nodes, &edges).expect("generated shape is an out-tree");
    Some(validate_clt(tree, &infosets, &labels).expect("generated labels are a CLT"))
}

pub fn random_game<R: Rng>(rng: &mut R, shape: &GameShape) -> Game {
    let clt = random_clt(rng, shape);
    let cells = clt.infosets();
    let k = rng.gen_range(1..=shape.max_players.max(1).min(cells.len()));
    let mut offsets: Vec<usize> = (1..=9).collect();
    offsets.shuffle(rng);
    let players: Vec<Term> = offsets[..k].iter().map(|i| Term::atom(format!("P{i}"))).collect();
    // every player moves somewhere: the first k cells in random order get distinct players
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.shuffle(rng);
    let mut mover = BTreeMap::new();
    for (rank, &h) in order.iter().enumerate() {
        let p = if rank < k { rank } else { rng.gen_range(0..k) };
        for x in &cells[h] {
            mover.insert(x.clone(), players[p].clone());
        }
    }
    let r = shape.utility_range;
    let mut utilities = BTreeMap::new();
    for e in clt.tree().end_nodes() {
        for p in &players {
            utilities.insert(
                (p.clone(), e.clone()),
                Utility::from_integer(rng.gen_range(-r..=r).into()),
            );
        }
    }
    validate_game(clt, &mover, &utilities).expect("generated game is valid")
}

/// A random source game and a valid morphism from it into `target`, with
/// at most `max_nodes` source nodes.
///
/// The source unfolds part of the target below a chosen decision node: every
/// source decision node follows an action pattern drawn per target
/// information set, which may merge actions, so the result ranges over
/// plain, monic and iso morphisms.
pub fn random_morphism_into<R: Rng>(rng: &mut R, target: &Arc<Game>, max_nodes: usize) -> GameMorphism {
    loop {
        let simple = rng.gen_bool(0.25);
        if let Some(m) = try_morphism(rng, target, max_nodes, simple) {
            return m;
        }
    }
}

type Pattern = Vec<(Term, Term)>;

fn random_pattern<R: Rng>(rng: &mut R, feasible: &[Term], simple: bool) -> Pattern {
    let mut alphabet = ALPHABET.to_vec();
    alphabet.shuffle(rng);
    if simple {
        // a bijection onto the feasible set
        let mut targets = feasible.to_vec();
        targets.shuffle(rng);
        return alphabet.iter().zip(targets).map(|(a, b)| (Term::atom(*a), b)).collect();
    }
    let m = rng.gen_range(1..=(feasible.len() + 1).min(ALPHABET.len()));
    alphabet[..m]
        .iter()
        .map(|a| (Term::atom(*a), feasible.choose(rng).unwrap().clone()))
        .collect()
}

fn try_morphism<R: Rng>(rng: &mut R, target: &Arc<Game>, max_nodes: usize, simple: bool) -> Option<GameMorphism> {
    let tc = target.clt();
    let tt = tc.tree();
    let decisions: Vec<usize> = tt.decision_indices().collect();
    let start = if simple || rng.gen_bool(0.5) {
        tt.root_index()
    } else {
        *decisions.choose(rng).unwrap()
    };

    let pools: Vec<Vec<Pattern>> = (0..tc.infoset_count())
        .map(|h| {
            let feasible: Vec<Term> = tc.infoset_actions(h).cloned().collect();
            let count = if simple { 1 } else { rng.gen_range(1..=2) };
            let mut pool: Vec<Pattern> = (0..count).map(|_| random_pattern(rng, &feasible, simple)).collect();
            // single-action continuations with distinct targets, so that nodes merged
            // above them can still lead to distinct runs
            if !simple && rng.gen_bool(0.5) {
                let mut targets = feasible.clone();
                targets.shuffle(rng);
                pool.extend(targets.into_iter().take(2).map(|b| vec![(Term::atom("a"), b)]));
            }
            pool
        })
        .collect();

    // Unfold: source node k has image image[k], parent parent[k], entering label.
    let mut image = vec![start];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut entering: Vec<Option<Term>> = vec![None];
    let mut pattern_of: Vec<Option<usize>> = vec![None];
    let mut k = 0;
    while k < image.len() {
        let t = image[k];
        if tt.is_decision_index(t) {
            let h = tc.info_of_index(t).unwrap();
            let choice = rng.gen_range(0..pools[h].len());
            pattern_of[k] = Some(choice);
            for (a, b) in &pools[h][choice] {
                image.push(tc.next_index(t, b).unwrap());
                parent.push(Some(k));
                entering.push(Some(a.clone()));
                pattern_of.push(None);
            }
            if image.len() > max_nodes {
                return None;
            }
        }
        k += 1;
    }
    let n = image.len();
    let names = node_names(rng, n);

    // Source infosets: random partitions of the nodes sharing a target infoset and pattern.
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for s in 0..n {
        if let Some(p) = pattern_of[s] {
            groups
                .entry((tc.info_of_index(image[s]).unwrap(), p))
                .or_default()
                .push(s);
        }
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for members in groups.values() {
        if simple {
            cells.push(members.clone());
        } else {
            cells.extend(random_partition(rng, members));
        }
    }

    let labels: BTreeMap<(Term, Term), Term> = (1..n)
        .map(|s| {
            (
                (names[parent[s].unwrap()].clone(), names[s].clone()),
                entering[s].clone().unwrap(),
            )
        })
        .collect();
    let nodes: BTreeSet<Term> = names.iter().cloned().collect();
    let edges: BTreeSet<(Term, Term)> = labels.keys().cloned().collect();
    let infosets: Vec<BTreeSet<Term>> = cells
        .iter()
        .map(|c| c.iter().map(|&s| names[s].clone()).collect())
        .collect();
    let tree = validate_out_tree(&nodes, &edges).ok()?;
    let clt = validate_clt(tree, &infosets, &labels).expect("unfolded tuple is a CLT");

    // Each target player gets one or two source names.
    let aliases: Vec<Vec<Term>> = target
        .players()
        .iter()
        .map(|j| {
            let count = if simple { 1 } else { rng.gen_range(1..=2) };
            (0..count).map(|c| Term::atom(format!("{j}.{c}"))).collect()
        })
        .collect();
    let owner: BTreeMap<&Term, usize> = aliases
        .iter()
        .enumerate()
        .flat_map(|(j, names)| names.iter().map(move |i| (i, j)))
        .collect();
    let mut mover = BTreeMap::new();
    for cell in &cells {
        let j = target.mover_index(image[cell[0]]).unwrap();
        let i = aliases[j].choose(rng).unwrap().clone();
        for &s in cell {
            mover.insert(names[s].clone(), i.clone());
        }
    }
    let players: BTreeSet<Term> = mover.values().cloned().collect();
    let mut utilities = BTreeMap::new();
    let noisy = !simple && rng.gen_bool(0.5);
    for s in (0..n).filter(|&s| !tt.is_decision_index(image[s])) {
        let end = image[s];
        for i in &players {
            let j = owner[i];
            let base = target.utility_at(j, end).clone() * Utility::from_integer(10.into());
            let noise = if noisy { rng.gen_range(0..=9) } else { 0 };
            utilities.insert(
                (i.clone(), names[s].clone()),
                base + Utility::from_integer(noise.into()),
            );
        }
    }
    let source = Arc::new(validate_game(clt, &mover, &utilities).expect("unfolded game is valid"));
    let map: Vec<usize> = {
        let st = source.tree();
        let mut by_index = vec![0; n];
        for s in 0..n {
            by_index[st.index_of(&names[s]).unwrap()] = image[s];
        }
        by_index
    };
    Some(game_from_index_map(source, target.clone(), map).expect("unfolding is a morphism"))
}

/// A random isomorph of `game`: fresh node names, permuted and renamed
/// actions per information set, renamed players.
pub fn random_isomorph<R: Rng>(rng: &mut R, game: &Arc<Game>) -> (Arc<Game>, GameMorphism) {
    let clt = game.clt();
    let tree = clt.tree();
    let names = node_names(rng, tree.len());
    let nodes: BTreeMap<Term, Term> = tree
        .nodes()
        .iter()
        .zip(&names)
        .map(|(x, y)| (x.clone(), Term::pair(Term::atom("n"), y.clone())))
        .collect();
    let mut actions = ActionBijections::new();
    for h in 0..clt.infoset_count() {
        let feasible: Vec<Term> = clt.infoset_actions(h).cloned().collect();
        let mut fresh: Vec<Term> = (0..feasible.len()).map(|k| Term::atom(format!("m{k}"))).collect();
        fresh.shuffle(rng);
        let alpha: BTreeMap<Term, Term> = feasible.into_iter().zip(fresh).collect();
        for x in clt.infoset_terms(h) {
            actions.insert(x, alpha.clone());
        }
    }
    let mut renamed: Vec<usize> = (0..game.players().len()).collect();
    renamed.shuffle(rng);
    let players = game
        .players()
        .iter()
        .zip(renamed)
        .map(|(i, k)| (i.clone(), Term::atom(format!("Q{k}"))))
        .collect();
    pushforward(game, &nodes, &actions, &players).expect("random bijections are bijective")
}
