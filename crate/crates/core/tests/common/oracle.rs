//! Brute-force equilibrium reference written against the public accessors
//! only: strategies as plain maps, play by walking `next_node`, subgames by
//! scanning subtrees directly.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gm_core::{Game, Term};

pub type Profile = BTreeMap<BTreeSet<Term>, Term>;

pub fn profiles(game: &Game) -> Vec<Profile> {
    let clt = game.clt();
    let mut out = vec![Profile::new()];
    for h in clt.infosets() {
        let x = h.iter().next().unwrap();
        let actions = clt.feasible(x).unwrap();
        let (h, actions) = (&h, &actions);
        out = out
            .into_iter()
            .flat_map(|s| {
                actions.iter().map(move |a| {
                    let mut t = s.clone();
                    t.insert(h.clone(), a.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// The run played from `start` onwards, prefixed by the path to `start`.
pub fn play_from(game: &Game, s: &Profile, start: &Term) -> BTreeSet<Term> {
    let clt = game.clt();
    let mut run: BTreeSet<Term> = game.tree().strict_predecessors(start).unwrap().into_iter().collect();
    let mut x = start.clone();
    loop {
        run.insert(x.clone());
        if !game.tree().is_decision(&x) {
            return run;
        }
        let h = clt.infoset_of(&x).unwrap();
        x = clt.next_node(&x, &s[&h]).unwrap();
    }
}

fn below(game: &Game, r: &Term) -> BTreeSet<Term> {
    game.tree()
        .nodes()
        .iter()
        .filter(|y| game.tree().leq(r, y).unwrap())
        .cloned()
        .collect()
}

/// No player gains by changing their own choices at infosets inside `scope`,
/// with play starting at `start`.
fn stable(game: &Game, all: &[Profile], s: &Profile, start: &Term, scope: &BTreeSet<Term>) -> bool {
    let here = play_from(game, s, start);
    all.iter().all(|d| {
        let changed: Vec<&BTreeSet<Term>> = s.keys().filter(|h| s[*h] != d[*h]).collect();
        if changed.iter().any(|h| !h.is_subset(scope)) {
            return true;
        }
        let movers: BTreeSet<&Term> = changed
            .iter()
            .map(|h| game.mover(h.iter().next().unwrap()).unwrap())
            .collect();
        if movers.len() != 1 {
            return true;
        }
        let i = movers.into_iter().next().unwrap();
        let there = play_from(game, d, start);
        game.utility(i, &there).unwrap() <= game.utility(i, &here).unwrap()
    })
}

pub fn nash(game: &Game) -> BTreeSet<Profile> {
    let all = profiles(game);
    let root = game.tree().root().clone();
    let everything = game.tree().node_set();
    all.iter()
        .filter(|s| stable(game, &all, s, &root, &everything))
        .cloned()
        .collect()
}

pub fn subgame_roots(game: &Game) -> BTreeSet<Term> {
    game.tree()
        .decision_nodes()
        .into_iter()
        .filter(|r| {
            let inside = below(game, r);
            game.clt()
                .infosets()
                .iter()
                .all(|h| h.is_subset(&inside) || h.is_disjoint(&inside))
        })
        .collect()
}

pub fn spe(game: &Game) -> BTreeSet<Profile> {
    let all = profiles(game);
    let roots: Vec<(Term, BTreeSet<Term>)> = subgame_roots(game)
        .into_iter()
        .map(|r| {
            let inside = below(game, &r);
            (r, inside)
        })
        .collect();
    all.iter()
        .filter(|s| roots.iter().all(|(r, inside)| stable(game, &all, s, r, inside)))
        .cloned()
        .collect()
}
