use std::collections::BTreeMap;
use std::sync::Arc;

use super::{game_from_index_map, GameMorphism};
use crate::game::Game;
use crate::term::Term;

#[derive(Clone)]
struct State {
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    cell: Vec<Option<usize>>,
    cell_used: Vec<bool>,
    /// Partial `α` per source infoset, with its reverse.
    alpha: Vec<BTreeMap<Term, Term>>,
    alpha_rev: Vec<BTreeMap<Term, Term>>,
    iota: Vec<Option<usize>>,
    iota_used: Vec<bool>,
}

struct Search<'a> {
    g1: &'a Game,
    g2: &'a Game,
    ranks1: Vec<Vec<usize>>,
    ranks2: Vec<Vec<usize>>,
    /// Sorted rank vector per player, as an invariant for `ι`.
    rank_sig1: Vec<Vec<usize>>,
    rank_sig2: Vec<Vec<usize>>,
    nodes1: Vec<usize>,
    nodes2: Vec<usize>,
}

fn rank_rows(g: &Game) -> Vec<Vec<usize>> {
    (0..g.players().len()).map(|p| g.ranks(p)).collect()
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

impl Search<'_> {
    fn rank1(&self, p: usize, e: usize) -> usize {
        self.ranks1[p][self.g1.end_position(e).unwrap()]
    }

    fn rank2(&self, p: usize, e: usize) -> usize {
        self.ranks2[p][self.g2.end_position(e).unwrap()]
    }

    fn bind_alpha(&self, st: &mut State, h: usize, a: &Term, b: &Term) -> bool {
        match (st.alpha[h].get(a), st.alpha_rev[h].get(b)) {
            (Some(x), _) if x != b => false,
            (_, Some(y)) if y != a => false,
            (Some(_), Some(_)) => true,
            _ => {
                st.alpha[h].insert(a.clone(), b.clone());
                st.alpha_rev[h].insert(b.clone(), a.clone());
                true
            }
        }
    }

    fn bind_player(&self, st: &mut State, i: usize, j: usize) -> bool {
        match st.iota[i] {
            Some(k) => k == j,
            None => {
                if st.iota_used[j]
                    || self.g1.player_nodes_count(i) != self.g2.player_nodes_count(j)
                    || self.rank_sig1[i] != self.rank_sig2[j]
                {
                    return false;
                }
                let t1 = self.g1.tree();
                for x in 0..st.map.len() {
                    if let Some(y) = st.map[x] {
                        if !t1.is_decision_index(x) && self.rank1(i, x) != self.rank2(j, y) {
                            return false;
                        }
                    }
                }
                st.iota[i] = Some(j);
                st.iota_used[j] = true;
                true
            }
        }
    }

    fn assign(&self, st: &State, x: usize, y: usize) -> Option<State> {
        let (t1, t2) = (self.g1.tree(), self.g2.tree());
        let (c1, c2) = (self.g1.clt(), self.g2.clt());
        if st.used[y]
            || t1.depth(x) != t2.depth(y)
            || t1.subtree_size(x) != t2.subtree_size(y)
            || t1.children_indices(x).len() != t2.children_indices(y).len()
        {
            return None;
        }
        let mut st = st.clone();
        st.map[x] = Some(y);
        st.used[y] = true;

        if let Some(p) = t1.parent_index(x) {
            if let Some(q) = st.map[p] {
                if t2.parent_index(y) != Some(q) {
                    return None;
                }
                let h = c1.info_of_index(p).unwrap();
                if !self.bind_alpha(&mut st, h, c1.label_into(x).unwrap(), c2.label_into(y).unwrap()) {
                    return None;
                }
            }
        }
        if t1.is_decision_index(x) {
            for &c in t1.children_indices(x) {
                if let Some(d) = st.map[c] {
                    if t2.parent_index(d) != Some(y) {
                        return None;
                    }
                }
            }
            let h = c1.info_of_index(x).unwrap();
            let k = c2.info_of_index(y).unwrap();
            match st.cell[h] {
                Some(prev) if prev != k => return None,
                Some(_) => {}
                None => {
                    if st.cell_used[k] || c1.infoset_members(h).len() != c2.infoset_members(k).len() {
                        return None;
                    }
                    st.cell[h] = Some(k);
                    st.cell_used[k] = true;
                }
            }
            for &c in t1.children_indices(x) {
                if let Some(d) = st.map[c] {
                    if !self.bind_alpha(&mut st, h, c1.label_into(c).unwrap(), c2.label_into(d).unwrap()) {
                        return None;
                    }
                }
            }
            let i = self.g1.mover_index(x).unwrap();
            let j = self.g2.mover_index(y).unwrap();
            if !self.bind_player(&mut st, i, j) {
                return None;
            }
        } else {
            for (i, j) in st.iota.iter().enumerate() {
                if let Some(j) = *j {
                    if self.rank1(i, x) != self.rank2(j, y) {
                        return None;
                    }
                }
            }
        }
        Some(st)
    }

    fn run(&self, st: State, k: usize, out: &mut Option<Vec<usize>>) {
        if out.is_some() {
            return;
        }
        if k == self.nodes1.len() {
            *out = Some(st.map.iter().map(|y| y.unwrap()).collect());
            return;
        }
        let x = self.nodes1[k];
        for &y in &self.nodes2 {
            if let Some(next) = self.assign(&st, x, y) {
                self.run(next, k + 1, out);
                if out.is_some() {
                    return;
                }
            }
        }
    }
}

impl Game {
    fn player_nodes_count(&self, p: usize) -> usize {
        self.player_infosets(p)
            .map(|h| self.clt().infoset_members(h).len())
            .sum()
    }
}

/// An isomorphism `g1 → g2`, if one exists. Among all isomorphisms the one
/// returned has the least node map, comparing images source node by source
/// node in term order.
pub fn iso_search(g1: &Arc<Game>, g2: &Arc<Game>) -> Option<GameMorphism> {
    let (t1, t2) = (g1.tree(), g2.tree());
    if t1.len() != t2.len()
        || g1.end_indices().len() != g2.end_indices().len()
        || g1.clt().infoset_count() != g2.clt().infoset_count()
        || g1.players().len() != g2.players().len()
    {
        return None;
    }
    let ranks1 = rank_rows(g1);
    let ranks2 = rank_rows(g2);
    let search = Search {
        g1,
        g2,
        rank_sig1: ranks1.iter().map(|r| sorted(r)).collect(),
        rank_sig2: ranks2.iter().map(|r| sorted(r)).collect(),
        ranks1,
        ranks2,
        nodes1: (0..t1.len()).collect(),
        nodes2: (0..t2.len()).collect(),
    };
    let c1 = g1.clt();
    let state = State {
        map: vec![None; t1.len()],
        used: vec![false; t2.len()],
        cell: vec![None; c1.infoset_count()],
        cell_used: vec![false; c1.infoset_count()],
        alpha: vec![BTreeMap::new(); c1.infoset_count()],
        alpha_rev: vec![BTreeMap::new(); c1.infoset_count()],
        iota: vec![None; g1.players().len()],
        iota_used: vec![false; g1.players().len()],
    };
    let mut found = None;
    search.run(state, 0, &mut found);
    let map = found?;
    let m = game_from_index_map(g1.clone(), g2.clone(), map).ok()?;
    m.is_iso().then_some(m)
}
