//! Grand strategies, outcomes, Nash and subgame-perfect equilibria.
//!
//! Strategies are enumerated in a mixed radix: information sets in term
//! order, the first one most significant, and each digit an index into the
//! sorted feasible set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::game::Game;
use crate::morphism::GameMorphism;
use crate::subgame::{selten_subgame, subgame_roots};
use crate::term::Term;

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    #[error("StrategySpaceTooLarge({0})")]
    StrategySpaceTooLarge(BigUint),
    #[error("NotIso")]
    NotIso,
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// One feasible action per information set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrandStrategy {
    choice: BTreeMap<BTreeSet<Term>, Term>,
}

impl GrandStrategy {
    pub fn new(choice: BTreeMap<BTreeSet<Term>, Term>) -> GrandStrategy {
        GrandStrategy { choice }
    }

    pub fn choices(&self) -> &BTreeMap<BTreeSet<Term>, Term> {
        &self.choice
    }

    pub fn choice(&self, infoset: &BTreeSet<Term>) -> Option<&Term> {
        self.choice.get(infoset)
    }

    /// `s(x)`, looked up through the information set containing `x`.
    pub fn at(&self, x: &Term) -> Option<&Term> {
        self.choice.iter().find(|(h, _)| h.contains(x)).map(|(_, a)| a)
    }
}

impl fmt::Display for GrandStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .choice
            .iter()
            .map(|(h, a)| format!("{}->{}", Term::set(h.iter().cloned()), a))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for GrandStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Mixed-radix view of the strategy space of one game.
struct Space<'a> {
    game: &'a Game,
    actions: Vec<Vec<Term>>,
    stride: Vec<usize>,
    size: usize,
}

impl<'a> Space<'a> {
    fn new(game: &'a Game, cap: usize) -> Result<Space<'a>, EquilibriumError> {
        let clt = game.clt();
        let actions: Vec<Vec<Term>> = (0..clt.infoset_count())
            .map(|h| clt.infoset_actions(h).cloned().collect())
            .collect();
        let product: BigUint = actions.iter().map(|a| BigUint::from(a.len())).product();
        if product > BigUint::from(cap) {
            return Err(EquilibriumError::StrategySpaceTooLarge(product));
        }
        let mut stride = vec![1; actions.len()];
        for h in (0..actions.len().saturating_sub(1)).rev() {
            stride[h] = stride[h + 1] * actions[h + 1].len();
        }
        let size = actions.iter().map(Vec::len).product();
        Ok(Space {
            game,
            actions,
            stride,
            size,
        })
    }

    fn digit(&self, s: usize, h: usize) -> usize {
        (s / self.stride[h]) % self.actions[h].len()
    }

    fn strategy(&self, s: usize) -> GrandStrategy {
        let clt = self.game.clt();
        GrandStrategy::new(
            (0..self.actions.len())
                .map(|h| (clt.infoset_terms(h), self.actions[h][self.digit(s, h)].clone()))
                .collect(),
        )
    }

    /// End node index reached by strategy `s`.
    fn outcome(&self, s: usize) -> usize {
        let clt = self.game.clt();
        let tree = clt.tree();
        let mut x = tree.root_index();
        while tree.is_decision_index(x) {
            let h = clt.info_of_index(x).unwrap();
            x = clt.feasible_index(x)[&self.actions[h][self.digit(s, h)]];
        }
        x
    }

    /// Nash flags for every strategy index.
    fn nash_flags(&self) -> Vec<bool> {
        let game = self.game;
        let outcomes: Vec<usize> = (0..self.size).map(|s| self.outcome(s)).collect();
        let mut flags = vec![true; self.size];
        for p in 0..game.players().len() {
            let ranks = game.ranks(p);
            let own: Vec<usize> = game.player_infosets(p).collect();
            let rank_of = |s: usize| ranks[game.end_position(outcomes[s]).unwrap()];
            let key = |s: usize| s - own.iter().map(|&h| self.digit(s, h) * self.stride[h]).sum::<usize>();
            let mut best = vec![0usize; self.size];
            for s in 0..self.size {
                let k = key(s);
                best[k] = best[k].max(rank_of(s));
            }
            for s in 0..self.size {
                if rank_of(s) < best[key(s)] {
                    flags[s] = false;
                }
            }
        }
        flags
    }
}

fn check(game: &Game, s: &GrandStrategy) -> Result<(), EquilibriumError> {
    let clt = game.clt();
    if s.choice.len() != clt.infoset_count() {
        return Err(EquilibriumError::InvalidStrategy(format!(
            "expected {} information sets, got {}",
            clt.infoset_count(),
            s.choice.len()
        )));
    }
    for h in 0..clt.infoset_count() {
        let cell = clt.infoset_terms(h);
        let shown = Term::set(cell.iter().cloned());
        let a = s
            .choice
            .get(&cell)
            .ok_or_else(|| EquilibriumError::InvalidStrategy(format!("no choice at {shown}")))?;
        if !clt.feasible_index(clt.infoset_members(h)[0]).contains_key(a) {
            return Err(EquilibriumError::InvalidStrategy(format!(
                "{a} is not feasible at {shown}"
            )));
        }
    }
    Ok(())
}

/// `S`, in enumeration order.
pub fn strategies(game: &Game, cap: usize) -> Result<Vec<GrandStrategy>, EquilibriumError> {
    let space = Space::new(game, cap)?;
    Ok((0..space.size).map(|s| space.strategy(s)).collect())
}

/// `o(s)`.
pub fn outcome(game: &Game, s: &GrandStrategy) -> Result<BTreeSet<Term>, EquilibriumError> {
    check(game, s)?;
    let clt = game.clt();
    let tree = clt.tree();
    let mut x = tree.root_index();
    while tree.is_decision_index(x) {
        let h = clt.infoset_terms(clt.info_of_index(x).unwrap());
        x = clt.feasible_index(x)[&s.choice[&h]];
    }
    Ok(tree.run_of_end(x))
}

/// `S_NE`, in enumeration order.
pub fn nash(game: &Game, cap: usize) -> Result<Vec<GrandStrategy>, EquilibriumError> {
    let space = Space::new(game, cap)?;
    let flags = space.nash_flags();
    Ok((0..space.size)
        .filter(|&s| flags[s])
        .map(|s| space.strategy(s))
        .collect())
}

/// `S_SPE`: strategies whose restriction to every Selten subgame is Nash there.
pub fn spe(game: &Arc<Game>, cap: usize) -> Result<Vec<GrandStrategy>, EquilibriumError> {
    let space = Space::new(game, cap)?;
    let mut flags = space.nash_flags();
    let clt = game.clt();
    for r in subgame_roots(game) {
        if &r == game.tree().root() {
            continue;
        }
        let sub = selten_subgame(game, &r).expect("listed roots have subgames").subgame;
        let sub_space = Space::new(&sub, cap)?;
        let sub_flags = sub_space.nash_flags();
        // each subgame infoset is an infoset of the whole game
        let embed: Vec<usize> = (0..sub.clt().infoset_count())
            .map(|k| clt.infoset_index(&sub.clt().infoset_terms(k)).unwrap())
            .collect();
        for (s, flag) in flags.iter_mut().enumerate() {
            if *flag {
                let restricted: usize = embed
                    .iter()
                    .enumerate()
                    .map(|(k, &h)| space.digit(s, h) * sub_space.stride[k])
                    .sum();
                *flag = sub_flags[restricted];
            }
        }
    }
    Ok((0..space.size)
        .filter(|&s| flags[s])
        .map(|s| space.strategy(s))
        .collect())
}

/// `s'(H') = α_{τ⁻¹x'}(s(τ⁻¹x'))` along an isomorphism.
pub fn push_strategy(iso: &GameMorphism, s: &GrandStrategy) -> Result<GrandStrategy, EquilibriumError> {
    if !iso.is_iso() {
        return Err(EquilibriumError::NotIso);
    }
    let source = iso.source();
    check(source, s)?;
    let (sc, tc) = (source.clt(), iso.target().clt());
    let m = iso.clt_morphism();
    let mut inverse = vec![0; m.index_map().len()];
    for (x, &y) in m.index_map().iter().enumerate() {
        inverse[y] = x;
    }
    let choice = (0..tc.infoset_count())
        .map(|k| {
            let x = inverse[tc.infoset_members(k)[0]];
            let h = sc.infoset_terms(sc.info_of_index(x).unwrap());
            let a = m.alpha_index(x)[&s.choice[&h]].clone();
            (tc.infoset_terms(k), a)
        })
        .collect();
    Ok(GrandStrategy::new(choice))
}
