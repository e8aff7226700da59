//! Games: a CLT with a move-assigning function and one exact utility per
//! player and run.
//!
//! Runs of a finite tree biject with its end nodes, so utilities are stored
//! per end node.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::clt::{Clt, CltError};
use crate::term::Term;
use crate::tree::{OutTree, TreeError};

pub type Utility = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Clt(#[from] CltError),
    #[error("MoverNotConstant: players differ inside one information set: {x1} and {x2}")]
    MoverNotConstant { x1: Term, x2: Term },
    #[error("MoverMissing: decision node {0} has no mover")]
    MoverMissing(Term),
    #[error("MoverExtraneous: mover assigned to {0}, which is not a decision node")]
    MoverExtraneous(Term),
    #[error("UtilityMissing: no utility for player {player} at the run ending in {end}")]
    UtilityMissing { player: Term, end: Term },
    #[error("UtilityExtraneous: utility for player {player} at {key}, which is not a run of a player of the game")]
    UtilityExtraneous { player: Term, key: Term },
    #[error("UnknownPlayer: {0}")]
    UnknownPlayer(Term),
    #[error("NotARun: {0} is not a run")]
    NotARun(Term),
}

impl From<TreeError> for GameError {
    fn from(e: TreeError) -> Self {
        GameError::Clt(CltError::Tree(e))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Game {
    clt: Arc<Clt>,
    players: Vec<Term>,
    /// Player index moving at each infoset.
    infoset_mover: Vec<usize>,
    /// Position of each node among the end nodes.
    end_pos: Vec<Option<usize>>,
    ends: Vec<usize>,
    /// `utility[player][end position]`.
    utility: Vec<Vec<Utility>>,
}

impl std::fmt::Debug for Game {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Game")
            .field("clt", &self.clt)
            .field("movers", &self.movers())
            .finish()
    }
}

/// Validates `(X, E, H, λ, μ, U)` over a validated CLT.
///
/// `utilities` is keyed by `(player, end node)`.
pub fn validate_game(
    clt: impl Into<Arc<Clt>>,
    mover: &BTreeMap<Term, Term>,
    utilities: &BTreeMap<(Term, Term), Utility>,
) -> Result<Game, GameError> {
    let clt: Arc<Clt> = clt.into();
    let tree = clt.tree();
    for x in mover.keys() {
        if !tree.is_decision(x) {
            return Err(GameError::MoverExtraneous(x.clone()));
        }
    }
    for x in tree.decision_indices() {
        if !mover.contains_key(tree.node(x)) {
            return Err(GameError::MoverMissing(tree.node(x).clone()));
        }
    }
    for h in 0..clt.infoset_count() {
        let members = clt.infoset_members(h);
        let first = &mover[tree.node(members[0])];
        if let Some(&other) = members[1..].iter().find(|&&x| &mover[tree.node(x)] != first) {
            return Err(GameError::MoverNotConstant {
                x1: tree.node(members[0]).clone(),
                x2: tree.node(other).clone(),
            });
        }
    }
    let players: Vec<Term> = mover.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let player_pos = |p: &Term| players.binary_search(p).ok();
    let infoset_mover = (0..clt.infoset_count())
        .map(|h| player_pos(&mover[tree.node(clt.infoset_members(h)[0])]).unwrap())
        .collect();

    let ends: Vec<usize> = tree.end_indices().collect();
    let mut end_pos = vec![None; tree.len()];
    for (k, &e) in ends.iter().enumerate() {
        end_pos[e] = Some(k);
    }
    let mut utility: Vec<Vec<Option<Utility>>> = vec![vec![None; ends.len()]; players.len()];
    for ((player, end), u) in utilities {
        let slot = player_pos(player).zip(tree.index_of(end).and_then(|e| end_pos[e]));
        match slot {
            Some((p, k)) => utility[p][k] = Some(u.clone()),
            None => {
                return Err(GameError::UtilityExtraneous {
                    player: player.clone(),
                    key: end.clone(),
                })
            }
        }
    }
    let mut complete = Vec::with_capacity(players.len());
    for (p, row) in utility.into_iter().enumerate() {
        let mut full = Vec::with_capacity(ends.len());
        for (k, u) in row.into_iter().enumerate() {
            full.push(u.ok_or_else(|| GameError::UtilityMissing {
                player: players[p].clone(),
                end: tree.node(ends[k]).clone(),
            })?);
        }
        complete.push(full);
    }

    Ok(Game {
        clt,
        players,
        infoset_mover,
        end_pos,
        ends,
        utility: complete,
    })
}

/// The game with a single player `P1` moving everywhere and zero utility on
/// every run.
pub fn one_player_zero_game(clt: impl Into<Arc<Clt>>) -> Game {
    let clt: Arc<Clt> = clt.into();
    let p1 = Term::atom("P1");
    let tree = clt.tree();
    let mover = tree.decision_nodes().into_iter().map(|x| (x, p1.clone())).collect();
    let utilities = tree
        .end_nodes()
        .into_iter()
        .map(|e| ((p1.clone(), e), Utility::zero()))
        .collect();
    validate_game(clt, &mover, &utilities).expect("zero game over a valid CLT is valid")
}

impl Game {
    pub fn clt(&self) -> &Clt {
        &self.clt
    }

    pub fn clt_arc(&self) -> &Arc<Clt> {
        &self.clt
    }

    pub fn tree(&self) -> &OutTree {
        self.clt.tree()
    }

    /// `I`, in term order.
    pub fn players(&self) -> &[Term] {
        &self.players
    }

    pub fn player_index(&self, i: &Term) -> Option<usize> {
        self.players.binary_search(i).ok()
    }

    fn require_player(&self, i: &Term) -> Result<usize, GameError> {
        self.player_index(i).ok_or_else(|| GameError::UnknownPlayer(i.clone()))
    }

    pub fn infoset_mover(&self, h: usize) -> usize {
        self.infoset_mover[h]
    }

    pub fn mover_index(&self, x: usize) -> Option<usize> {
        self.clt.info_of_index(x).map(|h| self.infoset_mover[h])
    }

    /// `μ(x)`.
    pub fn mover(&self, x: &Term) -> Option<&Term> {
        let i = self.tree().index_of(x)?;
        self.mover_index(i).map(|p| &self.players[p])
    }

    pub fn movers(&self) -> BTreeMap<Term, Term> {
        self.tree()
            .decision_indices()
            .map(|x| {
                (
                    self.tree().node(x).clone(),
                    self.players[self.mover_index(x).unwrap()].clone(),
                )
            })
            .collect()
    }

    /// `W_i`.
    pub fn player_nodes(&self, i: &Term) -> Result<BTreeSet<Term>, GameError> {
        let p = self.require_player(i)?;
        Ok(self
            .tree()
            .decision_indices()
            .filter(|&x| self.mover_index(x) == Some(p))
            .map(|x| self.tree().node(x).clone())
            .collect())
    }

    /// Infosets at which player index `p` moves.
    pub fn player_infosets(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.clt.infoset_count()).filter(move |&h| self.infoset_mover[h] == p)
    }

    /// End node indices in term order.
    pub fn end_indices(&self) -> &[usize] {
        &self.ends
    }

    pub fn end_position(&self, end: usize) -> Option<usize> {
        self.end_pos[end]
    }

    /// `U_p` at the run ending in node index `end`.
    pub fn utility_at(&self, p: usize, end: usize) -> &Utility {
        &self.utility[p][self.end_pos[end].expect("end node")]
    }

    /// `U_i(Z)`.
    pub fn utility(&self, i: &Term, run: &BTreeSet<Term>) -> Result<&Utility, GameError> {
        let p = self.require_player(i)?;
        let end = self
            .tree()
            .run_end(run)
            .ok_or_else(|| GameError::NotARun(Term::set(run.iter().cloned())))?;
        Ok(self.utility_at(p, end))
    }

    /// All utilities keyed by `(player, end node)`.
    pub fn utilities(&self) -> BTreeMap<(Term, Term), Utility> {
        let mut out = BTreeMap::new();
        for (p, row) in self.utility.iter().enumerate() {
            for (k, u) in row.iter().enumerate() {
                out.insert(
                    (self.players[p].clone(), self.tree().node(self.ends[k]).clone()),
                    u.clone(),
                );
            }
        }
        out
    }

    pub fn runs(&self) -> Vec<BTreeSet<Term>> {
        self.tree().runs()
    }

    /// Dense ranks of player index `p`'s utilities, indexed by end position;
    /// 0 is the least preferred run.
    pub fn ranks(&self, p: usize) -> Vec<usize> {
        let distinct: BTreeSet<&Utility> = self.utility[p].iter().collect();
        let levels: Vec<&Utility> = distinct.into_iter().collect();
        self.utility[p]
            .iter()
            .map(|u| levels.binary_search(&u).unwrap())
            .collect()
    }

    /// The ordinal content of `U_i`: each run's dense rank, 0 lowest.
    pub fn ordinal_profile(&self, i: &Term) -> Result<BTreeMap<BTreeSet<Term>, usize>, GameError> {
        let p = self.require_player(i)?;
        Ok(self
            .ranks(p)
            .into_iter()
            .zip(&self.ends)
            .map(|(rank, &e)| (self.tree().run_of_end(e), rank))
            .collect())
    }

    /// A copy with player `i`'s utilities passed through `f`.
    pub fn map_utilities(&self, i: &Term, f: impl Fn(&Utility) -> Utility) -> Result<Game, GameError> {
        let p = self.require_player(i)?;
        let mut g = self.clone();
        for u in &mut g.utility[p] {
            *u = f(u);
        }
        Ok(g)
    }
}
