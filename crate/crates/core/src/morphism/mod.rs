//! CLT and game morphisms.
//!
//! A morphism is a node map between two validated objects. Validation checks
//! the conditions in the fixed order edges, information sets, labels, ends,
//! movers, utilities, and reports the first violation with a witness. The
//! action, run and player transformations are always derived from the node
//! map, never supplied.

mod construct;
mod search;

pub use construct::{clt_mono_witness, mono_witness, pushforward, relabel_nodes, ActionBijections};
pub use search::iso_search;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::clt::Clt;
use crate::game::Game;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("MapMissing: source node {0} is not mapped")]
    MapMissing(Term),
    #[error("MapUnknownSource: {0} is not a source node")]
    MapUnknownSource(Term),
    #[error("MapUnknownTarget: {0} is not a target node")]
    MapUnknownTarget(Term),
    #[error("EdgeNotPreserved ({from},{to})")]
    EdgeNotPreserved { from: Term, to: Term },
    #[error("InfosetSplit {}", Term::set(infoset.iter().cloned()))]
    InfosetSplit { infoset: BTreeSet<Term> },
    #[error("ActionTransformNotConstant ({x1},{x2}): alpha_{x1}({action})={image1}, alpha_{x2}({action})={image2}")]
    ActionTransformNotConstant {
        x1: Term,
        x2: Term,
        action: Term,
        image1: Term,
        image2: Term,
    },
    #[error("CltMorphismInvalid: {0}")]
    CltMorphismInvalid(Box<MorphismError>),
    #[error("NotEndPreserving: end {end} maps to decision node {image}")]
    NotEndPreserving { end: Term, image: Term },
    #[error("NoPlayerTransform: {x1} and {x2} share a mover but their images do not")]
    NoPlayerTransform { x1: Term, x2: Term },
    #[error("UtilityNotPreserved: player {player}, runs {} and {}", Term::set(z1.iter().cloned()), Term::set(z2.iter().cloned()))]
    UtilityNotPreserved {
        player: Term,
        z1: BTreeSet<Term>,
        z2: BTreeSet<Term>,
    },
    #[error("SourceTargetMismatch: the first morphism's target is not the second's source")]
    SourceTargetMismatch,
    #[error("NotIso")]
    NotIso,
    #[error("NotFeasible: {action} at {node}")]
    NotFeasible { node: Term, action: Term },
    #[error("NotARun: {0} is not a run of the source")]
    NotARun(Term),
    #[error("NotBijective: {0}")]
    NotBijective(String),
    #[error("ActionBijsNotConstantOnInfoset ({x1},{x2})")]
    ActionBijsNotConstantOnInfoset { x1: Term, x2: Term },
    #[error("Construction: pushforward produced an invalid game: {0}")]
    Construction(String),
}

impl MorphismError {
    /// The underlying condition, with any `CltMorphismInvalid` wrapper removed.
    pub fn root_cause(&self) -> &MorphismError {
        match self {
            MorphismError::CltMorphismInvalid(inner) => inner.root_cause(),
            other => other,
        }
    }
}

/// Why a valid morphism fails to be an isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoObstruction {
    /// Two source nodes share an image.
    NotInjective {
        x1: Term,
        x2: Term,
    },
    /// A target node is not an image.
    NotSurjective {
        missed: Term,
    },
    /// A source infoset whose image is not a whole target infoset.
    InfosetImageNotCell {
        infoset: BTreeSet<Term>,
    },
    PlayerTransformNotInjective {
        i1: Term,
        i2: Term,
    },
    /// `U'_{ι(i)}(ζ(Z1)) ≥ U'_{ι(i)}(ζ(Z2))` while `U_i(Z1) < U_i(Z2)`.
    UtilityOrderNotReflected {
        player: Term,
        z1: BTreeSet<Term>,
        z2: BTreeSet<Term>,
    },
}

impl std::fmt::Display for IsoObstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let set = |s: &BTreeSet<Term>| Term::set(s.iter().cloned());
        match self {
            IsoObstruction::NotInjective { x1, x2 } => write!(f, "node map not injective: {x1} and {x2}"),
            IsoObstruction::NotSurjective { missed } => write!(f, "node map not surjective: {missed} missed"),
            IsoObstruction::InfosetImageNotCell { infoset } => {
                write!(f, "infoset image not a target infoset: {}", set(infoset))
            }
            IsoObstruction::PlayerTransformNotInjective { i1, i2 } => {
                write!(f, "player transformation not injective: {i1} and {i2}")
            }
            IsoObstruction::UtilityOrderNotReflected { player, z1, z2 } => write!(
                f,
                "utility order not reflected: player {player}, runs {} and {}",
                set(z1),
                set(z2)
            ),
        }
    }
}

fn resolve_map(source: &Clt, target: &Clt, node_map: &BTreeMap<Term, Term>) -> Result<Vec<usize>, MorphismError> {
    for x in node_map.keys() {
        if source.tree().index_of(x).is_none() {
            return Err(MorphismError::MapUnknownSource(x.clone()));
        }
    }
    source
        .tree()
        .nodes()
        .iter()
        .map(|x| {
            let image = node_map.get(x).ok_or_else(|| MorphismError::MapMissing(x.clone()))?;
            target
                .tree()
                .index_of(image)
                .ok_or_else(|| MorphismError::MapUnknownTarget(image.clone()))
        })
        .collect()
}

#[derive(Clone)]
pub struct CltMorphism {
    source: Arc<Clt>,
    target: Arc<Clt>,
    map: Vec<usize>,
    /// `α_x` per source node index; empty at end nodes.
    alpha: Vec<BTreeMap<Term, Term>>,
}

impl PartialEq for CltMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && same(&self.source, &other.source) && same(&self.target, &other.target)
    }
}

impl Eq for CltMorphism {}

impl std::fmt::Debug for CltMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CltMorphism")
            .field("node_map", &self.node_map())
            .finish()
    }
}

fn same<T: PartialEq>(a: &Arc<T>, b: &Arc<T>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Checks `[cE]`, `[cI]`, `[cL]` and derives `α`.
pub fn validate_clt_morphism(
    source: Arc<Clt>,
    target: Arc<Clt>,
    node_map: &BTreeMap<Term, Term>,
) -> Result<CltMorphism, MorphismError> {
    let map = resolve_map(&source, &target, node_map)?;
    from_index_map(source, target, map)
}

pub(crate) fn from_index_map(
    source: Arc<Clt>,
    target: Arc<Clt>,
    map: Vec<usize>,
) -> Result<CltMorphism, MorphismError> {
    let (st, tt) = (source.tree(), target.tree());

    for (x, y) in st.edge_indices() {
        if tt.parent_index(map[y]) != Some(map[x]) {
            return Err(MorphismError::EdgeNotPreserved {
                from: st.node(x).clone(),
                to: st.node(y).clone(),
            });
        }
    }

    for h in 0..source.infoset_count() {
        let members = source.infoset_members(h);
        let image_cell = target.info_of_index(map[members[0]]);
        if members.iter().any(|&x| target.info_of_index(map[x]) != image_cell) {
            return Err(MorphismError::InfosetSplit {
                infoset: source.infoset_terms(h),
            });
        }
    }

    let alpha: Vec<BTreeMap<Term, Term>> = (0..st.len())
        .map(|x| {
            source
                .feasible_index(x)
                .iter()
                .map(|(a, &y)| {
                    let image = target.label_into(map[y]).expect("edge image is an edge").clone();
                    (a.clone(), image)
                })
                .collect()
        })
        .collect();

    for h in 0..source.infoset_count() {
        let members = source.infoset_members(h);
        let first = members[0];
        for &other in &members[1..] {
            if alpha[first] != alpha[other] {
                let (action, image1) = alpha[first]
                    .iter()
                    .find(|(a, b)| alpha[other].get(*a) != Some(*b))
                    .expect("maps differ on a shared domain");
                return Err(MorphismError::ActionTransformNotConstant {
                    x1: st.node(first).clone(),
                    x2: st.node(other).clone(),
                    action: action.clone(),
                    image1: image1.clone(),
                    image2: alpha[other][action].clone(),
                });
            }
        }
    }

    Ok(CltMorphism {
        source,
        target,
        map,
        alpha,
    })
}

impl CltMorphism {
    pub fn identity(clt: Arc<Clt>) -> CltMorphism {
        let map = (0..clt.tree().len()).collect();
        from_index_map(clt.clone(), clt, map).expect("identity is a morphism")
    }

    pub fn source(&self) -> &Arc<Clt> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Clt> {
        &self.target
    }

    pub fn index_map(&self) -> &[usize] {
        &self.map
    }

    /// `τ` as a term map.
    pub fn node_map(&self) -> BTreeMap<Term, Term> {
        let (st, tt) = (self.source.tree(), self.target.tree());
        self.map
            .iter()
            .enumerate()
            .map(|(x, &y)| (st.node(x).clone(), tt.node(y).clone()))
            .collect()
    }

    pub fn image(&self, x: &Term) -> Option<&Term> {
        let i = self.source.tree().index_of(x)?;
        Some(self.target.tree().node(self.map[i]))
    }

    /// `α_x` at node index `x`.
    pub fn alpha_index(&self, x: usize) -> &BTreeMap<Term, Term> {
        &self.alpha[x]
    }

    /// `α_x`, or `None` when `x` is not a source decision node.
    pub fn action_transform(&self, x: &Term) -> Option<&BTreeMap<Term, Term>> {
        let i = self.source.tree().index_of(x)?;
        self.source.tree().is_decision_index(i).then(|| &self.alpha[i])
    }

    /// `α_x(a)`.
    pub fn action_at(&self, x: &Term, a: &Term) -> Result<Term, MorphismError> {
        self.action_transform(x)
            .and_then(|alpha| alpha.get(a))
            .cloned()
            .ok_or_else(|| MorphismError::NotFeasible {
                node: x.clone(),
                action: a.clone(),
            })
    }

    /// A pair of distinct source nodes with one image, if any.
    pub fn collision(&self) -> Option<(usize, usize)> {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (x, &y) in self.map.iter().enumerate() {
            if let Some(&first) = seen.get(&y) {
                return Some((first, x));
            }
            seen.insert(y, x);
        }
        None
    }

    /// Monic iff `τ` is injective.
    pub fn is_mono(&self) -> bool {
        self.collision().is_none()
    }

    pub fn iso_obstruction(&self) -> Option<IsoObstruction> {
        let (st, tt) = (self.source.tree(), self.target.tree());
        if let Some((a, b)) = self.collision() {
            return Some(IsoObstruction::NotInjective {
                x1: st.node(a).clone(),
                x2: st.node(b).clone(),
            });
        }
        if st.len() != tt.len() {
            let hit: BTreeSet<usize> = self.map.iter().copied().collect();
            let missed = (0..tt.len()).find(|y| !hit.contains(y)).unwrap();
            return Some(IsoObstruction::NotSurjective {
                missed: tt.node(missed).clone(),
            });
        }
        // With τ bijective, `H ↦ τ̄(H)` is a bijection onto H' iff every image
        // is a whole cell and the cell counts agree.
        for h in 0..self.source.infoset_count() {
            let members = self.source.infoset_members(h);
            let cell = self.target.info_of_index(self.map[members[0]]).unwrap();
            if self.target.infoset_members(cell).len() != members.len() {
                return Some(IsoObstruction::InfosetImageNotCell {
                    infoset: self.source.infoset_terms(h),
                });
            }
        }
        None
    }

    /// `τ` bijective and `H ∋ H ↦ τ̄(H) ∈ H'` a bijection.
    pub fn is_iso(&self) -> bool {
        self.iso_obstruction().is_none()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &CltMorphism) -> Result<CltMorphism, MorphismError> {
        if !same(&first.target, &self.source) {
            return Err(MorphismError::SourceTargetMismatch);
        }
        let map = first.map.iter().map(|&y| self.map[y]).collect();
        from_index_map(first.source.clone(), self.target.clone(), map)
    }

    pub fn inverse(&self) -> Result<CltMorphism, MorphismError> {
        if !self.is_iso() {
            return Err(MorphismError::NotIso);
        }
        from_index_map(self.target.clone(), self.source.clone(), invert(&self.map))
    }
}

fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (x, &y) in map.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

#[derive(Clone)]
pub struct GameMorphism {
    source: Arc<Game>,
    target: Arc<Game>,
    clt: CltMorphism,
    /// `ζ`, as target end node index per source end position.
    zeta: Vec<usize>,
    /// `ι`, as target player index per source player index.
    iota: Vec<usize>,
}

impl PartialEq for GameMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.clt.map == other.clt.map && same(&self.source, &other.source) && same(&self.target, &other.target)
    }
}

impl Eq for GameMorphism {}

impl std::fmt::Debug for GameMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameMorphism")
            .field("node_map", &self.node_map())
            .finish()
    }
}

/// Checks `[gZ]`, `[gM]`, `[gU]` on top of the CLT conditions and derives `ζ`
/// and `ι`.
pub fn validate_game_morphism(
    source: Arc<Game>,
    target: Arc<Game>,
    node_map: &BTreeMap<Term, Term>,
) -> Result<GameMorphism, MorphismError> {
    let map = resolve_map(source.clt(), target.clt(), node_map)?;
    game_from_index_map(source, target, map)
}

pub(crate) fn game_from_index_map(
    source: Arc<Game>,
    target: Arc<Game>,
    map: Vec<usize>,
) -> Result<GameMorphism, MorphismError> {
    let clt = from_index_map(source.clt_arc().clone(), target.clt_arc().clone(), map)
        .map_err(|e| MorphismError::CltMorphismInvalid(Box::new(e)))?;
    let (st, tt) = (source.tree(), target.tree());

    for &e in source.end_indices() {
        if tt.is_decision_index(clt.map[e]) {
            return Err(MorphismError::NotEndPreserving {
                end: st.node(e).clone(),
                image: tt.node(clt.map[e]).clone(),
            });
        }
    }

    // ζ(Z) = P'(τ(r)) ∪ τ̄(Z)
    let above_root: BTreeSet<usize> = {
        let mut path = tt.path_indices(clt.map[st.root_index()]);
        path.pop();
        path.into_iter().collect()
    };
    let zeta: Vec<usize> = source
        .end_indices()
        .iter()
        .map(|&e| {
            let mut image = above_root.clone();
            image.extend(st.path_indices(e).into_iter().map(|x| clt.map[x]));
            let run: BTreeSet<Term> = image.iter().map(|&y| tt.node(y).clone()).collect();
            tt.run_end(&run).expect("ζ of an end-preserving morphism is a run")
        })
        .collect();

    let mut iota: Vec<Option<(usize, usize)>> = vec![None; source.players().len()];
    for x in st.decision_indices() {
        let i = source.mover_index(x).unwrap();
        let image = target.mover_index(clt.map[x]).unwrap();
        match iota[i] {
            None => iota[i] = Some((image, x)),
            Some((prev, witness)) if prev != image => {
                return Err(MorphismError::NoPlayerTransform {
                    x1: st.node(witness).clone(),
                    x2: st.node(x).clone(),
                })
            }
            Some(_) => {}
        }
    }
    let iota: Vec<usize> = iota.into_iter().map(|v| v.expect("every player moves").0).collect();

    let ends = source.end_indices();
    for (i, &j) in iota.iter().enumerate() {
        for (k1, &e1) in ends.iter().enumerate() {
            for (k2, &e2) in ends.iter().enumerate() {
                if source.utility_at(i, e1) >= source.utility_at(i, e2)
                    && target.utility_at(j, zeta[k1]) < target.utility_at(j, zeta[k2])
                {
                    return Err(MorphismError::UtilityNotPreserved {
                        player: source.players()[i].clone(),
                        z1: st.run_of_end(e1),
                        z2: st.run_of_end(e2),
                    });
                }
            }
        }
    }

    Ok(GameMorphism {
        source,
        target,
        clt,
        zeta,
        iota,
    })
}

impl GameMorphism {
    /// `id_Γ`.
    pub fn identity(game: Arc<Game>) -> GameMorphism {
        let map = (0..game.tree().len()).collect();
        game_from_index_map(game.clone(), game, map).expect("identity is a morphism")
    }

    pub fn source(&self) -> &Arc<Game> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Game> {
        &self.target
    }

    /// The underlying CLT morphism.
    pub fn forget(&self) -> CltMorphism {
        self.clt.clone()
    }

    pub fn clt_morphism(&self) -> &CltMorphism {
        &self.clt
    }

    pub fn index_map(&self) -> &[usize] {
        &self.clt.map
    }

    pub fn node_map(&self) -> BTreeMap<Term, Term> {
        self.clt.node_map()
    }

    pub fn action_at(&self, x: &Term, a: &Term) -> Result<Term, MorphismError> {
        self.clt.action_at(x, a)
    }

    pub fn action_transform(&self, x: &Term) -> Option<&BTreeMap<Term, Term>> {
        self.clt.action_transform(x)
    }

    /// Target end node index of `ζ` applied to the run ending at source end `e`.
    pub fn zeta_index(&self, e: usize) -> usize {
        self.zeta[self.source.end_position(e).expect("source end node")]
    }

    pub fn iota_index(&self, i: usize) -> usize {
        self.iota[i]
    }

    /// `ζ(Z)`.
    pub fn run_at(&self, run: &BTreeSet<Term>) -> Result<BTreeSet<Term>, MorphismError> {
        let e = self
            .source
            .tree()
            .run_end(run)
            .ok_or_else(|| MorphismError::NotARun(Term::set(run.iter().cloned())))?;
        Ok(self.target.tree().run_of_end(self.zeta_index(e)))
    }

    /// `ζ` as a map between run node sets.
    pub fn run_transform(&self) -> BTreeMap<BTreeSet<Term>, BTreeSet<Term>> {
        self.source
            .end_indices()
            .iter()
            .map(|&e| {
                (
                    self.source.tree().run_of_end(e),
                    self.target.tree().run_of_end(self.zeta_index(e)),
                )
            })
            .collect()
    }

    /// `ι`.
    pub fn player_transform(&self) -> BTreeMap<Term, Term> {
        self.iota
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.source.players()[i].clone(), self.target.players()[j].clone()))
            .collect()
    }

    /// Two source runs with one `ζ`-image, if any.
    pub fn run_collision(&self) -> Option<(usize, usize)> {
        let ends = self.source.end_indices();
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, &image) in self.zeta.iter().enumerate() {
            if let Some(&first) = seen.get(&image) {
                return Some((ends[first], ends[k]));
            }
            seen.insert(image, k);
        }
        None
    }

    /// Monic iff `ζ` is injective.
    pub fn is_mono(&self) -> bool {
        self.run_collision().is_none()
    }

    pub fn iso_obstruction(&self) -> Option<IsoObstruction> {
        if let Some(o) = self.clt.iso_obstruction() {
            return Some(o);
        }
        let players = self.source.players();
        for a in 0..self.iota.len() {
            for b in a + 1..self.iota.len() {
                if self.iota[a] == self.iota[b] {
                    return Some(IsoObstruction::PlayerTransformNotInjective {
                        i1: players[a].clone(),
                        i2: players[b].clone(),
                    });
                }
            }
        }
        let ends = self.source.end_indices();
        let st = self.source.tree();
        for (i, &j) in self.iota.iter().enumerate() {
            for (k1, &e1) in ends.iter().enumerate() {
                for (k2, &e2) in ends.iter().enumerate() {
                    let before = self.source.utility_at(i, e1) >= self.source.utility_at(i, e2);
                    let after = self.target.utility_at(j, self.zeta[k1]) >= self.target.utility_at(j, self.zeta[k2]);
                    if before != after {
                        return Some(IsoObstruction::UtilityOrderNotReflected {
                            player: players[i].clone(),
                            z1: st.run_of_end(e1),
                            z2: st.run_of_end(e2),
                        });
                    }
                }
            }
        }
        None
    }

    /// Bijective `τ`, homeomorphic on decision nodes, injective `ι`, and the
    /// utility comparison preserved in both directions.
    pub fn is_iso(&self) -> bool {
        self.iso_obstruction().is_none()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &GameMorphism) -> Result<GameMorphism, MorphismError> {
        if !same(&first.target, &self.source) {
            return Err(MorphismError::SourceTargetMismatch);
        }
        let map = first.clt.map.iter().map(|&y| self.clt.map[y]).collect();
        game_from_index_map(first.source.clone(), self.target.clone(), map)
    }

    pub fn inverse(&self) -> Result<GameMorphism, MorphismError> {
        if !self.is_iso() {
            return Err(MorphismError::NotIso);
        }
        game_from_index_map(self.target.clone(), self.source.clone(), invert(&self.clt.map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clt::validate_clt;
    use crate::game::{one_player_zero_game, validate_game, Utility};
    use crate::term::atoms;
    use crate::tree::validate_out_tree;

    fn t(s: &str) -> Term {
        Term::atom(s)
    }

    fn clt(spec: &[(&str, &str, &str)], cells: &[&[&str]]) -> Arc<Clt> {
        let nodes = spec.iter().flat_map(|&(a, b, _)| [t(a), t(b)]).collect();
        let edges = spec.iter().map(|&(a, b, _)| (t(a), t(b))).collect();
        let labels = spec.iter().map(|&(a, b, l)| ((t(a), t(b)), t(l))).collect();
        let cells: Vec<BTreeSet<Term>> = cells.iter().map(|c| atoms(c.iter().copied())).collect();
        Arc::new(validate_clt(validate_out_tree(&nodes, &edges).unwrap(), &cells, &labels).unwrap())
    }

    fn shift(by: i64, nodes: &[&str]) -> BTreeMap<Term, Term> {
        nodes
            .iter()
            .map(|&x| (t(x), t(&(x.parse::<i64>().unwrap() + by).to_string())))
            .collect()
    }

    #[test]
    fn alpha_and_split_witnesses() {
        let source = clt(
            &[("0", "1", "a"), ("0", "2", "b"), ("1", "3", "c"), ("2", "4", "c")],
            &[&["0"], &["1", "2"]],
        );
        let target = clt(
            &[("0", "1", "a"), ("0", "2", "b"), ("1", "3", "c"), ("2", "4", "c")],
            &[&["0"], &["1"], &["2"]],
        );
        let id = shift(0, &["0", "1", "2", "3", "4"]);
        assert_eq!(
            validate_clt_morphism(source.clone(), target.clone(), &id),
            Err(MorphismError::InfosetSplit {
                infoset: atoms(["1", "2"])
            })
        );
        let back = validate_clt_morphism(target.clone(), source.clone(), &id).unwrap();
        assert!(back.is_mono());
        assert!(!back.is_iso());
        assert_eq!(back.action_at(&t("1"), &t("c")).unwrap(), t("c"));

        let renamed = clt(
            &[("0", "1", "a"), ("0", "2", "b"), ("1", "3", "x"), ("2", "4", "y")],
            &[&["0"], &["1"], &["2"]],
        );
        let ok = validate_clt_morphism(target, renamed.clone(), &id).unwrap();
        assert_eq!(ok.action_at(&t("1"), &t("c")).unwrap(), t("x"));
        assert_eq!(
            ok.action_at(&t("3"), &t("c")),
            Err(MorphismError::NotFeasible {
                node: t("3"),
                action: t("c")
            })
        );
        assert!(matches!(
            validate_clt_morphism(source, renamed, &id),
            Err(MorphismError::InfosetSplit { .. })
        ));
    }

    #[test]
    fn map_errors() {
        let c = clt(&[("0", "1", "a"), ("0", "2", "b")], &[&["0"]]);
        let mut m = shift(0, &["0", "1"]);
        assert_eq!(
            validate_clt_morphism(c.clone(), c.clone(), &m),
            Err(MorphismError::MapMissing(t("2")))
        );
        m.insert(t("2"), t("9"));
        assert_eq!(
            validate_clt_morphism(c.clone(), c.clone(), &m),
            Err(MorphismError::MapUnknownTarget(t("9")))
        );
        m.insert(t("7"), t("0"));
        assert_eq!(
            validate_clt_morphism(c.clone(), c.clone(), &m),
            Err(MorphismError::MapUnknownSource(t("7")))
        );
        let swapped: BTreeMap<Term, Term> = [("0", "1"), ("1", "0"), ("2", "2")]
            .iter()
            .map(|&(a, b)| (t(a), t(b)))
            .collect();
        assert_eq!(
            validate_clt_morphism(c.clone(), c, &swapped),
            Err(MorphismError::EdgeNotPreserved {
                from: t("0"),
                to: t("1")
            })
        );
    }

    #[test]
    fn end_preservation_and_zeta() {
        let small = Arc::new(one_player_zero_game(clt(
            &[("0", "1", "a"), ("0", "2", "b")],
            &[&["0"]],
        )));
        let grows = Arc::new(one_player_zero_game(clt(
            &[
                ("10", "11", "a"),
                ("10", "12", "b"),
                ("12", "13", "c"),
                ("12", "14", "d"),
            ],
            &[&["10"], &["12"]],
        )));
        assert_eq!(
            validate_game_morphism(small.clone(), grows, &shift(10, &["0", "1", "2"])),
            Err(MorphismError::NotEndPreserving {
                end: t("2"),
                image: t("12")
            })
        );
        let above = Arc::new(one_player_zero_game(clt(
            &[
                ("50", "10", "a"),
                ("50", "13", "b"),
                ("10", "11", "a"),
                ("10", "12", "b"),
            ],
            &[&["50"], &["10"]],
        )));
        let m = validate_game_morphism(small.clone(), above, &shift(10, &["0", "1", "2"])).unwrap();
        assert_eq!(m.run_at(&atoms(["0", "2"])).unwrap(), atoms(["50", "10", "12"]));
        assert_eq!(m.run_at(&atoms(["0", "1"])).unwrap(), atoms(["50", "10", "11"]));
        assert!(matches!(m.run_at(&atoms(["0"])), Err(MorphismError::NotARun(_))));
        assert!(m.is_mono());
        assert!(!m.is_iso());
        let id = GameMorphism::identity(small.clone());
        assert_eq!(m.compose(&id).unwrap(), m);
        assert_eq!(GameMorphism::identity(m.target().clone()).compose(&m).unwrap(), m);
        assert_eq!(id.compose(&m), Err(MorphismError::SourceTargetMismatch));
    }

    #[test]
    fn players_and_utilities() {
        let c = clt(
            &[("0", "1", "a"), ("0", "2", "b"), ("1", "3", "c"), ("1", "4", "d")],
            &[&["0"], &["1"]],
        );
        let zero = |i: &str, j: &str| {
            let mover: BTreeMap<Term, Term> = [("0", i), ("1", j)].iter().map(|&(x, p)| (t(x), t(p))).collect();
            let players: BTreeSet<Term> = mover.values().cloned().collect();
            let u = players
                .iter()
                .flat_map(|p| ["2", "3", "4"].map(|e| ((p.clone(), t(e)), Utility::from_integer(0.into()))))
                .collect();
            Arc::new(validate_game(c.clone(), &mover, &u).unwrap())
        };
        let id = shift(0, &["0", "1", "2", "3", "4"]);
        assert_eq!(
            validate_game_morphism(zero("P1", "P1"), zero("P1", "P2"), &id),
            Err(MorphismError::NoPlayerTransform { x1: t("0"), x2: t("1") })
        );
        let merge = validate_game_morphism(zero("P1", "P2"), zero("P1", "P1"), &id).unwrap();
        assert!(merge.is_mono());
        assert!(matches!(
            merge.iso_obstruction(),
            Some(IsoObstruction::PlayerTransformNotInjective { .. })
        ));
        assert_eq!(merge.inverse(), Err(MorphismError::NotIso));
    }
}
