//! Finite extensive-form games as objects of a category.
//!
//! Objects are validated games built on continuously labeled trees; arrows
//! are node maps that preserve edges, information sets, labels, ends, movers
//! and the order of utilities.

#![allow(clippy::result_large_err)]

pub mod canon;
pub mod clt;
pub mod equilibrium;
pub mod format;
pub mod game;
pub mod morphism;
pub mod random;
pub mod subgame;
pub mod term;
pub mod tree;

pub use clt::{validate_clt, Clt, CltError};
pub use game::{one_player_zero_game, validate_game, Game, GameError, Utility};
pub use morphism::{
    validate_clt_morphism, validate_game_morphism, CltMorphism, GameMorphism, IsoObstruction, MorphismError,
};
pub use term::Term;
pub use tree::{validate_out_tree, OutTree, TreeError};
