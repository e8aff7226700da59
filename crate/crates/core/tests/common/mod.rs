#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use gm_core::format::{parse_game, parse_morphism};
use gm_core::random::{random_game, GameShape};
use gm_core::{validate_game_morphism, Game, GameMorphism, MorphismError, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load(name: &str) -> Arc<Game> {
    let path = fixtures().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    Arc::new(parse_game(&text).unwrap_or_else(|e| panic!("{name}: {e}")).game)
}

/// Loads a `.gmm` file and validates it.
pub fn load_morphism(name: &str) -> (Arc<Game>, Arc<Game>, Result<GameMorphism, MorphismError>) {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    let doc = parse_morphism(&text).unwrap();
    let (source, target) = (load(&doc.source), load(&doc.target));
    let m = validate_game_morphism(source.clone(), target.clone(), &doc.map);
    (source, target, m)
}

pub fn t(s: &str) -> Term {
    Term::atom(s)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_game(seed: u64, shape: &GameShape) -> Arc<Game> {
    Arc::new(random_game(&mut rng(seed), shape))
}

pub mod oracle;

pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
