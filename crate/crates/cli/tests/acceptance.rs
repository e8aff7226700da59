//! Acceptance criteria 1-8. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion does.

#![allow(clippy::result_large_err)]

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use gm_cli::run_command;
use gm_core::canon::{
    properties, range, to_action_set, to_distinguished, to_distinguished_sequence, to_sequence, ConversionResult,
};
use gm_core::equilibrium::{nash, outcome, push_strategy, spe, strategies, GrandStrategy};
use gm_core::morphism::{clt_mono_witness, iso_search, mono_witness, relabel_nodes};
use gm_core::random::{random_clt, random_game, random_isomorph, random_morphism_into, GameShape};
use gm_core::subgame::{is_selten_subgame, selten_subgame, subgame_roots, SubgameError};
use gm_core::{validate_game_morphism, CltMorphism, Game, GameMorphism, Term, Utility};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: usize = 1_000_000;

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shape(max_nodes: usize, max_players: usize, max_infosets: usize) -> GameShape {
    GameShape {
        max_nodes,
        max_players,
        max_actions: 3,
        max_infosets,
        utility_range: 2,
    }
}

fn injective(map: &[usize]) -> bool {
    map.iter().collect::<BTreeSet<_>>().len() == map.len()
}

fn conversions(g: &Arc<Game>) -> Vec<(&'static str, ConversionResult)> {
    let mut out = vec![
        ("distinguished", to_distinguished(g)),
        ("sequence", to_sequence(g)),
        ("distinguished-sequence", to_distinguished_sequence(g)),
    ];
    if let Ok(c) = to_action_set(g) {
        out.push(("action-set", c));
    }
    out
}

fn criterion_1() -> Verdict {
    let mut alphas = 0;
    for seed in 0..500u64 {
        let mut r = rng(seed);
        let g = Arc::new(random_game(&mut r, &shape(12, 3, usize::MAX)));
        let c = random_morphism_into(&mut r, &g, 12);
        let b = random_morphism_into(&mut r, c.source(), 12);
        let a = random_morphism_into(&mut r, b.source(), 12);
        let id_src = GameMorphism::identity(a.source().clone());
        let id_tgt = GameMorphism::identity(a.target().clone());
        ensure!(a.compose(&id_src).unwrap() == a, "seed {seed}: a∘id ≠ a");
        ensure!(id_tgt.compose(&a).unwrap() == a, "seed {seed}: id∘a ≠ a");
        let left = c.compose(&b).unwrap().compose(&a).unwrap();
        let right = c.compose(&b.compose(&a).unwrap()).unwrap();
        ensure!(left == right, "seed {seed}: associativity");

        let ba = b.compose(&a).unwrap();
        let src = a.source();
        for x in src.tree().decision_indices() {
            let y = a.index_map()[x];
            for (act, image) in ba.clt_morphism().alpha_index(x) {
                let expected = &b.clt_morphism().alpha_index(y)[&a.clt_morphism().alpha_index(x)[act]];
                ensure!(image == expected, "seed {seed}: alpha at {}", src.tree().node(x));
                alphas += 1;
            }
        }
        for &e in src.end_indices() {
            ensure!(ba.zeta_index(e) == b.zeta_index(a.zeta_index(e)), "seed {seed}: zeta");
        }
        for i in 0..src.players().len() {
            ensure!(ba.iota_index(i) == b.iota_index(a.iota_index(i)), "seed {seed}: iota");
        }
        ensure!(
            ba.forget() == b.forget().compose(&a.forget()).unwrap(),
            "seed {seed}: forget"
        );
    }
    Ok(format!("500 triples, {alphas} action images"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn gm(args: &[&str]) -> (i32, String) {
    run_command(args.iter().map(|a| a.to_string()))
}

fn criterion_2() -> Verdict {
    let checks: [(&[&str], i32, &str); 6] = [
        (&["morphism", "check", "crossed.gmm"], 1, "alpha_3(b)=e, alpha_4(b)=f"),
        (&["morphism", "check", "below.gmm"], 0, "  {0,2} -> {10,12,50}\n"),
        (&["morphism", "check", "split.gmm"], 1, "\nInfosetSplit {1,3}\n"),
        (&["subgame", "straddle.gm", "--at", "24"], 0, "subgame at 24: 3 nodes\n"),
        (
            &["subgame", "straddle.gm", "--at", "11"],
            1,
            "NotExists, witness {11,12}",
        ),
        (
            &["morphism", "check", "no_player_transform.gmm"],
            1,
            "\nNoPlayerTransform: ",
        ),
    ];
    for (args, code, needle) in checks {
        let mut argv: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        let file = argv
            .iter()
            .position(|a| a.ends_with(".gm") || a.ends_with(".gmm"))
            .unwrap();
        argv[file] = fixture(&argv[file]);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let (got, out) = gm(&argv);
        ensure!(got == code, "{args:?}: exit {got}, expected {code}\n{out}");
        ensure!(out.contains(needle), "{args:?}: missing {needle:?} in\n{out}");
    }
    Ok("6 fixture verdicts".into())
}

fn criterion_3() -> Verdict {
    let (mut game_pairs, mut clt_pairs) = (0, 0);
    for seed in 0..300u64 {
        let mut r = rng(1_000 + seed);
        let g = Arc::new(random_game(&mut r, &shape(10, 3, usize::MAX)));
        let m = random_morphism_into(&mut r, &g, 10);
        match mono_witness(&m) {
            None => ensure!(m.is_mono(), "seed {seed}: no witness for a non-mono"),
            Some((g1, g2)) => {
                ensure!(!m.is_mono(), "seed {seed}: witness for a mono");
                ensure!(g1 != g2 && g1.index_map() != g2.index_map(), "seed {seed}: equal legs");
                ensure!(
                    m.compose(&g1).unwrap() == m.compose(&g2).unwrap(),
                    "seed {seed}: composites differ"
                );
                game_pairs += 1;
            }
        }
        let c = m.forget();
        match clt_mono_witness(&c) {
            None => ensure!(injective(c.index_map()), "seed {seed}: no CLT witness for a collision"),
            Some((t1, t2)) => {
                ensure!(!injective(c.index_map()), "seed {seed}: CLT witness for injective τ");
                ensure!(t1 != t2, "seed {seed}: equal CLT legs");
                ensure!(
                    c.compose(&t1).unwrap() == c.compose(&t2).unwrap(),
                    "seed {seed}: CLT composites differ"
                );
                clt_pairs += 1;
            }
        }
    }
    ensure!(
        game_pairs > 0 && clt_pairs > game_pairs,
        "witness branches not exercised"
    );
    Ok(format!(
        "300 morphisms, {game_pairs} game and {clt_pairs} CLT witness pairs"
    ))
}

fn inverse_laws(g: &Arc<Game>, m: &GameMorphism, what: &str) -> Result<(), String> {
    ensure!(m.is_iso(), "{what}: certificate not iso");
    let inv = m.inverse().map_err(|e| format!("{what}: {e}"))?;
    let revalidated = validate_game_morphism(inv.source().clone(), inv.target().clone(), &inv.node_map())
        .map_err(|e| format!("{what}: inverse invalid: {e}"))?;
    ensure!(revalidated == inv, "{what}: inverse revalidates differently");
    ensure!(
        inv.compose(m).unwrap() == GameMorphism::identity(g.clone()),
        "{what}: inverse∘m ≠ id"
    );
    Ok(())
}

fn criterion_4() -> Verdict {
    let (mut certificates, mut misses) = (0, 0);
    let games: Vec<Arc<Game>> = (0..200u64)
        .map(|s| Arc::new(random_game(&mut rng(2_000 + s), &shape(10, 4, usize::MAX))))
        .collect();
    for (k, g) in games.iter().enumerate() {
        let convs = conversions(g);
        ensure!(
            convs.len() == 4 || !properties(g).no_absentmindedness,
            "game {k}: to_action_set refused a no-absentminded game"
        );
        for (form, c) in &convs {
            inverse_laws(g, &c.certificate, &format!("game {k} {form}"))?;
            certificates += 1;
        }
        let nodes: BTreeMap<Term, Term> = g
            .tree()
            .nodes()
            .iter()
            .map(|x| (x.clone(), Term::pair(Term::atom("r"), x.clone())))
            .collect();
        let (relabelled, _) = relabel_nodes(g, &nodes).map_err(|e| e.to_string())?;
        let found = iso_search(g, &relabelled).ok_or(format!("game {k}: relabelled copy not found"))?;
        ensure!(found.is_iso(), "game {k}: search returned a non-iso");
        let other = &games[(k + 1) % games.len()];
        if other.runs().len() != g.runs().len() {
            ensure!(iso_search(g, other).is_none(), "game {k}: iso across run counts");
            misses += 1;
        }
    }
    ensure!(misses > 0, "no run-count mismatch exercised");
    Ok(format!("{certificates} certificates, {misses} run-count mismatches"))
}

fn equilibrium_games() -> Vec<Arc<Game>> {
    (0..100u64)
        .map(|s| Arc::new(random_game(&mut rng(3_000 + s), &shape(10, 3, 4))))
        .collect()
}

fn pushed(iso: &GameMorphism, found: &[GrandStrategy]) -> BTreeSet<GrandStrategy> {
    found.iter().map(|s| push_strategy(iso, s).unwrap()).collect()
}

fn criterion_5(games: &[Arc<Game>]) -> Verdict {
    let mut checked = 0;
    for (k, g) in games.iter().enumerate() {
        ensure!(g.clt().infoset_count() <= 4, "game {k}: too many infosets");
        let all = strategies(g, CAP).map_err(|e| e.to_string())?;
        let n = nash(g, CAP).unwrap();
        let s = spe(g, CAP).unwrap();
        for (form, c) in conversions(g) {
            let h = &c.game;
            for st in &all {
                let image = push_strategy(&c.certificate, st).unwrap();
                let left = c.certificate.run_at(&outcome(g, st).unwrap()).unwrap();
                ensure!(
                    left == outcome(h, &image).unwrap(),
                    "game {k} {form}: ζ∘o ≠ o′∘push at {st}"
                );
            }
            ensure!(
                pushed(&c.certificate, &n) == nash(h, CAP).unwrap().into_iter().collect(),
                "game {k} {form}: nash"
            );
            ensure!(
                pushed(&c.certificate, &s) == spe(h, CAP).unwrap().into_iter().collect(),
                "game {k} {form}: spe"
            );
        }
        if k < 20 {
            let as_profiles = |v: &[GrandStrategy]| v.iter().map(|s| s.choices().clone()).collect::<BTreeSet<_>>();
            ensure!(
                as_profiles(&n) == oracle::nash(g),
                "game {k}: nash differs from the oracle"
            );
            ensure!(
                as_profiles(&s) == oracle::spe(g),
                "game {k}: spe differs from the oracle"
            );
            checked += 1;
        }
    }
    Ok(format!("{} games, {checked} against the oracle", games.len()))
}

fn criterion_6(games: &[Arc<Game>]) -> Verdict {
    let (mut subs, mut absent) = (0, 0);
    for (k, g) in games.iter().enumerate() {
        for r in g.tree().decision_nodes() {
            match selten_subgame(g, &r) {
                Ok(sub) => {
                    ensure!(is_selten_subgame(&sub.subgame, g), "game {k}: subgame at {r} rejected");
                    subs += 1;
                }
                Err(SubgameError::NotExists { straddling, .. }) => {
                    let inside = straddling.iter().filter(|y| g.tree().leq(&r, y).unwrap()).count();
                    ensure!(
                        g.clt().infosets().contains(&straddling) && inside > 0 && inside < straddling.len(),
                        "game {k}: witness {straddling:?} does not straddle {r}"
                    );
                    absent += 1;
                }
                Err(e) => return Err(format!("game {k}: {e}")),
            }
        }
        let (copy, _) = random_isomorph(&mut rng(k as u64), g);
        let iso = iso_search(g, &copy).ok_or(format!("game {k}: isomorph not found"))?;
        let tau = iso.node_map();
        let moved: BTreeSet<Term> = subgame_roots(g).iter().map(|r| tau[r].clone()).collect();
        ensure!(moved == subgame_roots(&copy), "game {k}: roots not transported");
    }
    ensure!(absent > 0, "no NotExists verdicts exercised");
    Ok(format!("{subs} subgames, {absent} NotExists witnesses"))
}

fn disjoint_feasible_sets(clt: &gm_core::Clt) -> bool {
    let w: Vec<Term> = clt.tree().decision_nodes().into_iter().collect();
    w.iter().all(|x| {
        w.iter().all(|y| {
            clt.infoset_of(x).unwrap() == clt.infoset_of(y).unwrap()
                || clt.feasible(x).unwrap().is_disjoint(&clt.feasible(y).unwrap())
        })
    })
}

fn same_invariants(a: &Game, b: &Game, what: &str) -> Result<(), String> {
    let (p, q) = (properties(a), properties(b));
    ensure!(
        p.no_absentmindedness == q.no_absentmindedness,
        "{what}: no-absentmindedness changed"
    );
    ensure!(
        p.perfect_information == q.perfect_information,
        "{what}: perfect information changed"
    );
    Ok(())
}

fn criterion_7() -> Verdict {
    let mut sides = BTreeSet::new();
    for seed in 0..200u64 {
        let clt = random_clt(&mut rng(4_000 + seed), &shape(10, 3, usize::MAX));
        let d = gm_core::canon::has_distinguished_actions(&clt);
        ensure!(
            d == disjoint_feasible_sets(&clt),
            "clt {seed}: distinguished ≠ disjoint feasible sets"
        );
        sides.insert(d);
    }
    ensure!(sides.len() == 2, "only one side of the equivalence exercised");

    let (mut action_sets, mut ranges) = (0, 0);
    for seed in 0..200u64 {
        let g = Arc::new(random_game(&mut rng(5_000 + seed), &shape(10, 3, usize::MAX)));
        for (form, c) in conversions(&g) {
            same_invariants(&g, &c.game, &format!("game {seed} {form}"))?;
            if form == "action-set" {
                let p = properties(&c.game);
                ensure!(
                    p.uses_action_sets && p.no_absentmindedness,
                    "game {seed}: action-set output"
                );
                action_sets += 1;
            }
        }
        let (copy, _) = random_isomorph(&mut rng(seed), &g);
        iso_search(&g, &copy).ok_or(format!("game {seed}: isomorph not found"))?;
        same_invariants(&g, &copy, &format!("game {seed} searched"))?;

        if properties(&g).no_absentmindedness {
            let ds = to_distinguished_sequence(&g).game;
            let tree = ds.tree();
            let mut seen = BTreeSet::new();
            for (i, x) in tree.nodes().iter().enumerate() {
                let items = x.as_tuple().unwrap();
                let rx = range(x).unwrap();
                ensure!(
                    rx.as_set().unwrap().len() == items.len(),
                    "game {seed}: |range({x})| ≠ |{x}|"
                );
                ensure!(seen.insert(rx.clone()), "game {seed}: range not injective at {x}");
                if let Some(p) = tree.parent_index(i) {
                    let rp = range(tree.node(p)).unwrap();
                    let added: BTreeSet<Term> =
                        rx.as_set().unwrap().difference(rp.as_set().unwrap()).cloned().collect();
                    ensure!(
                        added == BTreeSet::from([items.last().unwrap().clone()]),
                        "game {seed}: last action at {x}"
                    );
                }
                ranges += 1;
            }
        }
    }
    Ok(format!("200 CLTs, {action_sets} action-set outputs, {ranges} ranges"))
}

fn criterion_8() -> Verdict {
    let three = Utility::from_integer(3.into());
    let seven = Utility::from_integer(7.into());
    let mut isos = 0;
    for seed in 0..50u64 {
        let mut r = rng(6_000 + seed);
        let g = Arc::new(random_game(&mut r, &shape(10, 3, 4)));
        let p = g.players()[seed as usize % g.players().len()].clone();
        let h = Arc::new(g.map_utilities(&p, |u| u * &three + &seven).unwrap());
        ensure!(
            nash(&g, CAP).unwrap() == nash(&h, CAP).unwrap(),
            "game {seed}: nash changed"
        );
        ensure!(
            spe(&g, CAP).unwrap() == spe(&h, CAP).unwrap(),
            "game {seed}: spe changed"
        );
        ensure!(
            g.ordinal_profile(&p).unwrap() == h.ordinal_profile(&p).unwrap(),
            "game {seed}: ordinal profile changed"
        );

        let (copy, iso) = random_isomorph(&mut r, &g);
        let into = random_morphism_into(&mut r, &g, 10);
        let retarget = |m: &GameMorphism, source: &Arc<Game>, target: &Arc<Game>| {
            validate_game_morphism(source.clone(), target.clone(), &m.node_map()).map(|m| m.is_iso())
        };
        let tests = [
            (iso.is_iso(), retarget(&iso, &h, &copy)),
            (into.is_iso(), retarget(&into, into.source(), &h)),
            (true, retarget(&GameMorphism::identity(g.clone()), &g, &h)),
        ];
        for (before, after) in tests {
            ensure!(after == Ok(before), "game {seed}: is_iso verdict changed");
            isos += 1;
        }
        ensure!(CltMorphism::identity(g.clt_arc().clone()).is_iso(), "identity");
    }
    Ok(format!("50 games, {isos} iso verdicts"))
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

#[test]
fn acceptance() {
    let start = Instant::now();
    let games = equilibrium_games();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 category laws", Box::new(criterion_1)),
        ("2 fixture exactness", Box::new(criterion_2)),
        ("3 mono oracle", Box::new(criterion_3)),
        ("4 iso suite", Box::new(criterion_4)),
        ("5 equilibrium preservation", Box::new(|| criterion_5(&games))),
        ("6 subgame suite", Box::new(|| criterion_6(&games))),
        ("7 representation properties", Box::new(criterion_7)),
        ("8 ordinal robustness", Box::new(criterion_8)),
    ];
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({:.2?})", t.elapsed()),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(*name);
            }
        }
    }
    let elapsed = start.elapsed();
    println!("acceptance finished in {elapsed:.2?}");
    assert!(elapsed.as_secs() < 60, "acceptance took {elapsed:?}");
    assert!(failed.is_empty(), "failed: {failed:?}");
}
