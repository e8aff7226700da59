//! The `gm` command line. [`run_command`] parses arguments, runs one
//! subcommand and returns the exit code with the report text, so commands
//! can be tested without spawning a process.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use gm_core::canon::{self, ConversionResult};
use gm_core::equilibrium::{self, GrandStrategy};
use gm_core::format::{parse_game, parse_morphism, print_game, print_morphism, MorphismDocument};
use gm_core::morphism::{clt_mono_witness, iso_search, mono_witness};
use gm_core::subgame::{selten_subgame, subgame_roots, SubgameError};
use gm_core::{validate_game_morphism, Game, GameMorphism, Term};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gm", about = "Finite extensive-form games and their morphisms")]
struct Cli {
    /// Refuse to enumerate more grand strategies than this.
    #[arg(long, global = true, default_value_t = equilibrium::DEFAULT_CAP)]
    max_strategies: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Distinguished,
    Sequence,
    ActionSet,
    DistinguishedSequence,
}

impl Form {
    fn name(self) -> &'static str {
        match self {
            Form::Distinguished => "distinguished",
            Form::Sequence => "sequence",
            Form::ActionSet => "action-set",
            Form::DistinguishedSequence => "distinguished-sequence",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a game file.
    Validate { game: PathBuf },
    /// Representation properties of a game.
    Props { game: PathBuf },
    /// List every grand strategy.
    Strategies { game: PathBuf },
    /// Nash equilibria in pure strategies.
    Nash { game: PathBuf },
    /// Subgame-perfect equilibria in pure strategies.
    Spe { game: PathBuf },
    /// Nodes at which a Selten subgame exists.
    Subgames { game: PathBuf },
    /// Print the Selten subgame at a node.
    Subgame {
        game: PathBuf,
        #[arg(long)]
        at: String,
    },
    /// Write a canonical isomorph and its certificate.
    Convert {
        game: PathBuf,
        #[arg(long, value_enum)]
        to: Form,
        /// Output directory; defaults to the input's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Morphism(MorphismCommand),
    /// Search for an isomorphism between two games.
    Iso {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        emit_morphism: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MorphismCommand {
    /// Validate a morphism file.
    Check { morphism: PathBuf },
    /// Validate and classify as plain, monic or iso, with witnesses.
    Classify { morphism: PathBuf },
    /// Print the composite `second ∘ first`.
    Compose { first: PathBuf, second: PathBuf },
}

type NodeMap = BTreeMap<Term, Term>;

struct Report {
    code: i32,
    human: String,
    machine: Value,
}

impl Report {
    fn new(code: i32, human: String, machine: Value) -> Report {
        Report { code, human, machine }
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

/// Runs `gm` with `args` (without the program name).
pub fn run_command<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("gm".into()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let format = cli.format;
    match dispatch(cli) {
        Ok(report) => {
            let text = match format {
                Format::Human => report.human,
                Format::Machine => format!("{:#}\n", report.machine),
            };
            (report.code, text)
        }
        Err(Failure(message)) => {
            let text = match format {
                Format::Human => format!("error: {message}\n"),
                Format::Machine => format!("{:#}\n", json!({ "error": message })),
            };
            (2, text)
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let cap = cli.max_strategies;
    match cli.command {
        Command::Validate { game } => validate(&game),
        Command::Props { game } => props(&game),
        Command::Strategies { game } => list_strategies(&game, cap),
        Command::Nash { game } => equilibria(&game, cap, false),
        Command::Spe { game } => equilibria(&game, cap, true),
        Command::Subgames { game } => subgames(&game),
        Command::Subgame { game, at } => subgame_at(&game, &at),
        Command::Convert { game, to, out } => convert(&game, to, out.as_deref()),
        Command::Morphism(MorphismCommand::Check { morphism }) => check(&morphism),
        Command::Morphism(MorphismCommand::Classify { morphism }) => classify(&morphism),
        Command::Morphism(MorphismCommand::Compose { first, second }) => compose(&first, &second),
        Command::Iso {
            first,
            second,
            emit_morphism,
        } => iso(&first, &second, emit_morphism.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<(String, Arc<Game>), Failure> {
    let doc = parse_game(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok((doc.name, Arc::new(doc.game)))
}

struct LoadedMorphism {
    doc: MorphismDocument,
    source_path: PathBuf,
    target_path: PathBuf,
    source: Arc<Game>,
    target: Arc<Game>,
}

fn load_morphism(path: &Path) -> Result<LoadedMorphism, Failure> {
    let doc = parse_morphism(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new(""));
    let source_path = dir.join(&doc.source);
    let target_path = dir.join(&doc.target);
    let (_, source) = load_game(&source_path)?;
    let (_, target) = load_game(&target_path)?;
    Ok(LoadedMorphism {
        doc,
        source_path,
        target_path,
        source,
        target,
    })
}

fn set(items: &BTreeSet<Term>) -> String {
    Term::set(items.iter().cloned()).to_string()
}

fn strings<'a>(items: impl IntoIterator<Item = &'a Term>) -> Vec<String> {
    items.into_iter().map(Term::to_string).collect()
}

fn strategy_json(s: &GrandStrategy) -> Value {
    s.choices()
        .iter()
        .map(|(h, a)| (set(h), Value::String(a.to_string())))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn validate(path: &Path) -> Outcome {
    let (name, g) = load_game(path)?;
    let clt = g.clt();
    let runs: Vec<String> = g.runs().iter().map(set).collect();
    let infosets: Vec<String> = clt.infosets().iter().map(set).collect();
    let mut human = format!("valid game {name}\n");
    writeln!(human, "nodes {}", g.tree().len()).unwrap();
    writeln!(human, "root {}", g.tree().root()).unwrap();
    writeln!(human, "actions {}", set(clt.actions())).unwrap();
    writeln!(human, "players {}", Term::set(g.players().iter().cloned())).unwrap();
    writeln!(human, "infosets {}", infosets.len()).unwrap();
    for (h, cell) in clt.infosets().iter().enumerate() {
        writeln!(human, "  {} moved by {}", set(cell), g.players()[g.infoset_mover(h)]).unwrap();
    }
    writeln!(human, "runs {}", runs.len()).unwrap();
    for r in &runs {
        writeln!(human, "  {r}").unwrap();
    }
    let machine = json!({
        "valid": true,
        "name": name,
        "nodes": g.tree().len(),
        "root": g.tree().root().to_string(),
        "actions": strings(clt.actions()),
        "players": strings(g.players()),
        "infosets": infosets,
        "runs": runs,
    });
    Ok(Report::new(0, human, machine))
}

fn props(path: &Path) -> Outcome {
    let (_, g) = load_game(path)?;
    let p = canon::properties(&g);
    let rows = [
        ("distinguished_actions", p.distinguished_actions),
        ("uses_sequences", p.uses_sequences),
        ("uses_action_sets", p.uses_action_sets),
        ("no_absentmindedness", p.no_absentmindedness),
        ("perfect_information", p.perfect_information),
    ];
    let mut human = String::new();
    for (k, v) in rows {
        writeln!(human, "{k} {v}").unwrap();
    }
    if let Some((h, x, y)) = canon::absentminded_witness(g.clt()) {
        writeln!(human, "absentminded at {}: {x} precedes {y}", set(&h)).unwrap();
    }
    let machine: serde_json::Map<String, Value> = rows.iter().map(|(k, v)| (k.to_string(), Value::Bool(*v))).collect();
    Ok(Report::new(0, human, machine.into()))
}

fn list_strategies(path: &Path, cap: usize) -> Outcome {
    let (_, g) = load_game(path)?;
    let all = equilibrium::strategies(&g, cap)?;
    let mut human = format!("strategies {}\n", all.len());
    for s in &all {
        let run = equilibrium::outcome(&g, s)?;
        writeln!(human, "  {s}  => {}", set(&run)).unwrap();
    }
    let machine = json!({
        "count": all.len(),
        "strategies": all.iter().map(strategy_json).collect::<Vec<_>>(),
    });
    Ok(Report::new(0, human, machine))
}

fn equilibria(path: &Path, cap: usize, perfect: bool) -> Outcome {
    let (_, g) = load_game(path)?;
    let found = if perfect {
        equilibrium::spe(&g, cap)?
    } else {
        equilibrium::nash(&g, cap)?
    };
    let kind = if perfect { "spe" } else { "nash" };
    let mut human = format!("{kind} {}\n", found.len());
    let mut rows = Vec::new();
    for s in &found {
        let run = equilibrium::outcome(&g, s)?;
        let payoff: Vec<String> = g
            .players()
            .iter()
            .map(|i| format!("{i}={}", g.utility(i, &run).unwrap()))
            .collect();
        writeln!(human, "  {s}  => {}  {}", set(&run), payoff.join(" ")).unwrap();
        rows.push(json!({ "strategy": strategy_json(s), "outcome": set(&run) }));
    }
    Ok(Report::new(
        0,
        human,
        json!({ "kind": kind, "count": found.len(), "equilibria": rows }),
    ))
}

fn subgames(path: &Path) -> Outcome {
    let (_, g) = load_game(path)?;
    let roots = subgame_roots(&g);
    let mut human = format!("subgame roots {}\n", set(&roots));
    let mut missing = Vec::new();
    for r in g.tree().decision_nodes() {
        if let Err(SubgameError::NotExists { straddling, .. }) = selten_subgame(&g, &r) {
            writeln!(human, "  none at {r}: {} straddles", set(&straddling)).unwrap();
            missing.push(json!({ "node": r.to_string(), "straddling": set(&straddling) }));
        }
    }
    Ok(Report::new(
        0,
        human,
        json!({ "roots": strings(&roots), "absent": missing }),
    ))
}

fn subgame_at(path: &Path, at: &str) -> Outcome {
    let (name, g) = load_game(path)?;
    let r: Term = at.parse().map_err(|e| Failure(format!("--at {at}: {e}")))?;
    match selten_subgame(&g, &r) {
        Ok(sub) => {
            let text = print_game(&format!("{name}-at-{}", sanitize(&r)), &sub.subgame);
            let human = format!("subgame at {r}: {} nodes\n{text}", sub.subgame.tree().len());
            let machine =
                json!({ "exists": true, "root": r.to_string(), "nodes": sub.subgame.tree().len(), "game": text });
            Ok(Report::new(0, human, machine))
        }
        Err(SubgameError::NotExists { root, straddling }) => {
            let human = format!("no subgame at {root}: NotExists, witness {}\n", set(&straddling));
            let machine = json!({ "exists": false, "root": root.to_string(), "straddling": set(&straddling) });
            Ok(Report::new(1, human, machine))
        }
        Err(e) => Err(e.into()),
    }
}

/// A word usable in a `game` line and a file name.
fn sanitize(t: &Term) -> String {
    t.to_string()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.+-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// How a morphism file in `dir` should refer to `file`.
fn reference(dir: &Path, file: &Path) -> String {
    let canonical = |p: &Path| std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let file = canonical(file);
    match file.parent() {
        Some(parent) if parent == canonical(dir) => file.file_name().unwrap().to_string_lossy().into_owned(),
        _ => file.to_string_lossy().into_owned(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn convert(path: &Path, form: Form, out: Option<&Path>) -> Outcome {
    let (name, g) = load_game(path)?;
    let result: ConversionResult = match form {
        Form::Distinguished => canon::to_distinguished(&g),
        Form::Sequence => canon::to_sequence(&g),
        Form::ActionSet => canon::to_action_set(&g)?,
        Form::DistinguishedSequence => canon::to_distinguished_sequence(&g),
    };
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| path.parent().unwrap_or(Path::new("")).to_path_buf());
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.clone());
    let game_path = dir.join(format!("{stem}.{}.gm", form.name()));
    let morphism_path = dir.join(format!("{stem}.{}.gmm", form.name()));
    let game_name = format!("{name}-{}", form.name());
    write(&game_path, &print_game(&game_name, &result.game))?;
    let doc = MorphismDocument {
        name: format!("{name}-to-{}", form.name()),
        source: reference(&dir, path),
        target: reference(&dir, &game_path),
        map: result.certificate.node_map(),
    };
    write(&morphism_path, &print_morphism(&doc))?;
    let human = format!(
        "converted to {}\ngame {}\nmorphism {}\niso {}\n",
        form.name(),
        game_path.display(),
        morphism_path.display(),
        result.certificate.is_iso()
    );
    let machine = json!({
        "form": form.name(),
        "game": game_path.display().to_string(),
        "morphism": morphism_path.display().to_string(),
        "iso": result.certificate.is_iso(),
    });
    Ok(Report::new(0, human, machine))
}

fn morphism_details(m: &GameMorphism) -> (String, Value) {
    let mut human = String::new();
    let mut alphas = serde_json::Map::new();
    let source = m.source();
    writeln!(human, "alpha").unwrap();
    for h in source.clt().infosets() {
        let x = h.iter().next().unwrap();
        let alpha = m.action_transform(x).unwrap();
        let pairs: Vec<String> = alpha.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        for y in &h {
            writeln!(human, "  alpha_{y}: {}", pairs.join(" ")).unwrap();
            let row: serde_json::Map<String, Value> = m
                .action_transform(y)
                .unwrap()
                .iter()
                .map(|(a, b)| (a.to_string(), Value::String(b.to_string())))
                .collect();
            alphas.insert(y.to_string(), row.into());
        }
    }
    writeln!(human, "zeta").unwrap();
    let mut zetas = serde_json::Map::new();
    for (z, image) in m.run_transform() {
        writeln!(human, "  {} -> {}", set(&z), set(&image)).unwrap();
        zetas.insert(set(&z), Value::String(set(&image)));
    }
    writeln!(human, "iota").unwrap();
    let mut iotas = serde_json::Map::new();
    for (i, j) in m.player_transform() {
        writeln!(human, "  {i} -> {j}").unwrap();
        iotas.insert(i.to_string(), Value::String(j.to_string()));
    }
    (human, json!({ "alpha": alphas, "zeta": zetas, "iota": iotas }))
}

fn check(path: &Path) -> Outcome {
    let loaded = load_morphism(path)?;
    match validate_game_morphism(loaded.source.clone(), loaded.target.clone(), &loaded.doc.map) {
        Ok(m) => {
            let (details, machine_details) = morphism_details(&m);
            let human = format!(
                "valid morphism {}\nmono {}\niso {}\n{details}",
                loaded.doc.name,
                m.is_mono(),
                m.is_iso()
            );
            let machine = json!({
                "valid": true,
                "name": loaded.doc.name,
                "mono": m.is_mono(),
                "iso": m.is_iso(),
                "transformations": machine_details,
            });
            Ok(Report::new(0, human, machine))
        }
        Err(e) => Ok(invalid(&loaded.doc.name, &e)),
    }
}

fn invalid(name: &str, e: &gm_core::MorphismError) -> Report {
    let cause = e.root_cause().to_string();
    let layer = if matches!(e, gm_core::MorphismError::CltMorphismInvalid(_)) {
        "clt"
    } else {
        "game"
    };
    Report::new(
        1,
        format!("invalid morphism {name}\n{cause}\n"),
        json!({ "valid": false, "name": name, "layer": layer, "error": cause }),
    )
}

fn node_map_text(map: &BTreeMap<Term, Term>) -> String {
    map.iter()
        .map(|(x, y)| format!("{x}->{y}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn classify(path: &Path) -> Outcome {
    let loaded = load_morphism(path)?;
    let m = match validate_game_morphism(loaded.source.clone(), loaded.target.clone(), &loaded.doc.map) {
        Ok(m) => m,
        Err(e) => return Ok(invalid(&loaded.doc.name, &e)),
    };
    let mut human = format!("valid morphism {}\n", loaded.doc.name);
    let mono = mono_witness(&m);
    match &mono {
        None => writeln!(human, "mono true").unwrap(),
        Some((a, b)) => writeln!(
            human,
            "mono false: composites agree on [{}] and [{}]",
            node_map_text(&a.node_map()),
            node_map_text(&b.node_map())
        )
        .unwrap(),
    }
    let clt = m.forget();
    let clt_mono = clt_mono_witness(&clt);
    match &clt_mono {
        None => writeln!(human, "clt mono true").unwrap(),
        Some((a, b)) => writeln!(
            human,
            "clt mono false: [{}] and [{}]",
            node_map_text(&a.node_map()),
            node_map_text(&b.node_map())
        )
        .unwrap(),
    }
    let obstruction = m.iso_obstruction();
    match &obstruction {
        None => writeln!(human, "iso true").unwrap(),
        Some(o) => writeln!(human, "iso false: {o}").unwrap(),
    }
    let pair = |w: &Option<(NodeMap, NodeMap)>| match w {
        None => Value::Null,
        Some((a, b)) => json!([node_map_text(a), node_map_text(b)]),
    };
    let machine = json!({
        "valid": true,
        "name": loaded.doc.name,
        "mono": mono.is_none(),
        "mono_witness": pair(&mono.map(|(a, b)| (a.node_map(), b.node_map()))),
        "clt_mono": clt_mono.is_none(),
        "clt_mono_witness": pair(&clt_mono.map(|(a, b)| (a.node_map(), b.node_map()))),
        "iso": obstruction.is_none(),
        "iso_obstruction": obstruction.as_ref().map(ToString::to_string),
    });
    Ok(Report::new(if obstruction.is_none() { 0 } else { 1 }, human, machine))
}

fn compose(first: &Path, second: &Path) -> Outcome {
    let a = load_morphism(first)?;
    let b = load_morphism(second)?;
    let ma = validate_game_morphism(a.source.clone(), a.target.clone(), &a.doc.map)
        .map_err(|e| Failure(format!("{}: {}", first.display(), e.root_cause())))?;
    let mb = validate_game_morphism(b.source.clone(), b.target.clone(), &b.doc.map)
        .map_err(|e| Failure(format!("{}: {}", second.display(), e.root_cause())))?;
    let c = mb.compose(&ma)?;
    let doc = MorphismDocument {
        name: format!("{}-then-{}", a.doc.name, b.doc.name),
        source: a.source_path.display().to_string(),
        target: b.target_path.display().to_string(),
        map: c.node_map(),
    };
    let text = print_morphism(&doc);
    let machine = json!({ "morphism": text, "mono": c.is_mono(), "iso": c.is_iso() });
    Ok(Report::new(0, text, machine))
}

fn iso(first: &Path, second: &Path, emit: Option<&Path>) -> Outcome {
    let (n1, g1) = load_game(first)?;
    let (n2, g2) = load_game(second)?;
    let Some(m) = iso_search(&g1, &g2) else {
        return Ok(Report::new(
            1,
            format!("no isomorphism {n1} -> {n2}\n"),
            json!({ "iso": false }),
        ));
    };
    let mut human = format!("isomorphism {n1} -> {n2}\n");
    for (x, y) in m.node_map() {
        writeln!(human, "  {x} -> {y}").unwrap();
    }
    if let Some(out) = emit {
        let dir = out.parent().unwrap_or(Path::new(""));
        let doc = MorphismDocument {
            name: format!("{n1}-to-{n2}"),
            source: reference(dir, first),
            target: reference(dir, second),
            map: m.node_map(),
        };
        write(out, &print_morphism(&doc))?;
        writeln!(human, "written {}", out.display()).unwrap();
    }
    let map: serde_json::Map<String, Value> = m
        .node_map()
        .iter()
        .map(|(x, y)| (x.to_string(), Value::String(y.to_string())))
        .collect();
    Ok(Report::new(0, human, json!({ "iso": true, "map": map })))
}
