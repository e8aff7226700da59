//! Line-oriented text formats for games (`.gm`) and morphisms (`.gmm`).
//!
//! ```text
//! game entry
//! node 0
//! node 1
//! node 2
//! edge 0 1 in
//! edge 0 2 out
//! infoset h0 { 0 }
//! player E infoset h0
//! utility E end 1 2
//! utility E run { 0 2 } 1/2
//! ```
//!
//! Printing is canonical: nodes, edges and utilities in term order and
//! information sets named `h0`, `h1`, ... in term order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::clt::{validate_clt, CltError, PartitionFault};
use crate::game::{validate_game, Game, GameError, Utility};
use crate::term::{Cursor, Term, TermParseError};
use crate::tree::{validate_out_tree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: {message}")]
    Document { line: usize, message: String },
    #[error("{}{error}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, error: GameError },
}

impl FormatError {
    pub fn line(&self) -> Option<usize> {
        match self {
            FormatError::Syntax { line, .. } | FormatError::Document { line, .. } => Some(*line),
            FormatError::Invalid { line, .. } => *line,
        }
    }
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn from_term_error(line: usize, e: TermParseError) -> FormatError {
    syntax(line, e.col(), e.to_string())
}

struct Line<'a> {
    number: usize,
    cursor: Cursor<'a>,
}

impl<'a> Line<'a> {
    fn keyword(&mut self) -> Result<String, FormatError> {
        let col = {
            self.cursor.skip_ws();
            self.cursor.col()
        };
        self.cursor
            .word()
            .ok_or_else(|| syntax(self.number, col, "expected a keyword"))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), FormatError> {
        self.cursor.skip_ws();
        let col = self.cursor.col();
        match self.cursor.word() {
            Some(w) if w == kw => Ok(()),
            _ => Err(syntax(self.number, col, format!("expected `{kw}`"))),
        }
    }

    fn term(&mut self) -> Result<Term, FormatError> {
        self.cursor.term().map_err(|e| from_term_error(self.number, e))
    }

    /// `{ t t ... }`, items separated by whitespace or commas.
    fn term_list(&mut self) -> Result<(usize, Vec<Term>), FormatError> {
        self.cursor.skip_ws();
        let col = self.cursor.col();
        self.cursor.expect('{').map_err(|e| from_term_error(self.number, e))?;
        let mut items = Vec::new();
        loop {
            self.cursor.eat(',');
            if self.cursor.eat('}') {
                return Ok((col, items));
            }
            items.push(self.term()?);
        }
    }

    fn rational(&mut self) -> Result<Utility, FormatError> {
        self.cursor.skip_ws();
        let col = self.cursor.col();
        let bad = |message: &str| syntax(self.number, col, message);
        let numer = self.cursor.word().ok_or_else(|| bad("expected a rational"))?;
        let denom = if self.cursor.peek() == Some('/') {
            self.cursor.bump();
            Some(self.cursor.word().ok_or_else(|| bad("expected a denominator"))?)
        } else {
            None
        };
        let digits = numer.strip_prefix(['+', '-']).unwrap_or(&numer);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected a rational"));
        }
        let n: BigInt = numer.parse().map_err(|_| bad("expected a rational"))?;
        let d: BigInt = match denom {
            None => BigInt::from(1),
            Some(d) => {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("expected a denominator"));
                }
                d.parse().unwrap()
            }
        };
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(Utility::new(n, d))
    }

    /// Rest of the line, for paths.
    fn rest(&mut self) -> Result<String, FormatError> {
        self.cursor.skip_ws();
        let col = self.cursor.col();
        let rest = self.cursor.rest().trim_end().to_string();
        if rest.is_empty() {
            return Err(syntax(self.number, col, "expected a path"));
        }
        while self.cursor.bump().is_some() {}
        Ok(rest)
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        self.cursor.skip_ws();
        if self.cursor.at_end() || self.cursor.peek() == Some('#') {
            Ok(())
        } else {
            Err(syntax(self.number, self.cursor.col(), "trailing input"))
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim_start();
        (!trimmed.is_empty() && !trimmed.starts_with('#')).then(|| Line {
            number: i + 1,
            cursor: Cursor::new(raw),
        })
    })
}

enum UtilityKey {
    End(Term),
    Run(BTreeSet<Term>),
}

/// A parsed and validated `.gm` file.
#[derive(Debug, Clone)]
pub struct GameDocument {
    pub name: String,
    pub game: Game,
}

#[derive(Default)]
struct Raw {
    name: Option<(usize, String)>,
    nodes: BTreeMap<Term, usize>,
    edges: BTreeMap<(Term, Term), (Term, usize)>,
    infosets: BTreeMap<String, (BTreeSet<Term>, usize)>,
    players: BTreeMap<String, (Term, usize)>,
    utilities: Vec<(Term, UtilityKey, Utility, usize)>,
}

fn document(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Document {
        line,
        message: message.into(),
    }
}

fn read_raw(text: &str) -> Result<Raw, FormatError> {
    let mut raw = Raw::default();
    for mut line in lines(text) {
        let n = line.number;
        match line.keyword()?.as_str() {
            "game" => {
                if raw.name.is_some() {
                    return Err(document(n, "second game declaration"));
                }
                raw.name = Some((n, line.rest()?));
            }
            "node" => {
                let x = line.term()?;
                line.finish()?;
                if raw.nodes.insert(x.clone(), n).is_some() {
                    return Err(document(n, format!("duplicate node {x}")));
                }
            }
            "edge" => {
                let (x, y) = (line.term()?, line.term()?);
                let a = line.term()?;
                line.finish()?;
                if raw.edges.insert((x.clone(), y.clone()), (a, n)).is_some() {
                    return Err(document(n, format!("duplicate edge ({x},{y})")));
                }
            }
            "infoset" => {
                let id = line.keyword()?;
                let (col, items) = line.term_list()?;
                line.finish()?;
                let mut cell = BTreeSet::new();
                for x in items {
                    if !cell.insert(x.clone()) {
                        return Err(syntax(n, col, format!("duplicate member {x}")));
                    }
                }
                if raw.infosets.insert(id.clone(), (cell, n)).is_some() {
                    return Err(document(n, format!("duplicate infoset id {id}")));
                }
            }
            "player" => {
                let i = line.term()?;
                line.expect_keyword("infoset")?;
                let id = line.keyword()?;
                line.finish()?;
                if raw.players.insert(id.clone(), (i, n)).is_some() {
                    return Err(document(n, format!("infoset {id} assigned twice")));
                }
            }
            "utility" => {
                let i = line.term()?;
                let key = match line.keyword()?.as_str() {
                    "end" => UtilityKey::End(line.term()?),
                    "run" => UtilityKey::Run(line.term_list()?.1.into_iter().collect()),
                    _ => return Err(syntax(n, line.cursor.col(), "expected `end` or `run`")),
                };
                let u = line.rational()?;
                line.finish()?;
                raw.utilities.push((i, key, u, n));
            }
            other => return Err(syntax(n, 1, format!("unknown declaration `{other}`"))),
        }
    }
    Ok(raw)
}

impl Raw {
    fn node_line(&self, x: &Term) -> Option<usize> {
        self.nodes.get(x).copied()
    }

    fn edge_line(&self, x: &Term, y: &Term) -> Option<usize> {
        self.edges.get(&(x.clone(), y.clone())).map(|&(_, l)| l)
    }

    fn infoset_line(&self, x: &Term) -> Option<usize> {
        self.infosets
            .values()
            .filter(|(h, _)| h.contains(x))
            .map(|&(_, l)| l)
            .max()
    }

    fn locate(&self, e: &GameError) -> Option<usize> {
        match e {
            GameError::Clt(CltError::Tree(t)) => match t {
                TreeError::DanglingEdge { from, to } | TreeError::HasCycle { from, to } => self.edge_line(from, to),
                TreeError::NotAntisymmetric { a, b } => self.edge_line(b, a).or(self.edge_line(a, b)),
                TreeError::NotConnected { node } | TreeError::UnknownNode(node) => self.node_line(node),
                TreeError::MultipleRoots { candidates } => candidates.get(1).and_then(|x| self.node_line(x)),
                _ => None,
            },
            GameError::Clt(c) => match c {
                CltError::PartitionBad(PartitionFault::Overlap(x) | PartitionFault::NotDecision(x)) => {
                    self.infoset_line(x)
                }
                CltError::PartitionBad(PartitionFault::Uncovered(x)) => self.node_line(x),
                CltError::NonDeterministic { node, action } => self
                    .edges
                    .iter()
                    .filter(|((x, _), (a, _))| x == node && a == action)
                    .map(|(_, &(_, l))| l)
                    .max(),
                CltError::FeasibilityNotConstant { x1, x2 } => self.infoset_line(x1).or(self.infoset_line(x2)),
                _ => None,
            },
            GameError::MoverNotConstant { x1, .. } => self.infoset_line(x1),
            GameError::UtilityExtraneous { player, key } | GameError::UtilityMissing { player, end: key } => self
                .utilities
                .iter()
                .find(|(i, k, _, _)| {
                    i == player
                        && match k {
                            UtilityKey::End(e) => e == key,
                            UtilityKey::Run(run) => run.contains(key),
                        }
                })
                .map(|u| u.3),
            _ => None,
        }
    }

    fn build(self) -> Result<GameDocument, FormatError> {
        let Some((_, name)) = self.name.clone() else {
            return Err(syntax(1, 1, "missing `game` declaration"));
        };
        let invalid = |raw: &Raw, error: GameError| FormatError::Invalid {
            line: raw.locate(&error),
            error,
        };
        let nodes: BTreeSet<Term> = self.nodes.keys().cloned().collect();
        let edges: BTreeSet<(Term, Term)> = self.edges.keys().cloned().collect();
        let tree = validate_out_tree(&nodes, &edges).map_err(|e| invalid(&self, e.into()))?;
        let labels: BTreeMap<(Term, Term), Term> =
            self.edges.iter().map(|(k, (a, _))| (k.clone(), a.clone())).collect();
        let cells: Vec<BTreeSet<Term>> = self.infosets.values().map(|(h, _)| h.clone()).collect();
        let clt = validate_clt(tree, &cells, &labels).map_err(|e| invalid(&self, e.into()))?;

        let mut mover = BTreeMap::new();
        for (id, (i, n)) in &self.players {
            let (cell, _) = self
                .infosets
                .get(id)
                .ok_or_else(|| document(*n, format!("unknown infoset id {id}")))?;
            for x in cell {
                mover.insert(x.clone(), i.clone());
            }
        }
        if let Some((id, (_, n))) = self.infosets.iter().find(|(id, _)| !self.players.contains_key(*id)) {
            return Err(document(*n, format!("infoset {id} has no player")));
        }

        let mut utilities = BTreeMap::new();
        for (i, key, u, n) in &self.utilities {
            let end = match key {
                UtilityKey::End(e) => e.clone(),
                UtilityKey::Run(run) => {
                    let e = clt.tree().run_end(run).ok_or_else(|| FormatError::Invalid {
                        line: Some(*n),
                        error: GameError::NotARun(Term::set(run.iter().cloned())),
                    })?;
                    clt.tree().node(e).clone()
                }
            };
            if utilities.insert((i.clone(), end.clone()), u.clone()).is_some() {
                return Err(document(*n, format!("second utility for player {i} at {end}")));
            }
        }
        let game = validate_game(clt, &mover, &utilities).map_err(|e| invalid(&self, e))?;
        Ok(GameDocument { name, game })
    }
}

pub fn parse_game(text: &str) -> Result<GameDocument, FormatError> {
    read_raw(text)?.build()
}

pub fn print_game(name: &str, game: &Game) -> String {
    let mut out = String::new();
    let tree = game.tree();
    let clt = game.clt();
    writeln!(out, "game {name}").unwrap();
    for x in tree.nodes() {
        writeln!(out, "node {x}").unwrap();
    }
    for ((x, y), a) in clt.labels() {
        writeln!(out, "edge {x} {y} {a}").unwrap();
    }
    for h in 0..clt.infoset_count() {
        let members: Vec<String> = clt.infoset_terms(h).iter().map(Term::encode).collect();
        writeln!(out, "infoset h{h} {{ {} }}", members.join(" ")).unwrap();
    }
    for h in 0..clt.infoset_count() {
        writeln!(out, "player {} infoset h{h}", game.players()[game.infoset_mover(h)]).unwrap();
    }
    for ((i, e), u) in game.utilities() {
        writeln!(out, "utility {i} end {e} {u}").unwrap();
    }
    out
}

/// A parsed `.gmm` file; paths are as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismDocument {
    pub name: String,
    pub source: String,
    pub target: String,
    pub map: BTreeMap<Term, Term>,
}

pub fn parse_morphism(text: &str) -> Result<MorphismDocument, FormatError> {
    let (mut name, mut source, mut target) = (None, None, None);
    let mut map = BTreeMap::new();
    for mut line in lines(text) {
        let n = line.number;
        let slot = match line.keyword()?.as_str() {
            "morphism" => &mut name,
            "source" => &mut source,
            "target" => &mut target,
            "map" => {
                let x = line.term()?;
                line.cursor.skip_ws();
                let col = line.cursor.col();
                if !(line.cursor.eat('-') && line.cursor.peek() == Some('>')) {
                    return Err(syntax(n, col, "expected `->`"));
                }
                line.cursor.bump();
                let y = line.term()?;
                line.finish()?;
                if map.insert(x.clone(), y).is_some() {
                    return Err(document(n, format!("duplicate map entry for {x}")));
                }
                continue;
            }
            other => return Err(syntax(n, 1, format!("unknown declaration `{other}`"))),
        };
        if slot.is_some() {
            return Err(document(n, "repeated declaration"));
        }
        *slot = Some(line.rest()?);
    }
    let missing = |what: &str| syntax(1, 1, format!("missing `{what}` declaration"));
    Ok(MorphismDocument {
        name: name.ok_or_else(|| missing("morphism"))?,
        source: source.ok_or_else(|| missing("source"))?,
        target: target.ok_or_else(|| missing("target"))?,
        map,
    })
}

pub fn print_morphism(doc: &MorphismDocument) -> String {
    let mut out = String::new();
    writeln!(out, "morphism {}", doc.name).unwrap();
    writeln!(out, "source {}", doc.source).unwrap();
    writeln!(out, "target {}", doc.target).unwrap();
    for (x, y) in &doc.map {
        writeln!(out, "map {x} -> {y}").unwrap();
    }
    out
}
