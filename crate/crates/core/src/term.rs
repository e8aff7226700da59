//! The value universe used for node, action, player and infoset identities.
//!
//! A [`Term`] is an atom, a tuple of terms, or a finite set of terms. Tuples
//! carry sequence nodes, sets carry action-set nodes and information-set
//! tags, and pairs `(tag, action)` carry distinguished actions.
//!
//! The derived order puts every atom before every tuple and every tuple
//! before every set. Atoms compare by the bytes of their names, tuples
//! lexicographically, and sets as their sorted item lists.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(String),
    Tuple(Vec<Term>),
    Set(BTreeSet<Term>),
}

impl Term {
    /// Builds an atom.
    ///
    /// Panics on an empty name; atoms must be nonempty.
    pub fn atom(name: impl Into<String>) -> Term {
        let name = name.into();
        assert!(!name.is_empty(), "atom names must be nonempty");
        Term::Atom(name)
    }

    pub fn tuple(items: impl IntoIterator<Item = Term>) -> Term {
        Term::Tuple(items.into_iter().collect())
    }

    pub fn set(items: impl IntoIterator<Item = Term>) -> Term {
        Term::Set(items.into_iter().collect())
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Tuple(vec![a, b])
    }

    pub fn empty_tuple() -> Term {
        Term::Tuple(Vec::new())
    }

    pub fn empty_set() -> Term {
        Term::Set(BTreeSet::new())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Term::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Term]> {
        match self {
            Term::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Term>> {
        match self {
            Term::Set(items) => Some(items),
            _ => None,
        }
    }

    /// Canonical printable encoding; the inverse of [`Term::from_str`].
    pub fn encode(&self) -> String {
        self.to_string()
    }
}

/// Every atom name that can be printed without quotes.
fn is_bare_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '+' | '-')
}

fn is_bare(name: &str) -> bool {
    !name.is_empty() && name.chars().all(is_bare_char)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(name) if is_bare(name) => f.write_str(name),
            Term::Atom(name) => {
                f.write_str("\"")?;
                for c in name.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Term::Tuple(items) => write_list(f, '(', ')', items.iter()),
            Term::Set(items) => write_list(f, '{', '}', items.iter()),
        }
    }
}

fn write_list<'a>(
    f: &mut fmt::Formatter<'_>,
    open: char,
    close: char,
    items: impl Iterator<Item = &'a Term>,
) -> fmt::Result {
    write!(f, "{open}")?;
    for (i, item) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{item}")?;
    }
    write!(f, "{close}")
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Term {
    fn from(name: &str) -> Term {
        Term::atom(name)
    }
}

impl From<String> for Term {
    fn from(name: String) -> Term {
        Term::atom(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermParseError {
    #[error("unexpected end of input at column {col}")]
    UnexpectedEnd { col: usize },
    #[error("unexpected character {found:?} at column {col}")]
    Unexpected { found: char, col: usize },
    #[error("empty atom at column {col}")]
    EmptyAtom { col: usize },
    #[error("duplicate set item {item} at column {col}")]
    DuplicateSetItem { item: Term, col: usize },
    #[error("trailing input at column {col}")]
    Trailing { col: usize },
}

impl TermParseError {
    /// 1-based column (in characters) of the offending position.
    pub fn col(&self) -> usize {
        match self {
            TermParseError::UnexpectedEnd { col }
            | TermParseError::Unexpected { col, .. }
            | TermParseError::EmptyAtom { col }
            | TermParseError::DuplicateSetItem { col, .. }
            | TermParseError::Trailing { col } => *col,
        }
    }
}

/// Cursor over a line of text, shared with the file-format parser.
pub struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.char_indices().collect(),
            src,
            pos: 0,
        }
    }

    /// 1-based column of the next character.
    pub fn col(&self) -> usize {
        self.pos + 1
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    /// The unconsumed remainder of the line.
    pub fn rest(&self) -> &'a str {
        match self.chars.get(self.pos) {
            Some(&(byte, _)) => &self.src[byte..],
            None => "",
        }
    }

    /// Consumes `c` if it is next (after whitespace).
    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), TermParseError> {
        self.skip_ws();
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => Err(TermParseError::Unexpected { found, col: self.col() }),
            None => Err(TermParseError::UnexpectedEnd { col: self.col() }),
        }
    }

    /// Reads a bare word (`[A-Za-z0-9_.+-]+`), used for keywords.
    pub fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(is_bare_char) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().map(|&(_, c)| c).collect())
    }

    pub fn term(&mut self) -> Result<Term, TermParseError> {
        self.skip_ws();
        let col = self.col();
        match self.peek() {
            None => Err(TermParseError::UnexpectedEnd { col }),
            Some('(') => {
                self.bump();
                Ok(Term::Tuple(self.items(')')?))
            }
            Some('{') => {
                self.bump();
                let start = self.col();
                let items = self.items('}')?;
                let mut set = BTreeSet::new();
                for item in items {
                    if set.contains(&item) {
                        return Err(TermParseError::DuplicateSetItem { item, col: start });
                    }
                    set.insert(item);
                }
                Ok(Term::Set(set))
            }
            Some('"') => {
                self.bump();
                let mut name = String::new();
                loop {
                    match self.bump() {
                        None => return Err(TermParseError::UnexpectedEnd { col: self.col() }),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => name.push('\n'),
                            Some('t') => name.push('\t'),
                            Some(c @ ('"' | '\\')) => name.push(c),
                            Some(found) => {
                                return Err(TermParseError::Unexpected {
                                    found,
                                    col: self.col() - 1,
                                })
                            }
                            None => return Err(TermParseError::UnexpectedEnd { col: self.col() }),
                        },
                        Some(c) => name.push(c),
                    }
                }
                if name.is_empty() {
                    return Err(TermParseError::EmptyAtom { col });
                }
                Ok(Term::Atom(name))
            }
            Some(c) if is_bare_char(c) => Ok(Term::Atom(self.word().expect("nonempty word"))),
            Some(found) => Err(TermParseError::Unexpected { found, col }),
        }
    }

    fn items(&mut self, close: char) -> Result<Vec<Term>, TermParseError> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.term()?);
            if self.eat(close) {
                return Ok(items);
            }
            self.expect(',')?;
        }
    }
}

impl FromStr for Term {
    type Err = TermParseError;

    fn from_str(s: &str) -> Result<Term, TermParseError> {
        let mut cursor = Cursor::new(s);
        let term = cursor.term()?;
        cursor.skip_ws();
        if !cursor.at_end() {
            return Err(TermParseError::Trailing { col: cursor.col() });
        }
        Ok(term)
    }
}

/// Shorthand for a set of atoms, handy in fixtures and tests.
pub fn atoms<'a>(names: impl IntoIterator<Item = &'a str>) -> BTreeSet<Term> {
    names.into_iter().map(Term::atom).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn cmp_examples() {
        assert_eq!(t("a").cmp(&t("a")), Ordering::Equal);
        assert_eq!(t("b").cmp(&Term::empty_tuple()), Ordering::Less);
        assert_eq!(
            Term::set([t("y"), t("x")]).cmp(&Term::set([t("x"), t("y")])),
            Ordering::Equal
        );
        assert!(Term::tuple([t("z")]) < Term::empty_set());
        assert!(t("10") < t("9"));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(t("0").encode(), "0");
        assert_eq!(Term::tuple([t("b"), t("c")]).encode(), "(b,c)");
        assert_eq!(Term::set([t("c"), t("b")]).encode(), "{b,c}");
        assert_eq!(Term::atom("0*").encode(), "\"0*\"");
        assert_eq!(Term::atom("say \"hi\"").encode(), r#""say \"hi\"""#);
        assert_eq!(Term::empty_tuple().encode(), "()");
        assert_eq!(Term::empty_set().encode(), "{}");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("".parse::<Term>(), Err(TermParseError::UnexpectedEnd { .. })));
        assert!(matches!("\"\"".parse::<Term>(), Err(TermParseError::EmptyAtom { .. })));
        assert!(matches!(
            "{a,a}".parse::<Term>(),
            Err(TermParseError::DuplicateSetItem { .. })
        ));
        assert!(matches!(
            "(a b)".parse::<Term>(),
            Err(TermParseError::Unexpected { .. })
        ));
        assert!(matches!(
            "a b".parse::<Term>(),
            Err(TermParseError::Trailing { col: 3 })
        ));
        assert_eq!(t(" ( a , {b} ) "), Term::tuple([t("a"), Term::set([t("b")])]));
    }

    pub(crate) fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof!["[a-z0-9]{1,3}".prop_map(Term::Atom), "[ -~]{1,4}".prop_map(Term::Atom),];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Term::Tuple),
                prop::collection::btree_set(inner, 0..4).prop_map(Term::Set),
            ]
        })
    }

    proptest! {
        #[test]
        fn encode_round_trips(term in arb_term()) {
            let back: Term = term.encode().parse().unwrap();
            prop_assert_eq!(back, term);
        }

        #[test]
        fn order_is_total_and_consistent(a in arb_term(), b in arb_term(), c in arb_term()) {
            prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }
    }
}
