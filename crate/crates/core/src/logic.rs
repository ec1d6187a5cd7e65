//! Propositional sentences over variable names.
//!
//! Sentences are kept in a light canonical form inside [`SentenceSet`]: top-level
//! conjunctions are split into separate members and the constant `True` is
//! dropped. Equality between sentences is syntactic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A total or partial renaming of names, e.g. the variable part of a signature morphism.
pub type NameMap = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("symbol `{0}` has no image under the translation")]
    UnmappedSymbol(String),
    #[error("symbol `{0}` is not assigned in the state")]
    UnassignedSymbol(String),
}

/// Abstract syntax of a propositional sentence.
///
/// The variant order matters: it fixes the derived `Ord`, which in turn fixes the
/// order in which sentence sets are printed (atoms before negations, and so on).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// A positive or negative literal over `name`.
    pub fn literal(name: impl Into<String>, positive: bool) -> Self {
        let v = Formula::var(name);
        if positive {
            v
        } else {
            Formula::not(v)
        }
    }

    /// The propositional symbols occurring in the sentence.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(s) => {
                out.insert(s.clone());
            }
            Formula::Not(f) => f.collect_symbols(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
        }
    }

    /// Replaces every symbol `s` by `map[s]`, keeping the tree shape.
    pub fn translate(&self, map: &NameMap) -> Result<Formula, LogicError> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Var(s) => Formula::Var(
                map.get(s)
                    .cloned()
                    .ok_or_else(|| LogicError::UnmappedSymbol(s.clone()))?,
            ),
            Formula::Not(f) => Formula::not(f.translate(map)?),
            Formula::And(l, r) => Formula::and(l.translate(map)?, r.translate(map)?),
            Formula::Or(l, r) => Formula::or(l.translate(map)?, r.translate(map)?),
            Formula::Implies(l, r) => Formula::implies(l.translate(map)?, r.translate(map)?),
        })
    }

    pub fn eval(&self, state: &BTreeMap<String, bool>) -> Result<bool, LogicError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(s) => *state
                .get(s)
                .ok_or_else(|| LogicError::UnassignedSymbol(s.clone()))?,
            Formula::Not(f) => !f.eval(state)?,
            Formula::And(l, r) => l.eval(state)? & r.eval(state)?,
            Formula::Or(l, r) => l.eval(state)? | r.eval(state)?,
            Formula::Implies(l, r) => !l.eval(state)? | r.eval(state)?,
        })
    }

    /// Returns `(name, polarity)` if the sentence is `x` or `¬x`.
    pub fn as_literal(&self) -> Option<(&str, bool)> {
        match self {
            Formula::Var(s) => Some((s, true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Var(s) => Some((s, false)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Splits nested top-level conjunctions and drops `True` conjuncts.
    pub fn conjuncts(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.push_conjuncts(&mut out);
        out
    }

    fn push_conjuncts(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::And(l, r) => {
                l.push_conjuncts(out);
                r.push_conjuncts(out);
            }
            Formula::True => {}
            f => out.push(f.clone()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints the concrete syntax: `\not`, `\and`, `\or`, `\implies`, with the
/// fewest parentheses that still parse back to the same tree. `\and` and `\or`
/// associate to the left, `\implies` to the right.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("True"),
            Formula::False => f.write_str("False"),
            Formula::Var(s) => f.write_str(s),
            Formula::Not(inner) => {
                f.write_str("\\not ")?;
                inner.fmt_child(f, 4)
            }
            Formula::And(l, r) => {
                l.fmt_child(f, 3)?;
                f.write_str(" \\and ")?;
                r.fmt_child(f, 4)
            }
            Formula::Or(l, r) => {
                l.fmt_child(f, 2)?;
                f.write_str(" \\or ")?;
                r.fmt_child(f, 3)
            }
            Formula::Implies(l, r) => {
                l.fmt_child(f, 2)?;
                f.write_str(" \\implies ")?;
                r.fmt_child(f, 1)
            }
        }
    }
}

/// A finite set of sentences in canonical form.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceSet(BTreeSet<Formula>);

impl SentenceSet {
    pub const fn new() -> Self {
        SentenceSet(BTreeSet::new())
    }

    /// Builds a set, flattening top-level conjunctions and dropping `True`.
    pub fn from_formulas<I: IntoIterator<Item = Formula>>(formulas: I) -> Self {
        let mut set = Self::new();
        for f in formulas {
            set.insert(f);
        }
        set
    }

    pub fn insert(&mut self, f: Formula) {
        self.0.extend(f.conjuncts());
    }

    pub fn extend(&mut self, other: &SentenceSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    pub fn is_subset(&self, other: &SentenceSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Members of `self` that are missing from `other`.
    pub fn difference<'a>(&'a self, other: &'a SentenceSet) -> impl Iterator<Item = &'a Formula> {
        self.0.difference(&other.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.0.iter()
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.0.iter().flat_map(Formula::symbols).collect()
    }

    /// Elementwise translation, then canonicalization. Never grows the set.
    pub fn translate(&self, map: &NameMap) -> Result<SentenceSet, LogicError> {
        let mut out = SentenceSet::new();
        for f in &self.0 {
            out.insert(f.translate(map)?);
        }
        Ok(out)
    }

    /// True iff every member holds in `state`. The empty set holds everywhere.
    pub fn eval(&self, state: &BTreeMap<String, bool>) -> Result<bool, LogicError> {
        for f in &self.0 {
            if !f.eval(state)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl FromIterator<Formula> for SentenceSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        Self::from_formulas(iter)
    }
}

impl<'a> IntoIterator for &'a SentenceSet {
    type Item = &'a Formula;
    type IntoIter = std::collections::btree_set::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for SentenceSet {
    type Item = Formula;
    type IntoIter = std::collections::btree_set::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Comma-separated list, or `True` for the empty set.
impl fmt::Display for SentenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("True");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Relational composition `first ; second` of two name maps. Names whose image
/// falls outside the domain of `second` are dropped.
pub fn compose_maps(first: &NameMap, second: &NameMap) -> NameMap {
    first
        .iter()
        .filter_map(|(k, v)| second.get(v).map(|w| (k.clone(), w.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    fn map(pairs: &[(&str, &str)]) -> NameMap {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn names(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn symbols_of_examples() {
        assert!(Formula::True.symbols().is_empty());
        assert_eq!(
            Formula::and(v("h"), Formula::not(v("l"))).symbols(),
            names(&["h", "l"])
        );
        let f = Formula::implies(Formula::not(Formula::and(v("l"), v("a"))), v("h"));
        assert_eq!(f.symbols(), names(&["l", "a", "h"]));
    }

    #[test]
    fn translate_examples() {
        let f = Formula::and(v("h"), Formula::not(v("l")));
        assert_eq!(f.translate(&map(&[("h", "h"), ("l", "l")])).unwrap(), f);
        assert_eq!(
            Formula::not(v("l"))
                .translate(&map(&[("l", "loaded")]))
                .unwrap(),
            Formula::not(v("loaded"))
        );
        // non-injective map collapses symbols
        assert_eq!(
            Formula::or(v("p"), v("q"))
                .translate(&map(&[("p", "q"), ("q", "q")]))
                .unwrap(),
            Formula::or(v("q"), v("q"))
        );
        assert_eq!(
            v("x").translate(&map(&[("y", "y")])),
            Err(LogicError::UnmappedSymbol("x".into()))
        );
    }

    #[test]
    fn translate_set_examples() {
        let s = SentenceSet::from_formulas([v("h"), Formula::not(v("l"))]);
        assert_eq!(s.translate(&map(&[("h", "h"), ("l", "l")])).unwrap(), s);

        let collapsed = SentenceSet::from_formulas([v("p"), v("q")])
            .translate(&map(&[("p", "r"), ("q", "r")]))
            .unwrap();
        assert_eq!(collapsed, SentenceSet::from_formulas([v("r")]));

        let conj = SentenceSet::from_formulas([Formula::and(v("h"), Formula::not(v("l")))]);
        assert_eq!(conj.len(), 2);
        assert_eq!(
            conj.translate(&map(&[("h", "h"), ("l", "l")])).unwrap(),
            SentenceSet::from_formulas([v("h"), Formula::not(v("l"))])
        );
    }

    #[test]
    fn true_is_dropped() {
        let s = SentenceSet::from_formulas([Formula::True, Formula::and(Formula::True, v("x"))]);
        assert_eq!(s, SentenceSet::from_formulas([v("x")]));
        assert_eq!(SentenceSet::new().to_string(), "True");
    }

    #[test]
    fn eval_examples() {
        let st: BTreeMap<String, bool> = [("h", true), ("l", false), ("a", false)]
            .iter()
            .map(|(k, b)| (k.to_string(), *b))
            .collect();
        assert!(Formula::True.eval(&st).unwrap());
        assert!(Formula::and(v("h"), Formula::not(v("l")))
            .eval(&st)
            .unwrap());
        assert!(!Formula::and(v("l"), v("a")).eval(&st).unwrap());
        assert_eq!(
            v("t").eval(&st),
            Err(LogicError::UnassignedSymbol("t".into()))
        );
    }

    #[test]
    fn display_uses_minimal_parentheses() {
        let f = Formula::and(v("x"), Formula::and(v("y"), v("z")));
        assert_eq!(f.to_string(), "x \\and (y \\and z)");
        let g = Formula::implies(Formula::implies(v("a"), v("b")), v("c"));
        assert_eq!(g.to_string(), "(a \\implies b) \\implies c");
        let h = Formula::not(Formula::or(v("a"), Formula::False));
        assert_eq!(h.to_string(), "\\not (a \\or False)");
    }
}
