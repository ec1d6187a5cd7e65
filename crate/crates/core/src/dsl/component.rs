use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::lexer::{tokenize, Tok, Token};
use super::{DslError, SourceUnit, SyntaxError, Warning};
use crate::logic::{Formula, SentenceSet};
use crate::model::Component;

/// A parsed component together with non-fatal findings.
#[derive(Debug, Clone)]
pub struct ComponentParse {
    pub component: Component,
    pub warnings: Vec<Warning>,
}

/// Parses and validates a `.compos` text.
pub fn parse_component(text: &str) -> Result<Component, DslError> {
    parse_component_unit(&SourceUnit::inline(text)).map(|p| p.component)
}

pub fn parse_component_unit(unit: &SourceUnit) -> Result<ComponentParse, DslError> {
    let tokens = tokenize(&unit.text).map_err(DslError::Syntax)?;
    let mut p = Parser { tokens, pos: 0 };
    let raw = p.component().map_err(DslError::Syntax)?;
    raw.build()
}

/// Parses a comma-separated list of sentences, e.g. a guard or a goal.
pub fn parse_sentences(text: &str) -> Result<SentenceSet, DslError> {
    let tokens = tokenize(text).map_err(DslError::Syntax)?;
    let mut p = Parser { tokens, pos: 0 };
    let set = p.sentences().map_err(DslError::Syntax)?;
    p.expect(&Tok::Eof, "end of input")
        .map_err(DslError::Syntax)?;
    Ok(set)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

#[derive(Debug)]
struct Named {
    name: String,
    line: usize,
    col: usize,
}

#[derive(Debug)]
struct Rule {
    action: Named,
    guard: SentenceSet,
    effect: SentenceSet,
}

#[derive(Debug)]
struct Block {
    /// `None` for the `_` label.
    event: Option<Named>,
    rules: Vec<Rule>,
}

#[derive(Debug)]
struct RawComponent {
    name: String,
    variables: Vec<Named>,
    actions: Vec<Named>,
    events: Vec<Named>,
    blocks: Vec<Block>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(SyntaxError {
            line: t.line,
            col: t.col,
            found: t.tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<Token> {
        if &self.peek().tok == tok {
            Ok(self.advance())
        } else {
            self.error(&[what])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Named> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let name = s.clone();
                let t = self.advance();
                Ok(Named {
                    name,
                    line: t.line,
                    col: t.col,
                })
            }
            _ => self.error(&[what]),
        }
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<Named>> {
        let mut out = Vec::new();
        if !matches!(self.peek().tok, Tok::Ident(_)) {
            return Ok(out);
        }
        out.push(self.ident(what)?);
        while self.peek().tok == Tok::Comma {
            self.advance();
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn component(&mut self) -> PResult<RawComponent> {
        self.expect(&Tok::Component, "`component`")?;
        let name = self.ident("component name")?.name;

        self.expect(&Tok::Variables, "`variables`")?;
        let variables = self.ident_list("variable name")?;
        if !variables.is_empty() {
            if self.peek().tok != Tok::Colon {
                return self.error(&["`,`", "`:`"]);
            }
            self.advance();
            self.expect(&Tok::Bool, "`bool`")?;
        }

        if self.peek().tok != Tok::Actions {
            return self.error(&["`actions`"]);
        }
        self.advance();
        let actions = self.ident_list("action name")?;

        if self.peek().tok != Tok::Events {
            return self.error(&["`,`", "`events`"]);
        }
        self.advance();
        let events = self.ident_list("event name")?;

        if self.peek().tok != Tok::BodyOpen {
            return self.error(&["`,`", "`*[`"]);
        }
        self.advance();
        let mut blocks = Vec::new();
        while self.peek().tok != Tok::BodyClose {
            blocks.push(self.block()?);
        }
        self.advance();
        self.expect(&Tok::Eof, "end of input")?;
        Ok(RawComponent {
            name,
            variables,
            actions,
            events,
            blocks,
        })
    }

    fn at_block_start(&self) -> bool {
        match self.peek_at(0) {
            Tok::Underscore => self.peek_at(1) == &Tok::Colon,
            Tok::Ident(_) => {
                self.peek_at(1) == &Tok::Colon
                    && matches!(self.peek_at(2), Tok::Ident(_))
                    && self.peek_at(3) == &Tok::Colon
            }
            _ => false,
        }
    }

    fn block(&mut self) -> PResult<Block> {
        let event = match &self.peek().tok {
            Tok::Underscore => {
                self.advance();
                None
            }
            Tok::Ident(_) => Some(self.ident("event name")?),
            _ => return self.error(&["event name", "`_`", "`]`"]),
        };
        self.expect(&Tok::Colon, "`:`")?;
        let mut rules = vec![self.rule()?];
        while self.peek().tok != Tok::BodyClose && !self.at_block_start() {
            rules.push(self.rule()?);
        }
        Ok(Block { event, rules })
    }

    fn rule(&mut self) -> PResult<Rule> {
        let action = self.ident("action name")?;
        self.expect(&Tok::Colon, "`:`")?;
        let guard = self.sentences()?;
        if self.peek().tok != Tok::Arrow {
            return self.error(&["`,`", "`-->`"]);
        }
        self.advance();
        let effect = self.sentences()?;
        Ok(Rule {
            action,
            guard,
            effect,
        })
    }

    fn sentences(&mut self) -> PResult<SentenceSet> {
        let mut set = SentenceSet::new();
        set.insert(self.formula()?);
        while self.peek().tok == Tok::Comma {
            self.advance();
            set.insert(self.formula()?);
        }
        Ok(set)
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.peek().tok == Tok::Implies {
            self.advance();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.peek().tok == Tok::Or {
            self.advance();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.peek().tok == Tok::And {
            self.advance();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().tok.clone() {
            Tok::Not => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(s) => {
                self.advance();
                Ok(Formula::Var(s))
            }
            Tok::True => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.advance();
                let f = self.formula()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.error(&["sentence"]),
        }
    }
}

fn declare(list: &[Named], what: &str) -> Result<BTreeSet<String>, DslError> {
    let mut out = BTreeSet::new();
    for n in list {
        if !out.insert(n.name.clone()) {
            return Err(DslError::Duplicate {
                line: n.line,
                col: n.col,
                what: what.to_string(),
                name: n.name.clone(),
            });
        }
    }
    Ok(out)
}

impl RawComponent {
    fn build(self) -> Result<ComponentParse, DslError> {
        let variables = declare(&self.variables, "variable")?;
        let declared_actions = declare(&self.actions, "action")?;
        let declared_events = declare(&self.events, "event")?;

        let mut c = Component::new(self.name.clone()).with_variables(variables);
        for a in &declared_actions {
            c.add_action(a, [], []);
        }
        for e in &declared_events {
            c.add_event(e, Vec::<String>::new());
        }

        let mut warnings = Vec::new();
        let mut reported: BTreeMap<(&str, String), ()> = BTreeMap::new();
        for block in &self.blocks {
            if let Some(ev) = &block.event {
                if !declared_events.contains(&ev.name)
                    && reported.insert(("event", ev.name.clone()), ()).is_none()
                {
                    warnings.push(Warning {
                        file: None,
                        line: ev.line,
                        col: ev.col,
                        message: format!(
                            "event `{}` is used in the body but not declared",
                            ev.name
                        ),
                    });
                }
            }
            for rule in &block.rules {
                let a = &rule.action;
                if !declared_actions.contains(&a.name)
                    && reported.insert(("action", a.name.clone()), ()).is_none()
                {
                    warnings.push(Warning {
                        file: None,
                        line: a.line,
                        col: a.col,
                        message: format!(
                            "action `{}` is used in the body but not declared",
                            a.name
                        ),
                    });
                }
                c.add_action(
                    &a.name,
                    rule.guard.iter().cloned(),
                    rule.effect.iter().cloned(),
                );
                if let Some(ev) = &block.event {
                    c.add_event(&ev.name, [a.name.clone()]);
                }
            }
        }

        let report = c.validate();
        if !report.is_empty() {
            return Err(DslError::Validation {
                subject: format!("component `{}`", self.name),
                report,
            });
        }
        Ok(ComponentParse {
            component: c,
            warnings,
        })
    }
}

/// Renders a component in canonical text form: names sorted, one rule per
/// observed action, unobserved actions under the `_` label.
pub fn emit_component(c: &Component) -> String {
    let mut out = String::new();
    let list = |xs: &BTreeSet<String>| xs.iter().cloned().collect::<Vec<_>>().join(", ");

    writeln!(out, "component {}", c.name).unwrap();
    out.push('\n');
    if c.variables().is_empty() {
        out.push_str("variables\n");
    } else {
        writeln!(out, "variables {} : bool", list(c.variables())).unwrap();
    }
    writeln!(out, "actions {}", list(c.actions())).unwrap();
    writeln!(out, "events {}", list(c.events())).unwrap();
    // keep header lines free of trailing spaces
    out = out.replace(" \n", "\n");
    out.push('\n');

    let mut blocks: Vec<(String, Vec<&String>)> = c
        .events()
        .iter()
        .map(|e| (e.clone(), c.observation(e).iter().collect::<Vec<_>>()))
        .filter(|(_, acts)| !acts.is_empty())
        .collect();
    let observed: BTreeSet<&String> = c.presentation.observation.values().flatten().collect();
    let unobserved: Vec<&String> = c
        .actions()
        .iter()
        .filter(|a| !observed.contains(a))
        .collect();
    if !unobserved.is_empty() {
        blocks.push(("_".to_string(), unobserved));
    }

    if blocks.is_empty() {
        out.push_str("*[ ]\n");
        return out;
    }
    for (i, (label, actions)) in blocks.iter().enumerate() {
        let lead = if i == 0 { "*[ " } else { "   " };
        for (j, a) in actions.iter().enumerate() {
            if j == 0 {
                write!(out, "{lead}{label}: ")
            } else {
                write!(out, "   {:width$}  ", "", width = label.len())
            }
            .unwrap();
            write!(out, "{a}: {} --> {}", c.prescription(a), c.description(a)).unwrap();
            let last = i + 1 == blocks.len() && j + 1 == actions.len();
            out.push_str(if last { " ]\n" } else { "\n" });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn fixtures_parse_to_their_models() {
        assert_eq!(
            parse_component(fixtures::PILGRIM_SRC).unwrap(),
            fixtures::pilgrim()
        );
        assert_eq!(
            parse_component(fixtures::SHOTGUN_SRC).unwrap(),
            fixtures::shotgun()
        );
        assert_eq!(
            parse_component(fixtures::TURKEY_SRC).unwrap(),
            fixtures::turkey()
        );
        assert_eq!(
            parse_component(fixtures::HUNTING_SRC).unwrap(),
            fixtures::hunting()
        );
        assert_eq!(parse_component(fixtures::G1_SRC).unwrap(), fixtures::g1());
        assert_eq!(parse_component(fixtures::G2_SRC).unwrap(), fixtures::g2());
    }

    #[test]
    fn turkey_single_arrow() {
        let c = parse_component(fixtures::TURKEY_SRC).unwrap();
        assert!(c.prescription("dt").is_empty());
        assert_eq!(
            c.description("dt"),
            &SentenceSet::from_formulas([Formula::not(v("t"))])
        );
        assert_eq!(c.observation("e4").len(), 1);
    }

    #[test]
    fn pilgrim_conjunctions_are_flattened() {
        let c = parse_component(fixtures::PILGRIM_SRC).unwrap();
        assert_eq!(
            c.prescription("st"),
            &SentenceSet::from_formulas([v("l"), v("a")])
        );
        assert!(c.observation("e4").contains("st"));
    }

    #[test]
    fn shotgun_header_mismatch_warns() {
        let p = parse_component_unit(&SourceUnit::inline(fixtures::SHOTGUN_SRC)).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert!(p.warnings[0].message.contains("`st`"));
        assert!(p.component.actions().contains("st"));
    }

    #[test]
    fn empty_component() {
        let c = parse_component("component X variables actions events *[ ]").unwrap();
        assert_eq!(c, Component::new("X"));
        let text = emit_component(&c);
        assert_eq!(text, "component X\n\nvariables\nactions\nevents\n\n*[ ]\n");
        assert_eq!(parse_component(&text).unwrap(), c);
    }

    #[test]
    fn emit_hunting() {
        let text = emit_component(&fixtures::hunting());
        let expected = "\
component Hunting

variables a, h, l, t : bool
actions am, bh, dt, ld, st
events e1, e2, e3, e4

*[ e1: bh: True --> h
   e2: ld: h, \\not l --> l
   e3: am: l, \\not a --> a
   e4: dt: True --> \\not t
       st: a, l --> \\not a, \\not l ]
";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_fixtures() {
        for src in [
            fixtures::PILGRIM_SRC,
            fixtures::SHOTGUN_SRC,
            fixtures::TURKEY_SRC,
            fixtures::HUNTING_SRC,
        ] {
            let c = parse_component(src).unwrap();
            let text = emit_component(&c);
            assert_eq!(parse_component(&text).unwrap(), c);
            assert_eq!(emit_component(&parse_component(&text).unwrap()), text);
        }
    }

    #[test]
    fn unobserved_actions_and_silent_events_round_trip() {
        let c = Component::new("C")
            .with_variables(["x"])
            .with_action("a", [v("x")], [Formula::not(v("x"))])
            .with_action("b", [], [])
            .with_event("e", Vec::<String>::new())
            .with_event("f", ["b"]);
        let text = emit_component(&c);
        assert!(text.contains("_: a: x --> \\not x ]"));
        assert_eq!(parse_component(&text).unwrap(), c);
    }

    #[test]
    fn action_under_two_events_merges() {
        let c = parse_component(
            "component C variables x : bool actions a events e, f
             *[ e: a: x --> True
                f: a: True --> \\not x ]",
        )
        .unwrap();
        assert_eq!(c.prescription("a"), &SentenceSet::from_formulas([v("x")]));
        assert_eq!(
            c.description("a"),
            &SentenceSet::from_formulas([Formula::not(v("x"))])
        );
        assert!(c.observation("e").contains("a") && c.observation("f").contains("a"));
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse_component("component X\nvariables h : int").unwrap_err();
        match err {
            DslError::Syntax(e) => {
                assert_eq!((e.line, e.col), (2, 15));
                assert_eq!(e.expected, vec!["`bool`".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        let err = parse_component("component X variables actions a events e *[ e: a: --> x ]")
            .unwrap_err();
        assert!(
            matches!(err, DslError::Syntax(SyntaxError { col: 51, .. })),
            "{err:?}"
        );
    }

    #[test]
    fn validation_errors_surface() {
        let err =
            parse_component("component B variables h : bool actions h events *[ ]").unwrap_err();
        match err {
            DslError::Validation { report, .. } => assert_eq!(report[0].kind(), "NameSetsOverlap"),
            other => panic!("{other:?}"),
        }
        let err =
            parse_component("component B variables h, h : bool actions events *[ ]").unwrap_err();
        assert!(
            matches!(
                err,
                DslError::Duplicate {
                    line: 1,
                    col: 26,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn sentences_parse_with_precedence() {
        let s = parse_sentences("\\not l \\and a \\implies h \\or x").unwrap();
        let expected = Formula::implies(
            Formula::and(Formula::not(v("l")), v("a")),
            Formula::or(v("h"), v("x")),
        );
        assert_eq!(s, SentenceSet::from_formulas([expected]));
        assert_eq!(
            parse_sentences("!h, ¬l").unwrap(),
            SentenceSet::from_formulas([Formula::not(v("h")), Formula::not(v("l"))])
        );
        assert!(parse_sentences("a b").is_err());
    }
}
