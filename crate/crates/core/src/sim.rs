//! Guarded-event execution of a component over boolean states.
//!
//! An event is enabled when the guards of all the actions it observes hold; firing
//! it applies all their effects at once. Effects must be literals.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::logic::{Formula, LogicError, SentenceSet};
use crate::model::Component;

/// A total valuation of a component's variables.
pub type State = BTreeMap<String, bool>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("initial constraint is unsatisfiable")]
    Unsatisfiable,
    #[error("initial constraint admits {0} states, expected exactly one")]
    AmbiguousInitial(usize),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("event `{0}` is not enabled")]
    NotEnabled(String),
    #[error("effect `{sentence}` of action `{action}` is not a literal")]
    NonLiteralEffect { action: String, sentence: Formula },
    #[error("conflicting effects on `{0}`")]
    ConflictingEffects(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Every valuation of `c`'s variables satisfying `init`, in lexicographic order of
/// the valuation vectors.
pub fn initial_states(c: &Component, init: &SentenceSet) -> Result<Vec<State>, SimError> {
    let vars: Vec<&String> = c.variables().iter().collect();
    if vars.len() >= usize::BITS as usize {
        return Err(SimError::Unsatisfiable);
    }
    let mut out = Vec::new();
    for bits in 0..(1usize << vars.len()) {
        let state: State = vars
            .iter()
            .enumerate()
            .map(|(i, v)| ((*v).clone(), bits >> (vars.len() - 1 - i) & 1 == 1))
            .collect();
        if init.eval(&state)? {
            out.push(state);
        }
    }
    if out.is_empty() {
        return Err(SimError::Unsatisfiable);
    }
    Ok(out)
}

pub fn is_enabled(c: &Component, s: &State, event: &str) -> Result<bool, SimError> {
    for a in c.observation(event) {
        if !c.prescription(a).eval(s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn enabled_events(c: &Component, s: &State) -> Result<BTreeSet<String>, SimError> {
    let mut out = BTreeSet::new();
    for e in c.events() {
        if is_enabled(c, s, e)? {
            out.insert(e.clone());
        }
    }
    Ok(out)
}

/// The literal assignments an event performs, checked for conflicts.
pub fn effects(c: &Component, event: &str) -> Result<BTreeMap<String, bool>, SimError> {
    let mut out = BTreeMap::new();
    for a in c.observation(event) {
        for f in c.description(a).iter() {
            let Some((x, value)) = f.as_literal() else {
                return Err(SimError::NonLiteralEffect {
                    action: a.clone(),
                    sentence: f.clone(),
                });
            };
            if out.insert(x.to_string(), value) == Some(!value) {
                return Err(SimError::ConflictingEffects(x.to_string()));
            }
        }
    }
    Ok(out)
}

pub fn fire(c: &Component, s: &State, event: &str) -> Result<State, SimError> {
    if !c.events().contains(event) {
        return Err(SimError::UnknownEvent(event.to_string()));
    }
    if !is_enabled(c, s, event)? {
        return Err(SimError::NotEnabled(event.to_string()));
    }
    let mut next = s.clone();
    for (x, value) in effects(c, event)? {
        next.insert(x, value);
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: State,
    pub steps: Vec<(String, State)>,
}

impl Trace {
    pub fn new(initial: State) -> Self {
        Trace {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn last(&self) -> &State {
        self.steps.last().map_or(&self.initial, |(_, s)| s)
    }

    pub fn events(&self) -> Vec<&str> {
        self.steps.iter().map(|(e, _)| e.as_str()).collect()
    }
}

fn render_state(f: &mut fmt::Formatter<'_>, label: &str, s: &State) -> fmt::Result {
    write!(f, "{label}:")?;
    for (x, v) in s {
        write!(f, " {x}={}", u8::from(*v))?;
    }
    writeln!(f)
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_state(f, "init", &self.initial)?;
        for (e, s) in &self.steps {
            render_state(f, e, s)?;
        }
        Ok(())
    }
}

fn unique_initial(c: &Component, init: &SentenceSet) -> Result<State, SimError> {
    let mut states = initial_states(c, init)?;
    if states.len() != 1 {
        return Err(SimError::AmbiguousInitial(states.len()));
    }
    Ok(states.remove(0))
}

/// Fires `schedule` in order from the unique state satisfying `init`.
pub fn run<S: AsRef<str>>(
    c: &Component,
    init: &SentenceSet,
    schedule: &[S],
) -> Result<Trace, SimError> {
    let mut trace = Trace::new(unique_initial(c, init)?);
    for e in schedule {
        let next = fire(c, trace.last(), e.as_ref())?;
        trace.steps.push((e.as_ref().to_string(), next));
    }
    Ok(trace)
}

/// Breadth-first search for a shortest trace of at most `bound` steps, starting
/// from any initial state, whose last state satisfies `goal`. Events are explored
/// in lexicographic order, so witnesses are deterministic.
pub fn reachable(
    c: &Component,
    init: &SentenceSet,
    goal: &SentenceSet,
    bound: usize,
) -> Result<Option<Trace>, SimError> {
    let mut visited: BTreeSet<State> = BTreeSet::new();
    let mut queue: VecDeque<Trace> = VecDeque::new();
    for s in initial_states(c, init)? {
        if visited.insert(s.clone()) {
            queue.push_back(Trace::new(s));
        }
    }
    while let Some(trace) = queue.pop_front() {
        if goal.eval(trace.last())? {
            return Ok(Some(trace));
        }
        if trace.steps.len() == bound {
            continue;
        }
        for e in enabled_events(c, trace.last())? {
            let next = fire(c, trace.last(), &e)?;
            if visited.insert(next.clone()) {
                let mut t = trace.clone();
                t.steps.push((e, next));
                queue.push_back(t);
            }
        }
    }
    Ok(None)
}

/// A conjunction of literals such as `!h, l` read as a full or partial state.
pub fn literals<'a, I: IntoIterator<Item = (&'a str, bool)>>(lits: I) -> SentenceSet {
    lits.into_iter()
        .map(|(x, v)| Formula::literal(x, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn start() -> SentenceSet {
        literals([("h", false), ("l", false), ("a", false), ("t", true)])
    }

    fn state(h: bool, l: bool, a: bool, t: bool) -> State {
        [("a", a), ("h", h), ("l", l), ("t", t)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    #[test]
    fn initial_state_is_unique() {
        let c = fixtures::hunting();
        assert_eq!(
            initial_states(&c, &start()).unwrap(),
            vec![state(false, false, false, true)]
        );
        assert_eq!(initial_states(&c, &SentenceSet::new()).unwrap().len(), 16);
        let contradiction = literals([("h", true), ("h", false)]);
        assert_eq!(
            initial_states(&c, &contradiction),
            Err(SimError::Unsatisfiable)
        );
    }

    #[test]
    fn enabledness() {
        let c = fixtures::hunting();
        let e = enabled_events(&c, &state(false, false, false, true)).unwrap();
        assert_eq!(e.into_iter().collect::<Vec<_>>(), ["e1"]);
        let e = enabled_events(&c, &state(true, true, true, true)).unwrap();
        assert_eq!(e.into_iter().collect::<Vec<_>>(), ["e1", "e4"]);
    }

    #[test]
    fn unobserving_event_is_always_enabled() {
        let c = fixtures::g2();
        assert!(is_enabled(&c, &State::new(), "e4").unwrap());
    }

    #[test]
    fn simultaneous_effects() {
        let c = fixtures::hunting();
        let s = fire(&c, &state(true, true, true, true), "e4").unwrap();
        assert_eq!(s, state(true, false, false, false));
        let s = fire(&c, &state(false, false, false, true), "e1").unwrap();
        assert_eq!(s, state(true, false, false, true));
    }

    #[test]
    fn conflicting_and_non_literal_effects() {
        let c = Component::new("C")
            .with_variables(["x", "y"])
            .with_action("a", [], [Formula::var("x")])
            .with_action("b", [], [Formula::not(Formula::var("x"))])
            .with_action("c", [], [Formula::or(Formula::var("x"), Formula::var("y"))])
            .with_event("e", ["a", "b"])
            .with_event("f", ["c"]);
        let s = initial_states(&c, &SentenceSet::new()).unwrap().remove(0);
        assert_eq!(
            fire(&c, &s, "e"),
            Err(SimError::ConflictingEffects("x".into()))
        );
        assert!(
            matches!(fire(&c, &s, "f"), Err(SimError::NonLiteralEffect { action, .. }) if action == "c")
        );
    }

    #[test]
    fn narrative_run() {
        let c = fixtures::hunting();
        let t = run(&c, &start(), &["e1", "e2", "e3", "e4"]).unwrap();
        assert_eq!(t.last(), &state(true, false, false, false));
        assert_eq!(
            t.to_string(),
            "init: a=0 h=0 l=0 t=1\n\
             e1: a=0 h=1 l=0 t=1\n\
             e2: a=0 h=1 l=1 t=1\n\
             e3: a=1 h=1 l=1 t=1\n\
             e4: a=0 h=1 l=0 t=0\n"
        );
        let empty: [&str; 0] = [];
        assert!(run(&c, &start(), &empty).unwrap().steps.is_empty());
        assert_eq!(
            run(&c, &start(), &["e2"]),
            Err(SimError::NotEnabled("e2".into()))
        );
        assert_eq!(
            run(&c, &SentenceSet::new(), &empty),
            Err(SimError::AmbiguousInitial(16))
        );
    }

    #[test]
    fn bounded_reachability() {
        let c = fixtures::hunting();
        let goal = literals([("t", false)]);
        let w = reachable(&c, &start(), &goal, 4).unwrap().unwrap();
        assert_eq!(w.events(), ["e1", "e2", "e3", "e4"]);
        assert_eq!(reachable(&c, &start(), &goal, 3).unwrap(), None);
        let w = reachable(&c, &start(), &literals([("t", true)]), 0)
            .unwrap()
            .unwrap();
        assert!(w.steps.is_empty());
    }
}
