//! Components and the morphisms between them.
//!
//! A [`Component`] pairs a signature (variables, actions, events) with a
//! presentation: a guard (prescription) and an effect (description) per action
//! and an observation set per event. A [`ComponentMorphism`] is a triple of
//! total name maps under which guards, effects and observation sets are carried
//! into subsets of their counterparts in the target.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::diagnostics::{Part, Report, Sort, Violation};
use crate::logic::{compose_maps, Formula, NameMap, SentenceSet};

const KEYWORDS: &[&str] = &[
    "component",
    "variables",
    "actions",
    "events",
    "bool",
    "True",
    "False",
];

/// Identifier rule shared by the component language and the diagram format.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && s != "_"
        && !KEYWORDS.contains(&s)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("cannot compose: target of the first morphism ({first}) differs from source of the second ({second})")]
    NonComposable { first: String, second: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub variables: BTreeSet<String>,
    pub actions: BTreeSet<String>,
    pub events: BTreeSet<String>,
}

impl Signature {
    pub fn names(&self, sort: Sort) -> &BTreeSet<String> {
        match sort {
            Sort::Variable => &self.variables,
            Sort::Action => &self.actions,
            Sort::Event => &self.events,
        }
    }

    pub fn names_mut(&mut self, sort: Sort) -> &mut BTreeSet<String> {
        match sort {
            Sort::Variable => &mut self.variables,
            Sort::Action => &mut self.actions,
            Sort::Event => &mut self.events,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Presentation {
    pub prescription: BTreeMap<String, SentenceSet>,
    pub description: BTreeMap<String, SentenceSet>,
    pub observation: BTreeMap<String, BTreeSet<String>>,
}

static EMPTY_SENTENCES: SentenceSet = SentenceSet::new();
static EMPTY_NAMES: BTreeSet<String> = BTreeSet::new();

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub signature: Signature,
    pub presentation: Presentation,
}

impl Component {
    pub fn new(name: impl Into<String>) -> Self {
        Component {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_variables<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.signature
            .variables
            .extend(names.into_iter().map(Into::into));
        self
    }

    /// Adds (or extends) an action with the given guard and effect sentences.
    pub fn with_action<G, D>(mut self, name: &str, guard: G, effect: D) -> Self
    where
        G: IntoIterator<Item = Formula>,
        D: IntoIterator<Item = Formula>,
    {
        self.add_action(name, guard, effect);
        self
    }

    pub fn add_action<G, D>(&mut self, name: &str, guard: G, effect: D)
    where
        G: IntoIterator<Item = Formula>,
        D: IntoIterator<Item = Formula>,
    {
        self.signature.actions.insert(name.to_string());
        let p = self
            .presentation
            .prescription
            .entry(name.to_string())
            .or_default();
        for f in guard {
            p.insert(f);
        }
        let d = self
            .presentation
            .description
            .entry(name.to_string())
            .or_default();
        for f in effect {
            d.insert(f);
        }
    }

    /// Adds (or extends) an event observing `actions`. The actions are not declared here.
    pub fn with_event<I, S>(mut self, name: &str, actions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.add_event(name, actions);
        self
    }

    pub fn add_event<I, S>(&mut self, name: &str, actions: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.signature.events.insert(name.to_string());
        self.presentation
            .observation
            .entry(name.to_string())
            .or_default()
            .extend(actions.into_iter().map(Into::into));
    }

    pub fn variables(&self) -> &BTreeSet<String> {
        &self.signature.variables
    }

    pub fn actions(&self) -> &BTreeSet<String> {
        &self.signature.actions
    }

    pub fn events(&self) -> &BTreeSet<String> {
        &self.signature.events
    }

    pub fn prescription(&self, action: &str) -> &SentenceSet {
        self.presentation
            .prescription
            .get(action)
            .unwrap_or(&EMPTY_SENTENCES)
    }

    pub fn description(&self, action: &str) -> &SentenceSet {
        self.presentation
            .description
            .get(action)
            .unwrap_or(&EMPTY_SENTENCES)
    }

    pub fn part(&self, part: Part, action: &str) -> &SentenceSet {
        match part {
            Part::Prescription => self.prescription(action),
            Part::Description => self.description(action),
        }
    }

    pub fn observation(&self, event: &str) -> &BTreeSet<String> {
        self.presentation
            .observation
            .get(event)
            .unwrap_or(&EMPTY_NAMES)
    }

    /// Checks the signature and presentation invariants, reporting every violation.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        let sig = &self.signature;

        for sort in Sort::ALL {
            for name in sig.names(sort) {
                if !is_identifier(name) {
                    report.push(Violation::InvalidName {
                        sort,
                        name: name.clone(),
                    });
                }
            }
        }

        let overlapping: BTreeSet<&String> = sig
            .variables
            .intersection(&sig.actions)
            .chain(sig.variables.intersection(&sig.events))
            .chain(sig.actions.intersection(&sig.events))
            .collect();
        for name in overlapping {
            report.push(Violation::NameSetsOverlap { name: name.clone() });
        }

        let pres = &self.presentation;
        check_domain(
            &mut report,
            Sort::Action,
            &sig.actions,
            pres.prescription.keys(),
        );
        check_domain(
            &mut report,
            Sort::Action,
            &sig.actions,
            pres.description.keys(),
        );
        check_domain(
            &mut report,
            Sort::Event,
            &sig.events,
            pres.observation.keys(),
        );

        for part in [Part::Prescription, Part::Description] {
            let table = match part {
                Part::Prescription => &pres.prescription,
                Part::Description => &pres.description,
            };
            for (action, sentences) in table {
                for symbol in sentences.symbols() {
                    if !sig.variables.contains(&symbol) {
                        report.push(Violation::UnknownSymbol {
                            action: action.clone(),
                            part,
                            symbol,
                        });
                    }
                }
            }
        }

        for (event, actions) in &pres.observation {
            for action in actions {
                if !sig.actions.contains(action) {
                    report.push(Violation::ObservedActionUnknown {
                        event: event.clone(),
                        action: action.clone(),
                    });
                }
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

fn check_domain<'a>(
    report: &mut Report,
    sort: Sort,
    declared: &BTreeSet<String>,
    keys: impl Iterator<Item = &'a String>,
) {
    let keys: BTreeSet<&String> = keys.collect();
    for name in declared {
        if !keys.contains(name) {
            report.push(Violation::PresentationDomain {
                sort,
                name: name.clone(),
                missing: true,
            });
        }
    }
    for name in keys {
        if !declared.contains(name) {
            report.push(Violation::PresentationDomain {
                sort,
                name: name.clone(),
                missing: false,
            });
        }
    }
}

/// Three name maps: variables, actions, events.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignatureMorphism {
    pub variables: NameMap,
    pub actions: NameMap,
    pub events: NameMap,
}

impl SignatureMorphism {
    pub fn identity(sig: &Signature) -> Self {
        let id = |s: &BTreeSet<String>| s.iter().map(|x| (x.clone(), x.clone())).collect();
        SignatureMorphism {
            variables: id(&sig.variables),
            actions: id(&sig.actions),
            events: id(&sig.events),
        }
    }

    pub fn map(&self, sort: Sort) -> &NameMap {
        match sort {
            Sort::Variable => &self.variables,
            Sort::Action => &self.actions,
            Sort::Event => &self.events,
        }
    }

    pub fn map_mut(&mut self, sort: Sort) -> &mut NameMap {
        match sort {
            Sort::Variable => &mut self.variables,
            Sort::Action => &mut self.actions,
            Sort::Event => &mut self.events,
        }
    }

    /// Componentwise composition: `self` first, then `next`.
    pub fn then(&self, next: &SignatureMorphism) -> SignatureMorphism {
        SignatureMorphism {
            variables: compose_maps(&self.variables, &next.variables),
            actions: compose_maps(&self.actions, &next.actions),
            events: compose_maps(&self.events, &next.events),
        }
    }
}

/// A signature morphism between two components.
///
/// The sentence and observation translations are not stored: they are the
/// restrictions of the variable and action maps and are recomputed on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMorphism {
    pub source: Arc<Component>,
    pub target: Arc<Component>,
    pub sigma: SignatureMorphism,
}

impl ComponentMorphism {
    pub fn new(source: Arc<Component>, target: Arc<Component>, sigma: SignatureMorphism) -> Self {
        ComponentMorphism {
            source,
            target,
            sigma,
        }
    }

    pub fn identity(c: Arc<Component>) -> Self {
        let sigma = SignatureMorphism::identity(&c.signature);
        ComponentMorphism {
            source: c.clone(),
            target: c,
            sigma,
        }
    }

    /// Image of `name` of the given sort, if mapped.
    pub fn apply(&self, sort: Sort, name: &str) -> Option<&str> {
        self.sigma.map(sort).get(name).map(String::as_str)
    }

    /// Checks totality and the three preservation inclusions.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        let (src, tgt) = (&self.source.signature, &self.target.signature);

        for sort in Sort::ALL {
            let map = self.sigma.map(sort);
            for name in src.names(sort) {
                match map.get(name) {
                    None => report.push(Violation::NotTotal {
                        sort,
                        name: name.clone(),
                    }),
                    Some(image) if !tgt.names(sort).contains(image) => {
                        report.push(Violation::ImageOutsideTarget {
                            sort,
                            name: name.clone(),
                            image: image.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
            for name in map.keys() {
                if !src.names(sort).contains(name) {
                    report.push(Violation::UnknownSource {
                        sort,
                        name: name.clone(),
                    });
                }
            }
        }

        for action in &src.actions {
            let Some(image) = self.sigma.actions.get(action) else {
                continue;
            };
            for part in [Part::Prescription, Part::Description] {
                // Untranslatable sentences are already reported as NotTotal.
                let Ok(translated) = self
                    .source
                    .part(part, action)
                    .translate(&self.sigma.variables)
                else {
                    continue;
                };
                let missing: Vec<Formula> = translated
                    .difference(self.target.part(part, image))
                    .cloned()
                    .collect();
                if !missing.is_empty() {
                    let action = action.clone();
                    report.push(match part {
                        Part::Prescription => {
                            Violation::PrescriptionNotPreserved { action, missing }
                        }
                        Part::Description => Violation::DescriptionNotPreserved { action, missing },
                    });
                }
            }
        }

        for event in &src.events {
            let Some(image) = self.sigma.events.get(event) else {
                continue;
            };
            let observed = self.target.observation(image);
            let missing: Vec<String> = self
                .source
                .observation(event)
                .iter()
                .filter_map(|a| self.sigma.actions.get(a))
                .filter(|a| !observed.contains(*a))
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if !missing.is_empty() {
                report.push(Violation::ObservationNotPreserved {
                    event: event.clone(),
                    missing,
                });
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `self ; next`. The middle components must be structurally equal.
    pub fn compose(&self, next: &ComponentMorphism) -> Result<ComponentMorphism, ModelError> {
        if !same_component(&self.target, &next.source) {
            return Err(ModelError::NonComposable {
                first: self.target.name.clone(),
                second: next.source.name.clone(),
            });
        }
        Ok(ComponentMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            sigma: self.sigma.then(&next.sigma),
        })
    }

    /// Equality of endpoints and of the three name maps.
    pub fn same_maps(&self, other: &ComponentMorphism) -> bool {
        self.sigma == other.sigma
            && same_component(&self.source, &other.source)
            && same_component(&self.target, &other.target)
    }
}

pub(crate) fn same_component(a: &Arc<Component>, b: &Arc<Component>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Searches for an isomorphism `c1 → c2`: bijective name maps under which the
/// presentations correspond exactly. Exponential in the number of variables.
pub fn components_isomorphic(
    c1: &Arc<Component>,
    c2: &Arc<Component>,
) -> Option<ComponentMorphism> {
    let (s1, s2) = (&c1.signature, &c2.signature);
    if Sort::ALL
        .iter()
        .any(|&s| s1.names(s).len() != s2.names(s).len())
    {
        return None;
    }
    let vars1: Vec<&String> = s1.variables.iter().collect();
    let vars2: Vec<&String> = s2.variables.iter().collect();
    let mut used = vec![false; vars2.len()];
    let mut var_map = NameMap::new();
    let mut found = None;
    search_variables(c1, c2, &vars1, &vars2, &mut used, &mut var_map, &mut found);
    found.map(|sigma| ComponentMorphism::new(c1.clone(), c2.clone(), sigma))
}

fn search_variables(
    c1: &Component,
    c2: &Component,
    vars1: &[&String],
    vars2: &[&String],
    used: &mut [bool],
    var_map: &mut NameMap,
    found: &mut Option<SignatureMorphism>,
) {
    if found.is_some() {
        return;
    }
    let depth = var_map.len();
    if depth == vars1.len() {
        *found = match_actions_events(c1, c2, var_map);
        return;
    }
    for i in 0..vars2.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        var_map.insert(vars1[depth].clone(), vars2[i].clone());
        search_variables(c1, c2, vars1, vars2, used, var_map, found);
        var_map.remove(vars1[depth]);
        used[i] = false;
        if found.is_some() {
            return;
        }
    }
}

fn match_actions_events(
    c1: &Component,
    c2: &Component,
    var_map: &NameMap,
) -> Option<SignatureMorphism> {
    let mut translated = Vec::new();
    for a in c1.actions() {
        let p = c1.prescription(a).translate(var_map).ok()?;
        let d = c1.description(a).translate(var_map).ok()?;
        translated.push((a, p, d));
    }
    // candidates[i]: actions of c2 whose presentation equals the translation of action i
    let candidates: Vec<Vec<&String>> = translated
        .iter()
        .map(|(_, p, d)| {
            c2.actions()
                .iter()
                .filter(|b| c2.prescription(b) == p && c2.description(b) == d)
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut action_map = NameMap::new();
    let mut taken = BTreeSet::new();
    let mut result = None;
    assign_actions(
        c1,
        c2,
        &translated,
        &candidates,
        &mut action_map,
        &mut taken,
        var_map,
        &mut result,
    );
    result
}

#[allow(clippy::too_many_arguments)]
fn assign_actions<'a>(
    c1: &Component,
    c2: &'a Component,
    translated: &[(&String, SentenceSet, SentenceSet)],
    candidates: &[Vec<&'a String>],
    action_map: &mut NameMap,
    taken: &mut BTreeSet<&'a String>,
    var_map: &NameMap,
    result: &mut Option<SignatureMorphism>,
) {
    if result.is_some() {
        return;
    }
    let i = action_map.len();
    if i == translated.len() {
        if let Some(events) = match_events(c1, c2, action_map) {
            *result = Some(SignatureMorphism {
                variables: var_map.clone(),
                actions: action_map.clone(),
                events,
            });
        }
        return;
    }
    for &b in &candidates[i] {
        if !taken.insert(b) {
            continue;
        }
        action_map.insert(translated[i].0.clone(), b.clone());
        assign_actions(
            c1, c2, translated, candidates, action_map, taken, var_map, result,
        );
        action_map.remove(translated[i].0);
        taken.remove(b);
        if result.is_some() {
            return;
        }
    }
}

fn match_events(c1: &Component, c2: &Component, action_map: &NameMap) -> Option<NameMap> {
    let events1: Vec<&String> = c1.events().iter().collect();
    let images: Vec<BTreeSet<String>> = events1
        .iter()
        .map(|e| {
            c1.observation(e)
                .iter()
                .filter_map(|a| action_map.get(a).cloned())
                .collect()
        })
        .collect();
    let candidates: Vec<Vec<&String>> = images
        .iter()
        .map(|img| {
            c2.events()
                .iter()
                .filter(|f| c2.observation(f) == img)
                .collect()
        })
        .collect();
    let mut map = NameMap::new();
    let mut taken = BTreeSet::new();
    if assign_events(&events1, &candidates, &mut map, &mut taken) {
        Some(map)
    } else {
        None
    }
}

fn assign_events<'a>(
    events1: &[&String],
    candidates: &[Vec<&'a String>],
    map: &mut NameMap,
    taken: &mut BTreeSet<&'a String>,
) -> bool {
    let i = map.len();
    if i == events1.len() {
        return true;
    }
    for &f in &candidates[i] {
        if !taken.insert(f) {
            continue;
        }
        map.insert(events1[i].clone(), f.clone());
        if assign_events(events1, candidates, map, taken) {
            return true;
        }
        map.remove(events1[i]);
        taken.remove(f);
    }
    false
}
