//! The hunting scenario: a pilgrim, a shotgun and a turkey, glued into one system.
//!
//! Each component is available as source text (as shipped in `fixtures/hunting`)
//! and as a value built directly through the model API, so the two can be checked
//! against each other.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::colimit::Diagram;
use crate::logic::Formula;
use crate::model::{Component, SignatureMorphism};

pub const PILGRIM_SRC: &str = include_str!("../fixtures/hunting/pilgrim.compos");
pub const SHOTGUN_SRC: &str = include_str!("../fixtures/hunting/shotgun.compos");
pub const TURKEY_SRC: &str = include_str!("../fixtures/hunting/turkey.compos");
pub const HUNTING_SRC: &str = include_str!("../fixtures/hunting/hunting.compos");
pub const G1_SRC: &str = include_str!("../fixtures/hunting/g1.compos");
pub const G2_SRC: &str = include_str!("../fixtures/hunting/g2.compos");
pub const ENVIRONMENT_SRC: &str = include_str!("../fixtures/hunting/environment.compos");
pub const DIAGRAM_SRC: &str = include_str!("../fixtures/hunting/hunting.diagram");
pub const PERTURBED_DIAGRAM_SRC: &str =
    include_str!("../fixtures/hunting/hunting_perturbed.diagram");

/// File name → source text for every file referenced by the hunting diagrams.
pub fn sources() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("pilgrim.compos", PILGRIM_SRC),
        ("shotgun.compos", SHOTGUN_SRC),
        ("turkey.compos", TURKEY_SRC),
        ("hunting.compos", HUNTING_SRC),
        ("g1.compos", G1_SRC),
        ("g2.compos", G2_SRC),
        ("environment.compos", ENVIRONMENT_SRC),
        ("hunting.diagram", DIAGRAM_SRC),
        ("hunting_perturbed.diagram", PERTURBED_DIAGRAM_SRC),
    ])
}

fn v(s: &str) -> Formula {
    Formula::var(s)
}

fn n(s: &str) -> Formula {
    Formula::not(Formula::var(s))
}

pub fn pilgrim() -> Component {
    Component::new("Pilgrim")
        .with_variables(["h", "l", "a"])
        .with_action("bh", [], [v("h")])
        .with_action("ld", [v("h"), n("l")], [v("l")])
        .with_action("am", [v("l"), n("a")], [v("a")])
        .with_action("st", [v("l"), v("a")], [n("l"), n("a")])
        .with_event("e1", ["bh"])
        .with_event("e2", ["ld"])
        .with_event("e3", ["am"])
        .with_event("e4", ["st"])
}

pub fn shotgun() -> Component {
    Component::new("Shotgun")
        .with_variables(["l"])
        .with_action("ld", [n("l")], [v("l")])
        .with_action("st", [], [n("l")])
        .with_event("e2", ["ld"])
        .with_event("e4", ["st"])
}

pub fn turkey() -> Component {
    Component::new("Turkey")
        .with_variables(["t"])
        .with_action("dt", [], [n("t")])
        .with_event("e4", ["dt"])
}

pub fn hunting() -> Component {
    with_hunting_body(Component::new("Hunting").with_variables(["h", "l", "a", "t"]))
}

/// Hunting plus an unused variable `w`.
pub fn environment() -> Component {
    with_hunting_body(Component::new("Environment").with_variables(["h", "l", "a", "t", "w"]))
}

fn with_hunting_body(c: Component) -> Component {
    c.with_action("bh", [], [v("h")])
        .with_action("ld", [v("h"), n("l")], [v("l")])
        .with_action("am", [v("l"), n("a")], [v("a")])
        .with_action("st", [v("l"), v("a")], [n("l"), n("a")])
        .with_action("dt", [], [n("t")])
        .with_event("e1", ["bh"])
        .with_event("e2", ["ld"])
        .with_event("e3", ["am"])
        .with_event("e4", ["st", "dt"])
}

/// Shares the shotgun variable, loading, shooting and their events.
pub fn g1() -> Component {
    Component::new("G1")
        .with_variables(["l"])
        .with_action("ld", [], [])
        .with_action("st", [], [])
        .with_event("e2", ["ld"])
        .with_event("e4", ["st"])
}

/// Shares only the shooting event.
pub fn g2() -> Component {
    Component::new("G2").with_event("e4", Vec::<String>::new())
}

/// Pilgrim, Shotgun and Turkey glued by `G1` and `G2` through inclusions.
pub fn hunting_diagram() -> Diagram {
    let mut d = Diagram::new("Hunting");
    let g1 = Arc::new(g1());
    let g2 = Arc::new(g2());
    let nodes = [
        ("Pilgrim", Arc::new(pilgrim())),
        ("Shotgun", Arc::new(shotgun())),
        ("Turkey", Arc::new(turkey())),
        ("G1", g1.clone()),
        ("G2", g2.clone()),
    ];
    for (name, c) in nodes {
        d.add_node(name, c).expect("distinct node names");
    }
    let edges = [
        ("g1_pilgrim", "G1", "Pilgrim", &g1),
        ("g1_shotgun", "G1", "Shotgun", &g1),
        ("g2_shotgun", "G2", "Shotgun", &g2),
        ("g2_turkey", "G2", "Turkey", &g2),
    ];
    for (name, s, t, glue) in edges {
        d.add_edge(name, s, t, SignatureMorphism::identity(&glue.signature))
            .expect("nodes exist");
    }
    d
}
