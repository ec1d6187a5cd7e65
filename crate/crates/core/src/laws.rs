//! Randomized checking of the category laws and of the colimit construction.

use std::fmt;

use crate::colimit::{check_cocone, colimit_system, mediating_morphism, Diagram};
use crate::dsl::emit_component;
use crate::gen::Gen;
use crate::model::{ComponentMorphism, ModelError};
use crate::oracle::{naive_partition, normalize, universal_property_counterexample};

/// Node name-set size allowed when enumerating cocones.
pub const UNIVERSAL_BOUND: usize = 4;

/// Deliberate defects, used to check that the law checker notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Composition keeps the first morphism's event map instead of composing it.
    ComposeSkipsEvents,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub iteration: u64,
    pub law: &'static str,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "law `{}` failed at iteration {}",
            self.law, self.iteration
        )?;
        write!(f, "{}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LawsReport {
    pub iterations: u64,
    pub checks: u64,
    pub failure: Option<Counterexample>,
}

fn compose(
    f: &ComponentMorphism,
    g: &ComponentMorphism,
    fault: Option<Fault>,
) -> Result<ComponentMorphism, ModelError> {
    let mut h = f.compose(g)?;
    if fault == Some(Fault::ComposeSkipsEvents) {
        h.sigma.events = f.sigma.events.clone();
    }
    Ok(h)
}

fn show_morphism(m: &ComponentMorphism) -> String {
    let mut s = format!("{} -> {}\n", m.source.name, m.target.name);
    for (sort, map) in [
        ("var", &m.sigma.variables),
        ("action", &m.sigma.actions),
        ("event", &m.sigma.events),
    ] {
        for (x, y) in map {
            s.push_str(&format!("  {sort} {x} -> {y}\n"));
        }
    }
    s
}

fn show_chain(ms: &[&ComponentMorphism]) -> String {
    let mut s = String::new();
    if let Some(first) = ms.first() {
        s.push_str(&emit_component(&first.source));
    }
    for m in ms {
        s.push_str(&emit_component(&m.target));
        s.push_str(&show_morphism(m));
    }
    s
}

fn show_diagram(d: &Diagram) -> String {
    let mut s = String::new();
    for c in d.nodes().values() {
        s.push_str(&emit_component(c));
    }
    for e in d.edges() {
        s.push_str(&format!("edge {}: ", e.name));
        s.push_str(&show_morphism(&e.morphism));
    }
    s
}

struct Checker {
    iteration: u64,
    checks: u64,
}

impl Checker {
    fn check(
        &mut self,
        ok: bool,
        law: &'static str,
        detail: impl FnOnce() -> String,
    ) -> Result<(), Counterexample> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(Counterexample {
                iteration: self.iteration,
                law,
                detail: detail(),
            })
        }
    }
}

fn morphism_laws(
    g: &mut Gen,
    ck: &mut Checker,
    fault: Option<Fault>,
) -> Result<(), Counterexample> {
    let ms = g.chain(3);
    let (f, gm, h) = (&ms[0], &ms[1], &ms[2]);
    let chain = || show_chain(&[f, gm, h]);

    let id_src = ComponentMorphism::identity(f.source.clone());
    let id_tgt = ComponentMorphism::identity(f.target.clone());
    ck.check(id_src.validate().is_empty(), "identity is valid", chain)?;
    let left = compose(&id_src, f, fault);
    ck.check(
        left.as_ref().is_ok_and(|m| m.same_maps(f)),
        "left identity",
        || format!("id ; f differs from f\n{}", chain()),
    )?;
    let right = compose(f, &id_tgt, fault);
    ck.check(
        right.as_ref().is_ok_and(|m| m.same_maps(f)),
        "right identity",
        || format!("f ; id differs from f\n{}", chain()),
    )?;

    let fg = compose(f, gm, fault).expect("chain is composable");
    let gh = compose(gm, h, fault).expect("chain is composable");
    for (m, name) in [(&fg, "f ; g"), (&gh, "g ; h")] {
        let report = m.validate();
        ck.check(report.is_empty(), "composite is valid", || {
            let v = &report[0];
            format!(
                "{name} is invalid: [{}] {v}\n{}\n{}",
                v.code(),
                show_morphism(m),
                chain()
            )
        })?;
    }
    let a = compose(&fg, h, fault).expect("chain is composable");
    let b = compose(f, &gh, fault).expect("chain is composable");
    ck.check(a.same_maps(&b), "associativity", || {
        format!(
            "(f ; g) ; h =\n{}f ; (g ; h) =\n{}\n{}",
            show_morphism(&a),
            show_morphism(&b),
            chain()
        )
    })?;
    ck.check(a.validate().is_empty(), "composite is valid", || {
        format!("(f ; g) ; h is invalid\n{}", chain())
    })
}

fn colimit_laws(g: &mut Gen, ck: &mut Checker) -> Result<(), Counterexample> {
    let d = g.diagram(3, false);
    let shown = || show_diagram(&d);
    let r = match colimit_system(&d) {
        Ok(r) => r,
        Err(e) => {
            return ck.check(false, "colimit exists", || format!("{e}\n{}", shown()));
        }
    };
    ck.check(
        normalize(&r.partition()) == naive_partition(&d),
        "quotient soundness",
        || format!("union-find and closure partitions differ\n{}", shown()),
    )?;
    ck.check(r.apex().validate().is_empty(), "apex is valid", shown)?;
    ck.check(
        check_cocone(&d, &r.cocone).is_empty(),
        "colimit is a cocone",
        shown,
    )?;
    let found = universal_property_counterexample(&r, &d, UNIVERSAL_BOUND);
    ck.check(found == Ok(None), "universal property", || {
        format!("{found:?}\n{}", shown())
    })?;

    let again = colimit_system(&d).expect("computed once already");
    ck.check(again == r, "determinism", shown)?;

    let c = g.cocone(&d, &r.partition());
    let u = mediating_morphism(&r, &c);
    ck.check(u.is_ok(), "mediator exists", || {
        format!("{u:?}\n{}", shown())
    })?;
    Ok(())
}

/// Runs `iters` rounds of law checks from `seed`, stopping at the first failure.
pub fn run_laws(seed: u64, iters: u64, fault: Option<Fault>) -> LawsReport {
    let mut g = Gen::new(seed);
    let mut ck = Checker {
        iteration: 0,
        checks: 0,
    };
    for i in 0..iters {
        ck.iteration = i;
        let outcome =
            morphism_laws(&mut g, &mut ck, fault).and_then(|()| colimit_laws(&mut g, &mut ck));
        if let Err(cx) = outcome {
            return LawsReport {
                iterations: i + 1,
                checks: ck.checks,
                failure: Some(cx),
            };
        }
    }
    LawsReport {
        iterations: iters,
        checks: ck.checks,
        failure: None,
    }
}
