//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line with its
//! runtime, written straight to stdout so it shows even when output is captured.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use compos_cli::{cmd_compose, Style};
use compos_core::dsl::{emit_component, parse_component, parse_diagram, FsLoader};
use compos_core::gen::Gen;
use compos_core::oracle::{naive_partition, normalize, under_merge, verify_universal_property};
use compos_core::sim::{self, literals};
use compos_core::{
    assemble, check_cocone, colimit_system, components_isomorphic, fixtures, mediating_morphism,
    ColimitError, Component, ComponentMorphism, Formula, SentenceSet, SignatureMorphism, Sort,
    Violation,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/hunting")
        .join(name)
}

/// Runs `check`, prints its verdict line and fails the test on error or overrun.
fn criterion(label: &str, limit: Option<Duration>, check: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(limit)) if elapsed > limit => {
            Err(format!("took {elapsed:?}, limit {limit:?}"))
        }
        (o, _) => o,
    };
    let limit_text = limit.map_or(String::new(), |l| format!(", limit {l:?}"));
    let line = match &outcome {
        Ok(detail) => format!("PASS  {label}: {detail} ({elapsed:.2?}{limit_text})"),
        Err(why) => format!("FAIL  {label}: {why} ({elapsed:.2?}{limit_text})"),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
    if let Err(why) = outcome {
        panic!("{label}: {why}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn names(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn set(fs: &[Formula]) -> SentenceSet {
    SentenceSet::from_formulas(fs.iter().cloned())
}

#[test]
fn hunting_end_to_end() {
    criterion("hunting end-to-end", Some(Duration::from_secs(1)), || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = dir.path().join("hunting.compos");
        let r = cmd_compose(&fixture("hunting.diagram"), Some(&out), Style::default());
        ensure(r.code == 0, || {
            format!("compose exited {}: {}", r.code, r.stderr)
        })?;
        let text = fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let composed = Arc::new(parse_component(&text).map_err(|e| e.to_string())?);
        let expected = Arc::new(parse_component(fixtures::HUNTING_SRC).map_err(|e| e.to_string())?);
        ensure(
            components_isomorphic(&composed, &expected).is_some(),
            || "not isomorphic to hunting.compos".into(),
        )?;

        let l = Formula::literal;
        let c = &composed;
        ensure(c.variables() == &names(&["h", "l", "a", "t"]), || {
            format!("P = {:?}", c.variables())
        })?;
        ensure(
            c.actions() == &names(&["bh", "ld", "am", "st", "dt"]),
            || format!("A = {:?}", c.actions()),
        )?;
        ensure(c.events() == &names(&["e1", "e2", "e3", "e4"]), || {
            format!("E = {:?}", c.events())
        })?;
        ensure(
            c.prescription("ld") == &set(&[l("h", true), l("l", false)]),
            || format!("pi(ld) = {}", c.prescription("ld")),
        )?;
        ensure(
            c.prescription("st") == &set(&[l("l", true), l("a", true)]),
            || format!("pi(st) = {}", c.prescription("st")),
        )?;
        ensure(
            c.description("st") == &set(&[l("l", false), l("a", false)]),
            || format!("delta(st) = {}", c.description("st")),
        )?;
        ensure(c.observation("e4") == &names(&["st", "dt"]), || {
            format!("eps(e4) = {:?}", c.observation("e4"))
        })?;
        ensure(composed.as_ref() == expected.as_ref(), || {
            "differs from hunting.compos after canonicalization".into()
        })?;
        Ok("composite isomorphic and equal to hunting.compos".into())
    });
}

#[test]
fn category_laws() {
    criterion("category laws", Some(Duration::from_secs(10)), || {
        let mut checked = 0;
        for seed in 0..200u64 {
            let ms = Gen::new(seed).chain(3);
            let (f, g, h) = (&ms[0], &ms[1], &ms[2]);
            for c in [&f.source, &f.target, &g.target, &h.target] {
                for sort in Sort::ALL {
                    ensure(c.signature.names(sort).len() <= 4, || {
                        format!("seed {seed}: more than 4 {sort} names")
                    })?;
                }
            }
            for m in [f, g, h] {
                ensure(m.validate().is_empty(), || {
                    format!("seed {seed}: generated morphism invalid")
                })?;
            }
            let id_s = ComponentMorphism::identity(f.source.clone());
            let id_t = ComponentMorphism::identity(f.target.clone());
            let compose = |a: &ComponentMorphism, b: &ComponentMorphism| {
                a.compose(b).map_err(|e| format!("seed {seed}: {e}"))
            };
            let left = compose(&id_s, f)?;
            let right = compose(f, &id_t)?;
            ensure(left.same_maps(f) && right.same_maps(f), || {
                format!("seed {seed}: identity law")
            })?;
            let fg = compose(f, g)?;
            let gh = compose(g, h)?;
            let a = compose(&fg, h)?;
            let b = compose(f, &gh)?;
            ensure(a.sigma == b.sigma && a.same_maps(&b), || {
                format!("seed {seed}: associativity")
            })?;
            for m in [&left, &right, &fg, &gh, &a, &b] {
                let report = m.validate();
                ensure(report.is_empty(), || {
                    format!("seed {seed}: composite invalid: {report:?}")
                })?;
            }
            checked += 1;
        }
        Ok(format!(
            "{checked} chains satisfy identity and associativity"
        ))
    });
}

#[test]
fn universal_property() {
    criterion("universal property", Some(Duration::from_secs(60)), || {
        let mut g = Gen::new(2024);
        for i in 0..50 {
            let d = g.diagram(3, true);
            let r = colimit_system(&d).map_err(|e| e.to_string())?;
            let ok = verify_universal_property(&r, &d, 4).map_err(|e| e.to_string())?;
            ensure(ok, || format!("diagram {i}: colimit rejected"))?;
            let p = under_merge(&r.partition()).ok_or(format!("diagram {i}: nothing to split"))?;
            let broken = assemble(&d, &p).map_err(|e| e.to_string())?;
            let ok = verify_universal_property(&broken, &d, 4).map_err(|e| e.to_string())?;
            ensure(!ok, || {
                format!("diagram {i}: under-merged quotient accepted")
            })?;
        }
        Ok("50 colimits accepted, 50 under-merged quotients rejected".into())
    });
}

#[test]
fn quotient_oracle() {
    criterion(
        "quotient oracle equivalence",
        Some(Duration::from_secs(10)),
        || {
            let mut g = Gen::new(77);
            for i in 0..100 {
                let d = g.diagram(3, false);
                let r = colimit_system(&d).map_err(|e| e.to_string())?;
                ensure(normalize(&r.partition()) == naive_partition(&d), || {
                    format!("diagram {i}: partitions differ")
                })?;
            }
            Ok("100 union-find partitions equal the relational closure".into())
        },
    );
}

/// Names an inclusion failure of `m` should be reported under: the actions whose
/// guard or effect is lost and the events whose observations are lost.
fn broken_inclusions(m: &ComponentMorphism) -> BTreeSet<String> {
    let (src, tgt, s) = (&m.source, &m.target, &m.sigma);
    let mut out = BTreeSet::new();
    for a in src.actions() {
        let b = &s.actions[a];
        let guard = src.prescription(a).translate(&s.variables).unwrap();
        let effect = src.description(a).translate(&s.variables).unwrap();
        if !guard.is_subset(tgt.prescription(b)) || !effect.is_subset(tgt.description(b)) {
            out.insert(a.clone());
        }
    }
    for e in src.events() {
        let image = tgt.observation(&s.events[e]);
        if src
            .observation(e)
            .iter()
            .any(|a| !image.contains(&s.actions[a]))
        {
            out.insert(e.clone());
        }
    }
    out
}

fn reported_names(report: &[Violation]) -> BTreeSet<String> {
    report
        .iter()
        .filter_map(|v| match v {
            Violation::PrescriptionNotPreserved { action, .. }
            | Violation::DescriptionNotPreserved { action, .. } => Some(action.clone()),
            Violation::ObservationNotPreserved { event, .. } => Some(event.clone()),
            _ => None,
        })
        .collect()
}

#[test]
fn morphism_checker_sensitivity() {
    criterion(
        "morphism checker sensitivity",
        Some(Duration::from_secs(5)),
        || {
            let r = colimit_system(&fixtures::hunting_diagram()).map_err(|e| e.to_string())?;
            let (mut rejected, mut accepted) = (0, 0);
            for (node, leg) in &r.cocone.legs {
                ensure(leg.validate().is_empty(), || format!("leg {node} invalid"))?;
                let mut mutants = Vec::new();
                for sort in [Sort::Action, Sort::Event] {
                    for (x, y) in leg.sigma.map(sort) {
                        for z in leg.target.signature.names(sort).iter().filter(|z| *z != y) {
                            let mut sigma = leg.sigma.clone();
                            sigma.map_mut(sort).insert(x.clone(), z.clone());
                            mutants.push((format!("{node}: {sort} {x} -> {z}"), sigma));
                        }
                    }
                }
                for (what, sigma) in mutants {
                    let m = ComponentMorphism::new(leg.source.clone(), leg.target.clone(), sigma);
                    let expected = broken_inclusions(&m);
                    let report = m.validate();
                    if expected.is_empty() {
                        ensure(report.is_empty(), || format!("{what}: spurious {report:?}"))?;
                        accepted += 1;
                    } else {
                        let got = reported_names(&report);
                        ensure(got == expected, || {
                            format!("{what}: expected {expected:?}, reported {got:?}")
                        })?;
                        rejected += 1;
                    }
                }
            }
            ensure(rejected > 0, || "no breaking mutation found".into())?;
            Ok(format!(
                "{rejected} breaking mutations rejected by name, {accepted} harmless ones accepted"
            ))
        },
    );
}

#[test]
fn mediator_correctness() {
    criterion("mediator correctness", None, || {
        let f = parse_diagram(
            &fs::read_to_string(fixture("hunting.diagram")).map_err(|e| e.to_string())?,
            &FsLoader::new(fixture("")),
        )
        .map_err(|e| e.to_string())?;
        let r = colimit_system(&f.diagram).map_err(|e| e.to_string())?;
        let env = f
            .cocones
            .get("Environment")
            .ok_or("no Environment cocone")?;
        ensure(env.apex.variables().contains("w"), || {
            "environment lacks the fresh variable".into()
        })?;
        let u = mediating_morphism(&r, env).map_err(|e| e.to_string())?;
        ensure(
            u.sigma == SignatureMorphism::identity(&r.apex().signature),
            || "mediator is not the inclusion".into(),
        )?;
        ensure(r.cocone.legs.len() == 5, || "expected five legs".into())?;
        for (node, leg) in &r.cocone.legs {
            ensure(leg.sigma.then(&u.sigma) == env.legs[node].sigma, || {
                format!("{node} does not factor")
            })?;
        }

        let mut g = Gen::new(4242);
        for i in 0..100 {
            let d = g.diagram(3, false);
            let r = colimit_system(&d).map_err(|e| e.to_string())?;
            let c = g.cocone(&d, &naive_partition(&d));
            let report = check_cocone(&d, &c);
            ensure(report.is_empty(), || {
                format!("cocone {i} invalid: {report:?}")
            })?;
            match mediating_morphism(&r, &c) {
                Ok(u) => {
                    for (node, leg) in &r.cocone.legs {
                        ensure(leg.sigma.then(&u.sigma) == c.legs[node].sigma, || {
                            format!("cocone {i}: {node} does not factor")
                        })?;
                    }
                }
                Err(ColimitError::IllDefinedMediator { .. }) => {
                    return Err(format!("cocone {i}: ill-defined mediator"))
                }
                Err(e) => return Err(format!("cocone {i}: {e}")),
            }
        }
        Ok("inclusion into Environment factors all five legs; 100 random cocones mediated".into())
    });
}

#[test]
fn simulation_narrative() {
    criterion("simulation narrative", Some(Duration::from_secs(1)), || {
        let c = parse_component(
            &fs::read_to_string(fixture("hunting.compos")).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let init = literals([("h", false), ("l", false), ("a", false), ("t", true)]);
        let trace = sim::run(&c, &init, &["e1", "e2", "e3", "e4"]).map_err(|e| e.to_string())?;
        let end: Vec<(&str, bool)> = trace.last().iter().map(|(k, v)| (k.as_str(), *v)).collect();
        ensure(
            end == [("a", false), ("h", true), ("l", false), ("t", false)],
            || format!("final state {end:?}"),
        )?;
        let goal = literals([("t", false)]);
        let w = sim::reachable(&c, &init, &goal, 4).map_err(|e| e.to_string())?;
        let w = w.ok_or("no witness at bound 4")?;
        ensure(w.steps.len() == 4, || {
            format!("witness of length {}", w.steps.len())
        })?;
        let none = sim::reachable(&c, &init, &goal, 3).map_err(|e| e.to_string())?;
        ensure(none.is_none(), || "witness found at bound 3".into())?;
        Ok(format!(
            "schedule ends with t=0; witness {}",
            w.events().join(" ")
        ))
    });
}

fn round_trip(c: &Component) -> Result<(), String> {
    let once = parse_component(&emit_component(c)).map_err(|e| e.to_string())?;
    let twice = parse_component(&emit_component(&once)).map_err(|e| e.to_string())?;
    ensure(once == twice, || format!("`{}` is not a fixpoint", c.name))
}

#[test]
fn round_trip_fixpoint() {
    criterion("round trip", None, || {
        for src in [
            fixtures::HUNTING_SRC,
            fixtures::PILGRIM_SRC,
            fixtures::SHOTGUN_SRC,
            fixtures::TURKEY_SRC,
        ] {
            let parsed = parse_component(src).map_err(|e| e.to_string())?;
            round_trip(&parsed)?;
            let again = parse_component(&emit_component(&parsed)).map_err(|e| e.to_string())?;
            ensure(again == parsed, || {
                format!("`{}` changed on re-parse", parsed.name)
            })?;
        }
        let mut g = Gen::new(8);
        for i in 0..100 {
            let c = g.component(&format!("R{i}"));
            round_trip(&c)?;
            let parsed = parse_component(&emit_component(&c)).map_err(|e| e.to_string())?;
            ensure(parsed == c, || format!("random component {i} changed"))?;
        }
        Ok("4 hunting sources and 100 random components are fixpoints".into())
    });
}
