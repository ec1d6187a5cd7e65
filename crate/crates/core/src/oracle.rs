//! Brute-force reference computations used to test the colimit engine.
//!
//! [`naive_partition`] recomputes the name quotient as a reflexive, symmetric and
//! transitive closure over an explicit relation matrix. [`verify_universal_property`]
//! checks, by enumeration, that a candidate colimit admits exactly one mediating
//! morphism into every small cocone.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::colimit::{check_cocone, ColimitResult, Diagram, Partition};
use crate::diagnostics::Sort;
use crate::model::{Component, ComponentMorphism, SignatureMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("node `{node}` has {size} {sort} names, more than the bound {bound}")]
    BoundExceeded {
        node: String,
        sort: Sort,
        size: usize,
        bound: usize,
    },
}

fn tagged(d: &Diagram, sort: Sort) -> Vec<(String, String)> {
    d.nodes()
        .iter()
        .flat_map(|(n, c)| {
            c.signature
                .names(sort)
                .iter()
                .map(move |x| (n.clone(), x.clone()))
        })
        .collect()
}

/// Sorts members within classes and classes among themselves.
pub fn normalize(p: &Partition) -> Partition {
    p.iter()
        .map(|(sort, classes)| {
            let mut cs: Vec<Vec<(String, String)>> = classes
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.sort();
                    c
                })
                .collect();
            cs.sort();
            (*sort, cs)
        })
        .collect()
}

/// The quotient of each sort's disjoint union by the closure of the edge
/// identifications, computed with Warshall's algorithm.
pub fn naive_partition(d: &Diagram) -> Partition {
    let mut out = Partition::new();
    for sort in Sort::ALL {
        let elems = tagged(d, sort);
        let n = elems.len();
        let index: BTreeMap<&(String, String), usize> =
            elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for e in d.edges() {
            for (x, y) in e.morphism.sigma.map(sort) {
                let i = index[&(e.source.clone(), x.clone())];
                let j = index[&(e.target.clone(), y.clone())];
                rel[i][j] = true;
                rel[j][i] = true;
            }
        }
        for k in 0..n {
            let through = rel[k].clone();
            for row in rel.iter_mut().filter(|row| row[k]) {
                for (cell, &via) in row.iter_mut().zip(&through) {
                    *cell |= via;
                }
            }
        }
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let class: Vec<(String, String)> = (0..n)
                .filter(|&j| rel[i][j])
                .map(|j| {
                    seen[j] = true;
                    elems[j].clone()
                })
                .collect();
            classes.push(class);
        }
        out.insert(sort, classes);
    }
    normalize(&out)
}

/// Splits the least member off the first class with two or more members, giving
/// a partition that merges one class too few. `None` if every class is a singleton.
pub fn under_merge(p: &Partition) -> Option<Partition> {
    let mut p = normalize(p);
    for classes in p.values_mut() {
        if let Some(k) = classes.iter().position(|c| c.len() > 1) {
            let first = classes[k].remove(0);
            classes.push(vec![first]);
            return Some(p);
        }
    }
    None
}

/// Number of signature maps `u` out of `apex` with `leg(x) ; u = f(x)` for every
/// tagged name `x`, where the target has `k` names.
fn count_mediators(
    apex_names: &BTreeSet<String>,
    legs: &[(usize, String)],
    f: &[usize],
    k: usize,
) -> u128 {
    let mut forced: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, image) in legs {
        match forced.insert(image, f[*i]) {
            Some(prev) if prev != f[*i] => return 0,
            _ => {}
        }
    }
    let free = apex_names
        .iter()
        .filter(|a| !forced.contains_key(a.as_str()))
        .count();
    (k as u128).pow(free as u32)
}

/// The cocone over `r`'s own legs whose apex carries exactly the translated node
/// presentations, and nothing else.
fn tight_apex(d: &Diagram, r: &ColimitResult) -> Arc<Component> {
    let sig = &r.apex().signature;
    let mut apex = Component::new(r.apex().name.clone()).with_variables(sig.variables.clone());
    for a in &sig.actions {
        apex.add_action(a, [], []);
    }
    for e in &sig.events {
        apex.add_event(e, Vec::<String>::new());
    }
    for (node, c) in d.nodes() {
        let Some(leg) = r.cocone.legs.get(node) else {
            continue;
        };
        let sigma = &leg.sigma;
        for a in c.actions() {
            let (Some(image), Ok(g), Ok(dsc)) = (
                sigma.actions.get(a),
                c.prescription(a).translate(&sigma.variables),
                c.description(a).translate(&sigma.variables),
            ) else {
                continue;
            };
            apex.add_action(image, g, dsc);
        }
        for e in c.events() {
            let Some(image) = sigma.events.get(e) else {
                continue;
            };
            let observed: Vec<String> = c
                .observation(e)
                .iter()
                .filter_map(|a| sigma.actions.get(a).cloned())
                .collect();
            apex.add_event(image, observed);
        }
    }
    Arc::new(apex)
}

/// Explains why `r` is not a colimit of `d`, checking every cocone into apexes of
/// up to two names per sort. `Ok(None)` means no counterexample was found.
pub fn universal_property_counterexample(
    r: &ColimitResult,
    d: &Diagram,
    bound: usize,
) -> Result<Option<String>, OracleError> {
    for (node, c) in d.nodes() {
        for sort in Sort::ALL {
            let size = c.signature.names(sort).len();
            if size > bound {
                return Err(OracleError::BoundExceeded {
                    node: node.clone(),
                    sort,
                    size,
                    bound,
                });
            }
        }
    }

    let report = check_cocone(d, &r.cocone);
    if let Some(v) = report.first() {
        return Ok(Some(format!(
            "candidate is not a cocone: [{}] {v}",
            v.code()
        )));
    }
    let report = r.apex().validate();
    if let Some(v) = report.first() {
        return Ok(Some(format!(
            "candidate apex is invalid: [{}] {v}",
            v.code()
        )));
    }

    // Presentation level: the apex may hold only what the legs force on it.
    let tight = tight_apex(d, r);
    let u = ComponentMorphism::new(
        r.apex().clone(),
        tight,
        SignatureMorphism::identity(&r.apex().signature),
    );
    if let Some(v) = u.validate().first() {
        return Ok(Some(format!(
            "no mediator into the cocone with the least apex presentation: [{}] {v}",
            v.code()
        )));
    }

    // Signature level, sort by sort: every edge-respecting map of the disjoint
    // union into k names must factor uniquely through the candidate's legs.
    for sort in Sort::ALL {
        let elems = tagged(d, sort);
        let index: BTreeMap<&(String, String), usize> =
            elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut constraints = Vec::new();
        for e in d.edges() {
            for (x, y) in e.morphism.sigma.map(sort) {
                constraints.push((
                    index[&(e.source.clone(), x.clone())],
                    index[&(e.target.clone(), y.clone())],
                ));
            }
        }
        let legs: Vec<(usize, String)> = elems
            .iter()
            .enumerate()
            .map(|(i, (node, x))| {
                let image = r.cocone.legs[node]
                    .apply(sort, x)
                    .expect("legs are total")
                    .to_string();
                (i, image)
            })
            .collect();
        let apex_names = r.apex().signature.names(sort);

        for k in 1..=2usize {
            let n = elems.len();
            let total = k.checked_pow(n as u32).expect("bounded diagram");
            let mut f = vec![0usize; n];
            for code in 0..total {
                let mut c = code;
                for slot in f.iter_mut() {
                    *slot = c % k;
                    c /= k;
                }
                if constraints.iter().any(|&(i, j)| f[i] != f[j]) {
                    continue;
                }
                let count = count_mediators(apex_names, &legs, &f, k);
                if count != 1 {
                    let shown: Vec<String> = elems
                        .iter()
                        .zip(&f)
                        .map(|((node, x), v)| format!("{node}.{x}->{v}"))
                        .collect();
                    return Ok(Some(format!(
                        "{count} mediators for the {sort} cocone into {k} names given by {}",
                        shown.join(" ")
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// Whether `r` behaves as a colimit of `d` against every cocone into apexes with
/// at most two names per sort. Node name sets must not exceed `bound` per sort.
pub fn verify_universal_property(
    r: &ColimitResult,
    d: &Diagram,
    bound: usize,
) -> Result<bool, OracleError> {
    Ok(universal_property_counterexample(r, d, bound)?.is_none())
}
