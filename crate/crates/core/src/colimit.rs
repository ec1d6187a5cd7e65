//! Architectural diagrams, their colimits, cocones and mediating morphisms.
//!
//! Colimits are computed sort by sort: each of the variable, action and event
//! families is quotiented as a diagram of finite sets, and the apex presentation
//! is the union of every member's guards, effects and observation sets carried
//! along the resulting injections.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::diagnostics::{Report, Sort, Violation};
use crate::model::{same_component, Component, ComponentMorphism, Signature, SignatureMorphism};
use crate::quotient::{colimit_set, Merge, SetEdge};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` refers to unknown node `{node}`")]
    UnknownNode { edge: String, node: String },
    #[error(
        "edge `{edge}`: morphism endpoints do not match nodes `{source_node}` -> `{target_node}`"
    )]
    EndpointMismatch {
        edge: String,
        source_node: String,
        target_node: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColimitError {
    #[error("invalid diagram: {}", render(.0))]
    InvalidDiagram(Report),
    #[error("partition does not cover the {sort} names exactly: {detail}")]
    InvalidPartition { sort: Sort, detail: String },
    #[error("ill-defined mediator: {sort} class `{representative}` is sent to {values:?}")]
    IllDefinedMediator {
        sort: Sort,
        representative: String,
        values: Vec<String>,
    },
    #[error("mediator does not factorize the cocone: {}", render(.0))]
    MediatorInvalid(Report),
}

fn render(report: &Report) -> String {
    report
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: String,
    pub target: String,
    pub morphism: ComponentMorphism,
}

/// Node name sets and edge maps of one sort.
pub type SetDiagram = (
    BTreeMap<String, BTreeSet<String>>,
    Vec<SetEdge<String, String>>,
);

/// A finite graph of components (nodes) and component morphisms (edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub name: String,
    nodes: BTreeMap<String, Arc<Component>>,
    edges: Vec<Edge>,
}

impl Diagram {
    pub fn new(name: impl Into<String>) -> Self {
        Diagram {
            name: name.into(),
            nodes: BTreeMap::new(),
            edges: Vec::new(),
        }
    }

    pub fn add_node(&mut self, name: &str, component: Arc<Component>) -> Result<(), DiagramError> {
        if self.nodes.contains_key(name) {
            return Err(DiagramError::DuplicateNode(name.to_string()));
        }
        self.nodes.insert(name.to_string(), component);
        Ok(())
    }

    /// Adds an edge whose morphism is built from the node components and `sigma`.
    pub fn add_edge(
        &mut self,
        name: &str,
        source: &str,
        target: &str,
        sigma: SignatureMorphism,
    ) -> Result<(), DiagramError> {
        let s = self.lookup(name, source)?;
        let t = self.lookup(name, target)?;
        self.add_edge_morphism(name, source, target, ComponentMorphism::new(s, t, sigma))
    }

    pub fn add_edge_morphism(
        &mut self,
        name: &str,
        source: &str,
        target: &str,
        morphism: ComponentMorphism,
    ) -> Result<(), DiagramError> {
        if self.edges.iter().any(|e| e.name == name) {
            return Err(DiagramError::DuplicateEdge(name.to_string()));
        }
        let s = self.lookup(name, source)?;
        let t = self.lookup(name, target)?;
        if !same_component(&s, &morphism.source) || !same_component(&t, &morphism.target) {
            return Err(DiagramError::EndpointMismatch {
                edge: name.to_string(),
                source_node: source.to_string(),
                target_node: target.to_string(),
            });
        }
        self.edges.push(Edge {
            name: name.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            morphism,
        });
        Ok(())
    }

    fn lookup(&self, edge: &str, node: &str) -> Result<Arc<Component>, DiagramError> {
        self.nodes
            .get(node)
            .cloned()
            .ok_or_else(|| DiagramError::UnknownNode {
                edge: edge.to_string(),
                node: node.to_string(),
            })
    }

    pub fn nodes(&self) -> &BTreeMap<String, Arc<Component>> {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Option<&Arc<Component>> {
        self.nodes.get(name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Every node component and every edge morphism must be valid.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        for (name, c) in &self.nodes {
            report.extend(c.validate().into_iter().map(|v| Violation::NodeInvalid {
                node: name.clone(),
                violation: Box::new(v),
            }));
        }
        for e in &self.edges {
            report.extend(
                e.morphism
                    .validate()
                    .into_iter()
                    .map(|v| Violation::EdgeInvalid {
                        edge: e.name.clone(),
                        violation: Box::new(v),
                    }),
            );
        }
        report
    }

    /// The sort-`sort` part of the diagram as a diagram of finite sets.
    pub fn set_diagram(&self, sort: Sort) -> SetDiagram {
        let nodes = self
            .nodes
            .iter()
            .map(|(n, c)| (n.clone(), c.signature.names(sort).clone()))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| SetEdge {
                source: e.source.clone(),
                target: e.target.clone(),
                map: e.morphism.sigma.map(sort).clone(),
            })
            .collect();
        (nodes, edges)
    }
}

/// An apex component with one leg per diagram node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocone {
    pub apex: Arc<Component>,
    pub legs: BTreeMap<String, ComponentMorphism>,
}

impl Cocone {
    pub fn leg(&self, node: &str) -> Option<&ComponentMorphism> {
        self.legs.get(node)
    }
}

/// One equivalence class of tagged `(node, name)` pairs and its apex name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameClass {
    pub representative: String,
    pub members: Vec<(String, String)>,
}

/// A tagged partition of each sort's disjoint union, in class order.
pub type Partition = BTreeMap<Sort, Vec<Vec<(String, String)>>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColimitResult {
    pub cocone: Cocone,
    pub classes: BTreeMap<Sort, Vec<NameClass>>,
    /// Union-find merges per sort, for diagnostics.
    pub merges: BTreeMap<Sort, Vec<Merge<String, String>>>,
}

impl ColimitResult {
    pub fn apex(&self) -> &Arc<Component> {
        &self.cocone.apex
    }

    pub fn partition(&self) -> Partition {
        self.classes
            .iter()
            .map(|(s, cs)| (*s, cs.iter().map(|c| c.members.clone()).collect()))
            .collect()
    }
}

/// Apex signature and signature-level injections of a diagram.
#[derive(Debug, Clone)]
pub struct SignatureColimit {
    pub signature: Signature,
    pub injections: BTreeMap<String, SignatureMorphism>,
    pub classes: BTreeMap<Sort, Vec<NameClass>>,
    pub merges: BTreeMap<Sort, Vec<Merge<String, String>>>,
}

/// Colimit of the signature part, one finite-set colimit per sort.
pub fn colimit_signature(d: &Diagram) -> SignatureColimit {
    let mut partition = Partition::new();
    let mut merges = BTreeMap::new();
    for sort in Sort::ALL {
        let (nodes, edges) = d.set_diagram(sort);
        let c = colimit_set(&nodes, &edges);
        partition.insert(sort, c.classes);
        merges.insert(sort, c.merges);
    }
    let mut sc = signature_from_partition(d, &partition)
        .expect("finite-set colimit yields a partition of the disjoint union");
    sc.merges = merges;
    sc
}

/// The composed system: the colimit of `d` in the category of components.
pub fn colimit_system(d: &Diagram) -> Result<ColimitResult, ColimitError> {
    let report = d.validate();
    if !report.is_empty() {
        return Err(ColimitError::InvalidDiagram(report));
    }
    let sc = colimit_signature(d);
    Ok(assemble_signature(d, sc))
}

/// Builds the cocone induced by an arbitrary partition of the diagram's names.
///
/// For the partition computed by [`colimit_system`] this is the colimit; any
/// other partition gives a candidate that is generally not one, which is how
/// tests obtain corrupted colimits.
pub fn assemble(d: &Diagram, partition: &Partition) -> Result<ColimitResult, ColimitError> {
    let sc = signature_from_partition(d, partition)?;
    Ok(assemble_signature(d, sc))
}

fn signature_from_partition(
    d: &Diagram,
    partition: &Partition,
) -> Result<SignatureColimit, ColimitError> {
    for sort in Sort::ALL {
        let expected: BTreeSet<(String, String)> = d
            .nodes
            .iter()
            .flat_map(|(n, c)| {
                c.signature
                    .names(sort)
                    .iter()
                    .map(move |x| (n.clone(), x.clone()))
            })
            .collect();
        let classes = partition.get(&sort).map(Vec::as_slice).unwrap_or(&[]);
        let mut seen = BTreeSet::new();
        for class in classes {
            if class.is_empty() {
                return Err(ColimitError::InvalidPartition {
                    sort,
                    detail: "empty class".into(),
                });
            }
            for m in class {
                if !expected.contains(m) || !seen.insert(m.clone()) {
                    return Err(ColimitError::InvalidPartition {
                        sort,
                        detail: format!("unexpected or repeated member {}.{}", m.0, m.1),
                    });
                }
            }
        }
        if seen.len() != expected.len() {
            return Err(ColimitError::InvalidPartition {
                sort,
                detail: "some names belong to no class".into(),
            });
        }
    }

    let names = representative_names(partition);
    let mut signature = Signature::default();
    let mut injections: BTreeMap<String, SignatureMorphism> = d
        .nodes
        .keys()
        .map(|n| (n.clone(), SignatureMorphism::default()))
        .collect();
    let mut classes = BTreeMap::new();
    for sort in Sort::ALL {
        let mut named = Vec::new();
        for (k, members) in partition[&sort].iter().enumerate() {
            let rep = names[&(sort, k)].clone();
            signature.names_mut(sort).insert(rep.clone());
            for (node, x) in members {
                injections
                    .get_mut(node)
                    .expect("member node exists")
                    .map_mut(sort)
                    .insert(x.clone(), rep.clone());
            }
            named.push(NameClass {
                representative: rep,
                members: members.clone(),
            });
        }
        classes.insert(sort, named);
    }
    Ok(SignatureColimit {
        signature,
        injections,
        classes,
        merges: BTreeMap::new(),
    })
}

/// Names each class by the local name of its least `(node, name)` member.
///
/// Clashes (within a sort or across sorts) are resolved by appending the node
/// name, then a sort tag, then a counter, so that apex names stay pairwise
/// distinct for every input.
fn representative_names(partition: &Partition) -> BTreeMap<(Sort, usize), String> {
    let mut least: Vec<((Sort, usize), (String, String))> = Vec::new();
    for (sort, classes) in partition {
        for (k, c) in classes.iter().enumerate() {
            let min = c.iter().min().expect("classes are nonempty").clone();
            least.push(((*sort, k), min));
        }
    }

    type Naming<'a> = &'a dyn Fn(Sort, &(String, String)) -> String;
    let candidates: [Naming; 3] = [
        &|_, (_, x)| x.clone(),
        &|_, (n, x)| format!("{x}_{n}"),
        &|s, (n, x)| format!("{x}_{n}_{}", s.tag()),
    ];

    let mut assigned: BTreeMap<(Sort, usize), String> = BTreeMap::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut pending = least;
    for make in candidates {
        let mut count: BTreeMap<String, usize> = BTreeMap::new();
        for (key, m) in &pending {
            *count.entry(make(key.0, m)).or_default() += 1;
        }
        let mut rest = Vec::new();
        for (key, m) in pending {
            let name = make(key.0, &m);
            if count[&name] == 1 && !taken.contains(&name) {
                taken.insert(name.clone());
                assigned.insert(key, name);
            } else {
                rest.push((key, m));
            }
        }
        pending = rest;
    }
    for (key, m) in pending {
        let base = format!("{}_{}_{}", m.1, m.0, key.0.tag());
        let name = (2..)
            .map(|i| format!("{base}_{i}"))
            .find(|c| !taken.contains(c))
            .expect("unbounded counter");
        taken.insert(name.clone());
        assigned.insert(key, name);
    }
    assigned
}

fn assemble_signature(d: &Diagram, sc: SignatureColimit) -> ColimitResult {
    let mut apex = Component::new(d.name.clone());
    apex.signature = sc.signature.clone();
    for a in &apex.signature.actions {
        apex.presentation
            .prescription
            .insert(a.clone(), Default::default());
        apex.presentation
            .description
            .insert(a.clone(), Default::default());
    }
    for e in &apex.signature.events {
        apex.presentation
            .observation
            .insert(e.clone(), Default::default());
    }

    for (node, c) in &d.nodes {
        let inj = &sc.injections[node];
        for a in c.actions() {
            let image = &inj.actions[a];
            let p = c
                .prescription(a)
                .translate(&inj.variables)
                .expect("injections are total");
            let dsc = c
                .description(a)
                .translate(&inj.variables)
                .expect("injections are total");
            apex.presentation
                .prescription
                .get_mut(image)
                .unwrap()
                .extend(&p);
            apex.presentation
                .description
                .get_mut(image)
                .unwrap()
                .extend(&dsc);
        }
        for e in c.events() {
            let image = &inj.events[e];
            let observed = apex.presentation.observation.get_mut(image).unwrap();
            observed.extend(
                c.observation(e)
                    .iter()
                    .filter_map(|a| inj.actions.get(a).cloned()),
            );
        }
    }

    let apex = Arc::new(apex);
    let legs = d
        .nodes
        .iter()
        .map(|(n, c)| {
            (
                n.clone(),
                ComponentMorphism::new(c.clone(), apex.clone(), sc.injections[n].clone()),
            )
        })
        .collect();
    ColimitResult {
        cocone: Cocone { apex, legs },
        classes: sc.classes,
        merges: sc.merges,
    }
}

/// Checks that `c` is a cocone over `d`: one valid leg per node, and every edge
/// commutes with the legs on all three sorts.
pub fn check_cocone(d: &Diagram, c: &Cocone) -> Report {
    let mut report = Report::new();
    for node in d.nodes.keys() {
        if !c.legs.contains_key(node) {
            report.push(Violation::LegMissing { node: node.clone() });
        }
    }
    for (node, leg) in &c.legs {
        let Some(comp) = d.nodes.get(node) else {
            report.push(Violation::LegUnexpected { node: node.clone() });
            continue;
        };
        if !same_component(comp, &leg.source) {
            report.push(Violation::LegInvalid {
                node: node.clone(),
                violation: Box::new(Violation::EndpointMismatch {
                    edge: format!("leg {node}"),
                    detail: format!("source is `{}`, not the node component", leg.source.name),
                }),
            });
        }
        if !same_component(&c.apex, &leg.target) {
            report.push(Violation::LegInvalid {
                node: node.clone(),
                violation: Box::new(Violation::EndpointMismatch {
                    edge: format!("leg {node}"),
                    detail: format!("target is `{}`, not the apex", leg.target.name),
                }),
            });
        }
        report.extend(leg.validate().into_iter().map(|v| Violation::LegInvalid {
            node: node.clone(),
            violation: Box::new(v),
        }));
    }

    for e in &d.edges {
        let (Some(li), Some(lj)) = (c.legs.get(&e.source), c.legs.get(&e.target)) else {
            continue;
        };
        for sort in Sort::ALL {
            for x in e.morphism.source.signature.names(sort) {
                let direct = li.apply(sort, x);
                let via = e.morphism.apply(sort, x).and_then(|y| lj.apply(sort, y));
                if let (Some(direct), Some(via)) = (direct, via) {
                    if direct != via {
                        report.push(Violation::CommutationFailure {
                            edge: e.name.clone(),
                            sort,
                            name: x.clone(),
                            via_edge: via.to_string(),
                            direct: direct.to_string(),
                        });
                    }
                }
            }
        }
    }
    report
}

/// The unique `u: apex(r) → apex(c)` with `leg_r(i) ; u = leg_c(i)` for every node.
///
/// Each class representative is sent wherever `c` sends its members; the
/// members must agree, which holds whenever `c` commutes with the diagram.
pub fn mediating_morphism(
    r: &ColimitResult,
    c: &Cocone,
) -> Result<ComponentMorphism, ColimitError> {
    let mut sigma = SignatureMorphism::default();
    for (sort, classes) in &r.classes {
        for class in classes {
            let values: BTreeSet<String> = class
                .members
                .iter()
                .map(|(node, x)| {
                    c.legs
                        .get(node)
                        .and_then(|leg| leg.apply(*sort, x))
                        .map(str::to_string)
                        .unwrap_or_else(|| format!("<{node}.{x} unmapped>"))
                })
                .collect();
            if values.len() != 1 {
                return Err(ColimitError::IllDefinedMediator {
                    sort: *sort,
                    representative: class.representative.clone(),
                    values: values.into_iter().collect(),
                });
            }
            let v = values.into_iter().next().unwrap();
            sigma.map_mut(*sort).insert(class.representative.clone(), v);
        }
    }
    let u = ComponentMorphism::new(r.cocone.apex.clone(), c.apex.clone(), sigma);

    let mut report = u.validate();
    for (node, leg_r) in &r.cocone.legs {
        let factored = leg_r.sigma.then(&u.sigma);
        match c.legs.get(node) {
            Some(leg_c) if leg_c.sigma == factored => {}
            _ => report.push(Violation::LegInvalid {
                node: node.clone(),
                violation: Box::new(Violation::EndpointMismatch {
                    edge: format!("leg {node}"),
                    detail: "does not factor through the mediator".into(),
                }),
            }),
        }
    }
    if report.is_empty() {
        Ok(u)
    } else {
        Err(ColimitError::MediatorInvalid(report))
    }
}
