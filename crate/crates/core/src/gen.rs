//! Seeded random components, morphisms, diagrams and cocones.
//!
//! Everything produced here is valid by construction: targets are built from
//! their sources by translating and then enlarging the source presentations.
//! Names are `p0, p1, …` for variables, `a0, …` for actions and `e0, …` for events.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colimit::{Cocone, Diagram, Partition};
use crate::diagnostics::Sort;
use crate::logic::{Formula, SentenceSet};
use crate::model::{Component, ComponentMorphism, SignatureMorphism};

/// Size limits for generated components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of names per sort.
    pub names: usize,
    /// Maximum formula nesting depth.
    pub depth: usize,
    /// Maximum number of sentences in a guard or effect.
    pub sentences: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            names: 4,
            depth: 2,
            sentences: 2,
        }
    }
}

fn prefix(sort: Sort) -> &'static str {
    match sort {
        Sort::Variable => "p",
        Sort::Action => "a",
        Sort::Event => "e",
    }
}

fn names(sort: Sort, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{}{i}", prefix(sort))).collect()
}

pub struct Gen {
    rng: ChaCha8Rng,
    pub limits: Limits,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self::with_limits(seed, Limits::default())
    }

    pub fn with_limits(seed: u64, limits: Limits) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            limits,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn formula(&mut self, vars: &[String], depth: usize) -> Formula {
        let leaf = depth == 0 || self.rng.gen_bool(0.4);
        if leaf {
            if vars.is_empty() || self.rng.gen_bool(0.1) {
                return if self.rng.gen_bool(0.5) {
                    Formula::True
                } else {
                    Formula::False
                };
            }
            return Formula::var(vars.choose(&mut self.rng).unwrap().clone());
        }
        match self.rng.gen_range(0..4) {
            0 => Formula::not(self.formula(vars, depth - 1)),
            1 => Formula::and(self.formula(vars, depth - 1), self.formula(vars, depth - 1)),
            2 => Formula::or(self.formula(vars, depth - 1), self.formula(vars, depth - 1)),
            _ => Formula::implies(self.formula(vars, depth - 1), self.formula(vars, depth - 1)),
        }
    }

    pub fn sentences(&mut self, vars: &[String]) -> SentenceSet {
        let n = self.rng.gen_range(0..=self.limits.sentences);
        let depth = self.limits.depth;
        (0..n).map(|_| self.formula(vars, depth)).collect()
    }

    fn subset<T: Clone>(&mut self, items: &[T]) -> Vec<T> {
        items
            .iter()
            .filter(|_| self.rng.gen_bool(0.5))
            .cloned()
            .collect()
    }

    /// A valid component with at least one name.
    pub fn component(&mut self, name: &str) -> Component {
        let max = self.limits.names;
        let mut sizes = [0; 3];
        for s in &mut sizes {
            *s = self.rng.gen_range(0..=max);
        }
        if sizes == [0, 0, 0] {
            sizes[1] = 1;
        }
        let vars = names(Sort::Variable, sizes[0]);
        let acts = names(Sort::Action, sizes[1]);
        let mut c = Component::new(name).with_variables(vars.clone());
        for a in &acts {
            let g = self.sentences(&vars);
            let d = self.sentences(&vars);
            c.add_action(a, g, d);
        }
        for e in names(Sort::Event, sizes[2]) {
            let observed = self.subset(&acts);
            c.add_event(&e, observed);
        }
        c
    }

    /// A component together with one valid morphism into it from each of
    /// `sources` (repetitions give parallel morphisms).
    pub fn target_for(
        &mut self,
        name: &str,
        sources: &[Arc<Component>],
    ) -> (Arc<Component>, Vec<SignatureMorphism>) {
        let max = self.limits.names;
        let mut sigmas = vec![SignatureMorphism::default(); sources.len()];
        let mut target_names = BTreeMap::new();
        for sort in Sort::ALL {
            let needed = sources.iter().any(|c| !c.signature.names(sort).is_empty());
            let n = self.rng.gen_range(usize::from(needed)..=max.max(1));
            let tn = names(sort, n);
            for (src, sigma) in sources.iter().zip(&mut sigmas) {
                for x in src.signature.names(sort) {
                    let y = tn.choose(&mut self.rng).unwrap().clone();
                    sigma.map_mut(sort).insert(x.clone(), y);
                }
            }
            target_names.insert(sort, tn);
        }

        let vars = &target_names[&Sort::Variable];
        let mut t = Component::new(name).with_variables(vars.clone());
        for a in &target_names[&Sort::Action] {
            t.add_action(a, [], []);
        }
        for e in &target_names[&Sort::Event] {
            t.add_event(e, Vec::<String>::new());
        }
        for (src, sigma) in sources.iter().zip(&sigmas) {
            for a in src.actions() {
                let image = &sigma.actions[a];
                let g = src
                    .prescription(a)
                    .translate(&sigma.variables)
                    .expect("total map");
                let d = src
                    .description(a)
                    .translate(&sigma.variables)
                    .expect("total map");
                t.add_action(image, g, d);
            }
            for e in src.events() {
                let observed: Vec<String> = src
                    .observation(e)
                    .iter()
                    .map(|a| sigma.actions[a].clone())
                    .collect();
                t.add_event(&sigma.events[e], observed);
            }
        }
        for a in target_names[&Sort::Action].clone() {
            if self.rng.gen_bool(0.3) {
                let f = self.formula(vars, self.limits.depth);
                t.add_action(&a, [f], []);
            }
            if self.rng.gen_bool(0.3) {
                let f = self.formula(vars, self.limits.depth);
                t.add_action(&a, [], [f]);
            }
        }
        for e in target_names[&Sort::Event].clone() {
            if self.rng.gen_bool(0.3) {
                if let Some(a) = target_names[&Sort::Action].choose(&mut self.rng) {
                    t.add_event(&e, [a.clone()]);
                }
            }
        }
        (Arc::new(t), sigmas)
    }

    /// A valid morphism out of `source` into a fresh target.
    pub fn morphism_from(
        &mut self,
        source: Arc<Component>,
        target_name: &str,
    ) -> ComponentMorphism {
        let (t, mut sigmas) = self.target_for(target_name, std::slice::from_ref(&source));
        ComponentMorphism::new(source, t, sigmas.remove(0))
    }

    /// `len` composable valid morphisms starting at a random component.
    pub fn chain(&mut self, len: usize) -> Vec<ComponentMorphism> {
        let mut current = Arc::new(self.component("C0"));
        let mut out = Vec::with_capacity(len);
        for i in 1..=len {
            let m = self.morphism_from(current, &format!("C{i}"));
            current = m.target.clone();
            out.push(m);
        }
        out
    }

    /// A diagram of up to `max_nodes` nodes `N0, N1, …`. Later nodes are often
    /// built as common targets of earlier ones, so edges only point forwards.
    /// With `require_edge`, at least one edge is present.
    pub fn diagram(&mut self, max_nodes: usize, require_edge: bool) -> Diagram {
        let min = if require_edge { 2 } else { 1 };
        let n = self.rng.gen_range(min..=max_nodes.max(min));
        let mut d = Diagram::new("System");
        let mut nodes: Vec<(String, Arc<Component>)> = Vec::new();
        let mut edge_count = 0;
        for j in 0..n {
            let name = format!("N{j}");
            let last = j + 1 == n;
            let glue =
                j > 0 && (self.rng.gen_bool(0.7) || (require_edge && last && edge_count == 0));
            if !glue {
                let c = Arc::new(self.component(&name));
                d.add_node(&name, c.clone()).expect("fresh node name");
                nodes.push((name, c));
                continue;
            }
            let k = self.rng.gen_range(1..=2);
            let picks: Vec<usize> = (0..k).map(|_| self.rng.gen_range(0..j)).collect();
            let sources: Vec<Arc<Component>> = picks.iter().map(|&i| nodes[i].1.clone()).collect();
            let (t, sigmas) = self.target_for(&name, &sources);
            d.add_node(&name, t.clone()).expect("fresh node name");
            for (&i, sigma) in picks.iter().zip(sigmas) {
                let edge = format!("m{edge_count}");
                d.add_edge(&edge, &nodes[i].0, &name, sigma)
                    .expect("nodes exist");
                edge_count += 1;
            }
            nodes.push((name, t));
        }
        d
    }

    /// A valid cocone over `d` whose legs are constant on the classes of
    /// `partition`, into a fresh apex named `Env`.
    pub fn cocone(&mut self, d: &Diagram, partition: &Partition) -> Cocone {
        let max = self.limits.names;
        let mut legs: BTreeMap<String, SignatureMorphism> = d
            .nodes()
            .keys()
            .map(|n| (n.clone(), SignatureMorphism::default()))
            .collect();
        let mut apex_names = BTreeMap::new();
        for sort in Sort::ALL {
            let classes = partition.get(&sort).map(Vec::as_slice).unwrap_or(&[]);
            let n = if classes.is_empty() {
                self.rng.gen_range(0..=1)
            } else {
                self.rng.gen_range(1..=classes.len().max(max))
            };
            let tn = names(sort, n);
            for class in classes {
                let y = tn.choose(&mut self.rng).unwrap();
                for (node, x) in class {
                    legs.get_mut(node)
                        .expect("partition members are diagram nodes")
                        .map_mut(sort)
                        .insert(x.clone(), y.clone());
                }
            }
            apex_names.insert(sort, tn);
        }

        let vars = apex_names[&Sort::Variable].clone();
        let mut apex = Component::new("Env").with_variables(vars.clone());
        for a in &apex_names[&Sort::Action] {
            apex.add_action(a, [], []);
        }
        for e in &apex_names[&Sort::Event] {
            apex.add_event(e, Vec::<String>::new());
        }
        for (node, c) in d.nodes() {
            let sigma = &legs[node];
            for a in c.actions() {
                let g = c
                    .prescription(a)
                    .translate(&sigma.variables)
                    .expect("total map");
                let dsc = c
                    .description(a)
                    .translate(&sigma.variables)
                    .expect("total map");
                apex.add_action(&sigma.actions[a], g, dsc);
            }
            for e in c.events() {
                let observed: BTreeSet<String> = c
                    .observation(e)
                    .iter()
                    .map(|a| sigma.actions[a].clone())
                    .collect();
                apex.add_event(&sigma.events[e], observed);
            }
        }
        for a in apex_names[&Sort::Action].clone() {
            if self.rng.gen_bool(0.3) {
                let f = self.formula(&vars, self.limits.depth);
                apex.add_action(&a, [f], []);
            }
        }

        let apex = Arc::new(apex);
        let legs = legs
            .into_iter()
            .map(|(n, sigma)| {
                let m = ComponentMorphism::new(d.nodes()[&n].clone(), apex.clone(), sigma);
                (n, m)
            })
            .collect();
        Cocone { apex, legs }
    }
}
