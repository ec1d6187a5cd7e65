//! Colimits of finite sets by quotienting a disjoint union.

use std::collections::{BTreeMap, BTreeSet};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `x` and `y`. Returns false if they were already one class.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (mut rx, mut ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        if self.size[rx] < self.size[ry] {
            std::mem::swap(&mut rx, &mut ry);
        }
        self.parent[ry] = rx;
        self.size[rx] += self.size[ry];
        true
    }

    /// The classes as sorted index lists, ordered by their least member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.len() {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut classes: Vec<Vec<usize>> = by_root.into_values().collect();
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

/// A function between two nodes of a diagram of finite sets.
#[derive(Debug, Clone)]
pub struct SetEdge<N, T> {
    pub source: N,
    pub target: N,
    pub map: BTreeMap<T, T>,
}

/// One successful merge: `left` and `right` were joined because of edge `edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merge<N, T> {
    pub edge: usize,
    pub left: (N, T),
    pub right: (N, T),
}

/// Working state of a quotient: the tagged elements, the forest and the merge log.
#[derive(Debug, Clone)]
pub struct QuotientData<N, T> {
    pub elements: Vec<(N, T)>,
    index: BTreeMap<(N, T), usize>,
    forest: UnionFind,
    pub merges: Vec<Merge<N, T>>,
}

impl<N: Ord + Clone, T: Ord + Clone> QuotientData<N, T> {
    pub fn new(nodes: &BTreeMap<N, BTreeSet<T>>) -> Self {
        let elements: Vec<(N, T)> = nodes
            .iter()
            .flat_map(|(n, xs)| xs.iter().map(move |x| (n.clone(), x.clone())))
            .collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        QuotientData {
            forest: UnionFind::new(elements.len()),
            elements,
            index,
            merges: Vec::new(),
        }
    }

    pub fn index_of(&self, node: &N, x: &T) -> Option<usize> {
        self.index.get(&(node.clone(), x.clone())).copied()
    }

    /// Identifies `(source, x)` with `(target, map[x])` for every mapped `x`.
    /// Pairs whose endpoints are not elements are ignored.
    pub fn apply_edge(&mut self, edge_index: usize, edge: &SetEdge<N, T>) {
        for (x, y) in &edge.map {
            let (Some(i), Some(j)) = (
                self.index_of(&edge.source, x),
                self.index_of(&edge.target, y),
            ) else {
                continue;
            };
            if self.forest.union(i, j) {
                self.merges.push(Merge {
                    edge: edge_index,
                    left: self.elements[i].clone(),
                    right: self.elements[j].clone(),
                });
            }
        }
    }

    /// Classes of tagged elements, each sorted, ordered by least member.
    pub fn classes(&mut self) -> Vec<Vec<(N, T)>> {
        let elements = &self.elements;
        let mut classes: Vec<Vec<(N, T)>> = self
            .forest
            .classes()
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|i| elements[i].clone())
                    .collect::<Vec<_>>()
            })
            .collect();
        for c in &mut classes {
            c.sort();
        }
        classes.sort();
        classes
    }
}

/// The colimit of a diagram of finite sets.
#[derive(Debug, Clone)]
pub struct SetColimit<N, T> {
    /// The quotient set: one entry per class, sorted members.
    pub classes: Vec<Vec<(N, T)>>,
    /// Injection of each node's set into the quotient, as class indices.
    pub injections: BTreeMap<N, BTreeMap<T, usize>>,
    pub merges: Vec<Merge<N, T>>,
}

impl<N: Ord + Clone, T: Ord + Clone> SetColimit<N, T> {
    pub fn class_of(&self, node: &N, x: &T) -> Option<usize> {
        self.injections.get(node)?.get(x).copied()
    }
}

/// Quotient of the disjoint union of `nodes` by the least equivalence relating
/// `(i, x)` and `(j, f(x))` for every edge `f: i → j`.
pub fn colimit_set<N: Ord + Clone, T: Ord + Clone>(
    nodes: &BTreeMap<N, BTreeSet<T>>,
    edges: &[SetEdge<N, T>],
) -> SetColimit<N, T> {
    let mut data = QuotientData::new(nodes);
    for (i, e) in edges.iter().enumerate() {
        data.apply_edge(i, e);
    }
    let classes = data.classes();
    let mut injections: BTreeMap<N, BTreeMap<T, usize>> =
        nodes.keys().map(|n| (n.clone(), BTreeMap::new())).collect();
    for (k, class) in classes.iter().enumerate() {
        for (n, x) in class {
            injections
                .entry(n.clone())
                .or_default()
                .insert(x.clone(), k);
        }
    }
    SetColimit {
        classes,
        injections,
        merges: data.merges,
    }
}
