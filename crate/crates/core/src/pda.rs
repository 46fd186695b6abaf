//! Pushdown automata (no `down`/`up` edges) and the tree quotient of their
//! configuration graphs.
//!
//! Two configurations `(p, T)`, `(q, T)` with the same tree are equivalent when
//! an undirected path in the explored graph joins them and every tree along
//! the path extends `T`. Collapsing the classes gives a simple graph which,
//! for a pushdown automaton, has no cycles.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::config_graph::ConfigGraph;
use crate::memory_tree::{MemoryTree, StackOp};
use crate::nsa::Machine;

#[derive(Error, Clone, Debug, PartialEq, Eq)]
pub enum PdaError {
    #[error("edge {edge} uses `{op}`; a pushdown automaton has no down or up moves")]
    NotPushdown { edge: usize, op: StackOp },
}

pub fn is_pushdown(m: &Machine) -> bool {
    first_pointer_move(m).is_none()
}

fn first_pointer_move(m: &Machine) -> Option<usize> {
    m.edges()
        .iter()
        .position(|e| matches!(e.op, StackOp::Down(_) | StackOp::Up(_)))
}

/// Equivalence classes of explored configurations. Classes are numbered by
/// their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn from_labels(labels: &[usize]) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = Vec::with_capacity(labels.len());
        for (v, &l) in labels.iter().enumerate() {
            let c = *renumber.entry(l).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(v);
            class_of.push(c);
        }
        Partition { class_of, classes }
    }
}

pub fn nonerasing_classes(cg: &ConfigGraph, m: &Machine) -> Result<Partition, PdaError> {
    if let Some(i) = first_pointer_move(m) {
        return Err(PdaError::NotPushdown {
            edge: i,
            op: m.edge(i).op.clone(),
        });
    }
    Ok(nonerasing_classes_unchecked(cg))
}

/// The same construction without the pushdown check, for contrasting
/// machines that move the pointer.
pub fn nonerasing_classes_unchecked(cg: &ConfigGraph) -> Partition {
    let n = cg.vertex_count();
    let adj = cg.undirected_adjacency();
    let mut by_tree: HashMap<&MemoryTree, Vec<usize>> = HashMap::new();
    for v in 0..n {
        by_tree.entry(&cg.vertex(v).tree).or_default().push(v);
    }
    let mut uf = UnionFind::<usize>::new(n);
    let mut groups: Vec<(&MemoryTree, Vec<usize>)> =
        by_tree.into_iter().filter(|(_, vs)| vs.len() > 1).collect();
    groups.sort_by_key(|(_, vs)| vs[0]);
    for (t, members) in groups {
        let mut seen: HashMap<usize, ()> = HashMap::new();
        for &s in &members {
            if seen.contains_key(&s) {
                continue;
            }
            seen.insert(s, ());
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if cg.vertex(u).tree == *t {
                    uf.union(s, u);
                }
                for &w in &adj[u] {
                    if !seen.contains_key(&w) && cg.vertex(w).tree.extends(t) {
                        seen.insert(w, ());
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    Partition::from_labels(&uf.into_labeling())
}

/// Simple undirected graph on classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    pub partition: Partition,
    /// `(a, b)` with `a < b`, sorted
    pub edges: Vec<(usize, usize)>,
    /// largest undirected explored-graph distance between members, per class
    pub class_diameter: Vec<usize>,
}

impl QuotientGraph {
    pub fn vertex_count(&self) -> usize {
        self.partition.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if d[v] == usize::MAX {
                d[v] = d[u] + 1;
                queue.push_back(v);
            }
        }
    }
    d
}

pub fn quotient(cg: &ConfigGraph, classes: &Partition) -> QuotientGraph {
    let mut edges = BTreeSet::new();
    for e in cg.edges() {
        let (a, b) = (classes.class_of(e.src), classes.class_of(e.dst));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let adj = cg.undirected_adjacency();
    let class_diameter = classes
        .classes()
        .iter()
        .map(|members| {
            if members.len() < 2 {
                return 0;
            }
            members
                .iter()
                .map(|&s| {
                    let d = bfs(&adj, s);
                    members.iter().map(|&t| d[t]).max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
        .collect();
    QuotientGraph {
        partition: classes.clone(),
        edges: edges.into_iter().collect(),
        class_diameter,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeCheck {
    Tree,
    /// classes along a simple cycle, first class not repeated
    Cycle(Vec<usize>),
}

/// Acyclicity of the quotient as a simple undirected graph.
pub fn check_tree(q: &QuotientGraph) -> TreeCheck {
    let n = q.vertex_count();
    let mut uf = UnionFind::<usize>::new(n);
    let mut forest = vec![Vec::new(); n];
    for &(a, b) in &q.edges {
        if uf.union(a, b) {
            forest[a].push(b);
            forest[b].push(a);
            continue;
        }
        // a and b already joined: the forest path plus this edge is a cycle
        let mut prev = vec![usize::MAX; n];
        prev[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &v in &forest[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut cycle = vec![b];
        let mut v = b;
        while v != a {
            v = prev[v];
            cycle.push(v);
        }
        return TreeCheck::Cycle(cycle);
    }
    TreeCheck::Tree
}

/// Largest class diameter: how far the quotient map can shrink distances.
pub fn quotient_distortion(q: &QuotientGraph) -> usize {
    q.class_diameter.iter().copied().max().unwrap_or(0)
}

/// The longest fundamental cycle of a breadth-first spanning forest of the
/// explored graph (undirected, loops and parallel edges dropped), if it has
/// at least `min_len` vertices. Fundamental cycles are simple.
pub fn longest_simple_cycle(cg: &ConfigGraph, min_len: usize) -> Option<Vec<usize>> {
    let adj = cg.undirected_adjacency();
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for root in 0..n {
        if parent[root] != usize::MAX {
            continue;
        }
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut best: Option<Vec<usize>> = None;
    for u in 0..n {
        for &v in &adj[u] {
            if u > v || parent[u] == v || parent[v] == u {
                continue;
            }
            let (mut a, mut b) = (u, v);
            let (mut left, mut right) = (vec![a], vec![b]);
            while a != b {
                if depth[a] >= depth[b] {
                    a = parent[a];
                    left.push(a);
                } else {
                    b = parent[b];
                    right.push(b);
                }
            }
            right.pop();
            right.reverse();
            left.extend(right);
            if left.len() >= min_len && best.as_ref().is_none_or(|c| left.len() > c.len()) {
                best = Some(left);
            }
        }
    }
    best
}

/// DOT rendering of the quotient; each class is labeled by its members' names.
pub fn export_quotient_dot(q: &QuotientGraph, cg: &ConfigGraph, m: &Machine) -> String {
    let mut s = String::from("graph quotient {\n");
    for (c, members) in q.partition.classes().iter().enumerate() {
        let names: Vec<String> = members.iter().map(|&v| cg.vertex(v).name(m)).collect();
        let _ = writeln!(s, "  c{c} [label=\"{}\"];", names.join(", ").replace('"', "\\\""));
    }
    for &(a, b) in &q.edges {
        let _ = writeln!(s, "  c{a} -- c{b};");
    }
    s.push_str("}\n");
    s
}
