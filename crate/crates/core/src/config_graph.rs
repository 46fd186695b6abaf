//! Bounded configuration graphs.
//!
//! Configuration graphs are infinite in general, so every graph here is the
//! part reachable from the initial configuration inside a [`Horizon`], and
//! every flag it carries (co-accessibility in particular) is relative to that
//! horizon.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::group::{Element, GroupError, GroupOracle};
use crate::nsa::{step, CapExceeded, CapKind, Configuration, Letter, Machine, Word};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Horizon {
    pub max_tree_edges: usize,
    pub max_vertices: usize,
    pub max_depth: usize,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon {
            max_tree_edges: 8,
            max_vertices: 100_000,
            max_depth: usize::MAX,
        }
    }
}

impl Horizon {
    pub fn tree_edges(max_tree_edges: usize) -> Self {
        Horizon {
            max_tree_edges,
            ..Horizon::default()
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CgEdge {
    pub src: usize,
    pub dst: usize,
    pub input: Option<Letter>,
    /// index of the machine edge this mirrors
    pub machine_edge: usize,
}

/// The configuration graph explored breadth-first from `(q₀, T₀)`.
#[derive(Clone, Debug)]
pub struct ConfigGraph {
    horizon: Horizon,
    vertices: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    depth: Vec<usize>,
    discovered_by: Vec<Option<usize>>,
    edges: Vec<CgEdge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    coaccessible: Vec<bool>,
    truncated: bool,
}

impl ConfigGraph {
    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    /// Whether some edge or vertex was left out because of the horizon.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Configuration] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Configuration {
        &self.vertices[v]
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn edges(&self) -> &[CgEdge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    /// BFS depth from the initial vertex.
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Can reach an accepting configuration inside the explored graph.
    pub fn is_coaccessible(&self, v: usize) -> bool {
        self.coaccessible[v]
    }

    /// Edge indices of the breadth-first discovery path to `v`.
    pub fn discovery_path(&self, mut v: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some(e) = self.discovered_by[v] {
            path.push(e);
            v = self.edges[e].src;
        }
        path.reverse();
        path
    }

    pub fn path_label(&self, path: &[usize]) -> Word {
        path.iter()
            .filter_map(|&e| self.edges[e].input.clone())
            .collect()
    }

    /// Edges between the same pair of vertices, ignoring direction and
    /// labels; loops dropped. Sorted.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            if e.src != e.dst {
                adj[e.src].push(e.dst);
                adj[e.dst].push(e.src);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

/// Explores the configuration graph of `m` breadth-first inside `horizon`.
pub fn build(m: &Machine, horizon: Horizon) -> ConfigGraph {
    let init = Configuration::initial(m);
    let mut g = ConfigGraph {
        horizon,
        vertices: vec![init.clone()],
        index: HashMap::from([(init, 0)]),
        depth: vec![0],
        discovered_by: vec![None],
        edges: Vec::new(),
        out: vec![Vec::new()],
        inc: vec![Vec::new()],
        coaccessible: Vec::new(),
        truncated: false,
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let c = g.vertices[v].clone();
        for &i in m.out_edges(c.state) {
            let e = m.edge(i);
            let Some(tree) = c.tree.apply(&e.op) else { continue };
            if tree.edge_count() > horizon.max_tree_edges {
                g.truncated = true;
                continue;
            }
            let next = Configuration { state: e.dst, tree };
            let dst = match g.index.get(&next) {
                Some(&d) => d,
                None => {
                    if g.vertices.len() >= horizon.max_vertices || g.depth[v] >= horizon.max_depth {
                        g.truncated = true;
                        continue;
                    }
                    let d = g.vertices.len();
                    g.index.insert(next.clone(), d);
                    g.vertices.push(next);
                    g.depth.push(g.depth[v] + 1);
                    g.discovered_by.push(Some(g.edges.len()));
                    g.out.push(Vec::new());
                    g.inc.push(Vec::new());
                    queue.push_back(d);
                    d
                }
            };
            let id = g.edges.len();
            g.edges.push(CgEdge {
                src: v,
                dst,
                input: e.input.clone(),
                machine_edge: i,
            });
            g.out[v].push(id);
            g.inc[dst].push(id);
        }
    }
    let mut co = vec![false; g.vertex_count()];
    let mut stack: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.vertices[v].is_accepting(m))
        .collect();
    for &v in &stack {
        co[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &e in &g.inc[v] {
            let u = g.edges[e].src;
            if !co[u] {
                co[u] = true;
                stack.push(u);
            }
        }
    }
    g.coaccessible = co;
    g
}

#[derive(Error, Clone, Debug, PartialEq, Eq)]
pub enum DegreeViolation {
    #[error("vertex {vertex} has an ε outedge and {others} other outedges")]
    EpsilonNotAlone { vertex: usize, others: usize },
    #[error("vertex {vertex} has {count} outedges labeled {letter}")]
    RepeatedLetter {
        vertex: usize,
        letter: Letter,
        count: usize,
    },
}

/// Every vertex has either a single ε outedge and nothing else, or at most
/// one outedge per letter. Holds for deterministic machines.
pub fn check_degrees(cg: &ConfigGraph) -> Result<(), DegreeViolation> {
    for v in 0..cg.vertex_count() {
        let out = cg.out_edges(v);
        let eps = out.iter().filter(|&&e| cg.edges[e].input.is_none()).count();
        if eps > 0 && out.len() > 1 {
            return Err(DegreeViolation::EpsilonNotAlone {
                vertex: v,
                others: out.len() - 1,
            });
        }
        let mut seen: HashMap<&Letter, usize> = HashMap::new();
        for &e in out {
            if let Some(a) = &cg.edges[e].input {
                *seen.entry(a).or_default() += 1;
            }
        }
        let mut repeated: Vec<_> = seen.into_iter().filter(|&(_, n)| n > 1).collect();
        repeated.sort();
        if let Some((a, n)) = repeated.first() {
            return Err(DegreeViolation::RepeatedLetter {
                vertex: v,
                letter: (*a).clone(),
                count: *n,
            });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsRun {
    Finite(usize),
    /// an ε-cycle exists among the explored vertices
    UnboundedWithinHorizon,
}

/// Length of the longest directed path of ε edges in the explored graph.
pub fn max_eps_run(cg: &ConfigGraph) -> EpsRun {
    let n = cg.vertex_count();
    let eps: Vec<&CgEdge> = cg.edges.iter().filter(|e| e.input.is_none()).collect();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for e in &eps {
        indeg[e.dst] += 1;
        succ[e.src].push(e.dst);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut longest = vec![0usize; n];
    let mut done = 0;
    while let Some(v) = queue.pop_front() {
        done += 1;
        for &w in &succ[v] {
            longest[w] = longest[w].max(longest[v] + 1);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if done < n {
        EpsRun::UnboundedWithinHorizon
    } else {
        EpsRun::Finite(longest.into_iter().max().unwrap_or(0))
    }
}

/// Images of explored configurations in a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupProjection {
    pub images: Vec<Element>,
    pub edges_checked: usize,
}

#[derive(Error, Clone, Debug, PartialEq, Eq)]
pub enum ProjectionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(
        "projection is not well defined at vertex {vertex}: paths labeled `{first}` and `{second}` \
         reach it but differ in the group ({inconsistent_edges} inconsistent edges)"
    )]
    WellDefinedness {
        vertex: usize,
        first: String,
        second: String,
        inconsistent_edges: usize,
    },
}

fn gens<O: GroupOracle>(oracle: &O, w: &[Letter]) -> Result<Vec<usize>, GroupError> {
    w.iter()
        .map(|l| {
            oracle
                .gen_index(l.as_str())
                .ok_or_else(|| GroupError::UnknownLetter(l.to_string()))
        })
        .collect()
}

/// Sends each vertex to the group element of its discovery-path label, then
/// checks that every explored edge `u -a-> v` satisfies `φ(v) = φ(u)·a`
/// (ε edges must be loops in the group).
pub fn project<O: GroupOracle>(
    cg: &ConfigGraph,
    oracle: &O,
) -> Result<GroupProjection, ProjectionError> {
    let mut images = Vec::with_capacity(cg.vertex_count());
    for v in 0..cg.vertex_count() {
        let label = cg.path_label(&cg.discovery_path(v));
        images.push(oracle.element(&gens(oracle, &label)?));
    }
    let mut bad: Vec<usize> = Vec::new();
    for (i, e) in cg.edges.iter().enumerate() {
        let expected = match &e.input {
            None => images[e.src].clone(),
            Some(a) => oracle.mul_gen(&images[e.src], gens(oracle, std::slice::from_ref(a))?[0]),
        };
        if expected != images[e.dst] {
            bad.push(i);
        }
    }
    if let Some(&i) = bad.first() {
        let e = &cg.edges[i];
        let mut first = cg.discovery_path(e.src);
        first.push(i);
        let second = cg.discovery_path(e.dst);
        let show = |p: &[usize]| crate::nsa::word_to_string(&cg.path_label(p));
        return Err(ProjectionError::WellDefinedness {
            vertex: e.dst,
            first: show(&first),
            second: show(&second),
            inconsistent_edges: bad.len(),
        });
    }
    Ok(GroupProjection {
        images,
        edges_checked: cg.edges.len(),
    })
}

#[derive(Error, Clone, Debug, PartialEq, Eq)]
pub enum LiftError {
    #[error("no continuation reads the letter at position {0}")]
    Stuck(usize),
    #[error("more than one edge applies at position {position}")]
    Nondeterministic { position: usize },
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// One step of a lifted path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftStep {
    pub edge: usize,
    pub input: Option<Letter>,
    pub config: Configuration,
}

/// The unique path from `(q₀, T₀)` whose input labels spell `w`, for a
/// deterministic machine. Forced ε moves are taken only while another letter
/// remains to be read, so the path stops before any trailing ε segment.
pub fn lift_path(m: &Machine, w: &[Letter], max_eps: usize) -> Result<Vec<LiftStep>, LiftError> {
    let mut cur = Configuration::initial(m);
    let mut path = Vec::new();
    for (pos, a) in w.iter().enumerate() {
        let mut eps_run = 0;
        loop {
            let on_letter = step(m, cur.state, &cur.tree, Some(a));
            let on_eps = step(m, cur.state, &cur.tree, None);
            if on_letter.len() + on_eps.len() > 1 {
                return Err(LiftError::Nondeterministic { position: pos });
            }
            if let Some(s) = on_letter.into_iter().next() {
                path.push(LiftStep {
                    edge: s.edge,
                    input: Some(a.clone()),
                    config: s.config.clone(),
                });
                cur = s.config;
                break;
            }
            let Some(s) = on_eps.into_iter().next() else {
                return Err(LiftError::Stuck(pos));
            };
            eps_run += 1;
            if eps_run > max_eps {
                return Err(LiftError::Cap(CapExceeded(CapKind::Steps)));
            }
            path.push(LiftStep {
                edge: s.edge,
                input: None,
                config: s.config.clone(),
            });
            cur = s.config;
        }
    }
    Ok(path)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering with vertices named as in [`Configuration::name`].
/// Accepting vertices are double circles; the initial vertex is bold.
pub fn export_dot(cg: &ConfigGraph, m: &Machine) -> String {
    let mut s = String::from("digraph cg {\n  rankdir=LR;\n");
    for (v, c) in cg.vertices.iter().enumerate() {
        let mut attrs = vec![format!("label=\"{}\"", dot_escape(&c.name(m)))];
        if c.is_accepting(m) {
            attrs.push("shape=doublecircle".into());
        }
        if v == cg.initial() {
            attrs.push("style=bold".into());
        }
        let _ = writeln!(s, "  v{v} [{}];", attrs.join(", "));
    }
    for e in &cg.edges {
        let label = e.input.as_ref().map(|a| a.as_str()).unwrap_or("ε");
        let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.src, e.dst, dot_escape(label));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::nsa::{parse_machine, word};

    fn find(cg: &ConfigGraph, m: &Machine, name: &str) -> Option<usize> {
        (0..cg.vertex_count()).find(|&v| cg.vertex(v).name(m) == name)
    }

    #[test]
    fn fig2_chain() {
        let m = fixtures::fig2();
        let cg = build(&m, Horizon::tree_edges(4));
        let names = ["ε1", "y2", "yx2", "yxx2"];
        let ids: Vec<usize> = names.iter().map(|n| find(&cg, &m, n).unwrap()).collect();
        let labels = [None, Some("a"), Some("a")];
        for (k, l) in labels.iter().enumerate() {
            assert!(cg.edges().iter().any(|e| e.src == ids[k]
                && e.dst == ids[k + 1]
                && e.input.as_ref().map(|a| a.as_str()) == *l));
        }
        assert!(cg.is_coaccessible(0));
        assert!(check_degrees(&cg).is_ok());
        assert!(matches!(max_eps_run(&cg), EpsRun::Finite(_)));
    }

    #[test]
    fn fig2_small_cap() {
        let m = fixtures::fig2();
        let cg = build(&m, Horizon::tree_edges(2));
        assert!(find(&cg, &m, "yx2").is_some());
        assert!(find(&cg, &m, "yxx2").is_none());
        assert!(cg.truncated());
    }

    #[test]
    fn edgeless_machine() {
        let m = parse_machine("states: 1\nstart: 1\nfinal: 1\n").unwrap();
        let cg = build(&m, Horizon::default());
        assert_eq!(cg.vertex_count(), 1);
        assert!(cg.is_coaccessible(0));
        assert_eq!(max_eps_run(&cg), EpsRun::Finite(0));
        let m = parse_machine("states: 1 2\nstart: 1\nfinal: 2\n").unwrap();
        assert!(!build(&m, Horizon::default()).is_coaccessible(0));
        assert_eq!(
            export_dot(&build(&m, Horizon::default()), &m),
            "digraph cg {\n  rankdir=LR;\n  v0 [label=\"ε1\", style=bold];\n}\n"
        );
    }

    #[test]
    fn stay_loop() {
        let m = parse_machine("states: 1\nstart: 1\nfinal: 1\nedge: 1 1 stay eps\n").unwrap();
        let cg = build(&m, Horizon::default());
        assert!(check_degrees(&cg).is_ok());
        assert_eq!(max_eps_run(&cg), EpsRun::UnboundedWithinHorizon);
    }

    #[test]
    fn nondeterminism_shows_in_degrees() {
        let text = "states: 1 2 3\nstart: 1\nfinal: 2\ninput: a\nmemory: x\n\
                    edge: 1 2 push x a\nedge: 1 3 stay a\n";
        let m = parse_machine(text).unwrap();
        let cg = build(&m, Horizon::default());
        assert!(matches!(
            check_degrees(&cg),
            Err(DegreeViolation::RepeatedLetter { vertex: 0, .. })
        ));
    }

    #[test]
    fn lifting() {
        let m = fixtures::fig2();
        let p = lift_path(&m, &word("aa"), 100).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.last().unwrap().config.name(&m), "yxx2");
        assert!(lift_path(&m, &[], 100).unwrap().is_empty());
        assert_eq!(lift_path(&m, &word("ba"), 100), Err(LiftError::Stuck(0)));
    }

    #[test]
    fn z_projection_is_consistent() {
        let m = fixtures::z_word_problem();
        let z = crate::group::Group::abelian(1).unwrap();
        let cg = build(&m, Horizon::tree_edges(8));
        let p = project(&cg, &z).unwrap();
        assert_eq!(p.images[0], z.identity());
        assert_eq!(p.edges_checked, cg.edges().len());
    }

    #[test]
    fn fig2_is_not_a_group_word_problem() {
        let m = fixtures::fig2();
        let g = crate::group::Group::abelian(4).unwrap();
        let cg = build(&m, Horizon::tree_edges(6));
        assert!(matches!(
            project(&cg, &g),
            Err(ProjectionError::WellDefinedness { .. })
        ));
        let again = project(&cg, &g);
        assert_eq!(project(&cg, &g), again);
    }

    #[test]
    fn dot_is_stable() {
        let m = fixtures::fig2();
        let a = export_dot(&build(&m, Horizon::tree_edges(3)), &m);
        let b = export_dot(&build(&m, Horizon::tree_edges(3)), &m);
        assert_eq!(a, b);
        assert!(a.contains("label=\"yx2\""));
    }
}
