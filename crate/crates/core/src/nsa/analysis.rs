use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{Machine, StateId};
use crate::memory_tree::{MemorySymbol, StackOp};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Determinism {
    Deterministic,
    /// Two outedges of `state` whose domains overlap on a common input.
    Conflict {
        state: StateId,
        first: usize,
        second: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Erasing {
    /// Every ε-labelled path pops at most `k` times.
    Bounded(usize),
    /// An ε-cycle through a pop edge; the edge indices in cycle order.
    Unbounded { cycle: Vec<usize> },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum SymbolCond<'a> {
    Any,
    Root,
    Is(&'a MemorySymbol),
}

/// Domain of a stack operation as a conjunction over
/// (current symbol, pointer-at-leaf). "At root" is the same as symbol ε.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Domain<'a> {
    symbol: SymbolCond<'a>,
    leaf: Option<bool>,
}

fn domain(op: &StackOp) -> Domain<'_> {
    use SymbolCond::*;
    match op {
        StackOp::Down(x) => Domain { symbol: Is(x), leaf: None },
        StackOp::Up(Some(x)) => Domain { symbol: Is(x), leaf: Some(false) },
        StackOp::Up(None) => Domain { symbol: Root, leaf: Some(false) },
        StackOp::Push(_) | StackOp::Stay => Domain { symbol: Any, leaf: None },
        StackOp::Pop(x) => Domain { symbol: Is(x), leaf: Some(true) },
    }
}

/// Every combination of symbol condition and leaf condition is realised by
/// some memory tree, so two domains meet iff both components are compatible.
fn domains_meet(a: Domain<'_>, b: Domain<'_>) -> bool {
    use SymbolCond::*;
    let symbol = match (a.symbol, b.symbol) {
        (Any, _) | (_, Any) => true,
        (Root, Root) => true,
        (Is(x), Is(y)) => x == y,
        _ => false,
    };
    let leaf = match (a.leaf, b.leaf) {
        (Some(p), Some(q)) => p == q,
        _ => true,
    };
    symbol && leaf
}

/// Symbolic determinism check: per state, outedges competing for the same
/// input (equal letters, or either is ε) must have disjoint domains.
pub fn check_deterministic(m: &Machine) -> Determinism {
    for s in m.states() {
        let out = m.out_edges(s);
        for (k, &i) in out.iter().enumerate() {
            for &j in &out[k + 1..] {
                let (ei, ej) = (m.edge(i), m.edge(j));
                let compete = ei.input.is_none() || ej.input.is_none() || ei.input == ej.input;
                if compete && domains_meet(domain(&ei.op), domain(&ej.op)) {
                    return Determinism::Conflict {
                        state: s,
                        first: i,
                        second: j,
                    };
                }
            }
        }
    }
    Determinism::Deterministic
}

/// Bounds the pops along ε-labelled paths of the machine graph.
///
/// Stack executability is ignored: the bound quantifies over graph paths.
/// Unbounded iff a strongly connected component of the ε-subgraph contains a
/// pop edge; otherwise the bound is the heaviest path through the
/// condensation with pop edges weighing one.
pub fn check_limited_erasing(m: &Machine) -> Erasing {
    let mut g: DiGraph<(), usize> = DiGraph::new();
    let nodes: Vec<NodeIndex> = m.states().map(|_| g.add_node(())).collect();
    let eps_edges: Vec<usize> = (0..m.edges().len())
        .filter(|&i| m.edge(i).input.is_none())
        .collect();
    for &i in &eps_edges {
        let e = m.edge(i);
        g.add_edge(nodes[e.src.0], nodes[e.dst.0], i);
    }
    // tarjan_scc yields components in reverse topological order
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; m.state_count()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            comp[n.index()] = c;
        }
    }

    for &i in &eps_edges {
        let e = m.edge(i);
        if e.op.is_pop() && comp[e.src.0] == comp[e.dst.0] {
            let mut cycle = vec![i];
            cycle.extend(path_within(m, &eps_edges, &comp, e.dst, e.src));
            return Erasing::Unbounded { cycle };
        }
    }

    let mut best = vec![0usize; sccs.len()];
    for (c, members) in sccs.iter().enumerate() {
        let mut b = 0;
        for n in members {
            for &i in m.out_edges(StateId(n.index())) {
                let e = m.edge(i);
                if e.input.is_some() || comp[e.dst.0] == c {
                    continue;
                }
                b = b.max(usize::from(e.op.is_pop()) + best[comp[e.dst.0]]);
            }
        }
        best[c] = b;
    }
    Erasing::Bounded(best.into_iter().max().unwrap_or(0))
}

/// Shortest ε-path from `from` to `to` inside their common component.
fn path_within(
    m: &Machine,
    eps_edges: &[usize],
    comp: &[usize],
    from: StateId,
    to: StateId,
) -> Vec<usize> {
    let c = comp[from.0];
    let mut prev: Vec<Option<usize>> = vec![None; m.state_count()];
    let mut seen = vec![false; m.state_count()];
    seen[from.0] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        if s == to {
            break;
        }
        for &i in eps_edges {
            let e = m.edge(i);
            if e.src == s && comp[e.dst.0] == c && !seen[e.dst.0] {
                seen[e.dst.0] = true;
                prev[e.dst.0] = Some(i);
                queue.push_back(e.dst);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let i = prev[cur.0].expect("same component");
        path.push(i);
        cur = m.edge(i).src;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::nsa::parse_machine;

    fn machine(edges: &str) -> Machine {
        parse_machine(&format!(
            "states: 1 2 3\nstart: 1\nfinal: 1\ninput: a b\nmemory: x y\n{edges}"
        ))
        .unwrap()
    }

    #[test]
    fn fig2_is_deterministic_with_erasing_one() {
        let m = fixtures::fig2();
        assert_eq!(check_deterministic(&m), Determinism::Deterministic);
        assert_eq!(check_limited_erasing(&m), Erasing::Bounded(1));
    }

    #[test]
    fn two_pushes_on_one_letter_conflict() {
        let m = machine("edge: 1 2 push x a\nedge: 1 3 push y a\n");
        assert_eq!(
            check_deterministic(&m),
            Determinism::Conflict {
                state: StateId(0),
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn down_and_pop_meet_on_a_leaf_below_the_root() {
        let m = machine("edge: 1 2 down x a\nedge: 1 3 pop x a\n");
        assert!(matches!(check_deterministic(&m), Determinism::Conflict { .. }));
    }

    #[test]
    fn disjoint_domains_pass() {
        // U_x needs a non-leaf, Q_x a leaf; D_y and D_x differ in symbol;
        // U_eps needs the root which excludes every named symbol.
        let m = machine(
            "edge: 1 2 up x a\nedge: 1 3 pop x a\nedge: 1 1 down y eps\nedge: 1 2 down x b\nedge: 1 3 up eps a\n",
        );
        assert_eq!(check_deterministic(&m), Determinism::Deterministic);
    }

    #[test]
    fn epsilon_competes_with_every_letter() {
        let m = machine("edge: 1 2 stay eps\nedge: 1 3 pop x b\n");
        assert!(matches!(check_deterministic(&m), Determinism::Conflict { .. }));
        let m = machine("edge: 1 2 push x a\nedge: 1 3 push x b\n");
        assert_eq!(check_deterministic(&m), Determinism::Deterministic);
    }

    #[test]
    fn erasing_bounds() {
        let m = machine("edge: 1 2 push x eps\nedge: 2 3 push y eps\n");
        assert_eq!(check_limited_erasing(&m), Erasing::Bounded(0));

        let m = machine("edge: 1 1 pop x eps\n");
        assert_eq!(check_limited_erasing(&m), Erasing::Unbounded { cycle: vec![0] });

        // pop, then an ε push-cycle without pops, then pop again
        let m = machine(
            "edge: 1 2 pop x eps\nedge: 2 3 push y eps\nedge: 3 2 push y eps\nedge: 3 1 pop y a\nedge: 2 1 pop y eps\n",
        );
        assert!(matches!(check_limited_erasing(&m), Erasing::Unbounded { .. }));

        let m = machine(
            "edge: 1 2 pop x eps\nedge: 2 3 push y eps\nedge: 3 2 push y eps\nedge: 3 1 pop y a\n",
        );
        assert_eq!(check_limited_erasing(&m), Erasing::Bounded(1));
    }

    #[test]
    fn unbounded_cycle_is_a_closed_walk() {
        let m = machine("edge: 1 2 pop x eps\nedge: 2 3 stay eps\nedge: 3 1 push x eps\n");
        let Erasing::Unbounded { cycle } = check_limited_erasing(&m) else {
            panic!("expected a cycle")
        };
        assert_eq!(cycle.len(), 3);
        for w in cycle.windows(2) {
            assert_eq!(m.edge(w[0]).dst, m.edge(w[1]).src);
        }
        assert_eq!(m.edge(*cycle.last().unwrap()).dst, m.edge(cycle[0]).src);
    }
}
