use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use super::{Configuration, Letter, Machine, StateId, Word};
use crate::memory_tree::MemoryTree;

/// Limits on a search over configurations. Trees can grow without bound, so
/// every search carries explicit caps and reports when one fires.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ResourceCaps {
    pub max_steps: usize,
    pub max_tree_edges: usize,
    pub max_frontier: usize,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps {
            max_steps: 1_000_000,
            max_tree_edges: 10_000,
            max_frontier: 100_000,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CapKind {
    Steps,
    TreeEdges,
    Frontier,
}

impl fmt::Display for CapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapKind::Steps => "max-steps",
            CapKind::TreeEdges => "max-tree-edges",
            CapKind::Frontier => "max-frontier",
        })
    }
}

#[derive(Error, Debug, Clone, Copy, PartialEq, Eq)]
#[error("resource cap `{0}` exceeded")]
pub struct CapExceeded(pub CapKind);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Accepted,
    Rejected,
    CapExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "ACCEPTED",
            Verdict::Rejected => "REJECTED",
            Verdict::CapExceeded => "CAP_EXCEEDED",
        })
    }
}

/// A path from the initial state whose operation sequence is defined on the
/// empty tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Computation {
    pub edges: Vec<usize>,
    pub word: Word,
    pub outcome: MemoryTree,
}

impl Computation {
    /// Replays the path, returning every configuration visited (initial first).
    /// `None` if the path is not a computation of `m`.
    pub fn configurations(&self, m: &Machine) -> Option<Vec<Configuration>> {
        let mut cur = Configuration::initial(m);
        let mut out = vec![cur.clone()];
        for &i in &self.edges {
            let e = m.edge(i);
            if e.src != cur.state {
                return None;
            }
            cur = Configuration {
                state: e.dst,
                tree: cur.tree.apply(&e.op)?,
            };
            out.push(cur.clone());
        }
        Some(out)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AcceptResult {
    pub verdict: Verdict,
    pub witness: Option<Computation>,
    pub caps_hit: Vec<CapKind>,
    pub steps: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Successor {
    pub edge: usize,
    pub config: Configuration,
}

/// All configurations reachable by one edge whose input component is
/// `letter` (`None` for ε) and whose operation is defined on `tree`.
pub fn step(m: &Machine, state: StateId, tree: &MemoryTree, letter: Option<&Letter>) -> Vec<Successor> {
    m.out_edges(state)
        .iter()
        .filter(|&&i| m.edge(i).input.as_ref() == letter)
        .filter_map(|&i| {
            let e = m.edge(i);
            tree.apply(&e.op).map(|t| Successor {
                edge: i,
                config: Configuration {
                    state: e.dst,
                    tree: t,
                },
            })
        })
        .collect()
}

struct Node {
    config: Configuration,
    pos: usize,
    parent: usize,
    edge: usize,
}

/// Breadth-first membership search over `(state, tree, input position)`.
///
/// The verdict is three-valued: `Rejected` only when the whole reachable
/// frontier was exhausted without any cap firing.
pub fn accepts(m: &Machine, w: &[Letter], caps: ResourceCaps) -> AcceptResult {
    let mut arena: Vec<Node> = Vec::new();
    let mut seen: HashSet<(Configuration, usize)> = HashSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut caps_hit: BTreeSet<CapKind> = BTreeSet::new();

    let start = Configuration::initial(m);
    seen.insert((start.clone(), 0));
    arena.push(Node {
        config: start,
        pos: 0,
        parent: usize::MAX,
        edge: usize::MAX,
    });
    queue.push_back(0);

    let witness_of = |arena: &[Node], mut i: usize| {
        let outcome = arena[i].config.tree.clone();
        let mut edges = Vec::new();
        while arena[i].parent != usize::MAX {
            edges.push(arena[i].edge);
            i = arena[i].parent;
        }
        edges.reverse();
        Computation {
            edges,
            word: w.to_vec(),
            outcome,
        }
    };

    if w.is_empty() && arena[0].config.is_accepting(m) {
        return AcceptResult {
            verdict: Verdict::Accepted,
            witness: Some(witness_of(&arena, 0)),
            caps_hit: Vec::new(),
            steps: 0,
        };
    }

    let mut steps = 0;
    while let Some(i) = queue.pop_front() {
        steps += 1;
        if steps > caps.max_steps {
            caps_hit.insert(CapKind::Steps);
            break;
        }
        let (state, pos) = (arena[i].config.state, arena[i].pos);
        let tree = arena[i].config.tree.clone();
        let mut succ = step(m, state, &tree, None)
            .into_iter()
            .map(|s| (s, pos))
            .collect::<Vec<_>>();
        if let Some(a) = w.get(pos) {
            succ.extend(step(m, state, &tree, Some(a)).into_iter().map(|s| (s, pos + 1)));
        }
        for (s, npos) in succ {
            if s.config.tree.edge_count() > caps.max_tree_edges {
                caps_hit.insert(CapKind::TreeEdges);
                continue;
            }
            let key = (s.config, npos);
            if seen.contains(&key) {
                continue;
            }
            seen.insert(key.clone());
            let accepting = npos == w.len() && key.0.is_accepting(m);
            arena.push(Node {
                config: key.0,
                pos: npos,
                parent: i,
                edge: s.edge,
            });
            let j = arena.len() - 1;
            if accepting {
                return AcceptResult {
                    verdict: Verdict::Accepted,
                    witness: Some(witness_of(&arena, j)),
                    caps_hit: caps_hit.into_iter().collect(),
                    steps,
                };
            }
            queue.push_back(j);
        }
        if queue.len() > caps.max_frontier {
            caps_hit.insert(CapKind::Frontier);
            break;
        }
    }

    let verdict = if caps_hit.is_empty() {
        Verdict::Rejected
    } else {
        Verdict::CapExceeded
    };
    AcceptResult {
        verdict,
        witness: None,
        caps_hit: caps_hit.into_iter().collect(),
        steps,
    }
}

/// Saturates `set` under ε-moves.
pub fn epsilon_closure(
    m: &Machine,
    set: BTreeSet<Configuration>,
    caps: ResourceCaps,
) -> Result<BTreeSet<Configuration>, CapExceeded> {
    let mut queue: VecDeque<Configuration> = set.iter().cloned().collect();
    let mut out = set;
    let mut steps = 0;
    while let Some(c) = queue.pop_front() {
        steps += 1;
        if steps > caps.max_steps {
            return Err(CapExceeded(CapKind::Steps));
        }
        for s in step(m, c.state, &c.tree, None) {
            if s.config.tree.edge_count() > caps.max_tree_edges {
                return Err(CapExceeded(CapKind::TreeEdges));
            }
            if out.insert(s.config.clone()) {
                queue.push_back(s.config);
            }
        }
        if queue.len() > caps.max_frontier {
            return Err(CapExceeded(CapKind::Frontier));
        }
    }
    Ok(out)
}

/// Every accepted word of length at most `max_len`.
///
/// Walks the tree of input prefixes carrying the ε-closed set of reachable
/// configurations, pruning prefixes whose set is empty. Any cap firing makes
/// the enumeration unsound, so it is returned as an error.
pub fn enumerate_accepted(
    m: &Machine,
    max_len: usize,
    caps: ResourceCaps,
) -> Result<BTreeSet<Word>, CapExceeded> {
    let mut out = BTreeSet::new();
    let start = epsilon_closure(m, BTreeSet::from([Configuration::initial(m)]), caps)?;
    let mut stack: Vec<(Word, BTreeSet<Configuration>)> = vec![(Vec::new(), start)];
    while let Some((prefix, set)) = stack.pop() {
        if set.iter().any(|c| c.is_accepting(m)) {
            out.insert(prefix.clone());
        }
        if prefix.len() == max_len {
            continue;
        }
        for a in m.input_alphabet() {
            let mut next = BTreeSet::new();
            for c in &set {
                for s in step(m, c.state, &c.tree, Some(a)) {
                    if s.config.tree.edge_count() > caps.max_tree_edges {
                        return Err(CapExceeded(CapKind::TreeEdges));
                    }
                    next.insert(s.config);
                }
            }
            if next.is_empty() {
                continue;
            }
            let next = epsilon_closure(m, next, caps)?;
            let mut w = prefix.clone();
            w.push(a.clone());
            stack.push((w, next));
        }
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub edge: usize,
    pub input: Option<Letter>,
    pub config: Configuration,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HaltReason {
    /// The whole word was read and the configuration is final with empty memory.
    Accepted,
    /// No edge applies.
    Stuck,
    CapExceeded(CapKind),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    pub start: Configuration,
    pub steps: Vec<TraceStep>,
    pub consumed: usize,
    pub halt: HaltReason,
}

impl Trace {
    pub fn end(&self) -> &Configuration {
        self.steps.last().map(|s| &s.config).unwrap_or(&self.start)
    }

    /// One line per step: `state --op,input--> configuration-name`.
    pub fn render(&self, m: &Machine) -> String {
        let mut s = format!("   {}\n", self.start.name(m));
        for (i, st) in self.steps.iter().enumerate() {
            let e = m.edge(st.edge);
            let input = st.input.as_ref().map(|l| l.as_str()).unwrap_or("ε");
            s.push_str(&format!(
                "{:>3} {} -({}, {})-> {}  {}\n",
                i + 1,
                m.state_name(e.src),
                e.op,
                input,
                m.state_name(e.dst),
                st.config.name(m)
            ));
        }
        s
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("nondeterminism at input position {position}: edges {first} and {second} both apply")]
    Nondeterminism {
        position: usize,
        config: Configuration,
        first: usize,
        second: usize,
    },
}

/// The unique maximal computation of a deterministic machine on a prefix of
/// `w`. Once the word is read, ε-moves continue until the machine is stuck or
/// reaches an accepting configuration.
pub fn run_trace(m: &Machine, w: &[Letter], caps: ResourceCaps) -> Result<Trace, TraceError> {
    let start = Configuration::initial(m);
    let mut cur = start.clone();
    let mut steps = Vec::new();
    let mut pos = 0;
    let halt = loop {
        if pos == w.len() && cur.is_accepting(m) {
            break HaltReason::Accepted;
        }
        let mut cands = step(m, cur.state, &cur.tree, None)
            .into_iter()
            .map(|s| (s, false))
            .collect::<Vec<_>>();
        if let Some(a) = w.get(pos) {
            cands.extend(step(m, cur.state, &cur.tree, Some(a)).into_iter().map(|s| (s, true)));
        }
        if cands.len() > 1 {
            return Err(TraceError::Nondeterminism {
                position: pos,
                config: cur,
                first: cands[0].0.edge,
                second: cands[1].0.edge,
            });
        }
        let Some((s, consumes)) = cands.pop() else {
            break HaltReason::Stuck;
        };
        if steps.len() >= caps.max_steps {
            break HaltReason::CapExceeded(CapKind::Steps);
        }
        if s.config.tree.edge_count() > caps.max_tree_edges {
            break HaltReason::CapExceeded(CapKind::TreeEdges);
        }
        let input = if consumes {
            pos += 1;
            Some(w[pos - 1].clone())
        } else {
            None
        };
        cur = s.config.clone();
        steps.push(TraceStep {
            edge: s.edge,
            input,
            config: s.config,
        });
    };
    Ok(Trace {
        start,
        steps,
        consumed: pos,
        halt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::memory_tree::MemorySymbol;
    use crate::nsa::{parse_machine, word};

    #[test]
    fn fig2_first_step_pushes_y() {
        let m = fixtures::fig2();
        let succ = step(&m, m.initial(), &MemoryTree::empty(), None);
        assert_eq!(succ.len(), 1);
        assert_eq!(m.state_name(succ[0].config.state), "2");
        assert_eq!(
            succ[0].config.tree,
            MemoryTree::branch(&[MemorySymbol::new("y")], 1)
        );
    }

    #[test]
    fn pop_x_needs_x_on_top() {
        let m = fixtures::fig2();
        let s4 = m.state_by_name("4").unwrap();
        // pointer on the y-vertex: Q_x cannot fire on d
        let t = MemoryTree::branch(&[MemorySymbol::new("y")], 1);
        assert!(step(&m, s4, &t, Some(&Letter::new("d"))).is_empty());
    }

    #[test]
    fn letter_outside_alphabet_is_stuck() {
        let m = fixtures::fig2();
        let s2 = m.state_by_name("2").unwrap();
        let t = MemoryTree::branch(&[MemorySymbol::new("y")], 1);
        assert!(step(&m, s2, &t, Some(&Letter::new("z"))).is_empty());
    }

    #[test]
    fn fig2_membership() {
        let m = fixtures::fig2();
        let caps = ResourceCaps::default();
        for (w, v) in [
            ("abcd", Verdict::Accepted),
            ("", Verdict::Accepted),
            ("aabcd", Verdict::Rejected),
            ("abcdabcd", Verdict::Accepted),
            ("aabbccdd", Verdict::Accepted),
            ("abc", Verdict::Rejected),
        ] {
            let r = accepts(&m, &word(w), caps);
            assert_eq!(r.verdict, v, "{w}");
            if let Some(c) = r.witness {
                assert_eq!(c.outcome, MemoryTree::empty());
                let confs = c.configurations(&m).unwrap();
                assert!(confs.last().unwrap().is_accepting(&m));
                let spelled: Word = c
                    .edges
                    .iter()
                    .filter_map(|&i| m.edge(i).input.clone())
                    .collect();
                assert_eq!(spelled, word(w));
            }
        }
    }

    #[test]
    fn caps_make_verdict_three_valued() {
        // ε push loop: the frontier never exhausts
        let m = parse_machine(
            "states: 1 2\nstart: 1\nfinal: 2\ninput: a\nmemory: x\nedge: 1 1 push x eps\n",
        )
        .unwrap();
        let caps = ResourceCaps {
            max_steps: 1000,
            max_tree_edges: 50,
            max_frontier: 1000,
        };
        let r = accepts(&m, &word("a"), caps);
        assert_eq!(r.verdict, Verdict::CapExceeded);
        assert_eq!(r.caps_hit, vec![CapKind::TreeEdges]);
        assert!(enumerate_accepted(&m, 2, caps).is_err());
    }

    #[test]
    fn enumerate_small() {
        let m = fixtures::fig2();
        let caps = ResourceCaps::default();
        let got = enumerate_accepted(&m, 8, caps).unwrap();
        let want: BTreeSet<Word> = ["", "abcd", "abcdabcd", "aabbccdd"]
            .iter()
            .map(|w| word(w))
            .collect();
        assert_eq!(got, want);
        assert_eq!(
            enumerate_accepted(&m, 3, caps).unwrap(),
            BTreeSet::from([Vec::new()])
        );
        let none = parse_machine("states: 1\nstart: 1\ninput: a\nedge: 1 1 stay a\n").unwrap();
        assert!(enumerate_accepted(&none, 5, caps).unwrap().is_empty());
    }

    #[test]
    fn trace_abcd() {
        let m = fixtures::fig2();
        let t = run_trace(&m, &word("abcd"), ResourceCaps::default()).unwrap();
        // P_y ε, P_x a, D_x b, U_y c, Q_x d, Q_y ε
        assert_eq!(t.steps.len(), 6);
        assert_eq!(t.halt, HaltReason::Accepted);
        assert_eq!(m.state_name(t.end().state), "1");
        assert!(t.end().tree.is_empty());
        let ops: Vec<String> = t.steps.iter().map(|s| m.edge(s.edge).op.to_string()).collect();
        assert_eq!(ops, ["push y", "push x", "down x", "up y", "pop x", "pop y"]);
    }

    #[test]
    fn trace_empty_word_and_foreign_letter() {
        let m = fixtures::fig2();
        let t = run_trace(&m, &[], ResourceCaps::default()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.halt, HaltReason::Accepted);

        let t = run_trace(&m, &word("az"), ResourceCaps::default()).unwrap();
        assert_eq!(t.consumed, 1);
        assert_eq!(t.halt, HaltReason::Stuck);
    }

    #[test]
    fn trace_reports_nondeterminism() {
        let m = parse_machine(
            "states: 1 2\nstart: 1\nfinal: 1\ninput: a\nmemory: x\nedge: 1 2 push x a\nedge: 1 1 push x a\n",
        )
        .unwrap();
        let e = run_trace(&m, &word("a"), ResourceCaps::default()).unwrap_err();
        assert!(matches!(e, TraceError::Nondeterminism { position: 0, .. }));
    }
}
