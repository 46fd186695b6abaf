//! Memory trees and the monoid of stack operations acting on them.
//!
//! A memory tree is an ordered rooted tree whose vertices are numbered in
//! creation order. Because only the latest vertex can ever be deleted and new
//! vertices are always attached somewhere on the path from the root to the
//! latest vertex, creation order is a depth-first order and the tree can be
//! stored as a plain vector of `(parent, label)` pairs indexed by creation
//! rank. Two trees are equal exactly when these vectors and the distinguished
//! vertex agree, which makes the derived `Eq`/`Hash`/`Ord` a canonical form.

use std::fmt;
use std::sync::Arc;

/// A letter of a machine's memory alphabet.
///
/// The empty inedge label at the root is not a `MemorySymbol`; it is
/// represented by `None` wherever a current symbol is reported.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemorySymbol(Arc<str>);

impl MemorySymbol {
    pub fn new(name: &str) -> Self {
        MemorySymbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for MemorySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for MemorySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MemorySymbol {
    fn from(s: &str) -> Self {
        MemorySymbol::new(s)
    }
}

/// One generator of the stack-operation monoid, or the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum StackOp {
    /// Move the pointer to the parent; needs current symbol `x` and pointer off the root.
    Down(MemorySymbol),
    /// Move the pointer to the latest child; `None` means the pointer must be at the root.
    Up(Option<MemorySymbol>),
    /// Attach a new latest leaf below the pointer and move onto it.
    Push(MemorySymbol),
    /// Delete the pointed-at leaf, whose inedge must carry `x`.
    Pop(MemorySymbol),
    Stay,
}

impl StackOp {
    /// The memory symbol mentioned by the operation, if any.
    pub fn symbol(&self) -> Option<&MemorySymbol> {
        match self {
            StackOp::Down(x) | StackOp::Push(x) | StackOp::Pop(x) => Some(x),
            StackOp::Up(x) => x.as_ref(),
            StackOp::Stay => None,
        }
    }

    pub fn is_pop(&self) -> bool {
        matches!(self, StackOp::Pop(_))
    }

    /// True for the pointer-moving operations a pushdown automaton lacks.
    pub fn moves_pointer(&self) -> bool {
        matches!(self, StackOp::Down(_) | StackOp::Up(_))
    }
}

impl fmt::Display for StackOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackOp::Down(x) => write!(f, "down {x}"),
            StackOp::Up(Some(x)) => write!(f, "up {x}"),
            StackOp::Up(None) => write!(f, "up eps"),
            StackOp::Push(x) => write!(f, "push {x}"),
            StackOp::Pop(x) => write!(f, "pop {x}"),
            StackOp::Stay => write!(f, "stay"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Node {
    // usize::MAX for the root
    parent: usize,
    label: Option<MemorySymbol>,
}

const NO_PARENT: usize = usize::MAX;

/// A memory tree with a distinguished vertex.
///
/// Values are immutable; every operation returns a fresh tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MemoryTree {
    nodes: Vec<Node>,
    distinguished: usize,
}

/// An invariant a [`MemoryTree`] fails, as reported by [`MemoryTree::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TreeViolation {
    NoRoot,
    RootHasParent,
    MissingLabel { vertex: usize },
    ParentNotEarlier { vertex: usize, parent: usize },
    NotDepthFirst { vertex: usize, parent: usize },
    DistinguishedOutOfRange { vertex: usize },
    DistinguishedOffSpine { vertex: usize },
}

impl Default for MemoryTree {
    fn default() -> Self {
        Self::empty()
    }
}

impl MemoryTree {
    /// The tree consisting of the root alone, with the pointer on it.
    pub fn empty() -> Self {
        MemoryTree {
            nodes: vec![Node {
                parent: NO_PARENT,
                label: None,
            }],
            distinguished: 0,
        }
    }

    /// Builds a tree from raw parts without checking invariants.
    ///
    /// `edges[i]` is the `(parent, label)` of vertex `i + 1`; the root is
    /// vertex 0. Run [`validate`](Self::validate) on the result.
    pub fn from_parts(edges: Vec<(usize, MemorySymbol)>, distinguished: usize) -> Self {
        let mut nodes = Vec::with_capacity(edges.len() + 1);
        nodes.push(Node {
            parent: NO_PARENT,
            label: None,
        });
        nodes.extend(edges.into_iter().map(|(parent, label)| Node {
            parent,
            label: Some(label),
        }));
        MemoryTree {
            nodes,
            distinguished,
        }
    }

    /// A single branch spelling `labels` from the root, pointer at depth `depth`.
    pub fn branch(labels: &[MemorySymbol], depth: usize) -> Self {
        let edges = labels
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.clone()))
            .collect();
        MemoryTree::from_parts(edges, depth)
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn latest(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.nodes.get(v).and_then(|n| {
            if n.parent == NO_PARENT {
                None
            } else {
                Some(n.parent)
            }
        })
    }

    pub fn label(&self, v: usize) -> Option<&MemorySymbol> {
        self.nodes.get(v).and_then(|n| n.label.as_ref())
    }

    /// Label of the inedge to the distinguished vertex; `None` at the root.
    pub fn current_symbol(&self) -> Option<&MemorySymbol> {
        self.label(self.distinguished)
    }

    pub fn at_root(&self) -> bool {
        self.distinguished == 0
    }

    /// The distinguished vertex lies on the root-to-latest path, so it is a
    /// leaf exactly when it is the latest vertex.
    pub fn at_leaf(&self) -> bool {
        self.distinguished == self.latest()
    }

    /// Depth of the distinguished vertex.
    pub fn pointer_depth(&self) -> usize {
        self.depth(self.distinguished)
    }

    pub fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(v) {
            v = p;
            d += 1;
        }
        d
    }

    fn latest_child(&self, v: usize) -> Option<usize> {
        (v + 1..self.nodes.len())
            .rev()
            .find(|&c| self.nodes[c].parent == v)
    }

    /// Labels along the branch when the tree is a single path, else `None`.
    pub fn single_branch(&self) -> Option<Vec<MemorySymbol>> {
        let mut labels = Vec::with_capacity(self.edge_count());
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            if n.parent != i - 1 {
                return None;
            }
            labels.push(n.label.clone()?);
        }
        Some(labels)
    }

    /// Label of the inedge to the latest vertex (the stack top for a pushdown store).
    pub fn top_symbol(&self) -> Option<&MemorySymbol> {
        self.label(self.latest())
    }

    /// True when `prefix` is an initial segment of `self`: its vertices, in
    /// creation order, are the first vertices of `self` with the same parents
    /// and labels. The distinguished vertex is ignored.
    pub fn extends(&self, prefix: &MemoryTree) -> bool {
        prefix.nodes.len() <= self.nodes.len() && self.nodes[..prefix.nodes.len()] == prefix.nodes[..]
    }

    /// Applies one operation; `None` is the monoid's zero (undefined).
    pub fn apply(&self, op: &StackOp) -> Option<MemoryTree> {
        let v = self.distinguished;
        match op {
            StackOp::Stay => Some(self.clone()),
            StackOp::Down(x) => {
                if self.current_symbol() != Some(x) {
                    return None;
                }
                let parent = self.parent(v)?;
                Some(MemoryTree {
                    nodes: self.nodes.clone(),
                    distinguished: parent,
                })
            }
            StackOp::Up(x) => {
                if self.current_symbol() != x.as_ref() {
                    return None;
                }
                let child = self.latest_child(v)?;
                Some(MemoryTree {
                    nodes: self.nodes.clone(),
                    distinguished: child,
                })
            }
            StackOp::Push(x) => {
                let mut nodes = self.nodes.clone();
                nodes.push(Node {
                    parent: v,
                    label: Some(x.clone()),
                });
                let distinguished = nodes.len() - 1;
                Some(MemoryTree {
                    nodes,
                    distinguished,
                })
            }
            StackOp::Pop(x) => {
                if self.current_symbol() != Some(x) || !self.at_leaf() {
                    return None;
                }
                let parent = self.parent(v)?;
                let mut nodes = self.nodes.clone();
                nodes.pop();
                Some(MemoryTree {
                    nodes,
                    distinguished: parent,
                })
            }
        }
    }

    /// Left-to-right composition; undefined as soon as any step is.
    pub fn apply_word<'a, I>(&self, ops: I) -> Option<MemoryTree>
    where
        I: IntoIterator<Item = &'a StackOp>,
    {
        let mut t = self.clone();
        for op in ops {
            t = t.apply(op)?;
        }
        Some(t)
    }

    /// All invariant violations; empty for a well-formed memory tree.
    pub fn validate(&self) -> Vec<TreeViolation> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push(TreeViolation::NoRoot);
            return out;
        }
        if self.nodes[0].parent != NO_PARENT || self.nodes[0].label.is_some() {
            out.push(TreeViolation::RootHasParent);
        }
        // spine[k] = vertex at depth k on the path to the latest vertex so far
        let mut spine: Vec<usize> = vec![0];
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            match &n.label {
                Some(l) if !l.as_str().is_empty() => {}
                _ => out.push(TreeViolation::MissingLabel { vertex: i }),
            }
            if n.parent >= i {
                out.push(TreeViolation::ParentNotEarlier {
                    vertex: i,
                    parent: n.parent,
                });
                return out;
            }
            match spine.iter().position(|&s| s == n.parent) {
                Some(k) => {
                    spine.truncate(k + 1);
                    spine.push(i);
                }
                None => {
                    out.push(TreeViolation::NotDepthFirst {
                        vertex: i,
                        parent: n.parent,
                    });
                    return out;
                }
            }
        }
        if self.distinguished >= self.nodes.len() {
            out.push(TreeViolation::DistinguishedOutOfRange {
                vertex: self.distinguished,
            });
        } else if !spine.contains(&self.distinguished) {
            out.push(TreeViolation::DistinguishedOffSpine {
                vertex: self.distinguished,
            });
        }
        out
    }

    /// Debug listing: one `parent child label` line per edge, `*` marking the
    /// distinguished vertex. Not a stable format.
    pub fn to_edge_listing(&self) -> String {
        let mut s = String::new();
        if self.at_root() {
            s.push_str("0*\n");
        }
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let mark = if i == self.distinguished { "*" } else { "" };
            let label = n.label.as_ref().map(|l| l.as_str()).unwrap_or("?");
            s.push_str(&format!("{} {}{} {}\n", n.parent, i, mark, label));
        }
        s
    }

    /// Compact name: for a single branch, the labels up to the pointer, then
    /// `state`, then the rest (so `yx` + `3` + `x` reads `yx3x`); `ε` stands in
    /// for an empty prefix. Other trees fall back to a bracketed preorder form.
    pub fn name_with_state(&self, state: &str) -> String {
        match self.single_branch() {
            Some(labels) => {
                let d = self.distinguished;
                let mut s = String::new();
                if d == 0 {
                    s.push('ε');
                }
                for l in &labels[..d] {
                    s.push_str(l.as_str());
                }
                s.push_str(state);
                for l in &labels[d..] {
                    s.push_str(l.as_str());
                }
                s
            }
            None => format!("{}{}", self, state),
        }
    }
}

impl fmt::Display for MemoryTree {
    /// Preorder nesting, e.g. `[y[x*][z]]`; `*` follows the distinguished vertex.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(t: &MemoryTree, v: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if let Some(l) = t.label(v) {
                write!(f, "{l}")?;
            }
            if v == t.distinguished {
                write!(f, "*")?;
            }
            for c in (v + 1..t.nodes.len()).filter(|&c| t.nodes[c].parent == v) {
                write!(f, "[")?;
                walk(t, c, f)?;
                write!(f, "]")?;
            }
            Ok(())
        }
        write!(f, "[")?;
        walk(self, 0, f)?;
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MemorySymbol {
        "x".into()
    }
    fn y() -> MemorySymbol {
        "y".into()
    }

    #[test]
    fn empty_tree_is_root_only() {
        let t = MemoryTree::empty();
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.edge_count(), 0);
        assert_eq!(t.current_symbol(), None);
        assert!(t.validate().is_empty());
        assert_eq!(t.apply(&StackOp::Down(x())), None);
        assert_eq!(t.apply(&StackOp::Up(None)), None);
        assert_eq!(t.apply(&StackOp::Pop(x())), None);
    }

    #[test]
    fn push_then_down_gives_yxx_pointer_depth_one() {
        let ops = [
            StackOp::Push(y()),
            StackOp::Push(x()),
            StackOp::Push(x()),
            StackOp::Down(x()),
            StackOp::Down(x()),
        ];
        let t = MemoryTree::empty().apply_word(&ops).unwrap();
        assert_eq!(t.single_branch().unwrap(), vec![y(), x(), x()]);
        assert_eq!(t.pointer_depth(), 1);
        assert_eq!(t.current_symbol(), Some(&y()));
        assert_eq!(t.name_with_state("3"), "y3xx");
    }

    #[test]
    fn up_reads_the_inedge_of_the_current_vertex() {
        // After P_y P_x D_x the pointer sits on the y-vertex, so U_x is undefined
        // and U_y is the move that climbs back.
        let prefix = [StackOp::Push(y()), StackOp::Push(x()), StackOp::Down(x())];
        let t = MemoryTree::empty().apply_word(&prefix).unwrap();
        assert_eq!(t.apply(&StackOp::Up(Some(x()))), None);

        let stated = [
            StackOp::Push(y()),
            StackOp::Push(x()),
            StackOp::Down(x()),
            StackOp::Up(Some(x())),
            StackOp::Pop(x()),
            StackOp::Pop(y()),
        ];
        assert_eq!(MemoryTree::empty().apply_word(&stated), None);

        let corrected = [
            StackOp::Push(y()),
            StackOp::Push(x()),
            StackOp::Down(x()),
            StackOp::Up(Some(y())),
            StackOp::Pop(x()),
            StackOp::Pop(y()),
        ];
        assert_eq!(
            MemoryTree::empty().apply_word(&corrected),
            Some(MemoryTree::empty())
        );
    }

    #[test]
    fn up_epsilon_only_at_root() {
        let t = MemoryTree::empty()
            .apply_word(&[StackOp::Push(y()), StackOp::Down(y())])
            .unwrap();
        assert!(t.at_root());
        let up = t.apply(&StackOp::Up(None)).unwrap();
        assert_eq!(up.distinguished(), 1);
    }

    #[test]
    fn up_moves_to_latest_child() {
        // root with children y (vertex 1) and x (vertex 2)
        let t = MemoryTree::empty()
            .apply_word(&[
                StackOp::Push(y()),
                StackOp::Down(y()),
                StackOp::Push(x()),
                StackOp::Down(x()),
            ])
            .unwrap();
        assert!(t.validate().is_empty());
        let up = t.apply(&StackOp::Up(None)).unwrap();
        assert_eq!(up.distinguished(), 2);
        assert_eq!(up.current_symbol(), Some(&x()));
        assert_eq!(t.to_string(), "[*[y][x]]");
    }

    #[test]
    fn pop_requires_leaf_and_matching_symbol() {
        let t = MemoryTree::empty()
            .apply_word(&[StackOp::Push(y()), StackOp::Push(x())])
            .unwrap();
        assert_eq!(t.apply(&StackOp::Pop(y())), None);
        let d = t.apply(&StackOp::Down(x())).unwrap();
        assert_eq!(d.apply(&StackOp::Pop(y())), None);
        assert_eq!(
            t.apply(&StackOp::Pop(x())).unwrap(),
            MemoryTree::empty().apply(&StackOp::Push(y())).unwrap()
        );
    }

    #[test]
    fn validate_flags_pointer_off_spine() {
        // root -> y(1), root -> x(2); vertex 1 is not on the path to latest
        let t = MemoryTree::from_parts(vec![(0, y()), (0, x())], 1);
        assert_eq!(
            t.validate(),
            vec![TreeViolation::DistinguishedOffSpine { vertex: 1 }]
        );
    }

    #[test]
    fn validate_flags_non_dfs_order() {
        // 0 -> 1 -> 2, 0 -> 3, then 1 -> 4 revisits a closed subtree
        let t = MemoryTree::from_parts(vec![(0, y()), (1, x()), (0, x()), (1, x())], 4);
        assert!(matches!(
            t.validate()[..],
            [TreeViolation::NotDepthFirst { vertex: 4, parent: 1 }]
        ));
    }

    #[test]
    fn validate_accepts_push_results() {
        let t = MemoryTree::empty().apply(&StackOp::Push(x())).unwrap();
        assert!(t.validate().is_empty());
    }

    #[test]
    fn extends_is_prefix_on_creation_order() {
        let a = MemoryTree::branch(&[y(), x()], 2);
        let b = MemoryTree::branch(&[y(), x(), x()], 3);
        assert!(b.extends(&a));
        assert!(!a.extends(&b));
        assert!(a.extends(&MemoryTree::empty()));
        let c = MemoryTree::branch(&[x(), x()], 2);
        assert!(!b.extends(&c));
    }

    #[test]
    fn edge_listing_marks_pointer() {
        let t = MemoryTree::branch(&[y(), x()], 1);
        assert_eq!(t.to_edge_listing(), "0 1* y\n1 2 x\n");
    }
}
