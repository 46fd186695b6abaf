//! Seeded law checks for the stack-operation monoid on random memory trees.
//!
//! Trees are generated structurally (each new vertex hangs off the current
//! root-to-latest path), never through [`MemoryTree::apply`], so the checks do
//! not share a code path with the operations under test.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::memory_tree::{MemorySymbol, MemoryTree, StackOp};

/// A uniformly shaped random memory tree with at most `max_edges` edges.
pub fn random_tree<R: Rng>(rng: &mut R, alphabet: &[MemorySymbol], max_edges: usize) -> MemoryTree {
    let n = rng.gen_range(0..=max_edges);
    let mut spine = vec![0usize];
    let mut edges = Vec::with_capacity(n);
    for v in 1..=n {
        let k = rng.gen_range(0..spine.len());
        let label = alphabet[rng.gen_range(0..alphabet.len())].clone();
        edges.push((spine[k], label));
        spine.truncate(k + 1);
        spine.push(v);
    }
    let distinguished = spine[rng.gen_range(0..spine.len())];
    MemoryTree::from_parts(edges, distinguished)
}

/// Every generator over `alphabet`, plus `up eps` and `stay`.
pub fn generators(alphabet: &[MemorySymbol]) -> Vec<StackOp> {
    let mut ops = vec![StackOp::Up(None), StackOp::Stay];
    for x in alphabet {
        ops.push(StackOp::Down(x.clone()));
        ops.push(StackOp::Up(Some(x.clone())));
        ops.push(StackOp::Push(x.clone()));
        ops.push(StackOp::Pop(x.clone()));
    }
    ops
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub trees: usize,
    pub distinct_trees: usize,
    pub invalid_inputs: usize,
    pub injectivity: usize,
    pub push_pop: usize,
    pub pop_push: usize,
    pub closure: usize,
    pub up_after_pop: usize,
}

impl LawReport {
    pub fn violations(&self) -> usize {
        self.invalid_inputs + self.injectivity + self.push_pop + self.pop_push + self.closure + self.up_after_pop
    }
}

/// Checks partial injectivity of every generator, `pop x ∘ push x = 1`,
/// `push x ∘ pop x = 1` where defined, closure of valid trees, and that
/// `up x` is undefined on the range of `pop x` for single-branch trees (on
/// general trees the parent of a popped leaf may keep older children).
pub fn check_monoid_laws(trees: usize, seed: u64, alphabet: &[MemorySymbol], max_edges: usize) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<MemoryTree> = (0..trees)
        .map(|_| random_tree(&mut rng, alphabet, max_edges))
        .collect();
    let distinct: BTreeSet<MemoryTree> = sample.iter().cloned().collect();
    let mut report = LawReport {
        trees,
        distinct_trees: distinct.len(),
        ..LawReport::default()
    };

    for op in generators(alphabet) {
        let mut preimage: HashMap<MemoryTree, &MemoryTree> = HashMap::new();
        for t in &distinct {
            let Some(r) = t.apply(&op) else { continue };
            if !r.validate().is_empty() {
                report.closure += 1;
            }
            if let Some(prev) = preimage.insert(r, t) {
                if prev != t {
                    report.injectivity += 1;
                }
            }
        }
    }

    for t in &distinct {
        if !t.validate().is_empty() {
            report.invalid_inputs += 1;
            continue;
        }
        for x in alphabet {
            let pushed = t.apply(&StackOp::Push(x.clone()));
            let back = pushed.as_ref().and_then(|p| p.apply(&StackOp::Pop(x.clone())));
            if back.as_ref() != Some(t) {
                report.push_pop += 1;
            }
            if let Some(popped) = t.apply(&StackOp::Pop(x.clone())) {
                if popped.apply(&StackOp::Push(x.clone())).as_ref() != Some(t) {
                    report.pop_push += 1;
                }
                if t.single_branch().is_some() && popped.apply(&StackOp::Up(Some(x.clone()))).is_some() {
                    report.up_after_pop += 1;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alpha = [MemorySymbol::new("x"), MemorySymbol::new("y")];
        for _ in 0..500 {
            let t = random_tree(&mut rng, &alpha, 8);
            assert!(t.validate().is_empty(), "{t}");
        }
    }

    #[test]
    fn laws_hold_on_a_small_sample() {
        let alpha = [MemorySymbol::new("x"), MemorySymbol::new("y")];
        let r = check_monoid_laws(2000, 1, &alpha, 6);
        assert_eq!(r.violations(), 0, "{r:?}");
        assert!(r.distinct_trees > 100);
    }

    #[test]
    fn up_after_pop_on_a_branching_tree() {
        let x = MemorySymbol::new("x");
        let ops = [
            StackOp::Push(x.clone()),
            StackOp::Push(x.clone()),
            StackOp::Down(x.clone()),
            StackOp::Push(x.clone()),
            StackOp::Pop(x.clone()),
        ];
        let t = MemoryTree::empty().apply_word(&ops).unwrap();
        assert!(t.apply(&StackOp::Up(Some(x))).is_some());
    }
}
