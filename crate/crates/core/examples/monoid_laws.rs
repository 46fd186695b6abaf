//! Stack operations on memory trees, and the seeded law check.
//!
//! Run with an optional seed: `cargo run --example monoid_laws -- 7`.

use nested_stack::laws;
use nested_stack::memory_tree::{MemorySymbol, MemoryTree, StackOp};

fn main() {
    let (x, y) = (MemorySymbol::new("x"), MemorySymbol::new("y"));
    let ops = [
        StackOp::Push(y.clone()),
        StackOp::Push(x.clone()),
        StackOp::Push(x.clone()),
        StackOp::Down(x.clone()),
        StackOp::Down(x.clone()),
    ];
    let mut t = MemoryTree::empty();
    println!("{t}");
    for op in &ops {
        t = t.apply(op).expect("defined");
        println!("{op:<8} {t}  {}", t.name_with_state(""));
    }
    println!("up eps on T0: {:?}", MemoryTree::empty().apply(&StackOp::Up(None)));

    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let report = laws::check_monoid_laws(10_000, seed, &[x, y], 8);
    println!("\nseed {seed}: {report:?}");
    println!("violations: {}", report.violations());
}
