//! The deterministic machine for (aⁿbⁿcⁿdⁿ)*: membership, enumeration and a
//! step-by-step run.

use nested_stack::fixtures;
use nested_stack::nsa::{self, ResourceCaps};

fn main() {
    let m = fixtures::fig2();
    let caps = ResourceCaps::default();

    for w in ["", "abcd", "aabbccdd", "abcdaabbccdd", "aabbcd", "abdc"] {
        let r = nsa::accepts(&m, &nsa::word(w), caps);
        println!("{:>14}  {}", if w.is_empty() { "ε" } else { w }, r.verdict);
    }

    let words = nsa::enumerate_accepted(&m, 12, caps).expect("within caps");
    println!("\naccepted words up to length 12:");
    for w in &words {
        println!("  {}", nsa::word_to_string(w));
    }

    println!("\nrun on aabbccdd:");
    let trace = nsa::run_trace(&m, &nsa::word("aabbccdd"), caps).expect("deterministic");
    print!("{}", trace.render(&m));
}
