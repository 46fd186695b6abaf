//! Determinism and limited-erasing checks on every bundled machine, plus a
//! machine that fails both.

use nested_stack::fixtures;
use nested_stack::nsa::{self, Determinism, Erasing};

fn report(name: &str, m: &nsa::Machine) {
    let det = match nsa::check_deterministic(m) {
        Determinism::Deterministic => "deterministic".to_string(),
        Determinism::Conflict { state, first, second } => {
            format!("conflict at {} (edges {first}, {second})", m.state_name(state))
        }
    };
    let erasing = match nsa::check_limited_erasing(m) {
        Erasing::Bounded(k) => format!("erasing bound {k}"),
        Erasing::Unbounded { cycle } => format!("unbounded erasing, cycle {cycle:?}"),
    };
    println!("{name:<8} {} states, {:>2} edges  {det}; {erasing}", m.state_count(), m.edges().len());
}

fn main() {
    let names = ["fig2", "anbn", "dyck2", "z", "f2"];
    for (name, m) in names.iter().zip(fixtures::all()) {
        report(name, &m);
    }

    let eater = nsa::parse_machine(
        "states: 1\nstart: 1\nfinal: 1\ninput: a\nmemory: x\n\
         edge: 1 1 push x a\nedge: 1 1 pop x eps\nedge: 1 1 stay a\n",
    )
    .unwrap();
    report("eater", &eater);
}
