//! The non-erasing quotient of pushdown configuration graphs is a tree with
//! bounded classes. Forcing the construction on fig2 gives a tree whose classes
//! grow with the horizon, while fig2's own graph keeps growing cycles.

use nested_stack::config_graph::{self, Horizon};
use nested_stack::fixtures;
use nested_stack::pda;

fn main() {
    for (name, m) in [("anbn", fixtures::anbn()), ("dyck2", fixtures::dyck2())] {
        for h in [6, 8, 10] {
            let cg = config_graph::build(&m, Horizon::tree_edges(h));
            let q = pda::quotient(&cg, &pda::nonerasing_classes(&cg, &m).unwrap());
            println!(
                "{name:<6} horizon {h:>2}: {:>5} configurations, {:>5} classes, {:?}, distortion {}",
                cg.vertex_count(),
                q.vertex_count(),
                pda::check_tree(&q),
                pda::quotient_distortion(&q)
            );
        }
    }

    let m = fixtures::fig2();
    for h in [4, 6, 8, 10] {
        let cg = config_graph::build(&m, Horizon::tree_edges(h));
        let q = pda::quotient(&cg, &pda::nonerasing_classes_unchecked(&cg));
        let cycle = pda::longest_simple_cycle(&cg, 4).map(|c| c.len()).unwrap_or(0);
        println!(
            "fig2   horizon {h:>2}: longest simple cycle {cycle:>2}, forced quotient {:?}, distortion {}",
            pda::check_tree(&q),
            pda::quotient_distortion(&q)
        );
    }
}
