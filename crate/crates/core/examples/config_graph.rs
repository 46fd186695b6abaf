//! The explored configuration graph of fig2: size, structural checks, a lifted
//! path, and DOT output.
//!
//! `cargo run --example config_graph > cg.dot` writes the DOT to stdout.

use nested_stack::config_graph::{self, Horizon};
use nested_stack::fixtures;
use nested_stack::nsa;

fn main() {
    let m = fixtures::fig2();
    let cg = config_graph::build(&m, Horizon::tree_edges(4));
    eprintln!(
        "{} vertices, {} edges, truncated {}",
        cg.vertex_count(),
        cg.edges().len(),
        cg.truncated()
    );
    eprintln!("degrees: {:?}", config_graph::check_degrees(&cg));
    eprintln!("longest ε run: {:?}", config_graph::max_eps_run(&cg));

    let path = config_graph::lift_path(&m, &nsa::word("aabb"), 100).unwrap();
    let names: Vec<String> = path.iter().map(|s| s.config.name(&m)).collect();
    eprintln!("lift of aabb: ε1 -> {}", names.join(" -> "));

    print!("{}", config_graph::export_dot(&cg, &m));
}
