//! Projecting configuration graphs onto Cayley diagrams. Word-problem machines
//! project consistently; fig2 does not.

use nested_stack::config_graph::{self, Horizon};
use nested_stack::fixtures;
use nested_stack::group::{Group, GroupOracle};

fn main() {
    let z = Group::abelian(1).unwrap();
    let m = fixtures::z_word_problem();
    let cg = config_graph::build(&m, Horizon::tree_edges(5));
    let p = config_graph::project(&cg, &z).unwrap();
    for v in 0..cg.vertex_count() {
        println!("{:>10} -> {}", cg.vertex(v).name(&m), z.render(&p.images[v]));
    }

    let f2 = Group::free(2).unwrap();
    let m = fixtures::f2_word_problem();
    let cg = config_graph::build(&m, Horizon::tree_edges(6));
    let p = config_graph::project(&cg, &f2).unwrap();
    println!("\nfree group: {} vertices, {} edges consistent", cg.vertex_count(), p.edges_checked);

    let m = fixtures::fig2();
    let cg = config_graph::build(&m, Horizon::tree_edges(6));
    match config_graph::project(&cg, &Group::abelian(4).unwrap()) {
        Ok(_) => println!("fig2: consistent"),
        Err(e) => println!("fig2: {e}"),
    }
}
