//! Inverse images of the fig2 language under homomorphisms: a letter map, an
//! expansion, and p ↦ abcd.

use nested_stack::fixtures;
use nested_stack::hom::{self, Elementary, ExpansionStyle};
use nested_stack::nsa::{self, ResourceCaps};

fn show(name: &str, text: &str) {
    let m = fixtures::fig2();
    let f = hom::parse_hom(text).unwrap();
    println!("== {name}");
    for e in hom::factor(&f) {
        match e {
            Elementary::Expansion(x) => println!("   expand {} -> {} {}", x.letter, x.first, x.second),
            Elementary::LetterMap(g) => println!("   letter map on {} letters", g.source().len()),
        }
    }
    for style in [ExpansionStyle::Direct, ExpansionStyle::Wrapped] {
        let p = hom::preimage_with(&m, &f, style).unwrap();
        let det = nsa::check_deterministic(&p) == nsa::Determinism::Deterministic;
        let words = nsa::enumerate_accepted(&p, 6, ResourceCaps::default()).unwrap();
        let shown: Vec<String> = words.iter().map(|w| nsa::word_to_string(w)).collect();
        println!("   {style:?}: {} states, deterministic {det}: {}", p.state_count(), shown.join(", "));
    }
}

fn main() {
    show("p, q -> a", include_str!("../fixtures/hom_pq.hom"));
    show("n -> c d", include_str!("../fixtures/hom_expand.hom"));
    show("p -> a b c d", include_str!("../fixtures/hom_block.hom"));
}
