//! Window-scale geometry: ball sizes, separators between balls, ends, and a
//! quasi-isometry sample.

use nested_stack::group::{self, Group, GroupOracle};

fn main() {
    let groups = [
        ("Z", Group::abelian(1).unwrap()),
        ("Z^2", Group::abelian(2).unwrap()),
        ("F2", Group::free(2).unwrap()),
    ];
    for (name, g) in &groups {
        let sizes: Vec<usize> = (0..5)
            .map(|r| group::ball(g, &g.identity(), r, group::DEFAULT_MAX_VERTICES).unwrap().len())
            .collect();
        let ends = group::ends_probe(g, 2, 7, group::DEFAULT_MAX_VERTICES).unwrap();
        println!("{name:<4} balls {sizes:?}; outside B(2) within 7: {} unbounded", ends.unbounded);
    }

    println!();
    for (name, g) in &groups[1..] {
        let table = group::narrowness_probe(g, &[1, 2, 3], &|r| group::default_centers(g, r), 0);
        println!("{name:<4} separator sizes {:?}, trend {:?}", table.max_cut_by_radius(), table.trend());
    }

    let z = &groups[0].1;
    let el = |n: i64| {
        let l = if n >= 0 { "a" } else { "A" };
        z.canonical(&vec![l; n.unsigned_abs() as usize]).unwrap()
    };
    let samples: Vec<_> = (-4..=4).map(|n| (el(n), el(3 * n))).collect();
    let v = group::qi_check(&samples, 3, z, z, 20).unwrap();
    println!("\nn -> 3n on Z with k = 3: {} violations", v.len());
}
