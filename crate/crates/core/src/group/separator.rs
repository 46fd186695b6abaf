use std::collections::VecDeque;

use super::cayley::{ball, CayleyWindow, DEFAULT_MAX_VERTICES};
use super::{Element, GroupError, GroupOracle};

/// Minimum vertex cut between two balls inside a window around the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorReport {
    pub r: usize,
    pub window_r: usize,
    pub cut_size: usize,
    pub cut_set: Vec<Element>,
    /// Vertex-disjoint ball-to-ball paths found by the flow; equals
    /// `cut_size` on every successful run.
    pub disjoint_paths: usize,
    /// Some cut vertex lies on or next to the window boundary, so paths
    /// outside the window could make the true cut larger.
    pub window_limited: bool,
    pub window_vertices: usize,
}

const INF: u32 = u32::MAX;

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    // edge e and its reverse e ^ 1
    fn add(&mut self, u: usize, v: usize, c: u32) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn reachable(&self, s: usize) -> (Vec<bool>, Vec<usize>) {
        let mut seen = vec![false; self.head.len()];
        let mut via = vec![usize::MAX; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    via[v] = e;
                    queue.push_back(v);
                }
            }
        }
        (seen, via)
    }

    /// Edmonds-Karp; capacities on the unit vertex arcs keep the flow small.
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0;
        loop {
            let (seen, via) = self.reachable(s);
            if !seen[t] {
                return flow;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                if self.cap[e] != INF {
                    self.cap[e] -= 1;
                }
                if self.cap[e ^ 1] != INF {
                    self.cap[e ^ 1] += 1;
                }
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
    }
}

fn require_inside<O: GroupOracle>(
    oracle: &O,
    c: &Element,
    r: usize,
    window_r: usize,
) -> Result<(), GroupError> {
    if c.len() + r > window_r {
        return Err(GroupError::OutsideWindow {
            element: oracle.render(c),
            window_r,
        });
    }
    Ok(())
}

/// Minimum vertex separator between `B_r(c1)` and `B_r(c2)` in the window
/// `B_window_r(1)`, by max-flow on the vertex-split window graph with each
/// ball contracted to a terminal.
pub fn min_separator<O: GroupOracle>(
    oracle: &O,
    c1: &Element,
    c2: &Element,
    r: usize,
    window_r: usize,
) -> Result<SeparatorReport, GroupError> {
    let distance = oracle.distance(c1, c2);
    if distance <= 2 * r {
        return Err(GroupError::BallsOverlap { distance });
    }
    if distance == 2 * r + 1 {
        return Err(GroupError::BallsAdjacent);
    }
    require_inside(oracle, c1, r, window_r)?;
    require_inside(oracle, c2, r, window_r)?;
    let w = ball(oracle, &oracle.identity(), window_r, DEFAULT_MAX_VERTICES)?;
    separator_in_window(oracle, &w, c1, c2, r)
}

fn separator_in_window<O: GroupOracle>(
    oracle: &O,
    w: &CayleyWindow,
    c1: &Element,
    c2: &Element,
    r: usize,
) -> Result<SeparatorReport, GroupError> {
    let n = w.len();
    let members = |c: &Element| -> Result<Vec<bool>, GroupError> {
        let b = ball(oracle, c, r, DEFAULT_MAX_VERTICES)?;
        let mut inside = vec![false; n];
        for g in b.elements() {
            if let Some(i) = w.index_of(g) {
                inside[i] = true;
            }
        }
        Ok(inside)
    };
    let in1 = members(c1)?;
    let in2 = members(c2)?;

    // node 0 = source, 1 = sink, 2 + 2i = in(i), 3 + 2i = out(i)
    let node_in = |i: usize| {
        if in1[i] {
            0
        } else if in2[i] {
            1
        } else {
            2 + 2 * i
        }
    };
    let node_out = |i: usize| {
        if in1[i] {
            0
        } else if in2[i] {
            1
        } else {
            3 + 2 * i
        }
    };
    let mut net = Network::new(2 + 2 * n);
    for i in 0..n {
        if !in1[i] && !in2[i] {
            net.add(node_in(i), node_out(i), 1);
        }
        for &j in w.neighbors(i) {
            let (u, v) = (node_out(i), node_in(j));
            if u != v && u != 1 && v != 0 {
                net.add(u, v, INF);
            }
        }
    }
    let flow = net.max_flow(0, 1);
    let (seen, _) = net.reachable(0);
    let cut: Vec<usize> = (0..n)
        .filter(|&i| !in1[i] && !in2[i] && seen[2 + 2 * i] && !seen[3 + 2 * i])
        .collect();

    let disjoint_paths = count_disjoint_paths(&net, n, &in1, &in2);
    assert_eq!(cut.len(), flow, "cut size differs from flow value");
    assert_eq!(disjoint_paths, flow, "flow does not decompose into disjoint paths");
    let mut blocked = vec![false; n];
    for &c in &cut {
        blocked[c] = true;
    }
    let sources: Vec<usize> = (0..n).filter(|&i| in1[i]).collect();
    let reach = w.distances_avoiding(&sources, &blocked);
    assert!(
        (0..n).all(|i| !in2[i] || reach[i] == usize::MAX),
        "cut does not separate the balls"
    );

    let mut cut_set: Vec<Element> = cut.iter().map(|&i| w.element(i).clone()).collect();
    cut_set.sort();
    Ok(SeparatorReport {
        r,
        window_r: w.radius,
        cut_size: flow,
        window_limited: cut.iter().any(|&i| w.depth(i) + 1 >= w.radius),
        cut_set,
        disjoint_paths,
        window_vertices: n,
    })
}

/// Decomposes the flow into source-to-sink paths, checking that no window
/// vertex is used twice.
fn count_disjoint_paths(net: &Network, n: usize, in1: &[bool], in2: &[bool]) -> usize {
    // forward arcs have even index; the reverse residual is the flow carried
    let mut flow: Vec<u32> = (0..net.to.len())
        .map(|e| if e % 2 == 0 { net.cap[e ^ 1] } else { 0 })
        .collect();
    let mut used = vec![false; n];
    let mut paths = 0;
    let take = |flow: &mut Vec<u32>, u: usize| -> Option<usize> {
        let e = *net.head[u].iter().find(|&&e| flow[e] > 0)?;
        flow[e] -= 1;
        Some(net.to[e])
    };
    while let Some(mut v) = take(&mut flow, 0) {
        let ok = loop {
            if v == 1 {
                break true;
            }
            let i = (v - 2) / 2;
            if used[i] || in1[i] || in2[i] {
                break false;
            }
            used[i] = true;
            match take(&mut flow, v).and_then(|out| take(&mut flow, out)) {
                Some(next) => v = next,
                None => break false,
            }
        };
        if !ok {
            return usize::MAX;
        }
        paths += 1;
    }
    paths
}

/// Sample centers for radius `r`: each positive generator raised to the power
/// `2r + 2`, kept when that power is a geodesic of full length.
pub fn default_centers<O: GroupOracle>(oracle: &O, r: usize) -> Vec<Element> {
    let mut out = Vec::new();
    for g in 0..oracle.letters().len() {
        if oracle.inverse_gen(g) < g {
            continue;
        }
        let e = oracle.element(&vec![g; 2 * r + 2]);
        if e.len() == 2 * r + 2 && !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeCell {
    pub r: usize,
    pub center: Element,
    pub window_r: usize,
    pub result: Result<SeparatorReport, GroupError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Constant,
    StrictlyIncreasing,
    Other,
    /// fewer than two radii produced a value
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProbeTable {
    pub cells: Vec<ProbeCell>,
}

impl ProbeTable {
    /// Largest cut per radius, over the cells that succeeded.
    pub fn max_cut_by_radius(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for c in &self.cells {
            let Ok(rep) = &c.result else { continue };
            match out.iter_mut().find(|(r, _)| *r == c.r) {
                Some((_, m)) => *m = (*m).max(rep.cut_size),
                None => out.push((c.r, rep.cut_size)),
            }
        }
        out.sort_unstable();
        out
    }

    pub fn max_cut(&self) -> Option<usize> {
        self.max_cut_by_radius().into_iter().map(|(_, m)| m).max()
    }

    pub fn trend(&self) -> Trend {
        let v: Vec<usize> = self.max_cut_by_radius().into_iter().map(|(_, m)| m).collect();
        if v.len() < 2 {
            Trend::Undetermined
        } else if v.windows(2).all(|p| p[0] == p[1]) {
            Trend::Constant
        } else if v.windows(2).all(|p| p[0] < p[1]) {
            Trend::StrictlyIncreasing
        } else {
            Trend::Other
        }
    }

    pub fn window_limited(&self) -> bool {
        self.cells
            .iter()
            .any(|c| matches!(&c.result, Ok(r) if r.window_limited))
    }
}

/// Separates `B_r(1)` from `B_r(c)` for every radius and sampled center.
/// The window for a cell is `|c| + r + margin`. Failing cells are recorded
/// and the probe continues.
pub fn narrowness_probe<O: GroupOracle>(
    oracle: &O,
    radii: &[usize],
    centers: &dyn Fn(usize) -> Vec<Element>,
    margin: usize,
) -> ProbeTable {
    let mut table = ProbeTable::default();
    for &r in radii {
        let mut window_cache: Option<CayleyWindow> = None;
        for c in centers(r) {
            let window_r = c.len() + r + margin;
            let result = (|| {
                let one = oracle.identity();
                let distance = oracle.distance(&one, &c);
                if distance <= 2 * r {
                    return Err(GroupError::BallsOverlap { distance });
                }
                if distance == 2 * r + 1 {
                    return Err(GroupError::BallsAdjacent);
                }
                if window_cache.as_ref().map(|w| w.radius) != Some(window_r) {
                    window_cache = Some(ball(oracle, &one, window_r, DEFAULT_MAX_VERTICES)?);
                }
                let w = window_cache.as_ref().expect("just built");
                separator_in_window(oracle, w, &one, &c, r)
            })();
            table.cells.push(ProbeCell {
                r,
                center: c,
                window_r,
                result,
            });
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn pow(g: &Group, letter: &str, n: usize) -> Element {
        g.canonical(&vec![letter; n]).unwrap()
    }

    #[test]
    fn tree_separator_is_one_vertex() {
        let f2 = Group::free(2).unwrap();
        let rep = min_separator(&f2, &f2.identity(), &pow(&f2, "a", 8), 2, 12).unwrap();
        assert_eq!(rep.cut_size, 1);
        assert_eq!(rep.disjoint_paths, 1);
        assert!(!rep.window_limited);
        let cut = &rep.cut_set[0];
        assert!((3..=5).contains(&cut.len()));
    }

    #[test]
    fn grid_separator_grows() {
        let z2 = Group::abelian(2).unwrap();
        let rep = min_separator(&z2, &z2.identity(), &pow(&z2, "a", 10), 2, 16).unwrap();
        assert!(rep.cut_size >= 5, "{rep:?}");
    }

    #[test]
    fn ball_errors() {
        let z = Group::abelian(1).unwrap();
        let one = z.identity();
        assert_eq!(
            min_separator(&z, &one, &pow(&z, "a", 1), 0, 5),
            Err(GroupError::BallsAdjacent)
        );
        assert_eq!(
            min_separator(&z, &one, &pow(&z, "a", 2), 1, 5),
            Err(GroupError::BallsOverlap { distance: 2 })
        );
        assert!(matches!(
            min_separator(&z, &one, &pow(&z, "a", 6), 1, 5),
            Err(GroupError::OutsideWindow { .. })
        ));
    }

    #[test]
    fn separator_in_z() {
        let z = Group::abelian(1).unwrap();
        let rep = min_separator(&z, &z.identity(), &pow(&z, "a", 6), 1, 9).unwrap();
        assert_eq!(rep.cut_size, 1);
    }

    #[test]
    fn trivial_group_has_no_centers() {
        let t = Group::free(0).unwrap();
        let table = narrowness_probe(&t, &[1, 2, 3], &|r| default_centers(&t, r), 0);
        assert!(table.cells.is_empty());
        assert_eq!(table.trend(), Trend::Undetermined);
    }
}
