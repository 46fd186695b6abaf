use std::collections::{HashMap, VecDeque};

use super::{Element, GroupError, GroupOracle};

pub const DEFAULT_MAX_VERTICES: usize = 2_000_000;

/// A metric ball in a Cayley graph, with the generator edges between its
/// vertices. Vertices are stored in breadth-first order from the center.
#[derive(Clone, Debug)]
pub struct CayleyWindow {
    pub center: Element,
    pub radius: usize,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    dist: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl CayleyWindow {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    /// Distance from the window's center.
    pub fn depth(&self, i: usize) -> usize {
        self.dist[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices at exactly the window radius.
    pub fn boundary(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.dist[i] == self.radius)
    }

    /// Breadth-first distances inside the window from `sources`, never
    /// entering `blocked` vertices. `usize::MAX` marks unreachable vertices.
    pub fn distances_avoiding(&self, sources: &[usize], blocked: &[bool]) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if !blocked[s] && d[s] == usize::MAX {
                d[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !blocked[v] && d[v] == usize::MAX {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        d
    }
}

/// The closed ball of radius `r` around `center`, built by breadth-first
/// search over canonical forms.
pub fn ball<O: GroupOracle>(
    oracle: &O,
    center: &Element,
    r: usize,
    max_vertices: usize,
) -> Result<CayleyWindow, GroupError> {
    let gens = oracle.letters().len();
    let mut elements = vec![center.clone()];
    let mut index = HashMap::from([(center.clone(), 0usize)]);
    let mut dist = vec![0usize];
    let mut i = 0;
    while i < elements.len() {
        if dist[i] < r {
            for g in 0..gens {
                let y = oracle.mul_gen(&elements[i], g);
                if !index.contains_key(&y) {
                    if elements.len() >= max_vertices {
                        return Err(GroupError::WindowTooLarge {
                            limit: max_vertices,
                        });
                    }
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                    dist.push(dist[i] + 1);
                }
            }
        }
        i += 1;
    }
    let mut adj = vec![Vec::new(); elements.len()];
    for (i, x) in elements.iter().enumerate() {
        for g in 0..gens {
            if let Some(&j) = index.get(&oracle.mul_gen(x, g)) {
                if j != i && !adj[i].contains(&j) {
                    adj[i].push(j);
                }
            }
        }
    }
    Ok(CayleyWindow {
        center: center.clone(),
        radius: r,
        elements,
        index,
        dist,
        adj,
    })
}

/// Components of the window minus the closed ball of radius `r` around the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndsReport {
    pub r: usize,
    pub window_r: usize,
    /// components reaching the window boundary
    pub unbounded: usize,
    /// components that stay strictly inside the window
    pub finite: usize,
    pub unbounded_sizes: Vec<usize>,
    pub finite_sizes: Vec<usize>,
}

pub fn ends_probe<O: GroupOracle>(
    oracle: &O,
    r: usize,
    window_r: usize,
    max_vertices: usize,
) -> Result<EndsReport, GroupError> {
    if window_r <= r + 2 {
        return Err(GroupError::WindowTooSmall { r, window_r });
    }
    let w = ball(oracle, &oracle.identity(), window_r, max_vertices)?;
    let mut comp = vec![usize::MAX; w.len()];
    let mut report = EndsReport {
        r,
        window_r,
        unbounded: 0,
        finite: 0,
        unbounded_sizes: Vec::new(),
        finite_sizes: Vec::new(),
    };
    let mut c = 0;
    for s in 0..w.len() {
        if w.depth(s) <= r || comp[s] != usize::MAX {
            continue;
        }
        let mut size = 0;
        let mut touches = false;
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(u) = stack.pop() {
            size += 1;
            touches |= w.depth(u) == window_r;
            for &v in w.neighbors(u) {
                if w.depth(v) > r && comp[v] == usize::MAX {
                    comp[v] = c;
                    stack.push(v);
                }
            }
        }
        if touches {
            report.unbounded += 1;
            report.unbounded_sizes.push(size);
        } else {
            report.finite += 1;
            report.finite_sizes.push(size);
        }
        c += 1;
    }
    report.unbounded_sizes.sort_unstable();
    report.finite_sizes.sort_unstable();
    Ok(report)
}
