use super::cayley::{ball, DEFAULT_MAX_VERTICES};
use super::{Element, GroupError, GroupOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QiSide {
    /// `d/k - k > d'`
    Lower,
    /// `d' > k d + k`
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QiViolation {
    pub i: usize,
    pub j: usize,
    pub source_distance: usize,
    pub target_distance: usize,
    pub side: QiSide,
}

fn check_window<O: GroupOracle>(o: &O, g: &Element, window_r: usize) -> Result<(), GroupError> {
    if g.len() > window_r {
        return Err(GroupError::OutsideWindow {
            element: o.render(g),
            window_r,
        });
    }
    Ok(())
}

/// Checks `(1/k) d(x,y) - k ≤ d(φx,φy) ≤ k d(x,y) + k` on every pair of
/// samples `(x, φx)`. Points farther than `window_r` from the identity are
/// rejected.
pub fn qi_check<S: GroupOracle, T: GroupOracle>(
    samples: &[(Element, Element)],
    k: u64,
    source: &S,
    target: &T,
    window_r: usize,
) -> Result<Vec<QiViolation>, GroupError> {
    for (x, y) in samples {
        check_window(source, x, window_r)?;
        check_window(target, y, window_r)?;
    }
    let mut out = Vec::new();
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let d = source.distance(&samples[i].0, &samples[j].0) as u64;
            let e = target.distance(&samples[i].1, &samples[j].1) as u64;
            // d/k - k <= e  <=>  d <= k e + k²
            let side = if d > k * e + k * k {
                Some(QiSide::Lower)
            } else if e > k * d + k {
                Some(QiSide::Upper)
            } else {
                None
            };
            if let Some(side) = side {
                out.push(QiViolation {
                    i,
                    j,
                    source_distance: d as usize,
                    target_distance: e as usize,
                    side,
                });
            }
        }
    }
    Ok(out)
}

/// Elements of the target ball of radius `window_r` that are farther than `k`
/// from every image.
pub fn qi_density<T: GroupOracle>(
    images: &[Element],
    k: usize,
    target: &T,
    window_r: usize,
) -> Result<Vec<Element>, GroupError> {
    let w = ball(target, &target.identity(), window_r, DEFAULT_MAX_VERTICES)?;
    Ok(w
        .elements()
        .iter()
        .filter(|g| images.iter().all(|y| target.distance(g, y) > k))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    #[test]
    fn identity_map_is_isometric() {
        let f2 = Group::free(2).unwrap();
        let w = ball(&f2, &f2.identity(), 3, 1000).unwrap();
        let samples: Vec<_> = w.elements().iter().map(|g| (g.clone(), g.clone())).collect();
        assert!(qi_check(&samples, 1, &f2, &f2, 3).unwrap().is_empty());
        assert!(qi_density(w.elements(), 1, &f2, 3).unwrap().is_empty());
    }

    #[test]
    fn collapse_to_trivial_group() {
        let f2 = Group::free(2).unwrap();
        let t = Group::free(0).unwrap();
        let samples = vec![
            (f2.identity(), t.identity()),
            (f2.canonical(&["a", "a", "b", "b"]).unwrap(), t.identity()),
        ];
        let v = qi_check(&samples, 1, &f2, &t, 10).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].side, QiSide::Lower);
        assert_eq!((v[0].source_distance, v[0].target_distance), (4, 0));
    }

    #[test]
    fn doubling_on_z() {
        let z = Group::abelian(1).unwrap();
        let el = |n: i64| {
            let l = if n >= 0 { "a" } else { "A" };
            z.canonical(&vec![l; n.unsigned_abs() as usize]).unwrap()
        };
        let samples: Vec<_> = (-5..=5).map(|n| (el(n), el(2 * n))).collect();
        assert!(qi_check(&samples, 2, &z, &z, 10).unwrap().is_empty());
        let images: Vec<_> = samples.iter().map(|s| s.1.clone()).collect();
        assert!(qi_density(&images, 2, &z, 10).unwrap().is_empty());
        assert_eq!(qi_density(&images, 0, &z, 10).unwrap().len(), 10);
        assert!(qi_check(&samples, 2, &z, &z, 5).is_err());
    }
}
