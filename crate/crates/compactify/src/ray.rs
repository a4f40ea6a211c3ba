//! Finitely presented ray systems.
//!
//! A ray presentation describes a countable system whose forward orbits never
//! reach the star: an infinite ray `b_0 → b_1 → b_2 → …` together with finite
//! trees of extra points hanging off the first `prefix` ray nodes. Beyond the
//! explicit prefix every branch is bare (exactly the ray node itself), so the
//! whole system is captured by a finite description plus a tail schema.
//!
//! Explicit points carry global ids: ray node `b_n` is id `n` for
//! `n < prefix`, and the extra branch nodes use ids disjoint from the ray
//! prefix (and from each other). The star is implicit and never an id.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Point;
use crate::system::ConditionReport;

/// A finite rooted tree of extra points attached to one ray node.
///
/// `nodes` lists the non-root points; `parent` maps each of them to its
/// parent, which is either another listed node or the ray node the branch is
/// rooted at. Edges are oriented toward the root: `parent` IS the selfmap on
/// the branch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchTree {
    pub nodes: Vec<Point>,
    pub parent: BTreeMap<Point, Point>,
}

impl BranchTree {
    /// A bare branch with no extra points.
    pub fn bare() -> Self {
        BranchTree::default()
    }
}

/// A ray system: `prefix` explicit ray nodes with their branch trees, a bare
/// tail from `prefix` on, and the implicit star fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayPresentation {
    pub prefix: usize,
    pub branches: Vec<BranchTree>,
}

impl RayPresentation {
    /// The bare ray: no explicit branches at all.
    pub fn bare_ray() -> Self {
        RayPresentation {
            prefix: 0,
            branches: Vec::new(),
        }
    }

    pub fn new(prefix: usize, branches: Vec<BranchTree>) -> Result<Self> {
        let ray = RayPresentation { prefix, branches };
        ray.validate()?;
        Ok(ray)
    }

    /// Checks every structural invariant of the presentation.
    pub fn validate(&self) -> Result<()> {
        if self.branches.len() != self.prefix {
            return Err(Error::InvalidPresentation(format!(
                "prefix is {} but {} branch trees are given",
                self.prefix,
                self.branches.len()
            )));
        }
        let mut seen: BTreeSet<Point> = BTreeSet::new();
        for (n, branch) in self.branches.iter().enumerate() {
            let node_set: BTreeSet<Point> = branch.nodes.iter().copied().collect();
            if node_set.len() != branch.nodes.len() {
                return Err(Error::InvalidPresentation(format!(
                    "branch {n}: duplicate node ids"
                )));
            }
            for &x in &branch.nodes {
                if x < self.prefix {
                    return Err(Error::InvalidPresentation(format!(
                        "branch {n}: node {x} collides with ray node b_{x}"
                    )));
                }
                if !seen.insert(x) {
                    return Err(Error::InvalidPresentation(format!(
                        "branch {n}: node {x} already belongs to another branch"
                    )));
                }
            }
            if branch.parent.len() != branch.nodes.len()
                || !branch.parent.keys().all(|k| node_set.contains(k))
            {
                return Err(Error::InvalidPresentation(format!(
                    "branch {n}: parent map is not total on its nodes"
                )));
            }
            for (&x, &p) in &branch.parent {
                let to_root = p == n && n < self.prefix;
                if !to_root && !node_set.contains(&p) {
                    return Err(Error::InvalidPresentation(format!(
                        "branch {n}: node {x} maps to {p}, which is neither a \
                         branch node nor the root b_{n} (the ray never reaches the star)"
                    )));
                }
            }
            // every node must reach the root without cycling
            for &start in &branch.nodes {
                let mut hops = 0usize;
                let mut x = start;
                loop {
                    let p = branch.parent[&x];
                    if p == n {
                        break;
                    }
                    x = p;
                    hops += 1;
                    if hops > branch.nodes.len() {
                        return Err(Error::InvalidPresentation(format!(
                            "branch {n}: node {start} never reaches the root (cycle)"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Tree depth of each node of branch `n` (root `b_n` has depth 0).
    ///
    /// Only meaningful on validated presentations; nodes on a parent cycle
    /// (which `validate` rejects) are left out rather than looped on.
    pub fn branch_depths(&self, n: usize) -> BTreeMap<Point, usize> {
        let branch = &self.branches[n];
        let mut depths: BTreeMap<Point, usize> = BTreeMap::new();
        // parents come earlier on the path to the root; each pass settles at
        // least one more tree level
        for _ in 0..=branch.nodes.len() {
            for &x in &branch.nodes {
                if depths.contains_key(&x) {
                    continue;
                }
                let p = branch.parent[&x];
                if p == n {
                    depths.insert(x, 1);
                } else if let Some(&dp) = depths.get(&p) {
                    depths.insert(x, dp + 1);
                }
            }
            if depths.len() == branch.nodes.len() {
                break;
            }
        }
        depths
    }

    /// Maximum tree depth over all explicit branches (0 if all are bare).
    pub fn max_branch_depth(&self) -> usize {
        (0..self.branches.len())
            .map(|n| self.branch_depths(n).values().copied().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// All explicit points: ray prefix nodes plus branch nodes.
    pub fn explicit_points(&self) -> BTreeSet<Point> {
        let mut points: BTreeSet<Point> = (0..self.prefix).collect();
        for branch in &self.branches {
            points.extend(branch.nodes.iter().copied());
        }
        points
    }

    /// The selfmap on explicit points. Branch nodes map to their parent; ray
    /// node `b_m` maps to `b_{m+1}`, which is `None` when it falls into the
    /// implicit tail.
    pub fn apply_explicit(&self, x: Point) -> Option<Point> {
        if x < self.prefix {
            let next = x + 1;
            return (next < self.prefix).then_some(next);
        }
        for branch in &self.branches {
            if let Some(&p) = branch.parent.get(&x) {
                return Some(p);
            }
        }
        None
    }
}

/// Decides the shrinking condition for a ray presentation.
///
/// Every valid presentation satisfies it: each branch has finite depth and
/// the tail is bare, so the iterated images shrink to the implicit star. The
/// report is symbolic — the star has no index, so `fixed_point` is `None` and
/// `eventual_image` is empty; `stabilized_at` is the maximum branch depth
/// plus the prefix length.
pub fn check_condition_ray(ray: &RayPresentation) -> Result<ConditionReport> {
    ray.validate()?;
    Ok(ConditionReport {
        holds: true,
        fixed_point: None,
        stabilized_at: ray.max_branch_depth() + ray.prefix,
        eventual_image: BTreeSet::new(),
    })
}


#[cfg(test)]
mod tests {
    use super::testutil::single_node_ray;
    use super::*;

    #[test]
    fn bare_ray_holds() {
        let report = check_condition_ray(&RayPresentation::bare_ray()).unwrap();
        assert!(report.holds);
        assert_eq!(report.fixed_point, None);
        assert_eq!(report.stabilized_at, 0);
        assert!(report.eventual_image.is_empty());
    }

    #[test]
    fn single_attached_node_accounts_depth() {
        let report = check_condition_ray(&single_node_ray()).unwrap();
        assert!(report.holds);
        assert_eq!(report.stabilized_at, 3); // depth 1 + prefix 2
    }

    #[test]
    fn branch_node_mapping_to_star_is_rejected() {
        // no id exists for the star; a parent outside nodes ∪ {root} stands in
        let bad = RayPresentation {
            prefix: 1,
            branches: vec![BranchTree {
                nodes: vec![7],
                parent: BTreeMap::from([(7, 99)]),
            }],
        };
        assert!(matches!(
            check_condition_ray(&bad),
            Err(Error::InvalidPresentation(_))
        ));
    }

    #[test]
    fn rejects_node_colliding_with_ray() {
        let bad = RayPresentation {
            prefix: 2,
            branches: vec![
                BranchTree::bare(),
                BranchTree {
                    nodes: vec![0],
                    parent: BTreeMap::from([(0, 1)]),
                },
            ],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rejects_cycle_in_branch() {
        let bad = RayPresentation {
            prefix: 1,
            branches: vec![BranchTree {
                nodes: vec![5, 6],
                parent: BTreeMap::from([(5, 6), (6, 5)]),
            }],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn explicit_selfmap() {
        let ray = single_node_ray();
        assert_eq!(ray.apply_explicit(0), Some(1));
        assert_eq!(ray.apply_explicit(1), None); // b_1 -> b_2 is in the tail
        assert_eq!(ray.apply_explicit(5), Some(1));
        assert_eq!(ray.explicit_points(), BTreeSet::from([0, 1, 5]));
    }
}
