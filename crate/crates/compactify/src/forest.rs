//! Forest decomposition of a system satisfying the shrinking condition.
//!
//! Away from the star, two points are equivalent when their forward orbits
//! merge before reaching it; the classes of this relation are the trees of
//! the forest. A class of the first kind contains a point `z` that maps
//! directly to the star, and splits into the exact-depth preimage levels of
//! `z`; those levels with the restricted map form a chain. A class of the
//! second kind never reaches the star — in a ray presentation it splits into
//! the branches hanging off the ray nodes, each again a chain.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::partition::Point;
use crate::ray::RayPresentation;
use crate::system::{check_condition, SelfmapSystem};

/// Whether a class reaches the star in finitely many steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    First,
    Second,
}

/// One tree of the forest: its members, its kind, and its seed (the point
/// mapping to the star for first-kind classes).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub members: BTreeSet<Point>,
    pub kind: ClassKind,
    pub seed: Point,
}

/// The forest: the star plus the classes partitioning everything else,
/// sorted by minimum member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecomposition {
    pub star: Point,
    pub classes: Vec<OrbitClass>,
}

/// Plain union-find with path halving.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Splits a system into its grand-orbit classes.
///
/// Points `x ≠ star` with `T(x) ≠ star` are united with their image; the
/// resulting components are exactly the classes of the merge relation. Each
/// class is classified by whether it owns a point of `T⁻¹(star) \ {star}`,
/// the seed being the least such point.
pub fn decompose(system: &SelfmapSystem) -> Result<ClassDecomposition> {
    let report = check_condition(system);
    let star = match (report.holds, report.fixed_point) {
        (true, Some(star)) => star,
        _ => {
            return Err(Error::ConditionFails(format!(
                "eventual image is {:?}, not a single fixed point",
                report.eventual_image
            )))
        }
    };

    let mut uf = UnionFind::new(system.size());
    for x in system.points() {
        let tx = system.apply(x);
        if x != star && tx != star {
            uf.union(x, tx);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Point>> = BTreeMap::new();
    for x in system.points() {
        if x != star {
            groups.entry(uf.find(x)).or_default().insert(x);
        }
    }
    let classes = groups
        .into_values()
        .map(|members| {
            let seed = members
                .iter()
                .copied()
                .find(|&z| system.apply(z) == star)
                .unwrap_or_else(|| *members.first().expect("nonempty class"));
            let kind = if system.apply(seed) == star {
                ClassKind::First
            } else {
                ClassKind::Second
            };
            OrbitClass {
                members,
                kind,
                seed,
            }
        })
        .collect();
    Ok(ClassDecomposition { star, classes })
}

/// Builds the level chain of a first-kind class: level `n` is the set of
/// points exactly `n` steps above the seed, until the first empty level.
pub fn first_kind_chain(system: &SelfmapSystem, class: &OrbitClass) -> Result<Chain> {
    if class.kind != ClassKind::First {
        return Err(Error::NotFirstKind(format!(
            "class with members {:?}",
            class.members
        )));
    }
    // children lists make each preimage level a single scan
    let mut children: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    for &x in &class.members {
        children.entry(system.apply(x)).or_default().push(x);
    }

    let mut levels: Vec<BTreeSet<Point>> = vec![BTreeSet::from([class.seed])];
    let mut maps: Vec<BTreeMap<Point, Point>> = Vec::new();
    loop {
        let last = levels.last().expect("at least the seed level");
        let mut next = BTreeSet::new();
        let mut map = BTreeMap::new();
        for &y in last {
            for &x in children.get(&y).into_iter().flatten() {
                next.insert(x);
                map.insert(x, y);
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
        maps.push(map);
    }
    Chain::new(levels, maps)
}

/// One branch of a second-kind class: the ray node it grows out of, its
/// exact-depth level sets, and the induced chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchStructure {
    pub ray_index: usize,
    pub level_sets: Vec<BTreeSet<Point>>,
    pub chain: Chain,
}

/// Computes the explicit branches of a ray presentation. Branch `n` has
/// level `0` equal to the ray node itself and level `k` equal to the extra
/// nodes at tree depth `k`; beyond the prefix every branch is the bare
/// singleton covered by the tail schema.
pub fn second_kind_branches(ray: &RayPresentation) -> Result<Vec<BranchStructure>> {
    ray.validate()?;
    let mut branches = Vec::with_capacity(ray.prefix);
    for n in 0..ray.prefix {
        let depths = ray.branch_depths(n);
        let max_depth = depths.values().copied().max().unwrap_or(0);
        let mut level_sets: Vec<BTreeSet<Point>> = vec![BTreeSet::from([n]); 1];
        for k in 1..=max_depth {
            level_sets.push(
                depths
                    .iter()
                    .filter_map(|(&x, &d)| (d == k).then_some(x))
                    .collect(),
            );
        }
        let mut maps: Vec<BTreeMap<Point, Point>> = Vec::new();
        for k in 1..level_sets.len() {
            maps.push(
                level_sets[k]
                    .iter()
                    .map(|&x| (x, ray.branches[n].parent[&x]))
                    .collect(),
            );
        }
        let chain = Chain::new(level_sets.clone(), maps)?;
        branches.push(BranchStructure {
            ray_index: n,
            level_sets,
            chain,
        });
    }
    Ok(branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ray::testutil::{depth_two_ray, single_node_ray};
    use crate::ray::BranchTree;

    fn sys(map: &[Point]) -> SelfmapSystem {
        SelfmapSystem::new(map.to_vec()).unwrap()
    }

    #[test]
    fn decompose_two_classes() {
        let d = decompose(&sys(&[0, 0, 0, 1])).unwrap();
        assert_eq!(d.star, 0);
        assert_eq!(d.classes.len(), 2);
        assert_eq!(d.classes[0].members, BTreeSet::from([1, 3]));
        assert_eq!(d.classes[0].seed, 1);
        assert_eq!(d.classes[0].kind, ClassKind::First);
        assert_eq!(d.classes[1].members, BTreeSet::from([2]));
        assert_eq!(d.classes[1].seed, 2);
        assert_eq!(d.classes[1].kind, ClassKind::First);
    }

    #[test]
    fn decompose_identity_point_has_no_classes() {
        let d = decompose(&sys(&[0])).unwrap();
        assert_eq!(d.star, 0);
        assert!(d.classes.is_empty());
    }

    #[test]
    fn decompose_single_class() {
        let d = decompose(&sys(&[0, 0, 1, 1, 1, 2])).unwrap();
        assert_eq!(d.classes.len(), 1);
        assert_eq!(d.classes[0].members, BTreeSet::from([1, 2, 3, 4, 5]));
        assert_eq!(d.classes[0].seed, 1);
        assert_eq!(d.classes[0].kind, ClassKind::First);
    }

    #[test]
    fn decompose_requires_the_condition() {
        assert!(matches!(
            decompose(&sys(&[1, 0])),
            Err(Error::ConditionFails(_))
        ));
    }

    #[test]
    fn first_kind_chain_levels() {
        let system = sys(&[0, 0, 1, 1, 1, 2]);
        let d = decompose(&system).unwrap();
        let chain = first_kind_chain(&system, &d.classes[0]).unwrap();
        assert_eq!(
            chain.levels(),
            &[
                BTreeSet::from([1]),
                BTreeSet::from([2, 3, 4]),
                BTreeSet::from([5])
            ]
        );

        let system = sys(&[0, 0, 0, 1]);
        let d = decompose(&system).unwrap();
        let chain = first_kind_chain(&system, &d.classes[0]).unwrap();
        assert_eq!(chain.levels(), &[BTreeSet::from([1]), BTreeSet::from([3])]);
        // a seed with no preimages gives a single-level chain
        let chain = first_kind_chain(&system, &d.classes[1]).unwrap();
        assert_eq!(chain.levels(), &[BTreeSet::from([2])]);
    }

    #[test]
    fn first_kind_chain_rejects_second_kind() {
        let class = OrbitClass {
            members: BTreeSet::from([4]),
            kind: ClassKind::Second,
            seed: 4,
        };
        assert!(matches!(
            first_kind_chain(&sys(&[0, 0, 0, 1, 1]), &class),
            Err(Error::NotFirstKind(_))
        ));
    }

    #[test]
    fn bare_ray_has_no_explicit_branches() {
        let branches = second_kind_branches(&RayPresentation::bare_ray()).unwrap();
        assert!(branches.is_empty());
    }

    #[test]
    fn single_attached_node_branch_levels() {
        let branches = second_kind_branches(&single_node_ray()).unwrap();
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].level_sets, vec![BTreeSet::from([0])]);
        assert_eq!(
            branches[1].level_sets,
            vec![BTreeSet::from([1]), BTreeSet::from([5])]
        );
    }

    #[test]
    fn depth_two_branch_levels() {
        let branches = second_kind_branches(&depth_two_ray()).unwrap();
        assert_eq!(
            branches[0].level_sets,
            vec![
                BTreeSet::from([0]),
                BTreeSet::from([1]),
                BTreeSet::from([2])
            ]
        );
        assert_eq!(branches[0].chain.depth(), 3);
    }

    #[test]
    fn branches_reject_invalid_presentation() {
        let bad = RayPresentation {
            prefix: 1,
            branches: vec![BranchTree {
                nodes: vec![3],
                parent: BTreeMap::from([(3, 77)]),
            }],
        };
        assert!(matches!(
            second_kind_branches(&bad),
            Err(Error::InvalidPresentation(_))
        ));
    }
}
