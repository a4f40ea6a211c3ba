//! Partition algebra over finite index sets.
//!
//! Partitions are kept in a canonical form (blocks sorted by their minimum
//! element) so every operation is bit-reproducible. The operations here are
//! the lattice structure (refinement, common refinement), the preimage
//! partition along a map, the pushforward partition grouping codomain points
//! by which blocks their fibers hit, and the relating construction that turns
//! a refinement of the pushforward into a pair of map-related partitions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points are dense indices into a ground set.
pub type Point = usize;

/// A partition of a finite ground set into disjoint nonempty blocks.
///
/// Blocks are stored sorted by their minimum element, which makes the block
/// order (and hence the serialized form) canonical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<Point>>", try_from = "Vec<Vec<Point>>")]
pub struct Partition {
    ground: BTreeSet<Point>,
    blocks: Vec<BTreeSet<Point>>,
    block_of: BTreeMap<Point, usize>,
}

impl Partition {
    /// Builds a partition from a family of blocks.
    ///
    /// The ground set is the union of the blocks. Fails if any block is empty
    /// or if two blocks overlap.
    pub fn from_blocks<I, B>(blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = Point>,
    {
        let mut collected: Vec<BTreeSet<Point>> = Vec::new();
        for block in blocks {
            let set: BTreeSet<Point> = block.into_iter().collect();
            if set.is_empty() {
                return Err(Error::InvalidConstruction {
                    what: "partition",
                    reason: "empty block".into(),
                });
            }
            collected.push(set);
        }
        collected.sort_by_key(|b| *b.first().expect("nonempty block"));
        let mut ground = BTreeSet::new();
        let mut block_of = BTreeMap::new();
        for (id, block) in collected.iter().enumerate() {
            for &p in block {
                if !ground.insert(p) {
                    return Err(Error::InvalidConstruction {
                        what: "partition",
                        reason: format!("point {p} appears in two blocks"),
                    });
                }
                block_of.insert(p, id);
            }
        }
        Ok(Partition {
            ground,
            blocks: collected,
            block_of,
        })
    }

    /// The one-block partition of `ground`.
    pub fn whole(ground: BTreeSet<Point>) -> Result<Self> {
        if ground.is_empty() {
            return Err(Error::InvalidConstruction {
                what: "partition",
                reason: "empty ground set".into(),
            });
        }
        Self::from_blocks([ground])
    }

    /// The all-singletons partition of `ground`.
    pub fn discrete(ground: &BTreeSet<Point>) -> Result<Self> {
        if ground.is_empty() {
            return Err(Error::InvalidConstruction {
                what: "partition",
                reason: "empty ground set".into(),
            });
        }
        Self::from_blocks(ground.iter().map(|&p| [p]))
    }

    /// Groups `ground` by a key function; blocks are the key fibers.
    pub fn group_by<K: Ord>(ground: &BTreeSet<Point>, mut key: impl FnMut(Point) -> K) -> Result<Self> {
        let mut groups: BTreeMap<K, BTreeSet<Point>> = BTreeMap::new();
        for &p in ground {
            groups.entry(key(p)).or_default().insert(p);
        }
        Self::from_blocks(groups.into_values())
    }

    pub fn ground(&self) -> &BTreeSet<Point> {
        &self.ground
    }

    /// Blocks in canonical order (sorted by minimum element).
    pub fn blocks(&self) -> &[BTreeSet<Point>] {
        &self.blocks
    }

    pub fn block(&self, id: usize) -> &BTreeSet<Point> {
        &self.blocks[id]
    }

    /// The id of the block containing `p`, if `p` is in the ground set.
    pub fn block_of(&self, p: Point) -> Option<usize> {
        self.block_of.get(&p).copied()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn same_ground(&self, other: &Partition) -> Result<()> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(
                "partitions live on different ground sets".into(),
            ));
        }
        Ok(())
    }

    /// True iff every block of `self` is contained in some block of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> Result<bool> {
        self.same_ground(coarse)?;
        for block in &self.blocks {
            let rep = *block.first().expect("nonempty block");
            let target = coarse.block(coarse.block_of(rep).expect("same ground"));
            if !block.is_subset(target) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Common refinement: blocks are all nonempty pairwise intersections.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.same_ground(other)?;
        Partition::group_by(&self.ground, |p| {
            (
                self.block_of(p).expect("same ground"),
                other.block_of(p).expect("same ground"),
            )
        })
    }
}

impl From<Partition> for Vec<Vec<Point>> {
    fn from(p: Partition) -> Self {
        p.blocks
            .iter()
            .map(|b| b.iter().copied().collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<Point>>> for Partition {
    type Error = Error;
    fn try_from(blocks: Vec<Vec<Point>>) -> Result<Self> {
        Partition::from_blocks(blocks)
    }
}

/// A total map between two disjoint finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapBetween {
    domain: BTreeSet<Point>,
    codomain: BTreeSet<Point>,
    map: BTreeMap<Point, Point>,
}

impl MapBetween {
    /// Builds a map from its graph. The domain is the key set; every value
    /// must lie in `codomain`, and the two sets must be disjoint.
    pub fn new(map: BTreeMap<Point, Point>, codomain: BTreeSet<Point>) -> Result<Self> {
        if map.is_empty() || codomain.is_empty() {
            return Err(Error::InvalidConstruction {
                what: "map",
                reason: "empty domain or codomain".into(),
            });
        }
        for (&x, &y) in &map {
            if !codomain.contains(&y) {
                return Err(Error::InvalidConstruction {
                    what: "map",
                    reason: format!("value {y} of {x} is not in the codomain"),
                });
            }
            if codomain.contains(&x) {
                return Err(Error::InvalidConstruction {
                    what: "map",
                    reason: format!("domain point {x} also lies in the codomain"),
                });
            }
        }
        let domain = map.keys().copied().collect();
        Ok(MapBetween {
            domain,
            codomain,
            map,
        })
    }

    pub fn domain(&self) -> &BTreeSet<Point> {
        &self.domain
    }

    pub fn codomain(&self) -> &BTreeSet<Point> {
        &self.codomain
    }

    pub fn get(&self, x: Point) -> Option<Point> {
        self.map.get(&x).copied()
    }

    pub fn graph(&self) -> &BTreeMap<Point, Point> {
        &self.map
    }

    /// The image of a set of domain points.
    pub fn image_of(&self, points: &BTreeSet<Point>) -> BTreeSet<Point> {
        points
            .iter()
            .filter_map(|&x| self.map.get(&x).copied())
            .collect()
    }

    /// The fiber over a codomain point.
    pub fn fiber(&self, y: Point) -> BTreeSet<Point> {
        self.map
            .iter()
            .filter_map(|(&x, &v)| (v == y).then_some(x))
            .collect()
    }
}

fn check_domain(t: &MapBetween, pi: &Partition) -> Result<()> {
    if pi.ground() != t.domain() {
        return Err(Error::GroundMismatch(
            "partition ground differs from the map domain".into(),
        ));
    }
    Ok(())
}

fn check_codomain(t: &MapBetween, lambda: &Partition) -> Result<()> {
    if lambda.ground() != t.codomain() {
        return Err(Error::GroundMismatch(
            "partition ground differs from the map codomain".into(),
        ));
    }
    Ok(())
}

/// The preimage partition: nonempty fibers of the blocks of `lambda`.
///
/// Blocks with empty preimage contribute nothing, so the result is a genuine
/// partition of the whole domain.
pub fn preimage_partition(t: &MapBetween, lambda: &Partition) -> Result<Partition> {
    check_codomain(t, lambda)?;
    Partition::group_by(t.domain(), |x| {
        lambda.block_of(t.get(x).expect("total map")).expect("value in codomain")
    })
}

/// The pushforward partition on the codomain.
///
/// Two codomain points share a block iff their fibers hit exactly the same
/// blocks of `pi`. Points outside the image all have the empty hit-set and so
/// share a single block.
pub fn pushforward(t: &MapBetween, pi: &Partition) -> Result<Partition> {
    check_domain(t, pi)?;
    let mut hits: BTreeMap<Point, BTreeSet<usize>> = BTreeMap::new();
    for (&x, &y) in t.graph() {
        hits.entry(y)
            .or_default()
            .insert(pi.block_of(x).expect("ground checked"));
    }
    Partition::group_by(t.codomain(), |y| {
        hits.get(&y).cloned().unwrap_or_default()
    })
}

/// True iff every block of `pi` is mapped by `t` onto some block of `lambda`
/// (image equality, not mere containment).
pub fn is_t_related(t: &MapBetween, pi: &Partition, lambda: &Partition) -> Result<bool> {
    check_domain(t, pi)?;
    check_codomain(t, lambda)?;
    for block in pi.blocks() {
        let image = t.image_of(block);
        let rep = *image.first().expect("nonempty block has nonempty image");
        let target = lambda.block(lambda.block_of(rep).expect("value in codomain"));
        if &image != target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The relating construction: the common refinement of the preimage partition
/// of `lambda` with `pi`.
///
/// Requires `lambda` to refine the pushforward of `pi`; under that hypothesis
/// the result is guaranteed to be `t`-related to `lambda`.
pub fn relate(t: &MapBetween, pi: &Partition, lambda: &Partition) -> Result<Partition> {
    check_domain(t, pi)?;
    check_codomain(t, lambda)?;
    let pushed = pushforward(t, pi)?;
    if !lambda.refines(&pushed)? {
        return Err(Error::PreconditionViolated(
            "codomain partition does not refine the pushforward of the domain partition".into(),
        ));
    }
    preimage_partition(t, lambda)?.meet(pi)
}
