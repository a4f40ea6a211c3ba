//! Chains of sets and their atomization.
//!
//! A chain is a finite sequence of disjoint levels `X₁ … X_N` with total maps
//! `Tₙ: Xₙ → Xₙ₋₁` linking each level to the previous one. Atomization
//! produces finite partitions `λₙ` of every level so that each block of `λₙ`
//! is mapped *onto* a block of `λₙ₋₁`: a backward pass pushes the one-block
//! top partition down to `π` partitions, and a forward pass relates them into
//! the `λ` family.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{is_t_related, pushforward, relate, MapBetween, Partition, Point};

/// Serializes level maps as sorted `[from, to]` pair tables.
mod map_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        maps: &[BTreeMap<Point, Point>],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let tables: Vec<Vec<(Point, Point)>> = maps
            .iter()
            .map(|m| m.iter().map(|(&a, &b)| (a, b)).collect())
            .collect();
        serde::Serialize::serialize(&tables, ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<BTreeMap<Point, Point>>, D::Error> {
        let tables: Vec<Vec<(Point, Point)>> = serde::Deserialize::deserialize(de)?;
        Ok(tables
            .into_iter()
            .map(|t| t.into_iter().collect())
            .collect())
    }
}

/// A finite chain of pairwise-disjoint nonempty levels with total level maps.
///
/// `levels[0]` is the bottom level `X₁`; `maps[i]` sends `levels[i+1]` into
/// `levels[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct Chain {
    levels: Vec<BTreeSet<Point>>,
    maps: Vec<BTreeMap<Point, Point>>,
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    levels: Vec<BTreeSet<Point>>,
    #[serde(with = "map_table")]
    maps: Vec<BTreeMap<Point, Point>>,
}

impl TryFrom<RawChain> for Chain {
    type Error = Error;
    fn try_from(raw: RawChain) -> Result<Self> {
        Chain::new(raw.levels, raw.maps)
    }
}

impl From<Chain> for RawChain {
    fn from(c: Chain) -> Self {
        RawChain {
            levels: c.levels,
            maps: c.maps,
        }
    }
}

impl Chain {
    pub fn new(levels: Vec<BTreeSet<Point>>, maps: Vec<BTreeMap<Point, Point>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidChain("a chain needs at least one level".into()));
        }
        if maps.len() + 1 != levels.len() {
            return Err(Error::InvalidChain(format!(
                "{} levels need {} maps, got {}",
                levels.len(),
                levels.len() - 1,
                maps.len()
            )));
        }
        let mut seen: BTreeSet<Point> = BTreeSet::new();
        for (i, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(Error::InvalidChain(format!("level {i} is empty")));
            }
            for &p in level {
                if !seen.insert(p) {
                    return Err(Error::InvalidChain(format!(
                        "point {p} appears in two levels"
                    )));
                }
            }
        }
        for (i, map) in maps.iter().enumerate() {
            let (upper, lower) = (&levels[i + 1], &levels[i]);
            if map.len() != upper.len() || !upper.iter().all(|x| map.contains_key(x)) {
                return Err(Error::InvalidChain(format!(
                    "map into level {i} is not total on level {}",
                    i + 1
                )));
            }
            for (&x, &y) in map {
                if !lower.contains(&y) {
                    return Err(Error::InvalidChain(format!(
                        "map sends {x} to {y}, outside level {i}"
                    )));
                }
            }
        }
        Ok(Chain { levels, maps })
    }

    /// Number of levels `N`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[BTreeSet<Point>] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &BTreeSet<Point> {
        &self.levels[i]
    }

    /// The map from `levels[i+1]` into `levels[i]`, as a [`MapBetween`].
    pub fn level_map(&self, i: usize) -> MapBetween {
        MapBetween::new(self.maps[i].clone(), self.levels[i].clone())
            .expect("chain invariants imply a valid map")
    }

    pub fn map_tables(&self) -> &[BTreeMap<Point, Point>] {
        &self.maps
    }
}

/// Per-level partition families produced by atomization.
///
/// `lambdas[n]` refines `pis[n]`, and consecutive `lambdas` are related by
/// the level maps: every block maps onto a block below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atomization {
    pub pis: Vec<Partition>,
    pub lambdas: Vec<Partition>,
}

/// Atomizes a chain: backward pushforward pass for the `π` family, forward
/// relating pass for the `λ` family.
pub fn atomize_chain(chain: &Chain) -> Result<Atomization> {
    let n = chain.depth();
    let mut pis: Vec<Option<Partition>> = vec![None; n];
    pis[n - 1] = Some(Partition::whole(chain.level(n - 1).clone())?);
    for i in (0..n - 1).rev() {
        let t = chain.level_map(i);
        let upper = pis[i + 1].as_ref().expect("filled in previous step");
        pis[i] = Some(pushforward(&t, upper)?);
    }
    let pis: Vec<Partition> = pis.into_iter().map(|p| p.expect("all filled")).collect();

    let mut lambdas: Vec<Partition> = Vec::with_capacity(n);
    lambdas.push(pis[0].clone());
    for i in 0..n - 1 {
        let t = chain.level_map(i);
        let next = relate(&t, &pis[i + 1], &lambdas[i])?;
        lambdas.push(next);
    }
    Ok(Atomization { pis, lambdas })
}

/// Checks every atomization invariant against a chain: grounds match the
/// levels, each `λₙ` refines `πₙ`, the relating precondition holds level by
/// level, and consecutive `λ` partitions are related by the level maps.
pub fn verify_atomization(chain: &Chain, atom: &Atomization) -> Result<bool> {
    let n = chain.depth();
    if atom.pis.len() != n || atom.lambdas.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "chain has {} levels, atomization has {}/{} partitions",
            n,
            atom.pis.len(),
            atom.lambdas.len()
        )));
    }
    for i in 0..n {
        if atom.pis[i].ground() != chain.level(i) || atom.lambdas[i].ground() != chain.level(i) {
            return Err(Error::ShapeMismatch(format!(
                "partitions at level {i} do not cover that level"
            )));
        }
    }
    for i in 0..n {
        if !atom.lambdas[i].refines(&atom.pis[i])? {
            return Ok(false);
        }
    }
    for i in 0..n - 1 {
        let t = chain.level_map(i);
        // relating precondition, re-checked on top of the relation itself
        if !atom.lambdas[i].refines(&pushforward(&t, &atom.pis[i + 1])?)? {
            return Ok(false);
        }
        if !is_t_related(&t, &atom.lambdas[i + 1], &atom.lambdas[i])? {
            return Ok(false);
        }
    }
    Ok(true)
}
