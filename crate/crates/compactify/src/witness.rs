//! The topology witness: everything needed to reconstruct — and to audit —
//! the compactified space built from an instance.
//!
//! For a finite system the space is the disjoint forest of first-kind class
//! chains with the star adjoined; for a ray presentation it is the explicit
//! branch chains plus a tail schema standing for the bare singletons past the
//! prefix. Every point receives an address locating it inside one atom order,
//! so the whole topology is determined by the witness alone. The checker in
//! [`crate::checker`] re-derives the topology from scratch and compares.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{atomize_chain, Chain};
use crate::error::Result;
use crate::forest::{decompose, first_kind_chain, second_kind_branches};
use crate::instance::Instance;
use crate::order::{compactify_chain_with, ChainWitness, OrderPolicy};
use crate::partition::Point;

/// Where a point lives in the compactified space.
///
/// `position` indexes into the atom's well-order sequence, so an address
/// resolves back to its point and the map between addresses and points is a
/// bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "lowercase")]
pub enum PointAddress {
    Star,
    Class {
        class: usize,
        level: usize,
        atom: usize,
        position: usize,
    },
    Branch {
        branch: usize,
        level: usize,
        atom: usize,
        position: usize,
    },
}

/// The unmaterialized part of a ray witness: from ray index `from_index`
/// on, every branch is the bare singleton `{bₙ}`. `bare` is stored rather
/// than implied so a tampered schema is detectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSchema {
    pub from_index: usize,
    pub bare: bool,
}

/// One first-kind class with its level chain fully compactified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWitnessRecord {
    pub class_id: usize,
    pub seed: Point,
    pub members: std::collections::BTreeSet<Point>,
    pub chain: Chain,
    pub witness: ChainWitness,
}

/// One explicit branch of a ray with its chain fully compactified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchWitnessRecord {
    pub ray_index: usize,
    pub chain: Chain,
    pub witness: ChainWitness,
}

/// The complete certificate for one instance.
///
/// Finite instances carry `star: Some(_)`, class records, no tail. Ray
/// instances carry `star: None` (the adjoined point has no index in the
/// presentation), branch records, and a tail schema. `addresses` is total
/// over the instance's explicit points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyWitness {
    pub star: Option<Point>,
    pub class_witnesses: Vec<ClassWitnessRecord>,
    pub branch_witnesses: Vec<BranchWitnessRecord>,
    pub tail: Option<TailSchema>,
    pub addresses: BTreeMap<Point, PointAddress>,
}

impl TopologyWitness {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("witnesses serialize infallibly")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::error::Error::Parse(e.to_string()))
    }
}

fn address_chain(
    witness: &ChainWitness,
    mut place: impl FnMut(usize, usize, usize) -> PointAddress,
    addresses: &mut BTreeMap<Point, PointAddress>,
) {
    for (level, level_orders) in witness.orders.iter().enumerate() {
        for (atom, order) in level_orders.iter().enumerate() {
            for (position, &point) in order.sequence().iter().enumerate() {
                addresses.insert(point, place(level, atom, position));
            }
        }
    }
}

/// Builds the full witness under the canonical well-orders.
pub fn build_witness(instance: &Instance) -> Result<TopologyWitness> {
    build_witness_with(instance, OrderPolicy::Canonical)
}

/// Builds the full witness: decompose, chain each class or branch, atomize,
/// compactify under `policy`, and assign addresses.
pub fn build_witness_with(instance: &Instance, policy: OrderPolicy) -> Result<TopologyWitness> {
    match instance {
        Instance::Finite(system) => {
            let decomposition = decompose(system)?;
            let mut class_witnesses = Vec::with_capacity(decomposition.classes.len());
            let mut addresses = BTreeMap::new();
            addresses.insert(decomposition.star, PointAddress::Star);
            for (class_id, class) in decomposition.classes.iter().enumerate() {
                let chain = first_kind_chain(system, class)?;
                let atomization = atomize_chain(&chain)?;
                let witness = compactify_chain_with(&chain, &atomization, policy)?;
                address_chain(
                    &witness,
                    |level, atom, position| PointAddress::Class {
                        class: class_id,
                        level,
                        atom,
                        position,
                    },
                    &mut addresses,
                );
                class_witnesses.push(ClassWitnessRecord {
                    class_id,
                    seed: class.seed,
                    members: class.members.clone(),
                    chain,
                    witness,
                });
            }
            Ok(TopologyWitness {
                star: Some(decomposition.star),
                class_witnesses,
                branch_witnesses: Vec::new(),
                tail: None,
                addresses,
            })
        }
        Instance::Ray(envelope) => {
            let ray = &envelope.ray;
            let branches = second_kind_branches(ray)?;
            let mut branch_witnesses = Vec::with_capacity(branches.len());
            let mut addresses = BTreeMap::new();
            for branch in branches {
                let atomization = atomize_chain(&branch.chain)?;
                let witness = compactify_chain_with(&branch.chain, &atomization, policy)?;
                let ray_index = branch.ray_index;
                address_chain(
                    &witness,
                    |level, atom, position| PointAddress::Branch {
                        branch: ray_index,
                        level,
                        atom,
                        position,
                    },
                    &mut addresses,
                );
                branch_witnesses.push(BranchWitnessRecord {
                    ray_index,
                    chain: branch.chain,
                    witness,
                });
            }
            Ok(TopologyWitness {
                star: None,
                class_witnesses: Vec::new(),
                branch_witnesses,
                tail: Some(TailSchema {
                    from_index: ray.prefix,
                    bare: true,
                }),
                addresses,
            })
        }
    }
}
