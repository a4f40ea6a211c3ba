//! Well-orders on atoms and their lexicographic lifts along a chain.
//!
//! Finite totally ordered sets with a last element are the constructive
//! stand-in for the well-order topology: at finite scale the order topology
//! is discrete, so compactness and continuity are automatic, and the
//! checkable content is exactly the order structure — every atom order has a
//! last element, every level map is order-preserving, and every fiber is a
//! contiguous run placed in base order.
//!
//! The canonical well-order is ascending point index. Any well-order works,
//! so a seed-parameterized shuffled order is available for property tests via
//! [`OrderPolicy::Shuffled`].

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{verify_atomization, Atomization, Chain};
use crate::error::{Error, Result};
use crate::partition::{MapBetween, Point};

/// A total order on one atom, listed first to last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Point>", try_from = "Vec<Point>")]
pub struct AtomOrder {
    sequence: Vec<Point>,
}

impl AtomOrder {
    pub fn from_sequence(sequence: Vec<Point>) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::EmptyAtom);
        }
        let distinct: BTreeSet<Point> = sequence.iter().copied().collect();
        if distinct.len() != sequence.len() {
            return Err(Error::InvalidConstruction {
                what: "atom order",
                reason: "sequence repeats a point".into(),
            });
        }
        Ok(AtomOrder { sequence })
    }

    pub fn sequence(&self) -> &[Point] {
        &self.sequence
    }

    pub fn atom(&self) -> BTreeSet<Point> {
        self.sequence.iter().copied().collect()
    }

    /// The last element; every atom order has one.
    pub fn last(&self) -> Point {
        *self.sequence.last().expect("nonempty by construction")
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position lookup table for this order.
    pub fn positions(&self) -> BTreeMap<Point, usize> {
        self.sequence
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect()
    }
}

impl From<AtomOrder> for Vec<Point> {
    fn from(o: AtomOrder) -> Self {
        o.sequence
    }
}

impl TryFrom<Vec<Point>> for AtomOrder {
    type Error = Error;
    fn try_from(sequence: Vec<Point>) -> Result<Self> {
        AtomOrder::from_sequence(sequence)
    }
}

/// Which well-order to put on atoms and fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Ascending point index. Deterministic and the default everywhere.
    Canonical,
    /// A seed-keyed shuffle. The order invariants must hold for every
    /// well-order, so property suites run with several of these.
    Shuffled(u64),
}

impl Default for OrderPolicy {
    fn default() -> Self {
        OrderPolicy::Canonical
    }
}

fn content_key(atom: &BTreeSet<Point>) -> u64 {
    // stable FNV-style fold so each atom gets its own stream under one seed
    atom.iter().fold(0xcbf29ce484222325u64, |h, &p| {
        (h ^ p as u64).wrapping_mul(0x100000001b3)
    })
}

/// Well-orders an atom under the given policy.
pub fn wo_order_with(atom: &BTreeSet<Point>, policy: OrderPolicy) -> Result<AtomOrder> {
    if atom.is_empty() {
        return Err(Error::EmptyAtom);
    }
    let mut sequence: Vec<Point> = atom.iter().copied().collect();
    if let OrderPolicy::Shuffled(seed) = policy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ content_key(atom));
        sequence.shuffle(&mut rng);
    }
    AtomOrder::from_sequence(sequence)
}

/// The canonical well-order: ascending point index.
pub fn wo_order(atom: &BTreeSet<Point>) -> Result<AtomOrder> {
    wo_order_with(atom, OrderPolicy::Canonical)
}

/// Lifts an order from a base atom to a domain atom mapped onto it:
/// fibers are ordered internally and concatenated in base order, so the map
/// is order-preserving by construction.
pub fn lift_order(
    t: &MapBetween,
    domain_atom: &BTreeSet<Point>,
    base: &AtomOrder,
    policy: OrderPolicy,
) -> Result<AtomOrder> {
    if domain_atom.is_empty() {
        return Err(Error::EmptyAtom);
    }
    let base_atom = base.atom();
    let mut fibers: BTreeMap<Point, BTreeSet<Point>> = BTreeMap::new();
    for &x in domain_atom {
        let y = t.get(x).ok_or_else(|| {
            Error::NotOnto(format!("domain point {x} is outside the map domain"))
        })?;
        if !base_atom.contains(&y) {
            return Err(Error::NotOnto(format!(
                "domain point {x} maps to {y}, outside the base atom"
            )));
        }
        fibers.entry(y).or_default().insert(x);
    }
    let mut sequence = Vec::with_capacity(domain_atom.len());
    for &y in base.sequence() {
        let fiber = fibers.remove(&y).ok_or_else(|| {
            Error::NotOnto(format!("base point {y} has an empty fiber"))
        })?;
        sequence.extend(wo_order_with(&fiber, policy)?.sequence());
    }
    AtomOrder::from_sequence(sequence)
}

/// One lexicographic certificate record: for an atom of `λₙ`, the block it
/// maps onto in `λₙ₋₁` and, per point in atom order, the base position of its
/// image. Order preservation is the statement that these positions are
/// non-decreasing and cover the base atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub atom: usize,
    pub image_atom: usize,
    pub image_positions: Vec<usize>,
}

/// A compactified chain: the atomization, a well-order per atom, and the
/// lexicographic certificates for every non-bottom level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWitness {
    pub atomization: Atomization,
    /// `orders[level][atom id]`, atom ids following the canonical block order.
    pub orders: Vec<Vec<AtomOrder>>,
    /// `lex_certificate[i]` certifies level `i+1` over level `i`.
    pub lex_certificate: Vec<Vec<LexEntry>>,
}

/// Compactifies a chain under the canonical well-order.
pub fn compactify_chain(chain: &Chain, atom: &Atomization) -> Result<ChainWitness> {
    compactify_chain_with(chain, atom, OrderPolicy::Canonical)
}

/// Compactifies a chain: bottom-level atoms get a well-order, every higher
/// atom gets the lexicographic lift along its image atom.
pub fn compactify_chain_with(
    chain: &Chain,
    atom: &Atomization,
    policy: OrderPolicy,
) -> Result<ChainWitness> {
    match verify_atomization(chain, atom) {
        Ok(true) => {}
        Ok(false) => {
            return Err(Error::AtomizationInvalid(
                "atomization invariants fail for this chain".into(),
            ))
        }
        Err(e) => return Err(Error::AtomizationInvalid(e.to_string())),
    }

    let n = chain.depth();
    let mut orders: Vec<Vec<AtomOrder>> = Vec::with_capacity(n);
    let bottom = atom.lambdas[0]
        .blocks()
        .iter()
        .map(|b| wo_order_with(b, policy))
        .collect::<Result<Vec<_>>>()?;
    orders.push(bottom);

    let mut lex_certificate: Vec<Vec<LexEntry>> = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let t = chain.level_map(i - 1);
        let lambda = &atom.lambdas[i];
        let base_lambda = &atom.lambdas[i - 1];
        let mut level_orders = Vec::with_capacity(lambda.len());
        let mut level_lex = Vec::with_capacity(lambda.len());
        for (k, block) in lambda.blocks().iter().enumerate() {
            let rep = *block.first().expect("nonempty block");
            let image_rep = t.get(rep).expect("total level map");
            let j = base_lambda
                .block_of(image_rep)
                .expect("image lies in the level below");
            let base = &orders[i - 1][j];
            let lifted = lift_order(&t, block, base, policy)?;
            let base_positions = base.positions();
            let image_positions = lifted
                .sequence()
                .iter()
                .map(|&x| base_positions[&t.get(x).expect("total level map")])
                .collect();
            level_orders.push(lifted);
            level_lex.push(LexEntry {
                atom: k,
                image_atom: j,
                image_positions,
            });
        }
        orders.push(level_orders);
        lex_certificate.push(level_lex);
    }

    Ok(ChainWitness {
        atomization: atom.clone(),
        orders,
        lex_certificate,
    })
}
