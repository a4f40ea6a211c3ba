//! Independent verification of topology witnesses.
//!
//! Everything here is re-derived from the instance and the witness data
//! alone. The checker deliberately shares no logic with the construction
//! side: the star is found by the cycle criterion rather than image
//! iteration, pushforwards are re-tabulated from hit sets, refinement and
//! relatedness are fresh scans, and order preservation is recomputed from
//! raw positions. Only the [`Partition`] container type is shared. A bug on
//! the construction side therefore cannot hide itself by agreeing with the
//! check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::order::ChainWitness;
use crate::partition::{Partition, Point};
use crate::ray::RayPresentation;
use crate::system::SelfmapSystem;
use crate::witness::{PointAddress, TopologyWitness};

/// Stable identifiers for the rules a witness can break. Mutation tests
/// assert which rule a given tamper trips, so variants are append-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    /// Structural alignment: record counts, partition grounds, order shapes.
    WitnessShape,
    /// The claimed star is the unique cycle and that cycle is a self-loop.
    StarFixed,
    /// Class records partition the points off the star, each with the right
    /// seed and members.
    ClassCover,
    /// Chain levels equal the re-derived exact-depth sets.
    ChainLevels,
    /// Chain map tables agree with the instance's map.
    ChainMaps,
    /// π family: top level is the whole set, each level below is the
    /// hit-set pushforward of the one above.
    PiDerivation,
    /// Every λ block lies inside a π block at its level.
    AtomsRefine,
    /// Every λ block maps onto exactly one λ block below.
    AtomsRelated,
    /// Each atom order lists the atom's points exactly once.
    OrderPermutation,
    /// Each atom order is nonempty, hence has a greatest element.
    OrderLast,
    /// Image positions along an atom order never decrease.
    OrderPreserving,
    /// Image positions cover every position of the base atom.
    FiberOnto,
    /// The recorded lexicographic certificate matches recomputation.
    LexCertificate,
    /// Every point has an address and no address names a missing point.
    AddressTotal,
    /// No two points share an address.
    AddressUnique,
    /// Every address resolves back to its own point.
    AddressResolves,
    /// Ray tails: schema present, bare, starting exactly at the prefix.
    TailSchema,
    /// Preimages of claimed branch sets stay within the branch and its
    /// predecessor, so co-compact neighborhoods of the star pull back to
    /// co-compact sets.
    ContinuityAtStar,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = match self {
            RuleId::WitnessShape => "witness-shape",
            RuleId::StarFixed => "star-fixed",
            RuleId::ClassCover => "class-cover",
            RuleId::ChainLevels => "chain-levels",
            RuleId::ChainMaps => "chain-maps",
            RuleId::PiDerivation => "pi-derivation",
            RuleId::AtomsRefine => "atoms-refine",
            RuleId::AtomsRelated => "atoms-related",
            RuleId::OrderPermutation => "order-permutation",
            RuleId::OrderLast => "order-last",
            RuleId::OrderPreserving => "order-preserving",
            RuleId::FiberOnto => "fiber-onto",
            RuleId::LexCertificate => "lex-certificate",
            RuleId::AddressTotal => "address-total",
            RuleId::AddressUnique => "address-unique",
            RuleId::AddressResolves => "address-resolves",
            RuleId::TailSchema => "tail-schema",
            RuleId::ContinuityAtStar => "continuity-at-star",
        };
        f.write_str(id)
    }
}

/// One broken rule, with where and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub location: String,
    pub rule: RuleId,
    pub description: String,
}

/// Outcome of a verification run. `passed` iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        CheckReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    /// The distinct rules broken, for asserting what a mutation tripped.
    pub fn rules(&self) -> BTreeSet<RuleId> {
        self.violations.iter().map(|v| v.rule).collect()
    }
}

struct Violations(Vec<Violation>);

impl Violations {
    fn push(&mut self, location: impl Into<String>, rule: RuleId, description: impl Into<String>) {
        self.0.push(Violation {
            location: location.into(),
            rule,
            description: description.into(),
        });
    }
}

/// Points lying on cycles of a finite map table, found by walking each
/// orbit with a visited mark — independent of image iteration.
pub fn cycle_points(table: &[Point]) -> BTreeSet<Point> {
    // color: 0 unvisited, 1 on current walk, 2 settled
    let mut color = vec![0u8; table.len()];
    let mut cyclic = BTreeSet::new();
    for start in 0..table.len() {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut x = start;
        while color[x] == 0 {
            color[x] = 1;
            path.push(x);
            x = table[x];
        }
        if color[x] == 1 {
            // x starts a fresh cycle along the current walk
            let cycle_start = path.iter().position(|&p| p == x).expect("on walk");
            cyclic.extend(path[cycle_start..].iter().copied());
        }
        for p in path {
            color[p] = 2;
        }
    }
    cyclic
}

/// Hit-set tabulation of the pushforward: codomain points grouped by which
/// blocks of `upper` their fibers meet, blocks sorted by least element.
/// Fresh implementation, usable as an oracle for the construction side.
pub fn hit_set_blocks(
    map: &BTreeMap<Point, Point>,
    codomain: &BTreeSet<Point>,
    upper: &Partition,
) -> Vec<BTreeSet<Point>> {
    let mut hits: BTreeMap<Point, BTreeSet<usize>> =
        codomain.iter().map(|&y| (y, BTreeSet::new())).collect();
    for (&x, &y) in map {
        if let (Some(set), Some(block)) = (hits.get_mut(&y), upper.block_of(x)) {
            set.insert(block);
        }
    }
    let mut grouped: BTreeMap<BTreeSet<usize>, BTreeSet<Point>> = BTreeMap::new();
    for (y, hit) in hits {
        grouped.entry(hit).or_default().insert(y);
    }
    let mut blocks: Vec<BTreeSet<Point>> = grouped.into_values().collect();
    blocks.sort_by_key(|b| *b.first().expect("nonempty block"));
    blocks
}

fn block_sets(partition: &Partition) -> Vec<BTreeSet<Point>> {
    partition.blocks().to_vec()
}

/// Re-checks one compactified chain against its claimed levels and map
/// tables. `levels` and `maps` must already have been validated against the
/// instance; this audits the partitions, orders, and certificates on top.
fn check_chain_witness(
    location: &str,
    levels: &[BTreeSet<Point>],
    maps: &[BTreeMap<Point, Point>],
    witness: &ChainWitness,
    v: &mut Violations,
) {
    let depth = levels.len();
    let atom = &witness.atomization;
    if atom.pis.len() != depth
        || atom.lambdas.len() != depth
        || witness.orders.len() != depth
        || witness.lex_certificate.len() + 1 != depth
    {
        v.push(
            location,
            RuleId::WitnessShape,
            format!(
                "chain has {} levels but the witness carries {} π, {} λ, {} order levels, {} certificate levels",
                depth,
                atom.pis.len(),
                atom.lambdas.len(),
                witness.orders.len(),
                witness.lex_certificate.len(),
            ),
        );
        return;
    }
    for i in 0..depth {
        if atom.pis[i].ground() != &levels[i] || atom.lambdas[i].ground() != &levels[i] {
            v.push(
                format!("{location} / level {i}"),
                RuleId::WitnessShape,
                "partitions at this level do not cover the level set",
            );
            return;
        }
        if witness.orders[i].len() != atom.lambdas[i].len() {
            v.push(
                format!("{location} / level {i}"),
                RuleId::WitnessShape,
                format!(
                    "{} atoms but {} orders",
                    atom.lambdas[i].len(),
                    witness.orders[i].len()
                ),
            );
            return;
        }
    }

    // π family: whole at the top, hit-set pushforward below
    let top = &atom.pis[depth - 1];
    if top.len() != 1 {
        v.push(
            format!("{location} / level {}", depth - 1),
            RuleId::PiDerivation,
            format!("top π has {} blocks, expected the whole level", top.len()),
        );
    }
    for i in (0..depth.saturating_sub(1)).rev() {
        let expected = hit_set_blocks(&maps[i], &levels[i], &atom.pis[i + 1]);
        if block_sets(&atom.pis[i]) != expected {
            v.push(
                format!("{location} / level {i}"),
                RuleId::PiDerivation,
                "π is not the hit-set pushforward of the level above",
            );
        }
    }

    // λ ≤ π, by a fresh containment scan
    for i in 0..depth {
        for block in atom.lambdas[i].blocks() {
            let rep = *block.first().expect("nonempty block");
            let inside = atom.pis[i]
                .block_of(rep)
                .map(|id| block.is_subset(atom.pis[i].block(id)))
                .unwrap_or(false);
            if !inside {
                v.push(
                    format!("{location} / level {i}"),
                    RuleId::AtomsRefine,
                    format!("λ block containing {rep} crosses π blocks"),
                );
            }
        }
    }

    // consecutive λ levels: every block maps onto exactly one block below
    for i in 0..depth.saturating_sub(1) {
        for block in atom.lambdas[i + 1].blocks() {
            let image: BTreeSet<Point> =
                block.iter().filter_map(|x| maps[i].get(x).copied()).collect();
            let matches = image
                .first()
                .and_then(|&y| atom.lambdas[i].block_of(y))
                .map(|id| atom.lambdas[i].block(id) == &image)
                .unwrap_or(false);
            if !matches {
                v.push(
                    format!("{location} / level {}", i + 1),
                    RuleId::AtomsRelated,
                    format!("atom {:?} maps to {:?}, not onto an atom below", block, image),
                );
            }
        }
    }

    // orders: permutations of their atoms, each with a last element
    for i in 0..depth {
        for (k, order) in witness.orders[i].iter().enumerate() {
            let loc = format!("{location} / level {i} / atom {k}");
            if order.sequence().is_empty() {
                v.push(loc, RuleId::OrderLast, "order is empty");
                continue;
            }
            let listed: BTreeSet<Point> = order.sequence().iter().copied().collect();
            if listed.len() != order.sequence().len() || &listed != atom.lambdas[i].block(k) {
                v.push(
                    loc,
                    RuleId::OrderPermutation,
                    format!(
                        "order lists {:?} but the atom is {:?}",
                        order.sequence(),
                        atom.lambdas[i].block(k)
                    ),
                );
            }
        }
    }

    // order preservation, fiber coverage, and the recorded certificate
    for i in 1..depth {
        let t = &maps[i - 1];
        if witness.lex_certificate[i - 1].len() != witness.orders[i].len() {
            v.push(
                format!("{location} / level {i}"),
                RuleId::WitnessShape,
                "certificate entry count does not match the atom count",
            );
            continue;
        }
        for (k, order) in witness.orders[i].iter().enumerate() {
            let loc = format!("{location} / level {i} / atom {k}");
            let images: Vec<Point> = match order
                .sequence()
                .iter()
                .map(|x| t.get(x).copied())
                .collect::<Option<Vec<_>>>()
            {
                Some(images) => images,
                None => {
                    v.push(
                        loc,
                        RuleId::OrderPreserving,
                        "a point of the order has no image under the level map",
                    );
                    continue;
                }
            };
            let image_atom = atom.lambdas[i - 1].block_of(images[0]);
            let base = match image_atom {
                Some(j) => &witness.orders[i - 1][j],
                None => {
                    v.push(
                        loc,
                        RuleId::OrderPreserving,
                        "image lies outside every atom of the level below",
                    );
                    continue;
                }
            };
            let base_positions: BTreeMap<Point, usize> = base
                .sequence()
                .iter()
                .enumerate()
                .map(|(p, &y)| (y, p))
                .collect();
            let positions: Vec<usize> = match images
                .iter()
                .map(|y| base_positions.get(y).copied())
                .collect::<Option<Vec<_>>>()
            {
                Some(p) => p,
                None => {
                    v.push(
                        loc,
                        RuleId::OrderPreserving,
                        "an image point is missing from the base atom order",
                    );
                    continue;
                }
            };
            if positions.windows(2).any(|w| w[0] > w[1]) {
                v.push(
                    loc.clone(),
                    RuleId::OrderPreserving,
                    format!("image positions {positions:?} decrease"),
                );
            }
            let covered: BTreeSet<usize> = positions.iter().copied().collect();
            if covered.len() != base.len() {
                v.push(
                    loc.clone(),
                    RuleId::FiberOnto,
                    format!(
                        "image positions cover {} of {} base positions",
                        covered.len(),
                        base.len()
                    ),
                );
            }
            let entry = &witness.lex_certificate[i - 1][k];
            if entry.atom != k
                || Some(entry.image_atom) != image_atom
                || entry.image_positions != positions
            {
                v.push(
                    loc,
                    RuleId::LexCertificate,
                    "recorded certificate disagrees with recomputed positions",
                );
            }
        }
    }
}

/// Audits the address table against the expected point set and a resolver
/// mapping an address to the point stored at that slot.
fn check_addresses(
    expected: &BTreeSet<Point>,
    addresses: &BTreeMap<Point, PointAddress>,
    mut resolve: impl FnMut(&PointAddress) -> std::result::Result<Point, String>,
    v: &mut Violations,
) {
    for &point in expected {
        if !addresses.contains_key(&point) {
            v.push(
                "addresses",
                RuleId::AddressTotal,
                format!("point {point} has no address"),
            );
        }
    }
    for &point in addresses.keys() {
        if !expected.contains(&point) {
            v.push(
                "addresses",
                RuleId::AddressTotal,
                format!("address recorded for unknown point {point}"),
            );
        }
    }
    let mut seen: BTreeMap<PointAddress, Point> = BTreeMap::new();
    for (&point, address) in addresses {
        if let Some(&other) = seen.get(address) {
            v.push(
                "addresses",
                RuleId::AddressUnique,
                format!("points {other} and {point} share an address"),
            );
        } else {
            seen.insert(*address, point);
        }
        match resolve(address) {
            Ok(resolved) if resolved == point => {}
            Ok(resolved) => v.push(
                "addresses",
                RuleId::AddressResolves,
                format!("address of point {point} resolves to {resolved}"),
            ),
            Err(reason) => v.push(
                "addresses",
                RuleId::AddressResolves,
                format!("address of point {point} does not resolve: {reason}"),
            ),
        }
    }
}

fn verify_finite(system: &SelfmapSystem, witness: &TopologyWitness) -> Result<CheckReport> {
    let star = match witness.star {
        Some(star) if witness.branch_witnesses.is_empty() => star,
        _ => {
            return Err(Error::ShapeMismatch(
                "witness does not have the shape of a finite-system witness".into(),
            ))
        }
    };
    let mut v = Violations(Vec::new());
    if witness.tail.is_some() {
        v.push(
            "tail",
            RuleId::WitnessShape,
            "finite witness carries a ray tail schema",
        );
    }

    let table = system.table();
    let cycles = cycle_points(table);
    let star_ok =
        star < table.len() && table[star] == star && cycles == BTreeSet::from([star]);
    if !star_ok {
        v.push(
            "star",
            RuleId::StarFixed,
            format!("claimed star {star} is not the unique self-loop cycle (cycles: {cycles:?})"),
        );
        // nothing past the star can be trusted without it
        return Ok(CheckReport::from_violations(v.0));
    }

    // independent class relation: exit point and depth of every orbit
    let mut exit: BTreeMap<Point, (Point, usize)> = BTreeMap::new();
    for x in system.points().filter(|&x| x != star) {
        let (mut y, mut steps) = (x, 0usize);
        loop {
            let next = table[y];
            steps += 1;
            if next == star {
                exit.insert(x, (y, steps));
                break;
            }
            y = next;
        }
    }

    let mut covered: BTreeSet<Point> = BTreeSet::new();
    for (record_index, record) in witness.class_witnesses.iter().enumerate() {
        let loc = format!("class {record_index}");
        if record.class_id != record_index {
            v.push(
                &loc,
                RuleId::WitnessShape,
                format!("record carries class id {}", record.class_id),
            );
        }
        if table.get(record.seed).copied() != Some(star) || record.seed == star {
            v.push(
                &loc,
                RuleId::ClassCover,
                format!("seed {} does not map directly to the star", record.seed),
            );
        }
        for &m in &record.members {
            if !covered.insert(m) {
                v.push(
                    &loc,
                    RuleId::ClassCover,
                    format!("point {m} appears in two classes"),
                );
            }
            match exit.get(&m) {
                Some(&(z, _)) if z == record.seed => {}
                Some(&(z, _)) => v.push(
                    &loc,
                    RuleId::ClassCover,
                    format!("member {m} exits through {z}, not the seed {}", record.seed),
                ),
                None => v.push(
                    &loc,
                    RuleId::ClassCover,
                    format!("member {m} is not a point off the star"),
                ),
            }
        }

        // levels must be the exact-depth sets of the class
        let mut expected_levels: Vec<BTreeSet<Point>> = Vec::new();
        for &m in &record.members {
            if let Some(&(z, depth)) = exit.get(&m) {
                if z == record.seed {
                    let level = depth - 1;
                    if expected_levels.len() <= level {
                        expected_levels.resize(level + 1, BTreeSet::new());
                    }
                    expected_levels[level].insert(m);
                }
            }
        }
        let levels = record.chain.levels();
        if levels != expected_levels.as_slice() {
            v.push(
                &loc,
                RuleId::ChainLevels,
                format!(
                    "chain levels {:?} differ from the exact-depth sets {:?}",
                    levels, expected_levels
                ),
            );
            continue;
        }
        let maps = record.chain.map_tables();
        let mut maps_ok = true;
        for (i, map) in maps.iter().enumerate() {
            let domain: BTreeSet<Point> = map.keys().copied().collect();
            if domain != levels[i + 1]
                || map.iter().any(|(&x, &y)| table.get(x).copied() != Some(y))
            {
                v.push(
                    format!("{loc} / level {}", i + 1),
                    RuleId::ChainMaps,
                    "level map table disagrees with the system map",
                );
                maps_ok = false;
            }
        }
        if maps_ok {
            check_chain_witness(&loc, levels, maps, &record.witness, &mut v);
        }
    }

    let expected_members: BTreeSet<Point> = system.points().filter(|&x| x != star).collect();
    for &m in expected_members.difference(&covered) {
        v.push(
            "classes",
            RuleId::ClassCover,
            format!("point {m} belongs to no class"),
        );
    }

    let all_points: BTreeSet<Point> = system.points().collect();
    check_addresses(
        &all_points,
        &witness.addresses,
        |address| match *address {
            PointAddress::Star => Ok(star),
            PointAddress::Class {
                class,
                level,
                atom,
                position,
            } => {
                let record = witness
                    .class_witnesses
                    .get(class)
                    .ok_or_else(|| format!("no class {class}"))?;
                let order = record
                    .witness
                    .orders
                    .get(level)
                    .and_then(|orders| orders.get(atom))
                    .ok_or_else(|| format!("no atom {atom} at level {level}"))?;
                order
                    .sequence()
                    .get(position)
                    .copied()
                    .ok_or_else(|| format!("no position {position}"))
            }
            PointAddress::Branch { .. } => Err("branch address in a finite witness".into()),
        },
        &mut v,
    );

    Ok(CheckReport::from_violations(v.0))
}

/// Exact-depth node sets of one branch, re-derived from the parent map by
/// level settling (depth of a node = one more than its parent's).
fn branch_depth_sets(ray: &RayPresentation, n: usize) -> Vec<BTreeSet<Point>> {
    let branch = &ray.branches[n];
    let mut depth: BTreeMap<Point, usize> = BTreeMap::from([(n, 0)]);
    for _ in 0..=branch.nodes.len() {
        let mut settled_any = false;
        for &x in &branch.nodes {
            if depth.contains_key(&x) {
                continue;
            }
            if let Some(&d) = branch.parent.get(&x).and_then(|p| depth.get(p)) {
                depth.insert(x, d + 1);
                settled_any = true;
            }
        }
        if !settled_any {
            break;
        }
    }
    let max_depth = depth.values().copied().max().unwrap_or(0);
    let mut sets = vec![BTreeSet::new(); max_depth + 1];
    for (x, d) in depth {
        sets[d].insert(x);
    }
    sets
}

/// Continuity scan over the claimed branch decomposition: the claimed sets
/// must partition the explicit points with each ray node in its own branch,
/// and every explicit point must sit in the branch of its image or the one
/// before it. Together with the bare tail schema this is the finite form of
/// the statement that preimages of compact branch unions stay compact.
fn continuity_scan(ray: &RayPresentation, witness: &TopologyWitness, v: &mut Violations) {
    let mut claimed: Vec<BTreeSet<Point>> = vec![BTreeSet::new(); ray.prefix];
    for record in &witness.branch_witnesses {
        if record.ray_index >= ray.prefix {
            v.push(
                format!("branch {}", record.ray_index),
                RuleId::ContinuityAtStar,
                "claimed branch lies beyond the prefix, inside the bare tail",
            );
            continue;
        }
        for level in record.chain.levels() {
            claimed[record.ray_index].extend(level.iter().copied());
        }
    }

    let explicit = ray.explicit_points();
    let mut owner: BTreeMap<Point, usize> = BTreeMap::new();
    for (n, set) in claimed.iter().enumerate() {
        for &x in set {
            if owner.insert(x, n).is_some() {
                v.push(
                    format!("branch {n}"),
                    RuleId::ContinuityAtStar,
                    format!("point {x} is claimed by two branches"),
                );
            }
        }
        if n < ray.prefix && !set.contains(&n) {
            v.push(
                format!("branch {n}"),
                RuleId::ContinuityAtStar,
                format!("branch does not contain its own ray node {n}"),
            );
        }
    }
    for &x in &explicit {
        if !owner.contains_key(&x) {
            v.push(
                "branches",
                RuleId::ContinuityAtStar,
                format!("explicit point {x} belongs to no claimed branch"),
            );
        }
    }
    for (&x, &k) in &owner {
        if !explicit.contains(&x) {
            v.push(
                format!("branch {k}"),
                RuleId::ContinuityAtStar,
                format!("claimed point {x} is not an explicit point of the ray"),
            );
            continue;
        }
        let image = match ray.apply_explicit(x) {
            Some(y) => y,
            None => continue, // maps into the bare tail; covered by the schema
        };
        if let Some(&m) = owner.get(&image) {
            if k != m && k + 1 != m {
                v.push(
                    format!("branch {k}"),
                    RuleId::ContinuityAtStar,
                    format!(
                        "point {x} maps into branch {m}, so the preimage of that branch escapes branches {m} and {}",
                        m.saturating_sub(1)
                    ),
                );
            }
        }
    }
}

fn verify_ray(ray: &RayPresentation, witness: &TopologyWitness) -> Result<CheckReport> {
    if witness.star.is_some() || !witness.class_witnesses.is_empty() {
        return Err(Error::ShapeMismatch(
            "witness does not have the shape of a ray witness".into(),
        ));
    }
    ray.validate()?;
    let mut v = Violations(Vec::new());

    match witness.tail {
        Some(tail) if tail.bare && tail.from_index == ray.prefix => {}
        Some(tail) => v.push(
            "tail",
            RuleId::TailSchema,
            format!(
                "schema says from_index {} bare {}, expected from_index {} bare true",
                tail.from_index, tail.bare, ray.prefix
            ),
        ),
        None => v.push("tail", RuleId::TailSchema, "ray witness without a tail schema"),
    }

    if witness.branch_witnesses.len() != ray.prefix {
        v.push(
            "branches",
            RuleId::WitnessShape,
            format!(
                "{} branch records for a prefix of {}",
                witness.branch_witnesses.len(),
                ray.prefix
            ),
        );
    }

    for (index, record) in witness.branch_witnesses.iter().enumerate() {
        let loc = format!("branch {index}");
        if record.ray_index != index {
            v.push(
                &loc,
                RuleId::WitnessShape,
                format!("record at position {index} carries ray index {}", record.ray_index),
            );
            continue;
        }
        if index >= ray.prefix {
            v.push(
                &loc,
                RuleId::WitnessShape,
                "record describes a branch beyond the explicit prefix",
            );
            continue;
        }
        let expected = branch_depth_sets(ray, index);
        let levels = record.chain.levels();
        if levels != expected.as_slice() {
            v.push(
                &loc,
                RuleId::ChainLevels,
                format!(
                    "chain levels {:?} differ from the branch depth sets {:?}",
                    levels, expected
                ),
            );
            continue;
        }
        let maps = record.chain.map_tables();
        let parent = &ray.branches[index].parent;
        let mut maps_ok = true;
        for (i, map) in maps.iter().enumerate() {
            let domain: BTreeSet<Point> = map.keys().copied().collect();
            if domain != levels[i + 1]
                || map.iter().any(|(x, &y)| parent.get(x).copied() != Some(y))
            {
                v.push(
                    format!("{loc} / level {}", i + 1),
                    RuleId::ChainMaps,
                    "level map table disagrees with the branch parent map",
                );
                maps_ok = false;
            }
        }
        if maps_ok {
            check_chain_witness(&loc, levels, maps, &record.witness, &mut v);
        }
    }

    continuity_scan(ray, witness, &mut v);

    check_addresses(
        &ray.explicit_points(),
        &witness.addresses,
        |address| match *address {
            PointAddress::Branch {
                branch,
                level,
                atom,
                position,
            } => {
                let record = witness
                    .branch_witnesses
                    .iter()
                    .find(|r| r.ray_index == branch)
                    .ok_or_else(|| format!("no branch {branch}"))?;
                let order = record
                    .witness
                    .orders
                    .get(level)
                    .and_then(|orders| orders.get(atom))
                    .ok_or_else(|| format!("no atom {atom} at level {level}"))?;
                order
                    .sequence()
                    .get(position)
                    .copied()
                    .ok_or_else(|| format!("no position {position}"))
            }
            PointAddress::Star => Err("the adjoined point has no index in a ray witness".into()),
            PointAddress::Class { .. } => Err("class address in a ray witness".into()),
        },
        &mut v,
    );

    Ok(CheckReport::from_violations(v.0))
}

/// Verifies a witness against its instance, re-deriving every claim.
///
/// Rule violations land in the report; an error is returned only when the
/// witness is not even of the instance's kind.
pub fn verify_witness(instance: &Instance, witness: &TopologyWitness) -> Result<CheckReport> {
    match instance {
        Instance::Finite(system) => verify_finite(system, witness),
        Instance::Ray(envelope) => verify_ray(&envelope.ray, witness),
    }
}

/// Verifies just the continuity certificate of a ray witness: the bare tail
/// schema plus the branch-preimage inclusion scan.
///
/// A missing or non-bare tail schema makes the symbolic part of the
/// certificate unusable, so it is a hard [`Error::CertificateFailure`]; the
/// scan itself reports violations.
pub fn verify_continuity_at_star(
    ray: &RayPresentation,
    witness: &TopologyWitness,
) -> Result<CheckReport> {
    ray.validate()?;
    match witness.tail {
        Some(tail) if tail.bare && tail.from_index == ray.prefix => {}
        Some(tail) => {
            return Err(Error::CertificateFailure {
                branch: tail.from_index,
                reason: "tail schema does not certify bare singletons from the prefix on".into(),
            })
        }
        None => {
            return Err(Error::CertificateFailure {
                branch: ray.prefix,
                reason: "ray witness carries no tail schema".into(),
            })
        }
    }
    let mut v = Violations(Vec::new());
    continuity_scan(ray, witness, &mut v);
    Ok(CheckReport::from_violations(v.0))
}
