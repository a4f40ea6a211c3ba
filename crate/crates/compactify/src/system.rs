//! Finite selfmap systems and the shrinking condition.
//!
//! A selfmap system is a finite set `{0, …, size-1}` together with a total
//! map `T` given as a lookup table. The shrinking condition asks that the
//! intersection of the iterated images `TⁿX` is a single point; that point is
//! then the unique fixed point of `T` and the root the whole forest hangs on.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Point;

/// A finite set with a total selfmap, stored as a function table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SelfmapSystem {
    map: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    size: usize,
    map: Vec<Point>,
}

impl TryFrom<RawSystem> for SelfmapSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        if raw.map.len() != raw.size {
            return Err(Error::Parse(format!(
                "field \"map\": has {} entries but \"size\" is {}",
                raw.map.len(),
                raw.size
            )));
        }
        SelfmapSystem::new(raw.map)
    }
}

impl From<SelfmapSystem> for RawSystem {
    fn from(s: SelfmapSystem) -> Self {
        RawSystem {
            size: s.size(),
            map: s.map,
        }
    }
}

impl SelfmapSystem {
    /// Builds a system from a function table; entry `i` is the image of `i`.
    pub fn new(map: Vec<Point>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::InvalidConstruction {
                what: "selfmap system",
                reason: "size must be at least 1".into(),
            });
        }
        let size = map.len();
        for (i, &t) in map.iter().enumerate() {
            if t >= size {
                return Err(Error::Parse(format!(
                    "field \"map\": entry at index {i} is {t}, out of range for size {size}"
                )));
            }
        }
        Ok(SelfmapSystem { map })
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    /// The image of a point under `T`.
    pub fn apply(&self, x: Point) -> Point {
        self.map[x]
    }

    pub fn table(&self) -> &[Point] {
        &self.map
    }

    pub fn points(&self) -> impl Iterator<Item = Point> {
        0..self.map.len()
    }
}

/// The outcome of testing the shrinking condition on a system.
///
/// `eventual_image` is the limit of the decreasing image sets `TⁿX`;
/// `stabilized_at` is the first `n` with `TⁿX = Tⁿ⁺¹X` (indices from 0, so a
/// system that is already stable reports 0). The condition holds exactly when
/// the eventual image is a singleton fixed point.
///
/// For ray presentations the star is implicit rather than an index, so ray
/// reports carry `fixed_point: None` and an empty `eventual_image` alongside
/// `holds: true`; see [`crate::ray::check_condition_ray`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub fixed_point: Option<Point>,
    pub stabilized_at: usize,
    pub eventual_image: BTreeSet<Point>,
}

/// Decides the shrinking condition by iterating image-of-image to a fixpoint.
pub fn check_condition(system: &SelfmapSystem) -> ConditionReport {
    let mut current: BTreeSet<Point> = system.points().collect();
    let mut stabilized_at = 0usize;
    loop {
        let next: BTreeSet<Point> = current.iter().map(|&x| system.apply(x)).collect();
        if next == current {
            break;
        }
        current = next;
        stabilized_at += 1;
    }
    let holds = current.len() == 1 && {
        let x = *current.first().expect("nonempty");
        system.apply(x) == x
    };
    ConditionReport {
        holds,
        fixed_point: holds.then(|| *current.first().expect("nonempty")),
        stabilized_at,
        eventual_image: current,
    }
}

/// The set of points mapping into `targets`.
pub fn preimage(system: &SelfmapSystem, targets: &BTreeSet<Point>) -> Result<BTreeSet<Point>> {
    if let Some(&bad) = targets.iter().find(|&&t| t >= system.size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            context: format!("preimage target in a system of size {}", system.size()),
        });
    }
    Ok(system
        .points()
        .filter(|&x| targets.contains(&system.apply(x)))
        .collect())
}

/// The forward orbit of `x`, truncated at the first repetition.
pub fn orbit(system: &SelfmapSystem, x: Point) -> Result<Vec<Point>> {
    if x >= system.size() {
        return Err(Error::IndexOutOfRange {
            index: x,
            context: format!("orbit start in a system of size {}", system.size()),
        });
    }
    let mut seen = BTreeSet::new();
    let mut sequence = Vec::new();
    let mut current = x;
    while seen.insert(current) {
        sequence.push(current);
        current = system.apply(current);
    }
    Ok(sequence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(map: &[Point]) -> SelfmapSystem {
        SelfmapSystem::new(map.to_vec()).unwrap()
    }

    #[test]
    fn identity_on_a_point_holds() {
        let report = check_condition(&sys(&[0]));
        assert!(report.holds);
        assert_eq!(report.fixed_point, Some(0));
        assert_eq!(report.eventual_image, BTreeSet::from([0]));
        assert_eq!(report.stabilized_at, 0);
    }

    #[test]
    fn four_point_tree_holds() {
        // TX = {0,1}, T²X = {0}
        let report = check_condition(&sys(&[0, 0, 0, 1]));
        assert!(report.holds);
        assert_eq!(report.fixed_point, Some(0));
        assert_eq!(report.stabilized_at, 2);
        assert_eq!(report.eventual_image, BTreeSet::from([0]));
    }

    #[test]
    fn swap_fails() {
        let report = check_condition(&sys(&[1, 0]));
        assert!(!report.holds);
        assert_eq!(report.fixed_point, None);
        assert_eq!(report.eventual_image, BTreeSet::from([0, 1]));
    }

    #[test]
    fn preimage_examples() {
        let s = sys(&[0, 0, 0, 1]);
        assert_eq!(
            preimage(&s, &BTreeSet::from([0])).unwrap(),
            BTreeSet::from([0, 1, 2])
        );
        assert_eq!(preimage(&s, &BTreeSet::new()).unwrap(), BTreeSet::new());
        assert_eq!(
            preimage(&s, &BTreeSet::from([1])).unwrap(),
            BTreeSet::from([3])
        );
        assert!(matches!(
            preimage(&s, &BTreeSet::from([9])),
            Err(Error::IndexOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn orbit_examples() {
        let s = sys(&[0, 0, 0, 1]);
        assert_eq!(orbit(&s, 3).unwrap(), vec![3, 1, 0]);
        assert_eq!(orbit(&s, 0).unwrap(), vec![0]);
        let swap = sys(&[1, 0]);
        assert_eq!(orbit(&swap, 0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn rejects_out_of_range_table() {
        assert!(SelfmapSystem::new(vec![0, 5]).is_err());
        assert!(SelfmapSystem::new(vec![]).is_err());
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let s = sys(&[0, 0, 0, 1]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"size":4,"map":[0,0,0,1]}"#);
        let back: SelfmapSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);

        let short: std::result::Result<SelfmapSystem, _> =
            serde_json::from_str(r#"{"size":4,"map":[0,0,0]}"#);
        let msg = short.unwrap_err().to_string();
        assert!(msg.contains("map"), "diagnostic names the field: {msg}");

        let out_of_range: std::result::Result<SelfmapSystem, _> =
            serde_json::from_str(r#"{"size":2,"map":[0,7]}"#);
        let msg = out_of_range.unwrap_err().to_string();
        assert!(msg.contains("index 1"), "diagnostic names the entry: {msg}");
    }
}
