//! Seeded random instance generation.
//!
//! Every generated map sends point 0 to itself and every other point `i` to
//! some point below `i`, so the only cycle is the self-loop at 0 and the
//! shrinking condition holds by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::SelfmapSystem;

/// Bias of the parent choice, controlling the forest silhouette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Parent drawn uniformly from the points below.
    Uniform,
    /// Parent is the previous point three times out of four: long chains,
    /// deep level structures.
    DeepChain,
    /// Parent is the fixed point three times out of four: shallow, wide
    /// stars with many one-level classes.
    WideFan,
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Shape::Uniform),
            "deep-chain" => Ok(Shape::DeepChain),
            "wide-fan" => Ok(Shape::WideFan),
            other => Err(Error::Parse(format!(
                "unknown shape {other:?}; expected uniform, deep-chain, or wide-fan"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub size: usize,
    pub seed: u64,
    pub shape: Shape,
}

/// Generates a system deterministically from the config.
pub fn gen_system(config: &GeneratorConfig) -> Result<SelfmapSystem> {
    if config.size == 0 {
        return Err(Error::InvalidConstruction {
            what: "generator config".into(),
            reason: "size must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut map = Vec::with_capacity(config.size);
    map.push(0);
    for i in 1..config.size {
        let parent = match config.shape {
            Shape::Uniform => rng.gen_range(0..i),
            Shape::DeepChain => {
                if rng.gen_ratio(3, 4) {
                    i - 1
                } else {
                    rng.gen_range(0..i)
                }
            }
            Shape::WideFan => {
                if rng.gen_ratio(3, 4) {
                    0
                } else {
                    rng.gen_range(0..i)
                }
            }
        };
        map.push(parent);
    }
    SelfmapSystem::new(map)
}
