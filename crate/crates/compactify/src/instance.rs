//! Input instances: a finite selfmap table or a finitely presented ray.
//!
//! The two JSON shapes are distinguished by their top-level keys:
//!
//! ```json
//! {"size": 4, "map": [0, 0, 0, 1]}
//! {"ray": {"prefix": 2, "branches": [{"nodes": [5], "parent": {"5": 1}}]}}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ray::{check_condition_ray, RayPresentation};
use crate::system::{check_condition, ConditionReport, SelfmapSystem};

/// A problem instance: either a finite system given by its map table, or an
/// infinite orbit given by its ray presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Instance {
    Finite(SelfmapSystem),
    Ray(RayEnvelope),
}

/// Wrapper giving ray instances their `{"ray": …}` envelope on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayEnvelope {
    pub ray: RayPresentation,
}

impl Instance {
    pub fn finite(system: SelfmapSystem) -> Self {
        Instance::Finite(system)
    }

    pub fn ray(ray: RayPresentation) -> Self {
        Instance::Ray(RayEnvelope { ray })
    }

    /// Parses an instance from JSON, with the key that went wrong named in
    /// the error. The untagged derive is avoided here because it reports
    /// "did not match any variant" instead of the real problem.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        let object = value
            .as_object()
            .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
        if let Some(ray_value) = object.get("ray") {
            let ray: RayPresentation = serde_json::from_value(ray_value.clone())
                .map_err(|e| Error::Parse(format!("field \"ray\": {e}")))?;
            ray.validate()
                .map_err(|e| Error::Parse(format!("field \"ray\": {e}")))?;
            Ok(Instance::ray(ray))
        } else if object.contains_key("size") || object.contains_key("map") {
            let system: SelfmapSystem = serde_json::from_value(value)
                .map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Instance::Finite(system))
        } else {
            Err(Error::Parse(
                "expected either {\"size\", \"map\"} or {\"ray\": …} at the top level".into(),
            ))
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("instances serialize infallibly")
    }

    /// Checks the shrinking condition, dispatching on the instance kind.
    pub fn check(&self) -> Result<ConditionReport> {
        match self {
            Instance::Finite(system) => Ok(check_condition(system)),
            Instance::Ray(envelope) => check_condition_ray(&envelope.ray),
        }
    }

    pub fn as_finite(&self) -> Option<&SelfmapSystem> {
        match self {
            Instance::Finite(system) => Some(system),
            Instance::Ray(_) => None,
        }
    }

    pub fn as_ray(&self) -> Option<&RayPresentation> {
        match self {
            Instance::Finite(_) => None,
            Instance::Ray(envelope) => Some(&envelope.ray),
        }
    }
}
