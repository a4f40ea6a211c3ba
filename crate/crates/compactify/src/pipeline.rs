//! The end-to-end pipeline: parse, check the condition, build the witness,
//! verify it independently, and fold everything into one report with a
//! stable exit-code mapping.

use serde::{Deserialize, Serialize};

use crate::checker::{verify_witness, CheckReport};
use crate::error::Error;
use crate::instance::Instance;
use crate::order::OrderPolicy;
use crate::system::ConditionReport;
use crate::witness::{build_witness_with, TopologyWitness};

/// What the pipeline concluded. Each variant owns one exit code, so CI
/// harnesses can assert outcomes without parsing the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineOutcome {
    /// Witness built and independently verified (exit 0).
    Verified,
    /// The shrinking condition fails for the instance (exit 1).
    ConditionFails,
    /// Construction or verification broke an internal invariant (exit 2).
    InvariantViolation,
    /// The input could not be parsed (exit 3).
    ParseError,
}

impl PipelineOutcome {
    pub fn exit_code(self) -> i32 {
        match self {
            PipelineOutcome::Verified => 0,
            PipelineOutcome::ConditionFails => 1,
            PipelineOutcome::InvariantViolation => 2,
            PipelineOutcome::ParseError => 3,
        }
    }
}

/// Full pipeline result. Fields fill in as far as the run progressed, so a
/// parse error leaves everything except `error` empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub outcome: PipelineOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<TopologyWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckReport>,
}

impl PipelineReport {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize infallibly")
    }

    fn failed(outcome: PipelineOutcome, error: String) -> Self {
        PipelineReport {
            outcome,
            error: Some(error),
            condition: None,
            class_count: None,
            branch_count: None,
            witness: None,
            check: None,
        }
    }
}

/// Runs the pipeline on raw JSON text.
pub fn run_pipeline(text: &str, policy: OrderPolicy) -> PipelineReport {
    let instance = match Instance::from_json_str(text) {
        Ok(instance) => instance,
        Err(e) => return PipelineReport::failed(PipelineOutcome::ParseError, e.to_string()),
    };
    run_pipeline_instance(&instance, policy)
}

/// Runs the pipeline on an already parsed instance.
pub fn run_pipeline_instance(instance: &Instance, policy: OrderPolicy) -> PipelineReport {
    let condition = match instance.check() {
        Ok(condition) => condition,
        Err(e) => return PipelineReport::failed(PipelineOutcome::ConditionFails, e.to_string()),
    };
    if !condition.holds {
        let mut report = PipelineReport::failed(
            PipelineOutcome::ConditionFails,
            format!(
                "intersection of the iterated images is {:?}, not a single point",
                condition.eventual_image
            ),
        );
        report.condition = Some(condition);
        return report;
    }

    let witness = match build_witness_with(instance, policy) {
        Ok(witness) => witness,
        Err(e) => {
            let mut report = PipelineReport::failed(
                PipelineOutcome::InvariantViolation,
                format!("construction failed: {e}"),
            );
            report.condition = Some(condition);
            return report;
        }
    };
    let check = match verify_witness(instance, &witness) {
        Ok(check) => check,
        Err(e) => {
            let mut report = PipelineReport::failed(
                PipelineOutcome::InvariantViolation,
                format!("verification could not run: {e}"),
            );
            report.condition = Some(condition);
            report.witness = Some(witness);
            return report;
        }
    };

    let outcome = if check.passed {
        PipelineOutcome::Verified
    } else {
        PipelineOutcome::InvariantViolation
    };
    PipelineReport {
        outcome,
        error: (!check.passed).then(|| "constructed witness failed verification".into()),
        condition: Some(condition),
        class_count: Some(witness.class_witnesses.len()),
        branch_count: Some(witness.branch_witnesses.len()),
        witness: Some(witness),
        check: Some(check),
    }
}

/// Maps a library error to the pipeline exit code it corresponds to, for
/// subcommands that stop before a full report exists.
pub fn exit_code_for_error(error: &Error) -> i32 {
    match error {
        Error::Parse(_) => 3,
        Error::ConditionFails(_) => 1,
        _ => 2,
    }
}
