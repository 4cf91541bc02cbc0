//! Conditional plans: the data model, textual plan formats, prompt
//! construction, a completion client with replay fixtures, and grounding of
//! free-form plans onto the supported query/skill vocabulary.

mod client;
mod format;
mod ground;
mod prompt;

pub use client::{complete, fixture_path as fixture_path_for, prompt_hash, Backend, CompletionRequest, CompletionResult};
pub use format::{decode_plan, encode_plan, skill_call_to_description};
pub use ground::ground_plan;
pub use prompt::{build_prompt, encode_target_header, exemplar_tasks};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::TaskSpec;
use crate::skills::{find_skill, ExpertPlan};

/// One (condition, skill) pair; both sides are free text until grounded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub condition: String,
    pub skill: String,
}

/// An ordered conditional plan for one task. Order carries meaning: the
/// executor picks the first step whose condition holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalPlan {
    pub task: String,
    pub description: String,
    pub steps: Vec<PlanStep>,
}

impl ConditionalPlan {
    /// View a registry expert plan as a conditional plan (conditions stay
    /// canonical sentences; skill ids become their descriptions).
    pub fn from_expert(plan: &ExpertPlan, task: &TaskSpec) -> Result<Self> {
        let steps = plan
            .steps
            .iter()
            .map(|(condition, skill_id)| {
                Ok(PlanStep {
                    condition: condition.to_string(),
                    skill: find_skill(skill_id)?.description.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            task: task.name.clone(),
            description: task.description.clone(),
            steps,
        })
    }
}

/// Textual plan encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanFormat {
    PlainList,
    BasicPyMd,
    ChainPy,
}

impl PlanFormat {
    pub const ALL: [PlanFormat; 3] =
        [PlanFormat::PlainList, PlanFormat::BasicPyMd, PlanFormat::ChainPy];

    pub fn name(self) -> &'static str {
        match self {
            PlanFormat::PlainList => "plain_list",
            PlanFormat::BasicPyMd => "basic_py_md",
            PlanFormat::ChainPy => "chain_py",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::find_task;
    use crate::skills::expert_plan;

    #[test]
    fn format_names_round_trip() {
        for format in PlanFormat::ALL {
            assert_eq!(PlanFormat::from_name(format.name()), Some(format));
        }
        assert_eq!(PlanFormat::from_name("json_blob"), None);
    }

    #[test]
    fn expert_plans_convert_to_conditional_plans() {
        let task = find_task("drawer-open").unwrap();
        let plan = ConditionalPlan::from_expert(expert_plan("drawer-open").unwrap(), task).unwrap();
        assert_eq!(plan.task, "drawer-open");
        assert_eq!(plan.steps.len(), 5);
        assert_eq!(plan.steps[4].skill, "pull the drawer open");
    }
}
