//! Grounding: snap free-form plan text onto the supported vocabulary.

use crate::plan::{ConditionalPlan, PlanStep};
use crate::query::nearest_query;
use crate::sim::TaskSpec;
use crate::skills::nearest_skill;

/// Replace every condition with the nearest supported query and every skill
/// with the nearest library skill description. Step count and order are
/// preserved; the result is closed over the task's query/skill vocabulary
/// and grounding again is a no-op.
pub fn ground_plan(plan: &ConditionalPlan, task: &TaskSpec) -> ConditionalPlan {
    ConditionalPlan {
        task: task.name.clone(),
        description: task.description.clone(),
        steps: plan
            .steps
            .iter()
            .map(|step| PlanStep {
                condition: nearest_query(&step.condition, task),
                skill: nearest_skill(&step.skill).description.to_string(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::supported_queries;
    use crate::sim::find_task;
    use crate::skills::{expert_plan, library};

    #[test]
    fn canonical_plan_is_a_fixpoint() {
        let task = find_task("drawer-open").unwrap();
        let plan = ConditionalPlan {
            task: task.name.clone(),
            description: task.description.clone(),
            steps: vec![PlanStep {
                condition: "the gripper is not near the drawer handle".into(),
                skill: "move the gripper above the drawer handle".into(),
            }],
        };
        assert_eq!(ground_plan(&plan, task), plan);
    }

    #[test]
    fn paraphrased_steps_ground_to_canonical_vocabulary() {
        let task = find_task("drawer-open").unwrap();
        let plan = ConditionalPlan {
            task: String::new(),
            description: String::new(),
            steps: vec![
                PlanStep {
                    condition: "the gripper is not near the drawer handel".into(),
                    skill: "move gripper above drawer handle".into(),
                },
                PlanStep {
                    condition: "the gripper is around the drawer".into(),
                    skill: "pull drawer open".into(),
                },
            ],
        };
        let grounded = ground_plan(&plan, task);
        assert_eq!(
            grounded.steps[0].condition,
            "the gripper is not near the drawer handle"
        );
        assert_eq!(
            grounded.steps[0].skill,
            "move the gripper above the drawer handle"
        );
        assert_eq!(grounded.steps[1].skill, "pull the drawer open");
    }

    #[test]
    fn grounded_plans_are_closed_and_idempotent() {
        let task = find_task("push").unwrap();
        let plan = ConditionalPlan {
            task: String::new(),
            description: String::new(),
            steps: vec![
                PlanStep {
                    condition: "gripper far from the puck".into(),
                    skill: "hover over the puck".into(),
                },
                PlanStep {
                    condition: "holding the puck tight".into(),
                    skill: "shove the puck at the goal".into(),
                },
            ],
        };
        let grounded = ground_plan(&plan, task);
        let queries = supported_queries(task);
        for step in &grounded.steps {
            assert!(queries.contains(&step.condition));
            assert!(library().iter().any(|s| s.description == step.skill));
        }
        assert_eq!(ground_plan(&grounded, task), grounded);
    }

    #[test]
    fn grounding_expert_plans_changes_nothing() {
        for task in crate::sim::registry() {
            let plan =
                ConditionalPlan::from_expert(expert_plan(&task.name).unwrap(), task).unwrap();
            let grounded = ground_plan(&plan, task);
            for (a, b) in plan.steps.iter().zip(&grounded.steps) {
                assert_eq!(a.skill, b.skill);
            }
        }
    }
}
