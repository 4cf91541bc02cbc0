//! Round-trip properties for the plan formats over randomly generated plans.

use proptest::prelude::*;

use lw_core::plan::{decode_plan, encode_plan, ConditionalPlan, PlanFormat, PlanStep};
use lw_core::skills::library;

/// Plans sampled from the realistic vocabulary: conditions are sentences
/// over task words, skills are library descriptions (the space the grounding
/// pipeline produces).
fn arb_plan() -> impl Strategy<Value = ConditionalPlan> {
    let condition_words = prop::sample::select(vec![
        "the gripper is open",
        "the gripper is closed",
        "the gripper is near the puck",
        "the gripper is not near the drawer handle",
        "the gripper is above the peg",
        "the gripper is around the handle",
        "the puck is touching the table",
        "the gripper is not behind the wall",
    ]);
    let skills = prop::sample::select(
        library()
            .iter()
            .map(|s| s.description.to_string())
            .collect::<Vec<_>>(),
    );
    let step = (condition_words, skills).prop_map(|(condition, skill)| PlanStep {
        condition: condition.to_string(),
        skill,
    });
    (
        prop::sample::select(vec![
            "push", "pick-place", "drawer-open", "handle-pull", "faucet-open",
        ]),
        prop::collection::vec(step, 1..8),
    )
        .prop_map(|(task, steps)| ConditionalPlan {
            task: task.to_string(),
            description: format!("work on {task}"),
            steps,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_inverts_encode(plan in arb_plan()) {
        for format in PlanFormat::ALL {
            let text = encode_plan(&plan, format);
            let decoded = decode_plan(&text, format).unwrap();
            prop_assert_eq!(&decoded, &plan, "format {}", format.name());
        }
    }

    #[test]
    fn chain_py_structure(plan in arb_plan()) {
        let text = encode_plan(&plan, PlanFormat::ChainPy);
        prop_assert_eq!(text.matches("elif check(").count(), plan.steps.len() - 1);
        prop_assert_eq!(text.matches("check(").count(), plan.steps.len() * 2);
    }
}

#[test]
fn checked_in_fixture_decodes_to_equivalent_steps() {
    // A canonical-style completion with surrounding chatter decodes to the
    // same step list it encodes back to.
    let text = r#"
Sure! Here's the plan you asked for.

# Task: shelf-place: pick up the puck and put it on the shelf
# Plan:
# 1. If the gripper is not near the puck, move the gripper above the puck.
def shelf_place(robot):
    if check("the gripper is not near the puck"):
        robot.move("gripper above puck")
    elif check("the gripper is open"):
        robot.close_gripper()
    elif check("the gripper is closed"):
        robot.put("puck on goal")

Good luck!
"#;
    let plan = decode_plan(text, PlanFormat::ChainPy).unwrap();
    assert_eq!(plan.steps.len(), 3);
    let reencoded = encode_plan(&plan, PlanFormat::ChainPy);
    let redecoded = decode_plan(&reencoded, PlanFormat::ChainPy).unwrap();
    assert_eq!(redecoded.steps, plan.steps);
}
