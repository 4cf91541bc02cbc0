//! Encoding and decoding of plans in the three textual formats.
//!
//! Decoders are tolerant: surrounding prose, chain-of-thought comments, and
//! markdown fences are skipped, and only (condition, skill) pairs are
//! recovered. Decoding fails only when no step is recoverable.

use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::plan::{ConditionalPlan, PlanFormat, PlanStep};

/// Nouns that take an article when a skill call is inflected back to
/// natural language, longest phrase first.
const NOUNS: [&str; 18] = [
    "drawer handle",
    "window handle",
    "faucet handle",
    "door handle",
    "gripper",
    "drawer",
    "window",
    "faucet",
    "handle",
    "button",
    "door",
    "plate",
    "table",
    "puck",
    "peg",
    "hole",
    "goal",
    "wall",
];

fn is_article(word: &str) -> bool {
    matches!(word, "the" | "a" | "an")
}

/// Insert "the" before every known noun phrase in a word sequence.
fn insert_articles(words: &[&str]) -> String {
    let mut out: Vec<String> = Vec::with_capacity(words.len() + 4);
    let mut i = 0;
    while i < words.len() {
        let mut matched = false;
        for noun in NOUNS {
            let parts: Vec<&str> = noun.split_whitespace().collect();
            if words.len() >= i + parts.len() && words[i..i + parts.len()] == parts[..] {
                out.push("the".to_string());
                out.extend(parts.iter().map(|w| w.to_string()));
                i += parts.len();
                matched = true;
                break;
            }
        }
        if !matched {
            out.push(words[i].to_string());
            i += 1;
        }
    }
    out.join(" ")
}

/// Render a skill description as a python-like call: articles are dropped,
/// the leading verb becomes the method, and the remaining words become the
/// quoted argument. Two-word skills collapse into a bare method call.
pub fn description_to_skill_call(description: &str) -> String {
    let words: Vec<&str> = description
        .split_whitespace()
        .filter(|w| !is_article(w))
        .collect();
    if words.len() <= 2 {
        format!("robot.{}()", words.join("_"))
    } else {
        format!("robot.{}(\"{}\")", words[0], words[1..].join(" "))
    }
}

fn call_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"robot\.([a-zA-Z_]+)\(\s*(?:"([^"]*)"|'([^']*)')?\s*\)"#).unwrap()
    })
}

fn check_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"check\(\s*(?:"([^"]*)"|'([^']*)')\s*\)"#).unwrap())
}

/// Turn a `robot.<verb>("<args>")` call back into a natural-language skill
/// description via article re-insertion.
pub fn skill_call_to_description(call: &str) -> Result<String> {
    let captures = call_regex()
        .captures(call)
        .ok_or_else(|| Error::BadSkillCall(call.to_string()))?;
    let method = captures.get(1).unwrap().as_str().to_lowercase();
    let args = captures
        .get(2)
        .or_else(|| captures.get(3))
        .map(|m| m.as_str().to_lowercase())
        .unwrap_or_default();

    let method_words: Vec<&str> = method.split('_').filter(|w| !w.is_empty()).collect();
    if method_words.is_empty() {
        return Err(Error::BadSkillCall(call.to_string()));
    }
    let arg_words: Vec<&str> = args.split_whitespace().collect();

    let (verb, rest): (&str, Vec<&str>) = if arg_words.is_empty() {
        (method_words[0], method_words[1..].to_vec())
    } else {
        (method_words[0], arg_words)
    };
    let tail = insert_articles(&rest);
    if tail.is_empty() {
        Ok(verb.to_string())
    } else {
        Ok(format!("{verb} {tail}"))
    }
}

fn python_fn_name(task: &str) -> String {
    task.replace(['-', ' '], "_")
}

/// Deterministically render a plan in the given format.
pub fn encode_plan(plan: &ConditionalPlan, format: PlanFormat) -> String {
    match format {
        PlanFormat::PlainList => {
            let mut out = format!(
                "task: {}\ndescription: {}\nplan:\n",
                plan.task, plan.description
            );
            for step in &plan.steps {
                out.push_str(&format!("if {}: {}\n", step.condition, step.skill));
            }
            out
        }
        PlanFormat::BasicPyMd => {
            let mut out = format!("## {}\n\n{}\n\n```python\n", plan.task, plan.description);
            out.push_str(&format!("def {}(robot):\n", python_fn_name(&plan.task)));
            for (idx, step) in plan.steps.iter().enumerate() {
                let keyword = if idx == 0 { "if" } else { "elif" };
                out.push_str(&format!("    {keyword} check(\"{}\"):\n", step.condition));
                out.push_str(&format!(
                    "        {}\n",
                    description_to_skill_call(&step.skill)
                ));
            }
            out.push_str("```\n");
            out
        }
        PlanFormat::ChainPy => {
            let mut out = format!("# Task: {}: {}\n# Plan:\n", plan.task, plan.description);
            for (idx, step) in plan.steps.iter().enumerate() {
                out.push_str(&format!(
                    "# {}. If {}, {}.\n",
                    idx + 1,
                    step.condition,
                    step.skill
                ));
            }
            out.push_str(&format!("def {}(robot):\n", python_fn_name(&plan.task)));
            for (idx, step) in plan.steps.iter().enumerate() {
                let keyword = if idx == 0 { "if" } else { "elif" };
                out.push_str(&format!("    {keyword} check(\"{}\"):\n", step.condition));
                out.push_str(&format!(
                    "        {}\n",
                    description_to_skill_call(&step.skill)
                ));
            }
            out
        }
    }
}

fn decode_plain_list(text: &str) -> (String, String, Vec<PlanStep>) {
    let mut task = String::new();
    let mut description = String::new();
    let mut steps = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("task:") {
            task = rest.trim().to_string();
        } else if let Some(rest) = line.strip_prefix("description:") {
            description = rest.trim().to_string();
        } else if let Some(rest) = line.strip_prefix("if ") {
            if let Some((condition, skill)) = rest.split_once(": ") {
                let condition = condition.trim();
                let skill = skill.trim();
                if !condition.is_empty() && !skill.is_empty() {
                    steps.push(PlanStep {
                        condition: condition.to_string(),
                        skill: skill.to_string(),
                    });
                }
            }
        }
    }
    (task, description, steps)
}

fn decode_python_like(text: &str) -> (String, String, Vec<PlanStep>) {
    let mut task = String::new();
    let mut description = String::new();
    let mut steps = Vec::new();
    let mut pending: Option<String> = None;

    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("# Task:") {
            if let Some((name, desc)) = rest.trim().split_once(": ") {
                task = name.trim().to_string();
                description = desc.trim().to_string();
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("## ") {
            task = rest.trim().to_string();
            continue;
        }
        if trimmed.starts_with('#') || trimmed.starts_with("```") {
            continue;
        }
        if description.is_empty()
            && steps.is_empty()
            && pending.is_none()
            && !trimmed.is_empty()
            && !trimmed.contains("robot.")
            && !trimmed.contains("check(")
            && !trimmed.starts_with("def ")
        {
            // Markdown body line before the code block.
            description = trimmed.to_string();
            continue;
        }

        let mut search_from = 0;
        if let Some(m) = check_regex().captures(trimmed) {
            let condition = m.get(1).or_else(|| m.get(2)).unwrap().as_str().trim();
            if !condition.is_empty() {
                pending = Some(condition.to_string());
            }
            search_from = m.get(0).unwrap().end();
        }
        if let Some(m) = call_regex().find(&trimmed[search_from..]) {
            if let Some(condition) = pending.take() {
                if let Ok(skill) = skill_call_to_description(m.as_str()) {
                    steps.push(PlanStep { condition, skill });
                }
            }
        }
    }
    (task, description, steps)
}

/// Recover a plan from (possibly noisy) completion text. Unparsable lines
/// are skipped; an error is returned only when no step is recoverable.
pub fn decode_plan(text: &str, format: PlanFormat) -> Result<ConditionalPlan> {
    let (task, description, steps) = match format {
        PlanFormat::PlainList => decode_plain_list(text),
        PlanFormat::BasicPyMd | PlanFormat::ChainPy => decode_python_like(text),
    };
    if steps.is_empty() {
        return Err(Error::EmptyPlan {
            raw: text.to_string(),
        });
    }
    Ok(ConditionalPlan {
        task,
        description,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::PlanFormat;
    use crate::sim::find_task;
    use crate::skills::{expert_plan, library};

    fn drawer_plan() -> ConditionalPlan {
        let task = find_task("drawer-open").unwrap();
        ConditionalPlan::from_expert(expert_plan("drawer-open").unwrap(), task).unwrap()
    }

    #[test]
    fn plain_list_renders_if_lines_in_order() {
        let plan = drawer_plan();
        let text = encode_plan(&plan, PlanFormat::PlainList);
        let if_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("if ")).collect();
        assert_eq!(if_lines.len(), 5);
        assert_eq!(
            if_lines[0],
            "if the gripper is closed and not near the drawer handle: open the gripper"
        );
        assert!(if_lines[4].ends_with("pull the drawer open"));
    }

    #[test]
    fn chain_py_has_one_fewer_elif_than_steps() {
        let plan = drawer_plan();
        let text = encode_plan(&plan, PlanFormat::ChainPy);
        let elifs = text.matches("elif ").count();
        assert_eq!(elifs, plan.steps.len() - 1);
        assert_eq!(text.matches("if check(").count(), plan.steps.len());
    }

    #[test]
    fn round_trip_all_formats() {
        let plan = drawer_plan();
        for format in PlanFormat::ALL {
            let decoded = decode_plan(&encode_plan(&plan, format), format).unwrap();
            assert_eq!(decoded, plan, "format {}", format.name());
        }
    }

    #[test]
    fn library_descriptions_survive_call_round_trip() {
        for skill in library() {
            let call = description_to_skill_call(skill.description);
            let back = skill_call_to_description(&call).unwrap();
            assert_eq!(back, skill.description, "via {call}");
        }
    }

    #[test]
    fn place_call_inflects_with_articles() {
        assert_eq!(
            skill_call_to_description(r#"robot.place("gripper above puck")"#).unwrap(),
            "place the gripper above the puck"
        );
        assert_eq!(
            skill_call_to_description("robot.close_gripper()").unwrap(),
            "close the gripper"
        );
    }

    #[test]
    fn bad_call_is_rejected() {
        assert!(skill_call_to_description("move(gripper)").is_err());
    }

    #[test]
    fn decoder_skips_chain_of_thought_noise() {
        let text = r#"
Sure! Here is a plan.

# Task: drawer-open: open the drawer
# Plan:
# 1. First think about where the handle is.
def drawer_open(robot):
    if check("the gripper is not near the drawer handle"):
        robot.move("gripper above drawer handle")
    elif check('the gripper is closed and around the drawer'):
        robot.pull("drawer open")

Hope that helps!
"#;
        let plan = decode_plan(text, PlanFormat::ChainPy).unwrap();
        assert_eq!(plan.task, "drawer-open");
        assert_eq!(plan.steps.len(), 2);
        assert_eq!(plan.steps[1].skill, "pull the drawer open");
    }

    #[test]
    fn zero_steps_is_an_error() {
        let err = decode_plan("no code here at all", PlanFormat::ChainPy).unwrap_err();
        assert!(matches!(err, Error::EmptyPlan { .. }));
    }
}
