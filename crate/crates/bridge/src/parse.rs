use std::fmt::Write as _;

use serde_json::{json, Value};
use sgrl_core::achievements::AchievementId;
use sgrl_core::planner::{validate_weights, AgentProgress, GoalId, Weights};
use sgrl_core::pruner::ActionMask;
use sgrl_core::world::Action;

use crate::client::Verdict;
use crate::BridgeError;

/// Actions named in a mask reply. Reads the last `{...}` group when there
/// is one, otherwise the text after "Related actions:", otherwise all of
/// it. Names match the action vocabulary exactly, ignoring case; spaces
/// inside a name count as underscores. Unknown names are skipped.
pub fn parse_mask_response(text: &str) -> Result<ActionMask, BridgeError> {
    let body = match (text.rfind('{'), text.rfind('}')) {
        (Some(a), Some(b)) if a < b => &text[a + 1..b],
        _ => {
            let lower = text.to_ascii_lowercase();
            match lower.rfind("related actions:") {
                Some(i) => &text[i + "related actions:".len()..],
                None => text,
            }
        }
    };
    let mut actions = Vec::new();
    for raw in body.split([',', '\n', ';']) {
        let name = raw
            .trim()
            .trim_matches(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .split_whitespace()
            .collect::<Vec<_>>()
            .join("_")
            .to_ascii_lowercase();
        if name.is_empty() {
            continue;
        }
        match Action::from_name(&name) {
            Some(a) => actions.push(a),
            None => log::warn!("ignoring unknown action '{name}' in mask reply"),
        }
    }
    if actions.is_empty() {
        return Err(BridgeError::InvalidResponse("no recognized actions".into()));
    }
    Ok(ActionMask::from_actions(&actions))
}

/// Weights from a reply of `name = value` or `"name": value` pairs, merged
/// over `current`. Unknown names and negative or non-finite values are
/// skipped with a warning; the merged table must still be valid.
pub fn parse_priority_response(text: &str, current: &Weights) -> Result<Weights, BridgeError> {
    let mut w = *current;
    let mut accepted = 0;
    for line in text.lines() {
        let line = line.split('#').next().unwrap();
        for seg in line.split([',', '{', '}']) {
            let Some((name, value)) = seg.split_once('=').or_else(|| seg.split_once(':')) else {
                continue;
            };
            let name = name
                .trim()
                .trim_start_matches(['-', '*'])
                .trim()
                .trim_matches(|c| c == '"' || c == '\'')
                .trim();
            let Ok(value) = value
                .trim()
                .trim_end_matches([',', ';'])
                .trim()
                .parse::<f64>()
            else {
                continue;
            };
            match GoalId::from_text(name) {
                Some(g) if value.is_finite() && value >= 0.0 => {
                    w[g.index()] = value;
                    accepted += 1;
                }
                Some(g) => log::warn!("rejecting weight {value} for {}", g.name()),
                None => log::warn!("ignoring weight for unknown goal '{name}'"),
            }
        }
    }
    if accepted == 0 {
        return Err(BridgeError::InvalidResponse("no goal weights found".into()));
    }
    validate_weights(&w).map_err(|e| BridgeError::InvalidResponse(e.to_string()))?;
    Ok(w)
}

/// First standalone "good" or "bad" in a review, ignoring case.
pub fn parse_verdict(text: &str) -> Verdict {
    for word in text.split(|c: char| !c.is_ascii_alphabetic()) {
        if word.eq_ignore_ascii_case("good") {
            return Verdict::Good;
        }
        if word.eq_ignore_ascii_case("bad") {
            return Verdict::Bad;
        }
    }
    Verdict::Unknown
}

/// Longest fenced code block, without the fences and language tag.
pub fn extract_code(text: &str) -> Option<String> {
    let parts: Vec<&str> = text.split("```").collect();
    parts
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 1 && i + 1 < parts.len())
        .map(|(_, block)| match block.split_once('\n') {
            Some((tag, rest)) if !tag.trim().contains(' ') => rest,
            _ => block,
        })
        .max_by_key(|b| b.len())
        .map(|b| b.trim_end().to_owned())
}

/// The weights as the priority constant of a goal-generation module.
pub fn weights_as_code(w: &Weights) -> String {
    let mut s = String::from("GOAL_PRIORITIES = {\n");
    for g in GoalId::all() {
        let _ = writeln!(s, "    \"{}\": {},", g.name(), w[g.index()]);
    }
    s.push_str("}\n");
    s
}

/// Training progress in the structured form sent with priority updates.
pub fn agent_state_json(progress: &AgentProgress) -> String {
    let rates = progress.window_rates();
    let all: Value = AchievementId::ALL
        .iter()
        .map(|a| {
            let pct = if progress.episodes > 0 {
                100.0 * progress.unlock_counts[a.index()] as f64 / progress.episodes as f64
            } else {
                0.0
            };
            (a.name().to_owned(), json!(pct))
        })
        .collect::<serde_json::Map<_, _>>()
        .into();
    let window: Value = AchievementId::ALL
        .iter()
        .map(|a| (a.name().to_owned(), json!(rates[a.index()])))
        .collect::<serde_json::Map<_, _>>()
        .into();
    let doc = json!({
        "step": progress.step,
        "episodes": progress.episodes,
        "success_rate_percent": all,
        "recent_success_rate_percent": window,
        "recent_episodes": progress.window_episodes,
        "last_episode_unlocked": progress.last_unlocked.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "last_observation": progress.last_text,
    });
    serde_json::to_string_pretty(&doc).unwrap()
}
