use serde::{Deserialize, Serialize};

use crate::BridgeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptRole {
    PlannerDesign,
    PlannerImplement,
    PlannerReflect,
    PriorityUpdate,
    ActionMask,
}

/// Placeholder tokens as they appear in template text.
pub const PLACEHOLDERS: [&str; 4] = [
    "{last_llm_response}",
    "{goal}",
    "{goal_code.py}",
    "{agent_state.json}",
];

impl PromptRole {
    pub const ALL: [PromptRole; 5] = [
        PromptRole::PlannerDesign,
        PromptRole::PlannerImplement,
        PromptRole::PlannerReflect,
        PromptRole::PriorityUpdate,
        PromptRole::ActionMask,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptRole::PlannerDesign => "planner_design",
            PromptRole::PlannerImplement => "planner_implement",
            PromptRole::PlannerReflect => "planner_reflect",
            PromptRole::PriorityUpdate => "priority_update",
            PromptRole::ActionMask => "action_mask",
        }
    }

    /// Placeholders the role's template must contain, and no others.
    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            PromptRole::PlannerDesign => &[],
            PromptRole::PlannerImplement | PromptRole::PlannerReflect => &["{last_llm_response}"],
            PromptRole::PriorityUpdate => &["{goal_code.py}", "{agent_state.json}"],
            PromptRole::ActionMask => &["{goal}"],
        }
    }

    fn builtin(self) -> &'static str {
        match self {
            PromptRole::PlannerDesign => include_str!("../templates/planner_design.txt"),
            PromptRole::PlannerImplement => include_str!("../templates/planner_implement.txt"),
            PromptRole::PlannerReflect => include_str!("../templates/planner_reflect.txt"),
            PromptRole::PriorityUpdate => include_str!("../templates/priority_update.txt"),
            PromptRole::ActionMask => include_str!("../templates/action_mask.txt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    role: PromptRole,
    text: String,
}

impl PromptTemplate {
    /// Checks that the placeholder set matches the role.
    pub fn new(role: PromptRole, text: impl Into<String>) -> Result<PromptTemplate, BridgeError> {
        let text = text.into();
        let want = role.placeholders();
        for p in PLACEHOLDERS {
            let present = text.contains(p);
            let required = want.contains(&p);
            if required && !present {
                return Err(BridgeError::Template(format!(
                    "{} template is missing {p}",
                    role.name()
                )));
            }
            if present && !required {
                return Err(BridgeError::Template(format!(
                    "{} template must not contain {p}",
                    role.name()
                )));
            }
        }
        Ok(PromptTemplate { role, text })
    }

    pub fn builtin(role: PromptRole) -> PromptTemplate {
        PromptTemplate::new(role, role.builtin()).expect("shipped templates are valid")
    }

    pub fn role(&self) -> PromptRole {
        self.role
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Substitutes every placeholder. `values` must cover the role's set.
    pub fn render(&self, values: &[(&str, &str)]) -> Result<String, BridgeError> {
        let mut out = self.text.clone();
        for p in self.role.placeholders() {
            let v = values
                .iter()
                .find(|(k, _)| k == p)
                .map(|(_, v)| *v)
                .ok_or_else(|| BridgeError::Template(format!("no value for {p}")))?;
            out = out.replace(p, v);
        }
        Ok(out)
    }
}

/// One template per role.
#[derive(Debug, Clone, PartialEq)]
pub struct Templates {
    items: Vec<PromptTemplate>,
}

impl Default for Templates {
    fn default() -> Self {
        Templates {
            items: PromptRole::ALL
                .iter()
                .map(|r| PromptTemplate::builtin(*r))
                .collect(),
        }
    }
}

impl Templates {
    pub fn get(&self, role: PromptRole) -> &PromptTemplate {
        self.items.iter().find(|t| t.role == role).unwrap()
    }

    /// Replaces a role's template after validating it.
    pub fn set(&mut self, role: PromptRole, text: impl Into<String>) -> Result<(), BridgeError> {
        let t = PromptTemplate::new(role, text)?;
        let slot = self.items.iter_mut().find(|t| t.role == role).unwrap();
        *slot = t;
        Ok(())
    }
}
