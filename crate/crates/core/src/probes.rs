//! Probe construction from a value specification, and response cleaning.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Prefix applied verbatim to every probe text.
pub const PROMPT_PREFIX: &str = "Elaborate on: ";

/// Boilerplate that marks a response's opening sentence for removal.
pub const PRETEXT_PATTERN: &str =
    "AI language model,|As AI,|As a sentient AI|language model AI|As an AI";

/// Parent marker for fine types that carry prompts but have no dictionary
/// category (Face, Humility).
pub const UNMAPPED: &str = "unmapped";

/// The ten dictionary categories in circumplex order.
pub const DEFAULT_CIRCLE_ORDER: [&str; 10] =
    ["SE", "CO", "TR", "BE", "UN", "SD", "ST", "HE", "AC", "PO"];

static PRETEXT: LazyLock<Regex> = LazyLock::new(|| Regex::new(PRETEXT_PATTERN).unwrap());

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("invalid value spec JSON: {0}")]
    Json(String),
    #[error("circle_order must list distinct values, found duplicate '{0}'")]
    DuplicateCircleValue(String),
    #[error("circle_order is empty")]
    EmptyCircle,
    #[error("duplicate fine type id '{0}'")]
    DuplicateFineType(String),
    #[error("fine type '{id}' has parent '{parent}', which is neither in circle_order nor \"unmapped\"")]
    UnknownParent { id: String, parent: String },
    #[error("fine type '{id}' has no {field} text")]
    MissingText { id: String, field: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineType {
    pub id: String,
    pub parent: String,
    #[serde(default)]
    pub items: Vec<String>,
    #[serde(default)]
    pub definition: String,
    #[serde(default)]
    pub name: String,
}

impl FineType {
    pub fn is_mapped(&self) -> bool {
        self.parent != UNMAPPED
    }
}

/// Fine-grained value types and the circular order of their parent values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSpec {
    pub fine_types: Vec<FineType>,
    pub circle_order: Vec<String>,
}

impl ValueSpec {
    pub fn from_json(source: &str) -> Result<Self, SpecError> {
        let spec: ValueSpec =
            serde_json::from_str(source).map_err(|e| SpecError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.circle_order.is_empty() {
            return Err(SpecError::EmptyCircle);
        }
        let mut seen = HashSet::new();
        for v in &self.circle_order {
            if !seen.insert(v.as_str()) {
                return Err(SpecError::DuplicateCircleValue(v.clone()));
            }
        }
        let mut ids = HashSet::new();
        for ft in &self.fine_types {
            if !ids.insert(ft.id.as_str()) {
                return Err(SpecError::DuplicateFineType(ft.id.clone()));
            }
            if ft.is_mapped() && !seen.contains(ft.parent.as_str()) {
                return Err(SpecError::UnknownParent {
                    id: ft.id.clone(),
                    parent: ft.parent.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn fine_type(&self, id: &str) -> Option<&FineType> {
        self.fine_types.iter().find(|f| f.id == id)
    }

    pub fn item_count(&self) -> usize {
        self.fine_types.iter().map(|f| f.items.len()).sum()
    }

    /// True for the refined theory layout: 19 fine types and 57 items over a
    /// 10-value circle.
    pub fn is_refined_theory(&self) -> bool {
        self.fine_types.len() == 19 && self.item_count() == 57 && self.circle_order.len() == 10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Item,
    Definition,
    Name,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 3] = [ProbeKind::Item, ProbeKind::Definition, ProbeKind::Name];

    pub fn as_str(self) -> &'static str {
        match self {
            ProbeKind::Item => "item",
            ProbeKind::Definition => "definition",
            ProbeKind::Name => "name",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "item" | "items" => Ok(ProbeKind::Item),
            "definition" | "definitions" => Ok(ProbeKind::Definition),
            "name" | "names" => Ok(ProbeKind::Name),
            other => Err(format!("unknown probe kind '{other}' (expected items, definitions or names)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub fine_type_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub kind: ProbeKind,
    pub prompts: Vec<Prompt>,
}

impl ProbeSet {
    pub fn len(&self) -> usize {
        self.prompts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prompts.is_empty()
    }
}

/// Builds one prompt per item, definition or name, in spec order.
pub fn build_probes(spec: &ValueSpec, kind: ProbeKind) -> Result<ProbeSet, SpecError> {
    let mut prompts = Vec::new();
    for ft in &spec.fine_types {
        let texts: Vec<&str> = match kind {
            ProbeKind::Item => ft.items.iter().map(String::as_str).collect(),
            ProbeKind::Definition => vec![non_empty(ft, &ft.definition, "definition")?],
            ProbeKind::Name => vec![non_empty(ft, &ft.name, "name")?],
        };
        prompts.extend(texts.into_iter().map(|t| Prompt {
            fine_type_id: ft.id.clone(),
            text: format!("{PROMPT_PREFIX}{t}"),
        }));
    }
    Ok(ProbeSet { kind, prompts })
}

fn non_empty<'a>(ft: &FineType, text: &'a str, field: &'static str) -> Result<&'a str, SpecError> {
    if text.trim().is_empty() {
        Err(SpecError::MissingText {
            id: ft.id.clone(),
            field,
        })
    } else {
        Ok(text)
    }
}

/// Byte length of the first sentence: everything up to and including the
/// first `.`, `!` or `?`, or the whole text when there is none.
fn first_sentence_end(text: &str) -> usize {
    text.find(['.', '!', '?']).map_or(text.len(), |i| i + 1)
}

/// Drops the opening sentence when it matches [`PRETEXT_PATTERN`].
///
/// At most one sentence is removed per call.
pub fn clean_response(raw: &str) -> String {
    let end = first_sentence_end(raw);
    if PRETEXT.is_match(&raw[..end]) {
        raw[end..].trim_start().to_string()
    } else {
        raw.to_string()
    }
}
