use std::collections::BTreeMap;

use serde::Serialize;

pub const ARTIFACT_VERSION: &str = concat!("rbfbvp-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Solve,
    Table,
    ScanC,
    Oracle,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Table => "table",
            Self::ScanC => "scan-c",
            Self::Oracle => "oracle",
        }
    }
}

/// Everything needed to rerun a command: its name and every flag value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: CommandKind,
    pub parameters: BTreeMap<String, String>,
    pub artifact_version: String,
}

impl RunManifest {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            artifact_version: ARTIFACT_VERSION.to_string(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Shell form of the run. `id` is positional and `"true"` values are bare flags.
    pub fn invocation(&self) -> String {
        let mut parts = vec!["rbfbvp".to_string(), self.command.name().to_string()];
        if let Some(id) = self.parameters.get("id") {
            parts.push(id.clone());
        }
        for (k, v) in &self.parameters {
            match (k.as_str(), v.as_str()) {
                ("id", _) => {}
                (_, "true") => parts.push(format!("--{k}")),
                _ => parts.push(format!("--{k} {v}")),
            }
        }
        parts.join(" ")
    }
}
