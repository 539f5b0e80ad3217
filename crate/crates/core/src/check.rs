use serde::{Deserialize, Serialize};

/// Outcome of one named verification, with human-readable counterexamples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<String>,
}

impl Check {
    pub fn new(name: &str) -> Self {
        Check {
            name: name.to_string(),
            passed: true,
            counterexamples: Vec::new(),
        }
    }

    pub fn fail(&mut self, detail: impl Into<String>) {
        self.passed = false;
        self.counterexamples.push(detail.into());
    }

    pub fn require(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.fail(detail());
        }
    }
}
