//! Report payloads shared by all subcommands, and the exit-code contract.

use serde_json::{Map, Value};
use symbif_core::Error;

use crate::json::render_text;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Failure = 1,
    Usage = 2,
    Capacity = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn status(self) -> &'static str {
        match self {
            Exit::Pass => "pass",
            Exit::Failure => "fail",
            Exit::Usage => "error",
            Exit::Capacity => "capacity",
        }
    }

    pub fn for_error(err: &Error) -> Exit {
        match err {
            Error::Domain(_) | Error::NegativeRadicand { .. } | Error::Degenerate { .. } => Exit::Usage,
            Error::Capacity(_) => Exit::Capacity,
            Error::Inconsistency(_) => Exit::Failure,
        }
    }
}

/// A command failure that ends the run before a full report is built.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { exit: Exit::Usage, message: message.into() }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError { exit: Exit::Failure, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError { exit: Exit::for_error(&err), message: err.to_string() }
    }
}

/// One named check. Hard checks decide the exit code; informational ones never do.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub hard: bool,
    pub detail: Value,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    pub notices: Vec<String>,
    /// Exit code forced by a capacity or usage condition.
    pub forced_exit: Option<Exit>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, checks: Vec::new(), data: Map::new(), notices: Vec::new(), forced_exit: None }
    }

    /// Report for a run that stopped with an error.
    pub fn from_error(command: &'static str, err: &CliError) -> Self {
        let mut r = Report::new(command);
        r.notices.push(err.message.clone());
        r.forced_exit = Some(err.exit);
        r
    }

    pub fn hard(&mut self, name: impl Into<String>, passed: bool, detail: Value) -> bool {
        self.checks.push(Check { name: name.into(), passed, hard: true, detail });
        passed
    }

    pub fn info(&mut self, name: impl Into<String>, passed: bool, detail: Value) {
        self.checks.push(Check { name: name.into(), passed, hard: false, detail });
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.data.insert(key.to_string(), value);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn hard_failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.hard && !c.passed).collect()
    }

    pub fn exit(&self) -> Exit {
        match self.forced_exit {
            Some(e) if e != Exit::Pass => e,
            _ if !self.hard_failures().is_empty() => Exit::Failure,
            _ => Exit::Pass,
        }
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| serde_json::json!({ "name": c.name, "passed": c.passed, "hard": c.hard, "detail": c.detail }))
            .collect();
        serde_json::json!({
            "command": self.command,
            "status": self.exit().status(),
            "exit_code": self.exit().code(),
            "checks": checks,
            "data": Value::Object(self.data.clone()),
            "notices": self.notices,
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Same payload as [`Report::render_json`], as indented text.
    pub fn render_text(&self) -> String {
        let exit = self.exit();
        let mut out = format!("symbif {}: {} (exit {})\n", self.command, exit.status(), exit.code());
        for n in &self.notices {
            out.push_str(&format!("notice: {n}\n"));
        }
        for c in &self.checks {
            let tag = match (c.passed, c.hard) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "INFO",
            };
            out.push_str(&format!("[{tag}] {}\n", c.name));
            render_text(&c.detail, 2, &mut out);
        }
        if !self.data.is_empty() {
            out.push_str("data:\n");
            render_text(&Value::Object(self.data.clone()), 1, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_follows_hard_checks() {
        let mut r = Report::new("verify");
        r.info("table", false, Value::Null);
        assert_eq!(r.exit(), Exit::Pass);
        r.hard("x", false, Value::Null);
        assert_eq!(r.exit(), Exit::Failure);
        r.forced_exit = Some(Exit::Capacity);
        assert_eq!(r.exit(), Exit::Capacity);
        assert_eq!(r.to_json()["exit_code"], 3);
    }

    #[test]
    fn error_mapping() {
        assert_eq!(Exit::for_error(&Error::Domain("x".into())), Exit::Usage);
        assert_eq!(Exit::for_error(&Error::Capacity("x".into())), Exit::Capacity);
        assert_eq!(Exit::for_error(&Error::Inconsistency("x".into())), Exit::Failure);
    }
}
