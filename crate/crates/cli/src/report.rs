//! Line-oriented `key: value` reports with an optional JSON rendering.

use std::process::ExitCode;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub struct Report {
    entries: Vec<(String, Value)>,
    failure: Option<String>,
}

impl Report {
    /// Starts a report with the command echo and a digest over every input.
    /// Inputs are length-prefixed so boundaries contribute to the hash.
    pub fn new(argv: &[String], inputs: &[&[u8]]) -> Self {
        let mut hasher = Sha256::new();
        for input in inputs {
            hasher.update((input.len() as u64).to_le_bytes());
            hasher.update(input);
        }
        let mut report = Self {
            entries: Vec::new(),
            failure: None,
        };
        report.put("command", format!("vlogic {}", argv.join(" ")));
        report.put("inputs", format!("sha256:{:x}", hasher.finalize()));
        report
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn list<I, S>(&mut self, key: impl Into<String>, items: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let items: Vec<Value> = items.into_iter().map(|s| Value::String(s.into())).collect();
        self.put(key, items);
    }

    /// Marks a domain failure; the report is still printed.
    pub fn fail(&mut self, reason: impl Into<String>) {
        self.failure = Some(reason.into());
    }

    fn status(&self) -> &str {
        self.failure.as_deref().unwrap_or("ok")
    }

    pub fn exit_code(&self) -> ExitCode {
        if self.failure.is_some() {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            out.push_str(&format!("{key}: {}\n", plain(value)));
        }
        out.push_str(&format!("status: {}\n", self.status()));
        out
    }

    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        for (key, value) in &self.entries {
            doc.insert(key.clone(), value.clone());
        }
        doc.insert("status".into(), self.status().into());
        doc.insert("exit".into(), u8::from(self.failure.is_some()).into());
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("report values serialize");
        text.push('\n');
        text
    }
}

fn plain(value: &Value) -> String {
    match value {
        Value::Null => "-".into(),
        Value::Bool(true) => "yes".into(),
        Value::Bool(false) => "no".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "-".into(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let argv = vec!["quality".to_string()];
        let mut r = Report::new(&argv, &[b"a", b"bc"]);
        r.put("flag", true);
        r.list("names", ["C2", "C3"]);
        r.list("none", Vec::<String>::new());
        let text = r.to_text();
        assert!(text.starts_with("command: vlogic quality\ninputs: sha256:"));
        assert!(text.contains("flag: yes\nnames: C2, C3\nnone: -\nstatus: ok\n"));
        let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(doc["names"][1], "C3");
        assert_eq!(doc["exit"], 0);
    }

    #[test]
    fn digest_separates_inputs() {
        let a = Report::new(&[], &[b"ab", b"c"]).to_text();
        let b = Report::new(&[], &[b"a", b"bc"]).to_text();
        assert_ne!(a, b);
    }
}
