//! Run reports: line-oriented `key=value` text or JSON.

use std::fmt::Write as _;

use serde::Serialize;
use stardisc::applications::{CellValue, Evaluation};
use stardisc::BoxKind;

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Outcome of one task of a command.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Record {
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squared: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<BoxKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", serialize_with = "as_map")]
    pub params: Vec<(String, String)>,
    pub wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn as_map<S: serde::Serializer>(pairs: &[(String, String)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(pairs.iter().map(|(k, v)| (k, v)))
}

impl Record {
    pub fn new(task: &str) -> Self {
        Self {
            task: task.into(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    pub fn with_evaluation(mut self, e: Evaluation) -> Self {
        match e.value {
            CellValue::Value { value, squared } => {
                self.value = Some(value);
                self.squared = Some(squared);
            }
            CellValue::Interval { lower, upper } => {
                self.lower = Some(lower);
                self.upper = Some(upper);
            }
        }
        self.method = Some(e.method);
        self.witness = e.witness;
        self.kind = e.kind;
        self.seed = self.seed.or(e.seed);
        self
    }

    pub(crate) fn check_ok(&self) -> bool {
        self.check().is_ok()
    }

    fn check(&self) -> Result<(), CliError> {
        let mut nums: Vec<f64> = [self.value, self.lower, self.upper].into_iter().flatten().collect();
        nums.extend(self.witness.iter().flatten());
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(stardisc::Error::Numeric(format!("non-finite value in {} record", self.task)).into());
        }
        if let (Some(l), Some(u)) = (self.lower, self.upper) {
            if l > u {
                return Err(stardisc::Error::Numeric(format!("interval [{l}, {u}] is reversed")).into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub format_version: u32,
    pub command: String,
    pub records: Vec<Record>,
}

impl RunReport {
    pub fn new(command: String) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            command,
            records: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.records.iter().try_for_each(Record::check)
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("report serializes");
            s.push('\n');
            return s;
        }
        let mut s = String::new();
        let mut line = |k: &str, v: &dyn std::fmt::Display| {
            writeln!(s, "{k}={v}").expect("writing to a string");
        };
        line("format_version", &self.format_version);
        line("command", &self.command);
        for (i, r) in self.records.iter().enumerate() {
            line("record", &i);
            line("task", &r.task);
            if let Some(v) = &r.set {
                line("set", v);
            }
            if let Some(v) = &r.measure {
                line("measure", v);
            }
            if let Some(v) = r.value {
                line("value", &v);
            }
            if let Some(v) = r.lower {
                line("lower", &v);
            }
            if let Some(v) = r.upper {
                line("upper", &v);
            }
            if let Some(v) = r.squared {
                line("squared", &v);
            }
            if let Some(w) = &r.witness {
                let w: Vec<String> = w.iter().map(f64::to_string).collect();
                line("witness", &w.join(","));
            }
            if let Some(k) = r.kind {
                line("kind", &k.as_str());
            }
            if let Some(v) = &r.method {
                line("method", v);
            }
            if let Some(v) = r.seed {
                line("seed", &v);
            }
            for (k, v) in &r.params {
                line(&format!("param.{k}"), v);
            }
            line("wall_time_secs", &r.wall_time_secs);
            if let Some(v) = &r.error {
                line("error", v);
            }
        }
        s
    }
}
