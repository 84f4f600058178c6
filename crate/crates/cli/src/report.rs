//! structured output: one table of degree-indexed values plus warnings,
//! rendered as json, aligned text, or csv.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Serialize, Clone)]
pub struct Row {
    pub degree: i64,
    pub value: i64,
    pub stable: bool,
    pub stage: i64,
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub algebra: String,
    pub parameters: BTreeMap<String, String>,
    pub table: Vec<Row>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, algebra: &str) -> Report {
        Report {
            command: command.to_string(),
            algebra: algebra.to_string(),
            parameters: BTreeMap::new(),
            table: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn row(&mut self, degree: i64, value: i64, stable: bool, stage: i64) {
        self.table.push(Row {
            degree,
            value,
            stable,
            stage,
        });
    }

    pub fn render(&self, format: &str) -> String {
        match format {
            "json" => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable report");
                s.push('\n');
                s
            }
            "csv" => {
                let mut out = String::from("degree,value,stable,stage\n");
                for r in &self.table {
                    out.push_str(&format!("{},{},{},{}\n", r.degree, r.value, r.stable, r.stage));
                }
                out
            }
            _ => {
                let mut out = format!("# {} on {}\n", self.command, self.algebra);
                for (k, v) in &self.parameters {
                    out.push_str(&format!("#   {k} = {v}\n"));
                }
                out.push_str("degree  value  stable  stage\n");
                for r in &self.table {
                    out.push_str(&format!(
                        "{:>6}  {:>5}  {:>6}  {:>5}\n",
                        r.degree, r.value, r.stable, r.stage
                    ));
                }
                for w in &self.warnings {
                    out.push_str(&format!("warning: {w}\n"));
                }
                out
            }
        }
    }
}
