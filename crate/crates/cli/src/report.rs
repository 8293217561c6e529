//! Plain-text / JSON report writer with a deterministic layout.

use std::time::Instant;

pub struct Report {
    json: bool,
    no_timing: bool,
    entries: Vec<(String, serde_json::Value)>,
}

impl Report {
    pub fn new(json: bool, no_timing: bool) -> Report {
        Report {
            json,
            no_timing,
            entries: Vec::new(),
        }
    }

    pub fn line(&mut self, key: &str, value: &str) {
        self.entries
            .push((key.to_string(), serde_json::Value::String(value.into())));
    }

    pub fn list(&mut self, key: &str, values: Vec<String>) {
        self.entries.push((
            key.to_string(),
            serde_json::Value::Array(values.into_iter().map(serde_json::Value::String).collect()),
        ));
    }

    pub fn finish(mut self, started: Instant) {
        if !self.no_timing {
            let ms = started.elapsed().as_millis();
            self.entries.push((
                "elapsed-ms".into(),
                serde_json::Value::Number(serde_json::Number::from(ms as u64)),
            ));
        }
        if self.json {
            let map: serde_json::Map<String, serde_json::Value> =
                self.entries.into_iter().collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(map))
                    .expect("serializable report")
            );
        } else {
            for (key, value) in &self.entries {
                match value {
                    serde_json::Value::Array(items) => {
                        let joined: Vec<String> = items
                            .iter()
                            .map(|v| v.as_str().unwrap_or_default().to_string())
                            .collect();
                        println!("{key}: {}", joined.join(", "));
                    }
                    serde_json::Value::String(s) => println!("{key}: {s}"),
                    other => println!("{key}: {other}"),
                }
            }
        }
    }
}
