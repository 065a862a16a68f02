//! Result records written next to every run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Failure;

/// Bumped on any breaking change to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub task: String,
    pub preset: String,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub config_hash: String,
    pub version: u32,
}

/// Everything deterministic about a run. Wall-clock timing lives in a
/// separate file so identical runs give byte-identical records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: u32,
    pub config_hash: String,
    pub metrics: Vec<MetricRecord>,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seed: u64,
    pub seconds: f64,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::runtime(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let v = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// Per-metric mean ± std across seeds, in first-appearance order.
pub fn summarize(records: &[MetricRecord]) -> Vec<(String, f64, f64, usize)> {
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.metric.as_str()) {
            names.push(&r.metric);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let v: Vec<f64> = records.iter().filter(|r| r.metric == name).map(|r| r.value).collect();
            let (m, s) = mean_std(&v);
            (name.to_string(), m, s, v.len())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(metric: &str, seed: u64, value: f64) -> MetricRecord {
        MetricRecord {
            task: "xor".into(),
            preset: "xor".into(),
            seed,
            metric: metric.into(),
            value,
            config_hash: "h".into(),
            version: SCHEMA_VERSION,
        }
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
    }

    #[test]
    fn summary_groups_by_metric_in_first_seen_order() {
        let r = [rec("b", 0, 1.0), rec("a", 0, 0.0), rec("b", 1, 3.0)];
        let s = summarize(&r);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].0.as_str(), s[0].1, s[0].3), ("b", 2.0, 2));
        assert_eq!(s[1].0, "a");
    }

    #[test]
    fn record_keys() {
        let v = serde_json::to_value(rec("accuracy", 3, 0.5)).unwrap();
        let mut keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["config_hash", "metric", "preset", "seed", "task", "value", "version"]);
    }
}
