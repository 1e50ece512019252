use serde::{Deserialize, Serialize};

/// One analysis result as emitted by the command line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub quantity: String,
    pub value: f64,
    pub argument: serde_json::Value,
    pub tolerance: f64,
    pub method: String,
    pub seed: Option<u64>,
}
