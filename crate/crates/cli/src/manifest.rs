use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Provenance record attached to every output.
///
/// Everything except `wall_time_s` is a function of the invocation, so the
/// copy embedded in data files leaves the wall time out and those files stay
/// byte-identical across reruns; the sidecar written next to `--out` files
/// carries it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub calibration: BTreeMap<String, f64>,
    pub versions: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let versions = BTreeMap::from([
            (
                "heisenberg-green".to_owned(),
                heisenberg_green::VERSION.to_owned(),
            ),
            ("hgreen".to_owned(), env!("CARGO_PKG_VERSION").to_owned()),
        ]);
        RunManifest {
            command: command.to_owned(),
            parameters: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            calibration: BTreeMap::new(),
            versions,
            wall_time_s: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_owned(), value.into());
        self
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_owned(), value);
        self
    }
}
