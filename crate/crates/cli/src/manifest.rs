use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Everything needed to rerun a command: flags, seeds and input digest.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub flags: serde_json::Value,
    pub rng_seeds: Vec<u64>,
    pub pattern_digest: Option<String>,
    pub solver: Option<String>,
    pub tool_version: String,
    /// Milliseconds since the Unix epoch; 0 without timing.
    pub started_ms: u64,
    pub finished_ms: u64,
    pub outputs: Vec<String>,
    pub exit_code: u8,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

impl Manifest {
    pub fn start(command: &str, flags: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            flags,
            rng_seeds: Vec::new(),
            pattern_digest: None,
            solver: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_ms: now_ms(),
            finished_ms: 0,
            outputs: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn finish(mut self, timing: bool) -> String {
        if timing {
            self.finished_ms = now_ms();
        } else {
            self.started_ms = 0;
        }
        let mut json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        json.push('\n');
        json
    }
}

/// `sha256:` followed by the hex digest of the text.
pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_text() {
        assert_eq!(
            digest(""),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn untimed_manifest_is_stable() {
        let m = |_| Manifest::start("gen", serde_json::json!({"width": 3})).finish(false);
        assert_eq!(m(0), m(1));
    }
}
