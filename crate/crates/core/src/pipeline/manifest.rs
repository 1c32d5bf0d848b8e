use std::fmt::Display;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{PipelineConfig, PipelineError, RunInputs};

pub const MANIFEST_HEADER: &str = "# hopeedi-manifest v1";

/// Run record: the full configuration, input paths with SHA-256 digests, and
/// run facts (seeds, member scores, output digests). The `[config]` and
/// `[inputs]` sections are enough to repeat the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub inputs: RunInputs,
    /// `(name, path, sha256)` for every file read.
    pub input_digests: Vec<(String, PathBuf, String)>,
    /// Ordered run facts.
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(config: PipelineConfig, inputs: RunInputs) -> Self {
        Self { config, inputs, input_digests: Vec::new(), entries: Vec::new() }
    }

    pub fn record_input(&mut self, name: &str, path: &Path, digest: String) {
        self.input_digests.push((name.to_string(), path.to_path_buf(), digest));
    }

    pub fn record(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MANIFEST_HEADER}\n[config]\n");
        out.push_str(&self.config.to_text());
        out.push_str("[inputs]\n");
        for (name, path, digest) in &self.input_digests {
            let _ = writeln!(out, "{name}.path={}", path.display());
            let _ = writeln!(out, "{name}.sha256={digest}");
        }
        out.push_str("[run]\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let bad = |m: String| PipelineError::Manifest(m);
        let mut lines = text.lines();
        if lines.next() != Some(MANIFEST_HEADER) {
            return Err(bad(format!("missing `{MANIFEST_HEADER}` header")));
        }
        let mut section = "";
        let mut config_text = String::new();
        let mut input_digests: Vec<(String, PathBuf, String)> = Vec::new();
        let mut entries = Vec::new();
        for line in lines {
            if line.starts_with('[') && line.ends_with(']') {
                section = match line {
                    "[config]" => "config",
                    "[inputs]" => "inputs",
                    "[run]" => "run",
                    other => return Err(bad(format!("unknown section {other}"))),
                };
                continue;
            }
            match section {
                "config" => {
                    config_text.push_str(line);
                    config_text.push('\n');
                }
                "inputs" => {
                    let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("bad input line `{line}`")))?;
                    if let Some(name) = k.strip_suffix(".path") {
                        input_digests.push((name.to_string(), PathBuf::from(v), String::new()));
                    } else if let Some(name) = k.strip_suffix(".sha256") {
                        match input_digests.last_mut() {
                            Some(last) if last.0 == name => last.2 = v.to_string(),
                            _ => return Err(bad(format!("digest without path for `{name}`"))),
                        }
                    }
                }
                "run" => {
                    let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("bad run line `{line}`")))?;
                    entries.push((k.to_string(), v.to_string()));
                }
                _ => return Err(bad(format!("line outside any section: `{line}`"))),
            }
        }
        let config = PipelineConfig::parse(&config_text, None)?;
        let path_of = |name: &str| input_digests.iter().find(|d| d.0 == name).map(|d| d.1.clone());
        let inputs = RunInputs {
            train: path_of("train").ok_or_else(|| bad("no train input".into()))?,
            dev: path_of("dev").ok_or_else(|| bad("no dev input".into()))?,
            test: path_of("test"),
        };
        Ok(Self { config, inputs, input_digests, entries })
    }

    /// Checks that every recorded input still has its recorded digest.
    pub fn verify_inputs(&self) -> Result<(), PipelineError> {
        for (name, path, digest) in &self.input_digests {
            let bytes = std::fs::read(path)
                .map_err(|e| PipelineError::Manifest(format!("{name}: cannot read {}: {e}", path.display())))?;
            let now = super::sha256_hex(&bytes);
            if &now != digest {
                return Err(PipelineError::Manifest(format!("{name}: {} changed since the run", path.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::DatasetLang;

    #[test]
    fn round_trips() {
        let mut m = Manifest::new(
            PipelineConfig::new(DatasetLang::Malayalam),
            RunInputs { train: "a.tsv".into(), dev: "b.tsv".into(), test: None },
        );
        m.record_input("train", Path::new("a.tsv"), "00".into());
        m.record_input("dev", Path::new("b.tsv"), "11".into());
        m.record("member.0.split_seed", 3);
        let back = Manifest::parse(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.get("member.0.split_seed"), Some("3"));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Manifest::parse("hello").is_err());
        assert!(Manifest::parse(&format!("{MANIFEST_HEADER}\n[other]\n")).is_err());
    }
}
