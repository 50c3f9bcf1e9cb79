use super::instance::{InstanceColumns, PaddingRegime};
use crate::error::Result;
use crate::fpcode::CodeParams;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFiles {
    pub codebook: String,
    pub secret: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dataset: Option<String>,
}

/// Ties the files of one generated instance to its seed and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub format: String,
    pub seed: u64,
    pub params: CodeParams,
    /// Dataset rows, when a dataset was written.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub columns: Option<InstanceColumns>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub padding: Option<PaddingRegime>,
    pub files: InstanceFiles,
}

pub const MANIFEST_FORMAT: &str = "dperm-instance v1";

impl InstanceManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpcode::derive_params;

    #[test]
    fn manifest_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let manifest = InstanceManifest {
            format: MANIFEST_FORMAT.into(),
            seed: 7,
            params: derive_params(4, 0.1).unwrap(),
            n_rows: None,
            k: None,
            columns: None,
            padding: None,
            files: InstanceFiles {
                codebook: "codebook.txt".into(),
                secret: "secret.json".into(),
                dataset: None,
            },
        };
        manifest.write(&path).unwrap();
        assert_eq!(InstanceManifest::read(&path).unwrap(), manifest);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"d_core\": 5903"));
    }
}
