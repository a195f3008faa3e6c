use std::path::{Path, PathBuf};

use anyhow::Context;
use hokmix::annotation::QueuePolicy;
use hokmix::synthesizer::Mode;
use serde::Deserialize;

/// Values read from `--config`. Every key is optional; command-line flags take
/// precedence over anything set here.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lexicon: Option<PathBuf>,
    pub custom: Option<PathBuf>,
    pub readings: Option<PathBuf>,
    pub charset: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub ratios: Option<[u32; 3]>,
    pub base_p: Option<f64>,
    pub multiplier: Option<f64>,
    pub port: Option<u16>,
    pub jobs: Option<usize>,
    pub log: Option<PathBuf>,
    pub annotators: Option<Vec<String>>,
    pub pool_size: Option<usize>,
    pub policy: Option<QueuePolicy>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg: FileConfig = toml::from_str(
            r#"
            lexicon = "lex.tsv"
            mode = "cmda"
            seed = 3
            ratios = [8, 1, 1]
            base_p = 0.2
            policy = "task_major"
            annotators = ["A", "B"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.mode, Some(Mode::Cmda));
        assert_eq!(cfg.ratios, Some([8, 1, 1]));
        assert_eq!(cfg.policy, Some(QueuePolicy::TaskMajor));
        assert_eq!(cfg.lexicon.as_deref(), Some(Path::new("lex.tsv")));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
        assert_eq!(
            toml::from_str::<FileConfig>("").unwrap(),
            FileConfig::default()
        );
    }
}
