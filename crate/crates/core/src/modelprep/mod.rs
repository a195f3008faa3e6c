//! Model-training artifacts: character vocabulary, language ids, MLM mask
//! plans, corpus splits and training-stage manifests.

mod manifest;
mod mask;
mod split;
mod vocab;

use thiserror::Error;

use crate::lang::Lang;
use crate::script::HOK_SUFFIX;

pub use manifest::{emit_stage_manifest, Init, ModelName, Objective, Stage, StageManifest};
pub use mask::{plan_mlm_masks, MaskPlan, DEFAULT_BASE_P, DEFAULT_MULTIPLIER};
pub use split::{split_corpus, write_split, Split, SplitMeta, SplitSpec};
pub use vocab::{
    build_vocab, is_placeholder, replace_unused, CorpusStream, StreamLabel, Vocab, XLM_SPECIALS,
};

#[derive(Debug, Error)]
pub enum ModelPrepError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("token `{0}` appears twice")]
    DuplicateToken(String),
    #[error("token `{0}` is not in the vocabulary")]
    MissingToken(String),
    #[error("mixed-stream token `{0}` is not a single tagged character")]
    UntaggedMixed(String),
    #[error("{needed} new characters but only {available} placeholders (short by {shortfall})")]
    Capacity {
        needed: usize,
        available: usize,
        shortfall: usize,
    },
    #[error("invalid masking parameters: {0}")]
    Domain(String),
    #[error("pad ids not in corpus: {0:?}")]
    UnknownPadIds(Vec<String>),
    #[error("sentence id `{0}` appears twice")]
    DuplicateId(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Language id of each rendered token: `_@` suffix means Hokkien.
pub fn assign_language_ids<S: AsRef<str>>(tokens: &[S]) -> Vec<Lang> {
    tokens
        .iter()
        .map(|t| {
            if t.as_ref().ends_with(HOK_SUFFIX) {
                Lang::Hok
            } else {
                Lang::Zh
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_decides_language() {
        assert_eq!(
            assign_language_ids(&["佇_@", "美", "東"]),
            [Lang::Hok, Lang::Zh, Lang::Zh]
        );
        assert_eq!(
            assign_language_ids(&["佇_@", "个_@"]),
            [Lang::Hok, Lang::Hok]
        );
        assert!(assign_language_ids::<&str>(&[]).is_empty());
    }

    #[test]
    fn moedict_cm_row_counts() {
        let row = "這_@ 个_@ 不 可 , 彼_@ 个_@ 毋_@ 通_@ , 全_@ 你_@ 的_@ 意 見 了_@ 了_@ 。";
        let tokens: Vec<&str> = row.split(' ').collect();
        let ids = assign_language_ids(&tokens);
        for (t, id) in tokens.iter().zip(&ids) {
            assert_eq!(t.ends_with("_@"), *id == Lang::Hok);
        }
        assert_eq!(ids.iter().filter(|l| **l == Lang::Hok).count(), 11);
        assert_eq!(ids.len() - 11, 7);
    }
}
