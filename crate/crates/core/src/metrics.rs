//! Code-mixing complexity metrics: Code-Mixing Index (CMI) and Switch Point
//! Fraction (SPF), plus corpus-level averages.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::LangTag;
use crate::synthesizer::CodeMixedSentence;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("CMI is undefined for an empty sequence")]
    Empty,
}

/// Per-token language tags of one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LangSeq(pub Vec<LangTag>);

impl LangSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<&CodeMixedSentence> for LangSeq {
    fn from(sentence: &CodeMixedSentence) -> Self {
        LangSeq(sentence.tags())
    }
}

impl FromIterator<LangTag> for LangSeq {
    fn from_iter<I: IntoIterator<Item = LangTag>>(iter: I) -> Self {
        LangSeq(iter.into_iter().collect())
    }
}

/// `1 - max_lang / (n - other)`, or 0 when every token is `Other`.
pub fn compute_cmi(seq: &LangSeq) -> Result<f64, MetricsError> {
    if seq.is_empty() {
        return Err(MetricsError::Empty);
    }
    let (mut hok, mut zh) = (0usize, 0usize);
    for tag in &seq.0 {
        match tag {
            LangTag::Hok => hok += 1,
            LangTag::Zh => zh += 1,
            LangTag::Other => {}
        }
    }
    let dependent = hok + zh;
    if dependent == 0 {
        return Ok(0.0);
    }
    Ok(1.0 - hok.max(zh) as f64 / dependent as f64)
}

/// Fraction of adjacent language-dependent token pairs that change language.
/// `Other` tokens are skipped when forming pairs.
pub fn compute_spf(seq: &LangSeq) -> f64 {
    let dependent: Vec<LangTag> = seq
        .0
        .iter()
        .copied()
        .filter(|t| *t != LangTag::Other)
        .collect();
    if dependent.len() < 2 {
        return 0.0;
    }
    let boundaries = dependent.len() - 1;
    let switches = dependent.windows(2).filter(|w| w[0] != w[1]).count();
    switches as f64 / boundaries as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentence_count: usize,
    pub cmi_mean: f64,
    pub spf_mean: f64,
    /// Distinct Mandarin characters in switched positions over distinct
    /// characters in the corpus. This is a stand-in definition.
    pub symbol_coverage: f64,
}

/// Mean of `values`; 0 when empty.
pub fn arithmetic_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Per-sentence averages over the corpus; all zero for an empty corpus.
/// Empty sentences contribute 0 to both means.
pub fn corpus_stats<'a, I>(corpus: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a CodeMixedSentence>,
{
    let mut cmis = Vec::new();
    let mut spfs = Vec::new();
    let mut switched: HashSet<char> = HashSet::new();
    let mut all: HashSet<char> = HashSet::new();
    for sentence in corpus {
        let seq = LangSeq::from(sentence);
        cmis.push(compute_cmi(&seq).unwrap_or(0.0));
        spfs.push(compute_spf(&seq));
        for &(c, tag) in &sentence.emitted {
            all.insert(c);
            if tag == LangTag::Zh {
                switched.insert(c);
            }
        }
    }
    if cmis.is_empty() {
        return CorpusStats::default();
    }
    CorpusStats {
        sentence_count: cmis.len(),
        cmi_mean: arithmetic_mean(&cmis),
        spf_mean: arithmetic_mean(&spfs),
        symbol_coverage: switched.len() as f64 / all.len().max(1) as f64,
    }
}
