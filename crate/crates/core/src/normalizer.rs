//! Raw Hokkien text cleanup: romanized runs are converted to Han characters
//! through the lexicon's romanization index, literary/colloquial reading
//! variants are rewritten from a rule table, and sentences that still carry
//! Latin script or characters outside an allowed set are filtered out.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::script::{is_latin_letter, latin_runs};

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid reading rule `{from}` -> `{to}`: {reason}")]
    InvalidRule {
        from: String,
        to: String,
        reason: String,
    },
}

/// A romanized run with no matching headword.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("romanized run `{run}` has no headword")]
pub struct Unconvertible {
    pub run: String,
}

/// Literary/colloquial rewrite table.
///
/// Rules are applied in one left-to-right scan, longest key first at each
/// position. Construction rejects tables where a rewrite could create a new
/// match, so application is idempotent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadingMap {
    // sorted by key length (chars) descending, then key
    rules: Vec<(String, String)>,
}

/// True when `a` and `b` share a substring boundary: one contains the other,
/// or a suffix of one is a prefix of the other.
fn overlaps(a: &str, b: &str) -> bool {
    if a.contains(b) || b.contains(a) {
        return true;
    }
    let suffix_meets_prefix = |x: &str, y: &str| {
        x.char_indices()
            .skip(1)
            .any(|(i, _)| y.starts_with(&x[i..]))
    };
    suffix_meets_prefix(a, b) || suffix_meets_prefix(b, a)
}

impl ReadingMap {
    pub fn new<I, K, V>(rules: I) -> Result<Self, NormalizeError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut out: Vec<(String, String)> = Vec::new();
        for (from, to) in rules {
            let (from, to) = (from.into(), to.into());
            let invalid = |reason: &str| NormalizeError::InvalidRule {
                from: from.clone(),
                to: to.clone(),
                reason: reason.to_string(),
            };
            if from.is_empty() {
                return Err(invalid("empty key"));
            }
            if from == to {
                return Err(invalid("key maps to itself"));
            }
            if out.iter().any(|(k, _)| *k == from) {
                return Err(invalid("duplicate key"));
            }
            out.push((from, to));
        }
        for (from, to) in &out {
            if to.is_empty() {
                continue;
            }
            if let Some((key, _)) = out.iter().find(|(key, _)| overlaps(key, to)) {
                return Err(NormalizeError::InvalidRule {
                    from: from.clone(),
                    to: to.clone(),
                    reason: format!("replacement overlaps key `{key}` (chained rewrite)"),
                });
            }
        }
        out.sort_by(|a, b| {
            b.0.chars()
                .count()
                .cmp(&a.0.chars().count())
                .then_with(|| a.0.cmp(&b.0))
        });
        Ok(ReadingMap { rules: out })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| NormalizeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses `from<TAB>to` rows; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, NormalizeError> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(NormalizeError::Parse {
                    line: idx + 1,
                    message: format!("expected 2 tab-separated columns, found {}", cols.len()),
                });
            }
            rules.push((cols[0].to_string(), cols[1].to_string()));
        }
        Self::new(rules)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Applies the table in a single left-to-right scan.
    pub fn apply(&self, s: &str) -> String {
        if self.rules.is_empty() {
            return s.to_string();
        }
        let mut out = String::with_capacity(s.len());
        let mut rest = s;
        'scan: while let Some(c) = rest.chars().next() {
            for (from, to) in &self.rules {
                if rest.starts_with(from.as_str()) {
                    out.push_str(to);
                    rest = &rest[from.len()..];
                    continue 'scan;
                }
            }
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
        out
    }
}

/// Allowed-character set used by [`filter_sentence`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Charset(HashSet<char>);

impl Charset {
    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| NormalizeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// One character per line. Longer lines starting with `#` are comments, so
    /// `#` itself can still be listed on a line of its own.
    pub fn parse(text: &str) -> Result<Self, NormalizeError> {
        let mut set = HashSet::new();
        for (idx, raw) in text.split('\n').enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            let mut chars = line.chars();
            match (chars.next(), chars.next()) {
                (None, _) => {}
                (Some(c), None) => {
                    set.insert(c);
                }
                (Some('#'), Some(_)) => {}
                _ => {
                    return Err(NormalizeError::Parse {
                        line: idx + 1,
                        message: format!("expected one character, found `{line}`"),
                    })
                }
            }
        }
        Ok(Charset(set))
    }

    pub fn to_text(&self) -> String {
        let mut chars: Vec<char> = self.0.iter().copied().collect();
        chars.sort_unstable();
        chars.into_iter().map(|c| format!("{c}\n")).collect()
    }
}

impl FromIterator<char> for Charset {
    fn from_iter<I: IntoIterator<Item = char>>(iter: I) -> Self {
        Charset(iter.into_iter().collect())
    }
}

impl Extend<char> for Charset {
    fn extend<I: IntoIterator<Item = char>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

/// Successful normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub text: String,
    /// Number of romanized runs converted to Han characters.
    pub tailo_converted: usize,
}

/// Converts romanized runs through the romanization index, then applies the
/// reading map. A run without a headword makes the sentence unconvertible.
pub fn normalize_sentence(
    s: &str,
    map: &ReadingMap,
    lex: &Lexicon,
) -> Result<Normalized, Unconvertible> {
    let mut converted = String::with_capacity(s.len());
    let mut last = 0;
    let mut tailo_converted = 0;
    for run in latin_runs(s) {
        let romanized = &s[run.clone()];
        let headword = lex
            .by_romanization(romanized)
            .first()
            .ok_or_else(|| Unconvertible {
                run: romanized.to_string(),
            })?;
        converted.push_str(&s[last..run.start]);
        converted.push_str(headword);
        last = run.end;
        tailo_converted += 1;
    }
    converted.push_str(&s[last..]);
    Ok(Normalized {
        text: map.apply(&converted),
        tailo_converted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Hanlo,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOutcome {
    Keep,
    Reject(RejectReason),
}

/// Rejects sentences with leftover Latin letters (Han-lo) first, then any
/// character outside `charset`.
pub fn filter_sentence(s: &str, charset: &Charset) -> FilterOutcome {
    if s.chars().any(is_latin_letter) {
        return FilterOutcome::Reject(RejectReason::Hanlo);
    }
    if s.chars().any(|c| !charset.contains(c)) {
        return FilterOutcome::Reject(RejectReason::Unknown);
    }
    FilterOutcome::Keep
}

/// Batch counters. `kept + rejected_hanlo + rejected_unknown == input_count`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub input_count: usize,
    pub kept: usize,
    pub rejected_hanlo: usize,
    pub rejected_unknown: usize,
    pub tailo_converted: usize,
}

impl NormalizationReport {
    pub fn is_consistent(&self) -> bool {
        self.kept + self.rejected_hanlo + self.rejected_unknown == self.input_count
    }

    pub fn merge(self, other: Self) -> Self {
        NormalizationReport {
            input_count: self.input_count + other.input_count,
            kept: self.kept + other.kept,
            rejected_hanlo: self.rejected_hanlo + other.rejected_hanlo,
            rejected_unknown: self.rejected_unknown + other.rejected_unknown,
            tailo_converted: self.tailo_converted + other.tailo_converted,
        }
    }
}

/// Everything the normalization stage needs.
#[derive(Debug, Clone, Copy)]
pub struct Normalizer<'a> {
    pub readings: &'a ReadingMap,
    pub lexicon: &'a Lexicon,
    /// When absent only the Han-lo check applies.
    pub charset: Option<&'a Charset>,
}

impl Normalizer<'_> {
    /// Normalizes and filters one sentence, returning the kept text (if any)
    /// and this sentence's contribution to the report.
    pub fn process(&self, raw: &str) -> (Option<String>, NormalizationReport) {
        let mut report = NormalizationReport {
            input_count: 1,
            ..Default::default()
        };
        let normalized = match normalize_sentence(raw, self.readings, self.lexicon) {
            Ok(n) => n,
            Err(_) => {
                report.rejected_hanlo = 1;
                return (None, report);
            }
        };
        report.tailo_converted = normalized.tailo_converted;
        let outcome = match self.charset {
            Some(charset) => filter_sentence(&normalized.text, charset),
            None if normalized.text.chars().any(is_latin_letter) => {
                FilterOutcome::Reject(RejectReason::Hanlo)
            }
            None => FilterOutcome::Keep,
        };
        match outcome {
            FilterOutcome::Keep => {
                report.kept = 1;
                (Some(normalized.text), report)
            }
            FilterOutcome::Reject(RejectReason::Hanlo) => {
                report.rejected_hanlo = 1;
                (None, report)
            }
            FilterOutcome::Reject(RejectReason::Unknown) => {
                report.rejected_unknown = 1;
                (None, report)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{LexiconEntry, Pos};

    fn lex() -> Lexicon {
        Lexicon::from_entries([
            LexiconEntry::new("一", Pos::Num)
                .romanized("tsı̍t")
                .translated(["一"]),
            LexiconEntry::new("款", Pos::Clf).romanized("khuán"),
        ])
    }

    #[test]
    fn converts_tailo_run() {
        let out = normalize_sentence("這是tsı̍t款", &ReadingMap::default(), &lex()).unwrap();
        assert_eq!(out.text, "這是一款");
        assert_eq!(out.tailo_converted, 1);
    }

    #[test]
    fn pure_wth_is_unchanged() {
        let s = "物件毋通掖甲一四界";
        let out = normalize_sentence(s, &ReadingMap::default(), &lex()).unwrap();
        assert_eq!(out.text, s);
        assert_eq!(out.tailo_converted, 0);
    }

    #[test]
    fn reading_rule_rewrites() {
        let map = ReadingMap::new([("甲", "得")]).unwrap();
        let out = normalize_sentence("掖甲一四界", &map, &lex()).unwrap();
        assert_eq!(out.text, "掖得一四界");
        // oracle: plain string replacement
        assert_eq!(out.text, "掖甲一四界".replace('甲', "得"));
    }

    #[test]
    fn longest_key_wins() {
        let map = ReadingMap::new([("一", "壹"), ("一四界", "到處")]).unwrap();
        assert_eq!(map.apply("掖甲一四界一"), "掖甲到處壹");
    }

    #[test]
    fn unknown_run_is_unconvertible() {
        let err = normalize_sentence("In-uī當初", &ReadingMap::default(), &lex()).unwrap_err();
        assert_eq!(err.run, "In-uī");
    }

    #[test]
    fn chained_rules_rejected() {
        assert!(ReadingMap::new([("甲", "得"), ("得", "的")]).is_err());
        assert!(ReadingMap::new([("甲", "得"), ("得一", "的")]).is_err());
        assert!(ReadingMap::new([("甲", "甲")]).is_err());
        assert!(ReadingMap::new([("", "甲")]).is_err());
        assert!(ReadingMap::new([("甲", "得"), ("伊", "他")]).is_ok());
    }

    #[test]
    fn filter_outcomes() {
        let charset: Charset = "做教授是我一生的願望。傳教士引入來當初".chars().collect();
        assert_eq!(
            filter_sentence("In-uī當初是傳教士引入來的", &charset),
            FilterOutcome::Reject(RejectReason::Hanlo)
        );
        assert_eq!(
            filter_sentence("做教授是我一生的願望。", &charset),
            FilterOutcome::Keep
        );
        assert_eq!(
            filter_sentence("做教授是我一生的願望！", &charset),
            FilterOutcome::Reject(RejectReason::Unknown)
        );
    }

    #[test]
    fn charset_parsing() {
        let cs = Charset::parse("# allowed\n佮\n#\n，\n").unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs.contains('#'));
        assert!(Charset::parse("佮伊\n").is_err());
        assert_eq!(Charset::parse(&cs.to_text()).unwrap(), cs);
    }

    #[test]
    fn report_counts_reconcile() {
        let lexicon = lex();
        let readings = ReadingMap::default();
        let charset: Charset = "這是一款你好".chars().collect();
        let norm = Normalizer {
            readings: &readings,
            lexicon: &lexicon,
            charset: Some(&charset),
        };
        let report = ["這是tsı̍t款", "In-uī", "你好", "好嗎"]
            .iter()
            .map(|s| norm.process(s).1)
            .fold(NormalizationReport::default(), NormalizationReport::merge);
        assert_eq!(report.input_count, 4);
        assert_eq!(report.kept, 2);
        assert_eq!(report.rejected_hanlo, 1);
        assert_eq!(report.rejected_unknown, 1);
        assert_eq!(report.tailo_converted, 1);
        assert!(report.is_consistent());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn fixture_map() -> ReadingMap {
            ReadingMap::new([
                ("甲", "得"),
                ("汝", "你"),
                ("一四界", "到處"),
                ("阮", "我們"),
            ])
            .unwrap()
        }

        proptest! {
            #[test]
            fn normalize_is_idempotent(s in "[甲汝一四界阮得你到處我們tsı̍ ]{0,24}") {
                let lexicon = lex();
                let map = fixture_map();
                if let Ok(once) = normalize_sentence(&s, &map, &lexicon) {
                    let twice = normalize_sentence(&once.text, &map, &lexicon).unwrap();
                    prop_assert_eq!(once.text, twice.text);
                }
            }

            #[test]
            fn kept_sentences_have_no_latin(s in "[一款這是a-zé ]{0,16}") {
                let charset: Charset = "一款這是 ".chars().collect();
                if filter_sentence(&s, &charset) == FilterOutcome::Keep {
                    prop_assert!(!s.chars().any(is_latin_letter));
                }
            }
        }
    }
}
