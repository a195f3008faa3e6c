//! Code-mixed sentence synthesis with Hokkien as the matrix language.
//!
//! Switch-point candidates are collected in rule order (head noun, idiom,
//! person/location, NP/VP chunk, noun after preposition), filtered by the
//! function-unit exclusion and, in [`Mode::Cm`], by the functional-head and
//! equivalence constraints. Surviving ranges are replaced with their Mandarin
//! rendering; every other character stays Hokkien and is rendered with the
//! `_@` suffix.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{Lang, LangTag};
use crate::lexicon::{Flag, Lexicon, LexiconEntry, Pos};
use crate::normalizer::{NormalizationReport, Normalizer};
use crate::script::{is_language_independent, HOK_SUFFIX};
use crate::segmenter::{analyze, ChunkKind, SegmentedSentence, Token};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("switch {index} has an empty range")]
    EmptySwitch { index: usize },
    #[error("switch {index} range {start}..{end} is outside the {len}-token sentence")]
    OutOfRange {
        index: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("switch {index} overlaps or precedes the previous switch")]
    Overlap { index: usize },
    #[error("switch {index} has an empty replacement")]
    EmptyReplacement { index: usize },
}

/// CM: every constraint holds and every switched unit is precisely
/// translated. CMDA: the relaxed, data-augmentation variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cm,
    Cmda,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cm => "cm",
            Mode::Cmda => "cmda",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cm" => Ok(Mode::Cm),
            "cmda" => Ok(Mode::Cmda),
            other => Err(format!("unknown mode `{other}` (expected cm or cmda)")),
        }
    }
}

/// Switch-point rules in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    HeadNoun,
    Idiom,
    PersonLoc,
    NpVp,
    NounAfterPrep,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchPoint {
    /// Token indices, end exclusive.
    #[serde(rename = "range", with = "range_pair")]
    pub token_range: Range<usize>,
    pub rule: Rule,
    pub replacement: String,
    pub precise: bool,
    /// POS of the lexicon sense chosen for each token of the range.
    #[serde(skip)]
    pub replacement_pos: Vec<Pos>,
}

mod range_pair {
    use std::ops::Range;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Range<usize>, s: S) -> Result<S::Ok, S::Error> {
        [r.start, r.end].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Range<usize>, D::Error> {
        let [start, end] = <[usize; 2]>::deserialize(d)?;
        Ok(start..end)
    }
}

/// A synthesized sentence: one `(character, language)` pair per output
/// character, plus the switches that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMixedSentence {
    pub emitted: Vec<(char, LangTag)>,
    pub switches: Vec<SwitchPoint>,
    pub mode: Mode,
    pub source_id: String,
}

impl CodeMixedSentence {
    /// Space-joined characters, Hokkien ones suffixed with `_@`.
    pub fn render(&self) -> String {
        render_chars(&self.emitted)
    }

    pub fn tags(&self) -> Vec<LangTag> {
        self.emitted.iter().map(|(_, tag)| *tag).collect()
    }
}

pub fn render_chars(emitted: &[(char, LangTag)]) -> String {
    let mut out = String::new();
    for (i, (c, tag)) in emitted.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push(*c);
        if *tag == LangTag::Hok {
            out.push_str(HOK_SUFFIX);
        }
    }
    out
}

/// Reads a rendered string back into `(character, language)` pairs.
/// Unsuffixed punctuation and digits are `Other`, any other bare character is
/// Mandarin.
pub fn parse_rendered(rendered: &str) -> Result<Vec<(char, LangTag)>, String> {
    rendered
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(|token| {
            let (body, hok) = match token.strip_suffix(HOK_SUFFIX) {
                Some(body) => (body, true),
                None => (token, false),
            };
            let mut chars = body.chars();
            let c = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(format!("`{token}` is not a single rendered character")),
            };
            let tag = if hok {
                LangTag::Hok
            } else if is_language_independent(c) {
                LangTag::Other
            } else {
                LangTag::Zh
            };
            Ok((c, tag))
        })
        .collect()
}

/// Chosen rendering of one token.
struct Rendering<'a> {
    sense: &'a LexiconEntry,
    text: &'a str,
}

/// Function units never switch on their own.
fn is_function_unit(token: &Token, senses: &[LexiconEntry]) -> bool {
    token.pos.is_function() || senses.first().is_some_and(|s| s.has(Flag::Function))
}

/// CM picks the first precise sense whose POS matches the token; CMDA takes
/// the first sense as is.
fn render_token<'a>(token: &Token, lex: &'a Lexicon, mode: Mode) -> Option<Rendering<'a>> {
    if token.is_punct() || token.fallback {
        return None;
    }
    let senses = lex.lookup(&token.surface);
    let sense = match mode {
        Mode::Cm => senses
            .iter()
            .find(|s| s.pos == token.pos && s.is_precise())?,
        Mode::Cmda => senses.first()?,
    };
    let text = if sense.has(Flag::Identity) {
        sense.headword.as_str()
    } else {
        sense.translations.first()?.as_str()
    };
    Some(Rendering { sense, text })
}

fn candidate(
    seg: &SegmentedSentence,
    lex: &Lexicon,
    mode: Mode,
    range: Range<usize>,
    rule: Rule,
) -> Option<SwitchPoint> {
    let tokens = &seg.tokens[range.clone()];
    if let [token] = tokens {
        if is_function_unit(token, lex.lookup(&token.surface)) {
            return None;
        }
    }
    if mode == Mode::Cm && !respects_functional_heads(seg, &range) {
        return None;
    }
    let mut replacement = String::new();
    let mut precise = true;
    let mut replacement_pos = Vec::with_capacity(tokens.len());
    for token in tokens {
        let rendering = render_token(token, lex, mode)?;
        replacement.push_str(rendering.text);
        precise &= rendering.sense.is_precise();
        replacement_pos.push(rendering.sense.pos);
    }
    if replacement.is_empty() {
        return None;
    }
    Some(SwitchPoint {
        token_range: range,
        rule,
        replacement,
        precise,
        replacement_pos,
    })
}

/// A range holding a preposition must also hold that preposition's whole PP.
fn respects_functional_heads(seg: &SegmentedSentence, range: &Range<usize>) -> bool {
    range.clone().all(|i| {
        if seg.tokens[i].pos != Pos::Prep {
            return true;
        }
        match seg
            .chunks
            .iter()
            .find(|c| c.kind == ChunkKind::Pp && c.head == i)
        {
            Some(pp) => range.start <= pp.start && pp.end <= range.end,
            None => true,
        }
    })
}

/// Collects, filters and resolves switch points for a chunked sentence.
pub fn find_switch_points(seg: &SegmentedSentence, lex: &Lexicon, mode: Mode) -> Vec<SwitchPoint> {
    let tokens = &seg.tokens;
    let mut proposals: Vec<(Range<usize>, Rule)> = Vec::new();

    for chunk in &seg.chunks {
        if let Some(h) = chunk.noun_head {
            if tokens[h].pos == Pos::N {
                proposals.push((h..h + 1, Rule::HeadNoun));
            }
        }
    }
    for (i, token) in tokens.iter().enumerate() {
        let first = lex.lookup(&token.surface).first();
        if first.is_some_and(|s| s.has(Flag::Idiom) && !s.has(Flag::Proverb)) {
            proposals.push((i..i + 1, Rule::Idiom));
        }
    }
    for (i, token) in tokens.iter().enumerate() {
        if token.pos.is_proper() {
            proposals.push((i..i + 1, Rule::PersonLoc));
        }
    }
    for chunk in &seg.chunks {
        if matches!(chunk.kind, ChunkKind::Np | ChunkKind::Vp) {
            proposals.push((chunk.range(), Rule::NpVp));
        }
    }
    for (i, token) in tokens.iter().enumerate() {
        if token.pos == Pos::Prep {
            if let Some(next) = tokens.get(i + 1) {
                if next.pos.is_nominal_head() {
                    proposals.push((i + 1..i + 2, Rule::NounAfterPrep));
                }
            }
        }
    }

    let mut survivors: Vec<SwitchPoint> = proposals
        .into_iter()
        .filter_map(|(range, rule)| candidate(seg, lex, mode, range, rule))
        .collect();
    survivors.sort_by(|a, b| {
        a.rule
            .cmp(&b.rule)
            .then_with(|| b.token_range.len().cmp(&a.token_range.len()))
            .then_with(|| a.token_range.start.cmp(&b.token_range.start))
    });

    let mut taken = vec![false; tokens.len()];
    let mut chosen = Vec::new();
    for sp in survivors {
        if sp.token_range.clone().any(|i| taken[i]) {
            continue;
        }
        sp.token_range.clone().for_each(|i| taken[i] = true);
        chosen.push(sp);
    }
    chosen.sort_by_key(|sp| sp.token_range.start);
    chosen
}

fn tag_for(c: char, lang: Lang) -> LangTag {
    if is_language_independent(c) {
        LangTag::Other
    } else {
        lang.into()
    }
}

/// Emits the code-mixed character sequence for `seg` under `switches`.
pub fn apply_switches(
    seg: &SegmentedSentence,
    switches: &[SwitchPoint],
    mode: Mode,
    source_id: impl Into<String>,
) -> Result<CodeMixedSentence, SynthesisError> {
    let len = seg.tokens.len();
    let mut prev_end = 0;
    for (index, sp) in switches.iter().enumerate() {
        let r = &sp.token_range;
        if r.start >= r.end {
            return Err(SynthesisError::EmptySwitch { index });
        }
        if r.end > len {
            return Err(SynthesisError::OutOfRange {
                index,
                start: r.start,
                end: r.end,
                len,
            });
        }
        if r.start < prev_end {
            return Err(SynthesisError::Overlap { index });
        }
        if sp.replacement.is_empty() {
            return Err(SynthesisError::EmptyReplacement { index });
        }
        prev_end = r.end;
    }

    let mut emitted = Vec::new();
    let mut next = switches.iter().peekable();
    let mut i = 0;
    while i < len {
        if let Some(sp) = next.next_if(|sp| sp.token_range.start == i) {
            emitted.extend(sp.replacement.chars().map(|c| (c, tag_for(c, Lang::Zh))));
            i = sp.token_range.end;
        } else {
            emitted.extend(
                seg.tokens[i]
                    .surface
                    .chars()
                    .map(|c| (c, tag_for(c, Lang::Hok))),
            );
            i += 1;
        }
    }

    Ok(CodeMixedSentence {
        emitted,
        switches: switches.to_vec(),
        mode,
        source_id: source_id.into(),
    })
}

/// One parallel-corpus row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPair {
    pub id: String,
    pub hokkien: String,
    pub mandarin: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct PairParseError {
    pub line: usize,
    pub message: String,
}

impl ParallelPair {
    /// Reads `id<TAB>hokkien<TAB>mandarin` rows. Blank lines, `#` comments and
    /// an `id\thokkien\tmandarin` header are skipped.
    pub fn parse_tsv(text: &str) -> Result<Vec<ParallelPair>, PairParseError> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') || line == "id\thokkien\tmandarin" {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [id, hokkien, mandarin] = cols[..] else {
                return Err(PairParseError {
                    line: idx + 1,
                    message: format!("expected 3 tab-separated columns, found {}", cols.len()),
                });
            };
            if id.trim().is_empty() {
                return Err(PairParseError {
                    line: idx + 1,
                    message: "empty id".into(),
                });
            }
            pairs.push(ParallelPair {
                id: id.trim().to_string(),
                hokkien: hokkien.trim().to_string(),
                mandarin: mandarin.trim().to_string(),
            });
        }
        Ok(pairs)
    }
}

/// One synthesized corpus row, as written to JSON lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub mode: Mode,
    pub source_hok: String,
    pub source_zh: String,
    pub cm: String,
    pub switches: Vec<SwitchPoint>,
}

impl CorpusRecord {
    pub fn new(pair: &ParallelPair, normalized: &str, sentence: &CodeMixedSentence) -> Self {
        CorpusRecord {
            id: pair.id.clone(),
            mode: sentence.mode,
            source_hok: normalized.to_string(),
            source_zh: pair.mandarin.clone(),
            cm: sentence.render(),
            switches: sentence.switches.clone(),
        }
    }

    /// Rebuilds the tagged sentence from the rendered `cm` field.
    pub fn to_sentence(&self) -> Result<CodeMixedSentence, String> {
        Ok(CodeMixedSentence {
            emitted: parse_rendered(&self.cm)?,
            switches: self.switches.clone(),
            mode: self.mode,
            source_id: self.id.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    pub mode: Mode,
    /// Emit sentences that received no switch (pure Hokkien).
    pub keep_unswitched: bool,
}

/// Synthesized corpus with its normalization counters. `records` follow input
/// order.
#[derive(Debug, Clone, Default)]
pub struct SynthesisOutput {
    pub records: Vec<CorpusRecord>,
    pub sentences: Vec<CodeMixedSentence>,
    pub report: NormalizationReport,
}

/// Runs one pair through normalize → filter → segment → chunk → switch.
pub fn synthesize_pair(
    pair: &ParallelPair,
    normalizer: &Normalizer<'_>,
    lex: &Lexicon,
    opts: SynthesisOptions,
) -> (
    Option<(CorpusRecord, CodeMixedSentence)>,
    NormalizationReport,
) {
    let (kept, report) = normalizer.process(&pair.hokkien);
    let Some(text) = kept else {
        return (None, report);
    };
    let seg = analyze(&text, lex);
    let switches = find_switch_points(&seg, lex, opts.mode);
    if switches.is_empty() && !opts.keep_unswitched {
        return (None, report);
    }
    let sentence = apply_switches(&seg, &switches, opts.mode, pair.id.clone())
        .expect("switch points from find_switch_points are valid");
    let record = CorpusRecord::new(pair, &text, &sentence);
    (Some((record, sentence)), report)
}

/// Full corpus pipeline. Work is spread over the current rayon pool; output
/// order always matches input order.
pub fn synthesize_corpus(
    parallel: &[ParallelPair],
    lex: &Lexicon,
    normalizer: &Normalizer<'_>,
    opts: SynthesisOptions,
) -> SynthesisOutput {
    let results: Vec<_> = parallel
        .par_iter()
        .map(|pair| synthesize_pair(pair, normalizer, lex, opts))
        .collect();
    let mut out = SynthesisOutput::default();
    for (kept, report) in results {
        out.report = out.report.merge(report);
        if let Some((record, sentence)) = kept {
            out.records.push(record);
            out.sentences.push(sentence);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconEntry as E;
    use crate::normalizer::ReadingMap;
    use crate::segmenter::analyze;

    fn lexicon() -> Lexicon {
        Lexicon::from_entries([
            E::new("佇", Pos::Prep)
                .translated(["在"])
                .flagged(Flag::Function),
            E::new("美東時間", Pos::ProperLoc).flagged(Flag::Location),
            E::new("美東時間", Pos::ProperLoc)
                .translated(["美東時間"])
                .flagged(Flag::Location)
                .flagged(Flag::Identity),
            E::new("四", Pos::Num)
                .translated(["四"])
                .flagged(Flag::Identity),
            E::new("號", Pos::N).translated(["日", "號"]),
            E::new("深夜", Pos::N).translated(["深夜", "子夜"]),
            E::new("深夜", Pos::N).translated(["子夜"]),
            E::new("十", Pos::Num),
            E::new("一", Pos::Num)
                .translated(["一"])
                .flagged(Flag::Identity),
            E::new("點", Pos::Clf).translated(["時", "點"]),
            E::new("宣布", Pos::V),
            E::new("這", Pos::Det)
                .translated(["這"])
                .flagged(Flag::Identity),
            E::new("个", Pos::Clf).translated(["個"]),
            E::new("袂使", Pos::V),
            E::new("袂使", Pos::V).translated(["不可"]),
            E::new("彼", Pos::Det).translated(["那"]),
            E::new("毋通", Pos::Aux)
                .translated(["不要"])
                .flagged(Flag::Function),
            E::new("全", Pos::Adv)
                .translated(["全"])
                .flagged(Flag::Identity),
            E::new("你", Pos::Pron)
                .translated(["你"])
                .flagged(Flag::Identity),
            E::new("的", Pos::Part)
                .translated(["的"])
                .flagged(Flag::Function)
                .flagged(Flag::Identity),
            E::new("意見", Pos::N)
                .translated(["意見"])
                .flagged(Flag::Identity),
            E::new("了了", Pos::Adv).translated(["很多"]),
            E::new("教授", Pos::N)
                .translated(["教授"])
                .flagged(Flag::Identity),
            E::new("佮", Pos::Prep)
                .translated(["跟", "和"])
                .flagged(Flag::Function),
            E::new("伊", Pos::Pron).translated(["他", "她"]),
            E::new("矣", Pos::Part)
                .translated(["了"])
                .flagged(Flag::Function),
            E::new("食緊挵破碗", Pos::Adv)
                .translated(["欲速則不達"])
                .flagged(Flag::Idiom)
                .flagged(Flag::Proverb),
            E::new("一舉兩得", Pos::Adv)
                .translated(["一舉兩得"])
                .flagged(Flag::Idiom)
                .flagged(Flag::Identity),
            E::new("阿明", Pos::ProperPerson)
                .translated(["阿明"])
                .flagged(Flag::Person)
                .flagged(Flag::Identity),
        ])
    }

    fn switches(s: &str, mode: Mode) -> Vec<(String, Rule, String)> {
        let lex = lexicon();
        let seg = analyze(s, &lex);
        find_switch_points(&seg, &lex, mode)
            .into_iter()
            .map(|sp| {
                let src: String = seg.tokens[sp.token_range.clone()]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect();
                (src, sp.rule, sp.replacement)
            })
            .collect()
    }

    fn synth(s: &str, mode: Mode) -> String {
        let lex = lexicon();
        let seg = analyze(s, &lex);
        let sps = find_switch_points(&seg, &lex, mode);
        apply_switches(&seg, &sps, mode, "t").unwrap().render()
    }

    fn owned(v: &[(&str, Rule, &str)]) -> Vec<(String, Rule, String)> {
        v.iter()
            .map(|(a, r, b)| (a.to_string(), *r, b.to_string()))
            .collect()
    }

    #[test]
    fn moedict_switch_points() {
        let s = "這个袂使,彼个毋通,全你的意見了了。";
        assert_eq!(
            switches(s, Mode::Cm),
            owned(&[
                ("袂使", Rule::NpVp, "不可"),
                ("意見", Rule::HeadNoun, "意見")
            ])
        );
        assert_eq!(
            switches(s, Mode::Cmda),
            owned(&[("意見", Rule::HeadNoun, "意見")])
        );
    }

    #[test]
    fn icorpus_switch_points() {
        let s = "佇美東時間四號深夜十一點宣布";
        assert_eq!(
            switches(s, Mode::Cm),
            owned(&[
                ("美東時間", Rule::PersonLoc, "美東時間"),
                ("深夜", Rule::HeadNoun, "子夜")
            ])
        );
        assert_eq!(
            switches(s, Mode::Cmda),
            owned(&[("深夜", Rule::HeadNoun, "深夜")])
        );
    }

    #[test]
    fn precision_flags() {
        let lex = lexicon();
        let seg = analyze("佇美東時間四號深夜十一點宣布", &lex);
        let cm = find_switch_points(&seg, &lex, Mode::Cm);
        assert!(cm.iter().all(|sp| sp.precise));
        let cmda = find_switch_points(&seg, &lex, Mode::Cmda);
        assert!(!cmda[0].precise);
    }

    #[test]
    fn function_units_only_yield_nothing() {
        assert!(switches("毋通佮的矣，", Mode::Cm).is_empty());
        assert!(switches("毋通佮的矣，", Mode::Cmda).is_empty());
    }

    #[test]
    fn idiom_rule_skips_proverbs() {
        assert_eq!(
            switches("一舉兩得", Mode::Cm),
            owned(&[("一舉兩得", Rule::Idiom, "一舉兩得")])
        );
        assert!(switches("食緊挵破碗", Mode::Cm).is_empty());
    }

    #[test]
    fn person_rule() {
        assert_eq!(
            switches("阿明", Mode::Cm),
            owned(&[("阿明", Rule::PersonLoc, "阿明")])
        );
    }

    #[test]
    fn noun_after_preposition() {
        // 佮 + 教授 forms a PP; rule 1 claims the head noun first
        assert_eq!(
            switches("佮教授", Mode::Cm),
            owned(&[("教授", Rule::HeadNoun, "教授")])
        );
    }

    #[test]
    fn functional_head_constraint() {
        let lex = lexicon();
        let seg = analyze("佮伊矣", &lex);
        assert!(!respects_functional_heads(&seg, &(0..1)));
        assert!(respects_functional_heads(&seg, &(0..2)));
        assert!(respects_functional_heads(&seg, &(1..3)));
    }

    #[test]
    fn golden_renderings() {
        let s = "這个袂使,彼个毋通,全你的意見了了。";
        assert_eq!(
            synth(s, Mode::Cm),
            "這_@ 个_@ 不 可 , 彼_@ 个_@ 毋_@ 通_@ , 全_@ 你_@ 的_@ 意 見 了_@ 了_@ 。"
        );
        assert_eq!(
            synth(s, Mode::Cmda),
            "這_@ 个_@ 袂_@ 使_@ , 彼_@ 个_@ 毋_@ 通_@ , 全_@ 你_@ 的_@ 意 見 了_@ 了_@ 。"
        );
        let s = "佇美東時間四號深夜十一點宣布";
        assert_eq!(
            synth(s, Mode::Cm),
            "佇_@ 美 東 時 間 四_@ 號_@ 子 夜 十_@ 一_@ 點_@ 宣_@ 布_@"
        );
        assert_eq!(
            synth(s, Mode::Cmda),
            "佇_@ 美_@ 東_@ 時_@ 間_@ 四_@ 號_@ 深 夜 十_@ 一_@ 點_@ 宣_@ 布_@"
        );
    }

    #[test]
    fn no_switches_tags_everything() {
        let lex = lexicon();
        let seg = analyze("毋通佮伊", &lex);
        let out = apply_switches(&seg, &[], Mode::Cm, "x").unwrap();
        assert_eq!(out.render(), "毋_@ 通_@ 佮_@ 伊_@");
    }

    #[test]
    fn identity_switch_is_bare() {
        let lex = lexicon();
        let seg = analyze("教授", &lex);
        let sp = SwitchPoint {
            token_range: 0..1,
            rule: Rule::HeadNoun,
            replacement: "教授".into(),
            precise: true,
            replacement_pos: vec![Pos::N],
        };
        let out = apply_switches(&seg, &[sp], Mode::Cm, "x").unwrap();
        assert_eq!(out.render(), "教 授");
    }

    #[test]
    fn invalid_switches_are_rejected() {
        let lex = lexicon();
        let seg = analyze("毋通佮伊", &lex);
        let sp = |r: Range<usize>| SwitchPoint {
            token_range: r,
            rule: Rule::NpVp,
            replacement: "不".into(),
            precise: true,
            replacement_pos: vec![],
        };
        assert_eq!(
            apply_switches(&seg, &[sp(2..5)], Mode::Cm, "x").unwrap_err(),
            SynthesisError::OutOfRange {
                index: 0,
                start: 2,
                end: 5,
                len: 3
            }
        );
        assert_eq!(
            apply_switches(&seg, &[sp(0..2), sp(1..3)], Mode::Cm, "x").unwrap_err(),
            SynthesisError::Overlap { index: 1 }
        );
        assert_eq!(
            apply_switches(&seg, &[sp(1..1)], Mode::Cm, "x").unwrap_err(),
            SynthesisError::EmptySwitch { index: 0 }
        );
    }

    #[test]
    fn rendered_round_trip() {
        let s = "這_@ 个_@ 不 可 , 彼_@ 个_@ 毋_@ 通_@ , 全_@ 你_@ 的_@ 意 見 了_@ 了_@ 。";
        let parsed = parse_rendered(s).unwrap();
        assert_eq!(render_chars(&parsed), s);
        assert!(parse_rendered("美東 時").is_err());
    }

    #[test]
    fn corpus_pipeline() {
        let lex = lexicon();
        let readings = ReadingMap::default();
        let norm = Normalizer {
            readings: &readings,
            lexicon: &lex,
            charset: None,
        };
        let pairs = vec![
            ParallelPair {
                id: "1".into(),
                hokkien: "佇美東時間四號深夜十一點宣布".into(),
                mandarin: "在美東時間四日深夜十一時宣布".into(),
            },
            ParallelPair {
                id: "2".into(),
                hokkien: "毋通佮伊".into(),
                mandarin: "不要跟他".into(),
            },
            ParallelPair {
                id: "3".into(),
                hokkien: "In-uī".into(),
                mandarin: "因為".into(),
            },
        ];
        let opts = SynthesisOptions {
            mode: Mode::Cm,
            keep_unswitched: false,
        };
        let out = synthesize_corpus(&pairs, &lex, &norm, opts);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].id, "1");
        assert_eq!(out.report.input_count, 3);
        assert_eq!(out.report.kept, 2);
        assert_eq!(out.report.rejected_hanlo, 1);

        let keep = SynthesisOptions {
            keep_unswitched: true,
            ..opts
        };
        let out = synthesize_corpus(&pairs, &lex, &norm, keep);
        assert_eq!(out.records.len(), 2);

        let empty = synthesize_corpus(&[], &lex, &norm, opts);
        assert!(empty.records.is_empty());
        assert_eq!(empty.report, NormalizationReport::default());
    }

    #[test]
    fn pair_tsv() {
        let pairs = ParallelPair::parse_tsv("id\thokkien\tmandarin\n# c\na\t佇\t在\n\n").unwrap();
        assert_eq!(
            pairs,
            [ParallelPair {
                id: "a".into(),
                hokkien: "佇".into(),
                mandarin: "在".into()
            }]
        );
        assert_eq!(ParallelPair::parse_tsv("a\tb\n").unwrap_err().line, 1);
    }

    #[test]
    fn record_json_shape() {
        let lex = lexicon();
        let readings = ReadingMap::default();
        let norm = Normalizer {
            readings: &readings,
            lexicon: &lex,
            charset: None,
        };
        let pair = ParallelPair {
            id: "m1".into(),
            hokkien: "全你的意見了了。".into(),
            mandarin: "你的意見真多。".into(),
        };
        let opts = SynthesisOptions {
            mode: Mode::Cm,
            keep_unswitched: false,
        };
        let (kept, _) = synthesize_pair(&pair, &norm, &lex, opts);
        let (record, _) = kept.unwrap();
        let json: serde_json::Value = serde_json::to_value(&record).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "id": "m1",
                "mode": "cm",
                "source_hok": "全你的意見了了。",
                "source_zh": "你的意見真多。",
                "cm": "全_@ 你_@ 的_@ 意 見 了_@ 了_@ 。",
                "switches": [{"range": [3, 4], "rule": "HEAD_NOUN", "replacement": "意見", "precise": true}]
            })
        );
        let back: CorpusRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back.to_sentence().unwrap().render(), record.cm);
    }
}
