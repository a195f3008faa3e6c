//! Hokkien–Mandarin lexicon.
//!
//! The on-disk format is a five-column UTF-8 TSV:
//!
//! ```text
//! headword<TAB>pos<TAB>romanization<TAB>translations<TAB>flags
//! ```
//!
//! Translations are `|`-separated, flags `;`-separated. Romanization,
//! translations and flags may be empty. Lines starting with `#` are comments.
//! A headword may appear on several rows; each row is one sense and row order
//! is preserved.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::script::is_punctuation;

const HEADER: &str = "headword\tpos\tromanization\ttranslations\tflags";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Part-of-speech tagset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Pos {
    N,
    V,
    Adj,
    Adv,
    Prep,
    Pron,
    Det,
    Num,
    Clf,
    Aux,
    Conj,
    Part,
    Punct,
    ProperPerson,
    ProperLoc,
    Unk,
}

impl Pos {
    pub const ALL: [Pos; 16] = [
        Pos::N,
        Pos::V,
        Pos::Adj,
        Pos::Adv,
        Pos::Prep,
        Pos::Pron,
        Pos::Det,
        Pos::Num,
        Pos::Clf,
        Pos::Aux,
        Pos::Conj,
        Pos::Part,
        Pos::Punct,
        Pos::ProperPerson,
        Pos::ProperLoc,
        Pos::Unk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::N => "N",
            Pos::V => "V",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Prep => "PREP",
            Pos::Pron => "PRON",
            Pos::Det => "DET",
            Pos::Num => "NUM",
            Pos::Clf => "CLF",
            Pos::Aux => "AUX",
            Pos::Conj => "CONJ",
            Pos::Part => "PART",
            Pos::Punct => "PUNCT",
            Pos::ProperPerson => "PROPER_PERSON",
            Pos::ProperLoc => "PROPER_LOC",
            Pos::Unk => "UNK",
        }
    }

    /// Closed-class tags that never switch on their own.
    pub fn is_function(self) -> bool {
        matches!(
            self,
            Pos::Aux | Pos::Conj | Pos::Part | Pos::Det | Pos::Clf | Pos::Prep | Pos::Pron
        )
    }

    pub fn is_proper(self) -> bool {
        matches!(self, Pos::ProperPerson | Pos::ProperLoc)
    }

    /// Tags that can head a noun phrase.
    pub fn is_nominal_head(self) -> bool {
        self == Pos::N || self.is_proper()
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown POS `{s}`"))
    }
}

/// One category flag of a lexicon entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    Idiom,
    Proverb,
    Person,
    Location,
    Function,
    Identity,
}

impl Flag {
    const ALL: [Flag; 6] = [
        Flag::Idiom,
        Flag::Proverb,
        Flag::Person,
        Flag::Location,
        Flag::Function,
        Flag::Identity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Idiom => "idiom",
            Flag::Proverb => "proverb",
            Flag::Person => "person",
            Flag::Location => "location",
            Flag::Function => "function",
            Flag::Identity => "identity",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl FromStr for Flag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Flag::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown flag `{s}`"))
    }
}

/// Set of [`Flag`]s.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Flags(u8);

impl Flags {
    pub fn empty() -> Self {
        Flags(0)
    }

    pub fn contains(self, flag: Flag) -> bool {
        self.0 & flag.bit() != 0
    }

    pub fn insert(&mut self, flag: Flag) {
        self.0 |= flag.bit();
    }

    pub fn with(mut self, flag: Flag) -> Self {
        self.insert(flag);
        self
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Flag> {
        Flag::ALL.into_iter().filter(move |f| self.contains(*f))
    }
}

impl FromIterator<Flag> for Flags {
    fn from_iter<I: IntoIterator<Item = Flag>>(iter: I) -> Self {
        let mut flags = Flags::empty();
        for f in iter {
            flags.insert(f);
        }
        flags
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Flag::as_str).collect();
        f.write_str(&names.join(";"))
    }
}

/// One sense of a headword.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexiconEntry {
    pub headword: String,
    pub pos: Pos,
    pub romanization: String,
    pub translations: Vec<String>,
    pub flags: Flags,
}

impl LexiconEntry {
    pub fn new(headword: impl Into<String>, pos: Pos) -> Self {
        LexiconEntry {
            headword: headword.into(),
            pos,
            romanization: String::new(),
            translations: Vec::new(),
            flags: Flags::empty(),
        }
    }

    pub fn romanized(mut self, romanization: impl Into<String>) -> Self {
        self.romanization = romanization.into();
        self
    }

    pub fn translated<I, S>(mut self, translations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.translations = translations.into_iter().map(Into::into).collect();
        self
    }

    pub fn flagged(mut self, flag: Flag) -> Self {
        self.flags.insert(flag);
        self
    }

    pub fn has(&self, flag: Flag) -> bool {
        self.flags.contains(flag)
    }

    /// A sense is precise when it has exactly one Mandarin rendering or is an
    /// identity sense (the headword is itself the Mandarin form).
    pub fn is_precise(&self) -> bool {
        self.translations.len() == 1 || self.has(Flag::Identity)
    }

    /// Headword length in characters.
    pub fn char_len(&self) -> usize {
        self.headword.chars().count()
    }

    /// Checks the per-entry invariants.
    pub fn validate(&self) -> Result<(), String> {
        if self.headword.is_empty() {
            return Err("empty headword".into());
        }
        if self.headword.chars().any(char::is_whitespace) {
            return Err(format!("headword `{}` contains whitespace", self.headword));
        }
        let all_punct = self.headword.chars().all(is_punctuation);
        if all_punct != (self.pos == Pos::Punct) {
            return Err(format!(
                "headword `{}`: PUNCT is reserved for punctuation headwords",
                self.headword
            ));
        }
        if self.has(Flag::Person) && self.pos != Pos::ProperPerson {
            return Err(format!(
                "`{}`: person flag requires PROPER_PERSON",
                self.headword
            ));
        }
        if self.has(Flag::Location) && self.pos != Pos::ProperLoc {
            return Err(format!(
                "`{}`: location flag requires PROPER_LOC",
                self.headword
            ));
        }
        if self.has(Flag::Identity) && !self.translations.contains(&self.headword) {
            return Err(format!(
                "`{}`: identity flag requires the headword among its translations",
                self.headword
            ));
        }
        if self.translations.iter().any(String::is_empty) {
            return Err(format!("`{}`: empty translation", self.headword));
        }
        Ok(())
    }

    fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.headword,
            self.pos,
            self.romanization,
            self.translations.join("|"),
            self.flags
        )
    }

    fn parse_row(row: &str) -> Result<Self, String> {
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() != 5 {
            return Err(format!(
                "expected 5 tab-separated columns, found {}",
                cols.len()
            ));
        }
        let pos: Pos = cols[1].trim().parse()?;
        let translations = cols[3]
            .split('|')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        let flags = cols[4]
            .split(';')
            .map(str::trim)
            .filter(|f| !f.is_empty())
            .map(Flag::from_str)
            .collect::<Result<Flags, _>>()?;
        let entry = LexiconEntry {
            headword: cols[0].trim().to_string(),
            pos,
            romanization: cols[2].trim().to_string(),
            translations,
            flags,
        };
        entry.validate()?;
        Ok(entry)
    }
}

/// Immutable headword → senses store with a romanization index.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: IndexMap<String, Vec<LexiconEntry>>,
    romanization_index: HashMap<String, Vec<String>>,
    max_headword_len: usize,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::from_entries(std::iter::empty())
    }
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Lexicon {}

impl Lexicon {
    /// Builds a lexicon from senses in order. Identical senses are kept once.
    pub fn from_entries<I: IntoIterator<Item = LexiconEntry>>(entries: I) -> Self {
        let mut map: IndexMap<String, Vec<LexiconEntry>> = IndexMap::new();
        for entry in entries {
            let senses = map.entry(entry.headword.clone()).or_default();
            if !senses.contains(&entry) {
                senses.push(entry);
            }
        }
        Lexicon::index(map)
    }

    fn index(entries: IndexMap<String, Vec<LexiconEntry>>) -> Self {
        let mut romanization_index: HashMap<String, Vec<String>> = HashMap::new();
        let mut max_headword_len = 1;
        for (headword, senses) in &entries {
            max_headword_len = max_headword_len.max(headword.chars().count());
            for sense in senses {
                if sense.romanization.is_empty() {
                    continue;
                }
                let heads = romanization_index
                    .entry(sense.romanization.clone())
                    .or_default();
                if !heads.contains(headword) {
                    heads.push(headword.clone());
                }
            }
        }
        Lexicon {
            entries,
            romanization_index,
            max_headword_len,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') || line == HEADER {
                continue;
            }
            let entry = LexiconEntry::parse_row(line).map_err(|message| LexiconError::Parse {
                line: idx + 1,
                message,
            })?;
            entries.push(entry);
        }
        Ok(Lexicon::from_entries(entries))
    }

    /// Serializes back to the TSV format (with a commented header).
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {HEADER}\n");
        for entry in self.entries.values().flatten() {
            out.push_str(&entry.to_tsv_row());
            out.push('\n');
        }
        out
    }

    /// Custom senses precede base senses for shared headwords.
    pub fn merge_custom(base: &Lexicon, custom: &Lexicon) -> Lexicon {
        let mut merged: IndexMap<String, Vec<LexiconEntry>> = IndexMap::new();
        for (headword, senses) in custom.entries.iter().chain(base.entries.iter()) {
            merged
                .entry(headword.clone())
                .or_default()
                .extend(senses.iter().cloned());
        }
        Lexicon::index(merged)
    }

    /// All senses of `surface`, in stored order; empty when absent.
    pub fn lookup(&self, surface: &str) -> &[LexiconEntry] {
        self.entries.get(surface).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(surface)
    }

    /// Headwords whose sense carries exactly this romanization.
    pub fn by_romanization(&self, romanization: &str) -> &[String] {
        self.romanization_index
            .get(romanization)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn max_headword_len(&self) -> usize {
        self.max_headword_len
    }

    pub fn headword_count(&self) -> usize {
        self.entries.len()
    }

    pub fn sense_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn headwords(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values().flatten()
    }
}
