use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use super::ModelPrepError;
use crate::lang::Lang;
use crate::script::{is_latin_letter, is_roman_numeral, HOK_SUFFIX};

/// XLM special tokens.
pub const XLM_SPECIALS: [&str; 5] = ["<s>", "</s>", "<pad>", "<unk>", "<mask>"];

/// Which language a character stream is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamLabel {
    Hok,
    Zh,
    /// Rendered code-mixed text: space-separated characters, Hokkien ones
    /// already suffixed with `_@`.
    Mixed,
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusStream<'a> {
    pub label: StreamLabel,
    pub text: &'a str,
}

/// Character-level vocabulary with `_@`-suffixed Hokkien entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    id_of: HashMap<String, u32>,
    specials: Vec<String>,
    /// Hokkien characters with no bare (Mandarin) counterpart in the vocabulary,
    /// plus characters inserted through [`replace_unused`].
    hok_only: BTreeSet<String>,
}

/// Characters that enter the vocabulary bare even from a Hokkien stream.
fn always_bare(c: char) -> bool {
    is_latin_letter(c) || is_roman_numeral(c) || crate::script::is_language_independent(c)
}

/// `[unusedN]` placeholder slots of a BERT-style vocabulary.
pub fn is_placeholder(token: &str) -> bool {
    token
        .strip_prefix("[unused")
        .and_then(|rest| rest.strip_suffix(']'))
        .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

fn looks_special(token: &str) -> bool {
    let bracketed = (token.starts_with('<') && token.ends_with('>'))
        || (token.starts_with('[') && token.ends_with(']'));
    token.len() > 2 && bracketed && !is_placeholder(token)
}

impl Vocab {
    /// Builds from a token list; ids follow list order.
    pub fn from_tokens(tokens: Vec<String>, specials: Vec<String>) -> Result<Self, ModelPrepError> {
        let mut id_of = HashMap::with_capacity(tokens.len());
        for (id, token) in tokens.iter().enumerate() {
            if id_of.insert(token.clone(), id as u32).is_some() {
                return Err(ModelPrepError::DuplicateToken(token.clone()));
            }
        }
        let hok_only = derive_hok_only(&id_of);
        Ok(Vocab {
            tokens,
            id_of,
            specials,
            hok_only,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.id_of.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn specials(&self) -> &[String] {
        &self.specials
    }

    pub fn hok_only(&self) -> &BTreeSet<String> {
        &self.hok_only
    }

    pub fn is_special(&self, id: u32) -> bool {
        self.token(id)
            .is_some_and(|t| self.specials.iter().any(|s| s == t))
    }

    /// Ids whose token is a Hokkien-only character (suffixed or bare).
    pub fn priority_ids(&self) -> HashSet<u32> {
        self.hok_only
            .iter()
            .flat_map(|c| [format!("{c}{HOK_SUFFIX}"), c.clone()])
            .filter_map(|t| self.id(&t))
            .collect()
    }

    /// Maps rendered tokens to ids, using `unk` for anything unknown.
    pub fn encode<'a, I>(&self, tokens: I, unk: &str) -> Result<Vec<u32>, ModelPrepError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let unk_id = self
            .id(unk)
            .ok_or_else(|| ModelPrepError::MissingToken(unk.to_string()))?;
        Ok(tokens
            .into_iter()
            .map(|t| self.id(t).unwrap_or(unk_id))
            .collect())
    }

    /// One token per line; line number − 1 is the id.
    pub fn to_text(&self) -> String {
        self.tokens.iter().map(|t| format!("{t}\n")).collect()
    }

    /// Parses the one-token-per-line format. Bracketed tokens (`<s>`, `[PAD]`,
    /// ... but not `[unusedN]`) are the specials.
    pub fn parse(text: &str) -> Result<Self, ModelPrepError> {
        let tokens: Vec<String> = text
            .lines()
            .map(|l| l.trim_end_matches('\r').to_string())
            .collect();
        if let Some(line) = tokens.iter().position(String::is_empty) {
            return Err(ModelPrepError::Parse {
                line: line + 1,
                message: "empty token".into(),
            });
        }
        let specials = tokens
            .iter()
            .filter(|t| looks_special(t))
            .cloned()
            .collect();
        Vocab::from_tokens(tokens, specials)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelPrepError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelPrepError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Vocab::parse(&text)
    }
}

fn derive_hok_only(id_of: &HashMap<String, u32>) -> BTreeSet<String> {
    id_of
        .keys()
        .filter_map(|t| t.strip_suffix(HOK_SUFFIX))
        .filter(|c| c.chars().count() == 1 && !id_of.contains_key(*c))
        .map(str::to_string)
        .collect()
}

/// Rendered vocabulary token for one character of a stream.
fn stream_token(c: char, lang: Lang) -> String {
    if lang == Lang::Hok && !always_bare(c) {
        format!("{c}{HOK_SUFFIX}")
    } else {
        c.to_string()
    }
}

/// Builds a character vocabulary. Ids go to specials first, then to tokens
/// in order of first occurrence across the streams.
pub fn build_vocab(
    streams: &[CorpusStream<'_>],
    specials: &[&str],
) -> Result<Vocab, ModelPrepError> {
    let mut tokens: Vec<String> = specials.iter().map(|s| s.to_string()).collect();
    let mut seen: HashSet<String> = tokens.iter().cloned().collect();
    let mut push = |token: String| {
        if seen.insert(token.clone()) {
            tokens.push(token);
        }
    };
    for stream in streams {
        match stream.label {
            StreamLabel::Hok | StreamLabel::Zh => {
                let lang = if stream.label == StreamLabel::Hok {
                    Lang::Hok
                } else {
                    Lang::Zh
                };
                for c in stream.text.chars().filter(|c| !c.is_whitespace()) {
                    push(stream_token(c, lang));
                }
            }
            StreamLabel::Mixed => {
                for token in stream.text.split_whitespace() {
                    let body = token.strip_suffix(HOK_SUFFIX).unwrap_or(token);
                    if body.chars().count() != 1 {
                        return Err(ModelPrepError::UntaggedMixed(token.to_string()));
                    }
                    push(token.to_string());
                }
            }
        }
    }
    Vocab::from_tokens(tokens, specials.iter().map(|s| s.to_string()).collect())
}

/// Writes `new_chars` into the `[unusedN]` placeholder slots in id order,
/// keeping every id. Inserted characters count as Hokkien-only.
pub fn replace_unused(base: &Vocab, new_chars: &[&str]) -> Result<Vocab, ModelPrepError> {
    let slots: Vec<usize> = base
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| is_placeholder(t))
        .map(|(i, _)| i)
        .collect();
    if slots.len() < new_chars.len() {
        return Err(ModelPrepError::Capacity {
            needed: new_chars.len(),
            available: slots.len(),
            shortfall: new_chars.len() - slots.len(),
        });
    }
    let mut tokens = base.tokens.clone();
    for (slot, c) in slots.iter().zip(new_chars) {
        tokens[*slot] = c.to_string();
    }
    let mut vocab = Vocab::from_tokens(tokens, base.specials.clone())?;
    vocab.hok_only.extend(base.hok_only.iter().cloned());
    vocab
        .hok_only
        .extend(new_chars.iter().map(|c| c.to_string()));
    Ok(vocab)
}
