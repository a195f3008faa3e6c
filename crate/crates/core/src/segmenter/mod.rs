//! Dictionary-lattice word segmentation and head-driven phrase chunking.
//!
//! Segmentation picks the lattice path with the fewest tokens, then the fewest
//! fallback (out-of-lexicon) characters, then the longest-first choice at the
//! earliest position. POS comes from the first sense of each matched headword.

mod chunk;
mod lattice;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::lang::Lang;
use crate::lexicon::{Lexicon, Pos};
use crate::script::is_punctuation;

pub use chunk::{chunk_phrases, Chunk, ChunkKind};
pub use lattice::{Arc, ArcKind, Lattice};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Character offsets, end exclusive.
    pub start: usize,
    pub end: usize,
    pub pos: Pos,
    pub lang: Lang,
    /// True when the token is a single character absent from the lexicon.
    #[serde(default)]
    pub fallback: bool,
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.pos == Pos::Punct
    }

    pub fn char_len(&self) -> usize {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedSentence {
    pub tokens: Vec<Token>,
    pub chunks: Vec<Chunk>,
}

impl SegmentedSentence {
    pub fn text(&self) -> String {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    /// Tokens joined by `,`. Punctuation is attached to the preceding token,
    /// since a comma-delimited line cannot carry a bare `,` token unambiguously.
    pub fn display_line(&self, with_pos: bool) -> String {
        let mut out = String::new();
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 && !(token.is_punct() && !self.tokens[i - 1].is_punct()) {
                out.push(',');
            }
            out.push_str(&token.surface);
            if with_pos {
                let _ = write!(out, "/{}", token.pos);
            }
        }
        out
    }

    /// Chunk covering token `index`, if any.
    pub fn chunk_of(&self, index: usize) -> Option<&Chunk> {
        self.chunks.iter().find(|c| c.range().contains(&index))
    }
}

/// Builds the lattice for `s`.
pub fn build_lattice<'a>(s: &str, lex: &'a Lexicon) -> Lattice<'a> {
    Lattice::build(s, lex)
}

/// Segments `s`; the returned sentence has no chunks.
pub fn segment(s: &str, lex: &Lexicon) -> SegmentedSentence {
    let lattice = Lattice::build(s, lex);
    let n = lattice.len();

    // best[i] = (tokens, fallbacks, chosen arc index) for the suffix starting at i
    let mut best: Vec<(usize, usize, usize)> = vec![(0, 0, usize::MAX); n + 1];
    for start in (0..n).rev() {
        let mut chosen: Option<(usize, usize, usize)> = None;
        for (k, arc) in lattice.arcs_from(start).iter().enumerate() {
            let (tokens, fallbacks, _) = best[arc.end];
            let cost = (tokens + 1, fallbacks + usize::from(arc.is_fallback()), k);
            // arcs are longest first, so strict comparison keeps the longest on ties
            if chosen.is_none_or(|c| (cost.0, cost.1) < (c.0, c.1)) {
                chosen = Some(cost);
            }
        }
        best[start] = chosen.expect("every position has a single-character arc");
    }

    let offsets = lattice.byte_offsets();
    let mut tokens = Vec::new();
    let mut at = 0;
    while at < n {
        let arc = lattice.arcs_from(at)[best[at].2];
        let surface = s[offsets[at]..offsets[arc.end]].to_string();
        let pos = match arc.kind {
            _ if surface.chars().all(is_punctuation) => Pos::Punct,
            ArcKind::Word(senses) => senses[0].pos,
            ArcKind::Fallback => Pos::Unk,
        };
        tokens.push(Token {
            surface,
            start: at,
            end: arc.end,
            pos,
            lang: Lang::Hok,
            fallback: arc.is_fallback(),
        });
        at = arc.end;
    }

    SegmentedSentence {
        tokens,
        chunks: Vec::new(),
    }
}

/// Segmentation followed by chunking.
pub fn analyze(s: &str, lex: &Lexicon) -> SegmentedSentence {
    chunk_phrases(segment(s, lex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconEntry;

    fn golden_lexicon() -> Lexicon {
        Lexicon::from_entries([
            LexiconEntry::new("物件", Pos::N),
            LexiconEntry::new("毋通", Pos::Aux),
            LexiconEntry::new("掖", Pos::V),
            LexiconEntry::new("甲", Pos::Part),
            LexiconEntry::new("一四界", Pos::Adv),
            LexiconEntry::new("一", Pos::Num),
            LexiconEntry::new("四", Pos::Num),
            LexiconEntry::new("你", Pos::Pron),
            LexiconEntry::new("一月日", Pos::N),
            LexiconEntry::new("趁", Pos::V),
            LexiconEntry::new("偌濟", Pos::Adv),
            LexiconEntry::new("錢", Pos::N),
            LexiconEntry::new("佮", Pos::Prep),
            LexiconEntry::new("伊", Pos::Pron),
            LexiconEntry::new("計較", Pos::V),
        ])
    }

    fn surfaces(seg: &SegmentedSentence) -> Vec<&str> {
        seg.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn golden_sentences() {
        let lex = golden_lexicon();
        assert_eq!(
            surfaces(&segment("物件毋通掖甲一四界", &lex)),
            ["物件", "毋通", "掖", "甲", "一四界"]
        );
        assert_eq!(
            surfaces(&segment("你毋通佮伊計較", &lex)),
            ["你", "毋通", "佮", "伊", "計較"]
        );
        let seg = segment("你一月日趁偌濟錢？", &lex);
        assert_eq!(surfaces(&seg), ["你", "一月日", "趁", "偌濟", "錢", "？"]);
        assert_eq!(seg.display_line(false), "你,一月日,趁,偌濟,錢？");
    }

    #[test]
    fn empty_input() {
        assert!(segment("", &golden_lexicon()).tokens.is_empty());
    }

    #[test]
    fn pos_assignment() {
        let seg = segment("佮伊，嘛", &golden_lexicon());
        let pos: Vec<Pos> = seg.tokens.iter().map(|t| t.pos).collect();
        assert_eq!(pos, [Pos::Prep, Pos::Pron, Pos::Punct, Pos::Unk]);
        assert!(seg.tokens[3].fallback);
        assert!(seg.tokens.iter().all(|t| t.lang == Lang::Hok));
        assert_eq!(seg.display_line(true), "佮/PREP,伊/PRON，/PUNCT,嘛/UNK");
    }

    #[test]
    fn fewer_fallbacks_break_token_ties() {
        // 甲一 | 四 and 甲 | 一四 both give two tokens; only the second avoids fallbacks
        let lex = Lexicon::from_entries([
            LexiconEntry::new("甲一", Pos::N),
            LexiconEntry::new("一四", Pos::N),
            LexiconEntry::new("甲", Pos::Part),
        ]);
        assert_eq!(surfaces(&segment("甲一四", &lex)), ["甲", "一四"]);
    }

    #[test]
    fn longest_first_breaks_remaining_ties() {
        let lex = Lexicon::from_entries([
            LexiconEntry::new("甲一", Pos::N),
            LexiconEntry::new("一四", Pos::N),
            LexiconEntry::new("甲", Pos::Part),
            LexiconEntry::new("四", Pos::Num),
        ]);
        assert_eq!(surfaces(&segment("甲一四", &lex)), ["甲一", "四"]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tokens_tile_input(s in "[物件毋通掖甲一四界你月日趁偌濟錢佮伊計較，。？a ]{0,30}") {
                let lex = golden_lexicon();
                let seg = segment(&s, &lex);
                prop_assert_eq!(seg.text(), s.clone());
                let mut at = 0;
                for t in &seg.tokens {
                    prop_assert_eq!(t.start, at);
                    prop_assert!(t.end > t.start);
                    prop_assert_eq!(t.surface.chars().count(), t.end - t.start);
                    prop_assert_eq!(t.pos == Pos::Punct, t.surface.chars().all(is_punctuation));
                    if t.char_len() > 1 {
                        prop_assert!(lex.contains(&t.surface));
                    }
                    at = t.end;
                }
                prop_assert_eq!(at, s.chars().count());
                prop_assert_eq!(segment(&s, &lex), seg);
            }
        }
    }
}
