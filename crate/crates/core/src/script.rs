//! Character classes shared by the normalizer, segmenter and renderers.

/// Suffix marking a Hokkien character in rendered output and vocabularies.
pub const HOK_SUFFIX: &str = "_@";

/// Punctuation in the ASCII, general, CJK and fullwidth blocks. Whitespace is
/// treated as punctuation so that it always segments as its own token.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || c.is_whitespace()
        || matches!(c,
            '\u{2000}'..='\u{206F}'
            | '\u{3000}'..='\u{303F}'
            | '\u{FE10}'..='\u{FE1F}'
            | '\u{FE30}'..='\u{FE4F}'
            | '\u{FF01}'..='\u{FF0F}'
            | '\u{FF1A}'..='\u{FF20}'
            | '\u{FF3B}'..='\u{FF40}'
            | '\u{FF5B}'..='\u{FF65}'
            | '\u{00A1}' | '\u{00A7}' | '\u{00AB}' | '\u{00B6}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}')
}

pub fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || ('\u{FF10}'..='\u{FF19}').contains(&c)
}

/// Characters that belong to neither language: punctuation and digits.
pub fn is_language_independent(c: char) -> bool {
    is_punctuation(c) || is_digit(c)
}

/// Latin letters, including the extended blocks Tai-lo and POJ draw from.
pub fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c,
            '\u{00C0}'..='\u{00D6}'
            | '\u{00D8}'..='\u{00F6}'
            | '\u{00F8}'..='\u{024F}'
            | '\u{0250}'..='\u{02AF}'
            | '\u{1E00}'..='\u{1EFF}'
            | '\u{207F}')
}

/// Combining diacritics used for Tai-lo tone marks (and POJ's dot above right).
pub fn is_combining_mark(c: char) -> bool {
    matches!(c, '\u{0300}'..='\u{036F}')
}

pub fn is_roman_numeral(c: char) -> bool {
    ('\u{2160}'..='\u{2188}').contains(&c)
}

/// Characters that can continue a romanized run once it has started.
pub(crate) fn continues_latin_run(c: char) -> bool {
    is_latin_letter(c) || is_combining_mark(c) || c == '-'
}

/// Byte ranges of maximal romanized runs: a Latin letter followed by any
/// letters, combining marks or hyphens. Trailing hyphens are not part of a run.
pub fn latin_runs(s: &str) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut iter = s.char_indices().peekable();
    while let Some((start, c)) = iter.next() {
        if !is_latin_letter(c) {
            continue;
        }
        let mut last_non_hyphen = start + c.len_utf8();
        while let Some(&(i, next)) = iter.peek() {
            if !continues_latin_run(next) {
                break;
            }
            if next != '-' {
                last_non_hyphen = i + next.len_utf8();
            }
            iter.next();
        }
        runs.push(start..last_non_hyphen);
    }
    runs
}
