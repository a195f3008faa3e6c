use crate::lexicon::{Lexicon, LexiconEntry};

/// What an arc stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind<'a> {
    /// A lexicon headword; senses in stored order.
    Word(&'a [LexiconEntry]),
    /// Single character with no lexicon entry.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc<'a> {
    pub end: usize,
    pub kind: ArcKind<'a>,
}

impl Arc<'_> {
    pub fn is_fallback(&self) -> bool {
        matches!(self.kind, ArcKind::Fallback)
    }
}

/// Word lattice over character offsets.
///
/// `arcs[i]` holds every arc starting at character `i`, sorted by end offset
/// descending (longest first). Every position has exactly one single-character
/// arc: the lexicon entry when the character is a headword, a fallback
/// otherwise.
#[derive(Debug, Clone)]
pub struct Lattice<'a> {
    chars: Vec<char>,
    byte_offsets: Vec<usize>,
    arcs: Vec<Vec<Arc<'a>>>,
}

impl<'a> Lattice<'a> {
    pub fn build(s: &str, lex: &'a Lexicon) -> Self {
        let chars: Vec<char> = s.chars().collect();
        let mut byte_offsets: Vec<usize> = s.char_indices().map(|(i, _)| i).collect();
        byte_offsets.push(s.len());
        let n = chars.len();
        let max_len = lex.max_headword_len();

        let arcs = (0..n)
            .map(|start| {
                let longest = max_len.min(n - start);
                let mut from_here: Vec<Arc<'a>> = (1..=longest)
                    .rev()
                    .filter_map(|len| {
                        let end = start + len;
                        let senses = lex.lookup(&s[byte_offsets[start]..byte_offsets[end]]);
                        (!senses.is_empty()).then_some(Arc {
                            end,
                            kind: ArcKind::Word(senses),
                        })
                    })
                    .collect();
                if from_here.last().is_none_or(|a| a.end != start + 1) {
                    from_here.push(Arc {
                        end: start + 1,
                        kind: ArcKind::Fallback,
                    });
                }
                from_here
            })
            .collect();

        Lattice {
            chars,
            byte_offsets,
            arcs,
        }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn arcs_from(&self, start: usize) -> &[Arc<'a>] {
        &self.arcs[start]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    /// All arcs as `(start, end, is_fallback)`, ordered by start then end.
    pub fn spans(&self) -> Vec<(usize, usize, bool)> {
        let mut out: Vec<_> = self
            .arcs
            .iter()
            .enumerate()
            .flat_map(|(start, arcs)| arcs.iter().map(move |a| (start, a.end, a.is_fallback())))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub(crate) fn byte_offsets(&self) -> &[usize] {
        &self.byte_offsets
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Pos;

    fn lex(words: &[&str]) -> Lexicon {
        Lexicon::from_entries(words.iter().map(|w| LexiconEntry::new(*w, Pos::N)))
    }

    /// Enumerates every substring and keeps headwords, plus one single-char
    /// arc per position.
    fn oracle(s: &str, lex: &Lexicon) -> Vec<(usize, usize, bool)> {
        let chars: Vec<char> = s.chars().collect();
        let mut out = Vec::new();
        for i in 0..chars.len() {
            for j in i + 1..=chars.len() {
                let sub: String = chars[i..j].iter().collect();
                if lex.contains(&sub) {
                    out.push((i, j, false));
                } else if j == i + 1 {
                    out.push((i, j, true));
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn mtong_arcs() {
        let lex = lex(&["毋通"]);
        let lattice = Lattice::build("毋通", &lex);
        assert_eq!(
            lattice.spans(),
            vec![(0, 1, true), (0, 2, false), (1, 2, true)]
        );
        assert_eq!(lattice.spans(), oracle("毋通", &lex));
    }

    #[test]
    fn unknown_single_char() {
        let empty = Lexicon::default();
        let lattice = Lattice::build("佮", &empty);
        assert_eq!(lattice.spans(), vec![(0, 1, true)]);
    }

    #[test]
    fn tsit_si_ke_has_four_arcs() {
        let lex = lex(&["一四界", "四"]);
        let lattice = Lattice::build("一四界", &lex);
        assert_eq!(lattice.arc_count(), 4);
        assert_eq!(lattice.spans(), oracle("一四界", &lex));
    }

    #[test]
    fn matches_enumeration_oracle() {
        let lex = lex(&["物件", "毋通", "一四界", "一", "四界", "掖甲"]);
        for s in ["物件毋通掖甲一四界", "一一四界四", "界四一", ""] {
            assert_eq!(Lattice::build(s, &lex).spans(), oracle(s, &lex), "{s}");
        }
    }
}
