//! Flat X-bar style chunking.
//!
//! Noun phrases are found right to left: every nominal head (N or a proper
//! noun) claims the contiguous run of DET/NUM/CLF/ADJ/N modifiers to its left.
//! A preposition then takes the following NP (or pronoun) as its complement,
//! and a verb takes a following NP as its object. A verb with no NP object
//! still projects a head-only VP.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{SegmentedSentence, Token};
use crate::lexicon::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChunkKind {
    #[serde(rename = "NP")]
    Np,
    #[serde(rename = "VP")]
    Vp,
    #[serde(rename = "PP")]
    Pp,
}

/// A phrase over token indices `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub kind: ChunkKind,
    pub start: usize,
    pub end: usize,
    /// The phrase head: the noun of an NP, the verb of a VP, the preposition of
    /// a PP.
    pub head: usize,
    /// Head of the NP inside this chunk (the chunk's own head for an NP).
    pub noun_head: Option<usize>,
}

impl Chunk {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

fn is_np_modifier(pos: Pos) -> bool {
    matches!(pos, Pos::Det | Pos::Num | Pos::Clf | Pos::Adj | Pos::N)
}

fn noun_phrases(tokens: &[Token]) -> Vec<Chunk> {
    let mut nps = Vec::new();
    let mut i = tokens.len();
    while i > 0 {
        let head = i - 1;
        if !tokens[head].pos.is_nominal_head() {
            i -= 1;
            continue;
        }
        let mut start = head;
        while start > 0 && is_np_modifier(tokens[start - 1].pos) {
            start -= 1;
        }
        nps.push(Chunk {
            kind: ChunkKind::Np,
            start,
            end: head + 1,
            head,
            noun_head: Some(head),
        });
        i = start;
    }
    nps.reverse();
    nps
}

/// Adds NP/VP/PP chunks to a tagged sentence. Chunks never overlap.
pub fn chunk_phrases(mut seg: SegmentedSentence) -> SegmentedSentence {
    let tokens = &seg.tokens;
    let mut nps: Vec<Option<Chunk>> = noun_phrases(tokens).into_iter().map(Some).collect();
    let np_starting_at = |nps: &[Option<Chunk>], at: usize| {
        nps.iter()
            .position(|np| np.is_some_and(|np| np.start == at))
    };

    let mut chunks = Vec::new();
    let mut claimed = vec![false; tokens.len()];

    for (p, token) in tokens.iter().enumerate() {
        if token.pos != Pos::Prep || p + 1 >= tokens.len() {
            continue;
        }
        let complement = if let Some(k) = np_starting_at(&nps, p + 1) {
            let np = nps[k].take().expect("present");
            Some((np.end, np.noun_head))
        } else if tokens[p + 1].pos == Pos::Pron {
            Some((p + 2, None))
        } else {
            None
        };
        if let Some((end, noun_head)) = complement {
            claimed[p..end].iter_mut().for_each(|c| *c = true);
            chunks.push(Chunk {
                kind: ChunkKind::Pp,
                start: p,
                end,
                head: p,
                noun_head,
            });
        }
    }

    for (v, token) in tokens.iter().enumerate() {
        if token.pos != Pos::V || claimed[v] {
            continue;
        }
        let (end, noun_head) = match np_starting_at(&nps, v + 1) {
            Some(k) => {
                let np = nps[k].take().expect("present");
                (np.end, np.noun_head)
            }
            None => (v + 1, None),
        };
        claimed[v..end].iter_mut().for_each(|c| *c = true);
        chunks.push(Chunk {
            kind: ChunkKind::Vp,
            start: v,
            end,
            head: v,
            noun_head,
        });
    }

    chunks.extend(nps.into_iter().flatten());
    chunks.sort_by_key(|c| c.start);
    seg.chunks = chunks;
    seg
}
