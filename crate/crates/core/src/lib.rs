//! Hokkien–Mandarin code-mixing toolkit.
//!
//! Lexicon loading, text normalization, dictionary-lattice segmentation with
//! phrase chunking, constraint-driven code-mixed synthesis, CMI/SPF metrics,
//! model-training data preparation and human-evaluation bookkeeping.

pub mod annotation;
pub mod lang;
pub mod lexicon;
pub mod metrics;
pub mod modelprep;
pub mod normalizer;
pub mod script;
pub mod segmenter;
pub mod synthesizer;

pub use lang::{Lang, LangTag};
pub use lexicon::{Flag, Flags, Lexicon, LexiconEntry, LexiconError, Pos};
pub use segmenter::{analyze, segment, SegmentedSentence, Token};
pub use synthesizer::{CodeMixedSentence, Mode};
