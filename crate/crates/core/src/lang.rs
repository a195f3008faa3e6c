use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Language of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Lang {
    Hok,
    Zh,
}

/// Per-token language tag used by the metrics; `Other` covers punctuation and
/// digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LangTag {
    Hok,
    Zh,
    Other,
}

impl From<Lang> for LangTag {
    fn from(lang: Lang) -> Self {
        match lang {
            Lang::Hok => LangTag::Hok,
            Lang::Zh => LangTag::Zh,
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lang::Hok => "HOK",
            Lang::Zh => "ZH",
        })
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "HOK" | "hok" => Ok(Lang::Hok),
            "ZH" | "zh" => Ok(Lang::Zh),
            other => Err(format!("unknown language `{other}`")),
        }
    }
}
