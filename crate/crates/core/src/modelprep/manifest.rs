use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelPrepError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelName {
    #[serde(rename = "XLM_M-M")]
    MM,
    #[serde(rename = "XLM_MT-M")]
    MtM,
    #[serde(rename = "XLM_MT-C")]
    MtC,
    #[serde(rename = "XLM_MT-CT")]
    MtCt,
}

impl ModelName {
    pub const ALL: [ModelName; 4] = [
        ModelName::MM,
        ModelName::MtM,
        ModelName::MtC,
        ModelName::MtCt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::MM => "XLM_M-M",
            ModelName::MtM => "XLM_MT-M",
            ModelName::MtC => "XLM_MT-C",
            ModelName::MtCt => "XLM_MT-CT",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = ModelPrepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ModelPrepError::UnknownModel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Objective {
    Clm,
    Mlm,
    Tlm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Scratch,
    PreviousStage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub objectives: Vec<Objective>,
    pub corpora: Vec<String>,
    pub init: Init,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageManifest {
    pub model: ModelName,
    pub stages: Vec<Stage>,
}

fn stage(objectives: &[Objective], corpora: &[&str], init: Init) -> Stage {
    Stage {
        objectives: objectives.to_vec(),
        corpora: corpora.iter().map(|c| c.to_string()).collect(),
        init,
    }
}

/// Declarative training schedule for one of the XLM variants.
pub fn emit_stage_manifest(model: ModelName) -> StageManifest {
    use Init::*;
    use Objective::*;
    let mono_zh = stage(&[Mlm], &["ZH"], Scratch);
    let joint = |init| stage(&[Clm, Mlm], &["ZH", "HOK"], init);
    let tlm_hok = stage(&[Tlm], &["HOK-ZH"], PreviousStage);
    let tlm_cm = stage(&[Tlm], &["CM-ZH"], PreviousStage);
    let stages = match model {
        ModelName::MM => vec![joint(Scratch), tlm_hok],
        ModelName::MtM => vec![mono_zh, joint(PreviousStage), tlm_hok],
        ModelName::MtC => vec![mono_zh, joint(PreviousStage), tlm_cm],
        ModelName::MtCt => vec![mono_zh, joint(PreviousStage), tlm_hok, tlm_cm],
    };
    StageManifest { model, stages }
}
