use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelPrepError, Vocab};

pub const DEFAULT_BASE_P: f64 = 0.15;
pub const DEFAULT_MULTIPLIER: f64 = 2.0;

/// Positions selected for masked-language-model corruption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskPlan {
    pub positions: BTreeSet<usize>,
    pub base_p: f64,
    pub priority_multiplier: f64,
}

/// Masks each non-special position with probability `base_p`, or
/// `multiplier * base_p` when it holds a Hokkien-only character.
pub fn plan_mlm_masks(
    seq: &[u32],
    vocab: &Vocab,
    base_p: f64,
    multiplier: f64,
    seed: u64,
) -> Result<MaskPlan, ModelPrepError> {
    if !(0.0..=1.0).contains(&base_p) {
        return Err(ModelPrepError::Domain(format!(
            "base_p {base_p} outside [0, 1]"
        )));
    }
    if multiplier.is_nan() || multiplier < 1.0 {
        return Err(ModelPrepError::Domain(format!(
            "multiplier {multiplier} below 1"
        )));
    }
    if multiplier * base_p > 1.0 {
        return Err(ModelPrepError::Domain(format!(
            "multiplier * base_p = {} exceeds 1",
            multiplier * base_p
        )));
    }
    let priority = vocab.priority_ids();
    let boosted = multiplier * base_p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = BTreeSet::new();
    for (i, &id) in seq.iter().enumerate() {
        // one draw per position keeps plans aligned across parameter changes
        let draw: f64 = rng.random();
        if vocab.is_special(id) {
            continue;
        }
        let p = if priority.contains(&id) {
            boosted
        } else {
            base_p
        };
        if draw < p {
            positions.insert(i);
        }
    }
    Ok(MaskPlan {
        positions,
        base_p,
        priority_multiplier: multiplier,
    })
}
