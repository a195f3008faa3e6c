use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelPrepError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratios: (u32, u32, u32),
    pub seed: u64,
    pub pad_ids: BTreeSet<String>,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            ratios: (8, 1, 1),
            seed: 0,
            pad_ids: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub valid: Vec<T>,
    pub test: Vec<T>,
    pub pad: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub seed: u64,
    pub ratios: (u32, u32, u32),
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub pad: usize,
}

/// Target sizes: floor shares, then leftovers one each to train, valid, test.
fn partition_sizes(n: usize, ratios: (u32, u32, u32)) -> [usize; 3] {
    let r = [ratios.0 as usize, ratios.1 as usize, ratios.2 as usize];
    let total: usize = r.iter().sum::<usize>().max(1);
    let mut sizes = r.map(|x| n * x / total);
    let mut left = n - sizes.iter().sum::<usize>();
    let mut k = 0;
    while left > 0 {
        if r[k % 3] > 0 {
            sizes[k % 3] += 1;
            left -= 1;
        }
        k += 1;
    }
    sizes
}

/// Pulls the PAD sentences out, shuffles the rest by seed and cuts it by the
/// ratios. Output order within each part follows the shuffle.
pub fn split_corpus<T, F>(
    corpus: Vec<T>,
    spec: &SplitSpec,
    id_of: F,
) -> Result<Split<T>, ModelPrepError>
where
    F: Fn(&T) -> &str,
{
    let mut seen = HashSet::with_capacity(corpus.len());
    for item in &corpus {
        let id = id_of(item);
        if !seen.insert(id.to_string()) {
            return Err(ModelPrepError::DuplicateId(id.to_string()));
        }
    }
    let missing: Vec<String> = spec
        .pad_ids
        .iter()
        .filter(|id| !seen.contains(id.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(ModelPrepError::UnknownPadIds(missing));
    }

    let (pad, mut rest): (Vec<T>, Vec<T>) = corpus
        .into_iter()
        .partition(|item| spec.pad_ids.contains(id_of(item)));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rest.shuffle(&mut rng);

    let [n_train, n_valid, _] = partition_sizes(rest.len(), spec.ratios);
    let mut rest = rest.into_iter();
    let train = rest.by_ref().take(n_train).collect();
    let valid = rest.by_ref().take(n_valid).collect();
    let test = rest.collect();
    Ok(Split {
        train,
        valid,
        test,
        pad,
    })
}

/// Writes `train.jsonl`, `valid.jsonl`, `test.jsonl`, `pad.jsonl` and
/// `split.meta.json` into `dir`.
pub fn write_split<T: Serialize>(
    split: &Split<T>,
    spec: &SplitSpec,
    dir: &Path,
) -> Result<SplitMeta, ModelPrepError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| ModelPrepError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for (name, part) in [
        ("train", &split.train),
        ("valid", &split.valid),
        ("test", &split.test),
        ("pad", &split.pad),
    ] {
        let path = dir.join(format!("{name}.jsonl"));
        let mut buf = Vec::new();
        for item in part {
            serde_json::to_writer(&mut buf, item)?;
            buf.push(b'\n');
        }
        std::fs::File::create(&path)
            .and_then(|mut f| f.write_all(&buf))
            .map_err(io(&path))?;
    }
    let meta = SplitMeta {
        seed: spec.seed,
        ratios: spec.ratios,
        train: split.train.len(),
        valid: split.valid.len(),
        test: split.test.len(),
        pad: split.pad.len(),
    };
    let path = dir.join("split.meta.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n").map_err(io(&path))?;
    Ok(meta)
}
