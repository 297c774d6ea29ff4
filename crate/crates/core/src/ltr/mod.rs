//! Min-max normalization, pairwise linear ranking model and ranking.

mod folds;
mod train;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use folds::{chronological_folds, FoldSpec};
pub use train::{fit, fit_or_uniform, pairwise_accuracy, TrainConfig, TrainingInstance};

use crate::corpus::FileId;
use crate::features::{Feature, FeatureVector};
use crate::report::Category;
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    /// Constant feature: every normalized value is 0.
    pub fn is_degenerate(&self) -> bool {
        self.min >= self.max
    }

    pub fn normalize(&self, v: f64) -> f64 {
        if self.is_degenerate() || v <= self.min {
            0.0
        } else if v >= self.max {
            1.0
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }
}

/// Observed (min, max) of each feature over the vectors.
pub fn compute_bounds<'a>(
    features: &[Feature],
    vectors: impl IntoIterator<Item = &'a FeatureVector>,
) -> BTreeMap<Feature, Bounds> {
    let mut out: BTreeMap<Feature, Bounds> = features
        .iter()
        .map(|&f| {
            (
                f,
                Bounds {
                    min: f64::INFINITY,
                    max: f64::NEG_INFINITY,
                },
            )
        })
        .collect();
    for v in vectors {
        for (f, b) in out.iter_mut() {
            let x = v.get(*f);
            b.min = b.min.min(x);
            b.max = b.max.max(x);
        }
    }
    for b in out.values_mut() {
        if !b.min.is_finite() || !b.max.is_finite() {
            *b = Bounds { min: 0.0, max: 0.0 };
        }
    }
    out
}

/// Normalize the active features of `raw`, in `active` order.
pub fn normalize(raw: &FeatureVector, active: &[Feature], bounds: &BTreeMap<Feature, Bounds>) -> Vec<f64> {
    active
        .iter()
        .map(|f| bounds.get(f).map_or(0.0, |b| b.normalize(raw.get(*f))))
        .collect()
}

/// Feature subset used when none is configured.
pub fn default_features(category: Category) -> Vec<Feature> {
    match category {
        Category::PE | Category::ST => vec![Feature::F3, Feature::F1, Feature::F2],
        Category::NL => vec![Feature::F3, Feature::F1],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryModel {
    pub active_features: Vec<Feature>,
    pub weights: Vec<f64>,
    pub bounds: BTreeMap<Feature, Bounds>,
    pub hyperparams: TrainConfig,
    #[serde(default)]
    pub fold: Option<usize>,
}

impl CategoryModel {
    /// Fixed weights over `active_features` with the given bounds.
    pub fn with_weights(active_features: Vec<Feature>, weights: Vec<f64>, bounds: BTreeMap<Feature, Bounds>) -> Self {
        CategoryModel {
            active_features,
            weights,
            bounds,
            hyperparams: TrainConfig::default(),
            fold: None,
        }
    }

    pub fn score(&self, raw: &FeatureVector) -> f64 {
        normalize(raw, &self.active_features, &self.bounds)
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    fn check(&self, category: &str) -> Result<()> {
        if self.weights.len() != self.active_features.len() {
            return Err(Error::Config(format!(
                "{category}: {} weights for {} active features",
                self.weights.len(),
                self.active_features.len()
            )));
        }
        if let Some(f) = self.active_features.iter().find(|f| !self.bounds.contains_key(f)) {
            return Err(Error::Config(format!("{category}: no bounds for {f}")));
        }
        if self.bounds.values().any(|b| !(b.min <= b.max)) {
            return Err(Error::Config(format!("{category}: bounds with min > max")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingModel {
    pub format_version: u32,
    pub per_category: BTreeMap<Category, CategoryModel>,
}

impl Default for RankingModel {
    fn default() -> Self {
        RankingModel {
            format_version: MODEL_FORMAT_VERSION,
            per_category: BTreeMap::new(),
        }
    }
}

impl RankingModel {
    pub fn category(&self, category: Category) -> Result<&CategoryModel> {
        self.per_category
            .get(&category)
            .ok_or_else(|| Error::MissingCategoryModel(category.to_string()))
    }

    pub fn score(&self, raw: &FeatureVector, category: Category) -> Result<f64> {
        Ok(self.category(category)?.score(raw))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: RankingModel = serde_json::from_str(text).map_err(|e| Error::json("model", e))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                what: "model".into(),
                found: model.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        for (c, m) in &model.per_category {
            m.check(c.as_str())?;
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFile {
    pub file_id: FileId,
    pub path: String,
    pub score: f64,
}

/// One file to be ranked.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub file_id: FileId,
    pub path: &'a str,
    pub features: &'a FeatureVector,
}

/// Sort by score descending; ties go to the higher raw f1, then the smaller path.
pub fn rank(model: &CategoryModel, candidates: &[Candidate<'_>]) -> Vec<RankedFile> {
    let mut scored: Vec<(f64, &Candidate<'_>)> = candidates.iter().map(|c| (model.score(c.features), c)).collect();
    scored.sort_by(|(sa, a), (sb, b)| {
        sb.partial_cmp(sa)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.features.f1_class_match.total_cmp(&a.features.f1_class_match))
            .then_with(|| a.path.cmp(b.path))
            .then_with(|| a.file_id.cmp(&b.file_id))
    });
    scored
        .into_iter()
        .map(|(score, c)| RankedFile {
            file_id: c.file_id,
            path: c.path.to_string(),
            score,
        })
        .collect()
}
