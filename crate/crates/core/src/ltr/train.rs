//! Pairwise hinge-loss training by stochastic subgradient descent.

use std::collections::BTreeMap;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{compute_bounds, normalize, CategoryModel};
use crate::features::{Feature, FeatureVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInstance {
    pub query_id: String,
    pub file: String,
    pub features: FeatureVector,
    pub relevant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Base step size; step t uses `learning_rate / sqrt(t)`.
    pub learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 0.01,
            epochs: 50,
            seed: 42,
            learning_rate: 0.1,
        }
    }
}

/// Difference vectors (relevant minus irrelevant) within each query.
fn pair_differences(normalized: &[(String, bool, Vec<f64>)]) -> Vec<Vec<f64>> {
    let mut by_query: BTreeMap<&str, (Vec<&[f64]>, Vec<&[f64]>)> = BTreeMap::new();
    for (q, rel, x) in normalized {
        let entry = by_query.entry(q.as_str()).or_default();
        if *rel {
            entry.0.push(x)
        } else {
            entry.1.push(x)
        }
    }
    let mut out = Vec::new();
    for (pos, neg) in by_query.values() {
        for p in pos {
            for n in neg {
                out.push(p.iter().zip(n.iter()).map(|(a, b)| a - b).collect());
            }
        }
    }
    out
}

/// Train one category model. Bounds come from `instances`; the objective is
/// `1/2 |w|^2 + C * sum(max(0, 1 - w.d))` over all pairwise differences `d`.
pub fn fit(instances: &[TrainingInstance], active: &[Feature], config: &TrainConfig) -> Result<CategoryModel> {
    if active.is_empty() {
        return Err(Error::Config("no active features".into()));
    }
    let bounds = compute_bounds(active, instances.iter().map(|i| &i.features));
    let normalized: Vec<(String, bool, Vec<f64>)> = instances
        .iter()
        .map(|i| (i.query_id.clone(), i.relevant, normalize(&i.features, active, &bounds)))
        .collect();
    let pairs = pair_differences(&normalized);
    if pairs.is_empty() || pairs.iter().all(|d| d.iter().all(|x| *x == 0.0)) {
        return Err(Error::TrainingDataDegenerate);
    }

    // Same minimizer as the objective above, divided by C * n.
    let lambda = 1.0 / (config.c * pairs.len() as f64);
    let mut w = vec![0.0; active.len()];
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut t = 0u64;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = config.learning_rate / (t as f64).sqrt();
            let d = &pairs[i];
            let margin: f64 = w.iter().zip(d).map(|(a, b)| a * b).sum();
            if margin < 1.0 {
                for (wk, dk) in w.iter_mut().zip(d) {
                    *wk += eta * dk;
                }
            }
            // implicit step on the regularizer keeps large lambda stable
            let shrink = 1.0 / (1.0 + eta * lambda);
            for wk in w.iter_mut() {
                *wk *= shrink;
            }
        }
    }
    Ok(CategoryModel {
        active_features: active.to_vec(),
        weights: w,
        bounds,
        hyperparams: *config,
        fold: None,
    })
}

/// [`fit`], falling back to uniform weights when the data has no usable pairs.
pub fn fit_or_uniform(
    instances: &[TrainingInstance],
    active: &[Feature],
    config: &TrainConfig,
) -> Result<CategoryModel> {
    match fit(instances, active, config) {
        Err(Error::TrainingDataDegenerate) => {
            warn!("no usable training pairs; using uniform weights over {active:?}");
            let bounds = compute_bounds(active, instances.iter().map(|i| &i.features));
            Ok(CategoryModel {
                active_features: active.to_vec(),
                weights: vec![1.0; active.len()],
                bounds,
                hyperparams: *config,
                fold: None,
            })
        }
        other => other,
    }
}

/// Fraction of (relevant, irrelevant) pairs within each query that the model
/// orders strictly correctly. `None` when there are no pairs.
pub fn pairwise_accuracy(model: &CategoryModel, instances: &[TrainingInstance]) -> Option<f64> {
    let mut by_query: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for i in instances {
        let s = model.score(&i.features);
        let e = by_query.entry(i.query_id.as_str()).or_default();
        if i.relevant {
            e.0.push(s)
        } else {
            e.1.push(s)
        }
    }
    let (mut good, mut total) = (0usize, 0usize);
    for (pos, neg) in by_query.values() {
        for p in pos {
            for n in neg {
                total += 1;
                good += usize::from(p > n);
            }
        }
    }
    (total > 0).then(|| good as f64 / total as f64)
}
