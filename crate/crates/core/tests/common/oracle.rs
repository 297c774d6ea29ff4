//! Reference implementations written from the definitions, independent of the crate internals.

use std::collections::{BTreeMap, HashSet};

use faultline_core::corpus::stopwords::{ENGLISH, JAVA_KEYWORDS};

pub fn oracle_tokens(text: &str) -> Vec<String> {
    let stop: HashSet<&str> = ENGLISH.iter().chain(JAVA_KEYWORDS).copied().collect();
    let keep = |t: &str| t.chars().count() >= 2 && !stop.contains(t);
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
            continue;
        }
        let w = word.trim_matches('_').to_string();
        word.clear();
        if w.is_empty() {
            continue;
        }
        let mut parts: Vec<String> = Vec::new();
        for piece in w.split('_').filter(|p| !p.is_empty()) {
            let chars: Vec<char> = piece.chars().collect();
            let mut cur = String::new();
            for (i, &ch) in chars.iter().enumerate() {
                if i > 0 && ch.is_uppercase() && (chars[i - 1].is_lowercase() || chars[i - 1].is_ascii_digit()) {
                    parts.push(std::mem::take(&mut cur));
                }
                cur.push(ch);
            }
            parts.push(cur);
        }
        let mut emit = vec![w.to_lowercase()];
        if parts.len() > 1 {
            emit.extend(parts.iter().map(|p| p.to_lowercase()));
        }
        out.extend(emit.into_iter().filter(|t| keep(t)));
    }
    out
}

pub fn counts(text: &str) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for t in oracle_tokens(text) {
        *m.entry(t).or_insert(0.0) += 1.0;
    }
    m
}

pub struct Oracle {
    idf: BTreeMap<String, f64>,
}

impl Oracle {
    pub fn new(texts: &[&str]) -> Self {
        let n = texts.len() as f64;
        let mut df: BTreeMap<String, f64> = BTreeMap::new();
        for t in texts {
            for tok in counts(t).into_keys() {
                *df.entry(tok).or_insert(0.0) += 1.0;
            }
        }
        Oracle {
            idf: df.into_iter().map(|(t, d)| (t, (n / d).ln())).collect(),
        }
    }

    pub fn vec(&self, tf: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
        tf.iter()
            .filter_map(|(t, c)| self.idf.get(t).map(|i| (t.clone(), c * i)))
            .collect()
    }

    pub fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
        let dot: f64 = a.iter().map(|(t, x)| x * b.get(t).unwrap_or(&0.0)).sum();
        let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            dot / (na * nb)
        }
    }
}

/// Brute-force reciprocal rank: scan every position.
pub fn rr(ranked: &[String], relevant: &HashSet<String>) -> f64 {
    let mut best = 0.0;
    for (i, f) in ranked.iter().enumerate() {
        if relevant.contains(f) {
            let v = 1.0 / (i + 1) as f64;
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Brute-force average precision: precision at every relevant position over |relevant|.
pub fn ap(ranked: &[String], relevant: &HashSet<String>) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 0..ranked.len() {
        if relevant.contains(&ranked[k]) {
            let hits = ranked[..=k].iter().filter(|f| relevant.contains(*f)).count();
            total += hits as f64 / (k + 1) as f64;
        }
    }
    total / relevant.len() as f64
}

pub fn hit(ranked: &[String], relevant: &HashSet<String>, k: usize) -> bool {
    ranked.iter().take(k).any(|f| relevant.contains(f))
}

pub fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// One random (ranked list, relevant set) pair over a universe of 30 names.
/// Relevant sets may name files absent from the list.
pub fn metric_fixture(rng: &mut impl rand::Rng) -> (Vec<String>, HashSet<String>) {
    use rand::seq::SliceRandom;
    let mut universe: Vec<String> = (0..30).map(|i| format!("F{i}.java")).collect();
    universe.shuffle(rng);
    let len = rng.random_range(1..=30);
    let ranked = universe[..len].to_vec();
    universe.shuffle(rng);
    let k = rng.random_range(1..=5);
    let relevant = universe[..k].iter().cloned().collect();
    (ranked, relevant)
}

/// Queries of 20 files with features f1, f2, f3 drawn on different scales.
/// Relevance follows the hidden weights `w_star` over the unit-scaled values,
/// with a dead zone of `margin` around each query's median score.
pub fn synthetic_ranking_data(
    seed: u64,
    queries: usize,
    w_star: [f64; 3],
    margin: f64,
) -> Vec<faultline_core::ltr::TrainingInstance> {
    use faultline_core::features::FeatureVector;
    use faultline_core::ltr::TrainingInstance;
    use rand::{Rng, SeedableRng};
    let scale = [30.0, 100.0, 1.0];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for q in 0..queries {
        let files: Vec<[f64; 3]> = (0..20).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let score = |u: &[f64; 3]| u.iter().zip(&w_star).map(|(a, b)| a * b).sum::<f64>();
        let mut scores: Vec<f64> = files.iter().map(score).collect();
        scores.sort_by(f64::total_cmp);
        let median = (scores[9] + scores[10]) / 2.0;
        for (i, u) in files.iter().enumerate() {
            let s = score(u);
            if (s - median).abs() < margin {
                continue;
            }
            let mut v = FeatureVector::default();
            v.f1_class_match = u[0] * scale[0];
            v.f2_call_graph = u[1] * scale[1];
            v.f3_text_sim = u[2] * scale[2];
            out.push(TrainingInstance {
                query_id: format!("q{q}"),
                file: format!("F{i}"),
                features: v,
                relevant: s > median,
            });
        }
    }
    out
}
