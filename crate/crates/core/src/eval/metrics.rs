//! Top@K, MRR and MAP over ranked lists.

use std::collections::HashSet;
use std::hash::Hash;

use crate::{Error, Result};

/// 1-based position of the first relevant item.
pub fn first_relevant_rank<I: Eq + Hash>(ranked: &[I], relevant: &HashSet<I>) -> Option<usize> {
    ranked.iter().position(|x| relevant.contains(x)).map(|p| p + 1)
}

pub fn reciprocal_rank<I: Eq + Hash>(ranked: &[I], relevant: &HashSet<I>) -> f64 {
    first_relevant_rank(ranked, relevant).map_or(0.0, |r| 1.0 / r as f64)
}

/// Mean of Prec@k over the positions of relevant items. Relevant items
/// missing from `ranked` add nothing but still count in the denominator.
pub fn average_precision<I: Eq + Hash>(ranked: &[I], relevant: &HashSet<I>) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, x) in ranked.iter().enumerate() {
        if relevant.contains(x) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len() as f64
}

pub fn hit_at_k<I: Eq + Hash>(ranked: &[I], relevant: &HashSet<I>, k: usize) -> bool {
    ranked.iter().take(k).any(|x| relevant.contains(x))
}

fn check<I>(ranked: &[Vec<I>], relevant: &[HashSet<I>]) -> Result<usize> {
    if ranked.len() != relevant.len() {
        return Err(Error::Config(format!(
            "{} ranked lists but {} relevant sets",
            ranked.len(),
            relevant.len()
        )));
    }
    if ranked.is_empty() {
        return Err(Error::EmptyEvaluation("no reports to score".into()));
    }
    Ok(ranked.len())
}

/// Fraction of reports with a relevant item in the first `k` positions.
pub fn top_k<I: Eq + Hash>(ranked: &[Vec<I>], relevant: &[HashSet<I>], k: usize) -> Result<f64> {
    let n = check(ranked, relevant)?;
    let hits = ranked.iter().zip(relevant).filter(|(r, s)| hit_at_k(r, s, k)).count();
    Ok(hits as f64 / n as f64)
}

pub fn mrr<I: Eq + Hash>(ranked: &[Vec<I>], relevant: &[HashSet<I>]) -> Result<f64> {
    let n = check(ranked, relevant)?;
    Ok(ranked
        .iter()
        .zip(relevant)
        .map(|(r, s)| reciprocal_rank(r, s))
        .sum::<f64>()
        / n as f64)
}

pub fn map<I: Eq + Hash>(ranked: &[Vec<I>], relevant: &[HashSet<I>]) -> Result<f64> {
    let n = check(ranked, relevant)?;
    Ok(ranked
        .iter()
        .zip(relevant)
        .map(|(r, s)| average_precision(r, s))
        .sum::<f64>()
        / n as f64)
}
