//! Forward greedy search with parallel candidate evaluation.
//!
//! The outer loop is sequential. Each iteration scores every candidate
//! concurrently, then takes the best one (lowest ordinal on ties) if it beats
//! the incumbent by more than the threshold.

mod fss;

use rayon::prelude::*;
use thiserror::Error;

pub use fss::{fss_score, FssError, FssProblem, FssState, FOLDS, LAPLACE};

/// Improvement required to accept a candidate when none is given.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub item: T,
    pub score: f64,
    /// Position in the iteration's candidate list.
    pub ordinal: usize,
}

pub trait GreedyProblem: Sync {
    type Item: Clone + Send + Sync;
    type State: Clone + Send + Sync;
    type Error: Send;

    fn empty_state(&self) -> Self::State;

    fn candidates(&self, state: &Self::State) -> Vec<Self::Item>;

    /// Score of `state` extended by `item`. Must not depend on anything but
    /// its arguments and the problem's own data.
    fn evaluate(&self, state: &Self::State, item: &Self::Item) -> Result<f64, Self::Error>;

    fn update_best(&self, state: &mut Self::State, accepted: &Candidate<Self::Item>);
}

#[derive(Debug, Error, PartialEq)]
pub enum GreedyError<E> {
    #[error("evaluating candidate {ordinal} failed: {error}")]
    Evaluation { ordinal: usize, error: E },

    #[error("candidate {ordinal} scored {score}")]
    NonFiniteScore { ordinal: usize, score: f64 },

    #[error("threshold must be finite and non-negative, got {0}")]
    InvalidThreshold(f64),
}

/// Best candidate if it beats `incumbent + threshold`, else `None`.
pub fn select_best<T>(
    candidates: &[Candidate<T>],
    incumbent: f64,
    threshold: f64,
) -> Option<&Candidate<T>> {
    let best = candidates.iter().reduce(|best, c| {
        if c.score > best.score || (c.score == best.score && c.ordinal < best.ordinal) {
            c
        } else {
            best
        }
    })?;
    (best.score > incumbent + threshold).then_some(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S, T> {
    pub state: S,
    /// Accepted candidates in order.
    pub trace: Vec<Candidate<T>>,
    /// Score of the last accepted candidate, negative infinity if none.
    pub score: f64,
}

pub fn greedy_search<P: GreedyProblem>(
    problem: &P,
    threshold: f64,
    workers: usize,
) -> Result<SearchResult<P::State, P::Item>, GreedyError<P::Error>> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(GreedyError::InvalidThreshold(threshold));
    }
    crate::pool::with_workers(workers, || {
        let mut state = problem.empty_state();
        let mut trace = Vec::new();
        let mut incumbent = f64::NEG_INFINITY;
        loop {
            let items = problem.candidates(&state);
            let scores: Vec<Result<f64, P::Error>> = items
                .par_iter()
                .map(|item| problem.evaluate(&state, item))
                .collect();
            let mut evaluated = Vec::with_capacity(items.len());
            for (ordinal, (item, score)) in items.into_iter().zip(scores).enumerate() {
                let score = score.map_err(|error| GreedyError::Evaluation { ordinal, error })?;
                if !score.is_finite() {
                    return Err(GreedyError::NonFiniteScore { ordinal, score });
                }
                evaluated.push(Candidate { item, score, ordinal });
            }
            let Some(best) = select_best(&evaluated, incumbent, threshold) else {
                break;
            };
            problem.update_best(&mut state, best);
            incumbent = best.score;
            trace.push(best.clone());
        }
        Ok(SearchResult {
            state,
            trace,
            score: incumbent,
        })
    })
}
