//! Shot-reduction figures of merit and shot allocation across collections.

use crate::error::{Error, Result};
use crate::grouping::Grouping;
use crate::oracle::{collection_variance, term_variance, StateVector};

/// Distribution of a measurement budget across collections.
#[derive(Clone, Debug, PartialEq)]
pub struct Allocation {
    /// Nonnegative, summing to one.
    pub fractions: Vec<f64>,
    /// Integer shots per collection when a budget was given.
    pub shots: Option<Vec<u64>>,
}

impl Allocation {
    /// Normalizes `weights` and, with a budget, rounds by largest remainder.
    pub fn from_weights(weights: &[f64], budget: Option<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invalid("no collections to allocate".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Invalid(
                "allocation weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Invalid("all allocation weights are zero".into()));
        }
        let fractions: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let shots = budget.map(|b| largest_remainder(&fractions, b));
        Ok(Self { fractions, shots })
    }
}

/// Integer split of `budget` proportional to `fractions`; leftover shots go
/// to the largest fractional parts, earlier index first on ties.
pub fn largest_remainder(fractions: &[f64], budget: u64) -> Vec<u64> {
    let exact: Vec<f64> = fractions.iter().map(|f| f * budget as f64).collect();
    let mut shots: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = shots.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(budget.saturating_sub(assigned) as usize) {
        shots[i] += 1;
    }
    shots
}

/// Estimated shot reduction `(Σ|c| / Σ_i sqrt(Σ_j c_ij²))²`.
pub fn r_hat(g: &Grouping) -> Result<f64> {
    if g.collections.is_empty() {
        return Err(Error::Invalid("empty grouping".into()));
    }
    let num: f64 = g.terms().map(|t| t.coeff.abs()).sum();
    let den: f64 = g
        .collections
        .iter()
        .map(|c| c.terms().map(|t| t.coeff * t.coeff).sum::<f64>().sqrt())
        .sum();
    Ok((num / den).powi(2))
}

/// Allocation minimizing `Σ Var_i / n_i`: `n_i ∝ sqrt(Var_i)`.
pub fn optimal_allocation(variances: &[f64], budget: Option<u64>) -> Result<Allocation> {
    if variances.iter().any(|v| *v < 0.0) {
        return Err(Error::Invalid("variances must be nonnegative".into()));
    }
    let w: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    Allocation::from_weights(&w, budget)
}

/// State-independent allocation `n_i ∝ sqrt(m_i Σ_j c_ij²)`.
pub fn heuristic_allocation(g: &Grouping, budget: Option<u64>) -> Result<Allocation> {
    let w: Vec<f64> = g
        .collections
        .iter()
        .map(|c| {
            (c.members.len() as f64 * c.terms().map(|t| t.coeff * t.coeff).sum::<f64>()).sqrt()
        })
        .collect();
    Allocation::from_weights(&w, budget)
}

/// True shot reduction of a grouping relative to measuring every term alone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrueR {
    pub r: f64,
    /// Set when every variance vanishes; `r` is then 1 by convention.
    pub degenerate: bool,
}

/// `R = (Σ|c_i| σ(P_i))² / (Σ_groups σ(O_group))²`, both sides optimally allocated.
pub fn true_r(g: &Grouping, state: &StateVector) -> Result<TrueR> {
    if state.n() != g.n {
        return Err(Error::SizeMismatch {
            expected: g.n,
            found: state.n(),
        });
    }
    let mut num = 0.0;
    for t in g.terms() {
        num += t.coeff.abs() * term_variance(state, &t.op)?.sqrt();
    }
    let mut den = 0.0;
    for c in &g.collections {
        den += collection_variance(state, c)?.sqrt();
    }
    const EPS: f64 = 1e-24;
    if num * num <= EPS && den * den <= EPS {
        return Ok(TrueR {
            r: 1.0,
            degenerate: true,
        });
    }
    Ok(TrueR {
        r: (num / den).powi(2),
        degenerate: false,
    })
}
