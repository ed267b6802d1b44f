//! Pauli grouping: sorted insertion (general or qubit-wise commuting),
//! hardware-tailored greedy grouping over circuit templates, its
//! support-local variant, and completion of a commuting set to a full
//! stabilizer group.

use std::collections::HashSet;

use f2la::{null_space, rref, BitMatrix, BitVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hwgraph::{induced, subgraphs_sample, Graph};
use crate::pauli::{CliffordLayer, PauliOp, PauliTerm, SignedZ};
use crate::synth::{diagonalize_target, satisfies, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "si")]
    Si,
    #[serde(rename = "si-qwc")]
    SiQwc,
    #[serde(rename = "ht")]
    Ht,
    #[serde(rename = "ht-local")]
    HtLocal,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Si => "si",
            Method::SiQwc => "si-qwc",
            Method::Ht => "ht",
            Method::HtLocal => "ht-local",
        }
    }
}

/// Pairwise relation used by sorted insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// General commutation.
    Gc,
    /// Qubit-wise commutation.
    Qwc,
}

impl Predicate {
    fn holds(self, a: &PauliOp, b: &PauliOp) -> bool {
        match self {
            Predicate::Gc => a.commutes_with(b),
            Predicate::Qwc => a.qwc_with(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ValueFn {
    /// Number of members.
    #[serde(rename = "size")]
    Size,
    /// Number of members times the sum of squared coefficients.
    #[serde(rename = "weighted")]
    #[default]
    SizeWeighted,
}

impl ValueFn {
    pub fn eval(self, members: &[&PauliTerm]) -> f64 {
        let m = members.len() as f64;
        match self {
            ValueFn::Size => m,
            ValueFn::SizeWeighted => m * members.iter().map(|t| t.coeff * t.coeff).sum::<f64>(),
        }
    }
}

/// Template and layer of a collection's readout circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Readout {
    pub template: Graph,
    pub layer: CliffordLayer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub term: PauliTerm,
    /// `sign * Z^k` after the readout circuit; absent without a circuit.
    pub target: Option<SignedZ>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Collection {
    pub readout: Option<Readout>,
    pub members: Vec<Member>,
}

impl Collection {
    pub fn terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.members.iter().map(|m| &m.term)
    }

    pub fn coeffs(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.term.coeff).collect()
    }

    /// Collection without a circuit.
    pub fn bare(terms: Vec<PauliTerm>) -> Self {
        Self {
            readout: None,
            members: terms
                .into_iter()
                .map(|term| Member { term, target: None })
                .collect(),
        }
    }

    /// Collection with a readout circuit; computes every member's target.
    pub fn with_readout(
        template: Graph,
        layer: CliffordLayer,
        terms: Vec<PauliTerm>,
    ) -> Result<Self> {
        let members = terms
            .into_iter()
            .map(|term| {
                let target = diagonalize_target(&layer, &template, &term.op)?;
                Ok(Member {
                    term,
                    target: Some(target),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            readout: Some(Readout { template, layer }),
            members,
        })
    }
}

/// Settings recorded alongside a grouping.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupingConfig {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subgraphs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cutoff: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Templates were redrawn every round.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub repick: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<ValueFn>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grouping {
    pub n: usize,
    pub method: Method,
    pub config: GroupingConfig,
    /// Coefficient of the identity term, which is never measured.
    pub offset: f64,
    pub collections: Vec<Collection>,
}

impl Grouping {
    pub fn num_terms(&self) -> usize {
        self.collections.iter().map(|c| c.members.len()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.collections.iter().map(|c| c.members.len()).collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.collections.iter().flat_map(|c| c.terms())
    }

    /// Drops the listed operators; collections left empty are removed.
    pub fn without(&self, drop: &HashSet<PauliOp>) -> Grouping {
        let collections = self
            .collections
            .iter()
            .filter_map(|c| {
                let members: Vec<Member> = c
                    .members
                    .iter()
                    .filter(|m| !drop.contains(&m.term.op))
                    .cloned()
                    .collect();
                (!members.is_empty()).then(|| Collection {
                    readout: c.readout.clone(),
                    members,
                })
            })
            .collect();
        Grouping {
            collections,
            ..self.clone()
        }
    }

    /// Fills in readouts on the empty template for collections that lack one.
    /// Succeeds only when every such collection is qubit-wise commuting.
    pub fn with_tpb_readouts(&self) -> Result<Grouping> {
        let mut out = self.clone();
        for col in out.collections.iter_mut().filter(|c| c.readout.is_none()) {
            let terms: Vec<PauliTerm> = col.terms().cloned().collect();
            *col = tpb_collection(self.n, terms)?;
        }
        Ok(out)
    }
}

/// Stable order by decreasing `|c|`; equal magnitudes keep input order.
pub fn sorted_by_magnitude(terms: &[PauliTerm]) -> Vec<PauliTerm> {
    let mut sorted = terms.to_vec();
    sorted.sort_by(|a, b| b.coeff.abs().total_cmp(&a.coeff.abs()));
    sorted
}

fn check_terms(terms: &[PauliTerm]) -> Result<usize> {
    let n = terms.first().map_or(0, |t| t.op.n());
    for t in terms {
        if t.op.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: t.op.n(),
            });
        }
        if !t.coeff.is_finite() || t.coeff == 0.0 {
            return Err(Error::Invalid(format!(
                "coefficient {} of {} must be finite and nonzero",
                t.coeff, t.op
            )));
        }
    }
    Ok(n)
}

/// Sorted insertion: each term joins the first collection all of whose
/// members satisfy `predicate` with it, or opens a new one.
pub fn sorted_insertion(terms: &[PauliTerm], predicate: Predicate) -> Result<Grouping> {
    let n = check_terms(terms)?;
    let mut cols: Vec<Vec<PauliTerm>> = Vec::new();
    for t in sorted_by_magnitude(terms) {
        match cols
            .iter_mut()
            .find(|c| c.iter().all(|m| predicate.holds(&m.op, &t.op)))
        {
            Some(c) => c.push(t),
            None => cols.push(vec![t]),
        }
    }
    let method = match predicate {
        Predicate::Gc => Method::Si,
        Predicate::Qwc => Method::SiQwc,
    };
    Ok(Grouping {
        n,
        method,
        config: GroupingConfig::default(),
        offset: 0.0,
        collections: cols.into_iter().map(Collection::bare).collect(),
    })
}

/// Collection measured with single-qubit gates only (empty template).
pub fn tpb_collection(n: usize, terms: Vec<PauliTerm>) -> Result<Collection> {
    let empty = Graph::empty(n);
    let ops: Vec<PauliOp> = terms.iter().map(|t| t.op.clone()).collect();
    let res = crate::synth::solve_exact(&empty, &ops)?
        .ok_or_else(|| Error::Invalid("collection is not qubit-wise commuting".into()))?;
    Collection::with_readout(empty, res.layer, terms)
}

struct Candidate {
    members: Vec<usize>,
    layer: CliffordLayer,
    value: f64,
}

/// Greedy extension of `{main}` along `pool` for one template.
fn grow(
    pool: &[&PauliTerm],
    template: &Graph,
    solver: &SolverConfig,
    value: ValueFn,
) -> Result<Option<Candidate>> {
    let main = &pool[0].op;
    let mut members = vec![0usize];
    let layer = if template.num_edges() == 0 {
        for (i, t) in pool.iter().enumerate().skip(1) {
            if members.iter().all(|&j| pool[j].op.qwc_with(&t.op)) {
                members.push(i);
            }
        }
        let ops: Vec<PauliOp> = members.iter().map(|&i| pool[i].op.clone()).collect();
        solver
            .solve(template, &ops)?
            .ok_or_else(|| Error::Invalid("qubit-wise commuting set without a layer".into()))?
            .layer
    } else {
        let Some(first) = solver.solve(template, std::slice::from_ref(main))? else {
            return Ok(None);
        };
        let mut layer = first.layer;
        let mut ops = vec![main.clone()];
        for (i, t) in pool.iter().enumerate().skip(1) {
            if satisfies(&layer, template, &t.op) {
                members.push(i);
                ops.push(t.op.clone());
                continue;
            }
            if !ops.iter().all(|o| o.commutes_with(&t.op)) {
                continue;
            }
            ops.push(t.op.clone());
            match solver.solve(template, &ops)? {
                Some(res) => {
                    layer = res.layer;
                    members.push(i);
                }
                None => {
                    ops.pop();
                }
            }
        }
        layer
    };
    let chosen: Vec<&PauliTerm> = members.iter().map(|&i| pool[i]).collect();
    let value = value.eval(&chosen);
    Ok(Some(Candidate {
        members,
        layer,
        value,
    }))
}

/// Best candidate over `templates`; ties go to the earliest template.
fn best_collection(
    pool: &[&PauliTerm],
    templates: &[Graph],
    solver: &SolverConfig,
    value: ValueFn,
) -> Result<(usize, Candidate)> {
    let candidates: Vec<Option<Candidate>> = templates
        .par_iter()
        .map(|t| grow(pool, t, solver, value))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, Candidate)> = None;
    for (i, c) in candidates.into_iter().enumerate() {
        if let Some(c) = c {
            if best.as_ref().is_none_or(|(_, b)| c.value > b.value) {
                best = Some((i, c));
            }
        }
    }
    best.ok_or_else(|| Error::Invalid("no template can measure the leading operator".into()))
}

fn require_empty_template(templates: &[Graph]) -> Result<()> {
    if templates.iter().any(|t| t.num_edges() == 0) {
        Ok(())
    } else {
        Err(Error::Invalid(
            "template list must contain the empty graph".into(),
        ))
    }
}

/// Hardware-tailored grouping over a fixed list of templates.
///
/// Each round takes the largest remaining term, grows one candidate
/// collection per template through the sorted remainder, keeps the
/// candidate with the highest value, and removes its members. Templates are
/// evaluated in parallel; the outcome does not depend on scheduling.
pub fn ht_group(
    terms: &[PauliTerm],
    conn: &Graph,
    templates: &[Graph],
    solver: SolverConfig,
    value: ValueFn,
) -> Result<Grouping> {
    let n = check_terms(terms)?;
    require_empty_template(templates)?;
    if conn.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: conn.n(),
        });
    }
    if let Some(t) = templates.iter().find(|t| !t.is_subgraph_of(conn)) {
        return Err(Error::Graph(format!(
            "template {t:?} is not a subgraph of the connectivity graph"
        )));
    }
    greedy_rounds(n, terms, |_| Ok(templates.to_vec()), solver, value)
}

/// [`ht_group`] with a fresh random template set each round: `count`
/// subgraphs of `conn` (always including the empty one), seeded from `seed`
/// and the round number.
pub fn ht_group_repicking(
    terms: &[PauliTerm],
    conn: &Graph,
    count: usize,
    solver: SolverConfig,
    value: ValueFn,
    seed: u64,
) -> Result<Grouping> {
    let n = check_terms(terms)?;
    if conn.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: conn.n(),
        });
    }
    let mut g = greedy_rounds(
        n,
        terms,
        |round| subgraphs_sample(conn, count.max(1), round_seed(seed, round)),
        solver,
        value,
    )?;
    g.config.seed = Some(seed);
    Ok(g)
}

fn round_seed(seed: u64, round: u64) -> u64 {
    seed ^ round.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Repeatedly takes the best collection over the round's templates.
fn greedy_rounds(
    n: usize,
    terms: &[PauliTerm],
    mut templates_for: impl FnMut(u64) -> Result<Vec<Graph>>,
    solver: SolverConfig,
    value: ValueFn,
) -> Result<Grouping> {
    let mut remaining = sorted_by_magnitude(terms);
    let mut collections = Vec::new();
    let mut round = 0u64;
    while !remaining.is_empty() {
        let templates = templates_for(round)?;
        round += 1;
        let pool: Vec<&PauliTerm> = remaining.iter().collect();
        let (ti, cand) = best_collection(&pool, &templates, &solver, value)?;
        let taken: HashSet<usize> = cand.members.iter().copied().collect();
        let chosen: Vec<PauliTerm> = cand.members.iter().map(|&i| remaining[i].clone()).collect();
        collections.push(Collection::with_readout(
            templates[ti].clone(),
            cand.layer,
            chosen,
        )?);
        remaining = remaining
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !taken.contains(i))
            .map(|(_, t)| t)
            .collect();
    }
    Ok(Grouping {
        n,
        method: Method::Ht,
        config: GroupingConfig {
            value: Some(value),
            ..Default::default()
        },
        offset: 0.0,
        collections,
    })
}

/// Most frequent non-identity factor per qubit; ties resolve to `X`, then `Y`, then `Z`.
fn most_frequent_factors(pool: &[&PauliTerm], n: usize) -> Vec<char> {
    (0..n)
        .map(|j| {
            let mut counts = [0usize; 3];
            for t in pool {
                match t.op.factor(j) {
                    'X' => counts[0] += 1,
                    'Y' => counts[1] += 1,
                    'Z' => counts[2] += 1,
                    _ => {}
                }
            }
            let mut best = 0;
            for k in 1..3 {
                if counts[k] > counts[best] {
                    best = k;
                }
            }
            ['X', 'Y', 'Z'][best]
        })
        .collect()
}

/// Support-local variant of [`ht_group`].
///
/// Per round, the pool is cut to operators commuting with the leading term
/// and, outside its support, carrying only `I` or the most frequent factor of
/// each qubit. Templates are up to `s_max` subgraphs of `conn` induced on the
/// leading term's support, sampled with a per-round seed derived from `seed`.
pub fn ht_group_local(
    terms: &[PauliTerm],
    conn: &Graph,
    s_max: usize,
    solver: SolverConfig,
    value: ValueFn,
    seed: u64,
) -> Result<Grouping> {
    let n = check_terms(terms)?;
    if conn.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: conn.n(),
        });
    }
    let mut remaining = sorted_by_magnitude(terms);
    let mut collections = Vec::new();
    let mut round = 0u64;
    while !remaining.is_empty() {
        let main = remaining[0].op.clone();
        let support: Vec<usize> = main.support().iter_ones().collect();
        let commuting: Vec<usize> = (0..remaining.len())
            .filter(|&i| remaining[i].op.commutes_with(&main))
            .collect();
        let commuting_terms: Vec<&PauliTerm> = commuting.iter().map(|&i| &remaining[i]).collect();
        let mf = most_frequent_factors(&commuting_terms, n);
        let outside: Vec<usize> = (0..n).filter(|j| !main.support().get(*j)).collect();
        let selection: Vec<usize> = commuting
            .into_iter()
            .filter(|&i| {
                let op = &remaining[i].op;
                outside.iter().all(|&j| {
                    let f = op.factor(j);
                    f == 'I' || f == mf[j]
                })
            })
            .collect();
        let (sub, map) = induced(conn, &support)?;
        let templates: Vec<Graph> = subgraphs_sample(&sub, s_max.max(1), round_seed(seed, round))?
            .iter()
            .map(|t| t.lift(n, &map))
            .collect();
        let pool: Vec<&PauliTerm> = selection.iter().map(|&i| &remaining[i]).collect();
        let (ti, cand) = best_collection(&pool, &templates, &solver, value)?;
        let taken: HashSet<usize> = cand.members.iter().map(|&k| selection[k]).collect();
        let chosen: Vec<PauliTerm> = cand
            .members
            .iter()
            .map(|&k| remaining[selection[k]].clone())
            .collect();
        collections.push(Collection::with_readout(
            templates[ti].clone(),
            cand.layer,
            chosen,
        )?);
        remaining = remaining
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !taken.contains(i))
            .map(|(_, t)| t)
            .collect();
        round += 1;
    }
    Ok(Grouping {
        n,
        method: Method::HtLocal,
        config: GroupingConfig {
            value: Some(value),
            seed: Some(seed),
            subgraphs: Some(s_max.to_string()),
            ..Default::default()
        },
        offset: 0.0,
        collections,
    })
}

/// Inverse of an invertible square matrix.
fn invert(t: &BitMatrix) -> BitMatrix {
    let out = rref(t);
    assert_eq!(out.pivots.len(), t.rows(), "matrix is singular");
    out.t
}

/// Extends commuting operators to `n` independent commuting generators.
///
/// Dependent inputs are dropped first (non-pivot columns of the stacked
/// exponent matrix `[R; S]`). With `T [R; S] = [1; 0]`, a candidate
/// `(r; s) = T⁻¹ v` commutes with the set iff `[Sᵀ Rᵀ] T⁻¹ v = 0`, and is
/// independent of it iff `v` has a nonzero entry past the first `m`.
pub fn complete_stabilizer(paulis: &[PauliOp], n: usize) -> Result<Vec<PauliOp>> {
    for p in paulis {
        if p.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: p.n(),
            });
        }
    }
    for (i, p) in paulis.iter().enumerate() {
        for q in &paulis[i + 1..] {
            if !p.commutes_with(q) {
                return Err(Error::NonCommuting(p.to_string(), q.to_string()));
            }
        }
    }
    let stacked = |ops: &[PauliOp]| -> BitMatrix {
        let cols: Vec<BitVector> = ops.iter().map(|p| p.r().concat(p.s())).collect();
        BitMatrix::from_columns(2 * n, &cols)
    };
    let pivots = rref(&stacked(paulis)).pivots;
    let mut ops: Vec<PauliOp> = pivots.iter().map(|&i| paulis[i].clone()).collect();
    while ops.len() < n {
        let m = ops.len();
        let b = stacked(&ops);
        let t_inv = invert(&rref(&b).t);
        // Rows (s_i, r_i): symplectic partner of each operator.
        let partners =
            BitMatrix::from_rows(2 * n, ops.iter().map(|p| p.s().concat(p.r())).collect());
        let kernel = null_space(&partners.mul(&t_inv));
        let v = kernel
            .into_iter()
            .find(|v| v.iter_ones().any(|i| i >= m))
            .expect("a commuting independent extension always exists");
        let w = t_inv.mul_vec(&v);
        ops.push(PauliOp::new(w.slice(0, n), w.slice(n, 2 * n))?);
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(list: &[(&str, f64)]) -> Vec<PauliTerm> {
        list.iter()
            .map(|(p, c)| PauliTerm::new(p.parse().unwrap(), *c))
            .collect()
    }

    #[test]
    fn mutually_qwc_terms_form_one_collection() {
        let t = terms(&[("ZIZ", 1.0), ("ZII", 0.5), ("IIZ", -0.3)]);
        assert_eq!(
            sorted_insertion(&t, Predicate::Qwc)
                .unwrap()
                .collections
                .len(),
            1
        );
    }

    #[test]
    fn sort_is_stable_on_ties() {
        let t = terms(&[("XI", 0.5), ("ZI", -0.5), ("IZ", 0.9)]);
        let sorted = sorted_by_magnitude(&t);
        let names: Vec<String> = sorted.iter().map(|t| t.op.to_string()).collect();
        assert_eq!(names, vec!["IZ", "XI", "ZI"]);
    }

    #[test]
    fn most_frequent_tie_prefers_x() {
        let t = terms(&[("IX", 1.0), ("IZ", 1.0), ("IY", 1.0)]);
        let refs: Vec<&PauliTerm> = t.iter().collect();
        assert_eq!(most_frequent_factors(&refs, 2)[1], 'X');
    }

    #[test]
    fn completion_of_full_set_is_unchanged() {
        let z: Vec<PauliOp> = ["ZII", "IZI", "IIZ"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(complete_stabilizer(&z, 3).unwrap(), z);
    }

    #[test]
    fn empty_template_is_required() {
        let t = terms(&[("ZZ", 1.0)]);
        let g = crate::hwgraph::linear(2).unwrap();
        let only_edge = vec![g.clone()];
        assert!(ht_group(&t, &g, &only_edge, SolverConfig::default(), ValueFn::Size).is_err());
    }
}
