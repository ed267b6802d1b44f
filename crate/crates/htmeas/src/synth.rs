//! Solvers for the joint diagonalization condition on a fixed graph template.
//!
//! A set of commuting Paulis `{X^{r_j} Z^{s_j}}` is diagonalized by a
//! Clifford layer `A` followed by the graph-state uncompute circuit of `Γ`
//! iff `Γ (A_xx R + A_xz S) = A_zx R + A_zz S`. For diagonal blocks this is
//! linear in `a = (a_xx, a_xz, a_zx, a_zz)`, so the layers form the null
//! space of a matrix `M`; writing `a = Σ λ_j v_j`, each qubit adds the
//! quadratic constraint `det A_i = (λ·x_i)(λ·z_i) + (λ·w_i)(λ·y_i) = 1`.

use f2la::{null_space, solve_affine, BitMatrix, BitVector, Echelon, Pushed};

use crate::error::{Error, Result};
use crate::hwgraph::{components, induced, Graph};
use crate::pauli::{CliffordLayer, PauliOp, SignedZ};

/// Rank-2 qubit count above which the exhaustive search is refused.
pub const MAX_EXHAUSTIVE_RANK2: usize = 12;

/// The six sign patterns `(λ·x, λ·z, λ·w, λ·y)` with unit determinant, in search order.
pub const CASES: [[bool; 4]; 6] = [
    [false, false, true, true],
    [false, true, true, true],
    [true, true, false, false],
    [true, true, false, true],
    [true, false, true, true],
    [true, true, true, false],
];

/// How one qubit's determinant constraint restricts `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitClass {
    /// No `λ` gives determinant one.
    Infeasible,
    /// Requires `λ·x = λ·z = 1`.
    AffineXZ,
    /// Requires `λ·w = λ·y = 1`.
    AffineWY,
    Rank2,
}

/// The linearized system for one template and one operator set.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub matrix: BitMatrix,
    pub basis: Vec<BitVector>,
    pub x: Vec<BitVector>,
    pub z: Vec<BitVector>,
    pub w: Vec<BitVector>,
    pub y: Vec<BitVector>,
    pub classes: Vec<QubitClass>,
}

impl ConstraintSystem {
    /// Determinant of qubit `i`'s block for a given `λ`.
    pub fn det(&self, i: usize, lambda: &BitVector) -> bool {
        (self.x[i].dot(lambda) && self.z[i].dot(lambda))
            ^ (self.w[i].dot(lambda) && self.y[i].dot(lambda))
    }

    /// `a = Σ λ_j v_j`.
    pub fn a_from_lambda(&self, lambda: &BitVector) -> BitVector {
        let mut a = BitVector::zeros(4 * self.n);
        for j in lambda.iter_ones() {
            a ^= &self.basis[j];
        }
        a
    }

    pub fn rank2_qubits(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.classes[i] == QubitClass::Rank2)
            .collect()
    }
}

/// A layer solving the condition, with its coordinates in the null-space basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub layer: CliffordLayer,
    /// Coordinates of `a` in the basis of the system that produced it. For the
    /// componentwise solver this is the concatenation of per-component
    /// coordinates, i.e. the basis formed by the embedded component bases.
    pub lambda: BitVector,
    pub a: BitVector,
}

/// Which part of the `6^k` case space the search covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Search {
    Exact,
    /// The first `c` rank-2 qubits get all six cases; the rest are pinned to
    /// `λ·x = 0, λ·w = λ·y = 1`.
    Cutoff(usize),
}

/// Search mode plus whether to split the template into connected components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SolverConfig {
    pub search: Search,
    pub componentwise: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            search: Search::Exact,
            componentwise: true,
        }
    }
}

impl SolverConfig {
    pub fn solve(&self, g: &Graph, paulis: &[PauliOp]) -> Result<Option<SynthesisResult>> {
        if self.componentwise {
            solve_componentwise(g, paulis, self.search)
        } else {
            solve_with(g, paulis, self.search)
        }
    }
}

fn check_input(g: &Graph, paulis: &[PauliOp]) -> Result<()> {
    for p in paulis {
        if p.n() != g.n() {
            return Err(Error::SizeMismatch {
                expected: g.n(),
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
    Ok(())
}

/// Assembles `M` (one `n`-row block per operator), its null space, and the
/// per-qubit quadric data.
pub fn build_system(g: &Graph, paulis: &[PauliOp]) -> Result<ConstraintSystem> {
    check_input(g, paulis)?;
    let n = g.n();
    let mut matrix = BitMatrix::zeros(paulis.len() * n, 4 * n);
    for (j, p) in paulis.iter().enumerate() {
        for i in 0..n {
            let row = matrix.row_mut(j * n + i);
            for l in g.neighbors(i) {
                if p.r().get(l) {
                    row.set(l, true);
                }
                if p.s().get(l) {
                    row.set(n + l, true);
                }
            }
            if p.r().get(i) {
                row.set(2 * n + i, true);
            }
            if p.s().get(i) {
                row.set(3 * n + i, true);
            }
        }
    }
    let basis = null_space(&matrix);
    let d = basis.len();
    let column = |offset: usize| -> Vec<BitVector> {
        (0..n)
            .map(|i| {
                BitVector::from_bools(&basis.iter().map(|v| v.get(offset + i)).collect::<Vec<_>>())
            })
            .collect()
    };
    let x = column(0);
    let w = column(n);
    let y = column(2 * n);
    let z = column(3 * n);
    let classes = (0..n)
        .map(|i| {
            let xz_dead = x[i].is_zero() || z[i].is_zero();
            let wy_dead = w[i].is_zero() || y[i].is_zero();
            match (xz_dead, wy_dead) {
                (true, true) => QubitClass::Infeasible,
                (true, false) => QubitClass::AffineWY,
                (false, true) => QubitClass::AffineXZ,
                (false, false) => QubitClass::Rank2,
            }
        })
        .collect();
    Ok(ConstraintSystem {
        n,
        m: paulis.len(),
        d,
        matrix,
        basis,
        x,
        z,
        w,
        y,
        classes,
    })
}

/// Equations `C λ = 1` collecting every rank-1 qubit; `None` if they conflict.
fn rank1_system(sys: &ConstraintSystem) -> Option<Echelon> {
    let mut ech = Echelon::new(sys.d);
    for i in 0..sys.n {
        let rows = match sys.classes[i] {
            QubitClass::Infeasible => return None,
            QubitClass::AffineXZ => [&sys.x[i], &sys.z[i]],
            QubitClass::AffineWY => [&sys.w[i], &sys.y[i]],
            QubitClass::Rank2 => continue,
        };
        for r in rows {
            if ech.push(r, true) == Pushed::Inconsistent {
                return None;
            }
        }
    }
    Some(ech)
}

/// Sound, incomplete infeasibility test: an infeasible qubit or an
/// inconsistent rank-1 system.
pub fn quick_infeasible(sys: &ConstraintSystem) -> bool {
    rank1_system(sys).is_none()
}

fn push_case(ech: &mut Echelon, sys: &ConstraintSystem, q: usize, case: &[bool; 4]) -> bool {
    let rows = [&sys.x[q], &sys.z[q], &sys.w[q], &sys.y[q]];
    rows.iter()
        .zip(case)
        .all(|(r, &b)| ech.push(r, b) != Pushed::Inconsistent)
}

/// Depth-first walk of the case columns. The last qubit is the outermost
/// loop, so the first hit is the first consistent column in mixed-radix order
/// with the first qubit varying fastest.
fn search_cases(ech: &mut Echelon, sys: &ConstraintSystem, qubits: &[usize]) -> bool {
    let Some((&q, rest)) = qubits.split_last() else {
        return true;
    };
    let base = ech.len();
    for case in &CASES {
        if push_case(ech, sys, q, case) && search_cases(ech, sys, rest) {
            return true;
        }
        ech.truncate(base);
    }
    false
}

/// `6^c` for the exhaustively searched rank-2 qubits under `search`.
pub fn case_space(sys: &ConstraintSystem, search: Search) -> u128 {
    let k = sys.rank2_qubits().len();
    let c = match search {
        Search::Exact => k,
        Search::Cutoff(c) => c.min(k),
    };
    6u128.pow(c as u32)
}

/// Runs the case search on a built system and returns the canonical `λ`.
pub fn solve_system(sys: &ConstraintSystem, search: Search) -> Result<Option<BitVector>> {
    let Some(mut ech) = rank1_system(sys) else {
        return Ok(None);
    };
    let rank2 = sys.rank2_qubits();
    let c = match search {
        Search::Exact => {
            if rank2.len() > MAX_EXHAUSTIVE_RANK2 {
                return Err(Error::Limit(format!(
                    "{} rank-2 qubits exceed the exhaustive limit of {MAX_EXHAUSTIVE_RANK2}; use a cutoff",
                    rank2.len()
                )));
            }
            rank2.len()
        }
        Search::Cutoff(c) => c.min(rank2.len()),
    };
    let (full, pinned) = rank2.split_at(c);
    for &q in pinned {
        let ok = ech.push(&sys.x[q], false) != Pushed::Inconsistent
            && ech.push(&sys.w[q], true) != Pushed::Inconsistent
            && ech.push(&sys.y[q], true) != Pushed::Inconsistent;
        if !ok {
            return Ok(None);
        }
    }
    if !search_cases(&mut ech, sys, full) {
        return Ok(None);
    }
    // Canonical representative of the chosen affine piece.
    let (rows, rhs): (Vec<BitVector>, Vec<bool>) =
        ech.equations().map(|(r, b)| (r.clone(), b)).unzip();
    let lambda = if rows.is_empty() {
        BitVector::zeros(sys.d)
    } else {
        let space = solve_affine(
            &BitMatrix::from_rows(sys.d, rows),
            &BitVector::from_bools(&rhs),
        )
        .expect("dimensions agree");
        space.offset().clone()
    };
    debug_assert!((0..sys.n).all(|i| sys.det(i, &lambda)));
    Ok(Some(lambda))
}

fn result_from_lambda(sys: &ConstraintSystem, lambda: BitVector) -> Result<SynthesisResult> {
    let a = sys.a_from_lambda(&lambda);
    let layer = CliffordLayer::from_a_vector(&a)?;
    Ok(SynthesisResult { layer, lambda, a })
}

fn solve_with(g: &Graph, paulis: &[PauliOp], search: Search) -> Result<Option<SynthesisResult>> {
    let sys = build_system(g, paulis)?;
    match solve_system(&sys, search)? {
        Some(lambda) => Ok(Some(result_from_lambda(&sys, lambda)?)),
        None => Ok(None),
    }
}

/// Complete search over all `6^k` case columns.
pub fn solve_exact(g: &Graph, paulis: &[PauliOp]) -> Result<Option<SynthesisResult>> {
    solve_with(g, paulis, Search::Exact)
}

/// Search restricted to the first `c` rank-2 qubits; `None` is inconclusive.
pub fn solve_cutoff(g: &Graph, paulis: &[PauliOp], c: usize) -> Result<Option<SynthesisResult>> {
    solve_with(g, paulis, Search::Cutoff(c))
}

/// Solves each connected component of `g` on its own qubits and joins the layers.
pub fn solve_componentwise(
    g: &Graph,
    paulis: &[PauliOp],
    inner: Search,
) -> Result<Option<SynthesisResult>> {
    check_input(g, paulis)?;
    let n = g.n();
    let mut gates = vec![crate::pauli::Clifford::I; n];
    let mut lambda_bits = Vec::new();
    for comp in components(g) {
        let (sub, map) = induced(g, &comp)?;
        let restricted: Vec<PauliOp> = paulis.iter().map(|p| p.restrict(&map)).collect();
        // The circuit factorizes over components, so each restriction must commute.
        if !pairwise_commuting(&restricted) {
            return Ok(None);
        }
        let Some(res) = solve_with(&sub, &restricted, inner)? else {
            return Ok(None);
        };
        for (k, &v) in map.iter().enumerate() {
            gates[v] = res.layer.gates[k];
        }
        lambda_bits.extend(res.lambda.iter());
    }
    let layer = CliffordLayer::new(gates);
    let a = layer.a_vector();
    Ok(Some(SynthesisResult {
        layer,
        lambda: BitVector::from_bools(&lambda_bits),
        a,
    }))
}

fn pairwise_commuting(ops: &[PauliOp]) -> bool {
    ops.iter()
        .enumerate()
        .all(|(i, p)| ops[i + 1..].iter().all(|q| p.commutes_with(q)))
}

/// Exhaustive case-space size of every component, in component order.
pub fn componentwise_case_spaces(
    g: &Graph,
    paulis: &[PauliOp],
    inner: Search,
) -> Result<Vec<u128>> {
    check_input(g, paulis)?;
    components(g)
        .into_iter()
        .map(|comp| {
            let (sub, map) = induced(g, &comp)?;
            let restricted: Vec<PauliOp> = paulis.iter().map(|p| p.restrict(&map)).collect();
            if !pairwise_commuting(&restricted) {
                return Ok(0);
            }
            Ok(case_space(&build_system(&sub, &restricted)?, inner))
        })
        .collect()
}

/// Whether `layer` and `g` already diagonalize `p`.
pub fn satisfies(layer: &CliffordLayer, g: &Graph, p: &PauliOp) -> bool {
    match layer.conjugate(p) {
        Ok((k, m, _)) => g.apply(&k) == m,
        Err(_) => false,
    }
}

/// The signed `Z^k` that `p` becomes under the readout circuit of `(layer, g)`.
pub fn diagonalize_target(layer: &CliffordLayer, g: &Graph, p: &PauliOp) -> Result<SignedZ> {
    let (k, m, phase) = layer.conjugate(p)?;
    if g.apply(&k) != m {
        return Err(Error::NotDiagonalized(p.to_string()));
    }
    let total = (p.q() + phase) % 4;
    if total % 2 == 1 {
        return Err(Error::NonRealPhase(total));
    }
    let negative = (total == 2) ^ g.edge_parity(&k);
    Ok(SignedZ::new(k, if negative { -1 } else { 1 }))
}
