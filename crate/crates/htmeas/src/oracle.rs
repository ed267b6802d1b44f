//! Dense reference simulation used to check everything the symplectic code
//! claims: statevectors, circuit unitaries, exact expectations and
//! variances, exhaustive solver enumeration and shot sampling.
//!
//! Qubit `j` corresponds to bit `n - 1 - j` of a basis index, so the first
//! character of a Pauli string acts on the most significant bit.

use f2la::BitVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{diag_circuit, Circuit, Gate};
use crate::error::{Error, Result};
use crate::grouping::{Collection, Grouping};
use crate::hwgraph::Graph;
use crate::metrics::{largest_remainder, Allocation};
use crate::pauli::{Clifford, CliffordLayer, Elementary, PauliOp, PauliTerm, SignedZ};
use crate::synth::{satisfies, ConstraintSystem};

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 10;
/// Largest null-space dimension [`brute_force_lambda`] enumerates.
pub const MAX_BRUTE_FORCE_DIM: usize = 20;

type C = Complex64;
type Mat2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Limit(format!(
            "dense simulation supports at most {MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

fn bit(n: usize, j: usize) -> usize {
    1 << (n - 1 - j)
}

/// Bit masks of `X^r` and `Z^s` in index space.
fn masks(p: &PauliOp) -> (usize, usize) {
    let n = p.n();
    let r = p.r().iter_ones().fold(0, |m, j| m | bit(n, j));
    let s = p.s().iter_ones().fold(0, |m, j| m | bit(n, j));
    (r, s)
}

fn i_pow(k: u8) -> C {
    match k % 4 {
        0 => ONE,
        1 => C::new(0.0, 1.0),
        2 => C::new(-1.0, 0.0),
        _ => C::new(0.0, -1.0),
    }
}

fn parity(x: usize) -> bool {
    x.count_ones() % 2 == 1
}

/// `P|b> = i^q (-1)^{s·b} |b ⊕ r>`.
fn apply_pauli(p: &PauliOp, v: &[C]) -> Vec<C> {
    let (r, s) = masks(p);
    let phase = i_pow(p.q());
    let mut out = vec![ZERO; v.len()];
    for (b, amp) in v.iter().enumerate() {
        let sign = if parity(b & s) { -phase } else { phase };
        out[b ^ r] = sign * amp;
    }
    out
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C::new(c, 0.0), -C::from_polar(s, lambda)],
        [C::from_polar(s, phi), C::from_polar(c, phi + lambda)],
    ]
}

fn h_matrix() -> Mat2 {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn s_matrix() -> Mat2 {
    [[ONE, ZERO], [ZERO, C::new(0.0, 1.0)]]
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Dense 2×2 unitary of a single-qubit Clifford (product of its word).
pub fn clifford_matrix(c: Clifford) -> [[Complex64; 2]; 2] {
    c.word().iter().fold([[ONE, ZERO], [ZERO, ONE]], |acc, e| {
        let m = match e {
            Elementary::H => h_matrix(),
            Elementary::S => s_matrix(),
        };
        mul2(&acc, &m)
    })
}

/// Normalized state on `n ≤ 10` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

impl StateVector {
    /// `|0…0>`.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(Error::SizeMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid(format!("state has squared norm {norm}")));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let mask = bit(self.n, q);
        for b in 0..self.amps.len() {
            if b & mask == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | mask]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let n = self.n;
        match *g {
            Gate::Clifford(c, q) => self.apply_1q(q, &clifford_matrix(c)),
            Gate::H(q) => self.apply_1q(q, &h_matrix()),
            Gate::S(q) => self.apply_1q(q, &s_matrix()),
            Gate::Sdg(q) => self.apply_1q(q, &[[ONE, ZERO], [ZERO, C::new(0.0, -1.0)]]),
            Gate::Rz(q, t) => self.apply_1q(
                q,
                &[
                    [C::from_polar(1.0, -t / 2.0), ZERO],
                    [ZERO, C::from_polar(1.0, t / 2.0)],
                ],
            ),
            Gate::Cz(a, b) => {
                let m = bit(n, a) | bit(n, b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Cx(c, t) => {
                let (mc, mt) = (bit(n, c), bit(n, t));
                for i in 0..self.amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amps.swap(i, i | mt);
                    }
                }
            }
            Gate::Measure(_) => {}
        }
    }

    /// Applies every unitary gate; measurements are ignored.
    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.n != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: c.n,
            });
        }
        for g in &c.ops {
            self.apply_gate(g);
        }
        Ok(())
    }
}

/// `⊗_j U3(θ_j, φ_j, λ_j)|0>`.
pub fn product_state(params: &[(f64, f64, f64)]) -> Result<StateVector> {
    let n = params.len();
    let mut st = StateVector::zero(n)?;
    for (q, &(t, p, l)) in params.iter().enumerate() {
        st.apply_1q(q, &u3(t, p, l));
    }
    Ok(st)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { dim, data }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        DenseMatrix { dim: d, data }
    }

    pub fn scale(&self, c: Complex64) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Largest entry modulus of `self - rhs`.
    pub fn max_diff(&self, rhs: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Spectral-norm upper bound used for error comparisons (Frobenius norm).
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Columns `U e_b` of a circuit's unitary, as one vector per basis state.
fn unitary_columns(c: &Circuit) -> Result<Vec<Vec<C>>> {
    check_qubits(c.n)?;
    (0..1usize << c.n)
        .map(|b| {
            let mut st = StateVector {
                n: c.n,
                amps: vec![ZERO; 1 << c.n],
            };
            st.amps[b] = ONE;
            st.apply_circuit(c)?;
            Ok(st.amps)
        })
        .collect()
}

pub fn circuit_unitary(c: &Circuit) -> Result<DenseMatrix> {
    let cols = unitary_columns(c)?;
    let d = cols.len();
    let mut data = vec![ZERO; d * d];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            data[i * d + j] = *v;
        }
    }
    Ok(DenseMatrix { dim: d, data })
}

/// Dense matrix of a Pauli operator.
pub fn pauli_matrix(p: &PauliOp) -> Result<DenseMatrix> {
    check_qubits(p.n())?;
    let d = 1 << p.n();
    let mut m = DenseMatrix {
        dim: d,
        data: vec![ZERO; d * d],
    };
    for b in 0..d {
        let mut e = vec![ZERO; d];
        e[b] = ONE;
        for (i, v) in apply_pauli(p, &e).into_iter().enumerate() {
            m.data[i * d + b] = v;
        }
    }
    Ok(m)
}

/// Dense `Σ c_i P_i`.
pub fn observable_matrix(n: usize, terms: &[PauliTerm]) -> Result<DenseMatrix> {
    check_qubits(n)?;
    let d = 1 << n;
    let mut m = DenseMatrix {
        dim: d,
        data: vec![ZERO; d * d],
    };
    for t in terms {
        m = m.add(&pauli_matrix(&t.op)?.scale(C::new(t.coeff, 0.0)));
    }
    Ok(m)
}

/// `exp(i O)` for Hermitian `O` by scaling and squaring a Taylor series.
pub fn expm_i(o: &DenseMatrix) -> DenseMatrix {
    let norm = o.frobenius();
    let mut squarings = 0;
    while norm / f64::from(1u32 << squarings) > 0.25 {
        squarings += 1;
    }
    let a = o.scale(C::new(0.0, 1.0 / f64::from(1u32 << squarings)));
    let mut result = DenseMatrix::identity(o.dim);
    let mut term = DenseMatrix::identity(o.dim);
    for k in 1..=20 {
        term = term.mul(&a).scale(C::new(1.0 / k as f64, 0.0));
        result = result.add(&term);
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}

/// Whether `U P U† = sign · Z^k` for the circuit's unitary `U`, to 1e-10.
pub fn conjugate_check(c: &Circuit, p: &PauliOp, expected: &SignedZ) -> Result<bool> {
    if p.n() != c.n || expected.k.len() != c.n {
        return Err(Error::SizeMismatch {
            expected: c.n,
            found: p.n(),
        });
    }
    let cols = unitary_columns(c)?;
    Ok(conjugate_check_columns(&cols, p, expected))
}

/// Compares `U P e_b = i^q (-1)^{s·b} U e_{b⊕r}` with `sign Z^k U e_b` column by column.
fn conjugate_check_columns(cols: &[Vec<C>], p: &PauliOp, expected: &SignedZ) -> bool {
    let (r, s) = masks(p);
    let kz = masks(&PauliOp::z_type(expected.k.clone())).1;
    let phase = i_pow(p.q());
    let sign = f64::from(expected.sign);
    cols.iter().enumerate().all(|(b, ub)| {
        let left_phase = if parity(b & s) { -phase } else { phase };
        let left = &cols[b ^ r];
        left.iter().zip(ub).enumerate().all(|(i, (l, u))| {
            let z = if parity(i & kz) { -sign } else { sign };
            (left_phase * l - z * u).norm() <= 1e-10
        })
    })
}

/// Checks every member target of a collection against its readout circuit.
/// Returns the members that fail.
pub fn verify_collection(col: &Collection, n: usize) -> Result<Vec<String>> {
    let readout = col
        .readout
        .as_ref()
        .ok_or_else(|| Error::Invalid("collection has no readout circuit".into()))?;
    let circ = diag_circuit(&readout.layer, &readout.template)?;
    if circ.n != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: circ.n,
        });
    }
    let cols = unitary_columns(&circ)?;
    let mut failed = Vec::new();
    for m in &col.members {
        let ok = match &m.target {
            Some(t) => conjugate_check_columns(&cols, &m.term.op, t),
            None => false,
        };
        if !ok {
            failed.push(m.term.op.to_string());
        }
    }
    Ok(failed)
}

/// `<ψ|P|ψ>`.
pub fn pauli_expectation(state: &StateVector, p: &PauliOp) -> Result<f64> {
    if p.n() != state.n {
        return Err(Error::SizeMismatch {
            expected: state.n,
            found: p.n(),
        });
    }
    let pv = apply_pauli(p, &state.amps);
    Ok(state
        .amps
        .iter()
        .zip(&pv)
        .map(|(a, b)| (a.conj() * b).re)
        .sum())
}

/// `Σ c_i <P_i>`.
pub fn expectation(state: &StateVector, terms: &[PauliTerm]) -> Result<f64> {
    terms
        .iter()
        .map(|t| Ok(t.coeff * pauli_expectation(state, &t.op)?))
        .sum()
}

/// Exact `<O>` of a grouped observable, offset included.
pub fn grouping_expectation(state: &StateVector, g: &Grouping) -> Result<f64> {
    let terms: Vec<PauliTerm> = g.terms().cloned().collect();
    Ok(g.offset + expectation(state, &terms)?)
}

/// `Var[P] = 1 - <P>²`.
pub fn term_variance(state: &StateVector, p: &PauliOp) -> Result<f64> {
    let e = pauli_expectation(state, p)?;
    Ok((1.0 - e * e).max(0.0))
}

/// `<O²> - <O>²` for `O = Σ c_i P_i`.
pub fn variance(state: &StateVector, terms: &[PauliTerm]) -> Result<f64> {
    let mut phi = vec![ZERO; state.amps.len()];
    for t in terms {
        if t.op.n() != state.n {
            return Err(Error::SizeMismatch {
                expected: state.n,
                found: t.op.n(),
            });
        }
        for (acc, v) in phi.iter_mut().zip(apply_pauli(&t.op, &state.amps)) {
            *acc += v * t.coeff;
        }
    }
    let mean: f64 = state
        .amps
        .iter()
        .zip(&phi)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let second: f64 = phi.iter().map(|v| v.norm_sqr()).sum();
    Ok((second - mean * mean).max(0.0))
}

pub fn collection_variance(state: &StateVector, col: &Collection) -> Result<f64> {
    let terms: Vec<PauliTerm> = col.terms().cloned().collect();
    variance(state, &terms)
}

/// Every `λ` whose per-qubit determinants are all one.
pub fn brute_force_lambda(sys: &ConstraintSystem) -> Result<Vec<BitVector>> {
    if sys.d > MAX_BRUTE_FORCE_DIM {
        return Err(Error::Limit(format!(
            "null space dimension {} exceeds {MAX_BRUTE_FORCE_DIM}",
            sys.d
        )));
    }
    Ok((0u64..1 << sys.d)
        .map(|x| BitVector::from_u64(sys.d, x))
        .filter(|l| (0..sys.n).all(|i| sys.det(i, l)))
        .collect())
}

/// Every layer in `{I, H, S, HSH, HS, SH}^n` under which `(layer, g)`
/// diagonalizes all of `paulis`, in lexicographic order of gate indices.
pub fn brute_force_layers(g: &Graph, paulis: &[PauliOp]) -> Result<Vec<CliffordLayer>> {
    let n = g.n();
    if n > 8 {
        return Err(Error::Limit(format!(
            "6^{n} layers is too many to enumerate"
        )));
    }
    let total = 6usize.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut gates = vec![Clifford::I; n];
        for slot in gates.iter_mut().rev() {
            *slot = Clifford::ALL[c % 6];
            c /= 6;
        }
        let layer = CliffordLayer::new(gates);
        if paulis.iter().all(|p| satisfies(&layer, g, p)) {
            out.push(layer);
        }
    }
    Ok(out)
}

/// Outcome distributions of every collection's readout, computed once.
#[derive(Clone, Debug)]
pub struct SamplingPlan {
    offset: f64,
    /// Per collection: probabilities and the estimator value of each outcome.
    outcomes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl SamplingPlan {
    pub fn new(state: &StateVector, g: &Grouping) -> Result<Self> {
        if state.n != g.n {
            return Err(Error::SizeMismatch {
                expected: g.n,
                found: state.n,
            });
        }
        let mut outcomes = Vec::with_capacity(g.collections.len());
        for (ci, col) in g.collections.iter().enumerate() {
            let readout = col.readout.as_ref().ok_or_else(|| {
                Error::Invalid(format!("collection {} has no readout circuit", ci + 1))
            })?;
            let mut st = state.clone();
            st.apply_circuit(&diag_circuit(&readout.layer, &readout.template)?)?;
            let probs = st.probabilities();
            let mut values = vec![0.0; probs.len()];
            for m in &col.members {
                let t = m.target.as_ref().ok_or_else(|| {
                    Error::Invalid(format!("collection {} lacks targets", ci + 1))
                })?;
                let kz = masks(&PauliOp::z_type(t.k.clone())).1;
                let w = m.term.coeff * f64::from(t.sign);
                for (b, v) in values.iter_mut().enumerate() {
                    *v += if parity(b & kz) { -w } else { w };
                }
            }
            outcomes.push((probs, values));
        }
        Ok(Self {
            offset: g.offset,
            outcomes,
        })
    }

    pub fn num_collections(&self) -> usize {
        self.outcomes.len()
    }

    /// Shot counts for `budget`: largest-remainder rounding of `alloc`, then
    /// at least one shot per collection, taken from the largest counts.
    pub fn shots(&self, alloc: &Allocation, budget: u64) -> Result<Vec<u64>> {
        let k = self.outcomes.len();
        if alloc.fractions.len() != k {
            return Err(Error::SizeMismatch {
                expected: k,
                found: alloc.fractions.len(),
            });
        }
        if budget < k as u64 {
            return Err(Error::Invalid(format!(
                "budget {budget} is below the {k} collections"
            )));
        }
        let mut shots = largest_remainder(&alloc.fractions, budget);
        while let Some(i) = shots.iter().position(|&s| s == 0) {
            let j = (0..k)
                .max_by_key(|&j| (shots[j], std::cmp::Reverse(j)))
                .expect("nonempty");
            shots[j] -= 1;
            shots[i] += 1;
        }
        Ok(shots)
    }

    /// Estimate of `<O>` from `shots[i]` samples of collection `i`.
    pub fn estimate(&self, shots: &[u64], seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut total = self.offset;
        for ((probs, values), &n) in self.outcomes.iter().zip(shots) {
            if n == 0 {
                continue;
            }
            // Multinomial draw as a chain of conditional binomials.
            let mut left = n;
            let mut mass = 1.0;
            let mut sum = 0.0;
            for (p, v) in probs.iter().zip(values) {
                if left == 0 {
                    break;
                }
                let q = if mass > 0.0 {
                    (p / mass).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                let draw = Binomial::new(left, q)
                    .map_err(|e| Error::Invalid(format!("binomial parameters: {e}")))?
                    .sample(&mut rng);
                sum += draw as f64 * v;
                left -= draw;
                mass -= p;
            }
            total += sum / n as f64;
        }
        Ok(total)
    }

    /// Exact variance of [`Self::estimate`] for the given shot counts.
    pub fn estimator_variance(&self, shots: &[u64]) -> f64 {
        self.outcomes
            .iter()
            .zip(shots)
            .map(|((probs, values), &n)| {
                let mean: f64 = probs.iter().zip(values).map(|(p, v)| p * v).sum();
                let second: f64 = probs.iter().zip(values).map(|(p, v)| p * v * v).sum();
                (second - mean * mean).max(0.0) / n as f64
            })
            .sum()
    }
}

/// Sampled estimate of `<O>` with `budget` shots split by `alloc`.
pub fn sample_estimate(
    state: &StateVector,
    g: &Grouping,
    alloc: &Allocation,
    budget: u64,
    seed: u64,
) -> Result<f64> {
    let plan = SamplingPlan::new(state, g)?;
    let shots = plan.shots(alloc, budget)?;
    plan.estimate(&shots, seed)
}
