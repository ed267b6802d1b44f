//! Pauli operators in binary symplectic form and single-qubit Clifford layers.
//!
//! An operator is stored phase-free as exponent vectors `(r, s)` of
//! `X^r Z^s`; the Hermitian operator it names is `i^q X^r Z^s` with
//! `q = #Y`. Qubit `j` is character `j` of the string form (leftmost first).

use std::fmt;
use std::str::FromStr;

use f2la::BitVector;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    r: BitVector,
    s: BitVector,
}

impl PauliOp {
    pub fn new(r: BitVector, s: BitVector) -> Result<Self> {
        if r.len() != s.len() {
            return Err(Error::SizeMismatch {
                expected: r.len(),
                found: s.len(),
            });
        }
        Ok(Self { r, s })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            r: BitVector::zeros(n),
            s: BitVector::zeros(n),
        }
    }

    /// `Z^s`.
    pub fn z_type(s: BitVector) -> Self {
        Self {
            r: BitVector::zeros(s.len()),
            s,
        }
    }

    /// Single-qubit factor `p` (one of `I`, `X`, `Y`, `Z`) on qubit `j` of `n`.
    pub fn single(n: usize, j: usize, p: char) -> Result<Self> {
        let mut text = vec!['I'; n];
        text[j] = p;
        parse_pauli(&text.iter().collect::<String>(), n)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.r.len()
    }

    #[inline]
    pub fn r(&self) -> &BitVector {
        &self.r
    }

    #[inline]
    pub fn s(&self) -> &BitVector {
        &self.s
    }

    /// Number of `Y` factors, the exponent `q` of the Hermitian phase `i^q`.
    pub fn num_y(&self) -> usize {
        self.r.and(&self.s).count_ones()
    }

    pub fn q(&self) -> u8 {
        (self.num_y() % 4) as u8
    }

    pub fn support(&self) -> BitVector {
        self.r.or(&self.s)
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn is_diagonal(&self) -> bool {
        self.r.is_zero()
    }

    /// Factor on qubit `j` as one of `I`, `X`, `Y`, `Z`.
    pub fn factor(&self, j: usize) -> char {
        match (self.r.get(j), self.s.get(j)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Symplectic commutation test.
    ///
    /// # Panics
    ///
    /// Panics if the qubit counts differ; see [`commutes`] for the checked form.
    pub fn commutes_with(&self, other: &Self) -> bool {
        self.r.dot(&other.s) == self.s.dot(&other.r)
    }

    /// Qubit-wise commutation: every factor pair is equal or contains `I`.
    pub fn qwc_with(&self, other: &Self) -> bool {
        assert_eq!(self.n(), other.n(), "qubit count mismatch");
        let a = self.support();
        let b = other.support();
        let differ = (&self.r ^ &other.r).or(&(&self.s ^ &other.s));
        differ.and(&a).and(&b).is_zero()
    }

    /// Restriction to the listed qubits, in the listed order.
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        let mut r = BitVector::zeros(qubits.len());
        let mut s = BitVector::zeros(qubits.len());
        for (k, &j) in qubits.iter().enumerate() {
            r.set(k, self.r.get(j));
            s.set(k, self.s.get(j));
        }
        Self { r, s }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n() {
            write!(f, "{}", self.factor(j))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_pauli(s, s.chars().count())
    }
}

/// Parses an `n`-character string over `{I, X, Y, Z}`.
pub fn parse_pauli(text: &str, n: usize) -> Result<PauliOp> {
    let len = text.chars().count();
    if len != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: len,
        });
    }
    let mut r = BitVector::zeros(n);
    let mut s = BitVector::zeros(n);
    for (j, ch) in text.chars().enumerate() {
        match ch {
            'I' => {}
            'X' => r.set(j, true),
            'Y' => {
                r.set(j, true);
                s.set(j, true);
            }
            'Z' => s.set(j, true),
            _ => return Err(Error::BadPauliChar { ch, pos: j }),
        }
    }
    Ok(PauliOp { r, s })
}

fn check_sizes(p: &PauliOp, q: &PauliOp) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::SizeMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    Ok(())
}

pub fn commutes(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    check_sizes(p, q)?;
    Ok(p.commutes_with(q))
}

pub fn qwc(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    check_sizes(p, q)?;
    Ok(p.qwc_with(q))
}

/// A Pauli operator with a real coefficient (Hartree for chemistry inputs).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub op: PauliOp,
    pub coeff: f64,
}

impl PauliTerm {
    pub fn new(op: PauliOp, coeff: f64) -> Self {
        Self { op, coeff }
    }
}

/// The six single-qubit Cliffords used for layers, named by their H/S words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clifford {
    I,
    H,
    S,
    Hsh,
    Hs,
    Sh,
}

impl Clifford {
    pub const ALL: [Clifford; 6] = [
        Clifford::I,
        Clifford::H,
        Clifford::S,
        Clifford::Hsh,
        Clifford::Hs,
        Clifford::Sh,
    ];

    /// Binary matrix `[[a_xx, a_xz], [a_zx, a_zz]]`.
    pub fn matrix(self) -> [[bool; 2]; 2] {
        let m = match self {
            Clifford::I => [[1, 0], [0, 1]],
            Clifford::H => [[0, 1], [1, 0]],
            Clifford::S => [[1, 0], [1, 1]],
            Clifford::Hsh => [[1, 1], [0, 1]],
            Clifford::Hs => [[1, 1], [1, 0]],
            Clifford::Sh => [[0, 1], [1, 1]],
        };
        m.map(|row| row.map(|b| b == 1))
    }

    /// `(alpha(0,1), alpha(1,0))`: exponents of `i` picked up by `Z` and `X`.
    pub fn alphas(self) -> (u8, u8) {
        match self {
            Clifford::I | Clifford::H => (0, 0),
            Clifford::S => (0, 1),
            Clifford::Hsh => (3, 0),
            Clifford::Hs => (0, 3),
            Clifford::Sh => (1, 0),
        }
    }

    /// Phase exponent for conjugating `X^r Z^s`: `U X^r Z^s U† = i^alpha X^k Z^m`.
    pub fn alpha(self, r: bool, s: bool) -> u8 {
        let (a01, a10) = self.alphas();
        let [[_, xz], [zx, _]] = self.matrix();
        match (r, s) {
            (false, false) => 0,
            (false, true) => a01,
            (true, false) => a10,
            (true, true) => (a10 + a01 + 2 * (xz && zx) as u8) % 4,
        }
    }

    /// `(r, s) -> (k, m, alpha)` for one qubit.
    pub fn conjugate(self, r: bool, s: bool) -> (bool, bool, u8) {
        let [[xx, xz], [zx, zz]] = self.matrix();
        ((xx & r) ^ (xz & s), (zx & r) ^ (zz & s), self.alpha(r, s))
    }

    pub fn label(self) -> &'static str {
        match self {
            Clifford::I => "I",
            Clifford::H => "H",
            Clifford::S => "S",
            Clifford::Hsh => "HSH",
            Clifford::Hs => "HS",
            Clifford::Sh => "SH",
        }
    }

    /// Word as an operator product, leftmost factor applied last.
    pub fn word(self) -> &'static [Elementary] {
        use Elementary::{H, S};
        match self {
            Clifford::I => &[],
            Clifford::H => &[H],
            Clifford::S => &[S],
            Clifford::Hsh => &[H, S, H],
            Clifford::Hs => &[H, S],
            Clifford::Sh => &[S, H],
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.label() == label)
            .ok_or_else(|| Error::Invalid(format!("unknown Clifford label {label:?}")))
    }
}

impl fmt::Display for Clifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Generators appearing in the Clifford words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    H,
    S,
}

/// The label whose binary matrix equals `a`.
pub fn gate_from_matrix(a: [[bool; 2]; 2]) -> Result<Clifford> {
    let det = (a[0][0] & a[1][1]) ^ (a[0][1] & a[1][0]);
    if !det {
        return Err(Error::SingularMatrix);
    }
    Ok(Clifford::ALL
        .into_iter()
        .find(|g| g.matrix() == a)
        .expect("every invertible 2x2 binary matrix is listed"))
}

/// Tensor product of single-qubit Cliffords; block-diagonal symplectic map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordLayer {
    pub gates: Vec<Clifford>,
}

impl CliffordLayer {
    pub fn new(gates: Vec<Clifford>) -> Self {
        Self { gates }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            gates: vec![Clifford::I; n],
        }
    }

    pub fn n(&self) -> usize {
        self.gates.len()
    }

    fn diag(&self, row: usize, col: usize) -> BitVector {
        BitVector::from_bools(
            &self
                .gates
                .iter()
                .map(|g| g.matrix()[row][col])
                .collect::<Vec<_>>(),
        )
    }

    pub fn a_xx(&self) -> BitVector {
        self.diag(0, 0)
    }

    pub fn a_xz(&self) -> BitVector {
        self.diag(0, 1)
    }

    pub fn a_zx(&self) -> BitVector {
        self.diag(1, 0)
    }

    pub fn a_zz(&self) -> BitVector {
        self.diag(1, 1)
    }

    /// Stacked vector `a = (a_xx, a_xz, a_zx, a_zz)` of length `4n`.
    pub fn a_vector(&self) -> BitVector {
        self.a_xx()
            .concat(&self.a_xz())
            .concat(&self.a_zx())
            .concat(&self.a_zz())
    }

    /// Layer from a stacked `a` vector; fails on a singular qubit block.
    pub fn from_a_vector(a: &BitVector) -> Result<Self> {
        if !a.len().is_multiple_of(4) {
            return Err(Error::Invalid(format!(
                "a-vector length {} is not a multiple of 4",
                a.len()
            )));
        }
        let n = a.len() / 4;
        let gates = (0..n)
            .map(|i| {
                gate_from_matrix([
                    [a.get(i), a.get(n + i)],
                    [a.get(2 * n + i), a.get(3 * n + i)],
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gates })
    }

    /// `L X^r Z^s L† = i^phase X^k Z^m`; returns `(k, m, phase)`.
    pub fn conjugate(&self, p: &PauliOp) -> Result<(BitVector, BitVector, u8)> {
        if p.n() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: p.n(),
            });
        }
        let n = self.n();
        let mut k = BitVector::zeros(n);
        let mut m = BitVector::zeros(n);
        let mut phase = 0u8;
        for (j, g) in self.gates.iter().enumerate() {
            let (kj, mj, a) = g.conjugate(p.r().get(j), p.s().get(j));
            k.set(j, kj);
            m.set(j, mj);
            phase = (phase + a) % 4;
        }
        Ok((k, m, phase))
    }
}

/// Alias matching the operation name used across the crate.
pub fn layer_conjugate(layer: &CliffordLayer, p: &PauliOp) -> Result<(BitVector, BitVector, u8)> {
    layer.conjugate(p)
}

/// `sign * Z^k`, the image of a measured operator under its readout circuit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedZ {
    pub k: BitVector,
    pub sign: i8,
}

impl SignedZ {
    pub fn new(k: BitVector, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { k, sign }
    }

    /// Eigenvalue of `sign * Z^k` on the computational basis state `bits`.
    pub fn eigenvalue(&self, bits: &BitVector) -> f64 {
        let parity = self.k.dot(bits);
        if parity == (self.sign > 0) {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for SignedZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign > 0 { "+" } else { "-" })?;
        write!(f, "{}", PauliOp::z_type(self.k.clone()))
    }
}
