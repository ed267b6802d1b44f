//! Gate-list circuits: graph-state preparation, readout (diagonalization)
//! circuits, Pauli-Z exponentials, Trotter steps, and an OpenQASM 2.0 emitter.

use std::fmt::Write as _;

use f2la::BitVector;

use crate::error::{Error, Result};
use crate::grouping::Grouping;
use crate::hwgraph::Graph;
use crate::pauli::{Clifford, CliffordLayer, Elementary};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Clifford(Clifford, usize),
    H(usize),
    S(usize),
    Sdg(usize),
    Cz(usize, usize),
    Cx(usize, usize),
    Rz(usize, f64),
    Measure(usize),
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Clifford(_, q)
            | Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Rz(q, _)
            | Gate::Measure(q) => {
                vec![q]
            }
            Gate::Cz(a, b) | Gate::Cx(a, b) => vec![a, b],
        }
    }

    /// Inverse as a sequence in application order.
    fn inverse(&self) -> Result<Vec<Gate>> {
        Ok(match *self {
            Gate::Clifford(c, q) => c
                .word()
                .iter()
                .map(|e| match e {
                    Elementary::H => Gate::H(q),
                    Elementary::S => Gate::Sdg(q),
                })
                .collect(),
            Gate::H(q) => vec![Gate::H(q)],
            Gate::S(q) => vec![Gate::Sdg(q)],
            Gate::Sdg(q) => vec![Gate::S(q)],
            Gate::Cz(a, b) => vec![Gate::Cz(a, b)],
            Gate::Cx(a, b) => vec![Gate::Cx(a, b)],
            Gate::Rz(q, t) => vec![Gate::Rz(q, -t)],
            Gate::Measure(_) => return Err(Error::Invalid("measurement has no inverse".into())),
        })
    }
}

/// Ordered gate list on `n` qubits; gates apply left to right.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, ops: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        let qs = g.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n) {
            return Err(Error::Invalid(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Invalid(format!(
                "two-qubit gate on repeated qubit {}",
                qs[0]
            )));
        }
        self.ops.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(())
    }

    pub fn inverse(&self) -> Result<Circuit> {
        let mut ops = Vec::with_capacity(self.ops.len());
        for g in self.ops.iter().rev() {
            ops.extend(g.inverse()?);
        }
        Ok(Circuit { n: self.n, ops })
    }

    pub fn count_two_qubit(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, Gate::Cz(..) | Gate::Cx(..)))
            .count()
    }

    /// Appends a measurement of every qubit.
    pub fn measure_all(&mut self) {
        for q in 0..self.n {
            self.ops.push(Gate::Measure(q));
        }
    }
}

/// `H` on every qubit, then `CZ` on every edge in lexicographic order.
pub fn graph_prep(g: &Graph) -> Circuit {
    let mut c = Circuit::new(g.n());
    c.ops.extend((0..g.n()).map(Gate::H));
    c.ops.extend(g.edges().iter().map(|&(a, b)| Gate::Cz(a, b)));
    c
}

/// Layer, then `CZ` on every edge, then `H` on every qubit.
pub fn diag_circuit(layer: &CliffordLayer, g: &Graph) -> Result<Circuit> {
    if layer.n() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            found: layer.n(),
        });
    }
    let mut c = Circuit::new(g.n());
    for (q, &gate) in layer.gates.iter().enumerate() {
        if gate != Clifford::I {
            c.ops.push(Gate::Clifford(gate, q));
        }
    }
    c.ops.extend(g.edges().iter().map(|&(a, b)| Gate::Cz(a, b)));
    c.ops.extend((0..g.n()).map(Gate::H));
    Ok(c)
}

/// `exp(i c Z^s)`: a CNOT ladder into the highest support qubit, `RZ(-2c)`, and the mirrored ladder.
pub fn exp_pauli_z(s: &BitVector, c: f64) -> Result<Circuit> {
    let support: Vec<usize> = s.iter_ones().collect();
    let Some((&target, rest)) = support.split_last() else {
        return Err(Error::Invalid(
            "exponent of the identity has no circuit".into(),
        ));
    };
    let mut circ = Circuit::new(s.len());
    circ.ops.extend(rest.iter().map(|&q| Gate::Cx(q, target)));
    circ.ops.push(Gate::Rz(target, -2.0 * c));
    circ.ops
        .extend(rest.iter().rev().map(|&q| Gate::Cx(q, target)));
    Ok(circ)
}

/// One first-order Trotter product approximating `exp(i O)` with `k` repetitions:
/// per collection, the readout circuit, one `Z` exponential per member with
/// angle `sign * c / k`, and the readout inverse. With a single collection the
/// readout and its inverse between repetitions cancel and are left out.
pub fn trotter_step(g: &Grouping, k: usize) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::Invalid("Trotter step count must be positive".into()));
    }
    let mut blocks = Vec::new();
    for (i, col) in g.collections.iter().enumerate() {
        let readout = col.readout.as_ref().ok_or_else(|| {
            Error::Invalid(format!("collection {} has no readout circuit", i + 1))
        })?;
        let d = diag_circuit(&readout.layer, &readout.template)?;
        let mut body = Circuit::new(g.n);
        for m in &col.members {
            let t = m
                .target
                .as_ref()
                .ok_or_else(|| Error::Invalid(format!("collection {} lacks targets", i + 1)))?;
            if t.k.is_zero() {
                continue;
            }
            body.extend(&exp_pauli_z(
                &t.k,
                f64::from(t.sign) * m.term.coeff / k as f64,
            )?)?;
        }
        blocks.push((d, body));
    }
    let mut out = Circuit::new(g.n);
    if let [(d, body)] = &blocks[..] {
        out.extend(d)?;
        for _ in 0..k {
            out.extend(body)?;
        }
        out.extend(&d.inverse()?)?;
        return Ok(out);
    }
    for _ in 0..k {
        for (d, body) in &blocks {
            out.extend(d)?;
            out.extend(body)?;
            out.extend(&d.inverse()?)?;
        }
    }
    Ok(out)
}

/// OpenQASM 2.0 text using `h, s, sdg, cz, cx, rz, measure`.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if c.n > 0 {
        let _ = writeln!(out, "qreg q[{}];", c.n);
    }
    if c.ops.iter().any(|g| matches!(g, Gate::Measure(_))) {
        let _ = writeln!(out, "creg c[{}];", c.n);
    }
    for g in &c.ops {
        match *g {
            Gate::Clifford(cl, q) => {
                for e in cl.word().iter().rev() {
                    let name = match e {
                        Elementary::H => "h",
                        Elementary::S => "s",
                    };
                    let _ = writeln!(out, "{name} q[{q}];");
                }
            }
            Gate::H(q) => {
                let _ = writeln!(out, "h q[{q}];");
            }
            Gate::S(q) => {
                let _ = writeln!(out, "s q[{q}];");
            }
            Gate::Sdg(q) => {
                let _ = writeln!(out, "sdg q[{q}];");
            }
            Gate::Cz(a, b) => {
                let _ = writeln!(out, "cz q[{a}],q[{b}];");
            }
            Gate::Cx(a, b) => {
                let _ = writeln!(out, "cx q[{a}],q[{b}];");
            }
            Gate::Rz(q, t) => {
                let _ = writeln!(out, "rz({t:.17e}) q[{q}];");
            }
            Gate::Measure(q) => {
                let _ = writeln!(out, "measure q[{q}] -> c[{q}];");
            }
        }
    }
    out
}

/// Reads back the subset of OpenQASM 2.0 written by [`emit_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut c = Circuit::new(0);
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty()
            || line.starts_with("OPENQASM")
            || line.starts_with("include")
            || line.starts_with("creg")
        {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            line: idx + 1,
            msg: format!("{msg}: {line:?}"),
        };
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| err("missing semicolon"))?;
        let index = |t: &str| -> Result<usize> {
            let t = t.trim();
            let inner = t
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err("bad qubit reference"))?;
            inner.parse().map_err(|_| err("bad qubit index"))
        };
        if let Some(rest) = stmt.strip_prefix("qreg") {
            c.n = index(rest)?;
            continue;
        }
        let (head, args) = stmt
            .split_once(' ')
            .ok_or_else(|| err("malformed statement"))?;
        let qs: Vec<&str> = args.split("->").next().unwrap_or("").split(',').collect();
        let gate = match head {
            "h" => Gate::H(index(qs[0])?),
            "s" => Gate::S(index(qs[0])?),
            "sdg" => Gate::Sdg(index(qs[0])?),
            "measure" => Gate::Measure(index(qs[0])?),
            "cz" | "cx" if qs.len() == 2 => {
                let (a, b) = (index(qs[0])?, index(qs[1])?);
                if head == "cz" {
                    Gate::Cz(a, b)
                } else {
                    Gate::Cx(a, b)
                }
            }
            _ if head.starts_with("rz(") => {
                let angle = head
                    .strip_prefix("rz(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| err("bad rz angle"))?;
                Gate::Rz(index(qs[0])?, angle)
            }
            _ => return Err(err("unsupported gate")),
        };
        c.push(gate)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hwgraph::linear;

    #[test]
    fn graph_prep_shapes() {
        assert_eq!(
            graph_prep(&Graph::empty(3)).ops,
            vec![Gate::H(0), Gate::H(1), Gate::H(2)]
        );
        let c = graph_prep(&linear(3).unwrap());
        assert_eq!(&c.ops[3..], &[Gate::Cz(0, 1), Gate::Cz(1, 2)]);
    }

    #[test]
    fn diag_circuit_of_trivial_layer_is_hadamards() {
        let c = diag_circuit(&CliffordLayer::identity(2), &Graph::empty(2)).unwrap();
        assert_eq!(c.ops, vec![Gate::H(0), Gate::H(1)]);
    }

    #[test]
    fn exp_ladder_shape() {
        let s = BitVector::parse("1101").unwrap();
        let c = exp_pauli_z(&s, 0.25).unwrap();
        assert_eq!(
            c.ops,
            vec![
                Gate::Cx(0, 3),
                Gate::Cx(1, 3),
                Gate::Rz(3, -0.5),
                Gate::Cx(1, 3),
                Gate::Cx(0, 3)
            ]
        );
        let single = exp_pauli_z(&BitVector::unit(3, 1), 0.1).unwrap();
        assert_eq!(single.ops, vec![Gate::Rz(1, -0.2)]);
        assert!(exp_pauli_z(&BitVector::zeros(2), 0.1).is_err());
    }

    #[test]
    fn qasm_expansion_and_header() {
        assert_eq!(
            emit_qasm(&Circuit::new(0)),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"
        );
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        assert_eq!(emit_qasm(&c).matches("h q[0];").count(), 1);
        let mut c = Circuit::new(1);
        c.push(Gate::Clifford(Clifford::Hs, 0)).unwrap();
        assert!(emit_qasm(&c).ends_with("s q[0];\nh q[0];\n"));
    }

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::Cz(1, 1)).is_err());
        assert!(c.push(Gate::H(2)).is_err());
    }
}
