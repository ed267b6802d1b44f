//! Bundled H₄ data: Hamiltonian, reference groupings, product-state
//! parameters and the optimal shot-allocation table.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::grouping::{Collection, Grouping, Method};
use crate::hwgraph::{linear, subgraphs_all};
use crate::io::{
    grouping_from_collections, parse_collections, parse_hamiltonian, parse_state_params,
    Hamiltonian,
};
use crate::oracle::{product_state, StateVector};
use crate::pauli::{PauliOp, PauliTerm, SignedZ};
use crate::synth::SolverConfig;

pub const H4_HAMILTONIAN: &str = include_str!("../fixtures/h4.ham");
pub const H4_TPB: &str = include_str!("../fixtures/h4_tpb.txt");
pub const H4_GC: &str = include_str!("../fixtures/h4_gc.txt");
pub const H4_HT: &str = include_str!("../fixtures/h4_ht.txt");
pub const ANSATZ: &str = include_str!("../fixtures/ansatz.json");
pub const ALLOCATION: &str = include_str!("../fixtures/allocation.csv");

/// The 8-qubit H₄ Hamiltonian (184 terms plus the identity offset).
pub fn h4() -> Hamiltonian {
    parse_hamiltonian(H4_HAMILTONIAN).expect("bundled Hamiltonian parses")
}

/// 35 tensor-product-basis collections, in allocation-table order.
pub fn h4_tpb() -> Grouping {
    let cols = parse_collections(H4_TPB).expect("bundled TPB grouping parses");
    grouping_from_collections(&h4(), &cols, Method::SiQwc)
        .expect("TPB grouping covers the Hamiltonian")
}

/// 9 general-commuting collections.
pub fn h4_gc() -> Grouping {
    let cols = parse_collections(H4_GC).expect("bundled GC grouping parses");
    grouping_from_collections(&h4(), &cols, Method::Si).expect("GC grouping covers the Hamiltonian")
}

/// Reference hardware-tailored grouping on `linear(8)` and the signed
/// diagonal target recorded for each member.
#[derive(Clone, Debug)]
pub struct ReferenceHt {
    /// Collections without readout circuits.
    pub grouping: Grouping,
    pub targets: Vec<Vec<SignedZ>>,
}

fn parse_signed_z(text: &str) -> Result<SignedZ> {
    let (sign, body) = match text.as_bytes().first() {
        Some(b'+') => (1, &text[1..]),
        Some(b'-') => (-1, &text[1..]),
        _ => return Err(Error::Invalid(format!("target {text:?} lacks a sign"))),
    };
    let op: PauliOp = body.parse()?;
    if !op.is_diagonal() {
        return Err(Error::Invalid(format!("target {text:?} is not diagonal")));
    }
    Ok(SignedZ::new(op.s().clone(), sign))
}

pub fn h4_ht() -> ReferenceHt {
    let mut cols = Vec::new();
    let mut targets = Vec::new();
    for line in H4_HT
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let mut ops = Vec::new();
        let mut tz = Vec::new();
        for tok in line.split_whitespace() {
            let (p, t) = tok.split_once('=').expect("member=target token");
            ops.push(p.parse::<PauliOp>().expect("bundled Pauli parses"));
            tz.push(parse_signed_z(t).expect("bundled target parses"));
        }
        cols.push(ops);
        targets.push(tz);
    }
    let grouping = grouping_from_collections(&h4(), &cols, Method::Ht)
        .expect("HT grouping covers the Hamiltonian");
    ReferenceHt { grouping, targets }
}

impl ReferenceHt {
    /// The reference collections with readouts re-derived on `linear(8)`:
    /// each collection takes the first subgraph, in edge-bitmask order, on
    /// which the solver finds a layer. Targets are recomputed from that
    /// readout, so they can be compared against [`Self::targets`].
    pub fn with_readouts(&self, solver: &SolverConfig) -> Result<Grouping> {
        let conn = linear(self.grouping.n)?;
        let templates = subgraphs_all(&conn)?;
        let mut out = self.grouping.clone();
        for col in out.collections.iter_mut() {
            let terms: Vec<PauliTerm> = col.terms().cloned().collect();
            let ops: Vec<PauliOp> = terms.iter().map(|t| t.op.clone()).collect();
            let mut found = None;
            for t in &templates {
                if let Some(res) = solver.solve(t, &ops)? {
                    found = Some((t.clone(), res.layer));
                    break;
                }
            }
            let (t, layer) = found
                .ok_or_else(|| Error::Invalid("reference collection has no readout".into()))?;
            *col = Collection::with_readout(t, layer, terms)?;
        }
        Ok(out)
    }
}

/// Operators removed to form O′: the members of the first two TPB
/// collections (the diagonal set and the leading `X`-type set).
pub fn o_prime_excluded() -> HashSet<PauliOp> {
    let cols = parse_collections(H4_TPB).expect("bundled TPB grouping parses");
    cols[..2].iter().flatten().cloned().collect()
}

/// `g` restricted to O′, with the identity offset dropped.
pub fn o_prime(g: &Grouping) -> Grouping {
    let mut out = g.without(&o_prime_excluded());
    out.offset = 0.0;
    out
}

/// Per-qubit `(θ, φ, λ)` of the product state.
pub fn ansatz_params() -> Vec<(f64, f64, f64)> {
    parse_state_params(ANSATZ).expect("bundled state parameters parse")
}

pub fn ansatz_state() -> StateVector {
    product_state(&ansatz_params()).expect("8-qubit product state")
}

/// One row of the allocation table; numbering starts at 3 because
/// collections 1 and 2 are not part of O′.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationRow {
    pub collection: usize,
    pub tpb: f64,
    pub gc: Option<f64>,
    pub ht: Option<f64>,
}

pub fn allocation_table() -> Vec<AllocationRow> {
    ALLOCATION
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let opt = |s: &str| (!s.is_empty()).then(|| s.parse::<f64>().expect("number"));
            AllocationRow {
                collection: f[0].parse().expect("index"),
                tpb: f[1].parse().expect("number"),
                gc: opt(f[2]),
                ht: opt(f[3]),
            }
        })
        .collect()
}
