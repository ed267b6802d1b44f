//! Text and JSON formats: Hamiltonians, groupings and product-state parameters.

use std::collections::HashSet;

use f2la::BitVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::{Collection, Grouping, GroupingConfig, Member, Method, Readout};
use crate::hwgraph::Graph;
use crate::pauli::{parse_pauli, Clifford, CliffordLayer, PauliOp, PauliTerm, SignedZ};

pub const SCHEMA: u32 = 1;

/// `offset · 1 + Σ c_i P_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub n: usize,
    pub offset: f64,
    pub terms: Vec<PauliTerm>,
}

/// Parses one `<coeff> <pauli>` term per line. `#` starts a comment; a
/// leading `+` or `-` on the Pauli string folds into the coefficient; the
/// all-`I` string adds to the offset. Repeated operators are rejected.
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut n = None;
    let mut offset = 0.0;
    let mut terms = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [c, p] = fields[..] else {
            return Err(err(format!("expected `<coeff> <pauli>`, found {body:?}")));
        };
        let mut coeff: f64 = c
            .parse()
            .map_err(|_| err(format!("bad coefficient {c:?}")))?;
        if !coeff.is_finite() {
            return Err(err(format!("coefficient {c} is not finite")));
        }
        let p = match p.as_bytes()[0] {
            b'-' => {
                coeff = -coeff;
                &p[1..]
            }
            b'+' => &p[1..],
            _ => p,
        };
        let len = p.chars().count();
        let expected = *n.get_or_insert(len);
        let op = parse_pauli(p, expected).map_err(|e| err(e.to_string()))?;
        if op.is_identity() {
            offset += coeff;
            continue;
        }
        if coeff == 0.0 {
            return Err(err(format!("zero coefficient on {p}")));
        }
        if !seen.insert(op.clone()) {
            return Err(err(format!("operator {p} appears twice")));
        }
        terms.push(PauliTerm::new(op, coeff));
    }
    if terms.is_empty() {
        return Err(Error::Invalid(
            "Hamiltonian has no non-identity terms".into(),
        ));
    }
    Ok(Hamiltonian {
        n: n.unwrap_or(0),
        offset,
        terms,
    })
}

pub fn write_hamiltonian(h: &Hamiltonian) -> String {
    let mut out = String::new();
    if h.offset != 0.0 {
        out.push_str(&format!("{} {}\n", h.offset, PauliOp::identity(h.n)));
    }
    for t in &h.terms {
        out.push_str(&format!("{} {}\n", t.coeff, t.op));
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberJson {
    pauli: String,
    coeff: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    z_mask: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectionJson {
    /// 1-based edge list.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    template: Option<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    gates: Option<Vec<String>>,
    members: Vec<MemberJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupingJson {
    schema: u32,
    method: Method,
    n: usize,
    #[serde(default)]
    offset: f64,
    #[serde(default)]
    config: GroupingConfig,
    collections: Vec<CollectionJson>,
}

pub fn grouping_to_json(g: &Grouping) -> String {
    let doc = GroupingJson {
        schema: SCHEMA,
        method: g.method,
        n: g.n,
        offset: g.offset,
        config: g.config.clone(),
        collections: g
            .collections
            .iter()
            .map(|c| CollectionJson {
                template: c.readout.as_ref().map(|r| {
                    r.template
                        .edges()
                        .iter()
                        .map(|&(a, b)| [a + 1, b + 1])
                        .collect()
                }),
                gates: c.readout.as_ref().map(|r| {
                    r.layer
                        .gates
                        .iter()
                        .map(|g| g.label().to_string())
                        .collect()
                }),
                members: c
                    .members
                    .iter()
                    .map(|m| MemberJson {
                        pauli: m.term.op.to_string(),
                        coeff: m.term.coeff,
                        sign: m.target.as_ref().map(|t| t.sign),
                        z_mask: m.target.as_ref().map(|t| t.k.to_string()),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("grouping serializes")
}

fn field_err(path: String, msg: impl Into<String>) -> Error {
    Error::Invalid(format!("{path}: {}", msg.into()))
}

/// Reads a grouping document. Recorded targets are kept as written so that
/// verification can catch inconsistent files.
pub fn grouping_from_json(text: &str) -> Result<Grouping> {
    let doc: GroupingJson = serde_json::from_str(text)?;
    if doc.schema != SCHEMA {
        return Err(field_err(
            "schema".into(),
            format!("unsupported version {}", doc.schema),
        ));
    }
    let n = doc.n;
    let mut collections = Vec::with_capacity(doc.collections.len());
    for (ci, c) in doc.collections.into_iter().enumerate() {
        let at = |s: &str| format!("collections[{ci}].{s}");
        let readout = match (c.template, c.gates) {
            (None, None) => None,
            (Some(edges), Some(gates)) => {
                let mut e = Vec::with_capacity(edges.len());
                for [a, b] in edges {
                    if a == 0 || b == 0 {
                        return Err(field_err(at("template"), "vertices are 1-based"));
                    }
                    e.push((a - 1, b - 1));
                }
                let template = Graph::from_edges(n, &e)
                    .map_err(|err| field_err(at("template"), err.to_string()))?;
                if gates.len() != n {
                    return Err(field_err(
                        at("gates"),
                        format!("expected {n} labels, found {}", gates.len()),
                    ));
                }
                let gates = gates
                    .iter()
                    .map(|l| Clifford::from_label(l))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|err| field_err(at("gates"), err.to_string()))?;
                Some(Readout {
                    template,
                    layer: CliffordLayer::new(gates),
                })
            }
            _ => {
                return Err(field_err(
                    at("template"),
                    "template and gates must appear together",
                ))
            }
        };
        let mut members = Vec::with_capacity(c.members.len());
        for (mi, m) in c.members.into_iter().enumerate() {
            let at = |s: &str| format!("collections[{ci}].members[{mi}].{s}");
            let op = parse_pauli(&m.pauli, n).map_err(|e| field_err(at("pauli"), e.to_string()))?;
            let target = match (m.sign, m.z_mask) {
                (None, None) => None,
                (Some(sign), Some(mask)) => {
                    if sign != 1 && sign != -1 {
                        return Err(field_err(at("sign"), "must be 1 or -1"));
                    }
                    let k = BitVector::parse(&mask)
                        .filter(|k| k.len() == n)
                        .ok_or_else(|| {
                            field_err(at("z_mask"), format!("expected {n} binary digits"))
                        })?;
                    Some(SignedZ::new(k, sign))
                }
                _ => {
                    return Err(field_err(
                        at("sign"),
                        "sign and z_mask must appear together",
                    ))
                }
            };
            if readout.is_some() != target.is_some() {
                return Err(field_err(
                    at("sign"),
                    "targets are required exactly when a readout is given",
                ));
            }
            members.push(Member {
                term: PauliTerm::new(op, m.coeff),
                target,
            });
        }
        if members.is_empty() {
            return Err(field_err(at("members"), "collection is empty"));
        }
        collections.push(Collection { readout, members });
    }
    Ok(Grouping {
        n,
        method: doc.method,
        config: doc.config,
        offset: doc.offset,
        collections,
    })
}

/// One `U3(θ, φ, λ)` per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct U3Params {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    schema: u32,
    qubits: Vec<U3Params>,
}

pub fn parse_state_params(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let doc: StateJson = serde_json::from_str(text)?;
    if doc.schema != SCHEMA {
        return Err(field_err(
            "schema".into(),
            format!("unsupported version {}", doc.schema),
        ));
    }
    Ok(doc
        .qubits
        .into_iter()
        .map(|q| (q.theta, q.phi, q.lambda))
        .collect())
}

/// Whitespace-separated Pauli strings, one collection per line.
pub fn parse_collections(text: &str) -> Result<Vec<Vec<PauliOp>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let ops = body
            .split_whitespace()
            .map(|p| p.parse::<PauliOp>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        out.push(ops);
    }
    Ok(out)
}

/// Groups `h`'s terms into the given collections, looking up coefficients.
/// Every term must be listed exactly once.
pub fn grouping_from_collections(
    h: &Hamiltonian,
    cols: &[Vec<PauliOp>],
    method: Method,
) -> Result<Grouping> {
    let coeff: std::collections::HashMap<&PauliOp, f64> =
        h.terms.iter().map(|t| (&t.op, t.coeff)).collect();
    let mut used = HashSet::new();
    let mut collections = Vec::with_capacity(cols.len());
    for col in cols {
        let mut terms = Vec::with_capacity(col.len());
        for op in col {
            let c = *coeff
                .get(op)
                .ok_or_else(|| Error::Invalid(format!("{op} is not a term of the Hamiltonian")))?;
            if !used.insert(op.clone()) {
                return Err(Error::Invalid(format!("{op} is listed twice")));
            }
            terms.push(PauliTerm::new(op.clone(), c));
        }
        collections.push(Collection::bare(terms));
    }
    if used.len() != h.terms.len() {
        return Err(Error::Invalid(format!(
            "collections cover {} of {} terms",
            used.len(),
            h.terms.len()
        )));
    }
    Ok(Grouping {
        n: h.n,
        method,
        config: GroupingConfig::default(),
        offset: h.offset,
        collections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_goes_to_offset() {
        let h = parse_hamiltonian("# c\n0.5 II\n-1 XZ\n2 -ZZ\n").unwrap();
        assert_eq!(h.offset, 0.5);
        assert_eq!(h.terms.len(), 2);
        assert_eq!(h.terms[1].coeff, -2.0);
    }

    #[test]
    fn empty_hamiltonian_is_an_error() {
        assert!(parse_hamiltonian("# nothing\n").is_err());
        assert!(parse_hamiltonian("1.0 III\n").is_err());
    }

    #[test]
    fn parse_errors_report_lines() {
        match parse_hamiltonian("1 XX\n1 XQ\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
