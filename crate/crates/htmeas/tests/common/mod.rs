#![allow(dead_code)]

use htmeas::hwgraph::Graph;
use htmeas::{PauliOp, PauliTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pauli(rng: &mut impl Rng, n: usize) -> PauliOp {
    let s: String = (0..n)
        .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
        .collect();
    s.parse().unwrap()
}

pub fn random_non_identity(rng: &mut impl Rng, n: usize) -> PauliOp {
    loop {
        let p = random_pauli(rng, n);
        if !p.is_identity() {
            return p;
        }
    }
}

/// Up to `m` distinct pairwise-commuting non-identity operators.
pub fn random_commuting_set(rng: &mut impl Rng, n: usize, m: usize) -> Vec<PauliOp> {
    let mut out: Vec<PauliOp> = Vec::new();
    for _ in 0..20 * m {
        if out.len() == m {
            break;
        }
        let p = random_non_identity(rng, n);
        if !out.contains(&p) && out.iter().all(|q| q.commutes_with(&p)) {
            out.push(p);
        }
    }
    out
}

/// `m` distinct non-identity terms with coefficients uniform in `[-1, 1]`.
pub fn random_hamiltonian(rng: &mut impl Rng, n: usize, m: usize) -> Vec<PauliTerm> {
    let mut ops: Vec<PauliOp> = Vec::new();
    while ops.len() < m {
        let p = random_non_identity(rng, n);
        if !ops.contains(&p) {
            ops.push(p);
        }
    }
    ops.into_iter()
        .map(|op| {
            let mut c = 0.0;
            while c == 0.0 {
                c = rng.random_range(-1.0..=1.0);
            }
            PauliTerm::new(op, c)
        })
        .collect()
}

pub fn random_subgraph(rng: &mut impl Rng, g: &Graph) -> Graph {
    let e = g.num_edges();
    g.edge_subset(rng.random::<u64>() & ((1u64 << e) - 1))
}

pub fn terms(list: &[(&str, f64)]) -> Vec<PauliTerm> {
    list.iter()
        .map(|(p, c)| PauliTerm::new(p.parse().unwrap(), *c))
        .collect()
}
