//! Connectivity graphs and the circuit templates drawn from them.

use std::collections::HashSet;
use std::fmt;

use f2la::{BitMatrix, BitVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest edge count accepted by [`subgraphs_all`].
pub const MAX_ENUMERATED_EDGES: usize = 24;

/// Undirected simple graph on vertices `0..n` with a symmetric,
/// zero-diagonal adjacency matrix. Edges are kept as sorted `(i, j)` pairs
/// with `i < j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: BitMatrix,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: BitMatrix::zeros(n, n),
            edges: Vec::new(),
        }
    }

    /// Graph from 0-based edges; duplicates are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Graph(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::Graph(format!("self-loop on vertex {a}")));
            }
            g.adj.set(a, b, true);
            g.adj.set(b, a, true);
        }
        g.rebuild_edges();
        Ok(g)
    }

    fn rebuild_edges(&mut self) {
        self.edges = (0..self.n)
            .flat_map(|i| {
                self.adj
                    .row(i)
                    .iter_ones()
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect();
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(a, b)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row(v).iter_ones()
    }

    /// `Γ k` over GF(2).
    pub fn apply(&self, k: &BitVector) -> BitVector {
        self.adj.mul_vec(k)
    }

    /// `Σ_{i<j} k_i γ_ij k_j mod 2`.
    pub fn edge_parity(&self, k: &BitVector) -> bool {
        self.edges
            .iter()
            .filter(|&&(a, b)| k.get(a) && k.get(b))
            .count()
            % 2
            == 1
    }

    /// Subgraph keeping the edges whose positions are set in `mask`.
    pub fn edge_subset(&self, mask: u64) -> Graph {
        let kept: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::from_edges(self.n, &kept).expect("subset of valid edges")
    }

    /// True if every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.iter().all(|&(a, b)| other.has_edge(a, b))
    }

    /// Relabels onto `n` vertices through `map` (new index -> old index).
    pub fn lift(&self, n: usize, map: &[usize]) -> Graph {
        let edges: Vec<_> = self.edges.iter().map(|&(a, b)| (map[a], map[b])).collect();
        Graph::from_edges(n, &edges).expect("lifted edges are valid")
    }

    /// 1-based text form: vertex count, then one `i j` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing vertex count".into(),
        })?;
        let n: usize = first.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad vertex count {first:?}"),
        })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let parts: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad edge {l:?}"),
                })?;
            match parts[..] {
                [a, b] if a >= 1 && b >= 1 => edges.push((a - 1, b - 1)),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected two 1-based vertices, got {l:?}"),
                    })
                }
            }
        }
        Graph::from_edges(n, &edges)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}-{}", a + 1, b + 1)?;
        }
        f.write_str("])")
    }
}

pub fn linear(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Graph(
            "linear graph needs at least one vertex".into(),
        ));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Graph("cycle needs at least two vertices".into()));
    }
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    edges.push((0, n - 1));
    Graph::from_edges(n, &edges)
}

pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::Graph("grid dimensions must be positive".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges)
}

/// Parses `linear:N`, `cycle:N` or `grid:RxC`.
pub fn preset(spec: &str) -> Result<Graph> {
    let bad = || Error::Graph(format!("unknown graph preset {spec:?}"));
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match kind {
        "linear" => linear(num(arg)?),
        "cycle" => cycle(num(arg)?),
        "grid" => {
            let (r, c) = arg.split_once('x').ok_or_else(bad)?;
            grid(num(r)?, num(c)?)
        }
        _ => Err(bad()),
    }
}

/// Every edge subset of `g`, by ascending edge bitmask; the first is the empty graph.
pub fn subgraphs_all(g: &Graph) -> Result<Vec<Graph>> {
    let e = g.num_edges();
    if e > MAX_ENUMERATED_EDGES {
        return Err(Error::Limit(format!(
            "{e} edges give 2^{e} subgraphs; at most {MAX_ENUMERATED_EDGES} edges can be enumerated"
        )));
    }
    Ok((0u64..1 << e).map(|m| g.edge_subset(m)).collect())
}

/// `count` distinct edge subsets of `g`: the empty graph first, then
/// uniformly random edge bitmasks (ChaCha8 seeded with `seed`), skipping
/// repeats. Returns all subgraphs when `count >= 2^e`.
pub fn subgraphs_sample(g: &Graph, count: usize, seed: u64) -> Result<Vec<Graph>> {
    let e = g.num_edges();
    if e <= MAX_ENUMERATED_EDGES && count as u128 >= 1u128 << e {
        return subgraphs_all(g);
    }
    if e > 63 {
        return Err(Error::Limit(format!(
            "sampling supports at most 63 edges, graph has {e}"
        )));
    }
    let count = count.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = (1u64 << e) - 1;
    let mut seen = HashSet::from([0u64]);
    let mut masks = vec![0u64];
    while masks.len() < count {
        let m = rng.random::<u64>() & full;
        if seen.insert(m) {
            masks.push(m);
        }
    }
    Ok(masks.into_iter().map(|m| g.edge_subset(m)).collect())
}

/// Connected components, each sorted, ordered by smallest vertex.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n];
    let mut out = Vec::new();
    for start in 0..g.n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Subgraph induced on `vertices` and the map from new to old labels.
pub fn induced(g: &Graph, vertices: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let mut map: Vec<usize> = vertices.to_vec();
    map.sort_unstable();
    map.dedup();
    if let Some(&v) = map.iter().find(|&&v| v >= g.n) {
        return Err(Error::Graph(format!(
            "vertex {v} out of range for {} vertices",
            g.n
        )));
    }
    let mut edges = Vec::new();
    for (a, &va) in map.iter().enumerate() {
        for (b, &vb) in map.iter().enumerate().skip(a + 1) {
            if g.has_edge(va, vb) {
                edges.push((a, b));
            }
        }
    }
    Ok((Graph::from_edges(map.len(), &edges)?, map))
}
