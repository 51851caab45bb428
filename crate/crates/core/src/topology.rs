//! Population structures: regular lattice, small-world, scale-free and random
//! networks. Each individual lives on one node and only interacts with the
//! node's neighbors.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected simple graph over nodes `0..node_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkTopology {
    adjacency: Vec<Vec<usize>>,
}

impl NetworkTopology {
    /// Builds a topology from an edge list. Self-loops are rejected and
    /// duplicate edges collapse.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::contract("topology needs at least one node"));
        }
        let mut sets = vec![BTreeSet::new(); node_count];
        for (i, j) in edges {
            if i >= node_count || j >= node_count {
                return Err(Error::contract(format!("edge ({i}, {j}) out of range for {node_count} nodes")));
            }
            if i == j {
                return Err(Error::contract(format!("self-loop on node {i}")));
            }
            sets[i].insert(j);
            sets[j].insert(i);
        }
        Ok(NetworkTopology { adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect() })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Sorted neighbors of `node`, never including `node` itself.
    pub fn neighborhood(&self, node: usize) -> Result<&[usize]> {
        self.adjacency
            .get(node)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::contract(format!("node {node} out of range 0..{}", self.node_count())))
    }

    /// Edges as `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| adj.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Writes `n <node_count>` followed by one `e <i> <j>` line per edge.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n {}", self.node_count())?;
        for (i, j) in self.edges() {
            writeln!(out, "e {i} {j}")?;
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(input: R) -> Result<Self> {
        let mut node_count = None;
        let mut edges = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let mut toks = line.split_whitespace();
            let bad = || Error::decode(format!("topology dump line {}: `{line}`", lineno + 1));
            match toks.next() {
                None => continue,
                Some("n") => {
                    let n: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                    node_count = Some(n);
                }
                Some("e") => {
                    let i: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                    let j: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                    edges.push((i, j));
                }
                Some(_) => return Err(bad()),
            }
        }
        let n = node_count.ok_or_else(|| Error::decode("topology dump lacks `n` line"))?;
        NetworkTopology::from_edges(n, edges)
    }
}

/// Von Neumann (4-neighbor) lattice, toroidal when `wrap` is set.
pub fn lattice_2d(rows: usize, cols: usize, wrap: bool) -> Result<NetworkTopology> {
    if rows == 0 || cols == 0 {
        return Err(Error::contract(format!("lattice {rows}x{cols} has no nodes")));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            } else if wrap && cols > 1 {
                edges.push((id(r, c), id(r, 0)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            } else if wrap && rows > 1 {
                edges.push((id(r, c), id(0, c)));
            }
        }
    }
    NetworkTopology::from_edges(rows * cols, edges)
}

/// Watts–Strogatz: a ring where every node links to its `k` nearest
/// neighbors, then each edge is rewired with probability `p`.
pub fn small_world<R: Rng>(n: usize, k: usize, p: f64, rng: &mut R) -> Result<NetworkTopology> {
    if k < 2 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::contract(format!("small world needs even k with 2 <= k < n, got n={n} k={k}")));
    }
    check_probability(p)?;
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let t = (i + j) % n;
            adj[i].insert(t);
            adj[t].insert(i);
        }
    }
    for j in 1..=k / 2 {
        for i in 0..n {
            let t = (i + j) % n;
            if !adj[i].contains(&t) || rng.gen::<f64>() >= p {
                continue;
            }
            let choices: Vec<usize> = (0..n).filter(|&v| v != i && !adj[i].contains(&v)).collect();
            let Some(&new_t) = choices.choose(rng) else {
                continue;
            };
            adj[i].remove(&t);
            adj[t].remove(&i);
            adj[i].insert(new_t);
            adj[new_t].insert(i);
        }
    }
    Ok(NetworkTopology { adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect() })
}

/// Barabási–Albert preferential attachment grown from an `m0`-clique.
pub fn scale_free<R: Rng>(n: usize, m0: usize, m: usize, rng: &mut R) -> Result<NetworkTopology> {
    if !(n >= m0 && m0 >= m && m >= 1) {
        return Err(Error::contract(format!("scale free needs n >= m0 >= m >= 1, got n={n} m0={m0} m={m}")));
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..m0 {
        for j in i + 1..m0 {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    for v in m0..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let weight = |u: usize| if chosen.contains(&u) { 0 } else { adj[u].len() };
            let total: usize = (0..v).map(weight).sum();
            let pick = if total == 0 {
                // Degree-less seed (m0 == 1): fall back to uniform over the rest.
                let rest: Vec<usize> = (0..v).filter(|u| !chosen.contains(u)).collect();
                *rest.choose(rng).expect("m <= v guarantees a free node")
            } else {
                let mut ticket = rng.gen_range(0..total);
                let mut pick = 0;
                for u in 0..v {
                    let w = weight(u);
                    if ticket < w {
                        pick = u;
                        break;
                    }
                    ticket -= w;
                }
                pick
            };
            chosen.push(pick);
        }
        for u in chosen {
            adj[v].insert(u);
            adj[u].insert(v);
        }
    }
    Ok(NetworkTopology { adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect() })
}

/// Erdős–Rényi G(n, p).
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<NetworkTopology> {
    if n == 0 {
        return Err(Error::contract("random graph needs at least one node"));
    }
    check_probability(p)?;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    NetworkTopology::from_edges(n, edges)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Kind and shape parameters of a topology; the node count comes from the
/// island size it is built for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TopologySpec {
    Lattice { wrap: bool },
    SmallWorld { k: usize, p: f64 },
    ScaleFree { m0: usize, m: usize },
    Random { p: f64 },
}

impl Default for TopologySpec {
    fn default() -> Self {
        TopologySpec::Lattice { wrap: true }
    }
}

impl TopologySpec {
    /// Builds the topology for `node_count` nodes from `seed`.
    pub fn build(&self, node_count: usize, seed: u64) -> Result<NetworkTopology> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            TopologySpec::Lattice { wrap } => {
                let (rows, cols) = lattice_dims(node_count)?;
                lattice_2d(rows, cols, wrap)
            }
            TopologySpec::SmallWorld { k, p } => small_world(node_count, k, p, &mut rng),
            TopologySpec::ScaleFree { m0, m } => scale_free(node_count, m0, m, &mut rng),
            TopologySpec::Random { p } => random_graph(node_count, p, &mut rng),
        }
    }
}

/// Most nearly square `rows x cols` factorization of `n`.
///
/// Sizes that only factor as `1 x n` (primes above 3) are rejected rather
/// than padded.
pub fn lattice_dims(n: usize) -> Result<(usize, usize)> {
    if n == 0 {
        return Err(Error::contract("lattice needs at least one node"));
    }
    let mut rows = (n as f64).sqrt() as usize;
    while rows > 1 && !n.is_multiple_of(rows) {
        rows -= 1;
    }
    let rows = rows.max(1);
    if rows == 1 && n > 3 {
        return Err(Error::Config(format!(
            "population {n} is not a rectangle with both sides >= 2; pick another size or topology"
        )));
    }
    Ok((rows, n / rows))
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Lattice { wrap: true } => write!(f, "lattice"),
            TopologySpec::Lattice { wrap: false } => write!(f, "lattice-open"),
            TopologySpec::SmallWorld { k, p } => write!(f, "small_world:{k}:{p}"),
            TopologySpec::ScaleFree { m0, m } => write!(f, "scale_free:{m0}:{m}"),
            TopologySpec::Random { p } => write!(f, "random:{p}"),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = Error;

    /// `lattice`, `lattice-open`, `small_world:K:P`, `scale_free:M0:M`, `random:P`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Config(format!("bad topology `{s}`"));
        let num = |i: usize| -> Result<f64> { parts.get(i).and_then(|t| t.parse().ok()).ok_or_else(bad) };
        let int = |i: usize| -> Result<usize> { parts.get(i).and_then(|t| t.parse().ok()).ok_or_else(bad) };
        let spec = match parts[0] {
            "lattice" if parts.len() == 1 => TopologySpec::Lattice { wrap: true },
            "lattice-open" if parts.len() == 1 => TopologySpec::Lattice { wrap: false },
            "small_world" if parts.len() == 3 => TopologySpec::SmallWorld { k: int(1)?, p: num(2)? },
            "scale_free" if parts.len() == 3 => TopologySpec::ScaleFree { m0: int(1)?, m: int(2)? },
            "random" if parts.len() == 2 => TopologySpec::Random { p: num(1)? },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}
