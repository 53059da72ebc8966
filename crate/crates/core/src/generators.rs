//! Graph families: random `d`-regular graphs, hypercubes, blow-ups and
//! disjoint unions of `K_{d+1}`, plus a few fixed small graphs used in tests.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{RegularGraph, Vertex};
use crate::rng::chacha;

/// Maximum number of full restarts of the random pairing.
pub const MAX_RESTARTS: usize = 1000;

/// Consecutive rejected pairs before checking whether the pairing is stuck.
const STUCK_PROBE: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GenSpec {
    RandomRegular {
        n: usize,
        d: usize,
        seed: u64,
    },
    Hypercube {
        n: usize,
        d: usize,
    },
    CliqueUnion {
        n: usize,
        d: usize,
    },
    /// Each base vertex `b` becomes the independent block `s·b .. s·b + s`.
    Blowup {
        base: Box<GenSpec>,
        factor: usize,
    },
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GenSpec::RandomRegular { n, d, .. } => {
                if d == 0 || d >= n {
                    return Err(Error::Spec(format!("random_regular needs 0 < d < n, got n={n}, d={d}")));
                }
                if (n * d) % 2 != 0 {
                    return Err(Error::Spec(format!("random_regular needs n·d even, got n={n}, d={d}")));
                }
                if n > u32::MAX as usize {
                    return Err(Error::Spec(format!("n = {n} too large")));
                }
            }
            GenSpec::Hypercube { n, d } => {
                if d == 0 || d >= 32 || n != 1usize << d {
                    return Err(Error::Spec(format!("hypercube needs n = 2^d, got n={n}, d={d}")));
                }
            }
            GenSpec::CliqueUnion { n, d } => {
                if d == 0 || n == 0 || n % (d + 1) != 0 {
                    return Err(Error::Spec(format!("clique_union needs (d+1) | n, got n={n}, d={d}")));
                }
            }
            GenSpec::Blowup { ref base, factor } => {
                if factor < 2 {
                    return Err(Error::Spec(format!("blow-up factor must be at least 2, got {factor}")));
                }
                base.validate()?;
                let (n, _) = base.dims();
                if n.saturating_mul(factor) > u32::MAX as usize {
                    return Err(Error::Spec("blow-up too large".into()));
                }
            }
        }
        Ok(())
    }

    /// `(n, d)` of the graph this spec produces.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            GenSpec::RandomRegular { n, d, .. } | GenSpec::Hypercube { n, d } | GenSpec::CliqueUnion { n, d } => (n, d),
            GenSpec::Blowup { ref base, factor } => {
                let (n, d) = base.dims();
                (n * factor, d * factor)
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            GenSpec::RandomRegular { .. } => "random_regular",
            GenSpec::Hypercube { .. } => "hypercube",
            GenSpec::CliqueUnion { .. } => "clique_union",
            GenSpec::Blowup { .. } => "blowup",
        }
    }

    /// Same spec with every random seed replaced by `seed`.
    pub fn with_seed(&self, seed: u64) -> GenSpec {
        match self {
            GenSpec::RandomRegular { n, d, .. } => GenSpec::RandomRegular { n: *n, d: *d, seed },
            GenSpec::Blowup { base, factor } => GenSpec::Blowup {
                base: Box::new(base.with_seed(seed)),
                factor: *factor,
            },
            other => other.clone(),
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<RegularGraph> {
    spec.validate()?;
    match *spec {
        GenSpec::RandomRegular { n, d, seed } => random_regular(n, d, seed),
        GenSpec::Hypercube { d, .. } => hypercube(d),
        GenSpec::CliqueUnion { n, d } => clique_union(n, d),
        GenSpec::Blowup { ref base, factor } => blowup(&generate(base)?, factor),
    }
}

/// Random simple `d`-regular graph from the pairing model.
///
/// Points are paired one random pair at a time; a pair that would create a
/// loop or a repeated edge is redrawn, and the whole pairing restarts only
/// when no admissible pair is left among the unpaired points.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    GenSpec::RandomRegular { n, d, seed }.validate()?;
    let mut rng = chacha(seed);
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::with_capacity(d); n];
    let mut points: Vec<Vertex> = Vec::with_capacity(n * d);

    'restart: for _ in 0..MAX_RESTARTS {
        for list in adj.iter_mut() {
            list.clear();
        }
        points.clear();
        for v in 0..n as Vertex {
            points.extend(std::iter::repeat_n(v, d));
        }
        let mut rejected = 0usize;
        while !points.is_empty() {
            let len = points.len();
            let i = rng.gen_range(0..len);
            let mut j = rng.gen_range(0..len - 1);
            if j >= i {
                j += 1;
            }
            let (u, v) = (points[i], points[j]);
            if u != v && !adj[u as usize].contains(&v) {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                points.swap_remove(hi);
                points.swap_remove(lo);
                rejected = 0;
                continue;
            }
            rejected += 1;
            if rejected >= STUCK_PROBE {
                if !admissible_pair_exists(&points, &adj) {
                    continue 'restart;
                }
                rejected = 0;
            }
        }
        return RegularGraph::from_adjacency(d, std::mem::take(&mut adj));
    }
    Err(Error::Generation { restarts: MAX_RESTARTS })
}

fn admissible_pair_exists(points: &[Vertex], adj: &[Vec<Vertex>]) -> bool {
    let mut distinct = points.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for (a, &u) in distinct.iter().enumerate() {
        for &v in &distinct[a + 1..] {
            if !adj[u as usize].contains(&v) {
                return true;
            }
        }
    }
    false
}

/// The `d`-dimensional cube on `2^d` vertices.
pub fn hypercube(d: usize) -> Result<RegularGraph> {
    if d == 0 || d >= 32 {
        return Err(Error::Spec(format!("hypercube dimension {d} unsupported")));
    }
    let n = 1usize << d;
    let lists = (0..n as Vertex)
        .map(|v| (0..d).map(|i| v ^ (1 << i)).collect())
        .collect();
    RegularGraph::from_adjacency(d, lists)
}

/// `n / (d+1)` disjoint copies of `K_{d+1}` on consecutive vertex ids.
pub fn clique_union(n: usize, d: usize) -> Result<RegularGraph> {
    GenSpec::CliqueUnion { n, d }.validate()?;
    let k = d + 1;
    let lists = (0..n)
        .map(|v| {
            let start = v / k * k;
            (start..start + k).filter(|&u| u != v).map(|u| u as Vertex).collect()
        })
        .collect();
    RegularGraph::from_adjacency(d, lists)
}

/// `G₀(s)`: every vertex becomes an independent `s`-set, and blocks are
/// completely joined along base edges.
pub fn blowup(base: &RegularGraph, factor: usize) -> Result<RegularGraph> {
    if factor < 2 {
        return Err(Error::Spec(format!("blow-up factor must be at least 2, got {factor}")));
    }
    let n = base.n() * factor;
    let d = base.d() * factor;
    let lists = (0..n)
        .map(|v| {
            let b = (v / factor) as Vertex;
            base.neighbors(b)
                .iter()
                .flat_map(|&c| (0..factor).map(move |i| (c as usize * factor + i) as Vertex))
                .collect()
        })
        .collect();
    RegularGraph::from_adjacency(d, lists)
}

/// Block (base vertex) of `v` in a blow-up with block size `factor`.
///
/// Verifies that the block is a genuine blow-up block: all members share one
/// neighbor list and none of them is adjacent to another.
pub fn blowup_pair_index(g: &RegularGraph, factor: usize, v: Vertex) -> Result<usize> {
    if factor < 2 || !g.n().is_multiple_of(factor) || !g.d().is_multiple_of(factor) {
        return Err(Error::Usage(format!(
            "graph with n={}, d={} cannot be a blow-up with factor {factor}",
            g.n(),
            g.d()
        )));
    }
    if v as usize >= g.n() {
        return Err(Error::InvalidInput(format!("vertex {v} out of range")));
    }
    let block = v as usize / factor;
    let first = (block * factor) as Vertex;
    let members = first..first + factor as Vertex;
    for u in members.clone() {
        if g.neighbors(u) != g.neighbors(first) {
            return Err(Error::Usage(format!(
                "vertices {first} and {u} differ in neighborhood; not a blow-up block"
            )));
        }
        if members.clone().any(|w| g.has_edge(u, w)) {
            return Err(Error::Usage(format!("block {block} is not independent")));
        }
    }
    Ok(block)
}

pub fn complete_graph(n: usize) -> Result<RegularGraph> {
    if n < 2 {
        return Err(Error::Spec("complete graph needs n ≥ 2".into()));
    }
    clique_union(n, n - 1)
}

pub fn cycle_graph(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return Err(Error::Spec("cycle needs n ≥ 3".into()));
    }
    let lists = (0..n)
        .map(|v| vec![((v + n - 1) % n) as Vertex, ((v + 1) % n) as Vertex])
        .collect();
    RegularGraph::from_adjacency(2, lists)
}

pub fn petersen_graph() -> RegularGraph {
    let edges = (0..5u32).flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)]);
    RegularGraph::from_edges(10, 3, edges).expect("petersen graph is 3-regular")
}
