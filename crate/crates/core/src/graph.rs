//! Compressed adjacency for simple `d`-regular graphs, vertex sets and the
//! `ndl-graph` text format.
//!
//! Neighbor lists are stored sorted, so two graphs with the same edge set are
//! structurally equal and edge queries are binary searches.
//!
//! # Edge counting convention
//!
//! [`RegularGraph::edge_count_between`] counts **ordered** pairs `(u, v)` with
//! `u ∈ B`, `v ∈ C` and `uv ∈ E`. An edge with both endpoints in `B ∩ C`
//! contributes twice, so `e(V, V) = n·d`. This is the quantity `1_Bᵀ A 1_C`
//! for which the expander mixing bound holds without case splits.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type Vertex = u32;

const FORMAT_MAGIC: &str = "ndl-graph 1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    offsets: Vec<usize>,
    neighbors: Vec<Vertex>,
}

impl RegularGraph {
    /// Builds a graph from per-vertex neighbor lists, validating regularity,
    /// symmetry and simplicity. Lists need not be sorted.
    pub fn from_adjacency(d: usize, mut lists: Vec<Vec<Vertex>>) -> Result<Self> {
        let n = lists.len();
        if n == 0 {
            return Err(Error::InvalidInput("graph must have at least one vertex".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidInput(format!("{n} vertices exceed the u32 id space")));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(n * d);
        offsets.push(0);
        for (v, list) in lists.iter_mut().enumerate() {
            if list.len() != d {
                return Err(Error::Regularity {
                    vertex: v,
                    degree: list.len(),
                    expected: d,
                });
            }
            list.sort_unstable();
            for (i, &u) in list.iter().enumerate() {
                if u as usize >= n {
                    return Err(Error::InvalidInput(format!(
                        "vertex {v} lists neighbor {u} but n = {n}"
                    )));
                }
                if u as usize == v {
                    return Err(Error::NotSimple {
                        vertex: v,
                        message: "self-loop".into(),
                    });
                }
                if i > 0 && list[i - 1] == u {
                    return Err(Error::NotSimple {
                        vertex: v,
                        message: format!("repeated neighbor {u}"),
                    });
                }
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let g = Self {
            n,
            d,
            offsets,
            neighbors,
        };
        for v in 0..n {
            for &u in g.neighbors(v as Vertex) {
                if !g.has_edge(u, v as Vertex) {
                    return Err(Error::InvalidInput(format!(
                        "adjacency not symmetric: {v} -> {u} but not {u} -> {v}"
                    )));
                }
            }
        }
        Ok(g)
    }

    /// Builds a graph on `n` vertices from an undirected edge list.
    pub fn from_edges<I>(n: usize, d: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut lists = vec![Vec::with_capacity(d); n];
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::NotSimple {
                    vertex: u as usize,
                    message: "self-loop".into(),
                });
            }
            lists[u as usize].push(v);
            lists[v as usize].push(u);
        }
        Self::from_adjacency(d, lists)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edge_total(&self) -> usize {
        self.n * self.d / 2
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n as Vertex).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "vertex {v} out of range for n = {}",
                self.n
            )))
        }
    }

    fn check_set(&self, s: &VertexSet) -> Result<()> {
        if s.universe() == self.n {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "vertex set over {} vertices used with a graph on {}",
                s.universe(),
                self.n
            )))
        }
    }

    /// `|N(v) ∩ B|`.
    pub fn degree_into(&self, v: Vertex, b: &VertexSet) -> Result<usize> {
        self.check_vertex(v)?;
        self.check_set(b)?;
        Ok(self.degree_into_unchecked(v, b))
    }

    #[inline]
    pub(crate) fn degree_into_unchecked(&self, v: Vertex, b: &VertexSet) -> usize {
        self.neighbors(v).iter().filter(|&&u| b.contains(u)).count()
    }

    /// Ordered-pair edge count `e(B, C)`; see the module docs.
    pub fn edge_count_between(&self, b: &VertexSet, c: &VertexSet) -> Result<usize> {
        self.check_set(b)?;
        self.check_set(c)?;
        // iterate over the smaller side; e(B, C) = e(C, B)
        let (outer, inner) = if b.len() <= c.len() { (b, c) } else { (c, b) };
        Ok(outer.iter().map(|u| self.degree_into_unchecked(u, inner)).sum())
    }

    /// `N_G(S)`: vertices outside `S` with at least one neighbor in `S`.
    pub fn external_neighborhood(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_set(s)?;
        let mut out = VertexSet::new(self.n);
        for u in s.iter() {
            for &v in self.neighbors(u) {
                if !s.contains(v) {
                    out.insert(v);
                }
            }
        }
        Ok(out)
    }

    /// Serializes into the canonical `ndl-graph 1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.edge_total() * 14);
        out.push_str(FORMAT_MAGIC);
        out.push('\n');
        let _ = writeln!(out, "{} {}", self.n, self.d);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();
        let mut next_line = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, line)) => Ok((i + 1, line?)),
                None => Err(Error::Parse {
                    line: 0,
                    message: format!("unexpected end of file, expected {what}"),
                }),
            }
        };

        let (ln, magic) = next_line("header")?;
        if magic != FORMAT_MAGIC {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected `{FORMAT_MAGIC}`, found `{magic}`"),
            });
        }
        let (ln, dims) = next_line("`<n> <d>`")?;
        let (n, d) = parse_pair(&dims, ln)?;
        let (n, d) = (n as usize, d as usize);
        if n == 0 {
            return Err(Error::Parse {
                line: ln,
                message: "n must be positive".into(),
            });
        }
        if (n * d) % 2 != 0 {
            return Err(Error::Parse {
                line: ln,
                message: format!("n·d = {} is odd", n * d),
            });
        }
        let expected = n * d / 2;
        let mut edges = Vec::with_capacity(expected);
        let mut prev: Option<(u64, u64)> = None;
        let mut last_line = ln;
        for (i, line) in lines {
            let line = line?;
            let ln = i + 1;
            last_line = ln;
            if line.is_empty() {
                return Err(Error::Parse {
                    line: ln,
                    message: "empty line".into(),
                });
            }
            let (u, v) = parse_pair(&line, ln)?;
            if u >= v {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("edge `{line}` must satisfy u < v"),
                });
            }
            if v as usize >= n {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("vertex {v} out of range for n = {n}"),
                });
            }
            if let Some(p) = prev {
                if (u, v) <= p {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("edge `{line}` out of order or repeated"),
                    });
                }
            }
            prev = Some((u, v));
            edges.push((u as Vertex, v as Vertex));
        }
        if edges.len() != expected {
            // surface the regularity error naming a vertex when possible
            let mut deg = vec![0usize; n];
            for &(u, v) in &edges {
                deg[u as usize] += 1;
                deg[v as usize] += 1;
            }
            if let Some((vertex, &degree)) = deg.iter().enumerate().find(|(_, &k)| k != d) {
                return Err(Error::Regularity {
                    vertex,
                    degree,
                    expected: d,
                });
            }
            return Err(Error::Parse {
                line: last_line,
                message: format!("expected {expected} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, d, edges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

fn parse_pair(line: &str, ln: usize) -> Result<(u64, u64)> {
    let bad = || Error::Parse {
        line: ln,
        message: format!("expected two non-negative integers separated by one space, found `{line}`"),
    };
    let (a, b) = line.split_once(' ').ok_or_else(bad)?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    if !digits(a) || !digits(b) {
        return Err(bad());
    }
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<RegularGraph> {
    let f = std::fs::File::open(path)?;
    RegularGraph::read_from(f)
}

pub fn write_graph(path: impl AsRef<Path>, g: &RegularGraph) -> Result<()> {
    let f = std::fs::File::create(path)?;
    g.write_to(std::io::BufWriter::new(f))
}

/// Subset of `0..n` with a cached cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    bits: FixedBitSet,
    len: usize,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self { bits, len: n }
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(n: usize, vs: I) -> Result<Self> {
        let mut s = Self::new(n);
        for v in vs {
            if v as usize >= n {
                return Err(Error::InvalidInput(format!("vertex {v} out of range for n = {n}")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Size of the ground set.
    #[inline]
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.bits.contains(v as usize)
    }

    /// Returns `true` if `v` was not already present. Panics if `v` is out of range.
    #[inline]
    pub fn insert(&mut self, v: Vertex) -> bool {
        let fresh = !self.bits.put(v as usize);
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        let present = self.bits.contains(v as usize);
        if present {
            self.bits.set(v as usize, false);
            self.len -= 1;
        }
        present
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits.ones().map(|v| v as Vertex)
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }
}
