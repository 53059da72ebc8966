//! Component census of `G[V_p]`: sizes, edge counts, isolated trees, long
//! cycles, plus exact small-scale tree enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{RegularGraph, Vertex, VertexSet};
use crate::percolation::{components_oracle, PercolationSample};

/// Upper limit on connected sets visited by the enumeration oracles.
const ENUMERATION_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCensus {
    pub retained: usize,
    /// Component sizes, descending. Ties keep smallest-vertex order.
    pub sizes: Vec<usize>,
    /// Induced edges per component, aligned with `sizes`.
    pub edges_per_component: Vec<usize>,
    pub l1: usize,
    pub l2: usize,
    /// Edges of `G[V_p]` (`Z_p`).
    pub edges_total: usize,
    /// Edges of the largest component.
    pub e_l1: usize,
    pub k_max: usize,
    /// Index `k−1` counts components with `k` vertices and `k−1` edges.
    pub tree_counts: Vec<usize>,
    /// Vertices outside the largest component and outside trees of order ≤ `k_max`.
    pub straggler_vertices: usize,
    pub straggler_edges: usize,
    pub longest_cycle_lb: usize,
    /// Cycle realising `longest_cycle_lb`.
    pub cycle: Option<CycleWitness>,
    /// Component rank (index into `sizes`) per retained vertex.
    rank: Vec<Option<u32>>,
}

/// Compact, serializable view of a census.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub retained: usize,
    pub components: usize,
    pub l1: usize,
    pub l2: usize,
    pub edges_total: usize,
    pub e_l1: usize,
    pub tree_counts: Vec<usize>,
    pub straggler_vertices: usize,
    pub straggler_edges: usize,
    pub longest_cycle_lb: usize,
    pub top_sizes: Vec<usize>,
}

impl ComponentCensus {
    pub fn components(&self) -> usize {
        self.sizes.len()
    }

    /// Rank of the component holding `v`, 0 for the largest.
    pub fn component_rank(&self, v: Vertex) -> Option<usize> {
        self.rank.get(v as usize).copied().flatten().map(|r| r as usize)
    }

    /// Vertices of the component with the given rank, ascending.
    pub fn component_vertices(&self, rank: usize) -> Vec<Vertex> {
        (0..self.rank.len() as Vertex)
            .filter(|&v| self.rank[v as usize] == Some(rank as u32))
            .collect()
    }

    pub fn largest_component(&self) -> Vec<Vertex> {
        if self.sizes.is_empty() {
            Vec::new()
        } else {
            self.component_vertices(0)
        }
    }

    /// Whether small trees, stragglers and the largest component account
    /// for every retained vertex and every induced edge.
    pub fn is_conserved(&self) -> bool {
        let largest_is_tree = self.l1 > 0 && self.l1 <= self.k_max && self.e_l1 + 1 == self.l1;
        let (l1, e_l1) = if largest_is_tree { (0, 0) } else { (self.l1, self.e_l1) };
        let tree_vertices: usize = self.tree_counts.iter().enumerate().map(|(i, t)| (i + 1) * t).sum();
        let tree_edges: usize = self.tree_counts.iter().enumerate().map(|(i, t)| i * t).sum();
        self.sizes.iter().sum::<usize>() == self.retained
            && tree_vertices + self.straggler_vertices + l1 == self.retained
            && tree_edges + self.straggler_edges + e_l1 == self.edges_total
    }

    pub fn summary(&self) -> CensusSummary {
        CensusSummary {
            retained: self.retained,
            components: self.components(),
            l1: self.l1,
            l2: self.l2,
            edges_total: self.edges_total,
            e_l1: self.e_l1,
            tree_counts: self.tree_counts.clone(),
            straggler_vertices: self.straggler_vertices,
            straggler_edges: self.straggler_edges,
            longest_cycle_lb: self.longest_cycle_lb,
            top_sizes: self.sizes.iter().take(10).copied().collect(),
        }
    }
}

pub fn take_census(g: &RegularGraph, sample: &PercolationSample, k_max: usize) -> Result<ComponentCensus> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    if sample.n() != g.n() {
        return Err(Error::InvalidInput(format!(
            "sample over {} vertices, graph has {}",
            sample.n(),
            g.n()
        )));
    }
    let labels = components_oracle(g, sample);
    let raw_sizes = labels.sizes();
    let mut raw_edges = vec![0usize; labels.count];
    for v in sample.membership().iter() {
        let l = labels.label[v as usize].expect("retained vertex is labelled") as usize;
        raw_edges[l] += g.neighbors(v).iter().filter(|&&u| u > v && sample.contains(u)).count();
    }

    let mut order: Vec<usize> = (0..labels.count).collect();
    order.sort_by(|&a, &b| raw_sizes[b].cmp(&raw_sizes[a]));
    let mut rank_of_label = vec![0u32; labels.count];
    for (rank, &l) in order.iter().enumerate() {
        rank_of_label[l] = rank as u32;
    }
    let sizes: Vec<usize> = order.iter().map(|&l| raw_sizes[l]).collect();
    let edges_per_component: Vec<usize> = order.iter().map(|&l| raw_edges[l]).collect();
    let rank: Vec<Option<u32>> = labels
        .label
        .iter()
        .map(|l| l.map(|l| rank_of_label[l as usize]))
        .collect();

    let mut tree_counts = vec![0usize; k_max];
    let mut straggler_vertices = 0;
    let mut straggler_edges = 0;
    for (i, (&s, &e)) in sizes.iter().zip(&edges_per_component).enumerate() {
        let small_tree = s <= k_max && e + 1 == s;
        if small_tree {
            tree_counts[s - 1] += 1;
        }
        if i > 0 && !small_tree {
            straggler_vertices += s;
            straggler_edges += e;
        }
    }

    let cycle = longest_cycle(g, sample);
    Ok(ComponentCensus {
        retained: sample.retained_count(),
        l1: sizes.first().copied().unwrap_or(0),
        l2: sizes.get(1).copied().unwrap_or(0),
        edges_total: edges_per_component.iter().sum(),
        e_l1: edges_per_component.first().copied().unwrap_or(0),
        k_max,
        tree_counts,
        straggler_vertices,
        straggler_edges,
        longest_cycle_lb: cycle.as_ref().map_or(0, CycleWitness::len),
        cycle,
        sizes,
        edges_per_component,
        rank,
    })
}

/// A cycle in `G[V_p]` listed in traversal order; the closing edge joins the
/// last vertex back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub vertices: Vec<Vertex>,
}

impl CycleWitness {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Longest cycle closed by a single non-tree edge of a depth-first forest
/// over the retained vertices. `None` when `G[V_p]` is a forest.
///
/// In a depth-first forest every non-tree edge joins a vertex to one of its
/// ancestors, so each one closes a cycle through tree edges.
pub fn longest_cycle(g: &RegularGraph, sample: &PercolationSample) -> Option<CycleWitness> {
    let n = g.n();
    const UNSEEN: u32 = u32::MAX;
    let mut depth = vec![UNSEEN; n];
    let mut parent = vec![UNSEEN; n];
    let mut cursor = vec![0usize; n];
    let mut best: Option<(u32, Vertex, Vertex)> = None;
    let mut stack: Vec<Vertex> = Vec::new();

    for root in sample.membership().iter() {
        if depth[root as usize] != UNSEEN {
            continue;
        }
        depth[root as usize] = 0;
        stack.push(root);
        while let Some(&v) = stack.last() {
            let nbrs = g.neighbors(v);
            let vi = v as usize;
            if cursor[vi] == nbrs.len() {
                stack.pop();
                continue;
            }
            let u = nbrs[cursor[vi]];
            cursor[vi] += 1;
            if !sample.contains(u) {
                continue;
            }
            let ui = u as usize;
            if depth[ui] == UNSEEN {
                depth[ui] = depth[vi] + 1;
                parent[ui] = v;
                stack.push(u);
            } else if depth[ui] + 1 < depth[vi] {
                // back edge to a proper ancestor other than the parent
                let len = depth[vi] - depth[ui] + 1;
                if best.is_none_or(|(b, _, _)| len > b) {
                    best = Some((len, v, u));
                }
            }
        }
    }

    best.map(|(_, low, high)| {
        let mut vertices = vec![low];
        let mut w = low;
        while w != high {
            w = parent[w as usize];
            vertices.push(w);
        }
        CycleWitness { vertices }
    })
}

pub fn longest_cycle_lower_bound(g: &RegularGraph, sample: &PercolationSample) -> usize {
    longest_cycle(g, sample).map_or(0, |c| c.len())
}

/// Whether `w` is a simple cycle of length ≥ 3 inside `G[V_p]`.
pub fn validate_cycle(g: &RegularGraph, sample: &PercolationSample, w: &CycleWitness) -> bool {
    let k = w.vertices.len();
    if k < 3 {
        return false;
    }
    let mut seen = VertexSet::new(g.n());
    for &v in &w.vertices {
        if (v as usize) >= g.n() || !sample.contains(v) || !seen.insert(v) {
            return false;
        }
    }
    (0..k).all(|i| g.has_edge(w.vertices[i], w.vertices[(i + 1) % k]))
}

/// `n·k^{k−2}·(d−k)^{k−1}/k!`, the lower bound on `k`-vertex subtrees of a
/// `d`-regular graph; 0 when `k ≥ d`.
pub fn tree_count_lower_bound(n: usize, d: usize, k: usize) -> f64 {
    if k == 0 || k >= d {
        return 0.0;
    }
    // exact integers when they fit, so comparisons against counts are exact
    let (n128, k128, free) = (n as u128, k as u128, (d - k) as u128);
    let num = (0..k.saturating_sub(1))
        .try_fold(n128, |acc, _| acc.checked_mul(free))
        .and_then(|acc| (0..k.saturating_sub(2)).try_fold(acc, |acc, _| acc.checked_mul(k128)));
    let den = (1..=k128).try_fold(1u128, |acc, i| acc.checked_mul(i));
    const EXACT: u128 = 1 << f64::MANTISSA_DIGITS;
    if let (Some(num), Some(den)) = (num, den) {
        if num < EXACT && den < EXACT {
            return num as f64 / den as f64;
        }
    }
    let kf = k as f64;
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    let ln = (n as f64).ln() + (kf - 2.0) * kf.ln() + (kf - 1.0) * ((d - k) as f64).ln() - ln_fact;
    ln.exp()
}

fn enumeration_guard(g: &RegularGraph, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if g.n() > 64 && k > 4 {
        return Err(Error::Scale(format!(
            "k = {k} on n = {} exceeds the enumeration guard",
            g.n()
        )));
    }
    Ok(())
}

/// Visits every connected induced `k`-vertex set exactly once, each listed
/// with its smallest vertex first (extension-set enumeration).
fn for_each_connected_kset(g: &RegularGraph, k: usize, mut visit: impl FnMut(&[Vertex]) -> Result<()>) -> Result<()> {
    let n = g.n();
    let mut in_sub = vec![false; n];
    // count of current members adjacent to (or equal to) each vertex
    let mut near = vec![0u32; n];
    let mut visited: u64 = 0;

    struct Ctx<'a, F> {
        g: &'a RegularGraph,
        k: usize,
        root: Vertex,
        in_sub: &'a mut [bool],
        near: &'a mut [u32],
        visited: &'a mut u64,
        visit: &'a mut F,
    }

    fn mark(near: &mut [u32], g: &RegularGraph, v: Vertex, delta: i32) {
        near[v as usize] = (near[v as usize] as i32 + delta) as u32;
        for &u in g.neighbors(v) {
            near[u as usize] = (near[u as usize] as i32 + delta) as u32;
        }
    }

    fn extend<F: FnMut(&[Vertex]) -> Result<()>>(
        ctx: &mut Ctx<'_, F>,
        sub: &mut Vec<Vertex>,
        ext: Vec<Vertex>,
    ) -> Result<()> {
        if sub.len() == ctx.k {
            *ctx.visited += 1;
            if *ctx.visited > ENUMERATION_LIMIT {
                return Err(Error::Scale(format!("more than {ENUMERATION_LIMIT} connected sets")));
            }
            return (ctx.visit)(sub);
        }
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            // exclusive neighbours of w: above the root, not in or next to the subgraph
            let mut next = ext.clone();
            for &u in ctx.g.neighbors(w) {
                if u > ctx.root && ctx.near[u as usize] == 0 && !ctx.in_sub[u as usize] {
                    next.push(u);
                }
            }
            sub.push(w);
            ctx.in_sub[w as usize] = true;
            mark(ctx.near, ctx.g, w, 1);
            let r = extend(ctx, sub, next);
            mark(ctx.near, ctx.g, w, -1);
            ctx.in_sub[w as usize] = false;
            sub.pop();
            r?;
        }
        Ok(())
    }

    for root in 0..n as Vertex {
        let ext: Vec<Vertex> = g.neighbors(root).iter().copied().filter(|&u| u > root).collect();
        let mut sub = vec![root];
        in_sub[root as usize] = true;
        mark(&mut near, g, root, 1);
        let mut ctx = Ctx {
            g,
            k,
            root,
            in_sub: &mut in_sub,
            near: &mut near,
            visited: &mut visited,
            visit: &mut visit,
        };
        let r = extend(&mut ctx, &mut sub, ext);
        mark(&mut near, g, root, -1);
        in_sub[root as usize] = false;
        r?;
    }
    Ok(())
}

/// Determinant of an integer matrix by fraction-free elimination.
fn bareiss_det(mut m: Vec<i128>, size: usize) -> Result<i128> {
    if size == 0 {
        return Ok(1);
    }
    let overflow = || Error::Scale("spanning tree count overflows i128".into());
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..size - 1 {
        if m[k * size + k] == 0 {
            match (k + 1..size).find(|&r| m[r * size + k] != 0) {
                Some(r) => {
                    for c in 0..size {
                        m.swap(k * size + c, r * size + c);
                    }
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let a = m[i * size + j].checked_mul(m[k * size + k]).ok_or_else(overflow)?;
                let b = m[i * size + k].checked_mul(m[k * size + j]).ok_or_else(overflow)?;
                m[i * size + j] = a.checked_sub(b).ok_or_else(overflow)? / prev;
            }
        }
        prev = m[k * size + k];
    }
    Ok(sign * m[size * size - 1])
}

/// Spanning trees of `G[set]` by the matrix-tree theorem.
fn spanning_trees(g: &RegularGraph, set: &[Vertex]) -> Result<u128> {
    let k = set.len();
    if k <= 1 {
        return Ok(1);
    }
    let index = |v: Vertex| set.iter().position(|&s| s == v);
    let size = k - 1;
    let mut lap = vec![0i128; size * size];
    for (i, &v) in set.iter().enumerate().skip(1) {
        for &u in g.neighbors(v) {
            if let Some(j) = index(u) {
                lap[(i - 1) * size + (i - 1)] += 1;
                if j > 0 {
                    lap[(i - 1) * size + (j - 1)] -= 1;
                }
            }
        }
    }
    Ok(bareiss_det(lap, size)? as u128)
}

/// Exact number of subtrees of `g` with `k` vertices, counted as distinct
/// edge sets.
pub fn count_trees_bruteforce(g: &RegularGraph, k: usize) -> Result<u128> {
    enumeration_guard(g, k)?;
    if k > g.n() {
        return Ok(0);
    }
    let mut total: u128 = 0;
    for_each_connected_kset(g, k, |set| {
        total += spanning_trees(g, set)?;
        Ok(())
    })?;
    Ok(total)
}

fn triangle_count(g: &RegularGraph) -> u64 {
    let mut t = 0u64;
    for (u, v) in g.edges() {
        t += g.neighbors(v).iter().filter(|&&w| w > v && g.has_edge(u, w)).count() as u64;
    }
    t
}

/// Number of `k`-vertex sets inducing a tree.
pub fn count_acyclic_connected_ksets(g: &RegularGraph, k: usize) -> Result<u128> {
    enumeration_guard(g, k)?;
    let (n, d) = (g.n() as u128, g.d() as u128);
    match k {
        1 => Ok(n),
        2 => Ok(n * d / 2),
        3 => Ok(n * d * (d - 1) / 2 - 3 * triangle_count(g) as u128),
        _ if k > g.n() => Ok(0),
        _ => {
            let mut count: u128 = 0;
            for_each_connected_kset(g, k, |set| {
                let edges: usize = set
                    .iter()
                    .map(|&v| set.iter().filter(|&&u| u > v && g.has_edge(v, u)).count())
                    .sum();
                if edges + 1 == k {
                    count += 1;
                }
                Ok(())
            })?;
            Ok(count)
        }
    }
}
