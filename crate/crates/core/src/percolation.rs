//! Site percolation: seeded vertex retention and the coin-driven
//! depth-first exploration.
//!
//! The exploration keeps four vertex classes: `S` (exploration finished),
//! `T` (untouched), `U` (the active stack) and `W` (discovered but rejected).
//! Every vertex receives exactly one coin, at the moment it leaves `T`, so a
//! run consumes exactly `n` coins and its accepted set has the same law as an
//! independent Bernoulli(`p`) vertex sample. Each maximal stretch during
//! which `U` is nonempty (an *epoch*) traces one connected component of the
//! induced subgraph on the accepted vertices.

use serde::{Deserialize, Serialize};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::graph::{RegularGraph, Vertex, VertexSet};
use crate::rng::counter_bernoulli;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationSample {
    p: f64,
    seed: u64,
    membership: VertexSet,
}

impl PercolationSample {
    /// Wraps an explicit retained set (e.g. the accepted set of an exploration).
    pub fn from_set(p: f64, seed: u64, membership: VertexSet) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p, seed, membership })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn membership(&self) -> &VertexSet {
        &self.membership
    }

    pub fn n(&self) -> usize {
        self.membership.universe()
    }

    pub fn retained_count(&self) -> usize {
        self.membership.len()
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.membership.contains(v)
    }
}

/// Retains each of `n` vertices independently with probability `p`.
/// Vertex `v` is kept iff the `v`-th counter draw under `seed` is below `p`.
pub fn sample_vertices(n: usize, p: f64, seed: u64) -> Result<PercolationSample> {
    check_probability(p)?;
    let mut membership = VertexSet::new(n);
    for v in 0..n as u64 {
        if counter_bernoulli(seed, v, p) {
            membership.insert(v as Vertex);
        }
    }
    Ok(PercolationSample { p, seed, membership })
}

/// A source of coin flips for the exploration.
pub trait CoinSource {
    /// Next coin, or `None` if the source is exhausted.
    fn flip(&mut self) -> Option<bool>;
    fn consumed(&self) -> usize;
    /// Coins left, if the source is finite.
    fn remaining(&self) -> Option<usize> {
        None
    }
}

/// Counter-based Bernoulli(`p`) stream: draw `i` depends only on `(seed, i)`.
#[derive(Debug, Clone)]
pub struct CoinStream {
    seed: u64,
    p: f64,
    consumed: usize,
}

impl CoinStream {
    pub fn new(seed: u64, p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { seed, p, consumed: 0 })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn draw(&self, i: usize) -> bool {
        counter_bernoulli(self.seed, i as u64, self.p)
    }

    /// The first `len` draws.
    pub fn prefix(&self, len: usize) -> Vec<bool> {
        (0..len).map(|i| self.draw(i)).collect()
    }
}

impl CoinSource for CoinStream {
    fn flip(&mut self) -> Option<bool> {
        let x = self.draw(self.consumed);
        self.consumed += 1;
        Some(x)
    }

    fn consumed(&self) -> usize {
        self.consumed
    }
}

/// A fixed, finite coin sequence.
#[derive(Debug, Clone)]
pub struct ScriptedCoins {
    coins: Vec<bool>,
    pos: usize,
}

impl ScriptedCoins {
    pub fn new(coins: Vec<bool>) -> Self {
        Self { coins, pos: 0 }
    }

    pub fn constant(value: bool, len: usize) -> Self {
        Self::new(vec![value; len])
    }
}

impl CoinSource for ScriptedCoins {
    fn flip(&mut self) -> Option<bool> {
        let x = self.coins.get(self.pos).copied();
        if x.is_some() {
            self.pos += 1;
        }
        x
    }

    fn consumed(&self) -> usize {
        self.pos
    }

    fn remaining(&self) -> Option<usize> {
        Some(self.coins.len() - self.pos)
    }
}

/// Vertex priority σ used both for choosing the next root from `T` and for
/// scanning neighbors of the stack top.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Priority {
    #[default]
    Identity,
    /// `order[i]` is the vertex of rank `i`.
    Order(Vec<Vertex>),
}

impl Priority {
    fn ranks(&self, n: usize) -> Result<Option<Vec<u32>>> {
        match self {
            Priority::Identity => Ok(None),
            Priority::Order(order) => {
                if order.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "priority has {} entries for {n} vertices",
                        order.len()
                    )));
                }
                let mut rank = vec![u32::MAX; n];
                for (i, &v) in order.iter().enumerate() {
                    let slot = rank
                        .get_mut(v as usize)
                        .ok_or_else(|| Error::InvalidInput(format!("priority lists vertex {v} out of range")))?;
                    if *slot != u32::MAX {
                        return Err(Error::InvalidInput(format!("priority repeats vertex {v}")));
                    }
                    *slot = i as u32;
                }
                Ok(Some(rank))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Untouched,
    Active,
    Done,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsTrace {
    /// Coin index (0-based) of the acceptance that opened each epoch.
    pub epoch_starts: Vec<usize>,
    /// Epoch id for accepted vertices, `None` for rejected ones.
    pub component_of: Vec<Option<u32>>,
    pub accepted_order: Vec<Vertex>,
    /// Coins flipped during each epoch, the opening coin included.
    pub queries_per_epoch: Vec<usize>,
    pub epoch_sizes: Vec<usize>,
    pub s_count: usize,
    pub w_count: usize,
    pub coins_consumed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfsSummary {
    pub epochs: usize,
    pub largest_epoch: usize,
    pub coins_consumed: usize,
    pub accepted: usize,
    pub rejected: usize,
}

impl DfsTrace {
    pub fn epochs(&self) -> usize {
        self.epoch_starts.len()
    }

    pub fn summary(&self) -> DfsSummary {
        DfsSummary {
            epochs: self.epochs(),
            largest_epoch: self.epoch_sizes.iter().copied().max().unwrap_or(0),
            coins_consumed: self.coins_consumed,
            accepted: self.s_count,
            rejected: self.w_count,
        }
    }

    pub fn accepted_set(&self) -> VertexSet {
        let mut s = VertexSet::new(self.component_of.len());
        for &v in &self.accepted_order {
            s.insert(v);
        }
        s
    }

    /// Accepted set as a sample carrying the stream's `p` and seed.
    pub fn to_sample(&self, p: f64, seed: u64) -> Result<PercolationSample> {
        PercolationSample::from_set(p, seed, self.accepted_set())
    }

    /// Epoch partition relabelled canonically.
    pub fn partition(&self) -> ComponentLabels {
        ComponentLabels::canonical_from(&self.component_of)
    }
}

/// Runs the exploration on `g` with coins from `coins`.
///
/// The source must be fresh and, if finite, hold at least `n` coins.
pub fn run_dfs<C: CoinSource>(g: &RegularGraph, coins: &mut C, priority: &Priority) -> Result<DfsTrace> {
    let n = g.n();
    if coins.consumed() != 0 {
        return Err(Error::InvalidInput("coin source must be fresh".into()));
    }
    if let Some(r) = coins.remaining() {
        if r < n {
            return Err(Error::InvalidInput(format!("coin source holds {r} coins, need {n}")));
        }
    }
    let ranks = priority.ranks(n)?;
    // neighbor lists in σ order; sorted ids already are for the identity
    let reordered: Option<Vec<Vertex>> = ranks.as_ref().map(|rank| {
        let mut flat = Vec::with_capacity(n * g.d());
        for v in 0..n as Vertex {
            let mut list = g.neighbors(v).to_vec();
            list.sort_unstable_by_key(|&u| rank[u as usize]);
            flat.extend_from_slice(&list);
        }
        flat
    });
    let d = g.d();
    let scan = |v: Vertex| -> &[Vertex] {
        match &reordered {
            Some(flat) => &flat[v as usize * d..(v as usize + 1) * d],
            None => g.neighbors(v),
        }
    };
    let root_order: Vec<Vertex> = match priority {
        Priority::Identity => (0..n as Vertex).collect(),
        Priority::Order(order) => order.clone(),
    };

    let mut state = vec![State::Untouched; n];
    let mut cursor = vec![0u32; n];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut trace = DfsTrace {
        epoch_starts: Vec::new(),
        component_of: vec![None; n],
        accepted_order: Vec::new(),
        queries_per_epoch: Vec::new(),
        epoch_sizes: Vec::new(),
        s_count: 0,
        w_count: 0,
        coins_consumed: 0,
    };
    let mut flip = |consumed: &mut usize| -> bool {
        *consumed += 1;
        coins
            .flip()
            .expect("coin source exhausted before every vertex was decided")
    };
    let mut next_root = 0usize;
    let mut epoch_first_accept = 0usize;

    loop {
        if let Some(&top) = stack.last() {
            let list = scan(top);
            let c = &mut cursor[top as usize];
            while (*c as usize) < list.len() && state[list[*c as usize] as usize] != State::Untouched {
                *c += 1;
            }
            if (*c as usize) < list.len() {
                let u = list[*c as usize];
                let epoch = trace.epoch_starts.len() as u32 - 1;
                *trace.queries_per_epoch.last_mut().unwrap() += 1;
                if flip(&mut trace.coins_consumed) {
                    state[u as usize] = State::Active;
                    trace.component_of[u as usize] = Some(epoch);
                    trace.accepted_order.push(u);
                    *trace.epoch_sizes.last_mut().unwrap() += 1;
                    stack.push(u);
                } else {
                    state[u as usize] = State::Rejected;
                    trace.w_count += 1;
                }
            } else {
                stack.pop();
                state[top as usize] = State::Done;
                trace.s_count += 1;
                if stack.is_empty() {
                    debug_assert!(
                        frontier_contained(g, &state, &trace.accepted_order[epoch_first_accept..]),
                        "a finished vertex has an untouched neighbor"
                    );
                }
            }
            continue;
        }
        while next_root < n && state[root_order[next_root] as usize] != State::Untouched {
            next_root += 1;
        }
        if next_root == n {
            break;
        }
        let v = root_order[next_root];
        let index = trace.coins_consumed;
        if flip(&mut trace.coins_consumed) {
            let epoch = trace.epoch_starts.len() as u32;
            trace.epoch_starts.push(index);
            trace.queries_per_epoch.push(1);
            trace.epoch_sizes.push(1);
            epoch_first_accept = trace.accepted_order.len();
            state[v as usize] = State::Active;
            trace.component_of[v as usize] = Some(epoch);
            trace.accepted_order.push(v);
            stack.push(v);
        } else {
            state[v as usize] = State::Rejected;
            trace.w_count += 1;
        }
    }
    assert_eq!(trace.coins_consumed, n, "exactly one coin per vertex");
    Ok(trace)
}

/// `N_G(S_epoch) ⊆ U ∪ W`: no vertex finished in the epoch touches `T`.
fn frontier_contained(g: &RegularGraph, state: &[State], finished: &[Vertex]) -> bool {
    finished
        .iter()
        .all(|&v| g.neighbors(v).iter().all(|&u| state[u as usize] != State::Untouched))
}

/// Component labels over retained vertices, numbered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabels {
    pub label: Vec<Option<u32>>,
    pub count: usize,
}

impl ComponentLabels {
    fn canonical_from(raw: &[Option<u32>]) -> Self {
        let mut remap: Vec<u32> = Vec::new();
        let mut label = vec![None; raw.len()];
        let mut count = 0u32;
        for (v, r) in raw.iter().enumerate() {
            if let Some(r) = *r {
                let r = r as usize;
                if r >= remap.len() {
                    remap.resize(r + 1, u32::MAX);
                }
                if remap[r] == u32::MAX {
                    remap[r] = count;
                    count += 1;
                }
                label[v] = Some(remap[r]);
            }
        }
        Self {
            label,
            count: count as usize,
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for l in self.label.iter().flatten() {
            sizes[*l as usize] += 1;
        }
        sizes
    }
}

/// Components of `G[V_p]` by union-find over edges with both ends retained.
pub fn components_oracle(g: &RegularGraph, sample: &PercolationSample) -> ComponentLabels {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for v in sample.membership().iter() {
        for &u in g.neighbors(v) {
            if u > v && sample.contains(u) {
                uf.union(v, u);
            }
        }
    }
    let raw: Vec<Option<u32>> = (0..n as Vertex)
        .map(|v| sample.contains(v).then(|| uf.find(v)))
        .collect();
    ComponentLabels::canonical_from(&raw)
}

/// Components of `g` itself.
pub fn components_oracle_full(g: &RegularGraph) -> ComponentLabels {
    let all = PercolationSample::from_set(1.0, 0, VertexSet::full(g.n())).expect("p = 1 is valid");
    components_oracle(g, &all)
}
