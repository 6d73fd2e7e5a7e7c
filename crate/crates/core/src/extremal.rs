//! Exact maximum corner-free subsets of small squares.
//!
//! Cells are bits of a `u64` (so `n² ≤ 64`) and each corner is a 3-cell
//! hyperedge. The search is a branch and bound over cells ordered by corner
//! degree; the bound subtracts a greedy packing of disjoint hyperedges that
//! are still completable, since each one forces at least one exclusion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corners::CornerMode;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::sets::{Shape, Subset2D};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub n: usize,
    pub mode: CornerMode,
    pub max_size: usize,
    /// Row-major cell indices of one maximizer.
    pub witness: Vec<(usize, usize)>,
    pub nodes_explored: u64,
    /// `false` when the node budget ran out; `max_size` is then a lower bound.
    pub optimal: bool,
}

impl ExtremalResult {
    pub fn witness_set(&self) -> Subset2D {
        let shape = shape_for(self.n, self.mode).expect("validated on construction");
        Subset2D::from_points(shape, self.witness.iter().copied()).expect("cells in range")
    }

    /// `max_size / n²`.
    pub fn density(&self) -> f64 {
        self.max_size as f64 / (self.n * self.n) as f64
    }
}

fn shape_for(n: usize, mode: CornerMode) -> Result<Shape> {
    Ok(match mode {
        CornerMode::GroupNonZero => Shape::Group(GroupSpec::cyclic(n as u64)?),
        _ => Shape::Grid(n),
    })
}

/// All corners of the `n×n` square as deduplicated 3-cell masks.
pub fn corner_edges(n: usize, mode: CornerMode) -> Vec<u64> {
    let cell = |x: usize, y: usize| 1u64 << (x * n + y);
    let mut edges = Vec::new();
    for k in 0..n {
        for m in 0..n {
            match mode {
                CornerMode::GroupNonZero => {
                    for d in 1..n {
                        edges.push(cell(k, m) | cell((k + d) % n, m) | cell(k, (m + d) % n));
                    }
                }
                CornerMode::GridPositive | CornerMode::GridNonZero => {
                    for d in 1..n.saturating_sub(k.max(m)) {
                        edges.push(cell(k, m) | cell(k + d, m) | cell(k, m + d));
                    }
                    if mode == CornerMode::GridNonZero {
                        for d in 1..=k.min(m) {
                            edges.push(cell(k, m) | cell(k - d, m) | cell(k, m - d));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

struct Search<'a> {
    order: &'a [usize],
    edges: &'a [u64],
    by_cell: &'a [Vec<u64>],
    budget: u64,
    nodes: u64,
    best: usize,
    best_mask: u64,
    exhausted: bool,
}

impl Search<'_> {
    /// Cells that can no longer be included: some edge has its other two
    /// cells included.
    fn forced_out(&self, inc: u64, undecided: u64) -> u64 {
        let mut out = 0;
        let mut rest = undecided;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let bit = 1u64 << c;
            if self.by_cell[c].iter().any(|&e| (e & !bit) & !inc == 0) {
                out |= bit;
            }
        }
        out
    }

    fn bound(&self, inc: u64, undecided: u64) -> usize {
        let mut used = 0u64;
        let mut packing = 0;
        for &e in self.edges {
            let open = e & undecided;
            if open != 0 && e & !(inc | undecided) == 0 && open & used == 0 {
                used |= open;
                packing += 1;
            }
        }
        inc.count_ones() as usize + undecided.count_ones() as usize - packing
    }

    fn run(&mut self, depth: usize, inc: u64, undecided: u64) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        let undecided = undecided & !self.forced_out(inc, undecided);
        if undecided == 0 {
            let size = inc.count_ones() as usize;
            if size > self.best {
                self.best = size;
                self.best_mask = inc;
            }
            return;
        }
        if self.bound(inc, undecided) <= self.best {
            return;
        }
        let mut d = depth;
        while undecided & (1u64 << self.order[d]) == 0 {
            d += 1;
        }
        let bit = 1u64 << self.order[d];
        self.run(d + 1, inc | bit, undecided & !bit);
        self.run(d + 1, inc, undecided & !bit);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub budget: u64,
    /// Split the tree at the first `split_depth` decisions and search the
    /// subtrees in parallel; each subtree is searched independently, so node
    /// counts and results do not depend on scheduling.
    pub split_depth: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 50_000_000, split_depth: 0 }
    }
}

/// Largest corner-free subset of the `n×n` square (grid) or of `Z_n × Z_n`.
pub fn extremal_search(n: usize, mode: CornerMode, budget: u64) -> Result<ExtremalResult> {
    extremal_search_with(n, mode, SearchOptions { budget, split_depth: 0 })
}

pub fn extremal_search_with(n: usize, mode: CornerMode, opts: SearchOptions) -> Result<ExtremalResult> {
    if n == 0 || n * n > 64 {
        return Err(Error::InvalidParameter(format!("extremal search needs 1 <= n <= 8, got {n}")));
    }
    shape_for(n, mode)?;
    let cells = n * n;
    let edges = corner_edges(n, mode);
    let mut by_cell = vec![Vec::new(); cells];
    for &e in &edges {
        let mut m = e;
        while m != 0 {
            let c = m.trailing_zeros() as usize;
            m &= m - 1;
            by_cell[c].push(e);
        }
    }
    let mut order: Vec<usize> = (0..cells).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(by_cell[c].len()), c));
    let all = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };

    let split = opts.split_depth.min(cells);
    let prefixes: Vec<u64> = (0..1u64 << split)
        .map(|bits| (0..split).filter(|&i| bits >> (split - 1 - i) & 1 == 1).map(|i| 1u64 << order[i]).fold(0, |a, b| a | b))
        .collect();
    let fixed: u64 = (0..split).map(|i| 1u64 << order[i]).fold(0, |a, b| a | b);
    let share = (opts.budget / prefixes.len() as u64).max(1);
    let runs: Vec<(usize, u64, u64, bool)> = prefixes
        .par_iter()
        .map(|&inc| {
            let mut s = Search {
                order: &order,
                edges: &edges,
                by_cell: &by_cell,
                budget: share,
                nodes: 0,
                best: 0,
                best_mask: 0,
                exhausted: false,
            };
            let free_of_corners = edges.iter().all(|&e| e & !inc != 0);
            if free_of_corners {
                s.run(split, inc, all & !fixed);
            }
            (s.best, s.best_mask, s.nodes, s.exhausted)
        })
        .collect();
    let mut best = (0usize, 0u64);
    let mut nodes = 0;
    let mut exhausted = false;
    for (b, m, nd, ex) in runs {
        nodes += nd;
        exhausted |= ex;
        if b > best.0 {
            best = (b, m);
        }
    }
    let witness = (0..cells).filter(|&c| best.1 >> c & 1 == 1).map(|c| (c / n, c % n)).collect();
    Ok(ExtremalResult { n, mode, max_size: best.0, witness, nodes_explored: nodes, optimal: !exhausted })
}

/// Checks every `2^{n²}` subset; feasible for `n ≤ 4`.
pub fn extremal_exhaustive(n: usize, mode: CornerMode) -> Result<ExtremalResult> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidParameter(format!("exhaustive enumeration needs 1 <= n <= 4, got {n}")));
    }
    shape_for(n, mode)?;
    let cells = n * n;
    let edges = corner_edges(n, mode);
    let (mut best, mut best_mask) = (0u32, 0u64);
    for mask in 0..1u64 << cells {
        let c = mask.count_ones();
        if c > best && edges.iter().all(|&e| e & mask != e) {
            best = c;
            best_mask = mask;
        }
    }
    let witness = (0..cells).filter(|&c| best_mask >> c & 1 == 1).map(|c| (c / n, c % n)).collect();
    Ok(ExtremalResult {
        n,
        mode,
        max_size: best as usize,
        witness,
        nodes_explored: 1 << cells,
        optimal: true,
    })
}
