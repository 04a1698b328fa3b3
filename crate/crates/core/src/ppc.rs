//! Maximum partial parallel classes.
//!
//! [`solve_max_ppc`] is an exact branch and bound: at each node it takes the
//! lowest-labelled point that still lies in an available block and branches on
//! every available block through that point, then on discarding the point.
//! Nodes are pruned against two admissible bounds on how many more disjoint
//! blocks can be added:
//!
//! * a third of the points still touched by available blocks;
//! * the size of a greedy point cover of the available blocks (each disjoint
//!   block needs its own cover point).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::design::{blocks_meet, canonical_block, Block, Design, Point};

/// A set of pairwise disjoint blocks, maximum when `optimal` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpcResult {
    pub size: usize,
    pub blocks: Vec<Block>,
    /// True when the search finished, so no larger class exists.
    pub optimal: bool,
    /// Search nodes visited.
    pub nodes: u64,
}

/// Default node budget for the exact solver.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// True iff `blocks` are pairwise disjoint blocks of `d`.
pub fn is_ppc(d: &Design, blocks: &[Block]) -> bool {
    blocks.iter().all(|b| d.contains_block(b))
        && blocks
            .iter()
            .enumerate()
            .all(|(i, a)| blocks[i + 1..].iter().all(|b| !blocks_meet(a, b)))
}

/// Takes blocks in canonical order whenever they miss everything taken so far.
pub fn greedy_ppc(d: &Design) -> PpcResult {
    let mut used = vec![false; d.v()];
    let mut blocks = Vec::new();
    for b in d.blocks() {
        if b.iter().all(|&p| !used[p as usize]) {
            b.iter().for_each(|&p| used[p as usize] = true);
            blocks.push(*b);
        }
    }
    PpcResult {
        size: blocks.len(),
        blocks,
        optimal: false,
        nodes: 0,
    }
}

struct Solver<'a> {
    blocks: &'a [Block],
    by_point: Vec<Vec<usize>>,
    /// Nonzero when a point is covered by a chosen block or discarded.
    dead: Vec<u32>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    limit: u64,
    aborted: bool,
    // scratch for the cover bound
    degree: Vec<u32>,
    live: Vec<bool>,
}

impl Solver<'_> {
    fn alive(&self, b: usize) -> bool {
        self.blocks[b].iter().all(|&p| self.dead[p as usize] == 0)
    }

    fn set(&mut self, points: &[Point], on: bool) {
        for &p in points {
            if on {
                self.dead[p as usize] += 1;
            } else {
                self.dead[p as usize] -= 1;
            }
        }
    }

    fn cover_bound(&mut self, avail: &[usize], cap: usize) -> usize {
        for &b in avail {
            for &p in &self.blocks[b] {
                self.degree[p as usize] = 0;
            }
        }
        for &b in avail {
            self.live[b] = true;
            for &p in &self.blocks[b] {
                self.degree[p as usize] += 1;
            }
        }
        let mut remaining = avail.len();
        let mut size = 0;
        while remaining > 0 && size < cap {
            let mut pick = 0usize;
            let mut pick_deg = 0;
            for &b in avail {
                if !self.live[b] {
                    continue;
                }
                for &p in &self.blocks[b] {
                    let deg = self.degree[p as usize];
                    if deg > pick_deg || (deg == pick_deg && (p as usize) < pick) {
                        pick = p as usize;
                        pick_deg = deg;
                    }
                }
            }
            for i in 0..self.by_point[pick].len() {
                let b = self.by_point[pick][i];
                if self.live[b] {
                    self.live[b] = false;
                    remaining -= 1;
                    for &p in &self.blocks[b] {
                        self.degree[p as usize] -= 1;
                    }
                }
            }
            size += 1;
        }
        for &b in avail {
            self.live[b] = false;
        }
        if remaining > 0 {
            cap + 1
        } else {
            size
        }
    }

    fn search(&mut self) {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        let avail: Vec<usize> = (0..self.blocks.len()).filter(|&b| self.alive(b)).collect();
        let Some(&first) = avail.first() else {
            return;
        };
        let need = self.best.len() + 1 - self.chosen.len();

        let mut touched = BTreeSet::new();
        for &b in &avail {
            touched.extend(self.blocks[b]);
        }
        if touched.len() / 3 < need {
            return;
        }
        if self.cover_bound(&avail, need) < need {
            return;
        }

        // blocks are sorted, so the first available block starts at the
        // lowest point that still has a block
        let p = self.blocks[first][0];
        let through: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&b| self.blocks[b].contains(&p))
            .collect();
        for b in through {
            let pts = self.blocks[b];
            self.set(&pts, true);
            self.chosen.push(b);
            self.search();
            self.chosen.pop();
            self.set(&pts, false);
            if self.aborted {
                return;
            }
        }
        self.set(&[p], true);
        self.search();
        self.set(&[p], false);
    }
}

/// Exact maximum partial parallel class within a node budget.
///
/// The greedy class seeds the incumbent. When the budget runs out the best
/// class found so far is returned with `optimal = false`.
pub fn solve_max_ppc(d: &Design, node_limit: u64) -> PpcResult {
    let blocks = d.blocks();
    let mut by_point = vec![Vec::new(); d.v()];
    for (i, b) in blocks.iter().enumerate() {
        for &p in b {
            by_point[p as usize].push(i);
        }
    }
    let greedy = greedy_ppc(d);
    let seed: Vec<usize> = greedy
        .blocks
        .iter()
        .map(|b| blocks.binary_search(b).expect("greedy block in design"))
        .collect();
    let mut s = Solver {
        blocks,
        by_point,
        dead: vec![0; d.v()],
        chosen: Vec::new(),
        best: seed,
        nodes: 0,
        limit: node_limit,
        aborted: false,
        degree: vec![0; d.v()],
        live: vec![false; blocks.len()],
    };
    s.search();
    let mut out: Vec<Block> = s.best.iter().map(|&i| blocks[i]).collect();
    out.sort_unstable();
    PpcResult {
        size: out.len(),
        blocks: out,
        optimal: !s.aborted,
        nodes: s.nodes,
    }
}

/// Which alternative of the Lindner-Phelps dichotomy a class block meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionCondition {
    /// At least two points extend outward and `t_x + t_y + t_z <= 6`.
    Crowded,
    /// At most one point extends outward and the sum is at most
    /// `floor((v - 3 rho) / 2)`.
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockProfile {
    pub block: Block,
    /// `t` for each point of the block, in block order.
    pub t: [usize; 3],
    /// How many points of the block have `t > 0`.
    pub extending: usize,
    pub condition: ExtensionCondition,
}

impl BlockProfile {
    pub fn t_sum(&self) -> usize {
        self.t.iter().sum()
    }
}

/// For a maximum class with covered point set `P`: for every `x` in `P`,
/// `t_x` counts blocks through `x` whose other two points lie outside `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionProfile {
    pub covered: Vec<Point>,
    /// `(x, t_x)` for every covered point, by label.
    pub t: Vec<(Point, usize)>,
    /// Covered points with `t_x > 0`.
    pub extending: Vec<Point>,
    pub blocks: Vec<BlockProfile>,
    /// `floor((v - 3 rho) / 2)`.
    pub outside_limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("the given blocks are not a partial parallel class of the design")]
    NotAPpc,
    #[error("class is not maximum: {0:?} is larger")]
    NotMaximum(Vec<Block>),
    #[error("block {0:?} meets neither alternative although no swap was found")]
    Inconsistent(Block),
}

/// Computes `t_x` for every covered point and classifies each class block.
///
/// If two points `x, y` of one class block have blocks `A` through `x` and
/// `B` through `y`, both otherwise outside `P` and disjoint, swapping the class
/// block for `A` and `B` gives a larger class; that is reported as
/// [`ProfileError::NotMaximum`].
pub fn extension_profile(d: &Design, ppc: &[Block]) -> Result<ExtensionProfile, ProfileError> {
    let ppc: Vec<Block> = ppc.iter().map(|b| canonical_block(*b)).collect();
    if !is_ppc(d, &ppc) {
        return Err(ProfileError::NotAPpc);
    }
    let v = d.v();
    let mut in_p = vec![false; v];
    for b in &ppc {
        b.iter().for_each(|&p| in_p[p as usize] = true);
    }
    let mut tx: Vec<Vec<Block>> = vec![Vec::new(); v];
    for b in d.blocks() {
        let inside: Vec<Point> = b.iter().copied().filter(|&p| in_p[p as usize]).collect();
        if let [x] = inside[..] {
            tx[x as usize].push(*b);
        }
    }
    let outside_limit = (v - 3 * ppc.len()) / 2;
    debug_assert!(tx.iter().all(|t| t.len() <= outside_limit));

    let mut blocks = Vec::with_capacity(ppc.len());
    for (i, b) in ppc.iter().enumerate() {
        for (xi, &x) in b.iter().enumerate() {
            for &y in &b[xi + 1..] {
                for a in &tx[x as usize] {
                    if let Some(c) = tx[y as usize].iter().find(|c| !blocks_meet(a, c)) {
                        let mut bigger: Vec<Block> = ppc
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, blk)| *blk)
                            .chain([*a, *c])
                            .collect();
                        bigger.sort_unstable();
                        return Err(ProfileError::NotMaximum(bigger));
                    }
                }
            }
        }
        let t = b.map(|p| tx[p as usize].len());
        let extending = t.iter().filter(|&&k| k > 0).count();
        let sum: usize = t.iter().sum();
        let condition = if extending >= 2 && sum <= 6 {
            ExtensionCondition::Crowded
        } else if extending <= 1 && sum <= outside_limit {
            ExtensionCondition::Sparse
        } else {
            return Err(ProfileError::Inconsistent(*b));
        };
        blocks.push(BlockProfile {
            block: *b,
            t,
            extending,
            condition,
        });
    }

    let mut covered: Vec<Point> = (0..v as Point).filter(|&p| in_p[p as usize]).collect();
    covered.sort_unstable();
    let t: Vec<(Point, usize)> = covered.iter().map(|&p| (p, tx[p as usize].len())).collect();
    let extending = t.iter().filter(|e| e.1 > 0).map(|e| e.0).collect();
    Ok(ExtensionProfile {
        covered,
        t,
        extending,
        blocks,
        outside_limit,
    })
}
