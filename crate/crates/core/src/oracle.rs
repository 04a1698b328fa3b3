//! Exhaustive reference computations for tiny instances.
//!
//! Nothing here shares code with the solver in [`crate::ppc`]; these are the
//! ground truth it is tested against.

use thiserror::Error;

use crate::bounds::packing_number;
use crate::design::{blocks_meet, Block, Design, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} is {got}, the oracle is capped at {cap}")]
    TooLarge {
        what: &'static str,
        got: usize,
        cap: usize,
    },
}

pub const MAX_ORACLE_BLOCKS: usize = 25;
pub const MAX_ORACLE_POINTS: usize = 8;

fn max_disjoint(blocks: &[Block]) -> usize {
    fn go(blocks: &[Block], i: usize, chosen: &mut Vec<Block>) -> usize {
        if i == blocks.len() {
            return chosen.len();
        }
        let mut best = go(blocks, i + 1, chosen);
        if chosen.iter().all(|c| !blocks_meet(c, &blocks[i])) {
            chosen.push(blocks[i]);
            best = best.max(go(blocks, i + 1, chosen));
            chosen.pop();
        }
        best
    }
    go(blocks, 0, &mut Vec::new())
}

/// Size of a maximum partial parallel class by trying every subset of
/// pairwise disjoint blocks.
pub fn brute_max_ppc(d: &Design) -> Result<usize, OracleError> {
    if d.b() > MAX_ORACLE_BLOCKS {
        return Err(OracleError::TooLarge {
            what: "block count",
            got: d.b(),
            cap: MAX_ORACLE_BLOCKS,
        });
    }
    Ok(max_disjoint(d.blocks()))
}

/// Outcome of [`brute_beta`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BetaSearch {
    /// The maximum block count, with one design attaining it. `None` when no
    /// design has maximum class `rho`.
    Exact { value: usize, witness: Option<Design> },
    Unknown,
}

/// `beta(rho, v)`: the largest number of blocks in a design on `v` points
/// whose maximum class has size exactly `rho`.
///
/// Triples are scanned in lexicographic order and each is included or
/// skipped. `{0,1,2}` is always included (any nonempty design can be
/// relabelled to contain it). A branch dies as soon as its class size passes
/// `rho`, since adding blocks never shrinks it, or when the unused pairs
/// cannot lift it above the incumbent.
pub fn brute_beta(rho: usize, v: usize, node_limit: u64) -> Result<BetaSearch, OracleError> {
    if v > MAX_ORACLE_POINTS {
        return Err(OracleError::TooLarge {
            what: "point count",
            got: v,
            cap: MAX_ORACLE_POINTS,
        });
    }
    if rho == 0 {
        return Ok(BetaSearch::Exact {
            value: 0,
            witness: Some(Design::empty(v)),
        });
    }
    if v < 3 * rho {
        return Ok(BetaSearch::Exact {
            value: 0,
            witness: None,
        });
    }
    let triples: Vec<Block> = (0..v as Point)
        .flat_map(|a| {
            (a + 1..v as Point).flat_map(move |b| (b + 1..v as Point).map(move |c| [a, b, c]))
        })
        .collect();

    struct Search {
        v: usize,
        rho: usize,
        triples: Vec<Block>,
        pair_used: Vec<bool>,
        free_pairs: usize,
        chosen: Vec<Block>,
        best: Option<Vec<Block>>,
        ceiling: usize,
        nodes: u64,
        limit: u64,
    }

    impl Search {
        fn pairs(&self, b: &Block) -> [usize; 3] {
            let v = self.v;
            let (a, b_, c) = (b[0] as usize, b[1] as usize, b[2] as usize);
            [a * v + b_, a * v + c, b_ * v + c]
        }

        fn best_len(&self) -> Option<usize> {
            self.best.as_ref().map(Vec::len)
        }

        fn add(&mut self, b: Block, on: bool) {
            for p in self.pairs(&b) {
                self.pair_used[p] = on;
            }
            if on {
                self.free_pairs -= 3;
                self.chosen.push(b);
            } else {
                self.free_pairs += 3;
                self.chosen.pop();
            }
        }

        /// `false` when the budget ran out.
        fn run(&mut self, i: usize) -> bool {
            self.nodes += 1;
            if self.nodes > self.limit {
                return false;
            }
            if self.best_len().is_some_and(|b| b >= self.ceiling) {
                return true;
            }
            if max_disjoint(&self.chosen) == self.rho
                && self.best_len().is_none_or(|b| self.chosen.len() > b)
            {
                self.best = Some(self.chosen.clone());
            }
            if i == self.triples.len() {
                return true;
            }
            let reachable = self.chosen.len() + self.free_pairs / 3;
            if self.best_len().is_some_and(|b| reachable <= b) {
                return true;
            }
            let t = self.triples[i];
            if self.pairs(&t).iter().all(|&p| !self.pair_used[p]) {
                self.add(t, true);
                let ok = max_disjoint(&self.chosen) > self.rho || self.run(i + 1);
                self.add(t, false);
                if !ok {
                    return false;
                }
            }
            self.run(i + 1)
        }
    }

    let mut s = Search {
        v,
        rho,
        pair_used: vec![false; v * v],
        free_pairs: v * (v - 1) / 2,
        chosen: Vec::new(),
        best: None,
        ceiling: packing_number(v as u64) as usize,
        nodes: 0,
        limit: node_limit,
        triples,
    };
    s.add([0, 1, 2], true);
    if !s.run(1) {
        return Ok(BetaSearch::Unknown);
    }
    Ok(match s.best {
        Some(blocks) => BetaSearch::Exact {
            value: blocks.len(),
            witness: Some(Design::from_blocks(v, blocks).expect("search keeps designs linear")),
        },
        None => BetaSearch::Exact {
            value: 0,
            witness: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 50_000_000;

    fn value(rho: usize, v: usize) -> (usize, Design) {
        match brute_beta(rho, v, BUDGET).unwrap() {
            BetaSearch::Exact {
                value,
                witness: Some(w),
            } => (value, w),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn max_ppc_small() {
        let raw = [[0, 1, 2], [3, 4, 5], [0, 3, 6], [1, 4, 6], [2, 5, 6]];
        let d = Design::from_blocks(7, raw).unwrap();
        assert_eq!(brute_max_ppc(&d), Ok(2));
        let one = Design::from_blocks(3, [[0, 1, 2]]).unwrap();
        assert_eq!(brute_max_ppc(&one), Ok(1));
        assert_eq!(brute_max_ppc(&Design::empty(2)), Ok(0));
    }

    #[test]
    fn max_ppc_cap() {
        let d = crate::construct::construct_bose(15).unwrap().0;
        assert!(matches!(brute_max_ppc(&d), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn single_block_class_values() {
        let got: Vec<usize> = (3..=6).map(|v| value(1, v).0).collect();
        assert_eq!(got, vec![1, 1, 2, 4]);
        let (_, w) = value(1, 6);
        assert_eq!(w.b(), 4);
        assert_eq!(brute_max_ppc(&w), Ok(1));
    }

    #[test]
    fn seven_points_two_blocks() {
        let (b, w) = value(2, 7);
        assert_eq!(b, 5);
        assert_eq!(brute_max_ppc(&w), Ok(2));
    }

    #[test]
    fn point_cap() {
        assert!(matches!(brute_beta(1, 9, 10), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn budget_gives_unknown() {
        assert_eq!(brute_beta(2, 7, 3), Ok(BetaSearch::Unknown));
    }
}
