//! Sequencings: point orders in which no `3t` consecutive points are a union
//! of `t` blocks, for any `1 <= t <= floor(v/3)`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::design::{Block, Design, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A point order and its verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequencing {
    pub perm: Vec<Point>,
    pub valid: bool,
    /// `(t, start)` of the first window (by `t`, then start) that is a union
    /// of `t` blocks.
    pub violation: Option<(usize, usize)>,
}

impl Sequencing {
    pub fn to_text(&self) -> String {
        perm_to_text(&self.perm)
    }
}

impl fmt::Display for Sequencing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `v=<n>` followed by the permutation on one line.
pub fn perm_to_text(perm: &[Point]) -> String {
    let body: Vec<String> = perm.iter().map(|p| p.to_string()).collect();
    format!("v={}\n{}\n", perm.len(), body.join(" "))
}

pub fn perm_from_text(text: &str) -> Result<Vec<Point>, SequenceError> {
    let mut v = None;
    let mut perm = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("v=") {
            v = Some(rest.trim().parse::<usize>().map_err(|e| SequenceError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?);
            continue;
        }
        for tok in line.split_whitespace() {
            perm.push(tok.parse::<Point>().map_err(|e| SequenceError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?);
        }
    }
    let v = v.ok_or(SequenceError::Parse {
        line: 0,
        msg: "missing v= header".into(),
    })?;
    if perm.len() != v {
        return Err(SequenceError::NotPermutation(v));
    }
    Ok(perm)
}

fn is_permutation(v: usize, perm: &[Point]) -> bool {
    let mut seen = vec![false; v];
    perm.len() == v
        && perm.iter().all(|&p| {
            let p = p as usize;
            p < v && !std::mem::replace(&mut seen[p], true)
        })
}

/// True iff `window` (as a point list) is exactly covered by disjoint blocks
/// of `d` lying inside it.
pub(crate) struct WindowTester<'a> {
    blocks: &'a [Block],
    by_point: Vec<Vec<usize>>,
    in_window: Vec<bool>,
    covered: Vec<bool>,
}

impl<'a> WindowTester<'a> {
    pub(crate) fn new(d: &'a Design) -> Self {
        let mut by_point = vec![Vec::new(); d.v()];
        for (i, b) in d.blocks().iter().enumerate() {
            for &p in b {
                by_point[p as usize].push(i);
            }
        }
        WindowTester {
            blocks: d.blocks(),
            by_point,
            in_window: vec![false; d.v()],
            covered: vec![false; d.v()],
        }
    }

    pub(crate) fn is_union_of_blocks(&mut self, window: &[Point]) -> bool {
        for &p in window {
            self.in_window[p as usize] = true;
        }
        let result = self.cover(window);
        for &p in window {
            self.in_window[p as usize] = false;
        }
        result
    }

    fn cover(&mut self, window: &[Point]) -> bool {
        let Some(&p) = window.iter().find(|&&p| !self.covered[p as usize]) else {
            return true;
        };
        for i in 0..self.by_point[p as usize].len() {
            let b = self.blocks[self.by_point[p as usize][i]];
            if b
                .iter()
                .all(|&q| self.in_window[q as usize] && !self.covered[q as usize])
            {
                b.iter().for_each(|&q| self.covered[q as usize] = true);
                let ok = self.cover(window);
                b.iter().for_each(|&q| self.covered[q as usize] = false);
                if ok {
                    return true;
                }
            }
        }
        false
    }
}

/// Checks every window of length `3t`, `t = 1..=v/3`.
pub fn check_sequencing(d: &Design, perm: &[Point]) -> Result<Sequencing, SequenceError> {
    let v = d.v();
    if !is_permutation(v, perm) {
        return Err(SequenceError::NotPermutation(v));
    }
    let mut tester = WindowTester::new(d);
    let mut violation = None;
    'outer: for t in 1..=v / 3 {
        for start in 0..=v - 3 * t {
            if tester.is_union_of_blocks(&perm[start..start + 3 * t]) {
                violation = Some((t, start));
                break 'outer;
            }
        }
    }
    Ok(Sequencing {
        perm: perm.to_vec(),
        valid: violation.is_none(),
        violation,
    })
}

/// Result of [`find_sequencing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Sequencing),
    /// Every order was ruled out, so the design is not sequenceable.
    ProvenNonsequenceable,
    /// The node budget ran out first; says nothing about sequenceability.
    BudgetExhausted,
}

/// Default node budget for [`find_sequencing`].
pub const DEFAULT_SEQUENCE_BUDGET: u64 = 10_000_000;

/// Depth-first search over prefixes. After appending a point, every window
/// ending there is tested; a prefix is abandoned as soon as one of them is a
/// union of blocks. Window verdicts are memoized by point set.
pub fn find_sequencing(d: &Design, node_limit: u64) -> SearchOutcome {
    struct Search<'a> {
        v: usize,
        tester: WindowTester<'a>,
        memo: HashMap<Vec<Point>, bool>,
        perm: Vec<Point>,
        used: Vec<bool>,
        nodes: u64,
        limit: u64,
    }

    impl Search<'_> {
        fn last_windows_ok(&mut self) -> bool {
            let k = self.perm.len();
            for t in 1..=k / 3 {
                let mut key = self.perm[k - 3 * t..].to_vec();
                key.sort_unstable();
                let bad = match self.memo.get(&key) {
                    Some(&bad) => bad,
                    None => {
                        let bad = self.tester.is_union_of_blocks(&key);
                        self.memo.insert(key, bad);
                        bad
                    }
                };
                if bad {
                    return false;
                }
            }
            true
        }

        /// `Some(true)` found, `Some(false)` exhausted, `None` out of budget.
        fn run(&mut self) -> Option<bool> {
            if self.perm.len() == self.v {
                return Some(true);
            }
            for p in 0..self.v {
                if self.used[p] {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.limit {
                    return None;
                }
                self.used[p] = true;
                self.perm.push(p as Point);
                if self.last_windows_ok() {
                    match self.run() {
                        Some(false) => {}
                        other => return other,
                    }
                }
                self.perm.pop();
                self.used[p] = false;
            }
            Some(false)
        }
    }

    let mut s = Search {
        v: d.v(),
        tester: WindowTester::new(d),
        memo: HashMap::new(),
        perm: Vec::with_capacity(d.v()),
        used: vec![false; d.v()],
        nodes: 0,
        limit: node_limit,
    };
    match s.run() {
        Some(true) => SearchOutcome::Found(Sequencing {
            perm: s.perm,
            valid: true,
            violation: None,
        }),
        Some(false) => SearchOutcome::ProvenNonsequenceable,
        None => SearchOutcome::BudgetExhausted,
    }
}

/// Known sufficient conditions for sequenceability in terms of the maximum
/// class size `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SufficientCondition {
    /// `rho <= 3`.
    SmallClass,
    /// `v >= 15 rho - 5`.
    Linear,
    /// `v >= 9 rho + 22 rho^(2/3) + 10`.
    CubeRoot,
}

/// The conditions that hold for `v` points and maximum class size `rho`.
/// The cube-root test is done exactly: `(v - 9 rho - 10)^3 >= 22^3 rho^2`.
pub fn sufficient_conditions(v: usize, rho: usize) -> Vec<SufficientCondition> {
    let (v, r) = (v as i128, rho as i128);
    let mut out = Vec::new();
    if r <= 3 {
        out.push(SufficientCondition::SmallClass);
    }
    if v >= 15 * r - 5 {
        out.push(SufficientCondition::Linear);
    }
    let lhs = v - 9 * r - 10;
    if lhs >= 0 && lhs * lhs * lhs >= 22 * 22 * 22 * r * r {
        out.push(SufficientCondition::CubeRoot);
    }
    out
}
