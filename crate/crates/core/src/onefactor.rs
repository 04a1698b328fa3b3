//! One-factorizations of complete graphs of even order and Room squares.
//!
//! The constructions need `rho` edge-disjoint one-factors of `K_ell` and one
//! edge from each of them such that the chosen edges are pairwise
//! vertex-disjoint. A Room square supplies both at once: the rows whose first
//! cell is filled are one-factors, and the first column is itself a one-factor,
//! so its entries are independent.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::design::Point;

/// An edge `{a, b}` with `a < b`.
pub type Edge = [Point; 2];

pub fn edge(a: Point, b: Point) -> Edge {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("complete graph order {0} is not a positive even number")]
    OddOrder(usize),
    #[error("no Room square of side {0} (sides must be odd, at least 7)")]
    BadSide(usize),
    #[error("no Room square of side {0} found within the search budget")]
    Unconstructible(usize),
    #[error("invalid selection parameters ell={ell}, rho={rho}")]
    BadParameters { ell: usize, rho: usize },
    #[error("K_{ell} has no {rho} edge-disjoint one-factors with independent representatives")]
    Infeasible { ell: usize, rho: usize },
    #[error("search budget exhausted selecting {rho} factors of K_{ell}")]
    BudgetExhausted { ell: usize, rho: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoomError {
    #[error("cell ({row}, {col}) does not hold an edge on 0..{symbols}")]
    CellNotEdge { row: usize, col: usize, symbols: usize },
    #[error("edge {edge:?} occurs {count} times")]
    EdgeMissingOrDoubled { edge: Edge, count: usize },
    #[error("row {row} is not a one-factor")]
    RowNotOneFactor { row: usize },
    #[error("column {col} is not a one-factor")]
    ColNotOneFactor { col: usize },
    #[error("malformed grid: {0}")]
    Shape(String),
}

/// A set of one-factors of `K_order` on vertices `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneFactorization {
    pub order: usize,
    pub factors: Vec<Vec<Edge>>,
}

impl OneFactorization {
    /// True iff every factor is a perfect matching and no edge repeats.
    pub fn is_valid(&self) -> bool {
        let mut seen = HashSet::new();
        self.factors.iter().all(|f| is_one_factor(self.order, f))
            && self
                .factors
                .iter()
                .flatten()
                .all(|e| seen.insert(*e))
    }

    /// A full factorization has `order - 1` factors and covers `K_order`.
    pub fn is_complete(&self) -> bool {
        self.order >= 2 && self.factors.len() == self.order - 1 && self.is_valid()
    }
}

pub fn is_one_factor(order: usize, edges: &[Edge]) -> bool {
    if edges.len() * 2 != order {
        return false;
    }
    let mut hit = vec![false; order];
    for e in edges {
        for &p in e {
            let p = p as usize;
            if p >= order || hit[p] {
                return false;
            }
            hit[p] = true;
        }
    }
    true
}

/// The rotational one-factorization of `K_ell`: vertex `ell - 1` is fixed and
/// factor `r` pairs it with `r`, and pairs `r + i` with `r - i` modulo `ell - 1`.
pub fn round_robin(ell: usize) -> Result<OneFactorization, FactorError> {
    if ell < 2 || !ell.is_multiple_of(2) {
        return Err(FactorError::OddOrder(ell));
    }
    let n = ell - 1;
    let inf = n as Point;
    let factors = (0..n)
        .map(|r| {
            let mut f = vec![edge(r as Point, inf)];
            for i in 1..=(n - 1) / 2 {
                let a = (r + i) % n;
                let b = (r + n - i) % n;
                f.push(edge(a as Point, b as Point));
            }
            f.sort_unstable();
            f
        })
        .collect();
    Ok(OneFactorization { order: ell, factors })
}

/// A Room square of odd side `n` over the symbols `0..=n`.
///
/// Cells are row-major. Row and column numbers in errors and in
/// [`RoomSquare::cell`] are zero-based; the "first column" is column 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomSquare {
    side: usize,
    cells: Vec<Option<Edge>>,
}

impl RoomSquare {
    /// Builds a square from a grid without checking the Room conditions.
    pub fn from_grid(side: usize, grid: Vec<Vec<Option<Edge>>>) -> Result<Self, RoomError> {
        if grid.len() != side || grid.iter().any(|r| r.len() != side) {
            return Err(RoomError::Shape(format!("expected {side}x{side} grid")));
        }
        let cells = grid
            .into_iter()
            .flatten()
            .map(|c| c.map(|[a, b]| if a <= b { [a, b] } else { [b, a] }))
            .collect();
        Ok(RoomSquare { side, cells })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of symbols, `side + 1`.
    pub fn symbols(&self) -> usize {
        self.side + 1
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<Edge> {
        self.cells[row * self.side + col]
    }

    pub fn set_cell(&mut self, row: usize, col: usize, value: Option<Edge>) {
        self.cells[row * self.side + col] = value;
    }

    pub fn row(&self, row: usize) -> Vec<Edge> {
        (0..self.side).filter_map(|c| self.cell(row, c)).collect()
    }

    pub fn column(&self, col: usize) -> Vec<Edge> {
        (0..self.side).filter_map(|r| self.cell(r, col)).collect()
    }

    /// The side-7 square used as the worked example for the eleven-point
    /// construction, symbols `0..=7`.
    pub fn side7_fixture() -> RoomSquare {
        const ROWS: [&str; 7] = [
            "7-0 . . 6-4 . 3-2 5-1",
            "2-6 7-1 . . 0-5 . 4-3",
            "5-4 3-0 7-2 . . 1-6 .",
            ". 6-5 4-1 7-3 . . 2-0",
            "3-1 . 0-6 5-2 7-4 . .",
            ". 4-2 . 1-0 6-3 7-5 .",
            ". . 5-3 . 2-1 0-4 7-6",
        ];
        let mut text = String::from("side=7\n");
        for r in ROWS {
            text.push_str(r);
            text.push('\n');
        }
        RoomSquare::from_text(&text).expect("fixture parses")
    }

    /// Checks the four Room conditions, reporting the first failure.
    pub fn validate(&self) -> Result<(), RoomError> {
        let n = self.side;
        let symbols = n + 1;
        for r in 0..n {
            for c in 0..n {
                if let Some([a, b]) = self.cell(r, c) {
                    if a == b || a as usize >= symbols || b as usize >= symbols {
                        return Err(RoomError::CellNotEdge {
                            row: r,
                            col: c,
                            symbols,
                        });
                    }
                }
            }
        }

        let mut count = vec![0usize; symbols * symbols];
        for &[a, b] in self.cells.iter().flatten() {
            count[a as usize * symbols + b as usize] += 1;
        }
        for a in 0..symbols {
            for b in a + 1..symbols {
                let k = count[a * symbols + b];
                if k != 1 {
                    return Err(RoomError::EdgeMissingOrDoubled {
                        edge: [a as Point, b as Point],
                        count: k,
                    });
                }
            }
        }

        for r in 0..n {
            if !is_one_factor(symbols, &self.row(r)) {
                return Err(RoomError::RowNotOneFactor { row: r });
            }
        }
        for c in 0..n {
            if !is_one_factor(symbols, &self.column(c)) {
                return Err(RoomError::ColNotOneFactor { col: c });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("side={}\n", self.side);
        for r in 0..self.side {
            let row: Vec<String> = (0..self.side)
                .map(|c| match self.cell(r, c) {
                    Some([a, b]) => format!("{a}-{b}"),
                    None => ".".to_string(),
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<RoomSquare, RoomError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| RoomError::Shape("missing side= header".into()))?;
        let side: usize = header
            .strip_prefix("side=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| RoomError::Shape(format!("bad header {header:?}")))?;
        let mut grid = Vec::with_capacity(side);
        for line in lines {
            let row = line
                .split_whitespace()
                .map(parse_cell)
                .collect::<Result<Vec<_>, _>>()?;
            grid.push(row);
        }
        RoomSquare::from_grid(side, grid)
    }
}

fn parse_cell(tok: &str) -> Result<Option<Edge>, RoomError> {
    if tok == "." {
        return Ok(None);
    }
    let (a, b) = tok
        .split_once('-')
        .ok_or_else(|| RoomError::Shape(format!("bad cell {tok:?}")))?;
    let a = a
        .parse()
        .map_err(|_| RoomError::Shape(format!("bad cell {tok:?}")))?;
    let b = b
        .parse()
        .map_err(|_| RoomError::Shape(format!("bad cell {tok:?}")))?;
    Ok(Some(edge(a, b)))
}

impl fmt::Display for RoomSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Knobs for [`room_square_with`].
#[derive(Debug, Clone)]
pub struct RoomConfig {
    /// When false, only the stored side-7 square is available.
    pub generate: bool,
    /// Wall-clock limit for the strong starter search.
    pub starter_time: Duration,
    /// Node limit for the fallback orthogonal-factorization search.
    pub grid_nodes: u64,
}

impl Default for RoomConfig {
    fn default() -> Self {
        RoomConfig {
            generate: true,
            starter_time: Duration::from_secs(10),
            grid_nodes: 50_000_000,
        }
    }
}

pub fn room_square(side: usize) -> Result<RoomSquare, FactorError> {
    room_square_with(side, &RoomConfig::default())
}

/// Produces a validated Room square of the given odd side.
///
/// Tries a strong starter in the cyclic group first; if none turns up (there
/// is none for side 9) it searches for a one-factorization orthogonal to the
/// rotational one.
pub fn room_square_with(side: usize, cfg: &RoomConfig) -> Result<RoomSquare, FactorError> {
    if side.is_multiple_of(2) || side < 7 {
        return Err(FactorError::BadSide(side));
    }
    if !cfg.generate {
        return if side == 7 {
            Ok(RoomSquare::side7_fixture())
        } else {
            Err(FactorError::Unconstructible(side))
        };
    }
    let square = match strong_starter(side, cfg.starter_time) {
        Some(starter) => from_starter(side, &starter),
        None => orthogonal_mate_square(side, cfg.grid_nodes)
            .ok_or(FactorError::Unconstructible(side))?,
    };
    debug_assert!(square.validate().is_ok());
    Ok(square)
}

/// Searches `Z_n` for a strong starter: pairs partitioning the nonzero
/// elements whose differences cover every nonzero element once (up to sign)
/// and whose sums are distinct and nonzero.
///
/// Partners are tried in decreasing order; for `n = 7` the first hit is
/// `{1,5}, {2,3}, {4,6}`.
pub fn strong_starter(n: usize, limit: Duration) -> Option<Vec<Edge>> {
    struct Search {
        n: usize,
        used: Vec<bool>,
        diff_used: Vec<bool>,
        sum_used: Vec<bool>,
        pairs: Vec<Edge>,
        deadline: Instant,
        steps: u64,
        timed_out: bool,
    }

    impl Search {
        fn run(&mut self) -> bool {
            self.steps += 1;
            if self.steps.is_multiple_of(4096) && Instant::now() > self.deadline {
                self.timed_out = true;
            }
            if self.timed_out {
                return false;
            }
            let Some(x) = (1..self.n).find(|&x| !self.used[x]) else {
                return true;
            };
            self.used[x] = true;
            for y in (x + 1..self.n).rev() {
                if self.used[y] {
                    continue;
                }
                let d = (y - x).min(self.n - (y - x));
                let s = (x + y) % self.n;
                if self.diff_used[d] || s == 0 || self.sum_used[s] {
                    continue;
                }
                self.used[y] = true;
                self.diff_used[d] = true;
                self.sum_used[s] = true;
                self.pairs.push([x as Point, y as Point]);
                if self.run() {
                    return true;
                }
                self.pairs.pop();
                self.used[y] = false;
                self.diff_used[d] = false;
                self.sum_used[s] = false;
            }
            self.used[x] = false;
            false
        }
    }

    if n < 3 || n.is_multiple_of(2) {
        return None;
    }
    let mut s = Search {
        n,
        used: vec![false; n],
        diff_used: vec![false; n],
        sum_used: vec![false; n],
        pairs: Vec::new(),
        deadline: Instant::now() + limit,
        steps: 0,
        timed_out: false,
    };
    s.run().then_some(s.pairs)
}

/// Starter-adder square: row `g` holds `{inf, g}` on the diagonal and the
/// translate `{x+g, y+g}` in column `g + x + y`.
fn from_starter(n: usize, starter: &[Edge]) -> RoomSquare {
    let inf = n as Point;
    let mut square = RoomSquare {
        side: n,
        cells: vec![None; n * n],
    };
    for g in 0..n {
        square.set_cell(g, g, Some(edge(inf, g as Point)));
        for &[x, y] in starter {
            let (x, y) = (x as usize, y as usize);
            let col = (g + x + y) % n;
            let e = edge(((x + g) % n) as Point, ((y + g) % n) as Point);
            square.set_cell(g, col, Some(e));
        }
    }
    square
}

/// Fixes the rows to the rotational factorization of `K_{n+1}` and searches
/// column by column for an orthogonal one-factorization. Column `c` is forced
/// to contain the edge at vertex 0 in row `c`, which removes the column
/// permutation symmetry.
fn orthogonal_mate_square(n: usize, node_limit: u64) -> Option<RoomSquare> {
    let ell = n + 1;
    let rows = round_robin(ell).ok()?;
    let mut row_of = vec![usize::MAX; ell * ell];
    for (r, f) in rows.factors.iter().enumerate() {
        for &[a, b] in f {
            row_of[a as usize * ell + b as usize] = r;
            row_of[b as usize * ell + a as usize] = r;
        }
    }
    let first_edge: Vec<Edge> = rows
        .factors
        .iter()
        .map(|f| *f.iter().find(|e| e[0] == 0).expect("vertex 0 in every factor"))
        .collect();

    struct Mate<'a> {
        n: usize,
        ell: usize,
        row_of: &'a [usize],
        first_edge: &'a [Edge],
        edge_used: Vec<bool>,
        // per column: vertices matched, rows used
        matched: Vec<bool>,
        row_used: Vec<bool>,
        columns: Vec<Vec<Edge>>,
        nodes: u64,
        limit: u64,
    }

    impl Mate<'_> {
        fn place(&mut self, col: usize, e: Edge, on: bool) {
            let (a, b) = (e[0] as usize, e[1] as usize);
            self.edge_used[a * self.ell + b] = on;
            self.matched[a] = on;
            self.matched[b] = on;
            self.row_used[self.row_of[a * self.ell + b]] = on;
            if on {
                self.columns[col].push(e);
            } else {
                self.columns[col].pop();
            }
        }

        fn start_column(&mut self, col: usize) -> bool {
            if col == self.n {
                return true;
            }
            self.matched.iter_mut().for_each(|m| *m = false);
            self.row_used.iter_mut().for_each(|u| *u = false);
            let e = self.first_edge[col];
            self.place(col, e, true);
            if self.fill(col) {
                return true;
            }
            self.place(col, e, false);
            false
        }

        fn fill(&mut self, col: usize) -> bool {
            self.nodes += 1;
            if self.nodes > self.limit {
                return false;
            }
            let Some(u) = (0..self.ell).find(|&u| !self.matched[u]) else {
                let saved = (self.matched.clone(), self.row_used.clone());
                if self.start_column(col + 1) {
                    return true;
                }
                (self.matched, self.row_used) = saved;
                return false;
            };
            for w in u + 1..self.ell {
                if self.matched[w] || self.edge_used[u * self.ell + w] {
                    continue;
                }
                if self.row_used[self.row_of[u * self.ell + w]] {
                    continue;
                }
                let e = [u as Point, w as Point];
                self.place(col, e, true);
                if self.fill(col) {
                    return true;
                }
                self.place(col, e, false);
            }
            false
        }
    }

    let mut m = Mate {
        n,
        ell,
        row_of: &row_of,
        first_edge: &first_edge,
        edge_used: vec![false; ell * ell],
        matched: vec![false; ell],
        row_used: vec![false; n],
        columns: vec![Vec::new(); n],
        nodes: 0,
        limit: node_limit,
    };
    if !m.start_column(0) {
        return None;
    }
    let mut square = RoomSquare {
        side: n,
        cells: vec![None; n * n],
    };
    for (c, column) in m.columns.iter().enumerate() {
        for &[a, b] in column {
            square.set_cell(row_of[a as usize * ell + b as usize], c, Some([a, b]));
        }
    }
    Some(square)
}

/// How to pick the one-factors for the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionStrategy {
    /// Rows of a Room square through its first column.
    #[default]
    Room,
    /// Factors of the rotational factorization plus a searched
    /// system of independent representatives.
    RoundRobin,
}

/// `rho` edge-disjoint one-factors with one representative edge each; the
/// representatives are pairwise vertex-disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSelection {
    pub order: usize,
    pub factors: Vec<Vec<Edge>>,
    pub reps: Vec<Edge>,
}

impl FactorSelection {
    pub fn is_valid(&self) -> bool {
        let fact = OneFactorization {
            order: self.order,
            factors: self.factors.clone(),
        };
        let mut hit = HashSet::new();
        fact.is_valid()
            && self.reps.len() == self.factors.len()
            && self
                .reps
                .iter()
                .zip(&self.factors)
                .all(|(r, f)| f.contains(r))
            && self.reps.iter().flatten().all(|p| hit.insert(*p))
    }
}

/// Node budget for the representative search of the round-robin strategy.
const SDR_NODE_LIMIT: u64 = 10_000_000;

/// Chooses `rho` factors of `K_ell` and independent representatives.
///
/// Orders 2 and 6 use fixed factor lists; `(ell, rho) = (4, 2)` is infeasible.
/// Otherwise the Room strategy needs `ell >= 8` and falls back to the
/// round-robin strategy below that.
pub fn select_factors(
    ell: usize,
    rho: usize,
    strategy: SelectionStrategy,
) -> Result<FactorSelection, FactorError> {
    if ell < 2 || !ell.is_multiple_of(2) || rho == 0 || ell < 2 * rho {
        return Err(FactorError::BadParameters { ell, rho });
    }
    if (ell, rho) == (4, 2) {
        return Err(FactorError::Infeasible { ell, rho });
    }
    if ell == 2 {
        return Ok(FactorSelection {
            order: 2,
            factors: vec![vec![[0, 1]]],
            reps: vec![[0, 1]],
        });
    }
    if ell == 6 {
        let factors = [
            [[0, 3], [1, 4], [2, 5]],
            [[0, 1], [2, 3], [4, 5]],
            [[1, 2], [3, 4], [0, 5]],
        ];
        let reps = [[0, 3], [4, 5], [1, 2]];
        return Ok(FactorSelection {
            order: 6,
            factors: factors[..rho].iter().map(|f| f.to_vec()).collect(),
            reps: reps[..rho].to_vec(),
        });
    }
    match strategy {
        SelectionStrategy::Room if ell >= 8 => {
            let square = room_square(ell - 1)?;
            let (factors, reps) = (0..square.side())
                .filter_map(|r| square.cell(r, 0).map(|e| (square.row(r), e)))
                .take(rho)
                .unzip();
            Ok(FactorSelection {
                order: ell,
                factors,
                reps,
            })
        }
        _ => round_robin_selection(ell, rho),
    }
}

fn round_robin_selection(ell: usize, rho: usize) -> Result<FactorSelection, FactorError> {
    let all = round_robin(ell)?.factors;

    // Pick factors in increasing index order, each with an edge avoiding the
    // vertices already used by earlier representatives.
    fn search(
        all: &[Vec<Edge>],
        rho: usize,
        start: usize,
        hit: &mut [bool],
        picked: &mut Vec<(usize, Edge)>,
        nodes: &mut u64,
    ) -> Option<bool> {
        if picked.len() == rho {
            return Some(true);
        }
        *nodes += 1;
        if *nodes > SDR_NODE_LIMIT {
            return None;
        }
        for fi in start..all.len() {
            if all.len() - fi < rho - picked.len() {
                break;
            }
            for &e in &all[fi] {
                let (a, b) = (e[0] as usize, e[1] as usize);
                if hit[a] || hit[b] {
                    continue;
                }
                hit[a] = true;
                hit[b] = true;
                picked.push((fi, e));
                match search(all, rho, fi + 1, hit, picked, nodes) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                picked.pop();
                hit[a] = false;
                hit[b] = false;
            }
        }
        Some(false)
    }

    let mut hit = vec![false; ell];
    let mut picked = Vec::with_capacity(rho);
    let mut nodes = 0;
    match search(&all, rho, 0, &mut hit, &mut picked, &mut nodes) {
        Some(true) => Ok(FactorSelection {
            order: ell,
            factors: picked.iter().map(|&(fi, _)| all[fi].clone()).collect(),
            reps: picked.iter().map(|&(_, e)| e).collect(),
        }),
        Some(false) => Err(FactorError::Infeasible { ell, rho }),
        None => Err(FactorError::BudgetExhausted { ell, rho }),
    }
}
