//! Designs whose maximum partial parallel class has a prescribed size.
//!
//! Point layout: the `ell` graph vertices are `0..ell` and the `rho` adjoined
//! points `s_1..s_rho` are `ell..ell + rho`, i.e. the top `rho` labels.
//!
//! * [`base`]: adjoin `s_j` to every edge of the `j`-th selected one-factor.
//!   Every block meets `S = {s_j}`, so no class exceeds `rho`, and the blocks
//!   through the representative edges form a class of size `rho`.
//! * [`packed`]: add a maximum packing on `S`; every block still meets `S`.
//! * [`trimmed`]: delete a graph vertex missed by all representatives together
//!   with its `rho` blocks, then close up the labels.

use thiserror::Error;

use crate::bounds::packing_number;
use crate::design::{blocks_meet, Block, Design, DesignError, Point};
use crate::onefactor::{select_factors, FactorError, SelectionStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("no packing with {target} blocks on {points} points found within budget (best {found})")]
    PackingShortfall {
        points: usize,
        target: usize,
        found: usize,
    },
    #[error("packing search is capped at {cap} points, asked for {points}")]
    PackingTooLarge { points: usize, cap: usize },
    #[error("point count {0} is not 3 mod 6")]
    BadResidue(usize),
    #[error("removing a point needs ell > 2 rho (ell={ell}, rho={rho})")]
    NoDeletablePoint { ell: usize, rho: usize },
}

/// Which construction produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Base,
    Packed,
    Trimmed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionWitness {
    pub design: Design,
    /// Claimed size of a maximum class.
    pub rho: usize,
    /// `rho` disjoint blocks, the ones through the representative edges.
    pub witness_ppc: Vec<Block>,
    /// Labels of `s_1..s_rho`.
    pub s_points: Vec<Point>,
    pub ell: usize,
    pub variant: Variant,
}

impl ConstructionWitness {
    /// Expected block count for this variant.
    pub fn expected_blocks(&self) -> usize {
        let (rho, ell) = (self.rho, self.ell);
        let d = packing_number(rho as u64) as usize;
        match self.variant {
            Variant::Base => rho * ell / 2,
            Variant::Packed => rho * ell / 2 + d,
            Variant::Trimmed => rho * ell / 2 + d - rho,
        }
    }

    /// Every block meets `S`.
    pub fn blocks_meet_s(&self) -> bool {
        self.design
            .blocks()
            .iter()
            .all(|b| b.iter().any(|p| self.s_points.contains(p)))
    }

    /// Comment lines for the design file: a summary and one `ppc:` line per
    /// witness block.
    pub fn comments(&self) -> Vec<String> {
        let name = match self.variant {
            Variant::Base => "base",
            Variant::Packed => "packed",
            Variant::Trimmed => "trimmed",
        };
        let mut out = vec![
            format!("construction: {name} rho={} ell={}", self.rho, self.ell),
            format!("s-points: {:?}", self.s_points),
        ];
        out.extend(
            self.witness_ppc
                .iter()
                .map(|b| format!("ppc: {} {} {}", b[0], b[1], b[2])),
        );
        out
    }
}

/// `rho * ell / 2` blocks on `rho + ell` points with maximum class `rho`.
pub fn base(
    rho: usize,
    ell: usize,
    strategy: SelectionStrategy,
) -> Result<ConstructionWitness, ConstructError> {
    let sel = select_factors(ell, rho, strategy)?;
    let s_points: Vec<Point> = (0..rho).map(|j| (ell + j) as Point).collect();
    let mut blocks = Vec::with_capacity(rho * ell / 2);
    let mut witness = Vec::with_capacity(rho);
    for (j, (factor, rep)) in sel.factors.iter().zip(&sel.reps).enumerate() {
        let s = s_points[j];
        for e in factor {
            blocks.push([e[0], e[1], s]);
        }
        witness.push([rep[0], rep[1], s]);
    }
    let design = Design::from_blocks(rho + ell, blocks)?;
    witness.sort_unstable();
    Ok(ConstructionWitness {
        design,
        rho,
        witness_ppc: witness,
        s_points,
        ell,
        variant: Variant::Base,
    })
}

/// [`base`] plus a maximum packing on `S`: `rho * ell / 2 + D(rho)` blocks.
pub fn packed(
    rho: usize,
    ell: usize,
    strategy: SelectionStrategy,
) -> Result<ConstructionWitness, ConstructError> {
    let mut w = base(rho, ell, strategy)?;
    let packing = max_packing(rho)?;
    let extra = packing
        .blocks()
        .iter()
        .map(|b| b.map(|p| w.s_points[p as usize]));
    w.design = Design::from_blocks(rho + ell, w.design.blocks().iter().copied().chain(extra))?;
    w.variant = Variant::Packed;
    Ok(w)
}

/// [`packed`] on `rho + ell` points with the smallest graph vertex outside the
/// representatives removed: `rho + ell - 1` points and
/// `rho * ell / 2 + D(rho) - rho` blocks.
pub fn trimmed(
    rho: usize,
    ell: usize,
    strategy: SelectionStrategy,
) -> Result<ConstructionWitness, ConstructError> {
    if ell <= 2 * rho {
        return Err(ConstructError::NoDeletablePoint { ell, rho });
    }
    let w = packed(rho, ell, strategy)?;
    let x = (0..ell as Point)
        .find(|p| w.witness_ppc.iter().all(|b| !b.contains(p)))
        .expect("ell > 2 rho leaves a vertex outside the representatives");
    let shift = |p: Point| if p > x { p - 1 } else { p };
    let kept = w
        .design
        .blocks()
        .iter()
        .filter(|b| !b.contains(&x))
        .map(|b| b.map(shift));
    let design = Design::from_blocks(rho + ell - 1, kept)?;
    let mut witness_ppc: Vec<Block> = w.witness_ppc.iter().map(|b| b.map(shift)).collect();
    witness_ppc.iter_mut().for_each(|b| b.sort_unstable());
    Ok(ConstructionWitness {
        design,
        rho,
        witness_ppc,
        s_points: w.s_points.iter().map(|&p| shift(p)).collect(),
        ell,
        variant: Variant::Trimmed,
    })
}

/// Default cap on [`max_packing`].
pub const PACKING_CAP: usize = 13;

const PACKING_NODE_LIMIT: u64 = 20_000_000;

/// Fixed maximum packings for up to nine points.
fn packing_fixture(points: usize) -> Option<Vec<Block>> {
    const FANO: [Block; 7] = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    // affine plane of order 3 on (x, y) -> 3x + y
    const AG23: [Block; 12] = [
        [0, 1, 2],
        [3, 4, 5],
        [6, 7, 8],
        [0, 3, 6],
        [1, 4, 7],
        [2, 5, 8],
        [0, 4, 8],
        [1, 5, 6],
        [2, 3, 7],
        [0, 5, 7],
        [1, 3, 8],
        [2, 4, 6],
    ];
    Some(match points {
        0..=2 => vec![],
        3 | 4 => vec![[0, 1, 2]],
        5 => vec![[0, 1, 2], [0, 3, 4]],
        6 => vec![[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]],
        7 => FANO.to_vec(),
        // the affine plane with point 8 deleted
        8 => AG23.iter().copied().filter(|b| !b.contains(&8)).collect(),
        9 => AG23.to_vec(),
        _ => return None,
    })
}

/// A packing of `points` points with `D(points)` blocks.
pub fn max_packing(points: usize) -> Result<Design, ConstructError> {
    max_packing_capped(points, PACKING_CAP)
}

pub fn max_packing_capped(points: usize, cap: usize) -> Result<Design, ConstructError> {
    if let Some(blocks) = packing_fixture(points) {
        return Ok(Design::from_blocks(points, blocks)?);
    }
    if points > cap {
        return Err(ConstructError::PackingTooLarge { points, cap });
    }
    search_packing(points, PACKING_NODE_LIMIT)
}

/// Walks the pairs in lexicographic order; each pair is either covered by a
/// block with a larger third point or left uncovered, and at most
/// `C(n, 2) - 3 D(n)` pairs may be left uncovered.
pub(crate) fn search_packing(n: usize, node_limit: u64) -> Result<Design, ConstructError> {
    let target = packing_number(n as u64) as usize;
    let slack = n * (n - 1) / 2 - 3 * target;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();

    struct Pack<'a> {
        n: usize,
        pairs: &'a [(usize, usize)],
        covered: Vec<bool>,
        blocks: Vec<Block>,
        best: Vec<Block>,
        nodes: u64,
        limit: u64,
    }

    impl Pack<'_> {
        fn idx(&self, a: usize, b: usize) -> usize {
            a * self.n + b
        }

        fn toggle(&mut self, [a, b, c]: [usize; 3], on: bool) {
            for (x, y) in [(a, b), (a, c), (b, c)] {
                let (i, j) = (self.idx(x, y), self.idx(y, x));
                self.covered[i] = on;
                self.covered[j] = on;
            }
        }

        fn run(&mut self, k: usize, slack: usize, target: usize) -> bool {
            self.nodes += 1;
            if self.nodes > self.limit {
                return false;
            }
            if self.blocks.len() > self.best.len() {
                self.best = self.blocks.clone();
            }
            if self.blocks.len() == target {
                return true;
            }
            let Some(pos) = (k..self.pairs.len()).find(|&i| {
                let (a, b) = self.pairs[i];
                !self.covered[self.idx(a, b)]
            }) else {
                return false;
            };
            let (a, b) = self.pairs[pos];
            for c in b + 1..self.n {
                if self.covered[self.idx(a, c)] || self.covered[self.idx(b, c)] {
                    continue;
                }
                self.toggle([a, b, c], true);
                self.blocks.push([a as Point, b as Point, c as Point]);
                if self.run(pos + 1, slack, target) {
                    return true;
                }
                self.blocks.pop();
                self.toggle([a, b, c], false);
                if self.nodes > self.limit {
                    return false;
                }
            }
            if slack > 0 {
                let i = self.idx(a, b);
                self.covered[i] = true;
                let found = self.run(pos + 1, slack - 1, target);
                self.covered[i] = false;
                return found;
            }
            false
        }
    }

    let mut p = Pack {
        n,
        pairs: &pairs,
        covered: vec![false; n * n],
        blocks: Vec::new(),
        best: Vec::new(),
        nodes: 0,
        limit: node_limit,
    };
    if p.run(0, slack, target) {
        Ok(Design::from_blocks(n, p.blocks)?)
    } else {
        Err(ConstructError::PackingShortfall {
            points: n,
            target,
            found: p.best.len(),
        })
    }
}

/// A Steiner triple system on `v = 3n` points (`n` odd) containing the
/// parallel class `{(x,0), (x,1), (x,2)}`, point `(x, i)` labelled `x + n i`.
///
/// Besides the class, for `x < y` and each `i` it has the block
/// `{(x,i), (y,i), (x∘y, i+1)}` where `x∘y = (x + y)(n + 1)/2 mod n`.
pub fn construct_bose(v: usize) -> Result<(Design, Vec<Block>), ConstructError> {
    if v % 6 != 3 {
        return Err(ConstructError::BadResidue(v));
    }
    let n = v / 3;
    let label = |x: usize, i: usize| (x + n * (i % 3)) as Point;
    let op = |x: usize, y: usize| (x + y) * n.div_ceil(2) % n;
    let class: Vec<Block> = (0..n).map(|x| [label(x, 0), label(x, 1), label(x, 2)]).collect();
    let mut blocks = class.clone();
    for x in 0..n {
        for y in x + 1..n {
            for i in 0..3 {
                blocks.push([label(x, i), label(y, i), label(op(x, y), i + 1)]);
            }
        }
    }
    let design = Design::from_blocks(v, blocks)?;
    Ok((design, class))
}

/// Points of `Z_5 x Z_5` written as two digits.
pub type Z5Pair = (u8, u8);

/// Eight triples of a Steiner triple system on 27 points, with point set
/// `Z_5 x Z_5` plus two points at infinity, taken from its sum-zero blocks.
pub const STS27_TRIPLES: [[Z5Pair; 3]; 8] = [
    [(1, 0), (1, 1), (3, 4)],
    [(2, 0), (2, 2), (1, 3)],
    [(3, 0), (3, 3), (4, 2)],
    [(4, 0), (4, 4), (2, 1)],
    [(0, 1), (3, 1), (2, 3)],
    [(0, 2), (1, 2), (4, 1)],
    [(0, 3), (1, 4), (4, 3)],
    [(0, 4), (3, 2), (2, 4)],
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sts27Error {
    #[error("triple {0:?} does not sum to (0,0) mod 5")]
    SumViolation([Z5Pair; 3]),
    #[error("triples {0:?} and {1:?} share a point")]
    NotDisjoint([Z5Pair; 3], [Z5Pair; 3]),
}

/// Checks that every triple has three distinct points summing to `(0,0)` and
/// that the triples are pairwise disjoint.
pub fn check_sum_zero_triples(triples: &[[Z5Pair; 3]]) -> Result<(), Sts27Error> {
    for t in triples {
        let sx: u32 = t.iter().map(|p| p.0 as u32).sum();
        let sy: u32 = t.iter().map(|p| p.1 as u32).sum();
        let distinct = t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
        if !sx.is_multiple_of(5) || !sy.is_multiple_of(5) || !distinct {
            return Err(Sts27Error::SumViolation(*t));
        }
    }
    for (i, a) in triples.iter().enumerate() {
        for b in &triples[i + 1..] {
            if a.iter().any(|p| b.contains(p)) {
                return Err(Sts27Error::NotDisjoint(*a, *b));
            }
        }
    }
    Ok(())
}

pub fn check_sts27_triples() -> Result<(), Sts27Error> {
    check_sum_zero_triples(&STS27_TRIPLES)
}

/// True iff the witness blocks are pairwise disjoint.
pub fn witness_is_disjoint(w: &ConstructionWitness) -> bool {
    w.witness_ppc
        .iter()
        .enumerate()
        .all(|(i, a)| w.witness_ppc[i + 1..].iter().all(|b| !blocks_meet(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppc::{solve_max_ppc, DEFAULT_NODE_BUDGET};
    use crate::onefactor::SelectionStrategy::Room;

    #[test]
    fn eleven_point_example() {
        let w = base(3, 8, Room).unwrap();
        assert_eq!(w.design.b(), 12);
        let w = packed(3, 8, Room).unwrap();
        assert_eq!(w.design.b(), 13);
        assert!(w.design.contains_block(&[8, 9, 10]));
        // s_1 = 8, s_2 = 9, s_3 = 10 and the red blocks 70, 26, 54
        assert_eq!(w.witness_ppc, vec![[0, 7, 8], [2, 6, 9], [4, 5, 10]]);
        let fixture = Design::from_text(include_str!("../fixtures/psts11.txt")).unwrap();
        assert_eq!(w.design, fixture);
    }

    #[test]
    fn small_cases() {
        let w = base(1, 2, Room).unwrap();
        assert_eq!(w.design.blocks(), &[[0, 1, 2]]);
        assert!(matches!(
            base(2, 4, Room),
            Err(ConstructError::Factor(FactorError::Infeasible { .. }))
        ));
        let w = packed(2, 6, Room).unwrap();
        assert_eq!((w.design.v(), w.design.b()), (8, 6));
        let w = packed(1, 14, Room).unwrap();
        assert_eq!((w.design.v(), w.design.b()), (15, 7));
        let w = trimmed(1, 4, Room).unwrap();
        assert_eq!((w.design.v(), w.design.b()), (4, 1));
        assert!(matches!(
            trimmed(2, 4, Room),
            Err(ConstructError::NoDeletablePoint { .. })
        ));
    }

    #[test]
    fn trimmed_counts_and_class() {
        for (rho, ell, v, b) in [(2, 8, 9, 6), (3, 10, 12, 13)] {
            let w = trimmed(rho, ell, Room).unwrap();
            assert_eq!((w.design.v(), w.design.b()), (v, b));
            assert_eq!(w.expected_blocks(), b);
            assert!(witness_is_disjoint(&w));
            assert!(w.witness_ppc.iter().all(|blk| w.design.contains_block(blk)));
            assert_eq!(w.s_points, ((v - rho) as Point..v as Point).collect::<Vec<_>>());
            let r = solve_max_ppc(&w.design, DEFAULT_NODE_BUDGET);
            assert_eq!((r.size, r.optimal), (rho, true));
        }
    }

    #[test]
    fn packed_restricted_to_graph_points_is_base() {
        let b = base(4, 10, Room).unwrap();
        let p = packed(4, 10, Room).unwrap();
        let s = &p.s_points;
        let restricted: Vec<Block> = p
            .design
            .blocks()
            .iter()
            .copied()
            .filter(|blk| blk.iter().filter(|x| s.contains(x)).count() == 1)
            .collect();
        assert_eq!(restricted, b.design.blocks());
    }

    #[test]
    fn packings() {
        for n in 0..=13 {
            let d = max_packing(n).unwrap();
            assert_eq!(d.b() as u64, packing_number(n as u64), "n={n}");
        }
        assert_eq!(max_packing(3).unwrap().b(), 1);
        assert_eq!(max_packing(7).unwrap().b(), 7);
        assert_eq!(max_packing(9).unwrap().b(), 12);
        assert!(matches!(
            max_packing(14),
            Err(ConstructError::PackingTooLarge { .. })
        ));
    }

    #[test]
    fn packing_search_agrees_with_fixtures() {
        for n in 3..=9 {
            let d = search_packing(n, PACKING_NODE_LIMIT).unwrap();
            assert_eq!(d.b() as u64, packing_number(n as u64));
        }
        assert!(matches!(
            search_packing(12, 5),
            Err(ConstructError::PackingShortfall { .. })
        ));
    }

    #[test]
    fn bose_systems() {
        for v in [9, 15, 21] {
            let (d, class) = construct_bose(v).unwrap();
            assert_eq!(d.b(), v * (v - 1) / 6);
            assert!(d.is_steiner());
            assert_eq!(class.len(), v / 3);
            assert!(class.iter().all(|b| d.contains_block(b)));
        }
        assert_eq!(construct_bose(13), Err(ConstructError::BadResidue(13)));
        let (d, _) = construct_bose(9).unwrap();
        assert_eq!(solve_max_ppc(&d, DEFAULT_NODE_BUDGET).size, 3);
    }

    #[test]
    fn sts27_triples() {
        assert_eq!(check_sts27_triples(), Ok(()));
        let points: std::collections::HashSet<_> = STS27_TRIPLES.iter().flatten().collect();
        assert_eq!(points.len(), 24);
        let mut bad = STS27_TRIPLES;
        bad[0] = [(1, 0), (1, 1), (3, 3)];
        assert!(matches!(
            check_sum_zero_triples(&bad),
            Err(Sts27Error::SumViolation(_))
        ));
        let dup = [STS27_TRIPLES[0], STS27_TRIPLES[0]];
        assert!(matches!(
            check_sum_zero_triples(&dup),
            Err(Sts27Error::NotDisjoint(..))
        ));
    }
}
