//! Points, blocks and partial Steiner triple systems.
//!
//! A [`Design`] is always canonical: every block is stored as a sorted triple
//! and the block list itself is sorted lexicographically. The only way to get
//! one is through validation, so every `Design` in the program is linear
//! (each pair of points lies in at most one block).

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Point label. Points of a design on `v` points are `0..v`.
pub type Point = u32;

/// A block, stored as a sorted triple.
pub type Block = [Point; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("point {point} of block {block:?} is outside 0..{v}")]
    OutOfRange { point: i64, block: [i64; 3], v: usize },
    #[error("block {0:?} does not have three distinct points")]
    RepeatedPoint([i64; 3]),
    #[error("pair {{{}, {}}} occurs in blocks {first:?} and {second:?}", pair[0], pair[1])]
    PairViolation {
        pair: [Point; 2],
        first: Block,
        second: Block,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A partial Steiner triple system on points `0..v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    v: usize,
    blocks: Vec<Block>,
}

/// Sorts a triple in place and returns it.
pub fn canonical_block(mut block: Block) -> Block {
    block.sort_unstable();
    block
}

/// The three pairs of a sorted block.
#[inline]
pub fn block_pairs(block: &Block) -> [[Point; 2]; 3] {
    [
        [block[0], block[1]],
        [block[0], block[2]],
        [block[1], block[2]],
    ]
}

#[inline]
pub fn blocks_meet(a: &Block, b: &Block) -> bool {
    a.iter().any(|x| b.contains(x))
}

impl Design {
    /// Validates raw input and returns the canonical design.
    ///
    /// Blocks are checked one at a time for range and distinctness, then the
    /// whole set is checked for linearity. A block listed twice shares all of
    /// its pairs with its copy and is reported as a [`DesignError::PairViolation`].
    pub fn validate<I>(v: usize, raw_blocks: I) -> Result<Self, DesignError>
    where
        I: IntoIterator<Item = [i64; 3]>,
    {
        let mut blocks = Vec::new();
        for raw in raw_blocks {
            for &p in &raw {
                if p < 0 || p >= v as i64 {
                    return Err(DesignError::OutOfRange {
                        point: p,
                        block: raw,
                        v,
                    });
                }
            }
            if raw[0] == raw[1] || raw[0] == raw[2] || raw[1] == raw[2] {
                return Err(DesignError::RepeatedPoint(raw));
            }
            blocks.push(canonical_block(raw.map(|p| p as Point)));
        }
        blocks.sort_unstable();

        let mut seen: HashMap<[Point; 2], usize> = HashMap::with_capacity(blocks.len() * 3);
        for (i, block) in blocks.iter().enumerate() {
            for pair in block_pairs(block) {
                if let Some(&j) = seen.get(&pair) {
                    return Err(DesignError::PairViolation {
                        pair,
                        first: blocks[j],
                        second: *block,
                    });
                }
                seen.insert(pair, i);
            }
        }
        Ok(Design { v, blocks })
    }

    /// Like [`Design::validate`] but for blocks already in `Point` form.
    pub fn from_blocks<I>(v: usize, blocks: I) -> Result<Self, DesignError>
    where
        I: IntoIterator<Item = Block>,
    {
        Self::validate(v, blocks.into_iter().map(|b| b.map(i64::from)))
    }

    pub fn empty(v: usize) -> Self {
        Design {
            v,
            blocks: Vec::new(),
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// Number of blocks.
    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn contains_block(&self, block: &Block) -> bool {
        self.blocks.binary_search(&canonical_block(*block)).is_ok()
    }

    /// True iff every pair of points lies in exactly one block.
    pub fn is_steiner(&self) -> bool {
        self.v >= 3 && self.b() * 6 == self.v * (self.v - 1)
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let mut degrees = vec![0usize; self.v];
        for block in &self.blocks {
            for &p in block {
                degrees[p as usize] += 1;
            }
        }
        DegreeProfile { degrees }
    }

    /// Applies a point map and revalidates. `map[p]` is the new label of `p`.
    pub fn relabel(&self, new_v: usize, map: &[Point]) -> Result<Design, DesignError> {
        Design::from_blocks(new_v, self.blocks.iter().map(|b| b.map(|p| map[p as usize])))
    }

    /// Text interchange form: a `v=` header and one sorted block per line.
    pub fn to_text(&self) -> String {
        self.to_text_with_comments(&[])
    }

    /// Text form with leading `#` comment lines.
    pub fn to_text_with_comments(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&format!("v={}\n", self.v));
        for b in &self.blocks {
            out.push_str(&format!("{} {} {}\n", b[0], b[1], b[2]));
        }
        out
    }

    /// Parses either the line-oriented text form or the JSON object form
    /// (`{"v": .., "blocks": [[..], ..]}`).
    pub fn from_text(text: &str) -> Result<Design, DesignError> {
        if text.trim_start().starts_with('{') {
            let record: DesignRecord = serde_json::from_str(text).map_err(|e| DesignError::Parse {
                line: e.line(),
                msg: e.to_string(),
            })?;
            return Design::validate(record.v, record.blocks);
        }

        let mut v = None;
        let mut raw = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("v=") {
                if v.is_some() {
                    return Err(parse_err(line_no, "duplicate v= header"));
                }
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(line_no, &format!("bad point count: {e}")))?;
                v = Some(n);
                continue;
            }
            if v.is_none() {
                return Err(parse_err(line_no, "block before v= header"));
            }
            let nums: Vec<i64> = line
                .split_whitespace()
                .map(|tok| tok.parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|e| parse_err(line_no, &format!("bad point: {e}")))?;
            let triple: [i64; 3] = nums
                .try_into()
                .map_err(|_| parse_err(line_no, "expected three points"))?;
            raw.push(triple);
        }
        let v = v.ok_or_else(|| parse_err(0, "missing v= header"))?;
        Design::validate(v, raw)
    }

    pub fn to_json(&self) -> String {
        let record = DesignRecord {
            v: self.v,
            blocks: self.blocks.iter().map(|b| b.map(i64::from)).collect(),
        };
        serde_json::to_string(&record).expect("design record serializes")
    }
}

fn parse_err(line: usize, msg: &str) -> DesignError {
    DesignError::Parse {
        line,
        msg: msg.to_string(),
    }
}

/// Structured form of the interchange schema.
#[derive(Debug, Serialize, Deserialize)]
struct DesignRecord {
    v: usize,
    blocks: Vec<[i64; 3]>,
}

/// Reads `# ppc: a b c` annotation lines from a design file.
pub fn ppc_annotations(text: &str) -> Result<Vec<Block>, DesignError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(rest) = line.trim().strip_prefix('#') else {
            continue;
        };
        let Some(rest) = rest.trim().strip_prefix("ppc:") else {
            continue;
        };
        let nums: Vec<Point> = rest
            .split_whitespace()
            .map(|tok| tok.parse::<Point>())
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(i + 1, &format!("bad ppc point: {e}")))?;
        let block: Block = nums
            .try_into()
            .map_err(|_| parse_err(i + 1, "ppc annotation needs three points"))?;
        out.push(canonical_block(block));
    }
    Ok(out)
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Per-point block counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
}

impl DegreeProfile {
    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn max(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// `Some(d)` if every point has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = *self.degrees.first()?;
        self.degrees.iter().all(|&d| d == first).then_some(first)
    }
}
