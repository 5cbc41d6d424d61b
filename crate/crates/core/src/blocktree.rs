//! Row-major-order 2D Block Tree: recursive `c x c` block partition where a
//! block with an earlier occurrence (in row-major order of top-left
//! corners, any alignment) becomes a pruned leaf.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factors::{window_ids, FactorShape};
use crate::macroscheme::resolve_roots;
use crate::matrix::{Matrix2D, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStatus {
    Internal,
    SymbolLeaf(Symbol),
    /// Top-left corner of the first occurrence in row-major order.
    Pruned { source: (usize, usize) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub top: usize,
    pub left: usize,
    pub status: BlockStatus,
}

#[derive(Debug, Clone)]
pub struct BlockTree {
    pub arity: usize,
    /// Side of the padded square, a power of `arity`.
    pub side: usize,
    pub rows: usize,
    pub cols: usize,
    /// `levels[l]` holds the blocks of side `side / arity^l`.
    pub levels: Vec<Vec<Block>>,
    /// Input padded with a sentinel symbol that matches nothing.
    pub padded: Matrix2D,
    sentinel: Symbol,
}

/// Builds the tree over `m` padded bottom/right to the next power of `c`.
pub fn build_blocktree(m: &Matrix2D, c: usize, budget: &Budget) -> Result<BlockTree> {
    if c < 2 {
        return Err(Error::BadParam(format!("block tree arity must be at least 2, got {c}")));
    }
    let mut side = 1usize;
    while side < m.rows().max(m.cols()) {
        side = side
            .checked_mul(c)
            .ok_or_else(|| Error::TooLarge("padded side overflows".into()))?;
    }
    let depth = side.ilog(c) as u64 + 1;
    budget.check((side as u64).saturating_mul(side as u64).saturating_mul(depth))?;
    let (padded, sentinel) = pad(m, side)?;

    // sentinel_prefix[(i)*(side+1)+j] = sentinel cells in rows < i, cols < j.
    let w = side + 1;
    let mut pre = vec![0u32; w * w];
    for i in 0..side {
        for j in 0..side {
            let s = (padded.at0(i, j) == sentinel) as u32;
            pre[(i + 1) * w + j + 1] = s + pre[i * w + j + 1] + pre[(i + 1) * w + j] - pre[i * w + j];
        }
    }
    let clean = |i: usize, j: usize, s: usize| {
        pre[(i + s) * w + j + s] + pre[i * w + j] == pre[i * w + j + s] + pre[(i + s) * w + j]
    };

    let mut meter = budget.meter();
    let mut levels = vec![vec![Block {
        top: 1,
        left: 1,
        status: if side == 1 { BlockStatus::SymbolLeaf(padded.get(1, 1)) } else { BlockStatus::Internal },
    }]];
    let mut s = side;
    while s > 1 {
        let parents: Vec<Block> =
            levels.last().expect("root level").iter().filter(|b| b.status == BlockStatus::Internal).copied().collect();
        if parents.is_empty() {
            break;
        }
        s /= c;
        let ids = window_ids(&padded, FactorShape::new(s, s), &mut meter)?;
        let reach = side - s + 1;
        // First sentinel-free occurrence of every content, in row-major order.
        let mut first = vec![None; ids.distinct];
        for i in 0..reach {
            for j in 0..reach {
                let id = ids.id_at(i + 1, j + 1) as usize;
                if first[id].is_none() && clean(i, j, s) {
                    first[id] = Some((i + 1, j + 1));
                }
            }
        }
        let mut level = Vec::with_capacity(parents.len() * c * c);
        for p in parents {
            for a in 0..c {
                for b in 0..c {
                    let (top, left) = (p.top + a * s, p.left + b * s);
                    let id = ids.id_at(top, left) as usize;
                    let status = match first[id] {
                        Some(src) if src < (top, left) && clean(top - 1, left - 1, s) => {
                            BlockStatus::Pruned { source: src }
                        }
                        _ if s == 1 => BlockStatus::SymbolLeaf(padded.get(top, left)),
                        _ => BlockStatus::Internal,
                    };
                    level.push(Block { top, left, status });
                }
            }
        }
        levels.push(level);
    }
    Ok(BlockTree { arity: c, side, rows: m.rows(), cols: m.cols(), levels, padded, sentinel })
}

fn pad(m: &Matrix2D, side: usize) -> Result<(Matrix2D, Symbol)> {
    let mut alphabet = m.alphabet().clone();
    let sentinel = alphabet.intern(&m.alphabet().fresh_token("$"))?;
    let padded = Matrix2D::from_fn(side, side, alphabet, |i, j| {
        if i < m.rows() && j < m.cols() {
            m.at0(i, j)
        } else {
            sentinel
        }
    })?;
    Ok((padded, sentinel))
}

impl BlockTree {
    pub fn block_side(&self, level: usize) -> usize {
        self.side / self.arity.pow(level as u32)
    }

    /// Nodes per level, root first.
    pub fn node_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn pruned_counts(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|l| l.iter().filter(|b| matches!(b.status, BlockStatus::Pruned { .. })).count())
            .collect()
    }

    /// `true` if the block lies fully inside the unpadded input.
    pub fn in_region(&self, level: usize, b: &Block) -> bool {
        let s = self.block_side(level);
        b.top + s - 1 <= self.rows && b.left + s - 1 <= self.cols
    }

    pub fn sentinel(&self) -> Symbol {
        self.sentinel
    }

    /// `level,side,nodes,internal,pruned,symbol_leaves` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,side,nodes,internal,pruned,symbol_leaves\n");
        for (l, blocks) in self.levels.iter().enumerate() {
            let count = |f: fn(&BlockStatus) -> bool| blocks.iter().filter(|b| f(&b.status)).count();
            out.push_str(&format!(
                "{l},{},{},{},{},{}\n",
                self.block_side(l),
                blocks.len(),
                count(|s| *s == BlockStatus::Internal),
                count(|s| matches!(s, BlockStatus::Pruned { .. })),
                count(|s| matches!(s, BlockStatus::SymbolLeaf(_))),
            ));
        }
        out
    }

    /// Rebuilds the padded matrix from symbol leaves and pruned-block
    /// pointers only.
    pub fn reconstruct(&self) -> Result<Matrix2D> {
        const BOTTOM: u32 = u32::MAX;
        let n = self.side;
        let mut map = vec![u32::MAX - 1; n * n];
        let mut sym = vec![0 as Symbol; n * n];
        for (l, blocks) in self.levels.iter().enumerate() {
            let s = self.block_side(l);
            for b in blocks {
                match b.status {
                    BlockStatus::Internal => {}
                    BlockStatus::SymbolLeaf(x) => {
                        let p = (b.top - 1) * n + b.left - 1;
                        map[p] = BOTTOM;
                        sym[p] = x;
                    }
                    BlockStatus::Pruned { source } => {
                        for a in 0..s {
                            for c in 0..s {
                                let p = (b.top - 1 + a) * n + b.left - 1 + c;
                                map[p] = ((source.0 - 1 + a) * n + source.1 - 1 + c) as u32;
                            }
                        }
                    }
                }
            }
        }
        if map.contains(&(u32::MAX - 1)) {
            return Err(Error::NotPartition("block tree leaves do not cover the matrix".into()));
        }
        let roots = resolve_roots(&map).map_err(|p| Error::CyclicMap(format!("cell index {p}")))?;
        let cells = roots.iter().map(|&r| sym[r as usize]).collect();
        Matrix2D::new(n, n, cells, self.padded.alphabet().clone())
    }
}
