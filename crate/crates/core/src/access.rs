//! Direct access to single cells of a grammar-compressed matrix via heavy
//! path decomposition.
//!
//! Every variable's heavy child is the child with the larger expansion
//! (ties to the left/upper child; for runs, the first copy). Reversing the
//! heavy edges gives a forest rooted at terminal variables. Each node stores
//! the cumulative rows above/below and columns left/right of the terminal
//! cell its heavy path ends in, so the offsets of any path suffix are
//! differences of two stored values. A query climbs the forest by binary
//! lifting to the last path node still containing the cell, then steps into
//! the light part of that node's rule.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::grammar::{Grammar2D, Rule2D, VarId};
use crate::matrix::Symbol;

const UP: usize = 0;
const DOWN: usize = 1;
const LEFT: usize = 2;
const RIGHT: usize = 3;

/// Heavy path of one variable, materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyPathInfo {
    pub heavy_symbol: Symbol,
    /// 1-based cell of `heavy_symbol` inside `exp(var)`.
    pub heavy_occ: (u64, u64),
    pub dims: (u64, u64),
    /// Variables `A_0 = var, A_1, ..., A_k` (a terminal).
    pub path: Vec<VarId>,
    /// `exp(A_i)` occupies rows `up[i]+1 ..= m-down[i]` and columns
    /// `left[i]+1 ..= n-right[i]` of `exp(var)`.
    pub up: Vec<u64>,
    pub down: Vec<u64>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

/// Immutable access structure over a grammar.
#[derive(Debug, Clone)]
pub struct AccessIndex {
    grammar: Grammar2D,
    heavy: Vec<VarId>,
    /// Cumulative (up, down, left, right) weights toward the terminal root.
    weight: Vec<[u64; 4]>,
    /// lift[j][v]: the node 2^j heavy steps below v (terminals are fixed points).
    lift: Vec<Vec<VarId>>,
    root_symbol: Vec<Symbol>,
}

/// Maximum and distribution of heavy-path switches over all cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopStats {
    pub max_hops: u32,
    /// histogram[h] = number of cells reached with h switches.
    pub histogram: Vec<u64>,
    /// `⌊log2(m n)⌋`.
    pub bound: u32,
}

impl AccessIndex {
    pub fn build(g: &Grammar2D) -> AccessIndex {
        let count = g.num_vars();
        let mut heavy = (0..count).collect::<Vec<_>>();
        let mut edge = vec![[0u64; 4]; count];
        for v in 0..count {
            let (m, n) = g.dims(v);
            match g.rule(v) {
                Rule2D::Terminal(_) => {}
                Rule2D::Horiz(b, c) => {
                    if g.area(b) >= g.area(c) {
                        heavy[v] = b;
                        edge[v][RIGHT] = g.dims(c).1;
                    } else {
                        heavy[v] = c;
                        edge[v][LEFT] = g.dims(b).1;
                    }
                }
                Rule2D::Vert(b, c) => {
                    if g.area(b) >= g.area(c) {
                        heavy[v] = b;
                        edge[v][DOWN] = g.dims(c).0;
                    } else {
                        heavy[v] = c;
                        edge[v][UP] = g.dims(b).0;
                    }
                }
                Rule2D::RunH(_, b) => {
                    heavy[v] = b;
                    edge[v][RIGHT] = n - g.dims(b).1;
                }
                Rule2D::RunV(_, b) => {
                    heavy[v] = b;
                    edge[v][DOWN] = m - g.dims(b).0;
                }
            }
        }
        let mut weight = vec![[0u64; 4]; count];
        let mut root_symbol = vec![0; count];
        for &v in g.bottom_up() {
            if let Rule2D::Terminal(s) = g.rule(v) {
                root_symbol[v] = s;
            } else {
                let h = heavy[v];
                root_symbol[v] = root_symbol[h];
                for side in 0..4 {
                    weight[v][side] = weight[h][side] + edge[v][side];
                }
            }
        }
        let mut lift = vec![heavy.clone()];
        let levels = usize::BITS - count.leading_zeros();
        for j in 1..levels.max(1) as usize {
            let prev = &lift[j - 1];
            let next = (0..count).map(|v| prev[prev[v]]).collect();
            lift.push(next);
        }
        AccessIndex { grammar: g.clone(), heavy, weight, lift, root_symbol }
    }

    pub fn grammar(&self) -> &Grammar2D {
        &self.grammar
    }

    pub fn heavy_child(&self, v: VarId) -> Option<VarId> {
        (self.heavy[v] != v).then_some(self.heavy[v])
    }

    /// The heavy path of `v` with its four size sequences.
    pub fn heavy_path(&self, v: VarId) -> HeavyPathInfo {
        let g = &self.grammar;
        let (m, n) = g.dims(v);
        let mut path = vec![v];
        while let Some(h) = self.heavy_child(*path.last().expect("non-empty")) {
            path.push(h);
        }
        let seq = |side: usize| path.iter().map(|&a| self.weight[v][side] - self.weight[a][side]).collect::<Vec<_>>();
        let (up, down, left, right) = (seq(UP), seq(DOWN), seq(LEFT), seq(RIGHT));
        HeavyPathInfo {
            heavy_symbol: self.root_symbol[v],
            heavy_occ: (self.weight[v][UP] + 1, self.weight[v][LEFT] + 1),
            dims: (m, n),
            path,
            up,
            down,
            left,
            right,
        }
    }

    /// `exp(axiom)[y][x]`.
    pub fn access(&self, y: u64, x: u64) -> Result<Symbol> {
        self.access_with_hops(y, x).map(|(s, _)| s)
    }

    /// The symbol plus the number of heavy-path switches taken.
    pub fn access_with_hops(&self, y: u64, x: u64) -> Result<(Symbol, u32)> {
        let g = &self.grammar;
        let (m, n) = g.dims(g.axiom());
        if y < 1 || y > m || x < 1 || x > n {
            return Err(Error::OutOfBounds(format!("cell ({y}, {x}) outside {m}x{n}")));
        }
        let (mut v, mut y, mut x) = (g.axiom(), y, x);
        let mut hops = 0;
        loop {
            let (m, n) = g.dims(v);
            let w = self.weight[v];
            // The path nodes whose rectangle still contains (y, x) form a
            // prefix of the path, so the last one is found by lifting.
            let contains = |a: VarId| {
                let d = self.weight[a];
                w[UP] - d[UP] < y
                    && w[DOWN] - d[DOWN] <= m - y
                    && w[LEFT] - d[LEFT] < x
                    && w[RIGHT] - d[RIGHT] <= n - x
            };
            let mut a = v;
            for level in self.lift.iter().rev() {
                if contains(level[a]) {
                    a = level[a];
                }
            }
            debug_assert!(contains(a));
            let h = self.heavy[a];
            if h == a {
                return Ok((self.root_symbol[a], hops));
            }
            debug_assert!(!contains(h));
            // Coordinates inside exp(a).
            let ly = y - (w[UP] - self.weight[a][UP]);
            let lx = x - (w[LEFT] - self.weight[a][LEFT]);
            let (next, ny, nx) = match g.rule(a) {
                Rule2D::Horiz(b, c) => {
                    let wb = g.dims(b).1;
                    if h == b { (c, ly, lx - wb) } else { (b, ly, lx) }
                }
                Rule2D::Vert(b, c) => {
                    let hb = g.dims(b).0;
                    if h == b { (c, ly - hb, lx) } else { (b, ly, lx) }
                }
                Rule2D::RunH(_, b) => (b, ly, 1 + (lx - 1) % g.dims(b).1),
                Rule2D::RunV(_, b) => (b, 1 + (ly - 1) % g.dims(b).0, lx),
                Rule2D::Terminal(_) => unreachable!("terminals are path ends"),
            };
            v = next;
            y = ny;
            x = nx;
            hops += 1;
        }
    }

    /// Accesses every cell and reports switch statistics.
    pub fn hop_stats(&self, budget: &Budget) -> Result<HopStats> {
        let g = &self.grammar;
        let (m, n) = g.dims(g.axiom());
        budget.check(m.saturating_mul(n))?;
        let mut histogram = Vec::new();
        for y in 1..=m {
            for x in 1..=n {
                let (_, h) = self.access_with_hops(y, x)?;
                if histogram.len() <= h as usize {
                    histogram.resize(h as usize + 1, 0);
                }
                histogram[h as usize] += 1;
            }
        }
        let max_hops = histogram.len() as u32 - 1;
        Ok(HopStats { max_hops, histogram, bound: (m * n).ilog2() })
    }
}

pub fn build_index(g: &Grammar2D) -> AccessIndex {
    AccessIndex::build(g)
}

/// Maximum heavy-path switches over all cells.
pub fn hop_bound_check(idx: &AccessIndex, budget: &Budget) -> Result<u32> {
    idx.hop_stats(budget).map(|s| s.max_hops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{build_bk_grammar, build_ek_grammar, build_zeros_rlslp, fixtures};
    use crate::random::random_grammar;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn b() -> Budget {
        Budget::default()
    }

    fn full_scan(g: &Grammar2D) -> u32 {
        let idx = build_index(g);
        let m = g.expand(&b()).unwrap();
        for y in 1..=m.rows() {
            for x in 1..=m.cols() {
                assert_eq!(idx.access(y as u64, x as u64).unwrap(), m.get(y, x), "({y},{x})");
            }
        }
        let stats = idx.hop_stats(&b()).unwrap();
        assert!(stats.max_hops <= stats.bound, "{} > {}", stats.max_hops, stats.bound);
        assert_eq!(stats.histogram.iter().sum::<u64>(), (m.rows() * m.cols()) as u64);
        stats.max_hops
    }

    #[test]
    fn alt_slp_access() {
        let g = fixtures::alt_slp();
        let idx = build_index(&g);
        let s = g.axiom();
        assert_eq!(idx.heavy_child(s), g.var_by_name("A"));
        let zero = g.alphabet().get("0").unwrap();
        let one = g.alphabet().get("1").unwrap();
        assert_eq!(idx.access(1, 1).unwrap(), zero);
        assert_eq!(idx.access(1, 2).unwrap(), one);
        full_scan(&g);
        full_scan(&fixtures::alt_rlslp());
    }

    #[test]
    fn single_terminal() {
        let g = Grammar2D::parse("axiom S\nS = term a\n").unwrap();
        let idx = build_index(&g);
        let info = idx.heavy_path(g.axiom());
        assert_eq!(info.heavy_occ, (1, 1));
        assert_eq!(info.path.len(), 1);
        assert_eq!(hop_bound_check(&idx, &b()).unwrap(), 0);
        assert!(matches!(idx.access(1, 2), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn zeros_rlslp_heavy_children_are_first_copies() {
        let g = build_zeros_rlslp(16).unwrap();
        let idx = build_index(&g);
        for v in 0..g.num_vars() {
            match g.rule(v) {
                Rule2D::RunH(_, c) | Rule2D::RunV(_, c) => assert_eq!(idx.heavy_child(v), Some(c)),
                _ => {}
            }
            assert_eq!(idx.heavy_path(v).heavy_occ, (1, 1));
        }
        assert!(full_scan(&g) <= 8);
    }

    #[test]
    fn ek_access() {
        let g = build_ek_grammar(3).unwrap();
        let idx = build_index(&g);
        assert_eq!(g.alphabet().token(idx.access(3, 8).unwrap()), "1");
        let g10 = build_ek_grammar(10).unwrap();
        assert!(full_scan(&g10) <= 13);
    }

    #[test]
    fn bk_and_zeros_access() {
        full_scan(&build_bk_grammar(3).unwrap());
        full_scan(&build_zeros_rlslp(64).unwrap());
    }

    #[test]
    fn size_sequences_chain_and_locate_subexpansions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in 0..60 {
            let g = random_grammar(&mut rng, 3, 12, t % 2 == 0, 200);
            let idx = build_index(&g);
            for v in 0..g.num_vars() {
                let info = idx.heavy_path(v);
                let (m, n) = info.dims;
                let k = info.path.len() - 1;
                for i in 0..k {
                    assert!(info.up[i] <= info.up[i + 1] && info.down[i] <= info.down[i + 1]);
                    assert!(info.left[i] <= info.left[i + 1] && info.right[i] <= info.right[i + 1]);
                }
                assert_eq!(info.up[k] + 1, m - info.down[k]);
                assert_eq!(info.left[k] + 1, n - info.right[k]);
                let whole = g.expand_var(v, &b()).unwrap();
                for (i, &a) in info.path.iter().enumerate() {
                    let sub = whole
                        .submatrix(
                            info.up[i] as usize + 1,
                            info.left[i] as usize + 1,
                            (m - info.down[i]) as usize,
                            (n - info.right[i]) as usize,
                        )
                        .unwrap();
                    assert_eq!(sub, g.expand_var(a, &b()).unwrap());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn access_matches_expansion(seed in 0u64..10_000, runs in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_grammar(&mut rng, 3, 14, runs, 600);
            full_scan(&g);
        }
    }
}
