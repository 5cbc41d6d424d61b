//! 2D bidirectional macro schemes: validation, decoding, construction from
//! grammar trees, the constant-size scheme for identity matrices and an
//! exact minimizer for tiny matrices.

use std::collections::BTreeSet;
use std::fmt;

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::factors::{window_ids, FactorShape};
use crate::grammar::{Grammar2D, GrammarTree, NodeKind};
use crate::matrix::{content_lines, parse_positive, Alphabet, Matrix2D, Symbol};

/// Marks an explicit cell in a cell map.
const BOTTOM: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;

/// Follows every cell of the functional graph `map` (cell -> source cell,
/// [`BOTTOM`] for explicit cells) to its explicit root. Fails with a cell
/// that lies on a cycle.
pub(crate) fn resolve_roots(map: &[u32]) -> std::result::Result<Vec<u32>, usize> {
    const FRESH: u32 = u32::MAX;
    const ON_PATH: u32 = u32::MAX - 1;
    let mut root = vec![FRESH; map.len()];
    let mut path = Vec::new();
    for start in 0..map.len() {
        let mut c = start;
        while root[c] == FRESH {
            if map[c] == BOTTOM {
                root[c] = c as u32;
                break;
            }
            root[c] = ON_PATH;
            path.push(c);
            c = map[c] as usize;
        }
        if root[c] == ON_PATH {
            return Err(c);
        }
        let r = root[c];
        for p in path.drain(..) {
            root[p] = r;
        }
    }
    Ok(root)
}

/// A copied rectangle: `target` is `(i1, j1, i2, j2)` inclusive, `source`
/// the top-left corner it is copied from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Phrase {
    pub target: (usize, usize, usize, usize),
    pub source: (usize, usize),
}

impl Phrase {
    fn cells(&self) -> impl Iterator<Item = ((usize, usize), (usize, usize))> + '_ {
        let (i1, j1, i2, j2) = self.target;
        let (si, sj) = self.source;
        (i1..=i2).flat_map(move |i| (j1..=j2).map(move |j| ((i, j), (si + i - i1, sj + j - j1))))
    }
}

/// Explicit cells plus copy phrases over an `rows x cols` grid. All
/// positions are 1-based. Build freely; [`MacroScheme2D::validate`] checks
/// decodability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroScheme2D {
    pub rows: usize,
    pub cols: usize,
    pub alphabet: Alphabet,
    pub explicit: Vec<((usize, usize), Symbol)>,
    pub phrases: Vec<Phrase>,
}

impl MacroScheme2D {
    /// Every cell explicit.
    pub fn literal(m: &Matrix2D) -> Self {
        let explicit = (1..=m.rows())
            .flat_map(|i| (1..=m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), m.get(i, j)))
            .collect();
        MacroScheme2D { rows: m.rows(), cols: m.cols(), alphabet: m.alphabet().clone(), explicit, phrases: Vec::new() }
    }

    /// Explicit cells plus phrases.
    pub fn size(&self) -> usize {
        self.explicit.len() + self.phrases.len()
    }

    fn cell_map(&self) -> Result<Vec<u32>> {
        let (m, n) = (self.rows, self.cols);
        if m == 0 || n == 0 {
            return Err(Error::BadParam("scheme dimensions must be positive".into()));
        }
        let idx = |(i, j): (usize, usize)| ((i - 1) * n + j - 1) as u32;
        let inside = |i: usize, j: usize| i >= 1 && i <= m && j >= 1 && j <= n;
        let mut map = vec![UNSET; m * n];
        let mut claim = |cell: (usize, usize), to: u32| -> Result<()> {
            let slot = &mut map[idx(cell) as usize];
            if *slot != UNSET {
                return Err(Error::NotPartition(format!("cell ({}, {}) is covered twice", cell.0, cell.1)));
            }
            *slot = to;
            Ok(())
        };
        for &((i, j), s) in &self.explicit {
            if !inside(i, j) {
                return Err(Error::OutOfBounds(format!("explicit cell ({i}, {j}) in a {m}x{n} scheme")));
            }
            if s as usize >= self.alphabet.len() {
                return Err(Error::BadParam(format!("explicit cell ({i}, {j}) has an unknown symbol")));
            }
            claim((i, j), BOTTOM)?;
        }
        for p in &self.phrases {
            let (i1, j1, i2, j2) = p.target;
            if !inside(i1, j1) || !inside(i2, j2) || i1 > i2 || j1 > j2 {
                return Err(Error::OutOfBounds(format!("phrase target {:?}", p.target)));
            }
            let (si, sj) = p.source;
            if !inside(si, sj) || !inside(si + i2 - i1, sj + j2 - j1) {
                return Err(Error::OutOfBoundsSource(format!("phrase {:?} from ({si}, {sj})", p.target)));
            }
            if (si, sj) == (i1, j1) {
                return Err(Error::CyclicMap(format!("phrase {:?} copies itself", p.target)));
            }
            for (t, s) in p.cells() {
                claim(t, idx(s))?;
            }
        }
        if let Some(p) = map.iter().position(|&t| t == UNSET) {
            return Err(Error::NotPartition(format!("cell ({}, {}) is not covered", p / n + 1, p % n + 1)));
        }
        Ok(map)
    }

    fn roots(&self) -> Result<Vec<u32>> {
        let map = self.cell_map()?;
        let n = self.cols;
        resolve_roots(&map).map_err(|p| {
            Error::CyclicMap(format!("cell ({}, {}) lies on a copy cycle", p / n + 1, p % n + 1))
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.roots().map(|_| ())
    }

    pub fn decode(&self) -> Result<Matrix2D> {
        let roots = self.roots()?;
        let n = self.cols;
        let mut sym = vec![0 as Symbol; roots.len()];
        for &((i, j), s) in &self.explicit {
            sym[(i - 1) * n + j - 1] = s;
        }
        let cells = roots.iter().map(|&r| sym[r as usize]).collect();
        Matrix2D::new(self.rows, self.cols, cells, self.alphabet.clone())
    }

    /// `scheme <m> <n>`, then `exp <i> <j> <token>` and
    /// `phr <i1> <j1> <i2> <j2> <si> <sj>` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("scheme {} {}\n", self.rows, self.cols);
        for &((i, j), s) in &self.explicit {
            out.push_str(&format!("exp {i} {j} {}\n", self.alphabet.token(s)));
        }
        for p in &self.phrases {
            let (i1, j1, i2, j2) = p.target;
            out.push_str(&format!("phr {i1} {j1} {i2} {j2} {} {}\n", p.source.0, p.source.1));
        }
        out
    }

    /// Parses the text form. Only syntax is checked here.
    pub fn parse(text: &str) -> Result<MacroScheme2D> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "missing `scheme <m> <n>` header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "scheme" {
            return Err(Error::parse(hl, 1, "expected `scheme <m> <n>`"));
        }
        let col = |line: &str, f: &str| line.find(f).map_or(1, |p| p + 1);
        let rows = parse_positive(h[1], hl, col(header, h[1]))?;
        let cols = parse_positive(h[2], hl, col(header, h[2]))?;
        let mut s =
            MacroScheme2D { rows, cols, alphabet: Alphabet::default(), explicit: Vec::new(), phrases: Vec::new() };
        for (lno, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| parse_positive(f[k], lno, col(line, f[k]));
            match (f[0], f.len()) {
                ("exp", 4) => {
                    let sym = s.alphabet.intern(f[3])?;
                    s.explicit.push(((num(1)?, num(2)?), sym));
                }
                ("phr", 7) => s.phrases.push(Phrase {
                    target: (num(1)?, num(2)?, num(3)?, num(4)?),
                    source: (num(5)?, num(6)?),
                }),
                ("exp", _) => return Err(Error::parse(lno, 1, "expected `exp <i> <j> <token>`")),
                ("phr", _) => return Err(Error::parse(lno, 1, "expected `phr <i1> <j1> <i2> <j2> <si> <sj>`")),
                _ => return Err(Error::parse(lno, 1, format!("unknown directive {:?}", f[0]))),
            }
        }
        Ok(s)
    }
}

impl fmt::Display for MacroScheme2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The six-piece scheme for the `n x n` identity: explicit `(1,1)`, `(1,2)`,
/// `(2,1)`; the rest of row 1 copies from `(1,2)`, the rest of column 1 from
/// `(2,1)`, and the lower-right `(n-1) x (n-1)` block from `(1,1)`.
pub fn identity_scheme(n: usize) -> Result<MacroScheme2D> {
    if n == 0 {
        return Err(Error::BadParam("identity scheme needs n >= 1".into()));
    }
    let id = crate::families::identity(n)?;
    if n < 3 {
        return Ok(MacroScheme2D::literal(&id));
    }
    let one = id.alphabet().get("1").expect("identity alphabet");
    let zero = id.alphabet().get("0").expect("identity alphabet");
    Ok(MacroScheme2D {
        rows: n,
        cols: n,
        alphabet: id.alphabet().clone(),
        explicit: vec![((1, 1), one), ((1, 2), zero), ((2, 1), zero)],
        phrases: vec![
            Phrase { target: (1, 3, 1, n), source: (1, 2) },
            Phrase { target: (3, 1, n, 1), source: (2, 1) },
            Phrase { target: (2, 2, n, n), source: (1, 1) },
        ],
    })
}

/// One piece per grammar-tree leaf: symbol leaves become explicit cells,
/// secondary occurrences copy from their primary occurrence, and collapsed
/// runs copy from the copy immediately to their left (or above).
pub fn from_grammar(g: &Grammar2D, budget: &Budget) -> Result<MacroScheme2D> {
    let (m, n) = g.dims(g.axiom());
    budget.check(m.saturating_mul(n))?;
    let tree = GrammarTree::build(g);
    let mut s = MacroScheme2D {
        rows: m as usize,
        cols: n as usize,
        alphabet: g.alphabet().clone(),
        explicit: Vec::new(),
        phrases: Vec::new(),
    };
    let rect = |r: (u64, u64, u64, u64)| (r.0 as usize, r.1 as usize, r.2 as usize, r.3 as usize);
    for leaf in tree.leaves() {
        let target = rect(leaf.rect);
        match leaf.kind {
            NodeKind::Symbol(sym) => s.explicit.push(((target.0, target.1), sym)),
            NodeKind::Secondary(v) => {
                let p = tree.primary[v].expect("a secondary occurrence follows its primary one");
                let src = rect(tree.nodes[p].rect);
                s.phrases.push(Phrase { target, source: (src.0, src.1) });
            }
            NodeKind::CollapsedRun { var, horizontal, .. } => {
                let (h, w) = g.dims(var);
                let source = if horizontal {
                    (target.0, target.1 - w as usize)
                } else {
                    (target.0 - h as usize, target.1)
                };
                s.phrases.push(Phrase { target, source });
            }
            NodeKind::Primary(_) => unreachable!("primary occurrences always have children"),
        }
    }
    Ok(s)
}

/// Default cell limit of [`b_exact`].
pub const B_CELL_LIMIT: usize = 9;

/// A smallest valid scheme for `m`, found by iterative deepening over
/// rectangle partitions. Each partition is built by always covering the
/// first uncovered cell in row-major order; `1 x 1` pieces are explicit
/// (a `1 x 1` copy is never better), larger pieces must repeat elsewhere.
/// Sources are assigned once the grid is covered, rejecting copy cycles.
pub fn b_exact(m: &Matrix2D, cell_limit: usize, budget: &Budget) -> Result<MacroScheme2D> {
    let cells = m.size();
    if cells > cell_limit {
        return Err(Error::TooLarge(format!("b_exact handles at most {cell_limit} cells, got {cells}")));
    }
    let mut solver = BSolver::new(m, budget.meter())?;
    let lower = m.used_symbols().len();
    for target in lower..=cells {
        if let Some(found) = solver.search(target)? {
            return Ok(found);
        }
    }
    unreachable!("the all-explicit scheme always exists")
}

struct BSolver<'a> {
    m: &'a Matrix2D,
    meter: Meter,
    /// Candidate sources for every rectangle (top-left, height, width).
    sources: std::collections::HashMap<(usize, usize, usize, usize), Vec<(usize, usize)>>,
    max_area: usize,
    owner: Vec<bool>,
    pieces: Vec<(usize, usize, usize, usize)>,
}

impl<'a> BSolver<'a> {
    fn new(m: &'a Matrix2D, mut meter: Meter) -> Result<Self> {
        let mut sources = std::collections::HashMap::new();
        let mut max_area = 1;
        for h in 1..=m.rows() {
            for w in 1..=m.cols() {
                if h * w < 2 {
                    continue;
                }
                let ids = window_ids(m, FactorShape::new(h, w), &mut meter)?;
                let (rr, rc) = (m.rows() - h + 1, m.cols() - w + 1);
                let mut by_id: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ids.distinct];
                for i in 1..=rr {
                    for j in 1..=rc {
                        by_id[ids.id_at(i, j) as usize].push((i, j));
                    }
                }
                for occ in by_id.iter().filter(|o| o.len() > 1) {
                    max_area = max_area.max(h * w);
                    for &t in occ {
                        let src: Vec<_> = occ.iter().copied().filter(|&s| s != t).collect();
                        sources.insert((t.0, t.1, h, w), src);
                    }
                }
            }
        }
        Ok(BSolver { m, meter, sources, max_area, owner: vec![false; m.size()], pieces: Vec::new() })
    }

    fn search(&mut self, limit: usize) -> Result<Option<MacroScheme2D>> {
        self.owner.iter_mut().for_each(|o| *o = false);
        self.pieces.clear();
        self.partition(0, self.m.size(), limit)
    }

    fn partition(&mut self, from: usize, uncovered: usize, limit: usize) -> Result<Option<MacroScheme2D>> {
        self.meter.charge(1)?;
        let Some(first) = (from..self.m.size()).find(|&c| !self.owner[c]) else {
            return self.assign_sources();
        };
        if self.pieces.len() + uncovered.div_ceil(self.max_area) > limit {
            return Ok(None);
        }
        let n = self.m.cols();
        let (i, j) = (first / n + 1, first % n + 1);
        // Largest width of free cells in the first row.
        let mut max_w = 0;
        while j + max_w <= n && !self.owner[first + max_w] {
            max_w += 1;
        }
        let mut options = Vec::new();
        let mut width_cap = max_w;
        for h in 1..=self.m.rows() - i + 1 {
            let row = first + (h - 1) * n;
            let mut w = 0;
            while w < width_cap && !self.owner[row + w] {
                w += 1;
            }
            width_cap = w;
            if width_cap == 0 {
                break;
            }
            for w in 1..=width_cap {
                if h * w == 1 || self.sources.contains_key(&(i, j, h, w)) {
                    options.push((h, w));
                }
            }
        }
        // Larger pieces first finds feasible covers sooner.
        options.sort_by_key(|&(h, w)| std::cmp::Reverse(h * w));
        for (h, w) in options {
            self.mark(first, h, w, true);
            self.pieces.push((i, j, h, w));
            let r = self.partition(first + 1, uncovered - h * w, limit)?;
            self.pieces.pop();
            self.mark(first, h, w, false);
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    fn mark(&mut self, first: usize, h: usize, w: usize, v: bool) {
        let n = self.m.cols();
        for a in 0..h {
            for b in 0..w {
                self.owner[first + a * n + b] = v;
            }
        }
    }

    fn assign_sources(&mut self) -> Result<Option<MacroScheme2D>> {
        let n = self.m.cols();
        let mut map = vec![UNSET; self.m.size()];
        let copies: Vec<_> = self.pieces.iter().copied().filter(|p| p.2 * p.3 > 1).collect();
        for &(i, j, h, w) in &self.pieces {
            if h * w == 1 {
                map[(i - 1) * n + j - 1] = BOTTOM;
            }
        }
        let mut chosen = Vec::with_capacity(copies.len());
        if !self.assign(&copies, &mut map, &mut chosen)? {
            return Ok(None);
        }
        let mut s = MacroScheme2D {
            rows: self.m.rows(),
            cols: n,
            alphabet: self.m.alphabet().clone(),
            explicit: Vec::new(),
            phrases: Vec::new(),
        };
        for &(i, j, h, w) in &self.pieces {
            if h * w == 1 {
                s.explicit.push(((i, j), self.m.get(i, j)));
            }
        }
        for (&(i, j, h, w), &source) in copies.iter().zip(&chosen) {
            s.phrases.push(Phrase { target: (i, j, i + h - 1, j + w - 1), source });
        }
        Ok(Some(s))
    }

    fn assign(
        &mut self,
        copies: &[(usize, usize, usize, usize)],
        map: &mut [u32],
        chosen: &mut Vec<(usize, usize)>,
    ) -> Result<bool> {
        let Some(&(i, j, h, w)) = copies.get(chosen.len()) else {
            return Ok(true);
        };
        let n = self.m.cols();
        let sources = self.sources[&(i, j, h, w)].clone();
        for (si, sj) in sources {
            self.meter.charge(1)?;
            for a in 0..h {
                for b in 0..w {
                    map[(i - 1 + a) * n + j - 1 + b] = ((si - 1 + a) * n + sj - 1 + b) as u32;
                }
            }
            if !closes_cycle(map, (0..h).flat_map(|a| (0..w).map(move |b| (i - 1 + a) * n + j - 1 + b))) {
                chosen.push((si, sj));
                if self.assign(copies, map, chosen)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        for a in 0..h {
            for b in 0..w {
                map[(i - 1 + a) * n + j - 1 + b] = UNSET;
            }
        }
        Ok(false)
    }
}

/// `true` if following the partial map from one of `starts` loops forever.
/// Walks end at explicit cells and at cells whose piece has no source yet.
fn closes_cycle(map: &[u32], starts: impl Iterator<Item = usize>) -> bool {
    for s in starts {
        let mut c = s;
        for _ in 0..=map.len() {
            match map[c] {
                BOTTOM | UNSET => break,
                next => c = next as usize,
            }
        }
        if map[c] != BOTTOM && map[c] != UNSET {
            return true;
        }
    }
    false
}

/// `true` iff every `k x k` window of `m` occurs exactly once.
pub fn unique_square_certificate(m: &Matrix2D, k: usize, budget: &Budget) -> Result<bool> {
    let shape = FactorShape::new(k, k);
    shape.check_fits(m)?;
    let ids = window_ids(m, shape, &mut budget.meter())?;
    Ok(ids.distinct == (m.rows() - k + 1) * (m.cols() - k + 1))
}

/// Phrase lower bound implied by unique `k x k` windows for schemes made of
/// square phrases: `⌈m/k⌉ · ⌈n/k⌉`.
pub fn unique_square_phrase_bound(m: &Matrix2D, k: usize) -> u64 {
    (m.rows().div_ceil(k) * m.cols().div_ceil(k)) as u64
}

/// Distinct cells covered by a scheme's pieces, for diagnostics.
pub fn covered_cells(s: &MacroScheme2D) -> BTreeSet<(usize, usize)> {
    let mut out: BTreeSet<_> = s.explicit.iter().map(|&(c, _)| c).collect();
    for p in &s.phrases {
        out.extend(p.cells().map(|(t, _)| t));
    }
    out
}
