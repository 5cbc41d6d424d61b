//! Substring complexity `delta`, string attractors and exact `gamma`.
//!
//! Every function works unchanged on `1 x n` matrices, which gives the 1D
//! measures as a special case.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factors::{sweep_shapes, window_ids, FactorShape, WindowIds};
use crate::matrix::Matrix2D;
use crate::Ratio;

/// Result of a `delta` computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaResult {
    /// `max P(k1,k2) / (k1 k2)` over the evaluated shapes.
    pub value: Ratio,
    /// Shape attaining the maximum; ties go to the smallest area, then the
    /// smallest `k1`.
    pub argmax: FactorShape,
    /// `P(k1,k2)` for every evaluated shape, in evaluation order.
    pub table: Option<Vec<(FactorShape, usize)>>,
}

impl DeltaResult {
    pub fn as_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

fn better(value: Ratio, shape: FactorShape, best: &Option<(Ratio, FactorShape)>) -> bool {
    match best {
        None => true,
        Some((v, s)) => {
            value > *v
                || (value == *v && (shape.area(), shape.k1) < (s.area(), s.k1))
        }
    }
}

fn delta_over(
    m: &Matrix2D,
    budget: &Budget,
    square_only: bool,
    keep_table: bool,
) -> Result<DeltaResult> {
    let mut best: Option<(Ratio, FactorShape)> = None;
    let mut table = keep_table.then(Vec::new);
    let mut meter = budget.meter();
    let max_height = |w: usize| if square_only { w } else { usize::MAX };
    sweep_shapes(m, &mut meter, max_height, |w| {
        let s = w.shape;
        if square_only && s.k1 != s.k2 {
            return Ok(());
        }
        let value = Ratio::new(w.distinct as u64, s.area() as u64);
        if better(value, s, &best) {
            best = Some((value, s));
        }
        if let Some(t) = table.as_mut() {
            t.push((s, w.distinct));
        }
        Ok(())
    })?;
    let (value, argmax) = best.expect("every matrix has at least the 1x1 shape");
    Ok(DeltaResult { value, argmax, table })
}

/// `delta(M) = max over all shapes of P(k1,k2) / (k1 k2)`, exactly.
pub fn delta(m: &Matrix2D, budget: &Budget) -> Result<DeltaResult> {
    delta_over(m, budget, false, false)
}

/// [`delta`] restricted to square shapes `k x k`.
pub fn delta_square(m: &Matrix2D, budget: &Budget) -> Result<DeltaResult> {
    delta_over(m, budget, true, false)
}

/// Like [`delta`] / [`delta_square`] but also returns the full `P` table.
pub fn delta_table(m: &Matrix2D, square_only: bool, budget: &Budget) -> Result<DeltaResult> {
    delta_over(m, budget, square_only, true)
}

/// A set of 1-based positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttractorSet {
    pub positions: BTreeSet<(usize, usize)>,
}

impl AttractorSet {
    pub fn new(positions: impl IntoIterator<Item = (usize, usize)>) -> Self {
        AttractorSet { positions: positions.into_iter().collect() }
    }

    /// Positions of a `1 x n` string given as 1-based columns.
    pub fn from_columns(cols: impl IntoIterator<Item = usize>) -> Self {
        AttractorSet::new(cols.into_iter().map(|c| (1, c)))
    }

    /// Every cell of an `m x n` grid.
    pub fn full(m: usize, n: usize) -> Self {
        AttractorSet::new((1..=m).flat_map(|i| (1..=n).map(move |j| (i, j))))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl fmt::Display for AttractorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions.iter().map(|(i, j)| format!("({i},{j})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A factor no occurrence of which contains a position of the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub shape: FactorShape,
    /// Top-left corner of the first occurrence.
    pub first_occurrence: (usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} factor first occurring at ({},{}) is not hit",
            self.shape.k1, self.shape.k2, self.first_occurrence.0, self.first_occurrence.1
        )
    }
}

/// 2D prefix sums of a position set, for O(1) "does this rectangle contain
/// a position" queries.
struct HitGrid {
    cols: usize,
    sums: Vec<u32>,
}

impl HitGrid {
    fn new(m: usize, n: usize, set: &AttractorSet) -> Self {
        let cols = n + 1;
        let mut sums = vec![0u32; (m + 1) * cols];
        for &(i, j) in &set.positions {
            sums[i * cols + j] = 1;
        }
        for i in 1..=m {
            for j in 1..=n {
                sums[i * cols + j] += sums[(i - 1) * cols + j] + sums[i * cols + j - 1]
                    - sums[(i - 1) * cols + j - 1];
            }
        }
        HitGrid { cols, sums }
    }

    /// Whether the rectangle `[i1..i2] x [j1..j2]` contains a position.
    fn hits(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> bool {
        let c = self.cols;
        self.sums[i2 * c + j2] + self.sums[(i1 - 1) * c + j1 - 1]
            > self.sums[(i1 - 1) * c + j2] + self.sums[i2 * c + j1 - 1]
    }
}

fn unhit(w: &WindowIds, grid: &HitGrid) -> Option<(usize, usize)> {
    let mut hit = vec![false; w.distinct];
    for i in 1..=w.rows {
        for j in 1..=w.cols {
            let id = w.id_at(i, j) as usize;
            if !hit[id] && grid.hits(i, j, i + w.shape.k1 - 1, j + w.shape.k2 - 1) {
                hit[id] = true;
            }
        }
    }
    let missing = hit.iter().position(|h| !h)?;
    (1..=w.rows)
        .flat_map(|i| (1..=w.cols).map(move |j| (i, j)))
        .find(|&(i, j)| w.id_at(i, j) as usize == missing)
}

fn check_bounds(m: &Matrix2D, set: &AttractorSet) -> Result<()> {
    if let Some(&(i, j)) =
        set.positions.iter().find(|&&(i, j)| i < 1 || j < 1 || i > m.rows() || j > m.cols())
    {
        return Err(Error::OutOfBounds(format!(
            "attractor position ({i},{j}) in a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Checks that every distinct factor (every square factor when
/// `square_only`) has an occurrence containing a position of `set`.
/// Returns the first violating factor, if any.
pub fn find_violation(
    m: &Matrix2D,
    set: &AttractorSet,
    square_only: bool,
    budget: &Budget,
) -> Result<Option<Violation>> {
    check_bounds(m, set)?;
    let grid = HitGrid::new(m.rows(), m.cols(), set);
    let mut meter = budget.meter();
    let mut found = None;
    let max_height = |w: usize| if square_only { w } else { usize::MAX };
    let stop = Error::BadParam(String::new());
    let r = sweep_shapes(m, &mut meter, max_height, |w| {
        if square_only && w.shape.k1 != w.shape.k2 {
            return Ok(());
        }
        if let Some(pos) = unhit(w, &grid) {
            found = Some(Violation { shape: w.shape, first_occurrence: pos });
            return Err(stop.clone());
        }
        Ok(())
    });
    match r {
        Err(e) if found.is_none() => Err(e),
        _ => Ok(found),
    }
}

/// `true` iff `set` is an attractor (square attractor when `square_only`).
pub fn is_attractor(
    m: &Matrix2D,
    set: &AttractorSet,
    square_only: bool,
    budget: &Budget,
) -> Result<bool> {
    Ok(find_violation(m, set, square_only, budget)?.is_none())
}

/// Default cell limit for [`gamma_exact`].
pub const GAMMA_CELL_LIMIT: usize = 20;

/// Hitting-set constraints: for each distinct factor, the set of cells
/// covered by at least one of its occurrences. Dominated (superset)
/// constraints are dropped.
fn attractor_constraints(m: &Matrix2D, square_only: bool, budget: &Budget) -> Result<Vec<u64>> {
    let n = m.cols();
    let mut meter = budget.meter();
    let mut masks: HashSet<u64> = HashSet::new();
    let max_height = |w: usize| if square_only { w } else { usize::MAX };
    sweep_shapes(m, &mut meter, max_height, |w| {
        let s = w.shape;
        if square_only && s.k1 != s.k2 {
            return Ok(());
        }
        let row_bits: u64 = u64::MAX >> (64 - s.k2);
        let mut rect = 0u64;
        for a in 0..s.k1 {
            rect |= row_bits << (a * n);
        }
        let mut per_id = vec![0u64; w.distinct];
        for i in 0..w.rows {
            for j in 0..w.cols {
                per_id[w.ids[i * w.cols + j] as usize] |= rect << (i * n + j);
            }
        }
        masks.extend(per_id);
        Ok(())
    })?;
    let mut sorted: Vec<u64> = masks.into_iter().collect();
    sorted.sort_by_key(|&s| (s.count_ones(), s));
    let mut kept: Vec<u64> = Vec::new();
    for s in sorted {
        if !kept.iter().any(|&k| k & s == k) {
            kept.push(s);
        }
    }
    Ok(kept)
}

struct HittingSearch<'a> {
    constraints: &'a [u64],
    meter: crate::budget::Meter,
}

impl HittingSearch<'_> {
    /// Greedy count of pairwise-disjoint constraints not yet hit: a lower
    /// bound on the positions still needed.
    fn disjoint_bound(&self, chosen: u64) -> usize {
        let mut used = 0u64;
        let mut count = 0;
        for &c in self.constraints {
            if c & chosen == 0 && c & used == 0 {
                used |= c;
                count += 1;
            }
        }
        count
    }

    fn search(&mut self, chosen: u64, forbidden: u64, left: usize) -> Result<Option<u64>> {
        self.meter.charge(1)?;
        let pick = self
            .constraints
            .iter()
            .filter(|&&c| c & chosen == 0)
            .min_by_key(|&&c| (c & !forbidden).count_ones());
        let Some(&target) = pick else {
            return Ok(Some(chosen));
        };
        if left == 0 || self.disjoint_bound(chosen) > left {
            return Ok(None);
        }
        let mut options = target & !forbidden;
        let mut excluded = forbidden;
        while options != 0 {
            let bit = options & options.wrapping_neg();
            options &= options - 1;
            if let Some(found) = self.search(chosen | bit, excluded, left - 1)? {
                return Ok(Some(found));
            }
            // Later branches never reuse a cell already tried here.
            excluded |= bit;
        }
        Ok(None)
    }
}

/// Minimum-cardinality attractor by exact search; minimality is certified
/// by exhausting every smaller size.
pub fn gamma_exact(
    m: &Matrix2D,
    square_only: bool,
    cell_limit: usize,
    budget: &Budget,
) -> Result<AttractorSet> {
    let cells = m.size();
    if cells > cell_limit.min(64) {
        return Err(Error::TooLarge(format!(
            "exact gamma needs at most {} cells, matrix has {cells}",
            cell_limit.min(64)
        )));
    }
    let constraints = attractor_constraints(m, square_only, budget)?;
    let mut search = HittingSearch { constraints: &constraints, meter: budget.meter() };
    let start = search.disjoint_bound(0).max(1);
    for target in start..=cells {
        if let Some(mask) = search.search(0, 0, target)? {
            let n = m.cols();
            return Ok(AttractorSet::new(
                (0..cells).filter(|b| mask >> b & 1 == 1).map(|b| (b / n + 1, b % n + 1)),
            ));
        }
    }
    unreachable!("the full grid is always an attractor")
}

/// Lower bound on `gamma` from unique-occurrence factors: a factor that
/// occurs once forces a position inside that occurrence, and disjoint such
/// occurrences force distinct positions.
///
/// Scans every `k x 1` and `1 x k` shape plus `extra_shapes`, greedily picks
/// pairwise-disjoint unique occurrences per shape and across all shapes,
/// and returns the largest family found.
pub fn gamma_lower_bound_unique(
    m: &Matrix2D,
    extra_shapes: &[FactorShape],
    budget: &Budget,
) -> Result<usize> {
    let mut shapes: BTreeSet<FactorShape> = BTreeSet::new();
    shapes.extend((1..=m.rows()).map(|k| FactorShape::new(k, 1)));
    shapes.extend((1..=m.cols()).map(|k| FactorShape::new(1, k)));
    for s in extra_shapes {
        s.check_fits(m)?;
        shapes.insert(*s);
    }
    let mut meter = budget.meter();
    let mut all: Vec<(usize, usize, usize, FactorShape)> = Vec::new();
    let mut best = 0;
    for shape in shapes {
        let w = window_ids(m, shape, &mut meter)?;
        let mut count = vec![0u32; w.distinct];
        for &id in &w.ids {
            count[id as usize] += 1;
        }
        let unique: Vec<(usize, usize)> = (1..=w.rows)
            .flat_map(|i| (1..=w.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| count[w.id_at(i, j) as usize] == 1)
            .collect();
        let rects: Vec<(usize, usize, FactorShape)> =
            unique.iter().map(|&(i, j)| (i, j, shape)).collect();
        best = best.max(greedy_disjoint(m, &rects, &mut meter)?);
        all.extend(rects.into_iter().map(|(i, j, s)| (s.area(), i, j, s)));
    }
    all.sort();
    let rects: Vec<(usize, usize, FactorShape)> = all.into_iter().map(|(_, i, j, s)| (i, j, s)).collect();
    Ok(best.max(greedy_disjoint(m, &rects, &mut meter)?))
}

fn greedy_disjoint(
    m: &Matrix2D,
    rects: &[(usize, usize, FactorShape)],
    meter: &mut crate::budget::Meter,
) -> Result<usize> {
    let n = m.cols();
    let mut taken = vec![false; m.size()];
    let mut count = 0;
    for &(i, j, s) in rects {
        meter.charge(s.area() as u64)?;
        let cells = || {
            (i - 1..i - 1 + s.k1).flat_map(move |a| (j - 1..j - 1 + s.k2).map(move |b| a * n + b))
        };
        if cells().all(|c| !taken[c]) {
            cells().for_each(|c| taken[c] = true);
            count += 1;
        }
    }
    Ok(count)
}

/// Two-cell square-only attractor of the `m x m` identity: the bottom-left
/// zero and the central one. The centre is rounded up; with `⌊m/2⌋` odd
/// sizes miss the square factor whose single 1 sits in its bottom-left
/// corner.
pub fn identity_square_attractor(m: usize) -> AttractorSet {
    let c = m.div_ceil(2);
    AttractorSet::new([(m, 1), (c, c)])
}

/// The explicit attractor for [`crate::families::diagpad`]: the inner
/// diagonal plus the zero cells that anchor the all-zero factors. When
/// `min(m, n) = 2` the inner diagonal is empty, so `(1,1)` is added to cover
/// the factor `1`.
pub fn diagpad_attractor(m: usize, n: usize) -> AttractorSet {
    let k = m.min(n);
    let mut set: BTreeSet<(usize, usize)> = (2..k).map(|i| (i, i)).collect();
    if m == 1 || n == 1 {
        // A 1 x n string 1 0^(n-1): both symbols must be covered.
        set.insert((1, 1));
        if m * n > 1 {
            set.insert((m, n));
        }
        return AttractorSet { positions: set };
    }
    set.insert((1, k));
    set.insert((k, 1));
    if k == 2 {
        set.insert((1, 1));
    }
    if m < n {
        set.insert((m, m + 1));
    } else if m > n {
        set.insert((n + 1, n));
    }
    AttractorSet { positions: set }
}
