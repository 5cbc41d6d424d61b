//! Factor enumeration and 2D substring complexity.
//!
//! Windows are named exactly rather than hashed: a `h x w` window is the pair
//! (its `h-1 x w` top part, its last row of width `w`), and a row of width `w`
//! is the pair (its first `w-1` symbols, its last symbol). Interning those
//! pairs level by level gives every window a dense id such that two windows
//! of the same shape share an id iff their contents are equal.

use std::collections::HashMap;

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::matrix::Matrix2D;

/// Extent of a factor: `k1` rows by `k2` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorShape {
    pub k1: usize,
    pub k2: usize,
}

impl FactorShape {
    pub fn new(k1: usize, k2: usize) -> Self {
        FactorShape { k1, k2 }
    }

    pub fn area(&self) -> usize {
        self.k1 * self.k2
    }

    pub(crate) fn check_fits(&self, m: &Matrix2D) -> Result<()> {
        if self.k1 == 0 || self.k2 == 0 || self.k1 > m.rows() || self.k2 > m.cols() {
            return Err(Error::ShapeTooLarge {
                k1: self.k1,
                k2: self.k2,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        Ok(())
    }
}

/// Dense content ids for every window of one shape.
///
/// `ids[(i-1) * cols + (j-1)]` is the id of the window with top-left `(i, j)`
/// (1-based); ids are numbered `0..distinct` in row-major order of first
/// occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowIds {
    pub shape: FactorShape,
    /// Number of top-left positions per column, `m - k1 + 1`.
    pub rows: usize,
    /// Number of top-left positions per row, `n - k2 + 1`.
    pub cols: usize,
    pub ids: Vec<u32>,
    pub distinct: usize,
}

impl WindowIds {
    /// Id of the window with 1-based top-left `(i, j)`.
    pub fn id_at(&self, i: usize, j: usize) -> u32 {
        self.ids[(i - 1) * self.cols + (j - 1)]
    }
}

/// Interns pairs of ids into dense ids, in order of first request.
struct Namer {
    table: HashMap<u64, u32>,
}

impl Namer {
    fn with_capacity(cap: usize) -> Self {
        Namer { table: HashMap::with_capacity(cap) }
    }

    #[inline]
    fn name(&mut self, a: u32, b: u32) -> u32 {
        let next = self.table.len() as u32;
        *self.table.entry(((a as u64) << 32) | b as u64).or_insert(next)
    }

    fn len(&self) -> usize {
        self.table.len()
    }
}

/// Ids of all width-`w` row segments, grown one column at a time.
struct RowNames {
    rows: usize,
    cols: usize,
    width: usize,
    /// `ids[i * cols + j]`, valid for `j < cols - width + 1`.
    ids: Vec<u32>,
}

impl RowNames {
    fn new(m: &Matrix2D) -> Self {
        RowNames { rows: m.rows(), cols: m.cols(), width: 1, ids: m.cells().to_vec() }
    }

    fn span(&self) -> usize {
        self.cols - self.width + 1
    }

    fn grow(&mut self, m: &Matrix2D, meter: &mut Meter) -> Result<()> {
        let span = self.span() - 1;
        meter.charge((self.rows * span) as u64)?;
        let mut namer = Namer::with_capacity(self.rows * span);
        for i in 0..self.rows {
            for j in 0..span {
                let k = i * self.cols + j;
                self.ids[k] = namer.name(self.ids[k], m.at0(i, j + self.width));
            }
        }
        self.width += 1;
        Ok(())
    }
}

/// Visits every shape `k1 x k2` with `k1 <= max_height(k2)`, in order of
/// increasing `k2` and then increasing `k1`, handing the visitor the exact
/// window ids of the shape. Work is one step per window.
pub fn sweep_shapes(
    m: &Matrix2D,
    meter: &mut Meter,
    max_height: impl Fn(usize) -> usize,
    mut visit: impl FnMut(&WindowIds) -> Result<()>,
) -> Result<()> {
    let mut rows = RowNames::new(m);
    for w in 1..=m.cols() {
        if w > 1 {
            rows.grow(m, meter)?;
        }
        let top = max_height(w).min(m.rows());
        if top == 0 {
            continue;
        }
        let span = rows.span();
        let mut cur = WindowIds {
            shape: FactorShape::new(1, w),
            rows: m.rows(),
            cols: span,
            ids: Vec::with_capacity(m.rows() * span),
            distinct: 0,
        };
        // Re-intern so that ids are dense in first-occurrence order.
        let mut namer = Namer::with_capacity(m.rows() * span);
        for i in 0..m.rows() {
            for j in 0..span {
                cur.ids.push(namer.name(rows.ids[i * m.cols() + j], 0));
            }
        }
        cur.distinct = namer.len();
        meter.charge(cur.ids.len() as u64)?;
        visit(&cur)?;
        for h in 2..=top {
            let out_rows = m.rows() - h + 1;
            meter.charge((out_rows * span) as u64)?;
            let mut namer = Namer::with_capacity(out_rows * span);
            for i in 0..out_rows {
                for j in 0..span {
                    let k = i * span + j;
                    cur.ids[k] = namer.name(cur.ids[k], rows.ids[(i + h - 1) * m.cols() + j]);
                }
            }
            cur.ids.truncate(out_rows * span);
            cur.rows = out_rows;
            cur.shape = FactorShape::new(h, w);
            cur.distinct = namer.len();
            visit(&cur)?;
        }
    }
    Ok(())
}

/// Exact window ids for a single shape.
pub fn window_ids(m: &Matrix2D, shape: FactorShape, meter: &mut Meter) -> Result<WindowIds> {
    shape.check_fits(m)?;
    let mut rows = RowNames::new(m);
    while rows.width < shape.k2 {
        rows.grow(m, meter)?;
    }
    let span = rows.span();
    let mut namer = Namer::with_capacity(m.rows() * span);
    let mut ids: Vec<u32> = (0..m.rows() * span)
        .map(|k| namer.name(rows.ids[(k / span) * m.cols() + k % span], 0))
        .collect();
    let mut distinct = namer.len();
    for h in 2..=shape.k1 {
        let out_rows = m.rows() - h + 1;
        meter.charge((out_rows * span) as u64)?;
        let mut namer = Namer::with_capacity(out_rows * span);
        for i in 0..out_rows {
            for j in 0..span {
                let k = i * span + j;
                ids[k] = namer.name(ids[k], rows.ids[(i + h - 1) * m.cols() + j]);
            }
        }
        ids.truncate(out_rows * span);
        distinct = namer.len();
    }
    Ok(WindowIds { shape, rows: m.rows() - shape.k1 + 1, cols: span, ids, distinct })
}

/// Number of distinct `k1 x k2` factors of `m`, `P_M(k1, k2)`.
pub fn factor_count(m: &Matrix2D, shape: FactorShape) -> Result<usize> {
    Ok(window_ids(m, shape, &mut Budget::from_env().meter())?.distinct)
}

/// One distinct factor content with all of its occurrences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGroup {
    pub content: Matrix2D,
    /// 1-based top-left corners in row-major order.
    pub occurrences: Vec<(usize, usize)>,
}

/// Distinct factors of the given shape, in order of first occurrence.
pub fn distinct_factors(m: &Matrix2D, shape: FactorShape) -> Result<Vec<FactorGroup>> {
    let w = window_ids(m, shape, &mut Budget::from_env().meter())?;
    group_windows(m, &w)
}

pub(crate) fn group_windows(m: &Matrix2D, w: &WindowIds) -> Result<Vec<FactorGroup>> {
    let mut groups: Vec<FactorGroup> = Vec::with_capacity(w.distinct);
    for i in 1..=w.rows {
        for j in 1..=w.cols {
            let id = w.id_at(i, j) as usize;
            if id == groups.len() {
                let content =
                    m.submatrix(i, j, i + w.shape.k1 - 1, j + w.shape.k2 - 1)?;
                groups.push(FactorGroup { content, occurrences: Vec::new() });
            }
            groups[id].occurrences.push((i, j));
        }
    }
    Ok(groups)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::matrix::Symbol;
    use proptest::prelude::*;
    use std::collections::HashMap;

    /// Brute-force oracle: collect window contents into a map.
    pub(crate) fn naive_ids(m: &Matrix2D, k1: usize, k2: usize) -> (Vec<u32>, usize) {
        let mut seen: HashMap<Vec<Symbol>, u32> = HashMap::new();
        let mut ids = Vec::new();
        for i in 0..=m.rows() - k1 {
            for j in 0..=m.cols() - k2 {
                let mut key = Vec::with_capacity(k1 * k2);
                for a in 0..k1 {
                    for b in 0..k2 {
                        key.push(m.get(i + a + 1, j + b + 1));
                    }
                }
                let next = seen.len() as u32;
                ids.push(*seen.entry(key).or_insert(next));
            }
        }
        (ids, seen.len())
    }

    fn factor_example() -> Matrix2D {
        Matrix2D::from_char_rows(&["aabb"; 5]).unwrap()
    }

    #[test]
    fn factor_example_counts() {
        let m = factor_example();
        assert_eq!(factor_count(&m, FactorShape::new(2, 2)).unwrap(), 3);
        assert_eq!(factor_count(&m, FactorShape::new(5, 4)).unwrap(), 1);
        let groups = distinct_factors(&m, FactorShape::new(2, 2)).unwrap();
        assert_eq!(groups.len(), 3);
        assert_eq!(groups.iter().map(|g| g.occurrences.len()).sum::<usize>(), 12);
    }

    #[test]
    fn identity_single_cells() {
        let i2 = Matrix2D::from_char_rows(&["10", "01"]).unwrap();
        let groups = distinct_factors(&i2, FactorShape::new(1, 1)).unwrap();
        assert_eq!(groups[0].content.to_token_string(), "1");
        assert_eq!(groups[0].occurrences, vec![(1, 1), (2, 2)]);
        assert_eq!(groups[1].content.to_token_string(), "0");
        assert_eq!(groups[1].occurrences, vec![(1, 2), (2, 1)]);
        let i4 = Matrix2D::from_char_rows(&["1000", "0100", "0010", "0001"]).unwrap();
        assert_eq!(factor_count(&i4, FactorShape::new(1, 1)).unwrap(), 2);
    }

    #[test]
    fn zeros_single_group() {
        let z = Matrix2D::from_char_rows(&["000"; 3]).unwrap();
        let groups = distinct_factors(&z, FactorShape::new(2, 2)).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].occurrences.len(), 4);
    }

    #[test]
    fn oversized_shape_is_rejected() {
        let m = factor_example();
        assert_eq!(
            factor_count(&m, FactorShape::new(6, 1)),
            Err(Error::ShapeTooLarge { k1: 6, k2: 1, rows: 5, cols: 4 })
        );
    }

    #[test]
    fn sweep_respects_budget() {
        let m = factor_example();
        let mut meter = Budget::new(10).meter();
        let r = sweep_shapes(&m, &mut meter, |_| usize::MAX, |_| Ok(()));
        assert_eq!(r, Err(Error::BudgetExceeded { limit: 10 }));
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = Matrix2D> {
        (1..=max, 1..=max, 1u32..=3).prop_flat_map(|(r, c, s)| {
            proptest::collection::vec(0..s, r * c).prop_map(move |cells| {
                Matrix2D::new(r, c, cells, crate::matrix::Alphabet::numeric(s as usize)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn sweep_matches_naive(m in arb_matrix(12)) {
            let mut meter = Budget::unlimited().meter();
            let mut visited = 0;
            sweep_shapes(&m, &mut meter, |_| usize::MAX, |w| {
                let (ids, distinct) = naive_ids(&m, w.shape.k1, w.shape.k2);
                assert_eq!(&w.ids, &ids);
                assert_eq!(w.distinct, distinct);
                visited += 1;
                Ok(())
            }).unwrap();
            prop_assert_eq!(visited, m.rows() * m.cols());
        }

        #[test]
        fn single_shape_matches_naive(m in arb_matrix(12), a in 0usize..12, b in 0usize..12) {
            let shape = FactorShape::new(1 + a % m.rows(), 1 + b % m.cols());
            let w = window_ids(&m, shape, &mut Budget::unlimited().meter()).unwrap();
            let (ids, distinct) = naive_ids(&m, shape.k1, shape.k2);
            prop_assert_eq!(w.ids, ids);
            prop_assert_eq!(w.distinct, distinct);
            prop_assert!(distinct >= 1);
            prop_assert!(distinct <= (m.rows() - shape.k1 + 1) * (m.cols() - shape.k2 + 1));
        }

        #[test]
        fn groups_partition_windows(m in arb_matrix(8), a in 0usize..8, b in 0usize..8) {
            let shape = FactorShape::new(1 + a % m.rows(), 1 + b % m.cols());
            let groups = distinct_factors(&m, shape).unwrap();
            let mut all: Vec<(usize, usize)> =
                groups.iter().flat_map(|g| g.occurrences.iter().copied()).collect();
            let total = all.len();
            all.sort();
            all.dedup();
            prop_assert_eq!(all.len(), total);
            prop_assert_eq!(total, (m.rows() - shape.k1 + 1) * (m.cols() - shape.k2 + 1));
            for g in &groups {
                for &(i, j) in &g.occurrences {
                    let w = m.submatrix(i, j, i + shape.k1 - 1, j + shape.k2 - 1).unwrap();
                    prop_assert_eq!(&w, &g.content);
                }
            }
        }

        #[test]
        fn unit_shape_counts_used_symbols(m in arb_matrix(8)) {
            prop_assert_eq!(factor_count(&m, FactorShape::new(1, 1)).unwrap(), m.used_symbols().len());
        }

        #[test]
        fn concat_is_associative(a in arb_matrix(4), b in arb_matrix(4), c in arb_matrix(4)) {
            // Trim operands to a common extent so every case is compatible.
            let r = a.rows().min(b.rows()).min(c.rows());
            let (a1, b1, c1) = (
                a.submatrix(1, 1, r, a.cols()).unwrap(),
                b.submatrix(1, 1, r, b.cols()).unwrap(),
                c.submatrix(1, 1, r, c.cols()).unwrap(),
            );
            prop_assert_eq!(
                a1.concat_h(&b1).unwrap().concat_h(&c1).unwrap(),
                a1.concat_h(&b1.concat_h(&c1).unwrap()).unwrap()
            );
            let n = a.cols().min(b.cols()).min(c.cols());
            let (a2, b2, c2) = (
                a.submatrix(1, 1, a.rows(), n).unwrap(),
                b.submatrix(1, 1, b.rows(), n).unwrap(),
                c.submatrix(1, 1, c.rows(), n).unwrap(),
            );
            prop_assert_eq!(
                a2.concat_v(&b2).unwrap().concat_v(&c2).unwrap(),
                a2.concat_v(&b2.concat_v(&c2).unwrap()).unwrap()
            );
        }
    }
}
