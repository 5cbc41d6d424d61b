//! Row-major and Peano-Hilbert linearizations, the four quadrant scans, and
//! certificates used by the linearization experiments.

use crate::error::{Error, Result};
use crate::matrix::{Alphabet, Matrix2D};
use crate::measures::AttractorSet;

/// Concatenation of the rows as a `1 x mn` string.
pub fn rlin(m: &Matrix2D) -> Matrix2D {
    Matrix2D::new(1, m.size(), m.cells().to_vec(), m.alphabet().clone()).expect("same cells")
}

/// Inverse of [`rlin`] for a known row count.
pub fn unrlin(s: &Matrix2D, rows: usize) -> Result<Matrix2D> {
    if s.rows() != 1 || rows == 0 || s.cols() % rows != 0 {
        return Err(Error::BadParam(format!("cannot fold a 1x{} string into {rows} rows", s.cols())));
    }
    Matrix2D::new(rows, s.cols() / rows, s.cells().to_vec(), s.alphabet().clone())
}

/// The four recursive quadrant scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanKind {
    Ls,
    Rs,
    Us,
    Ds,
}

#[derive(Clone, Copy)]
enum Quadrant {
    UpperLeft,
    UpperRight,
    LowerLeft,
    LowerRight,
}

impl ScanKind {
    /// The four sub-scans in visiting order.
    fn expand(self) -> [(ScanKind, Quadrant); 4] {
        use Quadrant::*;
        use ScanKind::*;
        match self {
            Rs => [(Ds, UpperLeft), (Rs, UpperRight), (Rs, LowerRight), (Us, LowerLeft)],
            Ds => [(Rs, UpperLeft), (Ds, LowerLeft), (Ds, LowerRight), (Ls, UpperRight)],
            Us => [(Ls, LowerRight), (Us, UpperRight), (Us, UpperLeft), (Rs, LowerLeft)],
            Ls => [(Us, LowerRight), (Ls, LowerLeft), (Ls, UpperLeft), (Ds, UpperRight)],
        }
    }
}

fn power_of_two_side(m: &Matrix2D) -> Result<usize> {
    if m.rows() != m.cols() || !m.rows().is_power_of_two() {
        return Err(Error::NotPowerOfTwoSquare { rows: m.rows(), cols: m.cols() });
    }
    Ok(m.rows())
}

/// 1-based cells of a `side x side` square in the order visited by `kind`.
pub fn scan_order(side: usize, kind: ScanKind) -> Result<Vec<(usize, usize)>> {
    if !side.is_power_of_two() {
        return Err(Error::NotPowerOfTwoSquare { rows: side, cols: side });
    }
    let mut out = Vec::with_capacity(side * side);
    // Explicit stack of (scan, top, left, side); children pushed in reverse.
    let mut stack = vec![(kind, 1usize, 1usize, side)];
    while let Some((k, top, left, s)) = stack.pop() {
        if s == 1 {
            out.push((top, left));
            continue;
        }
        let h = s / 2;
        for &(sub, q) in k.expand().iter().rev() {
            let (t, l) = match q {
                Quadrant::UpperLeft => (top, left),
                Quadrant::UpperRight => (top, left + h),
                Quadrant::LowerLeft => (top + h, left),
                Quadrant::LowerRight => (top + h, left + h),
            };
            stack.push((sub, t, l, h));
        }
    }
    Ok(out)
}

fn gather(m: &Matrix2D, order: &[(usize, usize)]) -> Matrix2D {
    let cells = order.iter().map(|&(i, j)| m.get(i, j)).collect();
    Matrix2D::new(1, order.len(), cells, m.alphabet().clone()).expect("one cell per position")
}

pub fn scan(m: &Matrix2D, kind: ScanKind) -> Result<Matrix2D> {
    let side = power_of_two_side(m)?;
    Ok(gather(m, &scan_order(side, kind)?))
}

/// Scan used by the Peano-Hilbert linearization of a `2^i x 2^i` square:
/// `rs` for odd `i`, `ds` for even `i`.
pub fn phlin_kind(side: usize) -> ScanKind {
    if side.trailing_zeros() % 2 == 1 {
        ScanKind::Rs
    } else {
        ScanKind::Ds
    }
}

pub fn phlin_order(side: usize) -> Result<Vec<(usize, usize)>> {
    scan_order(side, phlin_kind(side))
}

pub fn phlin(m: &Matrix2D) -> Result<Matrix2D> {
    let side = power_of_two_side(m)?;
    Ok(gather(m, &phlin_order(side)?))
}

/// Inverse of [`phlin`].
pub fn unphlin(s: &Matrix2D) -> Result<Matrix2D> {
    let n = s.cols();
    let side = (n as f64).sqrt().round() as usize;
    if s.rows() != 1 || side * side != n {
        return Err(Error::BadParam(format!("a 1x{n} string is not a linearized square")));
    }
    let order = phlin_order(side)?;
    let mut cells = vec![0; n];
    for (t, &(i, j)) in order.iter().enumerate() {
        cells[(i - 1) * side + j - 1] = s.get(1, t + 1);
    }
    Matrix2D::new(side, side, cells, s.alphabet().clone())
}

/// Positions (as `(1, p)`) of the explicit attractor for `rlin(E_k)`:
/// the union over `i = 1..k` of `(i-1) 2^k + 1`, `(i-1) 2^k + 1 + 2^(i-1)`
/// and `(i-1) 2^k + 2^i`.
pub fn ek_rlin_attractor(k: usize) -> Result<AttractorSet> {
    if !(1..=20).contains(&k) {
        return Err(Error::BadParam(format!("ek attractor needs 1 <= k <= 20, got {k}")));
    }
    let w = 1usize << k;
    Ok(AttractorSet::new((1..=k).flat_map(|i| {
        let base = (i - 1) * w;
        [base + 1, base + 1 + (1 << (i - 1)), base + (1 << i)].map(|p| (1, p))
    })))
}

/// `t_l = 4^0 + ... + 4^(l-1)`.
pub fn one_run_gap(l: u32) -> u64 {
    (0..l).map(|i| 4u64.pow(i)).sum()
}

/// `true` iff `1 0^(t_l) 1` occurs in the binary string `s` for every
/// `l = 1..=k`.
pub fn onerun_certificate(s: &Matrix2D, k: u32) -> bool {
    let one = s.alphabet().get("1");
    let ones: Vec<usize> =
        (0..s.size()).filter(|&p| Some(s.cells()[p]) == one).collect();
    let gaps: std::collections::HashSet<u64> = ones.windows(2).map(|w| (w[1] - w[0] - 1) as u64).collect();
    (1..=k).all(|l| gaps.contains(&one_run_gap(l)))
}

/// Binary `1 x n` string from a `0`/`1` character string.
pub fn bits(text: &str) -> Result<Matrix2D> {
    let alphabet = Alphabet::new(["0", "1"])?;
    let cells = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::BadParam(format!("not a bit: {other:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix2D::new(1, cells.len(), cells, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::families::{alt, ek, identity, staircase, zeros};
    use crate::measures::{delta, gamma_exact, is_attractor, GAMMA_CELL_LIMIT};
    use crate::random::random_matrix;
    use crate::Ratio;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn rlin_examples() {
        assert_eq!(rlin(&ek(2).unwrap()), bits("01010011").unwrap());
        let row = bits("0110").unwrap();
        assert_eq!(rlin(&row), row);
        for k in 1..=8 {
            let mut expect = String::new();
            for i in 1..=k {
                let half = 1 << (i - 1);
                let unit = format!("{}{}", "0".repeat(half), "1".repeat(half));
                expect.push_str(&unit.repeat(1 << (k - i)));
            }
            assert_eq!(rlin(&ek(k).unwrap()), bits(&expect).unwrap(), "k={k}");
        }
        let m = alt(3, 4).unwrap();
        assert_eq!(unrlin(&rlin(&m), 3).unwrap(), m);
    }

    #[test]
    fn scan_examples() {
        for k in 0..=6 {
            let id = identity(1 << k).unwrap();
            assert_eq!(scan(&id, ScanKind::Ds).unwrap(), scan(&id, ScanKind::Rs).unwrap(), "k={k}");
        }
        let one = Matrix2D::from_char_rows(&["x"]).unwrap();
        for kind in [ScanKind::Ls, ScanKind::Rs, ScanKind::Us, ScanKind::Ds] {
            assert_eq!(scan(&one, kind).unwrap(), one);
        }
        // rs on [a b; c d] = ds(a) rs(b) rs(d) us(c) = a b d c.
        let m = Matrix2D::from_char_rows(&["ab", "cd"]).unwrap();
        assert_eq!(scan(&m, ScanKind::Rs).unwrap(), Matrix2D::from_char_rows(&["abdc"]).unwrap());
        assert_eq!(scan(&m, ScanKind::Ds).unwrap(), Matrix2D::from_char_rows(&["acdb"]).unwrap());
        assert_eq!(scan(&m, ScanKind::Us).unwrap(), Matrix2D::from_char_rows(&["dbac"]).unwrap());
        assert_eq!(scan(&m, ScanKind::Ls).unwrap(), Matrix2D::from_char_rows(&["dcab"]).unwrap());
        assert!(matches!(scan(&alt(2, 4).unwrap(), ScanKind::Rs), Err(Error::NotPowerOfTwoSquare { .. })));
        assert!(matches!(phlin(&identity(3).unwrap()), Err(Error::NotPowerOfTwoSquare { .. })));
    }

    #[test]
    fn scan_of_four_by_four_unrolled() {
        // rs(M) = ds(UL) rs(UR) rs(LR) us(LL), each quadrant unrolled with
        // the 2x2 orders checked above.
        let m = Matrix2D::from_char_rows(&["abcd", "efgh", "ijkl", "mnop"]).unwrap();
        let got = scan(&m, ScanKind::Rs).unwrap().to_token_string().replace(' ', "");
        // ds(UL=[a b; e f]) = a e f b; rs(UR=[c d; g h]) = c d h g;
        // rs(LR=[k l; o p]) = k l p o; us(LL=[i j; m n]) = n j i m.
        assert_eq!(got, "aefbcdhgklponjim");
    }

    #[test]
    fn phlin_examples() {
        assert_eq!(phlin(&identity(2).unwrap()).unwrap(), bits("1010").unwrap());
        assert_eq!(phlin(&identity(4).unwrap()).unwrap(), bits("1010000010100000").unwrap());
        for k in 1..=6usize {
            let cur = phlin(&identity(1 << k).unwrap()).unwrap().to_token_string().replace(' ', "");
            let prev = phlin(&identity(1 << (k - 1)).unwrap()).unwrap().to_token_string().replace(' ', "");
            let pad = "0".repeat(1 << (2 * (k - 1)));
            assert_eq!(cur, format!("{prev}{pad}{prev}{pad}"), "k={k}");
        }
    }

    #[test]
    fn phlin_is_a_path_of_adjacent_cells() {
        for side in [2, 4, 8, 16] {
            let order = phlin_order(side).unwrap();
            for w in order.windows(2) {
                let d = w[0].0.abs_diff(w[1].0) + w[0].1.abs_diff(w[1].1);
                assert_eq!(d, 1, "side {side}: {:?}", w);
            }
        }
    }

    #[test]
    fn ek_attractor() {
        let a2 = ek_rlin_attractor(2).unwrap();
        assert_eq!(a2, AttractorSet::new([(1, 1), (1, 2), (1, 5), (1, 7), (1, 8)]));
        for k in 1..=8 {
            let a = ek_rlin_attractor(k).unwrap();
            assert_eq!(a.len(), 3 * k - 1);
            assert!(is_attractor(&rlin(&ek(k).unwrap()), &a, false, &b()).unwrap(), "k={k}");
        }
        assert!(ek_rlin_attractor(0).is_err());
    }

    #[test]
    fn onerun_examples() {
        let p4 = phlin(&identity(4).unwrap()).unwrap();
        assert!(onerun_certificate(&p4, 2));
        assert!(!onerun_certificate(&zeros(1, 30).unwrap(), 1));
        for k in 1..=6u32 {
            assert!(onerun_certificate(&phlin(&identity(1 << k).unwrap()).unwrap(), k));
        }
        assert_eq!(one_run_gap(2), 5);
    }

    #[test]
    fn staircase_row_delta_grows() {
        for n in [8usize, 16, 32] {
            let s = staircase(n).unwrap();
            let d = delta(&s, &b()).unwrap().value;
            assert!(d <= Ratio::from(6));
            let r = delta(&rlin(&s), &b()).unwrap().value;
            assert!(r >= Ratio::new(n as u64 - 1, 2), "n={n}: {r}");
        }
    }

    #[test]
    fn gamma_on_tiny_linearizations_is_consistent() {
        for k in 1..=2 {
            let s = rlin(&ek(k).unwrap());
            let g = gamma_exact(&s, false, GAMMA_CELL_LIMIT, &b()).unwrap();
            assert!(is_attractor(&s, &g, false, &b()).unwrap());
            assert!(g.len() <= ek_rlin_attractor(k).unwrap().len());
        }
    }

    proptest! {
        #[test]
        fn linearizations_are_permutations(seed in 0u64..1000, k in 0u32..5) {
            let side = 1usize << k;
            let m = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), side, side, 3);
            let p = phlin(&m).unwrap();
            let r = rlin(&m);
            prop_assert_eq!(p.size(), side * side);
            let mut a = p.cells().to_vec();
            let mut c = r.cells().to_vec();
            a.sort();
            c.sort();
            prop_assert_eq!(a, c);
            prop_assert_eq!(unphlin(&p).unwrap(), m);
        }
    }
}
