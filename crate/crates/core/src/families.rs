//! Deterministic generators for the matrix families used in the separation
//! experiments.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{Alphabet, Matrix2D, Symbol};
use crate::multidim::NdString;

fn binary() -> Alphabet {
    Alphabet::new(["0", "1"]).expect("distinct tokens")
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BadParam(msg()))
    }
}

/// `n x n` identity matrix over `{0, 1}`.
pub fn identity(n: usize) -> Result<Matrix2D> {
    need(n >= 1, || "identity needs n >= 1".into())?;
    Matrix2D::from_fn(n, n, binary(), |i, j| (i == j) as Symbol)
}

/// `m x n` matrix with `I_min(m,n)` in the top-left corner and zeros elsewhere.
pub fn diagpad(m: usize, n: usize) -> Result<Matrix2D> {
    need(m >= 1 && n >= 1, || "diagpad needs m, n >= 1".into())?;
    Matrix2D::from_fn(m, n, binary(), |i, j| (i == j) as Symbol)
}

/// All-zero `m x n` matrix.
pub fn zeros(m: usize, n: usize) -> Result<Matrix2D> {
    need(m >= 1 && n >= 1, || "zeros needs m, n >= 1".into())?;
    Matrix2D::from_fn(m, n, Alphabet::new(["0"]).expect("single token"), |_, _| 0)
}

/// `m x n` matrix whose rows all read `0101...`.
pub fn alt(m: usize, n: usize) -> Result<Matrix2D> {
    need(m >= 1 && n >= 1, || "alt needs m, n >= 1".into())?;
    Matrix2D::from_fn(m, n, binary(), |_, j| (j % 2) as Symbol)
}

/// `k x 2^k` matrix whose column `i` is `i - 1` in binary, least significant
/// bit in the top row.
pub fn ek(k: usize) -> Result<Matrix2D> {
    need((1..=20).contains(&k), || format!("ek needs 1 <= k <= 20, got {k}"))?;
    Matrix2D::from_fn(k, 1 << k, binary(), |i, j| ((j >> i) & 1) as Symbol)
}

/// Lexicographically least binary de Bruijn sequence of order `k`, made
/// linear by repeating its first `k - 1` bits; length `2^k + k - 1`.
pub fn debruijn_bits(k: usize) -> Result<Vec<u8>> {
    need((1..=20).contains(&k), || format!("de Bruijn order must be in 1..=20, got {k}"))?;
    // Concatenation of the Lyndon words whose length divides k, in
    // lexicographic order (generated by the standard prenecklace recursion).
    fn gen(t: usize, p: usize, k: usize, a: &mut Vec<u8>, out: &mut Vec<u8>) {
        if t > k {
            if k % p == 0 {
                out.extend_from_slice(&a[1..=p]);
            }
            return;
        }
        a[t] = a[t - p];
        gen(t + 1, p, k, a, out);
        for b in a[t - p] + 1..2 {
            a[t] = b;
            gen(t + 1, t, k, a, out);
        }
    }
    let mut a = vec![0u8; k + 1];
    let mut seq = Vec::with_capacity((1 << k) + k - 1);
    gen(1, 1, k, &mut a, &mut seq);
    let wrap: Vec<u8> = seq[..k - 1].to_vec();
    seq.extend(wrap);
    Ok(seq)
}

/// The de Bruijn word `D_k` as a `1 x (2^k + k - 1)` matrix.
pub fn debruijn1d(k: usize) -> Result<Matrix2D> {
    let bits = debruijn_bits(k)?;
    Matrix2D::new(1, bits.len(), bits.into_iter().map(Symbol::from).collect(), binary())
}

/// Tokens `b_1 ... b_d` for every `d`-bit id, most significant bit first.
fn bit_tokens(d: usize) -> Alphabet {
    Alphabet::new((0..1usize << d).map(|v| format!("{v:0d$b}"))).expect("distinct tokens")
}

/// `B_k[i][j] = <D_k[i], D_k[j]>`, encoded as `2 D_k[i] + D_k[j]`.
pub fn bk(k: usize) -> Result<Matrix2D> {
    need((1..=12).contains(&k), || format!("bk needs 1 <= k <= 12, got {k}"))?;
    let d = debruijn_bits(k)?;
    let n = d.len();
    Matrix2D::from_fn(n, n, bit_tokens(2), |i, j| (2 * d[i] + d[j]) as Symbol)
}

/// `d`-dimensional de Bruijn hypercube; the symbol at `(i_1..i_d)` is the
/// bit string `D_k[i_1] ... D_k[i_d]`.
pub fn bdk(d: usize, k: usize) -> Result<NdString> {
    need(d >= 1 && k >= 1 && d * k <= 24, || format!("bdk needs d, k >= 1 and d*k <= 24, got d={d}, k={k}"))?;
    let bits = debruijn_bits(k)?;
    let n = bits.len();
    let total = n.checked_pow(d as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
        Error::TooLarge(format!("bdk({d},{k}) has more than 2^24 cells"))
    })?;
    let mut cells = Vec::with_capacity(total);
    for flat in 0..total {
        // Row-major: the last axis varies fastest.
        let mut rest = flat;
        let mut id = 0u32;
        for axis in (0..d).rev() {
            let coord = rest % n;
            rest /= n;
            id |= (bits[coord] as u32) << (d - 1 - axis);
        }
        cells.push(id);
    }
    NdString::new(vec![n; d], cells, bit_tokens(d))
}

/// `I_{n-1}` with a row of zeros appended below and a column of ones on the
/// right.
pub fn staircase(n: usize) -> Result<Matrix2D> {
    need(n >= 2, || format!("staircase needs n >= 2, got {n}"))?;
    Matrix2D::from_fn(n, n, binary(), |i, j| (j == n - 1 || (i == j && i < n - 1)) as Symbol)
}

/// `n x n` matrix whose first row is `B_1 B_2 ... B_{sqrt(n)/2}` with
/// `B_i = 1^i 0^(2 sqrt(n) - i)` and whose other rows are all `#`.
pub fn cmblocks(n: usize) -> Result<Matrix2D> {
    let s = (n as f64).sqrt().round() as usize;
    need(n >= 4 && s * s == n && s % 2 == 0, || {
        format!("cmblocks needs an even perfect square n >= 4, got {n}")
    })?;
    let mut first = Vec::with_capacity(n);
    for i in 1..=s / 2 {
        first.extend(std::iter::repeat(1).take(i));
        first.extend(std::iter::repeat(0).take(2 * s - i));
    }
    let alphabet = Alphabet::new(["0", "1", "#"]).expect("distinct tokens");
    Matrix2D::from_fn(n, n, alphabet, |i, j| if i == 0 { first[j] } else { 2 })
}

/// Family names accepted by [`FamilySpec`].
pub const FAMILY_NAMES: &[&str] = &[
    "identity", "zeros", "ek", "debruijn1d", "bk", "bdk", "diagpad", "staircase", "cmblocks",
    "alt",
];

/// A family name plus its integer parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub params: Vec<usize>,
}

/// Output of a generator: most families are 2D, `bdk` is d-dimensional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Matrix(Matrix2D),
    Nd(NdString),
}

impl FamilySpec {
    pub fn new(name: &str, params: &[usize]) -> Self {
        FamilySpec { name: name.to_string(), params: params.to_vec() }
    }

    fn arity(&self) -> Result<usize> {
        let arity = match self.name.as_str() {
            "identity" | "ek" | "debruijn1d" | "bk" | "staircase" | "cmblocks" => 1,
            "zeros" | "alt" | "diagpad" | "bdk" => 2,
            other => {
                return Err(Error::BadParam(format!(
                    "unknown family {other:?}; expected one of {}",
                    FAMILY_NAMES.join(", ")
                )))
            }
        };
        need(self.params.len() == arity, || {
            format!("family {} takes {arity} parameter(s), got {}", self.name, self.params.len())
        })?;
        Ok(arity)
    }

    pub fn generate(&self) -> Result<Generated> {
        self.arity()?;
        let p = &self.params;
        let m = match self.name.as_str() {
            "identity" => identity(p[0])?,
            "ek" => ek(p[0])?,
            "debruijn1d" => debruijn1d(p[0])?,
            "bk" => bk(p[0])?,
            "staircase" => staircase(p[0])?,
            "cmblocks" => cmblocks(p[0])?,
            "zeros" => zeros(p[0], p[1])?,
            "alt" => alt(p[0], p[1])?,
            "diagpad" => diagpad(p[0], p[1])?,
            "bdk" => return Ok(Generated::Nd(bdk(p[0], p[1])?)),
            _ => unreachable!("arity() rejects unknown names"),
        };
        Ok(Generated::Matrix(m))
    }

    /// Generates a 2D family, rejecting `bdk` with `d != 2`.
    pub fn matrix(&self) -> Result<Matrix2D> {
        match self.generate()? {
            Generated::Matrix(m) => Ok(m),
            Generated::Nd(nd) => nd.to_matrix(),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        write!(f, "{}({})", self.name, params.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn identity_and_diagpad() {
        assert_eq!(identity(1).unwrap().to_token_string(), "1");
        assert_eq!(identity(3).unwrap().to_token_string(), "100010001");
        assert_eq!(identity(7).unwrap().get(7, 7), 1);
        assert_eq!(diagpad(4, 4).unwrap(), identity(4).unwrap());
        assert_eq!(diagpad(1, 3).unwrap().to_token_string(), "100");
        let d = diagpad(7, 10).unwrap();
        for i in 1..=7 {
            for j in 1..=10 {
                assert_eq!(d.token(i, j), if i == j { "1" } else { "0" });
            }
        }
        assert!(identity(0).is_err());
    }

    #[test]
    fn ek_rows_and_columns() {
        let e2 = ek(2).unwrap();
        assert_eq!(e2.submatrix(1, 1, 1, 4).unwrap().to_token_string(), "0101");
        assert_eq!(e2.submatrix(2, 1, 2, 4).unwrap().to_token_string(), "0011");
        let e4 = ek(4).unwrap();
        let expected = [
            "0101010101010101",
            "0011001100110011",
            "0000111100001111",
            "0000000011111111",
        ];
        assert_eq!(e4, Matrix2D::from_char_rows(&expected).unwrap());
        for k in 1..=8 {
            let e = ek(k).unwrap();
            for i in 1..=k {
                let block = "0".repeat(1 << (i - 1)) + &"1".repeat(1 << (i - 1));
                let row = block.repeat(1 << (k - i));
                assert_eq!(e.submatrix(i, 1, i, 1 << k).unwrap().to_token_string(), row);
            }
            let cols: HashSet<Vec<Symbol>> =
                (1..=1 << k).map(|j| (1..=k).map(|i| e.get(i, j)).collect()).collect();
            assert_eq!(cols.len(), 1 << k);
        }
        assert!(ek(0).is_err());
        assert!(ek(21).is_err());
    }

    #[test]
    fn debruijn_words() {
        assert_eq!(debruijn1d(3).unwrap().to_token_string(), "0001011100");
        assert_eq!(debruijn1d(1).unwrap().to_token_string(), "01");
        for k in 1..=12 {
            let bits = debruijn_bits(k).unwrap();
            assert_eq!(bits.len(), (1 << k) + k - 1);
            let windows: HashSet<&[u8]> = bits.windows(k).collect();
            assert_eq!(windows.len(), 1 << k, "k={k}");
        }
    }

    #[test]
    fn bk_structure() {
        let b3 = bk(3).unwrap();
        let d = debruijn_bits(3).unwrap();
        assert_eq!((b3.rows(), b3.cols()), (10, 10));
        assert_eq!(b3.token(4, 5), "10");
        assert_eq!(b3.token(1, 1), "00");
        assert_eq!(b3.token(6, 7), "11");
        assert_eq!(b3.token(5, 6), "01");
        for k in 1..=5 {
            let b = bk(k).unwrap();
            let d = debruijn_bits(k).unwrap();
            let rows: HashSet<&[Symbol]> = (1..=b.rows()).map(|i| b.row(i)).collect();
            assert_eq!(rows.len(), 2);
            for i in 1..=b.rows() {
                for j in 1..=b.rows() {
                    assert_eq!(b.row(i) == b.row(j), d[i - 1] == d[j - 1]);
                }
            }
        }
        assert_eq!(d.len(), 10);
        assert_eq!((bk(1).unwrap().rows(), bk(1).unwrap().cols()), (2, 2));
    }

    #[test]
    fn staircase_construction() {
        assert_eq!(staircase(2).unwrap(), Matrix2D::from_char_rows(&["11", "01"]).unwrap());
        let s8 = staircase(8).unwrap();
        let expected = [
            "10000001", "01000001", "00100001", "00010001", "00001001", "00000101", "00000011",
            "00000001",
        ];
        assert_eq!(s8, Matrix2D::from_char_rows(&expected).unwrap());
        assert!(staircase(1).is_err());
    }

    #[test]
    fn cmblocks_construction() {
        let c4 = cmblocks(4).unwrap();
        assert_eq!(c4.to_text(), "2d 4 4\n1 0 0 0\n# # # #\n# # # #\n# # # #\n");
        let c16 = cmblocks(16).unwrap();
        assert_eq!(c16.submatrix(1, 1, 1, 16).unwrap().to_token_string(), "1000000011000000");
        assert!(cmblocks(6).is_err());
        assert!(cmblocks(9).is_err());
    }

    #[test]
    fn zeros_and_alt() {
        assert_eq!(zeros(1, 1).unwrap().to_token_string(), "0");
        assert_eq!(alt(1, 2).unwrap().to_token_string(), "01");
        assert_eq!(alt(4, 6).unwrap().to_token_string(), "010101".repeat(4));
    }

    #[test]
    fn generators_are_deterministic() {
        for name in FAMILY_NAMES {
            let params: &[usize] = match *name {
                "zeros" | "alt" | "diagpad" => &[3, 5],
                "bdk" => &[2, 2],
                "cmblocks" => &[16],
                _ => &[3],
            };
            let spec = FamilySpec::new(name, params);
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        }
        assert!(FamilySpec::new("nope", &[1]).generate().is_err());
        assert!(FamilySpec::new("zeros", &[1]).generate().is_err());
    }
}
