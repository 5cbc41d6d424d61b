//! Dense 2D strings over a small token alphabet.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense symbol id; an index into an [`Alphabet`].
pub type Symbol = u32;

/// Ordered table of symbol tokens. Tokens are non-empty, whitespace-free and
/// pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for token in tokens {
            let token = token.into();
            if alphabet.index.contains_key(&token) {
                return Err(Error::BadParam(format!("duplicate token {token:?}")));
            }
            alphabet.push(token)?;
        }
        Ok(alphabet)
    }

    /// Alphabet whose tokens are the decimal ids `0..size`.
    pub fn numeric(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| i.to_string())).expect("numeric tokens are distinct")
    }

    fn push(&mut self, token: String) -> Result<Symbol> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::BadParam(format!("invalid token {token:?}")));
        }
        let id = self.tokens.len() as Symbol;
        self.index.insert(token.clone(), id);
        self.tokens.push(token);
        Ok(id)
    }

    /// Returns the id of `token`, appending it when absent.
    pub fn intern(&mut self, token: &str) -> Result<Symbol> {
        match self.index.get(token) {
            Some(&id) => Ok(id),
            None => self.push(token.to_string()),
        }
    }

    pub fn get(&self, token: &str) -> Option<Symbol> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: Symbol) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// A token guaranteed not to be in the alphabet.
    pub fn fresh_token(&self, base: &str) -> String {
        let mut token = base.to_string();
        while self.index.contains_key(&token) {
            token.push('_');
        }
        token
    }
}

/// An `m x n` matrix over an [`Alphabet`], stored row-major.
///
/// Equality is token equality: two matrices are equal when they have the
/// same shape and the same token in every cell, regardless of how their
/// alphabets are ordered.
#[derive(Clone)]
pub struct Matrix2D {
    rows: usize,
    cols: usize,
    cells: Vec<Symbol>,
    alphabet: Alphabet,
}

impl Matrix2D {
    pub fn new(rows: usize, cols: usize, cells: Vec<Symbol>, alphabet: Alphabet) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::BadParam(format!("matrix must be at least 1x1, got {rows}x{cols}")));
        }
        if cells.len() != rows * cols {
            return Err(Error::BadParam(format!(
                "expected {} cells for a {rows}x{cols} matrix, got {}",
                rows * cols,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&c| c as usize >= alphabet.len()) {
            return Err(Error::BadParam(format!("symbol id {bad} outside the alphabet")));
        }
        Ok(Matrix2D { rows, cols, cells, alphabet })
    }

    /// Builds a matrix from rows of tokens, interning tokens in order of
    /// first appearance.
    pub fn from_token_rows<R, T>(rows: &[R]) -> Result<Self>
    where
        R: AsRef<[T]>,
        T: AsRef<str>,
    {
        let mut alphabet = Alphabet::default();
        let mut cells = Vec::new();
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::BadParam("ragged rows".into()));
            }
            for token in row {
                cells.push(alphabet.intern(token.as_ref())?);
            }
        }
        Matrix2D::new(rows.len(), cols, cells, alphabet)
    }

    /// Builds a matrix from strings where every character is one token,
    /// e.g. `["0101", "0011"]`.
    pub fn from_char_rows(rows: &[&str]) -> Result<Self> {
        let token_rows: Vec<Vec<String>> =
            rows.iter().map(|r| r.chars().map(String::from).collect()).collect();
        Matrix2D::from_token_rows(&token_rows)
    }

    /// Matrix with the given alphabet, cells given as ids.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        alphabet: Alphabet,
        mut f: impl FnMut(usize, usize) -> Symbol,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                cells.push(f(i, j));
            }
        }
        Matrix2D::new(rows, cols, cells, alphabet)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of cells `N = m n`.
    pub fn size(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// 1-based cell access.
    pub fn get(&self, i: usize, j: usize) -> Symbol {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols, "({i},{j}) out of bounds");
        self.cells[(i - 1) * self.cols + (j - 1)]
    }

    #[inline]
    pub(crate) fn at0(&self, i: usize, j: usize) -> Symbol {
        self.cells[i * self.cols + j]
    }

    pub fn token(&self, i: usize, j: usize) -> &str {
        self.alphabet.token(self.get(i, j))
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.cells[(i - 1) * self.cols..i * self.cols]
    }

    /// Tokens of the matrix concatenated row by row (handy for 1-row
    /// strings over single-character tokens).
    pub fn to_token_string(&self) -> String {
        self.cells.iter().map(|&c| self.alphabet.token(c)).collect()
    }

    /// Symbols that actually occur, sorted.
    pub fn used_symbols(&self) -> Vec<Symbol> {
        let mut seen = vec![false; self.alphabet.len()];
        for &c in &self.cells {
            seen[c as usize] = true;
        }
        (0..seen.len() as Symbol).filter(|&s| seen[s as usize]).collect()
    }

    /// Re-expresses the matrix over `target`, appending unknown tokens to it.
    fn cells_in(&self, target: &mut Alphabet) -> Result<Vec<Symbol>> {
        let remap: Vec<Symbol> = self
            .alphabet
            .tokens()
            .iter()
            .map(|t| target.intern(t))
            .collect::<Result<_>>()?;
        Ok(self.cells.iter().map(|&c| remap[c as usize]).collect())
    }

    /// Horizontal concatenation `A ⊘ B`; alphabets merge by token.
    pub fn concat_h(&self, other: &Matrix2D) -> Result<Matrix2D> {
        if self.rows != other.rows {
            return Err(Error::RowMismatch { left: self.rows, right: other.rows });
        }
        let mut alphabet = self.alphabet.clone();
        let right = other.cells_in(&mut alphabet)?;
        let cols = self.cols + other.cols;
        let mut cells = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            cells.extend_from_slice(&self.cells[i * self.cols..(i + 1) * self.cols]);
            cells.extend_from_slice(&right[i * other.cols..(i + 1) * other.cols]);
        }
        Matrix2D::new(self.rows, cols, cells, alphabet)
    }

    /// Vertical concatenation `A ⊖ B`; alphabets merge by token.
    pub fn concat_v(&self, other: &Matrix2D) -> Result<Matrix2D> {
        if self.cols != other.cols {
            return Err(Error::ColMismatch { top: self.cols, bottom: other.cols });
        }
        let mut alphabet = self.alphabet.clone();
        let bottom = other.cells_in(&mut alphabet)?;
        let mut cells = self.cells.clone();
        cells.extend(bottom);
        Matrix2D::new(self.rows + other.rows, self.cols, cells, alphabet)
    }

    /// `M[i1..i2][j1..j2]`, 1-based inclusive. The alphabet is kept as is.
    pub fn submatrix(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> Result<Matrix2D> {
        if i1 < 1 || j1 < 1 || i1 > i2 || j1 > j2 || i2 > self.rows || j2 > self.cols {
            return Err(Error::OutOfBounds(format!(
                "[{i1}..{i2}][{j1}..{j2}] in a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut cells = Vec::with_capacity((i2 - i1 + 1) * (j2 - j1 + 1));
        for i in i1 - 1..i2 {
            cells.extend_from_slice(&self.cells[i * self.cols + j1 - 1..i * self.cols + j2]);
        }
        Matrix2D::new(i2 - i1 + 1, j2 - j1 + 1, cells, self.alphabet.clone())
    }

    /// Same content with the alphabet reduced to used tokens, in order of
    /// first appearance.
    pub fn normalized(&self) -> Matrix2D {
        let mut alphabet = Alphabet::default();
        let cells = self
            .cells
            .iter()
            .map(|&c| alphabet.intern(self.alphabet.token(c)).expect("valid token"))
            .collect();
        Matrix2D { rows: self.rows, cols: self.cols, cells, alphabet }
    }

    /// Text form: `2d <m> <n>` then one line of tokens per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("2d {} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<&str> = self.cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|&c| self.alphabet.token(c))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Matrix2D> {
        let mut lines = content_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing `2d <m> <n>` header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "2d" {
            return Err(Error::parse(hline, 1, "expected `2d <m> <n>`"));
        }
        let rows = parse_positive(fields[1], hline, 4)?;
        let cols = parse_positive(fields[2], hline, 5 + fields[1].len())?;
        let mut alphabet = Alphabet::default();
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (lno, line) = lines.next().ok_or_else(|| {
                Error::parse(hline + r + 1, 1, format!("expected {rows} rows, found {r}"))
            })?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != cols {
                let column = line.len() + 1;
                return Err(Error::parse(
                    lno,
                    column,
                    format!("row has {} tokens, expected {cols}", tokens.len()),
                ));
            }
            for t in tokens {
                cells.push(alphabet.intern(t)?);
            }
        }
        if let Some((lno, _)) = lines.next() {
            return Err(Error::parse(lno, 1, "trailing content after the last row"));
        }
        Matrix2D::new(rows, cols, cells, alphabet)
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#')).then_some((i + 1, t))
    })
}

pub(crate) fn parse_positive(field: &str, line: usize, column: usize) -> Result<usize> {
    match field.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::parse(line, column, format!("expected a positive integer, got {field:?}"))),
    }
}

impl PartialEq for Matrix2D {
    fn eq(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let remap: Vec<Option<Symbol>> =
            self.alphabet.tokens().iter().map(|t| other.alphabet.get(t)).collect();
        self.cells
            .iter()
            .zip(&other.cells)
            .all(|(&a, &b)| remap[a as usize] == Some(b))
    }
}

impl Eq for Matrix2D {}

impl fmt::Debug for Matrix2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix2D {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, " /")?;
            }
            for j in 0..self.cols {
                write!(f, " {}", self.alphabet.token(self.at0(i, j)))?;
            }
        }
        write!(f, " ]")
    }
}

impl fmt::Display for Matrix2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_a() -> Matrix2D {
        Matrix2D::from_char_rows(&["aba", "abb"]).unwrap()
    }
    fn example_b() -> Matrix2D {
        Matrix2D::from_char_rows(&["bbab", "bbbb"]).unwrap()
    }
    fn example_c() -> Matrix2D {
        Matrix2D::from_char_rows(&["aaa", "aab", "abb"]).unwrap()
    }

    #[test]
    fn horizontal_concatenation_example() {
        let ab = example_a().concat_h(&example_b()).unwrap();
        assert_eq!(ab, Matrix2D::from_char_rows(&["ababbab", "abbbbbb"]).unwrap());
        assert_eq!(
            example_a().concat_h(&example_c()),
            Err(Error::RowMismatch { left: 2, right: 3 })
        );
        let a = Matrix2D::from_char_rows(&["a"]).unwrap();
        assert_eq!(a.concat_h(&a).unwrap().to_text(), "2d 1 2\na a\n");
    }

    #[test]
    fn vertical_concatenation_example() {
        let ac = example_a().concat_v(&example_c()).unwrap();
        assert_eq!(ac, Matrix2D::from_char_rows(&["aba", "abb", "aaa", "aab", "abb"]).unwrap());
        assert_eq!(
            example_a().concat_v(&example_b()),
            Err(Error::ColMismatch { top: 3, bottom: 4 })
        );
        let a = Matrix2D::from_char_rows(&["a"]).unwrap();
        let b = Matrix2D::from_char_rows(&["b"]).unwrap();
        assert_eq!(a.concat_v(&b).unwrap().to_text(), "2d 2 1\na\nb\n");
    }

    #[test]
    fn concat_merges_alphabets_by_token() {
        let x = Matrix2D::from_char_rows(&["xy"]).unwrap();
        let y = Matrix2D::from_char_rows(&["yz"]).unwrap();
        let xy = x.concat_h(&y).unwrap();
        assert_eq!(xy.alphabet().tokens(), &["x", "y", "z"]);
        assert_eq!(xy.to_token_string(), "xyyz");
    }

    #[test]
    fn submatrix_example_factor() {
        let m = Matrix2D::from_char_rows(&["aabb"; 5]).unwrap();
        let f1 = m.submatrix(2, 2, 4, 3).unwrap();
        assert_eq!(f1, Matrix2D::from_char_rows(&["ab", "ab", "ab"]).unwrap());
        assert_eq!(m.submatrix(1, 1, 5, 4).unwrap(), m);
        assert!(matches!(m.submatrix(1, 1, 6, 4), Err(Error::OutOfBounds(_))));
        assert!(matches!(m.submatrix(3, 1, 2, 4), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn parse_and_write() {
        let m = Matrix2D::parse("2d 1 3\na b a\n").unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 3));
        let messy = "# comment\n\n2d 2 2\n  a   b\n\n# x\nb a \n";
        let m = Matrix2D::parse(messy).unwrap();
        assert_eq!(m.to_text(), "2d 2 2\na b\nb a\n");
        assert_eq!(Matrix2D::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_position() {
        match Matrix2D::parse("2d 2 2\na b\na\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Matrix2D::parse("3d 1 1\na\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Matrix2D::parse("2d 0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Matrix2D::parse("2d 1 1\na\nb\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(Matrix2D::parse("2d 2 1\na\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn equality_ignores_alphabet_order() {
        let a = Matrix2D::from_char_rows(&["01", "10"]).unwrap();
        let b = Matrix2D::new(2, 2, vec![1, 0, 0, 1], Alphabet::new(["1", "0"]).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = Matrix2D::from_char_rows(&["01", "11"]).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn alphabet_rejects_bad_tokens() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
        assert!(Alphabet::new([""]).is_err());
    }
}
