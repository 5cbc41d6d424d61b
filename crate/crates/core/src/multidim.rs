//! d-dimensional strings, their grammars, substring complexity, attractor
//! checking and macro-scheme validation.
//!
//! Axes are numbered from 1; the last axis varies fastest in the flat cell
//! order. A matrix embeds as a 2D string with rows on axis 1 and columns on
//! axis 2, so `⊘` is concatenation on axis 2 and `⊖` on axis 1.

use std::collections::HashMap;
use std::fmt;

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::grammar::{debruijn_slp, Grammar2D, Rule2D};
use crate::macroscheme::resolve_roots;
use crate::matrix::{content_lines, parse_positive, Alphabet, Matrix2D, Symbol};
use crate::Ratio;

/// Flat row-major d-dimensional array over an [`Alphabet`].
#[derive(Clone)]
pub struct NdString {
    dims: Vec<usize>,
    cells: Vec<Symbol>,
    alphabet: Alphabet,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * dims[a + 1];
    }
    s
}

impl NdString {
    pub fn new(dims: Vec<usize>, cells: Vec<Symbol>, alphabet: Alphabet) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&n| n == 0) {
            return Err(Error::BadParam(format!("dimensions must be positive, got {dims:?}")));
        }
        let total = dims.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        if total != Some(cells.len()) {
            return Err(Error::BadParam(format!(
                "{} cells do not fill dimensions {dims:?}",
                cells.len()
            )));
        }
        if cells.iter().any(|&c| c as usize >= alphabet.len()) {
            return Err(Error::BadParam("symbol id outside the alphabet".into()));
        }
        Ok(NdString { dims, cells, alphabet })
    }

    /// The matrix as a 2D string (rows on axis 1).
    pub fn from_matrix(m: &Matrix2D) -> Self {
        NdString { dims: vec![m.rows(), m.cols()], cells: m.cells().to_vec(), alphabet: m.alphabet().clone() }
    }

    /// Back to a matrix; requires `d = 2`, or `d = 1` as a single row.
    pub fn to_matrix(&self) -> Result<Matrix2D> {
        match self.dims[..] {
            [n] => Matrix2D::new(1, n, self.cells.clone(), self.alphabet.clone()),
            [m, n] => Matrix2D::new(m, n, self.cells.clone(), self.alphabet.clone()),
            _ => Err(Error::BadParam(format!("{}-dimensional string is not a matrix", self.ndim()))),
        }
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 1-based cell access.
    pub fn get(&self, index: &[usize]) -> Symbol {
        assert_eq!(index.len(), self.ndim());
        let s = strides(&self.dims);
        let flat: usize = index
            .iter()
            .zip(&self.dims)
            .zip(&s)
            .map(|((&i, &n), &st)| {
                assert!(i >= 1 && i <= n, "index {index:?} out of bounds");
                (i - 1) * st
            })
            .sum();
        self.cells[flat]
    }

    /// Concatenation along `axis` (1-based); all other extents must agree.
    pub fn concat_axis(&self, other: &NdString, axis: usize) -> Result<NdString> {
        if self.ndim() != other.ndim() {
            return Err(Error::DimMismatch(format!(
                "{}-dimensional and {}-dimensional operands",
                self.ndim(),
                other.ndim()
            )));
        }
        if axis < 1 || axis > self.ndim() {
            return Err(Error::BadParam(format!("axis {axis} outside 1..={}", self.ndim())));
        }
        let a = axis - 1;
        if (0..self.ndim()).any(|j| j != a && self.dims[j] != other.dims[j]) {
            return Err(Error::AxisMismatch { axis });
        }
        let mut alphabet = self.alphabet.clone();
        let remap: Vec<Symbol> =
            other.alphabet.tokens().iter().map(|t| alphabet.intern(t)).collect::<Result<_>>()?;
        // Blocks: everything before axis a is the outer loop, the slab from
        // axis a on is contiguous.
        let outer: usize = self.dims[..a].iter().product();
        let left: usize = self.dims[a..].iter().product();
        let right: usize = other.dims[a..].iter().product();
        let mut cells = Vec::with_capacity(self.len() + other.len());
        for o in 0..outer {
            cells.extend_from_slice(&self.cells[o * left..(o + 1) * left]);
            cells.extend(other.cells[o * right..(o + 1) * right].iter().map(|&c| remap[c as usize]));
        }
        let mut dims = self.dims.clone();
        dims[a] += other.dims[a];
        NdString::new(dims, cells, alphabet)
    }

    /// Text form: `nd <d> <n1> ... <nd>` then the tokens in flat order, one
    /// last-axis fiber per line.
    pub fn to_text(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        let mut out = format!("nd {} {}\n", self.ndim(), dims.join(" "));
        let last = *self.dims.last().expect("d >= 1");
        for fiber in self.cells.chunks(last) {
            let toks: Vec<&str> = fiber.iter().map(|&c| self.alphabet.token(c)).collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<NdString> {
        let mut lines = content_lines(text);
        let (hline, header) =
            lines.next().ok_or_else(|| Error::parse(1, 1, "missing `nd <d> <n1> ... <nd>` header"))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() < 2 || f[0] != "nd" {
            return Err(Error::parse(hline, 1, "expected `nd <d> <n1> ... <nd>`"));
        }
        let d = parse_positive(f[1], hline, 4)?;
        if f.len() != d + 2 {
            return Err(Error::parse(hline, 1, format!("expected {d} extents after `nd {d}`")));
        }
        let dims: Vec<usize> =
            f[2..].iter().map(|t| parse_positive(t, hline, header.find(t).unwrap_or(0) + 1)).collect::<Result<_>>()?;
        let total: usize = dims.iter().product();
        let mut alphabet = Alphabet::default();
        let mut cells = Vec::with_capacity(total);
        let mut last_line = hline;
        for (lno, line) in lines {
            last_line = lno;
            for tok in line.split_whitespace() {
                if cells.len() == total {
                    return Err(Error::parse(lno, column_of(line, tok), "more tokens than cells"));
                }
                cells.push(alphabet.intern(tok)?);
            }
        }
        if cells.len() != total {
            return Err(Error::parse(last_line + 1, 1, format!("expected {total} tokens, found {}", cells.len())));
        }
        NdString::new(dims, cells, alphabet)
    }
}

fn column_of(line: &str, tok: &str) -> usize {
    line.find(tok).map(|p| p + 1).unwrap_or(1)
}

impl PartialEq for NdString {
    fn eq(&self, other: &Self) -> bool {
        if self.dims != other.dims {
            return false;
        }
        let remap: Vec<Option<Symbol>> =
            self.alphabet.tokens().iter().map(|t| other.alphabet.get(t)).collect();
        self.cells.iter().zip(&other.cells).all(|(&a, &b)| remap[a as usize] == Some(b))
    }
}

impl Eq for NdString {}

impl fmt::Debug for NdString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NdString {:?} [", self.dims)?;
        for &c in self.cells.iter().take(64) {
            write!(f, " {}", self.alphabet.token(c))?;
        }
        if self.cells.len() > 64 {
            write!(f, " ...")?;
        }
        write!(f, " ]")
    }
}

impl fmt::Display for NdString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Shape lattice walker: visits every window shape `(k_1..k_d)` with exact
/// window ids, extending axis `d` first and reusing each prefix.
struct NdSweep<'a> {
    m: &'a NdString,
    strides: Vec<usize>,
    /// coords[p * d + a] = 0-based coordinate of flat cell p on axis a.
    coords: Vec<usize>,
    shape: Vec<usize>,
    meter: &'a mut Meter,
}

impl NdSweep<'_> {
    fn valid(&self, p: usize) -> bool {
        let d = self.m.ndim();
        (0..d).all(|a| self.coords[p * d + a] + self.shape[a] <= self.m.dims[a])
    }

    fn run(
        &mut self,
        axis: usize,
        ids: &[u32],
        distinct: usize,
        visit: &mut dyn FnMut(&[usize], &[u32], usize, &dyn Fn(usize) -> bool) -> Result<()>,
    ) -> Result<()> {
        if axis == 0 {
            let d = self.m.ndim();
            let (coords, shape, dims) = (&self.coords, &self.shape, &self.m.dims);
            let valid = |p: usize| (0..d).all(|a| coords[p * d + a] + shape[a] <= dims[a]);
            return visit(&self.shape, ids, distinct, &valid);
        }
        let a = axis - 1;
        let base = ids.to_vec();
        let mut cur = ids.to_vec();
        let mut count = distinct;
        for e in 1..=self.m.dims[a] {
            if e > 1 {
                self.shape[a] = e;
                self.meter.charge(cur.len() as u64)?;
                let mut names: HashMap<u64, u32> = HashMap::new();
                let step = (e - 1) * self.strides[a];
                for p in 0..cur.len() {
                    if self.valid(p) {
                        let key = ((cur[p] as u64) << 32) | base[p + step] as u64;
                        let next = names.len() as u32;
                        cur[p] = *names.entry(key).or_insert(next);
                    }
                }
                count = names.len();
            }
            self.run(axis - 1, &cur, count, visit)?;
        }
        self.shape[a] = 1;
        Ok(())
    }
}

/// Calls `visit(shape, ids, distinct, valid)` for every shape; `ids[p]` is
/// meaningful where `valid(p)` holds (window with corner `p` fits).
fn sweep_nd(
    m: &NdString,
    meter: &mut Meter,
    visit: &mut dyn FnMut(&[usize], &[u32], usize, &dyn Fn(usize) -> bool) -> Result<()>,
) -> Result<()> {
    let d = m.ndim();
    let st = strides(&m.dims);
    let mut coords = Vec::with_capacity(m.len() * d);
    for p in 0..m.len() {
        for a in 0..d {
            coords.push(p / st[a] % m.dims[a]);
        }
    }
    let mut dense = std::collections::HashMap::new();
    let base: Vec<u32> = m
        .cells
        .iter()
        .map(|&x| {
            let next = dense.len() as u32;
            *dense.entry(x).or_insert(next)
        })
        .collect();
    let mut sweep = NdSweep { m, strides: st, coords, shape: vec![1; d], meter };
    sweep.run(d, &base, dense.len(), visit)
}

/// Result of [`delta_nd`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdDelta {
    pub value: Ratio,
    pub argmax: Vec<usize>,
}

/// `max P(k_1..k_d) / (k_1 ... k_d)` over all shapes, exactly. Ties go to
/// the smallest volume, then the lexicographically smallest shape.
pub fn delta_nd(m: &NdString, budget: &Budget) -> Result<NdDelta> {
    let shapes: u64 = m.dims.iter().map(|&n| n as u64).product();
    budget.check(shapes.saturating_mul(m.len() as u64))?;
    let mut best: Option<(Ratio, u64, Vec<usize>)> = None;
    let mut meter = budget.meter();
    sweep_nd(m, &mut meter, &mut |shape, _, distinct, _| {
        let vol: u64 = shape.iter().map(|&k| k as u64).product();
        let r = Ratio::new(distinct as u64, vol);
        let better = match &best {
            None => true,
            Some((v, bv, bs)) => r > *v || (r == *v && (vol, shape) < (*bv, &bs[..])),
        };
        if better {
            best = Some((r, vol, shape.to_vec()));
        }
        Ok(())
    })?;
    let (value, _, argmax) = best.expect("at least the unit shape");
    Ok(NdDelta { value, argmax })
}

/// Number of distinct windows of the given shape.
pub fn factor_count_nd(m: &NdString, shape: &[usize], budget: &Budget) -> Result<usize> {
    if shape.len() != m.ndim() || shape.iter().zip(&m.dims).any(|(&k, &n)| k == 0 || k > n) {
        return Err(Error::BadParam(format!("shape {shape:?} does not fit {:?}", m.dims)));
    }
    let mut found = None;
    let mut meter = budget.meter();
    sweep_nd(m, &mut meter, &mut |s, _, distinct, _| {
        if s == shape {
            found = Some(distinct);
        }
        Ok(())
    })?;
    Ok(found.expect("shape is in the lattice"))
}

/// `true` iff every window of shape `shape` occurs exactly once.
pub fn all_windows_unique(m: &NdString, shape: &[usize], budget: &Budget) -> Result<bool> {
    let windows: usize = m.dims.iter().zip(shape).map(|(&n, &k)| n + 1 - k.min(n + 1)).product();
    Ok(factor_count_nd(m, shape, budget)? == windows)
}

/// Checks that every distinct window of every shape has an occurrence
/// containing one of `positions` (1-based). Returns the shape of the first
/// violating factor.
pub fn attractor_violation_nd(
    m: &NdString,
    positions: &[Vec<usize>],
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    let d = m.ndim();
    for p in positions {
        if p.len() != d || p.iter().zip(&m.dims).any(|(&i, &n)| i < 1 || i > n) {
            return Err(Error::OutOfBounds(format!("position {p:?} in {:?}", m.dims)));
        }
    }
    let st = strides(&m.dims);
    let mut meter = budget.meter();
    let mut found: Option<Vec<usize>> = None;
    let stop = Error::BadParam(String::new());
    let r = sweep_nd(m, &mut meter, &mut |shape, ids, distinct, valid| {
        let mut hit = vec![false; distinct];
        for p in (0..m.len()).filter(|&p| valid(p)) {
            let id = ids[p] as usize;
            if hit[id] {
                continue;
            }
            let corner: Vec<usize> = (0..d).map(|a| p / st[a] % m.dims[a] + 1).collect();
            hit[id] = positions.iter().any(|q| {
                (0..d).all(|a| q[a] >= corner[a] && q[a] < corner[a] + shape[a])
            });
        }
        if hit.iter().any(|h| !h) {
            found = Some(shape.to_vec());
            return Err(stop.clone());
        }
        Ok(())
    });
    match r {
        Err(e) if found.is_none() => Err(e),
        _ => Ok(found),
    }
}

/// Rule of a d-dimensional grammar; axes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleNd {
    Terminal(Symbol),
    Concat { axis: usize, first: usize, second: usize },
    Run { axis: usize, count: u64, var: usize },
}

impl RuleNd {
    fn children(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            RuleNd::Terminal(_) => (None, None),
            RuleNd::Concat { first, second, .. } => (Some(first), Some(second)),
            RuleNd::Run { var, .. } => (Some(var), None),
        };
        a.into_iter().chain(b)
    }

    pub fn size(&self) -> usize {
        match self {
            RuleNd::Terminal(_) => 1,
            _ => 2,
        }
    }
}

/// A validated d-dimensional SLP / RLSLP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarNd {
    d: usize,
    names: Vec<String>,
    rules: Vec<RuleNd>,
    axiom: usize,
    alphabet: Alphabet,
    dims: Vec<Vec<u64>>,
    order: Vec<usize>,
}

impl GrammarNd {
    pub fn new(
        d: usize,
        names: Vec<String>,
        rules: Vec<RuleNd>,
        axiom: usize,
        alphabet: Alphabet,
    ) -> Result<Self> {
        assert_eq!(names.len(), rules.len(), "one name per rule");
        if d == 0 {
            return Err(Error::BadParam("dimension must be at least 1".into()));
        }
        let count = rules.len();
        if axiom >= count {
            return Err(Error::DanglingVariable(format!("axiom index {axiom}")));
        }
        for (v, r) in rules.iter().enumerate() {
            if r.children().any(|c| c >= count) {
                return Err(Error::DanglingVariable(names[v].clone()));
            }
            match *r {
                RuleNd::Concat { axis, .. } | RuleNd::Run { axis, .. } if axis < 1 || axis > d => {
                    return Err(Error::BadParam(format!("rule {} uses axis {axis} outside 1..={d}", names[v])))
                }
                RuleNd::Run { count, .. } if count < 2 => return Err(Error::BadRunCount(names[v].clone())),
                RuleNd::Terminal(s) if s as usize >= alphabet.len() => {
                    return Err(Error::BadParam(format!("rule {} uses an unknown symbol", names[v])))
                }
                _ => {}
            }
        }
        let order = nd_topological(&rules).map_err(|v| Error::CycleDetected(names[v].clone()))?;
        let mut dims: Vec<Vec<u64>> = vec![Vec::new(); count];
        for &v in &order {
            dims[v] = match rules[v] {
                RuleNd::Terminal(_) => vec![1; d],
                RuleNd::Concat { axis, first, second } => {
                    let (a, b) = (&dims[first], &dims[second]);
                    if (0..d).any(|j| j != axis - 1 && a[j] != b[j]) {
                        return Err(Error::DimMismatch(names[v].clone()));
                    }
                    let mut out = a.clone();
                    out[axis - 1] += b[axis - 1];
                    out
                }
                RuleNd::Run { axis, count, var } => {
                    let mut out = dims[var].clone();
                    out[axis - 1] = out[axis - 1]
                        .checked_mul(count)
                        .ok_or_else(|| Error::TooLarge(format!("expansion of {}", names[v])))?;
                    out
                }
            };
            if dims[v].iter().try_fold(1u64, |acc, &x| acc.checked_mul(x)).is_none() {
                return Err(Error::TooLarge(format!("expansion of {}", names[v])));
            }
        }
        let mut seen: HashMap<RuleNd, usize> = HashMap::new();
        for (v, r) in rules.iter().enumerate() {
            if let Some(&u) = seen.get(r) {
                return Err(Error::DuplicateRhs(names[u].clone(), names[v].clone()));
            }
            seen.insert(*r, v);
        }
        Ok(GrammarNd { d, names, rules, axiom, alphabet, dims, order })
    }

    /// Embeds a 2D grammar: `⊘` becomes axis 2, `⊖` axis 1.
    pub fn from_2d(g: &Grammar2D) -> GrammarNd {
        let rules = g
            .rules()
            .iter()
            .map(|r| match *r {
                Rule2D::Terminal(s) => RuleNd::Terminal(s),
                Rule2D::Horiz(b, c) => RuleNd::Concat { axis: 2, first: b, second: c },
                Rule2D::Vert(b, c) => RuleNd::Concat { axis: 1, first: b, second: c },
                Rule2D::RunH(k, b) => RuleNd::Run { axis: 2, count: k, var: b },
                Rule2D::RunV(k, b) => RuleNd::Run { axis: 1, count: k, var: b },
            })
            .collect();
        let names = (0..g.num_vars()).map(|v| g.name(v).to_string()).collect();
        GrammarNd::new(2, names, rules, g.axiom(), g.alphabet().clone())
            .expect("embedding preserves validity")
    }

    pub fn ndim(&self) -> usize {
        self.d
    }

    pub fn size(&self) -> usize {
        self.rules.iter().map(RuleNd::size).sum()
    }

    pub fn num_vars(&self) -> usize {
        self.rules.len()
    }

    pub fn dims(&self, v: usize) -> &[u64] {
        &self.dims[v]
    }

    pub fn axiom(&self) -> usize {
        self.axiom
    }

    pub fn rules(&self) -> &[RuleNd] {
        &self.rules
    }

    /// `exp(axiom)`.
    pub fn expand(&self, budget: &Budget) -> Result<NdString> {
        let dims = &self.dims[self.axiom];
        let total: u64 = dims.iter().product();
        budget.check(total)?;
        let dims: Vec<usize> = dims.iter().map(|&x| x as usize).collect();
        let st = strides(&dims);
        let mut cells = vec![0; total as usize];
        self.paint(self.axiom, 0, &st, &mut cells);
        NdString::new(dims, cells, self.alphabet.clone())
    }

    fn paint(&self, v: usize, offset: usize, st: &[usize], out: &mut [Symbol]) {
        match self.rules[v] {
            RuleNd::Terminal(s) => out[offset] = s,
            RuleNd::Concat { axis, first, second } => {
                self.paint(first, offset, st, out);
                let shift = self.dims[first][axis - 1] as usize * st[axis - 1];
                self.paint(second, offset + shift, st, out);
            }
            RuleNd::Run { axis, count, var } => {
                let shift = self.dims[var][axis - 1] as usize * st[axis - 1];
                for t in 0..count as usize {
                    self.paint(var, offset + t * shift, st, out);
                }
            }
        }
    }

    /// Text form: header `ndaxiom <Name> <d>`, then rules
    /// `<N> = term <tok>`, `<N> = cat <axis> <B> <C>`, `<N> = run <axis> <k> <B>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("ndaxiom {} {}\n", self.names[self.axiom], self.d);
        for (v, r) in self.rules.iter().enumerate() {
            let rhs = match *r {
                RuleNd::Terminal(s) => format!("term {}", self.alphabet.token(s)),
                RuleNd::Concat { axis, first, second } => {
                    format!("cat {axis} {} {}", self.names[first], self.names[second])
                }
                RuleNd::Run { axis, count, var } => format!("run {axis} {count} {}", self.names[var]),
            };
            out.push_str(&format!("{} = {rhs}\n", self.names[v]));
        }
        out
    }

    pub fn parse(text: &str) -> Result<GrammarNd> {
        let lines: Vec<(usize, &str)> = content_lines(text).collect();
        let Some(&(hline, header)) = lines.first() else {
            return Err(Error::parse(1, 1, "missing `ndaxiom <Name> <d>` header"));
        };
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "ndaxiom" {
            return Err(Error::parse(hline, 1, "expected `ndaxiom <Name> <d>`"));
        }
        let d = parse_positive(head[2], hline, column_of(header, head[2]))?;
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (v, &(lno, line)) in lines[1..].iter().enumerate() {
            let name = line.split_whitespace().next().unwrap_or("");
            if index.insert(name, v).is_some() {
                return Err(Error::parse(lno, 1, format!("variable {name} defined twice")));
            }
        }
        let mut alphabet = Alphabet::default();
        let mut names = Vec::new();
        let mut rules = Vec::new();
        for &(lno, line) in &lines[1..] {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() < 3 || f[1] != "=" {
                return Err(Error::parse(lno, 1, "expected `<Name> = <rule>`"));
            }
            let var = |t: &str| {
                index.get(t).copied().ok_or_else(|| {
                    Error::parse(lno, column_of(line, t), format!("unknown variable {t}"))
                })
            };
            let num = |t: &str| {
                t.parse::<u64>()
                    .map_err(|_| Error::parse(lno, column_of(line, t), format!("expected a number, got {t:?}")))
            };
            let rule = match (f[2], f.len()) {
                ("term", 4) => RuleNd::Terminal(alphabet.intern(f[3])?),
                ("cat", 6) => RuleNd::Concat { axis: num(f[3])? as usize, first: var(f[4])?, second: var(f[5])? },
                ("run", 6) => RuleNd::Run { axis: num(f[3])? as usize, count: num(f[4])?, var: var(f[5])? },
                _ => return Err(Error::parse(lno, column_of(line, f[2]), "expected `term`, `cat` or `run`")),
            };
            names.push(f[0].to_string());
            rules.push(rule);
        }
        let axiom = *index
            .get(head[1])
            .ok_or_else(|| Error::parse(hline, column_of(header, head[1]), format!("unknown axiom {}", head[1])))?;
        GrammarNd::new(d, names, rules, axiom, alphabet)
    }
}

fn nd_topological(rules: &[RuleNd]) -> std::result::Result<Vec<usize>, usize> {
    let mut state = vec![0u8; rules.len()];
    let mut order = Vec::with_capacity(rules.len());
    for root in 0..rules.len() {
        if state[root] != 0 {
            continue;
        }
        state[root] = 1;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let child = rules[v].children().nth(*next);
            *next += 1;
            match child {
                Some(c) if state[c] == 1 => return Err(c),
                Some(c) if state[c] == 0 => {
                    state[c] = 1;
                    stack.push((c, 0));
                }
                Some(_) => {}
                None => {
                    state[v] = 2;
                    order.push(v);
                    stack.pop();
                }
            }
        }
    }
    Ok(order)
}

/// Hash-consing builder for [`GrammarNd`].
struct NdBuilder {
    names: Vec<String>,
    rules: Vec<RuleNd>,
    alphabet: Alphabet,
    index: HashMap<RuleNd, usize>,
}

impl NdBuilder {
    fn add(&mut self, rule: RuleNd) -> usize {
        if let Some(&v) = self.index.get(&rule) {
            return v;
        }
        self.names.push(format!("V{}", self.rules.len() + 1));
        self.rules.push(rule);
        self.index.insert(rule, self.rules.len() - 1);
        self.rules.len() - 1
    }
}

/// Grammar for the de Bruijn hypercube [`crate::families::bdk`]: the grammar
/// for dimension `j` is two relabeled copies of the grammar for `j - 1`
/// (one per value of the new bit) joined by the 1D de Bruijn SLP lifted
/// onto axis `j`.
pub fn build_bdk_grammar(d: usize, k: usize) -> Result<GrammarNd> {
    if d == 0 || k == 0 || d * k > 18 {
        return Err(Error::BadParam(format!("bdk grammar needs d, k >= 1 and d*k <= 18, got d={d}, k={k}")));
    }
    let line = debruijn_slp(k)?;
    let alphabet = Alphabet::new((0..1usize << d).map(|v| format!("{v:0d$b}")))?;
    let mut b = NdBuilder { names: Vec::new(), rules: Vec::new(), alphabet, index: HashMap::new() };
    let axiom = emit_bdk(&line, d, "", &mut b)?;
    let NdBuilder { names, rules, alphabet, .. } = b;
    GrammarNd::new(d, names, rules, axiom, alphabet)
}

/// Emits the grammar of `B_{j,k}` with `suffix` appended to every token.
fn emit_bdk(line: &Grammar2D, j: usize, suffix: &str, b: &mut NdBuilder) -> Result<usize> {
    let bit = |s: Symbol| (line.alphabet().token(s) == "1") as usize;
    let leaves: [usize; 2] = if j == 1 {
        let mut t = [0; 2];
        for (v, slot) in t.iter_mut().enumerate() {
            let token = format!("{v}{suffix}");
            let id = b.alphabet.get(&token).expect("token in the d-bit alphabet");
            *slot = b.add(RuleNd::Terminal(id));
        }
        t
    } else {
        [emit_bdk(line, j - 1, &format!("0{suffix}"), b)?, emit_bdk(line, j - 1, &format!("1{suffix}"), b)?]
    };
    let mut map = vec![usize::MAX; line.num_vars()];
    for &v in line.bottom_up() {
        map[v] = match line.rule(v) {
            Rule2D::Terminal(s) => leaves[bit(s)],
            Rule2D::Horiz(l, r) => b.add(RuleNd::Concat { axis: j, first: map[l], second: map[r] }),
            Rule2D::RunH(count, c) => b.add(RuleNd::Run { axis: j, count, var: map[c] }),
            other => unreachable!("1D grammars only concatenate horizontally: {other:?}"),
        };
    }
    Ok(map[line.axiom()])
}

/// A d-dimensional macro scheme: explicit cells plus box phrases copied
/// from a source corner. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroSchemeNd {
    pub dims: Vec<usize>,
    pub alphabet: Alphabet,
    pub explicit: Vec<(Vec<usize>, Symbol)>,
    /// (low corner, high corner, source low corner), all inclusive.
    pub phrases: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>,
}

impl MacroSchemeNd {
    pub fn size(&self) -> usize {
        self.explicit.len() + self.phrases.len()
    }

    /// Checks partition, source bounds and acyclicity of the cell map, and
    /// returns for every cell the explicit cell it copies from.
    fn roots(&self) -> Result<Vec<u32>> {
        let d = self.dims.len();
        let st = strides(&self.dims);
        let total: usize = self.dims.iter().product();
        let flat = |x: &[usize]| -> usize { x.iter().zip(&st).map(|(&i, &s)| (i - 1) * s).sum() };
        let inside = |x: &[usize]| x.len() == d && x.iter().zip(&self.dims).all(|(&i, &n)| i >= 1 && i <= n);
        let mut map = vec![u32::MAX - 1; total];
        let mut claim = |p: usize, target: u32, what: &str| -> Result<()> {
            if map[p] != u32::MAX - 1 {
                return Err(Error::NotPartition(format!("cell {p} covered twice ({what})")));
            }
            map[p] = target;
            Ok(())
        };
        for (x, s) in &self.explicit {
            if !inside(x) {
                return Err(Error::OutOfBounds(format!("explicit cell {x:?}")));
            }
            if *s as usize >= self.alphabet.len() {
                return Err(Error::BadParam(format!("explicit cell {x:?} has an unknown symbol")));
            }
            claim(flat(x), u32::MAX, "explicit")?;
        }
        for (lo, hi, src) in &self.phrases {
            if !inside(lo) || !inside(hi) || lo.iter().zip(hi).any(|(a, b)| a > b) {
                return Err(Error::OutOfBounds(format!("phrase {lo:?}..{hi:?}")));
            }
            let src_hi: Vec<usize> = (0..d).map(|a| src[a] + hi[a] - lo[a]).collect();
            if src.len() != d || !inside(src) || !inside(&src_hi) {
                return Err(Error::OutOfBoundsSource(format!("phrase {lo:?}..{hi:?} from {src:?}")));
            }
            if src == lo {
                return Err(Error::CyclicMap(format!("phrase at {lo:?} copies itself")));
            }
            let extent: Vec<usize> = (0..d).map(|a| hi[a] - lo[a] + 1).collect();
            let count: usize = extent.iter().product();
            for t in 0..count {
                let mut rest = t;
                let mut off = vec![0; d];
                for a in (0..d).rev() {
                    off[a] = rest % extent[a];
                    rest /= extent[a];
                }
                let tgt: Vec<usize> = (0..d).map(|a| lo[a] + off[a]).collect();
                let s: Vec<usize> = (0..d).map(|a| src[a] + off[a]).collect();
                claim(flat(&tgt), flat(&s) as u32, "phrase")?;
            }
        }
        if let Some(p) = map.iter().position(|&t| t == u32::MAX - 1) {
            return Err(Error::NotPartition(format!("cell {p} (flat index) is not covered")));
        }
        resolve_roots(&map).map_err(|p| Error::CyclicMap(format!("cell {p} (flat index) never reaches an explicit cell")))
    }

    pub fn validate(&self) -> Result<()> {
        self.roots().map(|_| ())
    }

    pub fn decode(&self) -> Result<NdString> {
        let roots = self.roots()?;
        let st = strides(&self.dims);
        let mut sym = vec![0 as Symbol; roots.len()];
        for (x, s) in &self.explicit {
            let p: usize = x.iter().zip(&st).map(|(&i, &s)| (i - 1) * s).sum();
            sym[p] = *s;
        }
        let cells = roots.iter().map(|&r| sym[r as usize]).collect();
        NdString::new(self.dims.clone(), cells, self.alphabet.clone())
    }
}
