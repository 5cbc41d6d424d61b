//! The acceptance suite as a library: one report per criterion, shared by
//! the `acceptance` test target and `repet2d selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::access::build_index;
use crate::blocktree::{build_blocktree, BlockStatus};
use crate::budget::Budget;
use crate::factors::{factor_count, FactorShape};
use crate::families::{alt, bdk, bk, cmblocks, debruijn1d, diagpad, ek, identity, staircase, zeros};
use crate::grammar::{
    balanced_grammar, build_bk_grammar, build_ek_grammar, build_zeros_rlslp, fixtures, g_exact, Grammar2D,
    G_FACTOR_LIMIT,
};
use crate::linearize::{ek_rlin_attractor, onerun_certificate, phlin, rlin, scan, ScanKind};
use crate::macroscheme::{b_exact, from_grammar, identity_scheme, unique_square_certificate};
use crate::matrix::Matrix2D;
use crate::measures::{
    delta, delta_square, diagpad_attractor, gamma_exact, gamma_lower_bound_unique, is_attractor, AttractorSet,
    GAMMA_CELL_LIMIT,
};
use crate::multidim::{
    all_windows_unique, attractor_violation_nd, build_bdk_grammar, delta_nd, factor_count_nd, GrammarNd,
    MacroSchemeNd, NdString,
};
use crate::random::{random_grammar, random_matrix};
use crate::Ratio;

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Failures that contradict the stated target but are mathematically
    /// forced; listed separately so they stay visible.
    pub known_deviations: Vec<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.known_deviations.is_empty()
    }

    /// `true` when the only problems are the documented deviations.
    pub fn only_known_deviations(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {}: {verdict} - {} ({} checks)", self.id, self.title, self.checks);
        for d in &self.known_deviations {
            s.push_str(&format!("\n    known deviation: {d}"));
        }
        for f in self.failures.iter().take(10) {
            s.push_str(&format!("\n    failure: {f}"));
        }
        if self.failures.len() > 10 {
            s.push_str(&format!("\n    ... {} more failures", self.failures.len() - 10));
        }
        s
    }
}

struct Checker {
    report: CriterionReport,
}

impl Checker {
    fn new(id: u8, title: &'static str) -> Self {
        Checker { report: CriterionReport { id, title, checks: 0, failures: Vec::new(), known_deviations: Vec::new() } }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.checks += 1;
        if !ok {
            self.report.failures.push(what());
        }
    }

    /// Records an error from a fallible step as a failure.
    fn run<T>(&mut self, what: &str, r: crate::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.report.checks += 1;
                self.report.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }

    fn finish(self) -> CriterionReport {
        self.report
    }
}

pub const CRITERIA: u8 = 8;

/// Runs one criterion. `quick` shrinks the randomized corpora.
pub fn run_criterion(id: u8, quick: bool, budget: &Budget) -> CriterionReport {
    match id {
        1 => exact_values(budget),
        2 => attractor_suite(budget),
        3 => ordering_invariants(quick, budget),
        4 => round_trips(quick, budget),
        5 => direct_access(quick, budget),
        6 => separation_tables(budget),
        7 => linearization_suite(quick, budget),
        8 => nd_embedding(quick, budget),
        _ => panic!("criteria are numbered 1..={CRITERIA}"),
    }
}

pub fn run_all(quick: bool, budget: &Budget) -> Vec<CriterionReport> {
    (1..=CRITERIA).map(|id| run_criterion(id, quick, budget)).collect()
}

fn exact_values(budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(1, "exact values: P_M(2,2), g and g_rl of the alternating 4x6, phlin(I_2)");
    let m = Matrix2D::from_char_rows(&["aabb"; 5]).expect("literal");
    if let Some(p) = c.run("factor_count", factor_count(&m, FactorShape::new(2, 2))) {
        c.check(p == 3, || format!("P_M(2,2) = {p}, expected 3"));
    }
    let a = alt(4, 6).expect("alt");
    for (runs, want) in [(false, 12), (true, 8)] {
        if let Some(g) = c.run("g_exact", g_exact(&a, runs, G_FACTOR_LIMIT, budget)) {
            c.check(g.optimal, || format!("g_exact(alt(4,6), runs={runs}) did not finish"));
            c.check(g.grammar.size() == want, || {
                format!("g_exact(alt(4,6), runs={runs}) = {}, expected {want}", g.grammar.size())
            });
        }
    }
    if let Some(p) = c.run("phlin", phlin(&identity(2).expect("I_2"))) {
        let s = p.to_token_string().replace(' ', "");
        c.check(s == "1010", || format!("phlin(I_2) = {s}, expected 1010"));
    }
    c.finish()
}

fn attractor_suite(budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(2, "attractor suite: gamma of I_n, square-only gamma, diagpad attractors, delta <= 2");
    for n in 2..=4 {
        let id = identity(n).expect("identity");
        let Some(g) = c.run("gamma_exact", gamma_exact(&id, false, GAMMA_CELL_LIMIT, budget)) else { continue };
        if n == 2 && g.len() == 3 {
            // I_2 has factors 1, 0, two rows and two columns; any two cells
            // miss one of them.
            c.report.checks += 1;
            c.report.known_deviations.push(
                "|gamma_exact(I_2)| = 3, target 2: no two cells of I_2 cover both symbols, both rows and both columns"
                    .into(),
            );
            continue;
        }
        c.check(g.len() == n, || format!("|gamma_exact(I_{n})| = {}, expected {n}", g.len()));
    }
    for n in 3..=4 {
        let id = identity(n).expect("identity");
        if let Some(g) = c.run("gamma_exact square", gamma_exact(&id, true, GAMMA_CELL_LIMIT, budget)) {
            c.check(g.len() == 2, || format!("|gamma_exact(I_{n}, square)| = {}, expected 2", g.len()));
        }
    }
    for (m, n) in [(4, 6), (6, 4), (5, 5)] {
        let mat = diagpad(m, n).expect("diagpad");
        let set = diagpad_attractor(m, n);
        if let Some(ok) = c.run("is_attractor", is_attractor(&mat, &set, false, budget)) {
            c.check(ok, || format!("diagpad attractor fails for ({m},{n})"));
        }
        if let Some(d) = c.run("delta", delta(&mat, budget)) {
            c.check(d.value <= Ratio::from(2), || format!("delta(diagpad({m},{n})) = {}", d.value));
        }
    }
    c.finish()
}

/// Every family instance with at most 4 rows and 4 columns.
pub fn small_family_instances() -> Vec<(String, Matrix2D)> {
    let mut out = Vec::new();
    let mut push = |name: String, m: crate::Result<Matrix2D>| {
        if let Ok(m) = m {
            if m.rows() <= 4 && m.cols() <= 4 {
                out.push((name, m));
            }
        }
    };
    for n in 1..=4 {
        push(format!("identity({n})"), identity(n));
        push(format!("staircase({n})"), staircase(n));
        push(format!("cmblocks({n})"), cmblocks(n));
    }
    for k in 1..=2 {
        push(format!("ek({k})"), ek(k));
        push(format!("debruijn1d({k})"), debruijn1d(k));
        push(format!("bk({k})"), bk(k));
    }
    for r in 1..=4 {
        for s in 1..=4 {
            push(format!("zeros({r},{s})"), zeros(r, s));
            push(format!("alt({r},{s})"), alt(r, s));
            push(format!("diagpad({r},{s})"), diagpad(r, s));
        }
    }
    out
}

fn ordering_invariants(quick: bool, budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(3, "ordering invariants on random and family matrices up to 4x4");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut corpus = small_family_instances();
    let randoms = if quick { 30 } else { 200 };
    for t in 0..randoms {
        let (r, s) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let sigma = 2 + t % 2;
        corpus.push((format!("random#{t} {r}x{s} sigma={sigma}"), random_matrix(&mut rng, r, s, sigma)));
    }
    for (name, m) in &corpus {
        let (Some(d), Some(dsq)) = (c.run(name, delta(m, budget)), c.run(name, delta_square(m, budget))) else {
            continue;
        };
        let (Some(gamma), Some(gsq)) = (
            c.run(name, gamma_exact(m, false, GAMMA_CELL_LIMIT, budget)),
            c.run(name, gamma_exact(m, true, GAMMA_CELL_LIMIT, budget)),
        ) else {
            continue;
        };
        let gamma_r = Ratio::from(gamma.len() as u64);
        c.check(dsq.value <= d.value, || format!("{name}: delta_sq {} > delta {}", dsq.value, d.value));
        c.check(d.value <= gamma_r, || format!("{name}: delta {} > gamma {}", d.value, gamma.len()));
        c.check(gsq.len() <= gamma.len(), || format!("{name}: gamma_sq {} > gamma {}", gsq.len(), gamma.len()));
        let (Some(g), Some(grl), Some(b)) = (
            c.run(name, g_exact(m, false, G_FACTOR_LIMIT, budget)),
            c.run(name, g_exact(m, true, G_FACTOR_LIMIT, budget)),
            c.run(name, b_exact(m, 16, budget)),
        ) else {
            continue;
        };
        c.check(g.optimal && grl.optimal, || format!("{name}: grammar search did not finish"));
        let (gs, grs) = (g.grammar.size(), grl.grammar.size());
        c.check(b.size() <= grs, || format!("{name}: b {} > g_rl {grs}", b.size()));
        c.check(grs <= gs, || format!("{name}: g_rl {grs} > g {gs}"));
        // Each binary rule at most doubles the area of its children.
        let need = ((m.rows() * m.cols()) as u64).next_power_of_two().trailing_zeros() as usize;
        c.check(g.grammar.num_vars() >= need, || {
            format!("{name}: {} variables < ceil(log2 N) = {need}", g.grammar.num_vars())
        });
        c.check(b.decode().map(|x| x == *m).unwrap_or(false), || format!("{name}: b_exact scheme does not decode"));
        c.check(grl.grammar.expand(budget).map(|x| x == *m).unwrap_or(false), || {
            format!("{name}: g_rl grammar does not expand to the input")
        });
    }
    c.finish()
}

/// Checks that a grammar text parses and expands to `expected`; errors name
/// the offending rule.
pub fn check_fixture(name: &str, text: &str, expected: &Matrix2D, budget: &Budget) -> Result<Grammar2D, String> {
    let g = Grammar2D::parse(text).map_err(|e| format!("fixture {name}: {e}"))?;
    let m = g.expand(budget).map_err(|e| format!("fixture {name}: {e}"))?;
    if m != *expected {
        return Err(format!("fixture {name}: expansion differs from the expected matrix"));
    }
    Ok(g)
}

fn round_trips(quick: bool, budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(4, "grammar and scheme round trips");
    for k in 1..=10 {
        let ok = build_ek_grammar(k).and_then(|g| g.expand(budget)).map(|m| m == ek(k).expect("ek"));
        c.check(ok.unwrap_or(false), || format!("expand(build_ek_grammar({k})) != ek({k})"));
    }
    for k in 1..=4 {
        let ok = build_bk_grammar(k).and_then(|g| g.expand(budget)).map(|m| m == bk(k).expect("bk"));
        c.check(ok.unwrap_or(false), || format!("expand(build_bk_grammar({k})) != bk({k})"));
    }
    let mut grammars: Vec<(String, Grammar2D)> = Vec::new();
    let alt46 = alt(4, 6).expect("alt");
    for (name, text) in [("alt-slp", fixtures::ALT_SLP), ("alt-rlslp", fixtures::ALT_RLSLP)] {
        match check_fixture(name, text, &alt46, budget) {
            Ok(g) => grammars.push((name.into(), g)),
            Err(e) => c.check(false, || e),
        }
    }
    grammars.push(("zeros-rlslp(8)".into(), build_zeros_rlslp(8).expect("zeros")));
    grammars.push(("ek-grammar(4)".into(), build_ek_grammar(4).expect("ek")));
    grammars.push(("bk-grammar(2)".into(), build_bk_grammar(2).expect("bk")));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let count = if quick { 20 } else { 100 };
    for t in 0..count {
        grammars.push((format!("random#{t}"), random_grammar(&mut rng, 2 + t % 3, 14, t % 2 == 0, 512)));
    }
    for (name, g) in &grammars {
        let (Some(s), Some(m)) = (c.run(name, from_grammar(g, budget)), c.run(name, g.expand(budget))) else {
            continue;
        };
        c.check(s.decode().map(|d| d == m).unwrap_or(false), || format!("{name}: decode(from_grammar) != expand"));
        c.check(s.size() <= g.size(), || format!("{name}: {} pieces > grammar size {}", s.size(), g.size()));
    }
    for n in [3, 64, 1024] {
        if let Some(s) = c.run("identity_scheme", identity_scheme(n)) {
            c.check(s.size() == 6, || format!("identity_scheme({n}) has size {}", s.size()));
            let ok = s.decode().map(|d| d == identity(n).expect("identity"));
            c.check(ok.unwrap_or(false), || format!("decode(identity_scheme({n})) != I_{n}"));
        }
    }
    c.finish()
}

fn direct_access(quick: bool, budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(5, "direct access equals expansion, heavy-path switches <= floor(log2 mn)");
    let mut grammars = vec![
        ("ek-grammar(10)", build_ek_grammar(if quick { 8 } else { 10 }).expect("ek")),
        ("zeros-rlslp(64)", build_zeros_rlslp(64).expect("zeros")),
        ("bk-grammar(3)", build_bk_grammar(3).expect("bk")),
    ];
    grammars.push(("alt-slp", fixtures::alt_slp()));
    grammars.push(("alt-rlslp", fixtures::alt_rlslp()));
    for (name, g) in &grammars {
        let Some(m) = c.run(name, g.expand(budget)) else { continue };
        let idx = build_index(g);
        let mut mismatches = 0usize;
        for y in 1..=m.rows() {
            for x in 1..=m.cols() {
                if idx.access(y as u64, x as u64).ok() != Some(m.get(y, x)) {
                    mismatches += 1;
                }
            }
        }
        c.check(mismatches == 0, || format!("{name}: {mismatches} cells differ from the expansion"));
        if let Some(stats) = c.run(name, idx.hop_stats(budget)) {
            c.check(stats.max_hops <= stats.bound, || {
                format!("{name}: {} switches > bound {}", stats.max_hops, stats.bound)
            });
            if *name == "ek-grammar(10)" && !quick {
                c.check(stats.max_hops <= 13, || format!("E_10: {} switches > 13", stats.max_hops));
            }
        }
    }
    c.finish()
}

fn separation_tables(budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(6, "separation directions: E_k, B_k uniqueness, Block Tree on B_3, delta_sq(B_3)");
    for k in 2..=6 {
        let m = ek(k).expect("ek");
        if let Some(d) = c.run("delta", delta(&m, budget)) {
            let bound = Ratio::new(1 << k, k as u64);
            c.check(d.value >= bound, || format!("delta(E_{k}) = {} < 2^k/k", d.value));
        }
        let size = build_ek_grammar(k).expect("ek").size();
        c.check(size <= 10 * k, || format!("size(build_ek_grammar({k})) = {size} > {}", 10 * k));
    }
    for k in 2..=4 {
        let u = unique_square_certificate(&bk(k).expect("bk"), k, budget);
        c.check(u.unwrap_or(false), || format!("some {k}x{k} window of B_{k} repeats"));
    }
    let b3 = bk(3).expect("bk");
    if let Some(t) = c.run("blocktree", build_blocktree(&b3, 2, budget)) {
        c.check(t.side == 16, || format!("B_3 padded to {}, expected 16", t.side));
        let mut pruned = 0;
        for (l, level) in t.levels.iter().enumerate() {
            if t.block_side(l) < 3 {
                continue;
            }
            pruned += level
                .iter()
                .filter(|b| t.in_region(l, b) && matches!(b.status, BlockStatus::Pruned { .. }))
                .count();
        }
        c.check(pruned == 0, || format!("{pruned} in-region blocks of side >= 3 were pruned"));
    }
    if let Some(p) = c.run("factor_count", factor_count(&b3, FactorShape::new(3, 3))) {
        c.check(p == 64, || format!("B_3 has {p} distinct 3x3 factors, expected 64"));
    }
    if let Some(d) = c.run("delta_square", delta_square(&b3, budget)) {
        c.check(d.value >= Ratio::new(64, 9), || format!("delta_sq(B_3) = {} < 64/9", d.value));
    }
    c.finish()
}

fn linearization_suite(quick: bool, budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(7, "linearizations: staircase, rlin(E_k) attractor, scans, phlin certificates");
    let sizes: &[usize] = if quick { &[8, 16] } else { &[8, 16, 32] };
    for &n in sizes {
        let s = staircase(n).expect("staircase");
        if let Some(d) = c.run("delta", delta(&s, budget)) {
            c.check(d.value <= Ratio::from(6), || format!("delta(staircase({n})) = {} > 6", d.value));
        }
        if let Some(d) = c.run("delta rlin", delta(&rlin(&s), budget)) {
            let want = Ratio::new(n as u64 - 1, 2);
            c.check(d.value >= want, || format!("delta(rlin(staircase({n}))) = {} < {want}", d.value));
        }
    }
    for k in 1..=8 {
        let s = rlin(&ek(k).expect("ek"));
        if let Some(a) = c.run("ek_rlin_attractor", ek_rlin_attractor(k)) {
            c.check(a.len() == 3 * k - 1, || format!("|A| = {} for k = {k}, expected {}", a.len(), 3 * k - 1));
            let ok = is_attractor(&s, &a, false, budget);
            c.check(ok.unwrap_or(false), || format!("A is not an attractor of rlin(E_{k})"));
        }
        if let Some(lb) = c.run("gamma lower bound", gamma_lower_bound_unique(&ek(k).expect("ek"), &[], budget)) {
            c.check(lb >= 1 << k, || format!("gamma lower bound for E_{k} is {lb} < 2^{k}"));
        }
    }
    let mut prev: Option<String> = None;
    for k in 0..=6usize {
        let id = identity(1 << k).expect("identity");
        let (Some(ds), Some(rs), Some(p)) = (
            c.run("scan", scan(&id, ScanKind::Ds)),
            c.run("scan", scan(&id, ScanKind::Rs)),
            c.run("phlin", phlin(&id)),
        ) else {
            continue;
        };
        c.check(ds == rs, || format!("ds(I_{}) != rs(I_{})", 1 << k, 1 << k));
        let cur = p.to_token_string().replace(' ', "");
        if let Some(prev) = &prev {
            let pad = "0".repeat(1 << (2 * (k - 1)));
            c.check(cur == format!("{prev}{pad}{prev}{pad}"), || format!("phlin recurrence fails at k = {k}"));
        }
        if k >= 1 {
            c.check(onerun_certificate(&p, k as u32), || format!("one-run certificate fails for k = {k}"));
        }
        prev = Some(cur);
    }
    c.finish()
}

fn nd_embedding(quick: bool, budget: &Budget) -> CriterionReport {
    let mut c = Checker::new(8, "d-dimensional liftings agree with 2D operations; B_{3,2} and its grammar");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let count = if quick { 10 } else { 50 };
    for t in 0..count {
        let (r, s) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let m = random_matrix(&mut rng, r, s, 2 + t % 3);
        let nd = NdString::from_matrix(&m);
        let name = format!("random#{t} {r}x{s}");
        c.check(nd.to_matrix().map(|x| x == m).unwrap_or(false), || format!("{name}: embedding round trip"));
        let other = random_matrix(&mut rng, r, s, 2);
        let other_nd = NdString::from_matrix(&other);
        let h = m.concat_h(&other).ok().zip(nd.concat_axis(&other_nd, 2).ok());
        c.check(h.is_some_and(|(a, b)| b.to_matrix().ok() == Some(a)), || format!("{name}: horizontal concat"));
        let v = m.concat_v(&other).ok().zip(nd.concat_axis(&other_nd, 1).ok());
        c.check(v.is_some_and(|(a, b)| b.to_matrix().ok() == Some(a)), || format!("{name}: vertical concat"));
        if let (Some(d2), Some(dn)) = (c.run(&name, delta(&m, budget)), c.run(&name, delta_nd(&nd, budget))) {
            c.check(d2.value == dn.value, || format!("{name}: delta {} vs {}", d2.value, dn.value));
        }
        for k1 in 1..=r {
            for k2 in 1..=s {
                let a = factor_count(&m, FactorShape::new(k1, k2)).ok();
                let b = factor_count_nd(&nd, &[k1, k2], budget).ok();
                c.check(a.is_some() && a == b, || format!("{name}: factor count {k1}x{k2}"));
            }
        }
        let cells: Vec<(usize, usize)> =
            (0..rng.gen_range(1..=4)).map(|_| (rng.gen_range(1..=r), rng.gen_range(1..=s))).collect();
        let set = AttractorSet::new(cells.iter().copied());
        let positions: Vec<Vec<usize>> = cells.iter().map(|&(i, j)| vec![i, j]).collect();
        let a = is_attractor(&m, &set, false, budget).ok();
        let b = attractor_violation_nd(&nd, &positions, budget).ok().map(|v| v.is_none());
        c.check(a.is_some() && a == b, || format!("{name}: attractor verdicts differ"));
        if let Some(g) = c.run(&name, balanced_grammar(&m)) {
            let lifted = GrammarNd::from_2d(&g);
            let ok = lifted.expand(budget).ok().and_then(|x| x.to_matrix().ok()) == Some(m.clone());
            c.check(ok && lifted.size() == g.size(), || format!("{name}: lifted grammar"));
            if let Some(s2) = c.run(&name, from_grammar(&g, budget)) {
                let snd = MacroSchemeNd {
                    dims: vec![r, s],
                    alphabet: s2.alphabet.clone(),
                    explicit: s2.explicit.iter().map(|&((i, j), x)| (vec![i, j], x)).collect(),
                    phrases: s2
                        .phrases
                        .iter()
                        .map(|p| {
                            let (i1, j1, i2, j2) = p.target;
                            (vec![i1, j1], vec![i2, j2], vec![p.source.0, p.source.1])
                        })
                        .collect(),
                };
                let ok = snd.decode().ok().and_then(|x| x.to_matrix().ok()) == Some(m.clone());
                c.check(ok, || format!("{name}: lifted macro scheme"));
            }
        }
    }
    if let Some(cube) = c.run("bdk", bdk(3, 2)) {
        let u = all_windows_unique(&cube, &[2, 2, 2], budget);
        c.check(u.unwrap_or(false), || "some 2x2x2 subcube of B_{3,2} repeats".into());
        let g = build_bdk_grammar(3, 2).and_then(|g| g.expand(budget));
        c.check(g.map(|x| x == cube).unwrap_or(false), || "expand(build_bdk_grammar(3,2)) != bdk(3,2)".into());
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_fixture_names_the_rule() {
        let bad = fixtures::ALT_SLP.replace("A = h A' A'", "A = h A' Q");
        let err = check_fixture("alt-slp", &bad, &alt(4, 6).unwrap(), &Budget::default()).unwrap_err();
        assert!(err.contains("alt-slp") && err.contains('Q'), "{err}");
        let cyclic = fixtures::ALT_SLP.replace("C = h X Y", "C = h X B");
        let err = check_fixture("alt-slp", &cyclic, &alt(4, 6).unwrap(), &Budget::default()).unwrap_err();
        assert!(err.contains("alt-slp"), "{err}");
    }

    #[test]
    fn family_corpus_is_small() {
        let corpus = small_family_instances();
        assert!(corpus.len() > 40);
        assert!(corpus.iter().all(|(_, m)| m.rows() <= 4 && m.cols() <= 4));
    }

    #[test]
    fn quick_suite_runs() {
        for r in run_all(true, &Budget::default()) {
            assert!(r.only_known_deviations(), "{}", r.line());
            assert!(r.checks > 0);
        }
    }
}
