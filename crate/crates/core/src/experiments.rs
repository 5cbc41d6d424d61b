//! Named experiments that tabulate measures over family parameter ranges.
//! Rows are computed in parallel and emitted in parameter order, so the CSV
//! for a given name and range is byte-identical across runs.

use rayon::prelude::*;

use crate::access::build_index;
use crate::blocktree::build_blocktree;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::families::{bk, ek, identity, staircase};
use crate::grammar::{build_bk_grammar, build_ek_grammar, g_exact, G_FACTOR_LIMIT};
use crate::linearize::{onerun_certificate, phlin, rlin};
use crate::macroscheme::{from_grammar, identity_scheme, unique_square_certificate, unique_square_phrase_bound};
use crate::measures::{
    delta, delta_square, diagpad_attractor, gamma_exact, gamma_lower_bound_unique, is_attractor, GAMMA_CELL_LIMIT,
};
use crate::Ratio;

/// Registered experiment: name, default parameter range, parameter name and
/// a one-line description.
pub struct ExperimentInfo {
    pub name: &'static str,
    pub param: &'static str,
    pub default_range: (usize, usize),
    pub description: &'static str,
    header: &'static str,
    row: fn(usize, &Budget) -> Result<Vec<String>>,
}

pub const EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "gap-gamma-vs-delta",
        param: "n",
        default_range: (2, 12),
        description: "identity I_n: delta stays <= 2 while the attractor needs about n cells",
        header: "n,N,delta,delta_sq,attractor_size,attractor_valid,gamma_lower_bound,gamma_exact",
        row: gamma_vs_delta,
    },
    ExperimentInfo {
        name: "gap-g-vs-delta",
        param: "k",
        default_range: (2, 6),
        description: "E_k: grammar size linear in k while delta >= 2^k / k",
        header: "k,N,grammar_size,delta,delta_float,two_pow_k_over_k,delta_at_least_bound",
        row: g_vs_delta,
    },
    ExperimentInfo {
        name: "blocktree-vs-g",
        param: "k",
        default_range: (2, 5),
        description: "B_k: Block Tree node count against the constructive grammar size",
        header: "k,n,N,grammar_size,blocktree_nodes,pruned_nodes,nodes_over_grammar",
        row: blocktree_vs_g,
    },
    ExperimentInfo {
        name: "linearization-row",
        param: "n",
        default_range: (4, 32),
        description: "staircase: constant 2D delta, row linearization delta grows with n",
        header: "n,N,delta_2d,delta_rlin,delta_rlin_float,half_n_minus_1",
        row: linearization_row,
    },
    ExperimentInfo {
        name: "linearization-hilbert",
        param: "k",
        default_range: (1, 6),
        description: "I_{2^k}: six-piece scheme in 2D, Peano-Hilbert string carries k distinct one-runs",
        header: "k,n,N,scheme_size_2d,onerun_certificate,gamma_lower_bound_1d",
        row: linearization_hilbert,
    },
    ExperimentInfo {
        name: "b-vs-grl-identity",
        param: "n",
        default_range: (3, 1024),
        description: "I_n: macro scheme size constant 6 while run-length grammars need about log n rules",
        header: "n,N,scheme_size,scheme_decodes,log2_n,grl_exact",
        row: b_vs_grl_identity,
    },
    ExperimentInfo {
        name: "bsq-vs-b",
        param: "k",
        default_range: (2, 4),
        description: "B_k: rectangle schemes stay small, square phrases need (n/k)^2",
        header: "k,n,N,grammar_size,scheme_size,unique_kxk,square_phrase_lower_bound,delta_sq",
        row: bsq_vs_b,
    },
];

pub fn experiment(name: &str) -> Result<&'static ExperimentInfo> {
    EXPERIMENTS.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<_> = EXPERIMENTS.iter().map(|e| e.name).collect();
        Error::BadParam(format!("unknown experiment {name:?}; expected one of {}", names.join(", ")))
    })
}

/// Parameter values for a range. `b-vs-grl-identity` uses the lower end plus
/// the powers of two above it; the others use every integer.
pub fn parameters(info: &ExperimentInfo, lo: usize, hi: usize) -> Vec<usize> {
    if lo > hi {
        return Vec::new();
    }
    if info.name == "b-vs-grl-identity" {
        let mut out = vec![lo];
        let mut p = lo.next_power_of_two();
        if p == lo {
            p *= 2;
        }
        while p <= hi {
            out.push(p);
            p *= 2;
        }
        return out;
    }
    (lo..=hi).collect()
}

/// CSV plus a short summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub rows: usize,
    pub failed_rows: usize,
}

/// Runs `name` over `lo..=hi`. Row errors are recorded in a trailing
/// `status` column instead of aborting the table.
pub fn run_experiment(name: &str, lo: usize, hi: usize, budget: &Budget) -> Result<ExperimentOutput> {
    let info = experiment(name)?;
    let params = parameters(info, lo, hi);
    let columns = info.header.split(',').count();
    let rows: Vec<(usize, Result<Vec<String>>)> =
        params.par_iter().map(|&p| (p, (info.row)(p, budget))).collect();
    let mut csv = format!("{},status\n", info.header);
    let mut failed_rows = 0;
    for (p, row) in &rows {
        match row {
            Ok(cells) => {
                debug_assert_eq!(cells.len(), columns);
                csv.push_str(&cells.join(","));
                csv.push_str(",ok\n");
            }
            Err(e) => {
                failed_rows += 1;
                let mut cells = vec![p.to_string()];
                cells.resize(columns, String::new());
                csv.push_str(&cells.join(","));
                csv.push_str(&format!(",\"{}\"\n", e.to_string().replace('"', "'")));
            }
        }
    }
    Ok(ExperimentOutput { csv, rows: rows.len(), failed_rows })
}

fn ratio(r: Ratio) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn float(r: Ratio) -> String {
    format!("{:.4}", *r.numer() as f64 / *r.denom() as f64)
}

fn gamma_vs_delta(n: usize, budget: &Budget) -> Result<Vec<String>> {
    let m = identity(n)?;
    let set = diagpad_attractor(n, n);
    let exact = if n * n <= 16 {
        gamma_exact(&m, false, GAMMA_CELL_LIMIT, budget)?.len().to_string()
    } else {
        String::new()
    };
    Ok(vec![
        n.to_string(),
        (n * n).to_string(),
        ratio(delta(&m, budget)?.value),
        ratio(delta_square(&m, budget)?.value),
        set.len().to_string(),
        is_attractor(&m, &set, false, budget)?.to_string(),
        gamma_lower_bound_unique(&m, &[], budget)?.to_string(),
        exact,
    ])
}

fn g_vs_delta(k: usize, budget: &Budget) -> Result<Vec<String>> {
    let m = ek(k)?;
    let g = build_ek_grammar(k)?;
    let d = delta(&m, budget)?.value;
    let bound = Ratio::new(1 << k, k as u64);
    Ok(vec![
        k.to_string(),
        m.size().to_string(),
        g.size().to_string(),
        ratio(d),
        float(d),
        float(bound),
        (d >= bound).to_string(),
    ])
}

fn blocktree_vs_g(k: usize, budget: &Budget) -> Result<Vec<String>> {
    let m = bk(k)?;
    let g = build_bk_grammar(k)?;
    let t = build_blocktree(&m, 2, budget)?;
    Ok(vec![
        k.to_string(),
        m.rows().to_string(),
        m.size().to_string(),
        g.size().to_string(),
        t.total_nodes().to_string(),
        t.pruned_counts().iter().sum::<usize>().to_string(),
        format!("{:.4}", t.total_nodes() as f64 / g.size() as f64),
    ])
}

fn linearization_row(n: usize, budget: &Budget) -> Result<Vec<String>> {
    let m = staircase(n)?;
    let d2 = delta(&m, budget)?.value;
    let d1 = delta(&rlin(&m), budget)?.value;
    Ok(vec![
        n.to_string(),
        m.size().to_string(),
        ratio(d2),
        ratio(d1),
        float(d1),
        float(Ratio::new(n as u64 - 1, 2)),
    ])
}

fn linearization_hilbert(k: usize, _budget: &Budget) -> Result<Vec<String>> {
    if k > 12 {
        return Err(Error::TooLarge(format!("I_(2^{k}) is too large to linearize here")));
    }
    let n = 1usize << k;
    let p = phlin(&identity(n)?)?;
    let cert = onerun_certificate(&p, k as u32);
    Ok(vec![
        k.to_string(),
        n.to_string(),
        (n * n).to_string(),
        identity_scheme(n)?.size().to_string(),
        cert.to_string(),
        // A position lies in at most two of the k distinct one-runs.
        if cert { k.div_ceil(2).to_string() } else { String::new() },
    ])
}

fn b_vs_grl_identity(n: usize, budget: &Budget) -> Result<Vec<String>> {
    let s = identity_scheme(n)?;
    let decodes = s.decode()? == identity(n)?;
    let grl = if n <= 4 {
        g_exact(&identity(n)?, true, G_FACTOR_LIMIT, budget)?.grammar.size().to_string()
    } else {
        String::new()
    };
    Ok(vec![
        n.to_string(),
        (n * n).to_string(),
        s.size().to_string(),
        decodes.to_string(),
        format!("{:.4}", (n as f64).log2()),
        grl,
    ])
}

fn bsq_vs_b(k: usize, budget: &Budget) -> Result<Vec<String>> {
    let m = bk(k)?;
    let g = build_bk_grammar(k)?;
    let scheme = from_grammar(&g, budget)?;
    let unique = unique_square_certificate(&m, k, budget)?;
    Ok(vec![
        k.to_string(),
        m.rows().to_string(),
        m.size().to_string(),
        g.size().to_string(),
        scheme.size().to_string(),
        unique.to_string(),
        unique_square_phrase_bound(&m, k).to_string(),
        ratio(delta_square(&m, budget)?.value),
    ])
}

/// Hop statistics for the CLI `access --verify-all` table.
pub fn hop_histogram_csv(g: &crate::Grammar2D, budget: &Budget) -> Result<(String, u32, u32)> {
    let stats = build_index(g).hop_stats(budget)?;
    let mut csv = String::from("hops,cells\n");
    for (h, c) in stats.histogram.iter().enumerate() {
        csv.push_str(&format!("{h},{c}\n"));
    }
    Ok((csv, stats.max_hops, stats.bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn g_vs_delta_rows_meet_bound() {
        let out = run_experiment("gap-g-vs-delta", 2, 6, &b()).unwrap();
        assert_eq!(out.rows, 5);
        for line in out.csv.lines().skip(1) {
            assert!(line.contains(",true,ok"), "{line}");
        }
    }

    #[test]
    fn identity_scheme_column_is_constant() {
        let out = run_experiment("b-vs-grl-identity", 3, 1024, &b()).unwrap();
        assert_eq!(out.rows, 10);
        for line in out.csv.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f[2], "6");
            assert_eq!(f[3], "true");
        }
    }

    #[test]
    fn empty_range_gives_header_only() {
        let out = run_experiment("bsq-vs-b", 5, 4, &b()).unwrap();
        assert_eq!(out.csv.lines().count(), 1);
        assert!(run_experiment("nope", 1, 2, &b()).is_err());
    }

    #[test]
    fn output_is_deterministic_and_errors_become_rows() {
        let a = run_experiment("gap-gamma-vs-delta", 2, 6, &b()).unwrap();
        let c = run_experiment("gap-gamma-vs-delta", 2, 6, &b()).unwrap();
        assert_eq!(a, c);
        let bad = run_experiment("linearization-row", 1, 2, &b()).unwrap();
        assert_eq!(bad.failed_rows, 1);
        assert!(bad.csv.lines().nth(1).unwrap().starts_with("1,"));
    }

    #[test]
    fn every_experiment_runs_on_a_small_range() {
        for e in EXPERIMENTS {
            let lo = e.default_range.0;
            let out = run_experiment(e.name, lo, lo + 1, &b()).unwrap();
            assert_eq!(out.failed_rows, 0, "{}", e.name);
            let width = e.header.split(',').count() + 1;
            for line in out.csv.lines() {
                assert_eq!(line.split(',').count(), width, "{}: {line}", e.name);
            }
        }
    }
}
