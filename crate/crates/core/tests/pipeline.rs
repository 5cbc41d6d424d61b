//! Cross-module flows through the public API.

use repet2d::access::build_index;
use repet2d::blocktree::build_blocktree;
use repet2d::families::{bk, ek, identity};
use repet2d::grammar::{balanced_grammar, build_ek_grammar, g_exact, G_FACTOR_LIMIT};
use repet2d::linearize::{phlin, rlin, unphlin, unrlin};
use repet2d::macroscheme::{b_exact, from_grammar, identity_scheme};
use repet2d::measures::{delta, is_attractor, AttractorSet};
use repet2d::multidim::GrammarNd;
use repet2d::{Budget, Grammar2D, MacroScheme2D, Matrix2D, NdString};

#[test]
fn text_formats_round_trip() {
    let b = Budget::default();
    let m = bk(2).unwrap();
    assert_eq!(Matrix2D::parse(&m.to_text()).unwrap(), m);
    let g = build_ek_grammar(5).unwrap();
    let g2 = Grammar2D::parse(&g.to_text()).unwrap();
    assert_eq!(g2.expand(&b).unwrap(), ek(5).unwrap());
    let s = from_grammar(&g, &b).unwrap();
    assert_eq!(MacroScheme2D::parse(&s.to_text()).unwrap().decode().unwrap(), ek(5).unwrap());
    let nd = NdString::from_matrix(&m);
    assert_eq!(NdString::parse(&nd.to_text()).unwrap(), nd);
    let lifted = GrammarNd::from_2d(&g);
    assert_eq!(GrammarNd::parse(&lifted.to_text()).unwrap().expand(&b).unwrap().to_matrix().unwrap(), ek(5).unwrap());
}

#[test]
fn grammar_to_scheme_to_access() {
    let b = Budget::default();
    let m = Matrix2D::from_char_rows(&["abcab", "bcabc", "abcab"]).unwrap();
    let g = g_exact(&m, true, G_FACTOR_LIMIT, &b).unwrap();
    assert!(g.optimal);
    let idx = build_index(&g.grammar);
    for y in 1..=3 {
        for x in 1..=5 {
            assert_eq!(idx.access(y, x).unwrap(), m.get(y as usize, x as usize));
        }
    }
    let s = from_grammar(&g.grammar, &b).unwrap();
    assert_eq!(s.decode().unwrap(), m);
    assert!(balanced_grammar(&m).unwrap().size() >= g.grammar.size());
}

#[test]
fn identity_compresses_well_by_schemes() {
    let b = Budget::default();
    let s = identity_scheme(32).unwrap();
    assert_eq!(s.size(), 6);
    let small = b_exact(&identity(3).unwrap(), 9, &b).unwrap();
    assert!(small.size() <= 6);
    assert_eq!(small.decode().unwrap(), identity(3).unwrap());
}

#[test]
fn linearizations_invert() {
    let m = bk(2).unwrap();
    assert_eq!(unrlin(&rlin(&m), m.rows()).unwrap(), m);
    let sq = identity(8).unwrap();
    assert_eq!(unphlin(&phlin(&sq).unwrap()).unwrap(), sq);
    assert!(phlin(&m).is_err());
}

#[test]
fn full_grid_is_an_attractor_and_blocktree_rebuilds() {
    let b = Budget::default();
    let m = bk(2).unwrap();
    assert!(is_attractor(&m, &AttractorSet::full(m.rows(), m.cols()), false, &b).unwrap());
    assert!(delta(&m, &b).unwrap().as_f64() >= 1.0);
    let t = build_blocktree(&m, 2, &b).unwrap();
    assert_eq!(t.reconstruct().unwrap(), t.padded);
}
