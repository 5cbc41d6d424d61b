//! Seeded random matrices and grammars for property tests and experiments.

use rand::Rng;

use crate::grammar::{Grammar2D, GrammarBuilder, Rule2D, VarId};
use crate::matrix::{Alphabet, Matrix2D, Symbol};

/// Uniform `rows x cols` matrix over the tokens `0..sigma`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, sigma: usize) -> Matrix2D {
    let cells = (0..rows * cols).map(|_| rng.gen_range(0..sigma) as Symbol).collect();
    Matrix2D::new(rows, cols, cells, Alphabet::numeric(sigma)).expect("valid random matrix")
}

/// Random valid grammar built bottom-up from `sigma` terminals with up to
/// `steps` non-terminal rules, never exceeding `max_area` cells per
/// expansion. The axiom is the largest variable; unreachable rules are
/// dropped.
pub fn random_grammar(
    rng: &mut impl Rng,
    sigma: usize,
    steps: usize,
    runs: bool,
    max_area: u64,
) -> Grammar2D {
    let mut b = GrammarBuilder::with_alphabet(Alphabet::numeric(sigma));
    let mut dims: Vec<(u64, u64)> = Vec::new();
    for s in 0..sigma {
        b.add(Rule2D::Terminal(s as Symbol));
        dims.push((1, 1));
    }
    for _ in 0..steps {
        for _attempt in 0..20 {
            let x = rng.gen_range(0..dims.len());
            let (h, w) = dims[x];
            let kind = rng.gen_range(0..if runs { 4 } else { 2 });
            let candidate = match kind {
                0 | 1 => {
                    let partners: Vec<VarId> = (0..dims.len())
                        .filter(|&y| if kind == 0 { dims[y].0 == h } else { dims[y].1 == w })
                        .collect();
                    let y = partners[rng.gen_range(0..partners.len())];
                    if kind == 0 {
                        (Rule2D::Horiz(x, y), (h, w + dims[y].1))
                    } else {
                        (Rule2D::Vert(x, y), (h + dims[y].0, w))
                    }
                }
                2 => {
                    let k = rng.gen_range(2..=3);
                    (Rule2D::RunH(k, x), (h, k * w))
                }
                _ => {
                    let k = rng.gen_range(2..=3);
                    (Rule2D::RunV(k, x), (k * h, w))
                }
            };
            let (rule, d) = candidate;
            if d.0 * d.1 > max_area {
                continue;
            }
            let v = b.add(rule);
            if v == dims.len() {
                dims.push(d);
            }
            break;
        }
    }
    let axiom = (0..dims.len())
        .max_by_key(|&v| (dims[v].0 * dims[v].1, v))
        .expect("at least one terminal");
    b.finish(axiom).expect("random grammars are valid by construction").canonical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_grammars_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = random_grammar(&mut rng, 2, 10, true, 100);
            assert!(g.area(g.axiom()) <= 100);
            let m = g.expand(&Budget::default()).unwrap();
            assert_eq!((m.rows() as u64, m.cols() as u64), g.dims(g.axiom()));
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_matrix(&mut ChaCha8Rng::seed_from_u64(3), 4, 4, 3);
        let b = random_matrix(&mut ChaCha8Rng::seed_from_u64(3), 4, 4, 3);
        assert_eq!(a, b);
    }
}
