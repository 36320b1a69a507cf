//! Seeded random polynomial fields for property sweeps.

use rand::Rng;

use crate::error::Result;
use crate::expr::{Expression, Node};
use crate::field::ExprField;
use crate::linalg::{det, Mat3};

/// Exponent tuples of all monomials in `n` variables with total degree in
/// `lo..=hi`.
pub fn monomials(n: usize, lo: u32, hi: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    let top = |a: usize| if a < n { hi } else { 0 };
    for a in 0..=top(0) {
        for b in 0..=top(1) {
            for c in 0..=top(2) {
                let d = a + b + c;
                if d >= lo && d <= hi {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out.sort_by_key(|e| (e[0] + e[1] + e[2], std::cmp::Reverse(*e)));
    out
}

fn monomial_node(coef: f64, exps: &[u32; 3]) -> Node {
    let mut node = Node::Const(coef);
    for (i, &e) in exps.iter().enumerate() {
        let var = match e {
            0 => continue,
            1 => Node::Var(i),
            e => Node::Pow(Box::new(Node::Var(i)), e),
        };
        node = Node::Mul(Box::new(node), Box::new(var));
    }
    node
}

/// `Σ c_e x^e` over the given monomials.
pub fn polynomial(n: usize, terms: &[([u32; 3], f64)]) -> Expression {
    let mut acc: Option<Node> = None;
    for (exps, c) in terms {
        let m = monomial_node(*c, exps);
        acc = Some(match acc {
            None => m,
            Some(a) => Node::Add(Box::new(a), Box::new(m)),
        });
    }
    Expression::from_ast(acc.unwrap_or(Node::Const(0.0)), n)
}

/// Coefficient rounded to three decimals so that generated scenes print
/// compactly.
fn coefficient<R: Rng>(rng: &mut R, scale: f64) -> f64 {
    (rng.gen_range(-1.0..1.0) * scale * 1000.0).round() / 1000.0
}

/// Random polynomial of total degree at most `degree`.
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, degree: u32) -> Expression {
    let terms: Vec<_> = monomials(n, 0, degree)
        .into_iter()
        .map(|e| (e, coefficient(rng, 1.0)))
        .collect();
    polynomial(n, &terms)
}

pub fn random_field<R: Rng>(rng: &mut R, n: usize, degree: u32) -> ExprField {
    let comps = (0..n).map(|_| random_polynomial(rng, n, degree)).collect();
    ExprField::new(comps).expect("consistent arity")
}

/// Random field `A x + (terms of degree 2..=degree)` with `|det A| ≥ 0.2`, so
/// that the origin is a transverse zero.
pub fn field_with_transverse_zero<R: Rng>(rng: &mut R, n: usize, degree: u32) -> (ExprField, Mat3) {
    let a = loop {
        let mut a = [[0.0; 3]; 3];
        for row in a.iter_mut().take(n) {
            for e in row.iter_mut().take(n) {
                *e = coefficient(rng, 1.0);
            }
        }
        if det(&a, n).abs() >= 0.2 {
            break a;
        }
    };
    let comps = (0..n)
        .map(|i| {
            let mut terms: Vec<([u32; 3], f64)> = (0..n)
                .map(|j| {
                    let mut e = [0u32; 3];
                    e[j] = 1;
                    (e, a[i][j])
                })
                .collect();
            terms.extend(
                monomials(n, 2, degree.max(1))
                    .into_iter()
                    .map(|e| (e, coefficient(rng, 0.5))),
            );
            polynomial(n, &terms)
        })
        .collect();
    (ExprField::new(comps).expect("consistent arity"), a)
}

/// Text of every component, suitable for a scene file.
pub fn field_texts(f: &ExprField) -> Vec<String> {
    f.components().iter().map(|c| c.to_string()).collect()
}

/// Re-parses printed components; used to check that generated fields
/// survive a scene round trip.
pub fn reparse(texts: &[String]) -> Result<ExprField> {
    ExprField::parse(texts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(2, 0, 3).len(), 10);
        assert_eq!(monomials(3, 0, 3).len(), 20);
        assert_eq!(monomials(3, 2, 3).len(), 16);
        assert_eq!(monomials(1, 0, 4).len(), 5);
    }

    #[test]
    fn transverse_zero_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let (f, a) = field_with_transverse_zero(&mut rng, n, 3);
            let (v, j) = f.eval_jacobian(&[0.0; 3]).unwrap();
            assert!(v.iter().all(|&x| x == 0.0));
            for i in 0..n {
                for k in 0..n {
                    assert!((j[i][k] - a[i][k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn printed_fields_reparse_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_field(&mut rng, 3, 3);
        let g = reparse(&field_texts(&f)).unwrap();
        let x = [0.3, -0.2, 0.7];
        assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
    }
}
