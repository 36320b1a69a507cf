//! Vector fields on ℝⁿ, n ≤ 3.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::linalg::{Mat3, Vec3, ZERO};

/// A vector field on ℝⁿ. Points and values are padded to three components.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &Vec3) -> Result<Vec3>;

    /// Value and Jacobian (`jac[i][j] = ∂v_i/∂x_j`). The default uses central
    /// differences; expression-backed fields override it with exact partials.
    fn eval_jacobian(&self, x: &Vec3) -> Result<(Vec3, Mat3)> {
        let n = self.dim();
        let v = self.eval(x)?;
        let mut jac = [[0.0; 3]; 3];
        for j in 0..n {
            let h = 1e-6 * (1.0 + x[j].abs());
            let mut xp = *x;
            let mut xm = *x;
            xp[j] += h;
            xm[j] -= h;
            let vp = self.eval(&xp)?;
            let vm = self.eval(&xm)?;
            for i in 0..n {
                jac[i][j] = (vp[i] - vm[i]) / (2.0 * h);
            }
        }
        Ok((v, jac))
    }
}

pub type SharedField = Arc<dyn VectorField>;

/// A field whose components are parsed expressions.
#[derive(Debug, Clone)]
pub struct ExprField {
    components: Vec<Expression>,
}

impl ExprField {
    pub fn new(components: Vec<Expression>) -> Result<Self> {
        let n = components.len();
        if !(1..=3).contains(&n) {
            return Err(Error::ArityMismatch(format!("{n} field components")));
        }
        if let Some(bad) = components.iter().find(|c| c.arity() != n) {
            return Err(Error::ArityMismatch(format!(
                "component of arity {} in a {n}-dimensional field",
                bad.arity()
            )));
        }
        Ok(ExprField { components })
    }

    pub fn parse<S: AsRef<str>>(texts: &[S]) -> Result<Self> {
        let n = texts.len();
        let comps = texts
            .iter()
            .map(|t| Expression::parse(t.as_ref(), n))
            .collect::<Result<Vec<_>>>()?;
        ExprField::new(comps)
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }
}

impl VectorField for ExprField {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, x: &Vec3) -> Result<Vec3> {
        let mut out = ZERO;
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(x)?;
        }
        Ok(out)
    }

    fn eval_jacobian(&self, x: &Vec3) -> Result<(Vec3, Mat3)> {
        let mut v = ZERO;
        let mut jac = [[0.0; 3]; 3];
        for (i, c) in self.components.iter().enumerate() {
            let j = c.eval_jet(x)?;
            v[i] = j.value;
            jac[i] = j.gradient();
        }
        Ok((v, jac))
    }
}

/// `x ↦ −v(x)`.
pub struct Negated(pub SharedField);

impl VectorField for Negated {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &Vec3) -> Result<Vec3> {
        let v = self.0.eval(x)?;
        Ok([-v[0], -v[1], -v[2]])
    }

    fn eval_jacobian(&self, x: &Vec3) -> Result<(Vec3, Mat3)> {
        let (v, mut j) = self.0.eval_jacobian(x)?;
        for row in &mut j {
            for e in row.iter_mut() {
                *e = -*e;
            }
        }
        Ok(([-v[0], -v[1], -v[2]], j))
    }
}

/// `(x, t) ↦ (a(x), −t)` on ℝ^{m+1} for a field `a` on ℝ^m.
pub struct Suspension(pub SharedField);

impl VectorField for Suspension {
    fn dim(&self) -> usize {
        self.0.dim() + 1
    }

    fn eval(&self, x: &Vec3) -> Result<Vec3> {
        let m = self.0.dim();
        let mut base = *x;
        base[m] = 0.0;
        let mut v = self.0.eval(&base)?;
        v[m] = -x[m];
        Ok(v)
    }

    fn eval_jacobian(&self, x: &Vec3) -> Result<(Vec3, Mat3)> {
        let m = self.0.dim();
        let mut base = *x;
        base[m] = 0.0;
        let (mut v, mut j) = self.0.eval_jacobian(&base)?;
        v[m] = -x[m];
        j[m] = [0.0; 3];
        j[m][m] = -1.0;
        Ok((v, j))
    }
}

/// Adapter for closures; Jacobians fall back to finite differences.
pub struct FnField<F> {
    n: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&Vec3) -> Vec3 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        FnField { n, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&Vec3) -> Vec3 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &Vec3) -> Result<Vec3> {
        Ok((self.f)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_field_jacobian_matches_finite_differences() {
        let f = ExprField::parse(&["x1^2 - x2*x3", "sin(x1)*x3", "exp(x2) - x3^3"]).unwrap();
        let x = [0.3, -0.4, 0.8];
        let (_, exact) = f.eval_jacobian(&x).unwrap();
        struct Plain<'a>(&'a ExprField);
        impl VectorField for Plain<'_> {
            fn dim(&self) -> usize {
                3
            }
            fn eval(&self, x: &Vec3) -> Result<Vec3> {
                self.0.eval(x)
            }
        }
        let (_, fd) = Plain(&f).eval_jacobian(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((exact[i][j] - fd[i][j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn suspension_appends_contracting_coordinate() {
        let a: SharedField = Arc::new(ExprField::parse(&["x1", "-x2"]).unwrap());
        let b = Suspension(a);
        assert_eq!(b.dim(), 3);
        let (v, j) = b.eval_jacobian(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(v, [1.0, -2.0, -3.0]);
        assert_eq!(j[2], [0.0, 0.0, -1.0]);
        assert_eq!(j[0], [1.0, 0.0, 0.0]);
    }

    #[test]
    fn mixed_arity_components_rejected() {
        let c1 = Expression::parse("x1", 1).unwrap();
        let c2 = Expression::parse("x1", 2).unwrap();
        assert!(ExprField::new(vec![c1, c2]).is_err());
    }
}
