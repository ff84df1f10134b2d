//! Semi-orthogonal decompositions with respect to a nonzero anchor point.
//!
//! Every `x` splits as `x = a(x) x̄ + o(x)` with `⟨J(x̄), o(x)⟩ = 0`, and every
//! dual `x*` splits as `x* = a*(x*) J(x̄) + o*(x*)` with `⟨o*(x*), x̄⟩ = 0`.

use crate::coverage::{touch, Op};
use crate::error::{Error, Result};
use crate::space::{Dual, LpSpace, Primal};

/// Default relative tolerance for membership in the hyperplane `O(x̄)`.
pub const DEFAULT_O_TOL: f64 = 1e-9;

/// A nonzero anchor `x̄` together with its cached dual image `J(x̄)`.
#[derive(Debug, Clone)]
pub struct Anchor<'a> {
    space: &'a LpSpace,
    xbar: Primal,
    xbar_star: Dual,
    norm: f64,
    norm_sq: f64,
}

impl<'a> Anchor<'a> {
    pub fn new(space: &'a LpSpace, xbar: Primal) -> Result<Self> {
        space.check_len(xbar.len())?;
        let norm = space.norm(&xbar);
        if norm <= space.theta_threshold() {
            return Err(Error::Degenerate("anchor must be nonzero"));
        }
        let xbar_star = space.duality_map(&xbar);
        Ok(Self {
            space,
            xbar,
            xbar_star,
            norm,
            norm_sq: norm * norm,
        })
    }

    pub fn space(&self) -> &'a LpSpace {
        self.space
    }

    pub fn xbar(&self) -> &Primal {
        &self.xbar
    }

    /// `J(x̄)`
    pub fn xbar_star(&self) -> &Dual {
        &self.xbar_star
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `a(x̄; x) = ⟨J(x̄), x⟩ / ‖x̄‖²`
    pub fn a_coef(&self, x: &Primal) -> f64 {
        touch(Op::ACoef);
        self.space.dot(&self.xbar_star, x) / self.norm_sq
    }

    /// `o(x̄; x) = x − a(x̄; x) x̄`
    pub fn o_part(&self, x: &Primal) -> Primal {
        touch(Op::OPart);
        let a = self.a_coef(x);
        x.axpy(-a, &self.xbar)
    }

    /// `a*(x̄*; x*) = ⟨x*, x̄⟩ / ‖x̄‖²`
    pub fn a_star(&self, xs: &Dual) -> f64 {
        touch(Op::AStar);
        self.space.dot(xs, &self.xbar) / self.norm_sq
    }

    /// `o*(x̄*; x*) = x* − a*(x̄*; x*) J(x̄)`
    pub fn o_star(&self, xs: &Dual) -> Dual {
        touch(Op::OStar);
        let a = self.a_star(xs);
        xs.axpy(-a, &self.xbar_star)
    }

    /// Membership in `O(x̄) = {y : ⟨J(x̄), y⟩ = 0}` with relative tolerance
    /// `tol · max(1, ‖x̄‖‖y‖)`.
    pub fn in_o(&self, y: &Primal, tol: f64) -> bool {
        touch(Op::InO);
        let scale = (self.norm * self.space.raw_norm(y.coords())).max(1.0);
        self.space.dot(&self.xbar_star, y).abs() <= tol * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn anchor_rejects_origin() {
        let s = LpSpace::new(2, 2.0).unwrap();
        assert!(Anchor::new(&s, s.zero()).is_err());
    }

    #[test]
    fn cube_examples() {
        let s = LpSpace::new(3, 3.0).unwrap();
        let anchor = Anchor::new(&s, Primal::new(vec![1.0, 1.0, 0.0])).unwrap();
        let x = Primal::new(vec![2.0, 0.0, 0.0]);
        assert_relative_eq!(anchor.a_coef(&x), 1.0, epsilon = 1e-14);
        let o = anchor.o_part(&x);
        assert!(o.max_abs_diff(&Primal::new(vec![1.0, -1.0, 0.0])) < 1e-14);
        assert!(anchor.in_o(&o, DEFAULT_O_TOL));
        assert!(anchor.in_o(&Primal::new(vec![1.0, -1.0, 0.0]), DEFAULT_O_TOL));
        assert!(!anchor.in_o(anchor.xbar(), DEFAULT_O_TOL));
    }

    #[test]
    fn trivial_values() {
        let s = LpSpace::new(3, 1.7).unwrap();
        let xbar = Primal::new(vec![0.3, -1.2, 2.0]);
        let anchor = Anchor::new(&s, xbar.clone()).unwrap();
        assert_relative_eq!(anchor.a_coef(&xbar), 1.0, epsilon = 1e-14);
        assert_eq!(anchor.a_coef(&s.zero()), 0.0);
        assert!(s.norm(&anchor.o_part(&xbar)) < 1e-14);
        assert!(s.norm(&anchor.o_part(&xbar.scale(-3.5))) < 1e-13);
        let js = anchor.xbar_star().clone();
        assert_relative_eq!(anchor.a_star(&js), 1.0, epsilon = 1e-14);
        assert!(s.dual_norm(&anchor.o_star(&js)) < 1e-14);
        assert_eq!(anchor.a_star(&s.zero_dual()), 0.0);
        assert_eq!(anchor.o_star(&s.zero_dual()), s.zero_dual());
    }

    #[test]
    fn hilbert_dual_example() {
        let s = LpSpace::new(2, 2.0).unwrap();
        let anchor = Anchor::new(&s, Primal::new(vec![2.0, 0.0])).unwrap();
        let ys = Dual::new(vec![3.0, 5.0]);
        assert_eq!(anchor.a_star(&ys), 1.5);
        let o = anchor.o_star(&ys);
        assert_eq!(o.coords(), &[0.0, 5.0]);
        assert_eq!(s.pair(&o, anchor.xbar()).unwrap(), 0.0);
    }
}
