//! Truncated Taylor arithmetic for scalar functions of one real variable.
//!
//! A [`Jet`] stores the value and derivatives `(f, f', ..., f^(k))` of a
//! function at a point, with `k <= 4`. Arithmetic is exact truncated-Taylor
//! algebra: for polynomial inputs of degree `<= order` the results match
//! symbolic differentiation exactly. Coefficients are plain derivatives,
//! not Taylor coefficients (no `1/k!` factors).

use crate::error::{Error, Result};

/// Highest derivative order supported anywhere in the crate.
///
/// The radial Ricci eigenvalue `mu` at `eps = 0` needs `chi''''`, and the
/// second derivative of the smoothing weight `psi` needs it as well; nothing
/// needs order 5.
pub const MAX_ORDER: usize = 4;

/// Binomial coefficients C(k, j) for k, j <= 4, used by the Leibniz rule.
const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Value and derivatives of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; MAX_ORDER + 1],
}

impl Jet {
    /// Jet of the constant function `v`.
    pub fn constant(v: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = v;
        Jet { order, c }
    }

    /// Jet of the identity `t ↦ t` evaluated at `t`.
    pub fn variable(t: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = t;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { order, c }
    }

    /// Builds a jet from explicit derivatives `(f, f', ...)`.
    pub fn from_derivs(derivs: &[f64]) -> Self {
        assert!(!derivs.is_empty() && derivs.len() <= MAX_ORDER + 1);
        let mut c = [0.0; MAX_ORDER + 1];
        c[..derivs.len()].copy_from_slice(derivs);
        Jet {
            order: derivs.len() - 1,
            c,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The derivatives `(f, f', ..., f^(order))`.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..=self.order]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// The k-th derivative. Panics if `k > order`.
    pub fn deriv(&self, k: usize) -> f64 {
        assert!(k <= self.order);
        self.c[k]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|x| x.is_finite())
    }

    /// Errors with `Evaluation` if any coefficient is non-finite.
    pub fn ensure_finite(&self, t: f64) -> Result<Self> {
        if self.is_finite() {
            Ok(*self)
        } else {
            Err(Error::Evaluation { t })
        }
    }

    /// Truncates to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order);
        let mut c = [0.0; MAX_ORDER + 1];
        c[..=order].copy_from_slice(&self.c[..=order]);
        Jet { order, c }
    }

    /// Jet of `f'` (order drops by one).
    pub fn derivative(&self) -> Self {
        assert!(self.order >= 1);
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..self.order {
            c[k] = self.c[k + 1];
        }
        Jet {
            order: self.order - 1,
            c,
        }
    }

    pub fn neg(&self) -> Self {
        let mut r = *self;
        for x in r.c.iter_mut() {
            *x = -*x;
        }
        r
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut r = *self;
        for x in r.c.iter_mut() {
            *x *= a;
        }
        r
    }

    pub fn add(&self, other: &Jet) -> Self {
        let order = self.order.min(other.order);
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            c[k] = self.c[k] + other.c[k];
        }
        Jet { order, c }
    }

    pub fn sub(&self, other: &Jet) -> Self {
        self.add(&other.neg())
    }

    /// Leibniz product rule: `(fg)^(k) = sum_j C(k,j) f^(j) g^(k-j)`.
    pub fn mul(&self, other: &Jet) -> Self {
        let order = self.order.min(other.order);
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            let mut s = 0.0;
            for j in 0..=k {
                s += BINOM[k][j] * self.c[j] * other.c[k - j];
            }
            c[k] = s;
        }
        Jet { order, c }
    }

    /// Quotient: solves `f = q g` derivative by derivative.
    pub fn div(&self, other: &Jet) -> Self {
        let order = self.order.min(other.order);
        let mut q = [0.0; MAX_ORDER + 1];
        let g0 = other.c[0];
        for k in 0..=order {
            let mut s = self.c[k];
            for j in 0..k {
                s -= BINOM[k][j] * q[j] * other.c[k - j];
            }
            q[k] = s / g0;
        }
        Jet { order, c: q }
    }

    /// `exp`: uses `E^(k+1) = sum_j C(k,j) f^(j+1) E^(k-j)`.
    pub fn exp(&self) -> Self {
        let order = self.order;
        let mut e = [0.0; MAX_ORDER + 1];
        e[0] = self.c[0].exp();
        for k in 0..order {
            let mut s = 0.0;
            for j in 0..=k {
                s += BINOM[k][j] * self.c[j + 1] * e[k - j];
            }
            e[k + 1] = s;
        }
        Jet { order, c: e }
    }

    /// Natural log. Derivatives come from the quotient jet `f'/f`.
    pub fn ln(&self) -> Self {
        let order = self.order;
        let mut l = [0.0; MAX_ORDER + 1];
        l[0] = self.c[0].ln();
        if order >= 1 {
            let q = self.derivative().div(&self.truncate(order - 1));
            for k in 1..=order {
                l[k] = q.c[k - 1];
            }
        }
        Jet { order, c: l }
    }

    /// Real power with constant exponent, via `exp(p ln f)`; requires `f > 0`.
    pub fn powf(&self, p: f64) -> Self {
        self.ln().scale(p).exp()
    }

    /// Integer power by repeated multiplication; handles any sign of base.
    pub fn powi(&self, p: i64) -> Self {
        if p == 0 {
            return Jet::constant(1.0, self.order);
        }
        let mut acc = *self;
        for _ in 1..p.unsigned_abs() {
            acc = acc.mul(self);
        }
        if p < 0 {
            Jet::constant(1.0, self.order).div(&acc)
        } else {
            acc
        }
    }

    /// Jet of `t ↦ f(b t + c)` given `self` = jet of `f` at `b t + c`:
    /// the k-th derivative picks up a factor `b^k`.
    pub fn compose_affine(&self, b: f64) -> Self {
        let mut r = *self;
        let mut p = 1.0;
        for k in 1..=self.order {
            p *= b;
            r.c[k] *= p;
        }
        r
    }
}
