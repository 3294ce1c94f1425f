use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::scalar::Field;

/// Relative threshold below which trailing coefficients are dropped.
pub const TRIM_REL: f64 = 1e-13;

/// Dense univariate polynomial, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Field> Poly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// Keeps every coefficient as given, including trailing zeros.
    pub fn raw(coeffs: Vec<S>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// `c·λ^k`
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `∏ (λ − r)`
    pub fn from_roots(roots: &[S]) -> Self {
        let mut p = Poly::constant(S::one());
        for &r in roots {
            p = p.mul_linear(r);
        }
        p
    }

    fn trim(&mut self) {
        let max = self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
        let cut = TRIM_REL * max;
        while let Some(last) = self.coeffs.last() {
            if last.magnitude() <= cut {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `λ^k`, zero beyond the stored range.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).copied().unwrap_or_else(S::zero)
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, &c| acc * x + c)
    }

    pub fn diff(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c.scale(k as f64))
            .collect();
        Poly::new(v)
    }

    pub fn scale(&self, s: S) -> Self {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `(λ − r)·self`
    pub fn mul_linear(&self, r: S) -> Self {
        let n = self.coeffs.len();
        if n == 0 {
            return Poly::zero();
        }
        let mut v = vec![S::zero(); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            v[k + 1] += c;
            v[k] -= c * r;
        }
        Poly::new(v)
    }

    /// Coefficients of `self` expanded around `a`: `Σ d_j (λ − a)^j`.
    pub fn taylor_at(&self, a: S) -> Vec<S> {
        let mut d = self.coeffs.clone();
        let n = d.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = d[j + 1] * a;
                d[j] += t;
            }
        }
        d
    }

    /// Inverse of `taylor_at`: turns coefficients in `(λ − a)` back into powers of λ.
    pub fn from_taylor(d: &[S], a: S) -> Self {
        let mut p = Poly::zero();
        for &c in d.iter().rev() {
            p = p.mul_linear(a) + Poly::constant(c);
        }
        p
    }

    /// Polynomial long division; `div` must be nonzero.
    pub fn div_rem(&self, div: &Poly<S>) -> (Poly<S>, Poly<S>) {
        let dd = div.degree().expect("division by the zero polynomial");
        let lead = div.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), Poly::new(rem));
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, &dc) in div.coeffs.iter().enumerate() {
                let t = c * dc;
                rem[k + j] -= t;
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn map<T: Field>(&self, f: impl Fn(S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    pub fn values(&self) -> Poly<Complex64> {
        self.map(|c| c.value())
    }

    /// Coefficients `λ^k` with `k ≥ lo` dropped into `λ^{k-lo}`; lower ones discarded.
    pub fn shift_down(&self, lo: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(lo).copied().collect())
    }
}

/// Largest coefficientwise difference of two polynomials.
pub fn max_coeff_diff<S: Field>(a: &Poly<S>, b: &Poly<S>) -> f64 {
    let n = a.len().max(b.len());
    (0..n).map(|k| (a.coeff(k) - b.coeff(k)).magnitude()).fold(0.0, f64::max)
}

impl<S: Field> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: &Poly<S>) -> Poly<S> {
        let n = self.len().max(o.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<S: Field> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: &Poly<S>) -> Poly<S> {
        let n = self.len().max(o.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<S: Field> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: &Poly<S>) -> Poly<S> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![S::zero(); self.len() + o.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl<S: Field> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly::raw(self.coeffs.iter().map(|&c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Field> $tr for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, o: Poly<S>) -> Poly<S> {
                (&self).$m(&o)
            }
        }
        impl<S: Field> $tr<&Poly<S>> for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, o: &Poly<S>) -> Poly<S> {
                (&self).$m(o)
            }
        }
        impl<S: Field> $tr<Poly<S>> for &Poly<S> {
            type Output = Poly<S>;
            fn $m(self, o: Poly<S>) -> Poly<S> {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Field> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}
