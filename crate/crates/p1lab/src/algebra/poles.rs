use std::ops::{Add, Mul, Neg, Sub};

use super::poly::Poly;
use super::scalar::Field;
use crate::error::{P1Error, Result};

/// Two distinct pole locations closer than this are rejected.
pub const COLLISION_TOL: f64 = 1e-10;

/// Principal part at one location: `Σ_k coeffs[k] / (λ − at)^{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole<S> {
    pub at: S,
    pub coeffs: Vec<S>,
}

impl<S: Field> Pole<S> {
    pub fn simple(at: S, residue: S) -> Self {
        Pole { at, coeffs: vec![residue] }
    }

    pub fn residue(&self) -> S {
        self.coeffs.first().copied().unwrap_or_else(S::zero)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn eval(&self, x: S) -> S {
        let u = S::one() / (x - self.at);
        let mut acc = S::zero();
        let mut pw = u;
        for &c in &self.coeffs {
            acc += c * pw;
            pw *= u;
        }
        acc
    }

    fn size(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

/// Rational function written as a polynomial plus principal parts at finitely many points.
///
/// Entries of the Darboux-gauge matrices only carry simple poles; higher orders
/// show up transiently (derivatives, products) and must cancel before a result
/// is converted back to a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleExpansion<S> {
    pub poly: Poly<S>,
    pub poles: Vec<Pole<S>>,
}

impl<S: Field> PoleExpansion<S> {
    pub fn from_poly(poly: Poly<S>) -> Self {
        PoleExpansion { poly, poles: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn constant(c: S) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// `poly + Σ residues[j]/(λ − at[j])`, rejecting near-coincident locations.
    pub fn with_simple_poles(poly: Poly<S>, at: &[S], residues: &[S]) -> Result<Self> {
        assert_eq!(at.len(), residues.len());
        check_separation(at)?;
        let poles = at.iter().zip(residues).map(|(&a, &r)| Pole::simple(a, r)).collect();
        Ok(PoleExpansion { poly, poles })
    }

    pub fn eval(&self, x: S) -> S {
        self.poles.iter().fold(self.poly.eval(x), |acc, p| acc + p.eval(x))
    }

    pub fn diff(&self) -> Self {
        let poles = self
            .poles
            .iter()
            .map(|p| {
                let mut c = vec![S::zero(); p.order() + 1];
                for (k, &v) in p.coeffs.iter().enumerate() {
                    c[k + 1] = -v.scale((k + 1) as f64);
                }
                Pole { at: p.at, coeffs: c }
            })
            .collect();
        PoleExpansion { poly: self.poly.diff(), poles }
    }

    pub fn scale(&self, s: S) -> Self {
        PoleExpansion {
            poly: self.poly.scale(s),
            poles: self
                .poles
                .iter()
                .map(|p| Pole { at: p.at, coeffs: p.coeffs.iter().map(|&c| c * s).collect() })
                .collect(),
        }
    }

    /// Largest principal-part coefficient.
    pub fn pole_size(&self) -> f64 {
        self.poles.iter().map(|p| p.size()).fold(0.0, f64::max)
    }

    /// Drops the principal parts after checking they cancelled to `tol` relative to
    /// the polynomial part (absolute when that part is small).
    pub fn into_poly(self, tol: f64, entry: &str) -> Result<Poly<S>> {
        let scale = self.poly.norm_inf().max(1.0);
        let residual = self.pole_size();
        if residual > tol * scale {
            return Err(P1Error::ResidueMismatch { entry: entry.to_string(), residual });
        }
        Ok(self.poly)
    }

    fn add_pole(&mut self, p: Pole<S>) {
        if let Some(q) = self.poles.iter_mut().find(|q| q.at.value() == p.at.value()) {
            if q.coeffs.len() < p.coeffs.len() {
                q.coeffs.resize(p.coeffs.len(), S::zero());
            }
            for (k, c) in p.coeffs.into_iter().enumerate() {
                q.coeffs[k] += c;
            }
        } else {
            self.poles.push(p);
        }
    }

    fn mul_poly_pole(poly: &Poly<S>, p: &Pole<S>) -> (Poly<S>, Pole<S>) {
        let d = poly.taylor_at(p.at);
        let m = p.order();
        let mut principal = vec![S::zero(); m];
        let mut regular = vec![S::zero(); d.len().saturating_sub(1).max(1)];
        for (k, &c) in p.coeffs.iter().enumerate() {
            let kk = k + 1;
            for (j, &dj) in d.iter().enumerate() {
                let t = c * dj;
                if j < kk {
                    principal[kk - j - 1] += t;
                } else {
                    let e = j - kk;
                    if e >= regular.len() {
                        regular.resize(e + 1, S::zero());
                    }
                    regular[e] += t;
                }
            }
        }
        (Poly::from_taylor(&regular, p.at), Pole { at: p.at, coeffs: principal })
    }

    /// Principal part at `a.at` of the product of two principal parts at different points.
    fn cross_part(a: &Pole<S>, b: &Pole<S>) -> Pole<S> {
        let m = a.order();
        let d = a.at - b.at;
        // Taylor coefficients at a.at of Σ_l b_l/(λ − b.at)^{l+1}, up to order m − 1.
        let mut g = vec![S::zero(); m];
        for (l, &bl) in b.coeffs.iter().enumerate() {
            let k = (l + 1) as i32;
            for (n, gn) in g.iter_mut().enumerate() {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let binom = binomial((k as usize) + n - 1, n);
                *gn += bl * d.powi(-k - n as i32).scale(sign * binom);
            }
        }
        let mut c = vec![S::zero(); m];
        for (k, &ak) in a.coeffs.iter().enumerate() {
            for n in 0..=k {
                c[k - n] += ak * g[n];
            }
        }
        Pole { at: a.at, coeffs: c }
    }

    fn same_point(a: &Pole<S>, b: &Pole<S>) -> Pole<S> {
        let mut c = vec![S::zero(); a.order() + b.order()];
        for (i, &x) in a.coeffs.iter().enumerate() {
            for (j, &y) in b.coeffs.iter().enumerate() {
                c[i + j + 1] += x * y;
            }
        }
        Pole { at: a.at, coeffs: c }
    }

    pub fn map<T: Field>(&self, f: impl Fn(S) -> T + Copy) -> PoleExpansion<T> {
        PoleExpansion {
            poly: self.poly.map(f),
            poles: self
                .poles
                .iter()
                .map(|p| Pole { at: f(p.at), coeffs: p.coeffs.iter().map(|&c| f(c)).collect() })
                .collect(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Errors with `PoleCollision` when two of the points lie within `COLLISION_TOL`.
pub fn check_separation<S: Field>(pts: &[S]) -> Result<()> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let sep = (pts[i].value() - pts[j].value()).norm();
            if sep < COLLISION_TOL {
                return Err(P1Error::PoleCollision { i, j, separation: sep });
            }
        }
    }
    Ok(())
}

impl<S: Field> Add for &PoleExpansion<S> {
    type Output = PoleExpansion<S>;
    fn add(self, o: &PoleExpansion<S>) -> PoleExpansion<S> {
        let mut r = PoleExpansion { poly: &self.poly + &o.poly, poles: self.poles.clone() };
        for p in &o.poles {
            r.add_pole(p.clone());
        }
        r
    }
}

impl<S: Field> Neg for &PoleExpansion<S> {
    type Output = PoleExpansion<S>;
    fn neg(self) -> PoleExpansion<S> {
        self.scale(-S::one())
    }
}

impl<S: Field> Sub for &PoleExpansion<S> {
    type Output = PoleExpansion<S>;
    fn sub(self, o: &PoleExpansion<S>) -> PoleExpansion<S> {
        self + &(-o)
    }
}

impl<S: Field> Mul for &PoleExpansion<S> {
    type Output = PoleExpansion<S>;
    fn mul(self, o: &PoleExpansion<S>) -> PoleExpansion<S> {
        let mut r = PoleExpansion::from_poly(&self.poly * &o.poly);
        for p in &o.poles {
            let (reg, pp) = PoleExpansion::mul_poly_pole(&self.poly, p);
            r.poly = &r.poly + &reg;
            r.add_pole(pp);
        }
        for p in &self.poles {
            let (reg, pp) = PoleExpansion::mul_poly_pole(&o.poly, p);
            r.poly = &r.poly + &reg;
            r.add_pole(pp);
        }
        for a in &self.poles {
            for b in &o.poles {
                if a.at.value() == b.at.value() {
                    r.add_pole(PoleExpansion::same_point(a, b));
                } else {
                    r.add_pole(PoleExpansion::cross_part(a, b));
                    r.add_pole(PoleExpansion::cross_part(b, a));
                }
            }
        }
        r
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Field> $tr for PoleExpansion<S> {
            type Output = PoleExpansion<S>;
            fn $m(self, o: PoleExpansion<S>) -> PoleExpansion<S> {
                (&self).$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Field> Neg for PoleExpansion<S> {
    type Output = PoleExpansion<S>;
    fn neg(self) -> PoleExpansion<S> {
        -&self
    }
}
