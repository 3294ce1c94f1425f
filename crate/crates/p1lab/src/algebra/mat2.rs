use std::ops::{Add, Mul, Sub};

use super::poles::PoleExpansion;
use super::poly::{max_coeff_diff, Poly};
use super::scalar::Field;

/// 2×2 matrix with homogeneous entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<E> {
    pub a11: E,
    pub a12: E,
    pub a21: E,
    pub a22: E,
}

impl<E> Mat2<E> {
    pub fn new(a11: E, a12: E, a21: E, a22: E) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn map<F>(&self, f: impl Fn(&E) -> F) -> Mat2<F> {
        Mat2::new(f(&self.a11), f(&self.a12), f(&self.a21), f(&self.a22))
    }

    pub fn entries(&self) -> [&E; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }
}

impl<E> Mat2<E>
where
    for<'a> &'a E: Add<&'a E, Output = E> + Sub<&'a E, Output = E> + Mul<&'a E, Output = E>,
{
    pub fn mul(&self, o: &Mat2<E>) -> Mat2<E> {
        Mat2::new(
            &(&self.a11 * &o.a11) + &(&self.a12 * &o.a21),
            &(&self.a11 * &o.a12) + &(&self.a12 * &o.a22),
            &(&self.a21 * &o.a11) + &(&self.a22 * &o.a21),
            &(&self.a21 * &o.a12) + &(&self.a22 * &o.a22),
        )
    }

    pub fn add(&self, o: &Mat2<E>) -> Mat2<E> {
        Mat2::new(&self.a11 + &o.a11, &self.a12 + &o.a12, &self.a21 + &o.a21, &self.a22 + &o.a22)
    }

    pub fn sub(&self, o: &Mat2<E>) -> Mat2<E> {
        Mat2::new(&self.a11 - &o.a11, &self.a12 - &o.a12, &self.a21 - &o.a21, &self.a22 - &o.a22)
    }

    /// `self·o − o·self`
    pub fn commutator(&self, o: &Mat2<E>) -> Mat2<E> {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> E {
        &self.a11 + &self.a22
    }

    pub fn det(&self) -> E {
        &(&self.a11 * &self.a22) - &(&self.a12 * &self.a21)
    }
}

impl<S: Field> Mat2<Poly<S>> {
    pub fn identity() -> Self {
        Mat2::new(Poly::constant(S::one()), Poly::zero(), Poly::zero(), Poly::constant(S::one()))
    }

    pub fn diff(&self) -> Self {
        self.map(|p| p.diff())
    }

    pub fn eval(&self, x: S) -> [[S; 2]; 2] {
        [[self.a11.eval(x), self.a12.eval(x)], [self.a21.eval(x), self.a22.eval(x)]]
    }

    /// Largest coefficient magnitude over all four entries.
    pub fn norm_inf(&self) -> f64 {
        self.entries().iter().map(|p| p.norm_inf()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        [
            max_coeff_diff(&self.a11, &o.a11),
            max_coeff_diff(&self.a12, &o.a12),
            max_coeff_diff(&self.a21, &o.a21),
            max_coeff_diff(&self.a22, &o.a22),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn to_expansion(&self) -> Mat2<PoleExpansion<S>> {
        self.map(|p| PoleExpansion::from_poly(p.clone()))
    }
}

impl<S: Field> Mat2<PoleExpansion<S>> {
    pub fn diff(&self) -> Self {
        self.map(|p| p.diff())
    }

    pub fn eval(&self, x: S) -> [[S; 2]; 2] {
        [[self.a11.eval(x), self.a12.eval(x)], [self.a21.eval(x), self.a22.eval(x)]]
    }
}
