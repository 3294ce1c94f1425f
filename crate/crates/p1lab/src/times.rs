//! Irregular times, trivial/isomonodromic times and deformation vectors.
//!
//! Irregular times are stored 0-based: `t[k - 1]` holds t_{∞,k} for k = 1..2r∞−2.
//! Fractional powers use the principal branch throughout, so the maps below are
//! mutually inverse only on the principal sheet.

use num_complex::Complex64;

use crate::algebra::{Field, Poly};
use crate::error::{check_index, P1Error, Result};
use crate::symfun::sgn;

/// Largest genus accepted by the public constructors.
pub const MAX_GENUS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct IrregularTimes<S> {
    pub r_inf: usize,
    pub t: Vec<S>,
    pub hbar: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTimes<S> {
    pub r_inf: usize,
    /// T_{∞,1..r∞−1}
    pub t_inf: Vec<S>,
    pub t1: S,
    pub t2: S,
    /// τ_1..τ_g
    pub tau: Vec<S>,
    pub hbar: S,
}

/// Tangent vector α on the space of irregular times, `alpha[k - 1]` = α_{∞,k}.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationVector<S> {
    pub alpha: Vec<S>,
}

fn check_r_inf(r_inf: usize) -> Result<()> {
    if r_inf < 3 || r_inf - 3 > MAX_GENUS {
        return Err(P1Error::InvalidInput(format!(
            "pole order {r_inf} outside [3, {}]",
            MAX_GENUS + 3
        )));
    }
    Ok(())
}

impl<S: Field> IrregularTimes<S> {
    pub fn new(r_inf: usize, t: Vec<S>, hbar: S) -> Result<Self> {
        check_r_inf(r_inf)?;
        if t.len() != 2 * r_inf - 2 {
            return Err(P1Error::InvalidInput(format!(
                "expected {} irregular times, got {}",
                2 * r_inf - 2,
                t.len()
            )));
        }
        if t.iter().any(|x| !x.is_finite()) || !hbar.is_finite() {
            return Err(P1Error::InvalidInput("non-finite time".into()));
        }
        Ok(IrregularTimes { r_inf, t, hbar })
    }

    /// Even times zero, t_{2r∞−3} = 2, t_{2r∞−5} = 0 and ½t_{2k−1} = τ_{r∞−k−2}.
    pub fn canonical(tau: &[S], hbar: S) -> Result<Self> {
        let g = tau.len();
        let r = g + 3;
        let mut t = vec![S::zero(); 2 * r - 2];
        t[2 * r - 4] = S::from_f64(2.0);
        for k in 1..=r - 3 {
            t[2 * k - 2] = tau[r - k - 3].scale(2.0);
        }
        IrregularTimes::new(r, t, hbar)
    }

    pub fn genus(&self) -> usize {
        self.r_inf - 3
    }

    /// t_{∞,k}; zero outside 1..=2r∞−2.
    pub fn t(&self, k: i64) -> S {
        if k < 1 || k as usize > self.t.len() {
            S::zero()
        } else {
            self.t[k as usize - 1]
        }
    }

    pub fn is_canonical(&self, tol: f64) -> bool {
        let r = self.r_inf as i64;
        let even_zero = (1..r).all(|k| self.t(2 * k).magnitude() <= tol);
        even_zero
            && (self.t(2 * r - 3) - S::from_f64(2.0)).magnitude() <= tol
            && (r < 4 || self.t(2 * r - 5).magnitude() <= tol)
    }

    pub fn map<T: Field>(&self, f: impl Fn(S) -> T) -> IrregularTimes<T> {
        IrregularTimes { r_inf: self.r_inf, t: self.t.iter().map(|&x| f(x)).collect(), hbar: f(self.hbar) }
    }
}

impl<S: Field> ReducedTimes<S> {
    pub fn new(r_inf: usize, t_inf: Vec<S>, t1: S, t2: S, tau: Vec<S>, hbar: S) -> Result<Self> {
        check_r_inf(r_inf)?;
        if t_inf.len() != r_inf - 1 || tau.len() != r_inf - 3 {
            return Err(P1Error::InvalidInput("reduced times have the wrong lengths".into()));
        }
        Ok(ReducedTimes { r_inf, t_inf, t1, t2, tau, hbar })
    }

    /// T_{∞,k} = 0, T₁ = 0, T₂ = 1.
    pub fn canonical(tau: &[S], hbar: S) -> Result<Self> {
        let r = tau.len() + 3;
        ReducedTimes::new(r, vec![S::zero(); r - 1], S::zero(), S::one(), tau.to_vec(), hbar)
    }

    pub fn genus(&self) -> usize {
        self.r_inf - 3
    }

    pub fn is_canonical(&self, tol: f64) -> bool {
        self.t_inf.iter().all(|x| x.magnitude() <= tol)
            && self.t1.magnitude() <= tol
            && (self.t2 - S::one()).magnitude() <= tol
    }

    pub fn require_canonical(&self) -> Result<()> {
        if self.is_canonical(1e-12) {
            Ok(())
        } else {
            Err(P1Error::NotCanonical("trivial times differ from T_inf = 0, T1 = 0, T2 = 1".into()))
        }
    }
}

impl<S: Field> DeformationVector<S> {
    pub fn zeros(r_inf: usize) -> Self {
        DeformationVector { alpha: vec![S::zero(); 2 * r_inf - 2] }
    }

    /// α_{∞,k}; zero outside the stored range.
    pub fn a(&self, k: i64) -> S {
        if k < 1 || k as usize > self.alpha.len() {
            S::zero()
        } else {
            self.alpha[k as usize - 1]
        }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// `∏_{m=lo..hi} (2r∞ − 2m − 5)`, empty product 1.
fn odd_product(r: i64, lo: i64, hi: i64) -> f64 {
    (lo..=hi).fold(1.0, |a, m| a * (2 * r - 2 * m - 5) as f64)
}

pub fn reduced_from_irregular<S: Field>(t: &IrregularTimes<S>) -> Result<ReducedTimes<S>> {
    let r = t.r_inf as i64;
    let top = t.t(2 * r - 3);
    if top.value().norm() == 0.0 {
        return Err(P1Error::DegenerateTimes("t_{inf,2r-3} vanishes".into()));
    }
    let d = (2 * r - 3) as f64;
    let big_r = (2 * r - 5) as f64;
    let a = top.scale(0.5);
    let b = t.t(2 * r - 5).scale(0.5);
    let t2 = a.powc(c(2.0 / d));
    let t1 = t.t(2 * r - 5).scale(1.0 / big_r) * a.powc(c(-big_r / d));
    let t_inf = (1..r).map(|k| t.t(2 * k)).collect();
    let g = r - 3;
    let mut tau = Vec::with_capacity(g as usize);
    for k in 1..=g {
        let mut acc = S::zero();
        for i in 0..k {
            let prod: f64 = (1..=i).fold(1.0, |p, s| p * (2 * r - 2 * k + 2 * s - 7) as f64);
            let coef = sgn(i) * prod / (factorial(i) * big_r.powi(i as i32));
            let expo = -(((2 * r - 3) * i + 2 * r - 5 - 2 * k) as f64) / d;
            acc += b.powi(i as i32) * a.powc(c(expo)) * t.t(2 * r - 5 - 2 * k + 2 * i).scale(0.5 * coef);
        }
        let prod: f64 = (1..=k).fold(1.0, |p, s| p * (2 * r - 2 * k + 2 * s - 7) as f64);
        let coef = sgn(k) * prod / ((k + 1) as f64 * factorial(k - 1) * big_r.powi(k as i32));
        let expo = -((k + 1) as f64) * big_r / d;
        acc += b.powi((k + 1) as i32) * a.powc(c(expo)).scale(coef);
        tau.push(acc);
    }
    Ok(ReducedTimes { r_inf: t.r_inf, t_inf, t1, t2, tau, hbar: t.hbar })
}

pub fn irregular_from_reduced<S: Field>(rt: &ReducedTimes<S>) -> Result<IrregularTimes<S>> {
    let r = rt.r_inf as i64;
    if rt.t2.value().norm() == 0.0 {
        return Err(P1Error::DegenerateTimes("T2 vanishes".into()));
    }
    let n = (2 * r - 2) as usize;
    let mut t = vec![S::zero(); n];
    let t2p = |e: f64| rt.t2.powc(c(e));
    t[(2 * r - 4) as usize] = t2p((2 * r - 3) as f64 / 2.0).scale(2.0);
    t[(2 * r - 6) as usize] = rt.t1 * t2p((2 * r - 5) as f64 / 2.0).scale((2 * r - 5) as f64);
    for i in 1..r {
        t[(2 * i - 1) as usize] = rt.t_inf[(i - 1) as usize];
    }
    for k in 1..=r - 3 {
        let mut acc = S::zero();
        for p in 1..=r - k - 2 {
            let e = r - k - p - 2;
            let coef = odd_product(r, p + 1, r - k - 2) / (2f64.powi(e as i32) * factorial(e));
            acc += rt.t1.powi(e as i32) * rt.tau[(p - 1) as usize].scale(coef);
        }
        let e = r - 1 - k;
        let coef = odd_product(r, 0, r - k - 2) / (2f64.powi(e as i32) * factorial(e));
        acc += rt.t1.powi(e as i32).scale(coef);
        t[(2 * k - 2) as usize] = t2p((2 * k - 1) as f64 / 2.0) * acc.scale(2.0);
    }
    IrregularTimes::new(rt.r_inf, t, rt.hbar)
}

/// w_k = e_{2k}, 1 ≤ k ≤ r∞−1.
pub fn trivial_vector_w<S: Field>(k: i64, t: &IrregularTimes<S>) -> Result<DeformationVector<S>> {
    let r = t.r_inf as i64;
    check_index("k", k, 1, r - 1)?;
    let mut v = DeformationVector::zeros(t.r_inf);
    v.alpha[(2 * k - 1) as usize] = S::one();
    Ok(v)
}

/// u_k = ½ Σ_{r=1..2r∞−2k−4} r t_{∞,r+2k+2} e_r, −1 ≤ k ≤ r∞−3.
pub fn trivial_vector_u<S: Field>(k: i64, t: &IrregularTimes<S>) -> Result<DeformationVector<S>> {
    let rr = t.r_inf as i64;
    check_index("k", k, -1, rr - 3)?;
    let mut v = DeformationVector::zeros(t.r_inf);
    for r in 1..=2 * rr - 2 * k - 4 {
        v.alpha[(r - 1) as usize] = t.t(r + 2 * k + 2).scale(0.5 * r as f64);
    }
    Ok(v)
}

/// α^{τ_k}, the image of ∂_{τ_k} in irregular-time coordinates.
pub fn tau_tangent_vector<S: Field>(k: i64, rt: &ReducedTimes<S>) -> Result<DeformationVector<S>> {
    let r = rt.r_inf as i64;
    check_index("k", k, 1, r - 3)?;
    let mut v = DeformationVector::zeros(rt.r_inf);
    for i in 1..=r - k - 2 {
        let e = r - i - k - 2;
        let coef = 2.0 * odd_product(r, k + 1, r - i - 2) / (2f64.powi(e as i32) * factorial(e));
        let val = rt.t1.powi(e as i32) * rt.t2.powc(c((2 * i - 1) as f64 / 2.0)).scale(coef);
        v.alpha[(2 * i - 2) as usize] = val;
    }
    Ok(v)
}

/// P̃₁(λ) = −Σ_{j=0..r∞−2} t_{∞,2j+2} λ^j
pub fn p1_poly<S: Field>(t: &IrregularTimes<S>) -> Poly<S> {
    Poly::new((0..=t.r_inf as i64 - 2).map(|j| -t.t(2 * j + 2)).collect())
}

/// P̃₂(λ) from the quadratic combinations of irregular times.
pub fn p2_poly<S: Field>(t: &IrregularTimes<S>) -> Poly<S> {
    let r = t.r_inf as i64;
    let mut v = vec![S::zero(); (2 * r - 3) as usize];
    for k in r - 2..=2 * r - 4 {
        let mut s = S::zero();
        for j in (2 * k - 2 * r + 6)..=(2 * r - 2) {
            s += (t.t(j) * t.t(2 * k - j + 4)).scale(sgn(j));
        }
        v[k as usize] = s.scale(0.25);
    }
    let k = r - 3;
    let mut s = S::zero();
    for j in 1..=2 * r - 3 {
        s += (t.t(j) * t.t(2 * r - j - 2)).scale(sgn(j));
    }
    v[k as usize] = s.scale(0.25);
    Poly::new(v)
}

/// P̃₂ written directly in the isomonodromic times; requires canonical trivial times.
pub fn p2_poly_reduced<S: Field>(rt: &ReducedTimes<S>) -> Result<Poly<S>> {
    rt.require_canonical()?;
    let r = rt.r_inf as i64;
    let tau = |i: i64| -> S {
        if i < 1 || i > r - 3 {
            S::zero()
        } else {
            rt.tau[(i - 1) as usize]
        }
    };
    if r == 3 {
        return Ok(Poly::new(vec![S::zero(), -S::one()]));
    }
    let mut v = vec![S::zero(); (2 * r - 4) as usize];
    v[(2 * r - 5) as usize] = -S::one();
    for k in r - 2..=2 * r - 7 {
        let mut s = tau(2 * r - k - 6).scale(2.0);
        for m in (k - r + 6)..=(r - 3) {
            s += tau(r - m - 2) * tau(r - k + m - 5);
        }
        v[k as usize] = -s;
    }
    let mut s = tau(r - 3).scale(2.0);
    for m in 3..=r - 3 {
        s += tau(r - m - 2) * tau(m - 2);
    }
    v[(r - 3) as usize] = -s;
    Ok(Poly::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn cc(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn canonical_reduces_to_tau() {
        let tau = vec![cc(0.3, 0.1), cc(-0.7, 0.2), cc(1.1, -0.4)];
        let t = IrregularTimes::canonical(&tau, cc(1.0, 0.0)).unwrap();
        let rt = reduced_from_irregular(&t).unwrap();
        assert!((rt.t2 - cc(1.0, 0.0)).norm() < 1e-15 && rt.t1.norm() < 1e-15);
        for k in 0..3 {
            assert!((rt.tau[k] - tau[k]).norm() < 1e-14);
        }
        let back = irregular_from_reduced(&rt).unwrap();
        for k in 0..t.t.len() {
            assert!((back.t[k] - t.t[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn genus_zero_has_no_tau() {
        let t = IrregularTimes::canonical(&[], cc(1.0, 0.0)).unwrap();
        let rt = reduced_from_irregular(&t).unwrap();
        assert!(rt.tau.is_empty());
        assert_eq!(irregular_from_reduced(&rt).unwrap().t.len(), 4);
    }

    #[test]
    fn tangent_vector_canonical() {
        let rt = ReducedTimes::canonical(&[cc(0.5, 0.0)], cc(1.0, 0.0)).unwrap();
        let a = tau_tangent_vector(1, &rt).unwrap();
        assert_eq!(a.alpha, vec![cc(2.0, 0.0), C::default(), C::default(), C::default(), C::default(), C::default()]);
    }

    #[test]
    fn p2_small_genus() {
        let t0 = IrregularTimes::canonical(&[], cc(1.0, 0.0)).unwrap();
        assert_eq!(p2_poly(&t0), Poly::new(vec![cc(0.0, 0.0), cc(-1.0, 0.0)]));
        let tau = cc(0.4, -0.3);
        let t1 = IrregularTimes::canonical(&[tau], cc(1.0, 0.0)).unwrap();
        let p = p2_poly(&t1);
        let expect = Poly::new(vec![C::default(), -2.0 * tau, C::default(), cc(-1.0, 0.0)]);
        assert!(crate::algebra::max_coeff_diff(&p, &expect) < 1e-15);
    }

    #[test]
    fn u_vector_bounds() {
        let t = IrregularTimes::new(4, (1..=6).map(|k| cc(k as f64, 0.0)).collect(), cc(1.0, 0.0)).unwrap();
        let u = trivial_vector_u(1, &t).unwrap();
        assert_eq!(u.alpha[0], cc(0.5 * 5.0, 0.0));
        assert_eq!(u.alpha[1], cc(6.0, 0.0));
        assert!(u.alpha[2..].iter().all(|x| x.norm() == 0.0));
        assert!(trivial_vector_u(2, &t).is_err());
        assert!(trivial_vector_w(0, &t).is_err());
    }
}
