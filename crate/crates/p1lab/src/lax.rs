//! Lax matrices in the Darboux gauge (L, A), the polynomial gauges (Ľ, Ǎ and
//! L̃, Ã), the gauge matrices between them, and the classical spectral curve.
//!
//! Darboux-gauge entries are `PoleExpansion`s with poles at the q_j; every
//! gauge-transformed matrix is polynomial and is produced either by explicit
//! residue cancellation (`into_poly`) or by exact polynomial division.

use crate::algebra::{check_separation, Field, Mat2, Poly, PoleExpansion};
use crate::coeffs::{solve_c, solve_h, solve_nu, DeformationCoeffs, IsoHamiltonians};
use crate::error::{P1Error, Result};
use crate::symfun::{homog_from_elem, lagrange_form, q_poly_symmetric, sgn, SymBasis};
use crate::times::{
    irregular_from_reduced, p1_poly, p2_poly, p2_poly_reduced, tau_tangent_vector, DeformationVector,
    IrregularTimes, ReducedTimes,
};

/// Pole parts that must cancel are checked against this relative size.
pub const RESIDUE_TOL: f64 = 1e-9;

/// Apparent singularities q and their dual coordinates p.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxPoint<S> {
    pub q: Vec<S>,
    pub p: Vec<S>,
}

impl<S: Field> DarbouxPoint<S> {
    pub fn new(q: Vec<S>, p: Vec<S>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(P1Error::WrongGenus { expected: q.len(), got: p.len() });
        }
        check_separation(&q)?;
        Ok(DarbouxPoint { q, p })
    }

    pub fn genus(&self) -> usize {
        self.q.len()
    }

    pub fn map<T: Field>(&self, f: impl Fn(S) -> T) -> DarbouxPoint<T> {
        DarbouxPoint { q: self.q.iter().map(|&x| f(x)).collect(), p: self.p.iter().map(|&x| f(x)).collect() }
    }
}

/// Symmetric coordinates: `q_sym[i-1]` = Q_i = e_i(q), `p_sym[i-1]` = P_i.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPoint<S> {
    pub q_sym: Vec<S>,
    pub p_sym: Vec<S>,
}

impl<S: Field> SymmetricPoint<S> {
    pub fn new(q_sym: Vec<S>, p_sym: Vec<S>) -> Result<Self> {
        if q_sym.len() != p_sym.len() {
            return Err(P1Error::WrongGenus { expected: q_sym.len(), got: p_sym.len() });
        }
        Ok(SymmetricPoint { q_sym, p_sym })
    }

    pub fn genus(&self) -> usize {
        self.q_sym.len()
    }

    pub fn map<T: Field>(&self, f: impl Fn(S) -> T) -> SymmetricPoint<T> {
        SymmetricPoint {
            q_sym: self.q_sym.iter().map(|&x| f(x)).collect(),
            p_sym: self.p_sym.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Q_k with Q_0 = 1 and zero outside 0..=g.
    pub fn qk(&self, k: i64) -> S {
        match k {
            0 => S::one(),
            k if k < 0 || k as usize > self.q_sym.len() => S::zero(),
            k => self.q_sym[k as usize - 1],
        }
    }

    /// P_k, zero outside 1..=g.
    pub fn pk(&self, k: i64) -> S {
        if k < 1 || k as usize > self.p_sym.len() {
            S::zero()
        } else {
            self.p_sym[k as usize - 1]
        }
    }

    /// ∏(λ − q_j) = Σ_m (−1)^{g−m} Q_{g−m} λ^m
    pub fn prod_poly(&self) -> Poly<S> {
        SymBasis::from_elementary(&self.q_sym).monic_poly()
    }

    /// Q(λ), the interpolating polynomial with Q(q_i) = −p_i.
    pub fn q_poly(&self) -> Poly<S> {
        q_poly_symmetric(&self.q_sym, &self.p_sym)
    }
}

fn check_point<S: Field>(t: &IrregularTimes<S>, g: usize) -> Result<()> {
    if g != t.genus() {
        return Err(P1Error::WrongGenus { expected: t.genus(), got: g });
    }
    Ok(())
}

fn t_top<S: Field>(t: &IrregularTimes<S>) -> S {
    t.t(2 * t.r_inf as i64 - 2)
}

/// g₀ = ½t_{∞,2r∞−4} + ½t_{∞,2r∞−2} Q₁
pub fn g0<S: Field>(t: &IrregularTimes<S>, q1: S) -> S {
    let r = t.r_inf as i64;
    (t.t(2 * r - 4) + t.t(2 * r - 2) * q1).scale(0.5)
}

/// ½t_{∞,2r∞−2} λ + g₀, the lower-left entry of G₁.
pub fn gamma_poly<S: Field>(t: &IrregularTimes<S>, q1: S) -> Poly<S> {
    Poly::new(vec![g0(t, q1), t_top(t).scale(0.5)])
}

fn sum_q<S: Field>(q: &[S]) -> S {
    q.iter().fold(S::zero(), |a, &x| a + x)
}

/// Isospectral Hamiltonians at the point; empty at genus 0.
pub fn isospectral<S: Field>(t: &IrregularTimes<S>, pt: &DarbouxPoint<S>) -> Result<IsoHamiltonians<S>> {
    check_point(t, pt.genus())?;
    if pt.genus() == 0 {
        return Ok(IsoHamiltonians { h: Vec::new() });
    }
    solve_h(t, &pt.q, &pt.p, t.hbar)
}

/// L(λ) in the Darboux gauge.
pub fn build_l<S: Field>(t: &IrregularTimes<S>, pt: &DarbouxPoint<S>) -> Result<Mat2<PoleExpansion<S>>> {
    let h = isospectral(t, pt)?;
    let hbar = t.hbar;
    let g = pt.genus();
    let l21 = PoleExpansion::with_simple_poles(
        &Poly::new(h.h) - &p2_poly(t),
        &pt.q,
        &pt.p.iter().map(|&p| -hbar * p).collect::<Vec<_>>(),
    )?;
    let l22 = PoleExpansion::with_simple_poles(p1_poly(t), &pt.q, &vec![hbar; g])?;
    Ok(Mat2::new(PoleExpansion::zero(), PoleExpansion::constant(S::one()), l21, l22))
}

/// `Σ_i c_i/(λ − q_i)` with c_i = v_i/∏_{j≠i}(q_i − q_j): partial fractions of V(λ)/∏(λ − q_j)
/// for a polynomial V of degree < g with V(q_i) = v_i.
fn over_prod<S: Field>(q: &[S], v: &[S]) -> Result<PoleExpansion<S>> {
    if q.is_empty() {
        return Ok(PoleExpansion::zero());
    }
    let res: Vec<S> = (0..q.len()).map(|i| v[i] / crate::symfun::vandermonde_weight(q, i)).collect();
    PoleExpansion::with_simple_poles(Poly::zero(), q, &res)
}

/// `1/∏(λ − q_j)` as a pole expansion.
fn inv_prod<S: Field>(q: &[S]) -> Result<PoleExpansion<S>> {
    if q.is_empty() {
        return Ok(PoleExpansion::constant(S::one()));
    }
    over_prod(q, &vec![S::one(); q.len()])
}

/// G₁ = [[1,0],[½t_{∞,2r∞−2}λ + g₀, 1]] and J = [[1,0],[Q/∏(λ−q_j), 1/∏(λ−q_j)]].
pub fn gauge_matrices<S: Field>(
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Result<(Mat2<Poly<S>>, Mat2<PoleExpansion<S>>)> {
    check_point(t, pt.genus())?;
    check_separation(&pt.q)?;
    let one = Poly::constant(S::one());
    let g1 = Mat2::new(one.clone(), Poly::zero(), gamma_poly(t, sum_q(&pt.q)), one);
    let minus_p: Vec<S> = pt.p.iter().map(|&x| -x).collect();
    let j = Mat2::new(
        PoleExpansion::constant(S::one()),
        PoleExpansion::zero(),
        over_prod(&pt.q, &minus_p)?,
        inv_prod(&pt.q)?,
    );
    Ok((g1, j))
}

/// Ľ from L, with every pole part cancelled explicitly.
pub fn build_lcheck<S: Field>(l: &Mat2<PoleExpansion<S>>, pt: &DarbouxPoint<S>, hbar: S) -> Result<Mat2<Poly<S>>> {
    let g = pt.genus();
    let q = if g == 0 { Poly::zero() } else { lagrange_form(&pt.q, &pt.p)? };
    let prod = Poly::from_roots(&pt.q);
    let qe = PoleExpansion::from_poly(q.clone());
    let hbar_poles = PoleExpansion::with_simple_poles(Poly::zero(), &pt.q, &vec![hbar; g])?;
    let l22 = (&(&l.a22 + &qe) - &hbar_poles).into_poly(RESIDUE_TOL, "Lcheck22")?;
    let num = &(&(&PoleExpansion::from_poly(q.diff().scale(hbar)) + &l.a21) - &(&l.a22 * &qe)) - &(&qe * &qe);
    let l21 = (&num * &inv_prod(&pt.q)?).into_poly(RESIDUE_TOL, "Lcheck21")?;
    Ok(Mat2::new(-q, prod, l21, l22))
}

/// Q₁ read off the monic Ľ₁₂ = λ^g − Q₁λ^{g−1} + …
fn q1_of<S: Field>(l12: &Poly<S>) -> S {
    match l12.degree() {
        Some(g) if g >= 1 => -l12.coeff(g - 1),
        _ => S::zero(),
    }
}

/// L̃ from Ľ through the G₁ conjugation.
pub fn build_ltilde<S: Field>(lc: &Mat2<Poly<S>>, t: &IrregularTimes<S>) -> Mat2<Poly<S>> {
    let gm = gamma_poly(t, q1_of(&lc.a12));
    let gg = &gm * &gm;
    let l11 = &lc.a11 - &(&gm * &lc.a12);
    let l21 = &(&(&lc.a21 - &(&gg * &lc.a12)) + &(&gm * &(&lc.a11 - &lc.a22)))
        + &Poly::constant((t.hbar * t_top(t)).scale(0.5));
    let l22 = &lc.a22 + &(&gm * &lc.a12);
    Mat2::new(l11, lc.a12.clone(), l21, l22)
}

/// L̃ through L → Ľ → L̃.
pub fn ltilde_from_darboux<S: Field>(t: &IrregularTimes<S>, pt: &DarbouxPoint<S>) -> Result<Mat2<Poly<S>>> {
    let l = build_l(t, pt)?;
    Ok(build_ltilde(&build_lcheck(&l, pt, t.hbar)?, t))
}

/// A_α(λ) in the Darboux gauge.
pub fn build_a<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Result<Mat2<PoleExpansion<S>>> {
    let l = build_l(t, pt)?;
    let co = DeformationCoeffs::compute(alpha, t, &pt.q)?;
    Ok(a_from_coeffs(&co, &l, t, pt))
}

/// A from its coefficient data and L, second row by the trivial-entry relations.
pub fn a_from_coeffs<S: Field>(
    co: &DeformationCoeffs<S>,
    l: &Mat2<PoleExpansion<S>>,
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Mat2<PoleExpansion<S>> {
    let hbar = t.hbar;
    let r = t.r_inf as i64;
    let a12 = PoleExpansion {
        poly: Poly::new(vec![co.nu(0), co.nu(-1)]),
        poles: pt.q.iter().zip(&co.mu).map(|(&q, &m)| crate::algebra::Pole::simple(q, m)).collect(),
    };
    let a11 = PoleExpansion {
        poly: Poly::new((0..r).map(|i| co.c(i)).collect()),
        poles: pt.q.iter().zip(co.rho(&pt.p)).map(|(&q, rho)| crate::algebra::Pole::simple(q, rho)).collect(),
    };
    let a21 = &a11.diff().scale(hbar) + &(&a12 * &l.a21);
    let a22 = &(&a12.diff().scale(hbar) + &a11) + &(&a12 * &l.a22);
    Mat2::new(a11, a12, a21, a22)
}

/// Ǎ together with the two remainders that carry the evolution of Ľ's first row:
/// `d_l11` = L_α[Ľ₁₁] = −L_α[Q] and `d_prod` = L_α[∏(λ − q_j)].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckA<S> {
    pub a: Mat2<Poly<S>>,
    pub d_l11: Poly<S>,
    pub d_prod: Poly<S>,
}

/// Completes Ǎ from its first row: the (1,1) and (1,2) entries of the compatibility
/// equation fix the second row as exact quotients by Ľ₁₂.
pub fn complete_check_a<S: Field>(a11: Poly<S>, a12: Poly<S>, lc: &Mat2<Poly<S>>, hbar: S) -> CheckA<S> {
    let prod = &lc.a12;
    let n21 = &(&a12 * &lc.a21) + &a11.diff().scale(hbar);
    let (a21, d_l11) = n21.div_rem(prod);
    let n22 = &(&(&a11 * prod) + &(&a12 * &(&lc.a22 - &lc.a11))) + &a12.diff().scale(hbar);
    let (a22, d_prod) = n22.div_rem(prod);
    CheckA { a: Mat2::new(a11, a12, a21, a22), d_l11, d_prod }
}

/// Ǎ from the Darboux-gauge A: first row by J-conjugation with explicit residue
/// cancellation, second row by `complete_check_a`.
pub fn build_acheck<S: Field>(
    a: &Mat2<PoleExpansion<S>>,
    lc: &Mat2<Poly<S>>,
    hbar: S,
) -> Result<CheckA<S>> {
    let q = PoleExpansion::from_poly(-&lc.a11);
    let prod = PoleExpansion::from_poly(lc.a12.clone());
    let a11 = (&a.a11 - &(&a.a12 * &q)).into_poly(RESIDUE_TOL, "Acheck11")?;
    let a12 = (&a.a12 * &prod).into_poly(RESIDUE_TOL, "Acheck12")?;
    Ok(complete_check_a(a11, a12, lc, hbar))
}

/// Ã = G₁ǍG₁⁻¹ + L_α[G₁]G₁⁻¹.
pub fn build_atilde<S: Field>(
    ca: &CheckA<S>,
    lc: &Mat2<Poly<S>>,
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
) -> Mat2<Poly<S>> {
    let r = t.r_inf as i64;
    let hbar = t.hbar;
    let q1 = q1_of(&lc.a12);
    let g = lc.a12.degree().unwrap_or(0);
    let dq1 = if g >= 1 { -ca.d_prod.coeff(g - 1) } else { S::zero() };
    let gm = gamma_poly(t, q1);
    let dgm = Poly::new(vec![
        (hbar * (alpha.a(2 * r - 4) + alpha.a(2 * r - 2) * q1) + t_top(t) * dq1).scale(0.5),
        (hbar * alpha.a(2 * r - 2)).scale(0.5),
    ]);
    let c = &ca.a;
    let a11 = &c.a11 - &(&gm * &c.a12);
    let a21 = &(&(&c.a21 + &(&gm * &(&c.a11 - &c.a22))) - &(&(&gm * &gm) * &c.a12)) + &dgm;
    let a22 = &c.a22 + &(&gm * &c.a12);
    Mat2::new(a11, c.a12.clone(), a21, a22)
}

/// Ã_α through A → Ǎ → Ã at a Darboux point.
pub fn atilde_from_darboux<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Result<Mat2<Poly<S>>> {
    let l = build_l(t, pt)?;
    let lc = build_lcheck(&l, pt, t.hbar)?;
    let co = DeformationCoeffs::compute(alpha, t, &pt.q)?;
    let a = a_from_coeffs(&co, &l, t, pt);
    let ca = build_acheck(&a, &lc, t.hbar)?;
    Ok(build_atilde(&ca, &lc, alpha, t))
}

// ---------------------------------------------------------------------------
// Symmetric coordinates, computed by exact division (no roots needed).

/// Ľ from (Q, P): Ľ₂₁ is the quotient of −P̃₂ − P̃₁Q − Q² by ∏(λ − q_j).
pub fn lcheck_symmetric<S: Field>(t: &IrregularTimes<S>, spt: &SymmetricPoint<S>) -> Result<Mat2<Poly<S>>> {
    check_point(t, spt.genus())?;
    let q = spt.q_poly();
    let prod = spt.prod_poly();
    let p1 = p1_poly(t);
    let num = &(&(-&p2_poly(t)) - &(&p1 * &q)) - &(&q * &q);
    let (l21, _) = num.div_rem(&prod);
    Ok(Mat2::new(-&q, prod, l21, &p1 + &q))
}

/// L̃ from (Q, P) by exact division and the G₁ conjugation.
pub fn ltilde_from_symmetric<S: Field>(t: &IrregularTimes<S>, spt: &SymmetricPoint<S>) -> Result<Mat2<Poly<S>>> {
    Ok(build_ltilde(&lcheck_symmetric(t, spt)?, t))
}

/// Σ_k H_{∞,k} λ^k from (Q, P): the remainder of P̃₂ + P̃₁Q + Q² modulo ∏(λ − q_j),
/// corrected by the ħ terms −ħQ' + ħ Σ_j (Q(λ) − Q(q_j))/(λ − q_j).
pub fn isospectral_symmetric<S: Field>(t: &IrregularTimes<S>, spt: &SymmetricPoint<S>) -> Result<IsoHamiltonians<S>> {
    check_point(t, spt.genus())?;
    let g = spt.genus();
    if g == 0 {
        return Ok(IsoHamiltonians { h: Vec::new() });
    }
    let q = spt.q_poly();
    let prod = spt.prod_poly();
    let num = &(&p2_poly(t) + &(&p1_poly(t) * &q)) + &(&q * &q);
    let (_, rem) = num.div_rem(&prod);
    let s = crate::symfun::power_sums(&SymBasis::from_elementary(&spt.q_sym), g);
    // Σ_j (λ^k − q_j^k)/(λ − q_j) = Σ_{m<k} S_m λ^{k−1−m}
    let mut w = vec![S::zero(); g];
    for k in 1..g {
        let ak = q.coeff(k);
        for m in 0..k {
            w[k - 1 - m] += ak * s[m];
        }
    }
    let hpoly = &(&rem - &q.diff().scale(t.hbar)) + &Poly::new(w).scale(t.hbar);
    Ok(IsoHamiltonians { h: (0..g).map(|k| hpoly.coeff(k)).collect() })
}

/// ν_{∞,−1..g+1} and c_{∞,0..r∞−1} of a deformation, all independent of the roots
/// except ν_{∞,g+1} = Σ_k (−1)^{g−k} ν_{∞,k} Q_{g+1−k}.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCoeffs<S> {
    nu: Vec<S>,
    c: Vec<S>,
}

impl<S: Field> SymCoeffs<S> {
    pub fn new(alpha: &DeformationVector<S>, t: &IrregularTimes<S>, spt: &SymmetricPoint<S>) -> Result<Self> {
        let g = spt.genus() as i64;
        let mut nu = solve_nu(alpha, t)?;
        let mut top = S::zero();
        for k in 1..=g {
            top += (nu[(k + 1) as usize] * spt.qk(g + 1 - k)).scale(sgn(g - k));
        }
        nu.push(top);
        let mut c = vec![S::zero()];
        c.extend(solve_c(alpha, t)?);
        Ok(SymCoeffs { nu, c })
    }

    /// ν_{∞,m}, zero outside −1..g+1.
    pub fn nu(&self, m: i64) -> S {
        if m < -1 || (m + 1) as usize >= self.nu.len() {
            S::zero()
        } else {
            self.nu[(m + 1) as usize]
        }
    }

    /// c_{∞,i} with c_{∞,0} = 0.
    pub fn c(&self, i: i64) -> S {
        if i < 0 || i as usize >= self.c.len() {
            S::zero()
        } else {
            self.c[i as usize]
        }
    }

    /// ν_{∞,−1}λ + ν_{∞,0} + Σ_{k=1..g} ν_{∞,k} λ^{−k}, returned as (polynomial part, ν_{∞,1..g}).
    fn a12_at_infinity(&self, g: usize) -> (Poly<S>, Vec<S>) {
        (Poly::new(vec![self.nu(0), self.nu(-1)]), (1..=g as i64).map(|k| self.nu(k)).collect())
    }
}

/// Polynomial part of (poly + Σ_k tail[k−1] λ^{−k})·f.
fn poly_part_product<S: Field>(poly: &Poly<S>, tail: &[S], f: &Poly<S>) -> Poly<S> {
    let mut out = poly * f;
    for (k, &nk) in tail.iter().enumerate() {
        out = &out + &f.shift_down(k + 1).scale(nk);
    }
    out
}

/// Ǎ_α from (Q, P): Ǎ₁₂ = [A₁₂ ∏(λ−q_j)]₊, Ǎ₁₁ = Σc_iλ^i − [A₁₂ Q]₊ using the
/// expansion of A₁₂ at infinity, then the second row by exact division.
pub fn acheck_symmetric<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    spt: &SymmetricPoint<S>,
) -> Result<(CheckA<S>, Mat2<Poly<S>>)> {
    let lc = lcheck_symmetric(t, spt)?;
    let co = SymCoeffs::new(alpha, t, spt)?;
    let g = spt.genus();
    let r = t.r_inf as i64;
    let (head, tail) = co.a12_at_infinity(g);
    let a12 = poly_part_product(&head, &tail, &lc.a12);
    let cpoly = Poly::new((0..r).map(|i| co.c(i)).collect());
    let a11 = &cpoly - &poly_part_product(&head, &tail, &(-&lc.a11));
    Ok((complete_check_a(a11, a12, &lc, t.hbar), lc))
}

/// Ã_α from (Q, P) without any root finding.
pub fn atilde_from_symmetric<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    spt: &SymmetricPoint<S>,
) -> Result<Mat2<Poly<S>>> {
    let (ca, lc) = acheck_symmetric(alpha, t, spt)?;
    Ok(build_atilde(&ca, &lc, alpha, t))
}

// ---------------------------------------------------------------------------
// Closed-form polynomial entries in symmetric coordinates.

struct SymData<S> {
    g: i64,
    h: Vec<S>,
    b: Vec<S>,
}

impl<S: Field> SymData<S> {
    fn new(spt: &SymmetricPoint<S>) -> Self {
        let g = spt.genus() as i64;
        let basis = SymBasis::from_elementary(&spt.q_sym);
        let h = homog_from_elem(&basis, 4 * spt.genus() + 8);
        // B_j = Σ_{i=j+1..g} P_i Q_{i−j−1}
        let b = (0..g)
            .map(|j| {
                let mut s = S::zero();
                for i in j + 1..=g {
                    s += spt.pk(i) * spt.qk(i - j - 1);
                }
                s
            })
            .collect();
        SymData { g, h, b }
    }

    fn h(&self, k: i64) -> S {
        if k < 0 {
            S::zero()
        } else {
            self.h[k as usize]
        }
    }

    fn b(&self, j: i64) -> S {
        if j < 0 || j >= self.g {
            S::zero()
        } else {
            self.b[j as usize]
        }
    }
}

fn add_at<S: Field>(v: &mut Vec<S>, i: i64, x: S) {
    let i = i as usize;
    if v.len() <= i {
        v.resize(i + 1, S::zero());
    }
    v[i] += x;
}

/// L̃ from the closed-form entries in (Q, P), general times.
///
/// L̃₂₁ is the quotient of −P̃₂ − P̃₁Q − Q² by ∏(λ − q_j), written with h_k(q), plus the
/// gauge terms −G²∏ − G P̃₁ − 2GQ + ½ħt_{∞,2r∞−2}, G = ½t_{∞,2r∞−2}λ + g₀.
pub fn build_ltilde_symmetric<S: Field>(t: &IrregularTimes<S>, spt: &SymmetricPoint<S>) -> Result<Mat2<Poly<S>>> {
    check_point(t, spt.genus())?;
    let d = SymData::new(spt);
    let g = d.g;
    let r = t.r_inf as i64;
    let p2 = p2_poly(t);
    let q = spt.q_poly();
    let prod = spt.prod_poly();
    let gm = gamma_poly(t, spt.qk(1));
    let even = Poly::new((0..=r - 2).map(|k| t.t(2 * k + 2)).collect());

    let mut v = Vec::new();
    for i in 0..=2 * r - 4 - g {
        for j in g + i..=2 * r - 4 {
            add_at(&mut v, i, -(p2.coeff(j as usize) * d.h(j - g - i)));
        }
    }
    for i in 0..=g {
        for j in (i - 1).max(0)..g {
            for s in g + i - j..=g + 1 {
                add_at(&mut v, i, (t.t(2 * s + 2) * d.b(j) * d.h(s + j - i - g)).scale(sgn(j - 1)));
            }
        }
    }
    for i in 0..=g - 2 {
        for j1 in i + 1..g {
            for j2 in g + i - j1..g {
                add_at(&mut v, i, -(d.b(j1) * d.b(j2) * d.h(j1 + j2 - g - i)).scale(sgn(j1 + j2)));
            }
        }
    }
    let lc21 = Poly::new(v);
    let l21 = &(&(&(&lc21 - &(&(&gm * &gm) * &prod)) + &(&gm * &even)) - &(&gm * &q).scale(S::from_f64(2.0)))
        + &Poly::constant((t.hbar * t_top(t)).scale(0.5));
    let l11 = &(-&q) - &(&gm * &prod);
    let l22 = &(&q + &(&gm * &prod)) - &even;
    Ok(Mat2::new(l11, prod, l21, l22))
}

/// L̃ from the closed-form entries at canonical trivial times.
pub fn build_ltilde_symmetric_reduced<S: Field>(rt: &ReducedTimes<S>, spt: &SymmetricPoint<S>) -> Result<Mat2<Poly<S>>> {
    rt.require_canonical()?;
    if spt.genus() != rt.genus() {
        return Err(P1Error::WrongGenus { expected: rt.genus(), got: spt.genus() });
    }
    let d = SymData::new(spt);
    let g = d.g;
    let r = rt.r_inf as i64;
    let p2 = p2_poly_reduced(rt)?;
    let q = spt.q_poly();
    let mut v = Vec::new();
    for i in 0..=r - 2 {
        for j in g + i..=2 * r - 5 {
            add_at(&mut v, i, -(p2.coeff(j as usize) * d.h(j - g - i)));
        }
    }
    for i in 0..=g - 2 {
        for j1 in i + 1..g {
            for j2 in g + i - j1..g {
                add_at(&mut v, i, -(d.b(j1) * d.b(j2) * d.h(j1 + j2 - g - i)).scale(sgn(j1 + j2)));
            }
        }
    }
    Ok(Mat2::new(-&q, spt.prod_poly(), Poly::new(v), q))
}

/// Ã_α from the closed-form entries in (Q, P), general times and any α.
///
/// ν_{∞,m} with m > g+1 are the λ^{−m} coefficients of Ǎ₁₂/∏(λ − q_j). Ã₂₁ carries the
/// gauge term ½t_{∞,2r∞−2}L_α[Q₁] in full, including Σ_j μ_j(2p_j − P̃₁(q_j)).
pub fn build_atilde_symmetric_general<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    spt: &SymmetricPoint<S>,
) -> Result<Mat2<Poly<S>>> {
    check_point(t, spt.genus())?;
    let co = SymCoeffs::new(alpha, t, spt)?;
    let iso = isospectral_symmetric(t, spt)?;
    let d = SymData::new(spt);
    let g = d.g;
    let r = t.r_inf as i64;
    let hbar = t.hbar;
    let tt = t_top(t);
    let q1 = spt.qk(1);
    let g0v = g0(t, q1);
    let gm = gamma_poly(t, q1);
    let p2 = p2_poly(t);
    let nu = |m: i64| co.nu(m);
    let qk = |k: i64| spt.qk(k);

    let mut v11 = Vec::new();
    for i in 0..r {
        add_at(&mut v11, i, co.c(i));
    }
    for i in 0..=g {
        for m in (-1i64).max(-i)..=g - 1 - i {
            add_at(&mut v11, i, -(nu(m) * d.b(i + m)).scale(sgn(i + m - 1)));
        }
    }
    let mut w = Vec::new();
    for i in 0..=g + 1 {
        for m in (-1i64).max(-i)..=g - i {
            add_at(&mut w, i, (qk(g - i - m) * nu(m)).scale(sgn(g - i - m)));
        }
    }
    // the same sum is the (1,2) entry
    let a12 = Poly::new(w);
    // beyond g+1 the ν's are read off Ǎ₁₂/∏(λ−q_j) = Σ_m ν_m λ^{−m} + …
    let nu_ext = |m: i64| {
        if m <= g + 1 {
            return nu(m);
        }
        let mut s = S::zero();
        for (j, &x) in a12.coeffs().iter().enumerate() {
            s += x * d.h(m + j as i64 - g);
        }
        s
    };
    let a11 = &Poly::new(v11) - &(&gm * &a12);

    let mut trace = Vec::new();
    for s in 1..r {
        add_at(&mut trace, s, -alpha.a(2 * s).scale(1.0 / s as f64));
    }
    let mut c0 = co.c(0).scale(2.0) + (hbar * nu(-1)).scale((g + 1) as f64);
    for j in 0..=r - 2 {
        c0 -= t.t(2 * j + 2) * nu(j);
    }
    add_at(&mut trace, 0, c0);
    let a22 = &Poly::new(trace) - &a11;

    let mut v = Vec::new();
    let n1 = nu(-1);
    add_at(&mut v, 1, -(hbar * n1 * tt).scale(0.5));
    add_at(&mut v, 0, -(hbar * n1 * g0v));
    add_at(&mut v, 1, -(hbar * tt * n1).scale(0.5 * g as f64));
    add_at(&mut v, 0, -(hbar * n1 * g0v).scale(g as f64));
    add_at(&mut v, 0, -(hbar * tt * n1 * q1).scale(0.5));
    add_at(&mut v, 0, -(hbar * tt * nu(0)).scale(0.5 * g as f64));
    add_at(&mut v, 1, (hbar * co.c(r - 1)).scale((r - 1) as f64));
    add_at(&mut v, 0, (hbar * co.c(r - 1) * q1).scale((r - 1) as f64));
    add_at(&mut v, 0, (hbar * co.c(r - 2)).scale((r - 2) as f64));
    add_at(&mut v, 0, n1 * iso.get(r - 4));
    add_at(&mut v, 1, (hbar * alpha.a(2 * r - 2)).scale(0.5));
    add_at(&mut v, 0, (hbar * alpha.a(2 * r - 4)).scale(0.5));
    add_at(&mut v, 0, (hbar * alpha.a(2 * r - 2) * q1).scale(0.5));
    // ½t_{∞,2r∞−2} Σ_j μ_j (2p_j − P̃₁(q_j)), as the λ^{−1} coefficient of A₁₂·(−2Q − P̃₁)
    let p1 = p1_poly(t);
    let qp = spt.q_poly();
    let mut res = S::zero();
    for k in 0..=g + 1 {
        res -= (qp.coeff(k as usize).scale(2.0) + p1.coeff(k as usize)) * nu_ext(k + 1);
    }
    add_at(&mut v, 0, (tt * res).scale(0.5));
    for i in 0..=g + 1 {
        for j in (i - 2).max(0)..g {
            for s in (g + i - j - 1).max(0)..=g + 1 {
                for m in -1..=s + j - g - i {
                    add_at(
                        &mut v,
                        i,
                        -(t.t(2 * s + 2) * nu(m) * d.h(s + j - m - g - i) * d.b(j)).scale(sgn(j)),
                    );
                }
            }
        }
    }
    for i in 0..=r {
        for j in g.max(g + i - 1)..=2 * r - 4 {
            for m in -1..=j - g - i {
                add_at(&mut v, i, -(nu_ext(m) * d.h(j - g - m - i) * p2.coeff(j as usize)));
            }
        }
    }
    for i in 0..=g {
        for j1 in 0..g {
            for j2 in 0..g {
                for m in -1..=j1 + j2 - g - i {
                    add_at(
                        &mut v,
                        i,
                        -(nu(m) * d.h(j1 + j2 - g - m - i) * d.b(j1) * d.b(j2)).scale(sgn(j1 + j2)),
                    );
                }
            }
        }
    }
    let mut x = Vec::new();
    for i in 0..r {
        for s in (i - 1).max(0)..=r - 2 {
            add_at(&mut x, i, t.t(2 * s + 2) * nu(s - i));
        }
    }
    let mut y = Vec::new();
    for i in 0..=g {
        for j in (i - 1).max(0)..g {
            add_at(&mut y, i, (nu(j - i) * d.b(j)).scale(sgn(j - 1)));
        }
    }
    let mut z = Vec::new();
    for i in 0..=g + 1 {
        for j in (i - 1).max(0)..=g {
            add_at(&mut z, i, (qk(g - j) * nu(j - i)).scale(sgn(g - j)));
        }
    }
    let a21 = &(&(&Poly::new(v) + &(&gm * &Poly::new(x))) - &(&gm.scale(S::from_f64(2.0)) * &Poly::new(y)))
        - &(&(&gm * &gm) * &Poly::new(z));
    Ok(Mat2::new(a11, a12, a21, a22))
}

/// Ã_{α^{τ_k}} from the closed-form entries at canonical trivial times (`k` is 1-based).
pub fn build_atilde_symmetric<S: Field>(k: usize, rt: &ReducedTimes<S>, spt: &SymmetricPoint<S>) -> Result<Mat2<Poly<S>>> {
    rt.require_canonical()?;
    if spt.genus() != rt.genus() {
        return Err(P1Error::WrongGenus { expected: rt.genus(), got: spt.genus() });
    }
    let alpha = tau_tangent_vector(k as i64, rt)?;
    let t = irregular_from_reduced(rt)?;
    let co = SymCoeffs::new(&alpha, &t, spt)?;
    let d = SymData::new(spt);
    let g = d.g;
    let r = rt.r_inf as i64;
    let p2 = p2_poly_reduced(rt)?;
    let nu = |m: i64| co.nu(m);

    let mut v11 = Vec::new();
    for i in 0..=g - 2 {
        for m in 1..=g - 1 - i {
            add_at(&mut v11, i, -(nu(m) * d.b(i + m)).scale(sgn(i + m - 1)));
        }
    }
    let mut v12 = Vec::new();
    for j in 0..g {
        for m in 1..=g - j {
            add_at(&mut v12, j, (nu(m) * spt.qk(g - j - m)).scale(sgn(g - j - m)));
        }
    }
    let mut v21 = Vec::new();
    for i in 0..=g {
        for j in g.max(g + i - 1)..=2 * r - 5 {
            for m in 1..=j - g - i {
                add_at(&mut v21, i, -(nu(m) * d.h(j - g - m - i) * p2.coeff(j as usize)));
            }
        }
        for j1 in 0..g {
            for j2 in 0..g {
                for m in 1..=j1 + j2 - g - i {
                    add_at(
                        &mut v21,
                        i,
                        -(nu(m) * d.h(j1 + j2 - g - m - i) * d.b(j1) * d.b(j2)).scale(sgn(j1 + j2)),
                    );
                }
            }
        }
    }
    let a11 = Poly::new(v11);
    Ok(Mat2::new(a11.clone(), Poly::new(v12), Poly::new(v21), -a11))
}

// ---------------------------------------------------------------------------

/// (P̃₁, P̂₂) of the classical curve y² − P̃₁(λ)y + P̂₂(λ) = 0, with the isospectral
/// Hamiltonians taken at ħ = 0.
pub fn spectral_curve<S: Field>(t: &IrregularTimes<S>, pt: &DarbouxPoint<S>) -> Result<(Poly<S>, Poly<S>)> {
    check_point(t, pt.genus())?;
    let h = if pt.genus() == 0 { Vec::new() } else { solve_h(t, &pt.q, &pt.p, S::zero())?.h };
    Ok((p1_poly(t), &p2_poly(t) - &Poly::new(h)))
}

/// Per i: L̃₁₂(q_i), L̃₁₁(q_i) − p_i and det(p_i I − L̃(q_i)), flattened.
pub fn on_curve_residual<S: Field>(pt: &DarbouxPoint<S>, lt: &Mat2<Poly<S>>) -> Vec<S> {
    let mut out = Vec::with_capacity(3 * pt.genus());
    for (&q, &p) in pt.q.iter().zip(&pt.p) {
        let m = lt.eval(q);
        out.push(m[0][1]);
        out.push(m[0][0] - p);
        out.push((p - m[0][0]) * (p - m[1][1]) - m[0][1] * m[1][0]);
    }
    out
}
