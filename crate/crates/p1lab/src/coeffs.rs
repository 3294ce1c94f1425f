//! Coefficients of the auxiliary matrix: ν and c from the Toeplitz system, μ and the
//! isospectral Hamiltonians from Vandermonde systems, and their closed forms.

use crate::algebra::linalg::{forward_substitution, guard_condition, lu_solve};
use crate::algebra::{check_separation, Field};
use crate::error::{check_index, P1Error, Result};
use crate::symfun::{elem_deleted, elem_from_roots, multinomial, sgn, vandermonde_weight};
use crate::times::{p1_poly, p2_poly, DeformationVector, IrregularTimes, ReducedTimes};

/// ν, μ and c for one deformation at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationCoeffs<S> {
    /// ν_{∞,−1..r∞−2}
    pub nu: Vec<S>,
    /// μ_1..μ_g
    pub mu: Vec<S>,
    /// c_{∞,1..r∞−1}
    pub c: Vec<S>,
    /// c_{∞,0}; undetermined by the compatibility equations, fixed to zero.
    pub c0: S,
}

impl<S: Field> DeformationCoeffs<S> {
    pub fn compute(alpha: &DeformationVector<S>, t: &IrregularTimes<S>, q: &[S]) -> Result<Self> {
        check_genus(t, q)?;
        let mut nu = solve_nu(alpha, t)?;
        let g = q.len();
        let mu = if g == 0 { Vec::new() } else { solve_mu(&nu[2..2 + g], q)? };
        let top = if g == 0 { S::zero() } else { extend_nu(&nu[2..2 + g], q, 1)[0] };
        nu.push(top);
        let c = solve_c(alpha, t)?;
        Ok(DeformationCoeffs { nu, mu, c, c0: S::zero() })
    }

    /// ν_{∞,k}, zero outside −1..r∞−2.
    pub fn nu(&self, k: i64) -> S {
        if k < -1 || (k + 1) as usize >= self.nu.len() {
            S::zero()
        } else {
            self.nu[(k + 1) as usize]
        }
    }

    /// c_{∞,k}, with c_{∞,0} = `c0`.
    pub fn c(&self, k: i64) -> S {
        if k == 0 {
            self.c0
        } else if k < 1 || k as usize > self.c.len() {
            S::zero()
        } else {
            self.c[k as usize - 1]
        }
    }

    /// ρ_j = −μ_j p_j.
    pub fn rho(&self, p: &[S]) -> Vec<S> {
        self.mu.iter().zip(p).map(|(&m, &pj)| -m * pj).collect()
    }
}

/// H_{∞,0..r∞−4}.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoHamiltonians<S> {
    pub h: Vec<S>,
}

impl<S: Field> IsoHamiltonians<S> {
    pub fn get(&self, k: i64) -> S {
        if k < 0 || k as usize >= self.h.len() {
            S::zero()
        } else {
            self.h[k as usize]
        }
    }

    /// Σ_k H_{∞,k} x^k
    pub fn eval(&self, x: S) -> S {
        self.h.iter().rev().fold(S::zero(), |acc, &c| acc * x + c)
    }

    /// Σ_k k H_{∞,k} x^{k−1}
    pub fn eval_diff(&self, x: S) -> S {
        let mut acc = S::zero();
        for k in (1..self.h.len()).rev() {
            acc = acc * x + self.h[k].scale(k as f64);
        }
        acc
    }
}

fn check_genus<S: Field>(t: &IrregularTimes<S>, q: &[S]) -> Result<()> {
    if q.len() != t.genus() {
        return Err(P1Error::WrongGenus { expected: t.genus(), got: q.len() });
    }
    Ok(())
}

fn check_leading<S: Field>(t: &IrregularTimes<S>) -> Result<()> {
    if t.t(2 * t.r_inf as i64 - 3).value().norm() == 0.0 {
        return Err(P1Error::DegenerateTimes("t_{inf,2r-3} vanishes, M is singular".into()));
    }
    Ok(())
}

/// Lower-triangular Toeplitz matrix with first column t_{∞,2r∞−3}, t_{∞,2r∞−5}, …, t_{∞,1}.
pub fn toeplitz_m<S: Field>(t: &IrregularTimes<S>) -> Result<Vec<Vec<S>>> {
    check_leading(t)?;
    let r = t.r_inf as i64;
    let n = (r - 1) as usize;
    let mut m = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            m[i][j] = t.t(2 * r - 3 - 2 * (i - j) as i64);
        }
    }
    Ok(m)
}

/// ν_{∞,−1..r∞−3}.
pub fn solve_nu<S: Field>(alpha: &DeformationVector<S>, t: &IrregularTimes<S>) -> Result<Vec<S>> {
    let m = toeplitz_m(t)?;
    let r = t.r_inf as i64;
    let rhs: Vec<S> = (0..r - 1)
        .map(|i| {
            let k = 2 * r - 3 - 2 * i;
            alpha.a(k).scale(2.0 / k as f64)
        })
        .collect();
    Ok(forward_substitution(&m, &rhs))
}

/// ν_{∞,g+1..g+mmax} from ν_{∞,1..g} and the roots `q`.
pub fn extend_nu<S: Field>(nu: &[S], q: &[S], mmax: usize) -> Vec<S> {
    let g = q.len();
    let e = elem_from_roots(q);
    // all[k-1] = ν_{∞,k}
    let mut all: Vec<S> = nu[..g].to_vec();
    for m in 1..=mmax {
        let mut s = S::zero();
        for k in m..g + m {
            s += (all[k - 1] * e.e((g + m - k) as i64)).scale(sgn((g + m - 1 - k) as i64));
        }
        all.push(s);
    }
    all.split_off(g)
}

fn vandermonde<S: Field>(q: &[S]) -> Vec<Vec<S>> {
    let g = q.len();
    (0..g).map(|i| q.iter().map(|&x| x.powi(i as i32)).collect()).collect()
}

/// μ_1..μ_g from `V μ = (ν_{∞,1}, …, ν_{∞,g})`, with V the Vandermonde matrix of rows q^0..q^{g−1}.
pub fn solve_mu<S: Field>(nu: &[S], q: &[S]) -> Result<Vec<S>> {
    let g = q.len();
    if g == 0 {
        return Err(P1Error::InvalidInput("no apparent singularities at genus 0".into()));
    }
    check_separation(q)?;
    let v = vandermonde(q);
    guard_condition(&v)?;
    lu_solve(v, nu[..g].to_vec())
}

/// μ_i^{(α^{τ_k})} at canonical trivial times, through the inverse Vandermonde and
/// inverse Toeplitz matrices. `k` and `i` are 1-based.
pub fn mu_closed_form<S: Field>(k: usize, i: usize, rt: &ReducedTimes<S>, q: &[S]) -> Result<S> {
    rt.require_canonical()?;
    let g = rt.genus();
    if q.len() != g {
        return Err(P1Error::WrongGenus { expected: g, got: q.len() });
    }
    check_index("k", k as i64, 1, g as i64)?;
    check_index("i", i as i64, 1, g as i64)?;
    check_separation(q)?;
    let r = rt.r_inf as i64;
    let b = elem_from_roots(q);
    let qi = q[i - 1];
    let mut acc = elem_deleted(&b, qi, k).scale(sgn((g - k) as i64));
    for s in k + 2..=g {
        acc += elem_deleted(&b, qi, s).scale(sgn((g - s) as i64)) * f_poly(s - k - 1, &rt.tau);
    }
    let pref = 2.0 / (2 * r - 2 * k as i64 - 5) as f64;
    Ok(acc.scale(pref) / vandermonde_weight(q, i - 1))
}

/// c_{∞,1..r∞−1}.
pub fn solve_c<S: Field>(alpha: &DeformationVector<S>, t: &IrregularTimes<S>) -> Result<Vec<S>> {
    let m = toeplitz_m(t)?;
    let r = t.r_inf as i64;
    // row for c_k, k = r−1 down to 1
    let rhs: Vec<S> = (1..r)
        .rev()
        .map(|k| {
            let mut s = S::zero();
            for m in k..r {
                let odd = 2 * k + 2 * r - 2 * m - 3;
                let even = odd + 1;
                s += alpha.a(odd).scale(1.0 / odd as f64) * t.t(2 * m);
                s -= alpha.a(even).scale(1.0 / even as f64) * t.t(2 * m - 1);
            }
            s
        })
        .collect();
    let mut c = forward_substitution(&m, &rhs);
    c.reverse();
    Ok(c)
}

/// `p_j² − P̃₁(q_j)p_j + P̃₂(q_j) + ħ Σ_{i≠j} (p_i − p_j)/(q_j − q_i)`
pub fn hamiltonian_rhs<S: Field>(t: &IrregularTimes<S>, q: &[S], p: &[S], hbar: S) -> Vec<S> {
    let p1 = p1_poly(t);
    let p2 = p2_poly(t);
    (0..q.len())
        .map(|j| {
            let mut s = p[j] * p[j] - p1.eval(q[j]) * p[j] + p2.eval(q[j]);
            for i in 0..q.len() {
                if i != j {
                    s += hbar * (p[i] - p[j]) / (q[j] - q[i]);
                }
            }
            s
        })
        .collect()
}

fn check_point<S: Field>(t: &IrregularTimes<S>, q: &[S], p: &[S]) -> Result<()> {
    check_genus(t, q)?;
    if p.len() != q.len() {
        return Err(P1Error::WrongGenus { expected: q.len(), got: p.len() });
    }
    if q.is_empty() {
        return Err(P1Error::InvalidInput("no isospectral Hamiltonians at genus 0".into()));
    }
    check_separation(q)
}

/// Isospectral Hamiltonians from `Vᵀ H = rhs`.
pub fn solve_h<S: Field>(t: &IrregularTimes<S>, q: &[S], p: &[S], hbar: S) -> Result<IsoHamiltonians<S>> {
    check_point(t, q, p)?;
    let vt: Vec<Vec<S>> = q.iter().map(|&x| (0..q.len()).map(|k| x.powi(k as i32)).collect()).collect();
    guard_condition(&vt)?;
    let h = lu_solve(vt, hamiltonian_rhs(t, q, p, hbar))?;
    Ok(IsoHamiltonians { h })
}

/// H_{∞,i−1} through the explicit inverse of the Vandermonde matrix.
pub fn h_closed_form<S: Field>(i: usize, t: &IrregularTimes<S>, q: &[S], p: &[S], hbar: S) -> Result<S> {
    check_point(t, q, p)?;
    let g = q.len();
    check_index("i", i as i64, 1, g as i64)?;
    let b = elem_from_roots(q);
    let rhs = hamiltonian_rhs(t, q, p, hbar);
    let mut acc = S::zero();
    for m in 0..g {
        let del = elem_deleted(&b, q[m], i).scale(sgn((g - i) as i64));
        acc += del / vandermonde_weight(q, m) * rhs[m];
    }
    Ok(acc)
}

fn compositions(i: usize, j: usize, left: usize, b: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if j > i {
        if left == 0 {
            out.push(b.clone());
        }
        return;
    }
    let mut c = 0;
    while c * (j + 1) <= left {
        b[j - 1] = c;
        compositions(i, j + 1, left - c * (j + 1), b, out);
        c += 1;
    }
    b[j - 1] = 0;
}

/// F_i(τ_1..τ_i): sum over (b_1..b_i) with Σ(j+1)b_j = i+1. F_0 = 0.
pub fn f_poly<S: Field>(i: usize, tau: &[S]) -> S {
    if i == 0 {
        return S::zero();
    }
    let mut sols = Vec::new();
    compositions(i, 1, i + 1, &mut vec![0; i], &mut sols);
    let tau_at = |j: usize| if j <= tau.len() { tau[j - 1] } else { S::zero() };
    let mut acc = S::zero();
    for b in sols {
        let total: usize = b.iter().sum();
        let mut term = S::from_f64(multinomial(&b) * sgn(total as i64));
        for (j, &bj) in b.iter().enumerate() {
            if bj > 0 {
                term *= tau_at(j + 1).powi(bj as i32);
            }
        }
        acc += term;
    }
    acc
}

/// ν_{∞,k}^{(α^{τ_j})} at canonical trivial times, 1 ≤ j, k ≤ g.
pub fn nu_reduced<S: Field>(j: usize, k: usize, rt: &ReducedTimes<S>) -> Result<S> {
    rt.require_canonical()?;
    let g = rt.genus() as i64;
    check_index("j", j as i64, 1, g)?;
    check_index("k", k as i64, 1, g)?;
    let pref = 2.0 / (2 * rt.r_inf as i64 - 2 * j as i64 - 5) as f64;
    let v = if k == j {
        S::one()
    } else if k >= j + 2 {
        f_poly(k - j - 1, &rt.tau)
    } else {
        S::zero()
    };
    Ok(v.scale(pref))
}
