//! Hamiltonians (Darboux, symmetric and canonical-reduced forms), the evolution
//! vector fields and the coordinate changes between Darboux, shifted and symmetric
//! coordinates.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::linalg::{guard_condition, lu_solve};
use crate::algebra::{check_separation, Dual, Field};
use crate::coeffs::{mu_closed_form, nu_reduced, DeformationCoeffs};
use crate::error::{check_index, P1Error, Result};
use crate::lax::{isospectral, isospectral_symmetric, DarbouxPoint, SymCoeffs, SymmetricPoint};
use crate::symfun::{darboux_momenta, elem_from_roots, elem_partial, homog_from_elem, power_sums, sgn, SymBasis};
use crate::times::{
    irregular_from_reduced, p1_poly, p2_poly, p2_poly_reduced, DeformationVector, IrregularTimes, ReducedTimes,
};

/// A Hamiltonian value split into its three contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianValue<S> {
    pub value: S,
    /// Σ_k ν_{∞,k+1} H_{∞,k}
    pub h_part: S,
    /// −ħ Σ_k c_{∞,k} S_k(q)
    pub c_part: S,
    /// −ħν_{∞,0} Σ p_j − ħν_{∞,−1} Σ q_j p_j
    pub nu_part: S,
}

impl<S: Field> HamiltonianValue<S> {
    fn from_parts(h_part: S, c_part: S, nu_part: S) -> Self {
        HamiltonianValue { value: h_part + c_part + nu_part, h_part, c_part, nu_part }
    }
}

/// L_α[q_j] and L_α[p_j].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDerivatives<S> {
    pub dq: Vec<S>,
    pub dp: Vec<S>,
}

fn check_pt<S: Field>(t: &IrregularTimes<S>, g: usize) -> Result<()> {
    if t.genus() != g {
        return Err(P1Error::WrongGenus { expected: t.genus(), got: g });
    }
    Ok(())
}

fn check_reduced<S: Field>(rt: &ReducedTimes<S>, g: usize) -> Result<()> {
    rt.require_canonical()?;
    if rt.genus() != g {
        return Err(P1Error::WrongGenus { expected: rt.genus(), got: g });
    }
    Ok(())
}

/// Ham^{(α)} = Σ ν_{∞,k+1}H_{∞,k} − ħΣ_jΣ_k c_{∞,k}q_j^k − ħν_{∞,0}Σp_j − ħν_{∞,−1}Σq_jp_j.
pub fn general_hamiltonian<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Result<HamiltonianValue<S>> {
    check_pt(t, pt.genus())?;
    let co = DeformationCoeffs::compute(alpha, t, &pt.q)?;
    let h = isospectral(t, pt)?;
    let g = pt.genus() as i64;
    let r = t.r_inf as i64;
    let hbar = t.hbar;
    let mut h_part = S::zero();
    for k in 0..g {
        h_part += co.nu(k + 1) * h.get(k);
    }
    let mut c_part = S::zero();
    for &q in &pt.q {
        for k in 1..r {
            c_part -= hbar * co.c(k) * q.powi(k as i32);
        }
    }
    let mut nu_part = S::zero();
    for (&q, &p) in pt.q.iter().zip(&pt.p) {
        nu_part -= hbar * (co.nu(0) * p + co.nu(-1) * q * p);
    }
    Ok(HamiltonianValue::from_parts(h_part, c_part, nu_part))
}

/// The same Hamiltonian through μ:
/// −(ħ/2)Σ_{i≠j}(μ_i+μ_j)(p_i−p_j)/(q_i−q_j) − ħΣ(ν₀p_j + ν₋₁q_jp_j)
/// + Σμ_j(p_j² − P̃₁(q_j)p_j + P̃₂(q_j)) − ħΣ_jΣ_k c_k q_j^k.
pub fn general_hamiltonian_mu_form<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Result<S> {
    check_pt(t, pt.genus())?;
    let co = DeformationCoeffs::compute(alpha, t, &pt.q)?;
    let (q, p, mu) = (&pt.q, &pt.p, &co.mu);
    let (p1, p2) = (p1_poly(t), p2_poly(t));
    let hbar = t.hbar;
    let r = t.r_inf as i64;
    let mut acc = S::zero();
    for i in 0..q.len() {
        for j in 0..q.len() {
            if i != j {
                acc -= (hbar * (mu[i] + mu[j]) * (p[i] - p[j]) / (q[i] - q[j])).scale(0.5);
            }
        }
        acc -= hbar * (co.nu(0) * p[i] + co.nu(-1) * q[i] * p[i]);
        acc += mu[i] * (p[i] * p[i] - p1.eval(q[i]) * p[i] + p2.eval(q[i]));
        for k in 1..r {
            acc -= hbar * co.c(k) * q[i].powi(k as i32);
        }
    }
    Ok(acc)
}

/// L_α[q_j], L_α[p_j] at general times.
pub fn evolution_general<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    pt: &DarbouxPoint<S>,
) -> Result<FlowDerivatives<S>> {
    check_pt(t, pt.genus())?;
    let co = DeformationCoeffs::compute(alpha, t, &pt.q)?;
    let h = isospectral(t, pt)?;
    let (p1, p2) = (p1_poly(t), p2_poly(t));
    let (d1, d2) = (p1.diff(), p2.diff());
    let hbar = t.hbar;
    let r = t.r_inf as i64;
    let (q, p, mu) = (&pt.q, &pt.p, &co.mu);
    let g = q.len();
    let mut dq = Vec::with_capacity(g);
    let mut dp = Vec::with_capacity(g);
    for j in 0..g {
        let mut a = (mu[j] * (p[j] - p1.eval(q[j]).scale(0.5))).scale(2.0) - hbar * co.nu(0) - hbar * co.nu(-1) * q[j];
        let mut b = mu[j] * (p[j] * d1.eval(q[j]) - d2.eval(q[j]) + h.eval_diff(q[j])) + hbar * co.nu(-1) * p[j];
        for k in 1..r {
            b += (hbar * co.c(k) * q[j].powi(k as i32 - 1)).scale(k as f64);
        }
        for i in 0..g {
            if i != j {
                let d = q[j] - q[i];
                a -= hbar * (mu[j] + mu[i]) / d;
                b += hbar * (mu[i] + mu[j]) * (p[i] - p[j]) / (d * d);
            }
        }
        dq.push(a);
        dp.push(b);
    }
    Ok(FlowDerivatives { dq, dp })
}

/// ħ∂_{τ_k} of the shifted coordinates at canonical trivial times, with μ from its
/// closed form. `k` is 1-based; `pt` holds (q̌, p̌).
pub fn evolution_reduced<S: Field>(k: usize, rt: &ReducedTimes<S>, pt: &DarbouxPoint<S>) -> Result<FlowDerivatives<S>> {
    check_reduced(rt, pt.genus())?;
    let g = pt.genus();
    check_index("k", k as i64, 1, g as i64)?;
    let t = irregular_from_reduced(rt)?;
    let h = isospectral(&t, pt)?;
    let d2 = p2_poly_reduced(rt)?.diff();
    let hbar = rt.hbar;
    let (q, p) = (&pt.q, &pt.p);
    let mu = (1..=g).map(|i| mu_closed_form(k, i, rt, q)).collect::<Result<Vec<_>>>()?;
    let mut dq = Vec::with_capacity(g);
    let mut dp = Vec::with_capacity(g);
    for m in 0..g {
        let mut a = (mu[m] * p[m]).scale(2.0);
        let mut b = mu[m] * (h.eval_diff(q[m]) - d2.eval(q[m]));
        for i in 0..g {
            if i != m {
                let d = q[m] - q[i];
                a -= hbar * (mu[m] + mu[i]) / d;
                b += hbar * (mu[i] + mu[m]) * (p[i] - p[m]) / (d * d);
            }
        }
        dq.push(a);
        dp.push(b);
    }
    Ok(FlowDerivatives { dq, dp })
}

/// Ham^{(α^{τ_k})} = Σ_k ν^{(α^{τ_k})}_{∞,j+1} H_{∞,j} at canonical trivial times.
pub fn reduced_hamiltonian<S: Field>(k: usize, rt: &ReducedTimes<S>, pt: &DarbouxPoint<S>) -> Result<S> {
    check_reduced(rt, pt.genus())?;
    let g = pt.genus();
    check_index("k", k as i64, 1, g as i64)?;
    let t = irregular_from_reduced(rt)?;
    let h = isospectral(&t, pt)?;
    let mut acc = S::zero();
    for j in 0..g {
        acc += nu_reduced(k, j + 1, rt)? * h.get(j as i64);
    }
    Ok(acc)
}

/// Σ_j p_j and Σ_j q_j p_j in symmetric coordinates.
fn momentum_sums<S: Field>(spt: &SymmetricPoint<S>) -> (S, S) {
    let g = spt.genus() as i64;
    let mut sp = S::zero();
    let mut sqp = S::zero();
    for k in 0..g {
        sp += (spt.qk(k) * spt.pk(k + 1)).scale((g - k) as f64);
    }
    for k in 1..=g {
        sqp += (spt.qk(k) * spt.pk(k)).scale(k as f64);
    }
    (sp, sqp)
}

/// Ham^{(α)} in (Q, P): the isospectral Hamiltonians from exact division, and the
/// momentum and power sums written in Q, P. No root finding.
pub fn symmetric_hamiltonian<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    spt: &SymmetricPoint<S>,
) -> Result<HamiltonianValue<S>> {
    check_pt(t, spt.genus())?;
    let co = SymCoeffs::new(alpha, t, spt)?;
    let h = isospectral_symmetric(t, spt)?;
    let g = spt.genus() as i64;
    let r = t.r_inf as i64;
    let hbar = t.hbar;
    let s = power_sums(&SymBasis::from_elementary(&spt.q_sym), (r - 1) as usize);
    let mut h_part = S::zero();
    for k in 0..g {
        h_part += co.nu(k + 1) * h.get(k);
    }
    let mut c_part = S::zero();
    for k in 1..r {
        c_part -= hbar * co.c(k) * s[k as usize];
    }
    let (sp, sqp) = momentum_sums(spt);
    let nu_part = -(hbar * (co.nu(0) * sp + co.nu(-1) * sqp));
    Ok(HamiltonianValue::from_parts(h_part, c_part, nu_part))
}

struct SymTables<S> {
    g: i64,
    h: Vec<S>,
    s: Vec<S>,
}

impl<S: Field> SymTables<S> {
    fn new(spt: &SymmetricPoint<S>, kmax: usize) -> Self {
        let b = SymBasis::from_elementary(&spt.q_sym);
        SymTables { g: spt.genus() as i64, h: homog_from_elem(&b, kmax), s: power_sums(&b, kmax) }
    }
    fn h(&self, k: i64) -> S {
        if k < 0 {
            S::zero()
        } else {
            self.h[k as usize]
        }
    }
    fn s(&self, k: i64) -> S {
        if k < 0 {
            S::zero()
        } else {
            self.s[k as usize]
        }
    }
}

/// The ν_{∞,i}-weighted sums shared by the general and reduced closed forms: the ħ
/// part linear in P, the part quadratic in P and the P̃₂ part.
fn closed_form_core<S: Field>(
    nu: impl Fn(i64) -> S,
    hbar: S,
    p2: &crate::algebra::Poly<S>,
    p2_top: i64,
    spt: &SymmetricPoint<S>,
    tb: &SymTables<S>,
) -> S {
    let g = tb.g;
    let qk = |k: i64| spt.qk(k);
    let pk = |k: i64| spt.pk(k);
    let mut acc = S::zero();
    for i in 1..=g {
        let ni = nu(i);
        let mut lin = S::zero();
        for k in i + 1..=g {
            lin += (pk(k) * qk(k - 1 - i)).scale(sgn(i) * (g - i) as f64);
            for m in i + 1..k {
                lin += (pk(k) * qk(k - 1 - m) * tb.s(m - i)).scale(sgn(m));
            }
        }
        acc -= hbar * ni * lin;

        let mut quad = S::zero();
        for k1 in 1..=g {
            for k2 in 1..=g {
                let mut br = S::zero();
                for r1 in (i - k2).max(0)..=(k1 - 1).min(i - 1) {
                    br += (qk(k1 - 1 - r1) * qk(k2 - i + r1)).scale(sgn(i - 1));
                }
                for r1 in 0..k1 {
                    for r2 in 0..k2 {
                        if r1 + r2 < g {
                            continue;
                        }
                        let mut inner = S::zero();
                        for m in i..=g {
                            inner += (qk(g - m) * tb.h(r1 + r2 + m - i - g + 1)).scale(sgn(g - m));
                        }
                        br += (qk(k1 - 1 - r1) * qk(k2 - 1 - r2) * inner).scale(sgn(r1 + r2));
                    }
                }
                quad += pk(k1) * pk(k2) * br;
            }
        }
        acc += ni * quad;

        let mut pot = S::zero();
        for r in g..=p2_top {
            for m in i..=g {
                pot += (p2.coeff(r as usize) * qk(g - m) * tb.h(r + m - i - g + 1)).scale(sgn(g - m));
            }
        }
        acc += ni * pot;
    }
    acc
}

/// Ham^{(α)} from the closed polynomial expression in (Q, P), general times.
pub fn symmetric_hamiltonian_closed<S: Field>(
    alpha: &DeformationVector<S>,
    t: &IrregularTimes<S>,
    spt: &SymmetricPoint<S>,
) -> Result<S> {
    check_pt(t, spt.genus())?;
    let co = SymCoeffs::new(alpha, t, spt)?;
    let g = spt.genus() as i64;
    let r = t.r_inf as i64;
    let hbar = t.hbar;
    let tb = SymTables::new(spt, (4 * g + 8) as usize);
    let qk = |k: i64| spt.qk(k);
    let pk = |k: i64| spt.pk(k);

    let (sp, sqp) = momentum_sums(spt);
    let mut acc = -(hbar * (co.nu(0) * sp + co.nu(-1) * sqp));
    for k in 1..r {
        acc -= hbar * co.c(k) * tb.s(k);
    }
    acc += closed_form_core(|m| co.nu(m), hbar, &p2_poly(t), 2 * r - 4, spt, &tb);
    // the P̃₁ part
    for i in 1..=g {
        let mut lin = S::zero();
        for k in 1..=g {
            for rr in 0..=(k - 1).min(i - 1) {
                lin += (t.t(2 * i - 2 * rr) * pk(k) * qk(k - 1 - rr)).scale(sgn(rr));
            }
            for rr in 0..k {
                for s in g - rr..=g + 1 {
                    for m in i..=g {
                        lin += (t.t(2 * s + 2) * pk(k) * qk(k - 1 - rr) * qk(g - m) * tb.h(rr + s + m - i - g + 1))
                            .scale(sgn(g + rr - m));
                    }
                }
            }
        }
        acc += co.nu(i) * lin;
    }
    Ok(acc)
}

/// Ham^{(α^{τ_k})} from the closed polynomial expression in (Q, P) at canonical
/// trivial times. `k` is 1-based.
pub fn symmetric_hamiltonian_reduced<S: Field>(k: usize, rt: &ReducedTimes<S>, spt: &SymmetricPoint<S>) -> Result<S> {
    check_reduced(rt, spt.genus())?;
    let g = spt.genus() as i64;
    check_index("k", k as i64, 1, g)?;
    let r = rt.r_inf as i64;
    let nus = (1..=g).map(|m| nu_reduced(k, m as usize, rt)).collect::<Result<Vec<_>>>()?;
    let nu = |m: i64| if (1..=g).contains(&m) { nus[(m - 1) as usize] } else { S::zero() };
    let tb = SymTables::new(spt, (4 * g + 8) as usize);
    Ok(closed_form_core(nu, rt.hbar, &p2_poly_reduced(rt)?, 2 * r - 5, spt, &tb))
}

/// (q, p) → (Q, P): Q_i = e_i(q), P from p_i = Σ_k P_k ∂e_k/∂q_i.
pub fn to_symmetric<S: Field>(pt: &DarbouxPoint<S>) -> Result<SymmetricPoint<S>> {
    let g = pt.genus();
    if g == 0 {
        return SymmetricPoint::new(Vec::new(), Vec::new());
    }
    check_separation(&pt.q)?;
    let b = elem_from_roots(&pt.q);
    let jac: Vec<Vec<S>> = (0..g).map(|i| (1..=g).map(|k| elem_partial(&b, k, pt.q[i])).collect()).collect();
    guard_condition(&jac)?;
    let p_sym = lu_solve(jac, pt.p.clone())?;
    SymmetricPoint::new(b.e[1..].to_vec(), p_sym)
}

/// Roots of λ^g − Q₁λ^{g−1} + … + (−1)^g Q_g, sorted by (re, im).
pub fn roots_from_symmetric(q_sym: &[Complex64]) -> Result<Vec<Complex64>> {
    let g = q_sym.len();
    if g == 0 {
        return Ok(Vec::new());
    }
    // companion matrix of λ^g + a_{g−1}λ^{g−1} + … + a_0, a_{g−k} = (−1)^k Q_k
    let mut m = DMatrix::<Complex64>::zeros(g, g);
    for i in 1..g {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 1..=g {
        m[(g - k, g - 1)] = -q_sym[k - 1] * sgn(k as i64);
    }
    let mut roots: Vec<Complex64> = m
        .try_schur(f64::EPSILON, 0)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| P1Error::InvalidInput("companion eigenvalues did not converge".into()))?
        .iter()
        .copied()
        .collect();
    let poly = SymBasis::from_elementary(q_sym).monic_poly();
    let dpoly = poly.diff();
    for x in roots.iter_mut() {
        for _ in 0..3 {
            let d = dpoly.eval(*x);
            if d.norm() == 0.0 {
                break;
            }
            let step = poly.eval(*x) / d;
            if !step.is_finite() {
                break;
            }
            *x -= step;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// (Q, P) → (q, p). Roots come from the companion matrix on the primal values and
/// are then refined by one Newton step in `S`, which carries any derivative part.
pub fn from_symmetric<S: Field>(spt: &SymmetricPoint<S>) -> Result<DarbouxPoint<S>> {
    let vals: Vec<Complex64> = spt.q_sym.iter().map(|x| x.value()).collect();
    let roots = roots_from_symmetric(&vals)?;
    check_separation(&roots)?;
    let poly = spt.prod_poly();
    let dpoly = poly.diff();
    let q: Vec<S> = roots
        .iter()
        .map(|&x| {
            let x = S::from_c64(x);
            x - poly.eval(x) / dpoly.eval(x)
        })
        .collect();
    let p = darboux_momenta(&q, &spt.p_sym);
    DarbouxPoint::new(q, p)
}

/// q̌ = T₂q + T₁, p̌ = T₂⁻¹(p − ½P̃₁(q)).
pub fn shifted_coordinates<S: Field>(
    pt: &DarbouxPoint<S>,
    rt: &ReducedTimes<S>,
    t: &IrregularTimes<S>,
) -> Result<DarbouxPoint<S>> {
    check_pt(t, pt.genus())?;
    if rt.t2.value().norm() == 0.0 {
        return Err(P1Error::DegenerateTimes("T2 vanishes".into()));
    }
    let p1 = p1_poly(t);
    let q = pt.q.iter().map(|&x| rt.t2 * x + rt.t1).collect();
    let p = pt.q.iter().zip(&pt.p).map(|(&x, &y)| (y - p1.eval(x).scale(0.5)) / rt.t2).collect();
    Ok(DarbouxPoint { q, p })
}

/// ‖MᵀJM − J‖∞ for the Jacobian M of `map` at `x = (q_1..q_g, p_1..p_g)`, assembled
/// column by column with dual numbers.
pub fn symplectic_jacobian_check(
    map: impl Fn(&[Dual]) -> Result<Vec<Dual>>,
    x: &[Complex64],
) -> Result<f64> {
    let n = x.len();
    if n % 2 != 0 {
        return Err(P1Error::InvalidInput("phase-space point must have even length".into()));
    }
    let g = n / 2;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for col in 0..n {
        let seeded: Vec<Dual> =
            x.iter().enumerate().map(|(i, &v)| if i == col { Dual::variable(v) } else { Dual::constant(v) }).collect();
        let out = map(&seeded)?;
        if out.len() != n {
            return Err(P1Error::InvalidInput("map changes the phase-space dimension".into()));
        }
        for (row, y) in out.iter().enumerate() {
            m[row][col] = y.der;
        }
    }
    let j = |a: usize, b: usize| -> f64 {
        if a < g && b == a + g {
            1.0
        } else if a >= g && b + g == a {
            -1.0
        } else {
            0.0
        }
    };
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    let jk = j(k, l);
                    if jk != 0.0 {
                        s += m[k][a] * m[l][b] * jk;
                    }
                }
            }
            worst = worst.max((s - j(a, b)).norm());
        }
    }
    Ok(worst)
}
