//! Elementary, complete homogeneous and power-sum symmetric functions.
//!
//! Index conventions: `e[k]` is e_k with `e[0] = 1`; `h[k]` and `s[k]` likewise
//! start at k = 0. Variables and the symmetric coordinates `Q`, `P` are passed as
//! 0-based slices, so `Q_i` is `q_sym[i - 1]`.

use crate::algebra::{check_separation, Field, Poly};
use crate::error::Result;

/// e₀..e_n of n variables. Entries with k > n are zero by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBasis<S> {
    pub n: usize,
    pub e: Vec<S>,
}

impl<S: Field> SymBasis<S> {
    /// From `Q_1..Q_n` seen as e_1..e_n.
    pub fn from_elementary(q_sym: &[S]) -> Self {
        let mut e = Vec::with_capacity(q_sym.len() + 1);
        e.push(S::one());
        e.extend_from_slice(q_sym);
        SymBasis { n: q_sym.len(), e }
    }

    pub fn e(&self, k: i64) -> S {
        if k < 0 || k as usize > self.n {
            S::zero()
        } else {
            self.e[k as usize]
        }
    }

    /// `Σ_k (−1)^k e_k λ^{n−k}` = ∏(λ − x_j).
    pub fn monic_poly(&self) -> Poly<S> {
        let n = self.n;
        Poly::new((0..=n).map(|m| self.e[n - m].scale(sgn((n - m) as i64))).collect())
    }
}

pub(crate) fn sgn(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn elem_from_roots<S: Field>(x: &[S]) -> SymBasis<S> {
    let mut e = vec![S::zero(); x.len() + 1];
    e[0] = S::one();
    for (k, &xi) in x.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let t = e[j - 1] * xi;
            e[j] += t;
        }
    }
    SymBasis { n: x.len(), e }
}

/// h₀..h_{kmax} through Σ_{i=0..min(k,n)} (−1)^i e_i h_{k−i} = 0.
pub fn homog_from_elem<S: Field>(b: &SymBasis<S>, kmax: usize) -> Vec<S> {
    let mut h = vec![S::zero(); kmax + 1];
    h[0] = S::one();
    for k in 1..=kmax {
        let mut s = S::zero();
        for i in 1..=k.min(b.n) {
            s += (b.e[i] * h[k - i]).scale(sgn(i as i64 + 1));
        }
        h[k] = s;
    }
    h
}

/// h_k as the signed sum over compositions b₁+…+b_j = k.
pub fn homog_composition_sum<S: Field>(b: &SymBasis<S>, k: usize) -> S {
    if k == 0 {
        return S::one();
    }
    // f(r) = Σ over compositions of r of ∏ (−(−1)^{b} e_b): each part brings (−1)·(−1)^b e_b.
    let mut f = vec![S::zero(); k + 1];
    f[0] = S::one();
    for r in 1..=k {
        let mut s = S::zero();
        for part in 1..=r {
            s += (b.e(part as i64) * f[r - part]).scale(-sgn(part as i64));
        }
        f[r] = s;
    }
    f[k]
}

/// S₀..S_{kmax} by Newton's recurrences; S₀ = n.
pub fn power_sums<S: Field>(b: &SymBasis<S>, kmax: usize) -> Vec<S> {
    let mut s = vec![S::zero(); kmax + 1];
    s[0] = S::from_f64(b.n as f64);
    for k in 1..=kmax {
        let mut acc = if k <= b.n { b.e[k].scale(k as f64 * sgn(k as i64 - 1)) } else { S::zero() };
        for i in 1..k.min(b.n + 1) {
            acc += (b.e[i] * s[k - i]).scale(sgn(i as i64 - 1));
        }
        s[k] = acc;
    }
    s
}

/// S_m via the multinomial (ordinary Bell) expansion in e₁..e_m.
pub fn bell_power_sums<S: Field>(b: &SymBasis<S>, m: usize) -> S {
    assert!(m >= 1);
    let mut total = S::zero();
    let mut counts = vec![0usize; m + 1];
    bell_rec(b, m, 1, m, &mut counts, &mut total);
    total.scale(sgn(m as i64) * m as f64)
}

fn bell_rec<S: Field>(
    b: &SymBasis<S>,
    m: usize,
    part: usize,
    left: usize,
    counts: &mut Vec<usize>,
    total: &mut S,
) {
    if left == 0 {
        let nparts: usize = counts.iter().sum();
        let mut coef = sgn(nparts as i64) / nparts as f64 * multinomial(&counts[1..]);
        let mut term = S::one();
        for (i, &c) in counts.iter().enumerate().skip(1) {
            if c > 0 {
                term *= b.e(i as i64).powi(c as i32);
            }
        }
        if !coef.is_finite() {
            coef = 0.0;
        }
        *total += term.scale(coef);
        return;
    }
    if part > m {
        return;
    }
    let mut c = 0;
    while c * part <= left {
        counts[part] = c;
        bell_rec(b, m, part + 1, left - c * part, counts, total);
        c += 1;
    }
    counts[part] = 0;
}

/// `(Σ b)! / ∏ b!`
pub fn multinomial(b: &[usize]) -> f64 {
    let mut r = 1.0;
    let mut n = 0usize;
    for &k in b {
        for i in 1..=k {
            n += 1;
            r = r * n as f64 / i as f64;
        }
    }
    r
}

/// e_{n−i} of the variables with `xj` removed.
pub fn elem_deleted<S: Field>(b: &SymBasis<S>, xj: S, i: usize) -> S {
    let n = b.n;
    let mut acc = S::zero();
    let mut pw = S::one();
    for m in i..=n {
        acc += (b.e[n - m] * pw).scale(sgn((m - i) as i64));
        pw *= xj;
    }
    acc
}

/// ∂e_i/∂x_m.
pub fn elem_partial<S: Field>(b: &SymBasis<S>, i: usize, xm: S) -> S {
    let mut acc = S::zero();
    let mut pw = S::one();
    for j in 0..i {
        acc += (b.e(i as i64 - 1 - j as i64) * pw).scale(sgn(j as i64));
        pw *= xm;
    }
    acc
}

/// `Q(λ) = Σ_j (−1)^{j−1} (Σ_{i>j} P_i Q_{i−j−1}) λ^j` from symmetric coordinates only.
pub fn q_poly_symmetric<S: Field>(q_sym: &[S], p_sym: &[S]) -> Poly<S> {
    let g = q_sym.len();
    let b = SymBasis::from_elementary(q_sym);
    let coeffs = (0..g)
        .map(|j| {
            let mut s = S::zero();
            for i in j + 1..=g {
                s += p_sym[i - 1] * b.e((i - j - 1) as i64);
            }
            s.scale(sgn(j as i64 - 1))
        })
        .collect();
    Poly::new(coeffs)
}

/// `p_i = Σ_k P_k ∂e_k/∂q_i`.
pub fn darboux_momenta<S: Field>(q: &[S], p_sym: &[S]) -> Vec<S> {
    let b = elem_from_roots(q);
    q.iter()
        .map(|&qi| {
            let mut s = S::zero();
            for (k, &pk) in p_sym.iter().enumerate() {
                s += pk * elem_partial(&b, k + 1, qi);
            }
            s
        })
        .collect()
}

/// `Q(λ)` from the corollary form, with `q` the roots and `P` the symmetric momenta.
pub fn lagrange_q<S: Field>(q: &[S], p_sym: &[S]) -> Result<Poly<S>> {
    check_separation(q)?;
    let b = elem_from_roots(q);
    Ok(q_poly_symmetric(&b.e[1..], p_sym))
}

/// `−Σ p_i ∏_{j≠i}(λ − q_j)/(q_i − q_j)`.
pub fn lagrange_form<S: Field>(q: &[S], p: &[S]) -> Result<Poly<S>> {
    check_separation(q)?;
    let mut acc = Poly::zero();
    for i in 0..q.len() {
        let others: Vec<S> = q.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        let den = others.iter().fold(S::one(), |a, &x| a * (q[i] - x));
        acc = acc + Poly::from_roots(&others).scale(-p[i] / den);
    }
    Ok(acc)
}

/// `∏_{m≠j}(x_j − x_m)`
pub fn vandermonde_weight<S: Field>(x: &[S], j: usize) -> S {
    x.iter().enumerate().filter(|&(m, _)| m != j).fold(S::one(), |a, (_, &xm)| a * (x[j] - xm))
}

/// `Σ_j (−1)^{n−i} e_{n−i}(x∖x_j) x_j^M / ∏_{m≠j}(x_j − x_m)`.
pub fn vandermonde_power_identity<S: Field>(x: &[S], i: usize, big_m: usize) -> Result<S> {
    check_separation(x)?;
    let n = x.len();
    let b = elem_from_roots(x);
    let mut acc = S::zero();
    for j in 0..n {
        let del = if i == 0 { S::zero() } else { elem_deleted(&b, x[j], i) };
        acc += del.scale(sgn((n - i) as i64)) * x[j].powi(big_m as i32) / vandermonde_weight(x, j);
    }
    Ok(acc)
}

/// Right-hand side `Σ_m (−1)^{n−m} e_{n−m} h_{M+m−i−n+1}` of the same identity.
pub fn vandermonde_power_rhs<S: Field>(x: &[S], i: usize, big_m: usize) -> S {
    let n = x.len() as i64;
    let b = elem_from_roots(x);
    let (i, big_m) = (i as i64, big_m as i64);
    let h = homog_from_elem(&b, (big_m + 2).max(1) as usize);
    let lo = i.max(i + n - 1 - big_m);
    let mut acc = S::zero();
    for m in lo..=n {
        let hk = big_m + m - i - n + 1;
        if hk < 0 {
            continue;
        }
        acc += (b.e(n - m) * h[hk as usize]).scale(sgn(n - m));
    }
    acc
}
