//! Randomized verification battery behind `verify`.
//!
//! Every check draws its samples from its own ChaCha stream (same seed, stream = check
//! index), so results do not depend on `--jobs` or on which groups are selected.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Dual, Field};
use crate::coeffs::{f_poly, h_closed_form, mu_closed_form, nu_reduced, solve_h, DeformationCoeffs};
use crate::error::Result;
use crate::flow::{
    hamiltonian_rates, integrate, painleve1_exact_residual, vector_field, vector_field_darboux,
    verify_flow_commutativity, verify_painleve1, verify_zero_curvature,
};
use crate::ham::{
    evolution_general, from_symmetric, general_hamiltonian, general_hamiltonian_mu_form, shifted_coordinates,
    symmetric_hamiltonian, symmetric_hamiltonian_closed, symplectic_jacobian_check, to_symmetric,
};
use crate::lax::{
    atilde_from_darboux, build_atilde_symmetric_general, build_ltilde_symmetric, ltilde_from_darboux,
    on_curve_residual, DarbouxPoint, SymmetricPoint,
};
use crate::symfun::{
    bell_power_sums, elem_deleted, elem_from_roots, homog_composition_sum, homog_from_elem, power_sums,
    vandermonde_power_identity, vandermonde_power_rhs,
};
use crate::times::{
    irregular_from_reduced, reduced_from_irregular, tau_tangent_vector, trivial_vector_u, trivial_vector_w,
    DeformationVector, IrregularTimes, ReducedTimes,
};

/// Samples drawn per check.
pub const SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Group {
    All,
    Symfun,
    Times,
    Coeffs,
    Lax,
    Ham,
    Flow,
}

impl Group {
    fn name(self) -> &'static str {
        match self {
            Group::All => "all",
            Group::Symfun => "symfun",
            Group::Times => "times",
            Group::Coeffs => "coeffs",
            Group::Lax => "lax",
            Group::Ham => "ham",
            Group::Flow => "flow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub anchor: String,
    /// `None` when the check itself raised an error.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

type CheckFn = fn(&mut ChaCha8Rng, usize) -> Result<f64>;

struct Check {
    name: &'static str,
    anchor: &'static str,
    group: Group,
    min_genus: usize,
    threshold: f64,
    run: CheckFn,
}

const fn check(name: &'static str, anchor: &'static str, group: Group, min_genus: usize, threshold: f64, run: CheckFn) -> Check {
    Check { name, anchor, group, min_genus, threshold, run }
}

const CHECKS: &[Check] = &[
    check("newton_identities", "symfun.power_sums", Group::Symfun, 0, 1e-10, newton_identities),
    check("eh_convolution", "symfun.homog_from_elem", Group::Symfun, 0, 1e-10, eh_convolution),
    check("bell_power_sums", "symfun.bell_power_sums", Group::Symfun, 0, 1e-10, bell),
    check("deleted_elementary", "symfun.elem_deleted", Group::Symfun, 0, 1e-10, deleted),
    check("vandermonde_columns", "symfun.vandermonde_power_identity", Group::Symfun, 0, 1e-10, vandermonde),
    check("time_round_trip", "times.irregular_from_reduced", Group::Times, 0, 1e-11, time_round_trip),
    check("trivial_times_fix_tau", "times.trivial_vector_w", Group::Times, 0, 1e-9, trivial_times),
    check("tau_tangent_duality", "times.tau_tangent_vector", Group::Times, 1, 1e-9, tau_duality),
    check("nu_closed_vs_lu", "coeffs.nu_reduced", Group::Coeffs, 1, 1e-9, nu_closed),
    check("mu_closed_vs_lu", "coeffs.mu_closed_form", Group::Coeffs, 1, 1e-9, mu_closed),
    check("h_closed_vs_lu", "coeffs.h_closed_form", Group::Coeffs, 1, 1e-9, h_closed),
    check("f_poly_series_inverse", "coeffs.f_poly", Group::Coeffs, 1, 1e-9, f_poly_inverse),
    check("reduction_table", "coeffs.DeformationCoeffs", Group::Coeffs, 1, 1e-10, reduction_table),
    check("ltilde_closed_vs_pipeline", "lax.build_ltilde_symmetric", Group::Lax, 0, 1e-9, ltilde_closed),
    check("atilde_closed_vs_pipeline", "lax.build_atilde_symmetric_general", Group::Lax, 1, 1e-9, atilde_closed),
    check("on_spectral_curve", "lax.on_curve_residual", Group::Lax, 1, 1e-9, on_curve),
    check("hamilton_consistency", "ham.evolution_general", Group::Ham, 1, 1e-8, hamilton_consistency),
    check("mu_form", "ham.general_hamiltonian_mu_form", Group::Ham, 1, 1e-10, mu_form),
    check("symmetric_vs_darboux", "ham.symmetric_hamiltonian_closed", Group::Ham, 1, 1e-9, symmetric_vs_darboux),
    check("trivial_invariance", "ham.shifted_coordinates", Group::Ham, 1, 1e-8, trivial_invariance),
    check("symplectic_to_symmetric", "ham.to_symmetric", Group::Ham, 1, 1e-9, symplectic_to_symmetric),
    check("symplectic_shifted", "ham.shifted_coordinates", Group::Ham, 1, 1e-9, symplectic_shifted),
    check("symmetric_round_trip", "ham.from_symmetric", Group::Ham, 1, 1e-9, symmetric_round_trip),
    check("zero_curvature", "flow.verify_zero_curvature", Group::Flow, 1, 1e-8, zero_curvature),
    check("vector_field_routes", "flow.vector_field_darboux", Group::Flow, 1, 1e-9, field_routes),
    check("energy_balance", "flow.hamiltonian_rates", Group::Flow, 1, 1e-7, energy_balance),
    check("flow_commutativity", "flow.verify_flow_commutativity", Group::Flow, 2, 1e-9, commutativity),
    check("painleve1_exact", "flow.painleve1_exact_residual", Group::Flow, 0, 1e-12, painleve1_exact),
    check("painleve1_numeric", "flow.verify_painleve1", Group::Flow, 0, 1e-4, painleve1_numeric),
];

/// Names of all checks, in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Threshold table, defaults overridden by a JSON object `{name: threshold}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(CHECKS.iter().map(|c| (c.name.to_string(), c.threshold)).collect())
    }
}

impl Tolerances {
    pub fn with_overrides(text: &str) -> std::result::Result<Self, String> {
        let map: BTreeMap<String, f64> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut tol = Tolerances::default();
        for (k, v) in map {
            match tol.0.get_mut(&k) {
                Some(slot) => *slot = v,
                None => return Err(format!("unknown check \"{k}\"")),
            }
        }
        Ok(tol)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

/// Runs the selected checks at genus `g`; rows come back in table order whatever `jobs` is.
/// Errors raised inside a check are reported on stderr and mark the row failed.
pub fn run(group: Group, g: usize, seed: u64, jobs: usize, tol: &Tolerances) -> Vec<Row> {
    let selected: Vec<(usize, &Check)> = CHECKS
        .iter()
        .enumerate()
        .filter(|(_, c)| (group == Group::All || c.group == group) && g >= c.min_genus)
        .collect();
    let slots: Mutex<Vec<Option<(Row, Option<String>)>>> = Mutex::new(vec![None; selected.len()]);
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some(&(stream, c)) = selected.get(i) else { break };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        let threshold = tol.get(c.name);
        let (residual, err) = match (c.run)(&mut rng, g) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(format!("{}: {e}", c.name))),
        };
        let pass = residual.is_some_and(|r| r < threshold);
        let row = Row { name: c.name.into(), anchor: c.anchor.into(), residual, threshold, pass };
        slots.lock().expect("battery worker panicked")[i] = Some((row, err));
    };
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(selected.len().max(1)) {
            s.spawn(worker);
        }
    });
    slots
        .into_inner()
        .expect("battery worker panicked")
        .into_iter()
        .map(|slot| {
            let (row, err) = slot.expect("every check ran");
            if let Some(e) = err {
                eprintln!("error in {e}");
            }
            row
        })
        .collect()
}

pub fn report_text(rows: &[Row], group: Group, g: usize, seed: u64) -> String {
    let mut s = format!("# verify {} --g {g} --seed {seed}\n", group.name());
    s.push_str(&format!("{:<28} {:<38} {:>12} {:>10}  {}\n", "name", "anchor", "residual", "threshold", "pass"));
    for r in rows {
        let res = r.residual.map_or_else(|| "error".to_string(), |x| format!("{x:.3e}"));
        s.push_str(&format!(
            "{:<28} {:<38} {:>12} {:>10.1e}  {}\n",
            r.name,
            r.anchor,
            res,
            r.threshold,
            if r.pass { "ok" } else { "FAIL" }
        ));
    }
    s
}

pub fn report_json(rows: &[Row]) -> serde_json::Value {
    serde_json::to_value(rows).expect("rows serialize")
}

// ---------------------------------------------------------------------------
// Samplers.

fn cplx(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn cvec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n).map(|_| cplx(rng)).collect()
}

/// Irregular times of genus g with |t_{2r−3}| ∈ [0.5, 2] near the positive axis.
fn times(rng: &mut ChaCha8Rng, g: usize) -> IrregularTimes<C> {
    let r = g + 3;
    let mut t = cvec(rng, 2 * r - 2);
    t[2 * r - 4] = C::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
    let hbar = C::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5));
    IrregularTimes::new(r, t, hbar).expect("valid genus")
}

fn canonical(rng: &mut ChaCha8Rng, g: usize) -> ReducedTimes<C> {
    let tau = cvec(rng, g);
    let hbar = C::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5));
    ReducedTimes::canonical(&tau, hbar).expect("valid genus")
}

/// g points jittered around the unit circle, pairwise well separated.
fn points(rng: &mut ChaCha8Rng, g: usize) -> Vec<C> {
    let shift = cplx(rng) * 0.3;
    (0..g)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * (i as f64 + rng.gen_range(-0.15..0.15)) / g.max(1) as f64;
            C::from_polar(rng.gen_range(0.8..1.2), th) + shift
        })
        .collect()
}

fn darboux(rng: &mut ChaCha8Rng, g: usize) -> DarbouxPoint<C> {
    let q = points(rng, g);
    let p = cvec(rng, g).into_iter().map(|x| x * 0.8).collect();
    DarbouxPoint::new(q, p).expect("separated points")
}

fn alpha(rng: &mut ChaCha8Rng, r: usize) -> DeformationVector<C> {
    DeformationVector { alpha: cvec(rng, 2 * r - 2) }
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn rel_vec(a: &[C], b: &[C]) -> f64 {
    let scale = b.iter().map(|x| x.norm()).fold(1.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn worst(acc: &mut f64, r: f64) {
    *acc = if r.is_nan() { f64::NAN } else { acc.max(r) };
}

fn seeded_times(t: &IrregularTimes<C>, dir: &DeformationVector<C>) -> IrregularTimes<Dual> {
    let mut d = t.map(Dual::constant);
    for (x, &a) in d.t.iter_mut().zip(&dir.alpha) {
        x.der = a;
    }
    d
}

// ---------------------------------------------------------------------------
// symfun, n = 1..8 independently of g.

fn roots(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    cvec(rng, n)
}

fn newton_identities(rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=8 {
        for _ in 0..SAMPLES {
            let x = roots(rng, n);
            let s = power_sums(&elem_from_roots(&x), 2 * n + 2);
            for (k, &sk) in s.iter().enumerate() {
                let direct: C = x.iter().map(|xi| xi.powi(k as i32)).sum();
                worst(&mut acc, rel(sk, direct));
            }
        }
    }
    Ok(acc)
}

fn eh_convolution(rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=8 {
        for _ in 0..SAMPLES {
            let b = elem_from_roots(&roots(rng, n));
            let h_rec = homog_from_elem(&b, 2 * n);
            let h: Vec<C> = (0..=2 * n).map(|k| homog_composition_sum(&b, k)).collect();
            worst(&mut acc, rel_vec(&h_rec, &h));
            for k in 1..=2 * n {
                let mut sum = C::new(0.0, 0.0);
                let mut scale = 1.0f64;
                for i in 0..=k.min(n) {
                    let term = b.e(i as i64) * h[k - i] * if i % 2 == 0 { 1.0 } else { -1.0 };
                    sum += term;
                    scale = scale.max(term.norm());
                }
                worst(&mut acc, sum.norm() / scale);
            }
        }
    }
    Ok(acc)
}

fn bell(rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=8 {
        for _ in 0..2 {
            let x = roots(rng, n);
            let b = elem_from_roots(&x);
            for m in 1..=n {
                let direct: C = x.iter().map(|xi| xi.powi(m as i32)).sum();
                worst(&mut acc, rel(bell_power_sums(&b, m), direct));
            }
        }
    }
    Ok(acc)
}

fn deleted(rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=8 {
        for _ in 0..SAMPLES {
            let x = roots(rng, n);
            let b = elem_from_roots(&x);
            for j in 0..n {
                let rest: Vec<C> = x.iter().enumerate().filter(|&(m, _)| m != j).map(|(_, &v)| v).collect();
                let e = elem_from_roots(&rest);
                for i in 1..=n {
                    worst(&mut acc, rel(elem_deleted(&b, x[j], i), e.e((n - i) as i64)));
                }
            }
        }
    }
    Ok(acc)
}

fn vandermonde(rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for n in 1..=8 {
        for _ in 0..SAMPLES {
            let x = points(rng, n);
            for i in 1..=n {
                for m in 0..=2 * n {
                    worst(&mut acc, rel(vandermonde_power_identity(&x, i, m)?, vandermonde_power_rhs(&x, i, m)));
                }
            }
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// times

fn time_round_trip(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let back = irregular_from_reduced(&reduced_from_irregular(&t)?)?;
        worst(&mut acc, rel_vec(&back.t, &t.t));
    }
    Ok(acc)
}

fn trivial_times(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let r = t.r_inf as i64;
        let mut dirs = vec![trivial_vector_u(-1, &t)?, trivial_vector_u(0, &t)?];
        for k in 1..r {
            dirs.push(trivial_vector_w(k, &t)?);
        }
        for dir in &dirs {
            let d = reduced_from_irregular(&seeded_times(&t, dir))?;
            for tau in &d.tau {
                worst(&mut acc, tau.der.norm());
            }
        }
    }
    Ok(acc)
}

fn tau_duality(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let rt = reduced_from_irregular(&t)?;
        for k in 1..=g {
            let d = reduced_from_irregular(&seeded_times(&t, &tau_tangent_vector(k as i64, &rt)?))?;
            for (m, tau) in d.tau.iter().enumerate() {
                let want = if m + 1 == k { 1.0 } else { 0.0 };
                worst(&mut acc, (tau.der - want).norm());
            }
            worst(&mut acc, d.t1.der.norm().max(d.t2.der.norm()));
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// coeffs

fn nu_closed(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let rt = canonical(rng, g);
        let t = irregular_from_reduced(&rt)?;
        let q = points(rng, g);
        for j in 1..=g {
            let d = DeformationCoeffs::compute(&tau_tangent_vector(j as i64, &rt)?, &t, &q)?;
            for k in 1..=g {
                worst(&mut acc, rel(nu_reduced(j, k, &rt)?, d.nu(k as i64)));
            }
        }
    }
    Ok(acc)
}

fn mu_closed(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let rt = canonical(rng, g);
        let t = irregular_from_reduced(&rt)?;
        let q = points(rng, g);
        for j in 1..=g {
            let d = DeformationCoeffs::compute(&tau_tangent_vector(j as i64, &rt)?, &t, &q)?;
            for i in 1..=g {
                worst(&mut acc, rel(mu_closed_form(j, i, &rt, &q)?, d.mu[i - 1]));
            }
        }
    }
    Ok(acc)
}

fn h_closed(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let h = solve_h(&t, &pt.q, &pt.p, t.hbar)?;
        for i in 1..=g {
            worst(&mut acc, rel(h_closed_form(i, &t, &pt.q, &pt.p, t.hbar)?, h.h[i - 1]));
        }
    }
    Ok(acc)
}

/// f_i against plain series division of 1/(1 + Σ τ_m x^{m+1}).
fn f_poly_inverse(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let tau = cvec(rng, g);
        let n = g + 1;
        let mut a = vec![C::new(0.0, 0.0); n + 1];
        a[0] = C::new(1.0, 0.0);
        for (m, &x) in tau.iter().enumerate() {
            if m + 2 <= n {
                a[m + 2] = x;
            }
        }
        let mut inv = vec![C::new(0.0, 0.0); n + 1];
        inv[0] = C::new(1.0, 0.0);
        for k in 1..=n {
            inv[k] = -(1..=k).map(|j| a[j] * inv[k - j]).sum::<C>();
        }
        for i in 1..n {
            worst(&mut acc, rel(f_poly(i, &tau), inv[i + 1]));
        }
    }
    Ok(acc)
}

fn reduction_table(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let q = points(rng, g);
        let r = t.r_inf as i64;
        for k in 1..r {
            let d = DeformationCoeffs::compute(&trivial_vector_w(k, &t)?, &t, &q)?;
            for x in d.nu.iter().chain(&d.mu) {
                worst(&mut acc, x.norm());
            }
            for j in 1..r {
                let want = if j == k { -1.0 / (2 * k) as f64 } else { 0.0 };
                worst(&mut acc, (d.c(j) - want).norm());
            }
        }
        for k in -1..=r - 3 {
            let d = DeformationCoeffs::compute(&trivial_vector_u(k, &t)?, &t, &q)?;
            for j in -1..=r - 3 {
                let want = if j == k { 1.0 } else { 0.0 };
                worst(&mut acc, (d.nu(j) - want).norm());
            }
            for x in &d.c {
                worst(&mut acc, x.norm());
            }
            if k <= 0 {
                for x in &d.mu {
                    worst(&mut acc, x.norm());
                }
            }
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// lax

fn scale_of(m: &crate::algebra::Mat2<crate::algebra::Poly<C>>) -> f64 {
    m.norm_inf().max(1.0)
}

fn ltilde_closed(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let want = ltilde_from_darboux(&t, &pt)?;
        let got = build_ltilde_symmetric(&t, &to_symmetric(&pt)?)?;
        worst(&mut acc, got.max_diff(&want) / scale_of(&want));
    }
    Ok(acc)
}

fn atilde_closed(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let a = alpha(rng, t.r_inf);
        let want = atilde_from_darboux(&a, &t, &pt)?;
        let got = build_atilde_symmetric_general(&a, &t, &to_symmetric(&pt)?)?;
        worst(&mut acc, got.max_diff(&want) / scale_of(&want));
    }
    Ok(acc)
}

fn on_curve(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let lt = ltilde_from_darboux(&t, &pt)?;
        for r in on_curve_residual(&pt, &lt) {
            worst(&mut acc, r.norm() / scale_of(&lt));
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// ham

fn hamilton_consistency(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let a = alpha(rng, t.r_inf);
        let ev = evolution_general(&a, &t, &pt)?;
        let ad = DeformationVector { alpha: a.alpha.iter().map(|&x| Dual::constant(x)).collect() };
        let td = t.map(Dual::constant);
        for which in 0..2 * g {
            let seed = |i: usize, v: C| if i == which { Dual::variable(v) } else { Dual::constant(v) };
            let q = pt.q.iter().enumerate().map(|(i, &v)| seed(i, v)).collect();
            let p = pt.p.iter().enumerate().map(|(i, &v)| seed(i + g, v)).collect();
            let d = general_hamiltonian(&ad, &td, &DarbouxPoint { q, p })?.value.der;
            // dq_j = ∂H/∂p_j, dp_j = −∂H/∂q_j
            let r = if which < g { rel(-d, ev.dp[which]) } else { rel(d, ev.dq[which - g]) };
            worst(&mut acc, r);
        }
    }
    Ok(acc)
}

fn mu_form(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let a = alpha(rng, t.r_inf);
        let h = general_hamiltonian(&a, &t, &pt)?;
        worst(&mut acc, rel(general_hamiltonian_mu_form(&a, &t, &pt)?, h.value));
    }
    Ok(acc)
}

fn symmetric_vs_darboux(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let a = alpha(rng, t.r_inf);
        let spt = to_symmetric(&pt)?;
        let want = general_hamiltonian(&a, &t, &pt)?.value;
        worst(&mut acc, rel(symmetric_hamiltonian(&a, &t, &spt)?.value, want));
        worst(&mut acc, rel(symmetric_hamiltonian_closed(&a, &t, &spt)?, want));
    }
    Ok(acc)
}

fn trivial_invariance(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let r = t.r_inf as i64;
        let mut dirs = vec![trivial_vector_u(-1, &t)?, trivial_vector_u(0, &t)?];
        for k in 1..r {
            dirs.push(trivial_vector_w(k, &t)?);
        }
        for a in &dirs {
            let ev = evolution_general(a, &t, &pt)?;
            let hb = t.hbar;
            let td = IrregularTimes {
                r_inf: t.r_inf,
                t: t.t.iter().zip(&a.alpha).map(|(&x, &da)| Dual::new(x, hb * da)).collect(),
                hbar: Dual::constant(hb),
            };
            let ptd = DarbouxPoint {
                q: pt.q.iter().zip(&ev.dq).map(|(&x, &d)| Dual::new(x, d)).collect(),
                p: pt.p.iter().zip(&ev.dp).map(|(&x, &d)| Dual::new(x, d)).collect(),
            };
            let sh = shifted_coordinates(&ptd, &reduced_from_irregular(&td)?, &td)?;
            for x in sh.q.iter().chain(&sh.p) {
                worst(&mut acc, x.der.norm() / (1.0 + x.val.norm()));
            }
        }
    }
    Ok(acc)
}

fn phase(pt: &DarbouxPoint<C>) -> Vec<C> {
    pt.q.iter().chain(&pt.p).copied().collect()
}

fn split<S: Field>(x: &[S]) -> DarbouxPoint<S> {
    let g = x.len() / 2;
    DarbouxPoint { q: x[..g].to_vec(), p: x[g..].to_vec() }
}

fn symplectic_to_symmetric(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let pt = darboux(rng, g);
        let r = symplectic_jacobian_check(
            |x| {
                let s = to_symmetric(&split(x))?;
                Ok(s.q_sym.into_iter().chain(s.p_sym).collect())
            },
            &phase(&pt),
        )?;
        worst(&mut acc, r);
    }
    Ok(acc)
}

fn symplectic_shifted(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let t = times(rng, g);
        let pt = darboux(rng, g);
        let td = t.map(Dual::constant);
        let rtd = reduced_from_irregular(&td)?;
        let r = symplectic_jacobian_check(
            |x| {
                let s = shifted_coordinates(&split(x), &rtd, &td)?;
                Ok(s.q.into_iter().chain(s.p).collect())
            },
            &phase(&pt),
        )?;
        worst(&mut acc, r);
    }
    Ok(acc)
}

fn symmetric_round_trip(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let pt = darboux(rng, g);
        let back = from_symmetric(&to_symmetric(&pt)?)?;
        // match roots up to the sort order
        for (qi, pi) in pt.q.iter().zip(&pt.p) {
            let j = (0..g)
                .min_by(|&a, &b| (back.q[a] - qi).norm().total_cmp(&(back.q[b] - qi).norm()))
                .expect("g ≥ 1");
            worst(&mut acc, rel(back.q[j], *qi).max(rel(back.p[j], *pi)));
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// flow

fn state(rng: &mut ChaCha8Rng, g: usize) -> Result<SymmetricPoint<C>> {
    to_symmetric(&darboux(rng, g))
}

fn zero_curvature(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let rt = canonical(rng, g);
        let s = state(rng, g)?;
        for k in 1..=g {
            worst(&mut acc, verify_zero_curvature(k, &rt, &s)?);
        }
    }
    Ok(acc)
}

fn field_routes(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let rt = canonical(rng, g);
        let s = state(rng, g)?;
        for k in 1..=g {
            let a = vector_field(k, &rt, &s)?;
            let b = vector_field_darboux(k, &rt, &s)?;
            let av: Vec<C> = a.q_sym.iter().chain(&a.p_sym).copied().collect();
            let bv: Vec<C> = b.q_sym.iter().chain(&b.p_sym).copied().collect();
            worst(&mut acc, rel_vec(&bv, &av));
        }
    }
    Ok(acc)
}

fn energy_balance(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let rt = canonical(rng, g);
        let s = state(rng, g)?;
        for k in 1..=g {
            let (total, explicit) = hamiltonian_rates(k, &rt, &s)?;
            worst(&mut acc, rel(total, explicit));
        }
    }
    Ok(acc)
}

fn commutativity(rng: &mut ChaCha8Rng, g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..2 {
        let rt = canonical(rng, g);
        let s = state(rng, g)?;
        for j in 1..=g {
            for k in j + 1..=g {
                worst(&mut acc, verify_flow_commutativity(j, k, &rt, &s, C::new(1e-3, 0.0), 1)?);
            }
        }
    }
    Ok(acc)
}

/// Genus one whatever `g` is: ħ²q̈ = 24q² + 16τ along the exact flow.
fn painleve1_exact(rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let mut acc = 0.0;
    for _ in 0..SAMPLES {
        let rt = canonical(rng, 1);
        let (q, p) = (cplx(rng), cplx(rng));
        worst(&mut acc, painleve1_exact_residual(&rt, q, p)?);
    }
    Ok(acc)
}

/// Second differences of an RK4 trajectory from (0, 0), ħ = 1, τ ∈ [0, 0.5], step 1e−3.
fn painleve1_numeric(_rng: &mut ChaCha8Rng, _g: usize) -> Result<f64> {
    let hbar = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let rt = ReducedTimes::canonical(&[zero], hbar)?;
    let s0 = SymmetricPoint::new(vec![zero], vec![zero])?;
    let traj = integrate(1, &rt, &s0, C::new(0.5, 0.0), 500)?;
    verify_painleve1(&traj, hbar)
}
