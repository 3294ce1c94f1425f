//! Integration of the τ_k flows in symmetric coordinates and the numerical checks
//! that go with them: zero curvature, the Painlevé 1 equation at g = 1 and
//! commutation of distinct flows.

use num_complex::Complex64;

use crate::algebra::{Dual, Field, Poly};
use crate::error::{check_index, P1Error, Result};
use crate::ham::{evolution_reduced, from_symmetric, symmetric_hamiltonian_reduced, to_symmetric};
use crate::lax::{atilde_from_symmetric, ltilde_from_symmetric, DarbouxPoint, SymmetricPoint};
use crate::times::{irregular_from_reduced, tau_tangent_vector, ReducedTimes};

type C = Complex64;

/// State norm past which integration stops.
pub const BLOWUP_NORM: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorStats {
    pub steps: usize,
    pub step_size: C,
    /// |y(h/2, h/2) − y(h)|∞ / 15 for each step
    pub richardson: Vec<f64>,
}

impl IntegratorStats {
    pub fn max_richardson(&self) -> f64 {
        self.richardson.iter().copied().fold(0.0, f64::max)
    }

    /// Sum of the per-step estimates, a bound-like proxy for the global error.
    pub fn global_estimate(&self) -> f64 {
        self.richardson.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub k: usize,
    /// Times at the start; only τ_k moves along the trajectory.
    pub times: ReducedTimes<C>,
    pub grid: Vec<C>,
    pub states: Vec<SymmetricPoint<C>>,
    pub meta: IntegratorStats,
}

impl Trajectory {
    pub fn genus(&self) -> usize {
        self.times.genus()
    }

    pub fn times_at(&self, i: usize) -> ReducedTimes<C> {
        with_tau(&self.times, self.k, self.grid[i])
    }

    /// Darboux points along the trajectory, where the roots are distinct.
    pub fn darboux(&self) -> Vec<Result<DarbouxPoint<C>>> {
        self.states.iter().map(from_symmetric).collect()
    }
}

fn with_tau<S: Field>(rt: &ReducedTimes<S>, k: usize, tau: S) -> ReducedTimes<S> {
    let mut out = rt.clone();
    out.tau[k - 1] = tau;
    out
}

fn pack(spt: &SymmetricPoint<C>) -> Vec<C> {
    spt.q_sym.iter().chain(&spt.p_sym).copied().collect()
}

fn unpack<S: Field>(y: &[S]) -> SymmetricPoint<S> {
    let g = y.len() / 2;
    SymmetricPoint { q_sym: y[..g].to_vec(), p_sym: y[g..].to_vec() }
}

fn check_flow(k: usize, rt: &ReducedTimes<C>, g: usize) -> Result<()> {
    rt.require_canonical()?;
    if rt.genus() != g {
        return Err(P1Error::WrongGenus { expected: rt.genus(), got: g });
    }
    check_index("k", k as i64, 1, g as i64)
}

fn lift_times(rt: &ReducedTimes<C>) -> ReducedTimes<Dual> {
    ReducedTimes {
        r_inf: rt.r_inf,
        t_inf: rt.t_inf.iter().map(|&x| Dual::constant(x)).collect(),
        t1: Dual::constant(rt.t1),
        t2: Dual::constant(rt.t2),
        tau: rt.tau.iter().map(|&x| Dual::constant(x)).collect(),
        hbar: Dual::constant(rt.hbar),
    }
}

fn field_raw(k: usize, rt: &ReducedTimes<C>, y: &[C]) -> Result<Vec<C>> {
    let n = y.len();
    let g = n / 2;
    let rtd = lift_times(rt);
    let mut grad = vec![C::new(0.0, 0.0); n];
    for (i, slot) in grad.iter_mut().enumerate() {
        let yd: Vec<Dual> =
            y.iter().enumerate().map(|(j, &v)| if i == j { Dual::variable(v) } else { Dual::constant(v) }).collect();
        *slot = symmetric_hamiltonian_reduced(k, &rtd, &unpack(&yd))?.der;
    }
    let hbar = rt.hbar;
    let mut out = Vec::with_capacity(n);
    out.extend(grad[g..].iter().map(|d| d / hbar));
    out.extend(grad[..g].iter().map(|d| -d / hbar));
    Ok(out)
}

/// ∂_{τ_k}(Q, P) = (∂Ham/∂P, −∂Ham/∂Q)/ħ from the polynomial Hamiltonian.
pub fn vector_field(k: usize, rt: &ReducedTimes<C>, state: &SymmetricPoint<C>) -> Result<SymmetricPoint<C>> {
    if state.genus() == 0 {
        return Ok(state.clone());
    }
    check_flow(k, rt, state.genus())?;
    Ok(unpack(&field_raw(k, rt, &pack(state))?))
}

/// The same field from the Darboux evolution equations, pushed to (Q, P).
pub fn vector_field_darboux(k: usize, rt: &ReducedTimes<C>, state: &SymmetricPoint<C>) -> Result<SymmetricPoint<C>> {
    check_flow(k, rt, state.genus())?;
    let pt = from_symmetric(state)?;
    let ev = evolution_reduced(k, rt, &pt)?;
    let hbar = rt.hbar;
    let lifted = DarbouxPoint {
        q: pt.q.iter().zip(&ev.dq).map(|(&x, &d)| Dual::new(x, d / hbar)).collect(),
        p: pt.p.iter().zip(&ev.dp).map(|(&x, &d)| Dual::new(x, d / hbar)).collect(),
    };
    Ok(to_symmetric(&lifted)?.map(|x| x.der))
}

fn rk4(k: usize, rt: &ReducedTimes<C>, tau: C, y: &[C], h: C) -> Result<Vec<C>> {
    let at = |s: C| with_tau(rt, k, s);
    let axpy = |a: &[C], b: &[C], s: C| a.iter().zip(b).map(|(x, d)| x + d * s).collect::<Vec<_>>();
    let k1 = field_raw(k, &at(tau), y)?;
    let k2 = field_raw(k, &at(tau + h * 0.5), &axpy(y, &k1, h * 0.5))?;
    let k3 = field_raw(k, &at(tau + h * 0.5), &axpy(y, &k2, h * 0.5))?;
    let k4 = field_raw(k, &at(tau + h), &axpy(y, &k3, h))?;
    Ok((0..y.len()).map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0)).collect())
}

fn norm(y: &[C]) -> f64 {
    y.iter().map(|x| if x.is_finite() { x.norm() } else { f64::INFINITY }).fold(0.0, f64::max)
}

/// Fixed-step RK4 along τ_k from its value in `rt0` to `tau_end`, other times held.
/// On blow-up the trajectory up to the last good state is returned with the error.
pub fn integrate_until_failure(
    k: usize,
    rt0: &ReducedTimes<C>,
    state0: &SymmetricPoint<C>,
    tau_end: C,
    n_steps: usize,
) -> Result<(Trajectory, Option<P1Error>)> {
    let g = state0.genus();
    check_flow(k, rt0, g)?;
    if n_steps == 0 {
        return Err(P1Error::InvalidInput("n_steps must be at least 1".into()));
    }
    let tau0 = rt0.tau[k - 1];
    let h = (tau_end - tau0) / n_steps as f64;
    let mut traj = Trajectory {
        k,
        times: rt0.clone(),
        grid: vec![tau0],
        states: vec![state0.clone()],
        meta: IntegratorStats { steps: 0, step_size: h, richardson: Vec::new() },
    };
    let mut y = pack(state0);
    for step in 0..n_steps {
        let tau = tau0 + h * step as f64;
        let full = rk4(k, rt0, tau, &y, h)?;
        let half = rk4(k, rt0, tau, &y, h * 0.5)?;
        let half = rk4(k, rt0, tau + h * 0.5, &half, h * 0.5)?;
        let nrm = norm(&full);
        if nrm > BLOWUP_NORM {
            return Ok((traj, Some(P1Error::StepFailure { step: step + 1, tau: tau + h, norm: nrm })));
        }
        let est = full.iter().zip(&half).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / 15.0;
        traj.meta.richardson.push(est);
        traj.meta.steps += 1;
        y = full;
        traj.grid.push(tau0 + h * (step + 1) as f64);
        traj.states.push(unpack(&y));
    }
    Ok((traj, None))
}

pub fn integrate(
    k: usize,
    rt0: &ReducedTimes<C>,
    state0: &SymmetricPoint<C>,
    tau_end: C,
    n_steps: usize,
) -> Result<Trajectory> {
    match integrate_until_failure(k, rt0, state0, tau_end, n_steps)? {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

fn zero_curvature(
    k: usize,
    rt: &ReducedTimes<C>,
    state: &SymmetricPoint<C>,
    perturb: Option<(usize, C)>,
) -> Result<f64> {
    let v = vector_field(k, rt, state)?;
    let hbar = rt.hbar;
    let mut rtd = lift_times(rt);
    rtd.tau[k - 1].der = C::new(1.0, 0.0);
    let sd = SymmetricPoint {
        q_sym: state.q_sym.iter().zip(&v.q_sym).map(|(&x, &d)| Dual::new(x, d)).collect(),
        p_sym: state.p_sym.iter().zip(&v.p_sym).map(|(&x, &d)| Dual::new(x, d)).collect(),
    };
    let ld = ltilde_from_symmetric(&irregular_from_reduced(&rtd)?, &sd)?;
    let dl = ld.map(|p| p.map(|x| x.der * hbar));
    let mut l = ld.map(|p| p.map(|x| x.val));
    if let Some((j, delta)) = perturb {
        l.a21 = &l.a21 + &Poly::monomial(delta, j);
    }
    let t = irregular_from_reduced(rt)?;
    let a = atilde_from_symmetric(&tau_tangent_vector(k as i64, rt)?, &t, state)?;
    let rhs = a.commutator(&l).add(&a.map(|p| p.diff().scale(hbar)));
    Ok(dl.max_diff(&rhs))
}

/// Largest coefficient of ħ dL̃/dτ_k − [Ã, L̃] − ħ∂_λÃ, with dL̃/dτ_k taken along the
/// flow (state velocity plus the explicit τ_k dependence) by dual numbers.
pub fn verify_zero_curvature(k: usize, rt: &ReducedTimes<C>, state: &SymmetricPoint<C>) -> Result<f64> {
    zero_curvature(k, rt, state, None)
}

/// As [`verify_zero_curvature`] with `delta` added to the λ^j coefficient of L̃₂₁.
pub fn zero_curvature_perturbed(
    k: usize,
    rt: &ReducedTimes<C>,
    state: &SymmetricPoint<C>,
    j: usize,
    delta: C,
) -> Result<f64> {
    zero_curvature(k, rt, state, Some((j, delta)))
}

/// |ħ²q̈ − 24q² − 16τ| with q̈ differentiated exactly along the g = 1 flow.
pub fn painleve1_exact_residual(rt: &ReducedTimes<C>, q: C, p: C) -> Result<f64> {
    check_flow(1, rt, 1)?;
    let hbar = rt.hbar;
    let ev = evolution_reduced(1, rt, &DarbouxPoint::new(vec![q], vec![p])?)?;
    let mut rtd = lift_times(rt);
    rtd.tau[0].der = C::new(1.0, 0.0);
    let pt = DarbouxPoint { q: vec![Dual::new(q, ev.dq[0] / hbar)], p: vec![Dual::new(p, ev.dp[0] / hbar)] };
    let qdd = evolution_reduced(1, &rtd, &pt)?.dq[0].der / hbar;
    Ok((hbar * hbar * qdd - 24.0 * q * q - 16.0 * rt.tau[0]).norm())
}

fn second_differences(traj: &Trajectory) -> Result<Vec<(C, C, C)>> {
    if traj.genus() != 1 {
        return Err(P1Error::WrongGenus { expected: 1, got: traj.genus() });
    }
    let h = traj.meta.step_size;
    let q: Vec<C> = traj.states.iter().map(|s| s.q_sym[0]).collect();
    Ok((1..q.len().saturating_sub(1))
        .map(|i| (traj.grid[i], q[i], (q[i + 1] - q[i] * 2.0 + q[i - 1]) / (h * h)))
        .collect())
}

/// max |ħ²q̈ − 24q² − 16τ| over interior grid points, q̈ by central differences.
pub fn verify_painleve1(traj: &Trajectory, hbar: C) -> Result<f64> {
    Ok(second_differences(traj)?
        .into_iter()
        .map(|(tau, q, qdd)| (hbar * hbar * qdd - 24.0 * q * q - 16.0 * tau).norm())
        .fold(0.0, f64::max))
}

/// The same check after t = 2^{6/5}τ, q̃ = 2^{−2/5}q: max |ħ²q̃'' − 6q̃² − t|.
pub fn verify_painleve1_normalized(traj: &Trajectory, hbar: C) -> Result<f64> {
    let (st, sq) = (2f64.powf(1.2), 2f64.powf(-0.4));
    Ok(second_differences(traj)?
        .into_iter()
        .map(|(tau, q, qdd)| {
            let (t, qt, qtdd) = (tau * st, q * sq, qdd * sq / (st * st));
            (hbar * hbar * qtdd - 6.0 * qt * qt - t).norm()
        })
        .fold(0.0, f64::max))
}

fn advance(k: usize, rt: &ReducedTimes<C>, y: &[C], dt: C, substeps: usize) -> Result<(ReducedTimes<C>, Vec<C>)> {
    let h = dt / substeps as f64;
    let tau0 = rt.tau[k - 1];
    let mut y = y.to_vec();
    for s in 0..substeps {
        y = rk4(k, rt, tau0 + h * s as f64, &y, h)?;
    }
    Ok((with_tau(rt, k, tau0 + dt), y))
}

/// |(τ_j then τ_k) − (τ_k then τ_j)|∞ after steps of size `dt`, each made of
/// `substeps` RK4 steps.
pub fn verify_flow_commutativity(
    j: usize,
    k: usize,
    rt: &ReducedTimes<C>,
    state: &SymmetricPoint<C>,
    dt: C,
    substeps: usize,
) -> Result<f64> {
    let g = state.genus();
    check_flow(j, rt, g)?;
    check_flow(k, rt, g)?;
    if substeps == 0 {
        return Err(P1Error::InvalidInput("substeps must be at least 1".into()));
    }
    if j == k {
        return Ok(0.0);
    }
    let y = pack(state);
    let (r1, y1) = advance(j, rt, &y, dt, substeps)?;
    let (_, a) = advance(k, &r1, &y1, dt, substeps)?;
    let (r2, y2) = advance(k, rt, &y, dt, substeps)?;
    let (_, b) = advance(j, &r2, &y2, dt, substeps)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// (dHam/dτ_k along the flow, ∂Ham/∂τ_k at fixed (Q, P)).
pub fn hamiltonian_rates(k: usize, rt: &ReducedTimes<C>, state: &SymmetricPoint<C>) -> Result<(C, C)> {
    let v = vector_field(k, rt, state)?;
    let mut rtd = lift_times(rt);
    rtd.tau[k - 1].der = C::new(1.0, 0.0);
    let moving = SymmetricPoint {
        q_sym: state.q_sym.iter().zip(&v.q_sym).map(|(&x, &d)| Dual::new(x, d)).collect(),
        p_sym: state.p_sym.iter().zip(&v.p_sym).map(|(&x, &d)| Dual::new(x, d)).collect(),
    };
    let fixed = state.map(Dual::constant);
    let total = symmetric_hamiltonian_reduced(k, &rtd, &moving)?.der;
    let explicit = symmetric_hamiltonian_reduced(k, &rtd, &fixed)?.der;
    Ok((total, explicit))
}

/// (Q₁..Q_g, P₁..P_g) as a symmetric point.
pub fn state_from_vec(y: &[C]) -> Result<SymmetricPoint<C>> {
    if y.len() % 2 != 0 {
        return Err(P1Error::InvalidInput("state needs 2g entries".into()));
    }
    Ok(unpack(y))
}
