//! `example --name airy|p1`.

use num_complex::Complex64 as C;
use serde_json::{json, Value};

use super::io::{darboux_json, irregular_json, reduced_json};
use crate::algebra::linalg::lu_solve;
use crate::algebra::{mat2_to_json, poly_to_json};
use crate::error::Result;
use crate::ham::reduced_hamiltonian;
use crate::lax::{atilde_from_darboux, build_l, ltilde_from_darboux, spectral_curve, DarbouxPoint};
use crate::times::{irregular_from_reduced, tau_tangent_vector, IrregularTimes, ReducedTimes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Example {
    Airy,
    P1,
}

pub fn run(which: Example) -> Result<Value> {
    match which {
        Example::Airy => airy(),
        Example::P1 => p1(),
    }
}

/// Genus zero: L is polynomial and the classical curve is y² = λ.
pub fn airy() -> Result<Value> {
    let one = C::new(1.0, 0.0);
    let t = IrregularTimes::canonical(&[], one)?;
    let pt = DarbouxPoint::new(vec![], vec![])?;
    let l = build_l(&t, &pt)?.map(|e| e.poly.clone());
    let (p1, p2) = spectral_curve(&t, &pt)?;
    Ok(json!({
        "name": "airy",
        "g": 0,
        "times": irregular_json(&t),
        "L": mat2_to_json(&l),
        "spectral_curve": {
            "form": "y^2 - P1(lambda) y + P2(lambda) = 0",
            "P1": poly_to_json(&p1),
            "P2": poly_to_json(&p2),
            "equation": "y^2 = lambda",
        },
    }))
}

fn sample(tau: f64, q: f64, p: f64) -> Result<(ReducedTimes<C>, DarbouxPoint<C>)> {
    let rt = ReducedTimes::canonical(&[C::new(tau, 0.0)], C::new(1.0, 0.0))?;
    let pt = DarbouxPoint::new(vec![C::new(q, 0.0)], vec![C::new(p, 0.0)])?;
    Ok((rt, pt))
}

/// Genus one at canonical times: L̃, Ã and Ham at a sample point, and the coefficients
/// of Ham on the basis (p², q³, τq) fitted from the constructed Hamiltonian.
pub fn p1() -> Result<Value> {
    let (rt, pt) = sample(0.3, 0.4, -0.7)?;
    let t = irregular_from_reduced(&rt)?;
    let alpha = tau_tangent_vector(1, &rt)?;
    let lt = ltilde_from_darboux(&t, &pt)?;
    let at = atilde_from_darboux(&alpha, &t, &pt)?;
    let ham = reduced_hamiltonian(1, &rt, &pt)?;

    let nodes = [(0.3, 0.4, -0.7), (-0.5, 1.1, 0.2), (0.9, -0.6, 1.3), (0.1, 0.8, 0.5), (-1.2, -0.3, -0.9)];
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &(tau, q, p) in &nodes {
        let (rt, pt) = sample(tau, q, p)?;
        let (q, p, tau) = (pt.q[0], pt.p[0], rt.tau[0]);
        rows.push([p * p, q * q * q, tau * q]);
        rhs.push(reduced_hamiltonian(1, &rt, &pt)?);
    }
    // least squares through the normal equations
    let mut n = vec![vec![C::new(0.0, 0.0); 3]; 3];
    let mut b = vec![C::new(0.0, 0.0); 3];
    for (row, &y) in rows.iter().zip(&rhs) {
        for i in 0..3 {
            for j in 0..3 {
                n[i][j] += row[i].conj() * row[j];
            }
            b[i] += row[i].conj() * y;
        }
    }
    let coef = lu_solve(n, b)?;
    let fit_residual = rows
        .iter()
        .zip(&rhs)
        .map(|(row, &y)| (row[0] * coef[0] + row[1] * coef[1] + row[2] * coef[2] - y).norm())
        .fold(0.0, f64::max);

    Ok(json!({
        "name": "p1",
        "g": 1,
        "times": irregular_json(&t),
        "reduced_times": reduced_json(&rt),
        "point": darboux_json(&pt),
        "L_tilde": mat2_to_json(&lt),
        "A_tilde": mat2_to_json(&at),
        "hamiltonian": crate::algebra::c64_to_json(ham),
        "hamiltonian_fit": {
            "basis": ["p^2", "q^3", "tau*q"],
            "coeffs": coef.iter().map(|&z| crate::algebra::c64_to_json(z)).collect::<Vec<_>>(),
            "residual": fit_residual,
        },
        "equation": "hbar^2 q'' = 24 q^2 + 16 tau",
    }))
}
