//! Scalars, dual numbers, polynomials, pole expansions and 2×2 matrices.

pub mod linalg;
pub mod mat2;
pub mod poles;
pub mod poly;
pub mod scalar;

pub use mat2::Mat2;
pub use poles::{check_separation, Pole, PoleExpansion, COLLISION_TOL};
pub use poly::{max_coeff_diff, Poly};
pub use scalar::{Dual, Field};

use num_complex::Complex64;

pub fn poly_eval<S: Field>(p: &Poly<S>, x: S) -> S {
    p.eval(x)
}

pub fn poly_mul<S: Field>(p: &Poly<S>, q: &Poly<S>) -> Poly<S> {
    p * q
}

pub fn poly_diff<S: Field>(p: &Poly<S>) -> Poly<S> {
    p.diff()
}

/// `[re, im]` pairs, ascending powers.
pub fn poly_to_json(p: &Poly<Complex64>) -> serde_json::Value {
    serde_json::Value::Array(p.coeffs().iter().map(|c| c64_to_json(*c)).collect())
}

pub fn c64_to_json(z: Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

pub fn mat2_to_json(m: &Mat2<Poly<Complex64>>) -> serde_json::Value {
    serde_json::json!({
        "a11": poly_to_json(&m.a11),
        "a12": poly_to_json(&m.a12),
        "a21": poly_to_json(&m.a21),
        "a22": poly_to_json(&m.a22),
    })
}

pub fn expansion_to_json(e: &PoleExpansion<Complex64>) -> serde_json::Value {
    let poles: Vec<_> = e
        .poles
        .iter()
        .map(|p| {
            serde_json::json!({
                "at": c64_to_json(p.at),
                "coeffs": p.coeffs.iter().map(|c| c64_to_json(*c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({ "poly": poly_to_json(&e.poly), "poles": poles })
}

pub fn expansion_mat2_to_json(m: &Mat2<PoleExpansion<Complex64>>) -> serde_json::Value {
    serde_json::json!({
        "a11": expansion_to_json(&m.a11),
        "a12": expansion_to_json(&m.a12),
        "a21": expansion_to_json(&m.a21),
        "a22": expansion_to_json(&m.a22),
    })
}
