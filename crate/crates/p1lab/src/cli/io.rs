//! JSON in and out. Complex numbers are always `[re, im]`.

use num_complex::Complex64 as C;
use serde_json::{json, Value};

use super::CliError;
use crate::algebra::c64_to_json;
use crate::ham::{from_symmetric, to_symmetric};
use crate::lax::{DarbouxPoint, SymmetricPoint};
use crate::times::{irregular_from_reduced, reduced_from_irregular, IrregularTimes, ReducedTimes};

fn bad(what: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{what}: {msg}"))
}

pub fn parse_json(what: &str, s: &str) -> Result<Value, CliError> {
    serde_json::from_str(s).map_err(|e| bad(what, e))
}

/// `[re, im]` or a bare real number.
pub fn complex(what: &str, v: &Value) -> Result<C, CliError> {
    if let Some(x) = v.as_f64() {
        return Ok(C::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C::new(re, im)),
            _ => Err(bad(what, "expected [re, im] with numeric entries")),
        },
        _ => Err(bad(what, "expected [re, im]")),
    }
}

pub fn complex_list(what: &str, v: &Value) -> Result<Vec<C>, CliError> {
    v.as_array().ok_or_else(|| bad(what, "expected a list of [re, im]"))?.iter().map(|x| complex(what, x)).collect()
}

fn field<'a>(what: &str, v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| bad(what, format!("missing key \"{key}\"")))
}

#[derive(Debug, Clone)]
pub enum PointArg {
    Darboux(DarbouxPoint<C>),
    Symmetric(SymmetricPoint<C>),
}

impl PointArg {
    pub fn genus(&self) -> usize {
        match self {
            PointArg::Darboux(p) => p.genus(),
            PointArg::Symmetric(s) => s.genus(),
        }
    }

    pub fn darboux(&self) -> Result<DarbouxPoint<C>, CliError> {
        Ok(match self {
            PointArg::Darboux(p) => p.clone(),
            PointArg::Symmetric(s) => from_symmetric(s)?,
        })
    }

    pub fn symmetric(&self) -> Result<SymmetricPoint<C>, CliError> {
        Ok(match self {
            PointArg::Darboux(p) => to_symmetric(p)?,
            PointArg::Symmetric(s) => s.clone(),
        })
    }
}

/// `{"q": [...], "p": [...]}` (Darboux) or `{"Q": [...], "P": [...]}` (symmetric).
pub fn parse_point(s: &str) -> Result<PointArg, CliError> {
    let v = parse_json("--point", s)?;
    if v.get("q").is_some() || v.get("p").is_some() {
        let q = complex_list("--point q", field("--point", &v, "q")?)?;
        let p = complex_list("--point p", field("--point", &v, "p")?)?;
        Ok(PointArg::Darboux(DarbouxPoint::new(q, p)?))
    } else if v.get("Q").is_some() || v.get("P").is_some() {
        let q = complex_list("--point Q", field("--point", &v, "Q")?)?;
        let p = complex_list("--point P", field("--point", &v, "P")?)?;
        Ok(PointArg::Symmetric(SymmetricPoint::new(q, p)?))
    } else {
        Err(bad("--point", "expected keys q, p or Q, P"))
    }
}

/// Irregular `{"r_inf", "hbar", "t"}` or reduced `{"r_inf", "hbar", "t_inf", "t1", "t2", "tau"}`.
pub fn parse_times(s: &str) -> Result<(IrregularTimes<C>, ReducedTimes<C>), CliError> {
    let v = parse_json("--times", s)?;
    let r_inf = field("--times", &v, "r_inf")?
        .as_u64()
        .ok_or_else(|| bad("--times", "r_inf must be a non-negative integer"))? as usize;
    let hbar = match v.get("hbar") {
        Some(h) => complex("--times hbar", h)?,
        None => C::new(1.0, 0.0),
    };
    if v.get("t").is_some() {
        let t = IrregularTimes::new(r_inf, complex_list("--times t", &v["t"])?, hbar)?;
        let rt = reduced_from_irregular(&t)?;
        Ok((t, rt))
    } else {
        let rt = ReducedTimes::new(
            r_inf,
            complex_list("--times t_inf", field("--times", &v, "t_inf")?)?,
            complex("--times t1", field("--times", &v, "t1")?)?,
            complex("--times t2", field("--times", &v, "t2")?)?,
            complex_list("--times tau", field("--times", &v, "tau")?)?,
            hbar,
        )?;
        let t = irregular_from_reduced(&rt)?;
        Ok((t, rt))
    }
}

fn list(v: &[C]) -> Value {
    Value::Array(v.iter().map(|&z| c64_to_json(z)).collect())
}

pub fn irregular_json(t: &IrregularTimes<C>) -> Value {
    json!({ "r_inf": t.r_inf, "hbar": c64_to_json(t.hbar), "t": list(&t.t) })
}

pub fn reduced_json(rt: &ReducedTimes<C>) -> Value {
    json!({
        "r_inf": rt.r_inf,
        "hbar": c64_to_json(rt.hbar),
        "t_inf": list(&rt.t_inf),
        "t1": c64_to_json(rt.t1),
        "t2": c64_to_json(rt.t2),
        "tau": list(&rt.tau),
    })
}

pub fn darboux_json(p: &DarbouxPoint<C>) -> Value {
    json!({ "q": list(&p.q), "p": list(&p.p) })
}

pub fn symmetric_json(s: &SymmetricPoint<C>) -> Value {
    json!({ "Q": list(&s.q_sym), "P": list(&s.p_sym) })
}

pub fn complex_list_json(v: &[C]) -> Value {
    list(v)
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializing a JSON value cannot fail");
    s.push('\n');
    s
}
