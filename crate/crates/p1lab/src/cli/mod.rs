//! Command-line front end: `construct`, `hamiltonian`, `evolve`, `verify`, `example`.
//!
//! JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success, 1 domain error or
//! failed verification, 2 usage or JSON parse error.

pub mod battery;
pub mod examples;
pub mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{c64_to_json, expansion_mat2_to_json, mat2_to_json, poly_to_json};
use crate::error::P1Error;
use crate::flow::{
    integrate_until_failure, painleve1_exact_residual, verify_painleve1, verify_zero_curvature, Trajectory,
};
use crate::ham::{general_hamiltonian, symmetric_hamiltonian, symmetric_hamiltonian_closed};
use crate::lax::{atilde_from_darboux, build_a, build_l, isospectral, ltilde_from_darboux, spectral_curve};
use crate::times::{tau_tangent_vector, IrregularTimes, ReducedTimes};
use battery::{Group, Tolerances};
use io::{complex, complex_list, parse_json, parse_point, parse_times, render, PointArg};

/// Environment variable naming a JSON file of threshold overrides for `verify`.
pub const TOL_ENV: &str = "P1LAB_TOL";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] P1Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "p1lab", version, about = "Lax pairs, Hamiltonians and flows of the Painleve 1 hierarchy")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Emit L, L̃, A and Ã for every τ flow, plus the isospectral data, as JSON.
    Construct {
        #[command(flatten)]
        times: TimesArgs,
        /// {"q": [...], "p": [...]} or {"Q": [...], "P": [...]}
        #[arg(long)]
        point: String,
    },
    /// Value and parts of the τ_k Hamiltonian.
    Hamiltonian {
        #[command(flatten)]
        times: TimesArgs,
        #[arg(long)]
        flow: usize,
        #[arg(long)]
        point: String,
        /// Evaluate in symmetric coordinates (computed and closed forms).
        #[arg(long)]
        symmetric: bool,
    },
    /// Integrate the τ_k flow in symmetric coordinates; CSV plus a JSON sidecar.
    Evolve {
        #[command(flatten)]
        times: TimesArgs,
        #[arg(long)]
        flow: usize,
        /// Start point, Darboux or symmetric.
        #[arg(long)]
        from: String,
        /// Final value of τ_k, as [re, im] or a real number.
        #[arg(long)]
        to: String,
        #[arg(long)]
        steps: usize,
        /// CSV path; the sidecar goes next to it with a .json extension. Stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized property battery and print one row per check.
    Verify {
        #[arg(value_enum, default_value = "all")]
        group: Group,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Worked examples.
    Example {
        #[arg(long, value_enum)]
        name: examples::Example,
    },
}

#[derive(Debug, Args)]
struct TimesArgs {
    #[arg(long)]
    g: usize,
    /// Canonical trivial times (the default unless --times is given).
    #[arg(long, conflicts_with = "times")]
    canonical: bool,
    /// τ_1..τ_g as a JSON list of [re, im]; zeros if absent.
    #[arg(long, conflicts_with = "times")]
    tau: Option<String>,
    /// Full irregular or reduced times as JSON.
    #[arg(long)]
    times: Option<String>,
    /// ħ as [re, im]; defaults to 1.
    #[arg(long, conflicts_with = "times")]
    hbar: Option<String>,
}

impl TimesArgs {
    fn resolve(&self) -> Result<(IrregularTimes<C>, ReducedTimes<C>), CliError> {
        let (t, rt) = match &self.times {
            Some(s) => parse_times(s)?,
            None => {
                let tau = match &self.tau {
                    Some(s) => complex_list("--tau", &parse_json("--tau", s)?)?,
                    None => vec![C::new(0.0, 0.0); self.g],
                };
                let hbar = match &self.hbar {
                    Some(s) => complex("--hbar", &parse_json("--hbar", s)?)?,
                    None => C::new(1.0, 0.0),
                };
                if tau.len() != self.g {
                    return Err(P1Error::WrongGenus { expected: self.g, got: tau.len() }.into());
                }
                (IrregularTimes::canonical(&tau, hbar)?, ReducedTimes::canonical(&tau, hbar)?)
            }
        };
        if t.genus() != self.g {
            return Err(P1Error::WrongGenus { expected: self.g, got: t.genus() }.into());
        }
        Ok((t, rt))
    }
}

fn check_point_genus(g: usize, pt: &PointArg) -> Result<(), CliError> {
    if pt.genus() != g {
        return Err(P1Error::WrongGenus { expected: g, got: pt.genus() }.into());
    }
    Ok(())
}

fn check_flow(g: usize, k: usize) -> Result<(), CliError> {
    if k == 0 || k > g {
        return Err(P1Error::IndexOutOfRange { what: "flow", index: k as i64, lo: 1, hi: g as i64 }.into());
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command, writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Cmd::Construct { times, point } => {
            let (t, rt) = times.resolve()?;
            let pt = parse_point(&point)?;
            check_point_genus(times.g, &pt)?;
            out.write_all(render(&construct(&t, &rt, &pt)?).as_bytes())?;
            Ok(0)
        }
        Cmd::Hamiltonian { times, flow, point, symmetric } => {
            let (t, rt) = times.resolve()?;
            let pt = parse_point(&point)?;
            check_point_genus(times.g, &pt)?;
            check_flow(times.g, flow)?;
            out.write_all(render(&hamiltonian(&t, &rt, flow, &pt, symmetric)?).as_bytes())?;
            Ok(0)
        }
        Cmd::Evolve { times, flow, from, to, steps, out: path } => {
            let (_, rt) = times.resolve()?;
            let pt = parse_point(&from)?;
            check_point_genus(times.g, &pt)?;
            check_flow(times.g, flow)?;
            let to = complex("--to", &parse_json("--to", &to)?)?;
            evolve(&rt, flow, &pt, to, steps, path.as_deref(), out, err)
        }
        Cmd::Verify { group, g, seed, jobs, json } => {
            let tol = match std::env::var_os(TOL_ENV) {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Usage(format!("{TOL_ENV}={}: {e}", path.to_string_lossy())))?;
                    Tolerances::with_overrides(&text).map_err(|e| CliError::Usage(format!("{TOL_ENV}: {e}")))?
                }
                None => Tolerances::default(),
            };
            if g > crate::times::MAX_GENUS {
                return Err(P1Error::InvalidInput(format!("g = {g} exceeds {}", crate::times::MAX_GENUS)).into());
            }
            let rows = battery::run(group, g, seed, jobs, &tol);
            if json {
                out.write_all(render(&battery::report_json(&rows)).as_bytes())?;
            } else {
                out.write_all(battery::report_text(&rows, group, g, seed).as_bytes())?;
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                writeln!(err, "{failed} of {} checks failed", rows.len())?;
                Ok(1)
            } else {
                Ok(0)
            }
        }
        Cmd::Example { name } => {
            out.write_all(render(&examples::run(name)?).as_bytes())?;
            Ok(0)
        }
    }
}

fn construct(t: &IrregularTimes<C>, rt: &ReducedTimes<C>, pt: &PointArg) -> Result<Value, CliError> {
    let dp = pt.darboux()?;
    let sp = pt.symmetric()?;
    let l = build_l(t, &dp)?;
    let lt = ltilde_from_darboux(t, &dp)?;
    let h = isospectral(t, &dp)?;
    let (p1, p2) = spectral_curve(t, &dp)?;
    let mut flows = Vec::new();
    for k in 1..=t.genus() {
        let alpha = tau_tangent_vector(k as i64, rt)?;
        flows.push(json!({
            "flow": k,
            "alpha": io::complex_list_json(&alpha.alpha),
            "A": expansion_mat2_to_json(&build_a(&alpha, t, &dp)?),
            "A_tilde": mat2_to_json(&atilde_from_darboux(&alpha, t, &dp)?),
        }));
    }
    Ok(json!({
        "g": t.genus(),
        "times": io::irregular_json(t),
        "reduced_times": io::reduced_json(rt),
        "point": io::darboux_json(&dp),
        "symmetric_point": io::symmetric_json(&sp),
        "L": expansion_mat2_to_json(&l),
        "L_tilde": mat2_to_json(&lt),
        "isospectral": io::complex_list_json(&h.h),
        "spectral_curve": { "P1": poly_to_json(&p1), "P2": poly_to_json(&p2) },
        "flows": flows,
    }))
}

fn hamiltonian(
    t: &IrregularTimes<C>,
    rt: &ReducedTimes<C>,
    k: usize,
    pt: &PointArg,
    symmetric: bool,
) -> Result<Value, CliError> {
    let alpha = tau_tangent_vector(k as i64, rt)?;
    let parts = |h: crate::ham::HamiltonianValue<C>| {
        json!({ "h": c64_to_json(h.h_part), "c": c64_to_json(h.c_part), "nu": c64_to_json(h.nu_part) })
    };
    Ok(if symmetric {
        let sp = pt.symmetric()?;
        let h = symmetric_hamiltonian(&alpha, t, &sp)?;
        json!({
            "flow": k,
            "coordinates": "symmetric",
            "point": io::symmetric_json(&sp),
            "value": c64_to_json(h.value),
            "parts": parts(h),
            "closed_form": c64_to_json(symmetric_hamiltonian_closed(&alpha, t, &sp)?),
        })
    } else {
        let dp = pt.darboux()?;
        let h = general_hamiltonian(&alpha, t, &dp)?;
        json!({
            "flow": k,
            "coordinates": "darboux",
            "point": io::darboux_json(&dp),
            "value": c64_to_json(h.value),
            "parts": parts(h),
        })
    })
}

fn csv(traj: &Trajectory) -> String {
    let g = traj.genus();
    let mut s = String::from("tau_re,tau_im");
    for name in ["Q", "P"] {
        for i in 1..=g {
            s.push_str(&format!(",{name}{i}_re,{name}{i}_im"));
        }
    }
    s.push('\n');
    for (tau, st) in traj.grid.iter().zip(&traj.states) {
        s.push_str(&format!("{},{}", tau.re, tau.im));
        for z in st.q_sym.iter().chain(&st.p_sym) {
            s.push_str(&format!(",{},{}", z.re, z.im));
        }
        s.push('\n');
    }
    s
}

/// JSON numbers cannot hold NaN or infinities; those become null.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn diagnostics(traj: &Trajectory, requested: usize, stopped: Option<&P1Error>) -> Result<Value, CliError> {
    let n = traj.states.len();
    let picks: Vec<usize> = if n <= 11 { (0..n).collect() } else { (0..=10).map(|i| i * (n - 1) / 10).collect() };
    let mut zc = 0.0f64;
    for &i in &picks {
        zc = zc.max(verify_zero_curvature(traj.k, &traj.times_at(i), &traj.states[i])?);
    }
    let mut d = json!({
        "flow": traj.k,
        "g": traj.genus(),
        "steps_requested": requested,
        "steps_taken": traj.meta.steps,
        "step_size": c64_to_json(traj.meta.step_size),
        "richardson_max": num(traj.meta.max_richardson()),
        "global_error_estimate": num(traj.meta.global_estimate()),
        "zero_curvature_max": num(zc),
        "stopped": stopped.map(|e| e.to_string()),
    });
    if traj.genus() == 1 {
        let hbar = traj.times.hbar;
        let mut exact = 0.0f64;
        for &i in &picks {
            let s = &traj.states[i];
            exact = exact.max(painleve1_exact_residual(&traj.times_at(i), s.q_sym[0], s.p_sym[0])?);
        }
        d["painleve1_exact_max"] = num(exact);
        if n >= 3 {
            d["painleve1_numeric"] = num(verify_painleve1(traj, hbar)?);
        }
    }
    Ok(d)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    if csv.extension().is_some_and(|e| e == "json") {
        let mut s = csv.as_os_str().to_owned();
        s.push(".diag.json");
        PathBuf::from(s)
    } else {
        csv.with_extension("json")
    }
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    rt: &ReducedTimes<C>,
    k: usize,
    pt: &PointArg,
    to: C,
    steps: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let (traj, stopped) = integrate_until_failure(k, rt, &pt.symmetric()?, to, steps)?;
    let diag = diagnostics(&traj, steps, stopped.as_ref())?;
    match path {
        Some(p) => {
            std::fs::write(p, csv(&traj))?;
            std::fs::write(sidecar_path(p), render(&diag))?;
            out.write_all(render(&diag).as_bytes())?;
        }
        None => {
            out.write_all(csv(&traj).as_bytes())?;
            err.write_all(render(&diag).as_bytes())?;
        }
    }
    match stopped {
        Some(e) => Err(e.into()),
        None => Ok(0),
    }
}
