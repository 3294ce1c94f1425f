use num_complex::Complex64 as C;
use p1lab::algebra::{max_coeff_diff, Dual};
use p1lab::times::*;
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = C> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C::new(a, b))
}

/// Random irregular times with |t_{2r-3}| in [0.5, 2], kept near the positive axis.
fn times(g: usize) -> impl Strategy<Value = IrregularTimes<C>> {
    let n = 2 * (g + 3) - 2;
    (proptest::collection::vec(cplx(), n), 0.5f64..2.0, -0.5f64..0.5).prop_map(move |(mut t, m, ph)| {
        let r = g + 3;
        t[2 * r - 4] = C::from_polar(m, ph);
        IrregularTimes::new(r, t, C::new(1.0, 0.0)).unwrap()
    })
}

fn seeded(t: &IrregularTimes<C>, dir: &DeformationVector<C>) -> IrregularTimes<Dual> {
    let mut d = t.map(Dual::constant);
    for (x, a) in d.t.iter_mut().zip(&dir.alpha) {
        x.der = *a;
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_irregular_reduced(t in (0usize..=5).prop_flat_map(times)) {
        let rt = reduced_from_irregular(&t).unwrap();
        let back = irregular_from_reduced(&rt).unwrap();
        let scale = t.t.iter().map(|x| x.norm()).fold(1.0, f64::max);
        for (a, b) in t.t.iter().zip(&back.t) {
            prop_assert!((a - b).norm() < 1e-11 * scale, "{a} vs {b}");
        }
        let again = reduced_from_irregular(&back).unwrap();
        for (a, b) in rt.tau.iter().zip(&again.tau) {
            prop_assert!((a - b).norm() < 1e-11 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn trivial_directions_leave_tau_fixed(t in (0usize..=4).prop_flat_map(times)) {
        let r = t.r_inf as i64;
        let hbar = t.hbar;
        let mut dirs: Vec<(String, DeformationVector<C>)> = Vec::new();
        for k in 1..r {
            dirs.push((format!("w{k}"), trivial_vector_w(k, &t).unwrap()));
        }
        dirs.push(("u-1".into(), trivial_vector_u(-1, &t).unwrap()));
        dirs.push(("u0".into(), trivial_vector_u(0, &t).unwrap()));
        let rt = reduced_from_irregular(&t).unwrap();
        for (name, dir) in &dirs {
            let scaled = DeformationVector { alpha: dir.alpha.iter().map(|a| a * hbar).collect() };
            let d = reduced_from_irregular(&seeded(&t, &scaled)).unwrap();
            for (m, tau) in d.tau.iter().enumerate() {
                prop_assert!(tau.der.norm() < 1e-9, "{name}: tau_{} moves by {}", m + 1, tau.der);
            }
            // Table of directional derivatives of the trivial times.
            let (dt2, dt1) = match name.as_str() {
                "u-1" => (hbar * rt.t2, C::new(0.0, 0.0)),
                "u0" => (C::new(0.0, 0.0), hbar * rt.t2),
                _ => (C::new(0.0, 0.0), C::new(0.0, 0.0)),
            };
            prop_assert!((d.t2.der - dt2).norm() < 1e-9, "{name}: T2");
            prop_assert!((d.t1.der - dt1).norm() < 1e-9, "{name}: T1");
            for j in 1..r {
                let expect = match name.as_str() {
                    "u-1" => hbar * t.t(2 * j) * j as f64,
                    "u0" => hbar * t.t(2 * j + 2) * j as f64,
                    w => if w == format!("w{j}") { hbar } else { C::new(0.0, 0.0) },
                };
                prop_assert!((d.t_inf[(j - 1) as usize].der - expect).norm() < 1e-9, "{name}: T_inf,{j}");
            }
        }
    }

    #[test]
    fn tau_tangent_duality(t in (1usize..=5).prop_flat_map(times)) {
        let rt = reduced_from_irregular(&t).unwrap();
        let g = t.genus() as i64;
        for k in 1..=g {
            let a = tau_tangent_vector(k, &rt).unwrap();
            let d = reduced_from_irregular(&seeded(&t, &a)).unwrap();
            for m in 1..=g {
                let expect = if m == k { 1.0 } else { 0.0 };
                prop_assert!((d.tau[(m - 1) as usize].der - expect).norm() < 1e-9, "k={k} m={m}");
            }
            prop_assert!(d.t1.der.norm() < 1e-9 && d.t2.der.norm() < 1e-9);
        }
    }

    #[test]
    fn reduced_p2_matches_general(tau in (0usize..=6).prop_flat_map(|g| proptest::collection::vec(cplx(), g))) {
        let rt = ReducedTimes::canonical(&tau, C::new(1.0, 0.0)).unwrap();
        let t = irregular_from_reduced(&rt).unwrap();
        let a = p2_poly_reduced(&rt).unwrap();
        let b = p2_poly(&t);
        prop_assert!(max_coeff_diff(&a, &b) < 1e-12);
    }
}

#[test]
fn canonical_p2_examples() {
    let tau = [C::new(0.3, -0.2), C::new(1.1, 0.4), C::new(-0.6, 0.9)];
    let rt = ReducedTimes::canonical(&tau, C::new(1.0, 0.0)).unwrap();
    let p = p2_poly_reduced(&rt).unwrap();
    let mut expect = vec![C::new(0.0, 0.0); 8];
    expect[7] = C::new(-1.0, 0.0);
    expect[5] = -2.0 * tau[0];
    expect[4] = -2.0 * tau[1];
    expect[3] = -(tau[0] * tau[0] + 2.0 * tau[2]);
    assert!(max_coeff_diff(&p, &p1lab::algebra::Poly::new(expect)) < 1e-14);

    let rt2 = ReducedTimes::canonical(&tau[..2], C::new(1.0, 0.0)).unwrap();
    let p = p2_poly(&irregular_from_reduced(&rt2).unwrap());
    let mut expect = vec![C::new(0.0, 0.0); 6];
    expect[5] = C::new(-1.0, 0.0);
    expect[3] = -2.0 * tau[0];
    expect[2] = -2.0 * tau[1];
    assert!(max_coeff_diff(&p, &p1lab::algebra::Poly::new(expect)) < 1e-14);
}

#[test]
fn non_canonical_is_rejected() {
    let mut rt = ReducedTimes::canonical(&[C::new(0.1, 0.0)], C::new(1.0, 0.0)).unwrap();
    rt.t1 = C::new(0.2, 0.0);
    assert!(matches!(p2_poly_reduced(&rt), Err(p1lab::P1Error::NotCanonical(_))));
}

#[test]
fn degenerate_leading_time() {
    let mut t = IrregularTimes::canonical(&[C::new(0.1, 0.0)], C::new(1.0, 0.0)).unwrap();
    t.t[4] = C::new(0.0, 0.0);
    assert!(matches!(reduced_from_irregular(&t), Err(p1lab::P1Error::DegenerateTimes(_))));
}

#[test]
fn p1_example() {
    let t = IrregularTimes::new(
        4,
        vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(2.0, 0.0), C::new(2.0, 0.0), C::new(3.0, 0.0)],
        C::new(1.0, 0.0),
    )
    .unwrap();
    let p = p1_poly(&t);
    assert_eq!(p.coeffs(), &[C::new(-1.0, 0.0), C::new(-2.0, 0.0), C::new(-3.0, 0.0)]);
    let canon = IrregularTimes::canonical(&[C::new(0.5, 0.0)], C::new(1.0, 0.0)).unwrap();
    assert!(p1_poly(&canon).is_zero());
}
