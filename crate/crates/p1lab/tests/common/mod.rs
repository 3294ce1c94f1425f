#![allow(dead_code)]

use num_complex::Complex64 as C;
use p1lab::times::IrregularTimes;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cplx() -> impl Strategy<Value = C> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C::new(a, b))
}

/// Random irregular times of genus g with |t_{2r-3}| in [0.5, 2].
pub fn times(g: usize) -> impl Strategy<Value = IrregularTimes<C>> {
    let n = 2 * (g + 3) - 2;
    (proptest::collection::vec(cplx(), n), 0.5f64..2.0, -0.5f64..0.5).prop_map(move |(mut t, m, ph)| {
        let r = g + 3;
        t[2 * r - 4] = C::from_polar(m, ph);
        IrregularTimes::new(r, t, C::new(1.0, 0.0)).unwrap()
    })
}

/// g points pairwise at least ~0.3 apart: jittered around a circle.
pub fn points(g: usize) -> impl Strategy<Value = Vec<C>> {
    (proptest::collection::vec((-0.15f64..0.15, 0.8f64..1.2), g), cplx()).prop_map(move |(jit, shift)| {
        jit.iter()
            .enumerate()
            .map(|(i, &(a, rad))| {
                let th = 2.0 * std::f64::consts::PI * (i as f64 + a) / g.max(1) as f64;
                C::from_polar(rad, th) + shift * 0.3
            })
            .collect()
    })
}

pub fn max_abs(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
