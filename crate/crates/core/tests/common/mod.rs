#![allow(dead_code)]

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫₀ˣ λ(t, x) p(t) dt` by adaptive Simpson.
pub fn lambda_quadrature(kernel: &vihpm::kernel::CorrectionKernel, poly: &[f64], x: f64) -> f64 {
    let f = |t: f64| kernel.lambda(t, x) * poly.iter().rev().fold(0.0, |acc, &c| acc * t + c);
    let scale = (0..=100)
        .map(|i| f(x * i as f64 / 100.0).abs())
        .fold(0.0, f64::max);
    adaptive_simpson(&f, 0.0, x, 1e-14 * scale * x)
}

pub fn central_difference(f: impl Fn(f64) -> f64, order: usize, t: f64, h: f64) -> f64 {
    // Σ_i (−1)^i C(n,i) f(t + (n/2 − i) h) / h^n
    let n = order as i32;
    let mut total = 0.0;
    let mut binom = 1.0;
    for i in 0..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom * f(t + (n as f64 / 2.0 - i as f64) * h);
        binom *= (n - i) as f64 / (i + 1) as f64;
    }
    total / h.powi(n)
}

pub fn table_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Largest |a_k − b_k| relative to the largest |b_k|.
pub fn coeff_rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().chain(a).fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        gap
    } else {
        gap / scale
    }
}

pub const REFERENCE_EX1_THETA: [f64; 3] = [
    -0.3333333170467781,
    -0.12500003614813987,
    -0.03333331303032349,
];
pub const REFERENCE_EX2_THETA: [f64; 3] = [
    0.041666667529862395,
    0.008333333119719312,
    0.001388890268167299,
];
