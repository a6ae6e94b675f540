#![allow(dead_code)]

use nalgebra::DMatrix;

/// Autocorrelation of the unit hat of half-width `h`: `h m(|t|/h)` with the
/// cubic B-spline `m`. Returns `(M, M'', M'''_+)` at `t >= 0`.
fn hat_autocorrelation(t: f64, h: f64) -> (f64, f64, f64) {
    let tau = t / h;
    if tau <= 1.0 {
        (
            h * (2.0 / 3.0 - tau * tau + 0.5 * tau.powi(3)),
            (-2.0 + 3.0 * tau) / h,
            3.0 / (h * h),
        )
    } else if tau <= 2.0 {
        let r = 2.0 - tau;
        (h * r.powi(3) / 6.0, r / h, -1.0 / (h * h))
    } else {
        (0.0, 0.0, 0.0)
    }
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    // Golub-Welsch
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let e = j.symmetric_eigen();
    (0..n).map(|k| (e.eigenvalues[k], 2.0 * e.eigenvectors[(0, k)].powi(2))).collect()
}

/// `∫∫_{R²} (φ₀(x) − φ₀(y))(φ_k(x) − φ_k(y)) |x − y|^{−1−2s}` for hats on a
/// uniform grid of spacing `h`.
fn hat_bilinear(k: usize, h: f64, s: f64, gl: &[(f64, f64)]) -> f64 {
    let c = k as f64 * h;
    let m = |t: f64| hat_autocorrelation(t.abs(), h).0;
    let f = |z: f64| 2.0 * m(c) - m(z - c) - m(z + c);
    // [0, h]: f = −M''(c) z² − (M'''_+ − M'''_−) z³ / 6 exactly
    let m2 = hat_autocorrelation(c, h).1;
    let m3p = hat_autocorrelation(c + 0.5 * h, h).2;
    let m3m = if k == 0 { -m3p } else { hat_autocorrelation(c - 0.5 * h, h).2 };
    let (c2, c3) = (-m2, -(m3p - m3m) / 6.0);
    let mut total = c2 * h.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s) + c3 * h.powf(3.0 - 2.0 * s) / (3.0 - 2.0 * s);
    let end = (k + 2) as f64 * h;
    let mut lo = h;
    while lo < end - 1e-12 * h {
        let hi = lo + h;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * h);
        total += gl.iter().map(|&(x, w)| {
            let z = mid + half * x;
            w * half * f(z) * z.powf(-1.0 - 2.0 * s)
        }).sum::<f64>();
        lo = hi;
    }
    total += 2.0 * m(c) * end.powf(-2.0 * s) / (2.0 * s);
    2.0 * total
}

fn smallest_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let l = b.clone().cholesky().unwrap().l();
    let li = l.try_inverse().unwrap();
    let c = &li * a * li.transpose();
    let c = 0.5 * (&c + c.transpose());
    c.symmetric_eigen().eigenvalues.min()
}

/// First eigenvalue of the quadratic problem on `n` uniform elements of
/// `(0, 1)`, assembled from the translation-invariant hat interactions.
pub fn p2_fractional_lambda(s: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let gl = gauss_legendre(40);
    let m = n - 1;
    let table: Vec<f64> = (0..m).map(|k| (1.0 - s) * hat_bilinear(k, h, s, &gl)).collect();
    let a = DMatrix::from_fn(m, m, |i, j| table[i.abs_diff(j)]);
    let b = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => 2.0 * h / 3.0,
        1 => h / 6.0,
        _ => 0.0,
    });
    smallest_generalized(&a, &b).sqrt()
}

/// First zero of the solution of `(|u'|^{p−2}u')' + Λ|u|^{p−2}u = 0`,
/// `u(0) = 0`, `u'(0) = 1`.
fn first_zero(p: f64, big_lambda: f64) -> f64 {
    let q = 1.0 / (p - 1.0);
    let rhs = |u: f64, w: f64| (w.abs().powf(q).copysign(w), -big_lambda * u.abs().powf(p - 1.0).copysign(u));
    let dx = 2e-5;
    let (mut x, mut u, mut w) = (0.0, 0.0, 1.0f64);
    loop {
        let (k1u, k1w) = rhs(u, w);
        let (k2u, k2w) = rhs(u + 0.5 * dx * k1u, w + 0.5 * dx * k1w);
        let (k3u, k3w) = rhs(u + 0.5 * dx * k2u, w + 0.5 * dx * k2w);
        let (k4u, k4w) = rhs(u + dx * k3u, w + dx * k3w);
        let un = u + dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let wn = w + dx / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if un <= 0.0 && x > 0.0 {
            return x + dx * u / (u - un);
        }
        x += dx;
        u = un;
        w = wn;
        if x > 100.0 {
            return f64::INFINITY;
        }
    }
}

/// `min ‖u'‖_p / ‖u‖_p` over `W₀^{1,p}(0, 1)` by shooting on `Λ = λ^p`.
pub fn p_laplacian_lambda(p: f64) -> f64 {
    let (mut lo, mut hi): (f64, f64) = (1.0, 1e3);
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if first_zero(p, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt().powf(1.0 / p)
}

/// Limit quotient `‖u'‖_Ḡ / ‖u‖_G` for `G = t^p/p`, where `Ḡ = (2/p) G`.
pub fn power_local_limit(p: f64) -> f64 {
    (2.0 / p).powf(1.0 / p) * p_laplacian_lambda(p)
}
