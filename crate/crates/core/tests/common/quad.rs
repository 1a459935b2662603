/// Gauss-Legendre nodes and weights on [-1, 1] by Newton on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Geometric panels of 20-point Gauss-Legendre on `[a, b]`, `a > 0`.
pub fn panel_quad(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let gl = gauss_legendre(20);
    let ratio = (b / a).powf(1.0 / panels as f64);
    let mut sum = 0.0;
    let mut lo = a;
    for p in 0..panels {
        let hi = if p + 1 == panels { b } else { lo * ratio };
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        sum += h * gl.iter().map(|&(x, w)| w * f(m + h * x)).sum::<f64>();
        lo = hi;
    }
    sum
}

/// `2 int_eps^Z Im k(sqrt(v z)) dz` in the original variable, with the apex
/// cut out, extrapolated to `eps -> 0`. Near the apex `Im k = c / rho`, so the
/// missing piece is `2c sqrt(eps / v) + O(eps)`; Richardson in `h = sqrt(eps)`.
pub fn excised_exponent(im_k: &dyn Fn(f64) -> f64, v: f64, r: f64, eps: f64) -> f64 {
    let z_end = r * r / v;
    let part = |e: f64| 2.0 * panel_quad(|z| im_k((v * z).sqrt()), e, z_end, 400);
    let (i1, i2, i4) = (part(eps), part(eps / 4.0), part(eps / 16.0));
    // eliminate h and h^2
    let r1 = 2.0 * i2 - i1;
    let r2 = 2.0 * i4 - i2;
    (4.0 * r2 - r1) / 3.0
}
