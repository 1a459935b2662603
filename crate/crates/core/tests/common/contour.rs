use num_complex::Complex64 as C;
use plasmon_core::emitter_coupling::{alpha0_complex, extract_plasmon_residue};
use plasmon_core::numerics::quadrature::{integrate_path, QuadOptions};
use plasmon_core::specfun::bessel_k;
use plasmon_core::wire_modes::WireGeometry;

/// Plasmon rate from the pole of the m = 0 spectral integral: half the
/// difference of the integrals passing below and above the pole.
pub fn pole_rate_from_contours(g: &WireGeometry, d: f64) -> f64 {
    let cpl = extract_plasmon_residue(g).unwrap();
    let hp = cpl.pole / g.k0r;
    let rho = g.k0r + d;
    let f = |h: C| alpha0_complex(h, g).unwrap() * h * h * bessel_k(1, h * rho).unwrap().powi(2);
    let w = 0.3 * hp.re;
    let a = C::new(hp.re - w, 0.0);
    let b = C::new(hp.re + w, 0.0);
    let opts = QuadOptions::rel(1e-12);
    let below = integrate_path(f, &[a, a - C::new(0.0, w), b - C::new(0.0, w), b], opts).unwrap().value;
    let above = integrate_path(f, &[a, a + C::new(0.0, w), b + C::new(0.0, w), b], opts).unwrap().value;
    let half = (below - above) * 0.5;
    -3.0 / (std::f64::consts::PI * g.eps1.re.sqrt()) * half.im
}
