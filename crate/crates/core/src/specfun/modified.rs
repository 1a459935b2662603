//! Modified Bessel functions `I_m`, `K_m`, returned as scaled sequences
//! `k = 0..=m_max`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, Real};

const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 17.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const CF_MAX_ITER: usize = 100_000;

/// `exp(-|Re z|) I_k(z)` for `k = 0..=m_max`.
pub fn bessel_i_seq_scaled<T: Real>(m_max: u32, z: Complex<T>) -> Vec<Complex<T>> {
    let n = m_max as usize + 1;
    if z.re == T::zero() && z.im == T::zero() {
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        out[0] = Complex::new(T::one(), T::zero());
        return out;
    }
    // I_k(-z) = (-1)^k I_k(z)
    if z.re < T::zero() {
        let mut out = bessel_i_seq_scaled(m_max, -z);
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
        return out;
    }
    if z.norm() <= T::lit(SERIES_RADIUS) {
        let damp = (-z.re).exp();
        (0..n).map(|k| series_i(k, z) * damp).collect()
    } else {
        miller_i(m_max as usize, z)
    }
}

/// Ascending series for `I_k(z)`, unscaled, small `|z|`.
fn series_i<T: Real>(k: usize, z: Complex<T>) -> Complex<T> {
    let half = z * T::lit(0.5);
    let mut lead = Complex::new(T::one(), T::zero());
    for j in 1..=k {
        lead = lead * half / T::from_usize_lossy(j);
    }
    let q = half * half;
    let mut term = lead;
    let mut sum = lead;
    for j in 1..200 {
        term = term * q / (T::from_usize_lossy(j) * T::from_usize_lossy(j + k));
        sum = sum + term;
        if term.norm() <= T::epsilon() * T::lit(0.01) * sum.norm() {
            break;
        }
    }
    sum
}

/// Miller backward recurrence, `Re z >= 0`, normalised with
/// `exp(z) = I_0(z) + 2 sum_{k>=1} I_k(z)`.
fn miller_i<T: Real>(m_max: usize, z: Complex<T>) -> Vec<Complex<T>> {
    let zabs = z.norm().to_f64().unwrap_or(0.0);
    let start = m_max.max((10.0 * zabs.sqrt()).ceil() as usize) + 40;
    let big = T::max_value().sqrt();
    let two_over_z = z.inv() * T::lit(2.0);

    let zero = Complex::new(T::zero(), T::zero());
    let mut stored = vec![zero; m_max + 1];
    let mut f_next = zero; // f_{k+1}
    let mut f = Complex::new(T::epsilon(), T::zero()); // f_k, k = start
    let mut sum = zero;
    if start <= m_max {
        stored[start] = f;
    }
    for k in (1..=start).rev() {
        let f_prev = two_over_z * f * T::from_usize_lossy(k) + f_next;
        sum = sum + f * T::lit(2.0);
        f_next = f;
        f = f_prev;
        if k - 1 <= m_max {
            stored[k - 1] = f;
        }
        if f.norm() > big {
            let s = big.recip();
            f = f * s;
            f_next = f_next * s;
            sum = sum * s;
            for v in stored.iter_mut() {
                *v = *v * s;
            }
        }
    }
    sum = sum + f;
    // stored / sum = exp(-z) I_k; rescale to exp(-Re z) I_k
    let phase = (imag_unit::<T>() * z.im).exp();
    stored.into_iter().map(|v| v / sum * phase).collect()
}

/// `exp(Re z) K_k(z)` for `k = 0..=m_max`, `z` off the non-positive real axis.
pub fn bessel_k_seq_scaled<T: Real>(m_max: u32, z: Complex<T>) -> Result<Vec<Complex<T>>> {
    if z.im == T::zero() && z.re <= T::zero() {
        return Err(Error::BranchCut {
            re: z.re.to_f64().unwrap_or(f64::NAN),
            im: 0.0,
        });
    }
    if z.re < T::zero() {
        // K_n(w e^{+-i pi}) = (-1)^n K_n(w) -+ i pi I_n(w), with w = -z
        let w = -z;
        let kw = bessel_k_seq_scaled(m_max, w)?;
        let iw = bessel_i_seq_scaled(m_max, w);
        let damp = (-(w.re + w.re)).exp();
        let sign = if z.im > T::zero() { -T::one() } else { T::one() };
        let ipi = imag_unit::<T>() * T::PI() * sign;
        return Ok(kw
            .into_iter()
            .zip(iw)
            .enumerate()
            .map(|(n, (k, i))| {
                let kk = if n % 2 == 1 { -k } else { k };
                kk * damp + ipi * i
            })
            .collect());
    }
    let (k0, k1) = k01_scaled(z)?;
    let mut out = Vec::with_capacity(m_max as usize + 1);
    out.push(k0);
    if m_max >= 1 {
        out.push(k1);
    }
    let two_over_z = z.inv() * T::lit(2.0);
    for k in 1..m_max as usize {
        let next = out[k - 1] + two_over_z * out[k] * T::from_usize_lossy(k);
        out.push(next);
    }
    Ok(out)
}

/// `exp(Re z) (K_0(z), K_1(z))`, `Re z >= 0`, `z != 0`.
fn k01_scaled<T: Real>(z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    let r = z.norm();
    if r <= T::lit(SERIES_RADIUS) {
        let (k0, k1) = series_k01(z);
        let s = z.re.exp();
        Ok((k0 * s, k1 * s))
    } else if r < T::lit(ASYMPTOTIC_RADIUS) {
        steed_k01(z)
    } else {
        Ok((asymptotic_k(0, z), asymptotic_k(1, z)))
    }
}

fn series_k01<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let gamma = T::lit(EULER_GAMMA);
    let half = z * T::lit(0.5);
    let q = half * half;
    let log_half = half.ln();
    let one = Complex::new(T::one(), T::zero());

    // K_0
    let mut t = one;
    let mut i0 = one;
    let mut h = T::zero();
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 1..200 {
        let kf = T::from_usize_lossy(k);
        t = t * q / (kf * kf);
        h = h + kf.recip();
        i0 = i0 + t;
        acc = acc + t * h;
        if t.norm() * (h + T::one()) <= T::epsilon() * T::lit(0.01) * acc.norm().max(T::one()) {
            break;
        }
    }
    let k0 = -(log_half + gamma) * i0 + acc;

    // K_1
    let mut u = one; // (z^2/4)^k / (k! (k+1)!)
    let mut i1s = one;
    let mut hk = T::zero(); // H_k
    let mut psi_sum = -gamma - gamma + T::one(); // psi(1) + psi(2)
    let mut acc1 = u * psi_sum;
    for k in 1..200 {
        let kf = T::from_usize_lossy(k);
        u = u * q / (kf * (kf + T::one()));
        hk = hk + kf.recip();
        let hk1 = hk + (kf + T::one()).recip();
        psi_sum = -gamma - gamma + hk + hk1;
        i1s = i1s + u;
        let term = u * psi_sum;
        acc1 = acc1 + term;
        if term.norm() <= T::epsilon() * T::lit(0.01) * acc1.norm() {
            break;
        }
    }
    let i1 = half * i1s;
    let k1 = z.inv() + log_half * i1 - z * T::lit(0.25) * acc1;
    (k0, k1)
}

/// Steed's continued fraction for `K_0`, `K_1`, moderate `|z|`.
fn steed_k01<T: Real>(z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);
    let a1 = T::lit(0.25);
    let mut b = (one + z) * two;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex::new(T::zero(), T::zero());
    let mut q2 = one;
    let mut q = Complex::new(a1, T::zero());
    let mut c = Complex::new(a1, T::zero());
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 2..CF_MAX_ITER {
        let fi = T::from_usize_lossy(i);
        a = a - two * (fi - T::one());
        c = -c * a / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q = q + c * qnew;
        b = b + two;
        d = (b + d * a).inv();
        delh = (b * d - one) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if dels.norm() < T::epsilon() * T::lit(0.5) * s.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "K continued fraction",
            iterations: CF_MAX_ITER,
            residual: f64::NAN,
        });
    }
    h = h * a1;
    let phase = (-imag_unit::<T>() * z.im).exp();
    let k0 = (Complex::new(T::PI(), T::zero()) / (z * two)).sqrt() / s * phase;
    let k1 = k0 * (z + T::lit(0.5) - h) / z;
    Ok((k0, k1))
}

/// Hankel asymptotic series, scaled by `exp(Re z)`.
fn asymptotic_k<T: Real>(nu: u32, z: Complex<T>) -> Complex<T> {
    let mu = T::lit(4.0 * (nu as f64) * (nu as f64));
    let eight_z = z * T::lit(8.0);
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    let mut last = T::infinity();
    for k in 1..200 {
        let odd = T::from_usize_lossy(2 * k - 1);
        let next = term * (mu - odd * odd) / (eight_z * T::from_usize_lossy(k));
        let mag = next.norm();
        if mag > last {
            break;
        }
        term = next;
        sum = sum + term;
        last = mag;
        if mag <= T::epsilon() * T::lit(0.01) * sum.norm() {
            break;
        }
    }
    let phase = (-imag_unit::<T>() * z.im).exp();
    (Complex::new(T::PI(), T::zero()) / (z * T::lit(2.0))).sqrt() * sum * phase
}
