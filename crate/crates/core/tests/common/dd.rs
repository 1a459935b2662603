//! Minimal double-double complex arithmetic for series oracles.

use num_complex::Complex64 as C;

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }
    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.hi / o.hi;
        Dd::new(q1).add(Dd::new(q2)).add(Dd::new(q3))
    }
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    pub fn abs_hi(self) -> f64 {
        self.hi.abs()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    pub fn from(z: C) -> Self {
        Cdd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }
    pub fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }
    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }
    pub fn scale_div(self, d: Dd) -> Cdd {
        Cdd { re: self.re.div(d), im: self.im.div(d) }
    }
    pub fn neg(self) -> Cdd {
        Cdd { re: self.re.neg(), im: self.im.neg() }
    }
    pub fn to_c(self) -> C {
        C::new(self.re.to_f64(), self.im.to_f64())
    }
    pub fn mag(self) -> f64 {
        self.re.abs_hi().hypot(self.im.abs_hi())
    }
}

/// `sum_k sign^k (z/2)^(m+2k) / (k! (m+k)!)`
fn series(m: u32, z: C, alternate: bool) -> C {
    let half = Cdd::from(z * 0.5);
    let mut lead = Cdd::from(C::new(1.0, 0.0));
    for j in 1..=m {
        lead = lead.mul(half).scale_div(Dd::new(j as f64));
    }
    let mut q = half.mul(half);
    if alternate {
        q = q.neg();
    }
    let mut term = lead;
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term = term.mul(q).scale_div(Dd::new(k as f64 * (m + k) as f64));
        sum = sum.add(term);
        if k > 10 && term.mag() < 1e-34 * sum.mag().max(1e-300) {
            break;
        }
        k += 1;
        if k > 5000 {
            break;
        }
    }
    sum.to_c()
}

pub fn series_i(m: u32, z: C) -> C {
    series(m, z, false)
}

pub fn series_j(m: u32, z: C) -> C {
    series(m, z, true)
}
