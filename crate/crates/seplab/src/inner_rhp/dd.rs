//! Minimal double-double arithmetic (≈ 32 significant digits) and a complex
//! Airy Maclaurin series on top of it.
//!
//! Used only where a quantity is an O(1) combination of exponentially large
//! terms — jump matrices between adjacent sectors compare a recessive Airy
//! vector against dominant ones, which loses e^{2|Re θ|} relative accuracy.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 { -self } else { self }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: Cdd = Cdd { re: Dd::ONE, im: Dd::ZERO };

    pub const fn new(re: Dd, im: Dd) -> Self {
        Cdd { re, im }
    }

    pub fn from_c64(z: num_complex::Complex64) -> Self {
        Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, s: Dd) -> Self {
        Cdd { re: self.re * s, im: self.im * s }
    }

    pub fn conj(self) -> Self {
        Cdd { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().to_f64().sqrt()
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, o: Cdd) -> Cdd {
        let d = o.norm_sqr();
        let n = self * o.conj();
        Cdd { re: n.re / d, im: n.im / d }
    }
}

pub const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
pub const AIP0: Dd = Dd::new(-0.2588194037928068, 2.522243111610832e-17);
pub const SIX_M13: Dd = Dd::new(0.5503212081491045, -9.851067964905209e-18);
pub const SQRT3_2: Dd = Dd::new(0.8660254037844386, 5.0175421109034514e-17);
pub const HALF: Dd = Dd::new(0.5, 0.0);

/// e^{2πi/3}.
pub fn omega() -> Cdd {
    Cdd::new(-HALF, SQRT3_2)
}

/// e^{iπ/6}.
pub fn e_i_pi_6() -> Cdd {
    Cdd::new(SQRT3_2, HALF)
}

pub fn i_unit() -> Cdd {
    Cdd::new(Dd::ZERO, Dd::ONE)
}

fn div_small(z: Cdd, k: f64) -> Cdd {
    let d = Dd::from_f64(k);
    Cdd { re: z.re / d, im: z.im / d }
}

/// (Ai(z), Ai′(z)) by the Maclaurin series in double-double; intended for |z| ≲ 10.
pub fn airy_maclaurin(z: Cdd) -> (Cdd, Cdd) {
    let z3 = z * z * z;
    let mut t = Cdd::ONE;
    let mut s = z;
    let mut p = (z * z).scale(HALF);
    let mut q = Cdd::ONE;
    let (mut f, mut g, mut fp, mut gp) = (t, s, p, q);
    for k in 1..400 {
        let kf = k as f64;
        t = div_small(t * z3, (3.0 * kf - 1.0) * (3.0 * kf));
        s = div_small(s * z3, (3.0 * kf + 1.0) * (3.0 * kf));
        q = div_small(q * z3, (3.0 * kf - 2.0) * (3.0 * kf));
        if k >= 2 {
            p = div_small(p * z3, (3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp = fp + p;
        }
        f = f + t;
        g = g + s;
        gp = gp + q;
        let size = f.norm() + g.norm() + fp.norm() + gp.norm();
        if k > 3 && t.norm() + s.norm() + p.norm() + q.norm() < 1e-34 * size {
            break;
        }
    }
    (f.scale(AI0) + g.scale(AIP0), fp.scale(AI0) + gp.scale(AIP0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beats_double() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let x = Dd::from_f64(1.0) + Dd::from_f64(1e-20);
        assert_eq!((x - Dd::ONE).to_f64(), 1e-20);
    }

    #[test]
    fn maclaurin_matches_f64_airy() {
        for z in [num_complex::Complex64::new(1.0, 2.0), num_complex::Complex64::new(-3.0, 0.5)] {
            let (a, d) = airy_maclaurin(Cdd::from_c64(z));
            let (a0, d0) = super::super::airy::airy_eval(z);
            assert!((a.to_c64() - a0).norm() < 1e-13);
            assert!((d.to_c64() - d0).norm() < 1e-13);
        }
    }

    #[test]
    fn recessive_value_at_seven() {
        // Ai(7) ≈ 6.9220e-8 requires cancellation of ~1e5-sized terms.
        let (a, _) = airy_maclaurin(Cdd::from_c64(num_complex::Complex64::new(7.0, 0.0)));
        let (b, _) = super::super::airy::airy_eval(num_complex::Complex64::new(7.0, 0.0));
        assert!(((a.to_c64() - b) / b).norm() < 1e-11);
    }
}
