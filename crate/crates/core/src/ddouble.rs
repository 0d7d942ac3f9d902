//! Double-double arithmetic (about 32 significant digits) for the contour
//! quadrature, where integrand values of size `r^{k+1}` must cancel down to
//! integer matrix entries with sub-unit absolute error.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DD {
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

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sqrt(self) -> DD {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (p, e) = two_prod(ax, ax);
        let residual = (self - DD { hi: p, lo: e }).hi;
        let (s, t) = two_sum(ax, residual * x * 0.5);
        let (hi, lo) = quick_two_sum(s, t);
        DD { hi, lo }
    }

    pub fn powi(self, mut k: u32) -> DD {
        let mut result = DD::ONE;
        let mut base = self;
        while k > 0 {
            if k & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            k >>= 1;
        }
        result
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b * DD::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DD::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::from_f64(q3)
    }
}

/// Complex number over [`DD`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub const ZERO: CDD = CDD { re: DD::ZERO, im: DD::ZERO };
    pub const ONE: CDD = CDD { re: DD::ONE, im: DD::ZERO };

    pub fn new(re: DD, im: DD) -> CDD {
        CDD { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> CDD {
        CDD { re: DD::from_f64(re), im: DD::from_f64(im) }
    }

    pub fn scale(self, s: DD) -> CDD {
        CDD { re: self.re * s, im: self.im * s }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `e^{2πij/m}` for `j = 0..m`, `m` a power of two, built by half-angle
    /// recursion so that no libm trigonometry enters the nodes.
    pub fn roots_of_unity(m: usize) -> Vec<CDD> {
        assert!(m.is_power_of_two());
        let mut table = vec![CDD::ONE];
        // (cos, sin) of 2π/size for the current size
        let mut cos = DD::ONE;
        let mut sin = DD::ZERO;
        let mut size = 1;
        while size < m {
            size *= 2;
            let (c, s) = match size {
                2 => (-DD::ONE, DD::ZERO),
                4 => (DD::ZERO, DD::ONE),
                _ => {
                    let c = ((DD::ONE + cos) * DD::from_f64(0.5)).sqrt();
                    (c, sin / (c * DD::from_f64(2.0)))
                }
            };
            cos = c;
            sin = s;
            let step = CDD::new(c, s);
            let mut next = Vec::with_capacity(size);
            for w in &table {
                next.push(*w);
                next.push(*w * step);
            }
            table = next;
        }
        table
    }
}

impl Add for CDD {
    type Output = CDD;
    fn add(self, b: CDD) -> CDD {
        CDD { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for CDD {
    type Output = CDD;
    fn sub(self, b: CDD) -> CDD {
        CDD { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for CDD {
    type Output = CDD;
    fn mul(self, b: CDD) -> CDD {
        CDD {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for CDD {
    type Output = CDD;
    fn div(self, b: CDD) -> CDD {
        let denom = b.re * b.re + b.im * b.im;
        let num = self * CDD { re: b.re, im: -b.im };
        CDD { re: num.re / denom, im: num.im / denom }
    }
}
