//! Compensated (double-double) arithmetic.
//!
//! A [`Dd`] stores a real number as an unevaluated sum `hi + lo` of two
//! doubles with `|lo| ≤ ½ulp(hi)`, giving ≈106 bits of significand. The
//! crate uses it internally wherever plain doubles measurably lose the
//! contract tolerances: Newton polishing of characteristic-polynomial roots,
//! inverse iteration for eigenvectors, and the quadrature weight/defect
//! pipeline, where intermediate polynomial values reach ~1e15 while weights
//! and defects live near 1e-16.
//!
//! The algorithms are the classical error-free transformations (two_sum,
//! Dekker split / two_prod) and the standard double-double kernels built on
//! them. No FMA is assumed.

use num_complex::Complex64;

/// Error-free sum: returns `(s, e)` with `s = fl(a+b)` and `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| ≥ |b|` (or a = 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Dekker split of a double into high and low 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    // 2^27 + 1; valid while |a| < 2^996, which all call sites guarantee by
    // keeping working values scaled.
    let t = 134217729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Error-free product: returns `(p, e)` with `p = fl(a·b)` and `a·b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// Double-double real number: the unevaluated sum `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles as a double-double.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    /// Nearest double (the pair is kept normalized, so this is `hi`).
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    /// Full-accuracy addition (`ieee_add` of the QD library).
    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, other);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, other);
        let p2 = p2 + self.lo * other;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn scale_pow2(self, f: f64) -> Dd {
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of a negative double-double");
        // One Newton step on the double estimate doubles its precision.
        let x0 = self.hi.sqrt();
        let diff = self.sub(Dd::from_prod(x0, x0));
        Dd::from_f64(x0).add_f64(diff.hi / (2.0 * x0))
    }
}

/// Complex number with double-double real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: DdComplex = DdComplex { re: Dd::ONE, im: Dd::ZERO };

    #[inline]
    pub fn from_c64(z: Complex64) -> DdComplex {
        DdComplex { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn add(self, other: DdComplex) -> DdComplex {
        DdComplex { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    #[inline]
    pub fn sub(self, other: DdComplex) -> DdComplex {
        DdComplex { re: self.re.sub(other.re), im: self.im.sub(other.im) }
    }

    #[inline]
    pub fn mul(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[inline]
    pub fn mul_dd(self, s: Dd) -> DdComplex {
        DdComplex { re: self.re.mul(s), im: self.im.mul(s) }
    }

    #[inline]
    pub fn mul_f64(self, s: f64) -> DdComplex {
        DdComplex { re: self.re.mul_f64(s), im: self.im.mul_f64(s) }
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn scale_pow2(self, f: f64) -> DdComplex {
        DdComplex { re: self.re.scale_pow2(f), im: self.im.scale_pow2(f) }
    }

    /// Smith's algorithm, carried out in double-double.
    pub fn div(self, other: DdComplex) -> DdComplex {
        if other.im.hi.abs() <= other.re.hi.abs() {
            let t = other.im.div(other.re);
            let den = other.re.add(other.im.mul(t));
            DdComplex {
                re: self.re.add(self.im.mul(t)).div(den),
                im: self.im.sub(self.re.mul(t)).div(den),
            }
        } else {
            let t = other.re.div(other.im);
            let den = other.im.add(other.re.mul(t));
            DdComplex {
                re: self.re.mul(t).add(self.im).div(den),
                im: self.im.mul(t).sub(self.re).div(den),
            }
        }
    }

    #[inline]
    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    #[inline]
    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }
}
