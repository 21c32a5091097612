//! Three-term recurrences with overflow-guarded evaluation.
//!
//! Two intertwined sequences are evaluated:
//!
//! * the orthonormal-normalization sequence
//!   `P_1 = 1`, `P_2 = (z − β_1)/α_1`,
//!   `P_{n+1} = ((z − β_n)·P_n − α_{n−1}·P_{n−1})/α_n`, which requires all
//!   off-diagonals below the top index to be nonzero; and
//! * the characteristic polynomials of the leading principal submatrices,
//!   `Q_0 = 1`, `Q_1 = β_1 − z`, `Q_k = (β_k − z)·Q_{k−1} − α²_{k−1}·Q_{k−2}`,
//!   whose zeros are the eigenvalues of the k×k section and whose leading
//!   coefficient is exactly (−1)^k.
//!
//! The two are proportional: `α_1⋯α_n·P_{n+1}(z) = (−1)^n·Q_n(z)`
//! ([`relate_p_to_charpoly`] measures how well the floating-point evaluations
//! honor this).
//!
//! Both sequences grow like products of the inputs and overflow `f64` well
//! below the sizes this crate supports, so every evaluator works with
//! [`ScaledPolyValue`]s — a complex mantissa times an exact power of two —
//! and renormalizes its running registers whenever they drift past 2^±512.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::coefficients::CoefficientFamily;
use crate::dd::DdComplex;
use crate::error::{Error, Result};

/// Closed-form expansion is capped here; beyond it coefficients leave the
/// comfortable f64 range and evaluation should go through the recurrences.
pub const MAX_COEFFICIENT_ORDER: usize = 64;

/// Exact power of two as f64 (finite for −1074 ≤ k ≤ 1023).
#[inline]
pub(crate) fn pow2(k: i64) -> f64 {
    if k >= -1022 {
        debug_assert!(k <= 1023);
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        // subnormal range, build in two steps
        debug_assert!(k >= -1074);
        f64::from_bits(1u64 << 52) * pow2(k + 1022)
    }
}

/// floor(log2 |x|) for finite nonzero x.
#[inline]
pub(crate) fn exponent_of(x: f64) -> i64 {
    let bits = x.abs().to_bits();
    let e = (bits >> 52) as i64;
    if e == 0 {
        // subnormal: renormalize by 2^200 first
        let bits = (x.abs() * pow2(200)).to_bits();
        ((bits >> 52) as i64) - 1023 - 200
    } else {
        e - 1023
    }
}

/// A complex value stored as `mantissa · 2^exponent` with the mantissa kept
/// in a fixed window (max component magnitude in [0.5, 1), so the modulus is
/// in [0.5, 2)). The power-of-two scaling is exact, which keeps equality and
/// ratios well defined across the full dynamic range of the recurrences.
#[derive(Debug, Clone, Copy)]
pub struct ScaledPolyValue {
    mantissa: Complex64,
    exponent: i64,
}

impl ScaledPolyValue {
    /// Build from an unnormalized mantissa and exponent.
    pub fn new(mantissa: Complex64, exponent: i64) -> Self {
        let mut v = ScaledPolyValue { mantissa, exponent };
        v.normalize();
        v
    }

    pub fn zero() -> Self {
        ScaledPolyValue { mantissa: Complex64::new(0.0, 0.0), exponent: 0 }
    }

    pub fn one() -> Self {
        ScaledPolyValue { mantissa: Complex64::new(0.5, 0.0), exponent: 1 }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    fn normalize(&mut self) {
        let m = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if m == 0.0 {
            self.exponent = 0;
            return;
        }
        debug_assert!(m.is_finite(), "non-finite mantissa in ScaledPolyValue");
        let k = exponent_of(m) + 1;
        // Two-chunk scaling keeps the factors finite even from subnormals.
        let h1 = -k / 2;
        let h2 = -k - h1;
        self.mantissa = self.mantissa * pow2(h1) * pow2(h2);
        self.exponent += k;
    }

    /// Collapse to a plain complex number; saturates to ±∞ / 0 outside the
    /// representable range.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        if self.exponent > 1100 {
            return self.mantissa * f64::INFINITY;
        }
        if self.exponent < -1150 {
            return Complex64::new(0.0, 0.0);
        }
        let h1 = self.exponent / 2;
        let h2 = self.exponent - h1;
        self.mantissa * pow2(h1) * pow2(h2)
    }

    /// Modulus as f64; saturates like [`Self::to_complex`].
    pub fn abs(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exponent > 1100 {
            return f64::INFINITY;
        }
        if self.exponent < -1150 {
            return 0.0;
        }
        let h1 = self.exponent / 2;
        let h2 = self.exponent - h1;
        self.mantissa.norm() * pow2(h1) * pow2(h2)
    }

    /// log2 of the modulus (−∞ for zero); never overflows.
    pub fn abs_log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().log2() + self.exponent as f64
    }

    /// The non-negative real scaled value |self|.
    pub fn abs_scaled(&self) -> ScaledPolyValue {
        ScaledPolyValue::new(Complex64::new(self.mantissa.norm(), 0.0), self.exponent)
    }
}

impl PartialEq for ScaledPolyValue {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.exponent == other.exponent && self.mantissa == other.mantissa
    }
}

impl Add for ScaledPolyValue {
    type Output = ScaledPolyValue;
    fn add(self, rhs: ScaledPolyValue) -> ScaledPolyValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        // Align the smaller exponent onto the larger.
        let (big, small) = if self.exponent >= rhs.exponent { (self, rhs) } else { (rhs, self) };
        let shift = small.exponent - big.exponent; // ≤ 0
        if shift < -1100 {
            return big;
        }
        let h1 = shift / 2;
        let h2 = shift - h1;
        ScaledPolyValue::new(big.mantissa + small.mantissa * pow2(h1) * pow2(h2), big.exponent)
    }
}

impl Sub for ScaledPolyValue {
    type Output = ScaledPolyValue;
    fn sub(self, rhs: ScaledPolyValue) -> ScaledPolyValue {
        self + (-rhs)
    }
}

impl Neg for ScaledPolyValue {
    type Output = ScaledPolyValue;
    fn neg(self) -> ScaledPolyValue {
        ScaledPolyValue { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl Mul for ScaledPolyValue {
    type Output = ScaledPolyValue;
    fn mul(self, rhs: ScaledPolyValue) -> ScaledPolyValue {
        if self.is_zero() || rhs.is_zero() {
            return ScaledPolyValue::zero();
        }
        ScaledPolyValue::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledPolyValue {
    type Output = ScaledPolyValue;
    fn div(self, rhs: ScaledPolyValue) -> ScaledPolyValue {
        debug_assert!(!rhs.is_zero(), "division by a zero ScaledPolyValue");
        if self.is_zero() {
            return ScaledPolyValue::zero();
        }
        ScaledPolyValue::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

/// Rescale running recurrence registers onto a shared power-of-two exponent
/// whenever their largest component leaves [2^−512, 2^512].
fn rescale_registers(values: &mut [Complex64], exp: &mut i64) {
    let mut m = 0f64;
    for v in values.iter() {
        m = m.max(v.re.abs()).max(v.im.abs());
    }
    if m == 0.0 {
        return;
    }
    debug_assert!(m.is_finite(), "recurrence register overflowed between rescales");
    if m > pow2(512) || m < pow2(-512) {
        let k = exponent_of(m) + 1;
        let h1 = -k / 2;
        let h2 = -k - h1;
        for v in values.iter_mut() {
            *v = *v * pow2(h1) * pow2(h2);
        }
        *exp += k;
    }
}

/// The values (and optionally derivatives) of `P_1 .. P_N` at one point.
#[derive(Debug, Clone)]
pub struct PolySequence {
    z: Complex64,
    values: Vec<ScaledPolyValue>,
    derivs: Option<Vec<ScaledPolyValue>>,
}

impl PolySequence {
    /// Evaluation point.
    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Number of stored values (the `N` of the evaluation).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `P_n` for `1 ≤ n ≤ len` (panics outside that range).
    pub fn value(&self, n: usize) -> ScaledPolyValue {
        assert!(n >= 1 && n <= self.values.len(), "index {n} outside 1..={}", self.values.len());
        self.values[n - 1]
    }

    /// `P'_n`, when derivatives were requested.
    pub fn deriv(&self, n: usize) -> Option<ScaledPolyValue> {
        self.derivs.as_ref().map(|d| {
            assert!(n >= 1 && n <= d.len(), "index {n} outside 1..={}", d.len());
            d[n - 1]
        })
    }

    pub fn values(&self) -> &[ScaledPolyValue] {
        &self.values
    }
}

/// Evaluate `P_1 .. P_{n_max}` (orthonormal normalization) at `z`.
///
/// Fails with [`Error::InvalidParameter`] when any required coefficient is
/// undefined or when an off-diagonal `α_k`, `k < n_max`, is zero (the
/// recurrence divides by it).
pub fn eval_p_sequence(
    family: &CoefficientFamily,
    n_max: usize,
    z: Complex64,
    with_derivative: bool,
) -> Result<PolySequence> {
    assert!(n_max >= 1, "sequence length must be at least 1");
    let mut values = Vec::with_capacity(n_max);
    let mut derivs = if with_derivative { Some(Vec::with_capacity(n_max)) } else { None };

    let mut exp: i64 = 0;
    let mut p_prev = Complex64::new(0.0, 0.0); // P_0 := 0
    let mut p_cur = Complex64::new(1.0, 0.0); // P_1
    let mut d_prev = Complex64::new(0.0, 0.0);
    let mut d_cur = Complex64::new(0.0, 0.0); // P'_1 = 0
    let mut alpha_prev = Complex64::new(0.0, 0.0); // α_0, multiplies P_0 = 0

    values.push(ScaledPolyValue::new(p_cur, exp));
    if let Some(d) = derivs.as_mut() {
        d.push(ScaledPolyValue::new(d_cur, exp));
    }

    for n in 1..n_max {
        let pair = family.coeffs(n)?;
        if pair.alpha == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter(format!(
                "off-diagonal coefficient is zero at index {n}; \
                 the orthonormal recurrence divides by it"
            )));
        }
        let zb = z - pair.beta;
        let p_next = (zb * p_cur - alpha_prev * p_prev) / pair.alpha;
        let d_next = (zb * d_cur + p_cur - alpha_prev * d_prev) / pair.alpha;
        p_prev = p_cur;
        p_cur = p_next;
        d_prev = d_cur;
        d_cur = d_next;
        alpha_prev = pair.alpha;

        let mut regs = [p_prev, p_cur, d_prev, d_cur];
        rescale_registers(&mut regs, &mut exp);
        [p_prev, p_cur, d_prev, d_cur] = regs;

        values.push(ScaledPolyValue::new(p_cur, exp));
        if let Some(d) = derivs.as_mut() {
            d.push(ScaledPolyValue::new(d_cur, exp));
        }
    }

    Ok(PolySequence { z, values, derivs })
}

/// Characteristic polynomial `Q_n` of the leading n×n section, evaluated at `z`.
pub fn eval_char_poly(family: &CoefficientFamily, n: usize, z: Complex64) -> Result<ScaledPolyValue> {
    eval_char_poly_with_derivative(family, n, z).map(|(v, _)| v)
}

/// `(Q_n(z), Q'_n(z))` in one pass.
pub fn eval_char_poly_with_derivative(
    family: &CoefficientFamily,
    n: usize,
    z: Complex64,
) -> Result<(ScaledPolyValue, ScaledPolyValue)> {
    let mut exp: i64 = 0;
    let mut q_pp = Complex64::new(0.0, 0.0); // Q_{-1} := 0
    let mut q_p = Complex64::new(1.0, 0.0); // Q_0
    let mut d_pp = Complex64::new(0.0, 0.0);
    let mut d_p = Complex64::new(0.0, 0.0); // Q'_0 = 0
    let mut alpha_prev_sq = Complex64::new(0.0, 0.0); // α_0², multiplies Q_{-1} = 0

    for k in 1..=n {
        let pair = family.coeffs(k)?;
        let bz = pair.beta - z;
        let q_next = bz * q_p - alpha_prev_sq * q_pp;
        let d_next = bz * d_p - q_p - alpha_prev_sq * d_pp;
        q_pp = q_p;
        q_p = q_next;
        d_pp = d_p;
        d_p = d_next;
        alpha_prev_sq = pair.alpha * pair.alpha;

        let mut regs = [q_pp, q_p, d_pp, d_p];
        rescale_registers(&mut regs, &mut exp);
        [q_pp, q_p, d_pp, d_p] = regs;
    }

    Ok((ScaledPolyValue::new(q_p, exp), ScaledPolyValue::new(d_p, exp)))
}

/// Coefficients of `Q_n` in ascending order (`result[j]` multiplies `z^j`,
/// `result[n]` is exactly (−1)^n). Capped at [`MAX_COEFFICIENT_ORDER`].
pub fn char_poly_coefficients(family: &CoefficientFamily, n: usize) -> Result<Vec<Complex64>> {
    if n > MAX_COEFFICIENT_ORDER {
        return Err(Error::SizeExceeded(format!(
            "closed-form coefficients are limited to order {MAX_COEFFICIENT_ORDER}, got {n}"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut q_pp = vec![Complex64::new(1.0, 0.0)]; // Q_0
    if n == 0 {
        return Ok(q_pp);
    }
    let first = family.coeffs(1)?;
    let mut q_p = vec![first.beta, Complex64::new(-1.0, 0.0)]; // Q_1
    let mut alpha_prev_sq = first.alpha * first.alpha;
    for k in 2..=n {
        let pair = family.coeffs(k)?;
        // Q_k = (β_k − z)·Q_{k−1} − α²_{k−1}·Q_{k−2}
        let mut next = vec![zero; k + 1];
        for (j, &cj) in q_p.iter().enumerate() {
            next[j] += pair.beta * cj;
            next[j + 1] -= cj;
        }
        for (j, &cj) in q_pp.iter().enumerate() {
            next[j] -= alpha_prev_sq * cj;
        }
        q_pp = q_p;
        q_p = next;
        alpha_prev_sq = pair.alpha * pair.alpha;
    }
    Ok(q_p)
}

/// Relative residual of the proportionality
/// `α_1⋯α_n·P_{n+1}(z) = (−1)^n·Q_n(z)` at one point:
/// `|lhs − rhs| / (1 + |rhs|)`.
pub fn relate_p_to_charpoly(family: &CoefficientFamily, n: usize, z: Complex64) -> Result<f64> {
    assert!(n >= 1, "the proportionality needs n >= 1");
    let seq = eval_p_sequence(family, n + 1, z, false)?;
    let q = eval_char_poly(family, n, z)?;
    let mut prod = ScaledPolyValue::one();
    for k in 1..=n {
        prod = prod * ScaledPolyValue::from_complex(family.coeffs(k)?.alpha);
    }
    let lhs = prod * seq.value(n + 1);
    let rhs = if n % 2 == 0 { q } else { -q };
    let num = (lhs - rhs).abs_scaled();
    let den = ScaledPolyValue::one() + rhs.abs_scaled();
    Ok((num / den).abs())
}

// ---------------------------------------------------------------------------
// Double-double kernels (crate-internal).
//
// The evaluation condition number of Q_n near its extreme zeros reaches ~1e16
// by n ≈ 30 for small λ, so root polishing and quadrature construction run
// the same recurrences in double-double. The polynomial being evaluated is
// *the same one* as in the f64 path: coefficients are the f64 matrix entries,
// converted exactly.
// ---------------------------------------------------------------------------

fn rescale_registers_dd(values: &mut [DdComplex], exp: &mut i64) {
    let mut m = 0f64;
    for v in values.iter() {
        m = m.max(v.re.hi.abs()).max(v.im.hi.abs());
    }
    if m == 0.0 {
        return;
    }
    debug_assert!(m.is_finite());
    if m > pow2(512) || m < pow2(-512) {
        let k = exponent_of(m) + 1;
        let h1 = -k / 2;
        let h2 = -k - h1;
        for v in values.iter_mut() {
            *v = v.scale_pow2(pow2(h1)).scale_pow2(pow2(h2));
        }
        *exp += k;
    }
}

/// `(Q_n(z), Q'_n(z))` as double-double mantissas on one shared power-of-two
/// exponent, so their ratio is exactly the Newton correction.
pub(crate) fn charpoly_value_deriv_dd(
    family: &CoefficientFamily,
    n: usize,
    z: DdComplex,
) -> Result<(DdComplex, DdComplex, i64)> {
    let mut exp: i64 = 0;
    let mut q_pp = DdComplex::ZERO;
    let mut q_p = DdComplex::ONE;
    let mut d_pp = DdComplex::ZERO;
    let mut d_p = DdComplex::ZERO;
    let mut alpha_prev_sq = DdComplex::ZERO;

    for k in 1..=n {
        let pair = family.coeffs(k)?;
        let bz = DdComplex::from_c64(pair.beta).sub(z);
        let q_next = bz.mul(q_p).sub(alpha_prev_sq.mul(q_pp));
        let d_next = bz.mul(d_p).sub(q_p).sub(alpha_prev_sq.mul(d_pp));
        q_pp = q_p;
        q_p = q_next;
        d_pp = d_p;
        d_p = d_next;
        let a = DdComplex::from_c64(pair.alpha);
        alpha_prev_sq = a.mul(a);

        let mut regs = [q_pp, q_p, d_pp, d_p];
        rescale_registers_dd(&mut regs, &mut exp);
        [q_pp, q_p, d_pp, d_p] = regs;
    }

    Ok((q_p, d_p, exp))
}

/// One Newton correction `Q_n(z)/Q'_n(z)` in double-double, or `None` where
/// the derivative vanishes.
pub(crate) fn charpoly_newton_correction_dd(
    family: &CoefficientFamily,
    n: usize,
    z: DdComplex,
) -> Result<Option<DdComplex>> {
    let (q, dq, _) = charpoly_value_deriv_dd(family, n, z)?;
    if dq.re.hi == 0.0 && dq.im.hi == 0.0 {
        return Ok(None);
    }
    Ok(Some(q.div(dq)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::GribovParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gribov(mu: f64, lambda: f64) -> CoefficientFamily {
        CoefficientFamily::Gribov(GribovParams::real(mu, lambda))
    }

    #[test]
    fn scaled_value_normalization_window() {
        let v = ScaledPolyValue::from_complex(c(3.0, -4.0));
        let m = v.mantissa();
        let mx = m.re.abs().max(m.im.abs());
        assert!((0.5..1.0).contains(&mx));
        assert!((v.to_complex() - c(3.0, -4.0)).norm() == 0.0);
        assert_eq!(ScaledPolyValue::one().to_complex(), c(1.0, 0.0));
        assert!(ScaledPolyValue::zero().is_zero());
    }

    #[test]
    fn scaled_arithmetic_identities() {
        let a = ScaledPolyValue::from_complex(c(1.5, -2.0));
        let b = ScaledPolyValue::from_complex(c(-0.25, 3.0));
        assert_eq!((a + b).to_complex(), c(1.25, 1.0));
        assert_eq!((a - a).to_complex(), c(0.0, 0.0));
        assert!((a - a).is_zero());
        let prod = (a * b).to_complex();
        assert!((prod - c(1.5, -2.0) * c(-0.25, 3.0)).norm() < 1e-15);
        let q = (a / b) * b;
        assert!((q.to_complex() - a.to_complex()).norm() < 1e-15);
    }

    #[test]
    fn scaled_values_survive_f64_overflow() {
        let big = ScaledPolyValue::from_real(1e300);
        let sq = big * big; // 1e600: far outside f64
        assert!(sq.to_complex().re.is_infinite());
        assert!((sq.abs_log2() - 600.0 * 10f64.log2()).abs() < 1e-9);
        let back = sq / big;
        assert!(((back.to_complex().re - 1e300) / 1e300).abs() < 1e-15);
        // Addition across a huge exponent gap keeps the dominant term.
        let tiny = ScaledPolyValue::from_real(1e-300);
        assert_eq!(sq + tiny, sq);
    }

    #[test]
    fn power_of_two_helper_is_exact() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(10), 1024.0);
        assert_eq!(pow2(-1), 0.5);
        assert_eq!(pow2(1023), f64::MAX / (2.0 - f64::EPSILON));
        assert_eq!(pow2(-1074), f64::from_bits(1));
        assert_eq!(exponent_of(1.0), 0);
        assert_eq!(exponent_of(0.75), -1);
        assert_eq!(exponent_of(f64::from_bits(1)), -1074);
    }

    #[test]
    fn first_values_match_closed_forms() {
        // μ = 1, λ = 1 at z = 0:
        //   P_2(0) = (0 − 1)/(i√2) = i/√2
        //   P_3(0) = −√(2/3)
        let fam = gribov(1.0, 1.0);
        let seq = eval_p_sequence(&fam, 3, c(0.0, 0.0), false).unwrap();
        let p2 = seq.value(2).to_complex();
        assert!((p2 - c(0.0, 0.70710678118654752)).norm() < 1e-15);
        let p3 = seq.value(3).to_complex();
        assert!((p3 - c(-0.81649658092772603, 0.0)).norm() < 1e-15);
        assert_eq!(seq.value(1).to_complex(), c(1.0, 0.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let fam = gribov(1.0, 0.35);
        let z = c(1.3, 0.4);
        let h = 1e-6;
        let seq = eval_p_sequence(&fam, 8, z, true).unwrap();
        let plus = eval_p_sequence(&fam, 8, z + c(h, 0.0), false).unwrap();
        let minus = eval_p_sequence(&fam, 8, z - c(h, 0.0), false).unwrap();
        for n in 2..=8 {
            let fd = (plus.value(n).to_complex() - minus.value(n).to_complex()) / (2.0 * h);
            let an = seq.deriv(n).unwrap().to_complex();
            assert!((fd - an).norm() <= 1e-5 * (1.0 + an.norm()), "P'_{n} mismatch");
        }
        let (q, dq) = eval_char_poly_with_derivative(&fam, 8, z).unwrap();
        let qp = eval_char_poly(&fam, 8, z + c(h, 0.0)).unwrap().to_complex();
        let qm = eval_char_poly(&fam, 8, z - c(h, 0.0)).unwrap().to_complex();
        let fd = (qp - qm) / (2.0 * h);
        assert!((fd - dq.to_complex()).norm() <= 1e-5 * (1.0 + dq.to_complex().norm()));
        assert!(!q.is_zero());
    }

    #[test]
    fn quadratic_char_poly_coefficients() {
        // μ = 1, λ = 1, n = 2: Q_2(z) = z² − 3z + (2 + 2λ²) = z² − 3z + 4.
        let coeffs = char_poly_coefficients(&gribov(1.0, 1.0), 2).unwrap();
        assert_eq!(coeffs.len(), 3);
        assert!((coeffs[0] - c(4.0, 0.0)).norm() < 1e-14);
        assert!((coeffs[1] - c(-3.0, 0.0)).norm() < 1e-14);
        assert_eq!(coeffs[2], c(1.0, 0.0)); // leading coefficient exact
    }

    #[test]
    fn leading_coefficient_is_exactly_unit() {
        for n in 1..=12 {
            let coeffs = char_poly_coefficients(&gribov(1.0, 0.35), n).unwrap();
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(coeffs[n], c(expected, 0.0), "leading coefficient at n={n}");
        }
    }

    #[test]
    fn real_parameters_give_exactly_real_coefficients() {
        // α² = −λ²δ² is real, so every coefficient's imaginary part is 0.0.
        let coeffs = char_poly_coefficients(&gribov(1.0, 0.35), 12).unwrap();
        for (j, cj) in coeffs.iter().enumerate() {
            assert_eq!(cj.im, 0.0, "imaginary residue in coefficient {j}");
        }
    }

    #[test]
    fn coefficient_expansion_matches_recurrence_evaluation() {
        let fam = gribov(1.0, 0.35);
        let n = 10;
        let coeffs = char_poly_coefficients(&fam, n).unwrap();
        for &z in &[c(0.3, 0.1), c(2.0, -1.0), c(-4.0, 2.5), c(11.0, 0.0)] {
            let mut horner = Complex64::new(0.0, 0.0);
            for &cj in coeffs.iter().rev() {
                horner = horner * z + cj;
            }
            let direct = eval_char_poly(&fam, n, z).unwrap().to_complex();
            assert!(
                (horner - direct).norm() <= 1e-10 * (1.0 + direct.norm()),
                "mismatch at {z}"
            );
        }
    }

    #[test]
    fn coefficient_order_is_capped() {
        match char_poly_coefficients(&gribov(1.0, 0.1), 65) {
            Err(Error::SizeExceeded(_)) => {}
            other => panic!("expected SizeExceeded, got {other:?}"),
        }
    }

    #[test]
    fn proportionality_between_the_two_sequences() {
        for &(mu, lambda) in &[(1.0, 0.1), (1.0, 1.0), (2.0, 0.5)] {
            let fam = gribov(mu, lambda);
            for &z in &[c(0.7, 0.0), c(1.5, 2.0), c(-3.0, -0.5), c(25.0, 1.0)] {
                for n in [1, 2, 5, 20, 45] {
                    let r = relate_p_to_charpoly(&fam, n, z).unwrap();
                    // Both sides are exact identities; the residual only
                    // carries evaluation roundoff, which grows with the
                    // recurrence length (worst near interior points).
                    let tol = if n <= 5 { 1e-12 } else if n <= 20 { 1e-10 } else { 1e-9 };
                    assert!(r <= tol, "residual {r} at n={n}, z={z}, λ={lambda}");
                }
            }
        }
    }

    #[test]
    fn proportionality_for_complex_parameters() {
        let fam = CoefficientFamily::gribov(c(1.0, 0.5), c(0.2, 0.3));
        for n in [3, 10, 30] {
            let r = relate_p_to_charpoly(&fam, n, c(0.9, 1.1)).unwrap();
            assert!(r <= 1e-12, "residual {r} at n={n}");
        }
    }

    #[test]
    fn deep_sequences_stay_finite_in_scaled_form() {
        // At n = 200 and tiny λ the raw values are astronomically large;
        // the scaled representation must keep finite logs and the identity.
        let fam = gribov(1.0, 0.001);
        let seq = eval_p_sequence(&fam, 200, c(250.0, 1.0), false).unwrap();
        let top = seq.value(200);
        assert!(top.abs_log2().is_finite());
        assert!(top.abs_log2() > 1200.0, "expected growth far beyond f64 range");
        let r = relate_p_to_charpoly(&fam, 199, c(250.0, 1.0)).unwrap();
        assert!(r <= 1e-12, "identity should survive rescaling, got {r}");
    }

    #[test]
    fn zero_alpha_is_rejected_by_p_sequence_only() {
        let fam = gribov(1.0, 0.0);
        assert!(matches!(
            eval_p_sequence(&fam, 3, c(0.0, 0.0), false),
            Err(Error::InvalidParameter(_))
        ));
        // The characteristic polynomial needs no division: Q_n = ∏(βk − z).
        let q = eval_char_poly(&fam, 3, c(0.5, 0.0)).unwrap().to_complex();
        let expect = (1.0 - 0.5) * (2.0 - 0.5) * (3.0 - 0.5);
        assert!((q.re - expect).abs() < 1e-12 && q.im == 0.0);
    }

    #[test]
    fn dd_evaluation_agrees_with_f64_at_moderate_size() {
        let fam = gribov(1.0, 0.35);
        let z = c(2.345, -0.67);
        let (q, dq) = eval_char_poly_with_derivative(&fam, 12, z).unwrap();
        let (qd, dqd, exp) = charpoly_value_deriv_dd(&fam, 12, DdComplex::from_c64(z)).unwrap();
        let scale = pow2(exp / 2) * pow2(exp - exp / 2);
        assert!((qd.to_c64() * scale - q.to_complex()).norm() <= 1e-12 * q.abs());
        assert!((dqd.to_c64() * scale - dq.to_complex()).norm() <= 1e-12 * dq.abs());
    }

}
