//! Qualitative spectral analysis for real parameters μ > 0, λ ∈ ℝ.
//!
//! For real parameters the characteristic polynomials `Q_n` have exactly
//! real coefficients (leading term (−1)ⁿ), so their real zeros can be
//! isolated by sign bracketing. This module verifies the five classical
//! sign properties of that sequence, follows the smallest odd-degree zeros
//! `x₃ ≤ x₅ ≤ …` (all trapped in `[μ, x₂)` when `λ < μ/(2√2)`), extracts
//! the least real eigenvalue of a truncation, and tracks individual
//! eigenvalue trajectories `z_{k,n}` toward their large-n target `kμ`.

use num_complex::Complex64;

use crate::coefficients::{CoefficientFamily, GribovParams};
use crate::error::{Error, Result};
use crate::polyrec;
use crate::spectra::{self, SolverOptions};
use crate::operator::TridiagonalMatrix;
use crate::textfmt;

/// Uniform real sampling grid (inclusive endpoints).
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        assert!(points >= 2, "a grid needs at least two points");
        assert!(lo < hi, "grid bounds must be ordered");
        GridSpec { lo, hi, points }
    }

    /// The sample abscissae, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo + step * i as f64).collect()
    }

    pub fn describe(&self) -> String {
        format!("{} points on [{}, {}]", self.points, self.lo, self.hi)
    }
}

/// The five sign properties of the real-coefficient polynomial sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignProperty {
    /// (i) consecutive polynomials never vanish at the same point.
    NoSimultaneousVanishing,
    /// (ii) at a zero of `Q_{n−1}`, the product `Q_n·Q_{n−2}` is positive.
    PositiveProductAtZeros,
    /// (iii) `Q_n(x) > 0` for every `x < μ`.
    PositiveBelowMu,
    /// (iv) `(−1)ⁿ·Q_n(x) > 0` for every `x > nμ`.
    AlternatingAboveNMu,
    /// (v) on `[μ, nμ]`: once `Q_{n−1}` and `Q_{n−2}` agree in sign at a
    /// point, every later polynomial keeps that sign there.
    SignPropagation,
}

impl SignProperty {
    /// Roman-numeral identifier, "i" through "v".
    pub fn id(&self) -> &'static str {
        match self {
            SignProperty::NoSimultaneousVanishing => "i",
            SignProperty::PositiveProductAtZeros => "ii",
            SignProperty::PositiveBelowMu => "iii",
            SignProperty::AlternatingAboveNMu => "iv",
            SignProperty::SignPropagation => "v",
        }
    }
}

/// First failing sample of a sign property.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub x: f64,
    pub n: usize,
    /// The polynomial values witnessing the failure (saturating f64).
    pub values: Vec<f64>,
}

/// Outcome of checking one sign property over a grid / zero set.
#[derive(Debug, Clone)]
pub struct SignReport {
    pub property: SignProperty,
    pub grid: String,
    pub pass: bool,
    /// Present exactly when `pass` is false.
    pub counterexample: Option<Counterexample>,
}

impl SignReport {
    fn passing(property: SignProperty, grid: String) -> Self {
        SignReport { property, grid, pass: true, counterexample: None }
    }

    fn failing(property: SignProperty, grid: String, ce: Counterexample) -> Self {
        SignReport { property, grid, pass: false, counterexample: Some(ce) }
    }
}

/// Sign of a real-coefficient polynomial value: −1, 0, or +1.
fn sign_of(v: &polyrec::ScaledPolyValue) -> f64 {
    if v.is_zero() {
        0.0
    } else {
        v.mantissa().re.signum()
    }
}

/// Signed f64 view of a scaled value (saturates on overflow; the sign is
/// always preserved, which is all the reports need).
fn signed(v: &polyrec::ScaledPolyValue) -> f64 {
    v.to_complex().re
}

/// `Q_n(x)` at a real point.
fn q_at(family: &CoefficientFamily, n: usize, x: f64) -> Result<polyrec::ScaledPolyValue> {
    polyrec::eval_char_poly(family, n, Complex64::new(x, 0.0))
}

/// Real zeros of `Q_m` on `[lo, hi]`: sign brackets on a uniform grid of
/// `max(1024, 64m)` cells, bisection, then a short guarded Newton polish.
/// Even-multiplicity zeros (or pairs inside one cell) are invisible to sign
/// bracketing; the real parameter ranges exercised here have simple zeros.
fn real_zeros(family: &CoefficientFamily, m: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    assert!(m >= 1 && lo < hi);
    let cells = 1024usize.max(64 * m);
    let step = (hi - lo) / cells as f64;
    let mut zeros: Vec<f64> = Vec::new();
    let mut x_prev = lo;
    let mut s_prev = sign_of(&q_at(family, m, lo)?);
    if s_prev == 0.0 {
        zeros.push(lo);
    }
    for i in 1..=cells {
        let x = if i == cells { hi } else { lo + step * i as f64 };
        let s = sign_of(&q_at(family, m, x)?);
        if s == 0.0 {
            zeros.push(x);
        } else if s_prev * s < 0.0 {
            zeros.push(refine_zero(family, m, x_prev, x, s_prev)?);
        }
        x_prev = x;
        s_prev = s;
    }
    // Merge duplicates from exact grid hits adjacent to brackets.
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|b, a| (*b - *a).abs() <= 1e-10 * (1.0 + a.abs()));
    Ok(zeros)
}

/// Bisect a sign bracket down to ~1e−9 width, then Newton-polish inside it.
fn refine_zero(
    family: &CoefficientFamily,
    m: usize,
    mut a: f64,
    mut b: f64,
    s_lo: f64,
) -> Result<f64> {
    while b - a > 1e-9 * (1.0 + a.abs()) {
        let mid = 0.5 * (a + b);
        let s = sign_of(&q_at(family, m, mid)?);
        if s == 0.0 {
            return Ok(mid);
        }
        if s == s_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    let width = b - a;
    let mut x = 0.5 * (a + b);
    for _ in 0..8 {
        let (q, dq) =
            polyrec::eval_char_poly_with_derivative(family, m, Complex64::new(x, 0.0))?;
        if q.is_zero() || dq.is_zero() {
            break;
        }
        let dx = (q / dq).to_complex().re;
        let next = x - dx;
        if !next.is_finite() || next < a - width || next > b + width {
            break;
        }
        x = next;
        if dx.abs() <= 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Local magnitude of the three-term recurrence at step `n`, used to decide
/// whether a value is "numerically zero" relative to what produced it:
/// `|β_n − x|·|Q_{n−1}| + |α²_{n−1}|·|Q_{n−2}|`.
fn recurrence_scale(
    family: &CoefficientFamily,
    n: usize,
    x: f64,
    q_nm1: &polyrec::ScaledPolyValue,
    q_nm2: &polyrec::ScaledPolyValue,
) -> Result<f64> {
    let pair_n = family.coeffs(n)?;
    let alpha_prev_sq = if n >= 2 {
        let p = family.coeffs(n - 1)?;
        (p.alpha * p.alpha).norm()
    } else {
        0.0
    };
    Ok((pair_n.beta.re - x).abs() * q_nm1.abs() + alpha_prev_sq * q_nm2.abs())
}

/// Check the five sign properties for `Q_2 … Q_{n_max}` with real `μ > 0`
/// and real `λ`. Properties i–ii are checked at the isolated real zeros of
/// each `Q_{n−1}`; iii–v at the grid points satisfying their hypotheses.
/// Returns one report per property, in order i…v.
pub fn check_sign_properties(
    mu: f64,
    lambda: f64,
    n_max: usize,
    grid: &GridSpec,
) -> Result<Vec<SignReport>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sign properties assume mu > 0, got {mu}"
        )));
    }
    assert!(n_max >= 2, "properties start at n = 2");
    let family = CoefficientFamily::gribov_real(mu, lambda);
    let xs = grid.values();
    let gdesc = grid.describe();

    // i) and ii): at every isolated real zero of Q_{n−1}.
    let mut ce_i: Option<Counterexample> = None;
    let mut ce_ii: Option<Counterexample> = None;
    for n in 2..=n_max {
        let zeros = real_zeros(&family, n - 1, mu - 1.0, n as f64 * mu + 1.0)?;
        for &x in &zeros {
            let q_nm2 = q_at(&family, n - 2, x)?;
            let q_nm1 = q_at(&family, n - 1, x)?;
            let q_n = q_at(&family, n, x)?;
            let scale = recurrence_scale(&family, n, x, &q_nm1, &q_nm2)?;
            if ce_i.is_none() && q_n.abs() <= 1e-10 * scale {
                ce_i = Some(Counterexample {
                    x,
                    n,
                    values: vec![signed(&q_nm1), signed(&q_n), scale],
                });
            }
            if ce_ii.is_none() && !(sign_of(&q_n) * sign_of(&q_nm2) > 0.0) {
                ce_ii = Some(Counterexample {
                    x,
                    n,
                    values: vec![signed(&q_nm2), signed(&q_n)],
                });
            }
        }
        if ce_i.is_some() && ce_ii.is_some() {
            break;
        }
    }

    // iii): positivity strictly below μ.
    let mut ce_iii: Option<Counterexample> = None;
    'iii: for n in 2..=n_max {
        for &x in xs.iter().filter(|&&x| x < mu) {
            let q = q_at(&family, n, x)?;
            if !(sign_of(&q) > 0.0) {
                ce_iii = Some(Counterexample { x, n, values: vec![signed(&q)] });
                break 'iii;
            }
        }
    }

    // iv): alternating positivity above nμ.
    let mut ce_iv: Option<Counterexample> = None;
    'iv: for n in 2..=n_max {
        let flip = if n % 2 == 0 { 1.0 } else { -1.0 };
        for &x in xs.iter().filter(|&&x| x > n as f64 * mu) {
            let q = q_at(&family, n, x)?;
            if !(flip * sign_of(&q) > 0.0) {
                ce_iv = Some(Counterexample { x, n, values: vec![signed(&q)] });
                break 'iv;
            }
        }
    }

    // v): sign propagation on [μ, nμ], tested as an implication per point.
    // A sign only counts (in hypothesis or conclusion) when the value is
    // decisively nonzero against its own recurrence scale.
    let mut ce_v: Option<Counterexample> = None;
    'v: for &x in xs.iter().filter(|&&x| x >= mu && x <= n_max as f64 * mu) {
        let mut table: Vec<polyrec::ScaledPolyValue> = Vec::with_capacity(n_max + 1);
        let mut scales: Vec<f64> = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            table.push(q_at(&family, k, x)?);
            scales.push(if k == 0 {
                1.0
            } else {
                recurrence_scale(&family, k, x, &table[k - 1], if k >= 2 { &table[k - 2] } else { &table[0] })?
            });
        }
        let decisive = |k: usize| -> f64 {
            if table[k].abs() > 1e-12 * scales[k].max(1e-300) {
                sign_of(&table[k])
            } else {
                0.0
            }
        };
        for n in 2..=n_max {
            if x > n as f64 * mu {
                continue;
            }
            let s1 = decisive(n - 1);
            let s2 = decisive(n - 2);
            if s1 != 0.0 && s1 == s2 {
                for k in (n - 2)..=n_max {
                    let sk = decisive(k);
                    if sk != 0.0 && sk != s1 {
                        ce_v = Some(Counterexample {
                            x,
                            n,
                            values: vec![k as f64, signed(&table[k])],
                        });
                        break 'v;
                    }
                }
            }
        }
    }

    let zero_desc = format!("real zeros of each Q_{{n-1}}, n = 2..={n_max}");
    Ok(vec![
        match ce_i {
            None => SignReport::passing(SignProperty::NoSimultaneousVanishing, zero_desc.clone()),
            Some(c) => SignReport::failing(SignProperty::NoSimultaneousVanishing, zero_desc.clone(), c),
        },
        match ce_ii {
            None => SignReport::passing(SignProperty::PositiveProductAtZeros, zero_desc.clone()),
            Some(c) => SignReport::failing(SignProperty::PositiveProductAtZeros, zero_desc, c),
        },
        match ce_iii {
            None => SignReport::passing(SignProperty::PositiveBelowMu, gdesc.clone()),
            Some(c) => SignReport::failing(SignProperty::PositiveBelowMu, gdesc.clone(), c),
        },
        match ce_iv {
            None => SignReport::passing(SignProperty::AlternatingAboveNMu, gdesc.clone()),
            Some(c) => SignReport::failing(SignProperty::AlternatingAboveNMu, gdesc.clone(), c),
        },
        match ce_v {
            None => SignReport::passing(SignProperty::SignPropagation, gdesc),
            Some(c) => SignReport::failing(SignProperty::SignPropagation, gdesc, c),
        },
    ])
}

/// Smallest zero of the quadratic `Q₂ = x² − 3μx + 2μ² + 2λ²` in closed
/// form: `(3μ − √(μ² − 8λ²))/2`. `None` when the discriminant is negative
/// (both zeros leave the real axis).
pub fn quadratic_smallest_zero(mu: f64, lambda: f64) -> Option<f64> {
    let disc = mu * mu - 8.0 * lambda * lambda;
    if disc < 0.0 {
        None
    } else {
        Some(0.5 * (3.0 * mu - disc.sqrt()))
    }
}

/// Smallest real zero of one odd-degree polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddDegreeZero {
    /// The polynomial degree, `2k + 1`.
    pub degree: usize,
    /// Smallest real zero on `[μ, degree·μ]`, when isolation finds one.
    pub zero: Option<f64>,
}

/// The sequence `x₃, x₅, …, x_{2·k_max+1}` of smallest real zeros of the
/// odd-degree polynomials on `[μ, nμ]`. Under `0 < λ < μ/(2√2)` the
/// sequence is nondecreasing and trapped below `x₂ =`
/// [`quadratic_smallest_zero`].
pub fn smallest_zero_sequence(mu: f64, lambda: f64, k_max: usize) -> Result<Vec<OddDegreeZero>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zero sequence assumes mu > 0, got {mu}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zero sequence assumes lambda > 0, got {lambda}"
        )));
    }
    let bound = mu / (2.0 * 2.0f64.sqrt());
    if lambda >= bound {
        return Err(Error::HypothesisViolated(format!(
            "lambda = {lambda} is not below mu/(2*sqrt(2)) = {bound}"
        )));
    }
    assert!(k_max >= 1);
    let family = CoefficientFamily::gribov_real(mu, lambda);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let m = 2 * k + 1;
        let zeros = real_zeros(&family, m, mu, m as f64 * mu)?;
        out.push(OddDegreeZero { degree: m, zero: zeros.first().copied() });
    }
    Ok(out)
}

/// Smallest real part among the numerically-real eigenvalues of the n-th
/// truncation (dense route). "Real" means `|Im z| ≤ 1e−9·(1 + im_max)`
/// with `im_max` from the localization box. `None` when the truncation has
/// no real eigenvalue.
pub fn least_real_eigenvalue(mu: f64, lambda: f64, n: usize) -> Result<Option<f64>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "least real eigenvalue assumes mu > 0, got {mu}"
        )));
    }
    let family = CoefficientFamily::gribov_real(mu, lambda);
    let m = TridiagonalMatrix::from_family(&family, n)?;
    let spectrum = spectra::eigen_dense(&m, &SolverOptions::default())?;
    let bbox = spectra::localization_box(&GribovParams::real(mu, lambda), n);
    let im_tol = 1e-9 * (1.0 + bbox.im_max);
    Ok(spectrum
        .values
        .iter()
        .filter(|z| z.im.abs() <= im_tol)
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, re| Some(acc.map_or(re, |a| a.min(re)))))
}

/// One tracked point of an eigenvalue trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub value: Complex64,
    /// `|z_{k,n} − kμ|`.
    pub err_to_target: f64,
    /// Distance to the previous truncation's matched value (0 at the seed).
    pub match_distance: f64,
}

/// An eigenvalue followed across truncation sizes by nearest-neighbor
/// continuation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub k: usize,
    pub params: GribovParams,
    pub entries: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// CSV with a fixed header and 17-significant-digit floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,re,im,abs_err_to_kmu,match_distance\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.n,
                self.k,
                textfmt::fmt_f64(e.value.re),
                textfmt::fmt_f64(e.value.im),
                textfmt::fmt_f64(e.err_to_target),
                textfmt::fmt_f64(e.match_distance)
            ));
        }
        out
    }
}

/// Track the k-th eigenvalue (1-based, by real part at the first size)
/// through truncations `n = n_lo ..= n_hi`, matching each size's spectrum to
/// the previous value by nearest neighbor. The step is rejected as
/// [`Error::TrackingLost`] when the nearest candidate is not clearly
/// nearest (closer than 0.45× the runner-up).
pub fn trajectory(
    mu: f64,
    lambda: f64,
    k: usize,
    n_lo: usize,
    n_hi: usize,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    assert!(k >= 1, "eigenvalue indices are 1-based");
    assert!(n_lo >= 1 && n_lo <= n_hi, "truncation range must be ordered");
    if k > n_lo {
        return Err(Error::InvalidParameter(format!(
            "index k = {k} exceeds the smallest truncation n = {n_lo}"
        )));
    }
    let family = CoefficientFamily::gribov_real(mu, lambda);
    let target = Complex64::new(k as f64 * mu, 0.0);
    let mut entries: Vec<TrajectoryPoint> = Vec::with_capacity(n_hi - n_lo + 1);
    let mut prev = Complex64::new(0.0, 0.0);
    for n in n_lo..=n_hi {
        let m = TridiagonalMatrix::from_family(&family, n)?;
        let spectrum = spectra::eigen_dense(&m, opts)?;
        let (z, dist) = if n == n_lo {
            (spectrum.values[k - 1], 0.0)
        } else {
            let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
            let mut second = (f64::INFINITY, Complex64::new(0.0, 0.0));
            for &v in &spectrum.values {
                let d = (v - prev).norm();
                if d < best.0 {
                    second = best;
                    best = (d, v);
                } else if d < second.0 {
                    second = (d, v);
                }
            }
            if second.0.is_finite() && best.0 > 0.45 * second.0 {
                return Err(Error::TrackingLost(format!(
                    "at n = {n}: {} (d = {:.3e}) and {} (d = {:.3e}) are ambiguous continuations of {}",
                    best.1, best.0, second.1, second.0, prev
                )));
            }
            (best.1, best.0)
        };
        entries.push(TrajectoryPoint {
            n,
            value: z,
            err_to_target: (z - target).norm(),
            match_distance: dist,
        });
        prev = z;
    }
    Ok(Trajectory { k, params: GribovParams::real(mu, lambda), entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values_inclusive_and_even() {
        let g = GridSpec::new(-2.0, 2.0, 5);
        assert_eq!(g.values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(g.describe(), "5 points on [-2, 2]");
    }

    #[test]
    fn quadratic_zero_closed_forms() {
        assert!((quadratic_smallest_zero(1.0, 0.1).unwrap() - 1.020416847668728).abs() < 1e-15);
        assert!(
            (quadratic_smallest_zero(1.0, 0.2).unwrap() - 1.0876894374382339).abs() < 1e-15
        );
        assert!(
            (quadratic_smallest_zero(1.0, 0.3).unwrap() - 1.2354248688935409).abs() < 1e-15
        );
        // Discriminant zero boundary and beyond.
        assert!(quadratic_smallest_zero(1.0, 0.36).is_none());
    }

    #[test]
    fn diagonal_point_values() {
        // λ = 0 collapses Q_n to ∏(kμ − x): two point checks with exact
        // factored values.
        let fam = CoefficientFamily::gribov_real(1.0, 0.0);
        let q3 = q_at(&fam, 3, 0.5).unwrap().to_complex().re;
        assert!((q3 - 0.5 * 1.5 * 2.5).abs() < 1e-14);
        assert!(q3 > 0.0);
        let q2 = q_at(&fam, 2, 3.0).unwrap().to_complex().re;
        assert!((q2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sign_properties_hold_in_hypothesis_range() {
        let grid = GridSpec::new(-2.0, 12.0, 400);
        let reports = check_sign_properties(1.0, 0.2, 10, &grid).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            assert!(r.pass, "property {} failed: {:?}", r.property.id(), r.counterexample);
            assert!(r.counterexample.is_none());
        }
        let ids: Vec<_> = reports.iter().map(|r| r.property.id()).collect();
        assert_eq!(ids, vec!["i", "ii", "iii", "iv", "v"]);
    }

    #[test]
    fn sign_properties_reject_nonpositive_mu() {
        let grid = GridSpec::new(-2.0, 2.0, 10);
        assert!(matches!(
            check_sign_properties(0.0, 0.1, 5, &grid),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            check_sign_properties(-1.0, 0.1, 5, &grid),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn odd_zero_sequence_monotone_and_bounded() {
        let seq = smallest_zero_sequence(1.0, 0.1, 9).unwrap();
        assert_eq!(seq.len(), 9);
        assert_eq!(seq[0].degree, 3);
        // x₃ frozen from an independent high-precision run.
        let x3 = seq[0].zero.unwrap();
        assert!((x3 - 1.0192053517767867).abs() < 1e-10, "x3 = {x3}");
        let x2 = quadratic_smallest_zero(1.0, 0.1).unwrap();
        let mut prev = 1.0 - 1e-9;
        for e in &seq {
            let z = e.zero.unwrap_or_else(|| panic!("no zero at degree {}", e.degree));
            assert!(z >= prev - 1e-10, "sequence dropped at degree {}", e.degree);
            assert!(z < x2, "x_{} = {z} not below x2 = {x2}", e.degree);
            prev = z;
        }
    }

    #[test]
    fn zero_sequence_guards_hypotheses() {
        assert!(matches!(
            smallest_zero_sequence(1.0, 0.4, 3),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            smallest_zero_sequence(1.0, 0.0, 3),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            smallest_zero_sequence(-1.0, 0.1, 3),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn least_real_eigenvalue_diagonal_and_frozen() {
        let v = least_real_eigenvalue(1.0, 0.0, 10).unwrap().unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // Frozen dense-oracle value at μ=1, λ=0.2, n=30.
        let v = least_real_eigenvalue(1.0, 0.2, 30).unwrap().unwrap();
        assert!((v - 1.0704577091381977).abs() < 1e-8, "got {v}");
        let x2 = quadratic_smallest_zero(1.0, 0.2).unwrap();
        assert!(v >= 1.0 - 1e-9 && v < x2);
    }

    #[test]
    fn trajectory_diagonal_is_exact() {
        let t = trajectory(1.0, 0.0, 3, 5, 12, &SolverOptions::default()).unwrap();
        assert_eq!(t.entries.len(), 8);
        for e in &t.entries {
            assert!(e.err_to_target < 1e-12);
            assert!(e.match_distance < 1e-12);
            assert!((e.value - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn trajectory_stabilizes_in_the_tail() {
        // At fixed λ the tracked value converges to the truncation limit:
        // the distance to kμ settles fast and must stop moving beyond
        // numerical noise once n ≥ 10.
        let t = trajectory(1.0, 0.05, 1, 5, 16, &SolverOptions::default()).unwrap();
        let tail: Vec<&TrajectoryPoint> =
            t.entries.iter().filter(|e| e.n >= 10).collect();
        for pair in tail.windows(2) {
            let inc = pair[1].err_to_target - pair[0].err_to_target;
            assert!(
                inc <= 1e-12 * (1.0 + pair[0].err_to_target),
                "error grew by {inc} at n = {}",
                pair[1].n
            );
        }
        assert!((tail.last().unwrap().err_to_target - tail[0].err_to_target).abs() < 1e-10);
        let csv = t.to_csv();
        assert!(csv.starts_with("n,k,re,im,abs_err_to_kmu,match_distance\n"));
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.lines().nth(1).unwrap().starts_with("5,1,"));
    }

    #[test]
    fn trajectory_rejects_bad_index() {
        assert!(matches!(
            trajectory(1.0, 0.1, 6, 5, 10, &SolverOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
