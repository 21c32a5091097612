//! Two independent routes to the spectrum, and how they are compared.
//!
//! * [`zeros_aberth`] — simultaneous (Aberth–Ehrlich) root finding on the
//!   characteristic polynomial, evaluated by the overflow-guarded
//!   recurrences of [`crate::polyrec`]. Near the extreme eigenvalues the
//!   *evaluation* of the polynomial is so ill-conditioned (relative error
//!   O(1) by n ≈ 30 at small λ) that plain doubles stall far from the roots,
//!   so the iteration finishes with double-double sweeps once double
//!   precision stops improving.
//! * [`eigen_dense`] — a dense complex QR eigensolver on the matrix itself
//!   (the eigenvalue condition numbers stay modest, so plain doubles reach
//!   ~1e−10 here). Eigenvectors come from double-double inverse iteration.
//!
//! The routes share no numerical machinery beyond coefficient assembly;
//! [`cross_check`] measures the distance between their spectra after optimal
//! pairing, which is the crate's primary self-validation.
//!
//! [`localization_box`] gives the closed-form rectangle that must contain the
//! spectrum (from the Hermitian split: |Re z| ≤ 2|Im λ|·δ_n + n·|Re μ|,
//! |Im z| ≤ 2|Re λ|·δ_n + n·|Im μ|), and [`verify_localization`] checks a
//! computed spectrum against it.

use num_complex::Complex64;

use crate::coefficients::{delta, CoefficientFamily, GribovParams};
use crate::dd::DdComplex;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{EigenPair, TridiagonalMatrix};
use crate::polyrec;
use crate::textfmt;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hard cap for both spectrum routes.
pub const MAX_SPECTRUM_N: usize = 512;

/// Which route produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Aberth–Ehrlich on the characteristic polynomial.
    Aberth,
    /// Dense QR on the matrix.
    DenseOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Aberth => "aberth",
            Method::DenseOracle => "dense_oracle",
        }
    }
}

/// Iteration controls shared by both routes.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative root tolerance: a point is converged when its last update is
    /// ≤ `tol · (1 + |z|)`.
    pub tol: f64,
    /// Iteration budget (Aberth sweeps; for the dense route the QR sweep
    /// budget is `max(max_iter, 4n)` since sweeps scale with n).
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-12, max_iter: 500 }
    }
}

/// Closed-form localization rectangle `|Re z| ≤ re_max`, `|Im z| ≤ im_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundBox {
    pub re_max: f64,
    pub im_max: f64,
    /// The weight δ_n entering both bounds.
    pub delta_n: f64,
}

impl BoundBox {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"re_max\":{},\"im_max\":{},\"delta_n\":{}}}",
            textfmt::fmt_f64(self.re_max),
            textfmt::fmt_f64(self.im_max),
            textfmt::fmt_f64(self.delta_n)
        )
    }
}

/// Localization box for the n×n Gribov matrix: each eigenvalue `z = φᴴH¹φ +
/// i·φᴴH²φ` for a unit φ, and the two real symmetric parts have row sums
/// bounded by `n|Re μ| + 2|Im λ|δ_n` and `n|Im μ| + 2|Re λ|δ_n`.
pub fn localization_box(params: &GribovParams, n: usize) -> BoundBox {
    assert!(n >= 1);
    let dn = delta(n);
    BoundBox {
        re_max: 2.0 * params.lambda.im.abs() * dn + (n as f64) * params.mu.re.abs(),
        im_max: 2.0 * params.lambda.re.abs() * dn + (n as f64) * params.mu.im.abs(),
        delta_n: dn,
    }
}

/// A computed spectrum: values sorted by (Re, Im), with per-value residuals.
///
/// Residual semantics depend on the route: for [`Method::Aberth`] it is the
/// magnitude of the last Newton/Aberth update relative to `1 + |z|`; for
/// [`Method::DenseOracle`] it is the eigenpair residual `‖Mφ − zφ‖₂` of the
/// inverse-iteration eigenvector.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub method: Method,
    pub n: usize,
    pub family: CoefficientFamily,
    pub values: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub declared_tol: f64,
}

impl Spectrum {
    /// Deterministic JSON document with a fixed field order. Gribov spectra
    /// carry `mu`, `lambda` and the localization box; other families carry
    /// only their descriptor string and a null bound.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{{\"method\":{},\"n\":{},\"family\":{}",
            textfmt::fmt_str(self.method.as_str()),
            self.n,
            textfmt::fmt_str(&self.family.to_string())
        ));
        if let Some(p) = self.family.gribov_params() {
            out.push_str(&format!(
                ",\"mu\":{},\"lambda\":{}",
                textfmt::fmt_complex(p.mu),
                textfmt::fmt_complex(p.lambda)
            ));
        }
        let bound = match self.family.gribov_params() {
            Some(p) => localization_box(p, self.n).to_json(),
            None => "null".to_string(),
        };
        out.push_str(&format!(
            ",\"values\":{},\"residuals\":{},\"bound\":{bound},\"iterations\":{},\"declared_tol\":{}}}",
            textfmt::fmt_complex_slice(&self.values),
            textfmt::fmt_f64_slice(&self.residuals),
            self.iterations,
            textfmt::fmt_f64(self.declared_tol)
        ));
        out
    }
}

/// Sort values by (Re, Im), carrying the residuals along.
fn sort_paired(values: &mut Vec<Complex64>, residuals: &mut Vec<f64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| {
        values[i]
            .re
            .total_cmp(&values[j].re)
            .then(values[i].im.total_cmp(&values[j].im))
    });
    *values = idx.iter().map(|&i| values[i]).collect();
    *residuals = idx.iter().map(|&i| residuals[i]).collect();
}

fn validate_family_through(family: &CoefficientFamily, n: usize) -> Result<()> {
    let report = family.validate(n);
    if let Some(k) = report.first_invalid {
        return Err(Error::InvalidParameter(format!(
            "family {family} is undefined at index {k} (needed through {n})"
        )));
    }
    Ok(())
}

/// Deterministic elliptical cloud of starting points around the family's
/// spectral region: golden-ratio angles and radii, so no two runs differ and
/// no symmetric stalls occur.
fn initial_points(family: &CoefficientFamily, n: usize) -> Result<Vec<Complex64>> {
    let (center, a, b) = match family.gribov_params() {
        Some(p) => {
            let bbox = localization_box(p, n);
            let center = p.mu * ((n + 1) as f64) * 0.5;
            let a = (0.9 * bbox.re_max).max(0.5);
            let b = (0.9 * bbox.im_max).max(0.05 * (a + 1.0));
            (center, a, b)
        }
        None => {
            // Gershgorin disc around the diagonal mean.
            let mut betas = Vec::with_capacity(n);
            for k in 1..=n {
                betas.push(family.coeffs(k)?.beta);
            }
            let center = betas.iter().sum::<Complex64>() / (n as f64);
            let mut r = 0f64;
            for k in 1..=n {
                let mut row = (betas[k - 1] - center).norm();
                if k > 1 {
                    row += family.coeffs(k - 1)?.alpha.norm();
                }
                if k < n {
                    row += family.coeffs(k)?.alpha.norm();
                }
                r = r.max(row);
            }
            let a = 1.1 * r + 1.0;
            (center, a, a)
        }
    };
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    const SILVER: f64 = 0.414_213_562_373_095_1;
    let points = (0..n)
        .map(|j| {
            let t = ((j + 1) as f64 * GOLDEN).fract();
            let rho = 0.55 + 0.45 * ((j + 1) as f64 * SILVER).fract();
            let theta = 2.0 * std::f64::consts::PI * t;
            center + Complex64::new(rho * a * theta.cos(), rho * b * theta.sin())
        })
        .collect();
    Ok(points)
}

/// All zeros of the degree-n characteristic polynomial by the Aberth–Ehrlich
/// simultaneous iteration: double-precision sweeps until they converge or
/// stop improving, then double-double sweeps to the requested tolerance.
pub fn zeros_aberth(
    family: &CoefficientFamily,
    n: usize,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    assert!(n >= 1, "polynomial degree must be at least 1");
    if n > MAX_SPECTRUM_N {
        return Err(Error::SizeExceeded(format!(
            "root finding is capped at n = {MAX_SPECTRUM_N}, got {n}"
        )));
    }
    validate_family_through(family, n)?;

    if n == 1 {
        let beta1 = family.coeffs(1)?.beta;
        return Ok(Spectrum {
            method: Method::Aberth,
            n,
            family: family.clone(),
            values: vec![beta1],
            residuals: vec![0.0],
            iterations: 0,
            declared_tol: opts.tol,
        });
    }

    let mut z = initial_points(family, n)?;
    let mut iterations = 0usize;

    // Phase 1: plain doubles. Stop at a loose tolerance or on stagnation —
    // near the extreme roots the double evaluation noise dominates long
    // before opts.tol is reachable.
    let loose = opts.tol.max(1e-8);
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    while iterations < opts.max_iter {
        iterations += 1;
        let max_rel = aberth_sweep_f64(family, n, &mut z)?;
        if max_rel <= loose {
            break;
        }
        if max_rel < 0.9 * best {
            best = max_rel;
            stale = 0;
        } else {
            stale += 1;
            if stale >= 8 {
                break;
            }
        }
    }

    // Phase 2: double-double sweeps down to the requested tolerance.
    let mut zd: Vec<DdComplex> = z.iter().map(|&p| DdComplex::from_c64(p)).collect();
    let mut residuals = vec![f64::INFINITY; n];
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let max_rel = aberth_sweep_dd(family, n, &mut zd, &mut residuals)?;
        if max_rel <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(iterations));
    }

    let mut values: Vec<Complex64> = zd.iter().map(|p| p.to_c64()).collect();
    sort_paired(&mut values, &mut residuals);
    Ok(Spectrum {
        method: Method::Aberth,
        n,
        family: family.clone(),
        values,
        residuals,
        iterations,
        declared_tol: opts.tol,
    })
}

/// One in-place Aberth sweep in f64; returns the largest relative update.
fn aberth_sweep_f64(family: &CoefficientFamily, n: usize, z: &mut [Complex64]) -> Result<f64> {
    let mut max_rel = 0f64;
    for k in 0..n {
        // Separate exactly-coincident points before using them.
        for j in 0..n {
            if j != k && z[j] == z[k] {
                z[k] += Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
            }
        }
        let (q, dq) = polyrec::eval_char_poly_with_derivative(family, n, z[k])?;
        if q.is_zero() {
            continue;
        }
        let w = if dq.is_zero() {
            Complex64::new(1e-8 * (1.0 + z[k].norm()), 0.0)
        } else {
            (q / dq).to_complex()
        };
        let mut s = ZERO;
        for j in 0..n {
            if j != k {
                s += Complex64::new(1.0, 0.0) / (z[k] - z[j]);
            }
        }
        let den = Complex64::new(1.0, 0.0) - w * s;
        let mut corr = if den == ZERO { w } else { w / den };
        // Clamp runaway steps from noisy evaluations.
        let cap = 1.0 + z[k].norm();
        if !corr.is_finite() {
            corr = Complex64::new(cap * 0.1, 0.0);
        } else if corr.norm() > cap {
            corr *= cap / corr.norm();
        }
        z[k] -= corr;
        max_rel = max_rel.max(corr.norm() / (1.0 + z[k].norm()));
    }
    Ok(max_rel)
}

/// One in-place Aberth sweep in double-double; records per-root relative
/// updates as residuals and returns the largest.
fn aberth_sweep_dd(
    family: &CoefficientFamily,
    n: usize,
    z: &mut [DdComplex],
    residuals: &mut [f64],
) -> Result<f64> {
    let mut max_rel = 0f64;
    for k in 0..n {
        for j in 0..n {
            if j != k && z[j].to_c64() == z[k].to_c64() {
                let bump = 1e-8 * (1.0 + z[k].to_c64().norm());
                z[k] = z[k].add(DdComplex::from_c64(Complex64::new(bump, bump)));
            }
        }
        let (q, dq, _) = polyrec::charpoly_value_deriv_dd(family, n, z[k])?;
        let q_zero = q.re.hi == 0.0 && q.im.hi == 0.0;
        if q_zero {
            residuals[k] = 0.0;
            continue;
        }
        let dq_zero = dq.re.hi == 0.0 && dq.im.hi == 0.0;
        let w = if dq_zero {
            DdComplex::from_c64(Complex64::new(1e-8 * (1.0 + z[k].to_c64().norm()), 0.0))
        } else {
            q.div(dq)
        };
        let mut s = DdComplex::ZERO;
        for j in 0..n {
            if j != k {
                s = s.add(DdComplex::ONE.div(z[k].sub(z[j])));
            }
        }
        let den = DdComplex::ONE.sub(w.mul(s));
        let den_zero = den.re.hi == 0.0 && den.im.hi == 0.0;
        let mut corr = if den_zero { w } else { w.div(den) };
        let cap = 1.0 + z[k].to_c64().norm();
        let cn = corr.to_c64().norm();
        if !cn.is_finite() {
            corr = DdComplex::from_c64(Complex64::new(cap * 0.1, 0.0));
        } else if cn > cap {
            corr = corr.mul_f64(cap / cn);
        }
        z[k] = z[k].sub(corr);
        let rel = corr.abs().to_f64() / (1.0 + z[k].to_c64().norm());
        residuals[k] = rel;
        max_rel = max_rel.max(rel);
    }
    Ok(max_rel)
}

/// All eigenvalues by dense QR on the matrix; residuals from double-double
/// inverse iteration.
pub fn eigen_dense(m: &TridiagonalMatrix, opts: &SolverOptions) -> Result<Spectrum> {
    let n = m.n();
    if n > MAX_SPECTRUM_N {
        return Err(Error::SizeExceeded(format!(
            "dense eigensolve is capped at n = {MAX_SPECTRUM_N}, got {n}"
        )));
    }
    let budget = opts.max_iter.max(4 * n);
    let (mut values, sweeps) = linalg::tridiagonal_eigenvalues(m.diag(), m.offdiag(), budget)?;
    let mut residuals: Vec<f64> = values
        .iter()
        .map(|&z| linalg::tridiagonal_eigenvector_dd(m.diag(), m.offdiag(), z).1)
        .collect();
    sort_paired(&mut values, &mut residuals);
    Ok(Spectrum {
        method: Method::DenseOracle,
        n,
        family: m.family().clone(),
        values,
        residuals,
        iterations: sweeps,
        // The dense route's residual contract: ‖Mφ − zφ‖ ≤ 1e−10·‖M‖.
        declared_tol: 1e-10 * m.infinity_norm(),
    })
}

/// Dense eigensolve keeping the eigenvectors (double-double inverse
/// iteration, rounded to f64, Euclidean-unit). Pairs are sorted by value.
pub fn eigen_dense_with_vectors(
    m: &TridiagonalMatrix,
    opts: &SolverOptions,
) -> Result<Vec<EigenPair>> {
    let n = m.n();
    if n > MAX_SPECTRUM_N {
        return Err(Error::SizeExceeded(format!(
            "dense eigensolve is capped at n = {MAX_SPECTRUM_N}, got {n}"
        )));
    }
    let budget = opts.max_iter.max(4 * n);
    let (mut values, _) = linalg::tridiagonal_eigenvalues(m.diag(), m.offdiag(), budget)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values
        .into_iter()
        .map(|z| {
            let (v, res) = linalg::tridiagonal_eigenvector_dd(m.diag(), m.offdiag(), z);
            EigenPair {
                value: z,
                vector: v.into_iter().map(|x| x.to_c64()).collect(),
                residual: res,
            }
        })
        .collect())
}

/// Result of checking a spectrum against a localization box.
#[derive(Debug, Clone)]
pub struct LocalizationReport {
    pub slack: f64,
    /// Values outside the inflated box, with their (re, im) excesses.
    pub violations: Vec<(Complex64, f64, f64)>,
    pub pass: bool,
}

/// Check every value against the box inflated by `slack` on each side.
pub fn verify_localization(spectrum: &Spectrum, bbox: &BoundBox, slack: f64) -> LocalizationReport {
    let mut violations = Vec::new();
    for &v in &spectrum.values {
        let re_excess = v.re.abs() - (bbox.re_max + slack);
        let im_excess = v.im.abs() - (bbox.im_max + slack);
        if re_excess > 0.0 || im_excess > 0.0 {
            violations.push((v, re_excess.max(0.0), im_excess.max(0.0)));
        }
    }
    LocalizationReport { slack, pass: violations.is_empty(), violations }
}

/// Distance between two equally-sized point sets under the pairing produced
/// by sorting both by (Re, Im) and then exchanging adjacent partners while
/// that lowers the *sum* of pair distances. The sum criterion (not the max)
/// is what untangles conjugate twins whose sort order flips on 1-ulp
/// differences of the real parts. Returns the largest pair distance.
pub fn match_distance(xs: &[Complex64], ys: &[Complex64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "point sets must have equal size");
    if xs.is_empty() {
        return 0.0;
    }
    let sort = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    };
    let a = sort(xs);
    let mut b = sort(ys);
    let n = a.len();
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            let cur = (a[i] - b[i]).norm() + (a[i + 1] - b[i + 1]).norm();
            let alt = (a[i] - b[i + 1]).norm() + (a[i + 1] - b[i]).norm();
            if alt < cur {
                b.swap(i, i + 1);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest paired distance between two spectra of the same size
/// (typically one from each route).
pub fn cross_check(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::ShapeMismatch(format!(
            "spectra have different sizes: {} vs {}",
            a.n, b.n
        )));
    }
    Ok(match_distance(&a.values, &b.values))
}

/// Deterministic low-discrepancy sample of `count` points inside the box
/// (golden-ratio lattice; no randomness).
pub fn sample_box_points(bbox: &BoundBox, count: usize) -> Vec<Complex64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    const SILVER: f64 = 0.414_213_562_373_095_1;
    (0..count)
        .map(|j| {
            let x = 2.0 * ((j + 1) as f64 * GOLDEN).fract() - 1.0;
            let y = 2.0 * ((j + 1) as f64 * SILVER).fract() - 1.0;
            Complex64::new(x * bbox.re_max, y * bbox.im_max)
        })
        .collect()
}
