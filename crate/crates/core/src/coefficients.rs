//! Coefficient families for the tridiagonal recurrences.
//!
//! A family supplies, for each index `k ≥ 1`, the diagonal entry `β_k` and the
//! off-diagonal entry `α_k` of a complex-symmetric tridiagonal matrix. The
//! central family is the Gribov family
//!
//! ```text
//! β_k = μ·k,        α_k = iλ·k·√(k+1) = iλ·δ_k
//! ```
//!
//! with complex parameters μ, λ. Alongside it the module carries three
//! classical orthogonal-polynomial families continued to parameter ranges
//! where their off-diagonal coefficients turn purely imaginary, which makes
//! them useful cross-validation inputs for every solver in the crate:
//!
//! * Laguerre-type: `β_k = 2k + a − 1`, `α_k = i·√(k(−k−a))`, real for no k
//!   when `a < −k`;
//! * ultraspherical-type: `β_k = 0`,
//!   `α_k = (i/2)·√(−k(2g+k−1) / ((k+g)(k+g−1)))`;
//! * Jacobi-type: the standard three-term coefficients of P_k^{(a,b)} with
//!   the radicand negated by the parameter range.
//!
//! Validity is checked numerically index by index ([`CoefficientFamily::validate`]):
//! an index is *valid* when every denominator is nonzero and every radicand is
//! non-negative; a zero `α_k` is valid but flagged separately because the
//! orthonormal recurrence divides by it.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The weight `δ_k = k·√(k+1)` that scales the Gribov off-diagonal entries
/// and drives the localization bounds.
#[inline]
pub fn delta(k: usize) -> f64 {
    let kf = k as f64;
    kf * (kf + 1.0).sqrt()
}

/// Parameters (μ, λ) of the Gribov family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GribovParams {
    pub mu: Complex64,
    pub lambda: Complex64,
}

impl GribovParams {
    pub fn new(mu: Complex64, lambda: Complex64) -> Self {
        GribovParams { mu, lambda }
    }

    /// Both parameters on the real axis.
    pub fn real(mu: f64, lambda: f64) -> Self {
        GribovParams { mu: Complex64::new(mu, 0.0), lambda: Complex64::new(lambda, 0.0) }
    }

    /// True when both parameters have exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.mu.im == 0.0 && self.lambda.im == 0.0
    }
}

/// One index of a family: the off-diagonal `α_k`, the diagonal `β_k` and the
/// universal weight `δ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientPair {
    pub k: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub delta: f64,
}

/// Per-index result of a validity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexValidity {
    pub k: usize,
    /// Denominators nonzero and radicands non-negative at this index.
    pub valid: bool,
    /// `α_k == 0` exactly (valid, but the orthonormal recurrence cannot
    /// divide by it).
    pub zero_alpha: bool,
}

/// Result of [`CoefficientFamily::validate`]: which indices of the family are
/// usable, and where the first obstruction sits.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// Highest index scanned (indices 1..=requested).
    pub requested: usize,
    pub entries: Vec<IndexValidity>,
    /// First index whose coefficients are undefined, if any.
    pub first_invalid: Option<usize>,
    /// First index with `α_k == 0`, if any.
    pub first_zero_alpha: Option<usize>,
}

impl ValidityReport {
    /// Every scanned index has well-defined coefficients.
    pub fn all_valid(&self) -> bool {
        self.first_invalid.is_none()
    }

    /// Coefficients defined through the requested index *and* all
    /// off-diagonals strictly below it nonzero — the precondition for the
    /// orthonormal recurrence of that length.
    pub fn recurrence_ready(&self) -> bool {
        self.all_valid()
            && match self.first_zero_alpha {
                None => true,
                Some(k) => k >= self.requested,
            }
    }
}

/// A coefficient family, selectable at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientFamily {
    /// `β_k = μk`, `α_k = iλδ_k`.
    Gribov(GribovParams),
    /// Laguerre-type with parameter `a`: `β_k = 2k + a − 1`, `α_k = i√(k(−k−a))`.
    Laguerre { alpha: f64 },
    /// Ultraspherical-type with parameter `g`: `β_k = 0`,
    /// `α_k = (i/2)√(−k(2g+k−1)/((k+g)(k+g−1)))`.
    Ultraspherical { lambda: f64 },
    /// Jacobi-type with parameters `(a, b)`.
    Jacobi { alpha: f64, beta: f64 },
    /// Explicit coefficient list (index `k` = position + 1).
    Custom(Vec<CoefficientPair>),
}

impl CoefficientFamily {
    pub fn gribov(mu: Complex64, lambda: Complex64) -> Self {
        CoefficientFamily::Gribov(GribovParams::new(mu, lambda))
    }

    pub fn gribov_real(mu: f64, lambda: f64) -> Self {
        CoefficientFamily::Gribov(GribovParams::real(mu, lambda))
    }

    /// Wrap explicit tridiagonal entries as a family. `diag` holds
    /// `β_1..β_n`; `off` holds `α_1..α_{n−1}` (the index past the matrix edge
    /// gets `α_n = 0`).
    pub fn custom_from_tridiagonal(diag: &[Complex64], off: &[Complex64]) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::ShapeMismatch(format!(
                "custom family needs len(off) = len(diag) - 1, got {} and {}",
                off.len(),
                diag.len()
            )));
        }
        let pairs = diag
            .iter()
            .enumerate()
            .map(|(i, &beta)| {
                let k = i + 1;
                let alpha = if i < off.len() { off[i] } else { Complex64::new(0.0, 0.0) };
                CoefficientPair { k, alpha, beta, delta: delta(k) }
            })
            .collect();
        Ok(CoefficientFamily::Custom(pairs))
    }

    /// Coefficients at index `k ≥ 1`, or [`Error::InvalidParameter`] when the
    /// family is undefined there.
    pub fn coeffs(&self, k: usize) -> Result<CoefficientPair> {
        if k == 0 {
            return Err(Error::InvalidParameter("coefficient index starts at 1".into()));
        }
        let kf = k as f64;
        let dk = delta(k);
        match self {
            CoefficientFamily::Gribov(p) => Ok(CoefficientPair {
                k,
                alpha: Complex64::new(0.0, 1.0) * p.lambda * dk,
                beta: p.mu * kf,
                delta: dk,
            }),
            CoefficientFamily::Laguerre { alpha } => {
                let radicand = kf * (-kf - alpha);
                if radicand < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "laguerre family with alpha={alpha} is undefined at index {k} \
                         (negative radicand {radicand})"
                    )));
                }
                Ok(CoefficientPair {
                    k,
                    alpha: Complex64::new(0.0, radicand.sqrt()),
                    beta: Complex64::new(2.0 * kf + alpha - 1.0, 0.0),
                    delta: dk,
                })
            }
            CoefficientFamily::Ultraspherical { lambda } => {
                let den = (kf + lambda) * (kf + lambda - 1.0);
                if den == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "ultraspherical family with lambda={lambda} is undefined at index {k} \
                         (zero denominator)"
                    )));
                }
                let radicand = -kf * (2.0 * lambda + kf - 1.0) / den;
                if radicand < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "ultraspherical family with lambda={lambda} is undefined at index {k} \
                         (negative radicand {radicand})"
                    )));
                }
                Ok(CoefficientPair {
                    k,
                    alpha: Complex64::new(0.0, 0.5 * radicand.sqrt()),
                    beta: Complex64::new(0.0, 0.0),
                    delta: dk,
                })
            }
            CoefficientFamily::Jacobi { alpha, beta } => {
                let s = alpha + beta;
                let beta_den = (2.0 * kf + s + 2.0) * (2.0 * kf + s);
                if beta_den == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "jacobi family with alpha={alpha}, beta={beta} is undefined at index {k} \
                         (zero diagonal denominator)"
                    )));
                }
                let beta_k = (beta * beta - alpha * alpha) / beta_den;
                let den = (2.0 * kf + s + 2.0).powi(2) * (2.0 * kf + s + 1.0) * (2.0 * kf + s + 3.0);
                if den == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "jacobi family with alpha={alpha}, beta={beta} is undefined at index {k} \
                         (zero off-diagonal denominator)"
                    )));
                }
                let radicand = -4.0 * (kf + 1.0) * (kf + alpha + 1.0) * (kf + beta + 1.0)
                    * (kf + s + 1.0)
                    / den;
                if radicand < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "jacobi family with alpha={alpha}, beta={beta} is undefined at index {k} \
                         (negative radicand {radicand})"
                    )));
                }
                Ok(CoefficientPair {
                    k,
                    alpha: Complex64::new(0.0, radicand.sqrt()),
                    beta: Complex64::new(beta_k, 0.0),
                    delta: dk,
                })
            }
            CoefficientFamily::Custom(pairs) => pairs
                .get(k - 1)
                .copied()
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "custom family has {} entries, index {k} requested",
                        pairs.len()
                    ))
                }),
        }
    }

    /// Scan indices `1..=n` and report which are usable.
    pub fn validate(&self, n: usize) -> ValidityReport {
        let mut entries = Vec::with_capacity(n);
        let mut first_invalid = None;
        let mut first_zero_alpha = None;
        for k in 1..=n {
            match self.coeffs(k) {
                Ok(pair) => {
                    let zero = pair.alpha == Complex64::new(0.0, 0.0);
                    if zero && first_zero_alpha.is_none() {
                        first_zero_alpha = Some(k);
                    }
                    entries.push(IndexValidity { k, valid: true, zero_alpha: zero });
                }
                Err(_) => {
                    if first_invalid.is_none() {
                        first_invalid = Some(k);
                    }
                    entries.push(IndexValidity { k, valid: false, zero_alpha: false });
                }
            }
        }
        ValidityReport { requested: n, entries, first_invalid, first_zero_alpha }
    }

    /// The Gribov parameters, when this is the Gribov family.
    pub fn gribov_params(&self) -> Option<&GribovParams> {
        match self {
            CoefficientFamily::Gribov(p) => Some(p),
            _ => None,
        }
    }
}

fn fmt_real_param(x: f64) -> String {
    format!("{x}")
}

fn fmt_complex_param(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_real_param(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Display for CoefficientFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientFamily::Gribov(p) => write!(
                f,
                "gribov:mu={},lambda={}",
                fmt_complex_param(p.mu),
                fmt_complex_param(p.lambda)
            ),
            CoefficientFamily::Laguerre { alpha } => {
                write!(f, "laguerre:alpha={}", fmt_real_param(*alpha))
            }
            CoefficientFamily::Ultraspherical { lambda } => {
                write!(f, "ultraspherical:lambda={}", fmt_real_param(*lambda))
            }
            CoefficientFamily::Jacobi { alpha, beta } => write!(
                f,
                "jacobi:alpha={},beta={}",
                fmt_real_param(*alpha),
                fmt_real_param(*beta)
            ),
            CoefficientFamily::Custom(pairs) => write!(f, "custom:len={}", pairs.len()),
        }
    }
}

/// Parse a complex number written as `a`, `bi`, `a+bi` or `a-bi`
/// (e.g. `1`, `-2.5`, `0.3i`, `1+0.5i`, `1.5e-3-2i`, `i`, `-i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty complex literal".into()));
    }
    let bad = |s: &str| Error::InvalidParameter(format!("cannot parse complex literal '{s}'"));
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // Find the sign that separates real and imaginary parts: a '+'/'-'
        // that is not the leading sign and not part of an exponent.
        let bytes = body.as_bytes();
        let mut cut = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                cut = Some(i);
                break;
            }
        }
        let (re_str, im_str) = match cut {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let re: f64 = re_str.trim().parse().map_err(|_| bad(s))?;
        let im_str = im_str.trim();
        let im: f64 = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse().map_err(|_| bad(s))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = s.parse().map_err(|_| bad(s))?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn split_kv(part: &str) -> Result<(&str, &str)> {
    part.split_once('=').ok_or_else(|| {
        Error::InvalidParameter(format!("expected key=value in family spec, got '{part}'"))
    })
}

impl FromStr for CoefficientFamily {
    type Err = Error;

    /// Parse a family spec string:
    ///
    /// * `gribov:mu=1,lambda=0.1` (values may be complex: `mu=1+0.5i`)
    /// * `laguerre:alpha=-6`
    /// * `ultraspherical:lambda=-10`
    /// * `jacobi:alpha=-9,beta=-9`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').ok_or_else(|| {
            Error::InvalidParameter(format!(
                "family spec '{s}' must look like name:key=value[,key=value]"
            ))
        })?;
        let mut kv = Vec::new();
        for part in rest.split(',') {
            kv.push(split_kv(part)?);
        }
        let lookup = |key: &str| -> Result<&str> {
            kv.iter()
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("family '{name}' needs parameter '{key}'"))
                })
        };
        let real = |key: &str| -> Result<f64> {
            let v = lookup(key)?.trim();
            v.parse().map_err(|_| {
                Error::InvalidParameter(format!("cannot parse '{v}' as a real number"))
            })
        };
        match name.trim() {
            "gribov" => {
                if kv.len() != 2 {
                    return Err(Error::InvalidParameter(
                        "gribov family takes exactly mu and lambda".into(),
                    ));
                }
                let mu = parse_complex(lookup("mu")?)?;
                let lambda = parse_complex(lookup("lambda")?)?;
                Ok(CoefficientFamily::gribov(mu, lambda))
            }
            "laguerre" => Ok(CoefficientFamily::Laguerre { alpha: real("alpha")? }),
            "ultraspherical" => Ok(CoefficientFamily::Ultraspherical { lambda: real("lambda")? }),
            "jacobi" => Ok(CoefficientFamily::Jacobi { alpha: real("alpha")?, beta: real("beta")? }),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_matches_closed_form() {
        assert_eq!(delta(1), 1.4142135623730951); // √2
        assert_eq!(delta(2), 3.4641016151377546); // 2√3
        assert_eq!(delta(10), 10.0 * 11.0f64.sqrt());
    }

    #[test]
    fn gribov_entries() {
        let fam = CoefficientFamily::gribov_real(1.0, 1.0);
        let p1 = fam.coeffs(1).unwrap();
        assert_eq!(p1.beta, c(1.0, 0.0));
        assert_eq!(p1.alpha, c(0.0, 1.4142135623730951));
        let p2 = fam.coeffs(2).unwrap();
        assert_eq!(p2.beta, c(2.0, 0.0));
        assert_eq!(p2.alpha, c(0.0, 3.4641016151377546));
    }

    #[test]
    fn gribov_complex_parameters() {
        let fam = CoefficientFamily::gribov(c(1.0, 0.5), c(0.2, 0.3));
        let p3 = fam.coeffs(3).unwrap();
        assert_eq!(p3.beta, c(3.0, 1.5));
        // α_3 = i(0.2+0.3i)·δ_3 = (−0.3 + 0.2i)·6
        let d3 = delta(3);
        assert!((p3.alpha - c(-0.3 * d3, 0.2 * d3)).norm() < 1e-15);
    }

    #[test]
    fn laguerre_entries_and_validity() {
        let fam = CoefficientFamily::Laguerre { alpha: -6.0 };
        let p1 = fam.coeffs(1).unwrap();
        assert_eq!(p1.beta, c(-5.0, 0.0));
        assert!((p1.alpha.im - 2.2360679774997896964).abs() < 1e-15); // √5
        assert_eq!(p1.alpha.re, 0.0);

        let report = fam.validate(8);
        // Index 6 gives a zero radicand (α_6 = 0); index 7 turns negative.
        assert_eq!(report.first_zero_alpha, Some(6));
        assert_eq!(report.first_invalid, Some(7));
        assert!(!report.all_valid());
        assert!(fam.validate(5).recurrence_ready());
        assert!(fam.validate(6).recurrence_ready()); // zero α at the edge is fine
        assert!(!fam.validate(7).recurrence_ready());
    }

    #[test]
    fn ultraspherical_entries() {
        let fam = CoefficientFamily::Ultraspherical { lambda: -10.0 };
        let p1 = fam.coeffs(1).unwrap();
        assert_eq!(p1.beta, c(0.0, 0.0));
        // (1/2)√(20/90)
        assert!((p1.alpha.im - 0.23570226039551584).abs() < 1e-15);
        // Denominator vanishes at k = 10.
        assert!(fam.coeffs(10).is_err());
        assert_eq!(fam.validate(12).first_invalid, Some(10));
    }

    #[test]
    fn jacobi_entries() {
        let fam = CoefficientFamily::Jacobi { alpha: -9.0, beta: -9.0 };
        let p1 = fam.coeffs(1).unwrap();
        assert_eq!(p1.beta, c(0.0, 0.0));
        // √(6272/38220), radicand assembled from (k+1)(k+a+1)(k+b+1)(k+a+b+1).
        assert!((p1.alpha.im - (6272.0f64 / 38220.0).sqrt()).abs() < 1e-16);
        assert!((p1.alpha.im - 0.40509574683346665).abs() < 1e-15);
    }

    #[test]
    fn custom_family_round_trips_entries() {
        let diag = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let off = [c(0.0, 0.5), c(0.0, 0.25)];
        let fam = CoefficientFamily::custom_from_tridiagonal(&diag, &off).unwrap();
        assert_eq!(fam.coeffs(2).unwrap().alpha, c(0.0, 0.25));
        assert_eq!(fam.coeffs(3).unwrap().alpha, c(0.0, 0.0));
        assert!(fam.coeffs(4).is_err());
        assert!(CoefficientFamily::custom_from_tridiagonal(&diag, &off[..1]).is_err());
    }

    #[test]
    fn zero_lambda_flags_zero_alphas() {
        let fam = CoefficientFamily::gribov_real(1.0, 0.0);
        let report = fam.validate(4);
        assert!(report.all_valid());
        assert_eq!(report.first_zero_alpha, Some(1));
        assert!(!report.recurrence_ready());
    }

    #[test]
    fn parse_complex_forms() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), c(-2.5, 0.0));
        assert_eq!(parse_complex("0.3i").unwrap(), c(0.0, 0.3));
        assert_eq!(parse_complex("1+0.5i").unwrap(), c(1.0, 0.5));
        assert_eq!(parse_complex("1-0.5i").unwrap(), c(1.0, -0.5));
        assert_eq!(parse_complex("1.5e-3-2i").unwrap(), c(1.5e-3, -2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e2+1e-2i").unwrap(), c(100.0, 0.01));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn family_spec_round_trip() {
        for spec in [
            "gribov:mu=1,lambda=0.1",
            "gribov:mu=1+0.5i,lambda=0.2+0.3i",
            "laguerre:alpha=-6",
            "ultraspherical:lambda=-10",
            "jacobi:alpha=-9,beta=-9",
        ] {
            let fam: CoefficientFamily = spec.parse().unwrap();
            assert_eq!(fam.to_string(), spec, "display should round-trip the spec");
            let again: CoefficientFamily = fam.to_string().parse().unwrap();
            assert_eq!(again, fam);
        }
        assert!("gribov:mu=1".parse::<CoefficientFamily>().is_err());
        assert!("hermite:a=1".parse::<CoefficientFamily>().is_err());
        assert!("gribov".parse::<CoefficientFamily>().is_err());
    }
}
