//! Discrete bilinear quadrature on the eigenvalue set.
//!
//! At truncation N there is a complex measure supported on the N eigenvalues
//! under which the recurrence polynomials `P₁ … P_N` are orthonormal in the
//! *bilinear* (unconjugated) pairing: `Σ_k w_k·P_i(z_k)·P_j(z_k) = δ_{ij}`.
//! This module builds that measure two independent ways, measures how well
//! orthonormality actually holds ([`orthogonality_defect`]), and verifies
//! the monic-transform recurrence `α²_{n−1}ℙ_{n−1} + β_nℙ_n + ℙ_{n+1} =
//! zℙ_n` ([`monic_transform_check`]).
//!
//! Everything downstream of the node set runs in double-double arithmetic:
//! the polynomial values at the extreme nodes grow past 1e14 by N = 20, so
//! the defect of a plain-double pipeline saturates around 1e−2 — orders of
//! magnitude above the contracts checked here.

use num_complex::Complex64;

use crate::coefficients::CoefficientFamily;
use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::TridiagonalMatrix;
use crate::polyrec::{self, ScaledPolyValue};
use crate::spectra::{self, SolverOptions};
use crate::textfmt;

/// How the weights are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// `w_k = (v_k)₁²` for the eigenvector normalized by the bilinear form
    /// `v_kᵀv_k = 1` (transpose, no conjugation) — the complex-symmetric
    /// analogue of classical Jacobi-matrix quadrature.
    EigenvectorSquares,
    /// Solve the N×N system `Σ_k w_k·P_i(z_k) = δ_{i,1}`, i = 1…N.
    MomentSolve,
}

impl Construction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Construction::EigenvectorSquares => "eigenvector_squares",
            Construction::MomentSolve => "moment_solve",
        }
    }
}

/// Numerical guards for measure construction.
#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    /// Minimum pairwise node distance; closer nodes abort as
    /// [`Error::DegenerateSpectrum`].
    pub node_tol: f64,
    /// Minimum `|vᵀv|` of a bilinearly-normalized eigenvector; smaller
    /// aborts as [`Error::QuasiNullVector`].
    pub qnull_tol: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { node_tol: 1e-8, qnull_tol: 1e-8 }
    }
}

/// A discrete complex measure: nodes (the truncation's eigenvalues) and one
/// complex weight per node.
#[derive(Debug, Clone)]
pub struct QuadratureMeasure {
    pub n: usize,
    pub construction: Construction,
    /// Eigenvalues, double-double polished, rounded once, sorted by (Re, Im).
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// Filled by callers that ran [`orthogonality_defect`]: (M, defect).
    pub defect_at_m: Option<(usize, f64)>,
}

impl QuadratureMeasure {
    /// Deterministic JSON with fixed field order; `defect_at_M` is null
    /// until a defect has been attached.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"N\":{},\"nodes\":{},\"weights\":{},\"construction\":{},\"defect_at_M\":{}}}",
            self.n,
            textfmt::fmt_complex_slice(&self.nodes),
            textfmt::fmt_complex_slice(&self.weights),
            textfmt::fmt_str(self.construction.as_str()),
            match self.defect_at_m {
                Some((_, d)) => textfmt::fmt_f64(d),
                None => "null".to_string(),
            }
        )
    }
}

/// Eigenvalues of the truncation, polished to double-double Newton fixed
/// points of the characteristic polynomial and rounded exactly once.
fn polished_nodes(
    family: &CoefficientFamily,
    n: usize,
    node_tol: f64,
) -> Result<Vec<Complex64>> {
    let m = TridiagonalMatrix::from_family(family, n)?;
    let spectrum = spectra::eigen_dense(&m, &SolverOptions::default())?;
    let mut nodes: Vec<Complex64> = Vec::with_capacity(n);
    for &z0 in &spectrum.values {
        let mut z = DdComplex::from_c64(z0);
        for _ in 0..8 {
            match polyrec::charpoly_newton_correction_dd(family, n, z)? {
                None => break,
                Some(corr) => {
                    z = z.sub(corr);
                    if corr.abs().to_f64() <= 1e-30 * (1.0 + z.to_c64().norm()) {
                        break;
                    }
                }
            }
        }
        nodes.push(z.to_c64());
    }
    nodes.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let d = (nodes[i] - nodes[j]).norm();
            if d <= node_tol {
                return Err(Error::DegenerateSpectrum(format!(
                    "nodes {} and {} are {d:.3e} apart (minimum {node_tol:.3e})",
                    nodes[i], nodes[j]
                )));
            }
        }
    }
    Ok(nodes)
}

/// Build the discrete measure for the leading N×N truncation.
///
/// Requires every off-diagonal coefficient below N to be nonzero (the
/// orthonormal recurrence divides by them) and a simple spectrum.
pub fn discrete_measure(
    family: &CoefficientFamily,
    n: usize,
    construction: Construction,
    opts: &MeasureOptions,
) -> Result<QuadratureMeasure> {
    assert!(n >= 1, "a measure needs at least one node");
    let report = family.validate(n);
    if let Some(k) = report.first_invalid {
        return Err(Error::InvalidParameter(format!(
            "family {family} is undefined at index {k} (needed through {n})"
        )));
    }
    if let Some(k) = report.first_zero_alpha {
        if k < n {
            return Err(Error::InvalidParameter(format!(
                "off-diagonal coefficient vanishes at index {k}; \
                 the measure needs all of them nonzero below {n}"
            )));
        }
    }
    let nodes = polished_nodes(family, n, opts.node_tol)?;
    let columns = node_columns(family, n, &nodes)?;
    let weights = match construction {
        Construction::EigenvectorSquares => eigenvector_weights(&nodes, &columns, opts)?,
        Construction::MomentSolve => moment_weights(&columns)?,
    };
    Ok(QuadratureMeasure { n, construction, nodes, weights, defect_at_m: None })
}

/// One orthonormal-polynomial column `(P_1(z_k), …, P_N(z_k))` per node, via
/// the shifted tridiagonal solve — the evaluator that keeps the decaying
/// components of extreme-node columns at full absolute accuracy.
fn node_columns(
    family: &CoefficientFamily,
    n: usize,
    nodes: &[Complex64],
) -> Result<Vec<Vec<DdComplex>>> {
    let matrix = TridiagonalMatrix::from_family(family, n)?;
    nodes
        .iter()
        .map(|&z| linalg::orthonormal_column_dd(matrix.diag(), matrix.offdiag(), z))
        .collect()
}

/// `w_k = v₁²/(vᵀv)` where `v = (P_1(z_k), …, P_N(z_k))` is the truncation's
/// eigenvector at `z_k`, accumulated in double-double.
fn eigenvector_weights(
    nodes: &[Complex64],
    columns: &[Vec<DdComplex>],
    opts: &MeasureOptions,
) -> Result<Vec<Complex64>> {
    let mut weights = Vec::with_capacity(columns.len());
    for (z, v) in nodes.iter().zip(columns) {
        let mut bilinear = DdComplex::ZERO;
        let mut hermitian = Dd::ZERO;
        for x in v {
            bilinear = bilinear.add(x.mul(*x));
            hermitian = hermitian.add(x.norm_sqr());
        }
        let isotropy = bilinear.abs().to_f64() / hermitian.to_f64();
        if isotropy <= opts.qnull_tol {
            return Err(Error::QuasiNullVector(format!(
                "eigenvector at node {z} is numerically self-orthogonal \
                 (|v^T v| is {isotropy:.3e} of its Hermitian norm, \
                 minimum {:.3e})",
                opts.qnull_tol
            )));
        }
        weights.push(v[0].mul(v[0]).div(bilinear).to_c64());
    }
    Ok(weights)
}

/// Solve the moment system `Σ_k w_k·P_i(z_k) = δ_{i,1}` in double-double.
fn moment_weights(columns: &[Vec<DdComplex>]) -> Result<Vec<Complex64>> {
    let n = columns.len();
    let mut a = vec![vec![DdComplex::ZERO; n]; n];
    for (k, col) in columns.iter().enumerate() {
        for i in 0..n {
            a[i][k] = col[i];
        }
    }
    let mut b = vec![DdComplex::ZERO; n];
    b[0] = DdComplex::ONE;
    let w = linalg::lu_solve_dd(a, b)?;
    Ok(w.into_iter().map(|x| x.to_c64()).collect())
}

/// Largest deviation from bilinear orthonormality over all degree pairs up
/// to M: `max_{i,j ≤ M} |Σ_k w_k·P_i(z_k)·P_j(z_k) − δ_{ij}|`, accumulated
/// in double-double at the stored nodes and weights.
pub fn orthogonality_defect(
    measure: &QuadratureMeasure,
    family: &CoefficientFamily,
    m: usize,
) -> Result<f64> {
    assert!(m >= 1 && m <= measure.n, "defect degree must satisfy 1 <= M <= N");
    if let Some(k) = family.validate(measure.n).first_zero_alpha {
        if k < measure.n {
            return Err(Error::InvalidParameter(format!(
                "off-diagonal coefficient vanishes at index {k}; \
                 the polynomials are undefined past it"
            )));
        }
    }
    let tables = node_columns(family, measure.n, &measure.nodes)?;
    let mut defect = 0f64;
    for i in 0..m {
        for j in i..m {
            let mut g = DdComplex::ZERO;
            for (k, table) in tables.iter().enumerate() {
                let w = DdComplex::from_c64(measure.weights[k]);
                g = g.add(w.mul(table[i]).mul(table[j]));
            }
            if i == j {
                g = g.sub(DdComplex::ONE);
            }
            defect = defect.max(g.abs().to_f64());
        }
    }
    Ok(defect)
}

/// Verify the monic-transform recurrence at sample points.
///
/// With `ℙ_m = (∏_{k<m} α_k)·P_m` (so `ℙ₁ = P₁`), every line
/// `α²_{m−1}ℙ_{m−1} + β_mℙ_m + ℙ_{m+1} = zℙ_m` for `1 ≤ m ≤ N−1` is an
/// exact identity; this evaluates both sides in scaled arithmetic and
/// returns the largest residual relative to the line's own term magnitude.
pub fn monic_transform_check(
    family: &CoefficientFamily,
    n: usize,
    points: &[Complex64],
) -> Result<f64> {
    assert!(n >= 2, "the transform needs at least two polynomials");
    let mut worst = 0f64;
    for &z in points {
        let seq = polyrec::eval_p_sequence(family, n, z, false)?;
        // Monic values ℙ_1 … ℙ_N with running prefactor ∏_{k<m} α_k.
        let mut monic: Vec<ScaledPolyValue> = Vec::with_capacity(n);
        let mut prefactor = ScaledPolyValue::one();
        for m in 1..=n {
            monic.push(prefactor * seq.value(m));
            prefactor = prefactor * ScaledPolyValue::from_complex(family.coeffs(m)?.alpha);
        }
        for m in 1..=(n - 1) {
            let pair = family.coeffs(m)?;
            let bz = ScaledPolyValue::from_complex(pair.beta - z);
            let t_mid = bz * monic[m - 1];
            let t_up = monic[m];
            let mut r = t_mid + t_up;
            let mut scale = t_mid.abs_scaled() + t_up.abs_scaled();
            if m >= 2 {
                let ap = family.coeffs(m - 1)?.alpha;
                let t_lo = ScaledPolyValue::from_complex(ap * ap) * monic[m - 2];
                r = r + t_lo;
                scale = scale + t_lo.abs_scaled();
            }
            let rel = if scale.is_zero() { r.abs() } else { (r / scale).abs() };
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gribov(mu: f64, lambda: f64) -> CoefficientFamily {
        CoefficientFamily::gribov_real(mu, lambda)
    }

    fn measure(
        mu: f64,
        lambda: f64,
        n: usize,
        construction: Construction,
    ) -> QuadratureMeasure {
        discrete_measure(&gribov(mu, lambda), n, construction, &MeasureOptions::default())
            .unwrap()
    }

    #[test]
    fn single_node_measure_is_point_mass() {
        for construction in [Construction::EigenvectorSquares, Construction::MomentSolve] {
            let m = measure(1.0, 0.1, 1, construction);
            assert_eq!(m.nodes.len(), 1);
            assert!((m.nodes[0] - c(1.0, 0.0)).norm() < 1e-15);
            assert!((m.weights[0] - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_node_measure_matches_closed_form() {
        let lo = 1.020416847668728;
        let hi = 1.979583152331272;
        let w_lo = 1.0212860351426869;
        let w_hi = -0.021286035142686907;
        for construction in [Construction::EigenvectorSquares, Construction::MomentSolve] {
            let m = measure(1.0, 0.1, 2, construction);
            assert!((m.nodes[0] - c(lo, 0.0)).norm() < 1e-13);
            assert!((m.nodes[1] - c(hi, 0.0)).norm() < 1e-13);
            assert!((m.weights[0] - c(w_lo, 0.0)).norm() < 1e-12, "{construction:?}");
            assert!((m.weights[1] - c(w_hi, 0.0)).norm() < 1e-12, "{construction:?}");
            let sum: Complex64 = m.weights.iter().sum();
            assert!((sum - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn complex_pair_nodes_conjugate_weights() {
        let im = 1.3228756555322953;
        let m = measure(1.0, 1.0, 2, Construction::MomentSolve);
        assert!((m.nodes[0] - c(1.5, -im)).norm() < 1e-13);
        assert!((m.nodes[1] - c(1.5, im)).norm() < 1e-13);
        let sum: Complex64 = m.weights.iter().sum();
        assert!((sum - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m.weights[0] - m.weights[1].conj()).norm() < 1e-12);
    }

    #[test]
    fn constructions_agree() {
        let a = measure(1.0, 0.5, 12, Construction::EigenvectorSquares);
        let b = measure(1.0, 0.5, 12, Construction::MomentSolve);
        let worst = a
            .weights
            .iter()
            .zip(b.weights.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-8, "constructions differ by {worst}");
    }

    #[test]
    fn orthogonality_defect_small_and_nested() {
        let fam = gribov(1.0, 0.1);
        let m = measure(1.0, 0.1, 12, Construction::EigenvectorSquares);
        let full = orthogonality_defect(&m, &fam, 12).unwrap();
        assert!(full <= 1e-8, "defect {full}");
        let nested = orthogonality_defect(&m, &fam, 6).unwrap();
        assert!(nested <= 1e-8, "nested defect {nested}");
        // M = 1 is the weight-sum identity.
        let unit = orthogonality_defect(&m, &fam, 1).unwrap();
        assert!(unit <= 1e-12, "weight sum defect {unit}");
    }

    #[test]
    fn complex_node_defect() {
        let fam = gribov(1.0, 1.0);
        let m = measure(1.0, 1.0, 10, Construction::EigenvectorSquares);
        let d = orthogonality_defect(&m, &fam, 10).unwrap();
        assert!(d <= 1e-7, "defect {d}");
    }

    #[test]
    fn first_moment_reproduces_mu() {
        let m = measure(1.0, 0.3, 10, Construction::EigenvectorSquares);
        let moment: Complex64 = m
            .nodes
            .iter()
            .zip(m.weights.iter())
            .map(|(z, w)| w * z)
            .sum();
        assert!((moment - c(1.0, 0.0)).norm() <= 1e-9, "first moment {moment}");
    }

    #[test]
    fn conjugate_pairing_of_nodes_and_weights() {
        let m = measure(1.0, 1.0, 9, Construction::EigenvectorSquares);
        for (z, w) in m.nodes.iter().zip(m.weights.iter()) {
            let partner = m
                .nodes
                .iter()
                .zip(m.weights.iter())
                .map(|(z2, w2)| (z2 - z.conj()).norm() + (w2 - w.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(partner <= 1e-9, "unpaired node {z} / weight {w}: {partner}");
        }
    }

    #[test]
    fn clustered_nodes_are_rejected() {
        let fam = CoefficientFamily::custom_from_tridiagonal(
            &[c(0.0, 0.0), c(0.0, 0.0)],
            &[c(1e-12, 0.0)],
        )
        .unwrap();
        let err = discrete_measure(
            &fam,
            2,
            Construction::EigenvectorSquares,
            &MeasureOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum(_)), "{err:?}");
    }

    #[test]
    fn near_defective_vector_is_rejected() {
        // A slightly perturbed 2×2 Jordan-like complex-symmetric matrix has
        // well-separated eigenvalues but nearly self-orthogonal vectors.
        let fam = CoefficientFamily::custom_from_tridiagonal(
            &[c(1.0, 0.0), c(-1.0 + 1e-3, 0.0)],
            &[c(0.0, 1.0)],
        )
        .unwrap();
        let opts = MeasureOptions { node_tol: 1e-8, qnull_tol: 0.5 };
        let err =
            discrete_measure(&fam, 2, Construction::EigenvectorSquares, &opts).unwrap_err();
        assert!(matches!(err, Error::QuasiNullVector(_)), "{err:?}");
    }

    #[test]
    fn zero_offdiagonal_rejected() {
        let fam = gribov(1.0, 0.0);
        let err = discrete_measure(
            &fam,
            3,
            Construction::MomentSolve,
            &MeasureOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)), "{err:?}");
    }

    #[test]
    fn monic_recurrence_residuals() {
        let fam = gribov(1.0, 0.1);
        let pts = [c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.0)];
        let r = monic_transform_check(&fam, 10, &pts).unwrap();
        assert!(r <= 1e-11, "residual {r}");
        // Degenerate sample at z = β₁ for N = 2: every term vanishes exactly.
        let r = monic_transform_check(&fam, 2, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(r, 0.0);
        // Complex parameters keep the identity.
        let fam = CoefficientFamily::gribov(c(1.0, 0.5), c(0.2, 0.3));
        let r = monic_transform_check(&fam, 12, &[c(0.3, -0.7), c(2.0, 1.0)]).unwrap();
        assert!(r <= 1e-11, "complex-parameter residual {r}");
    }

    #[test]
    fn measure_json_shape() {
        let mut m = measure(1.0, 0.1, 2, Construction::EigenvectorSquares);
        let j = m.to_json();
        assert!(j.starts_with("{\"N\":2,\"nodes\":[["));
        assert!(j.contains("\"construction\":\"eigenvector_squares\""));
        assert!(j.ends_with("\"defect_at_M\":null}"));
        // A dyadic value survives the float→text→float round trip verbatim.
        m.defect_at_m = Some((2, 0.0078125));
        let j = m.to_json();
        assert!(j.ends_with("\"defect_at_M\":7.8125000000000000e-3}"), "{j}");
        assert_eq!(j, m.to_json());
    }
}
