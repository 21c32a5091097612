//! The operator view: tridiagonal matrices, their symmetric structure, and
//! non-normality diagnostics.
//!
//! Matrices here are complex *symmetric* (equal upper and lower
//! off-diagonals), not Hermitian. [`TridiagonalMatrix`] stores that symmetric
//! band form together with the coefficient family it came from;
//! [`RawTridiagonal`] accepts possibly-asymmetric bands so the symmetry
//! assumption can be *measured* ([`RawTridiagonal::j_symmetry_defect`])
//! before it is relied upon.
//!
//! A complex symmetric matrix splits exactly as `M = H¹ + i·H²` with both
//! parts real symmetric ([`hermitian_split`]); the split drives localization
//! bounds and the Rayleigh-quotient decomposition of eigenvalues
//! ([`rayleigh_parts`]). Non-normality is probed two ways: the dimension
//! actually spanned by a Krylov chain ([`krylov_rank`]) and the Gram
//! determinant of forward and adjoint power vectors ([`gram_determinant`]),
//! which collapses when the two chains share a subspace.

use num_complex::Complex64;

use crate::coefficients::CoefficientFamily;
use crate::error::{Error, Result};
use crate::linalg;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default relative tolerance for the Krylov-rank residual test.
pub const KRYLOV_RANK_TOL: f64 = 1e-10;

/// Residual bound (absolute) above which [`rayleigh_parts`] refuses a pair.
pub const RAYLEIGH_RESIDUAL_TOL: f64 = 1e-8;

/// Complex symmetric tridiagonal matrix with its originating family.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    n: usize,
    diag: Vec<Complex64>,
    offdiag: Vec<Complex64>,
    family: CoefficientFamily,
}

impl TridiagonalMatrix {
    /// Assemble the n×n matrix of a coefficient family: `diag[k−1] = β_k`,
    /// `offdiag[k−1] = α_k`. Fails where the family is undefined.
    pub fn from_family(family: &CoefficientFamily, n: usize) -> Result<Self> {
        assert!(n >= 1, "matrix size must be at least 1");
        let mut diag = Vec::with_capacity(n);
        let mut offdiag = Vec::with_capacity(n - 1);
        for k in 1..=n {
            let pair = family.coeffs(k)?;
            diag.push(pair.beta);
            if k < n {
                offdiag.push(pair.alpha);
            }
        }
        Ok(TridiagonalMatrix { n, diag, offdiag, family: family.clone() })
    }

    /// Wrap explicit symmetric bands (the family becomes a custom list).
    pub fn from_parts(diag: Vec<Complex64>, offdiag: Vec<Complex64>) -> Result<Self> {
        let family = CoefficientFamily::custom_from_tridiagonal(&diag, &offdiag)?;
        Ok(TridiagonalMatrix { n: diag.len(), diag, offdiag, family })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[Complex64] {
        &self.offdiag
    }

    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }

    /// `M·v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n, "vector length must match the matrix size");
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < self.n {
                acc += self.offdiag[i] * v[i + 1];
            }
            out.push(acc);
        }
        out
    }

    /// `Mᴴ·v`; for a symmetric matrix `Mᴴ = conj(M)`, so this is
    /// `conj(M·conj(v))`.
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let conj_v: Vec<Complex64> = v.iter().map(|x| x.conj()).collect();
        self.apply(&conj_v).into_iter().map(|x| x.conj()).collect()
    }

    /// Row-sum (infinity) norm.
    pub fn infinity_norm(&self) -> f64 {
        let mut best = 0f64;
        for i in 0..self.n {
            let mut s = self.diag[i].norm();
            if i > 0 {
                s += self.offdiag[i - 1].norm();
            }
            if i + 1 < self.n {
                s += self.offdiag[i].norm();
            }
            best = best.max(s);
        }
        best
    }
}

/// Tridiagonal bands as ingested, upper and lower kept separate so the
/// symmetry of the input can be measured instead of assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTridiagonal {
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
}

impl RawTridiagonal {
    pub fn new(diag: Vec<Complex64>, upper: Vec<Complex64>, lower: Vec<Complex64>) -> Result<Self> {
        if diag.is_empty() || upper.len() + 1 != diag.len() || lower.len() != upper.len() {
            return Err(Error::ShapeMismatch(format!(
                "raw tridiagonal needs len(upper) = len(lower) = len(diag) − 1, \
                 got diag {}, upper {}, lower {}",
                diag.len(),
                upper.len(),
                lower.len()
            )));
        }
        Ok(RawTridiagonal { diag, upper, lower })
    }

    /// View of a symmetric matrix (defect 0 by construction).
    pub fn from_symmetric(m: &TridiagonalMatrix) -> Self {
        RawTridiagonal {
            diag: m.diag.clone(),
            upper: m.offdiag.clone(),
            lower: m.offdiag.clone(),
        }
    }

    /// Deviation from symmetry under plain transposition:
    /// `max_k |upper_k − lower_k|`. Zero iff `M = Mᵀ`.
    pub fn j_symmetry_defect(&self) -> f64 {
        self.upper
            .iter()
            .zip(self.lower.iter())
            .map(|(u, l)| (u - l).norm())
            .fold(0.0, f64::max)
    }

    /// Convert to the symmetric representation; requires an exactly
    /// symmetric input.
    pub fn into_symmetric(self) -> Result<TridiagonalMatrix> {
        let defect = self.j_symmetry_defect();
        if defect != 0.0 {
            return Err(Error::ShapeMismatch(format!(
                "matrix is not symmetric: transposition defect {defect:.3e}"
            )));
        }
        TridiagonalMatrix::from_parts(self.diag, self.upper)
    }
}

/// Exact decomposition `M = H¹ + i·H²` of a complex symmetric tridiagonal
/// matrix into two real symmetric tridiagonal matrices (component split, so
/// reconstruction is bit-exact).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSplit {
    n: usize,
    family: CoefficientFamily,
    h1_diag: Vec<f64>,
    h1_off: Vec<f64>,
    h2_diag: Vec<f64>,
    h2_off: Vec<f64>,
}

/// Split `M = H¹ + i·H²` into its real symmetric parts.
pub fn hermitian_split(m: &TridiagonalMatrix) -> HermitianSplit {
    HermitianSplit {
        n: m.n,
        family: m.family.clone(),
        h1_diag: m.diag.iter().map(|z| z.re).collect(),
        h1_off: m.offdiag.iter().map(|z| z.re).collect(),
        h2_diag: m.diag.iter().map(|z| z.im).collect(),
        h2_off: m.offdiag.iter().map(|z| z.im).collect(),
    }
}

impl HermitianSplit {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h1_diag(&self) -> &[f64] {
        &self.h1_diag
    }

    pub fn h1_off(&self) -> &[f64] {
        &self.h1_off
    }

    pub fn h2_diag(&self) -> &[f64] {
        &self.h2_diag
    }

    pub fn h2_off(&self) -> &[f64] {
        &self.h2_off
    }

    /// Reassemble `H¹ + i·H²`; bit-identical to the matrix that was split.
    pub fn reconstruct(&self) -> TridiagonalMatrix {
        TridiagonalMatrix {
            n: self.n,
            diag: self
                .h1_diag
                .iter()
                .zip(self.h2_diag.iter())
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
            offdiag: self
                .h1_off
                .iter()
                .zip(self.h2_off.iter())
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
            family: self.family.clone(),
        }
    }

    fn quadratic_form(diag: &[f64], off: &[f64], v: &[Complex64]) -> f64 {
        // φᴴ H φ for real symmetric tridiagonal H: the diagonal contributes
        // Σ h_i |φ_i|², each off-diagonal pair 2·h_k·Re(conj(φ_k)·φ_{k+1}).
        let mut s = 0f64;
        for (h, x) in diag.iter().zip(v.iter()) {
            s += h * x.norm_sqr();
        }
        for (k, h) in off.iter().enumerate() {
            s += 2.0 * h * (v[k].conj() * v[k + 1]).re;
        }
        s
    }
}

/// An eigenvalue with its eigenvector and the residual `‖Mφ − zφ‖₂` measured
/// when the pair was produced.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

/// Decompose an eigenvalue into Rayleigh quotients of the split:
/// `(φᴴH¹φ, φᴴH²φ)`, which approximate `(Re z, Im z)` for a genuine unit
/// eigenpair.
///
/// The pair is re-validated against the reconstructed matrix — a stale or
/// fabricated pair (non-unit vector, or residual above
/// [`RAYLEIGH_RESIDUAL_TOL`]) is rejected with [`Error::NotAnEigenpair`].
pub fn rayleigh_parts(split: &HermitianSplit, pair: &EigenPair) -> Result<(f64, f64)> {
    if pair.vector.len() != split.n {
        return Err(Error::ShapeMismatch(format!(
            "eigenvector length {} does not match matrix size {}",
            pair.vector.len(),
            split.n
        )));
    }
    let nrm: f64 = pair.vector.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-8 {
        return Err(Error::NotAnEigenpair(format!(
            "eigenvector norm {nrm} is not 1 within 1e-8"
        )));
    }
    let m = split.reconstruct();
    let mv = m.apply(&pair.vector);
    let res: f64 = mv
        .iter()
        .zip(pair.vector.iter())
        .map(|(mi, vi)| (mi - pair.value * vi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if res > RAYLEIGH_RESIDUAL_TOL {
        return Err(Error::NotAnEigenpair(format!(
            "recomputed residual {res:.3e} exceeds {RAYLEIGH_RESIDUAL_TOL:.0e}"
        )));
    }
    Ok((
        HermitianSplit::quadratic_form(&split.h1_diag, &split.h1_off, &pair.vector),
        HermitianSplit::quadratic_form(&split.h2_diag, &split.h2_off, &pair.vector),
    ))
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Dimension of the space actually spanned by the Krylov chain
/// `e₁, M e₁, M² e₁, …` up to `depth` vectors, built by incremental
/// orthonormalization (each new direction is `M` applied to the previous
/// *orthonormalized* basis vector, then Gram–Schmidt twice).
///
/// The chain stops — and the rank stalls — when the new direction's
/// component outside the current span falls below `tol` of its length.
/// With `λ = 0` the matrix is diagonal and the rank is 1; for generic
/// parameters the chain stays full-rank up to `depth = n`.
pub fn krylov_rank(m: &TridiagonalMatrix, depth: usize, tol: f64) -> usize {
    assert!(depth >= 1, "depth must be at least 1");
    assert!(depth <= m.n(), "depth cannot exceed the matrix size");
    let n = m.n();
    let mut e1 = vec![ZERO; n];
    e1[0] = Complex64::new(1.0, 0.0);
    let mut basis = vec![e1];
    for _ in 1..depth {
        let mut w = m.apply(basis.last().expect("basis is never empty"));
        let orig = norm(&w);
        if orig == 0.0 {
            break;
        }
        for _ in 0..2 {
            for q in &basis {
                let h = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q.iter()) {
                    *wi -= h * qi;
                }
            }
        }
        let rest = norm(&w);
        if rest <= tol * orig {
            break;
        }
        let inv = 1.0 / rest;
        for wi in w.iter_mut() {
            *wi *= inv;
        }
        basis.push(w);
    }
    basis.len()
}

/// Determinant of the Gram matrix of the `order+1` unit vectors
/// `{e₁, M̂e₁, …, M̂^{order−1}e₁, (M̂ᴴ)^{order−1}e₁}` (each power step is
/// normalized, hat denoting that normalization). For the families here the
/// adjoint chain lies in the forward Krylov space when the parameters are
/// real, so the determinant collapses to ~0; it is the quantitative
/// obstruction to building a joint orthonormal basis from both chains.
pub fn gram_determinant(m: &TridiagonalMatrix, order: usize) -> Result<Complex64> {
    assert!(order >= 1, "order must be at least 1");
    if order + 1 > m.n() {
        return Err(Error::SizeExceeded(format!(
            "gram determinant of order {order} needs order+1 ≤ n, but n = {}",
            m.n()
        )));
    }
    let n = m.n();
    let mut e1 = vec![ZERO; n];
    e1[0] = Complex64::new(1.0, 0.0);

    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(order + 1);
    vectors.push(e1.clone());
    for _ in 1..order {
        let mut w = m.apply(vectors.last().expect("non-empty"));
        let nrm = norm(&w);
        if nrm > 0.0 {
            let inv = 1.0 / nrm;
            for x in w.iter_mut() {
                *x *= inv;
            }
        }
        vectors.push(w);
    }
    let mut w = e1;
    for _ in 1..order {
        w = m.apply_adjoint(&w);
        let nrm = norm(&w);
        if nrm > 0.0 {
            let inv = 1.0 / nrm;
            for x in w.iter_mut() {
                *x *= inv;
            }
        }
    }
    vectors.push(w);

    let k = vectors.len();
    let mut gram = vec![vec![ZERO; k]; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = dot(&vectors[i], &vectors[j]);
        }
    }
    Ok(linalg::lu_det(gram))
}
