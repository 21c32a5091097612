//! Crate-internal linear algebra kernels.
//!
//! * a dense single-shift QR eigensolver for complex (non-Hermitian)
//!   tridiagonal/Hessenberg matrices — the matrix-route oracle;
//! * double-double inverse iteration on tridiagonal systems — eigenvectors
//!   whose small leading components must carry full *relative* accuracy for
//!   the quadrature weights;
//! * a stable evaluator for the orthonormal-polynomial column
//!   `(P_1(z), …, P_n(z))` via a shifted tridiagonal solve — the forward
//!   recurrence destroys the decaying components at extreme eigenvalues;
//! * double-double dense LU — the moment-system solve;
//! * plain LU determinant — Gram-matrix degeneracy.
//!
//! Everything here is deterministic: fixed starting vectors, no randomness.

use num_complex::Complex64;

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// ---------------------------------------------------------------------------
// Dense complex QR on Hessenberg form
// ---------------------------------------------------------------------------

/// Complex Givens rotation `G = [[c, s], [−s̄, c]]` (c real) with
/// `G·(f, g)ᵀ = (r, 0)ᵀ`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    if g == ZERO {
        return (1.0, ZERO);
    }
    if f == ZERO {
        // r = |g|, so s = g*/|g|.
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let ga = g.norm();
    let d = fa.hypot(ga);
    let c = fa / d;
    let s = (f / fa) * (g.conj() / d);
    (c, s)
}

/// Eigenvalues of `[[a, b], [c, d]]`, larger-magnitude root first, computed
/// with the usual guard against cancellation in the quadratic formula.
fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let x = (a + d) * 0.5;
    let sd = (a - d) * 0.5;
    let mut r = (sd * sd + b * c).sqrt();
    // Choose the sign that adds constructively.
    if (x.conj() * r).re < 0.0 {
        r = -r;
    }
    let e1 = x + r;
    if e1 == ZERO {
        return (ZERO, ZERO);
    }
    let det = a * d - b * c;
    (e1, det / e1)
}

/// Shifted-QR sweep on the active block `[lo, hi)` of an upper-Hessenberg
/// matrix (explicit single shift, complex Givens rotations).
fn qr_sweep(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    for i in lo..hi {
        h[i][i] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = c * x + s * y;
            h[k + 1][j] = -s.conj() * x + c * y;
        }
        h[k + 1][k] = ZERO;
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        // Right-multiply by Gᴴ: mixes columns k and k+1, rows lo..=k+1.
        for row in h.iter_mut().take(k + 2).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = c * x + s.conj() * y;
            row[k + 1] = -s * x + c * y;
        }
    }
    for i in lo..hi {
        h[i][i] += shift;
    }
}

/// Wilkinson-style shift: the eigenvalue of the trailing 2×2 block closer to
/// its bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (e1, e2) = eig2x2(a, b, c, d);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// All eigenvalues of the complex tridiagonal matrix with the given diagonal
/// and (symmetric) off-diagonal, via dense Hessenberg QR. Returns the
/// unsorted eigenvalue list and the number of QR sweeps spent.
pub(crate) fn tridiagonal_eigenvalues(
    diag: &[Complex64],
    off: &[Complex64],
    sweep_budget: usize,
) -> Result<(Vec<Complex64>, usize)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1), "off-diagonal length must be n-1");
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    let mut h = vec![vec![ZERO; n]; n];
    for i in 0..n {
        h[i][i] = diag[i];
        if i + 1 < n {
            h[i][i + 1] = off[i];
            h[i + 1][i] = off[i];
        }
    }
    hessenberg_eigenvalues(h, sweep_budget)
}

fn hessenberg_eigenvalues(
    mut h: Vec<Vec<Complex64>>,
    sweep_budget: usize,
) -> Result<(Vec<Complex64>, usize)> {
    let n = h.len();
    let mut scale = 0f64;
    for row in &h {
        for v in row {
            scale = scale.max(v.norm());
        }
    }
    if scale == 0.0 {
        return Ok((vec![ZERO; n], 0));
    }

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n;
    let mut sweeps_total = 0usize;
    let mut sweeps_this_block = 0usize;

    while hi > 0 {
        // Flush negligible subdiagonals in the active window.
        for i in 1..hi {
            if h[i][i - 1] != ZERO {
                let local = h[i - 1][i - 1].norm() + h[i][i].norm();
                let thresh = f64::EPSILON * if local > 0.0 { local } else { scale };
                if h[i][i - 1].norm() <= thresh {
                    h[i][i - 1] = ZERO;
                }
            }
        }
        // Deflate converged trailing blocks.
        if hi == 1 || h[hi - 1][hi - 2] == ZERO {
            eigs.push(h[hi - 1][hi - 1]);
            hi -= 1;
            sweeps_this_block = 0;
            continue;
        }
        if hi == 2 || h[hi - 2][hi - 3] == ZERO {
            let (e1, e2) =
                eig2x2(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1]);
            eigs.push(e1);
            eigs.push(e2);
            hi -= 2;
            sweeps_this_block = 0;
            continue;
        }
        if sweeps_total >= sweep_budget {
            return Err(Error::NoConvergence(sweeps_total));
        }
        // Start of the irreducible block ending at hi-1.
        let mut lo = 0;
        for i in (1..hi).rev() {
            if h[i][i - 1] == ZERO {
                lo = i;
                break;
            }
        }
        sweeps_total += 1;
        sweeps_this_block += 1;
        let shift = if sweeps_this_block % 16 == 0 {
            // Exceptional shift to break symmetric stalls.
            h[hi - 1][hi - 1] + Complex64::new(1.5 * h[hi - 1][hi - 2].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1])
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok((eigs, sweeps_total))
}

// ---------------------------------------------------------------------------
// Double-double inverse iteration on tridiagonal systems
// ---------------------------------------------------------------------------

/// LU factorization of a tridiagonal matrix shifted by −z, with partial
/// pivoting. U has two superdiagonals because of row swaps.
struct TridiagLu {
    u0: Vec<DdComplex>,
    u1: Vec<DdComplex>,
    u2: Vec<DdComplex>,
    mult: Vec<DdComplex>,
    swapped: Vec<bool>,
}

fn factor_shifted_tridiagonal(diag: &[Complex64], off: &[Complex64], z: Complex64) -> TridiagLu {
    let n = diag.len();
    let zd = DdComplex::from_c64(z);
    let a: Vec<DdComplex> =
        diag.iter().map(|&d| DdComplex::from_c64(d).sub(zd)).collect();
    let b: Vec<DdComplex> = off.iter().map(|&o| DdComplex::from_c64(o)).collect();
    let mut scale = 0f64;
    for v in diag {
        scale = scale.max(v.norm());
    }
    for v in off {
        scale = scale.max(v.norm());
    }
    scale = (scale + z.norm()).max(1e-300);
    // Regularization for exactly-singular pivots, far below dd resolution of
    // the matrix scale.
    let tiny = DdComplex::from_c64(Complex64::new(scale * 2f64.powi(-160), 0.0));

    let mut u0 = vec![DdComplex::ZERO; n];
    let mut u1 = vec![DdComplex::ZERO; n];
    let mut u2 = vec![DdComplex::ZERO; n];
    let mut mult = vec![DdComplex::ZERO; n];
    let mut swapped = vec![false; n];

    // (d, e, f): the partially reduced row i at columns i, i+1, i+2.
    let mut d = a[0];
    let mut e = if n > 1 { b[0] } else { DdComplex::ZERO };
    let mut f = DdComplex::ZERO;
    for i in 0..n.saturating_sub(1) {
        let next_off = if i + 1 < n - 1 { b[i + 1] } else { DdComplex::ZERO };
        if b[i].norm_sqr().hi > d.norm_sqr().hi {
            // Swap with the original row i+1.
            swapped[i] = true;
            u0[i] = b[i];
            u1[i] = a[i + 1];
            u2[i] = next_off;
            let m = d.div(u0[i]);
            mult[i] = m;
            d = e.sub(m.mul(u1[i]));
            e = f.sub(m.mul(u2[i]));
            f = DdComplex::ZERO;
        } else {
            let piv = if d.norm_sqr().hi == 0.0 { tiny } else { d };
            u0[i] = piv;
            u1[i] = e;
            u2[i] = f;
            let m = b[i].div(piv);
            mult[i] = m;
            d = a[i + 1].sub(m.mul(e));
            e = next_off.sub(m.mul(f));
            f = DdComplex::ZERO;
        }
    }
    u0[n - 1] = if d.norm_sqr().hi == 0.0 { tiny } else { d };
    u1[n - 1] = DdComplex::ZERO;
    u2[n - 1] = DdComplex::ZERO;
    TridiagLu { u0, u1, u2, mult, swapped }
}

fn solve_factored(lu: &TridiagLu, rhs: &[DdComplex]) -> Vec<DdComplex> {
    let n = rhs.len();
    let mut x = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if lu.swapped[i] {
            x.swap(i, i + 1);
        }
        let t = lu.mult[i].mul(x[i]);
        x[i + 1] = x[i + 1].sub(t);
    }
    for i in (0..n).rev() {
        let mut t = x[i];
        if i + 1 < n {
            t = t.sub(lu.u1[i].mul(x[i + 1]));
        }
        if i + 2 < n {
            t = t.sub(lu.u2[i].mul(x[i + 2]));
        }
        x[i] = t.div(lu.u0[i]);
    }
    x
}

fn euclid_norm_dd(v: &[DdComplex]) -> Dd {
    let mut s = Dd::ZERO;
    for x in v {
        s = s.add(x.norm_sqr());
    }
    s.sqrt()
}

fn tridiagonal_matvec_dd(
    diag: &[Complex64],
    off: &[Complex64],
    v: &[DdComplex],
) -> Vec<DdComplex> {
    let n = diag.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = DdComplex::from_c64(diag[i]).mul(v[i]);
        if i > 0 {
            acc = acc.add(DdComplex::from_c64(off[i - 1]).mul(v[i - 1]));
        }
        if i + 1 < n {
            acc = acc.add(DdComplex::from_c64(off[i]).mul(v[i + 1]));
        }
        out.push(acc);
    }
    out
}

/// The column `(P_1(z), …, P_n(z))` of orthonormal-polynomial values at `z`,
/// for the polynomials attached to this tridiagonal matrix (`P_1 = 1`).
///
/// Uses the exact identity `(T − z)·p(z) = −α_n·P_{n+1}(z)·e_n`: solving
/// `(T − z)x = e_n` gives a vector proportional to the column for every `z`
/// — at an eigenvalue the regularized pivot turns the solve into one inverse
/// iteration, which lands on the same direction. Rescaling to `x_1 = 1`
/// recovers the column. The forward three-term recurrence computes the same
/// values, but its absolute error grows with the recurrence's *dominant*
/// solution, so components that decay by many orders (the interesting ones
/// at the extreme eigenvalues) keep only a few relative digits; the solve
/// keeps every component near double-double accuracy.
pub(crate) fn orthonormal_column_dd(
    diag: &[Complex64],
    off: &[Complex64],
    z: Complex64,
) -> Result<Vec<DdComplex>> {
    let n = diag.len();
    assert!(n >= 1);
    let lu = factor_shifted_tridiagonal(diag, off, z);
    let mut rhs = vec![DdComplex::ZERO; n];
    rhs[n - 1] = DdComplex::ONE;
    let x = solve_factored(&lu, &rhs);
    let lead = x[0].norm_sqr().hi;
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::QuasiNullVector(format!(
            "orthonormal-polynomial column at z = {z} lost its leading \
             component (the solve's scale over- or underflowed)"
        )));
    }
    let inv = DdComplex::ONE.div(x[0]);
    Ok(x.into_iter().map(|v| v.mul(inv)).collect())
}

/// Eigenvector of the tridiagonal matrix for the (approximate) eigenvalue
/// `z`, by inverse iteration in double-double. Returns the Euclidean-unit
/// vector and the residual ‖Mv − zv‖.
pub(crate) fn tridiagonal_eigenvector_dd(
    diag: &[Complex64],
    off: &[Complex64],
    z: Complex64,
) -> (Vec<DdComplex>, f64) {
    let n = diag.len();
    assert!(n >= 1);
    let lu = factor_shifted_tridiagonal(diag, off, z);
    // Deterministic start with mild index-dependent variation so it is not
    // accidentally orthogonal to the target eigenvector.
    let mut v: Vec<DdComplex> = (0..n)
        .map(|i| {
            let jitter = ((i.wrapping_mul(2654435761) % 997) as f64) * 1e-4;
            DdComplex::from_c64(Complex64::new(1.0 + jitter, 0.0))
        })
        .collect();
    let nrm = euclid_norm_dd(&v);
    for x in v.iter_mut() {
        *x = x.mul_dd(Dd::ONE.div(nrm));
    }

    let mut scale = z.norm();
    for d in diag {
        scale = scale.max(d.norm());
    }
    for o in off {
        scale = scale.max(o.norm());
    }

    let mut best = v.clone();
    let mut best_res = f64::INFINITY;
    for _ in 0..4 {
        let w = solve_factored(&lu, &v);
        let nrm = euclid_norm_dd(&w);
        if nrm.hi == 0.0 || !nrm.hi.is_finite() {
            break;
        }
        let inv = Dd::ONE.div(nrm);
        v = w.into_iter().map(|x| x.mul_dd(inv)).collect();
        // Direct residual of the candidate.
        let mv = tridiagonal_matvec_dd(diag, off, &v);
        let zd = DdComplex::from_c64(z);
        let mut rs = Dd::ZERO;
        for (mi, vi) in mv.iter().zip(v.iter()) {
            rs = rs.add(mi.sub(zd.mul(*vi)).norm_sqr());
        }
        let res = rs.sqrt().to_f64();
        if res < best_res {
            best_res = res;
            best = v.clone();
        }
        if res <= scale * 1e-25 {
            break;
        }
    }
    (best, best_res)
}

// ---------------------------------------------------------------------------
// Dense double-double LU, and a plain determinant
// ---------------------------------------------------------------------------

/// Solve `A x = b` in double-double with partial pivoting. `a` is row-major
/// and consumed. Fails when a pivot collapses below 1e−60 of the matrix
/// scale, which for the moment systems this backs means the nodes are too
/// close to separate the weights.
pub(crate) fn lu_solve_dd(
    mut a: Vec<Vec<DdComplex>>,
    mut b: Vec<DdComplex>,
) -> Result<Vec<DdComplex>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n, "square system expected");
    let mut scale = 0f64;
    for row in &a {
        for v in row {
            scale = scale.max(v.re.hi.abs()).max(v.im.hi.abs());
        }
    }
    if scale == 0.0 {
        return Err(Error::SingularMomentSystem("zero matrix".into()));
    }
    let floor = (scale * 1e-60).powi(2);
    for col in 0..n {
        let mut piv = col;
        let mut piv_mag = a[col][col].norm_sqr().hi;
        for (r, row) in a.iter().enumerate().skip(col + 1) {
            let m = row[col].norm_sqr().hi;
            if m > piv_mag {
                piv = r;
                piv_mag = m;
            }
        }
        if !(piv_mag > floor) {
            return Err(Error::SingularMomentSystem(format!(
                "pivot {piv_mag:.3e} at column {col} is below the singularity floor"
            )));
        }
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
        }
        let (head, tail) = a.split_at_mut(col + 1);
        let prow = &head[col];
        let pinv = DdComplex::ONE.div(prow[col]);
        let bcol = b[col];
        for (r, row) in tail.iter_mut().enumerate() {
            let m = row[col].mul(pinv);
            if m.re.hi == 0.0 && m.im.hi == 0.0 {
                continue;
            }
            for j in col..n {
                let t = m.mul(prow[j]);
                row[j] = row[j].sub(t);
            }
            b[col + 1 + r] = b[col + 1 + r].sub(m.mul(bcol));
        }
    }
    let mut x = vec![DdComplex::ZERO; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc = acc.sub(a[i][j].mul(x[j]));
        }
        x[i] = acc.div(a[i][i]);
    }
    Ok(x)
}

/// Determinant via LU with partial pivoting (plain doubles).
pub(crate) fn lu_det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "square matrix expected");
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        let mut piv_mag = a[col][col].norm_sqr();
        for (r, row) in a.iter().enumerate().skip(col + 1) {
            let m = row[col].norm_sqr();
            if m > piv_mag {
                piv = r;
                piv_mag = m;
            }
        }
        if piv_mag == 0.0 {
            return ZERO;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        let (head, tail) = a.split_at_mut(col + 1);
        let prow = &head[col];
        for row in tail.iter_mut() {
            let m = row[col] / prow[col];
            if m == ZERO {
                continue;
            }
            for j in col..n {
                row[j] -= m * prow[j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn two_by_two_with_imaginary_coupling() {
        // diag (−5, −3), off i√5: eigenvalues −4 ± 2i.
        let (eigs, _) =
            tridiagonal_eigenvalues(&[c(-5.0, 0.0), c(-3.0, 0.0)], &[c(0.0, 5f64.sqrt())], 100)
                .unwrap();
        let eigs = sorted(eigs);
        assert!((eigs[0] - c(-4.0, -2.0)).norm() < 1e-12);
        assert!((eigs[1] - c(-4.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn two_by_two_real_spectrum() {
        // diag (1, 2), off i·0.1·√2: eigenvalues (3 ± √(1 − 0.08))/2.
        let d = 0.1 * 2f64.sqrt();
        let (eigs, _) = tridiagonal_eigenvalues(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(0.0, d)], 100).unwrap();
        let eigs = sorted(eigs);
        assert!((eigs[0] - c(1.020416847668728, 0.0)).norm() < 1e-13);
        assert!((eigs[1] - c(1.979583152331272, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn zero_offdiagonal_is_exact() {
        let diag = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let off = vec![ZERO; 3];
        let (eigs, sweeps) = tridiagonal_eigenvalues(&diag, &off, 100).unwrap();
        let eigs = sorted(eigs);
        assert_eq!(eigs, diag);
        assert_eq!(sweeps, 0);
    }

    #[test]
    fn zero_diagonal_imaginary_offdiagonal() {
        // H = i·S with S real symmetric: spectrum purely imaginary, in ± pairs.
        let n = 9;
        let diag = vec![ZERO; n];
        let off: Vec<Complex64> = (1..n).map(|k| c(0.0, 0.3 * k as f64)).collect();
        let (eigs, _) = tridiagonal_eigenvalues(&diag, &off, 500).unwrap();
        let eigs = sorted(eigs);
        for e in &eigs {
            assert!(e.re.abs() < 1e-10, "real residue {e}");
        }
        for i in 0..n {
            // ± symmetry of the imaginary parts.
            assert!((eigs[i].im + eigs[n - 1 - i].im).abs() < 1e-10);
        }
    }

    #[test]
    fn single_entry() {
        let (eigs, _) = tridiagonal_eigenvalues(&[c(2.5, -0.5)], &[], 10).unwrap();
        assert_eq!(eigs, vec![c(2.5, -0.5)]);
    }

    #[test]
    fn moderate_size_satisfies_characteristic_polynomial() {
        use crate::coefficients::CoefficientFamily;
        use crate::polyrec::eval_char_poly;
        let fam = CoefficientFamily::gribov_real(1.0, 0.35);
        let n = 12;
        let mut diag = Vec::new();
        let mut off = Vec::new();
        for k in 1..=n {
            let p = fam.coeffs(k).unwrap();
            diag.push(p.beta);
            if k < n {
                off.push(p.alpha);
            }
        }
        let (eigs, _) = tridiagonal_eigenvalues(&diag, &off, 1000).unwrap();
        assert_eq!(eigs.len(), n);
        for &e in &eigs {
            // |Q_n(e)| relative to the local derivative scale ⇒ the root error.
            let q = eval_char_poly(&fam, n, e).unwrap();
            let (_, dq) = crate::polyrec::eval_char_poly_with_derivative(&fam, n, e).unwrap();
            let err = (q / dq).abs();
            assert!(err < 1e-8, "eigenvalue {e} off by {err}");
        }
    }

    #[test]
    fn inverse_iteration_reaches_dd_residuals() {
        use crate::coefficients::CoefficientFamily;
        let fam = CoefficientFamily::gribov_real(1.0, 0.35);
        let n = 10;
        let mut diag = Vec::new();
        let mut off = Vec::new();
        for k in 1..=n {
            let p = fam.coeffs(k).unwrap();
            diag.push(p.beta);
            if k < n {
                off.push(p.alpha);
            }
        }
        let (eigs, _) = tridiagonal_eigenvalues(&diag, &off, 1000).unwrap();
        let scale: f64 = diag.iter().map(|d| d.norm()).fold(0.0, f64::max)
            + 2.0 * off.iter().map(|o| o.norm()).fold(0.0, f64::max);
        for &e in &eigs {
            let (v, res) = tridiagonal_eigenvector_dd(&diag, &off, e);
            assert_eq!(v.len(), n);
            let nrm = euclid_norm_dd(&v).to_f64();
            assert!((nrm - 1.0).abs() < 1e-14);
            // The eigenvalue itself carries ~1e-13 error; inverse iteration
            // must drive the residual down to that level, not add to it.
            assert!(res <= 1e-9 * scale, "residual {res} too large at {e}");
        }
    }

    #[test]
    fn orthonormal_column_matches_recurrence_at_generic_points() {
        use crate::coefficients::CoefficientFamily;
        use crate::polyrec::eval_p_sequence;
        let fam = CoefficientFamily::gribov_real(1.0, 0.35);
        let n = 8;
        let mut diag = Vec::new();
        let mut off = Vec::new();
        for k in 1..=n {
            let p = fam.coeffs(k).unwrap();
            diag.push(p.beta);
            if k < n {
                off.push(p.alpha);
            }
        }
        for z in [c(3.7, 0.4), c(-1.0, 0.0), c(9.5, -2.0)] {
            let col = orthonormal_column_dd(&diag, &off, z).unwrap();
            let seq = eval_p_sequence(&fam, n, z, false).unwrap();
            assert!((col[0].to_c64() - c(1.0, 0.0)).norm() < 1e-28);
            for m in 1..=n {
                let a = col[m - 1].to_c64();
                let b = seq.value(m).to_complex();
                assert!(
                    (a - b).norm() <= 1e-10 * (1.0 + b.norm()),
                    "component {m} at {z}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn orthonormal_column_keeps_decaying_components() {
        // At the bottom eigenvalue of the 20×20 truncation the column decays
        // eight orders of magnitude, and the bottom entry is hypersensitive:
        // the node sits ~1e−20 from a zero of P₂₀ with |P₂₀′| ≈ 2e8, so the
        // value is dominated by the node's last bit. Reference values from an
        // 80-digit evaluation of this exact double-precision matrix at this
        // exact double-precision point; the solve must reproduce them to
        // near double-double *absolute* accuracy even on the decayed tail.
        use crate::coefficients::CoefficientFamily;
        let fam = CoefficientFamily::gribov_real(1.0, 0.1);
        let n = 20;
        let mut diag = Vec::new();
        let mut off = Vec::new();
        for k in 1..=n {
            let p = fam.coeffs(k).unwrap();
            diag.push(p.beta);
            if k < n {
                off.push(p.alpha);
            }
        }
        let z = c(1.01926727087196878, 0.0);
        let col = orthonormal_column_dd(&diag, &off, z).unwrap();
        let p10 = col[9].to_c64();
        let p20 = col[19].to_c64();
        let gap10 = (p10 - c(0.0, -1.009589639553785869646237e-6)).norm();
        let gap20 = (p20 - c(0.0, -2.18635800519812576393587e-8)).norm();
        assert!(gap10 < 1e-15, "P10 = {p10}, gap {gap10:.3e}");
        assert!(gap20 < 1e-11, "P20 = {p20}, gap {gap20:.3e}");
    }

    #[test]
    fn dd_lu_solves_a_known_system() {
        // A = [[2, 1], [1, 3]] (complex-typed), b = [5, 10] ⇒ x = [1, 3].
        let a = vec![
            vec![DdComplex::from_c64(c(2.0, 0.0)), DdComplex::from_c64(c(1.0, 0.0))],
            vec![DdComplex::from_c64(c(1.0, 0.0)), DdComplex::from_c64(c(3.0, 0.0))],
        ];
        let b = vec![DdComplex::from_c64(c(5.0, 0.0)), DdComplex::from_c64(c(10.0, 0.0))];
        let x = lu_solve_dd(a, b).unwrap();
        assert!((x[0].to_c64() - c(1.0, 0.0)).norm() < 1e-30);
        assert!((x[1].to_c64() - c(3.0, 0.0)).norm() < 1e-30);
    }

    #[test]
    fn dd_lu_rejects_singular_systems() {
        let a = vec![
            vec![DdComplex::from_c64(c(1.0, 0.0)), DdComplex::from_c64(c(2.0, 0.0))],
            vec![DdComplex::from_c64(c(2.0, 0.0)), DdComplex::from_c64(c(4.0, 0.0))],
        ];
        let b = vec![DdComplex::ONE, DdComplex::ONE];
        assert!(matches!(lu_solve_dd(a, b), Err(Error::SingularMomentSystem(_))));
    }

    #[test]
    fn determinant_of_known_matrices() {
        let det = lu_det(vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(4.0, 0.0)],
        ]);
        assert!((det - c(-2.0, 0.0)).norm() < 1e-14);
        // Complex 3×3 with known determinant: diag(i, 2, 3+i) ⇒ det = i·2·(3+i) = −2 + 6i.
        let det = lu_det(vec![
            vec![c(0.0, 1.0), ZERO, ZERO],
            vec![ZERO, c(2.0, 0.0), ZERO],
            vec![ZERO, ZERO, c(3.0, 1.0)],
        ]);
        assert!((det - c(-2.0, 6.0)).norm() < 1e-14);
        // Singular.
        let det = lu_det(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ]);
        assert_eq!(det, ZERO);
    }
}
