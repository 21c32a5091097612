//! Randomized structural properties of the public API: serialization
//! round-trips, scaled-arithmetic consistency, matcher invariance, and
//! spectral localization on sampled parameters.

use gribov_lab::coefficients::{CoefficientFamily, GribovParams};
use gribov_lab::operator::TridiagonalMatrix;
use gribov_lab::polyrec::{char_poly_coefficients, ScaledPolyValue};
use gribov_lab::spectra::{
    eigen_dense, localization_box, match_distance, verify_localization, zeros_aberth,
    SolverOptions,
};
use gribov_lab::textfmt;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    /// Every finite double serializes to the fixed 17-significant-digit form
    /// and re-parses to the identical bit pattern.
    #[test]
    fn json_floats_reparse_to_the_same_bits(x in any::<f64>()) {
        let s = textfmt::fmt_f64(x);
        prop_assert!(s.contains('e'), "expected exponent form, got {s}");
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits(), "{} reparsed as {}", s, back);
    }

    /// A family's display string is a valid spec string that parses back to
    /// numerically equal parameters, for arbitrary complex (μ, λ).
    #[test]
    fn family_spec_display_reparses(
        mu_re in any::<f64>(), mu_im in any::<f64>(),
        la_re in any::<f64>(), la_im in any::<f64>(),
    ) {
        let fam = CoefficientFamily::gribov(c(mu_re, mu_im), c(la_re, la_im));
        let spec = fam.to_string();
        let back: CoefficientFamily = spec.parse().unwrap();
        let p = back.gribov_params().expect("round trip must stay in the same family");
        prop_assert_eq!(p.mu, c(mu_re, mu_im), "spec was {}", &spec);
        prop_assert_eq!(p.lambda, c(la_re, la_im), "spec was {}", &spec);
    }

    /// `new(m, e)` means exactly `m · 2^e`: normalization only moves powers
    /// of two around, so the round trip through `to_complex` is exact inside
    /// the representable range.
    #[test]
    fn scaled_value_is_mantissa_times_power_of_two(
        re in -1e3f64..1e3, im in -1e3f64..1e3, e in -40i64..40,
    ) {
        let v = ScaledPolyValue::new(c(re, im), e);
        let expect = c(re, im) * 2f64.powi(e as i32);
        prop_assert_eq!(v.to_complex(), expect);
    }

    /// Scaled arithmetic agrees with plain complex arithmetic away from the
    /// overflow regime it exists to escape.
    #[test]
    fn scaled_arithmetic_matches_complex(
        a_re in -1e3f64..1e3, a_im in -1e3f64..1e3,
        b_re in -1e3f64..1e3, b_im in -1e3f64..1e3,
        ea in -30i64..30, eb in -30i64..30,
    ) {
        let a = c(a_re, a_im) * 2f64.powi(ea as i32);
        let b = c(b_re, b_im) * 2f64.powi(eb as i32);
        let x = ScaledPolyValue::new(c(a_re, a_im), ea);
        let y = ScaledPolyValue::new(c(b_re, b_im), eb);
        let close = |got: ScaledPolyValue, want: Complex64| {
            let g = got.to_complex();
            (g - want).norm() <= 1e-12 * (1.0 + want.norm())
        };
        prop_assert!(close(x * y, a * b));
        prop_assert!(close(x + y, a + b));
        prop_assert!(close(x - y, a - b));
        prop_assert!(close(-x, -a));
        if b.norm() > 1e-6 {
            prop_assert!(close(x / y, a / b));
        }
    }

    /// The set matcher pairs a point set with any permutation of itself at
    /// distance exactly zero.
    #[test]
    fn match_distance_vanishes_on_permutations(
        (orig, shuffled) in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..9)
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
    ) {
        let xs: Vec<Complex64> = orig.iter().map(|&(r, i)| c(r, i)).collect();
        let ys: Vec<Complex64> = shuffled.iter().map(|&(r, i)| c(r, i)).collect();
        prop_assert_eq!(match_distance(&xs, &ys), 0.0);
    }

    /// The characteristic polynomial is the determinant of the shifted
    /// truncation: degree n, leading coefficient (−1)ⁿ exactly, and the
    /// next coefficient carries the trace.
    #[test]
    fn char_poly_degree_and_trace(
        mu_re in 0.2f64..3.0, mu_im in -1.0f64..1.0,
        la_re in 0.0f64..1.5, la_im in -0.5f64..0.5,
        n in 1usize..10,
    ) {
        let mu = c(mu_re, mu_im);
        let fam = CoefficientFamily::gribov(mu, c(la_re, la_im));
        let coeffs = char_poly_coefficients(&fam, n).unwrap();
        prop_assert_eq!(coeffs.len(), n + 1);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(coeffs[n], c(sign, 0.0));
        let trace = mu * ((n * (n + 1) / 2) as f64);
        let want = -sign * trace;
        prop_assert!(
            (coeffs[n - 1] - want).norm() <= 1e-10 * (1.0 + want.norm()),
            "coefficient of z^{} is {}, expected {}", n - 1, coeffs[n - 1], want
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Both spectral routes put every eigenvalue inside the localization box
    /// across sampled complex parameters. Solvers are allowed to refuse
    /// genuinely degenerate inputs; the claim covers what they produce.
    #[test]
    fn spectra_stay_inside_localization(
        mu_re in 0.3f64..3.0, mu_im in -1.0f64..1.0,
        la_re in 0.0f64..1.2, la_im in -0.5f64..0.5,
        n in 1usize..12,
    ) {
        let params = GribovParams::new(c(mu_re, mu_im), c(la_re, la_im));
        let fam = CoefficientFamily::gribov(params.mu, params.lambda);
        let bbox = localization_box(&params, n);
        let opts = SolverOptions::default();
        let mut spectra = Vec::new();
        if let Ok(m) = TridiagonalMatrix::from_family(&fam, n) {
            if let Ok(s) = eigen_dense(&m, &opts) {
                spectra.push(("dense", s));
            }
        }
        if let Ok(s) = zeros_aberth(&fam, n, &opts) {
            spectra.push(("aberth", s));
        }
        for (route, s) in &spectra {
            let report = verify_localization(s, &bbox, 1e-9);
            prop_assert!(
                report.pass,
                "{route} route left the box at mu={}, lambda={}, n={n}: {:?}",
                params.mu, params.lambda, report.violations
            );
        }
    }
}
