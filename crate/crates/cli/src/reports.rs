//! One function per reporting command: run the pipeline, serialize the
//! report deterministically (fixed field order, 17-significant-digit
//! floats), and say whether any embedded check failed.

use gribov_lab::analysis::{self, GridSpec};
use gribov_lab::coefficients::CoefficientFamily;
use gribov_lab::operator::{gram_determinant, TridiagonalMatrix};
use gribov_lab::quadrature::{
    discrete_measure, orthogonality_defect, Construction, MeasureOptions,
};
use gribov_lab::spectra::{
    eigen_dense, localization_box, verify_localization, zeros_aberth, SolverOptions, Spectrum,
};
use gribov_lab::textfmt;
use gribov_lab::Error;
use num_complex::Complex64;

use crate::{ConstructionArg, Format, MethodArg};

/// Failures on the way to a report: bad request shape (usage, exit 2) or a
/// library error (mapped to exit 2/3 by the caller).
pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

/// A finished report and whether every check embedded in it passed
/// (`ok == false` turns into exit code 1).
pub struct Outcome {
    pub body: String,
    pub ok: bool,
}

impl Outcome {
    fn passing(body: String) -> Self {
        Outcome { body, ok: true }
    }
}

fn parse_family(spec: &str) -> Result<CoefficientFamily, CliError> {
    Ok(spec.parse::<CoefficientFamily>()?)
}

/// Real (μ, λ) of a Gribov family, for the commands restricted to them.
fn real_gribov(family: &CoefficientFamily, what: &str) -> Result<(f64, f64), CliError> {
    match family.gribov_params() {
        Some(p) if p.is_real() => Ok((p.mu.re, p.lambda.re)),
        _ => Err(CliError::Usage(format!(
            "{what} needs a gribov family with real parameters, got {family}"
        ))),
    }
}

fn solver_options(tol: Option<f64>) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(t) = tol {
        opts.tol = t;
    }
    opts
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    match x {
        Some(v) => textfmt::fmt_f64(v),
        None => "null".into(),
    }
}

/// Run `count` independent jobs with at most `threads` workers (statically
/// striped) and return the results in job order, so the assembled report
/// never depends on the worker count.
pub fn run_jobs<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = threads.max(1).min(count.max(1));
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for t in 0..workers {
            let f = &f;
            handles.push(scope.spawn(move || {
                let mut mine = Vec::new();
                let mut i = t;
                while i < count {
                    mine.push((i, f(i)));
                    i += workers;
                }
                mine
            }));
        }
        for h in handles {
            for (i, v) in h.join().expect("spectrum worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every job slot is filled")).collect()
}

pub fn spectrum(
    family_spec: &str,
    sizes: &[usize],
    sweep: bool,
    method: MethodArg,
    tol: Option<f64>,
    format: Format,
    threads: usize,
) -> Result<Outcome, CliError> {
    let family = parse_family(family_spec)?;
    let opts = solver_options(tol);
    let runs: Vec<Result<Spectrum, Error>> = run_jobs(sizes.len(), threads, |i| {
        let n = sizes[i];
        match method {
            MethodArg::Dense => {
                TridiagonalMatrix::from_family(&family, n).and_then(|m| eigen_dense(&m, &opts))
            }
            MethodArg::Aberth => zeros_aberth(&family, n, &opts),
        }
    });
    let mut spectra = Vec::with_capacity(runs.len());
    for r in runs {
        spectra.push(r?);
    }
    let body = match format {
        Format::Json if !sweep => spectra[0].to_json(),
        Format::Json => {
            let docs: Vec<String> = spectra.iter().map(|s| s.to_json()).collect();
            format!("{{\"runs\":[{}]}}", docs.join(","))
        }
        Format::Csv => {
            let mut out = String::from("n,index,re,im,residual\n");
            for s in &spectra {
                for (i, (z, r)) in s.values.iter().zip(s.residuals.iter()).enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        s.n,
                        i + 1,
                        textfmt::fmt_f64(z.re),
                        textfmt::fmt_f64(z.im),
                        textfmt::fmt_f64(*r)
                    ));
                }
            }
            out
        }
    };
    Ok(Outcome::passing(body))
}

pub fn bounds(
    family_spec: &str,
    n: usize,
    slack: f64,
    format: Format,
) -> Result<Outcome, CliError> {
    let family = parse_family(family_spec)?;
    let params = *family.gribov_params().ok_or_else(|| {
        CliError::Usage(format!("the localization box is defined for gribov families, got {family}"))
    })?;
    let matrix = TridiagonalMatrix::from_family(&family, n)?;
    let spectrum = eigen_dense(&matrix, &SolverOptions::default())?;
    let bbox = localization_box(&params, n);
    let report = verify_localization(&spectrum, &bbox, slack);
    let inside = |z: &Complex64| {
        z.re.abs() <= bbox.re_max + slack && z.im.abs() <= bbox.im_max + slack
    };
    let body = match format {
        Format::Json => {
            let violations: Vec<String> = report
                .violations
                .iter()
                .map(|(z, _, _)| textfmt::fmt_complex(*z))
                .collect();
            format!(
                "{{\"family\":{},\"n\":{},\"mu\":{},\"lambda\":{},\"bound\":{},\"slack\":{},\
                 \"values\":{},\"residuals\":{},\"all_inside\":{},\"violations\":[{}]}}",
                textfmt::fmt_str(&family.to_string()),
                n,
                textfmt::fmt_complex(params.mu),
                textfmt::fmt_complex(params.lambda),
                bbox.to_json(),
                textfmt::fmt_f64(slack),
                textfmt::fmt_complex_slice(&spectrum.values),
                textfmt::fmt_f64_slice(&spectrum.residuals),
                fmt_bool(report.pass),
                violations.join(",")
            )
        }
        Format::Csv => {
            let mut out = String::from("index,re,im,inside,re_max,im_max\n");
            for (i, z) in spectrum.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    i + 1,
                    textfmt::fmt_f64(z.re),
                    textfmt::fmt_f64(z.im),
                    fmt_bool(inside(z)),
                    textfmt::fmt_f64(bbox.re_max),
                    textfmt::fmt_f64(bbox.im_max)
                ));
            }
            out
        }
    };
    Ok(Outcome { body, ok: report.pass })
}

pub fn properties(
    family_spec: &str,
    n_max: usize,
    grid_lo: f64,
    grid_hi: f64,
    grid_points: usize,
    k_max: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    let family = parse_family(family_spec)?;
    let (mu, lambda) = real_gribov(&family, "sign-property analysis")?;
    if !(grid_lo < grid_hi) {
        return Err(CliError::Usage(format!(
            "grid bounds must be ordered, got {grid_lo}..{grid_hi}"
        )));
    }
    let grid = GridSpec::new(grid_lo, grid_hi, grid_points);
    let signs = analysis::check_sign_properties(mu, lambda, n_max, &grid)?;
    let x2 = analysis::quadratic_smallest_zero(mu, lambda);
    let (ladder, ladder_note) = match analysis::smallest_zero_sequence(mu, lambda, k_max) {
        Ok(l) => (Some(l), None),
        Err(Error::HypothesisViolated(m)) | Err(Error::InvalidParameter(m)) => (None, Some(m)),
        Err(e) => return Err(e.into()),
    };

    let signs_pass = signs.iter().all(|r| r.pass);
    // Ladder checks: nondecreasing within rounding, every zero found and
    // strictly below the quadratic's smallest zero.
    let (ladder_nondecreasing, ladder_below_x2) = match &ladder {
        None => (None, None),
        Some(l) => {
            let zeros: Vec<Option<f64>> = l.iter().map(|e| e.zero).collect();
            let all_found = zeros.iter().all(|z| z.is_some());
            let mut nondec = all_found;
            for w in zeros.windows(2) {
                if let (Some(a), Some(b)) = (w[0], w[1]) {
                    if b < a - 1e-10 {
                        nondec = false;
                    }
                }
            }
            let below = match x2 {
                Some(x2) => all_found && zeros.iter().flatten().all(|&z| z < x2),
                None => false,
            };
            (Some(nondec), Some(below))
        }
    };
    let pass = signs_pass
        && ladder_nondecreasing.unwrap_or(true)
        && ladder_below_x2.unwrap_or(true);

    let body = match format {
        Format::Json => {
            let sign_docs: Vec<String> = signs
                .iter()
                .map(|r| {
                    let ce = match &r.counterexample {
                        None => "null".to_string(),
                        Some(c) => format!(
                            "{{\"x\":{},\"n\":{},\"values\":{}}}",
                            textfmt::fmt_f64(c.x),
                            c.n,
                            textfmt::fmt_f64_slice(&c.values)
                        ),
                    };
                    format!(
                        "{{\"id\":{},\"grid\":{},\"pass\":{},\"counterexample\":{}}}",
                        textfmt::fmt_str(r.property.id()),
                        textfmt::fmt_str(&r.grid),
                        fmt_bool(r.pass),
                        ce
                    )
                })
                .collect();
            let ladder_doc = match &ladder {
                None => "null".to_string(),
                Some(l) => {
                    let rows: Vec<String> = l
                        .iter()
                        .map(|e| {
                            format!(
                                "{{\"degree\":{},\"zero\":{}}}",
                                e.degree,
                                fmt_opt_f64(e.zero)
                            )
                        })
                        .collect();
                    format!("[{}]", rows.join(","))
                }
            };
            format!(
                "{{\"family\":{},\"mu\":{},\"lambda\":{},\"n_max\":{},\
                 \"grid\":{{\"lo\":{},\"hi\":{},\"points\":{}}},\
                 \"sign_properties\":[{}],\"x2\":{},\"ladder\":{},\"ladder_note\":{},\
                 \"ladder_nondecreasing\":{},\"ladder_below_x2\":{},\"pass\":{}}}",
                textfmt::fmt_str(&family.to_string()),
                textfmt::fmt_f64(mu),
                textfmt::fmt_f64(lambda),
                n_max,
                textfmt::fmt_f64(grid.lo),
                textfmt::fmt_f64(grid.hi),
                grid.points,
                sign_docs.join(","),
                fmt_opt_f64(x2),
                ladder_doc,
                match &ladder_note {
                    Some(m) => textfmt::fmt_str(m),
                    None => "null".to_string(),
                },
                ladder_nondecreasing.map_or("null".to_string(), |b| fmt_bool(b).to_string()),
                ladder_below_x2.map_or("null".to_string(), |b| fmt_bool(b).to_string()),
                fmt_bool(pass)
            )
        }
        Format::Csv => {
            let mut out = String::from("name,pass,value\n");
            for r in &signs {
                out.push_str(&format!("{},{},\n", r.property.id(), fmt_bool(r.pass)));
            }
            out.push_str(&format!("x2,,{}\n", fmt_opt_f64(x2)));
            if let Some(l) = &ladder {
                for e in l {
                    out.push_str(&format!("x{},,{}\n", e.degree, fmt_opt_f64(e.zero)));
                }
            }
            if let Some(b) = ladder_nondecreasing {
                out.push_str(&format!("ladder_nondecreasing,{},\n", fmt_bool(b)));
            }
            if let Some(b) = ladder_below_x2 {
                out.push_str(&format!("ladder_below_x2,{},\n", fmt_bool(b)));
            }
            out.push_str(&format!("pass,{},\n", fmt_bool(pass)));
            out
        }
    };
    Ok(Outcome { body, ok: pass })
}

pub fn quadrature(
    family_spec: &str,
    n: usize,
    construction: ConstructionArg,
    m: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let family = parse_family(family_spec)?;
    let m = m.unwrap_or(n);
    if m > n {
        return Err(CliError::Usage(format!(
            "defect degree M = {m} exceeds the node count N = {n}"
        )));
    }
    let construction = match construction {
        ConstructionArg::EigenvectorSquares => Construction::EigenvectorSquares,
        ConstructionArg::MomentSolve => Construction::MomentSolve,
    };
    let mut measure = discrete_measure(&family, n, construction, &MeasureOptions::default())?;
    let defect = orthogonality_defect(&measure, &family, m)?;
    measure.defect_at_m = Some((m, defect));
    let body = match format {
        Format::Json => format!(
            "{{\"family\":{},\"defect_order\":{},\"measure\":{}}}",
            textfmt::fmt_str(&family.to_string()),
            m,
            measure.to_json()
        ),
        Format::Csv => {
            let mut out = String::from("index,node_re,node_im,weight_re,weight_im\n");
            for (i, (z, w)) in measure.nodes.iter().zip(measure.weights.iter()).enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    i + 1,
                    textfmt::fmt_f64(z.re),
                    textfmt::fmt_f64(z.im),
                    textfmt::fmt_f64(w.re),
                    textfmt::fmt_f64(w.im)
                ));
            }
            out
        }
    };
    Ok(Outcome::passing(body))
}

pub fn trajectory(
    family_spec: &str,
    k: usize,
    n_range: (usize, usize),
    tol: Option<f64>,
    format: Format,
) -> Result<Outcome, CliError> {
    let family = parse_family(family_spec)?;
    let (mu, lambda) = real_gribov(&family, "trajectory tracking")?;
    let opts = solver_options(tol);
    let t = analysis::trajectory(mu, lambda, k, n_range.0, n_range.1, &opts)?;
    let body = match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let rows: Vec<String> = t
                .entries
                .iter()
                .map(|e| {
                    format!(
                        "{{\"n\":{},\"value\":{},\"abs_err_to_kmu\":{},\"match_distance\":{}}}",
                        e.n,
                        textfmt::fmt_complex(e.value),
                        textfmt::fmt_f64(e.err_to_target),
                        textfmt::fmt_f64(e.match_distance)
                    )
                })
                .collect();
            format!(
                "{{\"family\":{},\"k\":{},\"mu\":{},\"lambda\":{},\"n_lo\":{},\"n_hi\":{},\
                 \"entries\":[{}]}}",
                textfmt::fmt_str(&family.to_string()),
                t.k,
                textfmt::fmt_f64(mu),
                textfmt::fmt_f64(lambda),
                n_range.0,
                n_range.1,
                rows.join(",")
            )
        }
    };
    Ok(Outcome::passing(body))
}

pub fn gram(
    family_spec: &str,
    n: usize,
    order: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let family = parse_family(family_spec)?;
    let top = order.unwrap_or_else(|| 8.min(n - 1));
    let matrix = TridiagonalMatrix::from_family(&family, n)?;
    let mut dets = Vec::with_capacity(top);
    for order in 1..=top {
        dets.push(gram_determinant(&matrix, order)?);
    }
    let max_abs = dets.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let body = match format {
        Format::Json => {
            let orders: Vec<String> = (1..=top).map(|o| o.to_string()).collect();
            format!(
                "{{\"family\":{},\"n\":{},\"orders\":[{}],\"determinants\":{},\"max_abs\":{}}}",
                textfmt::fmt_str(&family.to_string()),
                n,
                orders.join(","),
                textfmt::fmt_complex_slice(&dets),
                textfmt::fmt_f64(max_abs)
            )
        }
        Format::Csv => {
            let mut out = String::from("order,det_re,det_im,abs\n");
            for (o, d) in (1..=top).zip(dets.iter()) {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    o,
                    textfmt::fmt_f64(d.re),
                    textfmt::fmt_f64(d.im),
                    textfmt::fmt_f64(d.norm())
                ));
            }
            out
        }
    };
    Ok(Outcome::passing(body))
}
