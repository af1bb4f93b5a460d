//! One function per subcommand. Each returns the report and its CSV table;
//! any `Err` is an input error.

use std::path::Path;

use fuglede_core::boundary_spectrum::{
    boundary_matrix_from_spectrum, compute_spectrum, default_scan_step, min_gap_of, spectrality_check,
    UNITARITY_TOL,
};
use fuglede_core::interval_domain::{gram as gram_matrix, IntervalUnion, SampledFunction, Signal};
use fuglede_core::io::{
    bmatrix_from_json, bmatrix_to_value, domain_from_json, domain_to_value, evolution_to_csv, frequencies_from_text,
    gram_to_csv, rows_to_csv, spectrum_to_csv,
};
use fuglede_core::local_translation::{check_local_translation, BoundaryEvolver, Evolver, SpectralEvolver};
use fuglede_core::nikodym::{report_row, NikodymParams, Piece};
use fuglede_core::rational::{parse_rational, rational_from_f64, to_f64};
use fuglede_core::spectral_verify::{orthogonality_defect, parseval_defect, tiling_check, TranslationSet};
use fuglede_core::spectrum_spec::SpectrumSpec;
use fuglede_core::square2d::{discrete_gram, eigen_check, lattice_points, off_diagonal_max, EigenRow, SquareSample};
use fuglede_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{Output, RunReport};
use crate::{BmatrixArgs, EvolveArgs, GramArgs, Method, NikodymArgs, SpectrumArgs, Square2dArgs, TileArgs, VerifyArgs};

const PARSEVAL_BOUNDS: [f64; 4] = [10.0, 25.0, 50.0, 100.0];

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_domain(path: &Path) -> Result<IntervalUnion> {
    domain_from_json(&read(path)?)
}

fn number(text: &str) -> Result<f64> {
    parse_rational(text)
        .map(|r| to_f64(&r))
        .or_else(|| text.trim().parse().ok())
        .ok_or_else(|| Error::Input(format!("not a number: {text:?}")))
}

/// A spectrum given either as a spec or as a file of frequencies.
enum SpectrumSource {
    Spec(SpectrumSpec),
    File { path: String, frequencies: Vec<f64> },
}

impl SpectrumSource {
    fn load(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            let frequencies = frequencies_from_text(&read(path)?)?;
            return Ok(Self::File { path: arg.to_string(), frequencies });
        }
        Ok(Self::Spec(SpectrumSpec::parse(arg)?))
    }

    /// Frequencies with `|λ| ≤ k`. A spec's own bound wins unless `force`.
    fn truncated(&self, k: f64, force: bool) -> Result<Vec<f64>> {
        match self {
            Self::Spec(spec) => {
                let spec = if force || spec.bound.is_none() {
                    let k = rational_from_f64(k).ok_or_else(|| Error::Input(format!("bad bound {k}")))?;
                    spec.clone().with_bound(k)
                } else {
                    spec.clone()
                };
                spec.expand()
            }
            Self::File { frequencies, .. } => {
                let out: Vec<f64> = frequencies.iter().copied().filter(|l| l.abs() <= k).collect();
                if out.is_empty() {
                    return Err(Error::EmptyExpansion);
                }
                Ok(out)
            }
        }
    }

    fn echo(&self, frequencies: &[f64]) -> Value {
        match self {
            Self::Spec(spec) => json!({ "spec": spec.to_string(), "frequencies": frequencies }),
            Self::File { path, .. } => json!({ "file": path, "frequencies": frequencies }),
        }
    }
}

fn parse_signal(text: &str) -> Result<Signal> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["indicator", a, b] => Ok(Signal::Indicator { a: number(a)?, b: number(b)? }),
        ["exp", l] => Ok(Signal::Exponentials(vec![(number(l)?, fuglede_core::Complex64::new(1.0, 0.0))])),
        _ => Err(Error::Input(format!("test function must be indicator:a:b or exp:λ, got {text:?}"))),
    }
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Output> {
    let domain = load_domain(&args.domain)?;
    let b = bmatrix_from_json(&read(&args.bmatrix)?, UNITARITY_TOL)?;
    let window = match args.window.as_deref() {
        Some([lo, hi]) => (*lo, *hi),
        Some(_) => return Err(Error::Input("--window takes LO HI".into())),
        None => (-10.0, 10.0),
    };
    let step = args.scan_step.unwrap_or_else(|| default_scan_step(&domain));
    let set = compute_spectrum(&b, &domain, window, step, args.tol)?;

    let mut report = RunReport::new(
        "spectrum",
        json!({
            "domain": domain_to_value(&domain),
            "bmatrix": bmatrix_to_value(&b),
            "window": [window.0, window.1],
            "scan_step": step,
            "tol": args.tol,
        }),
    );
    let worst = set.points.iter().map(|p| p.residual).fold(0.0, f64::max);
    report.residual("max_smin", worst);
    let mut results = json!({ "spectrum": set, "count": set.len() });
    if let Ok(gap) = min_gap_of(&set.frequencies()) {
        results["min_gap"] = json!(gap);
    }
    if args.check_spectral {
        let check = spectrality_check(&b, &domain, window, args.tol)?;
        results["spectral_in_window"] = json!(check.spectral_in_window);
        results["violations"] = json!(check.violations);
        report.pass = check.spectral_in_window;
    }
    report.results = results;
    Ok(Output { csv: spectrum_to_csv(&set), report })
}

pub fn bmatrix(args: &BmatrixArgs) -> Result<Output> {
    let domain = load_domain(&args.domain)?;
    let source = SpectrumSource::load(&args.spectrum)?;
    let freqs = source.truncated(args.truncate, false)?;
    let b = boundary_matrix_from_spectrum(&domain, &freqs)?;
    let mut report = RunReport::new(
        "bmatrix",
        json!({ "domain": domain_to_value(&domain), "spectrum": source.echo(&freqs), "truncate": args.truncate }),
    );
    report.residual("unitarity", b.unitarity_residual());
    let eigenvalues: Vec<[f64; 2]> = b.eigenvalues().iter().map(|z| [z.re, z.im]).collect();
    report.results = json!({ "bmatrix": bmatrix_to_value(&b), "eigenvalues": eigenvalues });

    let m = b.matrix();
    let mut csv = String::from("row,col,re,im\n");
    for i in 0..b.n() {
        for j in 0..b.n() {
            csv.push_str(&format!("{i},{j},{},{}\n", m[(i, j)].re, m[(i, j)].im));
        }
    }
    Ok(Output { csv, report })
}

#[derive(Serialize)]
struct ParsevalRow {
    k: f64,
    count: usize,
    defect: f64,
}

pub fn verify(args: &VerifyArgs) -> Result<Output> {
    let domain = load_domain(&args.domain)?;
    let source = SpectrumSource::load(&args.spectrum)?;
    let freqs = source.truncated(args.truncate, false)?;
    let (a, b) = match &args.f {
        Some(text) => match parse_signal(text)? {
            Signal::Indicator { a, b } => (a, b),
            _ => return Err(Error::Input("the Parseval check needs an indicator test function".into())),
        },
        None => {
            let (lo, hi) = domain.intervals()[0];
            (lo, 0.5 * (lo + hi))
        }
    };

    let mut report = RunReport::new(
        "verify",
        json!({
            "domain": domain_to_value(&domain),
            "spectrum": source.echo(&freqs),
            "tiling": args.tiling,
            "test_function": { "indicator": [a, b] },
        }),
    );
    let orth = orthogonality_defect(&domain, &freqs)?;
    report.require("orthogonality_defect", orth, args.tol);

    let mut rows = Vec::new();
    if orth < args.tol {
        let norm_sq = b - a;
        let mut previous = f64::INFINITY;
        let mut monotone = true;
        for k in PARSEVAL_BOUNDS {
            let list = source.truncated(k, true)?;
            let defect = parseval_defect(&domain, &list, a, b)?;
            monotone &= defect <= previous + 1e-12;
            previous = defect;
            rows.push(ParsevalRow { k, count: list.len(), defect });
        }
        let relative = previous / norm_sq;
        report.residual("parseval_defect_relative", relative);
        if relative.is_nan() || relative > args.parseval_tol || !monotone {
            report.pass = false;
        }
    }

    let mut results = json!({
        "orthogonality_defect": orth,
        "parseval_defect_by_K": rows.iter().map(|r| json!({ "K": r.k, "count": r.count, "defect": r.defect })).collect::<Vec<_>>(),
    });
    if let Some(text) = &args.tiling {
        let set = TranslationSet::parse(text)?;
        let tiling = tiling_check(&domain, &set)?;
        if !tiling.tiles {
            report.pass = false;
        }
        results["tiling"] = json!({ "tiles": tiling.tiles, "defect": tiling.defect_measure.to_string(), "report": tiling });
    }
    report.results = results;
    Ok(Output { csv: rows_to_csv(&rows)?, report })
}

pub fn evolve(args: &EvolveArgs) -> Result<Output> {
    let domain = load_domain(&args.domain)?;
    let signal = parse_signal(&args.f)?;
    let f = SampledFunction::from_signal(&domain, args.samples, signal);
    let source = args.spectrum.as_deref().map(SpectrumSource::load).transpose()?;
    let freqs = source.as_ref().map(|s| s.truncated(args.truncate, false)).transpose()?;

    let need_spectral = args.method != Method::Boundary;
    let need_boundary = args.method != Method::Spectral;
    if need_spectral && freqs.is_none() {
        return Err(Error::Input("spectral evolution needs --spectrum".into()));
    }
    let bmatrix = match (&args.bmatrix, &freqs) {
        (Some(path), _) => Some(bmatrix_from_json(&read(path)?, UNITARITY_TOL)?),
        (None, Some(list)) if need_boundary => Some(boundary_matrix_from_spectrum(&domain, list)?),
        (None, _) if need_boundary => return Err(Error::Input("boundary evolution needs --bmatrix or --spectrum".into())),
        _ => None,
    };

    let mut inputs = json!({
        "domain": domain_to_value(&domain),
        "f": args.f,
        "t": args.t,
        "method": format!("{:?}", args.method).to_lowercase(),
        "samples": args.samples,
    });
    if let (Some(s), Some(list)) = (&source, &freqs) {
        inputs["spectrum"] = s.echo(list);
    }
    if let Some(b) = &bmatrix {
        inputs["bmatrix"] = bmatrix_to_value(b);
    }
    let mut report = RunReport::new("evolve", inputs);

    let boundary = bmatrix.as_ref().map(|b| BoundaryEvolver::new(&domain, b)).transpose()?;
    let t = match &boundary {
        Some(ev) => ev.snap(args.t, args.samples),
        None => args.t,
    };
    let snap_error = (t - args.t).abs();
    report.residual("snap_error", snap_error);
    let mut results = json!({ "snapped_t": t });
    let mut csv_source = None;

    let spectral = freqs.as_ref().filter(|_| need_spectral).map(|list| SpectralEvolver::new(&domain, list)).transpose()?;
    let mut spectral_out = None;
    if let Some(ev) = &spectral {
        let projected = ev.project(&f)?;
        let moved = ev.evolve(&f, t)?;
        report.require("spectral_local_translation", check_local_translation(&moved, &projected, t), args.tol);
        report.residual("projection_distance", projected.distance(&f) / f.norm().max(f64::MIN_POSITIVE));
        results["spectral_norm"] = json!(moved.norm());
        spectral_out = Some((moved, projected));
    }
    if let Some(ev) = &boundary {
        let moved = ev.evolve(&f, t)?;
        report.require("boundary_local_translation", check_local_translation(&moved, &f, t), args.tol);
        results["boundary_norm"] = json!(moved.norm());
        if let Some((spec_moved, projected)) = &spectral_out {
            let agreement = ev.evolve(projected, t)?.max_abs_diff(spec_moved);
            report.require("spectral_vs_boundary", agreement, args.tol);
        }
        csv_source = Some(moved);
    }
    if csv_source.is_none() {
        csv_source = spectral_out.map(|(m, _)| m);
    }
    report.results = results;
    let csv = evolution_to_csv(csv_source.as_ref().expect("one method ran"), t, snap_error);
    Ok(Output { csv, report })
}

pub fn gram(args: &GramArgs) -> Result<Output> {
    let domain = load_domain(&args.domain)?;
    let source = SpectrumSource::load(&args.spectrum)?;
    let freqs = source.truncated(args.truncate, false)?;
    let g = gram_matrix(&domain, &freqs)?;
    let mut report = RunReport::new("gram", json!({ "domain": domain_to_value(&domain), "spectrum": source.echo(&freqs) }));
    let defect = orthogonality_defect(&domain, &freqs)?;
    report.require("orthogonality_defect", defect, args.tol);
    report.results = json!({ "size": freqs.len(), "measure": domain.measure(), "orthogonality_defect": defect });
    Ok(Output { csv: gram_to_csv(&g), report })
}

pub fn tile(args: &TileArgs) -> Result<Output> {
    let domain = load_domain(&args.domain)?;
    let set = TranslationSet::parse(&args.tiling)?;
    let tiling = tiling_check(&domain, &set)?;
    let mut report = RunReport::new("tile", json!({ "domain": domain_to_value(&domain), "tiling": set.to_string() }));
    report.pass = tiling.tiles;
    report.results = json!({ "tiles": tiling.tiles, "defect": tiling.defect_measure.to_string(), "report": tiling });
    let csv = format!(
        "tiles,defect_measure,over_coverage,under_coverage\n{},{},{},{}\n",
        tiling.tiles, tiling.defect_measure, tiling.over_coverage, tiling.under_coverage
    );
    Ok(Output { csv, report })
}

#[derive(Serialize)]
struct GeometryRow {
    kind: &'static str,
    index: usize,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

pub fn nikodym(args: &NikodymArgs) -> Result<Output> {
    let params = NikodymParams::new(args.n_max)?;
    if args.p_max == 0 {
        return Err(Error::Input("--p-max must be positive".into()));
    }
    let rows = (1..=args.p_max).map(|p| report_row(&params, p)).collect::<Result<Vec<_>>>()?;
    let mut report = RunReport::new(
        "nikodym",
        json!({ "p_max": args.p_max, "n_max": args.n_max, "measure": params.measure() }),
    );
    let norm_err = rows.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max);
    report.require("norm_error", norm_err, 1e-12);
    let d2 = rows.iter().map(|r| r.grad2_sq).fold(0.0, f64::max);
    report.residual("grad2_sq", d2);
    if d2 != 0.0 || !rows.windows(2).all(|w| w[1].quotient > w[0].quotient) {
        report.pass = false;
    }
    report.results = json!({ "rows": rows, "quotient_increasing": rows.windows(2).all(|w| w[1].quotient > w[0].quotient) });

    if let Some(path) = &args.geometry_csv {
        let geometry: Vec<GeometryRow> = params
            .geometry()
            .into_iter()
            .map(|r| {
                let (kind, index) = match r.piece {
                    Piece::Square(n) => ("square", n),
                    Piece::Band(n) => ("band", n),
                };
                GeometryRow { kind, index, x0: r.x0, x1: r.x1, y0: r.y0, y1: r.y1 }
            })
            .collect();
        std::fs::write(path, rows_to_csv(&geometry)?).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(Output { csv: rows_to_csv(&rows)?, report })
}

pub fn square2d(args: &Square2dArgs, seed: u64) -> Result<Output> {
    let g = args.g;
    SquareSample::new(g, vec![fuglede_core::Complex64::new(0.0, 0.0); g * g])?;
    let points = lattice_points(args.lmax);
    let mut report = RunReport::new(
        "square2d",
        json!({ "lmax": args.lmax, "G": g, "trials": args.trials, "seed": seed, "check_eigen": args.check_eigen }),
    );
    let gram = discrete_gram(&points, g)?;
    report.require("gram_off_diagonal", off_diagonal_max(&gram), args.tol);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 4 * g as i64;
    let mut rows = Vec::new();
    if args.check_eigen {
        let times: Vec<(f64, f64)> = (0..args.trials)
            .map(|_| (rng.random_range(-span..=span) as f64 / g as f64, rng.random_range(-span..=span) as f64 / g as f64))
            .collect();
        for &(l1, l2) in &points {
            for &(t1, t2) in &times {
                let residual = eigen_check(l1, l2, t1, t2, g)?;
                rows.push(EigenRow { l1, l2, t1, t2, residual, pass: residual < args.tol });
            }
        }
        let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        report.require("eigen_residual", worst, args.tol);
    }

    let values = (0..g * g)
        .map(|_| fuglede_core::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let f = SquareSample::new(g, values)?;
    let mut exact = true;
    for _ in 0..args.trials.max(1) {
        let (a, b) = (rng.random_range(-span..=span), rng.random_range(-span..=span));
        exact &= f.shift_h(a).shift_h(b) == f.shift_h(a + b);
        exact &= f.shift_v(a).shift_v(b) == f.shift_v(a + b);
        exact &= f.shift_h(a).shift_v(b) == f.shift_v(b).shift_h(a);
        exact &= f.shift_h(a).norm() == f.norm();
    }
    if !exact {
        report.pass = false;
    }
    report.results = json!({
        "lattice_points": points.len(),
        "permutation_laws_exact": exact,
        "failures": rows.iter().filter(|r| !r.pass).count(),
        "rows": rows,
    });
    let csv = if rows.is_empty() { "l1,l2,t1,t2,residual,pass\n".to_string() } else { rows_to_csv(&rows)? };
    Ok(Output { csv, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_test_functions() {
        assert_eq!(parse_signal("indicator:0:1/4").unwrap(), Signal::Indicator { a: 0.0, b: 0.25 });
        assert!(matches!(parse_signal("exp:0.5").unwrap(), Signal::Exponentials(v) if v[0].0 == 0.5));
        assert!(parse_signal("gauss:1").is_err());
        assert!(parse_signal("indicator:x:1").is_err());
    }

    #[test]
    fn spec_bound_is_kept_unless_forced() {
        let s = SpectrumSource::load("Z |λ|<=1").unwrap();
        assert_eq!(s.truncated(10.0, false).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(s.truncated(2.0, true).unwrap().len(), 5);
        let s = SpectrumSource::load("2Z").unwrap();
        assert_eq!(s.truncated(4.0, false).unwrap(), vec![-4.0, -2.0, 0.0, 2.0, 4.0]);
    }
}
