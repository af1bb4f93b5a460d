use fuglede_core::boundary_spectrum::{
    boundary_matrix_from_spectrum, compute_spectrum, default_scan_step, BoundaryMatrix, CMatrix,
};
use fuglede_core::interval_domain::{exp_inner, exponential, make_domain, IntervalUnion, SampledFunction, Signal};
use fuglede_core::local_translation::{
    check_group_law, check_unitarity, span_residual, BoundaryEvolver, Evolver, SpectralEvolver,
};
use fuglede_core::spectral_verify::{orthogonality_defect, parseval_defect};
use fuglede_core::Complex64;
use proptest::prelude::*;

mod common;
use common::quad_exp;

const TAU: f64 = std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn union() -> IntervalUnion {
    make_domain(&[(0.0, 0.5), (1.0, 1.5)]).unwrap()
}

fn union_b() -> BoundaryMatrix {
    BoundaryMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)],
    ))
    .unwrap()
}

fn union_spectrum(k: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (-(k as i64)..=(k as i64))
        .flat_map(|j| [2.0 * j as f64, 2.0 * j as f64 + 0.5])
        .filter(|l| l.abs() <= k)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

fn domain_strategy() -> impl Strategy<Value = IntervalUnion> {
    prop::collection::vec((0.05f64..1.0, 0.05f64..1.0), 1..4).prop_map(|parts| {
        let mut x = -1.0;
        let mut ivs = Vec::new();
        for (gap, len) in parts {
            x += gap;
            ivs.push((x, x + len));
            x += len;
        }
        make_domain(&ivs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exp_inner_matches_quadrature_and_is_hermitian(
        d in domain_strategy(), l in -20.0f64..20.0, m in -20.0f64..20.0
    ) {
        let closed = exp_inner(&d, l, m);
        let oracle: Complex64 = d.intervals().iter().map(|&(a, b)| quad_exp(l - m, a, b)).sum();
        prop_assert!((closed - oracle).norm() <= 1e-10 * d.measure().max(1.0), "{closed} vs {oracle}");
        prop_assert!((closed - exp_inner(&d, m, l).conj()).norm() < 1e-14);
        prop_assert!((exp_inner(&d, l, l).re - d.measure()).abs() < 1e-14);
    }

    #[test]
    fn one_interval_phase_gives_shifted_integers(a in 0.0f64..1.0) {
        let d = make_domain(&[(0.0, 1.0)]).unwrap();
        let b = BoundaryMatrix::scalar(Complex64::cis(TAU * a)).unwrap();
        let s = compute_spectrum(&b, &d, (-3.0, 3.0), default_scan_step(&d), 1e-9).unwrap();
        let expected: Vec<f64> = (-4..=3).map(|k| k as f64 + a).filter(|l| (-3.0..=3.0).contains(l)).collect();
        prop_assert_eq!(s.len(), expected.len());
        for (p, e) in s.points.iter().zip(&expected) {
            prop_assert!((p.lambda - e).abs() < 1e-8);
            prop_assert_eq!(p.multiplicity, 1);
        }
    }

    #[test]
    fn spectrum_ignores_translation_and_diagonal_gauge(shift in -3.0f64..3.0, th in 0.0f64..1.0) {
        let base = compute_spectrum(&union_b(), &union(), (-4.0, 4.0), default_scan_step(&union()), 1e-9).unwrap();
        let moved = make_domain(&[(shift, shift + 0.5), (shift + 1.0, shift + 1.5)]).unwrap();
        let s = compute_spectrum(&union_b(), &moved, (-4.0, 4.0), default_scan_step(&moved), 1e-9).unwrap();
        prop_assert_eq!(s.len(), base.len());
        for (p, q) in s.points.iter().zip(&base.points) {
            prop_assert!((p.lambda - q.lambda).abs() < 1e-8);
        }
        let dg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), Complex64::cis(TAU * th)]));
        let conj = BoundaryMatrix::new(&dg * union_b().matrix() * dg.adjoint()).unwrap();
        let s = compute_spectrum(&conj, &union(), (-4.0, 4.0), default_scan_step(&union()), 1e-9).unwrap();
        prop_assert_eq!(s.len(), base.len());
        for (p, q) in s.points.iter().zip(&base.points) {
            prop_assert!((p.lambda - q.lambda).abs() < 1e-8);
        }
    }

    #[test]
    fn shifted_spectrum_round_trips(shift in -1.0f64..1.0) {
        let lam: Vec<f64> = union_spectrum(6.0).into_iter().map(|l| l + shift).collect();
        let b = boundary_matrix_from_spectrum(&union(), &lam).unwrap();
        let window = (-4.0 + shift, 4.0 + shift);
        let s = compute_spectrum(&b, &union(), window, default_scan_step(&union()), 1e-9).unwrap();
        let expected: Vec<f64> = lam.iter().copied().filter(|l| (window.0..=window.1).contains(l)).collect();
        prop_assert_eq!(s.len(), expected.len());
        for (p, e) in s.points.iter().zip(&expected) {
            prop_assert!((p.lambda - e).abs() < 1e-8);
            prop_assert_eq!(p.multiplicity, 1);
        }
        prop_assert!(orthogonality_defect(&union(), &s.frequencies()).unwrap() < 1e-10);
    }

    #[test]
    fn parseval_defect_is_nonnegative_and_monotone(a in 0.0f64..0.5, len in 0.0f64..1.0) {
        let b = a + len * (0.5 - a);
        let mut previous = f64::INFINITY;
        for k in [10.0, 25.0, 50.0, 100.0] {
            let d = parseval_defect(&union(), &union_spectrum(k), a, b).unwrap();
            prop_assert!(d >= -1e-12, "Bessel violated: {d}");
            prop_assert!(d <= previous + 1e-12);
            previous = d;
        }
    }
}

fn in_span(coeffs: &[(f64, f64)], spectrum: &[f64], m: usize) -> SampledFunction {
    let terms = spectrum.iter().zip(coeffs).map(|(&l, &(re, im))| (l, c(re, im))).collect();
    SampledFunction::from_signal(&union(), m, Signal::Exponentials(terms))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn spectral_evolution_stays_in_span_and_is_continuous(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10), t in -3.0f64..3.0, eps in 1e-6f64..1e-2
    ) {
        let spectrum = union_spectrum(4.5);
        let f = in_span(&coeffs, &spectrum, 48);
        let ev = SpectralEvolver::new(&union(), &spectrum).unwrap();
        let moved = ev.evolve(&f, t).unwrap();
        prop_assert!(span_residual(&spectrum, &moved) < 1e-8);
        let lmax = spectrum.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        let small = ev.evolve(&f, eps).unwrap();
        let cont: f64 = small.distance(&f);
        prop_assert!(cont <= TAU * lmax * eps * f.norm() * 1.01 + 1e-12);
        prop_assert!(check_unitarity(&ev, &f, t).unwrap() < 1e-10);
    }

    #[test]
    fn boundary_group_law_and_unitarity_on_arbitrary_samples(
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), s in -40i64..40, t in -40i64..40
    ) {
        let rows: Vec<Vec<Complex64>> = values.chunks(32).map(|ch| ch.iter().map(|&(a, b)| c(a, b)).collect()).collect();
        let f = SampledFunction::from_rows(&union(), rows).unwrap();
        let ev = BoundaryEvolver::new(&union(), &union_b()).unwrap();
        let h = ev.grid_step(32);
        prop_assert!(check_group_law(&ev, &f, s as f64 * h, t as f64 * h).unwrap() < 1e-10);
        prop_assert!(check_unitarity(&ev, &f, t as f64 * h).unwrap() < 1e-10);
    }

    #[test]
    fn spectrum_exponentials_are_boundary_eigenvectors(idx in 0usize..10, t in -3.0f64..3.0) {
        let spectrum = union_spectrum(4.5);
        let l = spectrum[idx % spectrum.len()];
        let f = SampledFunction::from_signal(&union(), 32, Signal::Exponentials(vec![(l, c(1.0, 0.0))]));
        let ev = BoundaryEvolver::new(&union(), &union_b()).unwrap();
        let out = ev.evolve_boundary(&f, t).unwrap();
        let phase = exponential(l, out.snapped_t);
        let expected = SampledFunction::from_signal(&union(), 32, Signal::Exponentials(vec![(l, phase)]));
        prop_assert!(out.function.distance(&expected) / f.norm() < 1e-10);
    }
}
