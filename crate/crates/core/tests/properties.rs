use ctc_core::clock::{vacuum_clock, ClockSpec};
use ctc_core::dctc::{analytic_cv, dctc_populations, CtcChannel, FixedPointQuery};
use ctc_core::gates::{circuit_unitary, CircuitSpec};
use ctc_core::hilbert::{
    fidelity_pure, partial_trace, trace_distance, CMatrix, DensityOperator, Dims, Operator, Slot,
};
use ctc_core::pctc::{
    pctc_apply, pctc_normalization, pctc_unnormalized_output, postselect, reduced_operator,
};
use nalgebra::Complex;
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * rows * cols).prop_map(move |v| {
        CMatrix::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            Complex::new(v[k], v[k + 1])
        })
    })
}

/// Small-integer entries, so products are exact in floating point.
fn integer_operator(max_dim: usize) -> impl Strategy<Value = Operator<f64>> {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec(-4i32..=4, 2 * d * d).prop_map(move |v| {
            Operator::new(CMatrix::from_fn(d, d, |i, j| {
                let k = 2 * (i * d + j);
                Complex::new(v[k] as f64, v[k + 1] as f64)
            }))
        })
    })
}

fn operator(max_dim: usize) -> impl Strategy<Value = Operator<f64>> {
    (1..=max_dim).prop_flat_map(|d| matrix(d, d).prop_map(Operator::new))
}

fn density(d: usize) -> impl Strategy<Value = DensityOperator<f64>> {
    matrix(d, d).prop_map(move |a| {
        let mut m = &a * a.adjoint() + CMatrix::identity(d, d) * Complex::new(1e-3, 0.0);
        let tr = m.trace();
        m /= tr;
        DensityOperator::try_new(m).unwrap()
    })
}

fn circuit(n: usize, ratio: f64, e1: f64) -> CircuitSpec<f64> {
    let clock = ClockSpec::unit_tick(n).unwrap().with_ground_energy(e1).unwrap();
    CircuitSpec::with_delay_ratio(clock, ratio)
}

/// `(N, Ω, Δt/t⊥, E1)` with the circuit dimension kept small.
fn params() -> impl Strategy<Value = (usize, f64, f64, f64)> {
    (2usize..=4, 0.0..=1.0f64, 0.0..3.0f64, -2.0..2.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative(a in integer_operator(3), b in integer_operator(3), c in integer_operator(3)) {
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert_eq!(left.matrix(), right.matrix());
    }

    #[test]
    fn partial_trace_of_tensor(a in operator(8), b in operator(8)) {
        let dims = Dims::new(a.dim_in(), b.dim_in());
        let ab = a.tensor(&b).unwrap();
        let keep_cr = partial_trace(&ab, Slot::Cr, dims).unwrap();
        prop_assert!(keep_cr.max_abs_diff(&a.scale(b.trace())) <= 1e-13);
        let keep_cv = partial_trace(&ab, Slot::Cv, dims).unwrap();
        prop_assert!(keep_cv.max_abs_diff(&b.scale(a.trace())) <= 1e-13);
    }

    #[test]
    fn trace_distance_triangle(
        (a, b, c) in (2usize..=6).prop_flat_map(|d| (density(d), density(d), density(d)))
    ) {
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn cv_map_conserves_vacuum_weight(
        ((n, omega, ratio, e1), theta) in params().prop_flat_map(|p| (Just(p), density(p.0 + 1)))
    ) {
        let c = circuit(n, ratio, e1);
        let channel = CtcChannel::vacuum_clock(c, omega).unwrap();
        let out = channel.cv_map(&theta).unwrap();
        prop_assert!((out.population(0) - theta.population(0)).abs() <= 1e-13);
    }

    #[test]
    fn cv_map_is_linear(
        ((n, omega, ratio, e1), t1, t2, a) in params().prop_flat_map(|p| {
            (Just(p), density(p.0 + 1), density(p.0 + 1), 0.0..=1.0f64)
        })
    ) {
        let channel = CtcChannel::vacuum_clock(circuit(n, ratio, e1), omega).unwrap();
        let mixed = channel.cv_map(&t1.mix(&t2, a).unwrap()).unwrap();
        let separate = channel.cv_map(&t1).unwrap().mix(&channel.cv_map(&t2).unwrap(), a).unwrap();
        prop_assert!(mixed.max_abs_diff(&separate) <= 1e-12);
    }

    #[test]
    fn output_map_yields_densities(
        ((n, omega, ratio, e1), theta) in params().prop_flat_map(|p| (Just(p), density(p.0 + 1)))
    ) {
        let channel = CtcChannel::vacuum_clock(circuit(n, ratio, e1), omega).unwrap();
        let out = channel.output_map(&theta).unwrap();
        prop_assert!(DensityOperator::try_new(out.into_matrix()).is_ok());
        let cv = channel.cv_map(&theta).unwrap();
        prop_assert!(DensityOperator::try_new(cv.into_matrix()).is_ok());
    }

    #[test]
    fn general_cr_input_keeps_maps_valid(
        ((n, ratio), sigma, theta) in (2usize..=3, 0.0..2.0f64).prop_flat_map(|(n, r)| {
            (Just((n, r)), density(n + 1), density(n + 1))
        })
    ) {
        let channel = CtcChannel::new(circuit(n, ratio, 0.3), sigma).unwrap();
        prop_assert!(DensityOperator::try_new(channel.output_map(&theta).unwrap().into_matrix()).is_ok());
    }

    #[test]
    fn analytic_fixed_point_on_random_parameters(
        (n, omega, ratio, e1) in params(), g in 0.0..=1.0f64
    ) {
        let q = FixedPointQuery::new(circuit(n, ratio, e1), omega).with_g(g);
        let theta = analytic_cv(&q).unwrap();
        prop_assert!(q.channel().unwrap().residual(&theta).unwrap() <= 1e-11);
        let pops = dctc_populations(&q).unwrap();
        for (i, p) in pops.cv.iter().enumerate() {
            prop_assert!((theta.population(i) - p).abs() <= 1e-10);
        }
    }

    #[test]
    fn reduced_operator_is_partial_trace((n, _omega, ratio, e1) in params()) {
        let c = circuit(n, ratio, e1);
        let u = circuit_unitary(&c).unwrap();
        let brute = partial_trace(u.as_operator(), Slot::Cr, Dims::square(n + 1)).unwrap();
        prop_assert!(reduced_operator(&c).max_abs_diff(&brute) <= 1e-13);
    }

    #[test]
    fn normalization_is_postselection_norm((n, omega, ratio, e1) in params()) {
        let c = circuit(n, ratio, e1);
        let psi = vacuum_clock(&c.clock, omega).unwrap();
        let w = reduced_operator(&c);
        let raw = w.apply(&psi).unwrap().norm_squared();
        prop_assert!((raw - pctc_normalization(&c, omega)).abs() <= 1e-12);
        if let Ok((_, norm_sq)) = postselect(&w, &psi) {
            prop_assert!((norm_sq - raw).abs() <= 1e-12);
        }
    }

    #[test]
    fn pctc_output_matches_closed_form((n, omega, ratio, e1) in params()) {
        let c = circuit(n, ratio, e1);
        prop_assume!(pctc_normalization(&c, omega) > 1e-6);
        let out = pctc_apply(&reduced_operator(&c), &vacuum_clock(&c.clock, omega).unwrap()).unwrap();
        let closed = pctc_unnormalized_output(&c, omega).unwrap().normalized().unwrap();
        prop_assert!((fidelity_pure(&out, &closed).unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn residual_within_ten_truncations_on_grid() {
    let eps = 1e-12;
    for n in [2, 3, 5] {
        for omega in [0.0, 0.25, 0.5, 0.75] {
            for ratio in [0.0, 0.5, 1.0, 1.5, 2.0] {
                for g in [0.0, 1.0 / 3.0, 1.0] {
                    let q = FixedPointQuery::new(circuit(n, ratio, 0.0), omega)
                        .with_g(g)
                        .with_truncation(eps);
                    let r = q.channel().unwrap().residual(&analytic_cv(&q).unwrap()).unwrap();
                    assert!(r <= 10.0 * eps, "N={n} Ω={omega} Δt={ratio} g={g}: {r:e}");
                }
            }
        }
    }
}

#[test]
fn pctc_populations_depend_on_delay() {
    let pops: Vec<f64> = (0..=200)
        .map(|i| {
            let c = circuit(2, 2.0 * i as f64 / 200.0, 0.0);
            let out = pctc_apply(&reduced_operator(&c), &vacuum_clock(&c.clock, 0.25).unwrap()).unwrap();
            out.amplitude(0).norm_sqr()
        })
        .collect();
    let spread = pops.iter().cloned().fold(f64::MIN, f64::max) - pops.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 0.01, "spread {spread}");
}
