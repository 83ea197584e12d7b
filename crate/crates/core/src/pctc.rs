//! Postselected-teleportation (P-CTC) engine.
//!
//! Tracing the CV channel out of the circuit unitary leaves the reduced
//! operator `W̃ = tr_CV[Ũ] = tr[R̃(Δt)]|0⟩⟨0| + 1_clock + R(Δt)`, which acts on
//! the CR input followed by renormalization. When the post-selection norm
//! vanishes the input is forbidden.

use nalgebra::Complex;

use crate::clock::{clock_state, ClockSpec};
use crate::error::{Error, Result};
use crate::gates::CircuitSpec;
use crate::hilbert::{CMatrix, Operator, StateVector};
use crate::scalar::{real, Real};

/// Squared post-selection norms below this are treated as exact zeros.
pub const FORBIDDEN_THRESHOLD: f64 = 1e-12;

/// Singular values above this count towards the Schmidt rank.
pub const SCHMIDT_THRESHOLD: f64 = 1e-10;

/// Diagonal of `W̃`, including the CR leg phases when present.
fn reduced_diagonal<T: Real>(circuit: &CircuitSpec<T>) -> Vec<Complex<T>> {
    let clock = &circuit.clock;
    let r = clock.phases(circuit.delay);
    let legs = clock.phases(circuit.t_in + circuit.t_out);
    let one = real(T::one());
    let tr_ext = one + clock.trace_evolution(circuit.delay);
    let mut diag = Vec::with_capacity(clock.dim());
    diag.push(tr_ext);
    diag.extend(r.into_iter().zip(legs).map(|(rn, ln)| ln * (one + rn)));
    diag
}

/// Closed-form reduced operator `W̃ = tr_CV[Ũ]`.
pub fn reduced_operator<T: Real>(circuit: &CircuitSpec<T>) -> Operator<T> {
    Operator::from_diagonal(&reduced_diagonal(circuit))
}

/// `W̃ψ/‖W̃ψ‖` in the gauge where the first nonzero amplitude is real and
/// positive, together with the squared pre-normalization norm.
pub fn postselect<T: Real>(w: &Operator<T>, psi: &StateVector<T>) -> Result<(StateVector<T>, T)> {
    psi.ensure_normalized()?;
    let out = w.apply(psi)?;
    let norm_sq = out.norm_squared();
    if norm_sq < T::lit(FORBIDDEN_THRESHOLD) {
        return Err(Error::ForbiddenInitialData { norm_sq: norm_sq.as_f64() });
    }
    let out = out.scale(real(T::one() / norm_sq.sqrt()));
    Ok((out.canonical_phase(), norm_sq))
}

/// Renormalized P-CTC output `W̃ψ/‖W̃ψ‖`.
pub fn pctc_apply<T: Real>(w: &Operator<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    postselect(w, psi).map(|(out, _)| out)
}

/// `𝒩 = Ω|tr R̃|² + (1 − Ω)(2 + (tr R + tr R†)/N)`.
pub fn pctc_normalization<T: Real>(circuit: &CircuitSpec<T>, omega: T) -> T {
    let clock = &circuit.clock;
    let tr = clock.trace_evolution(circuit.delay);
    let tr_ext = real(T::one()) + tr;
    let n = T::lit(clock.levels() as f64);
    omega * tr_ext.norm_sqr() + (T::one() - omega) * (T::lit(2.0) + T::lit(2.0) * tr.re / n)
}

/// Closed-form unnormalized `W̃|φ̃⟩`.
pub fn pctc_unnormalized_output<T: Real>(
    circuit: &CircuitSpec<T>,
    omega: T,
) -> Result<StateVector<T>> {
    crate::clock::check_unit_interval("omega", omega)?;
    let diag = reduced_diagonal(circuit);
    let vac = real(omega.sqrt());
    let clk = real(((T::one() - omega) / T::lit(circuit.levels() as f64)).sqrt());
    let amps: Vec<Complex<T>> = diag
        .iter()
        .enumerate()
        .map(|(i, &d)| d * if i == 0 { vac } else { clk })
        .collect();
    Ok(StateVector::from_slice(&amps))
}

/// Populations and clock probabilities of the P-CTC output for `|φ̃⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PctcObservables<T: Real> {
    /// Vacuum first, then clock levels `1..=N`.
    pub populations: Vec<T>,
    pub p_unevolved: T,
    pub p_orthogonal: T,
    pub normalization: T,
}

/// Closed-form observables for the vacuum-clock input.
///
/// Populations are `Ω|tr R̃|²/𝒩` and `(1 − Ω)|1 + R_nn|²/(N𝒩)`; the clock
/// probabilities are `(1 − Ω)|1 + tr R(Δt)/N|²/𝒩` and
/// `(1 − Ω)|tr R(Δt − t⊥)/N|²/𝒩`.
pub fn pctc_observables<T: Real>(circuit: &CircuitSpec<T>, omega: T) -> Result<PctcObservables<T>> {
    crate::clock::check_unit_interval("omega", omega)?;
    let clock = &circuit.clock;
    let norm = pctc_normalization(circuit, omega);
    if norm < T::lit(FORBIDDEN_THRESHOLD) {
        return Err(Error::ForbiddenInitialData { norm_sq: norm.as_f64() });
    }
    let n = T::lit(clock.levels() as f64);
    let keep = T::one() - omega;
    let dt = circuit.delay;
    let tr_ext = real(T::one()) + clock.trace_evolution(dt);

    let mut populations = vec![omega * tr_ext.norm_sqr() / norm];
    populations.extend(
        clock
            .phases(dt)
            .into_iter()
            .map(|r| keep * (real(T::one()) + r).norm_sqr() / (n * norm)),
    );

    // the leg phases multiply both branches of the clock amplitude
    let legs = circuit.t_in + circuit.t_out;
    let t_perp = clock.t_perp();
    let branch = |shift: T| {
        (clock.trace_evolution(legs + shift) + clock.trace_evolution(legs + dt + shift)) / real(n)
    };
    Ok(PctcObservables {
        populations,
        p_unevolved: keep * branch(T::zero()).norm_sqr() / norm,
        p_orthogonal: keep * branch(-t_perp).norm_sqr() / norm,
        normalization: norm,
    })
}

/// Integers selecting a constrained circuit: `Δt = p·N·t⊥` and
/// `E1 = π(1 + 2q)/(p·N·t⊥)`, which force `R(Δt) = −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintParams {
    pub p: u32,
    pub q: u32,
}

impl ConstraintParams {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter {
                name: "p",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self { p, q })
    }

    pub fn delay<T: Real>(&self, clock: &ClockSpec<T>) -> T {
        T::lit(self.p as f64 * clock.levels() as f64) * clock.t_perp()
    }

    pub fn ground_energy<T: Real>(&self, clock: &ClockSpec<T>) -> T {
        T::pi() * T::lit(1.0 + 2.0 * self.q as f64) / self.delay(clock)
    }

    /// Circuit on the given clock with the constrained delay and ground energy.
    pub fn circuit<T: Real>(&self, clock: &ClockSpec<T>) -> Result<CircuitSpec<T>> {
        let clock = clock.with_ground_energy(self.ground_energy(clock))?;
        Ok(CircuitSpec::new(clock, self.delay(&clock)))
    }
}

/// A pure state on record ⊗ CR stored as a `record × CR` amplitude matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState<T: Real> {
    amplitudes: CMatrix<T>,
}

impl<T: Real> BipartiteState<T> {
    pub fn new(amplitudes: CMatrix<T>) -> Result<Self> {
        let s = Self { amplitudes };
        s.to_state().ensure_normalized()?;
        Ok(s)
    }

    /// Reshapes a record-major ket on `record_dim × cr_dim`.
    pub fn from_state(psi: &StateVector<T>, record_dim: usize, cr_dim: usize) -> Result<Self> {
        if psi.dim() != record_dim * cr_dim {
            return Err(Error::DimensionMismatch {
                context: "bipartite ket",
                expected: record_dim * cr_dim,
                found: psi.dim(),
            });
        }
        let a = psi.amplitudes();
        Self::new(CMatrix::from_fn(record_dim, cr_dim, |r, c| a[r * cr_dim + c]))
    }

    pub fn record_dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn cr_dim(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn amplitudes(&self) -> &CMatrix<T> {
        &self.amplitudes
    }

    pub fn to_state(&self) -> StateVector<T> {
        let (r, c) = self.amplitudes.shape();
        StateVector::from_slice(
            &(0..r * c).map(|i| self.amplitudes[(i / c, i % c)]).collect::<Vec<_>>(),
        )
    }

    /// The same state with the factor order exchanged.
    pub fn swapped(&self) -> Self {
        Self { amplitudes: self.amplitudes.transpose() }
    }

    /// Schmidt coefficients in descending order.
    pub fn schmidt_coefficients(&self) -> Vec<T> {
        let mut s: Vec<T> =
            self.amplitudes.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        s
    }

    pub fn schmidt_rank(&self) -> usize {
        let threshold = T::lit(SCHMIDT_THRESHOLD);
        self.schmidt_coefficients().into_iter().filter(|&s| s > threshold).count()
    }

    /// Probability that the record slot is found in `|0⟩`.
    pub fn record_vacuum_prob(&self) -> T {
        self.amplitudes.row(0).iter().fold(T::zero(), |a, z| a + z.norm_sqr())
    }

    /// Applies `1 ⊗ op` (acting on CR) and renormalizes.
    pub fn apply_cr(&self, op: &Operator<T>) -> Result<Self> {
        if op.dim_in() != self.cr_dim() {
            return Err(Error::DimensionMismatch {
                context: "CR operator",
                expected: self.cr_dim(),
                found: op.dim_in(),
            });
        }
        let out: CMatrix<T> = &self.amplitudes * op.matrix().transpose();
        let norm_sq = out.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if norm_sq < T::lit(FORBIDDEN_THRESHOLD) {
            return Err(Error::ForbiddenInitialData { norm_sq: norm_sq.as_f64() });
        }
        Ok(Self { amplitudes: out * real(T::one() / norm_sq.sqrt()) })
    }
}

/// Outcome of the entangled-record experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordOutcome<T: Real> {
    pub output: BipartiteState<T>,
    pub schmidt_rank: usize,
    pub record_vacuum_prob: T,
}

/// `(|0⟩|0⟩ + |φ(0)⟩|φ(0)⟩)/√2` on record ⊗ CR.
pub fn record_input<T: Real>(clock: &ClockSpec<T>) -> Result<BipartiteState<T>> {
    record_input_weighted(clock, T::lit(0.5))
}

/// `√Ω|0⟩|0⟩ + √(1 − Ω)|φ(0)⟩|φ(0)⟩` on record ⊗ CR.
pub fn record_input_weighted<T: Real>(clock: &ClockSpec<T>, omega: T) -> Result<BipartiteState<T>> {
    crate::clock::check_unit_interval("omega", omega)?;
    let phi = clock_state(clock);
    let a = phi.amplitudes();
    let mut m: CMatrix<T> = a * a.transpose() * real((T::one() - omega).sqrt());
    m[(0, 0)] = real(omega.sqrt());
    BipartiteState::new(m)
}

/// Sends the CR half of the record input through `W̃` (or the constrained
/// `W̃′` when `constrained` is given, built on the same clock levels and
/// spacing).
pub fn record_experiment<T: Real>(
    circuit: &CircuitSpec<T>,
    constrained: Option<ConstraintParams>,
) -> Result<RecordOutcome<T>> {
    let circuit = match constrained {
        Some(c) => c.circuit(&circuit.clock)?,
        None => *circuit,
    };
    let input = record_input(&circuit.clock)?;
    run_record(&circuit, &input)
}

/// Record experiment on a custom record ⊗ CR input.
pub fn run_record<T: Real>(
    circuit: &CircuitSpec<T>,
    input: &BipartiteState<T>,
) -> Result<RecordOutcome<T>> {
    let output = input.apply_cr(&reduced_operator(circuit))?;
    Ok(RecordOutcome {
        schmidt_rank: output.schmidt_rank(),
        record_vacuum_prob: output.record_vacuum_prob(),
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{evolved_clock, vacuum_clock};
    use crate::gates::circuit_unitary;
    use crate::hilbert::{fidelity_pure, partial_trace, Dims, Slot};

    fn circuit(n: usize, ratio: f64) -> CircuitSpec<f64> {
        CircuitSpec::with_delay_ratio(ClockSpec::unit_tick(n).unwrap(), ratio)
    }

    #[test]
    fn reduced_operator_at_zero_delay() {
        let w = reduced_operator(&circuit(3, 0.0));
        let mut diag = vec![Complex::new(4.0, 0.0)];
        diag.extend(vec![Complex::new(2.0, 0.0); 3]);
        assert!(w.max_abs_diff(&Operator::from_diagonal(&diag)) < 1e-15);
    }

    #[test]
    fn reduced_operator_matches_partial_trace() {
        for &(n, ratio, e1) in &[(2, 0.3, 0.0), (3, 1.7, 0.4), (4, 2.25, -1.1)] {
            let clock = ClockSpec::unit_tick(n).unwrap().with_ground_energy(e1).unwrap();
            let c = CircuitSpec::with_delay_ratio(clock, ratio);
            let u = circuit_unitary(&c).unwrap();
            let brute = partial_trace(u.as_operator(), Slot::Cr, Dims::square(n + 1)).unwrap();
            assert!(reduced_operator(&c).max_abs_diff(&brute) < 1e-13);
        }
    }

    #[test]
    fn reduced_operator_with_legs_matches_partial_trace() {
        let c = circuit(3, 0.6).with_legs(0.2, 0.45);
        let u = circuit_unitary(&c).unwrap();
        let brute = partial_trace(u.as_operator(), Slot::Cr, Dims::square(4)).unwrap();
        assert!(reduced_operator(&c).max_abs_diff(&brute) < 1e-13);
    }

    #[test]
    fn orthogonal_delay_superposes_clocks() {
        let c = circuit(2, 1.0);
        let w = reduced_operator(&c);
        let phi = clock_state(&c.clock);
        let out = pctc_apply(&w, &phi).unwrap();
        let orth = evolved_clock(&c.clock, 1.0);
        let expected = phi.add(&orth).unwrap().normalized().unwrap();
        assert!((fidelity_pure(&out, &expected).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vacuum_is_an_eigenvector() {
        let c = circuit(3, 0.77);
        let vac = StateVector::basis(4, 0);
        let out = pctc_apply(&reduced_operator(&c), &vac).unwrap();
        assert!((out.amplitudes() - vac.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn constrained_circuit_forbids_clocks() {
        let clock = ClockSpec::unit_tick(2).unwrap();
        let c = ConstraintParams::new(1, 0).unwrap().circuit(&clock).unwrap();
        let w = reduced_operator(&c);
        match pctc_apply(&w, &clock_state(&c.clock)) {
            Err(Error::ForbiddenInitialData { norm_sq }) => assert!(norm_sq < 1e-20),
            other => panic!("expected forbidden data, got {other:?}"),
        }
        assert!(pctc_observables(&c, 0.0).is_err());
    }

    #[test]
    fn constraint_collapse() {
        for n in [2, 3] {
            for p in [1, 2] {
                for q in [0, 1] {
                    let clock = ClockSpec::<f64>::unit_tick(n).unwrap();
                    let c = ConstraintParams::new(p, q).unwrap().circuit(&clock).unwrap();
                    let w = reduced_operator(&c);
                    for i in 1..=n {
                        assert!(w.entry(i, i).norm() <= 1e-12);
                    }
                    assert!((w.entry(0, 0) - Complex::<f64>::new(1.0 - n as f64, 0.0)).norm() <= 1e-12);
                }
            }
        }
        assert!(ConstraintParams::new(0, 0).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert!((pctc_normalization(&circuit(2, 1.0), 0.0) - 2.0).abs() < 1e-14);
        assert!((pctc_normalization(&circuit(3, 0.0), 1.0) - 16.0).abs() < 1e-13);
        assert!((pctc_normalization(&circuit(4, 0.0), 0.0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_is_squared_norm() {
        for &(n, om, ratio) in &[(2, 0.3, 0.45), (3, 0.8, 1.9), (5, 0.1, 3.3)] {
            let c = circuit(n, ratio);
            let psi = vacuum_clock(&c.clock, om).unwrap();
            let (_, norm_sq) = postselect(&reduced_operator(&c), &psi).unwrap();
            assert!((norm_sq - pctc_normalization(&c, om)).abs() < 1e-12);
        }
    }

    #[test]
    fn observables_examples() {
        let o = pctc_observables(&circuit(2, 1.0), 0.0).unwrap();
        assert!((o.p_unevolved - 0.5).abs() < 1e-14);
        assert!((o.p_orthogonal - 0.5).abs() < 1e-14);

        let o = pctc_observables(&circuit(3, 0.0), 0.4).unwrap();
        assert!(o.p_orthogonal < 1e-28);

        let o = pctc_observables(&circuit(2, 1.0), 0.64).unwrap();
        assert!((o.populations[0] - 0.64 / (0.64 + 0.36 * 2.0)).abs() < 1e-14);
    }

    #[test]
    fn observables_match_output_amplitudes() {
        for &(n, om, ratio, legs) in
            &[(2, 0.25, 0.37, 0.0), (3, 0.6, 1.4, 0.3), (4, 0.05, 2.8, 0.0)]
        {
            let c = circuit(n, ratio).with_legs(legs, legs / 2.0);
            let out = pctc_apply(&reduced_operator(&c), &vacuum_clock(&c.clock, om).unwrap()).unwrap();
            let o = pctc_observables(&c, om).unwrap();
            let total: f64 = o.populations.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (i, p) in o.populations.iter().enumerate() {
                assert!((out.amplitude(i).norm_sqr() - p).abs() < 1e-12);
            }
            let phi = clock_state(&c.clock);
            let orth = evolved_clock(&c.clock, c.clock.t_perp());
            assert!((fidelity_pure(&phi, &out).unwrap() - o.p_unevolved).abs() < 1e-12);
            assert!((fidelity_pure(&orth, &out).unwrap() - o.p_orthogonal).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_output_agrees() {
        let c = circuit(3, 0.81);
        let raw = pctc_unnormalized_output(&c, 0.35).unwrap();
        let out = pctc_apply(&reduced_operator(&c), &vacuum_clock(&c.clock, 0.35).unwrap()).unwrap();
        assert!((raw.norm_squared() - pctc_normalization(&c, 0.35)).abs() < 1e-12);
        assert!((fidelity_pure(&raw.normalized().unwrap(), &out).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_is_fixed() {
        let c = circuit(2, 0.3);
        let out = pctc_apply(&reduced_operator(&c), &vacuum_clock(&c.clock, 0.5).unwrap()).unwrap();
        assert!(out.amplitude(0).im.abs() < 1e-15 && out.amplitude(0).re > 0.0);
    }

    #[test]
    fn unnormalized_input_rejected() {
        let c = circuit(2, 0.3);
        let psi = StateVector::from_real(&[1.0, 1.0, 0.0]);
        assert!(matches!(
            pctc_apply(&reduced_operator(&c), &psi),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn record_input_shape() {
        let clock = ClockSpec::<f64>::unit_tick(2).unwrap();
        let s = record_input(&clock).unwrap();
        assert_eq!(s.schmidt_rank(), 2);
        assert!((s.record_vacuum_prob() - 0.5).abs() < 1e-15);
        let w = record_input_weighted(&clock, 0.2).unwrap();
        assert!((w.record_vacuum_prob() - 0.2).abs() < 1e-15);
        assert_eq!(record_input_weighted(&clock, 1.0).unwrap().schmidt_rank(), 1);
        assert_eq!(record_input_weighted(&clock, 0.0).unwrap().schmidt_rank(), 1);
    }

    #[test]
    fn record_experiment_entanglement() {
        let c = circuit(2, 1.0);
        let free = record_experiment(&c, None).unwrap();
        assert_eq!(free.schmidt_rank, 2);

        let held = record_experiment(&c, Some(ConstraintParams::new(1, 0).unwrap())).unwrap();
        assert_eq!(held.schmidt_rank, 1);
        assert!((held.record_vacuum_prob - 1.0).abs() < 1e-12);
        assert!((held.output.amplitudes()[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn record_side_is_untouched() {
        let c = circuit(3, 0.4);
        let w = reduced_operator(&c);
        let input = record_input_weighted(&c.clock, 0.3).unwrap();
        let forward = input.apply_cr(&w).unwrap();
        // act on the first factor of the swapped state instead
        let swapped = input.swapped();
        let m = w.matrix() * swapped.amplitudes();
        let norm = m.norm();
        let acted = BipartiteState::new(m / Complex::new(norm, 0.0)).unwrap();
        assert!((acted.swapped().amplitudes() - forward.amplitudes()).norm() < 1e-13);
        let round = BipartiteState::from_state(&forward.to_state(), 4, 4).unwrap();
        assert_eq!(round, forward);
    }
}
