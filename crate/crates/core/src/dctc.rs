//! Deutsch-model (D-CTC) engine.
//!
//! The chronology-violating state `θ̃` must be a fixed point of
//! `θ̃ ↦ tr_CR[Ũ(σ̃ ⊗ θ̃)Ũ†]`; the CR output is the complementary marginal.
//! For the vacuum-clock input `σ̃ = |φ̃⟩⟨φ̃|` the fixed points form a family
//! parametrised by the vacuum weight `g`:
//!
//! * `Ω = 1`: `g|0⟩⟨0| + (1 − g)ϱ` for any diagonal clock mixture `ϱ`;
//! * `Ω < 1`: `g|0⟩⟨0| + (1 − g) Σ_{k≥1} (1 − Ω)Ω^{k−1} |φ^(k)(Δt)⟩⟨φ^(k)(Δt)|`.
//!
//! The winding series is truncated at `K = ⌈ln ε / ln Ω⌉` terms and the
//! retained weights are renormalized.

use log::warn;
use nalgebra::{Complex, DMatrix};

use crate::clock::{check_unit_interval, extended_evolution, vacuum_clock, ClockSpec};
use crate::error::{Error, Result};
use crate::gates::{circuit_unitary, CircuitSpec};
use crate::hilbert::{
    partial_trace_matrix, trace_distance, CMatrix, DensityOperator, Dims, Operator, Slot,
    StateVector, Unitary,
};
use crate::scalar::{modulus, real, Real};

/// Upper bound on retained windings, reached only for `Ω` extremely close to 1.
pub const MAX_WINDINGS: usize = 1 << 22;

/// Default series truncation `ε`.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

/// Singular values of `(map − 1)` at or below this count as null.
pub const NULLSPACE_TOLERANCE: f64 = 1e-9;

/// The channel pair `(T, D)` induced by a circuit and a fixed CR input.
#[derive(Debug, Clone)]
pub struct CtcChannel<T: Real> {
    circuit: CircuitSpec<T>,
    unitary: Unitary<T>,
    sigma: DensityOperator<T>,
}

impl<T: Real> CtcChannel<T> {
    pub fn new(circuit: CircuitSpec<T>, sigma: DensityOperator<T>) -> Result<Self> {
        if sigma.dim() != circuit.dim() {
            return Err(Error::DimensionMismatch {
                context: "CR input",
                expected: circuit.dim(),
                found: sigma.dim(),
            });
        }
        let unitary = circuit_unitary(&circuit)?;
        Ok(Self { circuit, unitary, sigma })
    }

    /// Channel driven by the vacuum-clock input `|φ̃⟩⟨φ̃|`.
    pub fn vacuum_clock(circuit: CircuitSpec<T>, omega: T) -> Result<Self> {
        let sigma = vacuum_clock(&circuit.clock, omega)?.projector()?;
        Self::new(circuit, sigma)
    }

    pub fn circuit(&self) -> &CircuitSpec<T> {
        &self.circuit
    }

    pub fn unitary(&self) -> &Unitary<T> {
        &self.unitary
    }

    pub fn sigma(&self) -> &DensityOperator<T> {
        &self.sigma
    }

    fn dims(&self) -> Dims {
        Dims::square(self.circuit.dim())
    }

    fn check(&self, theta: &CMatrix<T>) -> Result<()> {
        let d = self.circuit.dim();
        if theta.nrows() != d || theta.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "CV state",
                expected: d,
                found: theta.nrows(),
            });
        }
        Ok(())
    }

    fn joint(&self, theta: &CMatrix<T>) -> CMatrix<T> {
        let u = self.unitary.matrix();
        u * self.sigma.matrix().kronecker(theta) * u.adjoint()
    }

    /// Linear extension of the CV map to arbitrary matrices.
    pub fn cv_map_matrix(&self, theta: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check(theta)?;
        partial_trace_matrix(&self.joint(theta), Slot::Cv, self.dims())
    }

    /// `tr_CR[Ũ(σ ⊗ θ)Ũ†]`.
    pub fn cv_map(&self, theta: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        Ok(DensityOperator::from_matrix_unchecked(self.cv_map_matrix(theta.matrix())?))
    }

    /// `tr_CV[Ũ(σ ⊗ θ)Ũ†]`.
    pub fn output_map(&self, theta: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        self.check(theta.matrix())?;
        Ok(DensityOperator::from_matrix_unchecked(partial_trace_matrix(
            &self.joint(theta.matrix()),
            Slot::Cr,
            self.dims(),
        )?))
    }

    /// `½‖T(θ) − θ‖₁`.
    pub fn residual(&self, theta: &DensityOperator<T>) -> Result<T> {
        trace_distance(&self.cv_map(theta)?, theta)
    }
}

/// CV map `tr_CR[Ũ(σ ⊗ θ)Ũ†]` for a one-off evaluation.
pub fn cv_map<T: Real>(
    circuit: &CircuitSpec<T>,
    sigma: &DensityOperator<T>,
    theta: &DensityOperator<T>,
) -> Result<DensityOperator<T>> {
    CtcChannel::new(*circuit, sigma.clone())?.cv_map(theta)
}

/// CR output `tr_CV[Ũ(σ ⊗ θ)Ũ†]` for a one-off evaluation.
pub fn output_map<T: Real>(
    circuit: &CircuitSpec<T>,
    sigma: &DensityOperator<T>,
    theta: &DensityOperator<T>,
) -> Result<DensityOperator<T>> {
    CtcChannel::new(*circuit, sigma.clone())?.output_map(theta)
}

/// Parameters selecting one member of the D-CTC solution family.
#[derive(Debug, Clone)]
pub struct FixedPointQuery<T: Real> {
    pub circuit: CircuitSpec<T>,
    pub omega: T,
    /// Probability that the CTC holds no clock.
    pub g: T,
    pub truncation_eps: T,
    /// Diagonal clock-subspace mixture `ϱ` (dimension `N`).
    pub mixture: DensityOperator<T>,
}

impl<T: Real> FixedPointQuery<T> {
    /// Query with `g = 1/(N+1)`, `ε = 10⁻¹²` and a maximally mixed `ϱ`.
    pub fn new(circuit: CircuitSpec<T>, omega: T) -> Self {
        let n = circuit.levels();
        Self {
            circuit,
            omega,
            g: T::one() / T::lit((n + 1) as f64),
            truncation_eps: T::lit(DEFAULT_TRUNCATION),
            mixture: DensityOperator::maximally_mixed(n),
        }
    }

    pub fn with_g(self, g: T) -> Self {
        Self { g, ..self }
    }

    pub fn with_truncation(self, truncation_eps: T) -> Self {
        Self { truncation_eps, ..self }
    }

    pub fn with_mixture(self, mixture: DensityOperator<T>) -> Self {
        Self { mixture, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("omega", self.omega)?;
        check_unit_interval("g", self.g)?;
        if !(self.truncation_eps > T::zero() && self.truncation_eps < T::one()) {
            return Err(Error::InvalidParameter {
                name: "truncation_eps",
                value: self.truncation_eps.as_f64(),
                reason: "must lie in (0, 1)",
            });
        }
        let n = self.circuit.levels();
        if self.mixture.dim() != n {
            return Err(Error::DimensionMismatch {
                context: "clock mixture",
                expected: n,
                found: self.mixture.dim(),
            });
        }
        let m = self.mixture.matrix();
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| modulus(m[(i, j)]))
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if off > T::tol(1e-12) {
            return Err(Error::InvalidDensity {
                reason: "clock mixture must be diagonal in the energy basis",
                deviation: off.as_f64(),
            });
        }
        Ok(())
    }

    /// ECP seed `g|0⟩⟨0| + (1 − g)ϱ`.
    pub fn seed(&self) -> DensityOperator<T> {
        let mut m = embed_clock(self.mixture.matrix()) * real(T::one() - self.g);
        m[(0, 0)] += real(self.g);
        DensityOperator::from_matrix_unchecked(m)
    }

    pub fn channel(&self) -> Result<CtcChannel<T>> {
        CtcChannel::vacuum_clock(self.circuit, self.omega)
    }

    /// True when `Δt` is a whole number of clock revolutions `p·N·t⊥`, so
    /// that every winding coincides.
    pub fn degenerate_delay(&self) -> bool {
        is_full_revolution(&self.circuit)
    }
}

fn is_full_revolution<T: Real>(circuit: &CircuitSpec<T>) -> bool {
    let turns = circuit.delay_ratio() / T::lit(circuit.levels() as f64);
    (turns - turns.round()).abs() <= T::tol(1e-9)
}

fn embed_clock<T: Real>(clock: &CMatrix<T>) -> CMatrix<T> {
    let n = clock.nrows();
    let mut m = CMatrix::zeros(n + 1, n + 1);
    m.view_mut((1, 1), (n, n)).copy_from(clock);
    m
}

/// Renormalized winding weights `w_k ∝ (1 − Ω)Ω^{k−1}`, `k = 1..=K`.
///
/// `Ω = 0` keeps the single first winding. `Ω = 1` has no series and is
/// rejected.
pub fn winding_weights<T: Real>(omega: T, eps: T) -> Result<Vec<T>> {
    check_unit_interval("omega", omega)?;
    if omega == T::one() {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: 1.0,
            reason: "the winding series is empty for a pure-vacuum input",
        });
    }
    if omega == T::zero() {
        return Ok(vec![T::one()]);
    }
    let k = (eps.ln() / omega.ln()).ceil().as_f64();
    let k = if k.is_finite() && k >= 1.0 { k as usize } else { 1 };
    if k > MAX_WINDINGS {
        warn!(
            "omega = {} needs {} windings for truncation {}; capping at {}",
            omega.as_f64(),
            k,
            eps.as_f64(),
            MAX_WINDINGS
        );
    }
    let k = k.min(MAX_WINDINGS);
    let mut weights = Vec::with_capacity(k);
    let mut w = T::one() - omega;
    for _ in 0..k {
        weights.push(w);
        w *= omega;
    }
    let total = weights.iter().fold(T::zero(), |a, &b| a + b);
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(weights)
}

/// Clock block `Σ_k w_k |φ^(k)⟩⟨φ^(k)|` (dimension `N`).
fn winding_mixture<T: Real>(clock: &ClockSpec<T>, delay: T, weights: &[T]) -> CMatrix<T> {
    let n = clock.levels();
    let inv_n = real(T::one() / T::lit(n as f64));
    let mut m = CMatrix::zeros(n, n);
    for (k, &w) in weights.iter().enumerate() {
        let p = clock.phases(T::lit((k + 1) as f64) * delay);
        let w = real(w);
        for a in 0..n {
            let pa = p[a] * w;
            for b in 0..n {
                m[(a, b)] += pa * p[b].conj();
            }
        }
    }
    m * inv_n
}

/// Closed-form CV fixed point selected by `query`.
pub fn analytic_cv<T: Real>(query: &FixedPointQuery<T>) -> Result<DensityOperator<T>> {
    query.validate()?;
    if query.omega == T::one() {
        return Ok(query.seed());
    }
    let weights = winding_weights(query.omega, query.truncation_eps)?;
    let clock = winding_mixture(&query.circuit.clock, query.circuit.delay, &weights);
    let mut m = embed_clock(&clock) * real(T::one() - query.g);
    m[(0, 0)] = real(query.g);
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// Closed-form CR output for the fixed point selected by `query`, including
/// the vacuum–clock coherences weighted by `tr[R^k(Δt)]/N`.
pub fn analytic_output<T: Real>(query: &FixedPointQuery<T>) -> Result<DensityOperator<T>> {
    query.validate()?;
    let circuit = &query.circuit;
    let d = circuit.dim();
    let omega = query.omega;
    if omega == T::one() {
        // a pure-vacuum input passes the circuit untouched
        return StateVector::basis(d, 0).projector();
    }
    let n = circuit.levels();
    let g = query.g;
    let weights = winding_weights(omega, query.truncation_eps)?;

    let input = vacuum_clock(&circuit.clock, omega)?;
    let mut m = input.amplitudes() * input.amplitudes().adjoint() * real(g);

    let rest = T::one() - g;
    let clock = winding_mixture(&circuit.clock, circuit.delay, &weights);
    m += embed_clock(&clock) * real(rest * (T::one() - omega));
    m[(0, 0)] += real(rest * omega);

    // Σ_k w_k conj(tr R^k / N) |φ^(k)⟩
    let inv_n = T::one() / T::lit(n as f64);
    let amp = inv_n.sqrt();
    let mut coherence = vec![Complex::new(T::zero(), T::zero()); n];
    for (k, &w) in weights.iter().enumerate() {
        let t = T::lit((k + 1) as f64) * circuit.delay;
        let p = circuit.clock.phases(t);
        let overlap = p.iter().fold(Complex::new(T::zero(), T::zero()), |a, &z| a + z) * real(inv_n);
        let factor = overlap.conj() * real(w * amp);
        for (c, z) in coherence.iter_mut().zip(p) {
            *c += z * factor;
        }
    }
    let scale = real(rest * (omega * (T::one() - omega)).sqrt());
    for (j, c) in coherence.into_iter().enumerate() {
        m[(j + 1, 0)] += c * scale;
        m[(0, j + 1)] += c.conj() * scale;
    }
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// Probabilities of finding the unevolved clock `|φ(0)⟩` and the orthogonal
/// clock `|φ(t⊥)⟩` in the CV fixed point and in the CR output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DctcClockProbabilities<T: Real> {
    pub cv_unevolved: T,
    pub cv_orthogonal: T,
    pub out_unevolved: T,
    pub out_orthogonal: T,
}

impl<T: Real> DctcClockProbabilities<T> {
    /// Residuals of `out_unevolved = (1 − Ω)(g + cv_unevolved)` and
    /// `out_orthogonal = (1 − Ω)·cv_orthogonal`.
    pub fn relation_residuals(&self, omega: T, g: T) -> (T, T) {
        let keep = T::one() - omega;
        (
            (self.out_unevolved - keep * (g + self.cv_unevolved)).abs(),
            (self.out_orthogonal - keep * self.cv_orthogonal).abs(),
        )
    }
}

/// Closed-form winding series for the clock probabilities.
pub fn dctc_clock_probabilities<T: Real>(
    query: &FixedPointQuery<T>,
) -> Result<DctcClockProbabilities<T>> {
    query.validate()?;
    let circuit = &query.circuit;
    let clock = &circuit.clock;
    let omega = query.omega;
    let g = query.g;
    let rest = T::one() - g;

    if omega == T::one() {
        let n = clock.levels();
        let rho = DensityOperator::from_matrix_unchecked(query.mixture.matrix().clone());
        let restrict = |psi: StateVector<T>| {
            StateVector::from_slice(&psi.amplitudes().as_slice()[1..=n])
        };
        let unevolved = restrict(crate::clock::clock_state(clock));
        let orthogonal = restrict(crate::clock::evolved_clock(clock, clock.t_perp()));
        return Ok(DctcClockProbabilities {
            cv_unevolved: rest * rho.expectation(&unevolved)?,
            cv_orthogonal: rest * rho.expectation(&orthogonal)?,
            out_unevolved: T::zero(),
            out_orthogonal: T::zero(),
        });
    }

    let weights = winding_weights(omega, query.truncation_eps)?;
    let n2 = T::lit((clock.levels() * clock.levels()) as f64);
    let t_perp = clock.t_perp();
    let (mut s_u, mut s_o) = (T::zero(), T::zero());
    for (k, &w) in weights.iter().enumerate() {
        let t = T::lit((k + 1) as f64) * circuit.delay;
        // tr[R^k(Δt)] and tr[R†(t⊥)R^k(Δt)] = tr[R(kΔt − t⊥)]
        s_u += w * clock.trace_evolution(t).norm_sqr() / n2;
        s_o += w * clock.trace_evolution(t - t_perp).norm_sqr() / n2;
    }
    let keep = T::one() - omega;
    let cv_unevolved = rest * s_u;
    let cv_orthogonal = rest * s_o;
    Ok(DctcClockProbabilities {
        cv_unevolved,
        cv_orthogonal,
        out_unevolved: keep * (g + cv_unevolved),
        out_orthogonal: keep * cv_orthogonal,
    })
}

/// Energy-basis populations of the CV fixed point and the CR output.
#[derive(Debug, Clone, PartialEq)]
pub struct DctcPopulations<T: Real> {
    pub cv: Vec<T>,
    pub output: Vec<T>,
}

/// Closed-form populations: `{g, (1 − g)c_n}` for the CV state (with
/// `c_n = 1/N` whenever `Ω < 1`) and `{Ω, (1 − Ω)/N}` for the output.
pub fn dctc_populations<T: Real>(query: &FixedPointQuery<T>) -> Result<DctcPopulations<T>> {
    query.validate()?;
    let n = query.circuit.levels();
    let inv_n = T::one() / T::lit(n as f64);
    let rest = T::one() - query.g;
    let mut cv = vec![query.g];
    if query.omega == T::one() {
        cv.extend(query.mixture.populations().into_iter().map(|c| rest * c));
    } else {
        cv.extend(std::iter::repeat_n(rest * inv_n, n));
    }
    let mut output = vec![query.omega];
    output.extend(std::iter::repeat_n((T::one() - query.omega) * inv_n, n));
    Ok(DctcPopulations { cv, output })
}

/// Result of an equivalent-circuit-picture iteration.
#[derive(Debug, Clone)]
pub struct EcpSolution<T: Real> {
    pub state: DensityOperator<T>,
    pub iterations: usize,
    /// Trace distance between the last two iterates.
    pub last_step: T,
    /// `½‖T(θ) − θ‖₁` at the returned state.
    pub residual: T,
}

/// Iterates the CV map from the seed `g|0⟩⟨0| + (1 − g)ϱ`.
///
/// On clock-block differences the map contracts at rate `Ω`, so iteration
/// stops once `Ω/(1 − Ω)` times the last step falls below `tol`, which bounds
/// the trace distance to the fixed point by `tol`.
pub fn ecp_solve<T: Real>(
    query: &FixedPointQuery<T>,
    tol: T,
    max_iter: usize,
) -> Result<EcpSolution<T>> {
    query.validate()?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol.as_f64(),
            reason: "must be positive",
        });
    }
    if query.omega > T::zero() && query.omega < T::one() {
        // the non-conserved sector contracts at rate Ω per pass
        let predicted = (tol.ln() / query.omega.ln()).as_f64();
        if predicted > max_iter as f64 {
            warn!(
                "omega = {} predicts about {:.0} ECP iterations, above the limit of {}",
                query.omega.as_f64(),
                predicted,
                max_iter
            );
        }
    }
    let channel = query.channel()?;
    let omega = query.omega;
    let factor = if omega < T::one() { omega / (T::one() - omega) } else { T::one() };
    let mut theta = query.seed();
    let mut last_step = T::lit(f64::INFINITY);
    for iteration in 1..=max_iter {
        let next = channel.cv_map(&theta)?;
        last_step = trace_distance(&next, &theta)?;
        theta = next;
        if last_step * factor < tol || last_step == T::zero() {
            let residual = channel.residual(&theta)?;
            return Ok(EcpSolution { state: theta, iterations: iteration, last_step, residual });
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: last_step.as_f64() })
}

/// The affine set of trace-one Hermitian fixed points of the CV map.
#[derive(Debug, Clone)]
pub struct FixedPointFamily<T: Real> {
    /// Affine dimension of the set.
    pub dimension: usize,
    /// Minimum Hilbert–Schmidt-norm trace-one fixed point.
    pub reference: Operator<T>,
    /// Hilbert–Schmidt-orthonormal, traceless Hermitian fixed directions.
    pub directions: Vec<Operator<T>>,
    /// Smallest singular value of `(map − 1)` counted as non-null.
    pub spectral_gap: T,
    /// `Δt` is a whole number of clock revolutions.
    pub degenerate_delay: bool,
}

impl<T: Real> FixedPointFamily<T> {
    /// `reference + Σ_j coords[j]·directions[j]`.
    pub fn member(&self, coords: &[T]) -> Result<Operator<T>> {
        if coords.len() != self.directions.len() {
            return Err(Error::DimensionMismatch {
                context: "fixed-point coordinates",
                expected: self.directions.len(),
                found: coords.len(),
            });
        }
        let mut m = self.reference.matrix().clone();
        for (c, dir) in coords.iter().zip(&self.directions) {
            m += dir.matrix() * real(*c);
        }
        Ok(Operator::new(m))
    }
}

/// Real coordinates of Hermitian matrices in the Hilbert–Schmidt-orthonormal
/// basis `{E_ii, (E_ij + E_ji)/√2, i(E_ij − E_ji)/√2}`.
struct HermitianBasis {
    dim: usize,
    pairs: Vec<(usize, usize)>,
}

impl HermitianBasis {
    fn new(dim: usize) -> Self {
        let pairs = (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).collect();
        Self { dim, pairs }
    }

    fn len(&self) -> usize {
        self.dim * self.dim
    }

    fn element<T: Real>(&self, index: usize) -> CMatrix<T> {
        let d = self.dim;
        let mut m = CMatrix::zeros(d, d);
        let h = T::one() / T::lit(2.0).sqrt();
        if index < d {
            m[(index, index)] = real(T::one());
        } else {
            let p = (index - d) / 2;
            let (i, j) = self.pairs[p];
            if (index - d).is_multiple_of(2) {
                m[(i, j)] = real(h);
                m[(j, i)] = real(h);
            } else {
                m[(i, j)] = Complex::new(T::zero(), h);
                m[(j, i)] = Complex::new(T::zero(), -h);
            }
        }
        m
    }

    fn coords<T: Real>(&self, m: &CMatrix<T>) -> Vec<T> {
        let d = self.dim;
        let s = T::lit(2.0).sqrt();
        let mut out: Vec<T> = (0..d).map(|i| m[(i, i)].re).collect();
        for &(i, j) in &self.pairs {
            // average the two mirrored entries to absorb roundoff asymmetry
            let z = (m[(i, j)] + m[(j, i)].conj()) * real(T::lit(0.5));
            out.push(s * z.re);
            out.push(s * z.im);
        }
        out
    }

    fn assemble<T: Real>(&self, coords: &[T]) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (idx, &c) in coords.iter().enumerate() {
            if c != T::zero() {
                m += self.element::<T>(idx) * real(c);
            }
        }
        m
    }
}

/// Characterises every Hermitian trace-one fixed point of the CV map by a
/// singular-value decomposition of the map minus identity, written in a real
/// Hermitian basis.
pub fn fixed_space<T: Real>(
    circuit: &CircuitSpec<T>,
    sigma: &DensityOperator<T>,
) -> Result<FixedPointFamily<T>> {
    let channel = CtcChannel::new(*circuit, sigma.clone())?;
    let basis = HermitianBasis::new(circuit.dim());
    let size = basis.len();

    let mut a = DMatrix::<T>::zeros(size, size);
    for col in 0..size {
        let image = channel.cv_map_matrix(&basis.element(col))?;
        for (row, v) in basis.coords(&image).into_iter().enumerate() {
            a[(row, col)] = v;
        }
        a[(col, col)] -= T::one();
    }

    let svd = nalgebra::linalg::SVD::try_new(a, false, true, T::machine_epsilon(), 10_000)
        .ok_or(Error::Decomposition("SVD of the vectorized CV map did not converge"))?;
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or(Error::Decomposition("SVD returned no right singular vectors"))?;
    let tol = T::tol(NULLSPACE_TOLERANCE);
    let mut null = Vec::new();
    let mut gap = T::lit(f64::INFINITY);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            null.push(v_t.row(i).transpose());
        } else if s < gap {
            gap = s;
        }
    }
    if null.is_empty() {
        return Err(Error::Decomposition("the CV map has no eigenvalue-one eigenvector"));
    }

    let d = circuit.dim();
    let traces: Vec<T> = null
        .iter()
        .map(|v| (0..d).fold(T::zero(), |acc, i| acc + v[i]))
        .collect();
    let t_norm2 = traces.iter().fold(T::zero(), |acc, &t| acc + t * t);
    if t_norm2 <= tol {
        return Err(Error::Decomposition("no fixed point carries nonzero trace"));
    }

    let combine = |c: &[T]| {
        let mut x = vec![T::zero(); size];
        for (ci, v) in c.iter().zip(&null) {
            for (xi, vi) in x.iter_mut().zip(v.iter()) {
                *xi += *ci * *vi;
            }
        }
        Operator::new(basis.assemble(&x))
    };

    let ref_coeffs: Vec<T> = traces.iter().map(|&t| t / t_norm2).collect();
    let reference = combine(&ref_coeffs);

    // orthonormal complement of the trace direction inside the nullspace
    let m = null.len();
    let mut kept: Vec<Vec<T>> = Vec::new();
    for e in 0..m {
        let mut v: Vec<T> = (0..m)
            .map(|i| {
                let delta = if i == e { T::one() } else { T::zero() };
                delta - traces[i] * traces[e] / t_norm2
            })
            .collect();
        for u in &kept {
            let dot = v.iter().zip(u).fold(T::zero(), |a, (x, y)| a + *x * *y);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * *ui;
            }
        }
        let norm = v.iter().fold(T::zero(), |a, x| a + *x * *x).sqrt();
        if norm > T::tol(1e-8) {
            kept.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let directions: Vec<Operator<T>> = kept.iter().map(|c| combine(c)).collect();

    Ok(FixedPointFamily {
        dimension: directions.len(),
        reference,
        directions,
        spectral_gap: gap,
        degenerate_delay: is_full_revolution(circuit),
    })
}

/// `R̃(Δt)θR̃(Δt)†`, the CV map of a pure-vacuum input.
pub fn free_rotation<T: Real>(
    circuit: &CircuitSpec<T>,
    theta: &DensityOperator<T>,
) -> Result<DensityOperator<T>> {
    theta.conjugate_by(&extended_evolution(&circuit.clock, circuit.delay))
}
