//! Equally spaced qudit clocks and their vacuum extension.
//!
//! Basis index 0 is the vacuum `|0⟩`; the clock energy levels `|n⟩`,
//! `n = 1..=N`, occupy indices `1..=N`. Units have `ħ = 1`.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, Operator, StateVector, Unitary};
use crate::scalar::{cis, real, Real};

/// An `N`-level clock with energies `E_n = E_1 + (n − 1)·ΔE`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockSpec<T: Real> {
    levels: usize,
    ground_energy: T,
    spacing: T,
}

impl<T: Real> ClockSpec<T> {
    pub fn new(levels: usize, ground_energy: T, spacing: T) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: levels as f64,
                reason: "a clock needs at least two levels",
            });
        }
        if !(spacing > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "dE",
                value: spacing.as_f64(),
                reason: "level spacing must be positive",
            });
        }
        if !ground_energy.is_finite() {
            return Err(Error::InvalidParameter {
                name: "E1",
                value: ground_energy.as_f64(),
                reason: "ground energy must be finite",
            });
        }
        Ok(Self { levels, ground_energy, spacing })
    }

    /// Clock with `E_1 = 0` and `ΔE = 2π/N`, so that `t⊥ = 1`.
    pub fn unit_tick(levels: usize) -> Result<Self> {
        Self::new(levels, T::zero(), T::two_pi() / T::lit(levels as f64))
    }

    pub fn with_ground_energy(self, ground_energy: T) -> Result<Self> {
        Self::new(self.levels, ground_energy, self.spacing)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Dimension of the vacuum-extended space, `N + 1`.
    pub fn dim(&self) -> usize {
        self.levels + 1
    }

    pub fn ground_energy(&self) -> T {
        self.ground_energy
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// `E_n` for `n = 1..=N`.
    pub fn energy(&self, n: usize) -> T {
        self.ground_energy + T::lit((n - 1) as f64) * self.spacing
    }

    /// Orthogonalisation time `t⊥ = 2π/(N·ΔE)`.
    pub fn t_perp(&self) -> T {
        T::two_pi() / (T::lit(self.levels as f64) * self.spacing)
    }

    /// Diagonal of `R(t)`: `e^{−iE_1 t}·e^{−2πi(n−1)t/(N t⊥)}` for `n = 1..=N`.
    pub fn phases(&self, t: T) -> Vec<Complex<T>> {
        let ratio = t / self.t_perp();
        let step = T::two_pi() / T::lit(self.levels as f64);
        (0..self.levels)
            .map(|m| cis(-(self.ground_energy * t) - step * T::lit(m as f64) * ratio))
            .collect()
    }

    /// `tr[R(t)]`.
    pub fn trace_evolution(&self, t: T) -> Complex<T> {
        self.phases(t)
            .into_iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }
}

/// Labels `|φ^(k)(Δt)⟩ = R^k(Δt)|φ⟩`, the clock after `k` windings of a
/// loop of duration `Δt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedClockLabel<T: Real> {
    pub windings: usize,
    pub delay: T,
}

impl<T: Real> EvolvedClockLabel<T> {
    pub fn new(windings: usize, delay: T) -> Self {
        Self { windings, delay }
    }

    /// The labelled state in the vacuum-extended space.
    pub fn state(&self, spec: &ClockSpec<T>) -> StateVector<T> {
        evolved_clock(spec, T::lit(self.windings as f64) * self.delay)
    }
}

/// `|φ⟩ = N^{−1/2} Σ_n |n⟩` embedded with zero vacuum amplitude.
pub fn clock_state<T: Real>(spec: &ClockSpec<T>) -> StateVector<T> {
    evolved_clock(spec, T::zero())
}

/// `|φ(t)⟩ = R(t)|φ⟩` embedded with zero vacuum amplitude.
pub fn evolved_clock<T: Real>(spec: &ClockSpec<T>, t: T) -> StateVector<T> {
    let amp = real(T::one() / T::lit(spec.levels() as f64).sqrt());
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero())];
    amplitudes.extend(spec.phases(t).into_iter().map(|z| z * amp));
    StateVector::from_slice(&amplitudes)
}

/// Clock time-evolution `R(t)` on the `N`-dimensional clock subspace.
pub fn evolution<T: Real>(spec: &ClockSpec<T>, t: T) -> Unitary<T> {
    Unitary::new_unchecked(Operator::from_diagonal(&spec.phases(t)))
}

/// `R̃(t) = |0⟩⟨0| + R(t)`.
pub fn extended_evolution<T: Real>(spec: &ClockSpec<T>, t: T) -> Unitary<T> {
    let mut diag = vec![real(T::one())];
    diag.extend(spec.phases(t));
    Unitary::new_unchecked(Operator::from_diagonal(&diag))
}

/// Block-diagonal extension `|0⟩⟨0| ⊕ u` of a clock-subspace unitary.
pub fn vacuum_extend<T: Real>(u: &Operator<T>) -> Result<Unitary<T>> {
    let u = Unitary::try_new(u.clone())?;
    let d = u.dim_in();
    let mut m = CMatrix::zeros(d + 1, d + 1);
    m[(0, 0)] = real(T::one());
    m.view_mut((1, 1), (d, d)).copy_from(u.matrix());
    Ok(Unitary::new_unchecked(Operator::new(m)))
}

/// Closed-form overlap `⟨φ(t)|φ(t + Δt)⟩`, independent of `t`.
pub fn clock_overlap<T: Real>(spec: &ClockSpec<T>, dt: T) -> Complex<T> {
    let n = T::lit(spec.levels() as f64);
    let ratio = dt / spec.t_perp();
    let sum = (0..spec.levels()).fold(Complex::new(T::zero(), T::zero()), |acc, m| {
        acc + cis(-(T::two_pi() * T::lit(m as f64) / n * ratio))
    });
    cis(-(spec.ground_energy() * dt)) * sum / real(n)
}

/// `|φ̃⟩ = √Ω|0⟩ + √(1−Ω)|φ⟩`.
pub fn vacuum_clock<T: Real>(spec: &ClockSpec<T>, omega: T) -> Result<StateVector<T>> {
    check_unit_interval("omega", omega)?;
    let clock = clock_state(spec).scale(real((T::one() - omega).sqrt()));
    let vacuum = StateVector::basis(spec.dim(), 0).scale(real(omega.sqrt()));
    vacuum.add(&clock)
}

pub(crate) fn check_unit_interval<T: Real>(name: &'static str, x: T) -> Result<()> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::InvalidParameter {
            name,
            value: x.as_f64(),
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}
