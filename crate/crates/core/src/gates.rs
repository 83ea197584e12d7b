//! Collision gates and the full circuit unitary of the billiard-ball clock.

use crate::clock::{extended_evolution, ClockSpec};
use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, Operator, Unitary};
use crate::scalar::{real, Real};

/// Circuit parameters: the clock, the CTC delay `Δt`, and the inbound and
/// outbound leg durations on the CR channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitSpec<T: Real> {
    pub clock: ClockSpec<T>,
    pub delay: T,
    pub t_in: T,
    pub t_out: T,
}

impl<T: Real> CircuitSpec<T> {
    pub fn new(clock: ClockSpec<T>, delay: T) -> Self {
        Self { clock, delay, t_in: T::zero(), t_out: T::zero() }
    }

    /// Circuit whose delay is `ratio · t⊥`.
    pub fn with_delay_ratio(clock: ClockSpec<T>, ratio: T) -> Self {
        Self::new(clock, ratio * clock.t_perp())
    }

    pub fn with_legs(self, t_in: T, t_out: T) -> Self {
        Self { t_in, t_out, ..self }
    }

    pub fn delay_ratio(&self) -> T {
        self.delay / self.clock.t_perp()
    }

    pub fn levels(&self) -> usize {
        self.clock.levels()
    }

    /// Single-channel dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.clock.dim()
    }
}

fn check_levels(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "N",
            value: n as f64,
            reason: "a clock needs at least two levels",
        });
    }
    Ok(())
}

fn permutation<T: Real>(dim: usize, image: impl Fn(usize) -> usize) -> Unitary<T> {
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(image(col), col)] = real(T::one());
    }
    Unitary::new_unchecked(Operator::new(m))
}

/// `S = Σ_{ij} |i⟩⟨j|_CR ⊗ |j⟩⟨i|_CV` on clock ⊗ clock (dimension `N²`).
pub fn swap<T: Real>(n: usize) -> Result<Unitary<T>> {
    check_levels(n)?;
    Ok(permutation(n * n, |col| {
        let (i, j) = (col / n, col % n);
        j * n + i
    }))
}

/// Vacuum-excluding SWAP on `(N+1)²`: basis states with a vacuum in either
/// slot are fixed, clock–clock pairs are exchanged.
pub fn vacuum_swap<T: Real>(n: usize) -> Result<Unitary<T>> {
    check_levels(n)?;
    let d = n + 1;
    Ok(permutation(d * d, |col| {
        let (i, j) = (col / d, col % d);
        if i == 0 || j == 0 {
            col
        } else {
            j * d + i
        }
    }))
}

/// `Ũ = [1̃ ⊗ R̃(Δt)]·S̃`, wrapped by `R̃(t_in)` and `R̃(t_out)` on the CR
/// channel when those legs are nonzero.
pub fn circuit_unitary<T: Real>(spec: &CircuitSpec<T>) -> Result<Unitary<T>> {
    let d = spec.dim();
    let s = vacuum_swap::<T>(spec.levels())?;
    let rotation = extended_evolution(&spec.clock, spec.delay);

    // 1̃ ⊗ diag is diagonal, so scale the rows of S̃ directly.
    let mut u = s.into_operator().into_matrix();
    for row in 0..d * d {
        let phase = rotation.entry(row % d, row % d);
        for z in u.row_mut(row).iter_mut() {
            *z *= phase;
        }
    }
    let mut u = Unitary::new_unchecked(Operator::new(u));

    if spec.t_in != T::zero() {
        let leg = extended_evolution(&spec.clock, spec.t_in).tensor(&Unitary::identity(d))?;
        u = u.compose(&leg)?;
    }
    if spec.t_out != T::zero() {
        let leg = extended_evolution(&spec.clock, spec.t_out).tensor(&Unitary::identity(d))?;
        u = leg.compose(&u)?;
    }
    Ok(u)
}
