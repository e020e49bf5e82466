"""Field types on the periodic grid and the scalar functionals on densities.

A density is admissible when it is strictly positive (above a small floor
relative to the uniform level) and integrates to one; a wave is admissible
when it has unit L2 norm.  Phases carry an explicit gauge tag: either
`mean_zero` (density-weighted mean vanishes) or `pinned` (prescribed value
at the reference point x = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import AliasError, GaugeError, NodeError, WindingError
from .grid import Grid

if TYPE_CHECKING:  # pragma: no cover - annotation only
    from .wgeom import TangentVector

# Admissibility floor for densities, relative to the uniform level 1/length.
FLOOR_RELATIVE = 1e-12

# Construction tolerances.
MASS_TOL = 1e-12
NORM_TOL = 1e-12
GAUGE_TOL = 1e-10

GAUGE_MEAN_ZERO = "mean_zero"
GAUGE_PINNED = "pinned"

# A neighbouring phase step at least this large cannot be unwrapped reliably.
PHASE_STEP_LIMIT = np.pi / 2


def density_floor(grid: Grid) -> float:
    return FLOOR_RELATIVE / grid.length


def _frozen_copy(values, dtype) -> np.ndarray:
    v = np.array(values, dtype=dtype, copy=True)
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class PhysicsConstants:
    """Physical constants of a run (only the quantum of action here)."""

    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.hbar) and self.hbar > 0.0):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar!r}")


@dataclass(frozen=True)
class PotentialField:
    """External potential sampled on the grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.grid.check_values(self.values)
        if np.iscomplexobj(v):
            raise ValueError("potential must be real valued")
        object.__setattr__(self, "values", _frozen_copy(v, float))

    @classmethod
    def zero(cls, grid: Grid) -> "PotentialField":
        return cls(grid, np.zeros(grid.n))


@dataclass(frozen=True)
class DensityField:
    """Strictly positive probability density with unit mass."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.grid.check_values(self.values)
        if np.iscomplexobj(v):
            raise ValueError("density must be real valued")
        v = np.asarray(v, dtype=float)
        floor = density_floor(self.grid)
        if v.min() < floor:
            raise NodeError(
                f"density reaches {v.min():.3e}, below the admissibility floor {floor:.3e}"
            )
        mass = self.grid.integrate(v)
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"density mass is {mass!r}, expected 1 within {MASS_TOL}")
        object.__setattr__(self, "values", _frozen_copy(v, float))

    @property
    def floor(self) -> float:
        return density_floor(self.grid)


def normalize_density(grid: Grid, raw_values) -> DensityField:
    """Scale strictly positive samples to unit mass.

    Raises NodeError if any sample is non-positive or ends up below the
    admissibility floor after scaling.
    """
    v = grid.check_values(raw_values)
    if np.iscomplexobj(v):
        raise ValueError("density must be real valued")
    if v.min() <= 0.0:
        raise NodeError(f"raw density has non-positive samples (min {v.min():.3e})")
    scaled = v / grid.integrate(v)
    if scaled.min() < density_floor(grid):
        raise NodeError(
            f"normalized density reaches {scaled.min():.3e}, "
            f"below the admissibility floor {density_floor(grid):.3e}"
        )
    return DensityField(grid, scaled)


@dataclass(frozen=True)
class WaveField:
    """Complex field with unit L2 norm."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.grid.check_values(self.values)
        v = np.asarray(v, dtype=complex)
        norm_sq = self.grid.integrate(np.abs(v) ** 2)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"wave norm squared is {norm_sq!r}, expected 1 within {NORM_TOL}")
        object.__setattr__(self, "values", _frozen_copy(v, complex))

    @classmethod
    def normalized(cls, grid: Grid, raw_values) -> "WaveField":
        v = np.asarray(grid.check_values(raw_values), dtype=complex)
        norm_sq = grid.integrate(np.abs(v) ** 2)
        if not norm_sq > 0.0:
            raise ValueError("cannot normalize the zero wave")
        return cls(grid, v / np.sqrt(norm_sq))

    @property
    def min_modulus(self) -> float:
        return float(np.abs(self.values).min())

    def is_nowhere_vanishing(self) -> bool:
        """Membership in the admissible class (modulus above sqrt of the floor)."""
        return self.min_modulus > np.sqrt(density_floor(self.grid))


@dataclass(frozen=True)
class PhaseField:
    """Real phase with an explicit gauge tag.

    mean_zero: the density-weighted mean vanished at construction (the
    witnessing density is not stored).  pinned: values[0] == pin_value.
    """

    grid: Grid
    values: np.ndarray
    gauge: str
    pin_value: float = 0.0

    def __post_init__(self) -> None:
        v = self.grid.check_values(self.values)
        if np.iscomplexobj(v):
            raise ValueError("phase must be real valued")
        if self.gauge not in (GAUGE_MEAN_ZERO, GAUGE_PINNED):
            raise GaugeError(f"unknown gauge {self.gauge!r}")
        if self.gauge == GAUGE_PINNED and abs(v[0] - self.pin_value) > GAUGE_TOL:
            raise GaugeError(
                f"pinned phase has value {v[0]!r} at the reference point, "
                f"declared {self.pin_value!r}"
            )
        object.__setattr__(self, "values", _frozen_copy(v, float))

    @classmethod
    def mean_zero(cls, grid: Grid, values, density: DensityField) -> "PhaseField":
        v = np.asarray(grid.check_values(values), dtype=float)
        shift = grid.integrate(v * density.values)
        return cls(grid, v - shift, GAUGE_MEAN_ZERO)

    @classmethod
    def pinned(cls, grid: Grid, values, pin_value: float) -> "PhaseField":
        v = np.asarray(grid.check_values(values), dtype=float)
        return cls(grid, v - (v[0] - pin_value), GAUGE_PINNED, float(pin_value))


def rezero_phase(phase: PhaseField, density: DensityField) -> PhaseField:
    """Convert to the mean_zero gauge with respect to `density`."""
    return PhaseField.mean_zero(phase.grid, phase.values, density)


def pin_phase(phase: PhaseField, pin_value: float) -> PhaseField:
    """Convert to the pinned gauge with value `pin_value` at x = 0."""
    return PhaseField.pinned(phase.grid, phase.values, pin_value)


def check_mean_zero(phase: PhaseField, density: DensityField) -> None:
    """Raise GaugeError unless `phase` is mean_zero with respect to `density`."""
    if phase.gauge != GAUGE_MEAN_ZERO:
        raise GaugeError(f"expected a mean_zero phase, got gauge {phase.gauge!r}")
    mean = phase.grid.integrate(phase.values * density.values)
    if abs(mean) > GAUGE_TOL:
        raise GaugeError(f"phase has weighted mean {mean:.3e}, beyond {GAUGE_TOL}")


# -- scalar functionals -----------------------------------------------------


@dataclass(frozen=True)
class FunctionalValues:
    """Values of the standard functionals at one density."""

    entropy: float
    fisher: float
    potential_energy: float
    total_energy: float


def functionals(mu: DensityField, potential: PotentialField,
                constants: PhysicsConstants) -> FunctionalValues:
    """Entropy, Fisher information, potential energy and their combination.

    entropy = int mu log mu dx
    fisher = int |d log mu|^2 mu dx            (spectral derivative of log mu)
    total_energy = int V mu dx + (hbar^2 / 8) * fisher
    """
    g = mu.grid
    if potential.grid is not g and potential.grid != g:
        raise ValueError("potential and density live on different grids")
    log_mu = np.log(mu.values)
    dlog = g.derivative(log_mu)
    entropy = g.integrate(mu.values * log_mu)
    fisher = g.integrate(dlog * dlog * mu.values)
    potential_energy = g.integrate(potential.values * mu.values)
    total = potential_energy + 0.125 * constants.hbar ** 2 * fisher
    return FunctionalValues(entropy, fisher, potential_energy, total)


def lagrangian(tangent: "TangentVector", potential: PotentialField,
               constants: PhysicsConstants) -> float:
    """Kinetic energy of a tangent vector minus the total energy of its base."""
    g = tangent.base.grid
    slope = g.derivative(tangent.potential)
    kinetic = 0.5 * g.integrate(slope * slope * tangent.base.values)
    return kinetic - functionals(tangent.base, potential, constants).total_energy


# -- phase unwrapping and winding -------------------------------------------


def cyclic_phase_steps(psi: WaveField) -> np.ndarray:
    """Principal-value phase increments between cyclic neighbours.

    Raises NodeError if the modulus reaches the admissible floor and
    AliasError if any increment has magnitude >= pi/2.
    """
    if not psi.is_nowhere_vanishing():
        raise NodeError(
            f"wave modulus reaches {psi.min_modulus:.3e}; phase is not resolvable"
        )
    theta = np.angle(psi.values)
    steps = np.angle(np.exp(1j * np.diff(theta, append=theta[0])))
    worst = float(np.abs(steps).max())
    if worst >= PHASE_STEP_LIMIT:
        raise AliasError(
            f"neighbouring phase step of {worst:.3f} rad >= pi/2; grid too coarse"
        )
    return steps


def winding_number(psi: WaveField) -> int:
    """Net number of turns of the wave around zero along the circle."""
    steps = cyclic_phase_steps(psi)
    total = float(steps.sum()) / (2.0 * np.pi)
    winding = int(np.rint(total))
    if abs(total - winding) > 1e-6:
        raise WindingError(f"phase increments sum to {total!r} turns, not an integer")
    return winding


def unwrapped_phase(psi: WaveField) -> np.ndarray:
    """Single-valued phase accumulated from x = 0 (requires zero winding)."""
    steps = cyclic_phase_steps(psi)
    winding = int(np.rint(float(steps.sum()) / (2.0 * np.pi)))
    if winding != 0:
        raise WindingError(f"wave has winding {winding}; no single-valued phase exists")
    theta0 = float(np.angle(psi.values[0]))
    return theta0 + np.concatenate(([0.0], np.cumsum(steps[:-1])))
