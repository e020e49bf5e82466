"""Time integration: wave, hydrodynamic and gradient-flow solvers.

schrodinger_evolve   split-step Fourier (Strang) for the linear wave equation
madelung_evolve      RK4 lines for the coupled (density, phase) system with
                     per-step mean-zero re-gauging and a gauge ledger
heat_evolve          exact spectral semigroup of the heat flow
dlss_evolve          explicit RK4 descent of the total energy (fourth order
                     quantum drift-diffusion)

All solvers return a TrajectoryRecord with snapshots and per-time
observables; products are dealiased with the 2/3 rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NodeError, StabilityError
from .fields import (DensityField, PhaseField, PhysicsConstants, PotentialField,
                     WaveField, density_floor, functionals)
from .grid import Grid
from .madelung import PolarDecomposition
from .wgeom import fisher_generator

MASS_DRIFT_TOL = 1e-8
ENERGY_BLOWUP_FACTOR = 1e3
DESCENT_TOL = 1e-10


@dataclass(frozen=True)
class TrajectoryRecord:
    """Snapshots of a run: times, states, and named observable columns."""

    times: np.ndarray
    states: tuple
    observables: dict

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.states):
            raise ValueError("times and states must have matching lengths")
        if len(t) > 1 and not np.all(np.diff(t) > 0.0):
            raise ValueError("snapshot times must be strictly increasing")
        obs = {k: np.asarray(v, dtype=float) for k, v in self.observables.items()}
        for key, col in obs.items():
            if col.shape != t.shape:
                raise ValueError(f"observable {key!r} has shape {col.shape}, expected {t.shape}")
        if "mass" not in obs:
            raise ValueError("observables must include a mass column")
        drift = float(np.abs(obs["mass"] - 1.0).max())
        if drift > MASS_DRIFT_TOL:
            raise ValueError(f"mass drifts by {drift:.3e}, beyond {MASS_DRIFT_TOL}")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "observables", obs)


def _step_count(dt: float, total_time: float) -> int:
    if not (dt > 0.0 and total_time > 0.0):
        raise ValueError(f"need positive dt and total time, got {dt!r}, {total_time!r}")
    steps = int(round(total_time / dt))
    if steps < 1 or abs(steps * dt - total_time) > 1e-9 * max(1.0, total_time):
        raise ValueError(f"total time {total_time!r} is not a multiple of dt {dt!r}")
    return steps


def _snapshot_steps(steps: int, stride: int) -> list[int]:
    if stride < 1:
        raise ValueError(f"snapshot stride must be >= 1, got {stride!r}")
    marks = list(range(0, steps + 1, stride))
    if marks[-1] != steps:
        marks.append(steps)
    return marks


# -- linear wave solver ------------------------------------------------------


def schrodinger_evolve(initial: WaveField, potential: PotentialField,
                       constants: PhysicsConstants, dt: float, total_time: float,
                       snapshot_stride: int = 1) -> TrajectoryRecord:
    """Strang split-step: half potential phase, full kinetic phase, half potential."""
    g = initial.grid
    hbar = constants.hbar
    steps = _step_count(dt, total_time)
    marks = _snapshot_steps(steps, snapshot_stride)
    half_potential = np.exp(-0.5j * dt * potential.values / hbar)
    kinetic = np.exp(0.5j * hbar * dt * g.laplacian_symbol)

    psi = initial.values.astype(complex).copy()
    times, states, mass_col, energy_col = [], [], [], []

    def record(step_index: int) -> None:
        wave = WaveField(g, psi)
        times.append(step_index * dt)
        states.append(wave)
        mass_col.append(g.integrate(np.abs(psi) ** 2))
        dpsi = g.derivative(psi)
        energy = 0.5 * hbar ** 2 * g.integrate(np.abs(dpsi) ** 2) \
            + g.integrate(np.abs(psi) ** 2 * potential.values)
        energy_col.append(energy)

    mark_set = set(marks)
    record(0)
    for step in range(1, steps + 1):
        psi = half_potential * psi
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
        psi = half_potential * psi
        if step in mark_set:
            record(step)
    return TrajectoryRecord(np.array(times), tuple(states),
                            {"mass": mass_col, "h_s": energy_col})


# -- hydrodynamic solver -----------------------------------------------------


def madelung_evolve(mu0: DensityField, phase0: PhaseField, potential: PotentialField,
                    constants: PhysicsConstants, dt: float, total_time: float,
                    snapshot_stride: int = 1) -> TrajectoryRecord:
    """RK4 integration of the coupled density / phase system.

    d(mu)/dt = -d/dx(mu dS/dx)
    d(S)/dt  = -( |dS/dx|^2 / 2 + V + quantum correction )

    The phase is re-gauged to mean zero after every step; removed constants
    accumulate in the gauge_constant observable (the ledger reconciled
    against the running action integral).  Raises NodeError when the
    density reaches its floor and StabilityError on energy blow-up.
    """
    g = mu0.grid
    hbar = constants.hbar
    steps = _step_count(dt, total_time)
    marks = _snapshot_steps(steps, snapshot_stride)
    floor = density_floor(g)
    v_vals = potential.values
    ik = g.derivative_symbol
    lap = g.laplacian_symbol
    mask = g.dealias_mask
    q_coef = 0.125 * hbar ** 2

    fft, ifft = np.fft.fft, np.fft.ifft

    def rhs(mu, s):
        mu_hat = fft(mu)
        mu_x = ifft(ik * mu_hat).real
        lap_mu = ifft(lap * mu_hat).real
        s_x = ifft(ik * fft(s)).real
        d_mu = -ifft(ik * (mask * fft(mu * s_x))).real
        nonlinear = 0.5 * s_x * s_x + q_coef * ((mu_x / mu) ** 2 - 2.0 * lap_mu / mu)
        d_s = -(ifft(mask * fft(nonlinear)).real + v_vals)
        return d_mu, d_s

    # Work on dealiased copies so every retained mode is evolved consistently.
    mu = ifft(mask * fft(mu0.values)).real
    s = ifft(mask * fft(phase0.values)).real
    ledger = g.integrate(s * mu)
    s = s - ledger

    times, states = [], []
    cols = {k: [] for k in ("mass", "h_f", "l_f", "entropy", "fisher", "gauge_constant")}
    reference_energy = None

    def record(step_index: int) -> None:
        nonlocal reference_energy
        mu_f = DensityField(g, mu)
        phase_f = PhaseField(g, s, "mean_zero")
        vals = functionals(mu_f, potential, constants)
        s_x = g.derivative(s)
        kinetic = 0.5 * g.integrate(s_x * s_x * mu)
        energy = kinetic + vals.total_energy
        guard = kinetic + g.integrate(np.abs(v_vals) * mu) + q_coef * vals.fisher
        if reference_energy is None:
            reference_energy = max(guard, 1e-12)
        elif guard > ENERGY_BLOWUP_FACTOR * reference_energy:
            raise StabilityError(
                f"energy grew to {guard:.3e} at t = {step_index * dt:.4g} "
                f"({ENERGY_BLOWUP_FACTOR:g} times the initial level)"
            )
        times.append(step_index * dt)
        states.append(PolarDecomposition(mu_f, phase_f, hbar))
        cols["mass"].append(g.integrate(mu))
        cols["h_f"].append(energy)
        cols["l_f"].append(kinetic - vals.total_energy)
        cols["entropy"].append(vals.entropy)
        cols["fisher"].append(vals.fisher)
        cols["gauge_constant"].append(ledger)

    mark_set = set(marks)
    record(0)
    for step in range(1, steps + 1):
        k1m, k1s = rhs(mu, s)
        k2m, k2s = rhs(mu + 0.5 * dt * k1m, s + 0.5 * dt * k1s)
        k3m, k3s = rhs(mu + 0.5 * dt * k2m, s + 0.5 * dt * k2s)
        k4m, k4s = rhs(mu + dt * k3m, s + dt * k3s)
        mu = mu + (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        s = s + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        low = float(mu.min())
        if low < floor:
            raise NodeError(
                f"density reached {low:.3e} at t = {step * dt:.4g}, below the floor {floor:.3e}"
            )
        removed = g.integrate(s * mu)
        s = s - removed
        ledger += removed
        if step in mark_set:
            record(step)
    return TrajectoryRecord(np.array(times), tuple(states), cols)


# -- gradient flows ----------------------------------------------------------


def heat_evolve(mu0: DensityField, dt: float, total_time: float,
                snapshot_stride: int = 1) -> TrajectoryRecord:
    """Heat flow by the exact spectral semigroup, sampled every stride steps."""
    g = mu0.grid
    steps = _step_count(dt, total_time)
    marks = _snapshot_steps(steps, snapshot_stride)
    coef0 = np.fft.fft(mu0.values)

    times, states = [], []
    cols = {k: [] for k in ("mass", "entropy", "fisher")}
    for step in marks:
        t = step * dt
        values = np.fft.ifft(coef0 * np.exp(g.laplacian_symbol * t)).real
        mu_f = DensityField(g, values)
        log_mu = np.log(values)
        dlog = g.derivative(log_mu)
        times.append(t)
        states.append(mu_f)
        cols["mass"].append(g.integrate(values))
        cols["entropy"].append(g.integrate(values * log_mu))
        cols["fisher"].append(g.integrate(dlog * dlog * values))
    return TrajectoryRecord(np.array(times), tuple(states), cols)


def dlss_evolve(mu0: DensityField, potential: PotentialField,
                constants: PhysicsConstants, dt: float, total_time: float,
                snapshot_stride: int = 1) -> TrajectoryRecord:
    """Explicit RK4 descent of the total energy (steepest descent flow).

    The velocity is minus the metric gradient of the total energy, so the
    energy must not increase; a per-step ascent beyond the descent
    tolerance raises StabilityError (step size violation).
    """
    g = mu0.grid
    hbar = constants.hbar
    steps = _step_count(dt, total_time)
    marks = _snapshot_steps(steps, snapshot_stride)
    floor = density_floor(g)
    v_vals = potential.values
    ik = g.derivative_symbol
    mask = g.dealias_mask
    q_coef = 0.125 * hbar ** 2
    fft, ifft = np.fft.fft, np.fft.ifft

    def rhs(mu):
        generator = v_vals + q_coef * fisher_generator(g, mu)
        gen_x = ifft(ik * fft(generator)).real
        return ifft(ik * (mask * fft(mu * gen_x))).real

    def energy_of(mu):
        dlog = g.derivative(np.log(mu))
        return g.integrate(v_vals * mu) + q_coef * g.integrate(dlog * dlog * mu)

    mu = ifft(mask * fft(mu0.values)).real
    energy = energy_of(mu)

    times, states = [], []
    cols = {k: [] for k in ("mass", "entropy", "fisher", "h_f", "l_f")}

    def record(step_index: int) -> None:
        mu_f = DensityField(g, mu)
        log_mu = np.log(mu)
        dlog = g.derivative(log_mu)
        fisher = g.integrate(dlog * dlog * mu)
        total = g.integrate(v_vals * mu) + q_coef * fisher
        generator = v_vals + q_coef * fisher_generator(g, mu)
        gen_x = g.derivative(g.dealias(generator))
        kinetic = 0.5 * g.integrate(gen_x * gen_x * mu)
        times.append(step_index * dt)
        states.append(mu_f)
        cols["mass"].append(g.integrate(mu))
        cols["entropy"].append(g.integrate(mu * log_mu))
        cols["fisher"].append(fisher)
        cols["h_f"].append(total)
        cols["l_f"].append(kinetic - total)

    mark_set = set(marks)
    record(0)
    for step in range(1, steps + 1):
        k1 = rhs(mu)
        k2 = rhs(mu + 0.5 * dt * k1)
        k3 = rhs(mu + 0.5 * dt * k2)
        k4 = rhs(mu + dt * k3)
        mu = mu + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        low = float(mu.min())
        if low < floor:
            raise NodeError(
                f"density reached {low:.3e} at t = {step * dt:.4g}, below the floor {floor:.3e}"
            )
        new_energy = energy_of(mu)
        if new_energy > energy + DESCENT_TOL:
            raise StabilityError(
                f"energy rose by {new_energy - energy:.3e} in one step at "
                f"t = {step * dt:.4g}; reduce the step size"
            )
        energy = new_energy
        if step in mark_set:
            record(step)
    return TrajectoryRecord(np.array(times), tuple(states), cols)
