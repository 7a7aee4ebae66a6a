"""Runtime verification of the solver's conserved and bounded quantities.

Two instruments ride along with every run. A RepresentationAccumulator
maintains the ingredients of a closed-form representation of the specific
volume (an initial-data factor, a factor built from the cumulative velocity
change, a factor from the volume dependence of the viscosity, and a running
time integral of temperature over the product of the latter two); its
residual against the evolved v measures how faithfully the discrete
trajectory satisfies an identity the continuum solution satisfies exactly.
A BoundTracker maintains the norm functionals that the continuum theory
proves bounded: positivity floors, gradient norms, and space-time integrals
of the acceleration and second velocity differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constitutive import MaterialParams, branch_weight, pressure, stress, viscosity
from .grid import (
    Grid,
    State,
    cell_integral,
    cumulative_u_integral,
    du_dx_cells,
    grad_l2_sq,
    node_weights,
    total_energy,
)
from .scheme import BoundaryKind

__all__ = [
    "initial_volume_factor",
    "velocity_integral_factor",
    "viscosity_volume_factor",
    "RepresentationAccumulator",
    "make_accumulator",
    "update_accumulator",
    "representation_residual",
    "velocity_band_check",
    "BoundTracker",
    "make_tracker",
    "update_bounds",
    "energy_drift",
    "boundary_stress_residual",
    "stress_magnitude_scale",
]


def initial_volume_factor(v0: np.ndarray, alpha: float) -> np.ndarray:
    """Frozen initial-data factor: exp(ln v0 - 1/(alpha*v0**alpha)), or v0 itself
    when alpha = 0."""
    v0 = np.asarray(v0, dtype=float)
    if np.any(v0 <= 0.0):
        raise ValueError("v0 must be strictly positive")
    if alpha == 0.0:
        return v0.copy()
    return np.exp(np.log(v0) - np.exp(-alpha * np.log(v0)) / alpha)


def velocity_integral_factor(
    u: np.ndarray, u0: np.ndarray, grid: Grid, k: float
) -> np.ndarray:
    """exp(k * integral of (u - u0) from 0 to x), averaged to cell centers.

    The cumulative integral lives on nodes; adjacent node values are
    averaged before exponentiating so the factor is colocated with v.
    """
    cumulative = cumulative_u_integral(u, u0, grid)
    return np.exp(k * 0.5 * (cumulative[:-1] + cumulative[1:]))


def viscosity_volume_factor(v: np.ndarray, alpha: float) -> np.ndarray:
    """exp(1/(alpha*v**alpha)) from the volume term of the viscosity; ones
    when alpha = 0."""
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0.0):
        raise ValueError("v must be strictly positive")
    if alpha == 0.0:
        return np.ones_like(v)
    return np.exp(np.exp(-alpha * np.log(v)) / alpha)


@dataclass
class RepresentationAccumulator:
    """Running state of the closed-form volume representation.

    b0 and u0_nodes are frozen at t = 0; time_integral accumulates
    theta/(velocity factor * viscosity factor) per cell by the trapezoid
    rule; e0 feeds the energy band on the velocity factor.
    """

    b0: np.ndarray
    u0_nodes: np.ndarray
    k: float
    time_integral: np.ndarray
    last_integrand: np.ndarray
    t: float
    e0: float
    monotone_ok: bool = True


def _integrand(acc: RepresentationAccumulator, state: State, grid: Grid, alpha: float):
    d1 = velocity_integral_factor(state.u, acc.u0_nodes, grid, acc.k)
    d2 = viscosity_volume_factor(state.v, alpha)
    return state.theta / (d1 * d2), d1


def make_accumulator(
    state: State, grid: Grid, params: MaterialParams
) -> RepresentationAccumulator:
    """Freeze the initial data and start the time integral at zero."""
    acc = RepresentationAccumulator(
        b0=initial_volume_factor(state.v, params.alpha),
        u0_nodes=state.u.copy(),
        k=branch_weight(params.alpha),
        time_integral=np.zeros(grid.n_cells),
        last_integrand=np.empty(grid.n_cells),
        t=state.t,
        e0=total_energy(state, grid, params.c_v),
    )
    acc.last_integrand, _ = _integrand(acc, state, grid, params.alpha)
    return acc


def update_accumulator(
    acc: RepresentationAccumulator, state: State, dt: float, alpha: float, grid: Grid
) -> RepresentationAccumulator:
    """Advance the time integral one accepted step by the trapezoid rule."""
    integrand, _ = _integrand(acc, state, grid, alpha)
    increment = 0.5 * dt * (acc.last_integrand + integrand)
    if not np.all(increment >= 0.0):
        acc.monotone_ok = False
    acc.time_integral += increment
    acc.last_integrand = integrand
    acc.t += dt
    return acc


def representation_residual(
    state: State, acc: RepresentationAccumulator, grid: Grid, alpha: float
) -> float:
    """Relative max-norm defect of the closed-form volume representation.

    Zero to rounding at t = 0 for any positive v0 and either alpha branch,
    since the two exponential factors cancel algebraically there.
    """
    if abs(acc.t - state.t) > 1e-9 * max(1.0, abs(state.t)):
        raise ValueError(
            f"accumulator at t = {acc.t} is out of sync with state at t = {state.t}"
        )
    d1 = velocity_integral_factor(state.u, acc.u0_nodes, grid, acc.k)
    d2 = viscosity_volume_factor(state.v, alpha)
    predicted = d1 * d2 * (acc.b0 + acc.k * acc.time_integral)
    return float(np.max(np.abs(state.v - predicted)) / np.max(state.v))


def velocity_band_check(
    acc: RepresentationAccumulator,
    state: State,
    grid: Grid,
    params: MaterialParams,
) -> tuple[bool, float]:
    """Energy band on the velocity-integral factor.

    The cumulative velocity change is bounded through the conserved energy,
    so the factor must stay inside [exp(-k*s), exp(k*s)] with s =
    sqrt(2*e0). Returns membership and the worst absolute margin to either
    edge (negative when outside).
    """
    d1 = velocity_integral_factor(state.u, acc.u0_nodes, grid, acc.k)
    s = np.sqrt(2.0 * acc.e0)
    lo = np.exp(-acc.k * s)
    hi = np.exp(acc.k * s)
    margin = float(min(np.min(d1 - lo), np.min(hi - d1)))
    return margin >= 0.0, margin


@dataclass
class BoundTracker:
    """Running extrema and space-time integrals of the bounded functionals."""

    params: MaterialParams
    e0: float
    min_v: float
    min_theta: float
    sup_grad_v_sq: float
    sup_grad_theta_sq: float
    sup_u_x_sq: float
    sup_stress_scale: float
    max_energy_drift: float = 0.0
    int_max_theta: float = 0.0
    int_uxx_sq: float = 0.0
    int_ut_sq: float = 0.0
    monotone_ok: bool = True


def stress_magnitude_scale(state: State, params: MaterialParams, grid: Grid) -> float:
    """Largest cellwise magnitude of the stress ingredients mu|u_x|/v + P.

    This is the natural size of the stress components even when the total
    stress nearly cancels, which it does throughout a stress-free run; it
    normalizes the boundary-residual bound.
    """
    g = du_dx_cells(state.u, grid)
    mu = viscosity(state.v, params)
    return float(
        np.max(mu * np.abs(g) / state.v + pressure(state.v, state.theta, params))
    )


def make_tracker(state: State, grid: Grid, params: MaterialParams) -> BoundTracker:
    g = du_dx_cells(state.u, grid)
    return BoundTracker(
        params=params,
        e0=total_energy(state, grid, params.c_v),
        min_v=float(np.min(state.v)),
        min_theta=float(np.min(state.theta)),
        sup_grad_v_sq=grad_l2_sq(state.v, grid),
        sup_grad_theta_sq=grad_l2_sq(state.theta, grid),
        sup_u_x_sq=cell_integral(g * g, grid),
        sup_stress_scale=stress_magnitude_scale(state, params, grid),
    )


def update_bounds(
    tracker: BoundTracker,
    state_prev: State,
    state: State,
    dt: float,
    grid: Grid,
) -> BoundTracker:
    """Fold one accepted step into the tracker.

    Sup trackers take the new state; time integrals use the left-rectangle
    rule (previous state), with the acceleration integral built from the
    difference quotient over the step.
    """
    dx = grid.dx
    g = du_dx_cells(state.u, grid)

    before = (tracker.int_max_theta, tracker.int_uxx_sq, tracker.int_ut_sq)
    tracker.min_v = min(tracker.min_v, float(np.min(state.v)))
    tracker.min_theta = min(tracker.min_theta, float(np.min(state.theta)))
    tracker.sup_grad_v_sq = max(tracker.sup_grad_v_sq, grad_l2_sq(state.v, grid))
    tracker.sup_grad_theta_sq = max(
        tracker.sup_grad_theta_sq, grad_l2_sq(state.theta, grid)
    )
    tracker.sup_u_x_sq = max(tracker.sup_u_x_sq, cell_integral(g * g, grid))
    tracker.sup_stress_scale = max(
        tracker.sup_stress_scale, stress_magnitude_scale(state, tracker.params, grid)
    )

    tracker.int_max_theta += dt * float(np.max(state_prev.theta))
    uxx = (state_prev.u[2:] - 2.0 * state_prev.u[1:-1] + state_prev.u[:-2]) / dx**2
    tracker.int_uxx_sq += dt * dx * float(uxx @ uxx)
    du_dt = (state.u - state_prev.u) / dt
    tracker.int_ut_sq += dt * float(node_weights(grid) @ (du_dt * du_dt))

    tracker.max_energy_drift = max(
        tracker.max_energy_drift, energy_drift(tracker, state, grid, tracker.params)
    )

    after = (tracker.int_max_theta, tracker.int_uxx_sq, tracker.int_ut_sq)
    if not all(np.isfinite(after)) or any(a < b for a, b in zip(after, before)):
        tracker.monotone_ok = False
    return tracker


def energy_drift(
    tracker: BoundTracker, state: State, grid: Grid, params: MaterialParams
) -> float:
    """Relative drift |E(t) - E0| / E0; absolute drift if E0 = 0."""
    e = total_energy(state, grid, params.c_v)
    if tracker.e0 == 0.0:
        return abs(e)
    return abs(e - tracker.e0) / abs(tracker.e0)


def boundary_stress_residual(
    state: State,
    params: MaterialParams,
    grid: Grid,
    bc: BoundaryKind,
    stress_bc: tuple[float, float] = (0.0, 0.0),
) -> tuple[float, float]:
    """Wall defect of the velocity boundary condition, one value per end.

    Stress-free: |wall stress estimate - imposed value| using a two-cell
    linear extrapolation of the cell-centered stress (second-order in dx).
    No-slip: |u| at each end node.
    """
    if bc is BoundaryKind.NO_SLIP:
        return abs(float(state.u[0])), abs(float(state.u[-1]))
    sigma = stress(state.v, state.theta, du_dx_cells(state.u, grid), params)
    left = 1.5 * sigma[0] - 0.5 * sigma[1]
    right = 1.5 * sigma[-1] - 0.5 * sigma[-2]
    return abs(left - stress_bc[0]), abs(right - stress_bc[1])
