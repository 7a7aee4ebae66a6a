"""Material laws for a viscous heat-conducting ideal gas in mass coordinates.

The gas carries a density-dependent shear viscosity mu(v) = mu_tilde*(1 + v**-alpha)
and a temperature-power conductivity kappa(theta) = kappa_tilde*theta**beta,
with specific volume v and temperature theta both strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MaterialParams",
    "DerivedFields",
    "viscosity",
    "conductivity",
    "pressure",
    "stress",
    "sound_speed",
    "branch_weight",
    "derived_fields",
]


@dataclass(frozen=True)
class MaterialParams:
    """Gas constants and constitutive exponents.

    Admissible regime: alpha >= 0 (volume exponent in the viscosity) and
    beta > 0 (temperature exponent in the conductivity). All four scale
    constants must be positive.
    """

    R: float = 1.0
    c_v: float = 1.0
    mu_tilde: float = 1.0
    kappa_tilde: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("R", "c_v", "mu_tilde", "kappa_tilde"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not np.isfinite(self.alpha) or self.alpha < 0.0:
            raise ValueError(f"alpha must satisfy alpha >= 0, got {self.alpha}")
        if not np.isfinite(self.beta) or self.beta <= 0.0:
            raise ValueError(f"beta must satisfy beta > 0, got {self.beta}")

    @property
    def gamma(self) -> float:
        """Adiabatic index 1 + R/c_v of the ideal gas."""
        return 1.0 + self.R / self.c_v


@dataclass(frozen=True)
class DerivedFields:
    """Pointwise thermodynamic and transport fields evaluated on cells."""

    pressure: np.ndarray
    internal_energy: np.ndarray
    viscosity: np.ndarray
    conductivity: np.ndarray
    stress: np.ndarray
    sound_speed: np.ndarray


def _require_positive(name: str, field: np.ndarray) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.size and not np.all(field > 0.0):
        raise ValueError(f"{name} must be strictly positive everywhere")
    return field


def viscosity(v: np.ndarray, params: MaterialParams) -> np.ndarray:
    """Viscosity mu_tilde*(1 + v**-alpha); exactly 2*mu_tilde when alpha = 0."""
    v = _require_positive("v", v)
    if params.alpha == 0.0:
        return np.full_like(v, 2.0 * params.mu_tilde)
    # exp/log form keeps fractional alpha well-defined for all v > 0
    return params.mu_tilde * (1.0 + np.exp(-params.alpha * np.log(v)))


def conductivity(theta: np.ndarray, params: MaterialParams) -> np.ndarray:
    """Conductivity kappa_tilde*theta**beta."""
    theta = _require_positive("theta", theta)
    return params.kappa_tilde * np.exp(params.beta * np.log(theta))


def pressure(v: np.ndarray, theta: np.ndarray, params: MaterialParams) -> np.ndarray:
    """Ideal-gas pressure R*theta/v."""
    v = _require_positive("v", v)
    theta = _require_positive("theta", theta)
    return params.R * theta / v


def stress(
    v: np.ndarray,
    theta: np.ndarray,
    du_dx: np.ndarray,
    params: MaterialParams,
) -> np.ndarray:
    """Total stress mu(v)*u_x/v - p(v, theta); affine in the strain rate."""
    return viscosity(v, params) * np.asarray(du_dx, dtype=float) / np.asarray(
        v, dtype=float
    ) - pressure(v, theta, params)


def sound_speed(v: np.ndarray, theta: np.ndarray, params: MaterialParams) -> np.ndarray:
    """Adiabatic sound speed sqrt(gamma*R*theta) per cell."""
    theta = _require_positive("theta", theta)
    _require_positive("v", v)
    return np.sqrt(params.gamma * params.R * theta)


def branch_weight(alpha: float) -> float:
    """Weight of the time integral in the closed-form volume representation.

    1 when the viscosity actually depends on volume (alpha > 0), 1/2 when it
    is constant (alpha = 0).
    """
    if alpha < 0.0:
        raise ValueError(f"alpha must satisfy alpha >= 0, got {alpha}")
    return 1.0 if alpha > 0.0 else 0.5


def derived_fields(
    v: np.ndarray,
    theta: np.ndarray,
    du_dx: np.ndarray,
    params: MaterialParams,
) -> DerivedFields:
    """Evaluate all pointwise constitutive fields on one cell-centered state."""
    mu = viscosity(v, params)
    p = pressure(v, theta, params)
    return DerivedFields(
        pressure=p,
        internal_energy=params.c_v * np.asarray(theta, dtype=float),
        viscosity=mu,
        conductivity=conductivity(theta, params),
        stress=mu * np.asarray(du_dx, dtype=float) / np.asarray(v, dtype=float) - p,
        sound_speed=sound_speed(v, theta, params),
    )
