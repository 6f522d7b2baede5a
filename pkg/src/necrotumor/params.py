"""Model parameters and the piecewise kinetic functions.

All solvers consume a validated :class:`ModelParams`.  Concentrations are
nondimensionalized so that the boundary supply is 1 and the nutrient
consumption coefficient is 1; the remaining free constants are the
viability threshold ``sigma_hat``, the proliferation coefficient ``mu``,
the dead-cell dissolution rate ``nu``, and the surface tension ``gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# stamped into every exported artifact header
ARTIFACT_VERSION = "0.1.0"


class ParameterError(ValueError):
    """Raised when a candidate parameter set violates the model constraints."""


@dataclass(frozen=True)
class ModelParams:
    """Validated, immutable kinetic constants.

    ``sigma_tilde`` is stored (not recomputed) so every module works with
    one bit-identical value.
    """

    sigma_hat: float
    mu: float
    nu: float
    gamma: float = 0.0
    sigma_tilde: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.sigma_hat < 1.0):
            raise ParameterError(
                f"sigma_hat out of (0,1): sigma_hat={self.sigma_hat}"
            )
        if self.mu <= 0.0:
            raise ParameterError(f"mu must be positive: mu={self.mu}")
        if self.nu <= 0.0:
            raise ParameterError(f"nu must be positive: nu={self.nu}")
        if self.nu >= self.mu * self.sigma_hat:
            raise ParameterError(
                f"nu >= mu*sigma_hat: nu={self.nu}, mu*sigma_hat={self.mu * self.sigma_hat}"
            )
        if self.gamma < 0.0:
            raise ParameterError(f"gamma must be nonnegative: gamma={self.gamma}")
        object.__setattr__(self, "sigma_tilde", self.sigma_hat - self.nu / self.mu)

    def with_gamma(self, gamma: float) -> "ModelParams":
        return ModelParams(self.sigma_hat, self.mu, self.nu, gamma)

    def as_dict(self) -> dict:
        return {
            "sigma_hat": self.sigma_hat,
            "mu": self.mu,
            "nu": self.nu,
            "gamma": self.gamma,
            "sigma_tilde": self.sigma_tilde,
        }


def validate(sigma_hat, mu, nu, gamma=0.0) -> ModelParams:
    """Validate a raw parameter tuple, computing the derived threshold."""
    return ModelParams(float(sigma_hat), float(mu), float(nu), float(gamma))


def heaviside(s):
    """Strict-inequality convention: H(s)=1 for s>0, H(s)=0 for s<=0.

    Accepts scalars or arrays; scalar in, scalar out.
    """
    if np.isscalar(s):
        return 1.0 if s > 0.0 else 0.0
    return np.where(np.asarray(s) > 0.0, 1.0, 0.0)


def kinetics_f(sigma: float, p: ModelParams) -> float:
    """Nutrient consumption rate: sigma above threshold, 0 below."""
    return sigma * heaviside(sigma - p.sigma_hat)


def kinetics_g(sigma: float, p: ModelParams) -> float:
    """Net proliferation rate mu*(sigma - sigma_tilde)*H(sigma - sigma_hat) - nu."""
    return p.mu * (sigma - p.sigma_tilde) * heaviside(sigma - p.sigma_hat) - p.nu


def g_at_supply(p: ModelParams) -> float:
    """Net proliferation at the boundary concentration sigma=1."""
    return p.mu * (1.0 - p.sigma_tilde) - p.nu
