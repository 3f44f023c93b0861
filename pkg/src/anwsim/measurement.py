"""Homodyne-detection algebra on Gaussian states.

A homodyne detector on mode i with local-oscillator phase theta measures
the rotated quadrature x_i(theta) = cos(theta) x_i + sin(theta) y_i, with
y_i(theta) = x_i(theta + pi/2). Joint detection with post-processing gains
measures real linear combinations of rotated quadratures; all variances
are in shot-noise units (vacuum = 1). Mode indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GaussianState
from .symplectic import d_lo, require_symplectic

__all__ = [
    "MeasurementConfig",
    "QuadratureCombination",
    "change_basis",
    "variance_at",
    "min_variance",
    "max_variance",
    "combination_variance",
    "squeezing_db",
]


@dataclass(frozen=True)
class MeasurementConfig:
    """Local-oscillator phases and post-processing gains, one per mode."""

    lo_phases: np.ndarray
    gains: np.ndarray
    basis: str = "individual"

    def __post_init__(self):
        ph = np.asarray(self.lo_phases, dtype=float)
        g = np.asarray(self.gains, dtype=float)
        if ph.ndim != 1 or ph.shape != g.shape:
            raise ValueError(
                f"lo_phases and gains must be equal-length vectors, got "
                f"{ph.shape} and {g.shape}"
            )
        object.__setattr__(self, "lo_phases", ph)
        object.__setattr__(self, "gains", g)

    @property
    def n(self) -> int:
        return self.lo_phases.size


@dataclass(frozen=True)
class QuadratureCombination:
    """Linear form over rotated quadratures.

    ``coefficients`` has length 2N ordered (x_1(t_1)..x_N(t_N),
    y_1(t_1)..y_N(t_N)) and ``angles`` are the N detector phases t_i.
    """

    coefficients: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        a = np.asarray(self.angles, dtype=float)
        if a.ndim != 1 or c.shape != (2 * a.size,):
            raise ValueError(
                f"need 2N coefficients for N angles, got {c.shape} and {a.shape}"
            )
        if not np.any(c):
            raise ValueError("combination must have at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "angles", a)

    @property
    def n(self) -> int:
        return self.angles.size


def change_basis(state: GaussianState, t: np.ndarray, basis: str) -> GaussianState:
    """Rewrite a state in new modes q' = T q for symplectic T."""
    require_symplectic(t)
    return GaussianState(
        z=state.z,
        propagator=t @ state.propagator,
        covariance=t @ state.covariance @ t.T,
        basis=basis,
    )


def _mode_slice(state: GaussianState, i: int) -> tuple[int, int]:
    n = state.n
    if not 1 <= i <= n:
        raise IndexError(f"mode index {i} out of range 1..{n}")
    return i - 1, n + i - 1


def variance_at(state: GaussianState, i: int, theta: float) -> float:
    """Variance of the rotated quadrature x_i(theta)."""
    ix, iy = _mode_slice(state, i)
    v = state.covariance
    c, s = np.cos(theta), np.sin(theta)
    return float(c * c * v[ix, ix] + 2 * c * s * v[ix, iy] + s * s * v[iy, iy])


def _extremal(state: GaussianState, i: int, sign: float) -> tuple[float, float]:
    ix, iy = _mode_slice(state, i)
    v = state.covariance
    a, b, d = v[ix, ix], v[ix, iy], v[iy, iy]
    mean, half = 0.5 * (a + d), 0.5 * (a - d)
    radius = np.hypot(half, b)
    if radius < 1e-15 * max(1.0, mean):
        return float(mean), 0.0
    # variance(theta) = mean + half cos(2 theta) + b sin(2 theta)
    theta = 0.5 * np.arctan2(sign * b, sign * half)
    if theta <= -np.pi / 2:  # keep the half-open range (-pi/2, pi/2]
        theta += np.pi
    return float(mean + sign * radius), float(theta)


def min_variance(state: GaussianState, i: int) -> tuple[float, float]:
    """Smallest quadrature variance of mode i and its angle.

    The angle is reported in (-pi/2, pi/2]; an isotropic mode ties to 0.
    """
    return _extremal(state, i, -1.0)


def max_variance(state: GaussianState, i: int) -> tuple[float, float]:
    """Largest quadrature variance of mode i and its angle (antisqueezing)."""
    return _extremal(state, i, 1.0)


def combination_variance(state: GaussianState, combo: QuadratureCombination) -> float:
    """Variance of a gain-weighted combination of rotated quadratures."""
    if combo.n != state.n:
        raise ValueError(f"combination is over {combo.n} modes, state has {state.n}")
    rot = d_lo(combo.angles)
    c = combo.coefficients
    w = rot.T @ c  # pull the rotation onto the coefficient vector
    return float(w @ state.covariance @ w)


def squeezing_db(variance: float) -> float:
    """Variance in decibels relative to shot noise (negative = squeezed)."""
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return float(10.0 * np.log10(variance))
