"""Physics of a pumped array of coupled nonlinear waveguides.

The device is N identical waveguides with nearest-neighbour evanescent
coupling C0*f_j (mm^-1) and an undepleted classical pump driving
degenerate parametric down-conversion in each guide with complex strength
eta_j = |eta_j| e^{i phi_j} (mm^-1). All lengths are in mm.

Signal-mode evolution is linear in the mode operators, so every state
reachable from vacuum is Gaussian and fully described by a symplectic
propagator S(z) acting on the quadratures (x_1..x_N, y_1..y_N) with
vacuum variance 1 and covariance V = S S^T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symplectic import (
    bogoliubov_to_symplectic,
    mat_exp,
    takagi,
)

__all__ = [
    "BASES",
    "ArrayConfig",
    "PumpProfile",
    "LinearSupermodes",
    "GaussianState",
    "FlatPumpSolution",
    "coupling_tridiagonal",
    "linear_supermodes",
    "quad_generator",
    "propagator_exact",
    "coupling_matrix_L",
    "integrated_L",
    "propagator_no_ordering",
    "nonlinear_supermodes",
    "flat_pump_analytic",
    "rk4_propagate",
    "rk4_propagate_batch",
]

BASES = ("individual", "linear_supermode", "nonlinear_supermode")

# removable-singularity threshold for the phase-mismatch denominator, mm^-1
DEGENERATE_MISMATCH = 1e-12


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry of the waveguide array.

    Parameters
    ----------
    n : int
        Number of waveguides (>= 1).
    coupling : float
        Nearest-neighbour coupling strength C0 in mm^-1 (>= 0).
    length : float
        Device length in mm (> 0).
    profile : array_like or None
        Dimensionless coupling weights f_j for the n-1 junctions;
        None means homogeneous (all ones). The array boundary is open,
        i.e. f_0 = f_n = 0 implicitly.
    """

    n: int
    coupling: float
    length: float
    profile: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"waveguide count must be >= 1, got {self.n}")
        if self.coupling < 0:
            raise ValueError(f"coupling must be nonnegative, got {self.coupling}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        prof = self.profile
        prof = np.ones(self.n - 1) if prof is None else np.asarray(prof, dtype=float)
        if prof.shape != (self.n - 1,):
            raise ValueError(
                f"profile needs {self.n - 1} weights for n={self.n}, got shape {prof.shape}"
            )
        if np.any(prof < 0) or not np.all(np.isfinite(prof)):
            raise ValueError("profile weights must be finite and nonnegative")
        object.__setattr__(self, "profile", prof)


@dataclass(frozen=True)
class PumpProfile:
    """Per-guide pump strength eta_j = amplitudes[j] * exp(i phases[j])."""

    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=float)
        ph = np.asarray(self.phases, dtype=float)
        if amp.ndim != 1 or amp.shape != ph.shape:
            raise ValueError(
                f"amplitudes and phases must be equal-length vectors, got "
                f"{amp.shape} and {ph.shape}"
            )
        if np.any(amp < 0) or not np.all(np.isfinite(amp)):
            raise ValueError("pump amplitudes must be finite and nonnegative")
        if not np.all(np.isfinite(ph)):
            raise ValueError("pump phases must be finite")
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "phases", ph)

    @classmethod
    def flat(cls, n: int, amplitude: float, phase: float = 0.0) -> "PumpProfile":
        """Identical pump in every guide."""
        return cls(np.full(n, float(amplitude)), np.full(n, float(phase)))

    @classmethod
    def off(cls, n: int) -> "PumpProfile":
        return cls(np.zeros(n), np.zeros(n))

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @property
    def complex_amplitudes(self) -> np.ndarray:
        return self.amplitudes * np.exp(1j * self.phases)


@dataclass(frozen=True)
class LinearSupermodes:
    """Eigenbasis of the coupling matrix.

    ``matrix`` holds one supermode per row (orthogonal, rows sum-normalized
    with the first nonvanishing component positive); ``eigenvalues`` are the
    propagation-constant offsets lambda_k in mm^-1, sorted descending.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def to_supermode_basis(self) -> np.ndarray:
        """Block-diagonal symplectic matrix mapping individual quadratures
        to supermode quadratures."""
        m = self.matrix
        z = np.zeros_like(m)
        return np.block([[m, z], [z, m]])


@dataclass(frozen=True)
class GaussianState:
    """Pure Gaussian state of the signal modes at plane z.

    ``propagator`` is the symplectic matrix S with quadratures_out =
    S quadratures_in from vacuum at z=0; ``covariance`` is V = S S^T.
    ``basis`` records which mode set the rows refer to.
    """

    z: float
    propagator: np.ndarray
    covariance: np.ndarray
    basis: str = "individual"

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}, expected one of {BASES}")

    @classmethod
    def from_propagator(cls, z: float, s: np.ndarray, basis: str = "individual"):
        return cls(z=float(z), propagator=s, covariance=s @ s.T, basis=basis)

    @property
    def n(self) -> int:
        return self.propagator.shape[0] // 2

    @property
    def mean_photon_number(self) -> float:
        """Total mean photon number, invariant under passive basis changes."""
        return float(np.trace(self.covariance - np.eye(2 * self.n)) / 4.0)


def coupling_tridiagonal(cfg: ArrayConfig) -> np.ndarray:
    """Real symmetric tridiagonal coupling matrix with C0*f_j off-diagonals."""
    c = np.zeros((cfg.n, cfg.n))
    off = cfg.coupling * cfg.profile
    idx = np.arange(cfg.n - 1)
    c[idx, idx + 1] = off
    c[idx + 1, idx] = off
    return c


def linear_supermodes(cfg: ArrayConfig) -> LinearSupermodes:
    """Diagonalize the coupling matrix; eigenvalues descending."""
    lam, vecs = np.linalg.eigh(coupling_tridiagonal(cfg))
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    m = vecs[:, order].T.copy()
    for k in range(cfg.n):
        nz = np.flatnonzero(np.abs(m[k]) > 1e-12)
        if nz.size and m[k, nz[0]] < 0:
            m[k] = -m[k]
    return LinearSupermodes(matrix=m, eigenvalues=lam)


def _check_pump(cfg: ArrayConfig, pump: PumpProfile) -> None:
    if pump.n != cfg.n:
        raise ValueError(f"pump has {pump.n} entries but the array has {cfg.n} guides")


def quad_generator(cfg: ArrayConfig, pump: PumpProfile) -> np.ndarray:
    """Constant real generator Q of the quadrature equations dq/dz = Q q.

    Built from the coupled-mode equations via x = A + A^dag,
    y = i(A^dag - A); the coupling enters the off-diagonal blocks and the
    parametric gain the sin/cos projections of the pump phase.
    """
    _check_pump(cfg, pump)
    c = coupling_tridiagonal(cfg)
    es = np.diag(pump.amplitudes * np.sin(pump.phases))
    ec = np.diag(pump.amplitudes * np.cos(pump.phases))
    return np.block([[-2 * es, -c + 2 * ec], [c + 2 * ec, 2 * es]])


def propagator_exact(cfg: ArrayConfig, pump: PumpProfile, z: float) -> GaussianState:
    """Exact propagator S(z) = expm(Q z) in the individual-mode basis.

    The coupled-mode equations have z-independent coefficients, so the
    full solution is a single matrix exponential with no ordering
    approximation at any gain.
    """
    if z < 0:
        raise ValueError(f"z must be nonnegative, got {z}")
    s = mat_exp(quad_generator(cfg, pump) * z)
    return GaussianState.from_propagator(z, s, "individual")


def coupling_matrix_L(
    cfg: ArrayConfig, pump: PumpProfile, modes: LinearSupermodes, z: float
) -> np.ndarray:
    """Pump-mediated supermode coupling L(z), complex symmetric.

    L_{kk'}(z) = 2i sum_j |eta_j| M_kj M_k'j exp(i(phi_j - (lambda_k +
    lambda_k') z)). The diagonal drives single-supermode squeezing, the
    off-diagonal two-supermode correlations.
    """
    _check_pump(cfg, pump)
    if modes.n != cfg.n:
        raise ValueError(f"supermode basis has {modes.n} modes, expected {cfg.n}")
    m, lam = modes.matrix, modes.eigenvalues
    coef = 2j * (m * pump.complex_amplitudes) @ m.T
    s = lam[:, None] + lam[None, :]
    return coef * np.exp(-1j * s * z)


def integrated_L(
    cfg: ArrayConfig, pump: PumpProfile, modes: LinearSupermodes, z: float
) -> np.ndarray:
    """Closed-form integral of coupling_matrix_L over [0, z].

    Each element integrates exp(-i s z') with s = lambda_k + lambda_k';
    elements with |s| below 1e-12 mm^-1 use the linear-in-z limit of the
    removable singularity.
    """
    _check_pump(cfg, pump)
    if modes.n != cfg.n:
        raise ValueError(f"supermode basis has {modes.n} modes, expected {cfg.n}")
    m, lam = modes.matrix, modes.eigenvalues
    coef = 2j * (m * pump.complex_amplitudes) @ m.T
    s = lam[:, None] + lam[None, :]
    small = np.abs(s) < DEGENERATE_MISMATCH
    s_safe = np.where(small, 1.0, s)
    kernel = np.where(small, z, (1.0 - np.exp(-1j * s_safe * z)) / (1j * s_safe))
    return coef * kernel


def _no_ordering_blocks(
    cfg: ArrayConfig, pump: PumpProfile, modes: LinearSupermodes, z: float
) -> tuple[np.ndarray, np.ndarray]:
    """Rotating-frame Bogoliubov blocks (E_B, F_B) of the no-ordering solution."""
    n = cfg.n
    lint = integrated_L(cfg, pump, modes, z)
    gen = np.zeros((2 * n, 2 * n), dtype=complex)
    gen[:n, n:] = lint
    gen[n:, :n] = lint.conj()
    p = mat_exp(gen)
    return p[:n, :n], p[:n, n:]


def propagator_no_ordering(cfg: ArrayConfig, pump: PumpProfile, z: float) -> GaussianState:
    """Propagator neglecting space ordering of the supermode coupling.

    Exponentiates the single integral of L(z) instead of the ordered
    product, which is exact whenever L commutes with itself along z (flat
    pump) and otherwise differs from the exact solution at third order in
    |eta| z. Returned in the linear-supermode basis with the bare
    propagation phases exp(i lambda_k z) restored, so it composes with
    ordinary basis changes.
    """
    if z < 0:
        raise ValueError(f"z must be nonnegative, got {z}")
    modes = linear_supermodes(cfg)
    eb, fb = _no_ordering_blocks(cfg, pump, modes, z)
    ph = np.exp(1j * modes.eigenvalues * z)
    s = bogoliubov_to_symplectic(ph[:, None] * eb, ph[:, None] * fb)
    return GaussianState.from_propagator(z, s, "linear_supermode")


def nonlinear_supermodes(
    cfg: ArrayConfig, pump: PumpProfile, z: float
) -> tuple[np.ndarray, np.ndarray]:
    """Decoupled squeezing basis of the no-ordering solution.

    Congruence-diagonalizes the integrated coupling matrix, returning the
    complex matrix Upsilon (rows = nonlinear supermodes over the linear
    supermodes) and the squeezing parameters r_m(z), descending. In this
    basis each mode is an independent single-mode squeezer: the
    rotating-frame blocks reconstruct as E = Ups^dag cosh(r) Ups and
    F = Ups^dag sinh(r) Ups^*.
    """
    modes = linear_supermodes(cfg)
    fac = takagi(integrated_L(cfg, pump, modes, z))
    return fac.unitary, fac.values


@dataclass(frozen=True)
class FlatPumpSolution:
    """Closed-form flat-pump solution, one 2x2 symplectic block per supermode.

    With an identical pump eta in every guide the supermode coupling is
    diagonal, and supermode k evolves under the competition of its
    propagation-constant offset lambda_k and the parametric gain 2|eta|,
    governed by rate_k = sqrt(lambda_k^2 - 4|eta|^2). Real rate: bounded
    oscillation with period pi/(2 rate). Imaginary rate: hyperbolic growth
    (the phase-matched k with lambda_k = 0 is a plain degenerate parametric
    amplifier with optimal variance exp(-4|eta|z)).
    """

    z: float
    pump: complex
    eigenvalues: np.ndarray
    rates: np.ndarray
    bogoliubov_e: np.ndarray
    bogoliubov_f: np.ndarray
    modes: LinearSupermodes = field(repr=False)

    @property
    def blocks(self) -> np.ndarray:
        """(n, 2, 2) real symplectic blocks acting on (x_k, y_k)."""
        e, f = self.bogoliubov_e, self.bogoliubov_f
        n = e.size
        out = np.empty((n, 2, 2))
        out[:, 0, 0] = (e + f).real
        out[:, 0, 1] = (f - e).imag
        out[:, 1, 0] = (e + f).imag
        out[:, 1, 1] = (e - f).real
        return out

    @property
    def oscillation_lengths(self) -> np.ndarray:
        """Squeezing oscillation period per supermode; inf when not oscillating."""
        out = np.full(self.rates.size, np.inf)
        real = (np.abs(self.rates.imag) < 1e-14) & (self.rates.real > 1e-14)
        out[real] = np.pi / (2.0 * self.rates[real].real)
        return out

    @property
    def state(self) -> GaussianState:
        s = bogoliubov_to_symplectic(np.diag(self.bogoliubov_e), np.diag(self.bogoliubov_f))
        return GaussianState.from_propagator(self.z, s, "linear_supermode")


def flat_pump_analytic(cfg: ArrayConfig, eta: complex, z: float) -> FlatPumpSolution:
    """Exact per-supermode solution for a flat pump eta (any gain regime)."""
    if z < 0:
        raise ValueError(f"z must be nonnegative, got {z}")
    modes = linear_supermodes(cfg)
    lam = modes.eigenvalues
    eta = complex(eta)
    rates = np.sqrt((lam**2 - 4 * abs(eta) ** 2).astype(complex))
    fz = rates * z
    # sin(F z)/F with the F -> 0 limit taken explicitly
    small = np.abs(fz) < 1e-8
    sinc = np.where(small, z * (1 - fz**2 / 6.0), np.sin(fz) / np.where(small, 1.0, rates))
    e = np.cos(fz) + sinc * (1j * lam)
    f = sinc * (2j * eta)
    # the solution is unitary-free so tiny imaginary residue is roundoff
    return FlatPumpSolution(
        z=float(z),
        pump=eta,
        eigenvalues=lam,
        rates=rates,
        bogoliubov_e=e,
        bogoliubov_f=f,
        modes=modes,
    )


def rk4_propagate(
    cfg: ArrayConfig, pump: PumpProfile, z: float, step: float = 1e-3
) -> GaussianState:
    """Fixed-step Runge-Kutta integration of dS/dz = Q S.

    Cross-validation path for propagator_exact; integrates whole steps of
    the given size plus one shorter remainder step when z is not on the
    step grid.
    """
    if z < 0:
        raise ValueError(f"z must be nonnegative, got {z}")
    q = quad_generator(cfg, pump)
    s = np.eye(2 * cfg.n)
    whole, rem = divmod(z, step)
    for _ in range(int(whole)):
        s = _rk4_step(q, s, step)
    if rem > 1e-15 * max(z, 1.0):
        s = _rk4_step(q, s, rem)
    return GaussianState.from_propagator(z, s, "individual")


def _rk4_step(q: np.ndarray, s: np.ndarray, h: float) -> np.ndarray:
    k1 = q @ s
    k2 = q @ (s + 0.5 * h * k1)
    k3 = q @ (s + 0.5 * h * k2)
    k4 = q @ (s + h * k3)
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagate_batch(
    generators: list[np.ndarray], z: np.ndarray, step: float = 1e-3
) -> list[np.ndarray]:
    """Integrate many dS/dz = Q S problems at once.

    Equivalent to running rk4_propagate per generator but vectorized over
    same-size stacks, which keeps large validation sweeps fast. Distances
    are snapped to the nearest whole number of steps; pass grid-aligned z
    for exact correspondence.
    """
    z = np.asarray(z, dtype=float)
    if len(generators) != z.size:
        raise ValueError("need one distance per generator")
    out: list[np.ndarray | None] = [None] * len(generators)
    sizes = sorted({g.shape[0] for g in generators})
    for size in sizes:
        idx = [i for i, g in enumerate(generators) if g.shape[0] == size]
        q = np.stack([generators[i] for i in idx])
        steps = np.rint(z[idx] / step).astype(int)
        s = np.broadcast_to(np.eye(size), q.shape).copy()
        order = np.argsort(steps, kind="stable")
        done = 0
        while done < len(idx) and steps[order[done]] == 0:
            out[idx[order[done]]] = np.eye(size)
            done += 1
        for t in range(1, int(steps.max()) + 1):
            s = _rk4_step(q, s, step)
            while done < len(idx) and steps[order[done]] == t:
                j = order[done]
                out[idx[j]] = s[j].copy()
                done += 1
    return out  # type: ignore[return-value]
