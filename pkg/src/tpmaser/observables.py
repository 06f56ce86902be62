"""Scalar and distributional diagnostics of the field state."""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import GridOutsideTruncation, UndefinedForVacuum

# Eigenvalues below this contribute nothing to the von Neumann sum; avoids
# log of the numerically negative dust left by finite-precision eigensolves.
EIGENVALUE_FLOOR = 1e-14

# Mean photon number below which g2(0) has no meaningful normalization.
VACUUM_MEAN_TOL = 1e-9


@dataclass(frozen=True)
class QGridSpec:
    """Rectangular phase-space grid for Husimi evaluation, beta = x + iy."""

    x_min: float = -5.5
    x_max: float = 5.5
    y_min: float = -5.5
    y_max: float = 5.5
    nx: int = 121
    ny: int = 121

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must have at least one point per axis")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("grid bounds out of order")

    def axes(self):
        return (np.linspace(self.x_min, self.x_max, self.nx),
                np.linspace(self.y_min, self.y_max, self.ny))


@dataclass(frozen=True, eq=False)
class QGrid:
    """Husimi function sampled on a grid; values[i, j] = Q(x_i, y_j)."""

    spec: QGridSpec
    values: np.ndarray = field(repr=False)

    def riemann_integral(self):
        x, y = self.spec.axes()
        dx = x[1] - x[0] if len(x) > 1 else 1.0
        dy = y[1] - y[0] if len(y) > 1 else 1.0
        return float(np.sum(self.values) * dx * dy)


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    """Diagonal of the field state in the number basis.

    Sums to the trace of the source state, i.e. 1 except for the initial
    truncated thermal state, which may be short by up to its cut tail.
    """

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if np.min(p) < -1e-12:
            raise ValueError(f"negative probability {np.min(p):.3e}")
        total = p.sum()
        if not (1 - 2e-4 <= total <= 1 + 1e-8):
            raise ValueError(f"distribution sums to {total!r}, not ~1")
        object.__setattr__(self, "p", p)


def linear_entropy(rho):
    """Mixedness 1 - Tr rho^2 = 1 - sum |rho_{nn'}|^2, clamped to [0, 1]."""
    purity = float(np.sum(np.abs(rho.matrix) ** 2))
    return min(1.0, max(0.0, 1.0 - purity))


def von_neumann_entropy(rho):
    """-sum lam ln lam over eigenvalues above EIGENVALUE_FLOOR."""
    lam = np.linalg.eigvalsh(0.5 * (rho.matrix + rho.matrix.conj().T))
    lam = lam[lam > EIGENVALUE_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def mean_photon(rho):
    d = rho.diagonal()
    return float(np.sum(np.arange(len(d)) * d))


def g2_zero(rho):
    """Second-order coherence <a^+a^+aa>/<a^+a>^2 at zero delay.

    2 for thermal, 1 for coherent light; raises for (near-)vacuum states
    where the normalization vanishes.
    """
    d = rho.diagonal()
    n = np.arange(len(d))
    mean = float(np.sum(n * d))
    if mean <= VACUUM_MEAN_TOL:
        raise UndefinedForVacuum(f"mean photon number {mean:.3e} too small for g2(0)")
    return float(np.sum(n * (n - 1) * d)) / mean**2


def photon_distribution(rho):
    """Number-basis diagonal with sub-1e-12 negative rounding dust clamped."""
    p = rho.diagonal()
    p[(p < 0) & (p > -1e-12)] = 0.0
    return PhotonDistribution(p=p)


def _coherent_rows(beta, dim):
    """Rows <n|beta> for an array of amplitudes beta, evaluated in log space."""
    n = np.arange(dim)
    lg = gammaln(n + 1.0)
    out = np.zeros((len(beta), dim), dtype=complex)
    nz = np.abs(beta) > 0
    mag = np.abs(beta[nz])[:, None]
    logcoef = -0.5 * mag**2 + n[None, :] * np.log(mag) - 0.5 * lg[None, :]
    phase = (beta[nz, None] / mag) ** n[None, :]
    out[nz] = np.exp(logcoef) * phase
    out[~nz, 0] = 1.0
    return out


def q_function(rho, spec):
    """Husimi function Q(x, y) = <beta|rho|beta>/pi on the given grid.

    The grid must stay within the truncated basis: each axis bound squared
    must not exceed cutoff/2, otherwise the probe states reach the region
    where the retained basis cannot follow them.
    """
    d = rho.space.dim
    worst = max(abs(spec.x_min), abs(spec.x_max), abs(spec.y_min), abs(spec.y_max))
    if worst**2 > d / 2:
        raise GridOutsideTruncation(
            f"axis amplitude {worst:.2f} has |beta|^2 = {worst**2:.1f} > cutoff/2 = {d / 2:.1f}"
        )
    x, y = spec.axes()
    xx, yy = np.meshgrid(x, y, indexing="ij")
    beta = (xx + 1j * yy).ravel()
    rows = _coherent_rows(beta, d)
    q = np.einsum("pn,nm,pm->p", rows.conj(), rho.matrix, rows).real / np.pi
    q[(q < 0) & (q > -1e-12)] = 0.0
    return QGrid(spec=spec, values=q.reshape(spec.nx, spec.ny))
