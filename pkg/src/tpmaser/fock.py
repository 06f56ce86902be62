"""Truncated Fock-space primitives.

Everything downstream works in the number basis |0>, ..., |D-1|.  This module
builds the basic objects on that basis: thermal density operators, associated
Laguerre polynomials, and the displacement operator in its exact
matrix-element form (displaced number states), together with a
matrix-exponential oracle used to cross-check it.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import CutoffTooSmall

# Largest admissible weight of a thermal tail cut off by the truncation.
THERMAL_TAIL_TOL = 1e-4


@dataclass(frozen=True)
class FockSpace:
    """Number basis truncated to levels |0> ... |cutoff-1>."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 4:
            raise ValueError("cutoff must be >= 4 (two-photon blocks need |n>,|n+2>)")

    @property
    def dim(self):
        return self.cutoff


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Field density matrix on a truncated Fock space.

    The matrix is stored as a dense complex array.  Construction only checks
    shape; the physical invariants (Hermiticity, positivity, trace) are cheap
    to violate transiently during arithmetic, so they are exposed as
    diagnostics and asserted in tests rather than on every instantiation.
    """

    space: FockSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not match cutoff {self.space.dim}")
        object.__setattr__(self, "matrix", m)

    def trace(self):
        return float(np.trace(self.matrix).real)

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def diagonal(self):
        return self.matrix.diagonal().real.copy()


@dataclass(frozen=True, eq=False)
class DisplacementMatrix:
    """Glauber displacement operator restricted to the truncated basis.

    Entry (j, n) is the exact infinite-dimensional matrix element
    <j|D(eps)|n>, i.e. the Fock expansion of the displaced number state
    D(eps)|n>.  Restriction to a finite block makes the matrix slightly
    non-unitary near the cutoff; column norms quantify that and are reported,
    not hidden.
    """

    amplitude: complex
    space: FockSpace
    matrix: np.ndarray = field(repr=False)

    def column_norms(self):
        return np.linalg.norm(self.matrix, axis=0)

    def column_norm_defects(self):
        """|1 - ||column n||| for each n; small where truncation is harmless."""
        return np.abs(1.0 - self.column_norms())

    def dagger(self):
        return self.matrix.conj().T


def laguerre_assoc(n, k, x):
    """Associated Laguerre polynomial L_n^k(x) by upward recurrence in n.

    The three-term recurrence is stable for the arguments used here and is
    valid for negative integer upper index as long as k >= -n, which is
    exactly the range the displaced-state matrix elements need.
    """
    if n < 0:
        raise ValueError("degree n must be >= 0")
    if k < -n:
        raise ValueError("upper index must satisfy k >= -n")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + k - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + k + 1 - x) * cur - (m + k) * prev) / (m + 1)
    return cur


def _laguerre_ladder(k, x, count):
    """L_n^k(x) for n = 0 .. count-1 at fixed k, one recurrence sweep."""
    out = np.empty(count)
    out[0] = 1.0
    if count == 1:
        return out
    out[1] = 1.0 + k - x
    for m in range(1, count - 1):
        out[m + 1] = ((2 * m + k + 1 - x) * out[m] - (m + k) * out[m - 1]) / (m + 1)
    return out


def thermal_state(n_bar, space):
    """Thermal (geometric) field state with mean photon number n_bar.

    The diagonal is the exact geometric distribution
    p_n = n_bar^n / (n_bar+1)^(n+1); the weight beyond the cutoff,
    (n_bar/(n_bar+1))^D, must stay below THERMAL_TAIL_TOL or the cutoff is
    rejected.  The retained diagonal is kept exact (trace 1 - tail) rather
    than rescaled: rescaling shifts the purity by ~2*tail which is larger
    than the tolerances the entropy diagnostics are held to, while the
    missing tail itself only perturbs them at O(tail^2).  The channel
    renormalizes the trace on every atom passage anyway.
    """
    if n_bar < 0:
        raise ValueError("n_bar must be >= 0")
    d = space.dim
    if n_bar == 0:
        m = np.zeros((d, d), dtype=complex)
        m[0, 0] = 1.0
        return DensityOperator(space, m)
    q = n_bar / (n_bar + 1.0)
    tail = q**d
    if tail > THERMAL_TAIL_TOL:
        raise CutoffTooSmall(
            f"thermal tail {tail:.3e} at cutoff {d} exceeds {THERMAL_TAIL_TOL:.1e} "
            f"(n_bar={n_bar})"
        )
    p = np.exp(np.arange(d) * np.log(q)) / (n_bar + 1.0)
    return DensityOperator(space, np.diag(p).astype(complex))


def _displacement_dense(eps, d):
    if eps == 0:
        return np.eye(d, dtype=complex)
    x = abs(eps) ** 2
    phase = eps / abs(eps)
    lg = gammaln(np.arange(1, d + 1))  # lgamma(n+1) for n = 0..d-1
    out = np.zeros((d, d), dtype=complex)
    logmag_eps = np.log(abs(eps))
    for k in range(d):
        n = np.arange(d - k)
        lag = _laguerre_ladder(k, x, d - k)
        mag = np.exp(-x / 2 + 0.5 * (lg[n] - lg[n + k]) + k * logmag_eps)
        # lower triangle: <n+k|D(eps)|n>
        out[n + k, n] = mag * phase**k * lag
        if k > 0:
            # upper triangle from <j|D(eps)|j+k> = conj(<j+k|D(-eps)|j>)
            out[n, n + k] = mag * (-np.conj(phase)) ** k * lag
    return out


@lru_cache(maxsize=16)
def _displacement_cached(eps, cutoff):
    m = _displacement_dense(eps, cutoff)
    m.flags.writeable = False
    return m


def displacement_matrix(eps, space):
    """Displacement operator D(eps) = exp(eps a^+ - eps* a), exact elements.

    Uses the closed form e_{j,n} = exp(-|eps|^2/2) eps^(j-n) sqrt(n!/j!)
    L_n^(j-n)(|eps|^2) with factorial ratios evaluated through log-gamma
    differences; the j < n entries follow from D(eps)^+ = D(-eps).
    """
    eps = complex(eps)
    return DisplacementMatrix(eps, space, _displacement_cached(eps, space.dim))


def annihilation_matrix(space):
    d = space.dim
    return np.diag(np.sqrt(np.arange(1.0, d)), 1).astype(complex)


def displacement_exponential_oracle(eps, space):
    """Independent displacement via expm of the truncated generator.

    Exponentiates eps a^+ - eps* a on the truncated ladder; exactly unitary by
    construction (anti-Hermitian generator), so it cross-checks the closed
    form away from the cutoff where the two constructions must agree.
    """
    a = annihilation_matrix(space)
    gen = eps * a.conj().T - np.conj(eps) * a
    return expm(gen)
