"""Conserved momenta and the hidden rotational symmetry of the Kepler flow.

The visible so(n) angular momenta extend to so(n+1) on the bound region
once the Lenz vector (scaled by 1/sqrt(-2H)) is adjoined.  On the sphere
side the same momenta are the plain angular momenta of R^(n+1), and the
Ligon-Schaaf map intertwines the two families entrywise.  A numerical
Poisson-bracket engine evaluates the algebra relations by central
differences so every identity can be checked without symbolic machinery.

Scalar fields for the bracket engine are callables f(q, p) -> value that
accept (..., n)-shaped arrays and operate along the last axis, so the same
field works on single points and on batches.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import (
    DomainError,
    MomentumMatrix,
    PhasePoint,
    SphereCotangentPoint,
    kepler_energy,
)

__all__ = [
    "angular_momentum",
    "lenz_vector",
    "extended_momentum",
    "sphere_momentum",
    "momentum_norm_squared",
    "poisson_bracket",
    "hamiltonian_field",
    "angular_momentum_field",
    "lenz_field",
    "extended_momentum_field",
]

ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]


def angular_momentum(point: PhasePoint) -> MomentumMatrix:
    """Angular momentum q ^ p with entries L_ij = q_i p_j - q_j p_i."""
    return MomentumMatrix.wedge(point.q, point.p)


def lenz_vector(point: PhasePoint) -> np.ndarray:
    """The Lenz vector K = (p^2 - 1/|q|) q - (q.p) p.

    Conserved along the Kepler flow; |K| is the orbit eccentricity and K
    points along the major axis.
    """
    r = point.radius
    if r == 0.0:
        raise DomainError("q must be nonzero (Lenz vector undefined at collision)")
    q, p = point.q, point.p
    return (float(p @ p) - 1.0 / r) * q - float(q @ p) * p


def extended_momentum(point: PhasePoint) -> MomentumMatrix:
    """so(n+1) momentum matrix on the bound region.

    The upper-left n x n block is the angular momentum and the extra
    column is L_i(n+1) = K_i / sqrt(-2H).
    """
    energy = kepler_energy(point)
    if energy >= 0.0:
        raise DomainError(f"H must be negative, got H = {energy:.6g}")
    n = point.n
    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = angular_momentum(point).entries
    full[:n, n] = lenz_vector(point) / math.sqrt(-2.0 * energy)
    return MomentumMatrix(full)


def sphere_momentum(sp: SphereCotangentPoint) -> MomentumMatrix:
    """Angular momentum u ^ v of a sphere covector, an (n+1) x (n+1) matrix."""
    return MomentumMatrix.wedge(sp.u, sp.v)


def momentum_norm_squared(obj: PhasePoint | SphereCotangentPoint) -> float:
    """Squared norm of the momentum map, summed over independent entries.

    On the bound region this is L^2 + K^2/(-2H) and equals 1/(-2H); on the
    sphere side it equals 1/(-2 H_delaunay).
    """
    if isinstance(obj, PhasePoint):
        return extended_momentum(obj).norm_squared()
    if isinstance(obj, SphereCotangentPoint):
        if not obj.off_zero_section():
            raise DomainError("|v| must be nonzero")
        return sphere_momentum(obj).norm_squared()
    raise TypeError(f"expected PhasePoint or SphereCotangentPoint, got {type(obj)!r}")


def hamiltonian_field() -> ScalarField:
    """The Kepler Hamiltonian as a bracket-engine scalar field."""

    def field(q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return 0.5 * np.sum(p * p, axis=-1) - 1.0 / np.linalg.norm(q, axis=-1)

    return field


def angular_momentum_field(i: int, j: int) -> ScalarField:
    """The component L_ij = q_i p_j - q_j p_i as a scalar field."""

    def field(q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return q[..., i] * p[..., j] - q[..., j] * p[..., i]

    return field


def lenz_field(i: int) -> ScalarField:
    """The Lenz component K_i as a scalar field."""

    def field(q: np.ndarray, p: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(q, axis=-1)
        p2 = np.sum(p * p, axis=-1)
        qp = np.sum(q * p, axis=-1)
        return (p2 - 1.0 / r) * q[..., i] - qp * p[..., i]

    return field


def extended_momentum_field(i: int, j: int, n: int) -> ScalarField:
    """The so(n+1) component L_ij where an index equal to n means the
    scaled Lenz component K_i / sqrt(-2H)."""
    if i == j:
        return lambda q, p: np.zeros(np.shape(q)[:-1])
    if i < n and j < n:
        return angular_momentum_field(i, j)

    def scaled_lenz(q: np.ndarray, p: np.ndarray, k: int) -> np.ndarray:
        r = np.linalg.norm(q, axis=-1)
        p2 = np.sum(p * p, axis=-1)
        qp = np.sum(q * p, axis=-1)
        lenz = (p2 - 1.0 / r) * q[..., k] - qp * p[..., k]
        minus_2h = 2.0 / r - p2
        return lenz / np.sqrt(minus_2h)

    if j == n:
        return lambda q, p: scaled_lenz(q, p, i)
    if i == n:
        return lambda q, p: -scaled_lenz(q, p, j)
    raise ValueError(f"indices ({i}, {j}) out of range for so({n + 1})")


def _bracket_batch(
    f: ScalarField,
    g: ScalarField,
    qs: np.ndarray,
    ps: np.ndarray,
    h: float,
    *,
    richardson: bool = False,
) -> np.ndarray:
    """Canonical bracket {f, g} at a batch of points, by central differences."""

    def estimate(step: float) -> np.ndarray:
        n = qs.shape[-1]
        total = np.zeros(qs.shape[:-1])
        for k in range(n):
            dq = np.zeros(n)
            dq[k] = step
            df_dq = (f(qs + dq, ps) - f(qs - dq, ps)) / (2.0 * step)
            dg_dq = (g(qs + dq, ps) - g(qs - dq, ps)) / (2.0 * step)
            df_dp = (f(qs, ps + dq) - f(qs, ps - dq)) / (2.0 * step)
            dg_dp = (g(qs, ps + dq) - g(qs, ps - dq)) / (2.0 * step)
            total = total + df_dq * dg_dp - df_dp * dg_dq
        return total

    coarse = estimate(h)
    if not richardson:
        return coarse
    fine = estimate(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def poisson_bracket(
    f: ScalarField,
    g: ScalarField,
    point: PhasePoint,
    h: float,
    *,
    richardson: bool = False,
    domain: Callable[[np.ndarray, np.ndarray], bool] | None = None,
) -> float:
    """Central-difference estimate of the canonical bracket {f, g}.

    {f, g} = sum_k df/dq_k dg/dp_k - df/dp_k dg/dq_k, error O(h^2) for
    smooth fields, tightened to O(h^4) by two-step Richardson
    extrapolation when ``richardson`` is set.

    When a ``domain`` predicate is supplied, every stencil point is checked
    first and a DomainError identifies the offending one.
    """
    if not h > 0.0:
        raise ValueError("h must be positive")
    if domain is not None:
        n = point.n
        steps = [h, 0.5 * h] if richardson else [h]
        for step in steps:
            for k in range(n):
                dq = np.zeros(n)
                dq[k] = step
                for q_s, p_s in (
                    (point.q + dq, point.p),
                    (point.q - dq, point.p),
                    (point.q, point.p + dq),
                    (point.q, point.p - dq),
                ):
                    if not domain(q_s, p_s):
                        raise DomainError(
                            f"stencil point q={q_s}, p={p_s} leaves the field domain"
                        )
    return float(_bracket_batch(f, g, point.q, point.p, h, richardson=richardson))
