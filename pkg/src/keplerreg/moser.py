"""Moser regularization of the Kepler problem.

The Moser map is the composition of the geometric Fourier transform
(q, p) -> (p, -q) with the cotangent-lifted stereographic projection; it
identifies the H = -1/2 Kepler flow with the geodesic flow on S^n.  The
scale-invariant variant (the Moser fibration) projects the whole
negative-energy region onto the unit-covector bundle.  The chart
Hamiltonians tie the geodesic energy on the sphere to the Kepler
Hamiltonian through a level-set argument; they are exposed so the harness
can test that argument directly.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import (
    DEFAULT_TOL,
    DomainError,
    PhasePoint,
    PlaneCotangentPoint,
    SphereCotangentPoint,
    Tolerances,
    kepler_energy,
)
from .stereo import to_plane

__all__ = [
    "fourier",
    "fourier_inverse",
    "moser_map",
    "moser_map_inverse",
    "moser_fibration",
    "scale_phase",
    "scale_sphere",
    "to_reference_shell",
    "ChartHamiltonians",
    "chart_hamiltonians",
]


def fourier(point: PhasePoint) -> PlaneCotangentPoint:
    """Geometric Fourier transform: x = p, y = -q.

    A linear canonical transformation; ``fourier_inverse`` undoes it
    exactly.
    """
    return PlaneCotangentPoint(point.p, -point.q)


def fourier_inverse(pl: PlaneCotangentPoint) -> PhasePoint:
    """Inverse of the geometric Fourier transform: q = -y, p = x."""
    return PhasePoint(-pl.y, pl.x)


def moser_map(point: PhasePoint) -> SphereCotangentPoint:
    """The Moser regularization map on all of T*R^n.

    u = (2p/(p^2+1), 2p^2/(p^2+1) - 1),
    v = (-(p^2+1) q/2 + (q.p) p, -q.p),

    equal to the stereographic lift of the geometric Fourier transform.
    """
    q, p = point.q, point.p
    p2 = float(p @ p)
    qp = float(q @ p)
    denom = p2 + 1.0
    u = np.empty(point.n + 1)
    u[:-1] = 2.0 * p / denom
    u[-1] = 2.0 * p2 / denom - 1.0
    v = np.empty(point.n + 1)
    v[:-1] = -0.5 * denom * q + qp * p
    v[-1] = -qp
    return SphereCotangentPoint(u, v)


def moser_map_inverse(sp: SphereCotangentPoint, tol: Tolerances = DEFAULT_TOL) -> PhasePoint:
    """Invert the Moser map away from the polar fiber."""
    return fourier_inverse(to_plane(sp, tol))


def moser_fibration(point: PhasePoint, tol: Tolerances = DEFAULT_TOL) -> SphereCotangentPoint:
    """Scale-invariant projection of the bound region onto unit covectors.

    With r = |q| and w = sqrt(-2H):

    u = (w r p, r p^2 - 1),  v = (-q/r + (q.p) p, -w (q.p)).

    The output has |v| = 1 and base point off the pole, and is invariant
    under the scale action ``scale_phase``.  On the H = -1/2 shell it
    agrees with ``moser_map``.

    Near H = 0 the map is ill-conditioned (the sqrt(-2H) factor amplifies
    rounding error); the domain is still all of the bound region, so
    conditioning is the caller's concern.
    """
    r = point.radius
    if r == 0.0:
        raise DomainError("q must be nonzero (collision point)")
    energy = kepler_energy(point)
    if energy >= 0.0:
        raise DomainError(f"H must be negative for the fibration, got H = {energy:.6g}")
    w = math.sqrt(-2.0 * energy)
    q, p = point.q, point.p
    p2 = float(p @ p)
    qp = float(q @ p)
    u = np.empty(point.n + 1)
    u[:-1] = w * r * p
    u[-1] = r * p2 - 1.0
    v = np.empty(point.n + 1)
    v[:-1] = -q / r + qp * p
    v[-1] = -w * qp
    return SphereCotangentPoint(u, v, constraint_tol=tol.constraint_tol)


def scale_phase(point: PhasePoint, rho: float) -> PhasePoint:
    """Scale action on phase space: q -> rho^2 q, p -> p/rho.

    The energy scales as H -> H/rho^2 and time as t -> rho^3 t.
    """
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    return PhasePoint(rho * rho * point.q, point.p / rho)


def scale_sphere(sp: SphereCotangentPoint, rho: float) -> SphereCotangentPoint:
    """Scale action on the sphere side: u -> u, v -> rho v."""
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    return SphereCotangentPoint(sp.u, rho * sp.v, at_puncture=sp.at_puncture)


def to_reference_shell(point: PhasePoint) -> PhasePoint:
    """Rescale a bound point onto the H = -1/2 shell.

    Applies ``scale_phase`` with rho = sqrt(-2H), the unique scale factor
    landing on the reference shell.
    """
    energy = kepler_energy(point)
    if energy >= 0.0:
        raise DomainError(f"H must be negative, got H = {energy:.6g}")
    return scale_phase(point, math.sqrt(-2.0 * energy))


class ChartHamiltonians(NamedTuple):
    """Values of the three chart Hamiltonians at a plane point.

    geodesic     = (x^2+1)^2 y^2 / 8   (geodesic energy v^2/2 in the chart)
    speed_defect = sqrt(2 geodesic) - 1 = (x^2+1)|y|/2 - 1  (|v| - 1)
    kepler_form  = speed_defect/|y| - 1/2 = x^2/2 - 1/|y|
    """

    geodesic: float
    speed_defect: float
    kepler_form: float


def chart_hamiltonians(pl: PlaneCotangentPoint) -> ChartHamiltonians:
    """Evaluate the three related chart Hamiltonians at (x, y).

    All three have the same trajectories on the common level set
    geodesic = 1/2 (equivalently speed_defect = 0, kepler_form = -1/2);
    the kepler_form pulls back to the Kepler Hamiltonian under the
    geometric Fourier transform.  Requires |y| > 0 for the kepler_form.
    """
    x2 = float(pl.x @ pl.x)
    ynorm = float(np.linalg.norm(pl.y))
    if ynorm == 0.0:
        raise DomainError("|y| must be nonzero for the chart Kepler Hamiltonian")
    geodesic = (x2 + 1.0) ** 2 * ynorm * ynorm / 8.0
    speed_defect = 0.5 * (x2 + 1.0) * ynorm - 1.0
    kepler_form = 0.5 * x2 - 1.0 / ynorm
    return ChartHamiltonians(geodesic, speed_defect, kepler_form)
