"""Domain types for the regularized Kepler problem.

Units are normalized so that GM = 1 throughout: the Kepler Hamiltonian is
H = p^2/2 - 1/|q|.  All types are immutable value objects and every
operation in this package is a pure function of its inputs, so everything
here is safe to use from concurrent callers.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

__all__ = [
    "DomainError",
    "Tolerances",
    "DEFAULT_TOL",
    "PhasePoint",
    "SphereCotangentPoint",
    "PlaneCotangentPoint",
    "MomentumMatrix",
    "kepler_energy",
    "sample_bound_states",
]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


def _frozen_vector(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DomainError(f"{name} must be a one-dimensional real vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must have finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Tolerances:
    """Numerical knobs shared across the library.

    constraint_tol bounds how far sphere points may sit off their
    constraints (and how close to the projection pole a point may come),
    fd_step is the central-difference step for derivative checks, root_tol
    terminates the rotation-angle root finder, and ode_tol controls the
    reference ODE integrations used as oracles.
    """

    constraint_tol: float = 1e-10
    fd_step: float = 1e-6
    root_tol: float = 1e-14
    ode_tol: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("constraint_tol", "fd_step", "root_tol", "ode_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point (q, p) of Kepler phase space T*R^n.

    q is the position and p the momentum, both length-n vectors in units
    with GM = 1.  The dimension n is a runtime property of the vectors.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        q = _frozen_vector(self.q, "q")
        p = _frozen_vector(self.p, "p")
        if q.shape != p.shape:
            raise DomainError("q and p must have the same length")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def radius(self) -> float:
        """|q|, the distance from the collision point."""
        return float(np.linalg.norm(self.q))

    def is_bound(self) -> bool:
        """True off the collision set with negative energy (bound motion)."""
        return self.radius > 0.0 and kepler_energy(self) < 0.0

    def on_reference_shell(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """True on the H = -1/2 energy shell (within constraint_tol).

        This is the shell on which the Moser map conjugates the Kepler flow
        to unit-speed great-circle motion.
        """
        if self.radius == 0.0:
            return False
        return abs(kepler_energy(self) + 0.5) <= tol.constraint_tol


@dataclass(frozen=True, eq=False)
class SphereCotangentPoint:
    """A covector (u, v) on the unit sphere S^n, embedded in R^(n+1) x R^(n+1).

    Construction enforces the constraints |u| = 1 and u.v = 0 to within
    constraint_tol and rejects violations.  ``at_puncture`` marks points
    produced on (or within tolerance of) the polar fiber, where the
    inverse regularization maps are undefined; such points are still valid
    states of the completed flow.
    """

    u: np.ndarray
    v: np.ndarray
    at_puncture: bool = False
    constraint_tol: InitVar[float] = DEFAULT_TOL.constraint_tol

    def __post_init__(self, constraint_tol: float) -> None:
        u = _frozen_vector(self.u, "u")
        v = _frozen_vector(self.v, "v")
        if u.shape != v.shape:
            raise DomainError("u and v must have the same length")
        if u.size < 2:
            raise DomainError("sphere points need at least two coordinates")
        unit_defect = abs(float(u @ u) - 1.0)
        if unit_defect > constraint_tol:
            raise DomainError(
                f"|u.u - 1| = {unit_defect:.3e} exceeds constraint_tol; "
                "u must lie on the unit sphere"
            )
        ortho_defect = abs(float(u @ v))
        if ortho_defect > constraint_tol:
            raise DomainError(
                f"|u.v| = {ortho_defect:.3e} exceeds constraint_tol; "
                "v must be tangent at u"
            )
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        """Dimension of the underlying sphere S^n."""
        return self.u.size - 1

    @property
    def covector_norm(self) -> float:
        return float(np.linalg.norm(self.v))

    @property
    def pole_gap(self) -> float:
        """1 - u_(n+1), the gap to the projection pole (0 at the pole)."""
        return 1.0 - float(self.u[-1])

    def off_zero_section(self) -> bool:
        """True when v != 0 (membership in the punctured bundle)."""
        return self.covector_norm > 0.0

    def off_pole(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """True when u is farther than constraint_tol from the pole."""
        return self.pole_gap >= tol.constraint_tol

    def is_regular(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """True off both the zero section and the polar fiber.

        This is the domain on which the inverse regularization maps exist.
        """
        return self.off_zero_section() and self.off_pole(tol)

    def on_unit_shell(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """True off the pole with |v| = 1 within constraint_tol."""
        return self.off_pole(tol) and abs(self.covector_norm - 1.0) <= tol.constraint_tol


@dataclass(frozen=True, eq=False)
class PlaneCotangentPoint:
    """A point (x, y) of T*R^n, the stereographic chart target."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = _frozen_vector(self.x, "x")
        y = _frozen_vector(self.y, "y")
        if x.shape != y.shape:
            raise DomainError("x and y must have the same length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    def y_nonzero(self) -> bool:
        """True when |y| > 0, as required by the chart Kepler Hamiltonian."""
        return float(np.linalg.norm(self.y)) > 0.0


@dataclass(frozen=True, eq=False)
class MomentumMatrix:
    """Antisymmetric matrix of angular-momentum components.

    Only the strict upper triangle is stored; the lower triangle is the
    reflected negative, so entries[i, j] == -entries[j, i] holds exactly by
    construction.  The strict lower triangle of the input is ignored.
    """

    upper: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.upper, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError("momentum matrix must be square")
        if not np.all(np.isfinite(arr)):
            raise DomainError("momentum matrix must have finite entries")
        arr = np.triu(arr, 1)
        arr.setflags(write=False)
        object.__setattr__(self, "upper", arr)

    @classmethod
    def wedge(cls, a: np.ndarray, b: np.ndarray) -> "MomentumMatrix":
        """The wedge a ^ b with entries a_i b_j - a_j b_i."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(np.outer(a, b) - np.outer(b, a))

    @property
    def dim(self) -> int:
        return self.upper.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """The full antisymmetric matrix (reflected on read)."""
        return self.upper - self.upper.T

    def entry(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i < j:
            return float(self.upper[i, j])
        return -float(self.upper[j, i])

    def norm_squared(self) -> float:
        """Sum of squares over the independent (i < j) entries."""
        return float(np.sum(self.upper * self.upper))


def kepler_energy(point: PhasePoint) -> float:
    """The Kepler Hamiltonian H = p.p/2 - 1/|q| (GM = 1).

    Raises DomainError at the collision point q = 0, where the energy is
    undefined.
    """
    r = point.radius
    if r == 0.0:
        raise DomainError("q must be nonzero (energy undefined at collision)")
    return float(0.5 * (point.p @ point.p) - 1.0 / r)


_Q_HALF_WIDTH = 2.0
_P_HALF_WIDTH = 1.5
_MIN_RADIUS = 0.1
_MAX_ENERGY = -0.05


def sample_bound_states(
    n: int,
    count: int,
    seed: int,
    *,
    pole_gap: float = 0.0,
    max_eccentricity: float | None = None,
    min_energy: float | None = None,
    max_energy: float = _MAX_ENERGY,
) -> list[PhasePoint]:
    """Seed-reproducible rejection sample of bound phase points.

    Positions are drawn uniformly from [-2, 2]^n and momenta from
    [-1.5, 1.5]^n, keeping points with |q| >= 0.1 and H <= -0.05 so that
    downstream finite differences stay inside the domain.  Identical
    arguments always produce identical output.

    Optional keywords tighten the sample for callers whose numerical
    methods degrade near singular sets: ``pole_gap`` keeps the base point
    of the scale-invariant sphere projection at least that far from the
    projection pole, ``max_eccentricity`` caps |K| (the orbit
    eccentricity), and ``min_energy``/``max_energy`` bound H.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    if max_energy > _MAX_ENERGY:
        raise ValueError(f"max_energy must be <= {_MAX_ENERGY}")
    rng = np.random.default_rng(seed)
    accepted_q: list[np.ndarray] = []
    accepted_p: list[np.ndarray] = []
    total = 0
    max_draws = 20_000 * count + 200_000
    batch = max(4 * count, 512)
    while len(accepted_q) < count:
        qs = rng.uniform(-_Q_HALF_WIDTH, _Q_HALF_WIDTH, size=(batch, n))
        ps = rng.uniform(-_P_HALF_WIDTH, _P_HALF_WIDTH, size=(batch, n))
        total += batch
        r = np.linalg.norm(qs, axis=1)
        ok = r >= _MIN_RADIUS
        energy = np.full(batch, np.inf)
        energy[ok] = 0.5 * np.sum(ps[ok] ** 2, axis=1) - 1.0 / r[ok]
        ok &= energy <= max_energy
        if min_energy is not None:
            ok &= energy >= min_energy
        if pole_gap > 0.0:
            # Base point of the scale-invariant sphere projection has last
            # coordinate |q| p^2 - 1; squared distance to the pole is
            # 2 (2 - |q| p^2).
            gap = 2.0 - r * np.sum(ps**2, axis=1)
            ok &= 2.0 * gap >= pole_gap**2
        if max_eccentricity is not None:
            p2 = np.sum(ps**2, axis=1)
            qdotp = np.sum(qs * ps, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                lenz = (p2 - 1.0 / r)[:, None] * qs - qdotp[:, None] * ps
            ecc = np.linalg.norm(lenz, axis=1)
            ok &= ecc <= max_eccentricity
        for idx in np.nonzero(ok)[0]:
            accepted_q.append(qs[idx])
            accepted_p.append(ps[idx])
            if len(accepted_q) == count:
                break
        if len(accepted_q) < count and total >= max_draws:
            raise RuntimeError(
                f"rejection sampling failed to find {count} points after "
                f"{total} draws; the requested constraints are too tight"
            )
    return [PhasePoint(q, p) for q, p in zip(accepted_q[:count], accepted_p[:count])]
