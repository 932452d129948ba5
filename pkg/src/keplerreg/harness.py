"""Verification harness.

Reusable finite-difference machinery (Jacobians, symplectic-defect
measurement) plus the named property suites that exercise the library's
invariants over seeded samples.  Every suite is deterministic in
(name, n, samples, seed, tolerances) and reports the worst defect it saw.

Tolerances are stratified by error source: identities built from exact
closed-form compositions use 1e-12, checks that pass through central
differences use the complete first-derivative error model
100 h^2 + 5 eps / h (truncation plus the evaluation-roundoff floor; the
floor dominates at h = 1e-6 where it sits near 1.1e-9), and checks that
pass through ODE integration use 1e-6.  Sampling avoids near-singular
regions (|q| >= 0.1, H <= -0.05, base points away from the projection
pole); the invariants hold analytically everywhere, but finite differences
and fixed-step integration degrade near the singular sets, whose behavior
is covered by targeted unit tests instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Callable

import numpy as np

from .core import (
    DEFAULT_TOL,
    DomainError,
    PhasePoint,
    PlaneCotangentPoint,
    SphereCotangentPoint,
    Tolerances,
    kepler_energy,
    sample_bound_states,
)
from .dynamics import _leapfrog_batch, delaunay_flow
from .ligonschaaf import PunctureError, angle_equation, ls_inverse, ls_map
from .moser import chart_hamiltonians, moser_fibration, moser_map, scale_phase
from .stereo import to_plane, to_sphere
from .symmetry import (
    _bracket_batch,
    angular_momentum_field,
    extended_momentum,
    extended_momentum_field,
    hamiltonian_field,
    lenz_field,
    momentum_norm_squared,
    sphere_momentum,
)

__all__ = [
    "UnknownSuiteError",
    "Failure",
    "SuiteReport",
    "jacobian",
    "fd_tolerance",
    "standard_form",
    "symplectic_defect",
    "flat_fourier",
    "flat_to_sphere",
    "flat_moser_map",
    "flat_ls_map",
    "SUITE_NAMES",
    "suite_registry",
    "run_suite",
]


class UnknownSuiteError(ValueError):
    """The requested suite name is not in the registry."""


# ---------------------------------------------------------------------------
# Finite-difference machinery


def jacobian(fn: Callable[[np.ndarray], np.ndarray], point, h: float) -> np.ndarray:
    """Central-difference Jacobian of fn at point, error O(h^2).

    The divisor is the actual span between the two stencil points rather
    than the nominal 2h, which removes the step-representation part of the
    roundoff error.  Domain errors raised by the map are re-raised with
    the offending stencil point identified.
    """
    if not h > 0.0:
        raise ValueError("h must be positive")
    base = np.asarray(point, dtype=float)
    columns = []
    for k in range(base.size):
        z_plus = base.copy()
        z_plus[k] = base[k] + h
        z_minus = base.copy()
        z_minus[k] = base[k] - h
        span = z_plus[k] - z_minus[k]
        try:
            f_plus = np.asarray(fn(z_plus), dtype=float)
            f_minus = np.asarray(fn(z_minus), dtype=float)
        except DomainError as exc:
            raise DomainError(
                f"map domain error at stencil point for coordinate {k} "
                f"around {base!r}: {exc}"
            ) from exc
        columns.append((f_plus - f_minus) / span)
    return np.column_stack(columns)


def fd_tolerance(h: float) -> float:
    """Error model for checks built on central differences at step h.

    Truncation contributes O(h^2); evaluating an O(1)-magnitude map to a
    couple of ulps contributes an irreducible eps/h roundoff floor to each
    difference quotient.  Constants are calibrated against the maps in
    this package (outputs and Jacobians of magnitude O(1)).
    """
    return 100.0 * h * h + 5.0 * float(np.finfo(float).eps) / h


def standard_form(m: int) -> np.ndarray:
    """The standard antisymmetric form on R^(2m), pairing coordinate k
    (position) with coordinate m+k (momentum)."""
    omega = np.zeros((2 * m, 2 * m))
    eye = np.eye(m)
    omega[:m, m:] = eye
    omega[m:, :m] = -eye
    return omega


def symplectic_defect(fn: Callable[[np.ndarray], np.ndarray], point, h: float) -> float:
    """Max-norm of J^T Omega_out J - Omega_in for the map's FD Jacobian.

    Coordinates are ordered (positions..., momenta...) on both sides.  The
    defect vanishes (up to O(h^2)) exactly when the map is canonical.
    """
    jac = jacobian(fn, point, h)
    rows, cols = jac.shape
    if rows % 2 or cols % 2:
        raise ValueError("phase-space maps must have even dimensions")
    pullback = jac.T @ standard_form(rows // 2) @ jac
    return float(np.max(np.abs(pullback - standard_form(cols // 2))))


# ---------------------------------------------------------------------------
# Flat-vector adapters (positions..., momenta...) for the FD machinery


def flat_fourier(n: int) -> Callable[[np.ndarray], np.ndarray]:
    """(q, p) -> (x, y) = (p, -q) on flat vectors."""

    def fn(z: np.ndarray) -> np.ndarray:
        return np.concatenate([z[n:], -z[:n]])

    return fn


def flat_to_sphere(n: int) -> Callable[[np.ndarray], np.ndarray]:
    """(x, y) -> (u, v) on flat vectors."""

    def fn(z: np.ndarray) -> np.ndarray:
        sp = to_sphere(PlaneCotangentPoint(z[:n], z[n:]))
        return np.concatenate([sp.u, sp.v])

    return fn


def flat_moser_map(n: int) -> Callable[[np.ndarray], np.ndarray]:
    """(q, p) -> (u, v) on flat vectors."""

    def fn(z: np.ndarray) -> np.ndarray:
        sp = moser_map(PhasePoint(z[:n], z[n:]))
        return np.concatenate([sp.u, sp.v])

    return fn


def flat_ls_map(n: int, tol: Tolerances = DEFAULT_TOL) -> Callable[[np.ndarray], np.ndarray]:
    """(q, p) -> (r, s) on flat vectors."""

    def fn(z: np.ndarray) -> np.ndarray:
        sp = ls_map(PhasePoint(z[:n], z[n:]), tol)
        return np.concatenate([sp.u, sp.v])

    return fn


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True, eq=False)
class Failure:
    """A sample whose defect exceeded the suite tolerance."""

    where: str
    observed: float
    expected: float
    tolerance: float


@dataclass(frozen=True, eq=False)
class SuiteReport:
    """Outcome of one verification suite over seeded samples."""

    name: str
    n: int
    samples: int
    seed: int
    tolerance: float
    max_defect: float
    failures: tuple[Failure, ...]

    def __post_init__(self) -> None:
        if (self.max_defect <= self.tolerance) != (len(self.failures) == 0):
            raise ValueError("failures must be empty exactly when max_defect <= tolerance")

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "pass" if self.passed else "fail"
        return f"{self.name},{self.samples},{self.max_defect:.17g},{status}"


def _make_report(
    name: str,
    n: int,
    samples: int,
    seed: int,
    tolerance: float,
    defects: list[tuple[float, str]],
) -> SuiteReport:
    max_defect = max((d for d, _ in defects), default=0.0)
    failures = tuple(
        sorted(
            (
                Failure(where=where, observed=d, expected=0.0, tolerance=tolerance)
                for d, where in defects
                if d > tolerance
            ),
            key=lambda f: (-f.observed, f.where),
        )
    )
    return SuiteReport(
        name=name,
        n=n,
        samples=samples,
        seed=seed,
        tolerance=tolerance,
        max_defect=max_defect,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# Samplers


def _sample_plane(
    rng: np.random.Generator, n: int, count: int, box: float = 2.0
) -> list[PlaneCotangentPoint]:
    xs = rng.uniform(-box, box, size=(count, n))
    ys = rng.uniform(-box, box, size=(count, n))
    return [PlaneCotangentPoint(x, y) for x, y in zip(xs, ys)]


def _sample_phase_compact(
    rng: np.random.Generator, n: int, count: int
) -> list[PhasePoint]:
    """Bound phase points with all coordinates and map values O(1).

    Used by the finite-difference canonicity suites, whose roundoff floor
    scales with the magnitude of the map outputs.
    """
    out: list[PhasePoint] = []
    while len(out) < count:
        direction = rng.standard_normal(n)
        norm = np.linalg.norm(direction)
        if norm < 1e-8:
            continue
        q = direction / norm * rng.uniform(0.5, 1.1)
        p = rng.uniform(-0.6, 0.6, size=n)
        energy = 0.5 * float(p @ p) - 1.0 / float(np.linalg.norm(q))
        if -1.8 <= energy <= -0.5:
            out.append(PhasePoint(q, p))
    return out


def _sample_sphere(
    rng: np.random.Generator,
    n: int,
    count: int,
    *,
    min_pole_distance: float = 0.05,
    unit_covector: bool = False,
) -> list[SphereCotangentPoint]:
    """Seeded sphere covectors off the pole and off the zero section."""
    out: list[SphereCotangentPoint] = []
    while len(out) < count:
        u = rng.standard_normal(n + 1)
        norm = np.linalg.norm(u)
        if norm < 1e-8:
            continue
        u = u / norm
        if 2.0 * (1.0 - u[-1]) < min_pole_distance**2:
            continue
        v = rng.standard_normal(n + 1)
        v = v - float(u @ v) * u
        vnorm = np.linalg.norm(v)
        if vnorm < 0.1:
            continue
        if unit_covector:
            v = v / vnorm
        elif vnorm > 3.0:
            v = 3.0 * v / vnorm
        out.append(SphereCotangentPoint(u, v))
    return out


def _phase_batch(points: list[PhasePoint]) -> tuple[np.ndarray, np.ndarray]:
    return np.stack([pt.q for pt in points]), np.stack([pt.p for pt in points])


# ---------------------------------------------------------------------------
# Suites


def _suite_stereo_roundtrip(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Both round trips through the stereographic lift, max-norm error."""
    rng = np.random.default_rng(seed)
    defects: list[tuple[float, str]] = []
    for pl in _sample_plane(rng, n, samples):
        back = to_plane(to_sphere(pl), tol)
        d = max(
            float(np.max(np.abs(back.x - pl.x))),
            float(np.max(np.abs(back.y - pl.y))),
        )
        defects.append((d, f"plane x={pl.x}, y={pl.y}"))
    for sp in _sample_sphere(rng, n, samples):
        back = to_sphere(to_plane(sp, tol))
        d = max(
            float(np.max(np.abs(back.u - sp.u))),
            float(np.max(np.abs(back.v - sp.v))),
        )
        defects.append((d, f"sphere u={sp.u}, v={sp.v}"))
    return _make_report("stereo-roundtrip", n, samples, seed, 1e-12, defects)


def _suite_metric(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """|v.v - (x.x+1)^2 (y.y)/4| under the lift (the invariant metric)."""
    rng = np.random.default_rng(seed)
    defects = []
    for pl in _sample_plane(rng, n, samples):
        sp = to_sphere(pl)
        x2 = float(pl.x @ pl.x)
        y2 = float(pl.y @ pl.y)
        v2 = float(sp.v @ sp.v)
        d = abs(v2 - (x2 + 1.0) ** 2 * y2 / 4.0)
        defects.append((d, f"x={pl.x}, y={pl.y}"))
    return _make_report("metric", n, samples, seed, 1e-12, defects)


def _suite_stereo_canonical(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Symplectic defect of the lift via finite differences.

    Sampling is compact (chart values O(1)) so the defect sits at the
    finite-difference error floor rather than scaling with the box.
    """
    rng = np.random.default_rng(seed)
    fn = flat_to_sphere(n)
    h = tol.fd_step
    defects = []
    for pl in _sample_plane(rng, n, samples, box=0.8):
        z = np.concatenate([pl.x, pl.y])
        defects.append((symplectic_defect(fn, z, h), f"x={pl.x}, y={pl.y}"))
    return _make_report("stereo-canonical", n, samples, seed, fd_tolerance(h), defects)


def _suite_moser_symplectic(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Symplectic defect of the Moser map via finite differences."""
    rng = np.random.default_rng(seed)
    fn = flat_moser_map(n)
    h = tol.fd_step
    defects = []
    for pt in _sample_phase_compact(rng, n, samples):
        z = np.concatenate([pt.q, pt.p])
        defects.append((symplectic_defect(fn, z, h), f"q={pt.q}, p={pt.p}"))
    return _make_report("moser-symplectic", n, samples, seed, fd_tolerance(h), defects)


def _suite_fibration_scale(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Scale invariance of the unit-covector projection."""
    defects = []
    for pt in sample_bound_states(n, samples, seed):
        base = moser_fibration(pt, tol)
        worst = 0.0
        for rho in (0.5, 2.0, 10.0):
            scaled = moser_fibration(scale_phase(pt, rho), tol)
            worst = max(
                worst,
                float(np.max(np.abs(scaled.u - base.u))),
                float(np.max(np.abs(scaled.v - base.v))),
            )
        defects.append((worst, f"q={pt.q}, p={pt.p}"))
    return _make_report("fibration-scale", n, samples, seed, 1e-10, defects)


def _suite_moser_levelset(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Hamiltonian vector fields of the two chart energies agree on the
    shared level set (geodesic energy 1/2, speed defect 0).

    Samples are unit covectors well away from the pole so the chart stays
    moderate: near the pole the |y| -> 0 curvature of the speed defect
    dominates the finite-difference error.  Gradients use Richardson
    extrapolation at a step 100x larger than fd_step, which keeps both
    the truncation and the roundoff-floor terms below the tolerance.
    """
    rng = np.random.default_rng(seed)
    h = 100.0 * tol.fd_step

    def value_f(z: np.ndarray) -> float:
        x, y = z[:n], z[n:]
        x2 = float(x @ x)
        return (x2 + 1.0) ** 2 * float(y @ y) / 8.0

    def value_g(z: np.ndarray) -> float:
        x, y = z[:n], z[n:]
        x2 = float(x @ x)
        return 0.5 * (x2 + 1.0) * float(np.linalg.norm(y)) - 1.0

    defects = []
    for sp in _sample_sphere(rng, n, samples, min_pole_distance=1.0, unit_covector=True):
        pl = to_plane(sp, tol)
        level = chart_hamiltonians(pl).speed_defect
        if abs(level) >= 1e-12:
            continue
        z = np.concatenate([pl.x, pl.y])
        grad_f = np.array([_central_rich(value_f, z, k, h) for k in range(2 * n)])
        grad_g = np.array([_central_rich(value_g, z, k, h) for k in range(2 * n)])
        field_f = np.concatenate([grad_f[n:], -grad_f[:n]])
        field_g = np.concatenate([grad_g[n:], -grad_g[:n]])
        d = float(np.max(np.abs(field_f - field_g)))
        defects.append((d, f"x={pl.x}, y={pl.y}"))
    return _make_report("moser-levelset", n, len(defects), seed, 1e-10, defects)


def _central(fn: Callable[[np.ndarray], float], z: np.ndarray, k: int, h: float) -> float:
    z_plus = z.copy()
    z_plus[k] = z[k] + h
    z_minus = z.copy()
    z_minus[k] = z[k] - h
    return (fn(z_plus) - fn(z_minus)) / (z_plus[k] - z_minus[k])


def _central_rich(fn: Callable[[np.ndarray], float], z: np.ndarray, k: int, h: float) -> float:
    coarse = _central(fn, z, k, h)
    fine = _central(fn, z, k, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _suite_ls_symplectic(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Symplectic defect of the Ligon-Schaaf map via finite differences.

    The map is singular as H -> 0 (the covector norm 1/sqrt(-2H) blows
    up), so the compact sampler keeps the energy well inside the bound
    region.
    """
    rng = np.random.default_rng(seed)
    fn = flat_ls_map(n, tol)
    h = tol.fd_step
    defects = []
    for pt in _sample_phase_compact(rng, n, samples):
        z = np.concatenate([pt.q, pt.p])
        defects.append((symplectic_defect(fn, z, h), f"q={pt.q}, p={pt.p}"))
    return _make_report("ls-symplectic", n, samples, seed, fd_tolerance(h), defects)


def _suite_ls_roundtrip(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Two-sided inverse identities plus the monotone-root contract.

    Round-trip defects are reported directly.  Root-finder residuals are
    folded in scaled by (round-trip tolerance / root tolerance) so a
    residual above root_tol fails the suite; the root slope must be
    strictly negative (the monotone-root invariant), and a non-negative
    slope or an unexpected puncture is reported as an outright failure.
    """
    tolerance = 1e-10
    scale = tolerance / tol.root_tol
    defects = []
    for pt in sample_bound_states(n, samples, seed):
        sp = ls_map(pt, tol)
        back = ls_inverse(sp, tol)
        d = max(
            float(np.max(np.abs(back.q - pt.q))),
            float(np.max(np.abs(back.p - pt.p))),
        )
        defects.append((d, f"phase q={pt.q}, p={pt.p}"))
    rng = np.random.default_rng(seed + 1)
    for sp in _sample_sphere(rng, n, samples):
        try:
            pt = ls_inverse(sp, tol)
        except PunctureError:
            defects.append((2.0 * tolerance, f"unexpected puncture at u={sp.u}, v={sp.v}"))
            continue
        again = ls_map(pt, tol)
        d = max(
            float(np.max(np.abs(again.u - sp.u))),
            float(np.max(np.abs(again.v - sp.v))),
        )
        sigma = sp.covector_norm
        theta = float(-math.sqrt(-2.0 * kepler_energy(pt)) * float(pt.q @ pt.p))
        residual, slope = angle_equation(theta, float(sp.u[-1]), float(sp.v[-1]) / sigma)
        d = max(d, abs(residual) * scale)
        if slope >= 0.0:
            d = max(d, 2.0 * tolerance)
        defects.append((d, f"sphere u={sp.u}, v={sp.v}"))
    return _make_report("ls-roundtrip", n, samples, seed, tolerance, defects)


def _suite_ls_equivariance(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Equivariance under rotations of R^n extended by a fixed last axis."""
    rng = np.random.default_rng(seed + 7)
    defects = []
    for pt in sample_bound_states(n, samples, seed):
        rot = _random_rotation(rng, n)
        rotated = ls_map(PhasePoint(rot @ pt.q, rot @ pt.p), tol)
        base = ls_map(pt, tol)
        rot_ext = np.zeros((n + 1, n + 1))
        rot_ext[:n, :n] = rot
        rot_ext[n, n] = 1.0
        d = max(
            float(np.max(np.abs(rotated.u - rot_ext @ base.u))),
            float(np.max(np.abs(rotated.v - rot_ext @ base.v))),
        )
        defects.append((d, f"q={pt.q}, p={pt.p}"))
    return _make_report("ls-equivariance", n, samples, seed, 1e-12, defects)


def _random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    mat = rng.standard_normal((n, n))
    q, r = np.linalg.qr(mat)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


_INTERTWINE_DT = 1e-5
_INTERTWINE_STEPS = (10_000, 100_000, 500_000)  # t = 0.1, 1, 5


def _suite_intertwine(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Direct leapfrog propagation against the conjugated Delaunay flow at
    t in {0.1, 1, 5}.

    The tolerance is integrator-limited, so sampling keeps the leapfrog in
    its accuracy regime: eccentricity at most 0.6 and energy in [-1, -0.05]
    (perihelion bounded away from the collision set).
    """
    points = sample_bound_states(
        n, samples, seed, pole_gap=0.05, max_eccentricity=0.6, min_energy=-1.0
    )
    qs, ps = _phase_batch(points)
    dt = _INTERTWINE_DT
    checkpoints = list(_INTERTWINE_STEPS)
    states = _leapfrog_batch(qs, ps, dt, checkpoints)
    sphere0 = [ls_map(pt, tol) for pt in points]
    worst = [0.0] * len(points)
    for steps, (qarr, parr) in zip(checkpoints, states):
        t = steps * dt
        for i, sp0 in enumerate(sphere0):
            expected = delaunay_flow(sp0, t, tol)
            observed = ls_map(PhasePoint(qarr[i], parr[i]), tol)
            d = max(
                float(np.max(np.abs(observed.u - expected.u))),
                float(np.max(np.abs(observed.v - expected.v))),
            )
            worst[i] = max(worst[i], d)
    defects = [
        (w, f"q={pt.q}, p={pt.p}") for w, pt in zip(worst, points)
    ]
    return _make_report("intertwine-flows", n, samples, seed, 1e-6, defects)


def _suite_momenta_pullback(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """sphere momentum of the Ligon-Schaaf image equals the extended
    momentum, entrywise."""
    defects = []
    for pt in sample_bound_states(n, samples, seed):
        lhs = sphere_momentum(ls_map(pt, tol)).entries
        rhs = extended_momentum(pt).entries
        defects.append((float(np.max(np.abs(lhs - rhs))), f"q={pt.q}, p={pt.p}"))
    return _make_report("momenta-pullback", n, samples, seed, 1e-12, defects)


def _suite_mu_squared(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """momentum_norm_squared(pt) * (-2H) = 1 on bound samples."""
    defects = []
    for pt in sample_bound_states(n, samples, seed):
        mu2 = momentum_norm_squared(pt)
        d = abs(mu2 * (-2.0 * kepler_energy(pt)) - 1.0)
        defects.append((d, f"q={pt.q}, p={pt.p}"))
    return _make_report("mu-squared", n, samples, seed, 1e-12, defects)


def _suite_so_brackets(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """All so(n+1) bracket relations on bound samples.

    {L_ab, L_cd} = d_bc L_da + d_ad L_cb - d_ac L_db - d_bd L_ca with the
    index n standing for the scaled Lenz direction; brackets with fewer or
    more than three distinct indices vanish.  Richardson-extrapolated
    central differences.
    """
    points = sample_bound_states(n, samples, seed, min_energy=-2.0, max_energy=-0.2)
    qs, ps = _phase_batch(points)
    h = tol.fd_step
    pairs = list(combinations(range(n + 1), 2))
    values = {
        pair: extended_momentum_field(pair[0], pair[1], n)(qs, ps) for pair in pairs
    }
    fields = {pair: extended_momentum_field(pair[0], pair[1], n) for pair in pairs}
    worst = np.zeros(len(points))
    for (a, b), (c, d) in combinations_with_replacement(pairs, 2):
        observed = _bracket_batch(fields[(a, b)], fields[(c, d)], qs, ps, h, richardson=True)
        expected = np.zeros(len(points))
        for delta, pair, sign in (
            (b == c, (d, a), 1.0),
            (a == d, (c, b), 1.0),
            (a == c, (d, b), -1.0),
            (b == d, (c, a), -1.0),
        ):
            if delta:
                i, j = pair
                term = values[(i, j)] if i < j else -values[(j, i)] if i > j else 0.0
                expected = expected + sign * term
        worst = np.maximum(worst, np.abs(observed - expected))
    defects = [(float(w), f"q={pt.q}, p={pt.p}") for w, pt in zip(worst, points)]
    return _make_report("so(n+1)-brackets", n, samples, seed, 1e-5, defects)


def _suite_lenz_brackets(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Lenz bracket relations sampled on |q| > 0 regardless of energy sign.

    {L_ij, K_k} = d_ik K_j - d_jk K_i and {K_i, K_j} = -2H L_ij extend off
    the bound region as analytic identities, so positive energies are
    sampled too.
    """
    rng = np.random.default_rng(seed)
    qs_list, ps_list = [], []
    while len(qs_list) < samples:
        q = rng.uniform(-2.0, 2.0, size=n)
        p = rng.uniform(-1.5, 1.5, size=n)
        if np.linalg.norm(q) >= 0.1:
            qs_list.append(q)
            ps_list.append(p)
    qs = np.stack(qs_list)
    ps = np.stack(ps_list)
    h = tol.fd_step
    worst = np.zeros(samples)
    lenz_values = {k: lenz_field(k)(qs, ps) for k in range(n)}
    ang_values = {
        (i, j): angular_momentum_field(i, j)(qs, ps) for i, j in combinations(range(n), 2)
    }
    energy = hamiltonian_field()(qs, ps)
    for i, j in combinations(range(n), 2):
        for k in range(n):
            observed = _bracket_batch(
                angular_momentum_field(i, j), lenz_field(k), qs, ps, h, richardson=True
            )
            expected = np.zeros(samples)
            if i == k:
                expected = expected + lenz_values[j]
            if j == k:
                expected = expected - lenz_values[i]
            worst = np.maximum(worst, np.abs(observed - expected))
    for i, j in combinations(range(n), 2):
        observed = _bracket_batch(lenz_field(i), lenz_field(j), qs, ps, h, richardson=True)
        expected = -2.0 * energy * ang_values[(i, j)]
        worst = np.maximum(worst, np.abs(observed - expected))
    defects = [
        (float(w), f"q={q}, p={p}") for w, q, p in zip(worst, qs_list, ps_list)
    ]
    return _make_report("lenz-brackets", n, samples, seed, 1e-5, defects)


_CONSERVATION_DT = 2e-5
_CONSERVATION_STEPS = 25_000  # horizon t = 0.5


def _suite_conservation(n: int, samples: int, seed: int, tol: Tolerances) -> SuiteReport:
    """Drift of H, every L_ij and every K_i along leapfrog trajectories.

    Both families are first integrals, so any drift is integrator error;
    sampling keeps the leapfrog in its accuracy regime as in the
    intertwining suite.
    """
    points = sample_bound_states(
        n, samples, seed, pole_gap=0.05, max_eccentricity=0.6, min_energy=-1.0
    )
    qs, ps = _phase_batch(points)
    (end,) = _leapfrog_batch(qs, ps, _CONSERVATION_DT, [_CONSERVATION_STEPS])
    q_end, p_end = end
    worst = np.zeros(len(points))

    energy = hamiltonian_field()
    worst = np.maximum(worst, np.abs(energy(q_end, p_end) - energy(qs, ps)))
    for i, j in combinations(range(n), 2):
        field = angular_momentum_field(i, j)
        worst = np.maximum(worst, np.abs(field(q_end, p_end) - field(qs, ps)))
    for k in range(n):
        field = lenz_field(k)
        worst = np.maximum(worst, np.abs(field(q_end, p_end) - field(qs, ps)))
    defects = [(float(w), f"q={pt.q}, p={pt.p}") for w, pt in zip(worst, points)]
    return _make_report("conservation", n, samples, seed, 1e-6, defects)


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True, eq=False)
class SuiteDef:
    runner: Callable[[int, int, int, Tolerances], SuiteReport]
    module: str
    invariant: str


_SUITES: dict[str, SuiteDef] = {
    "stereo-roundtrip": SuiteDef(_suite_stereo_roundtrip, "stereo", "round-trip"),
    "stereo-canonical": SuiteDef(_suite_stereo_canonical, "stereo", "canonicity"),
    "metric": SuiteDef(_suite_metric, "stereo", "metric-identity"),
    "moser-symplectic": SuiteDef(_suite_moser_symplectic, "moser", "symplecticity"),
    "fibration-scale": SuiteDef(_suite_fibration_scale, "moser", "scale-invariance"),
    "moser-levelset": SuiteDef(_suite_moser_levelset, "moser", "level-set-gradients"),
    "ls-symplectic": SuiteDef(_suite_ls_symplectic, "ligonschaaf", "symplecticity"),
    "ls-roundtrip": SuiteDef(_suite_ls_roundtrip, "ligonschaaf", "monotone-root-inverse"),
    "ls-equivariance": SuiteDef(_suite_ls_equivariance, "ligonschaaf", "rotation-equivariance"),
    "intertwine-flows": SuiteDef(_suite_intertwine, "dynamics", "flow-intertwining"),
    "momenta-pullback": SuiteDef(_suite_momenta_pullback, "symmetry", "momentum-pullback"),
    "so(n+1)-brackets": SuiteDef(_suite_so_brackets, "symmetry", "so-algebra"),
    "lenz-brackets": SuiteDef(_suite_lenz_brackets, "symmetry", "lenz-algebra"),
    "mu-squared": SuiteDef(_suite_mu_squared, "symmetry", "moment-map-norm"),
    "conservation": SuiteDef(_suite_conservation, "symmetry", "first-integrals"),
}

SUITE_NAMES: tuple[str, ...] = tuple(_SUITES)


def suite_registry() -> dict[str, SuiteDef]:
    """The full registry, keyed by suite name."""
    return dict(_SUITES)


def run_suite(
    name: str,
    n: int,
    samples: int,
    seed: int,
    tol: Tolerances = DEFAULT_TOL,
) -> SuiteReport:
    """Execute one named verification suite; deterministic per seed."""
    if name not in _SUITES:
        raise UnknownSuiteError(
            f"unknown suite {name!r}; known suites: {', '.join(SUITE_NAMES)}"
        )
    if n < 1:
        raise ValueError("n must be >= 1")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    return _SUITES[name].runner(n, samples, seed, tol)
