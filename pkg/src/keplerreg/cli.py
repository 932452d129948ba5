"""Command-line front end.

Three subcommands: ``map`` applies the regularization maps to single
points, ``propagate`` runs scenarios to CSV trajectory files (direct
leapfrog or regularized Delaunay propagation), and ``verify`` runs the
named property suites.  All numbers serialize with 17 significant digits
so files round-trip doubles exactly, and identical invocations produce
byte-identical output.

Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 numeric
or domain failure during propagation.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DomainError, PhasePoint, SphereCotangentPoint, Tolerances, kepler_energy
from .dynamics import (
    CollisionApproachError,
    delaunay_energy,
    delaunay_flow,
    kepler_integrate,
)
from .harness import SUITE_NAMES, UnknownSuiteError, run_suite
from .ligonschaaf import PunctureError, ls_inverse, ls_map
from .moser import moser_fibration, moser_map, moser_map_inverse
from .symmetry import angular_momentum, lenz_vector, sphere_momentum

__all__ = ["main", "build_parser", "Scenario", "parse_scenario"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2
EXIT_NUMERIC = 3


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_vector(vec: np.ndarray) -> str:
    return ",".join(_fmt(float(c)) for c in vec)


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{name} must be comma-separated decimals, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    """argparse variant honoring the exit-code contract (1 = bad input)."""

    def error(self, message: str):
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Scenarios


@dataclass(frozen=True, eq=False)
class Scenario:
    """A propagation request parsed from a flat key/value scenario file."""

    n: int
    q: np.ndarray
    p: np.ndarray
    t_end: float
    mode: str
    dt: float | None = None
    output_times: np.ndarray | None = None
    output_count: int = 100

    def __post_init__(self) -> None:
        if self.mode not in ("direct", "regularized"):
            raise DomainError(f"mode must be direct or regularized, got {self.mode!r}")
        if self.q.size != self.n or self.p.size != self.n:
            raise DomainError("q and p must have length n")
        if not self.t_end > 0.0:
            raise DomainError("t_end must be positive")
        if self.mode == "direct" and (self.dt is None or not self.dt > 0.0):
            raise DomainError("direct mode requires dt > 0")
        if self.output_times is not None:
            times = self.output_times
            if times.size == 0:
                raise DomainError("output_times must be nonempty when given")
            if np.any(times < 0.0) or np.any(np.diff(times) <= 0.0):
                raise DomainError("output_times must be nonnegative and strictly increasing")
        if self.output_count < 2:
            raise DomainError("output_count must be >= 2")

    def times(self) -> np.ndarray:
        if self.output_times is not None:
            return self.output_times
        return np.linspace(0.0, self.t_end, self.output_count)


def parse_scenario(text: str) -> Scenario:
    """Parse the flat scenario format: one ``key = value`` pair per line.

    Keys: n, q, p, t_end, mode, dt (direct mode), output_times (optional
    comma-separated list) and output_count (grid size when output_times is
    absent, default 100).  Blank lines and ``#`` comments are ignored.
    """
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"scenario line {lineno} is not key = value: {raw!r}")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    try:
        n = int(fields["n"])
        q = _parse_vector(fields["q"], "q")
        p = _parse_vector(fields["p"], "p")
        t_end = float(fields["t_end"])
        mode = fields["mode"]
    except KeyError as exc:
        raise DomainError(f"scenario is missing required key {exc.args[0]!r}") from exc
    dt = float(fields["dt"]) if "dt" in fields else None
    output_times = (
        _parse_vector(fields["output_times"], "output_times")
        if "output_times" in fields
        else None
    )
    output_count = int(fields.get("output_count", "100"))
    return Scenario(
        n=n,
        q=q,
        p=p,
        t_end=t_end,
        mode=mode,
        dt=dt,
        output_times=output_times,
        output_count=output_count,
    )


# ---------------------------------------------------------------------------
# map subcommand


def _sphere_record(sp: SphereCotangentPoint) -> list[str]:
    return [
        f"u = {_fmt_vector(sp.u)}",
        f"v = {_fmt_vector(sp.v)}",
        f"unit_defect = {_fmt(abs(float(sp.u @ sp.u) - 1.0))}",
        f"tangency_defect = {_fmt(abs(float(sp.u @ sp.v)))}",
        f"covector_norm = {_fmt(sp.covector_norm)}",
        f"delaunay_energy = {_fmt(delaunay_energy(sp))}",
        f"at_puncture = {'true' if sp.at_puncture else 'false'}",
    ]


def _cmd_map(args, out) -> int:
    tol = _tolerances_from(args)
    lines: list[str] = []
    try:
        if args.which in ("moser", "fibration", "ls"):
            if args.q is None or args.p is None:
                raise DomainError(f"--which {args.which} requires --q and --p")
            point = PhasePoint(_parse_vector(args.q, "q"), _parse_vector(args.p, "p"))
            lines.append(f"which = {args.which}")
            lines.append(f"q = {_fmt_vector(point.q)}")
            lines.append(f"p = {_fmt_vector(point.p)}")
            if args.which == "moser":
                sp = moser_map(point)
            elif args.which == "fibration":
                sp = moser_fibration(point, tol)
            else:
                sp = ls_map(point, tol)
            lines.append(f"H = {_fmt(kepler_energy(point))}")
            lines.extend(_sphere_record(sp))
        else:
            if args.u is None or args.v is None:
                raise DomainError(f"--which {args.which} requires --u and --v")
            sp = SphereCotangentPoint(
                _parse_vector(args.u, "u"),
                _parse_vector(args.v, "v"),
                constraint_tol=tol.constraint_tol,
            )
            lines.append(f"which = {args.which}")
            lines.append(f"u = {_fmt_vector(sp.u)}")
            lines.append(f"v = {_fmt_vector(sp.v)}")
            lines.append(f"delaunay_energy = {_fmt(delaunay_energy(sp))}")
            point = (
                moser_map_inverse(sp, tol)
                if args.which == "moser-inverse"
                else ls_inverse(sp, tol)
            )
            lines.append(f"q = {_fmt_vector(point.q)}")
            lines.append(f"p = {_fmt_vector(point.p)}")
            lines.append(f"H = {_fmt(kepler_energy(point))}")
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# propagate subcommand


def _momentum_columns(n: int) -> list[str]:
    return [f"L{i + 1}{j + 1}" for i in range(n) for j in range(i + 1, n)]


def _csv_header(n: int) -> str:
    cols = ["t"]
    cols += [f"q{i + 1}" for i in range(n)]
    cols += [f"p{i + 1}" for i in range(n)]
    cols += ["H"]
    cols += _momentum_columns(n)
    cols += [f"K{i + 1}" for i in range(n)]
    cols += ["Knorm", "flag"]
    return ",".join(cols)


def _phase_row(t: float, point: PhasePoint) -> str:
    n = point.n
    energy = kepler_energy(point)
    lenz = lenz_vector(point)
    lmat = angular_momentum(point)
    cells = [_fmt(t)]
    cells += [_fmt(float(c)) for c in point.q]
    cells += [_fmt(float(c)) for c in point.p]
    cells.append(_fmt(energy))
    cells += [_fmt(lmat.entry(i, j)) for i in range(n) for j in range(i + 1, n)]
    cells += [_fmt(float(c)) for c in lenz]
    cells.append(_fmt(float(np.linalg.norm(lenz))))
    cells.append("")
    return ",".join(cells)


def _collision_row(t: float, sp: SphereCotangentPoint) -> str:
    """Row for an output time landing on a collision: no q, p, but the
    conserved quantities are still defined on the sphere side."""
    n = sp.n
    energy = delaunay_energy(sp)
    mom = sphere_momentum(sp)
    w = math.sqrt(-2.0 * energy)
    lenz = np.array([mom.entry(i, n) * w for i in range(n)])
    cells = [_fmt(t)]
    cells += ["" for _ in range(2 * n)]
    cells.append(_fmt(energy))
    cells += [_fmt(mom.entry(i, j)) for i in range(n) for j in range(i + 1, n)]
    cells += [_fmt(float(c)) for c in lenz]
    cells.append(_fmt(float(np.linalg.norm(lenz))))
    cells.append("collision")
    return ",".join(cells)


def _propagate_regularized(scenario: Scenario, tol: Tolerances) -> list[str]:
    start = PhasePoint(scenario.q, scenario.p)
    sphere_start = ls_map(start, tol)
    rows = []
    for t in scenario.times():
        t = float(t)
        if t == 0.0:
            rows.append(_phase_row(t, start))
            continue
        sp_t = delaunay_flow(sphere_start, t, tol)
        if sp_t.at_puncture:
            rows.append(_collision_row(t, sp_t))
            continue
        try:
            rows.append(_phase_row(t, ls_inverse(sp_t, tol)))
        except PunctureError:
            rows.append(_collision_row(t, sp_t))
    return rows


def _propagate_direct(scenario: Scenario) -> list[str]:
    state = PhasePoint(scenario.q, scenario.p)
    rows = []
    current_t = 0.0
    for t in scenario.times():
        t = float(t)
        if t == 0.0:
            rows.append(_phase_row(t, state))
            continue
        span = t - current_t
        if span <= 0.0:
            raise DomainError("output times must be strictly increasing")
        try:
            traj = kepler_integrate(state, span, scenario.dt, record_every=10**9)
        except CollisionApproachError as exc:
            raise CollisionApproachError(current_t + exc.t) from None
        state = traj.end
        current_t = t
        rows.append(_phase_row(t, state))
    return rows


def _cmd_propagate(args, out) -> int:
    tol = _tolerances_from(args)
    paths = [Path(p) for p in args.scenario]
    if len(paths) > 1 and args.out is not None:
        sys.stderr.write("error: use --out-dir with multiple scenarios\n")
        return EXIT_INVALID
    for path in paths:
        try:
            scenario = parse_scenario(path.read_text())
        except (OSError, DomainError, ValueError) as exc:
            sys.stderr.write(f"error: invalid scenario {path}: {exc}\n")
            return EXIT_INVALID
        try:
            if scenario.mode == "regularized":
                rows = _propagate_regularized(scenario, tol)
            else:
                rows = _propagate_direct(scenario)
        except (CollisionApproachError, DomainError, PunctureError) as exc:
            sys.stderr.write(f"error: propagation failed for {path}: {exc}\n")
            return EXIT_NUMERIC
        text = "\n".join([_csv_header(scenario.n)] + rows) + "\n"
        if args.out_dir is not None:
            target = Path(args.out_dir) / (path.stem + ".csv")
            target.parent.mkdir(parents=True, exist_ok=True)
        elif args.out is not None:
            target = Path(args.out)
        else:
            out.write(text)
            continue
        target.write_text(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify subcommand


def _cmd_verify(args, out) -> int:
    tol = _tolerances_from(args)
    names = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
    lines = []
    all_passed = True
    for name in names:
        try:
            report = run_suite(name, args.n, args.samples, args.seed, tol)
        except UnknownSuiteError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return EXIT_INVALID
        lines.append(report.line())
        all_passed &= report.passed
    text = "\n".join(lines) + "\n"
    out.write(text)
    if args.out is not None:
        Path(args.out).write_text(text)
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# parser


def _add_tolerance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--constraint-tol", type=float, default=Tolerances.constraint_tol)
    parser.add_argument("--fd-step", type=float, default=Tolerances.fd_step)
    parser.add_argument("--root-tol", type=float, default=Tolerances.root_tol)
    parser.add_argument("--ode-tol", type=float, default=Tolerances.ode_tol)


def _tolerances_from(args) -> Tolerances:
    return Tolerances(
        constraint_tol=args.constraint_tol,
        fd_step=args.fd_step,
        root_tol=args.root_tol,
        ode_tol=args.ode_tol,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="keplerreg",
        description="Regularized Kepler dynamics: maps, propagation, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="apply a regularization map to one point")
    p_map.add_argument(
        "--which",
        required=True,
        choices=["moser", "moser-inverse", "fibration", "ls", "ls-inverse"],
    )
    p_map.add_argument("--q", help="position, comma-separated")
    p_map.add_argument("--p", help="momentum, comma-separated")
    p_map.add_argument("--u", help="sphere base point, comma-separated")
    p_map.add_argument("--v", help="sphere covector, comma-separated")
    _add_tolerance_flags(p_map)

    p_prop = sub.add_parser("propagate", help="propagate scenario files to CSV")
    p_prop.add_argument("scenario", nargs="+", help="scenario file(s)")
    p_prop.add_argument("--out", help="output CSV path (single scenario)")
    p_prop.add_argument("--out-dir", help="output directory (batch mode)")
    _add_tolerance_flags(p_prop)

    p_ver = sub.add_parser("verify", help="run verification suites")
    p_ver.add_argument("--suite", required=True, help="suite name or 'all'")
    p_ver.add_argument("--n", type=int, default=2)
    p_ver.add_argument("--samples", type=int, default=500)
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.add_argument("--out", help="also write the report to this file")
    _add_tolerance_flags(p_ver)

    return parser


_VECTOR_FLAGS = ("--q", "--p", "--u", "--v", "--output-times")


def _merge_vector_flags(argv: list[str]) -> list[str]:
    """Join vector flags with their values so negative components are not
    mistaken for option names by argparse."""
    merged: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in _VECTOR_FLAGS and i + 1 < len(argv):
            merged.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            merged.append(token)
    return merged


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_merge_vector_flags(list(argv if argv is not None else sys.argv[1:])))
    try:
        if args.command == "map":
            return _cmd_map(args, sys.stdout)
        if args.command == "propagate":
            return _cmd_propagate(args, sys.stdout)
        if args.command == "verify":
            return _cmd_verify(args, sys.stdout)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    return EXIT_INVALID  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
