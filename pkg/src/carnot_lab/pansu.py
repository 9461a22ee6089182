"""Blow-up (Pansu-type) derivatives of maps into the Abelian group.

A map applies a scalar function entrywise to the three free coordinates
of a group element and lands in the componentwise-additive comparison
group. Its blow-up quotient at a base point conjugates the map by a
source dilation and the inverse target dilation,

    q(t) = [ f(base . delta_t(dir)) - f(base) ] / t,

and the derivative is the t -> 0+ limit, extrapolated entrywise over a
geometric schedule. On the Abelian source this reproduces the classical
diagonal Jacobian; on the group source with the graded dilation the
vertical entry of the identity map collapses to zero, which is the
degenerate-center behavior the construction is designed to exhibit.

The fixed-t quotient of a scalar function at a point, tabulated as t -> 1
(``jackson_profile``), is the bridge between these blow-up quotients and
the q-difference derivative of the entropy module: the quotient of
g(x) = sum p_i^x at x = 1 with t = q equals minus the deformed entropy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._extrapolation import richardson_limit
from .errors import ConvergenceError, DomainError
from .qalgebra import jackson_quotient

MAP_KINDS = ("heis_to_abelian", "abelian_to_abelian")
CONVENTIONS = ("source_graded", "source_linear")


@dataclass(frozen=True)
class GroupMap:
    """Entrywise map between 3-coordinate groups.

    ``kind`` fixes the source group: the matrix-coordinate group product
    for ``heis_to_abelian``, plain addition for ``abelian_to_abelian``.
    The target is always the additive comparison group.
    """
    kind: str
    fn: Callable[[float], float]

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise DomainError(f"unknown map kind {self.kind!r}")

    def apply(self, coords):
        return np.array([self.fn(coords[0]), self.fn(coords[1]),
                         self.fn(coords[2])], dtype=float)


def default_blowup_schedule(levels=20):
    return 2.0 ** -np.arange(1, levels + 1)


@dataclass(frozen=True)
class BlowupSchedule:
    """Strictly decreasing positive t values approaching 0, plus the
    source dilation convention (graded t^2 on the vertical coordinate, or
    linear t on all three)."""
    t_values: np.ndarray = field(default_factory=default_blowup_schedule)
    convention: str = "source_graded"

    def __post_init__(self):
        ts = np.asarray(self.t_values, dtype=float)
        if ts.ndim != 1 or len(ts) < 3:
            raise DomainError("schedule needs at least 3 t values")
        if np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
            raise DomainError("schedule must be strictly decreasing and > 0")
        if self.convention not in CONVENTIONS:
            raise DomainError(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "t_values", ts)

    def ratio(self):
        r = self.t_values[:-1] / self.t_values[1:]
        if not np.allclose(r, r[0], rtol=1e-9):
            raise DomainError("schedule must shrink geometrically")
        return float(r[0])


def _source_dilate(coords, t, convention):
    x, y, z = coords
    if convention == "source_graded":
        return (t * x, t * y, t * t * z)
    return (t * x, t * y, t * z)


def _source_compose(kind, base, disp):
    if kind == "abelian_to_abelian":
        return (base[0] + disp[0], base[1] + disp[1], base[2] + disp[2])
    # matrix-coordinate product (x1+x2, y1+y2, z1+z2 + x1*y2)
    return (base[0] + disp[0], base[1] + disp[1],
            base[2] + disp[2] + base[0] * disp[1])


def blowup_quotient(f: GroupMap, base, direction, t, convention="source_graded"):
    """Single fixed-t term of the blow-up limit, as 3 entries.

    The convention switch concerns the group source only; the Abelian
    source always carries the isotropic (linear) dilations.
    """
    if not t > 0:
        raise DomainError("blow-up parameter t must be positive")
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown convention {convention!r}")
    if f.kind == "abelian_to_abelian":
        convention = "source_linear"
    moved = _source_compose(f.kind, tuple(base),
                            _source_dilate(tuple(direction), t, convention))
    return (f.apply(moved) - f.apply(tuple(base))) / t


_UNIT_DIRECTIONS = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
_ENTRY_NAMES = ("x", "y", "z")


def blowup_limit(f: GroupMap, base, direction, schedule=None, tol=1e-8):
    """t -> 0+ limit of the blow-up quotient along one direction.

    Returns (limit 3-vector, per-entry diagnostics). Entries whose
    extrapolation fails raise ConvergenceError naming the entry.
    """
    sched = schedule if schedule is not None else BlowupSchedule()
    ratio = sched.ratio()
    quotients = np.array([blowup_quotient(f, base, direction, t,
                                          sched.convention)
                          for t in sched.t_values])
    limits = np.empty(3)
    orders = {}
    for i, name in enumerate(_ENTRY_NAMES):
        seq = quotients[:, i]
        if np.allclose(seq, seq[0], rtol=0.0, atol=1e-300):
            limits[i], orders[name] = seq[0], float("inf")
            continue
        try:
            limits[i], diag = richardson_limit(seq, ratio=ratio, tol=tol,
                                               what=f"blow-up entry {name!r}")
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"entry {name!r} of the blow-up quotient diverges: {exc}"
            ) from exc
        orders[name] = diag["order"]
    return limits, orders


def pansu_derivative(f: GroupMap, base, schedule=None, directions=None,
                     tol=1e-8):
    """Blow-up derivative matrix at ``base``: column j is the limit along
    the j-th probe direction (the coordinate unit displacements unless
    ``directions`` overrides them).

    For ``abelian_to_abelian`` maps with a differentiable entry function
    this is the diagonal Jacobian diag(fn'(base)).
    """
    dirs = _UNIT_DIRECTIONS if directions is None else tuple(directions)
    cols = []
    diagnostics = {}
    for j, direction in enumerate(dirs):
        vec, orders = blowup_limit(f, base, direction, schedule, tol)
        cols.append(vec)
        diagnostics[f"direction_{j}"] = orders
    return np.column_stack(cols), diagnostics


# ---------------------------------------------------------------------------
# fixed-parameter quotient profiles

@dataclass(frozen=True)
class JacksonProfile:
    """Quotient table of a scalar function at x0: rows (t, quotient),
    plus the t -> 1 extrapolant."""
    x0: float
    table: np.ndarray
    extrapolant: float


def jackson_profile(fn, x0, t_grid=None, tol=1e-9) -> JacksonProfile:
    """Tabulate (fn(t x0) - fn(x0)) / (t x0 - x0) over a grid of t -> 1
    and extrapolate the limit."""
    if x0 == 0:
        raise DomainError("quotient profile is degenerate at x0 = 0")
    ts = (1.0 + 2.0 ** -np.arange(1, 13)) if t_grid is None \
        else np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or len(ts) < 3:
        raise DomainError("grid needs at least 3 t values")
    quotients = np.array([jackson_quotient(fn, x0, t) for t in ts])
    steps = ts - 1.0
    ratios = steps[:-1] / steps[1:]
    limit = None
    if np.allclose(ratios, ratios[0], rtol=1e-9):
        if np.allclose(quotients, quotients[0], rtol=0.0, atol=1e-300):
            limit = float(quotients[0])
        else:
            try:
                limit, _ = richardson_limit(quotients, ratio=float(ratios[0]),
                                            tol=tol, what="quotient profile")
            except ConvergenceError:
                limit = None  # short or rough grid, fall through
    if limit is None:
        # best-effort polynomial extrapolation in (t - 1); the profile is
        # an exhibit, so it never refuses to report
        deg = min(3, len(ts) - 1)
        limit = float(np.polyval(np.polyfit(steps, quotients, deg), 0.0))
    return JacksonProfile(float(x0), np.column_stack([ts, quotients]),
                          float(limit))
