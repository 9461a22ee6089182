"""Word-metric ball growth in integer matrix groups.

Breadth-first expansion over the Cayley graph of the integer Heisenberg
group (coordinates (a, c, b) with product (a1+a2, c1+c2, b1+b2+a1*c2))
or of Z^3, under a symmetric generating set. Ball cardinalities grow
polynomially, with degree 4 for the Heisenberg lattice and 3 for Z^3;
the degree is a generating-set-independent invariant, which
``generator_robustness`` checks empirically.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, DomainError

IDENTITY = (0, 0, 0)

#: standard generators: unit steps in the two horizontal slots
T1 = (1, 0, 0)
T2 = (0, 1, 0)

STANDARD_GENERATORS = {
    "heis_Z": (T1, T2),
    "z3": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
}

_BYTES_PER_ELEMENT = 180  # tuple of small ints + set slot, coarse figure


def heis_mul(g, s):
    return (g[0] + s[0], g[1] + s[1], g[2] + s[2] + g[0] * s[1])


def heis_inv(g):
    return (-g[0], -g[1], g[0] * g[1] - g[2])


def z3_mul(g, s):
    return (g[0] + s[0], g[1] + s[1], g[2] + s[2])


def z3_inv(g):
    return (-g[0], -g[1], -g[2])


GROUP_LAWS = {"heis_Z": (heis_mul, heis_inv), "z3": (z3_mul, z3_inv)}


def symmetrize_generators(group, generators):
    """Close a generator list under inverses, drop identity and
    duplicates, preserving first-seen order (BFS determinism)."""
    if group not in GROUP_LAWS:
        raise DomainError(f"unknown group {group!r}")
    _, inv = GROUP_LAWS[group]
    out = []
    seen = set()
    for g in generators:
        g = tuple(int(c) for c in g)
        if len(g) != 3:
            raise DomainError(f"generator {g!r} is not a coordinate triple")
        for h in (g, inv(g)):
            if h == IDENTITY:
                raise DomainError("identity is not an admissible generator")
            if h not in seen:
                seen.add(h)
                out.append(h)
    if not out:
        raise DomainError("empty generating set")
    return tuple(out)


@dataclass(frozen=True)
class GrowthTable:
    """Cumulative ball sizes |B_r| for r = 0..R under a fixed symmetric
    generating set."""
    group: str
    generators: tuple
    radii: tuple
    counts: tuple
    max_abs_horizontal: tuple = ()
    max_abs_vertical: tuple = ()
    truncated: bool = False
    wall_time: float = 0.0

    def to_payload(self) -> dict:
        """Canonical JSON form (deterministic; excludes wall time)."""
        return {
            "group": self.group,
            "generators": [list(g) for g in self.generators],
            "radii": list(self.radii),
            "counts": list(self.counts),
        }

    def to_csv_rows(self):
        return [("r", "count")] + [(r, c) for r, c in zip(self.radii,
                                                          self.counts)]


def word_ball(group, generators, radius, mem_budget_mb=None) -> GrowthTable:
    """All ball cardinalities |B_0|..|B_radius| by breadth-first search.

    Deterministic: frontier order is insertion order. If a memory budget
    is given and the projected ball size would exceed it, a BudgetError
    carrying the partial table is raised.
    """
    if radius < 0:
        raise DomainError("radius must be >= 0")
    gens = symmetrize_generators(group, generators)
    law, _ = GROUP_LAWS[group]
    t0 = time.perf_counter()

    visited = {IDENTITY}
    frontier = [IDENTITY]
    counts = [1]
    max_h = [0]
    max_v = [0]
    budget_bytes = None if mem_budget_mb is None else mem_budget_mb * 2 ** 20

    for r in range(1, radius + 1):
        if budget_bytes is not None:
            projected = _project_count(counts, radius)
            if projected * _BYTES_PER_ELEMENT > budget_bytes:
                partial = GrowthTable(group, gens, tuple(range(r)),
                                      tuple(counts), tuple(max_h),
                                      tuple(max_v), truncated=True,
                                      wall_time=time.perf_counter() - t0)
                raise BudgetError(
                    f"projected |B_{radius}| ~ {projected} elements exceeds "
                    f"memory budget {mem_budget_mb} MB", partial=partial)
        new = []
        for g in frontier:
            for s in gens:
                h = law(g, s)
                if h not in visited:
                    visited.add(h)
                    new.append(h)
        frontier = new
        counts.append(len(visited))
        level_h = max(max(abs(g[0]), abs(g[1])) for g in frontier) \
            if frontier else max_h[-1]
        level_v = max(abs(g[2]) for g in frontier) if frontier else max_v[-1]
        max_h.append(max(max_h[-1], level_h))
        max_v.append(max(max_v[-1], level_v))

    return GrowthTable(group, gens, tuple(range(radius + 1)), tuple(counts),
                       tuple(max_h), tuple(max_v),
                       wall_time=time.perf_counter() - t0)


def _project_count(counts, radius):
    """Crude power-law projection of |B_radius| from the counts so far."""
    r_now = len(counts) - 1
    if r_now < 2:
        return counts[-1] * (5 ** (radius - r_now))
    d = np.log(counts[-1] / counts[max(1, r_now // 2)]) / \
        np.log(r_now / max(1, r_now // 2))
    return int(counts[-1] * (radius / r_now) ** max(d, 1.0))


def word_norm(element, group="heis_Z", generators=None, radius_cap=20):
    """Minimal word length of ``element``, or None when the cap is hit.

    BFS from the identity, level by level, consistent with ``word_ball``
    membership by construction.
    """
    if radius_cap < 0:
        raise DomainError("radius cap must be >= 0")
    target = tuple(int(c) for c in element)
    if target == IDENTITY:
        return 0
    gens = symmetrize_generators(
        group, generators if generators is not None
        else STANDARD_GENERATORS[group])
    law, _ = GROUP_LAWS[group]
    visited = {IDENTITY}
    frontier = [IDENTITY]
    for r in range(1, radius_cap + 1):
        new = []
        for g in frontier:
            for s in gens:
                h = law(g, s)
                if h == target:
                    return r
                if h not in visited:
                    visited.add(h)
                    new.append(h)
        frontier = new
    return None


def growth_fit(table: GrowthTable, r_min, r_max):
    """Least-squares fit log|B_r| = log c + d log r over [r_min, r_max].

    Returns (d, c, max_residual).
    """
    if not (r_max > r_min >= 1):
        raise DomainError("need r_max > r_min >= 1")
    if r_max > table.radii[-1]:
        raise DomainError(f"table covers r <= {table.radii[-1]}, "
                          f"asked for {r_max}")
    r = np.arange(r_min, r_max + 1, dtype=float)
    y = np.log(np.asarray(table.counts[r_min:r_max + 1], dtype=float))
    design = np.column_stack([np.log(r), np.ones_like(r)])
    (d, logc), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.max(np.abs(design @ np.array([d, logc]) - y)))
    return float(d), float(np.exp(logc)), resid


@dataclass(frozen=True)
class RobustnessReport:
    group: str
    radius: int
    fit_window: tuple
    exponents: tuple
    exponent_gap: float
    count_ratio_bounds: tuple
    coverage_ok: bool
    tables: tuple = field(repr=False, default=())


def generator_robustness(group, gens1, gens2, radius,
                         fit_window=None) -> RobustnessReport:
    """Fit the growth degree under two generating sets and compare.

    The degree is a quasi-isometry invariant, so the two exponents must
    agree closely (the report records their gap and the min/max ratio of
    ball counts as an empirical witness). Coverage is cross-checked: each
    set must reach, within ``radius``, everything the other reaches well
    inside it (half the radius); failing that the report flags the set as
    possibly non-generating.
    """
    t1 = word_ball(group, gens1, radius)
    t2 = word_ball(group, gens2, radius)
    lo, hi = fit_window if fit_window is not None \
        else (min(10, max(1, radius // 2)), radius)
    d1, _, _ = growth_fit(t1, lo, hi)
    d2, _, _ = growth_fit(t2, lo, hi)

    half = radius // 2
    law, _ = GROUP_LAWS[group]
    set1 = _ball_set(law, t1.generators, radius)
    set2 = _ball_set(law, t2.generators, radius)
    inner1 = _ball_set(law, t1.generators, half)
    inner2 = _ball_set(law, t2.generators, half)
    coverage_ok = inner1 <= set2 and inner2 <= set1
    if not coverage_ok:
        warnings.warn(f"a generating set for {group} misses elements the "
                      f"other reaches within radius {half}; it may not "
                      "generate the group", stacklevel=2)

    ratios = [c1 / c2 for c1, c2 in zip(t1.counts[1:], t2.counts[1:])]
    return RobustnessReport(group, radius, (lo, hi), (d1, d2),
                            abs(d1 - d2), (min(ratios), max(ratios)),
                            coverage_ok, (t1, t2))


def _ball_set(law, gens, radius):
    visited = {IDENTITY}
    frontier = [IDENTITY]
    for _ in range(radius):
        new = []
        for g in frontier:
            for s in gens:
                h = law(g, s)
                if h not in visited:
                    visited.add(h)
                    new.append(h)
        frontier = new
    return visited
