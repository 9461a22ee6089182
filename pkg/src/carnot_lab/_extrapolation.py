"""Richardson extrapolation for sequences with geometric step schedules."""

import numpy as np

from .errors import ConvergenceError


def richardson_limit(values, ratio=2.0, tol=1e-9, what="sequence"):
    """Extrapolate ``values[k] = L + c1*h_k + c2*h_k^2 + ...`` to h -> 0.

    ``values`` must be evaluated on steps h_k shrinking by ``ratio`` per
    index. Returns (limit, diagnostics) where diagnostics holds the
    diagonal of the tableau and the estimated leading order. Raises
    ConvergenceError if the last two diagonal entries disagree by more
    than ``tol`` (absolute, or relative for large limits).
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or len(vals) < 3:
        raise ValueError("need at least 3 sequence values to extrapolate")
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError(f"{what}: non-finite terms in schedule")
    row = vals.copy()
    diagonal = [row[0]]
    m = len(vals)
    for j in range(1, m):
        fac = ratio ** j
        row = (fac * row[1:] - row[:-1]) / (fac - 1.0)
        diagonal.append(row[0])
        if len(row) >= 2 and j >= 2:
            a, b = diagonal[-2], diagonal[-1]
            scale = max(1.0, abs(b))
            if abs(a - b) <= tol * scale:
                order = _leading_order(vals, ratio)
                return b, {"diagonal": diagonal, "order": order}
    a, b = diagonal[-2], diagonal[-1]
    if abs(a - b) <= tol * max(1.0, abs(b)):
        return b, {"diagonal": diagonal, "order": _leading_order(vals, ratio)}
    raise ConvergenceError(
        f"{what}: extrapolants did not stabilize "
        f"(last gap {abs(a - b):.3e} > tol {tol:.1e})")


def _leading_order(vals, ratio):
    # slope of successive differences; order p gives diff ratio ~ ratio^p
    d = np.abs(np.diff(vals))
    good = d > 0
    if good.sum() < 2:
        return float("inf")  # already exact
    d = d[good]
    r = d[:-1] / d[1:]
    r = r[(r > 0) & np.isfinite(r)]
    if len(r) == 0:
        return float("nan")
    return float(np.median(np.log(r) / np.log(ratio)))
