"""Deterministic composite-Simpson integration.

All quadrature in the package goes through this module: plain Simpson on a
closed interval, truncated improper integrals with a built-in enlarge-and-
recompute verification, and the nested (inner rho / middle rtilde / outer
tau) triple integral used by the viscous correction terms.  Panel counts
are node counts (odd), so a rule with ``panels`` nodes has ``panels - 1``
uniform intervals.  Sums are evaluated in a fixed order, making every
result bit-reproducible for a given policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PrecisionPolicy",
    "IntegrandError",
    "simpson",
    "simpson_weights",
    "simpson_from_samples",
    "prefix_integrals",
    "truncated_improper",
    "refined_panels",
    "iterated_triple",
]


class IntegrandError(ValueError):
    """An integrand produced a non-finite sample; carries the abscissa."""

    def __init__(self, message, abscissa):
        super().__init__(f"{message} at {abscissa}")
        self.abscissa = abscissa


@dataclass(frozen=True)
class PrecisionPolicy:
    """Truncation limits, node counts and tolerance ladder for the nested
    quadrature.  The inner integral runs over [0, inner_limit], the middle
    over [0, middle_limit], the outer over [0, t]; each level is verified
    by enlarging the truncated interval by refine_factor and refining the
    node count (inner/middle), or doubling the node count (outer), and
    requiring the result to move by less than the level's tolerance."""

    inner_limit: float = 200.0
    inner_panels: int = 4001
    inner_tol: float = 1e-14
    middle_limit: float = 20.0
    middle_panels: int = 201
    middle_tol: float = 1e-11
    outer_panels: int = 101
    outer_tol: float = 1e-5
    refine_factor: float = 1.5

    def __post_init__(self):
        if not (self.inner_tol < self.middle_tol < self.outer_tol):
            raise ValueError("tolerances must satisfy inner < middle < outer")
        for name in ("inner_panels", "middle_panels", "outer_panels"):
            p = getattr(self, name)
            if p < 3 or p % 2 == 0:
                raise ValueError(f"{name} must be an odd integer >= 3")
        if self.refine_factor <= 1.0:
            raise ValueError("refine_factor must exceed 1")


def refined_panels(panels: int, factor: float) -> int:
    """Scale the interval count by ``factor`` and return an odd node count
    (4001 -> 6001 at factor 1.5, 101 -> 201 at factor 2)."""
    intervals = int(round((panels - 1) * factor))
    if intervals % 2:
        intervals += 1
    return intervals + 1


def simpson_weights(panels: int, h: float) -> np.ndarray:
    """Composite Simpson weights for ``panels`` nodes at spacing ``h``."""
    if panels < 3 or panels % 2 == 0:
        raise ValueError("Simpson needs an odd number of nodes >= 3")
    w = np.full(panels, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def _sample(f, nodes):
    """Evaluate ``f`` on all nodes; tolerate scalar-only callables."""
    try:
        vals = np.asarray(f(nodes), dtype=float)
        if vals.shape != nodes.shape:
            raise ValueError
    except Exception:
        vals = np.array([float(f(x)) for x in nodes])
    if not np.all(np.isfinite(vals)):
        bad = nodes[~np.isfinite(vals)]
        raise IntegrandError("non-finite integrand sample", float(bad[0]))
    return vals


def simpson(f, a: float, b: float, panels: int) -> float:
    """Composite Simpson value of ``f`` over [a, b] on ``panels`` nodes.

    The weighted samples are added with exact (compensated) summation, so
    the value is independent of accumulation order and bit-reproducible.
    """
    if b < a:
        raise ValueError("integration bounds must satisfy a <= b")
    if b == a:
        return 0.0
    nodes = np.linspace(a, b, panels)
    vals = _sample(f, nodes)
    w = simpson_weights(panels, (b - a) / (panels - 1))
    return math.fsum(w * vals)


def simpson_from_samples(values, h: float, axis: int = -1) -> np.ndarray:
    """Composite Simpson of uniformly sampled values (odd count) along an
    axis; returns a scalar for 1-d input."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    w = simpson_weights(n, h)
    shape = [1] * values.ndim
    shape[axis] = n
    out = np.sum(values * w.reshape(shape), axis=axis)
    return float(out) if out.ndim == 0 else out


def prefix_integrals(values, h: float) -> np.ndarray:
    """Integrals from node 0 to every node of a uniform sample.

    Even target nodes use composite Simpson; odd targets >= 3 use Simpson
    on the leading even block plus a 3/8 rule on the final three intervals;
    node 1 falls back to the trapezoid (its integral is O(h), so the local
    O(h^3) defect is negligible at the policies in use).
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    out = np.zeros(n)
    if n >= 2:
        out[1] = 0.5 * h * (values[0] + values[1])
    for m in range(2, n):
        if m % 2 == 0:
            out[m] = math.fsum(simpson_weights(m + 1, h) * values[: m + 1])
        else:
            head = math.fsum(simpson_weights(m - 2, h) * values[: m - 2]) if m >= 5 else 0.0
            tail = (3.0 * h / 8.0) * math.fsum(
                [values[m - 3], 3.0 * values[m - 2], 3.0 * values[m - 1], values[m]]
            )
            out[m] = head + tail
    return out


def truncated_improper(f, limit: float, panels: int, tol: float,
                       refine_factor: float = 1.5):
    """Integrate a decaying ``f`` over [0, limit] and self-check.

    The integral is recomputed over [0, limit * refine_factor] with the
    interval count scaled by the same factor; ``verified`` reports whether
    the two values agree within ``tol``.  A failed check is reported, not
    fatal: callers decide what to do with an unverified tail.
    """
    value = simpson(f, 0.0, limit, panels)
    check = simpson(f, 0.0, limit * refine_factor,
                    refined_panels(panels, refine_factor))
    return value, bool(abs(check - value) <= tol)


def iterated_triple(kernel, t: float, policy: PrecisionPolicy,
                    inner_at_tau_t=None) -> float:
    """Nested Simpson: rho in [0, A1] inside rtilde in [0, A2] inside
    tau in [0, t].

    ``kernel(tau, rtilde, rho)`` is the full integrand and must broadcast
    over numpy arrays in its last two arguments.  At the outer endpoint
    tau == t the damping of the inner integrand is lost; when
    ``inner_at_tau_t(rtilde)`` is supplied, its (analytic) value replaces
    the inner quadrature on that single outer node.
    """
    if t < 0:
        raise ValueError("outer limit t must be non-negative")
    if t == 0.0:
        return 0.0
    taus = np.linspace(0.0, t, policy.outer_panels)
    rt = np.linspace(0.0, policy.middle_limit, policy.middle_panels)[:, None]
    rho = np.linspace(0.0, policy.inner_limit, policy.inner_panels)[None, :]
    w_rho = simpson_weights(policy.inner_panels,
                            policy.inner_limit / (policy.inner_panels - 1))
    w_rt = simpson_weights(policy.middle_panels,
                           policy.middle_limit / (policy.middle_panels - 1))

    outer_vals = np.empty(policy.outer_panels)
    for i, tau in enumerate(taus):
        if i == policy.outer_panels - 1 and inner_at_tau_t is not None:
            inner = np.asarray(inner_at_tau_t(rt[:, 0]), dtype=float)
        else:
            grid = np.asarray(kernel(tau, rt, rho), dtype=float)
            if not np.all(np.isfinite(grid)):
                j, k = np.argwhere(~np.isfinite(grid))[0]
                raise IntegrandError(
                    "non-finite triple-integrand sample",
                    (float(tau), float(rt[j, 0]), float(rho[0, k])),
                )
            inner = grid @ w_rho
        outer_vals[i] = inner @ w_rt
    w_tau = simpson_weights(policy.outer_panels, t / (policy.outer_panels - 1))
    return math.fsum(w_tau * outer_vals)
