"""Numerical (logarithmic) Mahler measures.

One variable: Jensen's formula on numerically computed roots of the
squarefree factors.  Two variables: Jensen in the solved variable turns
m(P) into the average over the unit circle of the fiber measure

    f(x) = m(P(x, .)) = log|P*(x)| + sum_j log+|y_j(x)|,

a continuous, piecewise smooth function of x, which we integrate with adaptive
composite Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laurent import LaurentPoly2, UnivariatePoly, face_polynomials

__all__ = [
    "MahlerEstimate",
    "MahlerConfig",
    "mahler_univariate",
    "fiber_roots",
    "fiber_measure",
    "mahler_bivariate",
    "boyd_lawton_slice",
    "smyth_lower_bound",
]


@dataclass(frozen=True)
class MahlerEstimate:
    value: float
    error_bound: float
    fiber_evaluations: int = 0
    panels_used: int = 0
    converged: bool = True

    @property
    def two_pi(self) -> float:
        return 2 * math.pi * self.value

    @property
    def two_pi_error(self) -> float:
        return 2 * math.pi * self.error_bound


@dataclass(frozen=True)
class MahlerConfig:
    precision: float = 1e-8
    budget: int = 2_000_000
    panels_init: int = 16
    order: int = 20
    solve_for: str | None = None  # "z", "w" or None for the lower degree


DEFAULT_CONFIG = MahlerConfig()
ROUNDOFF = 1e-13


# ---------------------------------------------------------------------------
# One variable


def _trim(coeffs: list) -> list:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def squarefree_decomposition(coeffs: list[int]) -> list[tuple[list[int], int]]:
    """Primitive squarefree factors f_i (low degree first) with p = c * prod f_i^i."""
    import sympy

    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(_trim(coeffs))), t, domain="ZZ")
    _, factors = poly.sqf_list()
    return [([int(c) for c in reversed(f.all_coeffs())], mult) for f, mult in factors]


def _polished_roots(coeffs_low_first: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Roots of a squarefree polynomial and per-root error estimates."""
    c = np.asarray(coeffs_low_first, dtype=complex)
    if len(c) <= 1:
        return np.zeros(0, complex), np.zeros(0)
    roots = np.roots(c[::-1])
    dc = np.array([k * c[k] for k in range(1, len(c))])
    err = np.zeros(len(roots))
    for _ in range(3):
        val = np.polyval(c[::-1], roots)
        der = np.polyval(dc[::-1], roots)
        ok = der != 0
        step = np.zeros_like(roots)
        step[ok] = val[ok] / der[ok]
        roots = roots - step
        err = np.abs(step)
    val = np.polyval(c[::-1], roots)
    der = np.polyval(dc[::-1], roots)
    with np.errstate(divide="ignore", invalid="ignore"):
        newton = np.where(der != 0, np.abs(val / der), np.abs(roots) * 1e-8)
    return roots, np.maximum(err, newton)


def mahler_univariate(p: UnivariatePoly | list[int] | tuple[int, ...]) -> MahlerEstimate:
    """log|leading coefficient| + sum of log|alpha| over roots outside the unit disk."""
    coeffs = list(p.coefficients) if isinstance(p, UnivariatePoly) else _trim([int(c) for c in p])
    if not coeffs:
        raise ValueError("the zero polynomial has no Mahler measure")
    while coeffs[0] == 0:
        coeffs.pop(0)
    value = math.log(abs(coeffs[-1]))
    bound = 0.0
    evaluations = 0
    for factor, mult in squarefree_decomposition(coeffs):
        # the roots of p are the roots of the f_i, counted i times
        roots, err = _polished_roots(np.array([float(c) for c in factor]))
        evaluations += len(roots)
        mags = np.abs(roots)
        value += mult * float(np.sum(np.log(mags[mags > 1])))
        near = mags + err > 1
        bound += mult * float(np.sum(err[near] / np.maximum(mags[near] - err[near], 1e-300)))
    bound += 4e-16 * max(1.0, abs(value))
    return MahlerEstimate(value, bound, evaluations, 0)


# ---------------------------------------------------------------------------
# Two variables


class _FiberPlan:
    """Coefficients of P as a polynomial in the solved variable y over Laurent x."""

    def __init__(self, p: LaurentPoly2, solve_for: str):
        if p.is_zero():
            raise ValueError("the zero polynomial has no Mahler measure")
        yi = 1 if solve_for == "w" else 0
        xi = 1 - yi
        support = p.support()
        ymin = min(e[yi] for e in support)
        xmin = min(e[xi] for e in support)
        self.degree = max(e[yi] for e in support) - ymin
        xspan = max(e[xi] for e in support) - xmin
        table = np.zeros((self.degree + 1, xspan + 1))
        for e, c in p.items():
            table[e[yi] - ymin, e[xi] - xmin] = c
        self.table = table
        self.solve_for = solve_for

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Array of shape (len(x), degree+1): coefficient of y^k at each x."""
        powers = x[:, None] ** np.arange(self.table.shape[1])[None, :]
        return powers @ self.table.T


def _measure_rows(coeffs: np.ndarray, polish: bool = True) -> np.ndarray:
    """Fiber Mahler measures for a batch of coefficient rows (low degree first)."""
    n, width = coeffs.shape
    out = np.empty(n)
    scale = np.max(np.abs(coeffs), axis=1)
    if np.any(scale == 0):
        raise ValueError("the polynomial vanishes identically on a fiber")
    # orient each row so its leading coefficient is the larger end coefficient;
    # reversing maps roots y -> 1/y and leaves the fiber measure unchanged
    flip = np.abs(coeffs[:, 0]) > np.abs(coeffs[:, -1])
    c = np.where(flip[:, None], coeffs[:, ::-1], coeffs)
    tiny = 1e-14 * scale
    # drop negligible leading coefficients (only possible when both ends vanish)
    deg = np.full(n, width - 1)
    for k in range(width - 1, 0, -1):
        small = (deg == k) & (np.abs(c[np.arange(n), k]) <= tiny)
        deg[small] -= 1
    for d in np.unique(deg):
        rows = np.nonzero(deg == d)[0]
        out[rows] = _measure_fixed_degree(c[rows, : d + 1], polish)
    return out


def _log_plus_sum(roots: np.ndarray) -> np.ndarray:
    mags = np.abs(roots)
    with np.errstate(divide="ignore"):
        return np.sum(np.where(mags > 1, np.log(np.maximum(mags, 1)), 0.0), axis=1)


def _measure_fixed_degree(c: np.ndarray, polish: bool) -> np.ndarray:
    lead = c[:, -1]
    base = np.log(np.abs(lead))
    d = c.shape[1] - 1
    if d == 0:
        return base
    if d == 1:
        root = -c[:, 0] / lead
        return base + np.log(np.maximum(np.abs(root), 1))
    if d == 2:
        a, b, cc = lead, c[:, 1], c[:, 0]
        disc = np.sqrt(b * b - 4 * a * cc)
        # pick the sign avoiding cancellation
        sgn = np.where((np.conj(b) * disc).real >= 0, 1.0, -1.0)
        q = -0.5 * (b + sgn * disc)
        r1 = np.where(q != 0, q / a, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(q != 0, cc / q, 0)
        roots = np.stack([r1, r2], axis=1)
        return base + _log_plus_sum(roots)
    monic = c[:, :-1] / lead[:, None]
    comp = np.zeros((len(c), d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -monic
    roots = np.linalg.eigvals(comp)
    if polish:
        roots = _newton_step(c, roots)
    return base + _log_plus_sum(roots)


def _newton_step(c: np.ndarray, roots: np.ndarray) -> np.ndarray:
    d = c.shape[1] - 1
    val = np.zeros_like(roots)
    der = np.zeros_like(roots)
    for k in range(d, -1, -1):
        der = der * roots + val
        val = val * roots + c[:, k][:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        step = val / der
    ok = np.isfinite(step) & (np.abs(step) < 1e-3 * np.maximum(np.abs(roots), 1))
    return np.where(ok, roots - step, roots)


def _choose_variable(p: LaurentPoly2, solve_for: str | None) -> str:
    if solve_for in ("z", "w"):
        return solve_for
    if solve_for is not None:
        raise ValueError("solve_for must be 'z' or 'w'")
    zlo, zhi = p.degree_range(0)
    wlo, whi = p.degree_range(1)
    return "w" if whi - wlo <= zhi - zlo else "z"


def fiber_roots(p: LaurentPoly2, x: complex, solve_for: str = "w") -> tuple[np.ndarray, complex]:
    """Roots in the solved variable of P at the given x, plus the leading coefficient P*(x)."""
    plan = _FiberPlan(p, solve_for)
    c = plan.coefficients(np.array([complex(x)]))[0]
    if np.max(np.abs(c)) == 0:
        raise ValueError("the polynomial vanishes identically on this fiber")
    nz = np.nonzero(np.abs(c) > 1e-14 * np.max(np.abs(c)))[0]
    c = c[: nz[-1] + 1]
    roots = np.roots(c[::-1]) if len(c) > 1 else np.zeros(0, complex)
    return roots, complex(c[-1])


def fiber_measure(p: LaurentPoly2, theta: np.ndarray, solve_for: str | None = None) -> np.ndarray:
    """m(P(e^{i theta}, .)) for an array of angles."""
    plan = _FiberPlan(p, _choose_variable(p, solve_for))
    return _measure_rows(plan.coefficients(np.exp(1j * np.asarray(theta, dtype=float))))


@dataclass
class _Panel:
    a: float
    b: float
    whole: float
    left: float
    right: float

    @property
    def fine(self) -> float:
        return self.left + self.right

    @property
    def error(self) -> float:
        return abs(self.left + self.right - self.whole)


def mahler_bivariate(
    p: LaurentPoly2,
    precision: float | None = None,
    config: MahlerConfig = DEFAULT_CONFIG,
) -> MahlerEstimate:
    """Adaptive quadrature of the fiber measure over theta in [0, pi], doubled."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no Mahler measure")
    tol = config.precision if precision is None else precision
    if p.is_monomial():
        c = next(iter(p.terms.values()))
        return MahlerEstimate(math.log(abs(c)), 0.0, 0, 0)
    plan = _FiberPlan(p, _choose_variable(p, config.solve_for))
    if plan.degree == 0:
        # P = y^k * g(x): a one-variable measure in disguise
        coeffs = [int(c) for c in plan.table[0]]
        return mahler_univariate(UnivariatePoly(tuple(coeffs)))

    nodes, weights = np.polynomial.legendre.leggauss(config.order)
    # integrand is symmetric under theta -> -theta for real coefficients, so
    # m = (1/pi) * int_0^pi f
    evaluations = 0

    def integrate(intervals: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        a, b = intervals[:, 0], intervals[:, 1]
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        theta = mid[:, None] + half[:, None] * nodes[None, :]
        vals = _measure_rows(plan.coefficients(np.exp(1j * theta.ravel())))
        evaluations += vals.size
        return half * (vals.reshape(theta.shape) @ weights)

    def make_panels(intervals: np.ndarray) -> list[_Panel]:
        a, b = intervals[:, 0], intervals[:, 1]
        m = 0.5 * (a + b)
        stacked = np.concatenate([intervals, np.stack([a, m], 1), np.stack([m, b], 1)])
        q = integrate(stacked)
        k = len(intervals)
        return [_Panel(a[i], b[i], q[i], q[k + i], q[2 * k + i]) for i in range(k)]

    edges = np.linspace(0.0, math.pi, config.panels_init + 1)
    panels = make_panels(np.stack([edges[:-1], edges[1:]], 1))
    scale = 1.0 / math.pi

    def total_error(ps):
        return 2 * scale * math.fsum(pn.error for pn in ps)

    converged = True
    while total_error(panels) > tol:
        if evaluations >= config.budget:
            converged = False
            break
        errs = np.array([pn.error for pn in panels])
        # refine every panel carrying a sizeable share of the error
        cutoff = max(errs.max() * 0.05, tol * math.pi / (8 * len(panels)))
        chosen = [i for i, e in enumerate(errs) if e >= cutoff]
        # budget guard: each refined panel costs 6*order evaluations
        room = max(1, (config.budget - evaluations) // (6 * config.order))
        if len(chosen) > room:
            chosen = sorted(chosen, key=lambda i: -errs[i])[:room]
        chosen_set = set(chosen)
        halves = []
        for i in chosen:
            pn = panels[i]
            mid = 0.5 * (pn.a + pn.b)
            halves.append((pn.a, mid))
            halves.append((mid, pn.b))
        new = make_panels(np.array(halves))
        merged = []
        j = 0
        for i, pn in enumerate(panels):
            if i in chosen_set:
                merged.extend(new[j : j + 2])
                j += 2
            else:
                merged.append(pn)
        panels = merged

    value = scale * math.fsum(pn.fine for pn in panels)
    # floating-point floor: panel disagreement can vanish on smooth integrands
    bound = total_error(panels) + ROUNDOFF * max(1.0, abs(value))
    return MahlerEstimate(value, bound, evaluations, len(panels), converged)


def boyd_lawton_slice(p: LaurentPoly2, n: int) -> MahlerEstimate:
    """m(p(t, t^n)), which tends to m(p) as n grows."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no Mahler measure")
    if n < 1:
        raise ValueError("n must be positive")
    coeffs: dict[int, int] = {}
    for (a, b), c in p.items():
        coeffs[a + n * b] = coeffs.get(a + n * b, 0) + c
    coeffs = {k: v for k, v in coeffs.items() if v}
    if not coeffs:
        raise ValueError(f"p(t, t^{n}) vanishes identically")
    low = min(coeffs)
    dense = [0] * (max(coeffs) - low + 1)
    for k, v in coeffs.items():
        dense[k - low] = v
    return mahler_univariate(UnivariatePoly(tuple(dense)))


def smyth_lower_bound(p: LaurentPoly2) -> float:
    """Largest Mahler measure among the face polynomials of the Newton polygon."""
    faces = face_polynomials(p)
    if not faces:
        # a monomial: the bound is log|c|
        return math.log(abs(next(iter(p.terms.values()))))
    return max(mahler_univariate(f).value for _, f in faces)
