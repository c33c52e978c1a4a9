"""Dilogarithms, the Lobachevsky function and ideal bipyramid volumes.

Branch conventions: principal logarithm and a cut for ``dilog`` along
[1, inf).  On the cut we return the limit from the upper half plane, so
``Im dilog(x) = pi*log(x)`` for real ``x > 1``.  The Bloch-Wigner function
does not depend on this choice.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "VolumeConstants",
    "CONSTANTS",
    "dilog",
    "bloch_wigner",
    "lobachevsky",
    "bipyramid_volume",
]

PI2_6 = math.pi ** 2 / 6


@lru_cache(maxsize=1)
def _bernoulli_coefficients(count: int = 40) -> tuple[float, ...]:
    # B_k / (k+1)! for the series Li2(z) = sum B_k u^(k+1)/(k+1)!, u = -log(1-z)
    from fractions import Fraction

    b = [Fraction(1)]
    for m in range(1, count):
        s = sum(math.comb(m + 1, k) * b[k] for k in range(m))
        b.append(-s / (m + 1))
    return tuple(float(b[k] / math.factorial(k + 1)) for k in range(count))


def _dilog_series(z: complex) -> complex:
    # valid for |z| <= 1 and Re z <= 1/2, where |u| <= ~1.1
    u = -cmath.log(1 - z)
    u2 = u * u
    coeffs = _bernoulli_coefficients()
    # B_1 term is the only odd-index Bernoulli number that is nonzero
    total = u + coeffs[1] * u2
    power = u * u2  # u^3
    for k in range(2, len(coeffs), 2):
        term = coeffs[k] * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        power *= u2
    return total


def dilog(z: complex) -> complex:
    """Principal branch of Li2(z) = -int_0^z log(1-t)/t dt."""
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6)
    on_cut = z.imag == 0 and z.real > 1
    if abs(z) > 1:
        # inversion: Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        if on_cut:
            # log(-z) for the upper limit z + i0
            lz = complex(math.log(z.real), -math.pi)
        else:
            lz = cmath.log(-z)
        return -dilog(1 / z) - PI2_6 - 0.5 * lz * lz
    if z.real > 0.5:
        # reflection: Li2(z) = pi^2/6 - log(z) log(1-z) - Li2(1-z)
        return PI2_6 - cmath.log(z) * cmath.log(1 - z) - _dilog_series(1 - z)
    return _dilog_series(z)


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1-z) log|z|, with D(0) = D(1) = 0."""
    z = complex(z)
    if z == 0 or z == 1:
        return 0.0
    if z.imag == 0:
        return 0.0
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def lobachevsky(theta: float) -> float:
    """Lambda(theta) = -int_0^theta log|2 sin t| dt = Im Li2(e^{2 i theta}) / 2."""
    t = math.fmod(theta, math.pi)
    if t == 0:
        return 0.0
    return 0.5 * dilog(cmath.exp(2j * t)).imag


def bipyramid_volume(n: int) -> float:
    """Volume of the regular ideal hyperbolic bipyramid over an n-gon."""
    if n < 2:
        raise ValueError("bipyramids need n >= 2")
    if n == 2:
        return 0.0
    return n * (lobachevsky(2 * math.pi / n) + 2 * lobachevsky(math.pi / 2 - math.pi / n))


@dataclass(frozen=True)
class VolumeConstants:
    v_tet: float
    v_oct: float
    v_16: float


CONSTANTS = VolumeConstants(
    v_tet=bipyramid_volume(3) / 2,
    v_oct=bipyramid_volume(4),
    v_16=bipyramid_volume(8),
)
