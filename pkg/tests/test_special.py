import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from dimermahler.special import CONSTANTS, bipyramid_volume, bloch_wigner, dilog, lobachevsky

V_TET = 1.0149416064096536  # mpmath: Im Li2(e^{i pi/3})
V_OCT = 3.663862376708876  # 8 * Catalan's constant

D = bloch_wigner


def _random_points(seed: int, count: int, radius: float = 3.0) -> list[complex]:
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        if abs(z) > 1e-3 and abs(z - 1) > 1e-3 and abs(z.imag) > 1e-6:
            pts.append(z)
    return pts


def _mp_dilog(z: complex) -> complex:
    # mpmath takes the lower limit on the cut; we take the upper one
    if z.imag == 0 and z.real > 1:
        return complex(mpmath.polylog(2, z)).conjugate()
    return complex(mpmath.polylog(2, z))


# dilog against mpmath


@pytest.mark.parametrize("z", [0.5, -1, 0.3 + 0.4j, 2j, -5 + 0.1j, 0.9 - 0.2j, 1 + 1e-9j, cmath.exp(1j)])
def test_dilog_matches_mpmath(z):
    assert abs(dilog(z) - _mp_dilog(z)) <= 1e-14 * max(1, abs(_mp_dilog(z)))


def test_dilog_random_points_match_mpmath():
    for z in _random_points(11, 300, radius=6):
        ref = _mp_dilog(z)
        assert abs(dilog(z) - ref) <= 1e-13 * max(1, abs(ref))


def test_dilog_special_values():
    assert dilog(0) == 0
    assert dilog(1) == pytest.approx(math.pi ** 2 / 6, abs=1e-15)
    assert dilog(-1).real == pytest.approx(-math.pi ** 2 / 12, abs=1e-14)
    # integral definition at z = -1
    ref, _ = quad(lambda t: -math.log(1 + t) / t, 0, 1, epsabs=1e-14)
    assert dilog(-1).real == pytest.approx(ref, abs=1e-12)


def test_dilog_on_cut_is_upper_limit():
    x = 3.0
    assert dilog(x).imag == pytest.approx(math.pi * math.log(x), abs=1e-13)
    assert abs(dilog(x) - dilog(complex(x, 1e-12))) < 1e-9


# Bloch-Wigner identities


def test_bloch_wigner_values():
    assert D(1j) == pytest.approx(V_OCT / 4, abs=1e-13)
    assert D(cmath.exp(1j * math.pi / 3)) == pytest.approx(V_TET, abs=1e-13)
    assert D(0) == D(1) == D(2.5) == D(-4) == 0.0


def test_five_term_relation():
    rng = np.random.default_rng(5)
    worst = 0.0
    count = 0
    while count < 250:
        x = complex(*rng.uniform(-1, 1, 2))
        y = complex(*rng.uniform(-1, 1, 2))
        if abs(x) >= 1 or abs(y) >= 1 or abs(1 - x * y) < 1e-3:
            continue
        s = D(x) + D(y) + D(1 - x * y) + D((1 - x) / (1 - x * y)) + D((1 - y) / (1 - x * y))
        worst = max(worst, abs(s))
        count += 1
    assert worst <= 1e-10


def test_inversion_and_reflection():
    pts = _random_points(6, 250)
    assert max(abs(D(1 / z) + D(z)) for z in pts) <= 1e-10
    assert max(abs(D(1 - z) + D(z)) for z in pts) <= 1e-10


def test_conjugation():
    pts = _random_points(7, 250)
    assert max(abs(D(z.conjugate()) + D(z)) for z in pts) <= 1e-12


def test_duplication():
    pts = _random_points(8, 250)
    assert max(abs(2 * D(z) + 2 * D(-z) - D(z * z)) for z in pts) <= 1e-10


def test_unit_circle_decomposition():
    pts = _random_points(9, 250)

    def rhs(z):
        zb = z.conjugate()
        return 0.5 * (D(z / zb) + D((1 - 1 / z) / (1 - 1 / zb)) + D((1 / (1 - z)) / (1 / (1 - zb))))

    assert max(abs(D(z) - rhs(z)) for z in pts) <= 1e-10


@pytest.mark.parametrize("r", [2 + math.sqrt(3), 1 + math.sqrt(2), 5.0])
def test_argument_integral_closed_form(r):
    # total change of arg((1 + r w)/(1 - r w)) along the unit circle from i through -1 to -i
    def integrand(t):
        w = cmath.exp(1j * t)
        return (1j * w * (r / (1 + r * w) + r / (1 - r * w))).imag

    value, _ = quad(integrand, math.pi / 2, 3 * math.pi / 2, epsabs=1e-12, epsrel=1e-12, limit=200)
    assert abs(value - 2 * math.atan(2 / (r - 1 / r))) <= 1e-9


# Lobachevsky function and bipyramids


def _lobachevsky_quad(theta: float) -> float:
    value, _ = quad(lambda t: -math.log(abs(2 * math.sin(t))), 0, theta, epsabs=1e-13, limit=200)
    return value


@pytest.mark.parametrize("theta", [0.1, 0.5, math.pi / 6, math.pi / 3, 1.2, 2.0, 3.0])
def test_lobachevsky_matches_quadrature(theta):
    assert lobachevsky(theta) == pytest.approx(_lobachevsky_quad(theta), abs=1e-11)


def test_lobachevsky_periodic_and_odd():
    assert lobachevsky(0) == 0
    assert abs(lobachevsky(math.pi)) <= 1e-15
    for t in (0.3, 1.1, 2.5):
        assert lobachevsky(t + math.pi) == pytest.approx(lobachevsky(t), abs=1e-12)
        assert lobachevsky(-t) == pytest.approx(-lobachevsky(t), abs=1e-12)
    assert 3 * lobachevsky(math.pi / 3) == pytest.approx(V_TET, abs=1e-12)
    assert 3 * lobachevsky(math.pi / 3) == pytest.approx(D(cmath.exp(1j * math.pi / 3)), abs=1e-12)


def test_bipyramid_volumes():
    assert bipyramid_volume(2) == 0
    assert bipyramid_volume(3) == pytest.approx(2 * V_TET, abs=1e-12)
    assert bipyramid_volume(4) == pytest.approx(V_OCT, abs=1e-12)
    # the printed value 7.8549 is truncated, not rounded
    assert 7.8549 <= bipyramid_volume(8) < 7.8550
    with pytest.raises(ValueError):
        bipyramid_volume(1)


def test_bipyramid_volume_by_quadrature():
    for n in (3, 5, 8, 13):
        t1 = _lobachevsky_quad(2 * math.pi / n)
        t2 = _lobachevsky_quad(math.pi * (n - 2) / (2 * n))
        assert bipyramid_volume(n) == pytest.approx(n * (t1 + 2 * t2), abs=1e-10)


def test_bipyramid_volume_increasing():
    vols = [bipyramid_volume(n) for n in range(3, 33)]
    assert all(b > a for a, b in zip(vols, vols[1:]))


def test_constants():
    assert CONSTANTS.v_tet == pytest.approx(V_TET, abs=1e-14)
    assert CONSTANTS.v_oct == pytest.approx(V_OCT, abs=1e-14)
    assert CONSTANTS.v_16 == pytest.approx(bipyramid_volume(8), abs=0)
