"""Catalog of links on the torus, closed-form Mahler measures and the
bipyramid volume inequality ``vol_diamond(L) <= 2 pi m(p)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable

from .dimer import ToroidalGraph, load_graph
from .laurent import LaurentPoly2, parse_poly
from .mahler import MahlerConfig, MahlerEstimate, mahler_bivariate, smyth_lower_bound
from .special import CONSTANTS, bipyramid_volume, bloch_wigner

__all__ = [
    "FaceVector",
    "LinkRecord",
    "ConjectureReport",
    "CnRow",
    "ComparisonRow",
    "EQUALITY_TOLERANCE",
    "CLOSED_FORMS",
    "parse_manifest",
    "builtin_links",
    "get_link",
    "bipyramid_volume_of",
    "closed_form_2pi_m",
    "cn_polynomial",
    "cn_record",
    "cn_table",
    "verify_conjecture",
    "comparison_table",
    "TABLE_CN_REFERENCE",
]

EQUALITY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class FaceVector:
    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for deg, cnt in self.counts:
            if deg < 2:
                raise ValueError(f"face degree {deg} is below 2")
            if cnt < 1:
                raise ValueError(f"face multiplicity {cnt} is not positive")

    @classmethod
    def from_dict(cls, counts: dict[int, int]) -> FaceVector:
        return cls(tuple(sorted((int(d), int(c)) for d, c in counts.items())))

    @classmethod
    def parse(cls, text: str) -> FaceVector:
        counts: dict[int, int] = {}
        for item in text.split():
            deg, _, cnt = item.partition(":")
            counts[int(deg)] = counts.get(int(deg), 0) + int(cnt or 1)
        return cls.from_dict(counts)

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    def total_degree(self) -> int:
        return sum(d * c for d, c in self.counts)

    def __str__(self) -> str:
        return " ".join(f"{d}:{c}" for d, c in self.counts)


def bipyramid_volume_of(fv: FaceVector | dict[int, int]) -> float:
    if isinstance(fv, dict):
        fv = FaceVector.from_dict(fv)
    return math.fsum(c * bipyramid_volume(d) for d, c in fv.counts)


# ---------------------------------------------------------------------------
# Closed forms, all for 2 pi m(p)


def _weave() -> float:
    return 8 * bloch_wigner(1j)


def _triaxial() -> float:
    return 10 * bloch_wigner(cmath.exp(1j * math.pi / 3))


def _rhombitrihexagonal() -> float:
    return 2 * math.pi * math.log(6) + 10 * CONSTANTS.v_tet


def _c0() -> float:
    r = 2 + math.sqrt(3)
    return 16 * bloch_wigner(r * 1j) + (8 * math.pi / 3) * math.log(r)


def _c1() -> float:
    r = 1 + math.sqrt(2)
    return 16 * bloch_wigner(r * 1j) + 2 * math.pi * math.log(r)


def _k884() -> float:
    s = cmath.sqrt(7 + 4 * math.sqrt(2) * 1j) / 3
    return (
        math.acos(-7 / 9) * math.log(17 + 12 * math.sqrt(2))
        + 8 * bloch_wigner(1j)
        + 4 * bloch_wigner(s)
        - 4 * bloch_wigner(-s)
    )


CLOSED_FORMS: dict[str, Callable[[], float]] = {
    "weave": _weave,
    "triaxial": _triaxial,
    "rhombitrihexagonal": _rhombitrihexagonal,
    "C0": _c0,
    "C1": _c1,
    "K": _k884,
    "figure_eight_volume": lambda: 2 * CONSTANTS.v_tet,
    "twice_figure_eight_volume": lambda: 4 * CONSTANTS.v_tet,
}


# ---------------------------------------------------------------------------
# Records


@dataclass(frozen=True)
class LinkRecord:
    name: str
    charpoly: LaurentPoly2
    title: str = ""
    kind: str = "link"
    aliases: tuple[str, ...] = ()
    graph_file: str | None = None
    face_vector: FaceVector | None = None
    closed_form: str | None = None
    crossings: int | None = None
    reference_m: float | None = None
    reference_vol_diamond: float | None = None
    reference_two_pi_m: float | None = None
    reference_hyperbolic_volume: float | None = None

    @property
    def graph(self) -> ToroidalGraph | None:
        if self.graph_file is None:
            return None
        return _load_data_graph(self.graph_file)


@lru_cache(maxsize=None)
def _load_data_graph(filename: str) -> ToroidalGraph:
    text = resources.files("dimermahler").joinpath("data", filename).read_text()
    return load_graph(text)


def parse_manifest(text: str) -> list[dict[str, str]]:
    records: list[dict[str, str]] = []
    current: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                records.append(current)
                current = {}
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"manifest line {lineno}: expected 'key: value'")
        current[key.strip()] = value.strip()
    if current:
        records.append(current)
    return records


def _record_from_fields(f: dict[str, str]) -> LinkRecord:
    def num(key):
        return float(f[key]) if key in f else None

    return LinkRecord(
        name=f["name"],
        charpoly=parse_poly(f["charpoly"]),
        title=f.get("title", ""),
        kind=f.get("kind", "link"),
        aliases=tuple(f.get("aliases", "").split()),
        graph_file=f.get("graph"),
        face_vector=FaceVector.parse(f["face_vector"]) if "face_vector" in f else None,
        closed_form=f.get("closed_form"),
        crossings=int(f["crossings"]) if "crossings" in f else None,
        reference_m=num("reference_m"),
        reference_vol_diamond=num("reference_vol_diamond"),
        reference_two_pi_m=num("reference_two_pi_m"),
        reference_hyperbolic_volume=num("reference_hyperbolic_volume"),
    )


@lru_cache(maxsize=1)
def builtin_links() -> tuple[LinkRecord, ...]:
    text = resources.files("dimermahler").joinpath("data", "catalog.manifest").read_text()
    return tuple(_record_from_fields(f) for f in parse_manifest(text))


def get_link(name: str) -> LinkRecord:
    for rec in builtin_links():
        if name == rec.name or name in rec.aliases:
            return rec
    if name.startswith("C") and name[1:].isdigit():
        return cn_record(int(name[1:]))
    raise KeyError(name)


def closed_form_2pi_m(link: LinkRecord) -> float:
    if link.closed_form is None:
        raise KeyError(f"no closed form registered for {link.name!r}")
    return CLOSED_FORMS[link.closed_form]()


# ---------------------------------------------------------------------------
# The C_n family


def cn_polynomial(n: int) -> LaurentPoly2:
    """(1 + w^2)(1 - z)^(n+1) + (-1)^n w sum_j C(2n+4, 2j+1) z^j."""
    if n < 0:
        raise ValueError("n must be non-negative")
    z, w = LaurentPoly2.z(), LaurentPoly2.w()
    tail = LaurentPoly2({(j, 1): (-1) ** n * math.comb(2 * n + 4, 2 * j + 1) for j in range(n + 2)})
    return (1 + w * w) * (1 - z) ** (n + 1) + tail


# Table values of 2 pi m(p_{C_n}); rows 9 and 11 are printed to four decimals.
TABLE_CN_REFERENCE: dict[int, tuple[float, float]] = {
    2: (24.80486557, 24.96932402),
    3: (32.13259032, 32.27389896),
    4: (39.46031507, 39.61527996),
    5: (46.78803983, 46.93541034),
    6: (54.11576458, 54.26836944),
    7: (61.44348933, 61.59270586),
    8: (68.77121409, 68.92297116),
    9: (76.09893884, 76.2489),
    10: (83.42666359, 83.57804426),
    11: (90.75438835, 90.9047),
    12: (98.08211310, 98.23330183),
}
TABLE_CN_TOLERANCE = {9: 5e-4, 11: 5e-4}


def cn_record(n: int) -> LinkRecord:
    counts = {3: 2, 6: 1}
    if n:
        counts[4] = 2 * n
    reference = TABLE_CN_REFERENCE.get(n)
    return LinkRecord(
        name=f"C{n}",
        charpoly=cn_polynomial(n),
        title=f"C_{n} family member",
        face_vector=FaceVector.from_dict(counts),
        crossings=3 + 2 * n,
        reference_two_pi_m=reference[1] if reference else None,
    )


@dataclass(frozen=True)
class CnRow:
    n: int
    vol_diamond: float
    two_pi_m: float
    two_pi_m_error: float
    converged: bool
    reference_vol_diamond: float | None
    reference_two_pi_m: float | None
    tolerance: float

    @property
    def passed(self) -> bool | None:
        if self.reference_two_pi_m is None:
            return None
        return (
            self.converged
            and abs(self.two_pi_m - self.reference_two_pi_m) <= self.tolerance
            and abs(self.vol_diamond - self.reference_vol_diamond) <= 1e-8
        )


def cn_table(n_min: int, n_max: int, precision: float | None = None, config: MahlerConfig = MahlerConfig()) -> list[CnRow]:
    if not 0 <= n_min <= n_max:
        raise ValueError("need 0 <= n_min <= n_max")
    rows = []
    for n in range(n_min, n_max + 1):
        rec = cn_record(n)
        est = mahler_bivariate(rec.charpoly, precision, config)
        reference = TABLE_CN_REFERENCE.get(n, (None, None))
        rows.append(
            CnRow(
                n=n,
                vol_diamond=10 * CONSTANTS.v_tet + 2 * n * CONSTANTS.v_oct,
                two_pi_m=est.two_pi,
                two_pi_m_error=est.two_pi_error,
                converged=est.converged,
                reference_vol_diamond=reference[0],
                reference_two_pi_m=reference[1],
                tolerance=TABLE_CN_TOLERANCE.get(n, 1e-6),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# The inequality


@dataclass(frozen=True)
class ConjectureReport:
    name: str
    vol_diamond: float
    two_pi_m: float
    two_pi_m_error: float
    margin: float
    status: str
    closed_form: float | None = None


def _status(margin: float, error: float, tol: float = EQUALITY_TOLERANCE) -> str:
    if abs(margin) <= error + tol:
        return "holds-equality-within-tol" if error <= tol else "inconclusive"
    if margin > error:
        return "holds-strict"
    if margin < -error:
        return "violated"
    return "inconclusive"


def verify_conjecture(
    link: LinkRecord,
    precision: float | None = None,
    config: MahlerConfig = MahlerConfig(),
    estimate: MahlerEstimate | None = None,
) -> ConjectureReport:
    if link.face_vector is not None:
        vol = bipyramid_volume_of(link.face_vector)
    elif link.reference_vol_diamond is not None:
        vol = link.reference_vol_diamond
    else:
        raise ValueError(f"{link.name!r} has neither a face vector nor a bipyramid volume")
    est = estimate or mahler_bivariate(link.charpoly, precision, config)
    error = est.two_pi_error
    if not est.converged:
        error = max(error, 1.0)
    closed = closed_form_2pi_m(link) if link.closed_form else None
    margin = est.two_pi - vol
    return ConjectureReport(link.name, vol, est.two_pi, error, margin, _status(margin, error), closed)


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    m: float
    m_error: float
    vol_diamond_over_2pi: float
    smyth_bound: float
    reference: tuple[float, float, float]


# P1..P5: the weave, the triaxial link, C0 on its half domain, C1 and K
_COMPARISON = (
    ("P1", "W", None, (1.16624361, 1.16624361, 0.0)),
    ("P2", "L", None, (1.61532973, 1.61532973, 0.0)),
    ("P3", None, "-z*(w^2-4*w+1)+w^2+4*w+1", (1.65546767, 1.61532973, 1.31695789)),
    ("P4", "C1", None, (2.79856868, 2.78157335, 1.76274717)),
    ("P5", "K", None, (3.14673710, 3.12553175, 1.76274717)),
)


def comparison_table(precision: float | None = None, config: MahlerConfig = MahlerConfig()) -> list[ComparisonRow]:
    rows = []
    for label, name, poly, reference in _COMPARISON:
        if name is not None:
            rec = get_link(name)
            p, fv = rec.charpoly, rec.face_vector
        else:
            p, fv = parse_poly(poly), FaceVector.from_dict({3: 2, 6: 1})
        est = mahler_bivariate(p, precision, config)
        rows.append(
            ComparisonRow(
                label=label,
                m=est.value,
                m_error=est.error_bound,
                vol_diamond_over_2pi=bipyramid_volume_of(fv) / (2 * math.pi),
                smyth_bound=smyth_lower_bound(p),
                reference=reference,
            )
        )
    return rows
