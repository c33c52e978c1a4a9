"""Bipartite graphs on the torus: Kasteleyn matrices, dimer counts and covers.

An edge joins black vertex ``black`` to white vertex ``white``; its winding
``(dz, dw)`` is the pair of signed intersection numbers with the two homology
curves, so the edge contributes ``sign * z^dz * w^dw`` to the Kasteleyn
matrix entry (black, white).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

from .laurent import DETERMINANT_CAP, LaurentMatrix, LaurentPoly2, determinant

__all__ = [
    "Edge",
    "ToroidalGraph",
    "GraphFormatError",
    "FaceCheck",
    "SignReport",
    "DimerCountReport",
    "SIGN_PATTERNS",
    "REFERENCE_PATTERN",
    "load_graph",
    "dump_graph",
    "kasteleyn_matrix",
    "characteristic_polynomial",
    "verify_kasteleyn_signs",
    "solve_kasteleyn_signs",
    "search_kasteleyn_signs",
    "integer_kasteleyn",
    "integer_determinant",
    "count_dimers_formula",
    "parity_class_count",
    "count_dimers_enumeration",
    "torus_cover",
    "entropy_sequence",
    "gauge_flip",
    "change_basis",
    "swap_directions",
    "face_winding",
    "is_torus_embedding",
]

ENUMERATION_CAP = 128

# The four odd-parity combinations of +-p(1,1) +-p(-1,1) +-p(1,-1) +-p(-1,-1),
# named by their signs in that order.  Patterns with three minus signs are the
# negatives of these, so they give the same absolute value.
SIGN_PATTERNS: dict[str, tuple[int, int, int, int]] = {
    "-+++": (-1, 1, 1, 1),
    "+-++": (1, -1, 1, 1),
    "++-+": (1, 1, -1, 1),
    "+++-": (1, 1, 1, -1),
}
REFERENCE_PATTERN = "-+++"
_POINTS = ((1, 1), (-1, 1), (1, -1), (-1, -1))


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    black: int
    white: int
    dz: int
    dw: int
    sign: int


@dataclass(frozen=True)
class ToroidalGraph:
    name: str
    black_count: int
    white_count: int
    edges: tuple[Edge, ...]
    faces: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        for k, e in enumerate(self.edges):
            if not (0 <= e.black < self.black_count and 0 <= e.white < self.white_count):
                raise GraphFormatError(f"edge {k} references a vertex out of range")
            if e.sign not in (1, -1):
                raise GraphFormatError(f"edge {k} has sign {e.sign}, expected +1 or -1")
        if self.faces is not None:
            uses = [0] * len(self.edges)
            for f in self.faces:
                for k in f:
                    if not 0 <= k < len(self.edges):
                        raise GraphFormatError(f"face references unknown edge {k}")
                    uses[k] += 1
            bad = [k for k, u in enumerate(uses) if u != 2]
            if bad:
                raise GraphFormatError(f"edges {bad} do not lie on exactly two faces")

    @property
    def balanced(self) -> bool:
        return self.black_count == self.white_count

    def with_signs(self, signs: Sequence[int]) -> ToroidalGraph:
        edges = tuple(replace(e, sign=s) for e, s in zip(self.edges, signs))
        return replace(self, edges=edges)


@dataclass(frozen=True)
class FaceCheck:
    face: tuple[int, ...]
    degree: int
    negatives: int
    passed: bool


@dataclass(frozen=True)
class SignReport:
    faces: tuple[FaceCheck, ...]

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.faces)


@dataclass(frozen=True)
class DimerCountReport:
    formula_value: int
    pattern_values: dict[str, int]
    enumeration_value: int | None = None
    matched_sign_pattern: str = "none"
    parity_class_value: int | None = None


# ---------------------------------------------------------------------------
# File format


def load_graph(text: str) -> ToroidalGraph:
    name = "unnamed"
    black = white = None
    edges: list[Edge] = []
    faces: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key, args = parts[0], parts[1:]
        try:
            if key == "graph":
                name = " ".join(args)
            elif key == "black" and len(args) == 1:
                black = int(args[0])
            elif key == "white" and len(args) == 1:
                white = int(args[0])
            elif key == "edge" and len(args) == 5:
                if args[4] not in ("+", "-"):
                    raise ValueError(f"bad sign {args[4]!r}")
                b, w, dz, dw = (int(x) for x in args[:4])
                edges.append(Edge(b, w, dz, dw, 1 if args[4] == "+" else -1))
            elif key == "face" and args:
                faces.append(tuple(int(x) for x in args))
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    if black is None or white is None:
        raise GraphFormatError("missing 'black' or 'white' count")
    if black != white:
        warnings.warn(f"graph {name!r} is not balanced ({black} black, {white} white)")
    return ToroidalGraph(name, black, white, tuple(edges), tuple(faces) if faces else None)


def dump_graph(g: ToroidalGraph, comment: str | None = None) -> str:
    lines = [f"# {line}" for line in comment.splitlines()] if comment else []
    lines += [f"graph {g.name}", f"black {g.black_count}", f"white {g.white_count}"]
    for e in g.edges:
        lines.append(f"edge {e.black} {e.white} {e.dz} {e.dw} {'+' if e.sign > 0 else '-'}")
    for f in g.faces or ():
        lines.append("face " + " ".join(str(k) for k in f))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Kasteleyn matrices


def _require_balanced(g: ToroidalGraph) -> None:
    if not g.balanced:
        raise GraphFormatError(f"graph {g.name!r} is not balanced")


def kasteleyn_matrix(g: ToroidalGraph) -> LaurentMatrix:
    _require_balanced(g)
    n = g.black_count
    grid = [[LaurentPoly2() for _ in range(n)] for _ in range(n)]
    for e in g.edges:
        grid[e.black][e.white] = grid[e.black][e.white] + LaurentPoly2.monomial(e.dz, e.dw, e.sign)
    return LaurentMatrix(n, n, tuple(tuple(r) for r in grid))


def characteristic_polynomial(g: ToroidalGraph, cap: int = DETERMINANT_CAP) -> LaurentPoly2:
    return determinant(kasteleyn_matrix(g), cap=cap)


def _face_target(degree: int) -> int:
    # required parity of negative edges: odd for degree 0 mod 4, even for 2 mod 4
    return 1 if degree % 4 == 0 else 0


def verify_kasteleyn_signs(g: ToroidalGraph) -> SignReport:
    if not g.faces:
        raise GraphFormatError(f"graph {g.name!r} has no faces")
    checks = []
    for f in g.faces:
        neg = sum(1 for k in f if g.edges[k].sign < 0)
        deg = len(f)
        ok = deg % 2 == 0 and neg % 2 == _face_target(deg)
        checks.append(FaceCheck(tuple(f), deg, neg, ok))
    return SignReport(tuple(checks))


def solve_kasteleyn_signs(g: ToroidalGraph) -> ToroidalGraph | None:
    """Choose signs satisfying every face condition by elimination over GF(2).

    Unknown x_e = 1 marks a negative edge; each face asks for a fixed parity
    of sum x_e.  Returns None when the system is inconsistent.
    """
    if not g.faces:
        raise GraphFormatError(f"graph {g.name!r} has no faces")
    m = len(g.edges)
    rows = []
    for f in g.faces:
        mask = 0
        for k in f:
            mask ^= 1 << k
        rows.append((mask, _face_target(len(f))))
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, mask, rhs)
    for mask, rhs in rows:
        for bit, pm, pr in pivots:
            if mask >> bit & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            if rhs:
                return None
            continue
        bit = mask.bit_length() - 1
        pivots = [(b, pm ^ mask, pr ^ rhs) if pm >> bit & 1 else (b, pm, pr) for b, pm, pr in pivots]
        pivots.append((bit, mask, rhs))
    x = [0] * m
    for bit, mask, rhs in pivots:
        x[bit] = rhs  # free variables are zero, so each pivot row fixes its bit
    return g.with_signs([-1 if v else 1 for v in x])


def search_kasteleyn_signs(g: ToroidalGraph, max_edges: int = 12) -> ToroidalGraph | None:
    """Brute-force search over all sign assignments, for tiny graphs."""
    if len(g.edges) > max_edges:
        raise ValueError(f"brute-force sign search is limited to {max_edges} edges")
    for signs in itertools.product((1, -1), repeat=len(g.edges)):
        cand = g.with_signs(signs)
        if verify_kasteleyn_signs(cand).passed:
            return cand
    return None


# ---------------------------------------------------------------------------
# Counting


def integer_kasteleyn(g: ToroidalGraph, z: int, w: int) -> list[list[int]]:
    """Kasteleyn matrix evaluated at z, w in {1, -1}."""
    _require_balanced(g)
    n = g.black_count
    mat = [[0] * n for _ in range(n)]
    for e in g.edges:
        mat[e.black][e.white] += e.sign * z ** (e.dz % 2) * w ** (e.dw % 2)
    return mat


def integer_determinant(mat: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss elimination)."""
    a = [list(r) for r in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            row_i = a[i]
            factor = row_i[k]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def _corner_values(g: ToroidalGraph) -> tuple[int, int, int, int]:
    return tuple(integer_determinant(integer_kasteleyn(g, z, w)) for z, w in _POINTS)


def parity_class_count(g: ToroidalGraph) -> int:
    """Sum over the four homology classes mod 2 of |signed class count|.

    With Kasteleyn signs every matching in a class contributes with the same
    sign, so this equals the number of perfect matchings.
    """
    vals = _corner_values(g)
    total = 0
    for alpha, beta in _POINTS:
        s = sum(v * (1 if alpha > 0 else z) * (1 if beta > 0 else w) for v, (z, w) in zip(vals, _POINTS))
        total += abs(s)
    if total % 4:
        raise ArithmeticError("class sums are not divisible by four")
    return total // 4


def count_dimers_formula(g: ToroidalGraph, enumeration_value: int | None = None) -> DimerCountReport:
    vals = _corner_values(g)
    patterns = {}
    for name, signs in SIGN_PATTERNS.items():
        s = abs(sum(c * v for c, v in zip(signs, vals)))
        patterns[name] = s // 2 if s % 2 == 0 else s / 2
    matched = "none"
    if enumeration_value is not None:
        for name in SIGN_PATTERNS:
            if patterns[name] == enumeration_value:
                matched = name
                break
    return DimerCountReport(
        formula_value=patterns[REFERENCE_PATTERN],
        pattern_values=patterns,
        enumeration_value=enumeration_value,
        matched_sign_pattern=matched,
        parity_class_value=parity_class_count(g),
    )


def _vertex_order(g: ToroidalGraph) -> list[int]:
    # breadth-first order on black vertices keeps the set of touched whites small
    adj: dict[int, set[int]] = {b: set() for b in range(g.black_count)}
    by_white: dict[int, set[int]] = {}
    for e in g.edges:
        by_white.setdefault(e.white, set()).add(e.black)
    for e in g.edges:
        adj[e.black] |= by_white[e.white]
    order: list[int] = []
    seen: set[int] = set()
    for start in range(g.black_count):
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        while queue:
            b = queue.pop(0)
            order.append(b)
            for nb in sorted(adj[b]):
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
    return order


def count_dimers_enumeration(g: ToroidalGraph, cap: int = ENUMERATION_CAP) -> int:
    """Exact number of perfect matchings; parallel edges count separately.

    Black vertices are matched one at a time; matchings are aggregated by the
    set of used white vertices so shared partial states are counted once.
    """
    if len(g.edges) > cap:
        raise ValueError(f"{len(g.edges)} edges exceed the enumeration cap {cap}")
    if g.black_count != g.white_count:
        return 0
    choices: dict[int, list[int]] = {b: [] for b in range(g.black_count)}
    for e in g.edges:
        choices[e.black].append(e.white)
    states = {0: 1}
    for b in _vertex_order(g):
        nxt: dict[int, int] = {}
        for used, count in states.items():
            for wv in choices[b]:
                bit = 1 << wv
                if not used & bit:
                    key = used | bit
                    nxt[key] = nxt.get(key, 0) + count
        states = nxt
        if not states:
            return 0
    return sum(states.values())


# ---------------------------------------------------------------------------
# Covers and transformations


def torus_cover(g: ToroidalGraph, m: int, n: int) -> ToroidalGraph:
    """The m x n cover; copy (i, j) of vertex v gets index v + count * (i * n + j)."""
    if m < 1 or n < 1:
        raise ValueError("cover sizes must be positive")
    nb, nw, ne = g.black_count, g.white_count, len(g.edges)
    edges = []
    for i in range(m):
        for j in range(n):
            copy = i * n + j
            for e in g.edges:
                carry_z, ti = divmod(i + e.dz, m)
                carry_w, tj = divmod(j + e.dw, n)
                edges.append(Edge(e.black + nb * copy, e.white + nw * (ti * n + tj), carry_z, carry_w, e.sign))
    faces = None
    if g.faces:
        faces = []
        for f in g.faces:
            steps = _face_steps(g, f)
            for i in range(m):
                for j in range(n):
                    faces.append(_lift_face(g, f, steps, i, j, m, n, ne))
    return ToroidalGraph(f"{g.name}[{m}x{n}]", nb * m * n, nw * m * n, tuple(edges), tuple(faces) if faces else None)


def _face_steps(g: ToroidalGraph, face: tuple[int, ...]) -> list[int]:
    """For each edge of the face, +1 if traversed black to white, else -1."""
    for first in (1, -1):
        steps = []
        at = ("b", g.edges[face[0]].black) if first > 0 else ("w", g.edges[face[0]].white)
        ok = True
        for k in face:
            e = g.edges[k]
            if at == ("b", e.black):
                steps.append(1)
                at = ("w", e.white)
            elif at == ("w", e.white):
                steps.append(-1)
                at = ("b", e.black)
            else:
                ok = False
                break
        start = ("b", g.edges[face[0]].black) if first > 0 else ("w", g.edges[face[0]].white)
        if ok and at == start:
            return steps
    raise GraphFormatError(f"face {face} is not a closed walk")


def _lift_face(g, face, steps, i, j, m, n, ne) -> tuple[int, ...]:
    out = []
    ci, cj = i, j  # copy of the current vertex
    for k, s in zip(face, steps):
        e = g.edges[k]
        if s > 0:
            out.append(k + ne * (ci * n + cj))
            ci, cj = (ci + e.dz) % m, (cj + e.dw) % n
        else:
            ci, cj = (ci - e.dz) % m, (cj - e.dw) % n
            out.append(k + ne * (ci * n + cj))
    if (ci, cj) != (i, j):
        raise GraphFormatError(f"face {face} has nonzero total winding")
    return tuple(out)


def face_winding(g: ToroidalGraph, face: tuple[int, ...]) -> tuple[int, int]:
    steps = _face_steps(g, face)
    return (
        sum(s * g.edges[k].dz for k, s in zip(face, steps)),
        sum(s * g.edges[k].dw for k, s in zip(face, steps)),
    )


def gauge_flip(g: ToroidalGraph, color: str, vertex: int) -> ToroidalGraph:
    """Negate the signs of all edges at one vertex."""
    attr = "black" if color == "black" else "white"
    edges = tuple(replace(e, sign=-e.sign) if getattr(e, attr) == vertex else e for e in g.edges)
    return replace(g, edges=edges)


def change_basis(g: ToroidalGraph, matrix: Sequence[Sequence[int]]) -> ToroidalGraph:
    """Apply a unimodular change of homology basis to every winding."""
    (a, b), (c, d) = matrix
    if abs(a * d - b * c) != 1:
        raise ValueError("basis change must be unimodular")
    edges = tuple(replace(e, dz=a * e.dz + b * e.dw, dw=c * e.dz + d * e.dw) for e in g.edges)
    return replace(g, edges=edges)


def swap_directions(g: ToroidalGraph) -> ToroidalGraph:
    edges = tuple(replace(e, dz=e.dw, dw=e.dz) for e in g.edges)
    return replace(g, edges=edges)


def entropy_sequence(g: ToroidalGraph, n_max: int, method: str = "formula") -> list[tuple[int, float]]:
    """(n, log Z(G_n) / n^2) for the n x n covers, n = 1..n_max.

    Values are per fundamental domain of ``g``; as n grows they approach the
    Mahler measure of the characteristic polynomial.  ``method`` is
    "formula" (exact determinants at the four sign points) or "enumeration".
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    out = []
    for n in range(1, n_max + 1):
        cover = torus_cover(g, n, n)
        if method == "enumeration":
            count = count_dimers_enumeration(cover)
        elif method == "formula":
            count = parity_class_count(cover)
        else:
            raise ValueError(f"unknown counting method {method!r}")
        out.append((n, math.log(count) / n ** 2 if count else float("-inf")))
    return out


def is_torus_embedding(g: ToroidalGraph) -> bool:
    """True when the face cycles glue into a single closed surface of Euler characteristic 0.

    Consecutive edges of a face define, at their shared vertex, a successor
    relation on incident edge-ends; the embedding is a surface when these
    relations form one cycle per vertex.
    """
    if not g.faces:
        return False
    succ: dict[tuple[str, int, int], tuple[str, int, int]] = {}
    for f in g.faces:
        steps = _face_steps(g, f)
        for idx, (k, s) in enumerate(zip(f, steps)):
            k2 = f[(idx + 1) % len(f)]
            e = g.edges[k]
            # vertex reached after traversing edge k
            v = ("w", e.white) if s > 0 else ("b", e.black)
            a, b = (v[0], v[1], k), (v[0], v[1], k2)
            if a in succ:
                return False
            succ[a] = b
    ends = {("b", e.black, k) for k, e in enumerate(g.edges)} | {("w", e.white, k) for k, e in enumerate(g.edges)}
    if set(succ) != ends:
        return False
    vertices = {(c, i) for c, i, _ in ends}
    cycles = 0
    seen = set()
    for start in ends:
        if start in seen:
            continue
        cycles += 1
        x = start
        while x not in seen:
            seen.add(x)
            x = succ[x]
    if cycles != len(vertices):
        return False
    return len(vertices) - len(g.edges) + len(g.faces) == 0
