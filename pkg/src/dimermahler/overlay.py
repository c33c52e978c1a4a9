"""Overlaid graphs of link diagrams on the torus, built from combinatorial maps.

A map is given by darts ``0..2E-1`` with the edge involution ``alpha(d) = d ^ 1``
and a vertex rotation ``sigma`` (counterclockwise successor of a dart around
its vertex).  Faces are the orbits of ``phi = sigma * alpha``.

For a 4-valent link diagram the overlaid graph has a black vertex per face, a
white vertex per crossing and an edge per corner.  Around every diagram edge
the four corners bound a quadrilateral face of the overlaid graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .dimer import (
    Edge,
    ToroidalGraph,
    change_basis,
    characteristic_polynomial,
    gauge_flip,
    is_torus_embedding,
    solve_kasteleyn_signs,
)
from .laurent import LaurentPoly2, equivalence

__all__ = [
    "TorusMap",
    "medial_map",
    "overlaid_graph",
    "enumerate_maps",
    "face_degree_vector",
    "align_to_polynomial",
    "search_quad_faces",
]


def _orbits(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(cyc)
    return out


@dataclass(frozen=True)
class TorusMap:
    sigma: tuple[int, ...]
    alpha: tuple[int, ...]

    @property
    def phi(self) -> tuple[int, ...]:
        return tuple(self.sigma[self.alpha[d]] for d in range(len(self.sigma)))

    def vertices(self) -> list[list[int]]:
        return _orbits(self.sigma)

    def faces(self) -> list[list[int]]:
        return _orbits(self.phi)

    def euler_characteristic(self) -> int:
        return len(self.vertices()) - len(self.sigma) // 2 + len(self.faces())

    def connected(self) -> bool:
        n = len(self.sigma)
        seen = {0}
        stack = [0]
        while stack:
            d = stack.pop()
            for nb in (self.sigma[d], self.alpha[d]):
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == n

    def is_torus(self) -> bool:
        return self.connected() and self.euler_characteristic() == 0


def _inverse(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def medial_map(tait: TorusMap) -> TorusMap:
    """The 4-valent map whose vertices are the edges of ``tait``.

    Medial dart ``2d`` leaves the midpoint of dart d's edge towards the corner
    (d, sigma d); dart ``2d + 1`` leaves towards the corner (sigma^-1 d, d).
    """
    n = len(tait.sigma)
    plus = lambda d: 2 * d
    minus = lambda d: 2 * d + 1
    alpha = [0] * (2 * n)
    for d in range(n):
        a, b = plus(d), minus(tait.sigma[d])
        alpha[a], alpha[b] = b, a
    sigma = [0] * (2 * n)
    for d in range(n):
        if d > tait.alpha[d]:
            continue
        e = tait.alpha[d]
        ring = [minus(e), plus(d), minus(d), plus(e)]
        for i in range(4):
            sigma[ring[i]] = ring[(i + 1) % 4]
    # relabel so that alpha pairs darts 2k, 2k+1
    order = []
    placed = set()
    for d in range(2 * n):
        if d not in placed:
            order.extend([d, alpha[d]])
            placed.update([d, alpha[d]])
    new = {old: i for i, old in enumerate(order)}
    sig = [0] * (2 * n)
    for old, i in new.items():
        sig[i] = new[sigma[old]]
    return TorusMap(tuple(sig), tuple(d ^ 1 for d in range(2 * n)))


def face_degree_vector(m: TorusMap) -> dict[int, int]:
    out: dict[int, int] = {}
    for f in m.faces():
        out[len(f)] = out.get(len(f), 0) + 1
    return dict(sorted(out.items()))


def _homology_windings(nv: int, edges: list[tuple[int, int]], faces: list[list[tuple[int, int]]]) -> list[tuple[int, int]]:
    """Integer cocycle assigning each edge a winding pair.

    ``edges`` are (tail, head) vertex pairs; ``faces`` list (edge, orientation)
    steps.  Tree edges get zero, the two edges outside both the tree and the
    dual cotree get (1, 0) and (0, 1), and the remaining edges are solved so
    every face sums to zero.  The resulting classes form a basis of H^1.
    """
    ne = len(edges)
    parent = {0: None}
    tree = set()
    stack = [0]
    adj: dict[int, list[tuple[int, int]]] = {}
    for k, (u, v) in enumerate(edges):
        adj.setdefault(u, []).append((k, v))
        adj.setdefault(v, []).append((k, u))
    while stack:
        u = stack.pop()
        for k, v in adj.get(u, []):
            if v not in parent:
                parent[v] = u
                tree.add(k)
                stack.append(v)
    if len(parent) != nv:
        raise ValueError("graph is not connected")
    # dual spanning tree over faces, through non-tree edges
    edge_faces: dict[int, list[int]] = {}
    for fi, f in enumerate(faces):
        for k, _ in f:
            edge_faces.setdefault(k, []).append(fi)
    dual_parent: dict[int, tuple[int, int] | None] = {0: None}
    order = [0]
    i = 0
    while i < len(order):
        f = order[i]
        i += 1
        for k, _ in faces[f]:
            if k in tree:
                continue
            for g in edge_faces[k]:
                if g not in dual_parent:
                    dual_parent[g] = (f, k)
                    order.append(g)
    if len(dual_parent) != len(faces):
        raise ValueError("dual graph is not connected")
    cotree = {v[1] for v in dual_parent.values() if v is not None}
    leftover = [k for k in range(ne) if k not in tree and k not in cotree]
    if len(leftover) != 2:
        raise ValueError(f"expected a torus (2 leftover edges), found {len(leftover)}")
    value: dict[int, tuple[int, int]] = {k: (0, 0) for k in tree}
    value[leftover[0]] = (1, 0)
    value[leftover[1]] = (0, 1)
    for f in reversed(order[1:]):
        _, k = dual_parent[f]
        sz = sw = 0
        own = None
        for kk, s in faces[f]:
            if kk == k:
                own = s
                continue
            vz, vw = value[kk]
            sz += s * vz
            sw += s * vw
        value[k] = (-own * sz, -own * sw)
    return [value[k] for k in range(ne)]


def overlaid_graph(link: TorusMap, name: str = "overlay") -> ToroidalGraph:
    """Balanced bipartite graph with Kasteleyn signs for a 4-valent torus map."""
    if any(len(v) != 4 for v in link.vertices()):
        raise ValueError("link diagrams are 4-valent")
    if not link.is_torus():
        raise ValueError("map is not a connected torus map")
    n = len(link.sigma)
    sigma, alpha = link.sigma, link.alpha
    sigma_inv = _inverse(sigma)
    vert_of = {}
    for i, cyc in enumerate(link.vertices()):
        for d in cyc:
            vert_of[d] = i
    face_of = {}
    for i, cyc in enumerate(link.faces()):
        for d in cyc:
            face_of[d] = i
    # corner y = (y, sigma y) lies at vertex of y, inside the face through sigma y
    corner_edge = {}
    edges = []
    for y in range(n):
        corner_edge[y] = len(edges)
        edges.append((face_of[sigma[y]], vert_of[y]))
    faces = []
    for x in range(n):
        if x > alpha[x]:
            continue
        ax = alpha[x]
        faces.append([corner_edge[sigma_inv[x]], corner_edge[ax], corner_edge[sigma_inv[ax]], corner_edge[x]])
    nb = len(link.faces())
    nw = len(link.vertices())
    # vertices for the cocycle: blacks 0..nb-1, whites nb..
    steps = []
    for f in faces:
        # white -> black, black -> white, white -> black, black -> white
        steps.append([(f[0], -1), (f[1], 1), (f[2], -1), (f[3], 1)])
    wind = _homology_windings(nb + nw, [(b, nb + w) for b, w in edges], steps)
    g = ToroidalGraph(
        name,
        nb,
        nw,
        tuple(Edge(b, w, dz, dw, 1) for (b, w), (dz, dw) in zip(edges, wind)),
        tuple(tuple(f) for f in faces),
    )
    signed = solve_kasteleyn_signs(g)
    if signed is None:
        raise ArithmeticError("no Kasteleyn signs exist for this map")
    return signed


def _matchings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1 :]
        for m in _matchings(rest):
            yield [(first, items[i])] + m


def enumerate_maps(vertex_degrees: Sequence[int]) -> Iterator[TorusMap]:
    """All torus maps with the given vertex degrees (with repetitions up to isomorphism).

    The rotation is fixed and the edge pairing varies; darts are relabelled so
    that edges pair 2k with 2k+1.
    """
    n = sum(vertex_degrees)
    if n % 2:
        raise ValueError("degree sum must be even")
    rot = [0] * n
    start = 0
    for deg in vertex_degrees:
        for i in range(deg):
            rot[start + i] = start + (i + 1) % deg
        start += deg
    for pairs in _matchings(list(range(n))):
        order = [d for pair in pairs for d in pair]
        new = {old: i for i, old in enumerate(order)}
        sig = [0] * n
        for old in range(n):
            sig[new[old]] = new[rot[old]]
        m = TorusMap(tuple(sig), tuple(d ^ 1 for d in range(n)))
        if m.is_torus():
            yield m


def align_to_polynomial(g: ToroidalGraph, target: LaurentPoly2, bound: int = 3) -> ToroidalGraph | None:
    """Re-sign and re-wind ``g`` so its characteristic polynomial equals ``target``.

    Uses a sign twist z -> +-z, w -> +-w (a change of Kasteleyn signs that
    keeps every face condition), a unimodular change of homology basis, a
    translation of black vertex 0 and, if needed, a gauge flip at it.
    """
    p = characteristic_polynomial(g)
    found = equivalence(p, target, bound=bound)
    if found is None:
        return None
    mat, (sz, sw) = found
    twisted = g.with_signs([e.sign * sz ** (e.dz % 2) * sw ** (e.dw % 2) for e in g.edges])
    h = change_basis(twisted, mat)
    q = characteristic_polynomial(h)
    # q = c * z^a w^b * target for a unit c and monomial shift
    (a0, b0), c0 = q.items().__next__()
    (a1, b1), c1 = target.items().__next__()
    da, db = a0 - a1, b0 - b1
    edges = tuple(
        Edge(e.black, e.white, e.dz - da, e.dw - db, e.sign) if e.black == 0 else e for e in h.edges
    )
    h = ToroidalGraph(h.name, h.black_count, h.white_count, edges, h.faces)
    if characteristic_polynomial(h) == -target:
        h = gauge_flip(h, "black", 0)
    if characteristic_polynomial(h) != target:
        return None
    return h


def search_quad_faces(g: ToroidalGraph, require_signs: bool = True) -> list[tuple[tuple[int, ...], ...]]:
    """All ways to cover ``g`` by consistently oriented, zero-winding 4-cycles.

    A face b -> w -> b' -> w' -> b uses its first and third edges from black
    to white; in a consistent orientation every edge is used once in each
    direction.  With ``require_signs`` only faces with an odd number of
    negative edges are allowed.  Solutions that do not glue into a torus are
    dropped.
    """
    edges = g.edges
    ne = len(edges)
    quads = set()
    for e1, e2, e3, e4 in itertools.permutations(range(ne), 4):
        a, b, c, d = edges[e1], edges[e2], edges[e3], edges[e4]
        if a.white != b.white or b.black != c.black or c.white != d.white or d.black != a.black:
            continue
        if (a.dz - b.dz + c.dz - d.dz, a.dw - b.dw + c.dw - d.dw) != (0, 0):
            continue
        if require_signs and a.sign * b.sign * c.sign * d.sign != -1:
            continue
        quads.add(min((e1, e2, e3, e4), (e3, e4, e1, e2)))
    by_forward: dict[int, list[tuple[int, ...]]] = {}
    for q in sorted(quads):
        by_forward.setdefault(q[0], []).append(q)
        by_forward.setdefault(q[2], []).append(q)
    target = ne // 2
    forward = [False] * ne
    backward = [False] * ne
    chosen: list[tuple[int, ...]] = []
    out = []

    def rec():
        k = next((i for i in range(ne) if not forward[i]), None)
        if k is None:
            if all(backward) and len(chosen) == target:
                cand = ToroidalGraph(g.name, g.black_count, g.white_count, g.edges, tuple(chosen))
                if is_torus_embedding(cand):
                    out.append(tuple(chosen))
            return
        for q in by_forward.get(k, []):
            if forward[q[0]] or forward[q[2]] or backward[q[1]] or backward[q[3]] or q[0] == q[2] or q[1] == q[3]:
                continue
            forward[q[0]] = forward[q[2]] = backward[q[1]] = backward[q[3]] = True
            chosen.append(q)
            rec()
            chosen.pop()
            forward[q[0]] = forward[q[2]] = backward[q[1]] = backward[q[3]] = False

    rec()
    return out
