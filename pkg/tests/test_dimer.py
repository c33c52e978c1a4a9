import itertools
import math
from importlib import resources

import pytest

from dimermahler.dimer import (
    ENUMERATION_CAP,
    REFERENCE_PATTERN,
    SIGN_PATTERNS,
    Edge,
    GraphFormatError,
    ToroidalGraph,
    change_basis,
    characteristic_polynomial,
    count_dimers_enumeration,
    count_dimers_formula,
    dump_graph,
    entropy_sequence,
    face_winding,
    gauge_flip,
    integer_determinant,
    is_torus_embedding,
    kasteleyn_matrix,
    load_graph,
    parity_class_count,
    search_kasteleyn_signs,
    solve_kasteleyn_signs,
    swap_directions,
    torus_cover,
    verify_kasteleyn_signs,
)
from dimermahler.laurent import LaurentMatrix, LaurentPoly2, evaluate, parse_poly
from dimermahler.mahler import mahler_bivariate

GRAPH_FILES = ["weave", "triaxial", "rhombitrihexagonal", "C0-half", "C0", "C1", "K"]


def data_graph(name: str) -> ToroidalGraph:
    return load_graph(resources.files("dimermahler").joinpath("data", f"{name}.graph").read_text())


SINGLE = "graph one\nblack 1\nwhite 1\nedge 0 0 0 0 +\n"


def _matrix_equal(a: LaurentMatrix, rows) -> bool:
    return a == LaurentMatrix.from_rows(rows)


# file format


def test_load_single_edge():
    g = load_graph(SINGLE)
    assert g.name == "one" and len(g.edges) == 1 and g.balanced
    assert characteristic_polynomial(g) == parse_poly("1")


def test_load_errors():
    with pytest.raises(GraphFormatError):
        load_graph("black 2\nwhite 2\nedge 5 0 0 0 +\n")
    with pytest.raises(GraphFormatError):
        load_graph("black 1\nwhite 1\nedge 0 0 0 0 *\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph("black 1\nwhite 1\nvertex 0\n")
    with pytest.raises(GraphFormatError):
        load_graph("edge 0 0 0 0 +\n")
    with pytest.raises(GraphFormatError):
        # edge 1 lies on one face only
        load_graph("black 1\nwhite 1\nedge 0 0 0 0 +\nedge 0 0 1 0 +\nface 0 1\nface 0\n")


def test_unbalanced_graph_warns_and_enumerates():
    with pytest.warns(UserWarning):
        g = load_graph("black 2\nwhite 1\nedge 0 0 0 0 +\nedge 1 0 0 0 +\n")
    assert count_dimers_enumeration(g) == 0
    with pytest.raises(GraphFormatError):
        kasteleyn_matrix(g)


@pytest.mark.parametrize("name", GRAPH_FILES)
def test_dump_load_round_trip(name):
    g = data_graph(name)
    again = load_graph(dump_graph(g, "comment line"))
    assert again == g


# Kasteleyn matrices and characteristic polynomials


def test_weave_matrix_and_polynomial():
    g = data_graph("weave")
    assert _matrix_equal(kasteleyn_matrix(g), [["-1 - z^-1", "1 + w"], ["1 + w^-1", "1 + z"]])
    assert characteristic_polynomial(g) == parse_poly("-(4 + w^-1 + w + z^-1 + z)")


def test_triaxial_matrix_and_polynomial():
    g = data_graph("triaxial")
    assert _matrix_equal(
        kasteleyn_matrix(g), [["1", "z", "w"], ["1", "1", "1"], ["z^-1 - w^-1", "w^-1 - 1", "1 - z^-1"]]
    )
    assert characteristic_polynomial(g) == parse_poly("6 - (w^-1 + w + z^-1 + z + w*z^-1 + z*w^-1)")


def test_missing_edge_gives_zero_entry():
    g = load_graph("black 2\nwhite 2\nedge 0 0 0 0 +\nedge 1 1 0 0 +\n")
    assert kasteleyn_matrix(g)[0, 1].is_zero()
    assert characteristic_polynomial(g) == parse_poly("1")


# signs


def _square(signs):
    # a single 4-cycle b0 w0 b1 w1 (as a plain cycle, windings irrelevant)
    edges = tuple(Edge(b, w, 0, 0, s) for (b, w), s in zip(((0, 0), (1, 0), (1, 1), (0, 1)), signs))
    return ToroidalGraph("square", 2, 2, edges, ((0, 1, 2, 3), (3, 2, 1, 0)))


def test_face_parity_rule():
    assert verify_kasteleyn_signs(_square((1, 1, 1, -1))).passed
    assert not verify_kasteleyn_signs(_square((1, 1, 1, 1))).passed
    report = verify_kasteleyn_signs(_square((-1, -1, 1, 1)))
    assert [f.negatives for f in report.faces] == [2, 2] and not report.passed


@pytest.mark.parametrize("name", GRAPH_FILES)
def test_catalog_graphs_have_kasteleyn_signs(name):
    g = data_graph(name)
    assert is_torus_embedding(g)
    assert verify_kasteleyn_signs(g).passed
    assert all(face_winding(g, f) == (0, 0) for f in g.faces)


def test_weave_has_two_negative_edges():
    g = data_graph("weave")
    assert sum(e.sign < 0 for e in g.edges) == 2


def test_sign_solvers_recover_valid_signs():
    g = data_graph("weave").with_signs([1] * 8)
    assert not verify_kasteleyn_signs(g).passed
    for solved in (solve_kasteleyn_signs(g), search_kasteleyn_signs(g)):
        assert solved is not None and verify_kasteleyn_signs(solved).passed
        assert count_dimers_formula(solved, 8).matched_sign_pattern != "none"
    big = data_graph("K")
    resolved = solve_kasteleyn_signs(big.with_signs([1] * len(big.edges)))
    assert verify_kasteleyn_signs(resolved).passed
    with pytest.raises(ValueError):
        search_kasteleyn_signs(big)


# counting


def test_weave_formula_values():
    g = data_graph("weave")
    p = characteristic_polynomial(g)
    assert [evaluate(p, z, w) for z, w in ((1, 1), (-1, 1), (1, -1), (-1, -1))] == [-8, -4, -4, 0]
    rep = count_dimers_formula(g, count_dimers_enumeration(g))
    assert rep.enumeration_value == 8
    assert rep.pattern_values["+++-"] == 8
    assert rep.matched_sign_pattern == "+++-"
    assert rep.parity_class_value == 8


def test_single_edge_counts():
    g = load_graph(SINGLE)
    rep = count_dimers_formula(g, count_dimers_enumeration(g))
    assert rep.formula_value == 1 and rep.pattern_values[REFERENCE_PATTERN] == 1
    assert count_dimers_enumeration(g) == 1


def test_triaxial_count_is_twelve():
    g = data_graph("triaxial")
    rep = count_dimers_formula(g, count_dimers_enumeration(g))
    assert rep.enumeration_value == 12
    assert rep.matched_sign_pattern != "none"
    assert rep.pattern_values[rep.matched_sign_pattern] == 12


def test_isolated_vertex_counts_zero():
    g = load_graph("black 2\nwhite 2\nedge 0 0 0 0 +\nedge 1 0 0 0 +\n")
    assert count_dimers_enumeration(g) == 0


def test_enumeration_cap():
    g = torus_cover(data_graph("K"), 3, 3)
    assert len(g.edges) > ENUMERATION_CAP
    with pytest.raises(ValueError):
        count_dimers_enumeration(g)


def _brute_matchings(g: ToroidalGraph) -> int:
    n = g.black_count
    total = 0
    for combo in itertools.combinations(range(len(g.edges)), n):
        es = [g.edges[k] for k in combo]
        if len({e.black for e in es}) == n and len({e.white for e in es}) == n:
            total += 1
    return total


@pytest.mark.parametrize("name", ["weave", "triaxial", "C1"])
def test_enumeration_matches_brute_force(name):
    g = data_graph(name)
    assert count_dimers_enumeration(g) == _brute_matchings(g)


@pytest.mark.parametrize("name", GRAPH_FILES)
@pytest.mark.parametrize("cover", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_some_sign_pattern_matches_enumeration(name, cover):
    g = torus_cover(data_graph(name), *cover)
    count = count_dimers_enumeration(g)
    rep = count_dimers_formula(g, count)
    assert rep.matched_sign_pattern in SIGN_PATTERNS
    assert rep.parity_class_value == count


def test_integer_determinant():
    assert integer_determinant([]) == 1
    assert integer_determinant([[0, 1], [1, 0]]) == -1
    assert integer_determinant([[2, 1, 3], [0, 0, 4], [1, 5, 6]]) == 2 * (0 - 20) - 1 * (0 - 4) + 3 * 0


# covers


def test_identity_cover():
    for name in GRAPH_FILES:
        g = data_graph(name)
        assert characteristic_polynomial(torus_cover(g, 1, 1)) == characteristic_polynomial(g)


def test_weave_cover_sizes():
    c = torus_cover(data_graph("weave"), 2, 2)
    assert (c.black_count, c.white_count, len(c.edges)) == (8, 8, 32)
    assert is_torus_embedding(c) and verify_kasteleyn_signs(c).passed


def test_cover_charpoly_factorizes():
    # P_2(z^2, w) = p(z, w) p(-z, w) up to a unit for the 2x1 cover
    for name in ("weave", "triaxial", "C1"):
        g = data_graph(name)
        p = characteristic_polynomial(g)
        p_minus = LaurentPoly2({(a, b): c * (-1) ** a for (a, b), c in p.items()})
        cover = characteristic_polynomial(torus_cover(g, 2, 1))
        lifted = LaurentPoly2({(2 * a, b): c for (a, b), c in cover.items()})
        prod = p * p_minus
        assert lifted.normalized() in (prod.normalized(), (-prod).normalized())


def test_cover_doubles_measure():
    g = data_graph("C0-half")
    assert characteristic_polynomial(g) == parse_poly("-z*(w^2-4*w+1)+w^2+4*w+1")
    full = mahler_bivariate(characteristic_polynomial(data_graph("C0")))
    half = mahler_bivariate(characteristic_polynomial(g))
    assert abs(full.value - 2 * half.value) <= full.error_bound + 2 * half.error_bound


def test_swap_symmetry_of_cover_counts():
    for name in ("weave", "triaxial", "C1"):
        g = data_graph(name)
        s = swap_directions(g)
        assert count_dimers_enumeration(torus_cover(g, 2, 1)) == count_dimers_enumeration(torus_cover(s, 1, 2))
        assert count_dimers_enumeration(torus_cover(g, 1, 2)) == count_dimers_enumeration(torus_cover(s, 2, 1))


# invariance of the measure


@pytest.mark.parametrize("name", ["weave", "triaxial", "C1", "K"])
def test_gauge_and_basis_invariance(name):
    g = data_graph(name)
    base = mahler_bivariate(characteristic_polynomial(g))
    variants = [
        gauge_flip(g, "black", 0),
        gauge_flip(g, "white", g.white_count - 1),
        change_basis(g, ((1, 1), (0, 1))),
        change_basis(g, ((2, 1), (1, 1))),
        change_basis(g, ((0, -1), (1, 0))),
    ]
    for v in variants:
        est = mahler_bivariate(characteristic_polynomial(v))
        assert abs(est.value - base.value) <= est.error_bound + base.error_bound + 1e-12
    gauged = characteristic_polynomial(variants[0])
    assert gauged == -characteristic_polynomial(g)
    with pytest.raises(ValueError):
        change_basis(g, ((2, 0), (0, 1)))


# entropy


def test_entropy_sequence():
    g = data_graph("weave")
    seq = entropy_sequence(g, 3)
    assert [n for n, _ in seq] == [1, 2, 3]
    assert seq[0][1] == pytest.approx(math.log(8))
    target = mahler_bivariate(characteristic_polynomial(g)).value
    errs = [abs(v - target) for _, v in seq]
    assert errs[0] > errs[1] > errs[2]
    assert entropy_sequence(g, 2, method="enumeration") == seq[:2]
    with pytest.raises(ValueError):
        entropy_sequence(g, 0)
    with pytest.raises(ValueError):
        entropy_sequence(g, 1, method="guess")


def test_parity_class_count_equals_enumeration_on_larger_cover():
    g = torus_cover(data_graph("triaxial"), 3, 2)
    assert parity_class_count(g) == count_dimers_enumeration(g)
