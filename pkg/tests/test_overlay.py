import pytest

from dimermahler.dimer import (
    characteristic_polynomial,
    count_dimers_enumeration,
    count_dimers_formula,
    is_torus_embedding,
    verify_kasteleyn_signs,
)
from dimermahler.laurent import equivalence, parse_poly
from dimermahler.mahler import mahler_bivariate
from dimermahler.overlay import (
    TorusMap,
    align_to_polynomial,
    enumerate_maps,
    face_degree_vector,
    medial_map,
    overlaid_graph,
    search_quad_faces,
)

WEAVE = parse_poly("-4 - w^-1 - w - z^-1 - z")
TRIAXIAL = parse_poly("6 - w - w^-1 - z - z^-1 - z*w^-1 - w*z^-1")


def _links(crossings: int, faces: dict[int, int]):
    return [m for m in enumerate_maps((4,) * crossings) if face_degree_vector(m) == faces]


def test_torus_map_basics():
    # one vertex with two loops: the standard square torus map
    m = TorusMap((1, 2, 3, 0), (2, 3, 0, 1))
    assert not TorusMap((1, 2, 3, 0), (1, 0, 3, 2)).is_torus()
    assert m.is_torus()
    assert len(m.vertices()) == 1 and len(m.faces()) == 1
    assert face_degree_vector(m) == {4: 1}


def test_enumerated_maps_are_tori():
    maps = list(enumerate_maps((4, 4)))
    assert maps
    assert all(m.is_torus() and m.euler_characteristic() == 0 for m in maps)
    with pytest.raises(ValueError):
        list(enumerate_maps((3,)))


def test_medial_map_is_four_valent():
    for tait in enumerate_maps((6, 3, 3)):
        med = medial_map(tait)
        assert med.is_torus()
        assert all(len(v) == 4 for v in med.vertices())
        # faces of the medial map are vertices and faces of the original
        degrees = sorted(len(f) for f in med.faces())
        expected = sorted([len(v) for v in tait.vertices()] + [len(f) for f in tait.faces()])
        assert degrees == expected
        break


def test_weave_overlay_reproduces_polynomial():
    links = _links(2, {4: 2})
    assert links
    found = False
    for link in links:
        g = overlaid_graph(link, "weave")
        assert is_torus_embedding(g) and verify_kasteleyn_signs(g).passed
        if equivalence(characteristic_polynomial(g), WEAVE) is not None:
            aligned = align_to_polynomial(g, WEAVE)
            assert aligned is not None and characteristic_polynomial(aligned) == WEAVE
            assert count_dimers_enumeration(aligned) == 8
            found = True
    assert found


def test_triaxial_overlay_reproduces_polynomial():
    for link in _links(3, {3: 2, 6: 1}):
        g = overlaid_graph(link, "L")
        aligned = align_to_polynomial(g, TRIAXIAL)
        if aligned is not None:
            assert characteristic_polynomial(aligned) == TRIAXIAL
            assert verify_kasteleyn_signs(aligned).passed
            rep = count_dimers_formula(aligned, count_dimers_enumeration(aligned))
            assert rep.matched_sign_pattern != "none"
            return
    pytest.fail("no triaxial overlay found")


def test_overlay_measure_matches_face_count():
    # the overlaid graph of every 2-crossing link with two square faces has the weave measure
    target = mahler_bivariate(WEAVE).value
    for link in _links(2, {4: 2}):
        est = mahler_bivariate(characteristic_polynomial(overlaid_graph(link)))
        assert abs(est.value - target) <= 1e-8


def test_align_rejects_unrelated_polynomial():
    link = _links(2, {4: 2})[0]
    assert align_to_polynomial(overlaid_graph(link), TRIAXIAL) is None


def test_quad_face_search_finds_weave_faces():
    link = _links(2, {4: 2})[0]
    g = overlaid_graph(link)
    bare = g.__class__(g.name, g.black_count, g.white_count, g.edges, None)
    solutions = search_quad_faces(bare)
    assert solutions
    for faces in solutions:
        rebuilt = g.__class__(g.name, g.black_count, g.white_count, g.edges, faces)
        assert is_torus_embedding(rebuilt) and verify_kasteleyn_signs(rebuilt).passed
