import numpy as np
import pytest

from td13 import embedder as em, encoding as enc, svg, symbolic as sy, validator as va
from td13.embedder import PlaneGraphInput
from td13.errors import UnexpectedLength


def triangle(seed=0):
    g = PlaneGraphInput(3, (0, 1, 2), ((0, 1), (1, 2), (0, 2)))
    return em.draw(g, seed=seed)


def rhombus(seed=0):
    g = PlaneGraphInput(4, (0, 1, 3, 2), ((0, 1), (1, 3), (3, 2), (2, 0), (1, 2)))
    return em.draw(g, seed=seed)


def test_triangle_is_valid_with_two_classes():
    r = va.validate(triangle())
    assert r.ok and r.n_length_classes == 2


def test_rhombus_has_four_sides_and_one_diagonal():
    d = rhombus(3)
    counts = {c["id"]: c["count"] for c in d.classes}
    assert counts == {"side": 4, "0,0,0": 1}


def test_duplicate_vertex_is_caught():
    d = triangle()
    d.coords = d.coords.copy()
    d.coords[2] = d.coords[0]
    ok, gap, pair = va.check_distinct_vertices(d)
    assert not ok and gap == 0 and pair == (0, 2)


def test_vertex_at_edge_midpoint_is_caught():
    d = em.draw(PlaneGraphInput(4, (0, 1, 2, 3), ((0, 1), (1, 2), (2, 3), (3, 0))), seed=1)
    d.coords = d.coords.copy()
    d.coords[3] = (d.coords[0] + d.coords[1]) / 2
    d.labels = ()
    ok, _, bad = va.check_vertex_edge_separation(d)
    assert not ok and (3, 0, 1) in bad


def raw_drawing(labels, edges, seed=2):
    x = em.sample_torus(seed)
    coords = 0.5 * np.array([sy.evaluate(sy.psi_poly(l), x) for l in labels])
    return em.Drawing(len(labels), coords, tuple(labels), tuple(edges), x)


def test_collinear_vertex_beyond_the_segment_is_fine():
    # 0, x and 2x lie on one line; the third is past the end of the first edge
    d = raw_drawing(("0", "010", "01010"), [(0, 1)])
    v = sy.classify_incidence("01010", "0", "010")
    assert v.k == -1  # 2x = x + k (0 - x)
    ok, gap, _ = va.check_vertex_edge_separation(d)
    assert ok and gap > 0.1


def test_lattice_excuse_only_applies_outside_the_segment():
    d = raw_drawing(("0", "010", "01010"), [(0, 2)])
    ok, gap, bad = va.check_vertex_edge_separation(d)
    assert gap < 1e-12
    assert not ok and bad == [(1, 0, 2)]


def test_depth_six_mirrored_literal_is_separated():
    d = em.draw_truncation(6, seed=0, convention="literal", gluing="mirrored")
    r = va.validate(d)
    assert r.ok and r.min_vertex_gap > 1e-6 and r.min_vertex_edge_gap > 1e-6


def test_clusters_split_on_gaps():
    parts = va.cluster_lengths(np.array([1.0, 1.0 + 1e-12, 2.0, 0.5]), 1e-9)
    assert [sorted(p.tolist()) for p in parts] == [[3], [0, 1], [2]]


def test_foreign_length_is_rejected():
    d = triangle()
    d.coords = d.coords.copy()
    d.coords[2] *= 1.001
    with pytest.raises(UnexpectedLength):
        va.classify_edges(d)
    assert "UnexpectedLength" in [f["check"] for f in va.validate(d).failures]


def test_depth_eight_has_at_most_thirteen_classes():
    d = em.draw_truncation(8, seed=5, check=False)
    n, values = va.count_length_classes(d)
    assert len(d.edges) >= 3000 and n <= 13
    predicted = va.predicted_lengths(d)
    for v in values:
        assert min(abs(v - p) for p in predicted.values()) <= 1e-9


def test_coordinate_check():
    d = triangle()
    assert va.check_coordinates(d)[0]
    d.coords = d.coords.copy()
    d.coords[1] += 1e-6
    ok, v, dev = va.check_coordinates(d)
    assert not ok and v == 1 and dev > 1e-7


def test_report_keys_are_stable():
    keys = list(va.validate(triangle()).to_dict())
    assert keys == ["ok", "min_vertex_gap", "min_vertex_edge_gap", "n_length_classes",
                    "class_values", "failures"]


def test_oracle_examples():
    o = va.geometric_oracle(2)
    theta = em.sample_torus(7).theta
    x = np.exp(1j * theta[0])
    values = o.evaluate(theta) if hasattr(o, "evaluate") else o(theta)
    assert values["0"] == 0 and values["01"] == 1
    assert abs(values["010"] - x) < 1e-12
    assert abs(values["0101"] - (1 + x)) < 1e-12


@pytest.mark.parametrize("gluing", enc.GLUINGS)
def test_oracle_matches_formula(gluing):
    theta = np.random.default_rng(0).uniform(-np.pi, np.pi, (10, 12))
    assert va.oracle_deviation(6, theta, gluing=gluing) <= 1e-9


def test_certificate_small_depth():
    r = va.symbolic_certificate(3)
    assert r.pairs > 0 and not r.interior
    assert set(r.to_dict()) >= {"pairs", "ok", "verdicts", "contradictions"}


def test_certificate_mirrored_literal_depth_five():
    r = va.symbolic_certificate(5, "literal", "mirrored", samples=20)
    assert r.ok, r.to_dict()["contradictions"][:3]


def test_svg_is_byte_stable():
    d = rhombus(3)
    text = svg.render(d)
    assert text == svg.render(em.Drawing.from_json(d.to_json()))
    assert text.startswith("<svg") and text.count("<line") == 5 and text.count("<circle") == 4
    assert "a = 0.5 (4)" in text
