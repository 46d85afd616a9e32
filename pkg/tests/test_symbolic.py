import re
from pathlib import Path

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from td13 import encoding as enc, symbolic as sy
from td13.encoding import Role, TypeIndex
from td13.errors import NotAnEdge
from td13.symbolic import Monomial, Poly, Verdict

FIXTURE = Path(__file__).parent / "fixtures" / "goldens.txt"
X000 = Monomial.var(TypeIndex(0, 0, 0))
SYMS = [sympy.Symbol("x_{},{},{}".format(*t)) for t in enc.TYPE_INDICES]


def tex_to_sympy(text: str):
    """Read TeX-style notation, e.g. ``2x_{0,0,0}x_{1,0,1}+1``."""
    expr = re.sub(r"x_\{(\d),(\d),(\d)\}", r"*X(\1,\2,\3)", text)
    expr = re.sub(r"(^|[+-])\*", r"\1", expr)
    X = lambda q, r, s: SYMS[TypeIndex(q, r, s).flat]  # noqa: E731
    return sympy.expand(eval(expr, {"X": X}))


def poly_to_sympy(p: Poly):
    out = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sympy.Integer(c)
        for sym, h in zip(SYMS, m.exps):
            term *= sym ** sympy.Rational(h, 2)
        out += term
    return sympy.expand(out)


def golden_rows():
    for line in FIXTURE.read_text().splitlines():
        if line and not line.startswith("#"):
            yield tuple(line.split("\t"))


def test_type_indices_are_in_flat_order():
    assert [t.flat for t in enc.TYPE_INDICES] == list(range(12))


@pytest.mark.parametrize("label,printed", list(golden_rows()))
def test_goldens_against_sympy(label, printed):
    assert sympy.simplify(poly_to_sympy(sy.psi_poly(label)) - tex_to_sympy(printed)) == 0


def test_packaged_goldens_agree_with_fixture():
    from td13.selftest import load_goldens
    goldens = load_goldens()
    assert set(goldens) == {label for label, _ in golden_rows()}
    for label, printed in golden_rows():
        assert poly_to_sympy(sy.parse_poly(goldens[label])) == tex_to_sympy(printed)


def test_top_label_from_its_proper_code():
    node = enc.qr_decode(enc.QrCode((1, 1, 1), (0, 0, 1)))
    label = enc.pi(node, enc.Corner.V0)
    assert sy.format_poly(sy.psi_poly(label)) == (
        "x[0,0,0]*x[1,0,1]*x[1,0,2] + 2*x[0,0,0]*x[1,0,1] + x[0,0,0]")


@pytest.mark.parametrize("code,expected", [
    (((1,), (0,)), ["1", "x[0,0,0]"]),
    (((1, 1), (0, 0)), ["1", "x[0,0,0]", "x[0,0,0]*x[1,0,1]"]),
    (((1, 1, 1), (0, 0, 0)), ["1", "x[0,0,0]", "x[0,0,0]*x[1,0,1]",
                              "x[0,0,0]*x[1,0,1]*x[1,0,2]"]),
])
def test_p_chain_examples(code, expected):
    chain = sy.p_chain(code)
    assert [sy.format_poly(Poly.monomial(m)) for m in chain] == expected
    assert [m.degree for m in chain] == [2 * i for i in range(len(chain))]


def test_root_edge_constants():
    assert sy.psi_poly("0") == 0
    assert sy.psi_poly("01") == 1


def test_formula_matches_symbolic_gluing():
    for node in enc.iter_nodes(7):
        glued = sy.glued_corners(node)
        for c in (enc.Corner.V2, enc.Corner.V3):
            assert sy.psi_poly(enc.pi(node, c)) == glued[c]


@pytest.mark.parametrize("convention", enc.CONVENTIONS)
@pytest.mark.parametrize("gluing", enc.GLUINGS)
def test_injective_on_short_labels(convention, gluing):
    labs = list(enc.iter_labels(9))
    assert len({sy.psi_poly(l, convention, gluing) for l in labs}) == len(labs)


# -- text form --------------------------------------------------------------

monomials = st.lists(st.integers(-4, 6), min_size=12, max_size=12).map(
    lambda e: Monomial(tuple(e)))
polys = st.dictionaries(monomials, st.integers(-5, 5), max_size=6).map(Poly)


@given(polys)
def test_format_parse_round_trip(p):
    assert sy.parse_poly(sy.format_poly(p)) == p


def test_half_step_text():
    p = Poly.monomial(Monomial.var(0).sqrt_of_var(0))
    assert sy.format_poly(p) == "x[0,0,0]^1/2"
    assert sy.parse_poly("x[0,0,0]^1/2") == p


def test_trivariate_text():
    p = sy.parse_poly("2*y[1]^2 - y[0] + 3", nvars=3)
    assert sy.format_poly(p) == "2*y[1]^2 - y[0] + 3"


# -- evaluation -------------------------------------------------------------

angles = st.lists(st.floats(-np.pi, np.pi), min_size=12, max_size=12).map(np.array)


def test_evaluate_examples():
    theta = np.zeros(12)
    theta[0] = np.pi / 2
    assert sy.evaluate(Poly.constant(1), theta) == 1
    assert abs(sy.evaluate(Poly.monomial(X000), theta) - 1j) < 1e-12


@settings(max_examples=50)
@given(polys, polys, angles)
def test_evaluate_is_a_ring_homomorphism(p, q, theta):
    scale = 1 + abs(sy.evaluate(p, theta)) * abs(sy.evaluate(q, theta))
    assert abs(sy.evaluate(p + q, theta) - sy.evaluate(p, theta) - sy.evaluate(q, theta)) < 1e-9 * scale
    assert abs(sy.evaluate(p * q, theta) - sy.evaluate(p, theta) * sy.evaluate(q, theta)) < 1e-9 * scale


def test_evaluate_batches():
    theta = np.random.default_rng(0).uniform(-np.pi, np.pi, (5, 12))
    p = sy.psi_poly("0101001001")
    batch = sy.evaluate(p, theta)
    assert batch.shape == (5,)
    assert np.allclose(batch, [sy.evaluate(p, t) for t in theta])


# -- collapse and ascending -------------------------------------------------

def y(text):
    return sy.parse_poly(text, nvars=3)


def test_collapse_examples():
    assert sy.collapse(sy.psi_poly("010")) == y("y[0]")
    assert sy.collapse(sy.psi_poly("010100")) == y("y[0]*y[1] + y[0]")
    assert sy.collapse(Poly()) == Poly(nvars=3)


@pytest.mark.parametrize("text,expected", [
    ("1", True),
    ("y[0]", True),
    ("y[0]*y[1] + y[0]", True),
    ("y[0] + y[2]", False),
    ("y[1]", False),
    ("y[0]^2 + y[0]", True),
    ("-y[0]", False),
])
def test_ascending_examples(text, expected):
    assert sy.is_ascending(y(text)) is expected
    assert sy.brute_force_ascending(y(text)) is expected


def test_ascending_for_two_forward_turns():
    node = enc.qr_decode(enc.QrCode((1, 1), (0, 0)))
    label = enc.pi(node, enc.Corner.V0)
    assert sy.is_ascending(sy.collapse(sy.psi_poly(label)))


trivariate = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)).map(
        lambda e: Monomial(tuple(2 * v for v in e))),
    st.integers(0, 3), max_size=5,
).map(lambda d: Poly(d, 3))


@settings(max_examples=300)
@given(trivariate)
def test_ascending_scan_matches_brute_force(p):
    assert sy.is_ascending(p) == sy.brute_force_ascending(p)


def test_ascending_scan_matches_brute_force_on_psi():
    for label in enc.iter_labels(9):
        p = sy.collapse(sy.psi_poly(label))
        assert sy.is_ascending(p) == sy.brute_force_ascending(p)


# -- palindromicity ---------------------------------------------------------

def test_symmetric_monomial_examples():
    one = Monomial.one()
    assert sy.symmetric_monomial(X000, X000) == X000
    assert sy.symmetric_monomial(one, X000) == X000 ** 2
    assert sy.symmetric_monomial(X000, X000.sqrt_of_var(0)) == one


@pytest.mark.parametrize("P,expected", [
    (Poly({X000 ** 2: 1, Monomial.one(): 1}), True),
    (Poly({X000 ** 2: 1, Monomial.one(): 2}), False),
])
def test_palindromic_examples(P, expected):
    assert sy.is_palindromic_over_monomial(P, X000) is expected


@pytest.mark.parametrize("P,expected", [
    (Poly({X000: 1, Monomial.one(): -1}), True),
    (Poly({X000: 1, Monomial.one(): 1}), False),
])
def test_antipalindromic_examples(P, expected):
    assert sy.is_antipalindromic_over_binomial(P, X000, TypeIndex(0, 0, 0)) is expected


def test_predicates_agree_with_numeric_realness():
    from td13.selftest import check_palindromic
    ok, detail = check_palindromic(count=60, samples=300, seed=4)
    assert ok, detail


# -- incidence --------------------------------------------------------------

def test_edge_roles():
    assert sy.edge_role("0", "01") == (Role.SIDE, "1")
    assert sy.edge_role("01", "010") == (Role.DIAGONAL, "1")
    assert sy.edge_role("010", "0101") == (Role.SIDE, "1")
    with pytest.raises(NotAnEdge):
        sy.edge_role("0", "0101")


def test_incidence_trivial_cases():
    assert sy.classify_incidence("010", "0", "010") == (Verdict.INTEGER_OFFSET, 0)
    v = sy.classify_incidence("0", "0", "010")
    assert v.kind is Verdict.INTEGER_OFFSET and abs(v.k) == 1
    d = sy.classify_incidence("010", "01", "010")
    assert d == (Verdict.DIAGONAL_OFFSET, 0)


def test_incidence_collinear_beyond_the_edge():
    # 0, 010, 01010 are 0, x, 2x: the last lies past the end of (0, 010)
    v = sy.classify_incidence("01010", "0", "010")
    assert v.kind is Verdict.INTEGER_OFFSET and v.k not in (0, 1)
    assert v.is_offset


def test_incidence_non_real():
    assert sy.classify_incidence("01", "0", "010").kind is Verdict.NON_REAL_RATIO


def test_incidence_hint_is_checked():
    with pytest.raises(ValueError):
        sy.classify_incidence("0", "01", "010", edge_role_hint=Role.SIDE)


def test_every_edge_difference_is_a_side_or_diagonal():
    for e in enc.truncation(5).edges:
        ctx = sy.edge_context(e.u, e.w)
        if ctx.role is Role.SIDE:
            assert abs(ctx.denominator.single_term()[0]) == 1
        else:
            P = ctx.monomial
            expected = Poly({P: 1, P / Monomial.var(ctx.type_index): -1})
            assert ctx.denominator in (expected, -expected)
