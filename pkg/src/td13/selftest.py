"""The property suites behind ``td13 selftest``."""
from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable

import numpy as np

from . import encoding as enc
from . import symbolic as sy
from . import validator
from .encoding import Corner
from .symbolic import Monomial, Poly


@dataclass
class SuiteResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> SuiteResult:
    start = time.perf_counter()
    ok, detail = fn()
    return SuiteResult(name, ok, detail, time.perf_counter() - start)


# -- individual suites ------------------------------------------------------

def check_encodings(depth: int) -> tuple[bool, str]:
    """QR round trip, closed-form labels, and the vertex/node correspondences."""
    bad: list[str] = []
    seen: dict[str, str] = {}
    for node in enc.iter_nodes(depth):
        if enc.qr_decode(enc.qr_encode(node)) != node:
            bad.append(f"qr {node}")
        names = enc.corners(node)
        for c in (Corner.V2, Corner.V3):
            label = names[c]
            if enc.pi_closed_form(node, c) != label:
                bad.append(f"closed form {node} {c}")
            if label in seen:
                bad.append(f"{label} covered twice")
            seen[label] = node
            if enc.host_node_of(label) != (node, c):
                bad.append(f"host {label}")
            proper = enc.proper_node_of(label)
            if not enc.qr_encode(proper).is_proper or enc.pi(proper, Corner.V0) != label:
                bad.append(f"proper {label}")
    for label in enc.ROOT_EDGE:
        proper = enc.proper_node_of(label)
        if not enc.qr_encode(proper).is_proper or enc.pi(proper, Corner.V0) != label:
            bad.append(f"proper {label}")
    return not bad, f"{len(seen)} labels, {len(bad)} failures" + (f", first {bad[0]}" if bad else "")


def load_goldens() -> dict[str, str]:
    text = resources.files("td13").joinpath("data/goldens.txt").read_text()
    rows = (line.split("\t") for line in text.splitlines() if line and not line.startswith("#"))
    return {label: poly for label, poly in rows}


def check_goldens(convention: str = "figure", gluing: str = "folded") -> tuple[bool, str]:
    goldens = load_goldens()
    wrong = [l for l, text in goldens.items()
             if sy.psi_poly(l, convention, gluing) != sy.parse_poly(text)]
    return not wrong, f"{len(goldens) - len(wrong)}/{len(goldens)} match" + (
        f", first mismatch {wrong[0]}" if wrong else "")


def check_oracle(depth: int, points: int, seed: int = 0, convention: str = "figure",
                 gluing: str = "folded", tol: float = 1e-9) -> tuple[bool, str]:
    theta = np.random.default_rng(seed).uniform(-np.pi, np.pi, (points, len(enc.TYPE_INDICES)))
    dev = validator.oracle_deviation(depth, theta, convention, gluing)
    return dev <= tol, f"max deviation {dev:.3g} over {points} points"


def check_ascending(labels, convention: str = "figure", gluing: str = "folded") -> tuple[bool, str]:
    labels = list(labels)
    bad = [l for l in labels if not sy.is_ascending(sy.collapse(sy.psi_poly(l, convention, gluing)))]
    return not bad, f"{len(labels) - len(bad)}/{len(labels)} ascending" + (
        f", first failure {bad[0]}" if bad else "")


def random_trivariate(rng: np.random.Generator, max_degree: int = 6, max_terms: int = 6) -> Poly:
    terms: dict[Monomial, int] = {}
    for _ in range(int(rng.integers(0, max_terms + 1))):
        e = rng.multinomial(int(rng.integers(0, max_degree + 1)), [1 / 3] * 3)
        m = Monomial(tuple(2 * int(v) for v in e))
        terms[m] = terms.get(m, 0) + int(rng.integers(-3, 4))
    return Poly(terms, 3)


def _reflect(p: Poly, centre: Monomial, sign: int) -> Poly:
    return Poly({sy.symmetric_monomial(L, centre): sign * c for L, c in p.terms.items()}, 3)


def palindromic_cases(count: int, seed: int = 0):
    """``(P, M, i)`` triples: a third random, a third palindromic, a third antipalindromic.

    ``i`` is the variable of the binomial ``M (1 - x_i^{-1})``; it is ignored by
    the monomial predicate.
    """
    rng = np.random.default_rng(seed)
    for k in range(count):
        P = random_trivariate(rng)
        M = Monomial(tuple(int(v) for v in rng.integers(0, 7, 3)))
        i = int(rng.integers(0, 3))
        kind = k % 3
        if kind == 1:
            P = P + _reflect(P, M, 1)
        elif kind == 2:
            P = P - _reflect(P, M.sqrt_of_var(i), 1)
        yield P, M, i


def numerically_real(values: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.all(np.abs(values.imag) <= tol * np.maximum(1.0, np.abs(values))))


def check_palindromic(count: int = 200, samples: int = 1000, seed: int = 0) -> tuple[bool, str]:
    theta = np.random.default_rng(seed + 1).uniform(-np.pi, np.pi, (samples, 3))
    z = np.exp(1j * theta)
    disagree = []
    for n, (P, M, i) in enumerate(palindromic_cases(count, seed)):
        pv = np.atleast_1d(sy.evaluate(P, theta))
        mv = np.atleast_1d(sy.evaluate(Poly({M: 1}, 3), theta))
        if sy.is_palindromic_over_monomial(P, M) != numerically_real(pv / mv):
            disagree.append(("monomial", n))
        den = mv * (1 - 1 / z[:, i])
        if sy.is_antipalindromic_over_binomial(P, M, i) != numerically_real(pv / den):
            disagree.append(("binomial", n))
    return not disagree, f"{2 * count} predicate calls, {len(disagree)} disagreements"


def check_certificate(depth: int, convention: str = "figure", gluing: str = "folded",
                      samples: int = 100) -> tuple[bool, str]:
    r = validator.symbolic_certificate(depth, convention, gluing, samples=samples)
    offsets = sum(c for (kind, k), c in r.verdicts.items() if k is not None)
    detail = (f"{r.pairs} pairs, {offsets} offsets, {len(r.contradictions)} contradictions, "
              f"{len(r.interior)} interior, {len(r.numeric_failures)} numeric failures")
    if r.contradictions:
        v, u, w = r.contradictions[0]
        detail += f"; first contradiction {v} vs ({u}, {w})"
    return r.ok, detail


def run_all(depth: int = 6, seeds: int = 25, convention: str = "figure",
            gluing: str = "folded") -> list[SuiteResult]:
    labels = enc.truncation(depth, gluing).vertices
    return [
        _timed("encoding", lambda: check_encodings(depth)),
        _timed("goldens", lambda: check_goldens(convention, gluing)),
        _timed("oracle", lambda: check_oracle(depth, seeds, 0, convention, gluing)),
        _timed("ascending", lambda: check_ascending(labels, convention, gluing)),
        _timed("palindromic", lambda: check_palindromic(seed=seeds)),
        _timed("certificate", lambda: check_certificate(depth, convention, gluing)),
    ]
