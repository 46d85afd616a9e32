"""Acceptance criteria 1 to 10, run on the default model (figure convention,
folded gluing).  Each test records one PASS or FAIL line; the lines are echoed
in the pytest summary.  A final informational test repeats the criteria that
fail by default under the literal convention with mirrored gluing.
"""
import time

import numpy as np
import pytest

from td13 import embedder as em, encoding as enc, selftest, symbolic as sy, validator as va

from test_symbolic import golden_rows, poly_to_sympy, tex_to_sympy

CONVENTION, GLUING = "figure", "folded"


def line(n: int, ok: bool, text: str) -> str:
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}"


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


# -- criterion bodies, shared with the informational run --------------------

def golden_vectors(convention, gluing):
    rows = list(golden_rows())
    wrong = [label for label, printed in rows
             if poly_to_sympy(sy.psi_poly(label, convention, gluing)) != tex_to_sympy(printed)]
    return rows, wrong


def depth_six_drawings(convention, gluing, seeds=range(20)):
    first_try = within = 0
    gaps = []
    for seed in seeds:
        try:
            d = em.draw_truncation(6, seed=seed, convention=convention, gluing=gluing, budget=5)
        except Exception as exc:  # RetryBudgetExhausted
            gaps.append(getattr(exc, "min_gap", None))
            continue
        within += 1
        first_try += d.attempts == 1
    return first_try, within, gaps


def ascending_failures(convention, gluing):
    labels = list(enc.iter_labels(8))
    bad = [l for l in labels
           if not sy.is_ascending(sy.collapse(sy.psi_poly(l, convention, gluing)))]
    return labels, bad


def random_graphs(convention, gluing, count=100, seed=0):
    rng = np.random.default_rng(seed)
    ok, failures = 0, []
    for i in range(count):
        g = em.random_maximal_outerplanar(int(rng.integers(3, 201)), rng)
        try:
            d = em.draw(g, seed=i, convention=convention, gluing=gluing)
            back = em.Drawing.from_json(d.to_json())
            report = va.validate(back, coordinates=True)
        except Exception as exc:
            failures.append((i, g.n, type(exc).__name__, getattr(exc, "failing_check", None)))
            continue
        if report.ok:
            ok += 1
        else:
            failures.append((i, g.n, "verify", report.failures[0]["check"]))
    return ok, failures


# -- the criteria -----------------------------------------------------------

def test_criterion_01_golden_vectors(report_line):
    with Clock() as c:
        rows, wrong = golden_vectors(CONVENTION, GLUING)
    ok = not wrong and c.seconds < 1
    report_line("C1", line(1, ok, f"{len(rows) - len(wrong)}/{len(rows)} golden polynomials "
                              f"match symbolically in {c.seconds:.2f}s"))
    assert ok, wrong


def test_criterion_02_thirteen_lengths(report_line):
    with Clock() as c:
        d = em.draw_truncation(8, seed=0, convention=CONVENTION, gluing=GLUING, check=False)
        n, values = va.count_length_classes(d, 1e-9)
    predicted = list(va.predicted_lengths(d).values())
    worst = max(min(abs(v - p) for p in predicted) for v in values)
    ok = len(d.edges) >= 3000 and n <= 13 and worst <= 1e-9 and c.seconds < 30
    report_line("C2", line(2, ok, f"{len(d.edges)} edges, {n} length classes, "
                              f"worst match {worst:.1e}, {c.seconds:.1f}s"))
    assert ok


def test_criterion_03_oracle(report_line):
    theta = np.random.default_rng(3).uniform(-np.pi, np.pi, (25, 12))
    with Clock() as c:
        dev = va.oracle_deviation(8, theta, CONVENTION, GLUING)
    ok = dev <= 1e-9
    report_line("C3", line(3, ok, f"max deviation {dev:.2e} over depth 8 at 25 points, "
                              f"{c.seconds:.1f}s"))
    assert ok


def test_criterion_04_drawing_validity(report_line):
    with Clock() as c:
        first_try, within, gaps = depth_six_drawings(CONVENTION, GLUING)
    ok = within == 20 and first_try >= 19
    report_line("C4", line(4, ok, f"depth 6 at 20 seeds: {within}/20 within budget 5, "
                              f"{first_try}/20 on the first try, {c.seconds:.1f}s"))
    assert ok


def test_criterion_05_injectivity(report_line):
    labels = list(enc.iter_labels(8))
    with Clock() as c:
        polys = [sy.psi_poly(l, CONVENTION, GLUING) for l in labels]
        equal = [(a, b) for i, a in enumerate(labels) for j, b in enumerate(labels)
                 if i < j and polys[i] == polys[j]]
    ok = not equal and c.seconds < 60
    report_line("C5", line(5, ok, f"{len(labels)} labels, {len(labels) * (len(labels) - 1) // 2} "
                              f"pairs, {len(equal)} equal, {c.seconds:.2f}s"))
    assert ok, equal[:5]


def test_criterion_06_ascending(report_line):
    labels, bad = ascending_failures(CONVENTION, GLUING)
    ok = not bad
    report_line("C6", line(6, ok, f"{len(labels) - len(bad)}/{len(labels)} labels ascending"
                              + (f", first failure {bad[0]}" if bad else "")))
    assert ok, bad


def test_criterion_07_palindromic(report_line):
    with Clock() as c:
        ok, detail = selftest.check_palindromic(count=200, samples=1000, seed=7)
    report_line("C7", line(7, ok, f"{detail}, {c.seconds:.2f}s"))
    assert ok


def test_criterion_08_certificate(report_line):
    with Clock() as c:
        r = va.symbolic_certificate(5, CONVENTION, GLUING, samples=100)
    detail = (f"{r.pairs} pairs, {len(r.contradictions)} real non-integer ratios, "
              f"{len(r.interior)} interior, {len(r.numeric_failures)} numeric failures")
    if r.contradictions:
        v, u, w = r.contradictions[0]
        detail += f", first {v} vs ({u}, {w})"
    report_line("C8", line(8, r.ok, f"{detail}, {c.seconds:.1f}s"))
    assert r.ok


def test_criterion_09_encodings(report_line):
    with Clock() as c:
        ok, detail = selftest.check_encodings(10)
    ok = ok and c.seconds < 30
    report_line("C9", line(9, ok, f"depth 10: {detail}, {c.seconds:.1f}s"))
    assert ok


def test_criterion_10_end_to_end(report_line):
    with Clock() as c:
        ok_count, failures = random_graphs(CONVENTION, GLUING)
    ok = ok_count == 100 and c.seconds < 60
    report_line("C10", line(10, ok, f"{ok_count}/100 random graphs drawn and verified in "
                                f"{c.seconds:.1f}s" + (f", first failure {failures[0]}"
                                                       if failures else "")))
    assert ok, failures


# -- informational ----------------------------------------------------------

def test_info_literal_mirrored(report_line):
    """Not a criterion: the same measurements under the alternative model."""
    conv, glue = "literal", "mirrored"
    rows, wrong = golden_vectors(conv, glue)
    report_line("I1", f"info (literal, mirrored) criterion  1: "
                      f"{len(rows) - len(wrong)}/{len(rows)} golden polynomials match")
    first_try, within, _ = depth_six_drawings(conv, glue)
    report_line("I4", f"info (literal, mirrored) criterion  4: {within}/20 within budget, "
                      f"{first_try}/20 first try")
    labels, bad = ascending_failures(conv, glue)
    report_line("I6", f"info (literal, mirrored) criterion  6: "
                      f"{len(labels) - len(bad)}/{len(labels)} ascending")
    r = va.symbolic_certificate(5, conv, glue, samples=100)
    report_line("I8", f"info (literal, mirrored) criterion  8: {r.pairs} pairs, "
                      f"{len(r.contradictions)} real non-integer ratios, ok={r.ok}")
    ok_count, _ = random_graphs(conv, glue)
    report_line("I10", f"info (literal, mirrored) criterion 10: {ok_count}/100 graphs")
