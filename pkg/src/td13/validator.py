"""Numeric and symbolic checks on drawings, plus an independent oracle for psi."""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import encoding as enc
from . import symbolic as sy
from .encoding import TYPE_INDICES
from .errors import IncidenceContradiction, NotAnEdge, Td13Error, UnexpectedLength

SIDE_CLASS = "side"


@dataclass(frozen=True)
class Tolerances:
    vertex_gap: float = 1e-6
    vertex_edge_gap: float = 1e-6
    cluster: float = 1e-9
    coordinate: float = 1e-9


@dataclass
class ValidationReport:
    min_vertex_gap: float = float("inf")
    min_vertex_edge_gap: float = float("inf")
    n_length_classes: int = 0
    class_values: list[float] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        def num(v):
            return v if np.isfinite(v) else None

        return {
            "ok": self.ok,
            "min_vertex_gap": num(self.min_vertex_gap),
            "min_vertex_edge_gap": num(self.min_vertex_edge_gap),
            "n_length_classes": self.n_length_classes,
            "class_values": self.class_values,
            "failures": self.failures,
        }


# -- individual checks ------------------------------------------------------

def check_distinct_vertices(d, tol: float = 1e-6):
    """``(ok, min_gap, closest_pair)``; the pair is ``None`` below two vertices."""
    pts = np.column_stack([d.coords.real, d.coords.imag])
    if len(pts) < 2:
        return True, float("inf"), None
    dist, idx = cKDTree(pts).query(pts, k=2)
    i = int(np.argmin(dist[:, 1]))
    gap = float(dist[i, 1])
    # coincident points may list each other first, so take whichever is not i
    j = int(idx[i, 1]) if int(idx[i, 1]) != i else int(idx[i, 0])
    pair = tuple(sorted((i, j)))
    return gap > tol, gap, pair


def _segment_distances(coords: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Distances from every point to every closed segment, shape (edges, points)."""
    ab = b - a
    rel = coords[None, :] - a[:, None]
    length2 = np.abs(ab) ** 2
    t = (rel * np.conj(ab)[:, None]).real / np.where(length2 > 0, length2, 1)[:, None]
    t = np.clip(t, 0.0, 1.0)
    return np.abs(rel - t * ab[:, None])


def check_vertex_edge_separation(d, tol: float = 1e-6, chunk: int = 512):
    """``(ok, min_gap, offending (v, u, w) triples)`` over non-incident pairs.

    A pair closer than ``tol`` is forgiven when the labels show the vertex
    sitting at an integer offset along the edge's line, which is never inside
    the segment.
    """
    if not d.edges or d.n < 3:
        return True, float("inf"), []
    coords = d.coords
    E = np.asarray(d.edges)
    gap, bad = float("inf"), []
    idx = np.arange(d.n)
    for s in range(0, len(E), chunk):
        e = E[s:s + chunk]
        dist = _segment_distances(coords, coords[e[:, 0]], coords[e[:, 1]])
        dist[(idx[None, :] == e[:, :1]) | (idx[None, :] == e[:, 1:])] = np.inf
        gap = min(gap, float(dist.min()))
        for r, v in zip(*np.nonzero(dist <= tol)):
            u, w = (int(t) for t in e[r])
            if not _lattice_excused(d, int(v), u, w):
                bad.append((int(v), u, w))
    if bad:
        return False, gap, bad
    return True, gap, []


def _lattice_excused(d, v: int, u: int, w: int) -> bool:
    if not d.labels:
        return False
    try:
        verdict = sy.classify_incidence(d.labels[v], d.labels[u], d.labels[w],
                                        convention=d.convention, gluing=d.gluing)
    except (IncidenceContradiction, NotAnEdge, Td13Error):
        return False
    return verdict.is_offset and not 0 < verdict.k < 1


def predicted_lengths(d) -> dict[str, float]:
    """``{class id: length}`` for the side length ``a`` and each ``a |x_i - 1|``."""
    out = {SIDE_CLASS: float(d.scale)}
    for t, z in zip(TYPE_INDICES, d.x.x):
        out[t.key()] = float(d.scale * abs(z - 1))
    return out


def cluster_lengths(lengths: np.ndarray, tol: float) -> list[np.ndarray]:
    """Single-linkage clusters of 1-d values: consecutive gaps above ``tol`` split."""
    if not len(lengths):
        return []
    order = np.argsort(lengths, kind="stable")
    cuts = np.nonzero(np.diff(lengths[order]) > tol)[0] + 1
    return np.split(order, cuts)


def classify_edges(d, tol: float = 1e-9):
    """``(classes, edge class ids)``; raises :class:`UnexpectedLength`.

    ``classes`` lists ``{"id", "length", "count"}`` sorted by length.
    """
    lengths = d.edge_lengths()
    targets = predicted_lengths(d)
    ids = [None] * len(lengths)
    classes = []
    for members in cluster_lengths(lengths, tol):
        centre = float(np.mean(lengths[members]))
        # several type variables can share a length; prefer the lowest index
        key, value = min(targets.items(), key=lambda kv: abs(kv[1] - centre))
        if abs(value - centre) > tol or np.ptp(lengths[members]) > 2 * tol:
            raise UnexpectedLength(
                f"edge length {centre!r} matches no predicted value (nearest {key}={value!r})"
            )
        classes.append({"id": key, "length": float(value), "count": len(members)})
        for i in members:
            ids[int(i)] = key
    return classes, ids


def count_length_classes(d, tol: float = 1e-9) -> tuple[int, list[float]]:
    classes, _ = classify_edges(d, tol)
    return len(classes), [c["length"] for c in classes]


def check_coordinates(d, tol: float = 1e-9):
    """``(ok, worst vertex, deviation)`` against ``a * psi(label)`` at ``d.x``."""
    if not d.labels:
        return True, None, 0.0
    batch = sy.PolyBatch(sy.psi_poly(l, d.convention, d.gluing) for l in d.labels)
    dev = np.abs(d.scale * batch.evaluate(d.x) - d.coords)
    i = int(np.argmax(dev))
    return bool(dev[i] <= tol), i, float(dev[i])


def attach_classes(d, tolerances: Tolerances | None = None) -> None:
    tol = (tolerances or Tolerances()).cluster
    d.classes, d.edge_classes = classify_edges(d, tol)


def validate(d, tolerances: Tolerances | None = None, *, coordinates: bool = False) -> ValidationReport:
    """Run every check and collect failures instead of stopping at the first."""
    tol = tolerances or Tolerances()
    report = ValidationReport()
    ok, report.min_vertex_gap, pair = check_distinct_vertices(d, tol.vertex_gap)
    if not ok:
        report.failures.append({"check": "distinct_vertices", "pair": list(pair),
                                "gap": report.min_vertex_gap})
    ok, report.min_vertex_edge_gap, triples = check_vertex_edge_separation(d, tol.vertex_edge_gap)
    if not ok:
        v, u, w = triples[0]
        report.failures.append({"check": "vertex_edge_separation", "vertex": v,
                                "edge": [u, w], "count": len(triples)})
    try:
        report.n_length_classes, report.class_values = count_length_classes(d, tol.cluster)
        if report.n_length_classes > len(TYPE_INDICES) + 1:
            report.failures.append({"check": "length_classes",
                                    "count": report.n_length_classes})
    except UnexpectedLength as exc:
        report.failures.append({"check": "UnexpectedLength", "message": str(exc)})
    if coordinates:
        ok, v, dev = check_coordinates(d, tol.coordinate)
        if not ok:
            report.failures.append({"check": "coordinates", "vertex": v, "deviation": dev})
    return report


# -- the geometric oracle ---------------------------------------------------

class GeometricOracle:
    """Coordinates obtained by gluing unit rhombi along the tree, no formula involved."""

    def __init__(self, depth: int, convention: str = "figure", gluing: str = "folded"):
        self.depth = depth
        self.convention = convention
        self.gluing = gluing
        self.nodes = tuple(enc.iter_nodes(depth))
        self.types = np.array([enc.type_of(n, convention).flat for n in self.nodes])
        # per node: index of the parent and which parent corners form its base
        index = {n: i for i, n in enumerate(self.nodes)}
        self.parent = np.array([index.get(n[:-1], -1) for n in self.nodes])
        self.base = [enc.arc_base(n[-1], gluing) if len(n) > 1 else None for n in self.nodes]
        self.corner_labels = [enc.corners(n, gluing) for n in self.nodes]

    def evaluate(self, x) -> dict[str, np.ndarray]:
        """``{label: coordinates}``; one value per row of angles in ``x``."""
        theta = np.atleast_2d(np.asarray(getattr(x, "theta", x), dtype=float))
        z = np.exp(1j * theta)
        k = theta.shape[0]
        pos = np.zeros((len(self.nodes), 4, k), complex)
        out = {"0": np.zeros(k, complex), "01": np.ones(k, complex)}
        for i, node in enumerate(self.nodes):
            if self.parent[i] < 0:
                p0, p1 = out["0"], out["01"]
            else:
                lo, hi = self.base[i]
                p0, p1 = pos[self.parent[i], lo], pos[self.parent[i], hi]
                # the base corners must already carry the same labels
                names = self.corner_labels[self.parent[i]]
                if (names[lo], names[hi]) != self.corner_labels[i][:2]:
                    raise Td13Error(f"label mismatch gluing {node}")
            side = p1 - p0
            p2 = p0 + z[:, self.types[i]] * side
            pos[i] = (p0, p1, p2, p2 + side)
            names = self.corner_labels[i]
            out[names[2]], out[names[3]] = pos[i, 2], pos[i, 3]
        return out


def geometric_oracle(depth: int, convention: str = "figure", gluing: str = "folded") -> GeometricOracle:
    return GeometricOracle(depth, convention, gluing)


def oracle_deviation(depth: int, thetas: np.ndarray, convention: str = "figure",
                     gluing: str = "folded") -> float:
    """Largest ``|oracle - psi|`` over the depth-``depth`` labels at the given angles."""
    values = geometric_oracle(depth, convention, gluing).evaluate(thetas)
    labels = list(values)
    batch = sy.PolyBatch(sy.psi_poly(l, convention, gluing) for l in labels)
    formula = batch.evaluate(np.atleast_2d(thetas))
    oracle = np.stack([values[l] for l in labels], axis=1)
    return float(np.max(np.abs(formula - oracle)))


# -- the symbolic incidence certificate ------------------------------------

@dataclass
class CertificateReport:
    depth: int
    convention: str
    gluing: str
    pairs: int = 0
    verdicts: Counter = field(default_factory=Counter)
    contradictions: list[tuple[str, str, str]] = field(default_factory=list)
    interior: list[tuple[str, str, str, int]] = field(default_factory=list)
    numeric_failures: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.contradictions or self.interior or self.numeric_failures)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth, "convention": self.convention, "gluing": self.gluing,
            "pairs": self.pairs, "ok": self.ok,
            "verdicts": {f"{k[0]}({k[1]})" if k[1] is not None else k[0]: c
                         for k, c in sorted(self.verdicts.items(), key=str)},
            "contradictions": [list(t) for t in self.contradictions],
            "interior": [list(t) for t in self.interior],
            "numeric_failures": [list(t) for t in self.numeric_failures],
        }


def _certify_edges(args):
    edges, vertices, convention, gluing = args
    verdicts, contradictions, offsets = Counter(), [], []
    for u, w in edges:
        ctx = sy.edge_context(u, w, convention, gluing)
        for v in vertices:
            if v == u or v == w:
                continue
            try:
                r = sy.classify_with_context(v, ctx)
            except IncidenceContradiction:
                contradictions.append((v, u, w))
                verdicts[("CONTRADICTION", None)] += 1
                continue
            verdicts[(r.kind.value, r.k)] += 1
            if r.is_offset:
                offsets.append((v, u, w, r.k))
    return verdicts, contradictions, offsets


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TD13_THREADS", "1")))
    except ValueError:
        return 1


def symbolic_certificate(depth: int, convention: str = "figure", gluing: str = "folded", *,
                         samples: int = 100, seed: int = 0, strict: bool = False) -> CertificateReport:
    """Classify every (vertex, edge) pair of the depth-``depth`` truncation.

    Offset verdicts are replayed numerically: at ``samples`` torus points the
    vertex must sit on the edge's line at parameter ``k``, outside the open
    segment.  With ``strict`` the first contradiction raises.
    """
    tr = enc.truncation(depth, gluing)
    edges = [(e.u, e.w) for e in tr.edges]
    report = CertificateReport(depth, convention, gluing)
    workers = _workers()
    jobs = [(edges[i::workers], tr.vertices, convention, gluing) for i in range(workers)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_certify_edges, jobs))
    else:
        results = [_certify_edges(jobs[0])]
    offsets = []
    for verdicts, contradictions, offs in results:
        report.verdicts.update(verdicts)
        report.contradictions += contradictions
        offsets += offs
    report.pairs = sum(report.verdicts.values())
    report.contradictions.sort()
    if strict and report.contradictions:
        v, u, w = report.contradictions[0]
        raise IncidenceContradiction(f"{v} against ({u}, {w})")
    report.interior = sorted(o for o in offsets if 0 < o[3] < 1)
    if offsets and samples:
        theta = np.random.default_rng(seed).uniform(-np.pi, np.pi, (samples, len(TYPE_INDICES)))
        for v, u, w, k in offsets:
            pv, pu, pw = (sy.evaluate(sy.psi_poly(l, convention, gluing), theta) for l in (v, u, w))
            ratio = (pv - pw) / (pu - pw)
            if np.max(np.abs(ratio - k)) > 1e-9:
                report.numeric_failures.append((v, u, w))
    return report
