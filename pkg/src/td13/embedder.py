"""From a user outerplanar graph to coordinates.

The pipeline is: validate the outer order and chords, fan-triangulate every
chord-bounded face, walk the triangles from the base edge while placing them
on rhombi of the tree, then evaluate ``a * psi`` at a random torus point.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import encoding as enc
from . import symbolic as sy
from .encoding import Corner, TYPE_INDICES
from .errors import (
    BadEdge, BadOrder, BaseEdgeNotOnOuterFace, CrossingChords, DuplicateEdge,
    InputError, RetryBudgetExhausted, Td13Error, TooSmall,
)

DEFAULT_SCALE = 0.5
RETRY_BUDGET = 5
_MASK64 = (1 << 64) - 1


def next_seed(seed: int) -> int:
    """Deterministic successor used when a sample has to be redrawn."""
    return (seed * 6364136223846793005 + 1442695040888963407) & _MASK64


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class PlaneGraphInput:
    """A graph together with the cyclic order of its vertices on the outer face."""

    n: int
    outer_order: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_dict(cls, obj) -> "PlaneGraphInput":
        if not isinstance(obj, dict):
            raise InputError("graph must be a JSON object")
        try:
            n = obj["n"]
            order = obj.get("outer_order", list(range(n)) if isinstance(n, int) else None)
            edges = obj.get("edges", [])
        except (KeyError, TypeError) as exc:
            raise InputError(f"missing field: {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InputError("n must be a positive integer")
        if not isinstance(order, list):
            raise BadOrder("outer_order must be a list")
        out = []
        for e in edges:
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise BadEdge(f"edge {e!r} is not a pair")
            out.append(tuple(e))
        return cls(n, tuple(order), tuple(out))

    @classmethod
    def from_json(cls, text: str) -> "PlaneGraphInput":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc}") from None
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        return {"n": self.n, "outer_order": list(self.outer_order),
                "edges": [list(e) for e in self.edges]}

    def edge_set(self) -> set[tuple[int, int]]:
        return {_edge(*e) for e in self.edges}

    def cycle_edges(self) -> list[tuple[int, int]]:
        k = len(self.outer_order)
        if k < 2:
            return []
        pairs = [(self.outer_order[i], self.outer_order[(i + 1) % k]) for i in range(k)]
        return sorted({_edge(*p) for p in pairs})


def validate_input(g: PlaneGraphInput) -> PlaneGraphInput:
    """Check the order and edges; return ``g`` with sorted, normalised edges."""
    n = g.n
    order = g.outer_order
    if any(not isinstance(v, int) or isinstance(v, bool) for v in order):
        raise BadOrder("outer_order entries must be integers")
    if sorted(order) != list(range(n)):
        raise BadOrder(f"outer_order must be a permutation of 0..{n - 1}")
    seen: set[tuple[int, int]] = set()
    for e in g.edges:
        u, v = e
        if any(not isinstance(t, int) or isinstance(t, bool) for t in e):
            raise BadEdge(f"edge {e!r} has non-integer endpoints")
        if not (0 <= u < n and 0 <= v < n):
            raise BadEdge(f"edge {e!r} leaves the vertex range")
        if u == v:
            raise BadEdge(f"loop at {u}")
        key = _edge(u, v)
        if key in seen:
            raise DuplicateEdge(f"edge {key} appears twice")
        seen.add(key)
    crossing = find_crossing(order, seen)
    if crossing:
        raise CrossingChords(*crossing)
    return PlaneGraphInput(n, tuple(order), tuple(sorted(seen)))


def find_crossing(order: Sequence[int], edges: Iterable[tuple[int, int]]):
    """A pair of crossing chords, or ``None``.

    Chords are sorted by left end (longest first on ties) and swept with a
    stack of open intervals; a laminar family never overhangs the top.
    """
    pos = {v: i for i, v in enumerate(order)}
    spans = sorted(
        ((min(pos[u], pos[v]), max(pos[u], pos[v])), (u, v)) for u, v in edges
    )
    spans.sort(key=lambda s: (s[0][0], -s[0][1]))
    stack: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for (lo, hi), e in spans:
        while stack and stack[-1][0][1] <= lo:
            stack.pop()
        if stack and hi > stack[-1][0][1]:
            return stack[-1][1], e
        stack.append(((lo, hi), e))
    return None


def faces(g: PlaneGraphInput) -> list[list[int]]:
    """Bounded faces of the outer cycle plus chords, each as a vertex cycle."""
    n = len(g.outer_order)
    pos = {v: i for i, v in enumerate(g.outer_order)}
    reach: list[list[int]] = [[] for _ in range(n)]
    for u, v in g.edge_set():
        lo, hi = sorted((pos[u], pos[v]))
        if hi - lo > 1 and (lo, hi) != (0, n - 1):
            reach[lo].append(hi)
    for r in reach:
        r.sort()
    out, todo = [], [(0, n - 1)]
    while todo:
        s, e = todo.pop()
        cyc, i = [s], s
        while i != e:
            ends = reach[i]
            k = bisect.bisect_right(ends, e)
            if i == s and k and ends[k - 1] == e:
                k -= 1  # the face's own bounding chord
            j = ends[k - 1] if k else i + 1
            if j - i > 1:
                todo.append((i, j))
            cyc.append(j)
            i = j
        out.append([g.outer_order[p] for p in cyc])
    return out


def triangulate(g: PlaneGraphInput) -> tuple[PlaneGraphInput, tuple[tuple[int, int], ...]]:
    """Maximal outerplanar supergraph of ``g`` and the edges that were added.

    Each face is fanned from its lowest-numbered vertex, so the result only
    depends on the input.
    """
    if g.n < 3:
        raise TooSmall(f"need at least 3 vertices to triangulate, got {g.n}")
    edges = g.edge_set()
    added = set(g.cycle_edges()) - edges
    edges |= added
    closed = PlaneGraphInput(g.n, g.outer_order, tuple(sorted(edges)))
    for face in faces(closed):
        k = len(face)
        if k == 3:
            continue
        i = face.index(min(face))
        apex = face[i]
        for j in range(2, k - 1):
            e = _edge(apex, face[(i + j) % k])
            added.add(e)
            edges.add(e)
    out = PlaneGraphInput(g.n, g.outer_order, tuple(sorted(edges)))
    return out, tuple(sorted(added))


def _resolve_base(g: PlaneGraphInput, base_edge) -> tuple[int, int]:
    if base_edge is None:
        return g.outer_order[0], g.outer_order[1]
    u, v = (int(t) for t in base_edge)
    k = len(g.outer_order)
    pos = {w: i for i, w in enumerate(g.outer_order)}
    if u not in pos or v not in pos or (pos[u] - pos[v]) % k not in (1, k - 1):
        raise BaseEdgeNotOnOuterFace(f"({u}, {v}) is not an outer-cycle edge")
    return u, v


def map_to_tstar(g: PlaneGraphInput, base_edge=None, gluing: str = "folded") -> dict[int, str]:
    """Label every vertex of a maximal outerplanar ``g`` with a vertex of T*.

    The triangles are walked from the base edge.  A triangle entered through
    a rhombus base becomes that rhombus's first half; the triangle across its
    diagonal becomes the second half, and the three remaining sides lead to
    the left, forward and right children.  Every edge of ``g`` lands on a
    rhombus edge, i.e. :func:`encoding.is_cover_edge` holds for it.
    """
    b0, b1 = _resolve_base(g, base_edge)
    adj: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)

    def apex(x: int, y: int, avoid: int | None) -> int | None:
        common = adj[x] & adj[y]
        common.discard(avoid)
        if len(common) > 1:
            raise Td13Error(f"edge ({x}, {y}) lies on more than two triangles")
        return next(iter(common), None)

    labels = {b0: "0", b1: "01"}
    # (node, input vertices at v0 and v1, vertex across the base)
    stack: list[tuple[str, int, int, int | None]] = [(enc.ROOT, b0, b1, None)]
    while stack:
        node, p0, p1, avoid = stack.pop()
        p2 = apex(p0, p1, avoid)
        if p2 is None:
            continue
        names = enc.corners(node, gluing)
        labels[p2] = names[Corner.V2]
        p3 = apex(p1, p2, p0)
        if p3 is not None:
            labels[p3] = names[Corner.V3]
        here = (p0, p1, p2, p3)
        for arc, far in (("0", p1), ("1", p1), ("2", p2)):
            lo, hi = enc.arc_base(arc, gluing)
            if arc != "0" and p3 is None:
                continue
            stack.append((node + arc, here[lo], here[hi], far))
    if len(labels) != g.n:
        raise Td13Error("graph is not a connected maximal outerplanar graph")
    for u, v in g.edges:
        if not enc.is_cover_edge(labels[u], labels[v], gluing):
            raise Td13Error(f"edge ({u}, {v}) was not placed on a rhombus edge")
    return labels


# -- torus sampling ---------------------------------------------------------

@dataclass(frozen=True)
class TorusPoint:
    """Twelve angles, one per type index, and the seed that produced them."""

    theta: tuple[float, ...]
    seed: int | None = None

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        if len(theta) != len(TYPE_INDICES):
            raise ValueError(f"expected {len(TYPE_INDICES)} angles")
        object.__setattr__(self, "theta", theta)

    @property
    def x(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.theta))

    def to_dict(self) -> dict[str, float]:
        return {t.key(): a for t, a in zip(TYPE_INDICES, self.theta)}

    @classmethod
    def from_dict(cls, obj: dict, seed: int | None = None) -> "TorusPoint":
        return cls(tuple(float(obj[t.key()]) for t in TYPE_INDICES), seed)


def sample_torus(seed: int) -> TorusPoint:
    rng = np.random.default_rng(seed)
    return TorusPoint(tuple(rng.uniform(-math.pi, math.pi, len(TYPE_INDICES))), seed)


# -- drawings ---------------------------------------------------------------

@dataclass
class Drawing:
    n: int
    coords: np.ndarray
    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    x: TorusPoint
    scale: float = DEFAULT_SCALE
    convention: str = "figure"
    gluing: str = "folded"
    base_edge: tuple[int, int] | None = None
    augmented: tuple[tuple[int, int], ...] = ()
    seed: int | None = None
    attempts: int = 1
    classes: list[dict] = field(default_factory=list)
    edge_classes: list[str] = field(default_factory=list)

    def edge_lengths(self) -> np.ndarray:
        if not self.edges:
            return np.zeros(0)
        e = np.asarray(self.edges)
        return np.abs(self.coords[e[:, 0]] - self.coords[e[:, 1]])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "scale": self.scale,
            "seed": self.seed,
            "sample_seed": self.x.seed,
            "attempts": self.attempts,
            "convention": self.convention,
            "gluing": self.gluing,
            "base_edge": list(self.base_edge) if self.base_edge else None,
            "x": self.x.to_dict(),
            "labels": list(self.labels),
            "coords": [[float(z.real), float(z.imag)] for z in self.coords],
            "edges": [list(e) for e in self.edges],
            "augmented": [list(e) for e in self.augmented],
            "classes": self.classes,
            "edge_classes": self.edge_classes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, obj: dict) -> "Drawing":
        try:
            coords = np.array([complex(re, im) for re, im in obj["coords"]], dtype=complex)
            base = obj.get("base_edge")
            return cls(
                n=int(obj["n"]),
                coords=coords,
                labels=tuple(obj.get("labels") or ()),
                edges=tuple(tuple(int(t) for t in e) for e in obj["edges"]),
                x=TorusPoint.from_dict(obj["x"], obj.get("sample_seed")),
                scale=float(obj["scale"]),
                convention=obj.get("convention", "figure"),
                gluing=obj.get("gluing", "folded"),
                base_edge=tuple(base) if base else None,
                augmented=tuple(tuple(e) for e in obj.get("augmented", ())),
                seed=obj.get("seed"),
                attempts=int(obj.get("attempts", 1)),
                classes=list(obj.get("classes", [])),
                edge_classes=list(obj.get("edge_classes", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed drawing: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Drawing":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc}") from None


def embed_labels(labels: Sequence[str], edges, seed: int = 0, scale: float = DEFAULT_SCALE,
                 convention: str = "figure", gluing: str = "folded", *,
                 budget: int = RETRY_BUDGET, tolerances=None, check: bool = True,
                 **extra) -> Drawing:
    """Draw an already-labelled graph, resampling the torus point on failure.

    With ``check=False`` the first sample is kept without the separation
    checks; edge lengths are still classified.
    """
    from . import validator  # validator depends on Drawing

    if not 0 < scale <= 1:
        raise InputError(f"scale must lie in (0, 1], got {scale}")
    batch = sy.PolyBatch(sy.psi_poly(l, convention, gluing) for l in labels)
    current, worst = int(seed) & _MASK64, None
    for attempt in range(1, budget + 1):
        x = sample_torus(current)
        d = Drawing(n=len(labels), coords=scale * batch.evaluate(x), labels=tuple(labels),
                    edges=tuple(edges), x=x, scale=scale, convention=convention,
                    gluing=gluing, seed=seed, attempts=attempt, **extra)
        report = validator.validate(d, tolerances) if check else None
        if report is None or report.ok:
            validator.attach_classes(d, tolerances)
            return d
        worst = report
        current = next_seed(current)
    failing = worst.failures[0] if worst.failures else None
    gap = min(worst.min_vertex_gap, worst.min_vertex_edge_gap)
    raise RetryBudgetExhausted(
        f"no valid sample in {budget} attempts; last failure: {failing}",
        failing_check=failing.get("check") if failing else None,
        min_gap=gap,
    )


def draw(g: PlaneGraphInput, seed: int = 0, scale: float = DEFAULT_SCALE, *,
         convention: str = "figure", gluing: str = "folded", base_edge=None,
         keep_augmented: bool = False, budget: int = RETRY_BUDGET,
         tolerances=None) -> Drawing:
    """Coordinates ``a * psi(label(v))`` for the vertices of ``g``."""
    g = validate_input(g)
    if g.n < 3:
        order = g.outer_order
        base = tuple(base_edge) if base_edge else tuple(order[:2])
        labels = ["0"] * g.n
        if g.n == 2:
            if set(base) != {0, 1}:
                raise BaseEdgeNotOnOuterFace(f"{base} is not an edge of a 2-vertex graph")
            labels[base[1]] = "01"
        return embed_labels(labels, g.edges, seed, scale, convention, gluing,
                            budget=budget, tolerances=tolerances,
                            base_edge=base if g.n == 2 else None)
    full, added = triangulate(g)
    base = _resolve_base(full, base_edge)
    names = map_to_tstar(full, base, gluing)
    edges = full.edges if keep_augmented else g.edges
    return embed_labels([names[v] for v in range(g.n)], edges, seed, scale, convention,
                        gluing, budget=budget, tolerances=tolerances, base_edge=base,
                        augmented=added)


def random_maximal_outerplanar(n: int, rng: np.random.Generator) -> PlaneGraphInput:
    """A random maximal outerplanar graph on ``n`` vertices with shuffled ids.

    Built by recursively splitting the polygon with a random chord, then
    relabelling the vertices so that the outer order is a random permutation.
    """
    chords: list[tuple[int, int]] = []
    todo = [(0, n - 1)] if n > 2 else []
    while todo:
        s, e = todo.pop()
        if e - s < 2:
            continue
        k = int(rng.integers(s + 1, e))
        for a, b in ((s, k), (k, e)):
            if b - a > 1:
                chords.append((a, b))
        todo += [(s, k), (k, e)]
    perm = rng.permutation(n).tolist()
    cycle = [(i, (i + 1) % n) for i in range(n)] if n > 1 else []
    edges = sorted({_edge(perm[a], perm[b]) for a, b in cycle + chords})
    return PlaneGraphInput(n, tuple(perm), tuple(edges))


def draw_truncation(depth: int, seed: int = 0, scale: float = DEFAULT_SCALE, *,
                    convention: str = "figure", gluing: str = "folded",
                    budget: int = RETRY_BUDGET, tolerances=None, check: bool = True) -> Drawing:
    """Draw the graph covered by the rhombi of path length at most ``depth``."""
    tr = enc.truncation(depth, gluing)
    index = {l: i for i, l in enumerate(tr.vertices)}
    edges = [(index[e.u], index[e.w]) for e in tr.edges]
    return embed_labels(tr.vertices, edges, seed, scale, convention, gluing,
                        budget=budget, tolerances=tolerances, check=check, base_edge=(0, 1))
