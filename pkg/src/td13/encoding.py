"""Names for vertices of T* and nodes of the rhombus tree H*.

Vertex labels are plain strings over ``{0,1}``; node paths are strings over
``{0,1,2}`` that start with the root trit ``1``.  Arc ``0`` steps left across
the ``(v0, v2)`` edge, arc ``1`` steps forward across ``(v2, v3)`` and arc
``2`` steps right across ``(v1, v3)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum, IntEnum
from functools import lru_cache
from typing import Iterator, NamedTuple

from .errors import MalformedLabel, MalformedPath, RootEdgeVertex

ROOT = "1"
ROOT_EDGE = ("0", "01")


class Corner(IntEnum):
    V0 = 0
    V1 = 1
    V2 = 2
    V3 = 3

    def __str__(self):
        return f"v{int(self)}"


class Role(str, Enum):
    SIDE = "SIDE"
    DIAGONAL = "DIAGONAL"


class TypeIndex(NamedTuple):
    """Which of the twelve torus variables sets a rhombus angle."""

    q: int
    r: int
    s: int

    @property
    def flat(self) -> int:
        return 6 * self.q + 3 * self.r + self.s

    def key(self) -> str:
        return f"{self.q},{self.r},{self.s}"


TYPE_INDICES: tuple[TypeIndex, ...] = tuple(
    TypeIndex(q, r, s) for q in (0, 1) for r in (0, 1) for s in (0, 1, 2)
)
ROOT_TYPE = TYPE_INDICES[0]

CONVENTIONS = ("figure", "literal")


# -- validation -------------------------------------------------------------

def validate_vertex_label(bits) -> str:
    """Return ``bits`` as a label string, or raise :class:`MalformedLabel`."""
    label = "".join(str(b) for b in bits) if not isinstance(bits, str) else bits
    if not label:
        raise MalformedLabel("empty label")
    if set(label) - {"0", "1"}:
        raise MalformedLabel(f"{label!r} is not a bit string")
    if not "010".startswith(label[:3]):
        raise MalformedLabel(f"{label!r} must start with 0, 01 or 010")
    return label


def validate_node_path(trits) -> str:
    path = "".join(str(t) for t in trits) if not isinstance(trits, str) else trits
    if not path or path[0] != ROOT:
        raise MalformedPath(f"{path!r} must start with the root trit 1")
    if set(path) - {"0", "1", "2"}:
        raise MalformedPath(f"{path!r} is not a trit string")
    return path


def is_tstar_edge(a, b) -> bool:
    """Adjacency in T*: the longer label extends the shorter by ``0 1*`` or ``1 0*``."""
    a = validate_vertex_label(a)
    b = validate_vertex_label(b)
    if len(a) > len(b):
        a, b = b, a
    if len(a) == len(b) or not b.startswith(a):
        return False
    tail = b[len(a):]
    return tail[1:] == ("1" if tail[0] == "0" else "0") * (len(tail) - 1)


# -- the covering map -------------------------------------------------------

GLUINGS = ("folded", "mirrored")

# corners of the parent that become the child's (v0, v1)
_ARC_BASE = {
    "folded": {"0": (Corner.V0, Corner.V2), "1": (Corner.V2, Corner.V3), "2": (Corner.V1, Corner.V3)},
    "mirrored": {"0": (Corner.V0, Corner.V2), "1": (Corner.V2, Corner.V3), "2": (Corner.V3, Corner.V1)},
}


def arc_base(arc: str, gluing: str = "folded") -> tuple[Corner, Corner]:
    try:
        return _ARC_BASE[gluing][arc]
    except KeyError:
        raise ValueError(f"unknown gluing {gluing!r} or arc {arc!r}") from None


@lru_cache(maxsize=1 << 17)
def corners(node: str, gluing: str = "folded") -> tuple[str, str, str, str]:
    """``(pi(node, v0), ..., pi(node, v3))`` by unfolding the recursion.

    Under the ``mirrored`` gluing a right step takes ``(v3, v1)`` as its base
    so the new rhombus lies outside its parent.  The v2 and v3 labels are the
    same either way; only the base corners of right children swap.
    """
    node = validate_node_path(node)
    if gluing not in _ARC_BASE:
        raise ValueError(f"unknown gluing {gluing!r}")
    table = _ARC_BASE[gluing]
    v = ("0", "01", "010", "0101")
    for t in node[1:]:
        lo, hi = table[t]
        v2 = v[Corner.V3] + "1" if t == "2" else v[hi] + "0"
        v = (v[lo], v[hi], v2, v2 + "1")
    return v


def pi(node, corner, gluing: str = "folded") -> str:
    return corners(validate_node_path(node), gluing)[Corner(corner)]


_B = {"0": "0", "1": "10", "2": "11"}


def pi_closed_form(node, corner) -> str:
    """Direct translation of a node path into its v2 or v3 label."""
    node = validate_node_path(node)
    corner = Corner(corner)
    if corner not in (Corner.V2, Corner.V3):
        raise ValueError("closed form only covers v2 and v3")
    label = "0" + "".join(_B[t] for t in node)
    return label + "1" if corner is Corner.V3 else label


def is_cover_edge(a, b, gluing: str = "folded") -> bool:
    """Adjacency in the covered graph: some rhombus has ``(a, b)`` as an edge.

    Under the ``mirrored`` gluing this is exactly :func:`is_tstar_edge`.  Under
    the ``folded`` gluing the two agree until a path takes a right step; the
    rhombus glued there folds back over its parent, and its ``(v1, v3)`` side
    joins labels that the prefix rule does not connect.
    """
    a = validate_vertex_label(a)
    b = validate_vertex_label(b)
    if len(a) > len(b):
        a, b = b, a
    if len(a) == len(b):
        return False
    if b in ROOT_EDGE:
        return (a, b) == ROOT_EDGE
    node, corner = host_node_of(b)
    v0, v1, v2, _ = corners(node, gluing)
    return a in ((v0, v1) if corner is Corner.V2 else (v1, v2))


# -- QR encoding ------------------------------------------------------------

@dataclass(frozen=True)
class QrCode:
    """Forward-step counts and turn directions of a node path.

    ``q`` always carries the trailing count, so ``len(q) == m + 1``; ``q[i-1]``
    is the 1-indexed ``q_i`` and ``rho[i-1]`` is ``rho_i``.
    """

    q: tuple[int, ...]
    rho: tuple[int, ...]

    def __post_init__(self):
        q, rho = tuple(int(v) for v in self.q), tuple(int(v) for v in self.rho)
        if len(q) == len(rho):
            q = q + (0,)
        if len(q) != len(rho) + 1:
            raise ValueError(f"q has {len(q)} entries for {len(rho)} turns")
        if any(v < 0 for v in q) or any(v not in (0, 1) for v in rho):
            raise ValueError("q must be naturals and rho bits")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "rho", rho)

    @property
    def m(self) -> int:
        return len(self.rho)

    def abridged(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        q = self.q[:-1] if self.q[-1] == 0 else self.q
        return q, self.rho

    @property
    def is_proper(self) -> bool:
        if self.q[-1] != 0 or self.m == 0:
            return False
        return self.m == 1 or self.q[self.m - 1] > 0

    def prefix(self, i: int) -> "QrCode":
        """Node after the first ``i`` turns, with no trailing forward steps."""
        return QrCode(self.q[:i] + (0,), self.rho[:i])

    def __str__(self):
        q, rho = self.abridged()
        return f"({','.join(map(str, q))}),({','.join(map(str, rho))})"


@lru_cache(maxsize=1 << 16)
def qr_encode(node) -> QrCode:
    node = validate_node_path(node)
    q, rho = [0], []
    for t in node[1:]:
        if t == "1":
            q[-1] += 1
        else:
            rho.append(1 if t == "2" else 0)
            q.append(0)
    return QrCode(tuple(q), tuple(rho))


def qr_decode(code: QrCode) -> str:
    if not isinstance(code, QrCode):
        code = QrCode(*code)
    parts = [ROOT]
    for q, r in zip(code.q, code.rho):
        parts.append("1" * q + ("2" if r else "0"))
    parts.append("1" * code.q[-1])
    return "".join(parts)


# -- vertices back to nodes -------------------------------------------------

def host_node_of(label) -> tuple[str, Corner]:
    """The unique node in which ``label`` is the v2 or v3 corner."""
    label = validate_vertex_label(label)
    if label in ROOT_EDGE:
        raise RootEdgeVertex(f"{label!r} lies on the root edge")
    tail, trits, i = label[1:], [], 0
    while i < len(tail):
        if tail[i] == "0":
            trits.append("0")
            i += 1
        elif i + 1 == len(tail):
            return "".join(trits), Corner.V3
        else:
            trits.append("1" if tail[i + 1] == "0" else "2")
            i += 2
    return "".join(trits), Corner.V2


def proper_node_of(label) -> str:
    label = validate_vertex_label(label)
    if label == "0":
        return "10"
    if label == "01":
        return "12"
    node, corner = host_node_of(label)
    return node + ("10" if corner is Corner.V2 else "12")


# -- rhombus types ----------------------------------------------------------

def type_of_code(code: QrCode, convention: str = "figure") -> TypeIndex:
    """Type of the node encoded by ``code``; trailing forward steps are ignored."""
    m = code.m
    if m == 0:
        return ROOT_TYPE
    q, rho = code.q, code.rho
    if convention == "figure":
        s = sum(1 for i in range(m) if q[i] + rho[i] > 0)
    elif convention == "literal":
        # summand 1{q_{i-1} + rho_i > 0} with q_0 = 0
        s = sum(1 for i in range(m) if (q[i - 1] if i else 0) + rho[i] > 0)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return TypeIndex(q[m - 1] % 2, rho[m - 1] % 2, s % 3)


def type_of(node, convention: str = "figure") -> TypeIndex:
    return type_of_code(qr_encode(node), convention)


def prefix_types(code: QrCode, convention: str = "figure") -> list[TypeIndex]:
    """Types of ``N_0, ..., N_{m-1}``, the nodes reached after each turn prefix."""
    return [type_of_code(code.prefix(i), convention) for i in range(code.m)]


# -- bounded enumeration ----------------------------------------------------

def iter_nodes(depth: int) -> Iterator[str]:
    """All node paths of length ``1..depth`` in breadth-first order."""
    for n in range(1, depth + 1):
        for rest in itertools.product("012", repeat=n - 1):
            yield ROOT + "".join(rest)


def iter_labels(max_len: int) -> Iterator[str]:
    """All T* vertex labels of length at most ``max_len``."""
    if max_len >= 1:
        yield "0"
    if max_len >= 2:
        yield "01"
    for n in range(3, max_len + 1):
        for rest in itertools.product("01", repeat=n - 3):
            yield "010" + "".join(rest)


class TruncEdge(NamedTuple):
    """A T* edge with the rhombus role it plays.

    For a diagonal, ``u`` is the v1 corner and ``w`` the v2 corner.
    """

    u: str
    w: str
    role: Role
    node: str


@dataclass(frozen=True)
class Truncation:
    depth: int
    gluing: str
    nodes: tuple[str, ...]
    vertices: tuple[str, ...]
    edges: tuple[TruncEdge, ...]


@lru_cache(maxsize=8)
def truncation(depth: int, gluing: str = "folded") -> Truncation:
    """The graph covered by the rhombi of path length <= depth."""
    nodes = tuple(iter_nodes(depth))
    vertices = list(ROOT_EDGE) if depth >= 0 else []
    edges = [TruncEdge("01", "0", Role.SIDE, ROOT)]
    for node in nodes:
        v0, v1, v2, v3 = corners(node, gluing)
        vertices += [v2, v3]
        edges += [
            TruncEdge(v2, v0, Role.SIDE, node),
            TruncEdge(v1, v2, Role.DIAGONAL, node),
            TruncEdge(v3, v2, Role.SIDE, node),
            TruncEdge(v3, v1, Role.SIDE, node),
        ]
    return Truncation(depth, gluing, nodes, tuple(vertices), tuple(edges))
