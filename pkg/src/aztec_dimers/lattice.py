"""Aztec diamond geometry, periodic edge weights, matchings and height functions.

Coordinates follow a 45-degree rotated embedding of the square lattice:

* black vertex ``b[A, C]`` sits at ``(2A, 2C + 1)``,
* white vertex ``w[A, C]`` sits at ``(2A + 1, 2C + 2)``,
* faces are the integer points ``(X, Y)`` with ``X + Y`` even.

For a diamond of order ``n`` the black vertices have ``0 <= A <= n``,
``0 <= C < n`` and the white vertices ``0 <= A < n``, ``-1 <= C < n``; the
whole picture lives in the square ``[0, 2n]^2``.

The ``n * n`` faces with odd coordinates are called *cells*.  Every edge of the
diamond borders exactly one cell, so a matching is equivalently an array of
shape ``(4, n, n)`` of edge indicators indexed by ``(direction, a, c)`` where
cell ``(a, c)`` is centred at ``(2a + 1, 2c + 1)``.  The four directions are
SW, SE, NW, NE; the NE edges are exactly the reference (``-1``) edges.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

SW, SE, NW, NE = 0, 1, 2, 3
DIRECTIONS = ("SW", "SE", "NW", "NE")
EDGE_KINDS = ("alpha", "beta", "gamma", "ref")  # kind of the SW, SE, NW, NE edge

# Kasteleyn sign of each edge kind.
KASTELEYN_SIGN = np.array([1.0, 1.0, 1.0, -1.0])


class HeightInconsistencyError(RuntimeError):
    """Height increments around a closed dual loop do not cancel."""


@dataclass(frozen=True, eq=False)
class WeightScheme:
    """k x l periodic edge weights; ``alpha[j - 1, i - 1]`` is alpha_{j,i}."""

    k: int
    l: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        if int(self.k) < 1 or int(self.l) < 1:
            raise ValueError("periods k and l must be positive integers")
        for name in ("alpha", "beta", "gamma"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.k, self.l):
                raise ValueError(f"{name} must have shape ({self.k}, {self.l}), got {arr.shape}")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ValueError(f"{name} weights must be finite and strictly positive")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "l", int(self.l))

    @property
    def beta_v(self) -> np.ndarray:
        """Column products prod_j beta_{j,i}, one per horizontal index i."""
        return np.prod(self.beta, axis=0)

    def __eq__(self, other):
        if not isinstance(other, WeightScheme):
            return NotImplemented
        return (self.k, self.l) == (other.k, other.l) and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in ("alpha", "beta", "gamma")
        )

    def __hash__(self):
        return hash((self.k, self.l, self.alpha.tobytes(), self.beta.tobytes(), self.gamma.tobytes()))

    @classmethod
    def uniform(cls, k: int = 1, l: int = 1) -> "WeightScheme":
        ones = np.ones((k, l))
        return cls(k, l, ones, ones, ones)

    @classmethod
    def two_periodic(cls, a: float) -> "WeightScheme":
        """The one-parameter symmetric 2 x 2 family (gamma = 1, alpha/beta in {a, 1/a})."""
        if a <= 0:
            raise ValueError("a must be positive")
        ab = np.array([[1.0 / a, a], [a, 1.0 / a]])
        return cls(2, 2, ab, ab.copy(), np.ones((2, 2)))

    @classmethod
    def random(cls, k: int, l: int, rng=None, low: float = 0.5, high: float = 2.0) -> "WeightScheme":
        rng = np.random.default_rng(rng)
        return cls(k, l, *(rng.uniform(low, high, size=(k, l)) for _ in range(3)))

    def two_periodic_parameter(self, rtol: float = 1e-12) -> float | None:
        """Return ``a`` if these weights are the symmetric 2 x 2 family, else None."""
        if (self.k, self.l) != (2, 2):
            return None
        a = self.alpha[1, 0]
        candidate = WeightScheme.two_periodic(a)
        for name in ("alpha", "beta", "gamma"):
            if not np.allclose(getattr(self, name), getattr(candidate, name), rtol=rtol, atol=0):
                return None
        return float(a)

    # serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "gamma": self.gamma.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "WeightScheme":
        try:
            return cls(int(data["k"]), int(data["l"]), data["alpha"], data["beta"], data["gamma"])
        except KeyError as exc:
            raise ValueError(f"weight scheme is missing field {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "WeightScheme":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, source: str | Path) -> "WeightScheme":
        """Read a scheme from a JSON file path or an inline JSON string."""
        text = str(source).strip()
        if text.startswith("{"):
            return cls.from_json(text)
        return cls.from_json(Path(source).read_text())


# Coordinate codec ---------------------------------------------------------
# Everything that converts between lattice labels, planar positions and dense
# integer ids lives here.

def black_position(A, C):
    return 2 * np.asarray(A), 2 * np.asarray(C) + 1


def white_position(A, C):
    return 2 * np.asarray(A) + 1, 2 * np.asarray(C) + 2


def position_to_black(X, Y):
    return np.asarray(X) // 2, (np.asarray(Y) - 1) // 2


def position_to_white(X, Y):
    return (np.asarray(X) - 1) // 2, (np.asarray(Y) - 2) // 2


def cell_vertices(a, c):
    """Lattice labels (S, E, N, W) of the cell centred at (2a+1, 2c+1).

    S and N are white, W and E are black.
    """
    return (a, c - 1), (a + 1, c), (a, c), (a, c)


@dataclass(frozen=True, eq=False)
class AztecGraph:
    """The order ``kℓN`` Aztec diamond carrying periodic weights."""

    N: int
    weights: WeightScheme

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def of_order(cls, order: int, weights: WeightScheme) -> "AztecGraph":
        if order % (weights.k * weights.l):
            raise ValueError("order must be a multiple of k*l")
        return cls(order // (weights.k * weights.l), weights)

    @property
    def order(self) -> int:
        return self.weights.k * self.weights.l * self.N

    @property
    def num_white(self) -> int:
        return self.order * (self.order + 1)

    num_black = num_white

    # dense ids ------------------------------------------------------------
    def white_id(self, A, C):
        n = self.order
        return (np.asarray(C) + 1) * n + np.asarray(A)

    def black_id(self, A, C):
        return np.asarray(C) * (self.order + 1) + np.asarray(A)

    def white_label(self, wid):
        n = self.order
        wid = np.asarray(wid)
        return wid % n, wid // n - 1

    def black_label(self, bid):
        bid = np.asarray(bid)
        return bid % (self.order + 1), bid // (self.order + 1)

    def has_white(self, A, C) -> bool:
        return 0 <= A < self.order and -1 <= C < self.order

    def has_black(self, A, C) -> bool:
        return 0 <= A <= self.order and 0 <= C < self.order

    # edges ----------------------------------------------------------------
    @cached_property
    def _edges(self):
        n, w = self.order, self.weights
        a, c = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        a, c = a.T.ravel(), c.T.ravel()  # cell index = c * n + a
        white = np.empty((n * n, 4), dtype=np.int64)
        black = np.empty((n * n, 4), dtype=np.int64)
        weight = np.empty((n * n, 4))
        white[:, SW] = self.white_id(a, c - 1)
        black[:, SW] = self.black_id(a, c)
        weight[:, SW] = w.alpha[(c - 1) % w.k, a % w.l]
        white[:, SE] = self.white_id(a, c - 1)
        black[:, SE] = self.black_id(a + 1, c)
        weight[:, SE] = w.beta[(c - 1) % w.k, a % w.l]
        white[:, NW] = self.white_id(a, c)
        black[:, NW] = self.black_id(a, c)
        weight[:, NW] = w.gamma[c % w.k, a % w.l]
        white[:, NE] = self.white_id(a, c)
        black[:, NE] = self.black_id(a + 1, c)
        weight[:, NE] = 1.0
        for arr in (white, black, weight):
            arr.setflags(write=False)
        return white.ravel(), black.ravel(), weight.ravel()

    @property
    def num_edges(self) -> int:
        return 4 * self.order**2

    @property
    def edge_white(self) -> np.ndarray:
        return self._edges[0]

    @property
    def edge_black(self) -> np.ndarray:
        return self._edges[1]

    @property
    def edge_weight(self) -> np.ndarray:
        return self._edges[2]

    @property
    def edge_direction(self) -> np.ndarray:
        return np.tile(np.arange(4), self.order**2)

    @property
    def edge_sign(self) -> np.ndarray:
        return KASTELEYN_SIGN[self.edge_direction]

    def edge_index(self, direction: int, a, c):
        """Index of the edge of cell (a, c) in the given direction."""
        return 4 * (np.asarray(c) * self.order + np.asarray(a)) + direction

    @cached_property
    def edge_lookup(self) -> dict:
        return {(int(w), int(b)): i for i, (w, b) in enumerate(zip(self.edge_white, self.edge_black))}

    def cell_weights(self) -> np.ndarray:
        """Edge weights as an array of shape (4, n, n) indexed (direction, a, c)."""
        n = self.order
        return self.edge_weight.reshape(n, n, 4).transpose(2, 1, 0).copy()

    def with_weights(self, edge_weight) -> "ReweightedGraph":
        return ReweightedGraph(self.N, self.weights, np.asarray(edge_weight, dtype=float))

    def with_vertex_gauge(self, white_id: int, factor: float) -> "ReweightedGraph":
        """Multiply every edge weight at one white vertex by ``factor``."""
        weight = self.edge_weight.copy()
        weight[self.edge_white == white_id] *= factor
        return self.with_weights(weight)

    # faces ----------------------------------------------------------------
    @cached_property
    def faces(self) -> np.ndarray:
        """All faces (X, Y) in [0, 2n]^2 with X + Y even, shape (F, 2)."""
        n = self.order
        X, Y = np.meshgrid(np.arange(2 * n + 1), np.arange(2 * n + 1), indexing="ij")
        keep = (X + Y) % 2 == 0
        out = np.stack([X[keep], Y[keep]], axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def _face_index(self) -> dict:
        return {(int(x), int(y)): i for i, (x, y) in enumerate(self.faces)}

    def face_id(self, X, Y) -> int:
        try:
            return self._face_index[(int(X), int(Y))]
        except KeyError:
            raise ValueError(f"({X}, {Y}) is not a face of the order-{self.order} diamond") from None

    @property
    def default_base_face(self) -> int:
        return self.face_id(0, 0)

    def rescaled(self, X, Y):
        """Macroscopic coordinates of a face; the diamond maps onto [-1, 1]^2."""
        n = self.order
        return np.asarray(X) / n - 1.0, np.asarray(Y) / n - 1.0

    def _vertex_at(self, X, Y):
        """('w'|'b', dense id) of the vertex at a planar position, or None."""
        if (X + Y) % 2 == 0:
            return None
        if X % 2 == 0:
            A, C = X // 2, (Y - 1) // 2
            return ("b", int(self.black_id(A, C))) if self.has_black(A, C) else None
        A, C = (X - 1) // 2, (Y - 2) // 2
        return ("w", int(self.white_id(A, C))) if self.has_white(A, C) else None

    @cached_property
    def dual_steps(self):
        """Dual edges as arrays (face, face', edge index, sign).

        Stepping from ``face`` to ``face'`` crosses ``edge``; ``sign`` is +1 when
        the white endpoint is on the right of the step, so the height changes by
        ``sign * (1[edge in M] - 1[edge in M0])``.
        """
        src, dst, edge, sign = [], [], [], []
        lookup = self.edge_lookup
        for fid, (X, Y) in enumerate(self.faces):
            X, Y = int(X), int(Y)
            for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                key = (X + dx, Y + dy)
                if key not in self._face_index:
                    continue
                v1 = self._vertex_at(X + dx, Y)
                v2 = self._vertex_at(X, Y + dy)
                if v1 is None or v2 is None:
                    continue
                right = v1 if dx * dy > 0 else v2
                wid, bid = (v1[1], v2[1]) if v1[0] == "w" else (v2[1], v1[1])
                src.append(fid)
                dst.append(self._face_index[key])
                edge.append(lookup[(wid, bid)])
                sign.append(1 if right[0] == "w" else -1)
        return tuple(np.array(x, dtype=np.int64) for x in (src, dst, edge, sign))

    @property
    def reference_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edge_direction == NE)


@dataclass(frozen=True, eq=False)
class ReweightedGraph(AztecGraph):
    """An Aztec graph whose edge weights were overridden edge by edge (used for gauge checks)."""

    override: np.ndarray = field(default=None)

    @cached_property
    def _edges(self):
        white, black, _ = AztecGraph._edges.func(self)
        weight = np.array(self.override, dtype=float)
        if weight.shape != white.shape or np.any(weight <= 0):
            raise ValueError("override weights must be positive, one per edge")
        weight.setflags(write=False)
        return white, black, weight


def build_graph(N: int, weights: WeightScheme) -> AztecGraph:
    return AztecGraph(N, weights)


def periodic_graph(order: int, weights: WeightScheme) -> AztecGraph:
    """Diamond of any order carrying the periodic pattern of ``weights``.

    Orders that are not multiples of ``k * l`` get the pattern restricted to
    the smaller diamond, stored as explicit per-edge weights.
    """
    if order % (weights.k * weights.l) == 0:
        return AztecGraph.of_order(order, weights)
    m = weights.k * weights.l
    big = AztecGraph.of_order(m * (order // m + 1), weights)
    W = big.cell_weights()[:, :order, :order]
    return ReweightedGraph(order, WeightScheme.uniform(), W.transpose(2, 1, 0).reshape(-1).copy())


def reference_matching(graph: AztecGraph) -> np.ndarray:
    """Edge indices of the reference edges (the ``-1`` entries of K) inside the diamond."""
    return graph.reference_edges


@dataclass(frozen=True, eq=False)
class Matching:
    """A perfect matching stored as ``assignment[white_id] = black_id``."""

    assignment: np.ndarray

    def __post_init__(self):
        arr = np.array(self.assignment, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "assignment", arr)

    def __eq__(self, other):
        return isinstance(other, Matching) and np.array_equal(self.assignment, other.assignment)

    def __hash__(self):
        return hash(self.assignment.tobytes())

    def is_perfect(self, graph: AztecGraph) -> bool:
        a = self.assignment
        if a.shape != (graph.num_white,) or len(np.unique(a)) != graph.num_black:
            return False
        lookup = graph.edge_lookup
        return all((w, int(b)) in lookup for w, b in enumerate(a))

    def edge_indices(self, graph: AztecGraph) -> np.ndarray:
        lookup = graph.edge_lookup
        return np.array([lookup[(w, int(b))] for w, b in enumerate(self.assignment)], dtype=np.int64)

    def indicator(self, graph: AztecGraph) -> np.ndarray:
        out = np.zeros(graph.num_edges, dtype=bool)
        out[self.edge_indices(graph)] = True
        return out

    def occupancy(self, graph: AztecGraph) -> np.ndarray:
        """Edge indicators of shape (4, n, n) indexed (direction, a, c)."""
        n = graph.order
        return self.indicator(graph).reshape(n, n, 4).transpose(2, 1, 0).copy()

    def weight(self, graph: AztecGraph) -> float:
        return float(np.prod(graph.edge_weight[self.edge_indices(graph)]))

    @classmethod
    def from_occupancy(cls, graph: AztecGraph, occ: np.ndarray) -> "Matching":
        n = graph.order
        occ = np.asarray(occ, dtype=bool)
        if occ.shape != (4, n, n):
            raise ValueError(f"occupancy must have shape (4, {n}, {n})")
        chosen = np.flatnonzero(occ.transpose(2, 1, 0).ravel())
        if len(chosen) != graph.num_white:
            raise ValueError("occupancy does not describe a perfect matching")
        assignment = np.full(graph.num_white, -1, dtype=np.int64)
        assignment[graph.edge_white[chosen]] = graph.edge_black[chosen]
        if np.any(assignment < 0) or len(np.unique(assignment)) != graph.num_black:
            raise ValueError("occupancy does not describe a perfect matching")
        return cls(assignment)


@dataclass(frozen=True, eq=False)
class HeightField:
    heights: np.ndarray
    base_face: int

    def at(self, graph: AztecGraph, X, Y) -> int:
        return int(self.heights[graph.face_id(X, Y)])


def height_function(graph: AztecGraph, m: Matching, base_face: int | None = None,
                    check: bool = True) -> HeightField:
    """Height of every face, propagated along a breadth-first spanning tree of the dual.

    With ``check`` every dual edge is re-examined afterwards and a
    :class:`HeightInconsistencyError` is raised if any loop fails to close.
    """
    if base_face is None:
        base_face = graph.default_base_face
    in_m = m.indicator(graph)
    in_m0 = np.zeros(graph.num_edges, dtype=bool)
    in_m0[graph.reference_edges] = True
    src, dst, edge, sign = graph.dual_steps
    incr = sign * (in_m[edge].astype(np.int64) - in_m0[edge])

    nfaces = len(graph.faces)
    adjacency = [[] for _ in range(nfaces)]
    for s, d, inc in zip(src, dst, incr):
        adjacency[s].append((d, inc))
    heights = np.full(nfaces, np.iinfo(np.int64).min, dtype=np.int64)
    heights[base_face] = 0
    queue = deque([base_face])
    while queue:
        f = queue.popleft()
        for g, inc in adjacency[f]:
            if heights[g] == np.iinfo(np.int64).min:
                heights[g] = heights[f] + inc
                queue.append(g)
    if np.any(heights == np.iinfo(np.int64).min):
        raise HeightInconsistencyError("dual graph is not connected")
    if check and np.any(heights[dst] - heights[src] != incr):
        raise HeightInconsistencyError("height increments do not close around a dual cycle")
    heights.setflags(write=False)
    return HeightField(heights, int(base_face))


def heights_from_occupancy(occ: np.ndarray) -> np.ndarray:
    """Heights at the even faces (2a, 2c), 0 <= a, c <= n, from a (4, n, n) occupancy.

    Pinned to 0 at face (0, 0).  Vectorised counterpart of :func:`height_function`
    for use inside sampling loops; the returned array is indexed ``[a, c]``.
    Also accepts a leading batch axis, ``(S, 4, n, n) -> (S, n + 1, n + 1)``.
    """
    occ = np.asarray(occ, dtype=np.int64)
    sw, se, nw, ne = (occ[..., d, :, :] for d in range(4))
    # height at each cell centre, relative to the centre of cell (0, 0)
    step_a = se[..., :-1, :] + sw[..., 1:, :]
    step_c = nw[..., :, :-1] + sw[..., :, 1:]
    centre = np.zeros(sw.shape, dtype=np.int64)
    centre[..., 1:, 0] = np.cumsum(step_a[..., :, 0], axis=-1)
    centre[..., :, 1:] = centre[..., :, :1] + np.cumsum(step_c, axis=-1)
    centre += sw[..., :1, :1]  # h(0, 0) = h(centre of cell 0,0) - 1[SW]
    shape = sw.shape[:-2] + (sw.shape[-2] + 1, sw.shape[-1] + 1)
    h = np.empty(shape, dtype=np.int64)
    h[..., :-1, :-1] = centre - sw
    h[..., -1, :-1] = centre[..., -1, :] + se[..., -1, :]
    h[..., :-1, -1] = centre[..., :, -1] + nw[..., :, -1]
    h[..., -1, -1] = centre[..., -1, -1] + 1 - ne[..., -1, -1]
    return h
