"""Exact sampling of weighted Aztec diamond matchings by generalized domino shuffling.

Weights are first pushed down from order ``n`` to order 1 by urban renewal on
every cell.  A cell with edge weights (SW, SE, NW, NE) = (p, q, s, r) has
``delta = p r + q s``; the order ``m - 1`` cell sitting on the even face
shared by four order-``m`` cells takes, in each direction, the weight of the
order-``m`` cell lying in that direction divided by that cell's ``delta``.

A sample is then grown from the empty order-0 diamond.  Lifting a matching
of order ``m - 1`` to order ``m`` inspects, for every order-``m`` cell, which
of the four edges facing into it are occupied:

* two occupied (an opposite pair): the cell is emptied,
* one occupied in direction D: the cell receives its edge in direction -D,
* none occupied: the cell receives {SW, NE} with probability ``p r / delta``
  and {SE, NW} otherwise.

Each sample ``i`` of a batch draws from its own Philox stream keyed by
``(seed, i)``; the uniforms are consumed in a fixed (level, cell) order so a
sample does not depend on how the batch is scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .lattice import NE, NW, SE, SW, AztecGraph, Matching, heights_from_occupancy


class WeightUnderflowError(FloatingPointError):
    pass


@dataclass(frozen=True, eq=False)
class WeightTables:
    """Urban-renewal weights for every order from ``n`` down to 1.

    ``levels[m - 1]`` has shape ``(4, m, m)``; ``log_scale[m - 1]`` is the log of
    the global factor each level was divided by (a gauge that keeps entries
    near 1 and does not change the measure).
    """

    levels: tuple
    log_scale: np.ndarray
    log_delta_sum: np.ndarray

    @property
    def order(self) -> int:
        return len(self.levels)

    def creation_probability(self, m: int) -> np.ndarray:
        W = self.levels[m - 1]
        horiz = W[SW] * W[NE]
        return horiz / (horiz + W[SE] * W[NW])

    def log_partition_function(self) -> float:
        """log Z of the original weights, recovered from the renewal factors."""
        n = self.order
        total = 0.0
        for m in range(n, 0, -1):
            # Z_m(original) = scale^{m(m+1)} Z_m(normalised), Z_m = prod(delta) Z_{m-1}
            total += m * (m + 1) * self.log_scale[m - 1] + self.log_delta_sum[m - 1]
        return float(total)


def precompute_weight_tables(graph_or_weights, normalise: bool = True) -> WeightTables:
    """Urban-renewal tables for a graph (or a raw ``(4, n, n)`` weight array)."""
    if isinstance(graph_or_weights, AztecGraph):
        W = graph_or_weights.cell_weights()
    else:
        W = np.array(graph_or_weights, dtype=float)
    n = W.shape[-1]
    levels = [None] * n
    log_scale = np.zeros(n)
    log_delta_sum = np.zeros(n)
    for m in range(n, 0, -1):
        if normalise:
            s = float(np.exp(np.mean(np.log(W))))
            W = W / s
            log_scale[m - 1] = math.log(s)
        W.setflags(write=False)
        levels[m - 1] = W
        delta = W[SW] * W[NE] + W[SE] * W[NW]
        if not np.all(delta > 0) or not np.all(np.isfinite(delta)):
            raise WeightUnderflowError(f"urban renewal denominator vanished at order {m}")
        log_delta_sum[m - 1] = float(np.sum(np.log(delta)))
        if m == 1:
            break
        nxt = np.empty((4, m - 1, m - 1))
        nxt[SW] = W[SW, :-1, :-1] / delta[:-1, :-1]
        nxt[SE] = W[SE, 1:, :-1] / delta[1:, :-1]
        nxt[NW] = W[NW, :-1, 1:] / delta[:-1, 1:]
        nxt[NE] = W[NE, 1:, 1:] / delta[1:, 1:]
        W = nxt
    return WeightTables(tuple(levels), log_scale, log_delta_sum)


@numba.njit(cache=True)
def _grow(probs, offsets, n, uniforms):
    prev = np.zeros((4, 0, 0), dtype=np.uint8)
    for m in range(1, n + 1):
        cur = np.zeros((4, m, m), dtype=np.uint8)
        base = offsets[m - 1]
        for a in range(m):
            for c in range(m):
                # edges of the order-(m-1) diamond that face into this cell
                in_ne = prev[0, a, c] if (a < m - 1 and c < m - 1) else 0
                in_nw = prev[1, a - 1, c] if (a >= 1 and c < m - 1) else 0
                in_se = prev[2, a, c - 1] if (a < m - 1 and c >= 1) else 0
                in_sw = prev[3, a - 1, c - 1] if (a >= 1 and c >= 1) else 0
                count = in_ne + in_nw + in_se + in_sw
                if count == 0:
                    idx = base + a * m + c
                    if uniforms[idx] < probs[idx]:
                        cur[0, a, c] = 1
                        cur[3, a, c] = 1
                    else:
                        cur[1, a, c] = 1
                        cur[2, a, c] = 1
                elif count == 1:
                    if in_ne:
                        cur[0, a, c] = 1
                    elif in_nw:
                        cur[1, a, c] = 1
                    elif in_se:
                        cur[2, a, c] = 1
                    else:
                        cur[3, a, c] = 1
        prev = cur
    return prev


class ShuffleSampler:
    """Reusable sampler: tables are computed once per graph."""

    def __init__(self, graph: AztecGraph, tables: WeightTables | None = None):
        self.graph = graph
        self.tables = tables if tables is not None else precompute_weight_tables(graph)
        n = self.tables.order
        sizes = np.array([m * m for m in range(1, n + 1)], dtype=np.int64)
        self._offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self._probs = np.concatenate(
            [self.tables.creation_probability(m).ravel() for m in range(1, n + 1)]
        )
        self._total = int(sizes.sum())

    def occupancy(self, rng) -> np.ndarray:
        """One sample as a (4, n, n) uint8 edge-occupancy array."""
        uniforms = rng.random(self._total)
        return _grow(self._probs, self._offsets, self.tables.order, uniforms)

    def sample(self, rng) -> Matching:
        return Matching.from_occupancy(self.graph, self.occupancy(rng))


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """The independent random stream used for sample ``index`` of a batch."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def sample(graph: AztecGraph, seed) -> Matching:
    """A single exact sample; ``seed`` is an int or a numpy Generator."""
    rng = seed if isinstance(seed, np.random.Generator) else sample_stream(seed, 0)
    return ShuffleSampler(graph).sample(rng)


# batches -------------------------------------------------------------------

class FaceHeights:
    """Reducer: heights at chosen even faces (X, Y) = (2a, 2c), base face (0, 0)."""

    def __init__(self, faces):
        faces = np.asarray(faces, dtype=np.int64).reshape(-1, 2)
        if np.any(faces % 2):
            raise ValueError("FaceHeights works on even faces (2a, 2c)")
        self.faces = faces

    def __call__(self, occ: np.ndarray) -> np.ndarray:
        h = heights_from_occupancy(occ)
        return h[self.faces[:, 0] // 2, self.faces[:, 1] // 2]


def _occupancy_to_matching(graph):
    def reduce(occ):
        return Matching.from_occupancy(graph, occ)
    return reduce


@dataclass
class SampleBatch:
    seed: int
    count: int
    order: int
    results: list = field(repr=False)

    def stacked(self) -> np.ndarray:
        return np.stack([np.asarray(r) for r in self.results])


def _run_chunk(graph, tables, seed, indices, reducer):
    sampler = ShuffleSampler(graph, tables)
    return [reducer(sampler.occupancy(sample_stream(seed, i))) for i in indices]


def sample_batch(graph: AztecGraph, seed: int, count: int, reducer=None, workers: int = 1,
                 tables: WeightTables | None = None) -> SampleBatch:
    """``count`` independent samples; sample ``i`` uses ``sample_stream(seed, i)``.

    ``reducer`` maps the (4, n, n) occupancy of each sample to whatever should
    be kept (default: the :class:`Matching`).  With ``workers > 1`` chunks run
    in separate processes (the reducer must then be picklable); results are
    always returned in sample-index order.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if reducer is None:
        reducer = _occupancy_to_matching(graph)
    if tables is None:
        tables = precompute_weight_tables(graph)
    indices = list(range(count))
    if workers <= 1 or count == 1:
        results = _run_chunk(graph, tables, seed, indices, reducer)
    else:
        chunks = [indices[i::workers] for i in range(workers)]
        results = [None] * count
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, graph, tables, seed, ch, reducer) for ch in chunks]
            for ch, fut in zip(chunks, futures):
                for i, r in zip(ch, fut.result()):
                    results[i] = r
    return SampleBatch(int(seed), count, graph.order, results)
