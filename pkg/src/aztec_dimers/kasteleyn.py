"""Exact finite-size linear algebra for the Aztec diamond dimer model.

The Kasteleyn matrix is indexed ``K[white_id, black_id]``; its inverse is
indexed ``Kinv[black_id, white_id]``.  With the sign table used here every
single-edge probability is ``K[w, b] * Kinv[b, w]`` with no extra sign; this is
checked against brute-force enumeration in the test-suite.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .lattice import KASTELEYN_SIGN, AztecGraph, Matching

DEFAULT_ENUMERATION_CAP = 6


class SingularKasteleynError(ArithmeticError):
    pass


class EnumerationTooLarge(ValueError):
    pass


def kasteleyn_matrix(graph: AztecGraph, signs=KASTELEYN_SIGN, sparse_format: bool = False):
    """Signed weighted adjacency matrix, rows white, columns black.

    ``signs`` gives the sign of the SW, SE, NW, NE edge of each cell; the
    default is the alpha, beta, gamma, -1 table.
    """
    values = graph.edge_weight * np.asarray(signs, dtype=float)[graph.edge_direction]
    K = sparse.csr_matrix(
        (values, (graph.edge_white, graph.edge_black)), shape=(graph.num_white, graph.num_black)
    )
    return K if sparse_format else K.toarray()


build_kasteleyn = kasteleyn_matrix


def log_partition_function(K) -> float:
    K = K.toarray() if sparse.issparse(K) else np.asarray(K)
    sign, logdet = np.linalg.slogdet(K)
    if sign == 0:
        raise SingularKasteleynError("Kasteleyn matrix is singular")
    return float(logdet)


def partition_function(K) -> float:
    """|det K|, the weighted number of perfect matchings."""
    return float(np.exp(log_partition_function(K)))


def inverse_kasteleyn(K, check: bool = True) -> np.ndarray:
    K = K.toarray() if sparse.issparse(K) else np.asarray(K)
    try:
        Kinv = np.linalg.inv(K)
    except np.linalg.LinAlgError as exc:
        raise SingularKasteleynError(str(exc)) from None
    if check:
        resid = np.abs(K @ Kinv - np.eye(K.shape[0])).max()
        if not np.isfinite(resid) or resid > 1e-8:
            raise SingularKasteleynError(f"inverse residual {resid:.2e} too large")
    return Kinv


def inverse_columns(K, whites) -> np.ndarray:
    """Columns ``Kinv[:, w]`` for the listed white ids via one sparse LU."""
    lu = splu(sparse.csc_matrix(K))
    rhs = np.zeros((K.shape[0], len(whites)))
    rhs[np.asarray(whites), np.arange(len(whites))] = 1.0
    return lu.solve(rhs)


def edge_probability(K, Kinv, edge) -> float:
    w, b = edge
    return float(K[w, b] * Kinv[b, w])


def edge_probabilities(graph: AztecGraph, K, Kinv) -> np.ndarray:
    """Probability of every edge of ``graph``, in graph edge order."""
    w, b = graph.edge_white, graph.edge_black
    Kd = K.toarray() if sparse.issparse(K) else np.asarray(K)
    return Kd[w, b] * Kinv[b, w]


def _local_matrix(K, Kinv, edges):
    whites = [int(w) for w, _ in edges]
    blacks = [int(b) for _, b in edges]
    if len(set(whites)) != len(whites) or len(set(blacks)) != len(blacks):
        raise ValueError("correlation edges must be pairwise vertex-disjoint")
    kvals = np.array([K[w, b] for w, b in zip(whites, blacks)])
    if np.any(kvals == 0):
        raise ValueError("every queried pair must be an edge of the graph")
    # M[i, j] = K(w_i, b_i) Kinv(b_i, w_j)
    return kvals[:, None] * Kinv[np.ix_(blacks, whites)]


def joint_probability(K, Kinv, edges) -> float:
    """P(all listed edges are in the matching) = det[K(w_i,b_i) Kinv(b_i,w_j)]."""
    return float(np.linalg.det(_local_matrix(K, Kinv, edges)))


def _derangements(r):
    for perm in itertools.permutations(range(r)):
        if all(perm[i] != i for i in range(r)):
            yield perm


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def joint_centered_correlation(K, Kinv, edges) -> float:
    """E[prod_i (1{e_i} - P(e_i))] as a signed sum over fixed-point-free permutations."""
    M = _local_matrix(K, Kinv, edges)
    r = len(edges)
    total = 0.0
    for perm in _derangements(r):
        total += _perm_sign(perm) * np.prod(M[np.arange(r), perm])
    return float(total)


# brute force ---------------------------------------------------------------

def enumerate_matchings(graph: AztecGraph, cap: int = DEFAULT_ENUMERATION_CAP):
    """Every perfect matching of ``graph`` with its weight, by depth-first search.

    Whites are processed bottom row first; each step only tries black
    neighbours that are still free, and prunes as soon as some not yet
    processed white has lost all its free neighbours.
    """
    if graph.order > cap:
        raise EnumerationTooLarge(f"order {graph.order} exceeds enumeration cap {cap}")
    nW = graph.num_white
    neighbours = [[] for _ in range(nW)]
    for e, (w, b, wt) in enumerate(zip(graph.edge_white, graph.edge_black, graph.edge_weight)):
        neighbours[int(w)].append((int(b), float(wt)))
    order = sorted(range(nW), key=lambda w: (w // graph.order, w % graph.order))
    black_neighbours = [[] for _ in range(graph.num_black)]
    for w in range(nW):
        for b, _ in neighbours[w]:
            black_neighbours[b].append(w)

    assignment = [-1] * nW
    used = [False] * graph.num_black
    position = {w: i for i, w in enumerate(order)}
    results = []

    def blocked(step):
        # a black whose every white neighbour is already placed cannot be covered
        for b in range(graph.num_black):
            if not used[b] and all(position[w] < step for w in black_neighbours[b]):
                return True
        return False

    def recurse(step, weight):
        if step == nW:
            results.append((Matching(np.array(assignment)), weight))
            return
        w = order[step]
        for b, wt in neighbours[w]:
            if used[b]:
                continue
            used[b] = True
            assignment[w] = b
            if not blocked(step + 1):
                recurse(step + 1, weight * wt)
            used[b] = False
            assignment[w] = -1

    recurse(0, 1.0)
    return results


def enumeration_statistics(graph: AztecGraph, cap: int = DEFAULT_ENUMERATION_CAP):
    """(indicator matrix [matching, edge], normalised probabilities) from enumeration."""
    matchings = enumerate_matchings(graph, cap)
    ind = np.array([m.indicator(graph) for m, _ in matchings])
    weights = np.array([w for _, w in matchings])
    return ind, weights / weights.sum()


# heights ---------------------------------------------------------------------

def _dual_tree_path(graph: AztecGraph, start: int, goal: int, avoid_first=None):
    """Dual steps (indices into graph.dual_steps) of a BFS path start -> goal."""
    src, dst, _, _ = graph.dual_steps
    out = {}
    for i, s in enumerate(src):
        out.setdefault(int(s), []).append(i)
    parent = {start: None}
    frontier = [start]
    while frontier and goal not in parent:
        nxt = []
        for f in frontier:
            steps = out.get(f, [])
            if avoid_first is not None and f == start:
                steps = [s for s in steps if int(dst[s]) != avoid_first]
            for s in steps:
                g = int(dst[s])
                if g not in parent:
                    parent[g] = s
                    nxt.append(g)
        frontier = nxt
    if goal not in parent:
        raise ValueError("no dual path between the requested faces")
    path = []
    f = goal
    while parent[f] is not None:
        s = parent[f]
        path.append(s)
        f = int(src[s])
    return path[::-1]


def mean_height_along(graph: AztecGraph, probabilities: np.ndarray, path) -> float:
    _, _, edge, sign = graph.dual_steps
    in_m0 = np.zeros(graph.num_edges)
    in_m0[graph.reference_edges] = 1.0
    path = np.asarray(path, dtype=np.int64)
    if len(path) == 0:
        return 0.0
    e = edge[path]
    return float(np.sum(sign[path] * (probabilities[e] - in_m0[e])))


def exact_mean_height(graph: AztecGraph, K, Kinv, face: int, base_face: int | None = None,
                      path=None) -> float:
    """E[h(face)] - E[h(base_face)] summed along a dual path using edge probabilities."""
    if base_face is None:
        base_face = graph.default_base_face
    if path is None:
        path = _dual_tree_path(graph, base_face, face)
    return mean_height_along(graph, edge_probabilities(graph, K, Kinv), path)


def exact_mean_heights(graph: AztecGraph, K, Kinv, base_face: int | None = None) -> np.ndarray:
    """E[h] - E[h(base)] on every face, by propagating expected increments."""
    if base_face is None:
        base_face = graph.default_base_face
    probs = edge_probabilities(graph, K, Kinv)
    src, dst, edge, sign = graph.dual_steps
    in_m0 = np.zeros(graph.num_edges)
    in_m0[graph.reference_edges] = 1.0
    incr = sign * (probs[edge] - in_m0[edge])
    mean = np.full(len(graph.faces), np.nan)
    mean[base_face] = 0.0
    adjacency = {}
    for s, d, inc in zip(src, dst, incr):
        adjacency.setdefault(int(s), []).append((int(d), inc))
    frontier = [base_face]
    while frontier:
        nxt = []
        for f in frontier:
            for g, inc in adjacency.get(f, []):
                if np.isnan(mean[g]):
                    mean[g] = mean[f] + inc
                    nxt.append(g)
        frontier = nxt
    return mean


def dump_matrix(path, M) -> None:
    """Write a dense matrix as whitespace-separated rows."""
    M = M.toarray() if sparse.issparse(M) else np.asarray(M)
    np.savetxt(Path(path), M, fmt="%.17g")


def load_matrix(path) -> np.ndarray:
    return np.loadtxt(Path(path), ndmin=2)
