"""Self-checks run by ``aztec-dimers verify``; each suite returns a JSON-friendly verdict."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .kasteleyn import (edge_probabilities, enumerate_matchings, enumeration_statistics, inverse_kasteleyn,
                        kasteleyn_matrix, partition_function)
from .lattice import KASTELEYN_SIGN, AztecGraph, WeightScheme
from .shuffling import ShuffleSampler, precompute_weight_tables, sample_stream
from .spectral import (characteristic_polynomial, discrete_gaussian_moments, modular_transform_check,
                       period_genus1, quasi_periodicity_residual, summed_moments, theta,
                       DiscreteGaussianParams, LaurentPoly2)


def _check(name, value, tol):
    return {"check": name, "value": float(value), "tolerance": float(tol), "pass": bool(value <= tol)}


def kasteleyn_suite(signs=KASTELEYN_SIGN, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for k, l, N in ((1, 1, 1), (1, 1, 2), (1, 1, 3), (2, 2, 1), (1, 2, 1)):
        g = AztecGraph(N, WeightScheme.random(k, l, rng))
        K = kasteleyn_matrix(g, signs)
        ind, probs = enumeration_statistics(g)
        total = sum(w for _, w in enumerate_matchings(g))
        det = abs(np.linalg.det(K))
        out.append(_check(f"det-vs-enumeration order {g.order}", abs(det - total) / total, 1e-9))
        if det > 0:
            p = edge_probabilities(g, K, inverse_kasteleyn(K, check=False))
            out.append(_check(f"edge-probabilities order {g.order}", np.abs(p - probs @ ind).max(), 1e-9))
    return out


def sampler_suite(seed: int = 0, count: int = 20000) -> list:
    out = []
    rng = np.random.default_rng(seed)
    for N, ws in ((3, WeightScheme.random(1, 1, rng)), (1, WeightScheme.two_periodic(0.7))):
        g = AztecGraph(N, ws)
        logz = precompute_weight_tables(g).log_partition_function()
        exact = np.log(partition_function(kasteleyn_matrix(g)))
        out.append(_check(f"renewal-partition-function order {g.order}", abs(logz - exact), 1e-9))
    g = AztecGraph.of_order(2, WeightScheme.uniform())
    ind, probs = enumeration_statistics(g)
    sampler = ShuffleSampler(g)
    lookup = {row.tobytes(): i for i, row in enumerate(ind.astype(np.uint8))}
    counts = np.zeros(len(probs))
    for i in range(count):
        occ = sampler.occupancy(sample_stream(seed, i))
        counts[lookup[occ.transpose(2, 1, 0).reshape(-1).astype(np.uint8).tobytes()]] += 1
    pval = stats.chisquare(counts, probs * count).pvalue
    out.append({"check": "order-2 chi-square p-value", "value": float(pval), "tolerance": 1e-3,
                "pass": bool(pval >= 1e-3)})
    return out


def spectral_suite() -> list:
    out = []
    for a in (0.5, 0.7, 2.0):
        P = characteristic_polynomial(WeightScheme.two_periodic(a)).normalised()
        gold = golden_polynomial(a)
        keys = set(P.coeffs) | set(gold.coeffs)
        out.append(_check(f"P golden a={a}", max(abs(P[e] - gold[e]) for e in keys), 1e-8))
    for a in (0.5, 0.7, 0.9):
        B, Binv = period_genus1(a).B, period_genus1(1 / a).B
        out.append(_check(f"period a vs 1/a a={a}", abs(B - Binv), 1e-8))
        out.append(_check(f"period imaginary a={a}", abs(B.real), 1e-8))
    rng = np.random.default_rng(1)
    worst_mod = worst_q = 0.0
    for _ in range(20):
        B = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.3, 3))
        z = complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        worst_mod = max(worst_mod, modular_transform_check([z], [[B]]))
        worst_q = max(worst_q, max(quasi_periodicity_residual([z], [[B]], [m]) for m in range(-2, 3)))
    out.append(_check("theta modular transform", worst_mod, 1e-9))
    out.append(_check("theta quasi-periodicity", worst_q, 1e-9))
    B = period_genus1(0.7).B
    out.append(_check("theta half-period zero", abs(theta([(1 + B) / 2], [[B]])), 1e-10))
    p = DiscreteGaussianParams([0.25], [[1j]])
    mean, cov = discrete_gaussian_moments(p)
    _, smean, scov = summed_moments(p)
    out.append(_check("discrete Gaussian moments", max(abs(mean - smean).max(), abs(cov - scov).max()), 1e-8))
    return out


def golden_polynomial(a: float) -> LaurentPoly2:
    """(z/w) P for the symmetric 2 x 2 weights, scaled so the wz coefficient is 1."""
    return LaurentPoly2({(0, 0): -4 - 4 / a**2 - 4 * a**2, (0, -1): -2, (0, 1): -2, (-1, 0): -2,
                         (1, 0): -2, (-1, -1): 1, (-1, 1): 1, (1, -1): 1, (1, 1): 1}, trim=False)


SUITES = {"kasteleyn": kasteleyn_suite, "sampler": sampler_suite, "spectral": spectral_suite}


def run_suites(names=None, signs=KASTELEYN_SIGN) -> dict:
    names = list(SUITES) if not names else list(names)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    result = {}
    for name in names:
        checks = SUITES[name](signs=signs) if name == "kasteleyn" else SUITES[name]()
        result[name] = {"pass": all(c["pass"] for c in checks), "checks": checks}
    return result
