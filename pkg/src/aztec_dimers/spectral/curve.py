"""Magnetically altered Kasteleyn matrix, characteristic polynomial and transition matrices.

The torus graph has the fundamental domain ``w[i, j], b[i, j]`` with
``0 <= i < l`` and ``0 <= j < k``.  An edge leaving the domain through the top
picks up a factor ``1/z``, one leaving through the right side a factor ``w``.
With this orientation the zero set of ``P = det K(z, w)`` coincides with
``prod_i (1 - beta_i^v / z) det(Phi(z) - w I) = 0``.
"""

from __future__ import annotations

import numpy as np

from ..lattice import WeightScheme
from .laurent import LaurentPoly2


class InterpolationError(ArithmeticError):
    pass


class PoleError(ValueError):
    pass


def magnetic_kasteleyn(weights: WeightScheme, z: complex, w: complex) -> np.ndarray:
    """kl x kl matrix K_G1(z, w); row ``j*l + i`` is w[i, j], column ``j*l + i`` is b[i, j]."""
    k, l = weights.k, weights.l
    K = np.zeros((k * l, k * l), dtype=complex)
    for j in range(k):
        for i in range(l):
            row = j * l + i
            for di, dj, val in ((0, 1, weights.alpha[j, i]), (0, 0, weights.gamma[j, i]),
                                (1, 1, weights.beta[j, i]), (1, 0, -1.0)):
                ii, jj, f = i + di, j + dj, 1.0 + 0j
                if jj == k:
                    jj, f = 0, f / z
                if ii == l:
                    ii, f = 0, f * w
                K[row, jj * l + ii] += val * f
    return K


def _det_grid(weights, zs, ws):
    return np.array([[np.linalg.det(magnetic_kasteleyn(weights, z, w)) for w in ws] for z in zs])


def characteristic_polynomial(weights: WeightScheme, rng=None, check_points: int = 100,
                              tol: float = 1e-8) -> LaurentPoly2:
    """P(z, w) = det K_G1(z, w), interpolated from values on the unit torus.

    Exponents are sought in ``|p| <= l + 1``, ``|q| <= k + 1``; the FFT on a
    grid of that many phases recovers them exactly.  The result is then checked
    against fresh evaluations at random points with ``|z|, |w|`` in [0.5, 2].
    """
    Dz, Dw = weights.l + 1, weights.k + 1
    mz, mw = 2 * Dz + 1, 2 * Dw + 1
    zs = np.exp(2j * np.pi * np.arange(mz) / mz)
    ws = np.exp(2j * np.pi * np.arange(mw) / mw)
    c = np.fft.fft2(_det_grid(weights, zs, ws)) / (mz * mw)
    coeffs = {}
    for p in range(mz):
        for q in range(mw):
            coeffs[(p if p <= Dz else p - mz, q if q <= Dw else q - mw)] = c[p, q]
    P = LaurentPoly2(coeffs)

    rng = np.random.default_rng(12345 if rng is None else rng)
    r = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=(check_points, 2)))
    ph = np.exp(2j * np.pi * rng.random((check_points, 2)))
    pts = r * ph
    direct = np.array([np.linalg.det(magnetic_kasteleyn(weights, z, w)) for z, w in pts])
    resid = np.abs(P(pts[:, 0], pts[:, 1]) - direct) / np.maximum(np.abs(direct), 1.0)
    if resid.max() > tol:
        raise InterpolationError(f"interpolation residual {resid.max():.2e} exceeds {tol:g}")
    return P


def transition_matrices(weights: WeightScheme, z: complex, pole_tol: float = 1e-12):
    """The k x k matrices phi_1 .. phi_{2l} at ``z`` and their product Phi(z)."""
    k, l = weights.k, weights.l
    al, be, ga = weights.alpha, weights.beta, weights.gamma
    bv = weights.beta_v
    if np.min(np.abs(z - bv)) < pole_tol:
        raise PoleError(f"z = {z} is within {pole_tol:g} of a pole beta_i^v")
    mats = []
    for i in range(l):
        odd = np.diag(ga[:, i]).astype(complex)
        odd[np.arange(1, k), np.arange(k - 1)] += al[: k - 1, i]
        odd[0, k - 1] += al[k - 1, i] / z
        even = np.empty((k, k), dtype=complex)
        for r in range(k):
            for s in range(k):
                if r == s:
                    even[r, s] = 1.0
                elif r > s:
                    even[r, s] = np.prod(be[s:r, i])
                else:
                    # wraps around the column: beta_{s..k} beta_{1..r-1} / z
                    even[r, s] = np.prod(be[s:, i]) * np.prod(be[:r, i]) / z
        mats.append(odd)
        mats.append(even / (1.0 - bv[i] / z))
    Phi = np.eye(k, dtype=complex)
    for m in mats:
        Phi = Phi @ m
    return mats, Phi


def curve_residual(weights: WeightScheme, z: complex, w: complex) -> float:
    """|det(Phi(z) - w I)| scaled by the size of Phi, for points on the curve."""
    _, Phi = transition_matrices(weights, z)
    scale = max(np.linalg.norm(Phi, 2), abs(w), 1.0) ** weights.k
    return float(abs(np.linalg.det(Phi - w * np.eye(weights.k))) / scale)
