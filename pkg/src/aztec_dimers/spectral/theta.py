"""Riemann theta functions theta(z; B) = sum_n exp(i pi (n.Bn + 2 n.z)) and their log-derivatives."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# log of the ratio between the largest kept term and the first discarded one
TAIL_EXPONENT = 40.0


@dataclass(frozen=True, eq=False)
class ThetaParams:
    """A g x g complex symmetric matrix with positive definite imaginary part."""

    B: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, dtype=complex))
        if B.shape[0] != B.shape[1]:
            raise ValueError("B must be square")
        if np.abs(B - B.T).max() > 1e-12:
            raise ValueError("B must be symmetric")
        if np.linalg.eigvalsh(B.imag).min() <= 0:
            raise ValueError("Im B must be positive definite")
        B.setflags(write=False)
        object.__setattr__(self, "B", B)

    @property
    def g(self) -> int:
        return self.B.shape[0]

    @classmethod
    def of(cls, B) -> "ThetaParams":
        return B if isinstance(B, ThetaParams) else cls(B)


def _lattice(params: ThetaParams, z: np.ndarray, extra: float = 0.0) -> np.ndarray:
    """Integer points carrying every term within exp(-TAIL_EXPONENT - extra) of the largest.

    The modulus of the n-th term is exp(-pi (n + c).Y(n + c)) up to a common
    factor, where Y = Im B and c = Y^{-1} Im z, so the sum is centred at -c.
    """
    Y = params.B.imag
    c = np.linalg.solve(Y, z.imag)
    lam = np.linalg.eigvalsh(Y).min()
    radius = np.sqrt((TAIL_EXPONENT + extra) / (np.pi * lam)) + 1.0
    ranges = [np.arange(int(np.floor(-ci - radius)), int(np.ceil(-ci + radius)) + 1) for ci in c]
    pts = np.array(list(itertools.product(*ranges)), dtype=float).reshape(-1, params.g)
    d = pts + c
    keep = np.pi * np.einsum("ni,ij,nj->n", d, Y, d) <= TAIL_EXPONENT + extra + np.pi * lam
    return pts[keep]


def _terms(params: ThetaParams, z, extra: float = 0.0):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (params.g,):
        raise ValueError(f"z must have shape ({params.g},)")
    n = _lattice(params, z, extra)
    expo = 1j * np.pi * (np.einsum("ni,ij,nj->n", n, params.B, n) + 2 * n @ z)
    shift = expo.real.max()
    return n, np.exp(expo - shift), shift


def theta(z, B) -> complex:
    params = ThetaParams.of(B)
    _, t, shift = _terms(params, z)
    return complex(np.sum(t) * np.exp(shift))


def log_theta_derivatives(z, B):
    """(log theta, gradient, Hessian) of log theta at z, from the differentiated series."""
    params = ThetaParams.of(B)
    # the n^2 prefactors of the second derivative need a slightly wider window
    n, t, shift = _terms(params, z, extra=10.0)
    s0 = np.sum(t)
    s1 = 2j * np.pi * (n.T @ t)
    s2 = (2j * np.pi) ** 2 * np.einsum("ni,nj,n->ij", n, n, t)
    grad = s1 / s0
    hess = s2 / s0 - np.outer(grad, grad)
    return np.log(s0) + shift, grad, hess


def quasi_periodicity_residual(z, B, m) -> float:
    """|theta(z + Bm) - exp(-i pi (m.Bm + 2 m.z)) theta(z)| relative to the right side."""
    params = ThetaParams.of(B)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    m = np.atleast_1d(np.asarray(m, dtype=float))
    lhs = theta(z + params.B @ m, params)
    rhs = np.exp(-1j * np.pi * (m @ params.B @ m + 2 * m @ z)) * theta(z, params)
    return float(abs(lhs - rhs) / abs(rhs))


def modular_transform_check(z, B) -> float:
    """Relative residual of theta(z; -B^{-1}) = sqrt(det(-iB)) exp(i pi z.Bz) theta(Bz; B).

    The principal square root is the right branch for g = 1 (Re(-iB) > 0).
    """
    params = ThetaParams.of(B)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    Binv = np.linalg.inv(params.B)
    lhs = theta(z, ThetaParams(-0.5 * (Binv + Binv.T)))
    rhs = (np.sqrt(np.linalg.det(-1j * params.B)) * np.exp(1j * np.pi * z @ params.B @ z)
           * theta(params.B @ z, params))
    return float(abs(lhs - rhs) / abs(rhs))
