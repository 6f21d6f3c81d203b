"""Branch points and period of the genus-1 curve of the symmetric 2 x 2 model.

The holomorphic one-form is ``dz / (c sqrt(z (z + a^2)(z + a^-2)))``.  With
``r1 < r2`` the two finite nonzero branch points in absolute value, the A
cycle runs around the cut ``[-r2, -r1]`` and the B cycle around ``[-r1, 0]``;
``c`` normalises the A period to 1 and the orientation is fixed by Im B > 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .discrete_gaussian import DiscreteGaussianParams


class DegenerateCurveError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Genus1CurveData:
    a: float
    branch_points: tuple
    cuts: tuple
    B: complex | None = None
    c: complex | None = None

    def to_dict(self) -> dict:
        def enc(x):
            if x is None:
                return None
            if isinstance(x, complex):
                return [x.real, x.imag]
            return x if np.isfinite(x) else "inf"
        return {
            "a": self.a,
            "branch_points": [enc(p) for p in self.branch_points],
            "cuts": [[enc(lo), enc(hi)] for lo, hi in self.cuts],
            "B": enc(self.B),
            "c": enc(self.c),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check(a: float) -> float:
    a = float(a)
    if not a > 0:
        raise ValueError("a must be positive")
    if abs(a - 1.0) < 1e-12:
        raise DegenerateCurveError("a = 1: the curve degenerates and the genus drops to 0")
    return a


def branch_points_genus1(a: float) -> Genus1CurveData:
    a = _check(a)
    r1, r2 = sorted((a * a, 1.0 / (a * a)))
    pts = (0.0, -a * a, -1.0 / (a * a), float("inf"))
    cuts = ((-r1, 0.0), (-float("inf"), -r2))
    return Genus1CurveData(a, pts, cuts)


def _integral(lo: float, hi: float, r1: float, r2: float) -> float:
    """int_lo^hi dz / sqrt|z (z + r1)(z + r2)|, endpoints being branch points."""
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def f(t):
        z = mid + half * np.sin(t)
        # |f| vanishes like cos(t)^2 at the ends, so factor it out analytically
        return half * np.cos(t) / np.sqrt(abs(z * (z + r1) * (z + r2)))

    val, err = quad(f, -np.pi / 2, np.pi / 2, epsabs=0, epsrel=1e-13, limit=200)
    if not np.isfinite(val) or err > 1e-8 * abs(val):
        raise QuadratureError(f"period quadrature did not converge (error estimate {err:.1e})")
    return val


def period_genus1(a: float) -> Genus1CurveData:
    data = branch_points_genus1(a)
    r1, r2 = sorted((data.a ** 2, data.a ** -2))
    i_a = _integral(-r2, -r1, r1, r2)   # sqrt(f) is real on the A cut
    i_b = _integral(-r1, 0.0, r1, r2)   # and imaginary on the B cut
    c = 2.0 * i_a
    # B = (1/c) * 2 int_{-r1}^0 dz / (i sqrt|f|) up to orientation; choose Im B > 0
    B = 1j * (2.0 * i_b) / c
    return Genus1CurveData(data.a, data.branch_points, data.cuts, complex(B), complex(c))


def predicted_Z_distribution(a: float) -> DiscreteGaussianParams:
    """Limit law parameters of the discrete component: tau = -1/B, e = +1/4 (a < 1) or -1/4 (a > 1)."""
    data = period_genus1(a)
    tau = -1.0 / data.B
    e = 0.25 if data.a < 1 else -0.25
    return DiscreteGaussianParams(np.array([e]), np.array([[tau]]))
