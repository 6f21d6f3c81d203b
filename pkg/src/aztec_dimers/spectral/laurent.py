"""Sparse bivariate Laurent polynomials with real coefficients."""

from __future__ import annotations

import numpy as np

TRIM_RTOL = 1e-9


class LaurentPoly2:
    """P(z, w) = sum c[p, q] z^p w^q over a finite set of integer exponents."""

    def __init__(self, coeffs: dict, trim: bool = True):
        items = {(int(p), int(q)): complex(c) for (p, q), c in coeffs.items()}
        if trim and items:
            scale = max(abs(c) for c in items.values())
            items = {e: c for e, c in items.items() if abs(c) >= TRIM_RTOL * scale}
        imag = max((abs(c.imag) for c in items.values()), default=0.0)
        scale = max((abs(c) for c in items.values()), default=0.0)
        if imag > 1e-8 * max(scale, 1.0):
            raise ValueError(f"coefficients are not real (max imaginary part {imag:.2e})")
        self.coeffs = {e: c.real for e, c in sorted(items.items())}

    # exponents -----------------------------------------------------------
    @property
    def z_range(self):
        ps = [p for p, _ in self.coeffs]
        return min(ps), max(ps)

    @property
    def w_range(self):
        qs = [q for _, q in self.coeffs]
        return min(qs), max(qs)

    def __getitem__(self, exponent) -> float:
        return self.coeffs.get(tuple(exponent), 0.0)

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for (p, q), c in self.coeffs.items():
            out = out + c * z**p * w**q
        return out

    # normalisation ---------------------------------------------------------
    def shifted(self, dp: int, dq: int) -> "LaurentPoly2":
        """Multiply by the monomial z^dp w^dq."""
        return LaurentPoly2({(p + dp, q + dq): c for (p, q), c in self.coeffs.items()}, trim=False)

    def scaled(self, factor: float) -> "LaurentPoly2":
        return LaurentPoly2({e: c * factor for e, c in self.coeffs.items()}, trim=False)

    def normalised(self, anchor=(1, 1)) -> "LaurentPoly2":
        """Shift so the Newton polygon is centred at the origin, then make ``anchor`` coefficient 1.

        Centring is only possible when the exponent ranges have even width;
        otherwise the lower corner is moved to the origin.
        """
        (p0, p1), (q0, q1) = self.z_range, self.w_range
        dp = -(p0 + p1) // 2 if (p0 + p1) % 2 == 0 else -p0
        dq = -(q0 + q1) // 2 if (q0 + q1) % 2 == 0 else -q0
        out = self.shifted(dp, dq)
        c = out[anchor]
        if c == 0:
            raise ValueError(f"anchor coefficient {anchor} vanishes")
        return out.scaled(1.0 / c)

    def w_coefficients(self, z) -> np.ndarray:
        """Coefficients in w (highest power first) of w^{-q0} P(z, w) at fixed z."""
        q0, q1 = self.w_range
        c = np.zeros(q1 - q0 + 1, dtype=complex)
        for (p, q), v in self.coeffs.items():
            c[q1 - q] += v * complex(z) ** p
        return c

    def roots_in_w(self, z) -> np.ndarray:
        c = self.w_coefficients(z)
        nz = np.flatnonzero(np.abs(c) > 0)
        if len(nz) == 0:
            raise ValueError("P(z, .) vanishes identically")
        # zero leading or trailing coefficients mean roots at infinity or zero; drop them
        c = c[nz[0]:nz[-1] + 1]
        return np.roots(c)

    def allclose(self, other: "LaurentPoly2", atol: float = 1e-10) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[e] - other[e]) <= atol for e in keys)

    def to_dict(self) -> dict:
        return {"terms": [[p, q, c] for (p, q), c in self.coeffs.items()]}

    @classmethod
    def from_dict(cls, data: dict) -> "LaurentPoly2":
        return cls({(p, q): c for p, q, c in data["terms"]}, trim=False)

    def __repr__(self):
        terms = " + ".join(f"{c:.6g} z^{p} w^{q}" for (p, q), c in self.coeffs.items())
        return f"LaurentPoly2({terms})"
