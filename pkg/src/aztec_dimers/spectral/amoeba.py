"""Amoeba of the spectral curve and counting of its compact holes."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .laurent import LaurentPoly2


class GenusAssumptionError(ValueError):
    """The curve has fewer compact amoeba holes than (k - 1)(l - 1)."""


@dataclass
class AmoebaRaster:
    x: np.ndarray          # log|z| column centres
    y: np.ndarray          # log|w| row centres
    mask: np.ndarray       # mask[row, col] is True on the amoeba
    lower: np.ndarray      # lower[j, col]: min log|w| of the j-th smallest root
    upper: np.ndarray
    holes: np.ndarray      # label image of bounded complement components
    bounded_components: int

    def points(self):
        """(log|z|, log|w|) interval endpoints per column, as an (m, 2) array."""
        cols = np.repeat(self.x[None, :], self.lower.shape[0], axis=0)
        pts = np.concatenate([np.stack([cols, self.lower], -1).reshape(-1, 2),
                              np.stack([cols, self.upper], -1).reshape(-1, 2)])
        return pts[np.all(np.isfinite(pts), axis=1)]

    def to_csv(self, path) -> None:
        np.savetxt(Path(path), self.points(), delimiter=",", header="log_abs_z,log_abs_w", comments="")

    def to_png(self, path, title: str | None = None) -> None:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 5))
        ext = (self.x[0], self.x[-1], self.y[0], self.y[-1])
        ax.imshow(self.mask, origin="lower", extent=ext, cmap="Greys", aspect="auto")
        if self.bounded_components:
            ax.contour(self.x, self.y, self.holes > 0, levels=[0.5], colors="tab:red", linewidths=0.8)
        ax.set_xlabel("log|z|")
        ax.set_ylabel("log|w|")
        ax.set_title(title or f"{self.bounded_components} compact oval(s)")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)


def _w_roots(P: LaurentPoly2, zs: np.ndarray) -> np.ndarray:
    """Roots in w of P(z, .) for many z at once via batched companion matrices."""
    q0, q1 = P.w_range
    deg = q1 - q0
    coeffs = np.zeros((len(zs), deg + 1), dtype=complex)   # lowest power first
    for (p, q), c in P.coeffs.items():
        coeffs[:, q - q0] += c * zs**p
    lead = coeffs[:, -1]
    if np.any(lead == 0) or deg == 0:
        raise ValueError("leading coefficient in w vanishes on the sample circle")
    comp = np.zeros((len(zs), deg, deg), dtype=complex)
    comp[:, 1:, :-1] = np.eye(deg - 1)
    comp[:, :, -1] = -coeffs[:, :-1] / lead[:, None]
    return np.linalg.eigvals(comp)


def amoeba_raster(P: LaurentPoly2, resolution: int = 400, window: float = 4.0,
                  phases: int = 720, ywindow: float | None = None) -> AmoebaRaster:
    """Rasterise the amoeba over ``|log|z|| <= window`` and count its bounded holes.

    For fixed log|z| the j-th smallest root modulus of P(z, .) traces a closed
    curve as arg z runs round the circle, so its log covers an interval; the
    amoeba slice is the union of these intervals.
    """
    if not P.coeffs:
        raise ValueError("P is the zero polynomial")
    ywindow = window if ywindow is None else ywindow
    x = np.linspace(-window, window, resolution)
    y = np.linspace(-ywindow, ywindow, resolution)
    dy = y[1] - y[0]
    theta = 2 * np.pi * (np.arange(phases) + 0.5) / phases
    deg = P.w_range[1] - P.w_range[0]
    lower = np.full((deg, resolution), np.nan)
    upper = np.full((deg, resolution), np.nan)
    mask = np.zeros((resolution, resolution), dtype=bool)
    for col, xv in enumerate(x):
        roots = _w_roots(P, np.exp(xv + 1j * theta))
        lw = np.sort(np.log(np.abs(roots)), axis=1)
        lower[:, col] = lw.min(axis=0)
        upper[:, col] = lw.max(axis=0)
        for j in range(deg):
            lo = int(np.floor((lower[j, col] - y[0]) / dy))
            hi = int(np.ceil((upper[j, col] - y[0]) / dy))
            lo, hi = max(lo, 0), min(hi, resolution - 1)
            if lo <= hi:
                mask[lo:hi + 1, col] = True
    labels, count = ndimage.label(~mask)
    edge = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    holes = np.where(np.isin(labels, edge), 0, labels)
    n_bounded = len(np.setdiff1d(np.unique(holes), [0]))
    return AmoebaRaster(x, y, mask, lower, upper, holes, n_bounded)


def count_compact_ovals(P: LaurentPoly2, **kwargs) -> int:
    return amoeba_raster(P, **kwargs).bounded_components


def check_genus(weights, P: LaurentPoly2 | None = None, **kwargs) -> int:
    """Raise GenusAssumptionError unless the amoeba shows (k - 1)(l - 1) holes."""
    from .curve import characteristic_polynomial

    if P is None:
        P = characteristic_polynomial(weights)
    expected = (weights.k - 1) * (weights.l - 1)
    found = count_compact_ovals(P, **kwargs)
    if found < expected:
        raise GenusAssumptionError(f"amoeba has {found} compact oval(s), expected {expected}")
    return found
