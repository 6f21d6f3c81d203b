"""Discrete Gaussian laws on Z^g: P(n) proportional to exp(i pi (n - e).tau(n - e))."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .theta import ThetaParams, log_theta_derivatives, theta


@dataclass(frozen=True, eq=False)
class DiscreteGaussianParams:
    e: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.e, dtype=float))
        tau = ThetaParams.of(self.tau).B
        if e.shape != (tau.shape[0],):
            raise ValueError("shift e and scale tau have inconsistent dimensions")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "tau", tau)

    @property
    def g(self) -> int:
        return len(self.e)

    def to_dict(self) -> dict:
        return {"e": self.e.tolist(), "tau_real": self.tau.real.tolist(), "tau_imag": self.tau.imag.tolist()}


def _log_normaliser(p: DiscreteGaussianParams) -> complex:
    logth, _, _ = log_theta_derivatives(-p.tau @ p.e, p.tau)
    return logth + 1j * np.pi * (p.e @ p.tau @ p.e)


def discrete_gaussian_pmf(p: DiscreteGaussianParams, n) -> np.ndarray:
    """P_{e,tau}(n) for one point (shape (g,)) or many (shape (m, g))."""
    n = np.asarray(n, dtype=float)
    single = n.ndim == 1
    n = np.atleast_2d(n)
    d = n - p.e
    expo = 1j * np.pi * np.einsum("mi,ij,mj->m", d, p.tau, d)
    out = np.exp(expo - _log_normaliser(p)).real
    return out[0] if single else out


def normalising_constant(p: DiscreteGaussianParams) -> complex:
    """theta(-tau e; tau) exp(i pi e.tau e)."""
    return complex(theta(-p.tau @ p.e, p.tau) * np.exp(1j * np.pi * (p.e @ p.tau @ p.e)))


def discrete_gaussian_moments(p: DiscreteGaussianParams):
    """(mean, covariance) as log-derivatives of theta(z - tau e; tau) at z = 0."""
    _, grad, hess = log_theta_derivatives(-p.tau @ p.e, p.tau)
    mean = (grad / (2j * np.pi)).real
    cov = (hess / (2j * np.pi) ** 2).real
    return mean, 0.5 * (cov + cov.T)


def _window(p: DiscreteGaussianParams, mean=None, cov=None):
    if mean is None:
        mean, cov = discrete_gaussian_moments(p)
    half = max(10, int(np.ceil(8 * np.sqrt(np.max(np.diag(cov))))))
    centre = np.rint(mean).astype(int)
    ranges = [np.arange(c - half, c + half + 1) for c in centre]
    return np.array(list(itertools.product(*ranges)), dtype=float)


def summed_moments(p: DiscreteGaussianParams, half_width: int = 40):
    """(total mass, mean, covariance) by direct summation of the pmf over a box."""
    ranges = [np.arange(int(np.floor(ei)) - half_width, int(np.floor(ei)) + half_width + 1) for ei in p.e]
    pts = np.array(list(itertools.product(*ranges)), dtype=float)
    w = discrete_gaussian_pmf(p, pts)
    mass = w.sum()
    mean = w @ pts / mass
    d = pts - mean
    cov = (d * w[:, None]).T @ d / mass
    return float(mass), mean, cov


def discrete_gaussian_sample(p: DiscreteGaussianParams, seed, count: int) -> np.ndarray:
    """``count`` iid draws (shape (count, g)) by inverse CDF on a window around the mean."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = _window(p)
    cdf = np.cumsum(discrete_gaussian_pmf(p, pts))
    idx = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
    return pts[np.minimum(idx, len(pts) - 1)].astype(np.int64)


def centred_variance(p: DiscreteGaussianParams) -> np.ndarray:
    return discrete_gaussian_moments(p)[1]
