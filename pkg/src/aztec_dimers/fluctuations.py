"""Discrete components of sampled height functions and Monte Carlo experiments.

The discrete component of a gaseous facet is the average of the centred
height function over a mesoscopic grid of faces in a rectangle inside the
facet.  Grid faces are even faces ``(X0 + 2 floor(s N^mu), Y0 + 2 floor(p N^mu))``
where ``(X0, Y0)`` is the first even face inside the rectangle and ``mu`` is
the mesh exponent.  ``mu = 0`` keeps every even face in the rectangle.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .kasteleyn import exact_mean_heights, inverse_kasteleyn, kasteleyn_matrix
from .lattice import AztecGraph, HeightField, WeightScheme, heights_from_occupancy
from .shuffling import precompute_weight_tables, sample_batch
from .spectral import discrete_gaussian_pmf, predicted_Z_distribution

DEFAULT_MESH_EXPONENT = 15 / 16
VARIANCE_RTOL = 0.15
VARIANCE_NSE = 3.0


class EmptyGridError(ValueError):
    pass


@dataclass(frozen=True)
class FacetSpec:
    """Rectangle [xi0, xi1] x [eta0, eta1] in macroscopic coordinates plus a mesh exponent."""

    xi0: float = -0.15
    eta0: float = -0.15
    xi1: float = 0.15
    eta1: float = 0.15
    mesh_exponent: float = DEFAULT_MESH_EXPONENT

    def __post_init__(self):
        if not (-1 < self.xi0 < self.xi1 < 1 and -1 < self.eta0 < self.eta1 < 1):
            raise ValueError("facet rectangle must lie strictly inside [-1, 1]^2 and be nonempty")
        if not 0 <= self.mesh_exponent < 1:
            raise ValueError("mesh exponent must lie in [0, 1)")

    @classmethod
    def centred_square(cls, half_width: float = 0.15, mesh_exponent: float = DEFAULT_MESH_EXPONENT):
        return cls(-half_width, -half_width, half_width, half_width, mesh_exponent)

    @classmethod
    def parse(cls, text: str, mesh_exponent: float = DEFAULT_MESH_EXPONENT) -> "FacetSpec":
        """From the command-line form ``"xi0,eta0,xi1,eta1"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("facet must be given as xi0,eta0,xi1,eta1")
        return cls(*parts, mesh_exponent=mesh_exponent)

    def to_dict(self) -> dict:
        return {"xi0": self.xi0, "eta0": self.eta0, "xi1": self.xi1, "eta1": self.eta1,
                "mesh_exponent": self.mesh_exponent}


@dataclass(frozen=True, eq=False)
class FacetGrid:
    spec: FacetSpec
    faces: np.ndarray      # (M, 2) planar coordinates (X, Y), both even

    @property
    def M(self) -> int:
        return len(self.faces)

    @property
    def a(self) -> np.ndarray:
        return self.faces[:, 0] // 2

    @property
    def c(self) -> np.ndarray:
        return self.faces[:, 1] // 2


def _axis_points(n: int, lo: float, hi: float, spacing: float) -> np.ndarray:
    start = int(np.ceil(n * (lo + 1) / 2)) * 2
    stop = n * (hi + 1)
    pts = []
    s = 0
    while True:
        x = start + 2 * int(np.floor(s * spacing))
        if x > stop + 1e-9:
            break
        pts.append(x)
        s += 1
    return np.unique(np.array(pts, dtype=np.int64))


def facet_grid(graph: AztecGraph, spec: FacetSpec) -> FacetGrid:
    """The mesoscopic grid of even faces inside the rectangle of ``spec``."""
    n = graph.order
    spacing = graph.N ** spec.mesh_exponent
    xs = _axis_points(n, spec.xi0, spec.xi1, spacing)
    ys = _axis_points(n, spec.eta0, spec.eta1, spacing)
    if len(xs) == 0 or len(ys) == 0:
        raise EmptyGridError(f"no face of the order-{n} diamond lies in the facet rectangle")
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    faces = np.stack([X.ravel(), Y.ravel()], axis=1)
    faces.setflags(write=False)
    return FacetGrid(spec, faces)


class FacetAverages:
    """Sampler reducer: uncentred mean height over each grid, one value per facet."""

    def __init__(self, grids):
        self.index = [(g.a, g.c) for g in grids]

    def __call__(self, occ) -> np.ndarray:
        h = heights_from_occupancy(occ)
        return np.array([h[a, c].mean() for a, c in self.index])


@dataclass
class ZReadings:
    values: np.ndarray     # (samples, facets)
    M: tuple
    centering: str


def _raw_averages(heights, grids, graph=None) -> np.ndarray:
    if len(heights) and isinstance(heights[0], HeightField):
        if graph is None:
            raise ValueError("HeightField input needs the graph")
        ids = [np.array([graph.face_id(x, y) for x, y in g.faces]) for g in grids]
        bases = {hf.base_face for hf in heights}
        if len(bases) != 1:
            raise ValueError("all height fields must share the base face")
        return np.array([[hf.heights[i].mean() for i in ids] for hf in heights], dtype=float)
    h = np.asarray(heights)
    return np.stack([h[:, g.a, g.c].mean(axis=1) for g in grids], axis=1).astype(float)


def centre_readings(raw: np.ndarray, grids, centering: str = "pooled", graph=None,
                    exact_means=None) -> ZReadings:
    """Centre per-sample facet averages by the batch mean or by exact face means."""
    raw = np.asarray(raw, dtype=float)
    if centering == "pooled":
        if raw.shape[0] < 2:
            raise ValueError("pooled centering needs at least 2 samples")
        values = raw - raw.mean(axis=0)
    elif centering == "exact":
        if exact_means is None:
            if graph is None:
                raise ValueError("exact centering needs the graph or precomputed means")
            K = kasteleyn_matrix(graph)
            exact_means = exact_mean_heights(graph, K, inverse_kasteleyn(K))
        offsets = np.array([
            np.mean([exact_means[graph.face_id(x, y)] for x, y in g.faces]) for g in grids
        ])
        values = raw - offsets
    else:
        raise ValueError("centering must be 'pooled' or 'exact'")
    return ZReadings(values, tuple(g.M for g in grids), centering)


def discrete_component(heights, grids, centering: str = "pooled", graph=None,
                       exact_means=None) -> ZReadings:
    """Z_j per sample from height fields.

    ``heights`` is either a sequence of :class:`HeightField` (with ``graph``) or
    an array ``(samples, n + 1, n + 1)`` of even-face heights as returned by
    :func:`heights_from_occupancy`.
    """
    raw = _raw_averages(heights, grids, graph)
    return centre_readings(raw, grids, centering, graph, exact_means)


# moments -------------------------------------------------------------------

def _moments(x: np.ndarray) -> np.ndarray:
    """(variance, skewness, excess kurtosis) along axis 0 (x already centred or not)."""
    d = x - x.mean(axis=0)
    var = (d ** 2).sum(axis=0) / (len(x) - 1)
    m2 = (d ** 2).mean(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        skew = (d ** 3).mean(axis=0) / m2 ** 1.5
        kurt = (d ** 4).mean(axis=0) / m2 ** 2 - 3.0
    return np.stack([var, skew, kurt])


def bootstrap_moments(values: np.ndarray, resamples: int, seed) -> tuple:
    """Moments and their bootstrap standard errors (resampling whole samples)."""
    rng = np.random.default_rng(seed)
    est = _moments(values)
    boot = np.empty((resamples,) + est.shape)
    for r in range(resamples):
        boot[r] = _moments(values[rng.integers(0, len(values), len(values))])
    return est, boot.std(axis=0, ddof=1)


def predicted_moments(params, half_width: int = 40) -> dict:
    """Centred variance, skewness and excess kurtosis of a genus-1 discrete Gaussian."""
    e = float(params.e[0])
    n = np.arange(int(np.floor(e)) - half_width, int(np.floor(e)) + half_width + 1, dtype=float)
    p = discrete_gaussian_pmf(params, n[:, None])
    p = p / p.sum()
    d = n - p @ n
    var = p @ d ** 2
    return {"variance": float(var), "skewness": float(p @ d ** 3 / var ** 1.5),
            "excess_kurtosis": float(p @ d ** 4 / var ** 2 - 3.0)}


# experiments -----------------------------------------------------------------

@dataclass
class ExperimentReport:
    parameters: dict
    facets: list
    z: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool | None:
        verdicts = [f["verdict"]["pass"] for f in self.facets if f.get("verdict")]
        return all(verdicts) if verdicts else None

    def to_dict(self) -> dict:
        return {"artifact_version": __version__, "parameters": self.parameters,
                "facets": self.facets, "passed": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_json(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def z_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.parameters, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample"] + [f"Z_{j + 1}" for j in range(self.z.shape[1])])
        for i, row in enumerate(self.z):
            w.writerow([i] + [repr(float(v)) for v in row])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.z_csv())

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        return cls(data["parameters"], data["facets"], np.empty((0, len(data["facets"]))))


def variance_verdict(empirical: float, se: float, predicted: float) -> dict:
    tol = max(VARIANCE_NSE * se, VARIANCE_RTOL * predicted)
    gap = abs(empirical - predicted)
    return {"pass": bool(gap <= tol), "gap": gap, "tolerance": tol,
            "rule": "|Var_emp - Var_pred| <= max(3 SE, 0.15 Var_pred)"}


def run_experiment(weights: WeightScheme, N: int, facets=None, count: int = 2000, seed: int = 0,
                   workers: int = 1, bootstrap: int = 200) -> ExperimentReport:
    """Sample ``count`` diamonds of order kℓN and compare Var(Z) with the discrete-Gaussian law."""
    if count < 2:
        raise ValueError("pooled centering needs at least 2 samples")
    facets = [FacetSpec()] if facets is None else list(facets)
    graph = AztecGraph(N, weights)
    grids = [facet_grid(graph, f) for f in facets]
    batch = sample_batch(graph, seed, count, reducer=FacetAverages(grids), workers=workers,
                         tables=precompute_weight_tables(graph))
    readings = centre_readings(batch.stacked(), grids, "pooled")

    prediction = None
    a = weights.two_periodic_parameter()
    if a is not None and abs(a - 1) > 1e-12:
        params = predicted_Z_distribution(a)
        prediction = {"tau": [params.tau[0, 0].real, params.tau[0, 0].imag],
                      "e": float(params.e[0]), **predicted_moments(params)}

    est, se = bootstrap_moments(readings.values, bootstrap, np.random.SeedSequence([seed, 1]))
    out = []
    for j, (spec, grid) in enumerate(zip(facets, grids)):
        entry = {
            "facet": spec.to_dict(), "M": grid.M,
            "empirical": {"variance": float(est[0, j]), "variance_se": float(se[0, j]),
                          "skewness": float(est[1, j]), "skewness_se": float(se[1, j]),
                          "excess_kurtosis": float(est[2, j]), "excess_kurtosis_se": float(se[2, j])},
            "predicted": prediction,
            "verdict": None,
        }
        if prediction is not None:
            entry["verdict"] = variance_verdict(est[0, j], se[0, j], prediction["variance"])
        out.append(entry)
    params = {"weights": weights.to_dict(), "N": int(N), "order": graph.order, "count": int(count),
              "seed": int(seed), "bootstrap_resamples": int(bootstrap), "centering": "pooled",
              "facets": [f.to_dict() for f in facets]}
    return ExperimentReport(params, out, readings.values)


def rerun(report: ExperimentReport, workers: int = 1) -> ExperimentReport:
    """Repeat an experiment from the parameter block of its report."""
    p = report.parameters
    return run_experiment(WeightScheme.from_dict(p["weights"]), p["N"],
                          [FacetSpec(**f) for f in p["facets"]], p["count"], p["seed"],
                          workers, p["bootstrap_resamples"])


def height_moment_probe(heights, faces, resamples: int = 200, seed=0) -> dict:
    """Centred covariance and joint product moment of heights at distinct even faces.

    ``heights`` is an array ``(samples, n + 1, n + 1)`` of even-face heights.
    Reported with bootstrap standard errors; no verdict is attached.
    """
    faces = [tuple(int(v) for v in f) for f in faces]
    if len(set(faces)) != len(faces):
        raise ValueError("faces must be pairwise distinct")
    if any(x % 2 or y % 2 for x, y in faces):
        raise ValueError("faces must be even faces (2a, 2c)")
    h = np.asarray(heights, dtype=float)
    vals = np.stack([h[:, x // 2, y // 2] for x, y in faces], axis=1)

    def stats(v):
        d = v - v.mean(axis=0)
        return np.cov(d, rowvar=False).reshape(len(faces), len(faces)), np.prod(d, axis=1).mean()

    cov, prod = stats(vals)
    rng = np.random.default_rng(seed)
    boot = [stats(vals[rng.integers(0, len(vals), len(vals))]) for _ in range(resamples)]
    return {"faces": faces, "covariance": cov.tolist(),
            "covariance_se": np.std([b[0] for b in boot], axis=0, ddof=1).tolist(),
            "product_moment": float(prod),
            "product_moment_se": float(np.std([b[1] for b in boot], ddof=1))}
