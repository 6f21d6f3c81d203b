"""
The discrete component of the height in the gas
================================================

Average the height over the faces of a small square around the centre,
centre it over the batch, and compare its histogram with the discrete
Gaussian predicted from the curve.  N = 25 (order 100) keeps this under
half a minute; the acceptance run repeats it at order 200.
"""
from pathlib import Path

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from aztec_dimers.fluctuations import FacetSpec, run_experiment
from aztec_dimers.lattice import WeightScheme
from aztec_dimers.spectral import discrete_gaussian_pmf, predicted_Z_distribution

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

a = 0.7
facet = FacetSpec.centred_square(0.15, mesh_exponent=0.0)
report = run_experiment(WeightScheme.two_periodic(a), 25, [facet], count=2000, seed=3)
f = report.facets[0]
print("faces averaged:", f["M"])
print("empirical variance %.4f +- %.4f" % (f["empirical"]["variance"], f["empirical"]["variance_se"]))
print("predicted variance %.4f" % f["predicted"]["variance"])
report.write_json(out / "experiment_N25.json")

# the readings are pooled-centred, the law is centred at its own mean
law = predicted_Z_distribution(a)
n = np.arange(-4, 6)
pmf = discrete_gaussian_pmf(law, n[:, None])
pmf /= pmf.sum()
mean = pmf @ n

fig, ax = plt.subplots()
ax.hist(report.z[:, 0], bins=60, density=True, alpha=0.6, label="Z, sampled")
ax.vlines(n - mean, 0, pmf * 4, colors="k", label="discrete Gaussian (scaled)")
ax.legend()
fig.savefig(out / "z_histogram.png", dpi=120)
