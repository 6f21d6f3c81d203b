"""
The spectral curve, its amoeba and the period
==============================================

For the two-periodic weights the characteristic polynomial has one
interior lattice point, so the curve has genus one and the amoeba one
compact oval.  The oval is the gas phase.  The period B of the curve
fixes the discrete Gaussian that describes height fluctuations there.
"""
from pathlib import Path

import numpy as np

from aztec_dimers.lattice import WeightScheme
from aztec_dimers.spectral import (amoeba_raster, characteristic_polynomial, modular_transform_check,
                                   period_genus1, predicted_Z_distribution, centred_variance)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

a = 0.7
P = characteristic_polynomial(WeightScheme.two_periodic(a)).normalised()
for (i, j), c in sorted(P.coeffs.items()):
    print(f"  z^{i:+d} w^{j:+d}: {c:+.6f}")

raster = amoeba_raster(P, resolution=300)
raster.to_png(out / "amoeba_a07.png")
print("compact ovals:", raster.bounded_components)

curve = period_genus1(a)
print("branch points:", curve.branch_points)
print("B =", curve.B)

# the theta function behind the law obeys its modular identity
print("modular residual at B:", modular_transform_check([0.1 + 0.05j], [[curve.B]]))

law = predicted_Z_distribution(a)
print("tau = -1/B =", law.tau[0, 0], " e =", law.e[0])
print("centred variance", centred_variance(law)[0, 0])
