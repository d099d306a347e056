"""Fourier-Walsh spectra on the p-biased cube.

Run:  python demos/01_biased_spectrum.py
"""
import numpy as np

from biasedcube import (
    BiasedMeasure, CubeFunction, dictator, influence_profile, inverse_transform, parity, transform,
    tribes,
)
from biasedcube.families import TribesSpec, tribes_level_coefficient

np.set_printoptions(precision=5, suppress=True)

# %% A dictator has all of its variance on one first-level coefficient.
m = BiasedMeasure(0.3)
s = transform(dictator(2, 1), m)
print("dictator x1 at p=0.3, coefficients by mask:", s.coeffs)
print("level weights:", s.level_weights())

# %% Parity keeps its mass at the top level only when p = 1/2.
for p in (0.5, 0.2):
    lw = transform(parity(4, range(1, 5)), BiasedMeasure(p)).level_weights()
    print(f"parity on 4 bits, p={p}: level weights {lw}")

# %% The transform is invertible and preserves the L2 norm.
rng = np.random.default_rng(0)
f = CubeFunction(rng.uniform(-1, 1, 1 << 10))
s = transform(f, m)
err = np.max(np.abs(inverse_transform(s).values - f.values))
energy = float(np.dot(m.weights(10), f.values**2))
print(f"random f on 10 bits: roundtrip error {err:.2e}, Parseval defect {abs(s.total_weight() - energy):.2e}")

# %% Tribes: same-tribe coefficients follow a closed form.
spec = TribesSpec(8, 2)
s = transform(tribes(8, 2), BiasedMeasure(0.5))
for d in (1, 2):
    mask = (1 << d) - 1
    print(f"tribes(8,2) d={d}: transform {s.coeffs[mask]:.8f}, closed form "
          f"{tribes_level_coefficient(spec, 0.5, d):.8f}")
prof = influence_profile(tribes(8, 2), BiasedMeasure(0.5))
print("tribes(8,2) influences:", prof.influences, "W =", round(prof.W, 10))
