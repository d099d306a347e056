"""Noise stability: exact values, the two ways to compute them, and sampling.

Run:  python demos/02_noise_stability.py
"""
import numpy as np

from biasedcube import NoiseParams, Oracle, noise_stability_mc, tribes
from biasedcube.families import family_oracle
from biasedcube.influence import (
    dictator_stability, noise_stability_operator, noise_stability_spectral, stability_curve,
)

f = tribes(12, 3)

# %% The spectral sum and the covariance of (f(x), f(y)) give the same number.
for eps in (0.0, 0.1, 0.5, 1.0):
    noise = NoiseParams(eps, 0.5)
    a, b = noise_stability_spectral(f, noise), noise_stability_operator(f, noise)
    print(f"eps={eps:.1f}: spectral {a:.12f}  covariance {b:.12f}  diff {abs(a - b):.1e}")

# %% Stability decreases in eps and is the variance at eps = 0.
eps = np.linspace(0, 1, 6)
print("tribes(12,3) S_eps at p=1/2:", np.round(stability_curve(f, 0.5, eps), 6))

# %% Sampling agrees with the exact value within a few standard errors.
noise = NoiseParams(0.2, 0.5)
exact = noise_stability_spectral(f, noise)
est = noise_stability_mc(Oracle.from_function(f), 12, noise, 200_000, seed=1)
print(f"tribes(12,3) eps=0.2: exact {exact:.5f}, sampled {est.value:.5f} +- {est.stderr:.5f}")

# %% A dictator on a million coordinates: only coordinate 1 is ever sampled.
noise = NoiseParams(0.2, 0.3)
est = noise_stability_mc(family_oracle("dictator", 10**6), 10**6, noise, 100_000, seed=2)
print(f"dictator n=1e6: sampled {est.value:.5f} +- {est.stderr:.5f}, closed form "
      f"{dictator_stability(0.3, 0.2):.5f}")
