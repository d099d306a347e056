"""Tribes as the near-extremal example: the empirical exponent log S_eps / log W.

The proven exponent is alpha(eps) eps; for tribes the observed exponent sits
much higher and can be compared with log2(e)/2 = 0.721.

Run:  python demos/04_tribes_tightness.py
"""
import math

from biasedcube import BiasedMeasure, NoiseParams, influence_profile, noise_stability_exact, tribes
from biasedcube.bounds import COMPARISON_EXPONENT, alpha, stability_bound
from biasedcube.families import tribes_size_suggestion

# %% Suggested tribe size for balanced tribes.
for n in (16, 64, 1024):
    print(f"n={n}: suggested r = {tribes_size_suggestion(n, 0.5):.5f}")

# %% Exponents across sizes and noise rates at p = 1/2.
m = BiasedMeasure(0.5)
print(f"{'tribes':>12} {'eps':>5} {'W':>9} {'S_eps':>9} {'exponent':>9} {'alpha eps':>9}")
for n, r in ((8, 2), (12, 3), (16, 4), (20, 5)):
    f = tribes(n, r)
    W = influence_profile(f, m).W
    for eps in (0.1, 0.5):
        S = noise_stability_exact(f, NoiseParams(eps, 0.5))
        assert S <= stability_bound(eps, 0.5, W).value
        print(f"{f'({n},{r})':>12} {eps:5.1f} {W:9.5f} {S:9.5f} {math.log(S) / math.log(W):9.4f} "
              f"{alpha(eps, 0.5) * eps:9.4f}")
print(f"comparison exponent log2(e)/2 = {COMPARISON_EXPONENT:.4f}")
