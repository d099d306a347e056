"""How far below the level-weight and stability bounds do concrete functions sit?

Run:  python demos/03_level_weight_bounds.py
"""
import math

from biasedcube import (
    BiasedMeasure, check_decoupled_theorem, check_level_weight_lemma, check_stability_theorem,
    random_low_influence, tribes,
)
from biasedcube.bounds import alpha, hypercontractivity_constant

# %% B(p) grows as the measure becomes skewed, loosening every bound.
for p in (0.5, 0.3, 0.1, 0.01):
    print(f"B({p}) = {hypercontractivity_constant(p):.6f}   alpha(0.1) = {alpha(0.1, p):.5f}")

# %% Level-d weight of tribes against the bound driven by W.
m = BiasedMeasure(0.5)
for n, r in ((12, 3), (16, 4), (20, 5)):
    f = tribes(n, r)
    for d in (2, 3):
        rep = check_level_weight_lemma(f, m, d, f"tribes({n},{r})")
        state = "applies" if rep.hypothesis_met else "hypothesis fails"
        print(f"tribes({n},{r}) d={d}: lhs {rep.lhs:.3e}  rhs {rep.rhs:.3e}  ({state})")

# %% Low-influence random functions at a skewed bias.
m = BiasedMeasure(0.2)
for seed in range(3):
    f = random_low_influence(10, math.exp(-4), seed, p=0.2)
    lw = check_level_weight_lemma(f, m, 2)
    st = check_stability_theorem(f, m, 0.3)
    print(f"seed {seed}: W={lw.parameters['W']:.2e}  level-2 {lw.lhs:.2e} <= {lw.rhs:.2e}  "
          f"S_0.3 {st.lhs:.2e} <= {st.rhs:.2f}")

# %% The decoupled version for a pair of functions.
f = random_low_influence(8, math.exp(-4), 10)
g = random_low_influence(8, math.exp(-4), 11)
print(check_decoupled_theorem(f, g, BiasedMeasure(0.5), 2).summary())
