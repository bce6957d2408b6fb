# # How many cycles can a semisphere perturbation produce?
#
# For data of degree n in (x1, x2), I(h) = sqrt(h) times a polynomial whose
# positive roots number at most (n - 1) // 2. We sample random specs, then
# build specs that reach the bound.

import numpy as np

from eulertop import melnikov_semisphere
from eulertop import catalog
from eulertop.melnikov import count_bound_semisphere

rng = np.random.default_rng(2024)
worst = {}
for _ in range(200):
    n = int(rng.integers(2, 10))
    params = catalog.random_params(rng)
    spec = catalog.random_semisphere(rng, n, 1)
    m = melnikov_semisphere(spec.P, spec.Q, params, 1)
    if not m.is_zero():
        worst[n] = max(worst.get(n, 0), len(m.roots()))
for n in sorted(worst):
    print(f"n={n}: most roots seen {worst[n]}, bound {count_bound_semisphere(n)}")

# Random data rarely saturates the bound. Planting the roots does.

for n in range(2, 8):
    params = catalog.random_params(rng)
    spec, planted = catalog.sharp_semisphere(n, params, 1)
    m = melnikov_semisphere(spec.P, spec.Q, params, 1)
    found = sorted(h for h, _ in m.signed_roots())
    print(f"n={n}: bound {count_bound_semisphere(n)}, roots {[round(h, 6) for h in found]}")
