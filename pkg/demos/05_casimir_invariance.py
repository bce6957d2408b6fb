# # Which perturbations keep the spheres invariant?
#
# A field (A, B, C) preserves every sphere exactly when x1 A + x2 B + x3 C = 0.
# Integrating shows the difference: tangent fields hold |x|^2 to integrator
# precision, a non-tangent one drifts away at once.

import numpy as np

from eulertop import IntegratorConfig, InertiaParams, PerturbedSystem, casimir_drift, integrate
from eulertop import catalog
from eulertop.perturbation import tangency_residual

cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
params = InertiaParams(3, 2, 1)
s0 = np.array([0.3, 0.4, np.sqrt(0.75)])

rng = np.random.default_rng(0)
for name, spec in [("feedback field", catalog.example2_field(1)),
                   ("cross product m=4", catalog.random_cross_product(rng, 4))]:
    print(f"{name}: residual {tangency_residual(*spec.components())}, "
          f"drift over t<=100 {casimir_drift(PerturbedSystem(params, spec, 0.1), s0, 100, cfg):.1e}")

control = catalog.nontangent_control()
print("control residual:", tangency_residual(*control))
tr = integrate(catalog.raw_field(params, control, 0.1), s0, 10, cfg)
print(f"control drift by t=10: {np.max(np.abs(np.sum(tr.y ** 2, axis=0) - s0 @ s0)):.3f}")
