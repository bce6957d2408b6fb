# # Why the cycle moves like epsilon squared
#
# The feedback field is reversible: (x, y, t) -> (x, -y, -t) turns the
# epsilon-flow into the (-epsilon)-flow and fixes the section {y = 0}.
# A cycle for +epsilon is therefore a cycle for -epsilon at the same point,
# with the opposite stability, so its position is even in epsilon.

from eulertop import PerturbedSystem, find_cycle
from eulertop import catalog

params, c, k = catalog.search_example2_parameters()
system = PerturbedSystem(params, catalog.example2_field(k))
h_star = float(catalog.example2_root(params))

for eps in (5e-3, -5e-3):
    cyc = find_cycle(system.with_epsilon(eps), c, h_star)
    print(f"eps={eps:+g}: section point {cyc.x_star:.12f}, {cyc.classification}")

# Offsets from the first-order prediction and their halving ratios:

offsets = [abs(find_cycle(system.with_epsilon(e), c, h_star).h_num - h_star) for e in (1e-2, 5e-3, 2.5e-3)]
print("offsets", [f"{o:.3e}" for o in offsets])
print("ratios ", [f"{offsets[i] / offsets[i + 1]:.3f}" for i in range(2)])
