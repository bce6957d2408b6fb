# # A root that ignores the field
#
# For A = lam1 x1 x2^2 x3^3, B = lam2 x1^2 x2 x3^3 (completed to a tangent
# field) the first-order function is lam h^2 [alpha beta c^2 + (alpha - beta) h].
# The coefficient lam depends on the field; the positive root does not.

from fractions import Fraction

from eulertop import InertiaParams, melnikov_allspheres
from eulertop import catalog

params = InertiaParams(Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
c = 1
print(params)
print("expected root alpha beta c^2 / (beta - alpha) =", catalog.example1_root(params, c))

for lam1, lam2 in [(1, 2), (-3, 1), (Fraction(1, 7), 5)]:
    spec = catalog.example1_field(lam1, lam2)
    m = melnikov_allspheres(spec.A, spec.B, params, c)
    (h_star, simple), = m.signed_roots()
    lam = m.h_coeffs()[3] / float(params.alpha_q - params.beta_q)
    print(f"lam1={lam1}, lam2={lam2}: root {h_star:.15g}, lam {lam:.6g} "
          f"(formula {catalog.example1_lambda(params, lam1, lam2):.6g})")

# The root sits where the ellipse H = h* no longer fits inside the hemisphere,
# so the admissibility filter rejects it. The report says why.

from eulertop import PerturbedSystem, analyze

print(analyze(PerturbedSystem(params, catalog.example1_field(1, 2)), c).to_text())
