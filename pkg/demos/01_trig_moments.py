# # Trigonometric moments
#
# Every closed-form integral in this package reduces to integrals of
# sin^i(t) cos^j(t) over a full period. They are rational multiples of pi,
# and vanish as soon as one exponent is odd.

from eulertop.melnikov import moment_table, trig_moment

# A few entries, printed in their exact form:

for i, j in [(0, 0), (2, 0), (4, 0), (2, 2), (3, 2), (6, 4)]:
    print(f"W({i},{j}) = {trig_moment(i, j)}")

# The full table up to total degree 6. Only even/even entries survive.

nonzero = [m for m in moment_table(6) if m.rational]
print(f"{len(nonzero)} nonzero moments up to degree 6:")
print(", ".join(f"({m.i},{m.j})->{m}" for m in nonzero))
