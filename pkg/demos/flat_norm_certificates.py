"""
Certified flat norms of point-mass cycles
=========================================

"""

# %%
# A cycle here is a finite signed sum of Dirac masses in the cube
# ``[-1, 1]^n`` whose weights add up to zero.  Its flat norm is the cheapest
# way to move the positive part onto the negative part.

from fractions import Fraction as F

import numpy as np

from flatcycle import certify, gnorm, gnorm_1d, line_fill, make_cycle, mass
from flatcycle.generators import random_cycle

t = make_cycle(1, [((F(1),), 2), ((F(0),), -1), ((F(-1),), -1)])
sol = gnorm(t)
print("G(T) =", sol.value)
print("plan:", sol.plan)

# %%
# The solver also returns a potential on the support.  It is 1-Lipschitz
# and pairs with ``T`` to give the same number, which is the certificate.

for x, u in sorted(sol.potentials.items()):
    print(x, round(u, 6))
print([c.name for c in certify(t, sol).checks], certify(t, sol).passed)

# %%
# On the line there is a closed form through the running sum of weights,
# and the optimal filling is a stack of segments.

print(gnorm_1d(t), float(mass(line_fill(t))))

# %%
# Random cycles in three dimensions, rational weights.  The primal and
# dual values should agree to rounding.

gaps = []
for seed in range(20):
    s = gnorm(random_cycle(3, 25, seed=seed, mode="rational"))
    gaps.append(abs(s.value - s.dual_value) / s.value)
print("worst relative gap:", np.max(gaps))
