"""
From an arbitrary cycle to a lattice class member
=================================================

"""

# %%
# The lattice class lives on the grid of step ``1/k``: multiplicities are
# integer multiples of ``eps_hat`` and total mass is at most ``k eps``.

from fractions import Fraction as F

from flatcycle import deform, kappa
from flatcycle.generators import random_cycle
from flatcycle.quantize import QuantLattice, check_B_implies_C, minimal_k

lat = QuantLattice(2, 3, F(1, 2))
print("eps_hat =", lat.eps_hat, " mass cap =", lat.mass_cap, " separation >=", lat.separation)

# %%
# Pick ``k`` as small as the mass condition allows, then reduce, snap and
# round.  The reported stages bound the final error, and the error itself
# is re-measured with the transport solver.

t = random_cycle(2, 8, seed=7)
eps = 0.5
kap = kappa(t, eps).value
k = minimal_k(t, eps, kap)
res = deform(t, k, eps)
print("k =", k)
print("stages:", {name: round(v, 4) for name, v in res.stages.items()})
print("G(T - P) =", round(res.error, 4), "<", 3 * eps, " member:", res.member)

# %%
# The converse direction: if some member sits close to ``T`` then ``G``
# plus ``kappa`` at three times the scale is small compared to ``k eps``.

rep = check_B_implies_C(t, k, eps, res.P)
print(rep["holds"], rep.values["lhs"], rep.values["rhs"])
