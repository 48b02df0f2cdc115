"""
Counting lattice classes
========================

"""

# %%
# ``E(p, q)`` collects the integer vectors of length ``q`` with zero sum and
# absolute sum at most ``p``.  Exact counts come from a double binomial sum,
# checked here against direct enumeration.

import math

from flatcycle.entropy import (
    BoundednessCertificate,
    CountInstance,
    card_pnk,
    count_bruteforce,
    count_exact,
    count_upper,
    covering_bound,
)

for p, q in [(6, 3), (8, 4), (12, 4)]:
    inst = CountInstance(p, q)
    print(p, q, count_exact(inst).exact, count_bruteforce(inst).exact)

# %%
# Two upper bounds, one exact and one logarithmic.

inst = CountInstance(40, 10)
c = count_exact(inst)
bf, bg = count_upper(inst)
print(c.exact, float(bf), round(c.ln_value, 3), round(bg, 3))

# %%
# The class on the grid of step ``1/k`` in dimension ``n`` is a single
# ``E(p, q)``, whatever ``eps`` is.

for k in range(1, 6):
    r = card_pnk(1, k)
    print(k, r.result.exact, round(r.result.ln_value, 2), "<=", round(r.ln_bound, 2))

# %%
# A family with G bounded by ``Gamma`` and a known kappa bound is covered by
# one such class; this gives the grid size and the log of the covering number.

for eps in (1, 0.5, 0.25):
    k, ln_n = covering_bound(1, BoundednessCertificate.constant(1), eps)
    print(eps, k, round(ln_n, 1), round(ln_n / math.log(10)), "decimal digits")
