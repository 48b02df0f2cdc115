"""
Mass at scale
=============

"""

# %%
# ``kappa(T, eps)`` asks for the lightest cycle within flat distance ``eps``
# of ``T``.  For a dipole of weight ``w`` over distance ``L`` the answer is
# ``2w - 2 eps / L`` until it reaches zero.

from flatcycle import kappa, kappa_curve
from flatcycle.generators import dipole, harmonic
from flatcycle.kappa import curve_report
from flatcycle.transport import gnorm

t = dipole((-1.0,), (1.0,), 1.5)
for e in (0.5, 1.0, 2.0, 3.0):
    print(e, kappa(t, e).value)

# %%
# The harmonic truncation puts ``J`` unit dipoles of shrinking length at the
# origin.  Its mass ``2J`` grows linearly while G stays bounded, and kappa
# at a fixed scale grows much more slowly than the mass.

for J in (2, 4, 8, 16):
    h = harmonic(J, 1, "float")
    print(J, 2 * J, round(gnorm(h).value, 4), [round(kappa(h, e).value, 3) for e in (0.05, 0.2, 0.5)])

# %%
# As a function of ``eps`` the curve is non-increasing and convex.

h = harmonic(8, 1, "float")
curve = kappa_curve(h, [0.05 * j for j in range(1, 9)])
print([round(c.value, 4) for c in curve])
print(curve_report(curve).passed)
