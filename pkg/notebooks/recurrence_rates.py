# coding: utf-8

# # Return times on the torus
#
# First return times to shrinking balls grow like r^-k for an ergodic toral
# automorphism of T^k, and like r^-1 for the doubling map.  Everything below
# runs in exact 64-bit fixed point, so "did the orbit come back within r" is an
# integer comparison.

# In[1]:

import numpy as np

from rlab import (
    CircleRotation, ExpandingCircleMap, RadiusGrid, TorusPoint, cat_map,
    recurrence_rate_fit, return_curve,
)
from rlab.errors import InsufficientDataError


# A grid of radii e^-m.  Each radius also carries the exact lattice threshold
# used in the distance comparison.

# In[2]:

grid = RadiusGrid.exponential(3, 7)
print(grid.radii)


# One cat-map return curve.

# In[3]:

rng = np.random.default_rng(0)
x = TorusPoint.random(rng, 2)
curve = return_curve(cat_map(), x, grid, 10**7)
print(curve.tau, curve.censored)


# The fit regresses log tau against log 1/r.  Lower and upper envelopes are
# finite-scale stand-ins for liminf and limsup.

# In[4]:

fit = recurrence_rate_fit(curve)
print("ls %.3f  lower %.3f  upper %.3f  agree %s" % (fit.ls.slope, fit.lower.slope, fit.upper.slope, fit.agree))


# Medians over a few dozen points, for three systems.

# In[5]:

def median_slope(system, grid, k, n_points=40, n_max=10**7):
    slopes = []
    for _ in range(n_points):
        try:
            slopes.append(recurrence_rate_fit(return_curve(system, TorusPoint.random(rng, k), grid, n_max)).ls.slope)
        except InsufficientDataError:
            pass
    return np.median(slopes), len(slopes)

print("cat      ", median_slope(cat_map(), grid, 2))
print("doubling ", median_slope(ExpandingCircleMap(2, seed=1), RadiusGrid.exponential(3, 9), 1))
print("rotation ", median_slope(CircleRotation(), RadiusGrid.exponential(2, 9), 1))

# The rotation also gives slope ~1: isometries return at rate 1/r in dimension
# one even though their entropy vanishes.
