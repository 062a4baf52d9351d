# coding: utf-8

# # Entropy from repetition times
#
# R_n(x) is the first k >= 1 at which the n-word of the itinerary of x
# reappears.  (1/n) log R_n tends to the entropy of the partition, so the slope
# of median log R_n against n estimates h.

# In[1]:

import math

import numpy as np

from rlab import (
    CircleRotation, ExpandingCircleMap, GridPartition, TorusPoint, cat_map,
    entropy_estimate, repetition_time,
)


# In[2]:

rng = np.random.default_rng(0)
x = TorusPoint.random(rng, 1)
doubling = ExpandingCircleMap(2, seed=3)
print([repetition_time(doubling, x, n, GridPartition(1, 1), 10**6) for n in range(4, 13, 2)])


# For the doubling map with the binary partition the symbols are the digits,
# so R_n is a waiting time for an n-bit word: about 2^n.

# In[3]:

points = [TorusPoint.random(rng, 1) for _ in range(60)]
est = entropy_estimate(doubling, GridPartition(1, 1), range(8, 17, 2), points, 10**7)
print("doubling slope %.3f  (log 2 = %.3f)" % (est.slope, math.log(2)))


# In[4]:

points2 = [TorusPoint.random(rng, 2) for _ in range(60)]
est = entropy_estimate(cat_map(), GridPartition(3, 2), range(6, 12), points2, 10**8)
print("cat slope %.3f  (h = %.3f)" % (est.slope, math.log((3 + math.sqrt(5)) / 2)))
print("median (1/n) log R_n:", np.round(est.median_rate, 3))
print("mean   (1/n) log R_n:", np.round(est.mean_rate, 3))


# A rotation has zero entropy.  log R_n still grows like log n, so its slope
# in n only flattens over long word lengths.

# In[5]:

est = entropy_estimate(CircleRotation(), GridPartition(4, 1), range(32, 129, 16), points, 10**6)
print("rotation slope %.4f" % est.slope)
