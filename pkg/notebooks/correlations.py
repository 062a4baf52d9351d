# coding: utf-8

# # Decay of correlations
#
# cov(phi o f^n, psi) under Lebesgue measure, estimated from i.i.d. starting
# points with one shared sample set for every lag.

# In[1]:

import numpy as np

from rlab import CircleRotation, FourierMode, cat_map, decay_classify, decay_profile


# In[2]:

phi = FourierMode((1, 0))
cat = decay_profile(cat_map(), phi, phi, 30, 10**5, seed=0)
print(np.round(cat.cov[:8], 4))
print("above noise floor:", np.flatnonzero(cat.above_floor))
print(decay_classify(cat))


# The cat map kills a single Fourier mode after a few steps: A^T pushes the
# frequency vector off to infinity, so the covariance is exactly zero in
# expectation and only Monte-Carlo noise remains.  Too few lags sit above the
# floor to fit a rate, so the class is "censored".  That is compatible with
# super-polynomial decay.

# In[3]:

rot = CircleRotation()
series = decay_profile(rot, FourierMode((1,)), FourierMode((1,)), 60, 10**5, seed=0)
alpha = rot.alpha / 2.0**64
closed = 0.5 * np.cos(2 * np.pi * series.lags * alpha)
print("max |cov - closed form| / stderr:", np.max(np.abs(series.cov - closed) / series.stderr))
print(decay_classify(series))

# A rotation never mixes, so the classifier reports "none".
