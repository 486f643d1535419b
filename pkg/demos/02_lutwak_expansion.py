# coding: utf-8

# # Volumes of radial sums
#
# The radial sum adds radial functions. The volume of a radial combination
# is a homogeneous polynomial in the scales whose coefficients are dual mixed
# volumes. `lutwak_check` computes both sides.

# In[1]:

import numpy as np

from dualbm import Ball, CapBump, Ellipsoid, RadialSumOf, lutwak_check, make_grid, polarize, sample, volume


# In[2]:

g = make_grid(3, 24)
bodies = [Ball(1.0), Ellipsoid((1.5, 1.0, 0.7)), CapBump((0, 0, 1), np.pi / 5, 2.0)]
lambdas = [0.3, 1.2, 0.8]
report = lutwak_check(bodies, lambdas, g)
print(report)


# The direct side is just the volume of the combined body.

# In[3]:

combo = RadialSumOf(tuple(zip(lambdas, bodies)))
print(volume(sample(combo, g)), report.direct)


# Going the other way, polarization recovers the dual mixed volume from the
# volume alone.

# In[4]:

from dualbm import dual_mixed_volume

fs = [sample(b, g) for b in bodies]
print(polarize(volume, fs), dual_mixed_volume(fs))
