# coding: utf-8

# # Grids, radial functions and volumes
#
# Every computation in `dualbm` happens on a quadrature grid of the unit
# sphere. A star body is stored through its radial function sampled at the
# grid nodes, and volumes become weighted sums.

# In[1]:

import numpy as np

from dualbm import Ball, CapBump, Ellipsoid, HPolytope, dual_mixed_volume, make_grid, sample, volume


# On the circle the grid is uniform. On the 2-sphere it is a Gauss-Legendre
# rule in the polar angle times a uniform rule in azimuth.

# In[2]:

circle = make_grid(2, 64)
sphere = make_grid(3, 64)
print(circle.size, sphere.size)
print(circle.weights.sum() / (2 * np.pi), sphere.weights.sum() / (4 * np.pi))


# The dual mixed volume of n bodies averages the product of their radial
# functions. For unit balls it is the volume of the unit ball.

# In[3]:

B = sample(Ball(1.0), circle)
print(dual_mixed_volume([B, B]), np.pi)


# The ellipsoid with semi-axes (2, 1, 0.5) has volume (4/3) pi abc. Watch the
# quadrature error fall as the grid is refined.

# In[4]:

E = Ellipsoid((2.0, 1.0, 0.5))
exact = 4 / 3 * np.pi * 2.0 * 1.0 * 0.5
for k in (8, 16, 32, 64, 128):
    g = make_grid(3, k)
    print(f"k={k:4d}  error={abs(volume(sample(E, g)) - exact):.3e}")


# A square given by its facets, and a smooth bump living on a cap.

# In[5]:

square = HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])
print("square area", volume(sample(square, make_grid(2, 4096))))

bump = sample(CapBump((1.0, 0.0), np.pi / 6, 1.5), circle)
print("bump is nonzero at", np.count_nonzero(bump.values), "of", circle.size, "nodes")
