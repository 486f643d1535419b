# coding: utf-8

# # Rotation invariance pins the measure down
#
# A diagonal functional whose measure is invariant under a group of rotations
# acting transitively on the grid is a constant times the dual mixed volume.

# In[1]:

import numpy as np

from dualbm import cyclic_rotations, from_measure, make_grid, reduce_rotation_invariant, rotation_2d
from dualbm.exceptions import InvarianceError, TransitivityError


# In[2]:

g = make_grid(2, 32)
F = from_measure(3.0 * g.weights / 2, g, 2)
print(reduce_rotation_invariant(F, cyclic_rotations(g)))


# A single perturbed node breaks invariance, and the orbit exposes it.

# In[3]:

mu = g.weights / 2
mu[5] += 1e-3
try:
    reduce_rotation_invariant(from_measure(mu, g, 2), cyclic_rotations(g))
except InvarianceError as exc:
    print("node", exc.node, "residual", exc.residual)


# A half-turn alone does not act transitively, so no conclusion is drawn.

# In[4]:

try:
    reduce_rotation_invariant(F, [rotation_2d(np.pi)])
except TransitivityError as exc:
    print(exc)
