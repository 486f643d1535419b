# coding: utf-8

# # Which functionals look like dual mixed volumes?
#
# A multilinear functional on star bodies comes from a single measure exactly
# when it vanishes on tuples containing two essentially disjoint bodies, is
# symmetric, and has an orthogonally additive diagonal polynomial. The harness
# tests the three conditions on random cap bumps.

# In[1]:

import numpy as np

from dualbm import (
    FinitePartition,
    PolyMeasure,
    characterize,
    dual_volume_functional,
    find_violation_witness,
    from_polymeasure,
    make_grid,
    recover_measure_from_polynomial,
)


# In[2]:

g = make_grid(2, 32)
F = dual_volume_functional(g)
report = characterize(F, trials=50)
for check in report["checks"]:
    print(check["name"], check["pass"], check["max_violation"])


# Now plant an off-diagonal entry. The harness flags it and the witness
# search returns two bumps on the offending nodes.

# In[3]:

coarse = make_grid(2, 8)
t = np.diag(np.ones(8))
t[0, 4] = 0.5
G = from_polymeasure(PolyMeasure(t, FinitePartition.node_level(coarse)))
print(characterize(G, trials=200)["pass"])
w = find_violation_witness(G)
print(w.atoms, w.value)


# The diagonal polynomial of the dual volume determines its measure: the
# quadrature weights divided by n.

# In[4]:

rec = recover_measure_from_polynomial(F.polynomial, g)
print(np.allclose(rec.measure, g.weights / 2))
