# coding: utf-8

# # Finite polymeasures
#
# On a finite partition a polymeasure of order m is an m-way tensor. Its
# variation sums absolute entries; its semivariation is the largest value the
# multilinear form reaches on sign vectors.

# In[1]:

import numpy as np

from dualbm import PolyMeasure, evaluate, is_diagonal, jordan_decomposition, product_measure, semivariation, variation


# In[2]:

gamma = PolyMeasure(np.array([[1.0, 1.0], [1.0, -1.0]]))
print("variation     ", variation(gamma))
print("semivariation ", semivariation(gamma))


# The randomized mode is a lower bound that scales to tensors too large for
# enumeration.

# In[3]:

rng = np.random.default_rng(3)
big = PolyMeasure(rng.normal(size=(12, 12, 12)))
print(semivariation(big, "randomized", seed=0, samples=2000).value, "<=", variation(big))


# Evaluating on rectangles matches the product measure, and the Jordan parts
# split the variation exactly.

# In[4]:

mu = product_measure(gamma)
print(evaluate(gamma, [[0, 1], [1]]), mu.mass([[0, 1], [1]]))
pos, neg = jordan_decomposition(gamma)
print(variation(pos) + variation(neg) == variation(gamma))


# A diagonal polymeasure vanishes on tuples of distinct atoms.

# In[5]:

print(is_diagonal(PolyMeasure(np.diag([1.0, 2.0, 3.0]))))
print(is_diagonal(gamma))
