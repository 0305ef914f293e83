# coding: utf-8

# # Enumerating levels of the tower
#
# Each level is a finite group of 2x2 Magnus matrices over the group ring of the level below.

# In[1]:

from solvtower.groups import SizeCapError
from solvtower.tower import abelianization, build_level, derived_subgroup, element_order, predicted_order_expr

for m, r, n in [(2, 1, 4), (3, 1, 2), (2, 2, 2), (2, 2, 3)]:
    level = build_level(m, r, n)
    print(f"m={m} r={r} n={n}: order {level.order} ({predicted_order_expr(m, r, n)})")


# In[2]:

level = build_level(2, 2, 2)
g = level.group
print("generator orders:", [element_order(level, k) for k in g.generators])
print("abelianization:", abelianization(level).invariant_factors)
print("derived subgroup size:", derived_subgroup(level).size)


# In[3]:

# Elements are integer ids; their Magnus matrices and shortest words are kept alongside.
c = g.commutator(*g.generators)
print("commutator id", c, "as a word:", g.word(c))
print("as a Magnus element:", g.element(c))


# In[4]:

# The next level up is far too large to enumerate; the builder says so instead of trying.
try:
    build_level(2, 3, 2)
except SizeCapError as exc:
    print("refused:", exc)
