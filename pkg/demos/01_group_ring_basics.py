# coding: utf-8

# # Group rings over Z_n
#
# Elements are sparse dicts from group ids to residues. Here the group is (Z_3)^2.

# In[1]:

from solvtower.group_ring import RingContext, augmentation, render, try_divide, try_inverse
from solvtower.groups import make_abelian

C = RingContext(3, make_abelian(2, 3))
x, y = C.gen(0), C.gen(1)
d = x + y - 1
print("d =", render(d))


# In[2]:

# d is a unit even though it is not of the form +-g; its inverse is a short geometric series.
u = try_inverse(d)
print("inverse:", render(u))
print("check:", render(d * u))
print("sum of (x+y)^i:", render(sum(((x + y) ** i for i in range(3)), C.zero())))


# In[3]:

# 1 - x is a zero divisor, so it has no inverse, but some multiples of it can be divided.
print("inverse of 1-x:", try_inverse(1 - x))
q = try_divide((1 - x) * (x + y), 1 - x)
print("((1-x)(x+y)) / (1-x) =", render(q))


# In[4]:

print("augmentation of x*y - 2:", augmentation(x * y - 2))
