# coding: utf-8

# # An IA automorphism that is not inner
#
# sigma is given by the Magnus images x -> (x | y t1 + (1-x) t2) and y -> (y | (1-y) t1 + x t2).
# Both images have the same abelianization as the generators they replace.
# Inner automorphisms have determinant +-g; sigma has determinant x+y-1.

# In[1]:

from solvtower import automorphism as aut
from solvtower.group_ring import render
from solvtower.tower import build_level

for n in (2, 3):
    level = build_level(2, 2, n)
    rep = aut.sigma_report(level)
    print(f"n={n}:", {k: rep[k] for k in ("is_auto", "is_ia", "det", "is_inner")})


# In[2]:

# At n = 2 the group of automorphisms reachable from the standard lifts is small enough to close up.
level = build_level(2, 2, 2)
closure = aut.generate_aut_prime(level)
rep = aut.out_kernel_comparison(closure)
print("closure size:", rep["aut_prime_order"])
print("inner automorphisms:", rep["inn_order"])
print("outer part:", rep["out_prime_order"], "vs GL'_2(Z_4):", rep["glprime_order"])
print("every IA automorphism in the closure is inner:", rep["ia_prime_equals_inn"])


# In[3]:

# sigma itself is not in this closure: it comes from outside the standard lifts.
s = aut.sigma_example(level)
print("sigma in closure:", s.key in closure.keys())
print("det of a few closure members:", [render(r.det_ring) for r in closure.records[:6]])
