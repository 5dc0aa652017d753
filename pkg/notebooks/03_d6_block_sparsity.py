# coding: utf-8

# # D6: the 275-dimensional weight block
#
# The central element of U_q(so12) from the vector representation needs one
# weight block per root-lattice difference of two vector weights. The biggest is
# 2 eps_1 = (2,2,2,2,1,1) in simple-root coordinates, with 275 PBW monomials.
# This takes about half a minute.

# In[1]:

import time

from qcentral.cartan import CartanType, build_root_data, kostant_count
from qcentral.pbw import build_weight_block

rd = build_root_data(CartanType("D", 6))
mu = (2, 2, 2, 2, 1, 1)
print(kostant_count(rd.positive_roots, mu))

t0 = time.perf_counter()
wb = build_weight_block(rd, mu)
print(f"{time.perf_counter() - t0:.1f}s")


# The pairing on the PBW basis is certified diagonal by checking B^T M B against
# the Gram matrix of the standard words, computed directly.

# In[2]:

print(wb.stats["diagonal_check"])
print(wb.stats["nnz"], wb.stats["nnz_inverse"], f"{wb.stats['nnz_fraction']:.3f}")


# Nonzeros per column of B. The word basis is chosen greedily in lex order. Some
# words expand into a single PBW monomial, a few into close to 200.

# In[3]:

from collections import Counter

cols = Counter(j for r in wb.B.rows.values() for j in r)
hist = Counter(cols.values())
for k in sorted(hist):
    print(k, hist[k])


# Entries of B are Laurent polynomials with small integer coefficients.

# In[4]:

vals = [v for r in wb.B.rows.values() for v in r.values()]
print(max(v.max_abs_coeff() for v in vals), sum(v.is_laurent() for v in vals), len(vals))
