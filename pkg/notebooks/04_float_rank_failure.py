# coding: utf-8

# # Why floating point is not enough
#
# The old approach evaluated the Gram matrix of all words at a few numeric values
# of q and read the block dimension off a numerical rank. At a few significant
# digits the D4 block of weight 2 eps_1 loses rank. The exact count does not move.

# In[1]:

from qcentral.bench import legacy_float_rank, report_markdown
from qcentral.cartan import CartanType

t = CartanType("D", 4)
rows = [legacy_float_rank(t, (2, 2, 1, 1), precision=p) for p in (3, 4, 5, 6, 8, 12)]
print(report_markdown([], rows))


# Per-sample ranks at 4 digits. Samples close to q = 1 are the worst, since the
# pairing degenerates there.

# In[2]:

r = rows[1]
print(list(zip(r["samples"], r["numeric_rank_per_sample"])))


# A small block for contrast: two words, no trouble at any reasonable precision.

# In[3]:

print(legacy_float_rank(CartanType("A", 2), (1, 1), precision=4)["discrepancy"])
