# coding: utf-8

# # D4: discarding problematic states
#
# For D4 the ground-state transform produces some negative off-diagonal entries at
# q0 = 4/5. Rows with a negative entry are dropped, and the pruning is only valid
# if no retained state can jump into a dropped one.

# In[1]:

from fractions import Fraction

from qcentral.cartan import CartanType
from qcentral.central import central_for
from qcentral.markov import DiscardLeakage, flag_problematic, ground_transform
from qcentral.rep import hamiltonian, vector_rep, verify_central

t = CartanType("D", 4)
rep = vector_rep(t)
C = central_for("D", 4)
print(len(C.element.terms), "terms")
print(verify_central(C, rep, 1).passed)


# Vector representation labels: +k / -k for the weights +eps_k / -eps_k.

# In[2]:

print(rep.labels)


# ## Two sites

# In[3]:

q0 = Fraction(4, 5)
G = ground_transform(hamiltonian(rep, C, 2))
print(G.size, "states;", len(G.at(q0).negative_offdiagonal()), "negative entries at q0")
R = flag_problematic(G, q0)
print("discarded:", R.discarded)
print("retained rows sum to zero:", R.rows_sum_to_zero())


# ## Three sites
#
# Here the discard does not close up: a retained state feeds a discarded one and
# the pruning is refused rather than silently renormalised.

# In[4]:

G3 = ground_transform(hamiltonian(rep, C, 3), q0=q0)
try:
    flag_problematic(G3, q0)
except DiscardLeakage as exc:
    print("leakage:", exc)
