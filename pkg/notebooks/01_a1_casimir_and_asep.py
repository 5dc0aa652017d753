# coding: utf-8

# # A1: the quantum Casimir and the two-species exchange chain
#
# The smallest case, end to end. We build the central element of U_q(sl2) from the
# vector representation, check it against the textbook Casimir, and turn the
# nearest-neighbour bond sum on three sites into a continuous-time Markov chain.

# In[1]:

from fractions import Fraction

from qcentral.cartan import CartanType
from qcentral.central import central_for
from qcentral.markov import flag_problematic, ground_transform, simulate, three_sigma_ok
from qcentral.rep import hamiltonian, vector_rep, verify_central

t = CartanType("A", 1)
rep = vector_rep(t)
C = central_for("A", 1)


# Terms are keyed by (F-word, K-exponent, E-word); K exponents are in the epsilon basis.

# In[2]:

for (f, k, e), c in sorted(C.element.terms.items()):
    print(f"{c}  *  F{list(f)} K{k} E{list(e)}")


# Centrality is a commutator check on tensor powers, exact in Q(q).

# In[3]:

for L in (1, 2, 3):
    print(L, verify_central(C, rep, L).passed)


# ## From Hamiltonian to generator
#
# H is the sum of the two-site coproduct over neighbouring bonds. The highest state
# is an eigenvector; shifting by its eigenvalue and conjugating with the ground
# state gives a matrix with zero row sums.

# In[4]:

H = hamiltonian(rep, C, 3)
G = ground_transform(H)
print(G.states)
for i, j, r in G.transitions():
    print(G.states[i], "->", G.states[j], r)


# At q0 = 4/5 every rate is positive, so nothing is discarded.

# In[5]:

q0 = Fraction(4, 5)
R = flag_problematic(G, q0)
print(R.discarded, R.rows_sum_to_zero())


# ## Sampling
#
# A long trajectory. For each jump type the observed count should sit within
# three Poisson standard deviations of rate times holding time.

# In[6]:

tr = simulate(R, 5000.0, seed=11, start="011")
occ = tr.occupation_times()
counts = tr.jump_counts()
for i, j, r in R.transitions():
    n = counts.get((i, j), 0)
    print(R.states[i], R.states[j], n, round(float(r) * occ[i], 1), three_sigma_ok(n, float(r), occ[i]))

print(tr.heights_csv().splitlines()[:5])
