"""
Estimating the spectral CDF without eigenvalues
===============================================

Counting eigenvalues below a shift needs only the inertia of an LDL^T
factorization. A handful of shifts gives knots of the spectral CDF; a
monotone cubic through them is a cheap warp. For random graphs the limit
laws give a warp with no computation on the graph at all.
"""

# %%
import numpy as np
from scipy import stats

from specframes import graphs, linalg, warping

g = graphs.build_sensor(500, seed=3)
L = graphs.laplacian(g).matrix
S = linalg.SparseSym.from_matrix(L)
lu = linalg.estimate_lambda_upper(S)
est, rep = warping.sliced_cdf(S, lu, Q=12, return_report=True)
lam = np.linalg.eigvalsh(L.toarray())
# The end knots are fixed at 0 and N - 1, so only interior shifts are counted.
inner = rep.shifts_used[1:-1]
print("shifts:", np.round(inner, 3))
print("counts from inertia: ", rep.counts[1:-1])
print("counts from eigvalsh:", np.array([(lam < s).sum() for s in inner]))

# %%
# Compare the interpolated CDF with the exact staircase.
w = warping.interpolate(est, "monotone-cubic")
exact = np.searchsorted(np.sort(lam), lam, side="right") / len(lam)
print("max deviation at eigenvalues:", np.abs(w(lam) - exact).max())

# %%
# Random 3-regular graphs follow McKay's law.
rr = graphs.build_random_regular(1000, 3, seed=0)
lam = np.linalg.eigvalsh(graphs.laplacian(rr).matrix.toarray())
print("McKay KS distance:", stats.kstest(lam, warping.McKayCdf(3)).statistic)

# %%
# Erdos-Renyi graphs: semicircle for the normalized Laplacian, and a free
# convolution of a Gaussian with a semicircle for the combinatorial one.
n, p = 1000, 0.05
er = graphs.build_erdos_renyi(n, p, seed=0)
lam_n = np.linalg.eigvalsh(graphs.laplacian(er, "normalized").matrix.toarray())
lam_c = np.linalg.eigvalsh(graphs.laplacian(er).matrix.toarray())
print("normalized KS:", stats.kstest(lam_n, warping.ErNormalizedCdf(n, p)).statistic)
law = warping.er_combinatorial_cdf(n, p)
print("combinatorial KS:", stats.kstest(lam_c, law).statistic,
      " mass below zero:", law.mass_below_zero)
