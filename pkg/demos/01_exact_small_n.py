"""
Exact laws at tiny n
====================

Full enumeration over every X-word (with the extra letter) and every
Y-word, weighted with exact rationals. The variances sit well under the
Efron-Stein upper bound and grow roughly linearly already at n = 4.
"""
from lcsvar import ModelParams, efron_stein_upper, exact_lc_distribution, exact_mixture_distribution

params = ModelParams(m=2, p=0.5)

# n = 1 by hand: the letters match with probability (1-p)/m = 1/4
dist = exact_lc_distribution(params, 1)
print("n=1 law:", {v: str(q) for v, q in dist.support.items()}, " Var =", dist.variance)

print("\n n   Var LC_n (exact)        float    Var/n   Efron-Stein")
for n in range(1, 5):
    var = exact_lc_distribution(params, n).variance
    print(f"{n:2d}   {str(var):>20s}  {float(var):.4f}   {float(var) / n:.4f}   {efron_stein_upper(params, n):.4f}")

# The same law, assembled from the insertion chain: mix L_n(k) over N ~ Binomial(n, p)
direct = exact_lc_distribution(params, 4)
mixed = exact_mixture_distribution(params, 4)
print("\nmixture over N reproduces LC_4 exactly:", direct.support == mixed.support)
