"""
The random insertion chain
==========================

Z(1) = U_1, Z(2) = U_1 U_2, and each later letter is inserted at a
uniform interior position. Every Z(k) is uniform over the m**k strings,
which we confirm exactly for small k and by chi-square for a larger one.
"""
import numpy as np

from lcsvar import ModelParams, SeedSpec, build_chain, exact_chain_law, lcs_profile, materialize
from lcsvar import verify_distribution_identity
from lcsvar.words import word_to_text

params = ModelParams(m=2, p=0.5)
rng = SeedSpec(2019).rng()
chain = build_chain(params, 12, rng)

for k in range(1, 13):
    t = chain.T[k - 1] if k >= 3 else "-"
    print(f"k={k:2d}  T_k={t!s:>2}  Z={word_to_text(materialize(chain, k))}")

# LCS of every prefix of the chain against one Y-word, in a single pass
y = rng.integers(0, 2, 12)
print("\ny =", word_to_text(y))
print("L(k) =", lcs_profile(chain, y).values.tolist())

# exact law of Z(3): eight strings, each with probability 1/8
print("\nZ(3) law:", sorted({word_to_text(z): str(q) for z, q in exact_chain_law(2, 3).items()}.items()))

report = verify_distribution_identity(ModelParams(3, 0.5), 6, 30_000, SeedSpec(7))
print(f"m=3, k=6: chi2={report.chi2:.1f} on {report.dof} dof, p-value {report.p_value:.3f}")
