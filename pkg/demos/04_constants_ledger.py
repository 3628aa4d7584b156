"""
The constants ledger
====================

Every constant of the lower-bound argument for a given (m, p), with the
inequalities the argument needs. The compartment length D is in the
hundreds of thousands, which is why the slope and variance constants come
out so small.
"""
from lcsvar import ModelParams, build_ledger, on_probability_lower

print(" m        D            lambda         K             C9")
for m in range(2, 6):
    led = build_ledger(ModelParams(m, 0.5))
    print(f"{m:2d}  {led.D:10d}  {led.lam:.3e}  {led.K:.3e}  {led.C9:.3e}")

led = build_ledger(ModelParams(2, 0.5))
print()
print(led.to_table())

# the O_n probability bound at its threshold, with the two readings of A
n = led.n_On_threshold
print(f"\nat n = {n:.3g}:  A = {led.A:g} gives {on_probability_lower(led, n):.3f};"
      f"  A = max(C4, C5, D) = {led.A_from_constants:g} gives "
      f"{on_probability_lower(led, n, A=led.A_from_constants):.3f}")
