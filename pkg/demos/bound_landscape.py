"""How much does swapping noisy qubits for encoded ones buy?

Walks through the analytic lower bound on output distinguishability for a
brickwork circuit, first with every qubit noisy, then with a growing number of
clean (encoded) qubits, and prints the clean-qubit count beyond which the
partial setup beats the all-noisy one.

    python demos/bound_landscape.py
"""

import numpy as np

from partialqec.bounds import (BoundParams, all_noisy_lower_bound, clean_threshold, lower_bound,
                               mc_average_tvd, params_layout)

n, L = 20, 4
eps_d = 1e-3
eps_c = eps_d / 100
eps_b = 1 - (1 - eps_d) ** 7  # a noisy qubit sitting through a 7-step encoded gate

base = all_noisy_lower_bound(L, eps_d)
print(f"all-noisy bound, n={n}, L={L}, eps={eps_d}: {base:.4e}\n")
print(" n_c   partial bound   ratio to all-noisy")
for n_c in range(2, 13, 2):
    lb = lower_bound(BoundParams(n, L, n_c, 2, eps_c, eps_d, eps_b))
    print(f"{n_c:4d}   {lb:.4e}      {lb / base:.3f}")

t = clean_threshold(2, eps_c, eps_d, eps_b)
print(f"\nthe ratio passes 1 once n_c exceeds {t:.2f}")

# the bound is a bound: a quick sampled check on a small instance
rng = np.random.default_rng(0)
p = BoundParams.all_noisy(4, 2, 0.05)
mc = mc_average_tvd(4, 2, params_layout(p), 100, rng)
print(f"\nsmall instance (n=4, L=2, eps=0.05): sampled TVD {mc.mean:.3f} +- {mc.se:.3f} "
      f">= bound {lower_bound(p):.4f}")
