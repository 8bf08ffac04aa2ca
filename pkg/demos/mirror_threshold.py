"""Finding the clean-qubit threshold with mirror circuits.

Runs a reduced mirror-circuit sweep for one register count, fits the decay
of the mean fidelity in depth for each number of clean registers, and reports
the smallest count that decays slower than the all-noisy circuit.  A full
sweep is what the ``partialqec mirror`` command does.

    python demos/mirror_threshold.py      # under a minute
"""

from partialqec.experiments.mirror import MirrorConfig, run_mirror
from partialqec.experiments.threshold import decay_rates, find_threshold

n = 10
for frac in (0.0, 1.0):
    cfg = MirrorConfig(n_values=(n,), q=0.01, q_I=frac * 0.01, circuits_per_point=10, seed=1)
    rows = run_mirror(cfg)
    rates = decay_rates(rows, n)
    print(f"q_I = {frac:g} q")
    for n_c in sorted(rates):
        print(f"  n_c={n_c:2d}  decay rate per layer {rates[n_c]:.4f}")
    print(f"  threshold n_c = {find_threshold(rows, n)}\n")

print("With ideal idles the threshold sits at a fixed small count; noisy idles")
print("push it up because noisy registers wait around during encoded gates.")
