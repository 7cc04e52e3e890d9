# %% [markdown]
# # Finite blocklength
#
# With short codewords the normal approximation replaces the outage event with a
# smooth error probability Q((C - r) / sqrt(V / L)). Throughput grows toward the
# outage-based value as L increases.

# %%
from pasim import RngStream, expected_throughput, fbl_average_error, fbl_throughput
from pasim.fbl import CAPACITY, OPTIMAL

P = 100.0
for sigma in (0.1, 0.3, 1.0):
    row = [fbl_throughput(sigma, P, L) for L in (50, 200, 800, 1_000_000)]
    print(f"sigma={sigma}: " + "  ".join(f"{x:.3f}" for x in row),
          f"| outage limit {expected_throughput(sigma, P).value:.3f}")

# %% [markdown]
# Average codeword error at L = 300 for the two speeds used in the figures.
# With rate adaptation, the vehicle closer to the matched speed (124 km/h) sees a
# lower error. If the rate is instead set to the predicted capacity, the ordering
# reverses.

# %%
import math

from pasim.channel import PhysicalConfig, mismatch_distance, sigma_from_distance

phys = PhysicalConfig(2.68e9, 5e-3)
lam = phys.wavelength
for policy in (OPTIMAL, CAPACITY):
    for kmh in (110, 124):
        sigma = sigma_from_distance(mismatch_distance(kmh / 3.6, 5e-3, 1.5 * lam), lam)
        est = fbl_average_error(sigma, P, 300, rate=policy, draws=20_000, rng=RngStream(3))
        print(f"{policy:8s} {kmh} km/h  sigma={sigma:.3f}  error={est.value:.3f} +- {est.std_error:.3f}")
