# %% [markdown]
# # Rate adaptation and required SNR
#
# For each predictor gain, the transmitter picks the rate that maximizes
# r * P(log(1 + gP) >= r | g_hat). Averaging over g_hat gives the expected
# throughput. It lies between the no-CSIT and full-CSIT references.

# %%
import numpy as np

from pasim import (
    expected_throughput,
    full_csit_throughput,
    no_csit_throughput,
    optimal_rate_given_ghat,
    required_snr,
)
from pasim.experiments import ScenarioConfig, run_fig2_required_snr
from pasim.units import linear_to_db

P = 100.0  # 20 dB
for sigma in (0.0, 0.1, 0.3, 0.6, 1.0):
    print(f"sigma={sigma}: eta = {expected_throughput(sigma, P).value:.4f} npcu")
print(f"no CSIT {no_csit_throughput(P):.4f}, full CSIT {full_csit_throughput(P):.4f}")

# %%
sol = optimal_rate_given_ghat(g_hat=1.0, sigma=0.3, P=P)
print(sol)

# %% [markdown]
# SNR needed for 5 npcu, with the two references shown for comparison.

# %%
print("full CSIT:", linear_to_db(required_snr(5.0, full_csit_throughput)), "dB")
print("no CSIT:  ", linear_to_db(required_snr(5.0, no_csit_throughput)), "dB")

# %% [markdown]
# Sweep speed on a coarse grid. The curve dips to the full-CSIT level at the matched
# speed and rises back toward the no-CSIT level as the mismatch grows. The CLI
# command `pasim fig2-required-snr` runs the same sweep on a 0.25 km/h grid.

# %%
rec = run_fig2_required_snr(ScenarioConfig(speed_grid_kmh=(100, 140, 4)))
for v, s in zip(rec.column("speed_kmh"), rec.column("snr_db_pa")):
    print(f"{v:6.1f} km/h  {s:6.2f} dB  " + "#" * int(2 * (s - 20)))
