# %% [markdown]
# # The conditional gain law
#
# A vehicle that drives at speed v covers v*T metres during the processing delay T.
# If that distance differs from the antenna separation d_a, the receive antenna
# lands a distance d away from the point where the predictor measured the channel.
# The mismatch is captured by sigma = sqrt(1 - J0(2 pi d / lambda)^2).

# %%
import numpy as np
from scipy import stats

from pasim import (
    ConditionalGainDist,
    PhysicalConfig,
    RngStream,
    conditional_gain_cdf,
    mismatch_distance,
    sample_conditional_gain,
    sample_gain_pair,
    sigma_from_distance,
)

phys = PhysicalConfig(carrier_frequency=2.68e9, processing_time_T=5e-3)
lam = phys.wavelength
v_star = phys.matched_speed(1.5 * lam)
print(f"wavelength {lam * 100:.2f} cm, matched speed {v_star * 3.6:.2f} km/h")

# %%
for kmh in (100, 110, 120.9, 124, 130, 140):
    d = mismatch_distance(kmh / 3.6, phys.processing_time_T, 1.5 * lam)
    print(f"{kmh:6.1f} km/h  d = {d / lam:.3f} lambda  sigma = {sigma_from_distance(d, lam):.3f}")

# %% [markdown]
# Given the predictor gain g_hat, the RA gain is a scaled noncentral chi-square.
# We check the library CDF against samples.

# %%
dist = ConditionalGainDist(g_hat=1.0, sigma=0.5)
g = sample_conditional_gain(dist, RngStream(seed=1), 50_000)
print("KS p-value:", stats.kstest(g, lambda x: conditional_gain_cdf(dist, x)).pvalue)
print("P(g <= 0.5 | g_hat = 1):", conditional_gain_cdf(dist, 0.5))

# %% [markdown]
# Averaged over g_hat, the RA gain remains Exp(1) for every sigma. The prediction
# only changes how much we know about g, not its marginal law.

# %%
for sigma in (0.0, 0.5, 0.9):
    g_hat, g = sample_gain_pair(sigma, RngStream(seed=2, stream_id=int(10 * sigma)), 50_000)
    print(f"sigma={sigma}: mean g_hat {g_hat.mean():.3f}, mean g {g.mean():.3f}, "
          f"corr {np.corrcoef(g_hat, g)[0, 1]:.3f}")
