# %% [markdown]
# # Special functions
#
# The conditional gain law is driven by the first-order Marcum Q-function.
# `pasim.marcum_q1` sums Poisson-weighted terms inside a numba kernel. Here we
# compare it with scipy's noncentral chi-square survival function, which
# computes the same quantity in a different way.

# %%
import numpy as np
from scipy import stats

from pasim import bessel_i0, bessel_j0, gaussian_q, marcum_q1

# %% [markdown]
# Q1(a, b) = P(X > b^2) for X ~ ncx2(df=2, nc=a^2).

# %%
a = np.linspace(0.0, 20.0, 9)
b = np.linspace(0.0, 20.0, 9)
A, B = np.meshgrid(a, b, indexing="ij")
ours = marcum_q1(A, B)
ref = stats.ncx2.sf(B**2, 2, A**2)
print("max |difference| vs ncx2.sf:", np.max(np.abs(ours - ref)))

# %% [markdown]
# When a = 0 the function reduces to the Rayleigh tail exp(-b^2/2).

# %%
bb = np.array([0.5, 1.0, 2.0, 4.0])
print(marcum_q1(0.0, bb))
print(np.exp(-bb**2 / 2))

# %% [markdown]
# The spatial correlation between predictor and receive antenna is J0(2 pi d / lambda).
# Its first zero, near d = 0.38 lambda, is the point where the prediction stops
# carrying any information.

# %%
for d in (0.0, 0.1, 0.2, 0.3, 0.383):
    print(f"d = {d:.3f} lambda   J0 = {bessel_j0(2 * np.pi * d):+.4f}")

print("I0(50) scaled:", bessel_i0(50.0, scaled=True))
print("Q(0), Q(3):", gaussian_q(0.0), gaussian_q(3.0))
