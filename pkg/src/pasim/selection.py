"""
Velocity-aware receive-antenna selection.

For a known vehicle speed, every RA's mismatch distance follows from its
separation to the PA; each RA is scored by its expected throughput and the
best one is used. Speeds enter the public sweep functions in km/h and are
converted to m/s once.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial

import numpy as np

from .channel import PhysicalConfig, RngStream, mismatch_distance, sigma_from_distance
from .fbl import fbl_throughput
from .rate_adapt import MONTE_CARLO, QUADRATURE, expected_throughput
from .specfun import DomainError
from .units import kmh_to_ms

OUTAGE = "outage"
FBL = "fbl"


class SweepError(RuntimeError):
    """Failure at one speed of a sweep."""

    def __init__(self, speed_kmh, cause):
        super().__init__(speed_kmh, str(cause))
        self.speed_kmh = speed_kmh

    def __str__(self):
        return f"at {self.args[0]} km/h: {self.args[1]}"


@dataclass(frozen=True)
class AntennaArray:
    """PA-to-RA separations in meters, RA index i+1 for entry i."""

    separations: tuple

    def __post_init__(self):
        seps = tuple(float(s) for s in self.separations)
        if not seps:
            raise DomainError("antenna array needs at least one RA")
        if any(not s > 0 for s in seps):
            raise DomainError(f"separations must be positive, got {seps}")
        object.__setattr__(self, "separations", seps)

    @classmethod
    def from_wavelengths(cls, multiples, wavelength: float) -> "AntennaArray":
        return cls(tuple(m * wavelength for m in multiples))

    def __len__(self):
        return len(self.separations)


@dataclass(frozen=True)
class SelectionResult:
    per_antenna_throughput: tuple
    best_index: int
    best_throughput: float

    @classmethod
    def from_throughputs(cls, values) -> "SelectionResult":
        values = tuple(float(v) for v in values)
        # np.argmax returns the first maximum, so ties go to the lowest index
        i = int(np.argmax(values))
        return cls(values, i + 1, values[i])


@dataclass(frozen=True)
class LinkMode:
    """How each RA is scored: outage-limited or finite-blocklength throughput."""

    kind: str = OUTAGE
    codeword_length: int | None = None
    method: str = QUADRATURE
    mc_draws: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (OUTAGE, FBL):
            raise DomainError(f"unknown mode {self.kind!r}")
        if self.kind == FBL and not self.codeword_length:
            raise DomainError("fbl mode needs a codeword length")
        if self.method not in (QUADRATURE, MONTE_CARLO):
            raise DomainError(f"unknown method {self.method!r}")


@lru_cache(maxsize=65536)
def _antenna_throughput(sigma: float, P: float, mode: LinkMode) -> float:
    if mode.kind == FBL:
        return fbl_throughput(sigma, P, mode.codeword_length)
    if mode.method == MONTE_CARLO:
        # the stream depends only on sigma, so results do not depend on evaluation order
        stream = int(np.float64(sigma).view(np.uint64))
        est = expected_throughput(sigma, P, MONTE_CARLO, draws=mode.mc_draws, rng=RngStream(mode.seed, stream))
        return est.value
    return expected_throughput(sigma, P).value


def antenna_sigmas(array: AntennaArray, v: float, phys: PhysicalConfig):
    """Mismatch parameter of every RA at speed ``v`` (m/s)."""
    lam = phys.wavelength
    return [
        sigma_from_distance(mismatch_distance(v, phys.processing_time_T, d_a), lam)
        for d_a in array.separations
    ]


def select_antenna(
    array: AntennaArray,
    v: float,
    phys: PhysicalConfig,
    P: float,
    mode: LinkMode = LinkMode(),
) -> SelectionResult:
    """Pick the RA with the highest expected throughput at speed ``v`` (m/s)."""
    if not isinstance(array, AntennaArray) or len(array) == 0:
        raise DomainError("select_antenna needs a nonempty AntennaArray")
    if not v >= 0:
        raise DomainError(f"speed must be >= 0, got {v}")
    if not P > 0:
        raise DomainError(f"SNR must be positive, got {P}")
    sigmas = antenna_sigmas(array, v, phys)
    return SelectionResult.from_throughputs(_antenna_throughput(s, float(P), mode) for s in sigmas)


def _select_at_kmh(speed_kmh, array, phys, P, mode):
    try:
        return select_antenna(array, kmh_to_ms(speed_kmh), phys, P, mode)
    except Exception as exc:
        raise SweepError(speed_kmh, exc) from exc


def parallel_map(fn, items, jobs: int = 1):
    """Ordered map, optionally over a process pool."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def speed_sweep(
    array: AntennaArray,
    speeds_kmh,
    phys: PhysicalConfig,
    P: float,
    mode: LinkMode = LinkMode(),
    jobs: int = 1,
) -> list:
    """Run the selection at every speed (km/h); output order follows the input."""
    speeds = list(speeds_kmh)
    if not speeds:
        raise DomainError("speed list is empty")
    fn = partial(_select_at_kmh, array=array, phys=phys, P=P, mode=mode)
    return parallel_map(fn, speeds, jobs)


def average_throughput_over_speeds(
    array: AntennaArray,
    speeds_kmh,
    phys: PhysicalConfig,
    P: float,
    mode: LinkMode = LinkMode(),
    jobs: int = 1,
) -> float:
    """Mean best-RA throughput over a uniform speed grid."""
    results = speed_sweep(array, speeds_kmh, phys, P, mode, jobs)
    return float(np.mean([r.best_throughput for r in results]))
