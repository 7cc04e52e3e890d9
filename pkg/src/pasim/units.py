"""Unit conversions. All rates are in nats per channel use (npcu)."""

import numpy as np

KMH_PER_MS = 3.6


def _as_float_or_array(out):
    return float(out) if out.ndim == 0 else out


def db_to_linear(x_db):
    return _as_float_or_array(np.power(10.0, np.asarray(x_db, dtype=float) / 10.0))


def linear_to_db(x):
    return _as_float_or_array(10.0 * np.log10(np.asarray(x, dtype=float)))


def kmh_to_ms(v_kmh):
    return v_kmh / KMH_PER_MS


def ms_to_kmh(v_ms):
    return v_ms * KMH_PER_MS
