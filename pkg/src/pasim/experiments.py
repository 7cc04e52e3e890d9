"""
Experiment drivers: one function per figure family, each returning an
``ExperimentRecord`` that serializes to a self-describing CSV.

CSV dialect: comma separated, ``.`` decimals, ``#`` header comments carrying
the resolved configuration, LF line endings. Floats are written with
``repr`` so re-running with the same configuration reproduces the bytes.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from functools import partial

import numpy as np

from . import __version__
from .channel import PhysicalConfig, RngStream, mismatch_distance, sigma_from_distance
from .fbl import CAPACITY, OPTIMAL, fbl_average_error, fbl_throughput
from .rate_adapt import (
    MONTE_CARLO,
    QUADRATURE,
    UnreachableTargetError,
    expected_throughput,
    full_csit_throughput,
    no_csit_throughput,
    required_snr,
)
from .selection import FBL, OUTAGE, AntennaArray, LinkMode, parallel_map, select_antenna
from .units import db_to_linear, kmh_to_ms, linear_to_db

SNR_SEARCH_LO_DB = -10.0
SNR_SEARCH_HI_DB = 60.0

PAPER_ARRAYS = (
    (1.5,),
    (1.6, 1.5, 1.4),
    (1.62, 1.56, 1.5, 1.44, 1.38),
)

FILES = {
    "fig2-required-snr": "fig2_required_snr.csv",
    "fig3-fbl-throughput": "fig3_fbl_throughput.csv",
    "fig4-fbl-error": "fig4_fbl_error.csv",
    "fig5-selection-sweep": "fig5_selection_sweep.csv",
    "fig7-average": "fig7_average.csv",
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNREACHABLE = 3


class ConfigError(ValueError):
    """Invalid scenario configuration."""


def _number(name, value, positive=True, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value}")
    if positive and not (value > 0 or (allow_zero and value == 0)):
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


def _integer(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _number_list(name, value, positive=True, allow_zero=False, nonempty=True):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{name} must be a list, got {value!r}")
    if nonempty and not value:
        raise ConfigError(f"{name} must not be empty")
    return tuple(_number(f"{name}[{i}]", v, positive, allow_zero) for i, v in enumerate(value))


@dataclass(frozen=True)
class ScenarioConfig:
    carrier_frequency: float = 2.68e9
    processing_time_T: float = 5e-3
    propagation_speed: float = 3.0e8
    separations_wavelengths: tuple = (1.5,)
    snr_db: float = 20.0
    target_throughput_npcu: float | None = 5.0
    codeword_length: int | None = 300
    speed_grid_kmh: tuple = (100.0, 140.0, 0.25)
    seed: int = 0
    mode: str = OUTAGE
    mc: bool = False
    mc_selection_draws: int = 10_000
    mc_draws: int = 100_000
    arrays_wavelengths: tuple = PAPER_ARRAYS
    fig6_middle_wavelengths: tuple = (1.4, 1.6)
    fbl_lengths: tuple = (50, 100, 200, 400, 800, 1600)
    fbl_sigmas: tuple = (0.1, 0.3, 0.5)
    fbl_rate_npcu: float | None = None
    fig4_snrs_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    fig4_speeds_kmh: tuple = (110.0, 124.0)
    fig4_rate_policy: str | float = OPTIMAL

    def __post_init__(self):
        set_ = partial(object.__setattr__, self)
        for name in ("carrier_frequency", "processing_time_T", "propagation_speed"):
            set_(name, _number(name, getattr(self, name)))
        set_("separations_wavelengths", _number_list("separations_wavelengths", self.separations_wavelengths))
        set_("snr_db", _number("snr_db", self.snr_db, positive=False))
        if self.target_throughput_npcu is not None:
            set_("target_throughput_npcu", _number("target_throughput_npcu", self.target_throughput_npcu, allow_zero=True))
        if self.codeword_length is not None:
            set_("codeword_length", _integer("codeword_length", self.codeword_length, 1))
        grid = _number_list("speed_grid_kmh", self.speed_grid_kmh, positive=False)
        if len(grid) != 3:
            raise ConfigError("speed_grid_kmh must be [min, max, step]")
        lo, hi, step = grid
        if lo < 0 or hi < lo or step <= 0:
            raise ConfigError(f"speed_grid_kmh needs 0 <= min <= max and step > 0, got {grid}")
        set_("speed_grid_kmh", grid)
        set_("seed", _integer("seed", self.seed, 0))
        if self.seed >= 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.mode not in (OUTAGE, FBL):
            raise ConfigError(f"mode must be 'outage' or 'fbl', got {self.mode!r}")
        if self.mode == FBL and self.codeword_length is None:
            raise ConfigError("mode 'fbl' needs codeword_length")
        if not isinstance(self.mc, bool):
            raise ConfigError(f"mc must be true or false, got {self.mc!r}")
        set_("mc_selection_draws", _integer("mc_selection_draws", self.mc_selection_draws, 2))
        set_("mc_draws", _integer("mc_draws", self.mc_draws, 2))
        if not isinstance(self.arrays_wavelengths, (list, tuple)) or not self.arrays_wavelengths:
            raise ConfigError("arrays_wavelengths must be a nonempty list of lists")
        set_(
            "arrays_wavelengths",
            tuple(_number_list(f"arrays_wavelengths[{i}]", a) for i, a in enumerate(self.arrays_wavelengths)),
        )
        set_(
            "fig6_middle_wavelengths",
            _number_list("fig6_middle_wavelengths", self.fig6_middle_wavelengths, nonempty=False),
        )
        if not isinstance(self.fbl_lengths, (list, tuple)) or not self.fbl_lengths:
            raise ConfigError("fbl_lengths must be a nonempty list")
        set_("fbl_lengths", tuple(_integer(f"fbl_lengths[{i}]", L, 1) for i, L in enumerate(self.fbl_lengths)))
        sigmas = _number_list("fbl_sigmas", self.fbl_sigmas, allow_zero=True)
        if any(s > 1 for s in sigmas):
            raise ConfigError("fbl_sigmas must lie in [0, 1]")
        set_("fbl_sigmas", sigmas)
        if self.fbl_rate_npcu is not None:
            set_("fbl_rate_npcu", _number("fbl_rate_npcu", self.fbl_rate_npcu, allow_zero=True))
        set_("fig4_snrs_db", _number_list("fig4_snrs_db", self.fig4_snrs_db, positive=False))
        set_("fig4_speeds_kmh", _number_list("fig4_speeds_kmh", self.fig4_speeds_kmh, allow_zero=True))
        if isinstance(self.fig4_rate_policy, str):
            if self.fig4_rate_policy not in (OPTIMAL, CAPACITY):
                raise ConfigError(f"fig4_rate_policy must be 'optimal', 'capacity' or a rate, got {self.fig4_rate_policy!r}")
        else:
            set_("fig4_rate_policy", _number("fig4_rate_policy", self.fig4_rate_policy, allow_zero=True))

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, tuple):
                return [plain(x) for x in v]
            return v

        return {k: plain(v) for k, v in asdict(self).items()}

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a flat JSON object")
        return cls.from_dict(data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @property
    def phys(self) -> PhysicalConfig:
        return PhysicalConfig(self.carrier_frequency, self.processing_time_T, self.propagation_speed)

    @property
    def snr(self) -> float:
        return db_to_linear(self.snr_db)

    def speeds_kmh(self):
        lo, hi, step = self.speed_grid_kmh
        n = int(math.floor((hi - lo) / step + 1e-9))
        return [round(lo + i * step, 10) for i in range(n + 1)]

    def link_mode(self) -> LinkMode:
        return LinkMode(
            kind=self.mode,
            codeword_length=self.codeword_length if self.mode == FBL else None,
            method=MONTE_CARLO if self.mc else QUADRATURE,
            mc_draws=self.mc_selection_draws,
            seed=self.seed,
        )


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass
class ExperimentRecord:
    experiment_id: str
    inputs: dict
    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        lines = [f"# experiment: {self.experiment_id}", f"# pasim_version: {__version__}"]
        for key in sorted(self.inputs):
            lines.append(f"# {key}: {json.dumps(self.inputs[key])}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def read_csv(path):
    """Parse a CSV written by ``ExperimentRecord``; returns ``(header_comments, columns, rows)``."""
    comments, rows, columns = [], [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif columns is None:
                columns = tuple(line.split(","))
            elif line:
                rows.append(tuple(line.split(",")))
    return comments, columns, rows


def array_sigma(speed_kmh: float, d_a: float, phys: PhysicalConfig) -> float:
    d = mismatch_distance(kmh_to_ms(speed_kmh), phys.processing_time_T, d_a)
    return sigma_from_distance(d, phys.wavelength)


# --- Fig. 2: required SNR versus speed --------------------------------------


def pa_required_snr_db(speed_kmh: float, cfg: ScenarioConfig):
    """Required SNR (dB) with PA rate adaptation and RA selection at one speed.

    Returns ``(snr_db, unreachable)``; unreachable targets report the upper
    end of the search bracket.
    """
    phys = cfg.phys
    array = AntennaArray.from_wavelengths(cfg.separations_wavelengths, phys.wavelength)
    sigmas = [array_sigma(speed_kmh, d_a, phys) for d_a in array.separations]

    def best_throughput(P):
        return max(expected_throughput(s, P).value for s in sigmas)

    try:
        P = required_snr(cfg.target_throughput_npcu, best_throughput, lo_db=SNR_SEARCH_LO_DB, hi_db=SNR_SEARCH_HI_DB)
    except UnreachableTargetError:
        return SNR_SEARCH_HI_DB, True
    return linear_to_db(P), False


def _baseline_required_snr_db(fn, target):
    try:
        return linear_to_db(required_snr(target, fn, lo_db=SNR_SEARCH_LO_DB, hi_db=SNR_SEARCH_HI_DB)), False
    except UnreachableTargetError:
        return SNR_SEARCH_HI_DB, True


def run_fig2_required_snr(cfg: ScenarioConfig, jobs: int = 1) -> ExperimentRecord:
    if cfg.target_throughput_npcu is None:
        raise ConfigError("fig2-required-snr needs target_throughput_npcu")
    target = cfg.target_throughput_npcu
    full_db, full_unreach = _baseline_required_snr_db(full_csit_throughput, target)
    no_db, no_unreach = _baseline_required_snr_db(no_csit_throughput, target)
    speeds = cfg.speeds_kmh()
    points = parallel_map(partial(pa_required_snr_db, cfg=cfg), speeds, jobs)
    record = ExperimentRecord(
        "fig2-required-snr",
        cfg.to_dict(),
        ("speed_kmh", "snr_db_pa", "snr_db_full_csit", "snr_db_no_csit", "unreachable", "seed"),
    )
    for v, (pa_db, pa_unreach) in zip(speeds, points):
        unreachable = pa_unreach or full_unreach or no_unreach
        record.rows.append((v, pa_db, full_db, no_db, unreachable, cfg.seed))
    return record


# --- Fig. 3: FBL throughput versus codeword length ---------------------------


def _fig3_point(item, P, rate):
    L, sigma = item
    return fbl_throughput(sigma, P, L, rate=rate)


def run_fig3_fbl_throughput(cfg: ScenarioConfig, lengths=None, sigmas=None, jobs: int = 1) -> ExperimentRecord:
    lengths = tuple(cfg.fbl_lengths if lengths is None else lengths)
    sigmas = tuple(cfg.fbl_sigmas if sigmas is None else sigmas)
    if not lengths or not sigmas:
        raise ConfigError("fig3-fbl-throughput needs codeword lengths and sigmas")
    items = [(L, s) for L in lengths for s in sigmas] + [(L, 1.0) for L in lengths]
    values = parallel_map(partial(_fig3_point, P=cfg.snr, rate=cfg.fbl_rate_npcu), items, jobs)
    n_pa = len(lengths) * len(sigmas)
    no_pa = dict(zip(lengths, values[n_pa:]))
    record = ExperimentRecord(
        "fig3-fbl-throughput",
        cfg.to_dict(),
        ("L", "sigma", "throughput_npcu_pa", "throughput_npcu_no_pa", "seed"),
    )
    for (L, s), value in zip(items[:n_pa], values[:n_pa]):
        record.rows.append((L, s, value, no_pa[L], cfg.seed))
    return record


# --- Fig. 4: FBL average error versus SNR ------------------------------------


def _fig4_point(item, cfg):
    stream, speed_kmh, snr_db = item
    phys = cfg.phys
    sigma = array_sigma(speed_kmh, cfg.separations_wavelengths[0] * phys.wavelength, phys)
    est = fbl_average_error(
        sigma,
        db_to_linear(snr_db),
        cfg.codeword_length,
        rate=cfg.fig4_rate_policy,
        draws=cfg.mc_draws,
        rng=RngStream(cfg.seed, stream),
    )
    return est.value, est.std_error


def run_fig4_fbl_error(cfg: ScenarioConfig, snrs_db=None, speeds_kmh=None, jobs: int = 1) -> ExperimentRecord:
    if cfg.codeword_length is None:
        raise ConfigError("fig4-fbl-error needs codeword_length")
    snrs = tuple(cfg.fig4_snrs_db if snrs_db is None else snrs_db)
    speeds = tuple(cfg.fig4_speeds_kmh if speeds_kmh is None else speeds_kmh)
    items = [(i, v, s) for i, (v, s) in enumerate((v, s) for v in speeds for s in snrs)]
    values = parallel_map(partial(_fig4_point, cfg=cfg), items, jobs)
    record = ExperimentRecord(
        "fig4-fbl-error",
        cfg.to_dict(),
        ("snr_db", "speed_kmh", "avg_error", "mc_std_err", "seed"),
    )
    for (_, v, s), (err, se) in zip(items, values):
        record.rows.append((s, v, err, se, cfg.seed))
    return record


# --- Figs. 5-7: antenna selection -------------------------------------------


def default_arrays(cfg: ScenarioConfig):
    """Configured arrays plus, for every multi-RA array, copies whose middle RA
    sits at each of ``fig6_middle_wavelengths`` (spacing kept)."""
    lam = cfg.phys.wavelength
    arrays = []
    for multiples in cfg.arrays_wavelengths:
        arrays.append((f"ra{len(multiples)}", AntennaArray.from_wavelengths(multiples, lam)))
    for multiples in cfg.arrays_wavelengths:
        if len(multiples) < 2:
            continue
        middle = float(np.median(multiples))
        for d_am in cfg.fig6_middle_wavelengths:
            shifted = tuple(m - middle + d_am for m in multiples)
            arrays.append((f"ra{len(multiples)}_dam{d_am:.2f}", AntennaArray.from_wavelengths(shifted, lam)))
    return arrays


def _fig5_point(item, cfg):
    _, array, speed_kmh = item
    return select_antenna(array, kmh_to_ms(speed_kmh), cfg.phys, cfg.snr, cfg.link_mode())


def run_fig5_fig6_fig7_selection(cfg: ScenarioConfig, arrays=None, jobs: int = 1):
    """Selection sweep over speeds for every array; returns ``(sweep, summary)`` records."""
    arrays = default_arrays(cfg) if arrays is None else list(arrays)
    if not arrays:
        raise ConfigError("need at least one antenna array")
    speeds = cfg.speeds_kmh()
    items = [(aid, arr, v) for aid, arr in arrays for v in speeds]
    results = parallel_map(partial(_fig5_point, cfg=cfg), items, jobs)
    sweep = ExperimentRecord(
        "fig5-selection-sweep",
        cfg.to_dict(),
        ("array_id", "speed_kmh", "best_index", "best_throughput_npcu", "seed"),
    )
    for (aid, _, v), res in zip(items, results):
        sweep.rows.append((aid, v, res.best_index, res.best_throughput, cfg.seed))
    no_csit = no_csit_throughput(cfg.snr)
    summary = ExperimentRecord(
        "fig7-average",
        cfg.to_dict(),
        ("array_id", "n_antennas", "average_throughput_npcu", "no_csit_average", "seed"),
    )
    for k, (aid, arr) in enumerate(arrays):
        block = results[k * len(speeds):(k + 1) * len(speeds)]
        avg = float(np.mean([r.best_throughput for r in block]))
        summary.rows.append((aid, len(arr), avg, no_csit, cfg.seed))
    return sweep, summary


# --- output -----------------------------------------------------------------


def write_outputs(records, cfg: ScenarioConfig, out_dir, command: str) -> dict:
    """Write CSVs and ``manifest.json``; returns the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for record in records:
        name = FILES[record.experiment_id]
        record.write(os.path.join(out_dir, name))
        files.append(name)
    manifest = {
        "command": command,
        "pasim_version": __version__,
        "files": files,
        "config": cfg.to_dict(),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def has_unreachable(records) -> bool:
    for record in records:
        if "unreachable" in record.columns and any(record.column("unreachable")):
            return True
    return False


def run_experiment(command: str, cfg: ScenarioConfig, jobs: int = 1) -> list:
    if command == "fig2-required-snr":
        return [run_fig2_required_snr(cfg, jobs=jobs)]
    if command == "fig3-fbl-throughput":
        return [run_fig3_fbl_throughput(cfg, jobs=jobs)]
    if command == "fig4-fbl-error":
        return [run_fig4_fbl_error(cfg, jobs=jobs)]
    if command in ("fig5-selection-sweep", "fig7-average"):
        sweep, summary = run_fig5_fig6_fig7_selection(cfg, jobs=jobs)
        return [sweep, summary] if command == "fig5-selection-sweep" else [summary]
    if command == "reproduce-all":
        records = [
            run_fig2_required_snr(cfg, jobs=jobs),
            run_fig3_fbl_throughput(cfg, jobs=jobs),
            run_fig4_fbl_error(cfg, jobs=jobs),
        ]
        records.extend(run_fig5_fig6_fig7_selection(cfg, jobs=jobs))
        return records
    raise ConfigError(f"unknown experiment {command!r}")
