"""Experiment configuration: flat key-value text with section headers.

The format is INI-style ('#' comments, UTF-8); every run is a deterministic
function of its configuration, so configs are the reproducibility unit.
The Cauchy time is pinned to t0 = 1 and cannot be configured.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .evolution import DataParams
from .propagators import T0
from .spectral import SpectralGrid

EXPERIMENTS = ("smoke", "reference", "decay", "cascade", "dichotomy",
               "theta-growth", "identity", "convergence")

__all__ = ["ExperimentConfig", "ConfigError", "EXPERIMENTS"]


class ConfigError(ValueError):
    """Invalid configuration, with a pointer to the offending key."""


@dataclass
class ExperimentConfig:
    experiment: str
    grid: SpectralGrid
    data: DataParams
    t_end: float
    dt: float
    snapshot_stride: int = 1
    binary_stride: int = 0          # 0 disables binary snapshots
    # analysis parameters; defaults follow the fixed exponent choices
    p: float = 0.75
    p1: float = 0.1
    delta: float = 0.1
    c_e: float = None               # defaults to delta
    d_e: float = None               # defaults to -delta
    k_lo: int = -8
    k_hi: int = 0
    ds: float = 0.1
    xi_table: tuple = (0.0, 0.5, 2.0)
    fit_t_min: float = 8.0
    fit_t_max: float = None   # None: end of the run
    theta_l: float = 4608.0         # lattice half-width for long-horizon phase work
    theta_t_max: float = 4096.0

    def __post_init__(self):
        if self.c_e is None:
            self.c_e = self.delta
        if self.d_e is None:
            self.d_e = -self.delta
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"expected one of {EXPERIMENTS}")
        if not (self.c_e > 0 and self.d_e < 0):
            raise ConfigError("need c_e > 0 and d_e < 0")
        if self.t_end <= T0:
            raise ConfigError(f"t_end must exceed t0 = {T0}")

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        read = cp.read(path)
        if not read:
            raise ConfigError(f"{path}: unreadable config")

        def need(section, key, cast=float):
            try:
                return cast(cp.get(section, key))
            except (configparser.NoSectionError, configparser.NoOptionError) as exc:
                raise ConfigError(f"{path}: missing [{section}] {key}") from exc
            except ValueError as exc:
                raise ConfigError(f"{path}: bad value for [{section}] {key}") from exc

        def opt(section, key, default, cast=float):
            if cp.has_option(section, key):
                return cast(cp.get(section, key))
            return default

        try:
            grid = SpectralGrid(L=need("grid", "l"), N=need("grid", "n", int),
                                dealias_fraction=opt("grid", "dealias", 2.0 / 3.0))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        data = DataParams(
            amplitude=need("data", "eps"),
            radius_n=opt("data", "radius_n", 1.5),
            radius_e=opt("data", "radius_e", 1.5),
            moment=opt("data", "moment", 0.3),
            n0_amplitude=opt("data", "n0_amplitude", 1.0),
            n1_divergence=opt("data", "n1_divergence", False,
                              lambda s: s.strip().lower() in ("1", "true", "yes")),
        )
        if cp.has_option("time", "t0") and abs(float(cp.get("time", "t0")) - T0) > 1e-12:
            raise ConfigError(f"{path}: t0 is fixed at {T0}")
        xi_table = tuple(
            float(v) for v in opt("analysis", "xi_table", "0,0.5,2.0", str).split(","))
        cfg = cls(
            experiment=need("experiment", "name", str).strip(),
            grid=grid,
            data=data,
            t_end=need("time", "t_end"),
            dt=need("time", "dt"),
            snapshot_stride=opt("time", "snapshot_stride", 1, int),
            binary_stride=opt("time", "binary_stride", 0, int),
            p=opt("analysis", "p", 0.75),
            p1=opt("analysis", "p1", 0.1),
            delta=opt("analysis", "delta", 0.1),
            c_e=opt("analysis", "c_e", None),
            d_e=opt("analysis", "d_e", None),
            k_lo=opt("analysis", "k_lo", -8, int),
            k_hi=opt("analysis", "k_hi", 0, int),
            ds=opt("analysis", "ds", 0.1),
            xi_table=xi_table,
            fit_t_min=opt("analysis", "fit_t_min", 8.0),
            fit_t_max=opt("analysis", "fit_t_max", None),
            theta_l=opt("analysis", "theta_l", 4608.0),
            theta_t_max=opt("analysis", "theta_t_max", 4096.0),
        )
        return cfg

    def require_box(self):
        """L >= data radius + flight time + 2 (speeds are at most one)."""
        radius = 4.0 * max(self.data.radius_n, self.data.radius_e)
        bound = radius + (self.t_end - T0) + 2.0
        if self.grid.L < bound:
            raise ConfigError(
                f"box too small: L={self.grid.L} < {bound} = radius + T - t0 + 2")
