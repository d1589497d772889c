"""The typed view over a resolved configuration."""

from __future__ import annotations

import configparser
from pathlib import Path
from typing import Any, Callable, Iterator

from ..constants import (
    DEFAULT_EPISODES,
    MIN_GRID_POINTS,
    PROFILES,
    RAND_WINDOW_DIVISOR,
    TRAIN_WINDOW_DIVISOR,
    GradForm,
    Variant,
)
from ..typing import StrPath
from ..utils.exceptions import ConfigurationError

__all__ = ["RunConfig"]


def _to_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "yes", "true", "on"):
        return True
    if lowered in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _int_tuple(value: str) -> tuple[int, ...]:
    return tuple(int(v) for v in value.split(",") if v.strip())


def _float_tuple(value: str) -> tuple[float, ...]:
    return tuple(float(v) for v in value.split(",") if v.strip())


def _format(value: Any) -> str:
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    if isinstance(value, (Variant, GradForm)):
        return value.value
    return str(value)


# option -> (section, parser from string)
_OPTIONS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "profile": ("CLI", str),
    "variant": ("CLI", Variant),
    "seed": ("CLI", int),
    "out": ("CLI", str),
    "episodes": ("CLI", int),
    "checkpoint_every": ("CLI", int),
    "stop_on_plateau": ("CLI", _to_bool),
    "progress_bar": ("CLI", _to_bool),
    "coarse": ("grid", int),
    "fine": ("grid", int),
    "side": ("grid", float),
    "re": ("flow", float),
    "dt": ("flow", float),
    "t_final": ("flow", float),
    "dns_substeps": ("flow", int),
    "kappa_peak": ("initial", float),
    "total_energy": ("initial", float),
    "initial_seed": ("initial", int),
    "alpha": ("reward", float),
    "alpha_res": ("reward", float),
    "alpha_grad": ("reward", float),
    "alpha_energy": ("reward", float),
    "alpha_enstrophy": ("reward", float),
    "grad_form": ("reward", GradForm),
    "gamma": ("agent", float),
    "learning_rate": ("agent", float),
    "hidden_layers": ("agent", _int_tuple),
    "batch_size": ("agent", int),
    "max_grad_norm": ("agent", float),
    "target_update_factor": ("agent", int),
    "replay_capacity": ("agent", int),
    "epsilon_start": ("agent", float),
    "epsilon_end": ("agent", float),
    "exploration_fraction": ("agent", float),
    "plateau_window": ("agent", int),
    "plateau_tolerance": ("agent", float),
    "snapshot_times": ("eval", _float_tuple),
    "spectrum_k": ("eval", _int_tuple),
}

# keys whose name in the file differs from the attribute
_FILE_KEYS = {"initial_seed": "seed"}


class RunConfig:
    """Every setting of a run, resolved from defaults, profile, file and flags.

    Values are plain attributes, also reachable with dict-like access::

        config.re
        config["re"]

    The resolution order is :meth:`digest_parser` on the packaged defaults,
    :meth:`apply_profile`, :meth:`digest_parser` on the user file, then
    :meth:`digest_args` for explicit command line flags.
    """

    profile: str
    variant: Variant
    seed: int
    out: str
    episodes: int
    checkpoint_every: int
    stop_on_plateau: bool
    progress_bar: bool
    coarse: int
    fine: int
    side: float
    re: float
    dt: float
    t_final: float
    dns_substeps: int
    kappa_peak: float
    total_energy: float
    initial_seed: int
    alpha: float
    alpha_res: float
    alpha_grad: float
    alpha_energy: float
    alpha_enstrophy: float
    grad_form: GradForm
    gamma: float
    learning_rate: float
    hidden_layers: tuple[int, ...]
    batch_size: int
    max_grad_norm: float
    target_update_factor: int
    replay_capacity: int
    epsilon_start: float
    epsilon_end: float
    exploration_fraction: float
    plateau_window: int
    plateau_tolerance: float
    snapshot_times: tuple[float, ...]
    spectrum_k: tuple[int, ...]

    def __init__(self) -> None:
        # every value comes from the packaged default.cfg, see from_sources
        for key in _OPTIONS:
            setattr(self, key, None)

    # also make dict-like access and setting work
    def __getitem__(self, key: str) -> Any:
        try:
            return getattr(self, key)
        except AttributeError as e:
            raise KeyError(f"'RunConfig' object has no key '{key}'") from e

    def __setitem__(self, key: str, value: Any) -> None:
        if key not in _OPTIONS:
            raise KeyError(f"'RunConfig' object has no key '{key}'")
        setattr(self, key, value)

    def __iter__(self) -> Iterator[str]:
        return iter(_OPTIONS)

    def update(self, other: RunConfig) -> RunConfig:
        """Take every option of ``other``, in place."""
        for key in _OPTIONS:
            self[key] = other[key]
        return self

    @classmethod
    def from_sources(
        cls,
        defaults: configparser.ConfigParser,
        user: configparser.ConfigParser | None = None,
        profile: str | None = None,
        **flags: Any,
    ) -> RunConfig:
        """Resolve a configuration in the documented order and validate it."""
        config = cls()
        config.digest_parser(defaults)
        missing = [key for key in _OPTIONS if config[key] is None]
        if missing:
            raise ConfigurationError(f"The defaults do not set {', '.join(missing)}")
        if profile is None and user is not None and user.has_option("CLI", "profile"):
            profile = user.get("CLI", "profile")
        profile = profile or config.profile
        config.apply_profile(profile)
        if user is not None:
            config.digest_parser(user)
            config.profile = profile
        config.digest_args(**flags)
        config.validate()
        return config

    def digest_parser(self, parser: configparser.ConfigParser) -> RunConfig:
        """Take every known option present in ``parser``."""
        for key, (section, convert) in _OPTIONS.items():
            file_key = _FILE_KEYS.get(key, key)
            if not parser.has_option(section, file_key):
                continue
            raw = parser.get(section, file_key)
            try:
                self[key] = convert(raw)
            except ValueError as e:
                raise ConfigurationError(
                    f"Invalid value {raw!r} for [{section}] {file_key}"
                ) from e
        return self

    def apply_profile(self, name: str) -> RunConfig:
        if name not in PROFILES:
            raise ConfigurationError(
                f"Unknown profile '{name}', expected one of {sorted(PROFILES)}"
            )
        self.profile = name
        for key, value in PROFILES[name].items():
            self[key] = value
        return self

    def digest_args(self, **flags: Any) -> RunConfig:
        """Apply explicit command line flags; ``None`` means not given."""
        for key, value in flags.items():
            if value is None:
                continue
            if key == "variant":
                value = Variant(value)
            self[key] = value
        return self

    def validate(self) -> RunConfig:
        for name in ("coarse", "fine"):
            n = self[name]
            if n < MIN_GRID_POINTS or n & (n - 1):
                raise ConfigurationError(
                    f"{name} = {n} must be a power of two >= {MIN_GRID_POINTS}"
                )
        if self.fine % self.coarse:
            raise ConfigurationError(
                f"fine = {self.fine} is not a multiple of coarse = {self.coarse}"
            )
        for name in ("side", "re", "dt", "t_final", "gamma", "learning_rate"):
            if self[name] <= 0:
                raise ConfigurationError(f"{name} must be positive, got {self[name]}")
        if self.gamma > 1:
            raise ConfigurationError(f"gamma must be <= 1, got {self.gamma}")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ConfigurationError(
                f"t_final / dt = {ratio} is not an integer number of steps"
            )
        if self.n_steps < RAND_WINDOW_DIVISOR:
            raise ConfigurationError(f"A run needs at least {RAND_WINDOW_DIVISOR} steps")
        if self.batch_size < 1 or self.replay_capacity < self.batch_size:
            raise ConfigurationError("replay_capacity must hold at least one batch")
        if self.dns_substeps < 0:
            raise ConfigurationError(f"dns_substeps must be >= 0, got {self.dns_substeps}")
        return self

    # derived quantities

    @property
    def nu(self) -> float:
        """Kinematic viscosity for unit velocity and length scales."""
        return 1.0 / self.re

    @property
    def n_steps(self) -> int:
        """``N``: coarse steps over ``[0, T]``."""
        return round(self.t_final / self.dt)

    @property
    def n_train(self) -> int:
        """``N_train = N / 4``: the training window and the standard episode."""
        return self.n_steps // TRAIN_WINDOW_DIVISOR

    @property
    def n_rand_train(self) -> int:
        """``N_rand_train = N / 10``: the length of randomly started episodes."""
        return self.n_steps // RAND_WINDOW_DIVISOR

    @property
    def episode_length(self) -> int:
        if self.variant is Variant.DD_RAND:
            return self.n_rand_train
        return self.n_train

    @property
    def reference_steps(self) -> int:
        """Last coarse step the training references must reach."""
        if self.variant is Variant.DD_RAND:
            return self.n_train + self.n_rand_train
        return self.n_train

    @property
    def episode_budget(self) -> int:
        if self.episodes > 0:
            return self.episodes
        return DEFAULT_EPISODES[self.variant]

    @property
    def target_update_interval(self) -> int:
        return self.target_update_factor * self.episode_length

    @property
    def fine_substeps(self) -> int:
        """Fine steps per coarse step.

        ``dns_substeps`` when positive, else the grid ratio, so the DNS step is
        ``dt * coarse / fine`` by default.
        """
        if self.dns_substeps > 0:
            return self.dns_substeps
        return self.fine // self.coarse

    @property
    def fine_dt(self) -> float:
        return self.dt / self.fine_substeps

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def to_parser(self) -> configparser.ConfigParser:
        parser = configparser.ConfigParser()
        for key, (section, _) in _OPTIONS.items():
            if not parser.has_section(section):
                parser.add_section(section)
            parser.set(section, _FILE_KEYS.get(key, key), _format(self[key]))
        return parser

    def dumps(self) -> str:
        lines = []
        parser = self.to_parser()
        for section in parser.sections():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in parser.items(section))
            lines.append("")
        return "\n".join(lines)

    def write(self, path: StrPath) -> Path:
        """Write the resolved configuration, readable back with ``--config``."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps())
        return path

    def __repr__(self) -> str:
        return (
            f"<RunConfig {self.profile} {self.variant.value} "
            f"{self.coarse}/{self.fine} Re={self.re:g} N={self.n_steps}>"
        )
