"""Experiment configuration files: a small INI dialect, strictly validated.

A run configuration has four sections. `[agents]` picks either a random
population (`mode = distribution`, parameters in `[distribution]`) or two
fixed agents (`mode = explicit`, parameters in `[seller]` and `[purchaser]`).
`[protocol]` selects the variant and its knobs, `[experiment]` the draw count
and seed, `[output]` where and how reports are written. Unknown sections or
keys are rejected, and every diagnostic names the offending section and key.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .agents import AgentSpec, CuriosityType, StrategyParams
from .experiments import DistributionParams
from .records import Role

_CTYPE_NAMES = {t.value: t for t in CuriosityType}
_ROLE_NAMES = {r.value: r for r in Role}

_KNOWN_KEYS: dict[str, set[str]] = {
    "agents": {"mode", "seller-type", "purchaser-type"},
    "distribution": {
        "purchaser-reserve-mean",
        "purchaser-reserve-std",
        "seller-reserve-mean",
        "seller-reserve-std",
        "kappa-range",
        "beta-range",
        "purchaser-gamma-fraction-range",
        "seller-gamma-fraction-range",
        "pace-horizon-range",
        "info-base",
        "info-scale",
    },
    "seller": {"reserve", "kappa", "beta", "gamma", "pace-horizon"},
    "purchaser": {"reserve", "kappa", "beta", "gamma", "pace-horizon"},
    "protocol": {"variant", "bound", "opener", "curious-counts"},
    "experiment": {"draws", "seed"},
    "output": {"dir", "formats", "records", "figures"},
}


class ConfigError(ValueError):
    """A configuration problem, phrased as `section.key: message`."""


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "json")
    records: bool = False  # stream raw per-run records as JSON lines
    figures: bool = True


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs, plus provenance of the source file."""

    mode: str  # "distribution" | "explicit"
    seller_type: CuriosityType
    purchaser_type: CuriosityType
    dist: DistributionParams = field(default_factory=DistributionParams)
    explicit_seller: AgentSpec | None = None
    explicit_purchaser: AgentSpec | None = None
    variant: str = "barg"
    bound: int = 500
    opener: Role = Role.PURCHASER
    curious_counts: str = "opponent"
    draws: int = 10_000
    seed: int = 0
    output: OutputOptions = field(default_factory=OutputOptions)
    config_hash: str = ""


def default_config_path() -> Path:
    """The configuration shipped with the package."""
    return Path(str(resources.files("bargainsim").joinpath("data/default.cfg")))


class _Section:
    """One INI section with typed, key-addressed accessors."""

    def __init__(self, name: str, raw: dict[str, str]):
        self.name = name
        self.raw = raw

    def _get(self, key: str, default: str | None) -> str | None:
        value = self.raw.get(key, default)
        if value is None:
            raise ConfigError(f"{self.name}.{key}: required key is missing")
        return value

    def text(self, key: str, default: str | None = None) -> str:
        return str(self._get(key, default))

    def number(self, key: str, default: str | None = None) -> float:
        value = self._get(key, default)
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected a number, got {value!r}") from exc

    def integer(self, key: str, default: str | None = None) -> int:
        value = self._get(key, default)
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected an integer, got {value!r}") from exc

    def boolean(self, key: str, default: str | None = None) -> bool:
        value = str(self._get(key, default)).strip().lower()
        if value in ("yes", "true", "on", "1"):
            return True
        if value in ("no", "false", "off", "0"):
            return False
        raise ConfigError(f"{self.name}.{key}: expected yes/no, got {value!r}")

    def pair(self, key: str, default: str | None = None) -> tuple[float, float]:
        value = self._get(key, default)
        parts = value.replace(",", " ").split()
        if len(parts) != 2:
            raise ConfigError(f"{self.name}.{key}: expected two numbers, got {value!r}")
        try:
            return float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected two numbers, got {value!r}") from exc

    def int_pair(self, key: str, default: str | None = None) -> tuple[int, int]:
        lo, hi = self.pair(key, default)
        if lo != int(lo) or hi != int(hi):
            raise ConfigError(f"{self.name}.{key}: expected two integers")
        return int(lo), int(hi)

    def choice(self, key: str, options: dict, default: str | None = None):
        value = str(self._get(key, default)).strip().lower()
        if value not in options:
            raise ConfigError(
                f"{self.name}.{key}: expected one of {sorted(options)}, got {value!r}"
            )
        return options[value]


def _check_unknown(parser: configparser.ConfigParser) -> None:
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"{section}: unknown section")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"{section}.{key}: unknown key")


def _section(parser: configparser.ConfigParser, name: str) -> _Section:
    raw = dict(parser[name]) if parser.has_section(name) else {}
    return _Section(name, raw)


def _distribution(sec: _Section) -> DistributionParams:
    defaults = DistributionParams()
    try:
        return DistributionParams(
            purchaser_reserve_mean=sec.number(
                "purchaser-reserve-mean", str(defaults.purchaser_reserve_mean)
            ),
            purchaser_reserve_std=sec.number(
                "purchaser-reserve-std", str(defaults.purchaser_reserve_std)
            ),
            seller_reserve_mean=sec.number(
                "seller-reserve-mean", str(defaults.seller_reserve_mean)
            ),
            seller_reserve_std=sec.number("seller-reserve-std", str(defaults.seller_reserve_std)),
            kappa_range=sec.pair("kappa-range", "{} {}".format(*defaults.kappa_range)),
            beta_range=sec.pair("beta-range", "{} {}".format(*defaults.beta_range)),
            purchaser_gamma_fraction_range=sec.pair(
                "purchaser-gamma-fraction-range",
                "{} {}".format(*defaults.purchaser_gamma_fraction_range),
            ),
            seller_gamma_fraction_range=sec.pair(
                "seller-gamma-fraction-range",
                "{} {}".format(*defaults.seller_gamma_fraction_range),
            ),
            pace_horizon_range=sec.int_pair(
                "pace-horizon-range", "{} {}".format(*defaults.pace_horizon_range)
            ),
            info_base=sec.number("info-base", str(defaults.info_base)),
            info_scale=sec.number("info-scale", str(defaults.info_scale)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"distribution: {exc}") from exc


def _explicit_agent(sec: _Section, role: Role, ctype: CuriosityType, dist: DistributionParams) -> AgentSpec:
    try:
        return AgentSpec(
            role=role,
            ctype=ctype,
            initial_reserve=sec.number("reserve"),
            info_base=dist.info_base,
            info_scale=dist.info_scale,
            strategy=StrategyParams(
                kappa=sec.number("kappa"),
                beta=sec.number("beta"),
                gamma=sec.number("gamma"),
                pace_horizon=sec.integer("pace-horizon"),
            ),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{sec.name}: {exc}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text; raises ConfigError on problems."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"syntax: {exc}") from exc
    _check_unknown(parser)

    agents = _section(parser, "agents")
    mode = agents.choice("mode", {"distribution": "distribution", "explicit": "explicit"}, "distribution")
    seller_type = agents.choice("seller-type", _CTYPE_NAMES, "uncurious")
    purchaser_type = agents.choice("purchaser-type", _CTYPE_NAMES, "uncurious")

    dist = _distribution(_section(parser, "distribution"))

    explicit_seller = explicit_purchaser = None
    if mode == "explicit":
        for name in ("seller", "purchaser"):
            if not parser.has_section(name):
                raise ConfigError(f"{name}: section required when agents.mode = explicit")
        explicit_seller = _explicit_agent(_section(parser, "seller"), Role.SELLER, seller_type, dist)
        explicit_purchaser = _explicit_agent(
            _section(parser, "purchaser"), Role.PURCHASER, purchaser_type, dist
        )

    protocol = _section(parser, "protocol")
    variant = protocol.choice(
        "variant", {v: v for v in ("barg", "mat", "bou", "all")}, "barg"
    )
    bound = protocol.integer("bound", "500")
    if bound < 1:
        raise ConfigError(f"protocol.bound: must be >= 1, got {bound}")
    opener = protocol.choice("opener", _ROLE_NAMES, "purchaser")
    curious_counts = protocol.choice(
        "curious-counts", {"own": "own", "opponent": "opponent"}, "opponent"
    )

    experiment = _section(parser, "experiment")
    draws = experiment.integer("draws", "10000")
    if draws < 1:
        raise ConfigError(f"experiment.draws: must be >= 1, got {draws}")
    seed = experiment.integer("seed", "0")

    out = _section(parser, "output")
    formats = tuple(out.text("formats", "csv json").replace(",", " ").split())
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output.formats: unknown format {fmt!r}")
    output = OutputOptions(
        directory=out.text("dir", "out"),
        formats=formats,
        records=out.boolean("records", "no"),
        figures=out.boolean("figures", "yes"),
    )

    return RunConfig(
        mode=mode,
        seller_type=seller_type,
        purchaser_type=purchaser_type,
        dist=dist,
        explicit_seller=explicit_seller,
        explicit_purchaser=explicit_purchaser,
        variant=variant,
        bound=bound,
        opener=opener,
        curious_counts=curious_counts,
        draws=draws,
        seed=seed,
        output=output,
        config_hash=hashlib.sha256(text.encode()).hexdigest()[:12],
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
