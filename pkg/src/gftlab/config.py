"""Run configuration: defaults, ``key=value`` files and canonical serialization."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import UsageError
from .experiments import ExperimentConfig
from .reports import canonical_json
from .schwarzian import GridSpec
from .univalence import VerifierConfig


@dataclass(frozen=True)
class RunConfig:
    order: int = 32
    grunsky_order: int = 16
    radii: int = 65
    angles: int = 512
    r_max: float = 0.96
    refine: bool = True
    rhos: tuple = (0.90, 0.99, 0.999)
    samples: int = 2048
    tol_geom: float = 1e-3
    tol_norm: float = 1e-6
    seed: int = 1
    k: float = 0.25
    trials: int = 200
    claim_trials: int = 32
    degree: int = 6
    curve_order: int = 128
    t_count: int = 16
    aw_samples: int = 8
    budget: int = 64
    out: str = "reports"

    def __post_init__(self):
        object.__setattr__(self, "rhos", tuple(float(r) for r in self.rhos))
        if self.seed < 0 or self.seed >= 2**64:
            raise UsageError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 0 <= self.k < 1:
            raise UsageError(f"k must lie in [0, 1), got {self.k}")
        for name in ("order", "grunsky_order", "radii", "angles", "samples", "degree", "curve_order", "t_count", "budget"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")

    def canonical(self):
        """Every field except the output directory, so relocating output keeps reports identical."""
        d = dataclasses.asdict(self)
        d.pop("out")
        d["rhos"] = list(d["rhos"])
        return d

    def serialize(self):
        return canonical_json(self.canonical())

    def grid(self):
        return GridSpec(self.radii, self.angles, self.r_max, self.refine)

    def verifier(self):
        return VerifierConfig(self.rhos, self.samples, self.grunsky_order, self.tol_geom, self.tol_norm)

    def experiment(self):
        return ExperimentConfig(
            degree=self.degree,
            curve_order=self.curve_order,
            grid=self.grid(),
            verifier=self.verifier(),
            t_count=self.t_count,
            aw_samples=self.aw_samples,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
ALIASES = {"grid.radii_count": "radii", "grid.angles": "angles", "grid.refine": "refine", "grid.r_max": "r_max"}


def parse_value(name, text):
    if name not in FIELDS:
        raise UsageError(f"unknown configuration key {name!r}")
    default = FIELDS[name].default
    text = text.strip()
    try:
        if isinstance(default, bool):
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad value for {name}: {text!r}") from None
    return text


def parse_config_text(text):
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line {lineno}: expected key=value, got {line!r}")
        key = key.strip()
        key = ALIASES.get(key, key.replace("-", "_"))
        out[key] = parse_value(key, value)
    return out


def load_config(path=None, overrides=None):
    """Defaults, then the file (if any), then explicit overrides."""
    values = {}
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**values)
