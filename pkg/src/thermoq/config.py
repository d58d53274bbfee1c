"""Run configuration: defaults, JSON ingestion, flag overrides, validation.

A run is described by one flat JSON document; every CLI flag overrides the
matching field.  Defaults reproduce the standard working point used across
the docs (e1=1, e2=2, t_c=1, t_r=1.1, t_h=20, unit collision rates), so a
bare `thermoq steady` is already a meaningful experiment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any

from .bosonic import BosonicCoupling, fridge_bosonic_generator
from .collision import fridge_generator
from .errors import ValidationError
from .model import BathTriple, CouplingRates, FridgeSpec
from .qutrit import qutrit_generator

MODELS = ("collision", "bosonic", "qutrit", "compare")

DEFAULTS: dict[str, Any] = {
    "model": "collision",
    "e1": 1.0,
    "e2": 2.0,
    "t_c": 1.0,
    "t_r": 1.1,
    "t_h": 20.0,
    "p_c": 1.0,
    "p_r": 1.0,
    "p_h": 1.0,
    "gamma_c": None,
    "gamma_r": None,
    "gamma_h": None,
    "qutrit_pc_scale": 1.0,
}

_FLOAT_FIELDS = (
    "e1", "e2", "t_c", "t_r", "t_h", "p_c", "p_r", "p_h", "qutrit_pc_scale",
)
_OPTIONAL_FLOAT_FIELDS = ("gamma_c", "gamma_r", "gamma_h")

# short parameter names accepted by --sweep and the flag layer
PARAM_ALIASES = {
    "e1": "e1",
    "e2": "e2",
    "tc": "t_c",
    "tr": "t_r",
    "th": "t_h",
    "pc": "p_c",
    "pr": "p_r",
    "ph": "p_h",
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters (defaults already applied)."""

    model: str = "collision"
    e1: float = 1.0
    e2: float = 2.0
    t_c: float = 1.0
    t_r: float = 1.1
    t_h: float = 20.0
    p_c: float = 1.0
    p_r: float = 1.0
    p_h: float = 1.0
    gamma_c: float | None = None
    gamma_r: float | None = None
    gamma_h: float | None = None
    qutrit_pc_scale: float = 1.0

    def validate(self) -> "RunConfig":
        if self.model not in MODELS:
            raise ValidationError(
                f"field 'model': unknown model {self.model!r}; choose from {MODELS}"
            )
        for name in _FLOAT_FIELDS:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) \
                    or not math.isfinite(float(v)):
                raise ValidationError(f"field '{name}': expected a finite number, got {v!r}")
            if v <= 0:
                raise ValidationError(f"field '{name}': must be positive, got {v!r}")
        if self.e2 <= self.e1:
            raise ValidationError(
                f"field 'e2': E2 must exceed E1, got e2={self.e2} <= e1={self.e1}"
            )
        if not (self.t_c <= self.t_r <= self.t_h):
            raise ValidationError(
                f"fields 't_c'/'t_r'/'t_h': need t_c <= t_r <= t_h, got "
                f"({self.t_c}, {self.t_r}, {self.t_h})"
            )
        gammas = [self.gamma_c, self.gamma_r, self.gamma_h]
        given = [g is not None for g in gammas]
        if any(given) and not all(given):
            raise ValidationError(
                "fields 'gamma_c'/'gamma_r'/'gamma_h': give all three or none"
            )
        for name in _OPTIONAL_FLOAT_FIELDS:
            v = getattr(self, name)
            if v is None:
                continue
            if not isinstance(v, (int, float)) or isinstance(v, bool) \
                    or not math.isfinite(float(v)) or v <= 0:
                raise ValidationError(
                    f"field '{name}': expected a positive finite number, got {v!r}"
                )
        # construct the value objects once so their own checks run too
        self.spec()
        self.baths()
        self.rates()
        return self

    # -- value-object views -------------------------------------------------

    def spec(self) -> FridgeSpec:
        return FridgeSpec(self.e1, self.e2)

    def baths(self) -> BathTriple:
        return BathTriple(self.t_c, self.t_r, self.t_h)

    def rates(self) -> CouplingRates:
        return CouplingRates(self.p_c, self.p_r, self.p_h)

    def coupling(self) -> BosonicCoupling | None:
        if self.gamma_c is None:
            return None
        return BosonicCoupling(self.gamma_c, self.gamma_r, self.gamma_h)

    def generator(self):
        """The dynamics generator this config describes.  The 'compare' model
        has two generators and is handled by the comparison layer instead."""
        if self.model == "collision":
            return fridge_generator(self.spec(), self.baths(), self.rates())
        if self.model == "bosonic":
            return fridge_bosonic_generator(
                self.spec(), self.baths(), self.rates(), coupling=self.coupling()
            )
        if self.model == "qutrit":
            return qutrit_generator(
                self.spec(), self.baths(), self.rates(),
                cold_rate_scale=self.qutrit_pc_scale,
            )
        raise ValidationError(
            f"model '{self.model}' does not define a single generator"
        )

    def with_param(self, name: str, value: float) -> "RunConfig":
        """Copy with one parameter replaced; accepts the short sweep aliases."""
        field = PARAM_ALIASES.get(name, name)
        if field not in DEFAULTS or field == "model":
            raise ValidationError(f"unknown parameter {name!r}")
        return replace(self, **{field: value}).validate()

    def to_dict(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in DEFAULTS}


def load_config_file(path: str) -> dict[str, Any]:
    """Read a config JSON document, checking shape but not physics (that
    happens in RunConfig.validate after overrides are merged)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"config {path!r} is not valid JSON (line {exc.lineno}, col {exc.colno}): "
            f"{exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config {path!r}: top level must be a JSON object")
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ValidationError(
            f"config {path!r}: unknown field(s) {', '.join(map(repr, unknown))}"
        )
    return raw


def resolve_config(
    file_values: dict[str, Any] | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """defaults <- config file <- explicit flag overrides, then validate."""
    merged = dict(DEFAULTS)
    for layer in (file_values or {}), (overrides or {}):
        for k, v in layer.items():
            if k not in DEFAULTS:
                raise ValidationError(f"unknown config field {k!r}")
            if v is not None:
                merged[k] = v
    return RunConfig(**merged).validate()
