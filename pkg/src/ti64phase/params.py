"""Aggregate model parameter record with dotted-key overrides."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError
from .kinetics import DiffusionParams
from .phase_model import CharacteristicTemperatures, EquilibriumParams

# config-file section name -> ModelParams attribute
SECTIONS = {
    "temperatures": "temps",
    "equilibrium": "equilibrium",
    "kinetics": "diffusion",
}


@dataclass(frozen=True)
class ModelParams:
    temps: CharacteristicTemperatures = field(default_factory=CharacteristicTemperatures)
    equilibrium: EquilibriumParams = field(default_factory=EquilibriumParams)
    diffusion: DiffusionParams = field(default_factory=DiffusionParams)

    @property
    def x_max(self) -> float:
        return self.equilibrium.x_max

    def with_diffusion(self, **kw) -> "ModelParams":
        return dataclasses.replace(self, diffusion=dataclasses.replace(self.diffusion, **kw))

    def with_overrides(self, overrides: dict) -> "ModelParams":
        """Return a copy with ``{"kinetics.k1": 0.3, ...}`` style overrides applied."""
        grouped: dict[str, dict] = {}
        for key, value in overrides.items():
            section, _, name = key.partition(".")
            if section not in SECTIONS or not name:
                raise ConfigError(f"unknown model parameter {key!r}")
            attr = SECTIONS[section]
            names = {f.name for f in dataclasses.fields(getattr(self, attr))}
            if name not in names:
                raise ConfigError(f"unknown model parameter {key!r}")
            try:
                grouped.setdefault(attr, {})[name] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"model parameter {key!r} must be numeric, got {value!r}") from None
        new = self
        try:
            for attr, kw in grouped.items():
                new = dataclasses.replace(new, **{attr: dataclasses.replace(getattr(new, attr), **kw)})
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        return new

    def as_flat_dict(self) -> dict:
        out = {}
        for section, attr in SECTIONS.items():
            for f in dataclasses.fields(getattr(self, attr)):
                out[f"{section}.{f.name}"] = getattr(getattr(self, attr), f.name)
        return out


DEFAULT_PARAMS = ModelParams()
