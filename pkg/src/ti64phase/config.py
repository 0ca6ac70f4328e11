"""Run configuration: a flat ``section.key = value`` text file.

Example::

    # model parameters
    kinetics.k1 = 0.294
    temperatures.T_am_sta = 848
    step.dt = 1e-3
    step.scheme = cn
    run.threads = 4

Lines starting with ``#`` and blank lines are ignored; unknown keys are
errors. Sections ``temperatures``, ``equilibrium`` and ``kinetics`` override
model parameters; ``step``, ``lm``, ``sib``, ``run`` and ``field`` configure
the integrator, the least-squares engine, the CCT cooling curves, the batch
runner and the field post-processor.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .calibrate import LMConfig
from .errors import ConfigError, DomainError, ParseError
from .integrator import Scheme, StepConfig
from .params import DEFAULT_PARAMS, SECTIONS, ModelParams
from .paths import SibParams
from .phase_model import PhaseState

INITIAL_STATES = {
    "beta": PhaseState.pure_beta(),
    "lamellar": PhaseState.solid(0.9, 0.0),
}


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = DEFAULT_PARAMS
    step: StepConfig = StepConfig()
    lm: LMConfig = LMConfig()
    sib: SibParams = SibParams()
    threads: int = 1
    out: Path = Path(".")
    field_initial: str = "beta"

    def __post_init__(self):
        if self.threads < 1:
            raise ConfigError("run.threads must be at least 1")
        if self.field_initial not in INITIAL_STATES:
            raise ConfigError(f"field.initial must be one of {', '.join(INITIAL_STATES)}")

    @property
    def initial_state(self) -> PhaseState:
        return INITIAL_STATES[self.field_initial]


# section -> keys allowed; keys are dataclass field names
_RECORDS = {
    "step": ("dt", "scheme", "cn_tolerance", "cn_max_iters", "cn_damping", "record_every"),
    "lm": tuple(f.name for f in dataclasses.fields(LMConfig)),
    "sib": tuple(f.name for f in dataclasses.fields(SibParams)),
}
_INT_KEYS = {"step.cn_max_iters", "step.record_every", "lm.max_iters", "run.threads"}
_RUN_KEYS = {"run.threads", "run.out", "field.initial"}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Split ``key = value`` lines; returns ``{key: (value, line)}``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.split("#", 1)[0].strip()
        if not sep or not key or not value:
            raise ParseError("expected 'key = value'", source, lineno)
        if "." not in key:
            raise ParseError(f"key {key!r} must be dotted (section.name)", source, lineno)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", source, lineno)
        out[key] = (value, lineno)
    return out


def _number(key, value, source, line):
    try:
        v = int(value) if key in _INT_KEYS else float(value)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ParseError(f"{key} must be {kind}, got {value!r}", source, line) from None
    if isinstance(v, float) and not math.isfinite(v):
        raise ParseError(f"{key} must be finite", source, line)
    return v


def build_config(entries: dict, source: str = "<config>", base: RunConfig = RunConfig()) -> RunConfig:
    """Validate parsed entries and build a :class:`RunConfig` on top of ``base``."""
    model, records, run = {}, {name: {} for name in _RECORDS}, {}
    model_keys = base.params.as_flat_dict()
    for key, (value, line) in entries.items():
        section, _, name = key.partition(".")
        if section in SECTIONS:
            if key not in model_keys:
                raise ConfigError(f"{source}:{line}: unknown model parameter {key!r}")
            model[key] = _number(key, value, source, line)
        elif section in _RECORDS:
            if name not in _RECORDS[section]:
                raise ConfigError(f"{source}:{line}: unknown key {key!r}")
            if key == "step.scheme":
                try:
                    records[section][name] = Scheme(value.lower())
                except ValueError:
                    raise ParseError(f"step.scheme must be euler or cn, got {value!r}",
                                     source, line) from None
            else:
                records[section][name] = _number(key, value, source, line)
        elif key in _RUN_KEYS:
            run[key] = (value, line)
        else:
            raise ConfigError(f"{source}:{line}: unknown key {key!r}")

    try:
        params = base.params.with_overrides(model) if model else base.params
        step = dataclasses.replace(base.step, **records["step"])
        lm = dataclasses.replace(base.lm, **records["lm"])
        sib = dataclasses.replace(base.sib, **records["sib"])
    except (DomainError, ConfigError) as exc:
        raise ConfigError(f"{source}: {exc}") from None
    kw = {}
    if "run.threads" in run:
        value, line = run["run.threads"]
        kw["threads"] = _number("run.threads", value, source, line)
    if "run.out" in run:
        kw["out"] = Path(run["run.out"][0])
    if "field.initial" in run:
        kw["field_initial"] = run["field.initial"][0].lower()
    return dataclasses.replace(base, params=params, step=step, lm=lm, sib=sib, **kw)


def load_config(file: Optional[str] = None) -> RunConfig:
    """Read a config file; ``None`` gives the defaults."""
    if file is None:
        return RunConfig()
    path = Path(file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc.strerror}", str(path)) from None
    return build_config(parse_config_text(text, str(path)), str(path))


def with_cli_overrides(cfg: RunConfig, dt: Optional[float] = None, scheme: Optional[str] = None,
                       threads: Optional[int] = None, out: Optional[str] = None) -> RunConfig:
    """Apply command-line flags, which take precedence over the file."""
    step = cfg.step
    try:
        if dt is not None:
            step = dataclasses.replace(step, dt=dt)
        if scheme is not None:
            step = dataclasses.replace(step, scheme=Scheme(scheme))
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    kw = {"step": step}
    if threads is not None:
        kw["threads"] = threads
    if out is not None:
        kw["out"] = Path(out)
    return dataclasses.replace(cfg, **kw)
