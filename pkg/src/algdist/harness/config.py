"""Experiment configuration: a frozen, hashable description of a run.

Every run is fully determined by its config; the canonical JSON form is
hashed (sha256) into each report so a report can be re-run byte-identically
from its own echo.  Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

FIELD_ORDER = (
    "experiment",
    "seed",
    "t",
    "degrees",
    "s_values",
    "trials",
    "mc_samples",
    "tolerances",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid and budget description for one experiment run.

    ``t`` is the maximum ambient projective dimension; suites that grid over
    several dimensions run every dimension they support up to ``t``.
    ``degrees`` is the degree (or point-count) grid, ``s_values`` the
    derivative-order grid; suites ignore the fields they have no use for.
    ``trials`` counts instances per grid cell, ``mc_samples`` Monte Carlo
    draws where sampling is needed.  ``tolerances`` overrides suite-specific
    slack values by name.
    """

    experiment: str
    seed: int = 0
    t: int = 1
    degrees: tuple = ()
    s_values: tuple = ()
    trials: int = 100
    mc_samples: int = 0
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.experiment, str) or not self.experiment:
            raise ValueError("experiment name must be a non-empty string")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValueError("seed must be an integer")
        if not -(2 ** 63) <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        for name in ("t", "trials", "mc_samples"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer")
        object.__setattr__(self, "degrees",
                           _int_tuple("degrees", self.degrees))
        object.__setattr__(self, "s_values",
                           _int_tuple("s_values", self.s_values))
        tol = dict(self.tolerances)
        for k, v in tol.items():
            if not isinstance(k, str):
                raise ValueError("tolerance names must be strings")
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"tolerance {k!r} must be a number")
            tol[k] = float(v)
        object.__setattr__(self, "tolerances", tol)

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def override(self, **kwargs) -> "ExperimentConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs) if kwargs else self

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "t": self.t,
            "degrees": list(self.degrees),
            "s_values": list(self.s_values),
            "trials": self.trials,
            "mc_samples": self.mc_samples,
            "tolerances": {k: self.tolerances[k]
                           for k in sorted(self.tolerances)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        unknown = sorted(set(data) - set(FIELD_ORDER))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ValueError("config needs an 'experiment' field")
        kwargs = dict(data)
        for key in ("degrees", "s_values"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def sha256(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True,
                           separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _int_tuple(name: str, values) -> tuple:
    if isinstance(values, (str, bytes)):
        raise ValueError(f"{name} must be a list of integers")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValueError(f"{name} must contain integers only")
        out.append(v)
    return tuple(out)


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    """Read a JSON config file; when ``experiment`` is given the file must
    either omit the field or agree with it."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if experiment is not None:
        stated = data.get("experiment")
        if stated is None:
            data = dict(data, experiment=experiment)
        elif stated != experiment:
            raise ValueError(
                f"config file is for {stated!r}, not {experiment!r}")
    return ExperimentConfig.from_dict(data)
