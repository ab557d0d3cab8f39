"""Job configuration shared by the CLI and the experiment scripts."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .classical import FAMILIES, GEGENBAUER, ClassicalMeasure
from .coherence import MODES, CoherencePair, build_pair
from .errors import ParameterError
from .expr import ExprFn
from .precision import get_precision
from .sobolev import SobolevContext, build_context

FORMATS = ("csv", "json")
PRECISIONS = ("double", "extended")


@dataclass(frozen=True)
class JobConfig:
    family: str = "hermite"
    mu: float = 5.0
    alpha: float | None = None
    lam: float = 0.1
    eps0: float = 1.2
    eps1: float = 1.3
    xi: float | None = None
    N: int = 12
    f: str | None = None
    mode: str = "default"
    precision: str = "double"
    quad_nodes: int = 200
    format: str = "csv"

    def validate(self) -> "JobConfig":
        if self.family not in FAMILIES:
            raise ParameterError(f"family must be one of {FAMILIES}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}")
        if self.precision not in PRECISIONS:
            raise ParameterError(f"precision must be one of {PRECISIONS}")
        if self.format not in FORMATS:
            raise ParameterError(f"format must be one of {FORMATS}")
        if self.N < 2:
            raise ParameterError("N must be at least 2")
        if self.quad_nodes < 1:
            raise ParameterError("quad_nodes must be positive")
        if not self.lam > 0:
            raise ParameterError("lambda must be positive")
        self.measure()  # regime checks on mu, alpha
        return self

    def measure(self) -> ClassicalMeasure:
        alpha = self.alpha if self.family == GEGENBAUER else None
        return ClassicalMeasure(self.family, self.mu, alpha)

    def pair(self, extra: int = 2, precision: str | None = None) -> CoherencePair:
        return build_pair(self.measure(), self.eps0, self.eps1, self.N + extra, self.mode, self.xi,
                          get_precision(precision or self.precision))

    def context(self, precision: str | None = None) -> SobolevContext:
        return build_context(self.pair(precision=precision), self.lam, self.N)

    def expr(self) -> ExprFn:
        if not self.f:
            raise ParameterError("no target function given")
        return ExprFn.from_source(self.f, self.mu)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


# JSON keys accepted in job files; "lambda" and "n" are aliases.
_ALIASES = {"lambda": "lam", "n": "N", "quad-nodes": "quad_nodes"}


def merge(base: JobConfig, overrides: dict) -> JobConfig:
    names = {f.name for f in fields(JobConfig)}
    clean = {}
    for key, value in overrides.items():
        key = _ALIASES.get(key, key.replace("-", "_"))
        if key not in names:
            raise ParameterError(f"unknown job key {key!r}")
        if value is not None:
            clean[key] = value
    return replace(base, **clean)


def load_job(path: str | Path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError("job file must hold a JSON object")
    return data


PRESETS = {
    "hermite": JobConfig(family="hermite", mu=5.0, lam=0.1, eps0=1.2, eps1=1.3, xi=0.0, N=12,
                         f="x*(10-x)"),
    "gegenbauer": JobConfig(family="gegenbauer", mu=1.0, alpha=5.0, lam=0.5, eps0=0.1, eps1=0.15,
                            xi=1.0, N=12, f="x*exp(-(x-0.2)^2)"),
}
