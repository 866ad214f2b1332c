"""Scenario configuration: dataclass, defaults, and a flat key=value format.

The on-disk format is one `key = value` pair per line, `#` comments, blank
lines ignored. All six keys are required when loading from a file; the
in-code defaults below describe the canonical scenario. Floats are written
with 17 significant digits so load(dump(s)) reproduces s bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import NetworkLayout
from .propagation import average_path_losses

REUSE_PATTERNS = ("FR1", "FR3")


@dataclass(frozen=True)
class Scenario:
    radius: float = 700.0
    gamma: float = 3.2
    d_ref_multiplier: float = 2.0
    sigma_db: float = 0.0
    reuse: str = "FR1"
    seed: int = 42

    def __post_init__(self):
        if self.radius <= 0 or self.gamma <= 0 or self.d_ref_multiplier <= 0:
            raise ValueError("radius, gamma and d_ref_multiplier must be positive")
        if self.sigma_db < 0:
            raise ValueError("sigma_db must be nonnegative")
        if self.reuse not in REUSE_PATTERNS:
            raise ValueError(f"reuse must be one of {REUSE_PATTERNS}, got {self.reuse!r}")

    @property
    def d_ref(self) -> float:
        return self.d_ref_multiplier * self.radius

    def layout(self) -> NetworkLayout:
        return NetworkLayout(self.radius)

    def lambdas(self, quad_n: int = 512) -> np.ndarray:
        """Average path losses of the scenario's interferers, cached."""
        key = (self.radius, self.gamma, self.d_ref_multiplier, self.reuse, quad_n)
        hit = _LAMBDA_CACHE.get(key)
        if hit is None:
            hit = average_path_losses(self.layout(), self.reuse, self.gamma,
                                      self.d_ref, quad_n)
            hit.setflags(write=False)
            _LAMBDA_CACHE[key] = hit
        return hit

    def canonical_text(self) -> str:
        """Serialized form; also the cache-key material."""
        return "".join(f"{k} = {_format(v)}\n" for k, v in _fields(self))


_LAMBDA_CACHE: dict = {}

_SCHEMA = {
    "radius": float,
    "gamma": float,
    "d_ref_multiplier": float,
    "sigma_db": float,
    "reuse": str,
    "seed": int,
}


def _fields(s: Scenario):
    return [(k, getattr(s, k)) for k in _SCHEMA]


def _format(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def dump_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        fh.write(scenario.canonical_text())


def load_scenario(path) -> Scenario:
    """Parse a scenario file; errors carry the offending line number."""
    seen = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip().strip('"').strip("'")
            if key not in _SCHEMA:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key in seen:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                seen[key] = _SCHEMA[key](val)
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: cannot parse {val!r} as {_SCHEMA[key].__name__} for {key!r}"
                ) from None
    missing = [k for k in _SCHEMA if k not in seen]
    if missing:
        raise ValueError(f"{path}: missing required field(s): {', '.join(missing)}")
    return Scenario(**seen)


def with_overrides(scenario: Scenario, **kw) -> Scenario:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(scenario, **kw) if kw else scenario
