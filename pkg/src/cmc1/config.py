"""Run-level configuration.

``CMC1_TOL`` in the environment overrides the default comparison tolerance
used by the matrix and compatibility checks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import ValidationError

DEFAULT_TOL = 1e-9


def default_tol() -> float:
    raw = os.environ.get("CMC1_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"CMC1_TOL must be a positive number, got {raw!r}") from None
    if not value > 0:
        raise ValidationError(f"CMC1_TOL must be a positive number, got {raw!r}")
    return value


@dataclass
class IntegratorConfig:
    """Settings for the adaptive Runge-Kutta lift integrator."""

    rtol: float = 1e-11
    atol: float = 1e-11
    h_init: float = 1e-3
    h_min: float = 1e-14
    max_steps: int = 200_000
    safety: float = 0.9
    renormalize: bool = True
    # a step may cover at most this fraction of the distance to the
    # nearest singular point, which keeps per-factor log continuation valid
    clearance_fraction: float = 0.5
    det_tol: float = 1e-9


@dataclass
class RunConfig:
    tol: float = field(default_factory=default_tol)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    report: str = "human"
    workers: int = 1
