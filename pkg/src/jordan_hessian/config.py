"""Tolerances and numerical knobs, gathered in one place."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class StencilConfig:
    """Finite-difference stencil settings.

    The actual step at a point ``x`` is ``base_step * (1 + ||x||)``.
    """

    base_step: float = 1e-2
    richardson_levels: int = 2
    scheme: str = "central"
    max_dim_order4: int = 12

    def __post_init__(self):
        if not self.base_step > 0:
            raise ValueError("base_step must be positive")
        if self.richardson_levels < 1:
            raise ValueError("richardson_levels must be >= 1")
        if self.scheme != "central":
            raise ValueError(f"unsupported scheme {self.scheme!r}")

    def step(self, norm_x: float) -> float:
        return self.base_step * (1.0 + norm_x)


# Differentiating an exact tensor once tolerates a much smaller step than
# recovering a fourth derivative from function values.
JACOBIAN_STENCIL = StencilConfig(base_step=1e-3, richardson_levels=2)


@dataclass(frozen=True)
class VerificationConfig:
    tol_third: float = 1e-6
    tol_first: float = 1e-6
    reconstruct_gate: float = 1e-4
    jordan_tol: float = 1e-8
    invariance_tol: float = 1e-8
    unit_tol_factor: float = 1e-8  # find_unit accepts ||L_e - I|| <= factor * dim
    degenerate_tol: float = 1e-12
    grouping_rtol: float = 1e-8
    domain_margin: float = 1e-12
    transport_steps: int = 200
    samples: int = 64
    seed: int = 0


DEFAULT = VerificationConfig()
