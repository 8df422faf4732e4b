"""Parameter and result records shared by the bound modules."""

import math
from dataclasses import dataclass
from typing import Optional

from .exceptions import DomainError


@dataclass(frozen=True)
class PerceptronParams:
    """A capacity query: margin ``kappa``, error fraction ``f_wb``, optional ratio ``alpha = m/n``."""

    kappa: float
    f_wb: float = 0.0
    alpha: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be finite, got {self.kappa!r}")
        if not 0.0 <= self.f_wb < 1.0:
            raise DomainError(f"f_wb must lie in [0, 1), got {self.f_wb!r}")
        if self.alpha is not None and not self.alpha > 0.0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")

    def with_alpha(self, alpha):
        return PerceptronParams(self.kappa, self.f_wb, alpha)


@dataclass(frozen=True)
class LiftPoint:
    """Optimizing variables of the lifted bound.

    ``c3_s == 0`` denotes the analytic c3 -> 0 limit, where ``gamma_wb_s`` and
    ``nu_wb`` take their limiting values.
    """

    c3_s: float
    gamma_wb_s: float
    nu_wb: float


@dataclass(frozen=True)
class CapacityResult:
    alpha_bound: float
    optimizer_point: Optional[LiftPoint] = None
    residual: float = 0.0
    iterations: int = 0
    converged: bool = True
