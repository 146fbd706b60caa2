"""Parameters of the fractional problem and the constants derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class IntegrabilityError(ValueError):
    """A weighted integral diverges for the requested exponent or parameters."""


class SingularSystemError(ArithmeticError):
    """A linear system that should be SPD is singular or indefinite."""


def _check_beta(beta: float) -> None:
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta!r}")


def alpha_from_beta(beta: float) -> float:
    """Exponent of the weight ``y**alpha`` belonging to the power ``beta``."""
    _check_beta(beta)
    return 1.0 - 2.0 * beta


def compute_dbeta(beta: float) -> float:
    r"""Normalisation :math:`d_\beta = 2^{1-2\beta}\Gamma(1-\beta)/\Gamma(\beta)`."""
    _check_beta(beta)
    return 2.0 ** (1.0 - 2.0 * beta) * math.gamma(1.0 - beta) / math.gamma(beta)


@dataclass(frozen=True)
class DecayRate:
    """Algebraic decay exponent of the squared truncation error."""

    mu: float

    def __post_init__(self) -> None:
        if not (0.0 < self.mu < 2.0):
            raise ValueError(f"decay rate must lie in (0, 2), got {self.mu!r}")


def compute_mu(alpha: float, s: float) -> DecayRate:
    """``1 + |alpha|`` if ``s > 0`` and ``1 + alpha`` if ``s == 0``.

    The branch is an exact comparison; the rate jumps at ``s = 0``.
    """
    if not (-1.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (-1, 1), got {alpha!r}")
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s!r}")
    if s > 0:
        return DecayRate(1.0 + abs(alpha))
    return DecayRate(1.0 + alpha)


@dataclass(frozen=True)
class FracParams:
    """Bundle ``(beta, s, dim)`` together with ``alpha`` and ``d_beta``.

    Construct with :meth:`create`; ``alpha`` and ``d_beta`` are always
    recomputed from ``beta``.
    """

    beta: float
    s: float
    dim: int
    alpha: float = field(init=False)
    d_beta: float = field(init=False)

    def __post_init__(self) -> None:
        _check_beta(self.beta)
        if self.s < 0 or not math.isfinite(self.s):
            raise ValueError(f"s must be a finite nonnegative number, got {self.s!r}")
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim!r}")
        if self.dim == 2 and self.s == 0:
            raise ValueError("dim = 2 requires s > 0")
        object.__setattr__(self, "alpha", alpha_from_beta(self.beta))
        object.__setattr__(self, "d_beta", compute_dbeta(self.beta))

    @classmethod
    def create(cls, beta: float, s: float = 1.0, dim: int = 3) -> "FracParams":
        return cls(beta=float(beta), s=float(s), dim=int(dim))

    @property
    def mu(self) -> DecayRate:
        return compute_mu(self.alpha, self.s)
