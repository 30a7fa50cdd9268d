"""
Coordinate perturbation oracles and the tail bounds they feed.

For each coordinate k the perturbed value Z_k is the infimum (right tail) or
supremum (left tail) of Z over every candidate value of coordinate k, the
other coordinates held fixed. The candidate set is exactly the coordinate's
point list; continuous supports must be discretised by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .choices import PerturbationChoice, Side
from .entropy import FunctionTable
from .errors import DomainError

__all__ = [
    "DeltaReport",
    "PerturbationChoice",
    "Side",
    "delta_squared",
    "maurer_eig_bounds",
    "perturbed_values",
    "tail_bound",
]


def perturbed_values(Z: FunctionTable, k: int, choice) -> FunctionTable:
    """Z_k on the full space of ``Z``; constant along axis ``k`` (0-based)."""
    choice = PerturbationChoice.parse(choice)
    Z.space._check_axis(k)
    reduce = np.min if choice is PerturbationChoice.MAURER_INF else np.max
    extreme = reduce(Z.values, axis=k, keepdims=True)
    return FunctionTable(Z.space, np.broadcast_to(extreme, Z.space.shape))


@dataclass(frozen=True)
class DeltaReport:
    choice: PerturbationChoice
    perturbed: tuple
    delta_sq: FunctionTable
    sup_norm: float

    def to_json(self) -> dict:
        return {
            "choice": self.choice.value,
            "sup_norm": self.sup_norm,
            "delta_sq": self.delta_sq.flat.tolist(),
        }


def delta_squared(Z: FunctionTable, choice) -> DeltaReport:
    """Delta^2 = sum_k (Z - Z_k)^2 pointwise, together with its sup-norm."""
    choice = PerturbationChoice.parse(choice)
    perturbed = tuple(perturbed_values(Z, k, choice) for k in range(Z.space.n))
    dsq = np.zeros(Z.space.shape)
    for Zk in perturbed:
        dsq += (Z.values - Zk.values) ** 2
    return DeltaReport(choice, perturbed, FunctionTable(Z.space, dsq), float(dsq.max()))


def tail_bound(t: float, sup_norm: float, side=Side.RIGHT) -> float:
    """exp(-t^2 / (2 sup_norm)).

    The caller pairs RIGHT with the Maurer sup-norm and LEFT with the
    left-tail sup-norm; the formula is the same. A zero sup-norm means Z is
    deterministic, so the bound is 1 at t = 0 and 0 beyond.
    """
    Side(side)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    if sup_norm < 0:
        raise DomainError(f"sup_norm must be >= 0, got {sup_norm!r}")
    if not math.isfinite(sup_norm):
        return 1.0
    if sup_norm == 0:
        return 1.0 if t == 0 else 0.0
    return math.exp(-t * t / (2.0 * sup_norm))


def maurer_eig_bounds(k: int, t: float) -> tuple[float, float]:
    """Right and left tail bounds for the k-th eigenvalue of a bounded symmetric matrix.

    right = exp(-t^2 / (16 k^2)), left = exp(-t^2 / (16 k^2 + 2 k t)).
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k!r}")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    right = math.exp(-t * t / (16.0 * k * k))
    left = math.exp(-t * t / (16.0 * k * k + 2.0 * k * t))
    return right, left
