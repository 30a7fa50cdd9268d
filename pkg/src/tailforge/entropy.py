"""
Exact entropy functionals on finite product probability spaces.

Every expectation is an exact weighted sum over the enumerated points of a
:class:`ProductSpace`; nothing in this module samples. Points are enumerated
row-major with the first coordinate varying slowest, which is also the memory
order of :attr:`FunctionTable.values`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .choices import PerturbationChoice
from .errors import CapacityError, DomainError, PreconditionError, ShapeError

DEFAULT_POINT_CAP = 10**6


@dataclass(frozen=True)
class Tolerances:
    """Roundoff allowances: ``exact`` for plain sums, ``exponential`` once e^{lambda Z} enters."""

    exact: float = 1e-12
    exponential: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()


def _hashable(point):
    if isinstance(point, (list, tuple, np.ndarray)):
        return tuple(_hashable(p) for p in point)
    if isinstance(point, np.generic):
        return point.item()
    return point


@dataclass(frozen=True, eq=False)
class CoordinateSpace:
    """Law of one coordinate: finitely many distinct points with probability weights.

    Zero weights are allowed, so a point can sit in the candidate set used by
    the perturbation oracle without carrying mass.
    """

    points: tuple
    weights: np.ndarray

    def __post_init__(self):
        points = tuple(_hashable(p) for p in self.points)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if not points:
            raise DomainError("coordinate space needs at least one point")
        if len(set(points)) != len(points):
            raise DomainError(f"duplicate points in coordinate space: {points}")
        if weights.shape != (len(points),):
            raise ShapeError(f"{len(points)} points but {weights.size} weights")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise DomainError("weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights sum to {weights.sum()!r}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points):
        points = list(points)
        return cls(points, np.full(len(points), 1.0 / len(points)))

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, CoordinateSpace):
            return NotImplemented
        return self.points == other.points and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.points, self.weights.tobytes()))


@dataclass(frozen=True, eq=False)
class ProductSpace:
    coordinates: tuple
    cap: int = DEFAULT_POINT_CAP

    def __post_init__(self):
        coords = tuple(self.coordinates)
        for c in coords:
            if not isinstance(c, CoordinateSpace):
                raise TypeError(f"expected CoordinateSpace, got {type(c).__name__}")
        object.__setattr__(self, "coordinates", coords)
        size = math.prod(len(c) for c in coords)
        if size > self.cap:
            raise CapacityError(f"product space has {size} points, cap is {self.cap}")

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def shape(self) -> tuple:
        return tuple(len(c) for c in self.coordinates)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def joint_weights(self) -> np.ndarray:
        w = np.ones(())
        for c in self.coordinates:
            w = np.multiply.outer(w, c.weights)
        return w

    def expect(self, values) -> float:
        return float(np.sum(self.joint_weights() * values))

    def points(self):
        """Iterate over points in table order."""
        return itertools.product(*(c.points for c in self.coordinates))

    def drop(self, k: int) -> "ProductSpace":
        self._check_axis(k)
        return ProductSpace(self.coordinates[:k] + self.coordinates[k + 1:], cap=self.cap)

    def replace(self, k: int, coordinate: CoordinateSpace) -> "ProductSpace":
        self._check_axis(k)
        return ProductSpace(self.coordinates[:k] + (coordinate,) + self.coordinates[k + 1:], cap=self.cap)

    def _check_axis(self, k):
        if not 0 <= k < self.n:
            raise IndexError(f"coordinate index {k} out of range for {self.n} coordinates")

    def __eq__(self, other):
        if not isinstance(other, ProductSpace):
            return NotImplemented
        return self.coordinates == other.coordinates

    def __hash__(self):
        return hash(self.coordinates)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Values of a function at every point of ``space``.

    ``positive`` marks a table standing for a strictly positive G; the
    constructor then rejects any value <= 0 instead of clamping it.
    """

    space: ProductSpace
    values: np.ndarray
    positive: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size != self.space.size:
            raise ShapeError(f"{values.size} values for a space of {self.space.size} points")
        values = values.reshape(self.space.shape)
        if not np.all(np.isfinite(values)):
            raise DomainError("table values must be finite")
        if self.positive and np.any(values <= 0):
            bad = np.unravel_index(int(np.argmin(values)), values.shape)
            raise DomainError(f"positive table has value {float(values[bad])!r} "
                              f"at index {tuple(int(i) for i in bad)}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, space: ProductSpace, func: Callable, positive: bool = False):
        vals = [func(*pt) for pt in space.points()]
        return cls(space, np.asarray(vals, dtype=float), positive=positive)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def mean(self) -> float:
        return self.space.expect(self.values)

    def with_values(self, values, positive=None):
        return FunctionTable(self.space, values, self.positive if positive is None else positive)

    def to_json(self) -> dict:
        return {
            "coordinates": [
                {"points": [_jsonable(p) for p in c.points], "weights": c.weights.tolist()}
                for c in self.space.coordinates
            ],
            "values": self.flat.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict, positive: bool | None = None, cap: int = DEFAULT_POINT_CAP):
        """Inverse of :meth:`to_json`. With ``positive=None`` the flag is inferred from the values."""
        unknown = set(obj) - {"coordinates", "values"}
        if unknown:
            raise DomainError(f"unknown keys in function table: {sorted(unknown)}")
        try:
            coords = [CoordinateSpace(c["points"], c["weights"]) for c in obj["coordinates"]]
            values = np.asarray(obj["values"], dtype=float)
        except KeyError as exc:
            raise DomainError(f"function table is missing field {exc.args[0]!r}") from None
        if positive is None:
            positive = bool(np.all(values > 0))
        return cls(ProductSpace(coords, cap=cap), values, positive=positive)


def _jsonable(point):
    return list(_jsonable(p) for p in point) if isinstance(point, tuple) else point


def _require_positive(G: FunctionTable):
    if not G.positive:
        raise DomainError("entropy needs a table flagged positive")


_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 18


def log1pmx(u):
    """log(1 + u) - u, accurate to a few ulps also when |u| is tiny.

    Near zero the two terms cancel to -u^2/2, so the small-|u| branch uses
    log(1 + u) = 2 atanh(u / (2 + u)) and sums the atanh series past its
    linear term.
    """
    shape = np.shape(u)
    u = np.array(u, dtype=float, ndmin=1)
    out = np.log1p(u) - u
    small = np.abs(u) < _SERIES_CUTOFF
    if np.any(small):
        us = u[small]
        r = us / (2.0 + us)
        r2 = r * r
        term = r * r2
        tail = np.zeros_like(r)
        for j in range(1, _SERIES_TERMS + 1):
            tail += term / (2 * j + 1)
            term = term * r2
        out[small] = 2.0 * tail - us * us / (2.0 + us)
    return out.reshape(shape)


def _entropy_density(values, mean):
    """Pointwise G log(G/m) - G + m, which is >= 0 and averages to H(G) when m = EG.

    Written as m[(1 + u) log1pmx(u) + u^2] with u = (G - m)/m, which keeps full
    relative accuracy when G is close to m.
    """
    u = (values - mean) / mean
    dens = mean * ((1.0 + u) * log1pmx(u) + u * u)
    return np.maximum(dens, 0.0)


def _mean_along_last(vals, w):
    # a constant row has its value as mean exactly, whatever the weights' roundoff
    m = vals @ w
    const = np.all(vals == vals[..., :1], axis=-1)
    return np.where(const, vals[..., 0], m)


def entropy(G: FunctionTable) -> float:
    """H(G) = E[G log G] - EG log EG under the product measure."""
    _require_positive(G)
    flat = G.flat
    m = flat[0] if np.all(flat == flat[0]) else G.mean()
    return G.space.expect(_entropy_density(G.values, m))


def partial_entropy(G: FunctionTable, k: int) -> FunctionTable:
    """H_k(G) as a table over the coordinates other than ``k`` (0-based).

    For a single-coordinate space the result lives on the empty product, a
    space with exactly one point.
    """
    _require_positive(G)
    space = G.space
    space._check_axis(k)
    w = space.coordinates[k].weights
    vals = np.moveaxis(G.values, k, -1)
    m = _mean_along_last(vals, w)
    dens = _entropy_density(vals, m[..., None])
    return FunctionTable(space.drop(k), dens @ w)


def duality_value(G: FunctionTable, T: FunctionTable) -> float:
    """E G(log T - log ET); never exceeds H(G), with equality at T = G."""
    _require_positive(G)
    _require_positive(T)
    if G.space != T.space:
        raise ShapeError("G and T live on different spaces")
    # E G log(T/ET) = E[G log1pmx(u)] + E[(G - EG) u] with u = T/ET - 1, using E u = 0;
    # the split avoids cancelling first-order terms when T is nearly constant
    mt = T.mean()
    u = (T.values - mt) / mt
    return G.space.expect(G.values * log1pmx(u) + (G.values - G.mean()) * u)


def variation_value(G: FunctionTable, c: float) -> float:
    """E[G(log G - log c) - (G - c)]; never below H(G), with equality at c = EG."""
    _require_positive(G)
    if not c > 0:
        raise DomainError(f"c must be > 0, got {c!r}")
    return G.space.expect(_entropy_density(G.values, c))


def tensorization_gap(G: FunctionTable) -> float:
    """sum_k E[H_k(G)] - H(G), nonnegative up to roundoff."""
    total = sum(partial_entropy(G, k).mean() for k in range(G.space.n))
    return total - entropy(G)


def _exp_table(Z: FunctionTable, lam: float) -> FunctionTable:
    return FunctionTable(Z.space, np.exp(lam * Z.values), positive=True)


def log_sobolev_gap(Z: FunctionTable, lam: float, Zk_tables: Sequence[FunctionTable]) -> float:
    """(lam^2/2) E[e^{lam Z} Delta^2] - H(e^{lam Z}), with Delta^2 = sum_k (Z - Z_k)^2.

    ``Zk_tables[k]`` is the perturbed table for coordinate ``k`` on the full
    space. Raises :class:`PreconditionError` at the first (point, k) where
    -lam (Z - Z_k) > 0.
    """
    if len(Zk_tables) != Z.space.n:
        raise ShapeError(f"need {Z.space.n} perturbed tables, got {len(Zk_tables)}")
    delta_sq = np.zeros(Z.space.shape)
    for k, Zk in enumerate(Zk_tables):
        if Zk.space != Z.space:
            raise ShapeError(f"perturbed table {k} lives on a different space")
        diff = Z.values - Zk.values
        bad = np.argwhere(-lam * diff > 0)
        if bad.size:
            point = tuple(int(i) for i in bad[0])
            raise PreconditionError(
                f"sign condition -lambda (Z - Z_k) <= 0 fails at point {point}, coordinate {k}",
                point=point, coordinate=k,
            )
        delta_sq += diff**2
    G = _exp_table(Z, lam)
    return 0.5 * lam**2 * Z.space.expect(G.values * delta_sq) - entropy(G)


class HerbstCheck(NamedTuple):
    lhs: float
    rhs: float

    def holds(self, tol: float = DEFAULT_TOLERANCES.exponential) -> bool:
        return self.lhs <= self.rhs + tol


def herbst_mgf_check(Z: FunctionTable, lam: float, sup_delta: float,
                     choice: PerturbationChoice = PerturbationChoice.LEFT_SUP) -> HerbstCheck:
    """Return (E e^{lam (Z - EZ)}, exp(sup_delta lam^2 / 2)).

    ``sup_delta`` must be the sup-norm of Delta^2 for ``choice``; the left
    (sup) choice admits lam <= 0, the Maurer (inf) choice lam >= 0.
    """
    choice = PerturbationChoice.parse(choice)
    if not choice.admits(lam):
        raise PreconditionError(f"lambda={lam!r} has the wrong sign for {choice.name}")
    if sup_delta < 0:
        raise DomainError("sup_delta must be nonnegative")
    centred = Z.values - Z.mean()
    lhs = Z.space.expect(np.exp(lam * centred))
    return HerbstCheck(lhs, math.exp(0.5 * sup_delta * lam**2))


def random_space(rng: np.random.Generator, max_coords: int = 4, max_points: int = 4,
                 min_points: int = 1) -> ProductSpace:
    """A product space with random sizes and Dirichlet weights; points are 0..size-1."""
    n = int(rng.integers(1, max_coords + 1))
    coords = []
    for _ in range(n):
        size = int(rng.integers(min_points, max_points + 1))
        w = rng.dirichlet(np.ones(size))
        w = w / w.sum()
        coords.append(CoordinateSpace(list(range(size)), w))
    return ProductSpace(coords)


def random_table(rng: np.random.Generator, space: ProductSpace, low: float = 0.1,
                 high: float = 2.0, positive: bool = True) -> FunctionTable:
    return FunctionTable(space, rng.uniform(low, high, size=space.shape), positive=positive)
