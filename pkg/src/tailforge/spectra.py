"""
Bounded-entry random matrices and their spectra.

Covariance spectra use the (1/N) X X* normalisation of an n x N matrix X;
symmetric spectra are the raw eigenvalues of X. Every entry has modulus at
most 1. Eigenvalues are always reported in descending order, and ``k`` is the
1-based rank of an eigenvalue (k = 1 is the largest).

The Marcenko-Pastur density used by :func:`mp_distance` is the standard
textbook formula for unit-variance entries,

    f(x) = sqrt((b - x)(x - a)) / (2 pi c x),  a = (1 - sqrt c)^2,  b = (1 + sqrt c)^2,

with an atom of mass 1 - 1/c at zero when c > 1.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .choices import PerturbationChoice
from .errors import CapacityError, ConfigurationError, DomainError, NumericError, PreconditionError
from .rng import SeedTag, as_seed_tag

MODULUS_SLACK = 1e-15
NEGATIVE_EIG_TOL = 1e-10
DEFAULT_CANDIDATE_CAP = 2**16


class EntryDistribution(enum.Enum):
    RADEMACHER = "rademacher"
    UNIFORM_REAL = "uniform_real"
    COMPLEX_RADEMACHER = "complex_rademacher"
    COMPLEX_DISK = "complex_disk"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            try:
                return cls[str(value).strip().upper()]
            except KeyError:
                raise ConfigurationError(f"unknown entry distribution {value!r}") from None

    @property
    def is_complex(self) -> bool:
        return self in (EntryDistribution.COMPLEX_RADEMACHER, EntryDistribution.COMPLEX_DISK)

    @property
    def second_moment(self) -> float:
        """E|x|^2."""
        return {
            EntryDistribution.RADEMACHER: 1.0,
            EntryDistribution.UNIFORM_REAL: 1.0 / 3.0,
            EntryDistribution.COMPLEX_RADEMACHER: 1.0,
            EntryDistribution.COMPLEX_DISK: 0.5,
        }[self]

    @property
    def support(self):
        """Finite support as an array, or None for continuous laws."""
        if self is EntryDistribution.RADEMACHER:
            return np.array([-1.0, 1.0])
        if self is EntryDistribution.COMPLEX_RADEMACHER:
            return np.array([1, -1, 1j, -1j], dtype=complex)
        return None

    @property
    def real_counterpart(self) -> "EntryDistribution":
        """Law used for the real diagonal of a hermitian sample."""
        return {
            EntryDistribution.COMPLEX_RADEMACHER: EntryDistribution.RADEMACHER,
            EntryDistribution.COMPLEX_DISK: EntryDistribution.UNIFORM_REAL,
        }.get(self, self)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self is EntryDistribution.RADEMACHER:
            return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
        if self is EntryDistribution.UNIFORM_REAL:
            return rng.uniform(-1.0, 1.0, size=size)
        if self is EntryDistribution.COMPLEX_RADEMACHER:
            return np.array([1, -1, 1j, -1j], dtype=complex)[rng.integers(0, 4, size=size)]
        # uniform on the closed unit disk, by rejection from the bounding square
        out = np.empty(size, dtype=complex)
        filled = 0
        while filled < size:
            need = size - filled
            draws = rng.uniform(-1.0, 1.0, size=(max(8, 2 * need), 2))
            z = draws[:, 0] + 1j * draws[:, 1]
            z = z[np.abs(z) <= 1.0][:need]
            out[filled:filled + z.size] = z
            filled += z.size
        return out


@dataclass(frozen=True, eq=False)
class MatrixSample:
    """One realisation of a bounded-entry random matrix.

    ``kind`` is ``"symmetric"`` (n x n, equal to its conjugate transpose) or
    ``"rectangular"`` (n x N).
    """

    kind: str
    entries: np.ndarray
    seed_tag: SeedTag | None = None
    dist: EntryDistribution | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2:
            raise DomainError("matrix sample must be two-dimensional")
        if self.kind not in ("symmetric", "rectangular"):
            raise DomainError(f"unknown matrix kind {self.kind!r}")
        if np.any(np.abs(entries) > 1.0 + MODULUS_SLACK):
            raise DomainError("matrix entries must have modulus <= 1")
        if self.kind == "symmetric":
            if entries.shape[0] != entries.shape[1] or not np.array_equal(entries, entries.conj().T):
                raise DomainError("symmetric sample must equal its conjugate transpose")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    scaling: str

    def __getitem__(self, k: int) -> float:
        """The k-th largest eigenvalue, k >= 1."""
        if not 1 <= k <= len(self.eigenvalues):
            raise IndexError(f"eigenvalue rank {k} out of range 1..{len(self.eigenvalues)}")
        return float(self.eigenvalues[k - 1])

    def __len__(self):
        return len(self.eigenvalues)


def sample_rectangular(n: int, N: int, dist, seed_tag) -> MatrixSample:
    if n < 1 or N < 1:
        raise DomainError(f"dimensions must be >= 1, got n={n}, N={N}")
    dist = EntryDistribution.parse(dist)
    tag = as_seed_tag(seed_tag)
    entries = dist.sample(tag.generator(), n * N).reshape(n, N)
    return MatrixSample("rectangular", entries, tag, dist)


def sample_symmetric(n: int, dist, seed_tag, hermitian: bool = False) -> MatrixSample:
    """Independent entries on and above the diagonal, mirrored below.

    Complex laws need ``hermitian=True``; the lower triangle is then the
    conjugate of the upper one and the diagonal comes from the law's real
    counterpart.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    dist = EntryDistribution.parse(dist)
    if dist.is_complex and not hermitian:
        raise ConfigurationError(f"{dist.name} is complex; a real symmetric ensemble needs a real law")
    tag = as_seed_tag(seed_tag)
    rng = tag.generator()
    iu = np.triu_indices(n, k=1)
    diag = dist.real_counterpart.sample(rng, n)
    upper = dist.sample(rng, iu[0].size)
    X = np.zeros((n, n), dtype=complex if dist.is_complex else float)
    X[iu] = upper
    X = X + X.conj().T
    X[np.diag_indices(n)] = diag
    return MatrixSample("symmetric", X, tag, dist)


def _descending_eigvalsh(mats: np.ndarray, seed_tag=None) -> np.ndarray:
    try:
        vals = np.linalg.eigvalsh(mats)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}", seed_tag) from exc
    if not np.all(np.isfinite(vals)):
        raise NumericError("eigensolver returned non-finite values", seed_tag)
    return vals[..., ::-1]


def covariance_matrix(X: MatrixSample) -> np.ndarray:
    A = X.entries
    return (A @ A.conj().T) / X.N


def _clamp_covariance(vals: np.ndarray, seed_tag=None) -> np.ndarray:
    if vals.size and vals.min() < -NEGATIVE_EIG_TOL:
        raise NumericError(f"covariance eigenvalue {vals.min()!r} below -{NEGATIVE_EIG_TOL}", seed_tag)
    return np.maximum(vals, 0.0)


def covariance_spectrum(X: MatrixSample) -> Spectrum:
    """Descending eigenvalues of (1/N) X X*, tiny negatives clamped to zero."""
    if X.kind != "rectangular":
        raise DomainError("covariance spectrum needs a rectangular sample")
    vals = _descending_eigvalsh(covariance_matrix(X), X.seed_tag)
    return Spectrum(_clamp_covariance(vals, X.seed_tag), "1/N")


def symmetric_spectrum(X: MatrixSample) -> Spectrum:
    if X.kind != "symmetric":
        raise DomainError("symmetric spectrum needs a symmetric sample")
    return Spectrum(_descending_eigvalsh(X.entries, X.seed_tag), "none")


def rademacher_columns(n: int) -> np.ndarray:
    """All 2^n columns with entries in {-1, +1}, as rows of a (2^n, n) array."""
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))


def _check_candidates(X: MatrixSample, candidates, cap: int) -> np.ndarray:
    cand = np.asarray(candidates)
    if cand.ndim == 1:
        cand = cand[None, :]
    if cand.shape[0] == 0:
        raise DomainError("candidate set is empty")
    if cand.shape[0] > cap:
        raise CapacityError(f"{cand.shape[0]} candidate columns exceed the cap of {cap}")
    if cand.shape[1] != X.n:
        raise DomainError(f"candidate columns have length {cand.shape[1]}, expected {X.n}")
    if np.any(np.abs(cand) > 1.0 + MODULUS_SLACK):
        raise DomainError("candidate columns must have entries of modulus <= 1")
    return cand


def replaced_column_eigenvalues(X: MatrixSample, t0: int, k: int, candidates,
                                cap: int = DEFAULT_CANDIDATE_CAP) -> np.ndarray:
    """lambda_k((1/N) Y Y*) for each candidate, Y being X with column ``t0`` replaced."""
    if X.kind != "rectangular":
        raise DomainError("column perturbation needs a rectangular sample")
    if not 0 <= t0 < X.N:
        raise IndexError(f"column {t0} out of range for N={X.N}")
    if not 1 <= k <= X.n:
        raise IndexError(f"eigenvalue rank {k} out of range 1..{X.n}")
    cand = _check_candidates(X, candidates, cap)
    dtype = np.result_type(X.entries.dtype, cand.dtype)
    Y = np.broadcast_to(X.entries.astype(dtype), (cand.shape[0],) + X.entries.shape).copy()
    Y[:, :, t0] = cand
    W = Y @ np.conj(np.swapaxes(Y, -1, -2)) / X.N
    vals = _clamp_covariance(_descending_eigvalsh(W, X.seed_tag), X.seed_tag)
    return vals[:, k - 1]


def column_perturbation_extreme(X: MatrixSample, t0: int, k: int, choice, candidates,
                                cap: int = DEFAULT_CANDIDATE_CAP) -> float:
    """Inf (MAURER_INF) or sup (LEFT_SUP) of lambda_k over column-``t0`` replacements."""
    choice = PerturbationChoice.parse(choice)
    vals = replaced_column_eigenvalues(X, t0, k, candidates, cap)
    return float(vals.min() if choice is PerturbationChoice.MAURER_INF else vals.max())


@dataclass
class Theorem2Report:
    """Per-column outcome of the one-column replacement inequalities.

    ``z_inf[t0]`` and ``z_sup[t0]`` are the extremes of lambda_k over the
    candidate replacements of column t0.
    """

    n: int
    N: int
    k: int
    z: float
    z_inf: np.ndarray
    z_sup: np.ndarray
    tol: float
    violations: list = field(default_factory=list)

    @property
    def per_column_bound(self) -> float:
        return self.n / self.N

    @property
    def delta_bound(self) -> float:
        return self.n**2 / self.N

    @property
    def delta_m(self) -> float:
        return float(np.sum((self.z - self.z_inf) ** 2))

    @property
    def delta_l(self) -> float:
        return float(np.sum((self.z_sup - self.z) ** 2))

    @property
    def ok(self) -> bool:
        return not self.violations


def theorem2_delta_check(X: MatrixSample, k: int, candidates, tol: float = 1e-12,
                         cap: int = DEFAULT_CANDIDATE_CAP) -> Theorem2Report:
    """Check 0 <= Z - Z_inf <= n/N and 0 <= Z_sup - Z <= n/N for every column,
    and that both Delta^2 sums stay within n^2/N.

    ``tol`` absorbs eigensolver roundoff only. Every column of X must itself be
    a candidate, otherwise the lower inequalities are not guaranteed.
    """
    cand = _check_candidates(X, candidates, cap)
    for t0 in range(X.N):
        if not np.any(np.all(cand == X.entries[:, t0], axis=1)):
            raise PreconditionError(f"column {t0} of X is not among the candidates", coordinate=t0)
    z = covariance_spectrum(X)[k]
    z_inf = np.empty(X.N)
    z_sup = np.empty(X.N)
    for t0 in range(X.N):
        vals = replaced_column_eigenvalues(X, t0, k, cand, cap)
        z_inf[t0], z_sup[t0] = vals.min(), vals.max()
    report = Theorem2Report(X.n, X.N, k, z, z_inf, z_sup, tol)
    bound = report.per_column_bound
    for t0 in range(X.N):
        down, up = z - z_inf[t0], z_sup[t0] - z
        if not -tol <= down <= bound + tol:
            report.violations.append({"t0": t0, "side": "inf", "z": z, "z_t0": z_inf[t0], "gap": down})
        if not -tol <= up <= bound + tol:
            report.violations.append({"t0": t0, "side": "sup", "z": z, "z_t0": z_sup[t0], "gap": up})
    for name, value in (("delta_m", report.delta_m), ("delta_l", report.delta_l)):
        if value > report.delta_bound + tol:
            report.violations.append({"t0": None, "side": name, "value": value, "bound": report.delta_bound})
    return report


def mp_support(c: float) -> tuple[float, float]:
    _check_ratio(c)
    s = math.sqrt(c)
    return (1.0 - s) ** 2, (1.0 + s) ** 2


def _check_ratio(c):
    if not (0.0 < c < math.inf):
        raise DomainError(f"ratio c must lie in (0, inf), got {c!r}")


def mp_density(x, c: float) -> np.ndarray:
    """Absolutely continuous part of the Marcenko-Pastur law for ratio c."""
    a, b = mp_support(c)
    x = np.asarray(x, dtype=float)
    inside = (x > a) & (x < b) & (x > 0)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt((b - xi) * (xi - a)) / (2.0 * math.pi * c * xi)
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
# graded toward theta = 0, where the integrand has a near-real pole for c close to 1
_THETA_GRID = np.unique(np.concatenate([math.pi * np.geomspace(1e-9, 1.0, 480), np.linspace(0.0, math.pi, 513)]))


def _mp_angle_integrand(theta, c):
    # density after x = (1 + c) - 2 sqrt(c) cos(theta); denominator written without cancellation
    s = math.sqrt(c)
    x = (1.0 - s) ** 2 + 4.0 * s * np.sin(0.5 * theta) ** 2
    return (4.0 * c * np.sin(theta) ** 2) / (2.0 * math.pi * c * x)


def mp_cdf(x, c: float) -> np.ndarray:
    """Marcenko-Pastur CDF for ratio c, atom at zero included when c > 1."""
    a, b = mp_support(c)
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1)
    s = math.sqrt(c)
    cos_arg = np.clip(((1.0 + c) - flat) / (2.0 * s), -1.0, 1.0)
    theta = np.arccos(cos_arg)
    ts = np.union1d(theta, _THETA_GRID)
    lo, hi = ts[:-1], ts[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
    seg = half * (_mp_angle_integrand(nodes, c) @ _GL_WEIGHTS)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    cont = cum[np.searchsorted(ts, theta)]
    cont = np.where(flat <= a, 0.0, np.where(flat >= b, min(1.0, 1.0 / c), cont))
    if c > 1.0:
        cont = cont + np.where(flat >= 0.0, 1.0 - 1.0 / c, 0.0)
    return np.clip(cont, 0.0, 1.0).reshape(x.shape)


def ks_distance(values, cdf, cdf_left=None) -> float:
    """sup_x |F_n(x) - F(x)| for the empirical CDF of ``values``.

    ``cdf_left`` gives F(x-) and is only needed when F has atoms.
    """
    xs = np.sort(np.asarray(values, dtype=float).reshape(-1))
    m = xs.size
    if m == 0:
        raise DomainError("no values to compare")
    F = cdf(xs)
    Fl = F if cdf_left is None else cdf_left(xs)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - F), np.max(Fl - (i - 1) / m)))


def mp_distance(spectra, c: float) -> float:
    """Kolmogorov-Smirnov distance between the pooled ESD and the Marcenko-Pastur law.

    Only meaningful for unit-variance entries under the (1/N) scaling.
    """
    _check_ratio(c)
    pooled = np.concatenate([np.asarray(s.eigenvalues, dtype=float) for s in spectra])
    # rank-deficiency zeros come out of the eigensolver as roundoff-sized positives
    scale = max(1.0, float(np.max(np.abs(pooled))))
    pooled = np.where(np.abs(pooled) <= NEGATIVE_EIG_TOL * scale, 0.0, pooled)
    atom = 1.0 - 1.0 / c if c > 1.0 else 0.0

    def left(xs):
        F = mp_cdf(xs, c)
        return np.where(xs == 0.0, F - atom, F) if atom else F

    return ks_distance(pooled, lambda xs: mp_cdf(xs, c), left)


def esd_mp_table(spectra, c: float, bins: int = 40):
    """Binned ESD density next to the Marcenko-Pastur bin-averaged density.

    Returns a list of (left, right, esd_density, mp_density) rows over [0, b].
    """
    _, b = mp_support(c)
    pooled = np.concatenate([np.asarray(s.eigenvalues, dtype=float) for s in spectra])
    hi = max(b, float(pooled.max()))
    edges = np.linspace(0.0, hi, bins + 1)
    counts, _ = np.histogram(pooled, bins=edges)
    width = np.diff(edges)
    esd = counts / (pooled.size * width)
    F = mp_cdf(edges, c)
    # the atom at zero belongs to the first bin
    mp = np.diff(F) / width
    if c > 1.0:
        mp[0] += (1.0 - 1.0 / c) / width[0]
    return [(float(edges[i]), float(edges[i + 1]), float(esd[i]), float(mp[i])) for i in range(bins)]
