"""
Monte Carlo tail frequencies of the k-th eigenvalue against the entropy-method bounds.

Samples are generated chunk by chunk; each sample draws from its own
counter-based stream (see :mod:`tailforge.rng`) and chunk boundaries do not
depend on the worker count, so a report is bitwise reproducible from its
config alone.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import stats

from .delta import maurer_eig_bounds, tail_bound
from .errors import ConfigurationError
from .rng import MAIN_STREAM, PILOT_STREAM, SeedTag
from .spectra import (
    EntryDistribution,
    _clamp_covariance,
    _descending_eigvalsh,
    sample_rectangular,
    sample_symmetric,
)

CHUNK_SIZE = 512
CSV_COLUMNS = ("t", "emp_right", "emp_left", "ci_half", "bound_right", "bound_left", "pass_right", "pass_left")


class Centering(enum.Enum):
    PILOT_MEAN = "pilot_mean"
    POOLED_MEAN = "pooled_mean"


@dataclass(frozen=True)
class SimulationConfig:
    ensemble: str = "covariance"
    n: int = 4
    N: int | None = 16
    k: int = 1
    dist: EntryDistribution = EntryDistribution.RADEMACHER
    samples: int = 20000
    pilot_samples: int = 2000
    t_grid: tuple = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)
    base_seed: int = 7
    centering: Centering = Centering.PILOT_MEAN
    ci_level: float = 0.99
    stderr_multiplier: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "dist", EntryDistribution.parse(self.dist))
        if not isinstance(self.centering, Centering):
            try:
                object.__setattr__(self, "centering", Centering(str(self.centering).lower()))
            except ValueError:
                raise ConfigurationError(f"unknown centering {self.centering!r}") from None
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        problems = self.problems()
        if problems:
            raise ConfigurationError("invalid simulation config: " + "; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.ensemble not in ("covariance", "symmetric"):
            out.append(f"ensemble must be 'covariance' or 'symmetric', got {self.ensemble!r}")
        if self.n < 1:
            out.append("n must be >= 1")
        if self.ensemble == "covariance" and (self.N is None or self.N < 1):
            out.append("covariance ensemble needs N >= 1")
        if self.ensemble == "symmetric" and self.dist.is_complex:
            out.append("the symmetric ensemble needs a real entry distribution")
        if not 1 <= self.k <= self.n:
            out.append(f"k must satisfy 1 <= k <= n, got k={self.k}")
        if self.samples < 100:
            out.append("samples must be >= 100")
        if self.centering is Centering.PILOT_MEAN and self.pilot_samples < 100:
            out.append("pilot_samples must be >= 100")
        if not self.t_grid:
            out.append("t_grid is empty")
        if any(t < 0 for t in self.t_grid) or list(self.t_grid) != sorted(self.t_grid):
            out.append("t_grid must be ascending and nonnegative")
        if not 0 < self.ci_level < 1:
            out.append("ci_level must lie in (0, 1)")
        if self.stderr_multiplier < 0:
            out.append("stderr_multiplier must be >= 0")
        if not 0 <= self.base_seed < 2**64:
            out.append("base_seed must be a 64-bit unsigned value")
        return out

    @classmethod
    def from_mapping(cls, mapping: dict) -> "SimulationConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigurationError(f"unknown simulation config keys: {unknown}")
        mapping = dict(mapping)
        if mapping.get("ensemble") == "symmetric":
            mapping.setdefault("N", None)
        return cls(**mapping)

    def to_mapping(self) -> dict:
        out = asdict(self)
        out["dist"] = self.dist.value
        out["centering"] = self.centering.value
        out["t_grid"] = list(self.t_grid)
        if self.N is None:
            del out["N"]
        return out

    def replace(self, **changes) -> "SimulationConfig":
        mapping = {f.name: getattr(self, f.name) for f in fields(self)}
        mapping.update(changes)
        return SimulationConfig(**mapping)


SYMMETRIC_DEFAULT = SimulationConfig(
    ensemble="symmetric", n=8, N=None, k=1,
    t_grid=(0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0),
)


def _chunk_eigenvalues(args) -> np.ndarray:
    mapping, stream, start, stop = args
    cfg = SimulationConfig.from_mapping(mapping)
    tags = [SeedTag(cfg.base_seed, i, stream) for i in range(start, stop)]
    if cfg.ensemble == "covariance":
        mats = np.stack([sample_rectangular(cfg.n, cfg.N, cfg.dist, tag).entries for tag in tags])
        W = mats @ np.conj(np.swapaxes(mats, -1, -2)) / cfg.N
        vals = _clamp_covariance(_descending_eigvalsh(W, tags[0]), tags[0])
    else:
        mats = np.stack([sample_symmetric(cfg.n, cfg.dist, tag).entries for tag in tags])
        vals = _descending_eigvalsh(mats, tags[0])
    return vals[:, cfg.k - 1]


def kth_eigenvalues(config: SimulationConfig, count: int, stream: int = MAIN_STREAM,
                    workers: int = 1) -> np.ndarray:
    """lambda_k of samples 0..count-1 on ``stream``; the result never depends on ``workers``."""
    mapping = config.to_mapping()
    jobs = [(mapping, stream, s, min(s + CHUNK_SIZE, count)) for s in range(0, count, CHUNK_SIZE)]
    if workers <= 1 or len(jobs) == 1:
        parts = [_chunk_eigenvalues(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_eigenvalues, jobs))
    return np.concatenate(parts)


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def estimate_center(config: SimulationConfig, workers: int = 1) -> tuple[float, float]:
    """Mean of lambda_k over an independent pilot batch, with its standard error."""
    return _mean_and_stderr(kth_eigenvalues(config, config.pilot_samples, PILOT_STREAM, workers))


def clopper_pearson(count: int, trials: int, level: float = 0.99) -> tuple[float, float]:
    """Exact two-sided binomial interval for ``count`` successes out of ``trials``."""
    alpha = 1.0 - level
    lo = 0.0 if count == 0 else float(stats.beta.ppf(alpha / 2, count, trials - count + 1))
    hi = 1.0 if count == trials else float(stats.beta.ppf(1 - alpha / 2, count + 1, trials - count))
    return lo, hi


@dataclass
class TailRow:
    t: float
    count_right: int
    count_left: int
    emp_right: float
    emp_left: float
    ci_half_right: float
    ci_half_left: float
    bound_right: float
    bound_left: float
    slack_center: float
    pass_right: bool
    pass_left: bool

    @property
    def ci_half(self) -> float:
        return max(self.ci_half_right, self.ci_half_left)

    def margin(self, side: str) -> float:
        """Allowed minus observed; negative means a failure."""
        if side == "right":
            return self.bound_right + self.ci_half_right + self.slack_center - self.emp_right
        return self.bound_left + self.ci_half_left + self.slack_center - self.emp_left


@dataclass
class TailReport:
    config: SimulationConfig
    center: float
    center_stderr: float
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.pass_right and r.pass_left for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([repr(r.t), repr(r.emp_right), repr(r.emp_left), repr(r.ci_half),
                             repr(r.bound_right), repr(r.bound_left),
                             str(r.pass_right).lower(), str(r.pass_left).lower()])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "config": self.config.to_mapping(),
            "center": {"estimate": self.center, "stderr": self.center_stderr,
                       "method": self.config.centering.value},
            "passed": self.passed,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def theoretical_bounds(config: SimulationConfig, t: float) -> tuple[float, float]:
    """(right, left) bound at threshold ``t`` for the configured ensemble."""
    if config.ensemble == "covariance":
        b = tail_bound(t, config.n**2 / config.N)
        return b, b
    return maurer_eig_bounds(config.k, t)


def tail_estimate(config: SimulationConfig, workers: int = 1) -> TailReport:
    eigs = kth_eigenvalues(config, config.samples, MAIN_STREAM, workers)
    if config.centering is Centering.PILOT_MEAN:
        center, se = estimate_center(config, workers)
    else:
        center, se = _mean_and_stderr(eigs)
    dev = eigs - center
    m = eigs.size
    slack_center = config.stderr_multiplier * se
    report = TailReport(config, center, se)
    for t in config.t_grid:
        cr = int(np.count_nonzero(dev >= t))
        cl = int(np.count_nonzero(dev <= -t))
        lo_r, hi_r = clopper_pearson(cr, m, config.ci_level)
        lo_l, hi_l = clopper_pearson(cl, m, config.ci_level)
        br, bl = theoretical_bounds(config, t)
        er, el = cr / m, cl / m
        hr, hl = 0.5 * (hi_r - lo_r), 0.5 * (hi_l - lo_l)
        report.rows.append(TailRow(
            t=t, count_right=cr, count_left=cl, emp_right=er, emp_left=el,
            ci_half_right=hr, ci_half_left=hl, bound_right=br, bound_left=bl,
            slack_center=slack_center,
            pass_right=er <= br + hr + slack_center,
            pass_left=el <= bl + hl + slack_center,
        ))
    return report


def compare_report(report: TailReport) -> tuple[int, str]:
    """Exit status (0 iff every row passes on both sides) and a short summary."""
    failures = []
    tightest = None
    for r in report.rows:
        for side, ok in (("right", r.pass_right), ("left", r.pass_left)):
            margin = r.margin(side)
            if tightest is None or margin < tightest[0]:
                tightest = (margin, r.t, side)
            if not ok:
                emp = r.emp_right if side == "right" else r.emp_left
                bound = r.bound_right if side == "right" else r.bound_left
                failures.append(f"FAIL t={r.t:g} side={side} empirical={emp:.6g} bound={bound:.6g}")
    lines = [f"center={report.center:.6g} (stderr {report.center_stderr:.3g}, {report.config.centering.value})"]
    if tightest is not None:
        lines.append(f"tightest margin {tightest[0]:.6g} at t={tightest[1]:g} side={tightest[2]}")
    lines.extend(failures)
    lines.append(f"{'PASS' if not failures else 'FAIL'}: {len(report.rows)} thresholds, {len(failures)} failing")
    return (0 if not failures else 1), "\n".join(lines)
