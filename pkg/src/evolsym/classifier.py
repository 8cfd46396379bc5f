"""Spectral-bound sampling, Petrovskii verdicts and hyperbolicity classification.

The spectral bound ``s0 = sup_xi max Re sigma(A(xi))`` is probed on dyadic
shells ``|xi| = 2**j``.  A bounded family of shell maxima (logarithmic growth
at most) is taken as evidence of the Petrovskii condition; this is a sampled
verdict and is labelled as such.  Degree data (``deg P`` and the reduced
order ``p0``) are computed exactly from the symbolic characteristic
polynomial.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import linregress, norm, qmc

from .errors import NumericalFailure
from .linalg import matrix_exp, spectral_abscissa_batch
from .operator import CompanionFamily, PolyMatrixOperator, char_poly_in_lambda, reduced_order, total_degree

__all__ = [
    "SamplingConfig",
    "ShellSample",
    "SpectralReport",
    "Classification",
    "GrowthReport",
    "SATISFIED",
    "VIOLATED",
    "INCONCLUSIVE",
    "direction_set",
    "sample_spectral_bound",
    "petrovskii_verdict",
    "classify",
    "growth_bound_check",
]

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

MIN_SHELLS_FOR_VERDICT = 4
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class SamplingConfig:
    """Parameters for dyadic-shell sampling.

    ``shells`` is the largest shell index J (radii ``2**0 .. 2**J``).
    ``directions`` and ``random_directions`` are per-shell counts of
    quasi-random and seeded-random unit vectors; both sets are closed under
    ``xi -> -xi``.  ``slope_threshold=None`` means ``10 * m * max(order, 1)``.
    """

    shells: int = 16
    directions: int = 64
    random_directions: int = 64
    seed: int = 0
    slope_threshold: float | None = None

    def __post_init__(self):
        if self.shells < 0:
            raise ValueError("shells must be non-negative")
        if self.directions < 0 or self.random_directions < 0:
            raise ValueError("direction counts must be non-negative")


@dataclass(frozen=True)
class ShellSample:
    radius: float
    directions: np.ndarray = field(repr=False, compare=False)
    abscissa_max: float

    def to_dict(self) -> dict:
        return {"radius": self.radius, "direction_count": int(len(self.directions)), "abscissa_max": self.abscissa_max}


@dataclass(frozen=True)
class SpectralReport:
    shells: tuple[ShellSample, ...]
    origin_abscissa: float
    s0_estimate: float
    log_fit_slope: float
    log_fit_stderr: float
    slope_threshold: float
    verdict_bounded: bool
    failures: int
    samples: int

    @property
    def directions(self) -> np.ndarray:
        return self.shells[0].directions if self.shells else np.zeros((0, 0))

    def to_dict(self) -> dict:
        return {
            "shells": [s.to_dict() for s in self.shells],
            "directions": self.directions.tolist(),
            "origin_abscissa": self.origin_abscissa,
            "s0_estimate": self.s0_estimate,
            "log_fit_slope": self.log_fit_slope,
            "log_fit_stderr": self.log_fit_stderr,
            "slope_threshold": self.slope_threshold,
            "verdict_bounded": self.verdict_bounded,
            "failures": self.failures,
            "samples": self.samples,
        }


@dataclass(frozen=True)
class Classification:
    petrovskii: str
    deg_P: int
    m: int
    p0: Fraction
    hyperbolic: bool
    order: int
    s0_estimate: float
    confidence: str
    ehrenpreis_note: str

    def to_dict(self) -> dict:
        return {
            "petrovskii": self.petrovskii,
            "deg_P": self.deg_P,
            "m": self.m,
            "p0": str(self.p0),
            "p0_value": float(self.p0),
            "hyperbolic": self.hyperbolic,
            "order": self.order,
            "s0_estimate": self.s0_estimate,
            "confidence": self.confidence,
            "ehrenpreis_note": self.ehrenpreis_note,
        }


@dataclass(frozen=True)
class GrowthReport:
    ok: bool
    k: int | None
    sup: float
    k_cap: int
    s0: float
    epsilon: float
    horizon: float
    tail_slopes: tuple[float, ...]
    per_shell_sup: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "k": self.k,
            "sup": self.sup,
            "k_cap": self.k_cap,
            "s0": self.s0,
            "epsilon": self.epsilon,
            "horizon": self.horizon,
            "tail_slopes": list(self.tail_slopes),
            "per_shell_sup": list(self.per_shell_sup),
        }


def _unit_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@functools.lru_cache(maxsize=64)
def _direction_set(n: int, count: int, random_count: int, seed: int) -> np.ndarray:
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
        dirs.setflags(write=False)
        return dirs
    eye = np.eye(n)
    parts = [eye, -eye]
    half = count // 2
    if half:
        # skip the Halton origin, which has no direction
        pts = qmc.Halton(d=n, scramble=False).random(half + 1)[1:]
        q = _unit_rows(norm.ppf(pts))
        parts += [q, -q]
    rhalf = random_count // 2
    if rhalf:
        r = _unit_rows(np.random.default_rng(seed).standard_normal((rhalf, n)))
        parts += [r, -r]
    dirs = np.vstack(parts)
    dirs.setflags(write=False)
    return dirs


def direction_set(n: int, count: int = 64, random_count: int = 64, seed: int = 0) -> np.ndarray:
    """Deterministic unit directions: ``+-e_j``, Halton points and seeded normals, all antipodally closed."""
    return _direction_set(int(n), int(count), int(random_count), int(seed))


def _default_threshold(op, config: SamplingConfig) -> float:
    if config.slope_threshold is not None:
        return float(config.slope_threshold)
    return 10.0 * op.m * max(op.order, 1)


def sample_spectral_bound(op: PolyMatrixOperator | CompanionFamily, config: SamplingConfig | None = None) -> SpectralReport:
    """Sample ``max Re sigma(A(xi))`` on dyadic shells and estimate ``s0``.

    The origin ``xi = 0`` is always sampled in addition to the shells, and
    ``s0_estimate`` is the largest sampled abscissa.  Growth is judged from
    the least-squares slope of shell maxima against ``log(1 + radius)``
    over the upper half of the shells; if that slope is at or above the
    threshold the estimate is reported as ``inf``.

    Raises
    ------
    NumericalFailure
        If more than 1% of sampled points fail.
    """
    config = config or SamplingConfig()
    dirs = direction_set(op.n, config.directions, config.random_directions, config.seed)
    radii = 2.0 ** np.arange(config.shells + 1)
    xis = np.concatenate([np.zeros((1, op.n)), (radii[:, None, None] * dirs[None]).reshape(-1, op.n)])
    with np.errstate(over="ignore", invalid="ignore"):
        symbols = op.symbols(xis)
    absc, failed = spectral_abscissa_batch(symbols)
    nfail = int(failed.sum())
    if nfail > MAX_FAILURE_FRACTION * len(xis):
        raise NumericalFailure(f"{nfail} of {len(xis)} spectral samples failed")

    origin = float(absc[0]) if not failed[0] else -math.inf
    per_shell = absc[1:].reshape(len(radii), len(dirs))
    shell_max = np.nanmax(np.where(np.isnan(per_shell), -np.inf, per_shell), axis=1)
    shells = tuple(ShellSample(float(r), dirs, float(a)) for r, a in zip(radii, shell_max))

    threshold = _default_threshold(op, config)
    tail = slice(len(radii) // 2, None)
    x, y = np.log1p(radii[tail]), shell_max[tail]
    if len(x) >= 2 and np.all(np.isfinite(y)):
        fit = linregress(x, y)
        slope, stderr = float(fit.slope), float(fit.stderr)
    elif len(x) >= 2:
        slope, stderr = math.inf, 0.0
    else:
        slope, stderr = 0.0, math.inf
    bounded = bool(slope < threshold)
    s0 = float(max(origin, float(np.max(shell_max)))) if bounded else math.inf
    return SpectralReport(
        shells=shells,
        origin_abscissa=origin,
        s0_estimate=s0,
        log_fit_slope=slope,
        log_fit_stderr=stderr,
        slope_threshold=threshold,
        verdict_bounded=bounded,
        failures=nfail,
        samples=len(xis),
    )


def petrovskii_verdict(report: SpectralReport) -> str:
    """``"satisfied"``, ``"violated"`` or ``"inconclusive"`` from a sampled report.

    At least ``MIN_SHELLS_FOR_VERDICT + 1`` shells are required for a
    definite answer.  "violated" additionally needs the slope to exceed the
    threshold by two standard errors.
    """
    if len(report.shells) < MIN_SHELLS_FOR_VERDICT + 1:
        return INCONCLUSIVE
    if report.verdict_bounded:
        return SATISFIED
    if report.log_fit_slope - 2.0 * report.log_fit_stderr > report.slope_threshold:
        return VIOLATED
    return INCONCLUSIVE


_EHRENPREIS_HYPERBOLIC = (
    "hyperbolic in the Garding sense (bounded spectral bound and deg P = m); this implies the "
    "Ehrenpreis bound |Re lambda| <= C(1 + |Re zeta|) on the complex characteristic variety. "
    "Recorded as an implication, not verified over complex zeta."
)
_EHRENPREIS_NOT = "not hyperbolic: the Ehrenpreis bound is not asserted"


@functools.lru_cache(maxsize=128)
def _classify_cached(op, config: SamplingConfig) -> Classification:
    Q = char_poly_in_lambda(op)
    degP = total_degree(Q)
    p0 = reduced_order(Q)
    report = sample_spectral_bound(op, config)
    verdict = petrovskii_verdict(report)
    hyperbolic = verdict == SATISFIED and degP == op.m
    confidence = (
        f"sampled: {len(report.shells)} dyadic shells x {len(report.directions)} directions + origin; "
        f"tail log-slope {report.log_fit_slope:.6g} vs threshold {report.slope_threshold:.6g}; "
        "degrees exact"
    )
    return Classification(
        petrovskii=verdict,
        deg_P=degP,
        m=op.m,
        p0=p0,
        hyperbolic=hyperbolic,
        order=op.order,
        s0_estimate=report.s0_estimate,
        confidence=confidence,
        ehrenpreis_note=_EHRENPREIS_HYPERBOLIC if hyperbolic else _EHRENPREIS_NOT,
    )


def classify(op: PolyMatrixOperator | CompanionFamily, config: SamplingConfig | None = None) -> Classification:
    """Exact degree data plus a sampled Petrovskii verdict.

    ``hyperbolic`` is true iff the verdict is "satisfied" and
    ``deg P == m`` (equivalently ``p0 <= 1``).  Results are cached per
    operator and configuration.
    """
    return _classify_cached(op, config or SamplingConfig())


def growth_bound_check(
    op: PolyMatrixOperator | CompanionFamily,
    s0: float,
    *,
    epsilon: float = 0.1,
    horizon: float = 10.0,
    dt: float = 0.5,
    max_shell: int = 8,
    config: SamplingConfig | None = None,
    tail_slope_tol: float = 0.25,
) -> GrowthReport:
    """Smallest ``k`` for which ``e^{-(s0+eps)t} (1+|xi|)^{-k} ||exp(tA(xi))||_2`` stays bounded.

    The supremum is taken over ``t in {0, dt, ..., horizon}`` and over the
    origin plus the shells ``|xi| = 2**j``, ``j <= max_shell``.  A candidate
    ``k`` counts as bounded when the per-shell suprema stop growing: their
    log-log slope over the upper half of the shells is at most
    ``tail_slope_tol``.  ``k`` is searched up to ``2 * m * order``.
    """
    if not math.isfinite(s0):
        raise ValueError("growth_bound_check needs a finite s0")
    config = config or SamplingConfig()
    dirs = direction_set(op.n, config.directions, config.random_directions, config.seed)
    radii = np.concatenate([[0.0], 2.0 ** np.arange(max_shell + 1)])
    xis = (radii[:, None, None] * dirs[None]).reshape(-1, op.n)
    A = op.symbols(xis)
    times = np.arange(0.0, horizon + dt / 2, dt)

    # shell-wise sup over t and directions of e^{-(s0+eps)t} ||exp(tA)||
    weighted = np.empty((len(times), len(radii)))
    for i, t in enumerate(times):
        E = matrix_exp(t * A)
        norms = np.linalg.norm(E, ord=2, axis=(-2, -1)).reshape(len(radii), len(dirs))
        weighted[i] = math.exp(-(s0 + epsilon) * t) * norms.max(axis=1)
    shell_sup_k0 = weighted.max(axis=0)

    k_cap = 2 * op.m * max(op.order, 1)
    tail = slice(1 + (len(radii) - 1) // 2, None)
    slopes = []
    for k in range(k_cap + 1):
        per_shell = shell_sup_k0 * (1.0 + radii) ** (-k)
        slope = float(np.polyfit(np.log1p(radii[tail]), np.log(per_shell[tail]), 1)[0])
        slopes.append(slope)
        if slope <= tail_slope_tol:
            return GrowthReport(
                ok=True,
                k=k,
                sup=float(per_shell.max()),
                k_cap=k_cap,
                s0=float(s0),
                epsilon=epsilon,
                horizon=horizon,
                tail_slopes=tuple(slopes),
                per_shell_sup=tuple(float(v) for v in per_shell),
            )
    return GrowthReport(
        ok=False,
        k=None,
        sup=math.inf,
        k_cap=k_cap,
        s0=float(s0),
        epsilon=epsilon,
        horizon=horizon,
        tail_slopes=tuple(slopes),
        per_shell_sup=tuple(float(v) for v in shell_sup_k0),
    )
