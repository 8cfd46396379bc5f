"""Per-frequency propagation, discrete kernels and propagation cones.

On the periodic grid the evolution ``u_t = G(d) u`` is solved exactly per
Fourier mode: ``u_hat(t, xi) = exp(t A(xi)) u_hat(0, xi)``.  The discrete
kernel ``S_t`` is the inverse transform of ``xi -> exp(t A(xi))``; at
``t = 0`` it is the discrete delta times the identity.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .classifier import VIOLATED, SamplingConfig, classify, direction_set, petrovskii_verdict, sample_spectral_bound
from .errors import ConeUndefined, DimensionMismatch, GridResolutionError, MatrixExpOverflow, PetrovskiiViolation
from .fields import FREQUENCY, PHYSICAL, FieldState, GridSpec, KernelField, fft_data, forward_fft, ifft_data, inverse_fft
from .linalg import matrix_exp

__all__ = [
    "multiplier",
    "propagate",
    "kernel",
    "semigroup_residual",
    "support_radius",
    "ConeEstimate",
    "cone_estimate",
    "mass_outside_cone",
    "unitarity_check",
    "bump_field",
    "mode_field",
    "random_field",
]


@functools.lru_cache(maxsize=128)
def _petrovskii_status(op) -> str:
    return petrovskii_verdict(sample_spectral_bound(op, SamplingConfig()))


def _check_operator(op, grid: GridSpec, m: int | None, force: bool, check: bool):
    if grid.n != op.n:
        raise DimensionMismatch(f"grid has n={grid.n}, operator has n={op.n}")
    if m is not None and m != op.m:
        raise DimensionMismatch(f"field has {m} components, operator has m={op.m}")
    if check and not force and _petrovskii_status(op) == VIOLATED:
        raise PetrovskiiViolation("operator fails the spectral-bound test; pass force=True to propagate anyway")


def multiplier(op, grid: GridSpec, t: float, *, mollifier_cells: float | None = None) -> np.ndarray:
    """``exp(t A(xi))`` on the frequency grid, shape ``(m, m, N_1, ..., N_n)``.

    With ``mollifier_cells`` set, the result is multiplied by the Gaussian
    ``exp(-(sigma |xi|)^2 / 2)`` with ``sigma = mollifier_cells * cell``,
    which turns the kernel into a smoothed kernel with rapidly decaying tails.

    Raises
    ------
    MatrixExpOverflow
        Naming the first frequency at which ``exp(t A(xi))`` overflows.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    xis = grid.frequencies().reshape(-1, grid.n)
    A = op.symbols(xis)
    try:
        E = matrix_exp(t * A)
    except MatrixExpOverflow as exc:
        raise MatrixExpOverflow(exc.norm, where=xis[exc.index], index=exc.index) from None
    if mollifier_cells:
        sigma = mollifier_cells * grid.cell
        E = E * np.exp(-0.5 * sigma**2 * np.sum(xis**2, axis=-1))[:, None, None]
    return np.moveaxis(E.reshape(grid.shape + (op.m, op.m)), (-2, -1), (0, 1))


def propagate(op, u0: FieldState, t: float, *, force: bool = False, check: bool = True) -> FieldState:
    """Solve ``u' = G(d) u``, ``u(0) = u0`` on the periodic grid up to time ``t``.

    Accepts ``u0`` in either representation and returns the physical field
    with ``time_label = u0.time_label + t``.

    Raises
    ------
    PetrovskiiViolation
        If the operator fails the sampled spectral-bound test and ``force`` is false.
    MatrixExpOverflow
        If a per-mode factor overflows.
    """
    _check_operator(op, u0.grid, u0.m, force, check)
    uhat = u0 if u0.representation == FREQUENCY else forward_fft(u0)
    E = multiplier(op, u0.grid, t)
    out = np.einsum("ij...,j...->i...", E, uhat.data)
    return inverse_fft(FieldState(u0.grid, out, FREQUENCY, u0.time_label + t))


def kernel(op, t: float, grid: GridSpec, *, mollifier_cells: float | None = None, force: bool = False, check: bool = True) -> KernelField:
    """Discrete periodised kernel ``S_t``: entrywise inverse transform of ``exp(t A(xi))``."""
    _check_operator(op, grid, None, force, check)
    E = multiplier(op, grid, t, mollifier_cells=mollifier_cells)
    return KernelField(grid, ifft_data(grid, E, nlead=2), t, PHYSICAL)


def semigroup_residual(op, s: float, t: float, u0: FieldState, *, force: bool = False) -> float:
    """Relative L2 distance between ``propagate(propagate(u0, s), t)`` and ``propagate(u0, s + t)``."""
    two_step = propagate(op, propagate(op, u0, s, force=force), t, force=force)
    one_step = propagate(op, u0, s + t, force=force)
    ref = one_step.norm()
    diff = math.sqrt(two_step.grid.cell_volume * float(np.sum(np.abs(two_step.data - one_step.data) ** 2)))
    return diff / ref if ref > 0 else diff


def support_radius(K: KernelField | FieldState, direction, threshold: float = 1e-8) -> float:
    """Largest ``x . direction`` over points where the pointwise norm exceeds ``threshold * max``.

    Returns 0 if the field vanishes identically.  The value can be negative
    when the whole thresholded support lies behind the origin.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    d = np.asarray(direction, dtype=float).ravel()
    if d.size != K.grid.n:
        raise DimensionMismatch(f"direction has {d.size} components, grid has n={K.grid.n}")
    d = d / np.linalg.norm(d)
    if isinstance(K, KernelField):
        mag = K.pointwise_norm()
    else:
        mag = np.sqrt(np.sum(np.abs(K.data) ** 2, axis=0))
    top = float(mag.max())
    if top == 0:
        return 0.0
    proj = K.grid.coordinates() @ d
    return float(proj[mag > threshold * top].max())


@dataclass(frozen=True)
class ConeEstimate:
    """Per-direction support radii of ``S_t`` and the fitted propagation cone.

    ``radii[d, k]`` is the support radius in ``directions[d]`` at
    ``times[k]``; the cone is ``{(t, x): x . d <= t * speeds[d]}``.
    """

    times: tuple[float, ...]
    directions: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    speeds: np.ndarray
    scaled_radii_spread: float
    cell: float
    threshold: float
    mollifier_cells: float
    speed_bound: float

    @property
    def direction_count(self) -> int:
        return len(self.directions)

    def spread_tolerance(self, cells: float = 2.0) -> float:
        """Relative spread corresponding to ``cells`` grid cells at the smallest non-trivial radius."""
        positive = self.radii[self.radii > self.cell]
        return cells * self.cell / float(positive.min()) if positive.size else math.inf

    def to_dict(self) -> dict:
        return {
            "times": list(self.times),
            "directions": self.directions.tolist(),
            "radii": self.radii.tolist(),
            "speeds": self.speeds.tolist(),
            "scaled_radii_spread": self.scaled_radii_spread,
            "spread_tolerance_2_cells": self.spread_tolerance(2.0),
            "cell": self.cell,
            "threshold": self.threshold,
            "mollifier_cells": self.mollifier_cells,
            "speed_bound": self.speed_bound,
            "direction_count": self.direction_count,
        }


def _characteristic_speed(op, grid: GridSpec, dirs: np.ndarray) -> float:
    # max |lambda(A(xi))| / |xi| at the largest resolved frequency radius
    R = min(math.pi / h for h in grid.spacing)
    A = op.symbols(R * dirs)
    return float(np.abs(np.linalg.eigvals(A)).max() / R)


def cone_estimate(
    op,
    times,
    grid: GridSpec,
    directions=None,
    threshold: float = 1e-8,
    *,
    mollifier_cells: float = 3.0,
    config: SamplingConfig | None = None,
) -> ConeEstimate:
    """Estimate the propagation cone of a hyperbolic operator from its kernels.

    The kernels are smoothed with a Gaussian of width ``mollifier_cells``
    cells, and the radius of the smoothed ``S_0`` is subtracted in every
    direction, so ``radii`` approximates the support function of
    ``convsupp S_t`` (clipped at zero).  ``scaled_radii_spread`` is the
    largest relative spread of ``radius / t`` across times, over directions
    whose radii exceed one cell.

    Raises
    ------
    ConeUndefined
        If the operator is not classified as hyperbolic.
    GridResolutionError
        If the smallest time moves the front by less than two cells, or the
        largest one would wrap the front around the periodic box.
    """
    times = tuple(float(t) for t in times)
    if not times or any(t <= 0 for t in times):
        raise ValueError("times must be positive")
    cls = classify(op, config)
    if not cls.hyperbolic:
        raise ConeUndefined(
            f"propagation cone undefined: operator is not hyperbolic (petrovskii={cls.petrovskii}, deg P={cls.deg_P}, m={cls.m})"
        )
    if grid.n != op.n:
        raise DimensionMismatch(f"grid has n={grid.n}, operator has n={op.n}")
    dirs = direction_set(op.n, 16, 0) if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)

    speed = _characteristic_speed(op, grid, dirs)
    h = grid.cell
    if speed > 0 and min(times) * speed < 2 * h:
        raise GridResolutionError(f"t={min(times)} moves the front {min(times) * speed:.3g} < 2 cells ({2 * h:.3g})")
    half_box = min(grid.box_lengths) / 2
    if max(times) * speed + 10 * mollifier_cells * h >= half_box:
        raise GridResolutionError(f"t={max(times)} front reaches the periodic box edge (half-width {half_box})")

    def radii_at(t):
        K = kernel(op, t, grid, mollifier_cells=mollifier_cells, check=False)
        return np.array([support_radius(K, d, threshold) for d in dirs])

    base = radii_at(0.0)
    radii = np.stack([np.maximum(radii_at(t) - base, 0.0) for t in times], axis=1)
    scaled = radii / np.asarray(times)[None, :]
    speeds = scaled.max(axis=1)

    spread = 0.0
    for row_r, row_s in zip(radii, scaled):
        keep = row_r > h
        if keep.sum() >= 2:
            vals = row_s[keep]
            spread = max(spread, float((vals.max() - vals.min()) / vals.mean()))
    return ConeEstimate(
        times=times,
        directions=dirs,
        radii=radii,
        speeds=speeds,
        scaled_radii_spread=spread,
        cell=h,
        threshold=threshold,
        mollifier_cells=mollifier_cells,
        speed_bound=speed,
    )


def mass_outside_cone(u: FieldState, cone: ConeEstimate, t: float, data_radii, margin_cells: float = 3.0) -> float:
    """Fraction of ``||u||^2`` lying outside ``{x : x.d <= r0(d) + t speed(d) + margin}`` for some probed ``d``.

    ``data_radii`` are the support radii of the initial data in the cone's
    directions.
    """
    if u.representation != PHYSICAL:
        u = inverse_fft(u)
    data_radii = np.broadcast_to(np.asarray(data_radii, dtype=float), cone.speeds.shape)
    proj = u.grid.coordinates() @ cone.directions.T
    limit = data_radii + t * cone.speeds + margin_cells * cone.cell
    outside = np.any(proj > limit, axis=-1)
    dens = np.sum(np.abs(u.data) ** 2, axis=0)
    total = float(dens.sum())
    return float(dens[outside].sum()) / total if total > 0 else 0.0


def unitarity_check(op, u0: FieldState, ut: FieldState, tol: float = 1e-12) -> dict:
    """Compare per-mode norms ``||u_hat(t, xi)||`` and ``||u_hat(0, xi)||``.

    ``applicable`` reports whether the symbol is skew-adjoint on the grid,
    in which case every mode norm should be conserved.
    """
    xis = u0.grid.frequencies().reshape(-1, u0.grid.n)
    A = op.symbols(xis)
    herm = A + np.conj(np.swapaxes(A, -1, -2))
    scale = max(float(np.abs(A).max()), 1.0)
    applicable = bool(np.abs(herm).max() <= 1e-12 * scale)
    a = u0 if u0.representation == FREQUENCY else forward_fft(u0)
    b = ut if ut.representation == FREQUENCY else forward_fft(ut)
    n0 = np.sqrt(np.sum(np.abs(a.data) ** 2, axis=0))
    n1 = np.sqrt(np.sum(np.abs(b.data) ** 2, axis=0))
    ref = float(n0.max()) or 1.0
    deviation = float(np.abs(n1 - n0).max() / ref)
    return {"applicable": applicable, "max_relative_mode_deviation": deviation, "tolerance": tol, "passed": applicable and deviation <= tol}


# ---------------------------------------------------------------------------
# initial data


def bump_field(grid: GridSpec, m: int = 1, radius: float = 1.0, center=None, component: int = 0) -> FieldState:
    """``exp(1 - 1/(1 - |x-c|^2/R^2))`` inside the ball of radius R, zero outside; peak value 1."""
    c = np.zeros(grid.n) if center is None else np.asarray(center, dtype=float)
    r2 = np.sum((grid.coordinates() - c) ** 2, axis=-1) / radius**2
    inside = r2 < 1
    vals = np.zeros(grid.shape)
    vals[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    data = np.zeros((m,) + grid.shape, dtype=complex)
    data[component] = vals
    return FieldState(grid, data)


def mode_field(grid: GridSpec, k, m: int = 1, component: int = 0) -> FieldState:
    """Single Fourier mode ``exp(i xi_k . x)`` with integer wave numbers ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=int))
    if k.size != grid.n:
        raise DimensionMismatch(f"mode index has {k.size} components, grid has n={grid.n}")
    xi = 2 * np.pi * k / np.asarray(grid.box_lengths)
    data = np.zeros((m,) + grid.shape, dtype=complex)
    data[component] = np.exp(1j * (grid.coordinates() @ xi))
    return FieldState(grid, data)


def random_field(grid: GridSpec, m: int = 1, seed: int = 0) -> FieldState:
    """Complex Gaussian white noise (seeded)."""
    rng = np.random.default_rng(seed)
    shape = (m,) + grid.shape
    return FieldState(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
