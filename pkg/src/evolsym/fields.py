"""Periodic grids, gridded fields and their Fourier transforms.

Layout conventions (fixed, so CSV dumps are reproducible):

* axis ``j`` has ``N_j`` points ``x = -L_j/2 + i * L_j/N_j``, ``i = 0..N_j-1``,
  so the origin sits at index ``N_j/2``;
* frequencies are ``xi = 2 pi k / L_j`` with ``k = -N_j/2 .. N_j/2-1`` in
  increasing order;
* the forward transform approximates ``int exp(-i x.xi) u(x) dx`` by the
  rectangle rule, ``u_hat(xi) = h^n sum_x exp(-i x.xi) u(x)``, and the
  inverse is its exact discrete inverse.

Field data are stored with shape ``(m, N_1, ..., N_n)``; kernel data with
shape ``(m, m, N_1, ..., N_n)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "GridSpec",
    "FieldState",
    "KernelField",
    "PHYSICAL",
    "FREQUENCY",
    "forward_fft",
    "inverse_fft",
    "dump_field_csv",
    "load_field_csv",
    "dump_kernel_csv",
    "MAX_GRID_POINTS",
]

PHYSICAL = "physical"
FREQUENCY = "frequency"
MAX_GRID_POINTS = 2**24


@dataclass(frozen=True)
class GridSpec:
    box_lengths: tuple[float, ...]
    points_per_axis: tuple[int, ...]

    def __post_init__(self):
        L = tuple(float(v) for v in self.box_lengths)
        N = tuple(int(v) for v in self.points_per_axis)
        object.__setattr__(self, "box_lengths", L)
        object.__setattr__(self, "points_per_axis", N)
        if len(L) != len(N) or not L:
            raise ValueError("box_lengths and points_per_axis must be non-empty and of equal length")
        if any(not math.isfinite(v) or v <= 0 for v in L):
            raise ValueError("box lengths must be positive")
        if any(v <= 0 or v % 2 for v in N):
            raise ValueError("points per axis must be positive even integers")
        if math.prod(N) > MAX_GRID_POINTS:
            raise ValueError(f"grid has {math.prod(N)} points, budget is {MAX_GRID_POINTS}")

    @classmethod
    def uniform(cls, n: int, L: float, N: int) -> GridSpec:
        return cls((L,) * n, (N,) * n)

    @property
    def n(self) -> int:
        return len(self.points_per_axis)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points_per_axis

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / N for L, N in zip(self.box_lengths, self.points_per_axis))

    @property
    def cell(self) -> float:
        """Largest grid spacing."""
        return max(self.spacing)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    def axes(self) -> list[np.ndarray]:
        return [-L / 2 + (L / N) * np.arange(N) for L, N in zip(self.box_lengths, self.points_per_axis)]

    def frequency_axes(self) -> list[np.ndarray]:
        return [2 * np.pi * np.arange(-N // 2, N // 2) / L for L, N in zip(self.box_lengths, self.points_per_axis)]

    def coordinates(self) -> np.ndarray:
        """Grid points, shape ``(N_1, ..., N_n, n)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def frequencies(self) -> np.ndarray:
        """Frequencies, shape ``(N_1, ..., N_n, n)``."""
        return np.stack(np.meshgrid(*self.frequency_axes(), indexing="ij"), axis=-1)

    def origin_index(self) -> tuple[int, ...]:
        return tuple(N // 2 for N in self.points_per_axis)

    def to_dict(self) -> dict:
        return {"n": self.n, "box_lengths": list(self.box_lengths), "points_per_axis": list(self.points_per_axis)}


@dataclass(frozen=True)
class FieldState:
    grid: GridSpec
    data: np.ndarray = field(repr=False)
    representation: str = PHYSICAL
    time_label: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim == self.grid.n:
            data = data[None]
        if data.shape[1:] != self.grid.shape:
            raise DimensionMismatch(f"field data shape {data.shape} does not match grid {self.grid.shape}")
        if self.representation not in (PHYSICAL, FREQUENCY):
            raise ValueError(f"unknown representation {self.representation!r}")
        if not np.all(np.isfinite(data)):
            raise ValueError("field data must be finite")
        object.__setattr__(self, "data", data)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    def norm(self) -> float:
        """Continuous L2 norm (rectangle rule in physical space, Parseval in frequency space)."""
        if self.representation == PHYSICAL:
            return math.sqrt(self.grid.cell_volume * float(np.sum(np.abs(self.data) ** 2)))
        vol = math.prod(self.grid.box_lengths)
        return math.sqrt(float(np.sum(np.abs(self.data) ** 2)) / vol)


@dataclass(frozen=True)
class KernelField:
    grid: GridSpec
    data: np.ndarray = field(repr=False)
    time_label: float = 0.0
    representation: str = PHYSICAL

    @property
    def m(self) -> int:
        return self.data.shape[0]

    def pointwise_norm(self) -> np.ndarray:
        """Operator 2-norm of the ``m x m`` kernel value at every grid point."""
        mats = np.moveaxis(self.data, (0, 1), (-2, -1))
        if self.m == 1:
            return np.abs(mats[..., 0, 0])
        return np.linalg.norm(mats, ord=2, axis=(-2, -1))


def _phase(grid: GridSpec) -> np.ndarray:
    # exp(-i xi_k x_0) with x_0 = -L/2 equals (-1)^k exactly
    signs = [np.where(np.arange(-N // 2, N // 2) % 2, -1.0, 1.0) for N in grid.shape]
    out = signs[0]
    for s in signs[1:]:
        out = np.multiply.outer(out, s)
    return out


def _spatial_axes(nlead: int, n: int) -> tuple[int, ...]:
    return tuple(range(nlead, nlead + n))


def fft_data(grid: GridSpec, data: np.ndarray, nlead: int = 1) -> np.ndarray:
    axes = _spatial_axes(nlead, grid.n)
    spec = np.fft.fftshift(np.fft.fftn(data, axes=axes), axes=axes)
    return spec * _phase(grid) * grid.cell_volume


def ifft_data(grid: GridSpec, data: np.ndarray, nlead: int = 1) -> np.ndarray:
    axes = _spatial_axes(nlead, grid.n)
    unshifted = np.fft.ifftshift(data * _phase(grid), axes=axes)
    return np.fft.ifftn(unshifted, axes=axes) / grid.cell_volume


def forward_fft(u: FieldState) -> FieldState:
    """Physical to frequency representation."""
    if u.representation != PHYSICAL:
        raise ValueError("forward_fft expects a physical-space field")
    return replace(u, data=fft_data(u.grid, u.data), representation=FREQUENCY)


def inverse_fft(u: FieldState) -> FieldState:
    """Frequency to physical representation."""
    if u.representation != FREQUENCY:
        raise ValueError("inverse_fft expects a frequency-space field")
    return replace(u, data=ifft_data(u.grid, u.data), representation=PHYSICAL)


# ---------------------------------------------------------------------------
# CSV dumps


def _metadata_line(grid: GridSpec, kind: str, m: int, representation: str, t: float) -> str:
    meta = {"kind": kind, "grid": grid.to_dict(), "m": m, "representation": representation, "time": t}
    return "# " + json.dumps(meta, sort_keys=True)


def _write_rows(path, header_line, columns, coords, values):
    buf = io.StringIO()
    buf.write(header_line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for c, v in zip(coords, values):
        writer.writerow([repr(float(x)) for x in c] + [repr(float(x)) for x in v])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _interleave(flat: np.ndarray) -> np.ndarray:
    out = np.empty((flat.shape[0], 2 * flat.shape[1]))
    out[:, 0::2] = flat.real
    out[:, 1::2] = flat.imag
    return out


def _coords_flat(grid: GridSpec, representation: str) -> np.ndarray:
    pts = grid.coordinates() if representation == PHYSICAL else grid.frequencies()
    return pts.reshape(-1, grid.n)


def dump_field_csv(path, u: FieldState) -> None:
    """One row per grid point: coordinates, then ``re_k, im_k`` for each component."""
    coord_names = [("x" if u.representation == PHYSICAL else "xi") + str(j + 1) for j in range(u.grid.n)]
    cols = coord_names + [f"{p}{k}" for k in range(u.m) for p in ("re", "im")]
    values = _interleave(u.data.reshape(u.m, -1).T)
    _write_rows(path, _metadata_line(u.grid, "field", u.m, u.representation, u.time_label), cols, _coords_flat(u.grid, u.representation), values)


def dump_kernel_csv(path, K: KernelField) -> None:
    """One row per grid point: coordinates, then ``re_ij, im_ij`` in row-major entry order."""
    m = K.m
    coord_names = [("x" if K.representation == PHYSICAL else "xi") + str(j + 1) for j in range(K.grid.n)]
    cols = coord_names + [f"{p}{i}{j}" for i in range(m) for j in range(m) for p in ("re", "im")]
    values = _interleave(K.data.reshape(m * m, -1).T)
    _write_rows(path, _metadata_line(K.grid, "kernel", m, K.representation, K.time_label), cols, _coords_flat(K.grid, K.representation), values)


def load_field_csv(path) -> FieldState:
    """Read a field written by :func:`dump_field_csv`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing metadata line")
    meta = json.loads(lines[0][1:])
    if meta.get("kind") != "field":
        raise ValueError(f"{path}: not a field dump")
    g = meta["grid"]
    grid = GridSpec(tuple(g["box_lengths"]), tuple(g["points_per_axis"]))
    m = int(meta["m"])
    rows = list(csv.reader(lines[2:]))
    arr = np.array(rows, dtype=float)
    if arr.shape != (math.prod(grid.shape), grid.n + 2 * m):
        raise ValueError(f"{path}: expected {math.prod(grid.shape)} rows of {grid.n + 2 * m} columns")
    vals = arr[:, grid.n::2] + 1j * arr[:, grid.n + 1::2]
    data = vals.T.reshape((m,) + grid.shape)
    return FieldState(grid, data, meta["representation"], float(meta["time"]))
