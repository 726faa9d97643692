"""Uniform periodic grids, sampled complex arrays, and quadrature.

Every numerical module works on the same discretization: a uniform lattice
on a product of intervals [-L/2, L/2), treated as a finite cyclic group.
Translations and convolutions wrap modulo the grid, so Fourier inversion and
Young's convolution inequality hold *exactly* on these grids, which is what
makes the property suites oracle-exact rather than approximate.

Two measure modes are supported:

* ``riemann``  -- every discrete sum carries the cell volume prod(h_axis);
  sums approximate integrals over R^n.
* ``counting`` -- unit weight per point; sums are plain ell^p sums, the mode
  used by the exactness-critical property tests.

Axis coordinates are x_j = -L/2 + j*h with h = L/n, and the dual (frequency)
axis holds n frequencies at spacing 1/L centered at 0, i.e. the same formula
with extent n/L.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

RIEMANN = "riemann"
COUNTING = "counting"
_MODES = (RIEMANN, COUNTING)


@dataclass(frozen=True)
class Axis:
    """One uniform periodic axis: n_points samples of an interval of length extent."""

    n_points: int
    extent: float

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError(f"axis needs at least 2 points, got {self.n_points}")
        if not (self.extent > 0):
            raise ValueError(f"axis extent must be positive, got {self.extent}")

    @property
    def step(self) -> float:
        return self.extent / self.n_points

    def coords(self) -> np.ndarray:
        return -self.extent / 2 + self.step * np.arange(self.n_points)

    def dual(self) -> "Axis":
        """The frequency axis: n_points frequencies at spacing 1/extent, centered."""
        return Axis(self.n_points, self.n_points / self.extent)

    def zero_index(self) -> int:
        """Index of the coordinate closest to 0 (exactly 0 for even n_points)."""
        return self.n_points // 2

    def wrap(self, values: np.ndarray) -> np.ndarray:
        """Wrap real values into the fundamental window [-extent/2, extent/2)."""
        e = self.extent
        return (np.asarray(values) + e / 2) % e - e / 2


@dataclass(frozen=True)
class Grid:
    """A product of Axis objects together with one measure mode."""

    axes: tuple[Axis, ...]
    measure_mode: str = RIEMANN

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        if self.measure_mode not in _MODES:
            raise ValueError(f"unknown measure mode {self.measure_mode!r}")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.n_points for ax in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def coords(self, axis: int) -> np.ndarray:
        return self.axes[axis].coords()

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Sparse coordinate mesh, broadcastable to ``shape``."""
        return tuple(np.meshgrid(*(ax.coords() for ax in self.axes),
                                 indexing="ij", sparse=True))

    def quad_weight(self) -> float:
        """Scalar multiplying every discrete sum that stands for an integral."""
        if self.measure_mode == COUNTING:
            return 1.0
        return float(np.prod([ax.step for ax in self.axes]))

    def axis_weight(self, axis: int) -> float:
        if self.measure_mode == COUNTING:
            return 1.0
        return self.axes[axis].step

    def volume(self) -> float:
        return float(np.prod([ax.extent for ax in self.axes]))

    def subgrid(self, axis_indices: Sequence[int]) -> "Grid":
        return Grid(tuple(self.axes[i] for i in axis_indices), self.measure_mode)

    def with_axes(self, axes: Sequence[Axis]) -> "Grid":
        return Grid(tuple(axes), self.measure_mode)

    def is_uniform(self) -> bool:
        """True when all axes are identical (required by the coordinate-change maps)."""
        return all(ax == self.axes[0] for ax in self.axes)


def make_grid(axes: Sequence[tuple[int, float]], measure_mode: str = RIEMANN) -> Grid:
    """Build a Grid from (n_points, extent) pairs.

    Rejects non-positive sizes or extents; n_points >= 2 on every axis.
    """
    return Grid(tuple(Axis(int(n), float(ext)) for n, ext in axes), measure_mode)


class CArray:
    """A complex-valued sampled array on a Grid, row-major by axis order.

    Values are validated to be finite on construction and the backing array
    is frozen; every operation in this package treats CArrays as immutable.
    """

    __slots__ = ("grid", "data")

    def __init__(self, grid: Grid, data: np.ndarray):
        arr = np.asarray(data, dtype=complex)
        if arr.shape != grid.shape:
            raise ValueError(f"data shape {arr.shape} != grid shape {grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("CArray values must be finite (no NaN/Inf)")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("CArray is immutable")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "CArray":
        return CArray(self.grid, fn(self.data))

    def __add__(self, other: "CArray") -> "CArray":
        _check_same_grid(self, other)
        return CArray(self.grid, self.data + other.data)

    def __sub__(self, other: "CArray") -> "CArray":
        _check_same_grid(self, other)
        return CArray(self.grid, self.data - other.data)

    def __mul__(self, c) -> "CArray":
        if isinstance(c, CArray):
            _check_same_grid(self, c)
            return CArray(self.grid, self.data * c.data)
        return CArray(self.grid, self.data * c)

    __rmul__ = __mul__

    def conj(self) -> "CArray":
        return CArray(self.grid, np.conj(self.data))

    def inner(self, other: "CArray") -> complex:
        """<f, g> = quad * sum f * conj(g)."""
        _check_same_grid(self, other)
        return complex(self.grid.quad_weight() * np.vdot(other.data, self.data))

    def norm2(self) -> float:
        return float(np.sqrt(self.grid.quad_weight()) * np.linalg.norm(self.data))


def _check_same_grid(a: CArray, b: CArray) -> None:
    if a.grid != b.grid:
        raise ValueError("CArrays live on different grids")


def sample(fn: Callable, grid: Grid) -> CArray:
    """Pointwise evaluation of ``fn`` at the lattice coordinates.

    ``fn`` receives one coordinate array per axis (broadcastable mesh); a
    scalar-only callable is accepted as a fallback.  Non-finite values raise.
    """
    mesh = grid.meshgrid()
    try:
        values = np.asarray(fn(*mesh), dtype=complex)
        values = np.broadcast_to(values, grid.shape)
    except (TypeError, ValueError):
        values = np.vectorize(lambda *xs: complex(fn(*xs)))(*np.meshgrid(
            *(ax.coords() for ax in grid.axes), indexing="ij"))
    if not np.all(np.isfinite(values)):
        raise ValueError("sample: function produced non-finite values on the grid")
    return CArray(grid, values)


def quad_weight(grid: Grid) -> float:
    return grid.quad_weight()


def translate(arr: CArray, shifts: Sequence[int]) -> CArray:
    """Cyclic translation by grid points: out(x) = in(x - t[shifts]).

    ``shifts`` holds one translation *index* per axis; translating by index i
    moves the sample grid by the coordinate t_i = -L/2 + i*h.
    """
    if len(shifts) != arr.ndim:
        raise ValueError("one shift per axis required")
    data = arr.data
    for axis, (i, ax) in enumerate(zip(shifts, arr.grid.axes)):
        data = np.roll(data, i - ax.zero_index(), axis=axis)
    return CArray(arr.grid, data)


def neg_index(n: int, j: np.ndarray | int) -> np.ndarray | int:
    """Index of the wrapped coordinate -x_j (self-paired at j = 0)."""
    return (n - np.asarray(j)) % n if not np.isscalar(j) else (n - j) % n


def add_index(n: int, i, j):
    """Index of the wrapped coordinate x_i + x_j."""
    return (np.asarray(i) + np.asarray(j) - n // 2) % n


# ---------------------------------------------------------------------------
# Serialization: CSV body (one row per point: coordinates, re, im) preceded by
# a single '#'-prefixed JSON header line describing the axes.
# ---------------------------------------------------------------------------

_SCHEMA = 1


def carray_header(arr: CArray) -> dict:
    return {
        "schema": _SCHEMA,
        "measure_mode": arr.grid.measure_mode,
        "axes": [{"n_points": ax.n_points, "extent": ax.extent} for ax in arr.grid.axes],
    }


def write_carray_csv(arr: CArray, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(carray_header(arr), sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(arr.ndim)] + ["re", "im"])
        mesh = np.meshgrid(*(ax.coords() for ax in arr.grid.axes), indexing="ij")
        flat = [m.ravel() for m in mesh]
        vals = arr.data.ravel()
        for k in range(vals.size):
            writer.writerow([repr(float(m[k])) for m in flat]
                            + [repr(float(vals[k].real)), repr(float(vals[k].imag))])


def read_carray_csv(path: str) -> CArray:
    with open(path, "r", newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError("missing JSON header line (expected leading '#')")
        header = json.loads(first[1:])
        grid = Grid(tuple(Axis(a["n_points"], a["extent"]) for a in header["axes"]),
                    header.get("measure_mode", RIEMANN))
        reader = csv.reader(fh)
        next(reader)  # column header
        values = np.empty(grid.size, dtype=complex)
        for k, row in enumerate(reader):
            values[k] = float(row[-2]) + 1j * float(row[-1])
        if k + 1 != grid.size:
            raise ValueError(f"expected {grid.size} rows, read {k + 1}")
    return CArray(grid, values.reshape(grid.shape))


def carray_csv_string(arr: CArray) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(carray_header(arr), sort_keys=True) + "\n")
    writer = csv.writer(buf)
    writer.writerow([f"x{i}" for i in range(arr.ndim)] + ["re", "im"])
    mesh = np.meshgrid(*(ax.coords() for ax in arr.grid.axes), indexing="ij")
    flat = [m.ravel() for m in mesh]
    vals = arr.data.ravel()
    for k in range(vals.size):
        writer.writerow([repr(float(m[k])) for m in flat]
                        + [repr(float(vals[k].real)), repr(float(vals[k].imag))])
    return buf.getvalue()
