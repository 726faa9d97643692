"""Discrete Fourier machinery on centered periodic grids.

Conventions, fixed once for the whole package:

* Fourier transform  F f(xi) = sum_j f(x_j) e^{-2 pi i x_j xi} * w  with the
  output axis holding n frequencies at spacing 1/L centered at 0.  On these
  centered grids the transform is exactly invertible.
* Short-time Fourier transform  V_phi f(t, nu) = F(f T_t phi)(nu)  with
  cyclic translations by grid points.
* Symplectic (phase-space) transform  Fs F(t, nu) with kernel
  e^{2 pi i (xi t - x nu)}: forward in the leading time axis, conjugate sign
  in the frequency axes.
* Symbol short-time Fourier transform  Vs_phi F(x, t, xi, nu)
  = Fs(F T_{(x,xi)} phi)(t, nu), which coincides with the ordinary STFT after
  the relabeling Vs_phi F(x, t, xi, nu) = V_phi F(x, xi, nu, -t).

Because frequencies sit on the lattice (1/L) * (Z - n/2), all phase factors
are L-periodic in their spatial argument, so cyclic wrap-around is exact and
the algebraic identities used by the verification suites (inversion,
Parseval, covariance, the windowed-tensor factorization) hold to roundoff.

The dense symbol STFT of an (m+1)-axis array has (n^{m+1})^2 output points;
a configurable cap refuses outputs beyond ``DENSE_CAP`` and
:func:`symbol_stft_slice` evaluates single (xi, nu)-slices instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lattice import Axis, CArray, Grid, translate

__all__ = [
    "Window", "gaussian_window", "tensor_window",
    "fourier", "inverse_fourier", "stft", "stft_nd",
    "symplectic_fourier", "symbol_stft", "symbol_stft_slice",
    "rihaczek", "t_a", "t_a_inverse", "DENSE_CAP", "DenseBudgetError",
]

DENSE_CAP = 2 ** 24


class DenseBudgetError(ValueError):
    """Raised when a dense tensor would exceed the configured point budget."""


@dataclass(frozen=True)
class Window:
    """An analysis window: sampled values plus a kind tag.

    gaussian windows sample exp(-|x|^2); psi windows are odd by construction
    (built in :mod:`modops.symbols`); custom windows carry arbitrary samples.
    """

    samples: CArray
    kind: str = "custom"

    @property
    def grid(self) -> Grid:
        return self.samples.grid


def gaussian_window(grid: Grid) -> Window:
    mesh = grid.meshgrid()
    sq = sum(np.broadcast_to(m, grid.shape).astype(float) ** 2 for m in mesh)
    return Window(CArray(grid, np.exp(-sq)), kind="gaussian")


def tensor_window(*windows: Window) -> Window:
    """Product window on the product grid, axes concatenated in order."""
    grids = [w.grid for w in windows]
    mode = grids[0].measure_mode
    axes = tuple(ax for g in grids for ax in g.axes)
    data = windows[0].samples.data
    for w in windows[1:]:
        data = np.multiply.outer(data, w.samples.data)
    kind = windows[0].kind if all(w.kind == windows[0].kind for w in windows) else "custom"
    return Window(CArray(Grid(axes, mode), data), kind=kind)


# ---------------------------------------------------------------------------
# Centered transforms.  With x_j = (j - n/2) h and xi_k = (k - n/2) / E,
#   e^{-2 pi i x_j xi_k} = e^{-i pi n / 2} (-1)^j (-1)^k e^{-2 pi i j k / n},
# so each axis transform is an FFT conjugated by alternating-sign vectors.
# ---------------------------------------------------------------------------

def _axis_transform(data: np.ndarray, axis: int, n: int, weight: float,
                    sign: int) -> np.ndarray:
    j = np.arange(n)
    alt = np.where(j % 2 == 0, 1.0, -1.0)
    shape = [1] * data.ndim
    shape[axis] = n
    alt = alt.reshape(shape)
    const = np.exp(sign * 1j * np.pi * n / 2)
    if sign < 0:
        out = np.fft.fft(data * alt, axis=axis)
    else:
        out = np.fft.ifft(data * alt, axis=axis) * n
    return weight * const * alt * out


def fourier(f: CArray, axes: Sequence[int] | None = None) -> CArray:
    """Forward transform on the given axes (all by default), kernel e^{-2 pi i x xi}."""
    return _transform(f, axes, sign=-1, inverse=False)


def inverse_fourier(f: CArray, axes: Sequence[int] | None = None) -> CArray:
    """Exact inverse of :func:`fourier` on the given axes."""
    return _transform(f, axes, sign=+1, inverse=True)


def _transform(f: CArray, axes: Sequence[int] | None, sign: int, inverse: bool,
               weights: Sequence[float] | None = None) -> CArray:
    axes = tuple(range(f.ndim)) if axes is None else tuple(axes)
    data = np.asarray(f.data)
    new_axes = list(f.grid.axes)
    counting = f.grid.measure_mode == "counting"
    for i, axis in enumerate(axes):
        ax = f.grid.axes[axis]
        if weights is not None:
            w = weights[i]
        elif inverse:
            w = (1.0 / ax.n_points) if counting else ax.step
        else:
            w = 1.0 if counting else ax.step
        data = _axis_transform(data, axis, ax.n_points, w, sign)
        new_axes[axis] = ax.dual()
    return CArray(Grid(tuple(new_axes), f.grid.measure_mode), data)


def _quad_transform(f: CArray, axes: Sequence[int], sign: int) -> CArray:
    """Transform with the *quadrature* weight of each input axis on both signs.

    This is the building block of the symplectic transform, where the
    conjugate-sign axes still represent plain integrals d(xi).
    """
    ws = [f.grid.axis_weight(a) for a in axes]
    return _transform(f, axes, sign=sign, inverse=False, weights=ws)


def conjugate_fourier(f: CArray, axes: Sequence[int] | None = None) -> CArray:
    """Quadrature-weighted transform with the conjugate kernel e^{+2 pi i x xi}."""
    axes = tuple(range(f.ndim)) if axes is None else tuple(axes)
    return _quad_transform(f, axes, sign=+1)


# ---------------------------------------------------------------------------
# STFT
# ---------------------------------------------------------------------------

def _translation_matrix(samples: np.ndarray) -> np.ndarray:
    """W[i, j] = window(x_j - t_i), cyclic: index (j - i + n//2) mod n."""
    n = samples.shape[0]
    j = np.arange(n)
    idx = (j[None, :] - j[:, None] + n // 2) % n
    return samples[idx]


def stft(f: CArray, window: Window) -> CArray:
    """V_phi f on axes (t, nu): t the translation axis, nu its dual."""
    if f.ndim != 1 or window.samples.ndim != 1:
        raise ValueError("stft expects 1-axis data and window; see stft_nd")
    if f.grid != window.grid:
        raise ValueError("stft: data and window grids differ")
    ax = f.grid.axes[0]
    W = _translation_matrix(window.samples.data)
    prod = f.data[None, :] * W  # rows indexed by translation
    counting = f.grid.measure_mode == "counting"
    w = 1.0 if counting else ax.step
    out = _axis_transform(prod, 1, ax.n_points, w, sign=-1)
    grid = Grid((ax, ax.dual()), f.grid.measure_mode)
    return CArray(grid, out)


def stft_nd(f: CArray, window: Window) -> CArray:
    """Multi-axis STFT: output axes (translations..., modulations...).

    G(tau, mu) = sum_x f(x) window(x - tau) e^{-2 pi i x . mu} * quad, with
    one translation and one modulation axis per input axis.
    """
    if f.grid != window.grid:
        raise ValueError("stft_nd: data and window grids differ")
    shape = f.grid.shape
    out_axes = tuple(f.grid.axes) + tuple(ax.dual() for ax in f.grid.axes)
    out = np.empty(shape * 2, dtype=complex)
    for tau in itertools.product(*(range(n) for n in shape)):
        shifted = translate(window.samples, tau)
        spec = fourier(CArray(f.grid, f.data * shifted.data))
        out[tau] = spec.data
    return CArray(Grid(out_axes, f.grid.measure_mode), out)


# ---------------------------------------------------------------------------
# Symplectic transform and the symbol STFT
# ---------------------------------------------------------------------------

def symplectic_fourier(F: CArray, x_axes: Sequence[int] = (0,)) -> CArray:
    """Phase-space transform with kernel e^{2 pi i (xi t - x nu)}.

    The axes in ``x_axes`` are transformed with the forward kernel (producing
    nu); all remaining axes with the conjugate kernel (producing t).  Output
    axes are reordered to (t-block, nu-block).
    """
    x_axes = tuple(x_axes)
    xi_axes = tuple(i for i in range(F.ndim) if i not in x_axes)
    out = _quad_transform(F, x_axes, sign=-1)
    out = _quad_transform(out, xi_axes, sign=+1)
    perm = xi_axes + x_axes
    data = np.transpose(out.data, perm)
    axes = tuple(out.grid.axes[i] for i in perm)
    return CArray(Grid(axes, F.grid.measure_mode), data)


def symbol_stft(F: CArray, window: Window, max_points: int = DENSE_CAP) -> CArray:
    """Dense symbol STFT of an (m+1)-axis array.

    Output axes: (x, t_1..t_m, xi_1..xi_m, nu) where x, xi are the
    translation copies of the input axes and t_k, nu their duals.  Refuses
    outputs larger than ``max_points`` points; use
    :func:`symbol_stft_slice` beyond the cap.
    """
    if F.grid != window.grid:
        raise ValueError("symbol_stft: data and window grids differ")
    if F.ndim < 2:
        raise ValueError("symbol symbols live on at least 2 axes (x, xi_1..)")
    shape = F.grid.shape
    total = int(np.prod(shape)) ** 2
    if total > max_points:
        raise DenseBudgetError(
            f"dense symbol STFT needs {total} points > cap {max_points}; "
            "use symbol_stft_slice for fixed (xi, nu) slices")
    m = F.ndim - 1
    in_axes = F.grid.axes
    out_axes = ((in_axes[0],) + tuple(ax.dual() for ax in in_axes[1:])
                + tuple(in_axes[1:]) + (in_axes[0].dual(),))
    out = np.empty(tuple(ax.n_points for ax in out_axes), dtype=complex)
    t_slices = (slice(None),) * m
    for tau in itertools.product(*(range(n) for n in shape)):
        shifted = translate(window.samples, tau)
        spec = symplectic_fourier(CArray(F.grid, F.data * shifted.data))
        out[(tau[0],) + t_slices + tuple(tau[1:]) + (slice(None),)] = spec.data
    return CArray(Grid(out_axes, F.grid.measure_mode), out)


def symbol_stft_slice(F: CArray, window: Window, xi_indices: Sequence[int],
                      nu_index: int) -> CArray:
    """One (xi, nu)-slice of the symbol STFT, on axes (x, t_1..t_m).

    ``xi_indices`` are translation indices on the frequency axes, and
    ``nu_index`` a point on the dual of the x axis.  Memory is O(n^{m+1}).
    """
    if F.grid != window.grid:
        raise ValueError("symbol_stft_slice: data and window grids differ")
    m = F.ndim - 1
    if len(xi_indices) != m:
        raise ValueError(f"need {m} xi indices")
    x_ax = F.grid.axes[0]
    n = x_ax.n_points
    nu = x_ax.dual().coords()[nu_index]
    xcoords = x_ax.coords()
    phase_nu = np.exp(-2j * np.pi * xcoords * nu)
    counting = F.grid.measure_mode == "counting"
    wx = 1.0 if counting else x_ax.step
    out_axes = (x_ax,) + tuple(ax.dual() for ax in F.grid.axes[1:])
    out = np.empty(tuple(ax.n_points for ax in out_axes), dtype=complex)
    for i0 in range(n):
        shifted = translate(window.samples, (i0,) + tuple(xi_indices))
        prod = F.data * shifted.data
        reduced = np.tensordot(phase_nu, prod, axes=(0, 0)) * wx
        # conjugate-sign transform over the xi axes produces the t block
        red = CArray(F.grid.subgrid(range(1, m + 1)), reduced)
        out[i0] = _quad_transform(red, tuple(range(m)), sign=+1).data
    return CArray(Grid(out_axes, F.grid.measure_mode), out)


# ---------------------------------------------------------------------------
# Rihaczek transform and the windowed-tensor coordinate change
# ---------------------------------------------------------------------------

def rihaczek(fs: Sequence[CArray], g: CArray) -> CArray:
    """R(f, g)(x, xi) = e^{2 pi i x (xi_1 + .. + xi_m)} f1^(xi_1)...fm^(xi_m) conj(g(x))."""
    if not fs:
        raise ValueError("need at least one function")
    grid = g.grid
    if any(f.grid != grid for f in fs) or g.ndim != 1:
        raise ValueError("all inputs must share one 1-axis grid")
    ax = grid.axes[0]
    x = ax.coords()
    xi = ax.dual().coords()
    E = np.exp(2j * np.pi * np.outer(x, xi))
    m = len(fs)
    data = np.conj(g.data).reshape((-1,) + (1,) * m).astype(complex)
    for k, f in enumerate(fs):
        fh = fourier(f).data
        shape = [1] * (m + 1)
        shape[0] = ax.n_points
        shape[k + 1] = ax.n_points
        data = data * (E * fh[None, :]).reshape(shape)
    out_axes = (ax,) + (ax.dual(),) * m
    return CArray(Grid(out_axes, grid.measure_mode), data)


def t_a(H: CArray) -> CArray:
    """Coordinate change (s_1..s_m, x) -> (x, t): out(x, t) = H(x - t, x), cyclic.

    The input's leading m axes are the s block and the trailing axis is x;
    all axes must be identical.  Invertible; see :func:`t_a_inverse`.
    """
    if not H.grid.is_uniform():
        raise ValueError("t_a requires identical axes")
    m = H.ndim - 1
    n = H.grid.axes[0].n_points
    c = n // 2
    i0 = np.arange(n).reshape((n,) + (1,) * m)
    idx = []
    for k in range(m):
        shape = [1] * (m + 1)
        shape[k + 1] = n
        ik = np.arange(n).reshape(shape)
        idx.append((i0 - ik + c) % n)
    data = H.data[tuple(idx) + (i0,)]
    return CArray(H.grid, data)


def t_a_inverse(G: CArray) -> CArray:
    """Inverse of :func:`t_a`: H(s, x) = G(x, x - s)."""
    if not G.grid.is_uniform():
        raise ValueError("t_a_inverse requires identical axes")
    m = G.ndim - 1
    n = G.grid.axes[0].n_points
    c = n // 2
    shape_x = [1] * (m + 1)
    shape_x[m] = n
    ix = np.arange(n).reshape(shape_x)
    idx = []
    for k in range(m):
        shape = [1] * (m + 1)
        shape[k] = n
        jk = np.arange(n).reshape(shape)
        idx.append((ix - jk + c) % n)
    data = G.data[(ix,) + tuple(idx)]
    return CArray(G.grid, data)
