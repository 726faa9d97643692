"""Weighted mixed norms with per-axis exponents and arbitrary integration order.

A mixed norm reduces an array one axis at a time.  Each axis carries its own
exponent; the reduction order is a permutation of the axes, with the first
listed axis reduced innermost.  For a finite exponent p the axis reduction is
(w_axis * sum |.|^p)^(1/p) with w_axis the axis quadrature weight; for
p = inf it is the maximum of absolute values with no quadrature factor.

The order matters as soon as two exponents differ; Minkowski's integral
inequality says that reducing a smaller exponent innermost can only give the
smaller value, which :func:`minkowski_gap` exposes as a computable pair.

Floating-point summation order is fixed (numpy reductions along one axis of a
C-ordered array, ascending index), so small-size brute-force oracles track the
fast path to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exponents import ExtExp
from .lattice import CArray

__all__ = ["MixedNormSpec", "mixed_norm", "minkowski_gap", "exponent_as_float"]


def exponent_as_float(e) -> float:
    """Normalize an exponent spec (ExtExp, number, 'inf', '3/2') to float."""
    if isinstance(e, ExtExp):
        return e.to_float()
    if isinstance(e, str):
        return ExtExp(e).to_float()
    p = float(e)
    if not (p >= 1):
        raise ValueError(f"exponent must be >= 1, got {e}")
    return p


@dataclass(frozen=True)
class MixedNormSpec:
    """Exponent-per-axis assignment plus integration order.

    exps: one exponent per axis of the target array (exponent travels with
        its axis; the order only reorders reductions).
    order: axis indices, first entry reduced innermost.  Defaults to
        ascending axis order.
    weight: optional pointwise weight: an ndarray broadcastable to the array
        shape, or a callable receiving the sparse coordinate mesh.  Applied
        to |F| before any reduction.
    """

    exps: tuple
    order: tuple[int, ...] | None = None
    weight: object = None

    def resolved_order(self, rank: int) -> tuple[int, ...]:
        order = tuple(range(rank)) if self.order is None else tuple(self.order)
        if sorted(order) != list(range(rank)):
            raise ValueError(f"order {order} is not a permutation of axes 0..{rank - 1}")
        return order


def _weight_array(weight, arr: CArray) -> np.ndarray | None:
    if weight is None:
        return None
    if callable(weight):
        w = np.asarray(weight(*arr.grid.meshgrid()), dtype=float)
    else:
        w = np.asarray(weight, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def mixed_norm(F: CArray, spec: MixedNormSpec) -> float:
    """Evaluate the weighted mixed norm of F under ``spec``."""
    rank = F.ndim
    if len(spec.exps) != rank:
        raise ValueError(f"{len(spec.exps)} exponents for a rank-{rank} array")
    order = spec.resolved_order(rank)
    exps = [exponent_as_float(e) for e in spec.exps]

    values = np.abs(F.data)
    w = _weight_array(spec.weight, F)
    if w is not None:
        values = values * w

    remaining = list(range(rank))
    for axis in order:
        pos = remaining.index(axis)
        p = exps[axis]
        if math.isinf(p):
            values = values.max(axis=pos)
        else:
            aw = F.grid.axis_weight(axis)
            values = (aw * (values ** p).sum(axis=pos)) ** (1.0 / p)
        remaining.pop(pos)
    out = float(values)
    if not math.isfinite(out):
        raise ValueError("mixed norm produced a non-finite value")
    return out


def minkowski_gap(F: CArray, exps: Sequence, axis_pair: tuple[int, int]) -> tuple[float, float]:
    """The two norms obtained by swapping which of two axes is reduced innermost.

    ``axis_pair = (a, b)`` must satisfy exps[a] <= exps[b].  Returns
    (norm with axis a innermost, norm with axis b innermost); integrating the
    smaller exponent first yields the smaller value, so the first component
    never exceeds the second beyond roundoff.
    """
    a, b = axis_pair
    if a == b:
        raise ValueError("axis_pair must name two distinct axes")
    pa, pb = exponent_as_float(exps[a]), exponent_as_float(exps[b])
    if not pa <= pb:
        raise ValueError(f"need exps[{a}] <= exps[{b}], got {pa} > {pb}")
    rest = tuple(i for i in range(F.ndim) if i not in (a, b))
    low_first = mixed_norm(F, MixedNormSpec(tuple(exps), (a, b) + rest))
    high_first = mixed_norm(F, MixedNormSpec(tuple(exps), (b, a) + rest))
    return low_first, high_first
