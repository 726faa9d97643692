"""Exact arithmetic on extended Lebesgue exponents and the feasibility engine.

Everything here is exact: an exponent p in [1, inf] is stored as its rational
reciprocal u = 1/p (u = 0 encodes p = inf), and every condition this module
decides is a linear equality or inequality among such reciprocals.  No floats
appear anywhere in this module.

The conditions come in two families, named as they are used throughout the
package:

* time-side Young conditions (A1)-(A3) on (p0, p; r0, r), guaranteeing
  ||f(x - t) g(x)||_{L^{(r0,r)}} <= ||g||_{p0} ||f||_p, with a permuted
  variant (A0)-(A3) in which a permutation kappa on {0,...,m} prescribes the
  integration order of the time variables (t_0 = x);
* frequency-side Young conditions (B1)-(B3) on (q, q_{m+1}; s, s_{m+1}) for
  ||f(t) g(x + t_1 + ... + t_m)||_{L^{(s, s_{m+1})}}, with a permuted variant
  driven by a permutation rho on {1,...,m+1}.

On top of the plain checkers sits a feasibility engine for the auxiliary-
exponent conditions of the boundedness machinery: given a profile of
exponents it searches permutations (kappa, rho) and auxiliary tuples
(p~, q~) inside their admissible boxes, deciding each candidate system by
exact Fourier-Motzkin elimination over the rationals and returning a
deterministic witness (midpoint back-substitution, lexicographic first
feasible permutation pair).

Two modes exist.  ``proposition`` mode checks the conditions as stated for
the analysis side (boxes p <= p~ <= r and s, q <= q~).  ``theorem`` mode is
the operator-boundedness form: it is the same system after replacing
(r0, r, s, s_{m+1}) and (p0, q_{m+1}) by their conjugate exponents, with
boxes p <= p~ <= r' and q, s' <= q~.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

__all__ = [
    "ExtExp", "Perm", "ExponentProfile", "FeasibilityWitness",
    "conj", "check_young_time", "check_young_freq",
    "check_young_time_perm", "check_young_freq_perm",
    "check_conditions", "feasible", "max_p0",
    "check_bilinear_cases", "bilinear_standing", "bilinear_applies",
    "check_monotone_chain",
    "PROPOSITION", "THEOREM",
    "TIME_CASE_PERMS", "FREQ_CASE_PERMS",
]

PROPOSITION = "proposition"
THEOREM = "theorem"
_MODES = (PROPOSITION, THEOREM)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class ExtExp:
    """An exponent p in [1, inf], stored as the exact rational u = 1/p.

    u = 0 encodes p = inf and u = 1 encodes p = 1.  Comparison operators
    follow *exponent* order: ExtExp(1) < ExtExp(2) < ExtExp("inf"), which is
    the reverse of the order of the reciprocals.
    """

    __slots__ = ("u",)

    def __init__(self, value) -> None:
        if isinstance(value, ExtExp):
            u = value.u
        elif isinstance(value, str):
            v = value.strip().lower()
            u = _ZERO if v in ("inf", "infinity", "oo") else _ONE / Fraction(v)
        elif value == float("inf"):
            u = _ZERO
        else:
            u = _ONE / Fraction(value)
        if not (_ZERO <= u <= _ONE):
            raise ValueError(f"exponent must lie in [1, inf], got reciprocal {u}")
        object.__setattr__(self, "u", u)

    def __setattr__(self, name, value):
        raise AttributeError("ExtExp is immutable")

    @classmethod
    def from_reciprocal(cls, u) -> "ExtExp":
        u = Fraction(u)
        obj = cls.__new__(cls)
        if not (_ZERO <= u <= _ONE):
            raise ValueError(f"reciprocal out of [0, 1]: {u}")
        object.__setattr__(obj, "u", u)
        return obj

    @property
    def is_inf(self) -> bool:
        return self.u == 0

    @property
    def exponent(self) -> Optional[Fraction]:
        """The exponent as a Fraction, or None for p = inf."""
        return None if self.is_inf else _ONE / self.u

    def to_float(self) -> float:
        return float("inf") if self.is_inf else float(self.exponent)

    def conj(self) -> "ExtExp":
        return ExtExp.from_reciprocal(_ONE - self.u)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtExp) and self.u == other.u

    def __hash__(self) -> int:
        return hash(("ExtExp", self.u))

    def __lt__(self, other: "ExtExp") -> bool:
        return self.u > ExtExp(other).u

    def __le__(self, other: "ExtExp") -> bool:
        return self.u >= ExtExp(other).u

    def __gt__(self, other: "ExtExp") -> bool:
        return self.u < ExtExp(other).u

    def __ge__(self, other: "ExtExp") -> bool:
        return self.u <= ExtExp(other).u

    def __str__(self) -> str:
        return "inf" if self.is_inf else str(self.exponent)

    def __repr__(self) -> str:
        return f"ExtExp({self})"


def conj(p: ExtExp) -> ExtExp:
    """Conjugate exponent: 1/p + 1/p' = 1 exactly."""
    return ExtExp(p).conj()


def _u(p) -> Fraction:
    return ExtExp(p).u


def _us(ps: Sequence) -> tuple[Fraction, ...]:
    return tuple(_u(p) for p in ps)


@dataclass(frozen=True)
class Perm:
    """A bijection on {start, ..., start + size - 1}, stored by its value list.

    Time-side permutations act on {0, ..., m} (start = 0); frequency-side
    permutations act on {1, ..., m + 1} (start = 1).
    """

    values: tuple[int, ...]
    start: int = 0

    def __post_init__(self) -> None:
        expected = list(range(self.start, self.start + len(self.values)))
        if sorted(self.values) != expected:
            raise ValueError(f"not a permutation of {expected}: {self.values}")

    @property
    def size(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> int:
        return self.values[i - self.start]

    def position_of(self, v: int) -> int:
        """The position ell with perm(ell) == v."""
        return self.values.index(v) + self.start

    @property
    def is_identity(self) -> bool:
        return all(self(i) == i for i in range(self.start, self.start + self.size))

    @classmethod
    def identity(cls, size: int, start: int = 0) -> "Perm":
        return cls(tuple(range(start, start + size)), start)

    @classmethod
    def all(cls, size: int, start: int = 0) -> Iterable["Perm"]:
        """All permutations in lexicographic order of their value lists."""
        for vals in itertools.permutations(range(start, start + size)):
            yield cls(vals, start)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.values)) + ")"


def _as_time_perm(kappa, m: int) -> Perm:
    if isinstance(kappa, Perm):
        p = kappa
    else:
        p = Perm(tuple(kappa), 0)
    if p.start != 0 or p.size != m + 1:
        raise ValueError(f"time permutation must act on {{0..{m}}}, got {p}")
    return p


def _as_freq_perm(rho, m: int) -> Perm:
    if isinstance(rho, Perm):
        p = rho
    else:
        p = Perm(tuple(rho), 1)
    if p.start != 1 or p.size != m + 1:
        raise ValueError(f"frequency permutation must act on {{1..{m + 1}}}, got {p}")
    return p


@dataclass(frozen=True)
class ExponentProfile:
    """The full exponent tuple of one boundedness question.

    Function side: p0, p = (p_1..p_m), q = (q_1..q_m), q_last = q_{m+1}.
    Symbol side:   r0, r = (r_1..r_m), s = (s_1..s_m), s_last = s_{m+1}.
    kappa orders the time variables {0..m} (t_0 = x), rho the frequency
    variables {1..m+1} (xi_{m+1} = nu).
    """

    m: int
    p0: ExtExp
    p: tuple[ExtExp, ...]
    q: tuple[ExtExp, ...]
    q_last: ExtExp
    r0: ExtExp
    r: tuple[ExtExp, ...]
    s: tuple[ExtExp, ...]
    s_last: ExtExp
    kappa: Perm = None  # type: ignore[assignment]
    rho: Perm = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("multilinearity degree m must be >= 1")
        object.__setattr__(self, "p0", ExtExp(self.p0))
        object.__setattr__(self, "q_last", ExtExp(self.q_last))
        object.__setattr__(self, "r0", ExtExp(self.r0))
        object.__setattr__(self, "s_last", ExtExp(self.s_last))
        for name in ("p", "q", "r", "s"):
            vals = tuple(ExtExp(v) for v in getattr(self, name))
            if len(vals) != self.m:
                raise ValueError(f"{name} must have length m = {self.m}")
            object.__setattr__(self, name, vals)
        kappa = Perm.identity(self.m + 1, 0) if self.kappa is None \
            else _as_time_perm(self.kappa, self.m)
        rho = Perm.identity(self.m + 1, 1) if self.rho is None \
            else _as_freq_perm(self.rho, self.m)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "rho", rho)

    # reciprocal accessors indexed like the math: time index k in 0..m,
    # frequency index k in 1..m+1
    def up(self, k: int) -> Fraction:
        return self.p0.u if k == 0 else self.p[k - 1].u

    def uq(self, k: int) -> Fraction:
        return self.q_last.u if k == self.m + 1 else self.q[k - 1].u

    def ur(self, k: int) -> Fraction:
        return self.r0.u if k == 0 else self.r[k - 1].u

    def us(self, k: int) -> Fraction:
        return self.s_last.u if k == self.m + 1 else self.s[k - 1].u

    def with_p0(self, p0) -> "ExponentProfile":
        return replace(self, p0=ExtExp(p0))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "p0": str(self.p0), "p": [str(v) for v in self.p],
            "q": [str(v) for v in self.q], "q_last": str(self.q_last),
            "r0": str(self.r0), "r": [str(v) for v in self.r],
            "s": [str(v) for v in self.s], "s_last": str(self.s_last),
            "kappa": list(self.kappa.values), "rho": list(self.rho.values),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExponentProfile":
        m = int(obj["m"])
        return cls(
            m=m,
            p0=obj["p0"], p=tuple(obj["p"]),
            q=tuple(obj["q"]), q_last=obj["q_last"],
            r0=obj["r0"], r=tuple(obj["r"]),
            s=tuple(obj["s"]), s_last=obj["s_last"],
            kappa=Perm(tuple(obj["kappa"]), 0) if "kappa" in obj else None,
            rho=Perm(tuple(obj["rho"]), 1) if "rho" in obj else None,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "ExponentProfile":
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class FeasibilityWitness:
    """A certificate: permutations plus auxiliary exponents inside their boxes."""

    kappa: Perm
    rho: Perm
    tilde_p: tuple[ExtExp, ...]
    tilde_q: tuple[ExtExp, ...]
    mode: str = PROPOSITION

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "tilde_p", tuple(ExtExp(v) for v in self.tilde_p))
        object.__setattr__(self, "tilde_q", tuple(ExtExp(v) for v in self.tilde_q))

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "kappa": list(self.kappa.values), "rho": list(self.rho.values),
            "tilde_p": [str(v) for v in self.tilde_p],
            "tilde_q": [str(v) for v in self.tilde_q],
        }


# ---------------------------------------------------------------------------
# Plain and permuted Young-condition checkers.  Empty sums are 0.
# ---------------------------------------------------------------------------

def check_young_time(p0, p: Sequence, r0, r: Sequence) -> bool:
    """Time-side conditions (A1)-(A3), exact.

    (A1) 1/p_k >= 1/r_k for k = 1..m;
    (A2) sum_{l<=k} (1/p_l - 1/r_l) <= 1/r0 - 1/p_{k+1} for k = 0..m-1;
    (A3) sum_{l<=m} (1/p_l - 1/r_l) = 1/r0 - 1/p0.
    """
    P, R = _us(p), _us(r)
    if len(P) != len(R) or not P:
        raise ValueError("p and r must have equal positive length")
    P0, R0 = _u(p0), _u(r0)
    m = len(P)
    if any(P[k] < R[k] for k in range(m)):
        return False
    acc = _ZERO
    for k in range(m):  # condition (A2) at k, then accumulate Delta_{k+1}
        if acc > R0 - P[k]:
            return False
        acc += P[k] - R[k]
    return acc == R0 - P0


def check_young_freq(q: Sequence, q_last, s: Sequence, s_last) -> bool:
    """Frequency-side conditions (B1)-(B3), exact.

    (B1) 1/s_k >= 1/q_k for k = 1..m;
    (B2) sum_{l>k} (1/q_l - 1/s_l) >= 1/s_{m+1} - 1/q_k for k = 1..m;
    (B3) sum_{l<=m} (1/q_l - 1/s_l) = 1/s_{m+1} - 1/q_{m+1}.
    """
    Q, S = _us(q), _us(s)
    if len(Q) != len(S) or not Q:
        raise ValueError("q and s must have equal positive length")
    Qlast, Slast = _u(q_last), _u(s_last)
    m = len(Q)
    if any(S[k] < Q[k] for k in range(m)):
        return False
    tail = _ZERO
    for k in range(m - 1, -1, -1):  # tail = sum_{l>k} (Q_l - S_l)
        if tail < Slast - Q[k]:
            return False
        tail += Q[k] - S[k]
    return tail == Slast - Qlast


def check_young_time_perm(kappa, p0, p: Sequence, r0, r: Sequence,
                          printed_endpoint: bool = False) -> bool:
    """Permuted time-side conditions (A0)-(A3).

    With z the position of index 0 under kappa:
    (A0) p_{kappa(l)} = r_{kappa(l)} for positions l = 0..z-1;
    (A1) p_{kappa(l)} <= r_{kappa(l)} for positions l = z+1..m;
    (A2) sum_{l=z+1..k} (1/p_{k(l)} - 1/r_{k(l)}) <= 1/r0 - 1/p_{k(k+1)},
         k = z..m-1;
    (A3) sum over l = z+1..m of the same differences equals 1/r0 - 1/p0.

    ``printed_endpoint`` widens (A1) to start at position z, which adds the
    constraint p0 <= r0; that variant collapses the conditions to the
    unpermuted equal-exponent case and is exposed only for comparison.
    Reduces exactly to :func:`check_young_time` when kappa is the identity.
    """
    P, R = _us(p), _us(r)
    m = len(P)
    if len(R) != m:
        raise ValueError("p and r must have equal length")
    kappa = _as_time_perm(kappa, m)
    P0, R0 = _u(p0), _u(r0)

    def up(k):
        return P0 if k == 0 else P[k - 1]

    def ur(k):
        return R0 if k == 0 else R[k - 1]

    z = kappa.position_of(0)
    for ell in range(z):  # (A0)
        if up(kappa(ell)) != ur(kappa(ell)):
            return False
    lo = z if printed_endpoint else z + 1
    for ell in range(lo, m + 1):  # (A1)
        if up(kappa(ell)) < ur(kappa(ell)):
            return False
    acc = _ZERO
    for k in range(z, m):  # (A2) at k, then accumulate position k+1
        if acc > R0 - up(kappa(k + 1)):
            return False
        acc += up(kappa(k + 1)) - ur(kappa(k + 1))
    return acc == R0 - P0


def check_young_freq_perm(rho, q: Sequence, q_last, s: Sequence, s_last,
                          printed_b0: bool = False) -> bool:
    """Permuted frequency-side conditions (B0)-(B3).

    With w the position of index m+1 under rho:
    (B0) q_{rho(l)} = s_{rho(l)} for positions l = w+1..m+1;
    (B1) 1/s_{rho(k)} >= 1/q_{rho(k)} for positions k = 1..w-1;
    (B2) sum_{l=k+1..w-1} (1/q_{r(l)} - 1/s_{r(l)}) >= 1/s_{m+1} - 1/q_{rho(k)},
         k = 1..w-1;
    (B3) sum over l = 1..w-1 equals 1/s_{m+1} - 1/q_{m+1}.

    ``printed_b0`` shifts the (B0) range to positions w..m, which forces
    q_{m+1} = s_{m+1} and contradicts (B3) except in degenerate cases; it is
    exposed only for comparison.  Reduces exactly to :func:`check_young_freq`
    when rho is the identity.
    """
    Q, S = _us(q), _us(s)
    m = len(Q)
    if len(S) != m:
        raise ValueError("q and s must have equal length")
    rho = _as_freq_perm(rho, m)
    Qlast, Slast = _u(q_last), _u(s_last)

    def uq(k):
        return Qlast if k == m + 1 else Q[k - 1]

    def us(k):
        return Slast if k == m + 1 else S[k - 1]

    w = rho.position_of(m + 1)
    b0_range = range(w, m + 1) if printed_b0 else range(w + 1, m + 2)
    for ell in b0_range:  # (B0)
        if uq(rho(ell)) != us(rho(ell)):
            return False
    for k in range(1, w):  # (B1)
        if us(rho(k)) < uq(rho(k)):
            return False
    tail = _ZERO
    for k in range(w - 1, 0, -1):  # (B2): tail = sum_{l=k+1..w-1}
        if tail < Slast - uq(rho(k)):
            return False
        tail += uq(rho(k)) - us(rho(k))
    return tail == Slast - Qlast


# ---------------------------------------------------------------------------
# Linear expressions over named variables, and Fourier-Motzkin elimination.
# ---------------------------------------------------------------------------

class Lin:
    """An affine expression sum(coeffs[v] * x_v) + const over the rationals."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: dict | None = None, const=_ZERO):
        self.coeffs = {v: Fraction(c) for v, c in (coeffs or {}).items() if c != 0}
        self.const = Fraction(const)

    @classmethod
    def constant(cls, c) -> "Lin":
        return cls({}, c)

    @classmethod
    def var(cls, v, coeff=_ONE) -> "Lin":
        return cls({v: coeff}, _ZERO)

    def __add__(self, other) -> "Lin":
        if not isinstance(other, Lin):
            other = Lin.constant(other)
        coeffs = dict(self.coeffs)
        for v, c in other.coeffs.items():
            coeffs[v] = coeffs.get(v, _ZERO) + c
        return Lin(coeffs, self.const + other.const)

    def __sub__(self, other) -> "Lin":
        if not isinstance(other, Lin):
            other = Lin.constant(other)
        return self + other.scale(-1)

    def scale(self, k) -> "Lin":
        k = Fraction(k)
        return Lin({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    def evaluate(self, assignment: dict) -> Fraction:
        return self.const + sum((c * assignment[v] for v, c in self.coeffs.items()),
                                _ZERO)

    def key(self):
        """Canonical form (scaled so the leading coefficient is +-1) for dedup."""
        if not self.coeffs:
            return ((), self.const)
        items = tuple(sorted(self.coeffs.items()))
        lead = abs(items[0][1])
        return (tuple((v, c / lead) for v, c in items), self.const / lead)


def _eliminate(constraints: list[Lin], var) -> list[Lin]:
    """One Fourier-Motzkin step: project out ``var`` from {lin <= 0}."""
    keep, uppers, lowers = [], [], []
    for lin in constraints:
        c = lin.coeffs.get(var, _ZERO)
        if c == 0:
            keep.append(lin)
        elif c > 0:
            uppers.append((c, lin))  # var <= -(rest)/c
        else:
            lowers.append((-c, lin))  # var >= (rest)/(-c)
    out = list(keep)
    seen = {lin.key() for lin in out}
    for cu, up in uppers:
        for cl, lo in lowers:
            combined = up.scale(cl) + lo.scale(cu)
            combined = Lin({v: c for v, c in combined.coeffs.items() if v != var},
                           combined.const)
            k = combined.key()
            if k not in seen:
                seen.add(k)
                out.append(combined)
    return out


def _consistent_constants(constraints: list[Lin]) -> bool:
    return all(lin.const <= 0 for lin in constraints if not lin.coeffs)


def fm_solve(constraints: list[Lin], order: Sequence) -> Optional[dict]:
    """Decide {lin <= 0 for all lin} and return one solution, or None.

    Variables are assigned in ``order``; each value is the midpoint of the
    interval the already-assigned variables leave for it (deterministic, and
    strictly interior whenever the region has interior).  Every variable must
    be bounded on both sides by the system, which the callers' box
    constraints guarantee.
    """
    systems = [list(constraints)]
    for var in reversed(order):
        systems.append(_eliminate(systems[-1], var))
    if not _consistent_constants(systems[-1]):
        return None
    assignment: dict = {}
    for i, var in enumerate(order):
        system = systems[len(order) - 1 - i]  # contains order[:i+1]
        lo, hi = None, None
        for lin in system:
            c = lin.coeffs.get(var, _ZERO)
            if c == 0:
                continue
            # every other variable in this system was assigned earlier
            rest = lin.const + sum((lin.coeffs[v] * assignment[v]
                                    for v in lin.coeffs if v != var), _ZERO)
            bound = -rest / c
            if c > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is None or hi is None:
            raise ValueError(f"variable {var} is unbounded; missing box constraint")
        if lo > hi:  # cannot happen after a consistent elimination
            return None
        assignment[var] = (lo + hi) / 2
    return assignment


def fm_feasible(constraints: list[Lin], variables: Sequence) -> bool:
    system = list(constraints)
    for var in variables:
        system = _eliminate(system, var)
    return _consistent_constants(system)


def fm_lower_bound(constraints: list[Lin], variables: Sequence, target) -> Optional[Fraction]:
    """Smallest feasible value of ``target`` after eliminating ``variables``.

    Returns None when the system is infeasible.  ``target`` must be bounded
    below (the callers bound it in [0, 1]).
    """
    system = list(constraints)
    for var in variables:
        system = _eliminate(system, var)
    if not _consistent_constants(system):
        return None
    lo, hi = None, None
    for lin in system:
        c = lin.coeffs.get(target, _ZERO)
        if c == 0:
            continue
        bound = -lin.const / c
        if c > 0:
            hi = bound if hi is None else min(hi, bound)
        else:
            lo = bound if lo is None else max(lo, bound)
    if lo is None:
        raise ValueError("target variable is unbounded below")
    if hi is not None and lo > hi:
        return None
    return lo


# ---------------------------------------------------------------------------
# The condition systems of the two modes.
#
# Effective reciprocals: in theorem mode (r0, r, s, s_{m+1}) and
# (p0, q_{m+1}) enter through their conjugates; p, q and the auxiliary
# variables are shared by both modes.  Writing Reff/Seff for the effective
# values, both modes then impose the *same* linear system:
#
#   time box:    Reff_k <= u(p~_k) <= u(p_k)            (all k = 1..m)
#   (1) for k = z..m-1:
#       sum_{l=z+1..k} (x_l - Reff_{kappa(l)}) + x_{k+1} <= Reff_0
#   (2) sum_{l=z+1..m} (x_l - Reff_{kappa(l)}) >= Reff_0 - P0eff
#   freq box:    0 <= u(q~_k) <= min(u(q_k), Seff_k)    (all k = 1..m)
#   (3) for k = 1..w-1:
#       sum_{l=k+1..w-1} (y_l - Seff_{rho(l)}) >= Seff_{m+1} - y_k
#   (4) sum_{l=1..w-1} (y_l - Seff_{rho(l)}) >= Seff_{m+1} - Qlast_eff
#
# where x_l = u(p~_{kappa(l)}) and y_l = u(q~_{rho(l)}).  Variables at the
# pulled-out positions (time l < z, frequency l > w) do not appear in
# (1)-(4); only their boxes constrain them.
# ---------------------------------------------------------------------------

def _effective(profile: ExponentProfile, mode: str):
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    m = profile.m
    if mode == PROPOSITION:
        Reff = [profile.ur(k) for k in range(m + 1)]
        Seff = [profile.us(k) for k in range(1, m + 2)]
        P0eff = profile.p0.u
        Qlast_eff = profile.q_last.u
    else:
        Reff = [_ONE - profile.ur(k) for k in range(m + 1)]
        Seff = [_ONE - profile.us(k) for k in range(1, m + 2)]
        P0eff = _ONE - profile.p0.u
        Qlast_eff = _ONE - profile.q_last.u
    return Reff, Seff, P0eff, Qlast_eff


def _time_system(profile: ExponentProfile, kappa: Perm, mode: str,
                 search_tilde: bool, p0_free: bool):
    """Constraints {lin <= 0} and the variable list for the time side.

    Variables: ("tp", k) for the auxiliary reciprocal u(p~_k) when searched,
    and "P0" for the reciprocal of p0 when ``p0_free``.
    """
    m = profile.m
    Reff, _, P0eff, _ = _effective(profile, mode)
    z = kappa.position_of(0)
    cons: list[Lin] = []

    def tilde(k: int) -> Lin:  # u(p~_k) as an expression
        if search_tilde:
            return Lin.var(("tp", k))
        return Lin.constant(profile.p[k - 1].u)

    # boxes (also pin down fixed tildes: infeasible when p_k > r-effective_k)
    for k in range(1, m + 1):
        cons.append(Lin.constant(Reff[k]) - tilde(k))       # Reff_k <= u(p~_k)
        cons.append(tilde(k) - Lin.constant(profile.p[k - 1].u))  # u(p~_k) <= u(p_k)

    if p0_free:
        P0 = Lin.var(("p0", 0))
        cons.append(P0.scale(-1))                  # 0 <= P0
        cons.append(P0 - Lin.constant(_ONE))       # P0 <= 1
        P0e = P0 if mode == PROPOSITION else Lin.constant(_ONE) - P0
    else:
        P0e = Lin.constant(P0eff)

    acc = Lin.constant(_ZERO)
    for k in range(z, m):  # condition (1) at k, then accumulate position k+1
        nxt = tilde(kappa(k + 1))
        cons.append(acc + nxt - Lin.constant(Reff[0]))
        acc = acc + nxt - Lin.constant(Reff[kappa(k + 1)])
    cons.append(Lin.constant(Reff[0]) - P0e - acc)  # condition (2)

    variables = [("tp", k) for k in range(1, m + 1)] if search_tilde else []
    return cons, variables


def _freq_system(profile: ExponentProfile, rho: Perm, mode: str, search_tilde: bool):
    """Constraints {lin <= 0} and the variable list for the frequency side."""
    m = profile.m
    _, Seff, _, Qlast_eff = _effective(profile, mode)
    w = rho.position_of(m + 1)
    cons: list[Lin] = []

    def tilde(k: int) -> Lin:  # u(q~_k)
        if search_tilde:
            return Lin.var(("tq", k))
        return Lin.constant(profile.q[k - 1].u)

    for k in range(1, m + 1):
        cons.append(tilde(k).scale(-1))                              # 0 <= u(q~_k)
        cons.append(tilde(k) - Lin.constant(profile.q[k - 1].u))     # q~_k >= q_k
        cons.append(tilde(k) - Lin.constant(Seff[k - 1]))            # q~_k >= s-effective_k

    # condition (3) at each k = 1..w-1 with running sum over positions > k
    tail = Lin.constant(_ZERO)
    for k in range(w - 1, 0, -1):
        yk = tilde(rho(k))
        cons.append(Lin.constant(Seff[m]) - yk - tail)  # Seff_{m+1} - y_k <= tail
        tail = tail + yk - Lin.constant(Seff[rho(k) - 1])
    cons.append(Lin.constant(Seff[m]) - Lin.constant(Qlast_eff) - tail)  # condition (4)

    variables = [("tq", k) for k in range(1, m + 1)] if search_tilde else []
    return cons, variables


def check_conditions(profile: ExponentProfile, witness: FeasibilityWitness,
                     printed_q_index: bool = False) -> bool:
    """Verify a witness against the mode's conditions (1)-(4) plus its boxes.

    ``printed_q_index`` switches condition (3) to read the unpermuted
    auxiliary reciprocal u(q~_k) on its right-hand side instead of
    u(q~_{rho(k)}); the permuted indexing is the default.
    """
    m = profile.m
    if len(witness.tilde_p) != m or len(witness.tilde_q) != m:
        raise ValueError("witness tilde lists must have length m")
    kappa = _as_time_perm(witness.kappa, m)
    rho = _as_freq_perm(witness.rho, m)
    Reff, Seff, P0eff, Qlast_eff = _effective(profile, witness.mode)
    tp = [v.u for v in witness.tilde_p]
    tq = [v.u for v in witness.tilde_q]

    # box constraints: violated -> False, not an error
    for k in range(m):
        if not (Reff[k + 1] <= tp[k] <= profile.p[k].u):
            return False
        if tq[k] > profile.q[k].u or tq[k] > Seff[k]:
            return False

    z = kappa.position_of(0)
    acc = _ZERO
    for k in range(z, m):  # (1)
        if acc + tp[kappa(k + 1) - 1] > Reff[0]:
            return False
        acc += tp[kappa(k + 1) - 1] - Reff[kappa(k + 1)]
    if acc < Reff[0] - P0eff:  # (2)
        return False

    w = rho.position_of(m + 1)
    tail = _ZERO
    for k in range(w - 1, 0, -1):  # (3)
        rhs = tq[k - 1] if printed_q_index else tq[rho(k) - 1]
        if tail < Seff[m] - rhs:
            return False
        tail += tq[rho(k) - 1] - Seff[rho(k) - 1]
    return tail >= Seff[m] - Qlast_eff  # (4)


def _solve_time_side(profile: ExponentProfile, kappa: Perm, mode: str,
                     search_tilde: bool) -> Optional[dict]:
    cons, variables = _time_system(profile, kappa, mode, search_tilde, p0_free=False)
    if not variables:
        return {} if fm_feasible(cons, []) else None
    return fm_solve(cons, variables)


def _solve_freq_side(profile: ExponentProfile, rho: Perm, mode: str,
                     search_tilde: bool) -> Optional[dict]:
    cons, variables = _freq_system(profile, rho, mode, search_tilde)
    if not variables:
        return {} if fm_feasible(cons, []) else None
    return fm_solve(cons, variables)


MAX_M = 4  # factorial enumeration bound for the permutation search


def _perm_candidates(profile, given, m, time_side: bool):
    if given is not None:
        return [(_as_time_perm if time_side else _as_freq_perm)(given, m)]
    return list(Perm.all(m + 1, 0 if time_side else 1))


def feasible(profile: ExponentProfile, mode: str = PROPOSITION, *,
             kappa=None, rho=None,
             search_tilde: bool = True) -> Optional[FeasibilityWitness]:
    """Search permutations and auxiliary exponents; return a witness or None.

    Permutation pairs are enumerated in lexicographic order (kappa outer,
    rho inner) and the first feasible pair is returned, so the result is
    deterministic.  ``kappa``/``rho`` pin one side's permutation instead of
    searching it.  With ``search_tilde`` off, the auxiliary exponents are
    frozen at p~ = p and q~ = q and only the permutations are searched.
    """
    m = profile.m
    if m > MAX_M:
        raise ValueError(f"m = {m} exceeds the enumeration bound {MAX_M}")
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")

    # the two sides are independent linear systems, so the lexicographically
    # first feasible pair is (first feasible kappa, first feasible rho)
    freq_hit = None
    for rp in _perm_candidates(profile, rho, m, time_side=False):
        f_sol = _solve_freq_side(profile, rp, mode, search_tilde)
        if f_sol is not None:
            freq_hit = (rp, f_sol)
            break
    if freq_hit is None:
        return None
    for kp in _perm_candidates(profile, kappa, m, time_side=True):
        t_sol = _solve_time_side(profile, kp, mode, search_tilde)
        if t_sol is None:
            continue
        rp, f_sol = freq_hit
        if search_tilde:
            tilde_p = tuple(ExtExp.from_reciprocal(t_sol[("tp", k)])
                            for k in range(1, m + 1))
            tilde_q = tuple(ExtExp.from_reciprocal(f_sol[("tq", k)])
                            for k in range(1, m + 1))
        else:
            tilde_p, tilde_q = profile.p, profile.q
        return FeasibilityWitness(kp, rp, tilde_p, tilde_q, mode)
    return None


def max_p0(profile: ExponentProfile, mode: str = PROPOSITION, *,
           kappa=None, rho=None, search_tilde: bool = True) -> Optional[ExtExp]:
    """The largest p0 for which :func:`feasible` succeeds, computed exactly.

    u(p0) is left free in the elimination; the smallest feasible reciprocal
    over all admitted permutations is returned as an exponent.  Returns None
    when no p0 in [1, inf] makes the profile feasible.
    """
    m = profile.m
    if m > MAX_M:
        raise ValueError(f"m = {m} exceeds the enumeration bound {MAX_M}")

    freq_ok = any(_solve_freq_side(profile, rp, mode, search_tilde) is not None
                  for rp in _perm_candidates(profile, rho, m, time_side=False))
    if not freq_ok:
        return None

    best: Optional[Fraction] = None
    for kp in _perm_candidates(profile, kappa, m, time_side=True):
        cons, variables = _time_system(profile, kp, mode, search_tilde, p0_free=True)
        lo = fm_lower_bound(cons, variables, ("p0", 0))
        if lo is not None and (best is None or lo < best):
            best = lo
    if best is None:
        return None
    return ExtExp.from_reciprocal(best)


# ---------------------------------------------------------------------------
# The bilinear (m = 2) case tables and the monotone-chain shortcut.
# ---------------------------------------------------------------------------

# permutations realizing each case id (frequency case 5 is the index swap of
# case 4, i.e. rho = (2,1,3))
TIME_CASE_PERMS = {
    1: (Perm((1, 2, 0)), Perm((2, 1, 0))),
    2: (Perm((2, 0, 1)),),
    3: (Perm((1, 0, 2)),),
    4: (Perm((0, 1, 2)),),
    5: (Perm((0, 2, 1)),),
}
FREQ_CASE_PERMS = {
    1: (Perm((3, 1, 2), 1), Perm((3, 2, 1), 1)),
    2: (Perm((1, 3, 2), 1),),
    3: (Perm((2, 3, 1), 1),),
    4: (Perm((1, 2, 3), 1),),
    5: (Perm((2, 1, 3), 1),),
}


def check_bilinear_cases(profile: ExponentProfile) -> tuple[frozenset[int], frozenset[int]]:
    """Evaluate the five time cases and five frequency cases for m = 2.

    Each case's printed inequalities (including the max-terms, which become
    min-terms on reciprocals) are evaluated literally with exact rationals.
    Returns the sets of case ids that hold on each side; the boundedness
    conclusion applies iff both sets are nonempty and the standing
    hypotheses 1/p_k + 1/r_k >= 1 (k = 1, 2) hold.
    """
    if profile.m != 2:
        raise ValueError("the case tables are specific to m = 2")
    P0, P1, P2 = profile.p0.u, profile.p[0].u, profile.p[1].u
    R0, R1, R2 = profile.r0.u, profile.r[0].u, profile.r[1].u
    Q1, Q2, Q3 = profile.q[0].u, profile.q[1].u, profile.q_last.u
    S1, S2, S3 = profile.s[0].u, profile.s[1].u, profile.s_last.u

    time_cases = set()
    if P0 <= R0:
        time_cases.add(1)
    if 1 + P0 <= R0 + R1 + P1 and R1 >= P0 and R1 >= R0:
        time_cases.add(2)
    if 1 + P0 <= R0 + R2 + P2 and R2 >= P0 and R2 >= R0:
        time_cases.add(3)
    # 1/max{p1, r0'} = min(P1, 1 - R0), and symmetrically for case 5
    if (2 + P0 <= R0 + R1 + R2 + min(P1, 1 - R0) + P2
            and R2 >= P0 and R1 >= R0 and R2 >= R0):
        time_cases.add(4)
    if (2 + P0 <= R0 + R1 + R2 + min(P2, 1 - R0) + P1
            and R1 >= P0 and R1 >= R0 and R2 >= R0):
        time_cases.add(5)

    freq_cases = set()
    if Q3 <= S3:
        freq_cases.add(1)
    if 1 + Q3 <= Q1 + S1 + S3 and S3 >= Q3 and S3 >= S1 and S3 >= 1 - Q1:
        freq_cases.add(2)
    if 1 + Q3 <= Q2 + S2 + S3 and S3 >= Q3 and S3 >= S2 and S3 >= 1 - Q2:
        freq_cases.add(3)
    m1 = min(Q1, 1 - S1)  # 1/max{q1, s1'}
    m2 = min(Q2, 1 - S2)  # 1/max{q2, s2'}
    if (2 <= m1 + m2 + S2 + S3 and S3 >= 1 - Q2 and S3 >= S2
            and 2 + Q3 <= m1 + m2 + S1 + S2 + S3):
        freq_cases.add(4)
    if (2 <= m1 + m2 + S1 + S3 and S3 >= 1 - Q1 and S3 >= S1
            and 2 + Q3 <= m1 + m2 + S1 + S2 + S3):
        freq_cases.add(5)

    return frozenset(time_cases), frozenset(freq_cases)


def bilinear_standing(profile: ExponentProfile) -> bool:
    """Standing hypotheses of the m = 2 tables: 1/p_k + 1/r_k >= 1, k = 1, 2."""
    if profile.m != 2:
        raise ValueError("m must be 2")
    return all(profile.p[k].u + profile.r[k].u >= 1 for k in range(2))


def bilinear_applies(profile: ExponentProfile) -> bool:
    time_cases, freq_cases = check_bilinear_cases(profile)
    return bool(time_cases) and bool(freq_cases) and bilinear_standing(profile)


def check_monotone_chain(profile: ExponentProfile) -> bool:
    """Identity-permutation shortcut: two conjugate monotone chains plus the
    two aggregate inequalities.

    Chains: 1 <= r0' <= p_1 <= r_1' <= ... <= p_m <= r_m' and
    1 <= s_1' <= q_1 <= s_2' <= ... <= q_m <= s_{m+1}'.
    Aggregates: 1/r0 + sum(1/p_l + 1/r_l) >= m + 1/p0 and
    1/s_{m+1} + sum(1/q_l + 1/s_l) >= m + 1/q_{m+1}.
    """
    m = profile.m
    chain_t = [_ONE - profile.ur(0)]
    for k in range(1, m + 1):
        chain_t += [profile.up(k), _ONE - profile.ur(k)]
    # conjugate-exponent order r0' <= p_1 <= r_1' <= ... means the
    # reciprocals are non-increasing along the chain
    if any(chain_t[i] < chain_t[i + 1] for i in range(len(chain_t) - 1)):
        return False
    chain_f = []
    for k in range(1, m + 1):
        chain_f += [_ONE - profile.us(k), profile.uq(k)]
    chain_f.append(_ONE - profile.us(m + 1))
    if any(chain_f[i] < chain_f[i + 1] for i in range(len(chain_f) - 1)):
        return False
    agg_t = profile.ur(0) + sum((profile.up(k) + profile.ur(k)
                                 for k in range(1, m + 1)), _ZERO)
    if agg_t < m + profile.up(0):
        return False
    agg_f = profile.us(m + 1) + sum((profile.uq(k) + profile.us(k)
                                     for k in range(1, m + 1)), _ZERO)
    return agg_f >= m + profile.uq(m + 1)
