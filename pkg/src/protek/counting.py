"""Exact counting of trees by maximum protection number.

Solves the size-marking fixed point Y = x*Phi(Y) and, for each bound h,
the joint system

    Y_{h,0} = Y_{h,1} + x
    Y_{h,k} = x*(Phi(Y_{h,k-1}) - Phi(Y_{h,h}))     for 1 <= k <= h

whose k = 0 member generates the trees in which no vertex is more than
h-protected.  The exact CDF is the coefficient quotient
P(X_n <= h) = [x^n] Y_{h,0} / [x^n] Y, and the exact expectation follows
from the tail sum over h.

The solver propagates coefficients order by order: the x-factor in every
equation makes the coefficient of x^n depend only on coefficients of
order < n, so a single forward pass yields the joint fixed point that
repeated full sweeps converge to.  Composition with Phi is streamed with
a per-family recurrence (geometric, exponential or polynomial), keeping
one solve at O(h * N^2) coefficient operations.  All arithmetic is exact
(plain integers when every weight is an integer, Fractions otherwise),
and the results can be re-checked against the generic Horner composition
of the series module through :meth:`ProtectionSeriesSet.residuals`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from operator import mul
from typing import Dict, List, NamedTuple, Optional, Tuple

from .errors import PeriodMismatch
from .families import (
    EXPONENTIAL,
    GEOMETRIC,
    GEOMETRIC_MINUS_T,
    POLYNOMIAL,
    WeightFamily,
    family_structure,
)
from .series import TruncatedSeries, compose_phi


# ---------------------------------------------------------------------------
# streamed composition Phi(S) for a growing argument series S
# ---------------------------------------------------------------------------


class _GeometricComposer:
    """Phi(t) = 1/(1-t):  G = 1 + S*G, so g_m = sum_j s_j g_{m-j}."""

    __slots__ = ("arg", "out")

    def __init__(self, arg: list):
        self.arg = arg
        self.out = [1]

    def coeff(self, m: int):
        out, arg = self.out, self.arg
        while len(out) <= m:
            mm = len(out)
            out.append(sum(map(mul, arg[1 : mm + 1], reversed(out))))
        return out[m]


class _RiordanComposer:
    """Phi(t) = 1/(1-t) - t:  G = geometric(S) - S."""

    __slots__ = ("arg", "geo")

    def __init__(self, arg: list):
        self.arg = arg
        self.geo = _GeometricComposer(arg)

    def coeff(self, m: int):
        g = self.geo.coeff(m)
        return g if m == 0 else g - self.arg[m]


class _ExpComposer:
    """Phi(t) = e^t:  G' = S'G, so m*g_m = sum_j j*s_j g_{m-j}."""

    __slots__ = ("arg", "out", "jarg")

    def __init__(self, arg: list):
        self.arg = arg
        self.out = [Fraction(1)]
        self.jarg = [Fraction(0)]

    def coeff(self, m: int):
        out, arg, jarg = self.out, self.arg, self.jarg
        while len(jarg) <= m:
            j = len(jarg)
            jarg.append(j * arg[j])
        while len(out) <= m:
            mm = len(out)
            out.append(sum(map(mul, jarg[1 : mm + 1], reversed(out))) / mm)
        return out[m]


class _PolyComposer:
    """Polynomial Phi: maintain the powers S^2..S^J alongside S."""

    __slots__ = ("arg", "weights", "powers", "out")

    def __init__(self, weights: tuple, arg: list):
        self.arg = arg
        self.weights = weights
        degree = len(weights) - 1
        # powers[0] aliases the argument itself (S^1); higher powers own lists.
        self.powers = [arg] + [[0 * weights[0]] for _ in range(degree - 1)]
        self.out = [weights[0]]

    def coeff(self, m: int):
        out, arg, weights, powers = self.out, self.arg, self.weights, self.powers
        while len(out) <= m:
            mm = len(out)
            # extend each power to index mm in ascending degree
            for idx in range(1, len(powers)):
                prev = powers[idx - 1]
                cur = powers[idx]
                cur.append(sum(map(mul, arg[1:mm], reversed(prev[1:mm]))))
            total = 0
            for j in range(1, len(weights)):
                w = weights[j]
                if w:
                    total = total + w * powers[j - 1][mm]
            out.append(total)
        return out[m]


def _make_composer(f: WeightFamily, arg: list):
    if f.phi_form == GEOMETRIC:
        return _GeometricComposer(arg)
    if f.phi_form == GEOMETRIC_MINUS_T:
        return _RiordanComposer(arg)
    if f.phi_form == EXPONENTIAL:
        return _ExpComposer(arg)
    if f.phi_form == POLYNOMIAL:
        ws = f.poly_weights
        if f.integer_weights:
            ws = tuple(int(w) for w in ws)
        return _PolyComposer(ws, arg)
    raise ValueError(f"unknown phi_form {f.phi_form!r}")


def _ring_zero_one(f: WeightFamily):
    if f.integer_weights:
        return 0, 1
    return Fraction(0), Fraction(1)


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

_Y_CACHE: Dict[str, list] = {}
_Y0_CACHE: Dict[Tuple[str, int], list] = {}


def _y_coefficients(f: WeightFamily, order: int) -> list:
    """Raw coefficient list of Y through ``order`` (read-only)."""
    cached = _Y_CACHE.get(f.cache_key)
    if cached is not None and len(cached) > order:
        return cached
    zero, _ = _ring_zero_one(f)
    ys = [zero]
    comp = _make_composer(f, ys)
    for n in range(1, order + 1):
        ys.append(comp.coeff(n - 1))
    _Y_CACHE[f.cache_key] = ys
    return ys


def _solve_system_raw(f: WeightFamily, h: int, order: int) -> List[list]:
    """Coefficient lists for Y_{h,0}..Y_{h,h} through ``order``."""
    zero, one = _ring_zero_one(f)
    ys = [[zero] for _ in range(h + 1)]
    comps = [_make_composer(f, ys[k]) for k in range(h + 1)]
    for n in range(1, order + 1):
        m = n - 1
        top = comps[h].coeff(m)
        new = [None] * (h + 1)
        for k in range(1, h + 1):
            new[k] = comps[k - 1].coeff(m) - top
        new[0] = new[1] + (one if n == 1 else zero)
        for k in range(h + 1):
            ys[k].append(new[k])
    return ys


def _y0_coefficients(f: WeightFamily, h: int, order: int) -> list:
    key = (f.cache_key, h)
    cached = _Y0_CACHE.get(key)
    if cached is not None and len(cached) > order:
        return cached
    ys = _solve_system_raw(f, h, order)
    _Y0_CACHE[key] = ys[0]
    return ys[0]


def solve_Y(f: WeightFamily, order: int) -> TruncatedSeries:
    """The unique power-series solution of Y = x*Phi(Y), Y(0) = 0.

    Plane trees at order 5 give the Catalan numbers 0, 1, 1, 2, 5, 14.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    return TruncatedSeries(_y_coefficients(f, order)[: order + 1])


@dataclass(frozen=True)
class ProtectionSeriesSet:
    """Joint solution Y_{h,0}..Y_{h,h} of the bounded-protection system."""

    family: WeightFamily
    h: int
    order: int
    series: Tuple[TruncatedSeries, ...]

    @property
    def y0(self) -> TruncatedSeries:
        return self.series[0]

    def residuals(self) -> List[TruncatedSeries]:
        """Substitute the solution back into the defining equations.

        Uses the generic Horner composition from the series module, a
        fully independent route from the streamed solver; every returned
        series must be identically zero.
        """
        x = TruncatedSeries.x(self.order)
        phi = self.family.weight
        out = [self.series[0] - (self.series[1] + x)]
        phi_top = compose_phi(phi, self.series[self.h])
        for k in range(1, self.h + 1):
            rhs = x * (compose_phi(phi, self.series[k - 1]) - phi_top)
            out.append(self.series[k] - rhs)
        return out


def solve_protection_system(f: WeightFamily, h: int, order: int) -> ProtectionSeriesSet:
    """Solve the bounded-protection system through ``order`` for fixed h >= 1."""
    if h < 1:
        raise ValueError("h must be >= 1 (h = 0 is handled by definition)")
    if order < 1:
        raise ValueError("order must be >= 1")
    ys = _solve_system_raw(f, h, order)
    _Y0_CACHE.setdefault((f.cache_key, h), ys[0])
    return ProtectionSeriesSet(
        family=f,
        h=h,
        order=order,
        series=tuple(TruncatedSeries(col) for col in ys),
    )


def bounded_count(f: WeightFamily, h: int, n: int) -> Fraction:
    """Total weight of n-vertex trees whose maximum protection number is <= h.

    h = 0 admits only the single-vertex tree; h >= n-1 admits every tree
    of size n, so the value coincides with [x^n] Y there.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if h < 0:
        raise ValueError("h must be >= 0")
    if h == 0:
        return Fraction(1) if n == 1 else Fraction(0)
    if h >= n - 1:
        return Fraction(_y_coefficients(f, n)[n])
    return Fraction(_y0_coefficients(f, h, n)[n])


class CdfRow(NamedTuple):
    h: int
    p_exact: Fraction
    p_float: float


@dataclass(frozen=True)
class CdfTable:
    """Exact distribution P(X_n <= h) for one family and one size n."""

    family: str
    n: int
    rows: Tuple[CdfRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def probability(self, h: int) -> Fraction:
        for row in self.rows:
            if row.h == h:
                return row.p_exact
        raise KeyError(f"no row for h = {h}")


def _check_period(f: WeightFamily, n: int):
    D = family_structure(f).D
    if (n - 1) % D != 0:
        raise PeriodMismatch(
            f"{f.name}: no trees of size {n} exist (period D = {D}; "
            f"sizes must satisfy n = 1 mod {D})"
        )


def default_hmax(f: WeightFamily, n: int) -> int:
    """Largest h worth tabulating by default.

    In the exponential regime the CDF is within 1e-15 of 1 beyond roughly
    4*log_d(n), in the double-exponential regime beyond log_r of that;
    both caps carry a safety margin and are clipped to n - 1.  Callers
    wanting the full range pass hmax = n - 1 explicitly.
    """
    import mpmath as mp

    from .asymptotics import family_constants

    c = family_constants(f)
    ln_ratio = mp.log(max(n, 2)) / mp.log(c.d)
    if c.regime == "exponential":
        return min(n - 1, int(mp.ceil(4 * ln_ratio)) + 10)
    return min(n - 1, int(mp.ceil(mp.log(4 * ln_ratio) / mp.log(c.r))) + 2)


def cdf_exact(f: WeightFamily, n: int, hmax: Optional[int] = None) -> CdfTable:
    """Exact CDF rows (h, y_{h,n}/y_n) for h = 0 .. min(hmax, n-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_period(f, n)
    if hmax is None:
        hmax = default_hmax(f, n)
    yn = Fraction(_y_coefficients(f, n)[n])
    rows = []
    for h in range(0, min(hmax, n - 1) + 1):
        p = bounded_count(f, h, n) / yn
        rows.append(CdfRow(h, p, float(p)))
    return CdfTable(family=f.name, n=n, rows=tuple(rows))


def expectation_exact(f: WeightFamily, n: int) -> Fraction:
    """Exact expectation of the maximum protection number at size n.

    Tail sum E = sum_{h >= 0} (1 - P(X_n <= h)); the sum is finite since
    P = 1 from h = n-1 on, and stops early as soon as the exact counts
    agree (they are nondecreasing in h and capped by y_n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_period(f, n)
    if n == 1:
        return Fraction(0)
    yn = _y_coefficients(f, n)[n]
    deficit_total = 0
    for h in range(0, n - 1):
        if h == 0:
            yhn = 0
        else:
            yhn = _y0_coefficients(f, h, n)[n]
        gap = yn - yhn
        if h > 0 and gap == 0:
            break
        deficit_total = deficit_total + gap
    return Fraction(deficit_total) / Fraction(yn)
