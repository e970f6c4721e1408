"""Dyadic martingales as lazily evaluated interval-keyed objects.

A martingale here is a map ``S(I)`` on dyadic subintervals of [0,1) whose
value at an interval is the mean of its children's values (cancellation).
Construction paths:

* increment oracles, where each parent hands its two children exactly
  opposite jumps (cancellation is then exact by construction);
* value oracles, e.g. divided differences of a function, where
  cancellation holds up to evaluation error.

Growth martingales carry an exponent ``beta`` and are represented by their
*scaled* increments ``2^-(n*beta) * (T_n - T_{n-1})``, so the discount
transform and the sharpness construction invert each other exactly.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .dyadic import (
    DepthCapError,
    DomainError,
    DyadicInterval,
    default_max_depth,
    unit_interval,
)


def _check_unit(I: DyadicInterval):
    if not 0 <= I.index < (1 << I.level):
        raise DomainError(f"{I} lies outside the unit interval")


class Martingale:
    """Martingale on [0,1), built from a per-child increment oracle.

    The oracle must return exactly opposite values on the two children of
    any interval; values are accumulated along the ancestor chain and
    memoized.  ``star_bound``, when given, declares sup_n ||S_{n+1}-S_n||.

    Evaluators are pure; the memo cache is a plain dict whose entries are
    only ever written once per interval, so concurrent readers are safe.
    """

    def __init__(self, increment_fn: Callable[[DyadicInterval], float],
                 s0=0.0, max_depth: Optional[int] = None,
                 star_bound: Optional[float] = None, name: str = "martingale"):
        self._increment_fn = increment_fn
        self.s0 = s0
        self.max_depth = default_max_depth() if max_depth is None else max_depth
        self.star_bound = star_bound
        self.name = name
        self._values: dict[tuple[int, int], float] = {}

    def increment(self, child: DyadicInterval):
        """Jump S(child) - S(parent)."""
        if child.level == 0:
            raise DomainError("the root interval has no increment")
        _check_unit(child)
        if child.level > self.max_depth:
            raise DepthCapError(
                f"level {child.level} beyond max depth {self.max_depth}")
        return self._increment_fn(child)

    def value(self, I: DyadicInterval):
        """S(I): the constant value of S_level on I."""
        _check_unit(I)
        if I.level > self.max_depth:
            raise DepthCapError(f"level {I.level} beyond max depth {self.max_depth}")
        key = (I.level, I.index)
        cached = self._values.get(key)
        if cached is not None:
            return cached
        if I.level == 0:
            v = self.s0
        else:
            v = self.value(I.parent()) + self.increment(I)
        self._values[key] = v
        return v

    def level_values(self, n: int) -> np.ndarray:
        """Values of S_n on all 2^n level-n intervals, left to right.

        The generic path walks the tree; structured subclasses override
        with vectorized sweeps.
        """
        vals = np.empty(1 << n)
        for j in range(1 << n):
            vals[j] = self.value(DyadicInterval(n, j))
        return vals

    def level_increments(self, n: int) -> np.ndarray:
        """Increments into level n for all level-n intervals (n >= 1)."""
        if n < 1:
            raise DomainError("increments start at level 1")
        out = np.empty(1 << n)
        for j in range(1 << n):
            out[j] = self.increment(DyadicInterval(n, j))
        return out


class ValueMartingale(Martingale):
    """Martingale given by a direct value oracle (cancellation inherited
    from the oracle, so it is checked rather than guaranteed)."""

    def __init__(self, value_fn: Callable[[DyadicInterval], float], **kw):
        self._value_fn = value_fn
        super().__init__(increment_fn=self._increment_from_values, **kw)
        self.s0 = self.value(unit_interval())

    def _increment_from_values(self, child: DyadicInterval):
        return self.value(child) - self.value(child.parent())

    def value(self, I: DyadicInterval):
        _check_unit(I)
        if I.level > self.max_depth:
            raise DepthCapError(f"level {I.level} beyond max depth {self.max_depth}")
        key = (I.level, I.index)
        cached = self._values.get(key)
        if cached is None:
            cached = self._value_fn(I)
            self._values[key] = cached
        return cached


class BinaryDigitMartingale(Martingale):
    """S_n = 2*(number of 1-digits) - n; increments are exactly +-1."""

    def __init__(self, max_depth: Optional[int] = None):
        super().__init__(self._inc, s0=0, max_depth=max_depth,
                         star_bound=1.0, name="binary")

    @staticmethod
    def _inc(child: DyadicInterval) -> int:
        return 1 if (child.index & 1) else -1

    def value(self, I: DyadicInterval) -> int:
        _check_unit(I)
        return 2 * int(I.index).bit_count() - I.level

    def level_values(self, n: int) -> np.ndarray:
        idx = np.arange(1 << n, dtype=np.uint64)
        return 2.0 * np.bitwise_count(idx) - n

    def level_increments(self, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError("increments start at level 1")
        out = np.empty(1 << n)
        out[0::2] = -1.0
        out[1::2] = 1.0
        return out


def binary_digit_martingale(max_depth: Optional[int] = None) -> BinaryDigitMartingale:
    return BinaryDigitMartingale(max_depth=max_depth)


def zero_martingale() -> Martingale:
    return Martingale(lambda child: 0.0, s0=0.0, star_bound=0.0, name="zero")


class RandomSignMartingale(Martingale):
    """Increments +-scale with a deterministic random sign per parent."""

    def __init__(self, seed: int, scale: float = 1.0, max_depth: Optional[int] = None):
        super().__init__(self._inc, s0=0.0, max_depth=max_depth,
                         star_bound=scale, name=f"random-sign-{seed}")
        self.seed = seed
        self.scale = scale
        self._level_signs: dict[int, np.ndarray] = {}

    def _signs(self, parent_level: int) -> np.ndarray:
        signs = self._level_signs.get(parent_level)
        if signs is None:
            rng = np.random.default_rng((self.seed, parent_level))
            signs = rng.integers(0, 2, size=1 << parent_level) * 2 - 1
            self._level_signs[parent_level] = signs
        return signs

    def _inc(self, child: DyadicInterval) -> float:
        sign = int(self._signs(child.level - 1)[child.index >> 1])
        # left child takes +sign, right child the exact opposite
        return float(sign if (child.index & 1) == 0 else -sign) * self.scale

    def level_increments(self, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError("increments start at level 1")
        signs = self._signs(n - 1).astype(float) * self.scale
        out = np.empty(1 << n)
        out[0::2] = signs
        out[1::2] = -signs
        return out

    def level_values(self, n: int) -> np.ndarray:
        vals = np.zeros(1)
        for m in range(1, n + 1):
            vals = np.repeat(vals, 2) + self.level_increments(m)
        return vals


class FunctionMartingale(ValueMartingale):
    """S(I) = 2^n (f(b) - f(a)) for I = [a, b) at level n."""

    def __init__(self, f, depth: int, tol: Optional[float] = None):
        self.f = f
        self.depth = depth
        self.tol = tol
        super().__init__(self._value, max_depth=depth, name="from-function")

    def _value(self, I: DyadicInterval):
        diff = self.f.difference(I.left, I.right, tol=self.tol)
        if isinstance(diff, float):
            return math.ldexp(diff, I.level)
        return diff * (1 << I.level)


def from_function(f, depth: int, tol: Optional[float] = None) -> FunctionMartingale:
    """Divided-difference martingale of f, evaluable to the given depth."""
    return FunctionMartingale(f, depth, tol=tol)


class CancellationReport:
    def __init__(self, max_violation: float, worst_interval: Optional[DyadicInterval],
                 checked: int):
        self.max_violation = max_violation
        self.worst_interval = worst_interval
        self.checked = checked

    def ok(self, tol: float = 1e-12) -> bool:
        return self.max_violation <= tol

    def __repr__(self):
        return (f"CancellationReport(max_violation={self.max_violation:.3e}, "
                f"worst={self.worst_interval}, checked={self.checked})")


def _has_fast_levels(S: Martingale) -> bool:
    return type(S).level_values is not Martingale.level_values


def check_cancellation(S: Martingale, depth: int) -> CancellationReport:
    """Exhaustively verify value(I) = mean of children values to `depth`.

    Reports the largest deviation and the interval attaining it.  Fast
    level sweeps are used when the martingale provides them; deep sweeps
    are chunked to bound memory.
    """
    worst = 0.0
    worst_iv: Optional[DyadicInterval] = None
    checked = 0
    ranged = getattr(S, "level_values_range", None)
    if ranged is not None and depth > 20:
        for n in range(depth):
            size = 1 << n
            step = min(size, 1 << 20)
            for lo in range(0, size, step):
                parents = np.asarray(ranged(n, lo, lo + step), dtype=float)
                kids = np.asarray(ranged(n + 1, 2 * lo, 2 * (lo + step)), dtype=float)
                means = 0.5 * (kids[0::2] + kids[1::2])
                viol = np.abs(parents - means)
                j = int(np.argmax(viol))
                if viol[j] > worst:
                    worst = float(viol[j])
                    worst_iv = DyadicInterval(n, lo + j)
                checked += step
        return CancellationReport(worst, worst_iv, checked)
    if _has_fast_levels(S):
        parents = np.asarray(S.level_values(0), dtype=float)
        for n in range(depth):
            kids = np.asarray(S.level_values(n + 1), dtype=float)
            means = 0.5 * (kids[0::2] + kids[1::2])
            viol = np.abs(parents - means)
            j = int(np.argmax(viol))
            if viol[j] > worst:
                worst = float(viol[j])
                worst_iv = DyadicInterval(n, j)
            checked += 1 << n
            parents = kids
        return CancellationReport(worst, worst_iv, checked)
    for n in range(depth):
        for j in range(1 << n):
            I = DyadicInterval(n, j)
            v = S.value(I)
            lo = S.value(DyadicInterval(n + 1, 2 * j))
            hi = S.value(DyadicInterval(n + 1, 2 * j + 1))
            viol = abs(v - (lo + hi) / 2)
            if viol > worst:
                worst = float(viol)
                worst_iv = I
            checked += 1
    return CancellationReport(worst, worst_iv, checked)


def star_norm(S: Martingale, depth: int) -> float:
    """sup_{n <= depth} ||S_n - S_{n-1}||_inf over the evaluated tree.

    A to-depth lower bound of the supremum, monotone nondecreasing in
    depth.
    """
    worst = 0.0
    fast = type(S).level_increments is not Martingale.level_increments
    for n in range(1, depth + 1):
        if fast:
            worst = max(worst, float(np.max(np.abs(S.level_increments(n)))))
        else:
            for j in range(1 << n):
                worst = max(worst, abs(S.increment(DyadicInterval(n, j))))
    return worst


class GrowthMartingale:
    """Martingale T with growth exponent beta, held by scaled increments.

    The primitive is ``scaled_increment(child) = 2^-(n*beta) (T_n - T_{n-1})``
    on each level-n child, the quantity whose sup norm is the beta-star
    norm.  Absolute values are reconstructed as T_0 + sum 2^(k*beta) *
    scaled increments along the ancestry.
    """

    def __init__(self, beta: float, scaled_increment_fn: Callable[[DyadicInterval], float],
                 t0: float = 0.0, max_depth: Optional[int] = None,
                 beta_star_bound: Optional[float] = None, name: str = "growth"):
        if not 0.0 < beta < 1.0:
            raise DomainError("beta must lie in (0,1)")
        self.beta = beta
        self._scaled_fn = scaled_increment_fn
        self.t0 = t0
        self.max_depth = default_max_depth() if max_depth is None else max_depth
        self.beta_star_bound = beta_star_bound
        self.name = name
        self._values: dict[tuple[int, int], float] = {}

    def scaled_increment(self, child: DyadicInterval) -> float:
        if child.level == 0:
            raise DomainError("the root interval has no increment")
        _check_unit(child)
        return self._scaled_fn(child)

    def increment(self, child: DyadicInterval) -> float:
        return math.pow(2.0, child.level * self.beta) * self.scaled_increment(child)

    def value(self, I: DyadicInterval) -> float:
        _check_unit(I)
        key = (I.level, I.index)
        cached = self._values.get(key)
        if cached is not None:
            return cached
        v = self.t0 if I.level == 0 else self.value(I.parent()) + self.increment(I)
        self._values[key] = v
        return v


def beta_star_norm(T: GrowthMartingale, depth: int) -> float:
    """sup_{n <= depth} 2^-(n beta) ||T_n - T_{n-1}||_inf, exhaustively."""
    worst = 0.0
    for n in range(1, depth + 1):
        for j in range(1 << n):
            worst = max(worst, abs(T.scaled_increment(DyadicInterval(n, j))))
    return worst


def beta_norm(T: GrowthMartingale, depth: int) -> float:
    """sup_{n <= depth} 2^-(n beta) ||T_n||_inf, exhaustively to depth."""
    worst = abs(T.t0)
    for n in range(1, depth + 1):
        scale = math.pow(2.0, -n * T.beta)
        for j in range(1 << n):
            worst = max(worst, scale * abs(T.value(DyadicInterval(n, j))))
    return worst


def discount_transform(T: GrowthMartingale) -> Martingale:
    """Bounded-increment martingale S_n = sum_k 2^-(k beta)(T_k - T_{k-1}).

    S_0 = 0, and each unit increment *is* the scaled increment of T, so
    ||S_n - S_{n-1}||_inf <= ||{T}||_{beta,*} with no rounding at all.
    """
    return Martingale(T.scaled_increment, s0=0.0, max_depth=T.max_depth,
                      star_bound=T.beta_star_bound, name=f"discount({T.name})")


def sharpness_martingale(beta: float, base: Optional[Martingale] = None,
                         max_depth: Optional[int] = None) -> GrowthMartingale:
    """Growth martingale T_n = sum_k 2^(k beta)(S_k - S_{k-1}) over `base`.

    With the binary-digit base the beta-star norm is exactly 1, and the
    discount transform returns the base again (minus its starting value).
    """
    if base is None:
        base = binary_digit_martingale(max_depth=max_depth)
    return GrowthMartingale(beta, base.increment, t0=0.0,
                            max_depth=base.max_depth,
                            beta_star_bound=base.star_bound,
                            name=f"sharpness({base.name})")


def random_growth_martingale(beta: float, seed: int,
                             max_depth: Optional[int] = None) -> GrowthMartingale:
    """Growth martingale with random scaled increments, |.| <= 1, paired."""
    cache: dict[tuple[int, int], float] = {}

    def scaled(child: DyadicInterval) -> float:
        parent = (child.level - 1, child.index >> 1)
        mag = cache.get(parent)
        if mag is None:
            rng = np.random.default_rng((seed, parent[0], parent[1]))
            mag = float(rng.uniform(-1.0, 1.0))
            cache[parent] = mag
        return mag if (child.index & 1) == 0 else -mag

    return GrowthMartingale(beta, scaled, t0=0.0, max_depth=max_depth,
                            beta_star_bound=1.0, name=f"random-growth-{seed}")


def summation_by_parts_check(T: GrowthMartingale, depth: int) -> float:
    """Max residual of the summation-by-parts identity over all intervals.

    Compares S_n(x) = sum_{k<=n} 2^-(k beta)(T_k - T_{k-1}) against
    (1 - 2^-beta) sum_{k<n} 2^-(k beta) T_k + 2^-(n beta) T_n - 2^-beta T_0
    on every interval to `depth`.
    """
    S = discount_transform(T)
    beta = T.beta
    worst = 0.0
    for n in range(1, depth + 1):
        for j in range(1 << n):
            I = DyadicInterval(n, j)
            lhs = S.value(I)
            acc = 0.0
            for k in range(1, n):
                acc += math.pow(2.0, -k * beta) * T.value(I.ancestor(k))
            rhs = ((1.0 - 2.0 ** -beta) * acc
                   + math.pow(2.0, -n * beta) * T.value(I)
                   - 2.0 ** -beta * T.t0)
            worst = max(worst, abs(lhs - rhs))
    return worst


class SubsampledMartingale:
    """T_n = S_{N n + k} / (N + C) on the N-fold decimated dyadic tree.

    Level n of the decimated tree is the dyadic level N*n + k; each node
    has 2^N children and the mean of T_{n+1} over them reproduces T_n.
    When ||S_a - S_b||_inf <= C + |a - b| the decimated increments are
    bounded by 1, which is the whole point of the construction.
    """

    def __init__(self, S: Martingale, N: int, k: int, C: float):
        if N < 1 or not 0 <= k < N:
            raise DomainError("need N >= 1 and 0 <= k < N")
        self.S = S
        self.N = N
        self.k = k
        self.M = N + C

    def dyadic_level(self, n: int) -> int:
        return self.N * n + self.k

    def value(self, n: int, I: DyadicInterval) -> float:
        if I.level != self.dyadic_level(n):
            raise DomainError(
                f"level-{n} nodes live at dyadic level {self.dyadic_level(n)}")
        return self.S.value(I) / self.M

    def increment(self, n: int, I: DyadicInterval) -> float:
        if n == 0:
            raise DomainError("the root node has no increment")
        return self.value(n, I) - self.value(n - 1, I.ancestor(self.dyadic_level(n - 1)))

    def star_norm(self, depth: int) -> float:
        """sup over decimated steps to `depth` of |T_n - T_{n-1}|."""
        worst = 0.0
        for n in range(1, depth + 1):
            lvl = self.dyadic_level(n)
            for j in range(1 << lvl):
                worst = max(worst, abs(self.increment(n, DyadicInterval(lvl, j))))
        return worst

    def check_cancellation(self, depth: int) -> float:
        """Max deviation of a node value from the mean of its 2^N children."""
        worst = 0.0
        for n in range(depth):
            lvl = self.dyadic_level(n)
            nxt = self.dyadic_level(n + 1)
            fan = 1 << (nxt - lvl)
            for j in range(1 << lvl):
                parent = self.value(n, DyadicInterval(lvl, j))
                mean = sum(self.value(n + 1, DyadicInterval(nxt, j * fan + c))
                           for c in range(fan)) / fan
                worst = max(worst, abs(parent - mean))
        return worst


def subsample(S: Martingale, N: int, k: int, C: float) -> SubsampledMartingale:
    """Decimation combinator behind the additive-gap dimension bound."""
    return SubsampledMartingale(S, N, k, C)


def dump_rows(S: Martingale, depth: int):
    """(level, index, value) rows for the materialized prefix to `depth`."""
    for n in range(depth + 1):
        for j in range(1 << n):
            yield n, j, S.value(DyadicInterval(n, j))
