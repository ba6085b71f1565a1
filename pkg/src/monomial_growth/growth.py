"""Prescribed growth functions and their derived index tables.

A growth target f is an integer-valued, nondecreasing, submultiplicative
function with f(1) = alphabet size.  The construction only ever evaluates f
at powers of two; everything derived from it (choice-set sizes, projection
schedules, insertion floors) is computed in exact integer or rational
arithmetic, and every "for all m >= ..." style fact is certified only on an
explicit finite horizon that the reports carry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

MAX_VALUE_BITS = 1 << 21  # explicit budget; growth values can be astronomical


class GrowthError(ValueError):
    pass


class GrowthOverflowError(GrowthError):
    """A requested value exceeds the configured bit budget."""


class HorizonExhaustedError(RuntimeError):
    """No index below the verification horizon satisfies the requirement."""


class FeasibilityError(RuntimeError):
    """The prescribed sizes cannot be realized at some level."""


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _ceil_root_pow(n: int, p: int, q: int) -> int:
    """ceil(n**(p/q)) for positive integers, exactly."""
    target = n ** p
    if q == 1:
        return target
    lo, hi = 1, 1
    while hi ** q < target:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** q >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def floor_root(value: int, q: int) -> int:
    """floor(value**(1/q)) for positive integers, exactly."""
    if value <= 0:
        raise ValueError("positive value required")
    hi = 1
    while hi ** q <= value:
        hi *= 2
    lo = hi // 2
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid ** q <= value:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class GrowthSpec:
    """An evaluable growth target; see `parse_growth` for the text form.

    Families:
      exproot   f(n) = d ** ceil(n**beta)
      nearexp   f(n) = ceil((1+eps)**n)          (requires ceil(1+eps) == d)
      truncexp  f(1) = d, f(n) = 2**n for n >= 2
      table     explicit 1-indexed values
    """

    family: str
    d: int
    beta: Fraction | None = None
    eps: Fraction | None = None
    table: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.d < 2:
            raise GrowthError("alphabet size must be at least 2")
        if self.family == "exproot":
            if not (self.beta and 0 < self.beta < 1):
                raise GrowthError("exproot needs beta in (0,1)")
        elif self.family == "nearexp":
            if not (self.eps and self.eps > 0):
                raise GrowthError("nearexp needs eps > 0")
            if self.value(1) != self.d:
                raise GrowthError("nearexp: ceil(1+eps) must equal d")
        elif self.family == "truncexp":
            pass
        elif self.family == "table":
            if not self.table or self.table[0] != self.d:
                raise GrowthError("table must start with f(1) = d")
        else:
            raise GrowthError(f"unknown family {self.family!r}")

    def value(self, n: int) -> int:
        if n < 1:
            raise GrowthError("growth functions are defined for n >= 1")
        if self.family == "exproot":
            e = _ceil_root_pow(n, self.beta.numerator, self.beta.denominator)
            if e * self.d.bit_length() > MAX_VALUE_BITS:
                raise GrowthOverflowError(f"f({n}) exceeds the value budget")
            return self.d ** e
        if self.family == "nearexp":
            if n * (1 + self.eps.numerator).bit_length() > MAX_VALUE_BITS:
                raise GrowthOverflowError(f"f({n}) exceeds the value budget")
            v = (1 + self.eps) ** n
            return _ceil_div(v.numerator, v.denominator)
        if self.family == "truncexp":
            if n > MAX_VALUE_BITS:
                raise GrowthOverflowError(f"f({n}) exceeds the value budget")
            return self.d if n == 1 else 2 ** n
        if n > len(self.table):
            raise GrowthError(f"table growth spec has no value at n={n}")
        return self.table[n - 1]

    def dyadic(self, m: int) -> int:
        return self.value(1 << m)

    def ratio(self, m: int) -> Fraction:
        """f(2^{m+1}) / f(2^m)."""
        return Fraction(self.dyadic(m + 1), self.dyadic(m))

    def spec_string(self) -> str:
        if self.family == "exproot":
            return f"exproot:d={self.d},beta={self.beta}"
        if self.family == "nearexp":
            return f"nearexp:d={self.d},eps={self.eps}"
        if self.family == "truncexp":
            return f"truncexp:d={self.d}"
        return "table:" + ",".join(map(str, self.table))

    def __str__(self) -> str:
        return self.spec_string()


def parse_growth(text: str) -> GrowthSpec:
    """Parse the compact text form, e.g. `exproot:d=2,beta=1/2`."""
    try:
        family, _, rest = text.strip().partition(":")
        if family == "table":
            values = tuple(int(v) for v in rest.split(","))
            return GrowthSpec("table", values[0], table=values)
        kv = {}
        if rest:
            for part in rest.split(","):
                k, _, v = part.partition("=")
                kv[k.strip()] = v.strip()
        d = int(kv.pop("d"))
        if family == "exproot":
            return GrowthSpec("exproot", d, beta=Fraction(kv.pop("beta")))
        if family == "nearexp":
            return GrowthSpec("nearexp", d, eps=Fraction(kv.pop("eps")))
        if family == "truncexp":
            return GrowthSpec("truncexp", d)
        raise GrowthError(f"unknown family {family!r}")
    except (KeyError, ValueError, IndexError) as e:
        raise GrowthError(f"bad growth spec {text!r}: {e}") from e


# ---------------------------------------------------------------------------
# admissibility

@dataclass(frozen=True)
class AdmissibilityReport:
    spec: str
    horizon: int
    monotone: bool
    monotone_witness: int | None          # first n with f(n) > f(n+1)
    strict_on_powers: bool
    equal_power_pair: tuple[int, int] | None
    submultiplicative: bool
    submultiplicative_witness: tuple[int, int] | None
    doubling_constant: int
    doubling_superlinear: bool
    doubling_witness: int | None          # first n with f(Cn) < n f(n)
    tail_min_ratio: Fraction
    ratios: tuple[Fraction, ...]

    @property
    def passed(self) -> bool:
        return self.monotone and self.submultiplicative and self.doubling_superlinear


def check_admissible(f: GrowthSpec, C: int, horizon: int) -> AdmissibilityReport:
    """Exhaustively check the admissibility requirements on [1..horizon].

    All verdicts are finite-horizon only.  Monotonicity is checked in the
    nondecreasing sense; strictness is recorded separately since natural
    families are flat on long stretches (the construction never needs more
    than nondecreasing plus divergent dyadic ratios).
    """
    if horizon < 4:
        raise GrowthError("horizon must be at least 4")
    vals = [f.value(n) for n in range(1, horizon + 1)]

    monotone, mono_wit = True, None
    for n in range(1, horizon):
        if vals[n - 1] > vals[n]:
            monotone, mono_wit = False, n
            break

    strict, eq_pair = True, None
    m = 0
    while (2 << m) <= horizon:
        a, b = f.dyadic(m), f.dyadic(m + 1)
        if a >= b:
            strict, eq_pair = False, (1 << m, 2 << m)
            break
        m += 1

    submult, sub_wit = True, None
    for a in range(1, horizon):
        if not submult:
            break
        for b in range(a, horizon - a + 1):
            if vals[a + b - 1] > vals[a - 1] * vals[b - 1]:
                submult, sub_wit = False, (a, b)
                break

    doubling, dob_wit = True, None
    for n in range(1, horizon + 1):
        try:
            fcn = f.value(C * n)
        except GrowthError:
            break
        if fcn < n * vals[n - 1]:
            doubling, dob_wit = False, n
            break

    ratios = []
    m = 0
    while (2 << m) <= horizon:
        ratios.append(f.ratio(m))
        m += 1
    tail = ratios[len(ratios) // 2:] or ratios
    return AdmissibilityReport(
        spec=f.spec_string(), horizon=horizon,
        monotone=monotone, monotone_witness=mono_wit,
        strict_on_powers=strict, equal_power_pair=eq_pair,
        submultiplicative=submult, submultiplicative_witness=sub_wit,
        doubling_constant=C, doubling_superlinear=doubling, doubling_witness=dob_wit,
        tail_min_ratio=min(tail), ratios=tuple(ratios),
    )


# ---------------------------------------------------------------------------
# level sizes

@dataclass(frozen=True)
class SizeTable:
    """Exact prescribed sizes: c_sizes[n] = |C(2^n)|, w_sizes[n] = |W(2^n)|."""

    depth: int
    c_sizes: tuple[int, ...]
    w_sizes: tuple[int, ...]

    def c_size(self, n: int) -> int:
        return self.c_sizes[n]

    def w_size(self, n: int) -> int:
        return self.w_sizes[n]


def level_sizes(
    f: GrowthSpec, depth: int, w0: int | None = None, f1: int | None = None
) -> SizeTable:
    """Size recursion c(n) = ceil(f(2^{n+1})/f(2^n)), w(n+1) = c(n) w(n).

    `w0`/`f1` override the base of the recursion for the marked-letter
    variant, which enlarges the alphabet by one without touching f beyond
    n = 1.  Asserts the selection feasibility c(n) <= w(n) at every level
    and the growth floor w(n) >= f(2^n); aborts with the violating level.
    """
    w = [w0 if w0 is not None else f.value(1)]
    c = []
    for n in range(depth):
        denom = f1 if (n == 0 and f1 is not None) else f.dyadic(n)
        cn = _ceil_div(f.dyadic(n + 1), denom)
        if cn > w[n]:
            raise FeasibilityError(
                f"level {n}: need {cn} choice words but only {w[n]} available"
            )
        c.append(cn)
        w.append(cn * w[n])
    for n in range(depth + 1):
        if w[n] < f.dyadic(n) and (w0 is None or n > 0):
            raise FeasibilityError(f"level {n}: size {w[n]} below target {f.dyadic(n)}")
    return SizeTable(depth, tuple(c), tuple(w))


# ---------------------------------------------------------------------------
# projection schedule (the level at which the choice set must cover level n)

def onto_schedule(f: GrowthSpec, sizes: SizeTable, upto: int, horizon: int) -> tuple[int, ...]:
    """For n = 0..upto-1, the least m > max(n, previous) whose dyadic ratio
    f(2^{m+1})/f(2^m) is at least |W(2^n)|.

    Strictly increasing with entry > index, so the covering choice made at
    level m can project onto the whole of level n.
    """
    out: list[int] = []
    prev = -1
    for n in range(upto):
        m = max(n, prev) + 1
        while True:
            if m > horizon:
                raise HorizonExhaustedError(
                    f"no admissible covering level for n={n} within horizon {horizon}"
                )
            if f.dyadic(m + 1) >= sizes.w_size(n) * f.dyadic(m):
                break
            m += 1
        out.append(m)
        prev = m
    return tuple(out)


def insertion_floor(
    f: GrowthSpec, d: int, eps: Fraction, band: int, horizon: int
) -> int:
    """Least m0 >= band with sum_{j<=2^band} d^j <= eps * ratio(m) for every
    m in [m0, horizon].

    The left side bounds the number of candidate factors of length at most
    2^band, so inserting one power word per candidate at levels >= m0 stays
    inside an eps fraction of the choice budget.  Certified on the finite
    horizon only.
    """
    need = sum(d ** j for j in range(1, (1 << band) + 1))
    ok_from = None
    for m in range(horizon, band - 1, -1):
        if eps * f.ratio(m) >= need:
            ok_from = m
        else:
            break
    if ok_from is None:
        raise HorizonExhaustedError(
            f"insertion budget for band {band} unsatisfiable within horizon {horizon}"
        )
    return ok_from


# ---------------------------------------------------------------------------
# regularization

@dataclass(frozen=True)
class Regularized:
    """Real-valued smoothing f'(n) = sum_{i<t} n^{-i/t} f(2^i n).

    Values are certified as exact rational brackets; the bracket collapses
    to a point whenever every root involved is exact.
    """

    base: GrowthSpec
    C: int
    t: int

    def bracket(self, n: int) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(0)
        for i in range(self.t):
            fv = self.base.value((1 << i) * n)
            if i == 0:
                lo += fv
                hi += fv
                continue
            # n^{i/t} lies in [r, r+1) with r = floor((n^i)^{1/t})
            r = floor_root(n ** i, self.t)
            if r ** self.t == n ** i:
                lo += Fraction(fv, r)
                hi += Fraction(fv, r)
            else:
                lo += Fraction(fv, r + 1)
                hi += Fraction(fv, r)
        return lo, hi

    def sandwich_holds(self, n: int) -> bool:
        """f(n) <= f'(n) <= t * f(2^{t-1} n), certified via the bracket."""
        lo, hi = self.bracket(n)
        return lo >= self.base.value(n) and hi <= self.t * self.base.value((1 << (self.t - 1)) * n)


def regularize(f: GrowthSpec, C: int) -> Regularized:
    if C < 2:
        raise GrowthError("regularization needs C >= 2 (t = 0 is degenerate)")
    t = 0
    while (1 << t) < C:
        t += 1
    t = max(t, 1)
    return Regularized(f, C, t)
