"""The level-doubling word construction and its query surface.

Levels of allowed words are built by W(2^{n+1}) = C(2^n) * W(2^n), where
C(2^n) is a size-prescribed subset of W(2^n) picked by a pluggable
selection strategy.  The quotient algebra is represented purely through the
factor language of the level words: a monomial is nonzero iff it occurs as
a factor of some level word (a horizon-relative verdict at finite depth).

States never materialize level words: every level is a node of a shared
hash-consed automaton store, and all queries (dimension counts, containment,
projections, witnesses) run on the automata.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import factors
from .growth import GrowthSpec, SizeTable, level_sizes, onto_schedule
from .reports import FAIL, PASS, ClaimRecord, Report, bound_record
from .wordstore import ACCEPT, CapacityError, NodeStore

DEFAULT_MEM_CAP = 256 * 1024 * 1024


class MemoryBudgetError(RuntimeError):
    """Materializing this object would exceed the configured cap."""


# ---------------------------------------------------------------------------
# selection strategies

class SelectionStrategy:
    """Picks C(2^n) inside W(2^n) at the prescribed size, deterministically."""

    name = "abstract"

    def spec_string(self) -> str:
        return self.name

    def prepare(self, state: "ConstructionState") -> None:
        pass

    def select(self, state: "ConstructionState", n: int, k: int) -> int:
        raise NotImplementedError


class LexFirst(SelectionStrategy):
    name = "plain"

    def select(self, state, n, k):
        return state.store.take_first(state.w_root(n), k)


class SeededRandom(SelectionStrategy):
    """Uniform k-subset by rank sampling; reproducible from the seed."""

    name = "seeded"

    def __init__(self, seed: int):
        self.seed = seed

    def spec_string(self) -> str:
        return f"seeded:{self.seed}"

    def select(self, state, n, k):
        store = state.store
        root = state.w_root(n)
        total = store.count(root)
        if total.bit_length() > 64:
            raise MemoryBudgetError(
                "seeded selection needs materializable levels; level too large"
            )
        rng = random.Random((self.seed, n))
        ranks = sorted(rng.sample(range(total), k))
        return store.from_words([store.word_at_rank(root, r) for r in ranks])


class PrimeSelection(SelectionStrategy):
    """Lexicographic selection with covering constraints at scheduled levels.

    At a scheduled level m covering level j, the selected set must project
    by suffix onto all of W(2^j).  The lex-least preimages of the level-j
    words are exactly the lex-first |W(2^j)| words of level m (an all-least
    prefix chain in front of every level-j word), so the selection is the
    plain lexicographic one; the constraints are asserted, not re-derived.
    """

    name = "prime"

    def __init__(self):
        self.schedule: tuple[int, ...] = ()

    def prepare(self, state):
        horizon = max(state.depth + 6, 2 * state.depth)
        sched = onto_schedule(state.growth, state.sizes, state.depth, horizon)
        self.schedule = sched
        state.onto_levels = sched

    def select(self, state, n, k):
        store = state.store
        c = store.take_first(state.w_root(n), k)
        targets = [j for j, m in enumerate(self.schedule) if m == n]
        for j in targets:
            wj = state.sizes.w_size(j)
            if k < wj:
                raise AssertionError(
                    f"covering level {n} too small for level {j}: {k} < {wj}"
                )
            # the lex-least preimage block must sit inside the selection,
            # and the selection must project onto the whole target level
            chain = "".join(
                store.min_word(state.c_root(i)) for i in range(n - 1, j - 1, -1)
            )
            preimages = store.concat(store.singleton(chain), state.w_root(j))
            if store.union(preimages, c) != c:
                raise AssertionError(f"preimage block escapes selection at level {n}")
            if store.suffix_set(c, 1 << j) != state.w_root(j):
                raise AssertionError(f"selection at level {n} not onto level {j}")
        return c


class AvoidLetterLexFirst(SelectionStrategy):
    """Lex-first among the words avoiding one designated letter.

    Realizes the non-prime example: no chosen word ever contains the
    avoided letter, so that letter generates a square-zero ideal while
    staying nonzero itself.
    """

    name = "nonprime"

    def __init__(self, letter: str = "a"):
        self.letter = letter

    def spec_string(self) -> str:
        return f"nonprime:{self.letter}"

    def select(self, state, n, k):
        store = state.store
        free = store.without_letter(state.w_root(n), self.letter)
        avail = store.count(free) if free is not None else 0
        if avail < k:
            raise AssertionError(
                f"level {n}: only {avail} words avoid {self.letter!r}, need {k}"
            )
        return store.take_first(free, k)


def strategy_from_string(text: str) -> SelectionStrategy:
    head, _, rest = text.partition(":")
    if head == "plain":
        return LexFirst()
    if head == "seeded":
        return SeededRandom(int(rest))
    if head == "prime":
        return PrimeSelection()
    if head == "nonprime":
        return AvoidLetterLexFirst(rest or "a")
    raise ValueError(f"unknown strategy {text!r}")


# ---------------------------------------------------------------------------
# the construction state

@dataclass
class Level:
    n: int
    w_root: int
    c_root: int | None
    w_count: int
    c_count: int | None


@dataclass
class DimResult:
    length: int
    lo: int
    hi: int
    exact: bool
    horizon: int

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError(f"dim({self.length}) is only bracketed at this scale")
        return self.lo


@dataclass
class ConstructionState:
    growth: GrowthSpec
    d: int
    depth: int
    strategy: SelectionStrategy
    store: NodeStore
    sizes: SizeTable
    levels: list[Level]
    mem_cap: int = DEFAULT_MEM_CAP
    build_log: list[str] = field(default_factory=list)
    onto_levels: tuple[int, ...] = ()

    # -- level access --------------------------------------------------------

    def w_root(self, n: int) -> int:
        return self.levels[n].w_root

    def c_root(self, n: int) -> int:
        r = self.levels[n].c_root
        if r is None:
            raise ValueError(f"level {n} has no choice set (top of the tower)")
        return r

    def w_roots(self) -> list[int]:
        return [lv.w_root for lv in self.levels]

    def c_roots(self) -> list[int]:
        return [lv.c_root for lv in self.levels if lv.c_root is not None]

    def w_words(self, n: int) -> list[str]:
        lv = self.levels[n]
        if lv.w_count * (1 << n) > self.mem_cap:
            raise MemoryBudgetError(
                f"level {n} holds {lv.w_count} words of length {1 << n}; "
                f"materializing would exceed the {self.mem_cap}-byte cap"
            )
        return list(self.store.words(lv.w_root))

    def c_words(self, n: int) -> list[str]:
        lv = self.levels[n]
        if lv.c_count * (1 << n) > self.mem_cap:
            raise MemoryBudgetError(f"choice set at level {n} exceeds the cap")
        return list(self.store.words(self.c_root(n)))

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(self.config_string().encode())
        for lv in self.levels:
            h.update(self.store.canonical_digest(lv.w_root).encode())
            if lv.c_root is not None:
                h.update(self.store.canonical_digest(lv.c_root).encode())
        return h.hexdigest()

    def config_string(self) -> str:
        return (f"growth={self.growth.spec_string()};d={self.d};"
                f"depth={self.depth};strategy={self.strategy.spec_string()}")

    def __eq__(self, other) -> bool:
        return isinstance(other, ConstructionState) and self.fingerprint() == other.fingerprint()

    # -- queries --------------------------------------------------------------

    def is_nonzero(self, word: str) -> tuple[bool, int | None]:
        """Horizon-relative zero test: (verdict, first witnessing level).

        False means no built level word contains `word`; at greater depth it
        could still become a factor, so callers must treat False as
        "zero as witnessed at depth N".
        """
        if len(word) > 1 << self.depth:
            raise ValueError("word longer than the built horizon")
        lvl = factors.first_factor_level(self.store, self.w_roots(), word)
        return (lvl is not None), lvl

    def witness_word(self, word: str) -> str | None:
        ok, lvl = self.is_nonzero(word)
        if not ok:
            return None
        return factors.lexmin_word_containing(self.store, self.w_root(lvl), word)

    def subwords(self, length: int, upto_level: int | None = None) -> list[str]:
        n = self.depth if upto_level is None else upto_level
        if length > 1 << n:
            raise ValueError("factor length exceeds the chosen level")
        limit = self.mem_cap // max(length, 1)
        return factors.enumerate_factors(self.store, self.w_root(n), length, limit)

    def dim(
        self, length: int, upto_level: int | None = None,
        work_budget: int | None = None,
    ) -> DimResult:
        """Number of distinct nonzero monomials of this degree at horizon.

        Exact whenever the counting automaton stays within budget; for
        dyadic lengths beyond that, an exact integer bracket (true lower and
        upper bounds) is returned instead.
        """
        n = self.depth if upto_level is None else upto_level
        root = self.w_root(n)
        try:
            v = factors.count_factors(
                self.store, root, length,
                work_budget=work_budget or factors.DEFAULT_WORK_BUDGET,
            )
            return DimResult(length, v, v, True, n)
        except CapacityError:
            scale = (length - 1).bit_length()
            if (1 << scale) != length:
                raise
            br = factors.count_factors_bracket(
                self.store, self.w_roots(), self.c_roots(), scale, n
            )
            return DimResult(length, br.lo, br.hi, False, n)

    def dim_stabilization_level(self, length: int) -> int:
        """Last level at which dim(length) grew (exact counting only)."""
        scale = max((length - 1).bit_length(), 0)
        vals = [
            factors.count_factors(self.store, self.w_root(m), length)
            for m in range(scale, self.depth + 1)
        ]
        last = scale
        for i in range(1, len(vals)):
            if vals[i] != vals[i - 1]:
                last = scale + i
        return last


# ---------------------------------------------------------------------------
# building

def build(
    growth: GrowthSpec,
    depth: int,
    strategy: SelectionStrategy | None = None,
    mem_cap: int = DEFAULT_MEM_CAP,
    store: NodeStore | None = None,
) -> ConstructionState:
    """Build levels 0..depth; deterministic for fixed inputs."""
    strategy = strategy or LexFirst()
    sizes = level_sizes(growth, depth)
    d = growth.d
    store = store or NodeStore(d)
    if store.alphabet_size < d:
        raise ValueError("store alphabet smaller than the growth alphabet")
    state = ConstructionState(
        growth=growth, d=d, depth=depth, strategy=strategy,
        store=store, sizes=sizes,
        levels=[], mem_cap=mem_cap,
    )
    base = store.from_words(store.letters[i] for i in range(d))
    state.levels.append(Level(0, base, None, d, None))
    strategy.prepare(state)
    state.build_log.append(f"level 0: {d} generators")
    for n in range(depth):
        k = sizes.c_size(n)
        c = strategy.select(state, n, k)
        if store.count(c) != k:
            raise AssertionError(f"strategy returned {store.count(c)} words, wanted {k}")
        w_next = store.concat(c, state.w_root(n))
        state.levels[n].c_root = c
        state.levels[n].c_count = k
        expect = sizes.w_size(n + 1)
        if store.count(w_next) != expect:
            raise AssertionError(
                f"level {n + 1} size {store.count(w_next)} != prescribed {expect}"
            )
        state.levels.append(Level(n + 1, w_next, None, expect, None))
        state.build_log.append(f"level {n + 1}: |C|={k} |W|={expect}")
    return state


def extend_state(state: ConstructionState, new_depth: int) -> ConstructionState:
    """Resume-extend a built state; equals a from-scratch build at new_depth."""
    if new_depth < state.depth:
        raise ValueError("cannot shrink a state")
    if new_depth == state.depth:
        return state
    fresh = build(state.growth, new_depth, state.strategy, state.mem_cap, state.store)
    return fresh


# ---------------------------------------------------------------------------
# projections

def suffix_projection(word: str, m_prime: int, m: int) -> str:
    """The length-2^m suffix of a length-2^{m'} word."""
    if len(word) != 1 << m_prime:
        raise ValueError(f"expected a word of length {1 << m_prime}")
    if m > m_prime:
        raise ValueError("projection target longer than the word")
    return word[len(word) - (1 << m):]


def check_suffix_projection_onto(
    state: ConstructionState, m_prime: int, m: int
) -> ClaimRecord:
    """Does projecting level m' by suffixes reach all of level m?"""
    store = state.store
    proj = store.suffix_set(state.w_root(m_prime), 1 << m)
    target = state.w_root(m)
    if proj == target:
        return ClaimRecord(
            "projection.onto", PASS,
            params={"from": m_prime, "to": m}, horizon=state.depth,
        )
    missing = store.diff_witness(target, proj)
    extra = store.diff_witness(proj, target)
    return ClaimRecord(
        "projection.onto", FAIL,
        params={"from": m_prime, "to": m},
        witness=missing if missing is not None else extra,
        note="missing target word" if missing is not None else "projection escapes level",
        horizon=state.depth,
    )


# ---------------------------------------------------------------------------
# growth verification

def verify_growth_bounds(state: ConstructionState) -> Report:
    """Per-level dimension sandwich against the prescribed growth.

    Checks, at every built scale n: f(2^n) <= dim(2^n), the coarse upper
    bound dim(2^n) <= 2^{2n+3} f(2^{n+1}), and the finer product bound
    dim(2^n) <= 2 (2^n + 1) |W(2^n)| |C(2^n)|.  Everything exact integers;
    bracketed dims certify or refute, otherwise the record stays OPEN.
    """
    report = Report("growth-bounds", state.depth)
    f = state.growth
    for n in range(state.depth + 1):
        dm = state.dim(1 << n)
        lo_target = f.dyadic(n)
        rec = ClaimRecord(
            "growth.lower", PASS if dm.lo >= lo_target else FAIL,
            params={"n": n}, lhs=lo_target,
            rhs=[dm.lo, dm.hi] if not dm.exact else dm.lo,
            horizon=state.depth,
            note="" if dm.exact else "dim bracketed",
        )
        report.add(rec)
        upper = (1 << (2 * n + 3)) * f.dyadic(n + 1)
        report.add(bound_record(
            "growth.upper", dm.lo, dm.hi, upper,
            params={"n": n}, horizon=state.depth,
        ))
        wc = state.sizes.w_size(n)
        cc = state.sizes.c_size(n) if n < state.depth else None
        if cc is not None:
            finer = 2 * ((1 << n) + 1) * wc * cc
            report.add(bound_record(
                "growth.upper.product", dm.lo, dm.hi, finer,
                params={"n": n}, horizon=state.depth,
            ))
    return report


def _root_bracket_leq(count_hi: int, length: int, bound: Fraction) -> bool:
    """count_hi ** (1/length) <= bound, checked in exact integers."""
    return count_hi * bound.denominator ** length <= bound.numerator ** length


def _root_bracket_gt1(count_lo: int) -> bool:
    return count_lo >= 2


def entropy_samples(state: ConstructionState, scales: list[int]) -> list[dict]:
    """Sampled dim(n)^(1/n) at dyadic scales, horizon-relative.

    Each sample carries the exact integer bracket on dim plus a float
    display value; exact interval membership tests are done by the callers
    on the bracket, never on the float.
    """
    out = []
    for n in scales:
        dm = state.dim(1 << n)
        bits_lo = dm.lo.bit_length()
        approx = 2 ** ((bits_lo - 1) / (1 << n)) if dm.lo else 0.0
        out.append({
            "scale": n,
            "length": 1 << n,
            "dim_lo": dm.lo,
            "dim_hi": dm.hi,
            "exact": dm.exact,
            "root_approx": round(approx, 6),
            "horizon": state.depth,
        })
    return out
