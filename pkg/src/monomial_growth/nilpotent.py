"""Prime systems over one extra letter whose ideal is locally nilpotent.

The alphabet gains a marked letter that the choice sets avoid, except at a
sparse schedule of insertion levels where covering preimage sets are added
so the quotient stays prime.  Because insertions are that sparse, the
number of marked letters a factor can carry grows only logarithmically in
its length; a pruned product search turns that into finite nilpotency
certificates for any finite set of ideal members.

A companion system built from the same x-free choice sets (no insertions)
maps onto by inclusion of levels, which pins the dimension of the marked
system from below exactly as the quotient map would.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import factors
from .construction import DEFAULT_MEM_CAP
from .growth import (
    FeasibilityError,
    GrowthSpec,
    HorizonExhaustedError,
    SizeTable,
    level_sizes,
)
from .prime import _pair_witness_levels_materialized
from .reports import FAIL, PASS, ClaimRecord, Report, bound_record
from .wordstore import NodeStore


def default_insertion_eps(count: int) -> list[Fraction]:
    """eps_i = 2^-(i+1); finite product, recorded exactly per horizon."""
    return [Fraction(1, 1 << (i + 1)) for i in range(count)]


@dataclass
class MarkedSystem:
    """Levels over d+1 letters with marked-letter-free choice sets outside a
    sparse insertion schedule."""

    growth: GrowthSpec          # the base target on d letters
    d: int                      # base alphabet size; the marked letter is letter d
    depth: int
    store: NodeStore
    sizes: SizeTable
    w_roots: list[int]
    c_roots: list[int]
    companion_w: list[int]
    companion_c: list[int]
    insertion_levels: dict[int, int]          # level -> covered scale i
    insertions: dict[int, tuple[str, ...]]    # level -> the added preimage words
    eps_seq: list[Fraction]
    inflation: Fraction                       # realized product bound l
    build_log: list[str] = field(default_factory=list)
    mem_cap: int = DEFAULT_MEM_CAP

    @property
    def marked_letter(self) -> str:
        return self.store.letters[self.d]

    def config_string(self) -> str:
        return (f"growth={self.growth.spec_string()};d={self.d};"
                f"depth={self.depth};strategy=tilde")

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(self.config_string().encode())
        for r in self.w_roots:
            h.update(self.store.canonical_digest(r).encode())
        return h.hexdigest()


def build_marked(
    growth: GrowthSpec,
    depth: int,
    eps_seq: list[Fraction] | None = None,
    mem_cap: int = DEFAULT_MEM_CAP,
) -> MarkedSystem:
    """Build the marked system and its companion to `depth`.

    Insertion levels are the least feasible members of the doubly-dyadic
    schedule: the i-th insertion happens at a level of the form 2^(power),
    chosen minimal with the choice set large enough that the |W(2^i)| added
    preimages stay inside the eps_i budget.  Insertions beyond the horizon
    are skipped with a log entry; at least the first must fit.
    """
    d = growth.d
    store = NodeStore(d + 1)
    marked = store.letters[d]
    sizes = level_sizes(growth, depth, w0=d + 1, f1=d + 1)
    eps_seq = eps_seq if eps_seq is not None else default_insertion_eps(depth)

    # fix the insertion schedule from the prescribed sizes alone
    schedule: dict[int, int] = {}
    power_prev = -1
    inflation = Fraction(1)
    for i, eps in enumerate(eps_seq):
        need = None
        power = power_prev + 1
        while True:
            lvl = 1 << power
            if lvl > depth - 1:
                break
            if Fraction(sizes.c_size(lvl), 1) * eps >= _w_size_upper(sizes, i, inflation):
                need = power
                break
            power += 1
        if need is None:
            break
        schedule[1 << need] = i
        inflation *= 1 + eps
        power_prev = need
    skipped = len(eps_seq) - len(schedule) if len(eps_seq) > len(schedule) else 0
    if not schedule:
        raise HorizonExhaustedError(
            f"no feasible insertion level within depth {depth}"
        )

    base0 = store.from_words(store.letters[: d + 1])
    w_roots = [base0]
    c_roots: list[int] = []
    comp_w = [base0]
    comp_c: list[int] = []
    insertions: dict[int, tuple[str, ...]] = {}
    log: list[str] = []
    if skipped:
        log.append(
            f"insertions beyond index {len(schedule) - 1} fall past depth "
            f"{depth}; skipped"
        )
    for n in range(depth):
        k = sizes.c_size(n)
        free = store.without_letter(w_roots[n], marked)
        cfree = store.without_letter(comp_w[n], marked)
        if free is None or store.count(free) < k:
            raise FeasibilityError(
                f"level {n}: not enough marked-free words for the choice set"
            )
        c = store.take_first(free, k)
        cc = store.take_first(cfree, k)
        if n in schedule:
            i = schedule[n]
            chain = "".join(store.min_word(c_roots[m]) for m in range(n - 1, i - 1, -1))
            preimages = store.concat(store.singleton(chain), w_roots[i])
            if store.suffix_set(preimages, 1 << i) != w_roots[i]:
                raise AssertionError(f"insertion at level {n} not onto scale {i}")
            merged = store.union(c, preimages)
            eps = eps_seq[i]
            if Fraction(store.count(merged), k) > 1 + eps:
                raise AssertionError(f"insertion budget exceeded at level {n}")
            extra = [w for w in store.words(preimages) if not store.contains(c, w)]
            insertions[n] = tuple(sorted(extra))
            log.append(
                f"level {n}: inserted {len(extra)} covering preimages for scale {i}"
            )
            c = merged
        c_roots.append(c)
        comp_c.append(cc)
        w_roots.append(store.concat(c, w_roots[n]))
        comp_w.append(store.concat(cc, comp_w[n]))

    sys_ = MarkedSystem(
        growth=growth, d=d, depth=depth, store=store, sizes=sizes,
        w_roots=w_roots, c_roots=c_roots,
        companion_w=comp_w, companion_c=comp_c,
        insertion_levels=schedule, insertions=insertions,
        eps_seq=list(eps_seq[: len(schedule)]), inflation=inflation,
        build_log=log, mem_cap=mem_cap,
    )
    _assert_marked_invariants(sys_)
    return sys_


def _w_size_upper(sizes: SizeTable, i: int, inflation: Fraction) -> Fraction:
    """Upper bound on |W~(2^i)| given the inflation realized so far."""
    return sizes.w_size(i) * inflation


def _assert_marked_invariants(sys_: MarkedSystem) -> None:
    store = sys_.store
    for n in range(sys_.depth):
        if n not in sys_.insertion_levels:
            if factors.contains_factor(store, sys_.c_roots[n], sys_.marked_letter):
                raise AssertionError(f"marked letter escaped into choice set {n}")
        if store.union(sys_.companion_w[n], sys_.w_roots[n]) != sys_.w_roots[n]:
            raise AssertionError(f"companion level {n} escapes the marked system")
        cnt = Fraction(store.count(sys_.w_roots[n]))
        if cnt > sys_.inflation * store.count(sys_.companion_w[n]):
            raise AssertionError(f"level {n} inflates past the recorded budget")


# ---------------------------------------------------------------------------
# marked-degree statistics

def marked_count(word: str, marked: str) -> int:
    """Number of marked letters in the word."""
    return word.count(marked)


def level_marked_degree(sys_: MarkedSystem, m: int) -> int:
    """Max marked count over the level-m words."""
    return factors.max_letter_per_word(sys_.store, sys_.w_roots[m], sys_.marked_letter)


def check_marked_degree_recursion(sys_: MarkedSystem) -> Report:
    """Per-level recursion and the linear bound on the marked degree.

    Levels built from marked-free choice sets keep the degree; insertion
    levels can at most double it; and every level obeys degree <= 2m.
    """
    report = Report("marked-degree-levels", sys_.depth)
    prev = None
    for m in range(sys_.depth + 1):
        cur = level_marked_degree(sys_, m)
        if m >= 1:
            if (m - 1) in sys_.insertion_levels:
                ok = cur <= 2 * prev
                note = "insertion level below: at most doubled"
            else:
                ok = cur == prev
                note = "marked-free level below: unchanged"
            report.add(ClaimRecord(
                "marked.degree.recursion", PASS if ok else FAIL,
                params={"m": m}, lhs=cur, rhs=prev, note=note,
                horizon=sys_.depth,
            ))
            report.add(bound_record(
                "marked.degree.linear", cur, cur, 2 * m,
                params={"m": m}, horizon=sys_.depth,
            ))
        prev = cur
    return report


def window_marked_degree(sys_: MarkedSystem, upto_len: int) -> list[int]:
    """out[L] = max marked count over all length-L factors at horizon."""
    return factors.max_letter_in_windows(
        sys_.store, sys_.w_roots[sys_.depth], sys_.marked_letter, upto_len
    )


def check_window_marked_bound(sys_: MarkedSystem, upto_len: int) -> Report:
    """Marked degree of any length-n factor is at most 2(ceil(log2 n) + 2)."""
    table = window_marked_degree(sys_, upto_len)
    report = Report("marked-degree-windows", sys_.depth)
    running = 0
    worst = None
    for n in range(1, upto_len + 1):
        running = max(running, table[n])
        bound = 2 * ((n - 1).bit_length() + 2)
        if running > bound:
            worst = n
            report.add(ClaimRecord(
                "marked.degree.window", FAIL,
                params={"n": n}, lhs=running, rhs=bound, horizon=sys_.depth,
            ))
            break
    if worst is None:
        report.add(ClaimRecord(
            "marked.degree.window", PASS,
            params={"upto": upto_len},
            lhs=max(table[1:upto_len + 1] or [0]),
            note="bound 2(ceil(log2 n)+2) holds for every n in range",
            horizon=sys_.depth,
        ))
    return report


# ---------------------------------------------------------------------------
# local nilpotency certificates

@dataclass
class NilpotencyResult:
    generators: tuple[str, ...]
    degree: int | None
    a_priori_bound: int
    products_explored: int
    horizon: int

    @property
    def certified(self) -> bool:
        return self.degree is not None and self.degree <= self.a_priori_bound


def nilpotency_a_priori_bound(max_word_len: int) -> int:
    """Least e with e > 2(ceil(log2(max_word_len * e)) + 2).

    Any nonzero product of e generators carries e marked letters within a
    window of length <= max_word_len * e, so the window bound forces
    products to die at or before this degree.
    """
    e = 1
    while not e > 2 * (((max_word_len * e) - 1).bit_length() + 2):
        e += 1
    return e


def certify_locally_nilpotent(
    sys_: MarkedSystem, generators: list[str], max_degree: int | None = None
) -> NilpotencyResult:
    """Least e such that every product of e generators is zero at horizon.

    Breadth-first over products with zero-prefix pruning (the zero set is
    closed under extension).  Each generator must be nonzero here and
    contain the marked letter; the search asserts the a-priori degree bound
    from the window statistics.
    """
    store = sys_.store
    top = sys_.w_roots[sys_.depth]
    marked = sys_.marked_letter
    gens = tuple(sorted(set(generators)))
    if not gens:
        raise ValueError("no generators given")
    for g in gens:
        if marked not in g:
            raise ValueError(f"generator {g!r} misses the marked letter")
        if not factors.contains_factor(store, top, g):
            raise ValueError(f"generator {g!r} is zero at this horizon")
    bound = nilpotency_a_priori_bound(max(len(g) for g in gens))
    cap = max_degree if max_degree is not None else bound + 2
    frontier = [""]
    explored = 0
    for e in range(1, cap + 1):
        nxt = []
        for p in frontier:
            for g in gens:
                q = p + g
                explored += 1
                if len(q) <= (1 << sys_.depth) and factors.contains_factor(store, top, q):
                    nxt.append(q)
        if not nxt:
            return NilpotencyResult(gens, e, bound, explored, sys_.depth)
        frontier = nxt
    return NilpotencyResult(gens, None, bound, explored, sys_.depth)


# ---------------------------------------------------------------------------
# growth and primeness on the marked side

def verify_marked_growth(sys_: MarkedSystem) -> Report:
    """Dimension bounds for the marked system against its companion.

    Exact checks: the product bound dim(2^n) <= 2(2^n+1)|W~||C~|, the
    inflated sandwich dim(2^n) <= l^2 2^{2n+3} f(2^{n+1}), the product
    inflation |W~||C~| <= l^2 |W||C|, and companion domination
    dim_companion(L) <= dim(L) for short L via factor-set inclusion.
    """
    store = sys_.store
    f = sys_.growth
    report = Report("marked-growth", sys_.depth)
    l2 = sys_.inflation * sys_.inflation
    top = sys_.w_roots[sys_.depth]
    for n in range(sys_.depth + 1):
        try:
            v = factors.count_factors(store, top, 1 << n, work_budget=40_000_000)
            lo = hi = v
        except factors.CapacityError:
            br = factors.count_factors_bracket(
                store, sys_.w_roots, sys_.c_roots, n, sys_.depth
            )
            lo, hi = br.lo, br.hi
        wn = store.count(sys_.w_roots[n])
        if n < sys_.depth:
            cn = store.count(sys_.c_roots[n])
            report.add(bound_record(
                "marked.dim.product.bound", lo, hi,
                2 * ((1 << n) + 1) * wn * cn,
                params={"n": n}, horizon=sys_.depth,
            ))
            base_prod = sys_.sizes.w_size(n) * sys_.sizes.c_size(n)
            lhs_prod = wn * cn
            report.add(ClaimRecord(
                "marked.product.inflation",
                PASS if lhs_prod <= l2 * base_prod else FAIL,
                params={"n": n}, lhs=lhs_prod, rhs=str(l2 * base_prod),
                horizon=sys_.depth,
            ))
        rhs = l2 * (1 << (2 * n + 3)) * f.dyadic(n + 1)
        report.add(bound_record(
            "marked.dim.upper", lo, hi, rhs,
            params={"n": n}, horizon=sys_.depth,
        ))
    comp_top = sys_.companion_w[sys_.depth]
    for L in (4, 8, 16):
        a = set(factors.enumerate_factors(store, comp_top, L))
        b = set(factors.enumerate_factors(store, top, L))
        report.add(ClaimRecord(
            "companion.dim.dominated", PASS if a <= b else FAIL,
            params={"length": L}, lhs=len(a), rhs=len(b), horizon=sys_.depth,
        ))
    return report


def check_marked_prime(sys_: MarkedSystem, max_len: int) -> Report:
    """Covering at insertion levels plus ordered-pair witnesses over the
    marked system, including the marked letter against itself."""
    store = sys_.store
    report = Report("marked-prime", sys_.depth)
    for lvl, i in sorted(sys_.insertion_levels.items()):
        ok = store.suffix_set(sys_.w_roots[lvl], 1 << i) == sys_.w_roots[i]
        report.add(ClaimRecord(
            "insertion.projection.onto", PASS if ok else FAIL,
            params={"level": lvl, "scale": i}, horizon=sys_.depth,
        ))
    universe = sorted(factors.factor_levels(store, sys_.w_roots, max_len))
    # scan materializable levels by direct string search, then fall back to
    # automaton sweeps for the handful of pairs still unresolved
    mat_top = sys_.depth
    words_by_level = []
    for n in range(sys_.depth + 1):
        if store.count(sys_.w_roots[n]) * (1 << n) > sys_.mem_cap:
            mat_top = n - 1
            break
        words_by_level.append(list(store.words(sys_.w_roots[n])))
    found = _pair_witness_levels_materialized(words_by_level, universe, mat_top)
    lookup = {(universe[a], universe[b]): lvl for (a, b), lvl in found.items()}
    for u in universe:
        for v in universe:
            wl = lookup.get((u, v))
            if wl is None:
                for lvl in range(mat_top + 1, sys_.depth + 1):
                    if factors.ordered_pair_witness(store, sys_.w_roots[lvl], u, v):
                        wl = lvl
                        break
            report.add(ClaimRecord(
                "marked.pair.witness", PASS if wl is not None else FAIL,
                params={"left": u, "right": v},
                witness=str(wl) if wl is not None else None,
                horizon=sys_.depth,
                note="witness level within horizon",
            ))
    return report
