"""Factor (subword) queries against level automata.

The nonzero monomials of a quotient by a monomial ideal are exactly the
factors of the allowed long words, so every verifier below is some flavour
of "enumerate / count / scan the distinct length-l windows readable along
paths of an acyclic automaton".

Counting distinct factors is the one genuinely hard query.  It runs a lazy
subset determinization of the all-starts automaton, level by level, with
big-integer path counting per determinized state; this is exact and fast
whenever the factor language has modest left-quotient complexity.  When the
frontier exceeds its budget the caller can fall back to an exact integer
bracket built from boundary-window overcounts (`count_factors_bracket`),
which certifies inequalities without pinning the count.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    import numpy as _np
except ImportError:  # pragma: no cover - numpy is a declared dependency
    _np = None

from .wordstore import ACCEPT, CapacityError, NodeStore

DEFAULT_FRONTIER_BUDGET = 250_000


# ---------------------------------------------------------------------------
# transition tables for vectorized stepping

def _tables(store: NodeStore, root: int):
    cache = getattr(store, "_factor_tables", None)
    if cache is None:
        cache = store._factor_tables = {}
    got = cache.get(root)
    if got is None:
        nodes = store.reachable(root)
        index = {n: i for i, n in enumerate(nodes)}
        sigma = store.alphabet_size
        if _np is not None:
            tgt = _np.full((sigma, len(nodes)), -1, dtype=_np.int64)
            for i, n in enumerate(nodes):
                for l, c in store.trans(n):
                    tgt[l][i] = index[c]
        else:
            tgt = [[-1] * len(nodes) for _ in range(sigma)]
            for i, n in enumerate(nodes):
                for l, c in store.trans(n):
                    tgt[l][i] = index[c]
        heights = [store.height(n) for n in nodes]
        got = (nodes, index, tgt, heights)
        cache[root] = got
    return got


DEFAULT_WORK_BUDGET = 120_000_000


def count_factors(
    store: NodeStore,
    root: int,
    length: int,
    frontier_budget: int = DEFAULT_FRONTIER_BUDGET,
    work_budget: int = DEFAULT_WORK_BUDGET,
) -> int:
    """Exact number of distinct length-`length` factors of root's words.

    Lazy subset determinization with big-integer path counting; distinct
    determinized states at step t correspond to the left-quotient classes of
    length-t factors, so the total count is exact.  Raises CapacityError
    once the frontier or the cumulative subset work exceeds its budget
    (callers then fall back to the exact bracket).
    """
    if length == 0:
        return 1
    h = store.height(root)
    if length > h:
        raise ValueError("factor longer than the words at this horizon")
    if length == h:
        return store.count(root)
    nodes, _, tgt, heights = _tables(store, root)
    if _np is not None:
        rows = [tuple(int(v) for v in tgt[l]) for l in range(store.alphabet_size)]
    else:
        rows = [tuple(tgt[l]) for l in range(store.alphabet_size)]
    start = frozenset(i for i, hh in enumerate(heights) if hh >= length)
    frontier: dict[frozenset, int] = {start: 1}
    work = 0
    for _ in range(length):
        nxt: dict[frozenset, int] = {}
        for subset, cnt in frontier.items():
            work += len(subset)
            for row in rows:
                kids = {row[i] for i in subset}
                kids.discard(-1)
                if kids:
                    key = frozenset(kids)
                    nxt[key] = nxt.get(key, 0) + cnt
        if len(nxt) > frontier_budget or work > work_budget:
            raise CapacityError(
                f"factor-count budget exceeded (frontier {len(nxt)}, work {work})"
            )
        frontier = nxt
    return sum(frontier.values())


def enumerate_factors(
    store: NodeStore, root: int, length: int, limit: int = 2_000_000
) -> list[str]:
    """All distinct length-`length` factors, lexicographically sorted."""
    if length > store.height(root):
        raise ValueError("factor longer than the words at this horizon")
    letters = store.letters
    start = frozenset(
        n for n in store.reachable(root) if store.height(n) >= length
    )
    out: list[str] = []
    stack = [(start, "")]
    while stack:
        subset, pre = stack.pop()
        if len(pre) == length:
            out.append(pre)
            if len(out) > limit:
                raise CapacityError(f"factor enumeration exceeds limit {limit}")
            continue
        buckets: dict[int, set[int]] = {}
        for q in subset:
            for l, c in store.trans(q):
                buckets.setdefault(l, set()).add(c)
        for l in sorted(buckets, reverse=True):
            stack.append((frozenset(buckets[l]), pre + letters[l]))
    return sorted(out)


def contains_factor(store: NodeStore, root: int, word: str) -> bool:
    """True iff `word` occurs as a factor of some word of root."""
    if len(word) > store.height(root):
        return False
    cur = {n for n in store.reachable(root) if store.height(n) >= len(word)}
    for ch in word:
        li = store.letters.index(ch)
        cur = {c for q in cur for l, c in store.trans(q) if l == li}
        if not cur:
            return False
    return True


def first_factor_level(store, roots: list[int], word: str) -> int | None:
    """Smallest level index whose words contain `word`, scanning upward."""
    for lvl, root in enumerate(roots):
        if store.height(root) < len(word):
            continue
        if contains_factor(store, root, word):
            return lvl
    return None


def factor_levels(store, roots: list[int], max_len: int) -> dict[str, int]:
    """First containing level for every factor of length <= max_len.

    One enumeration pass per (level, length); far cheaper than repeated
    containment scans when the whole short-factor universe is needed.
    """
    out: dict[str, int] = {}
    for lvl, root in enumerate(roots):
        for length in range(1, min(max_len, store.height(root)) + 1):
            for w in enumerate_factors(store, root, length):
                out.setdefault(w, lvl)
    return out


# ---------------------------------------------------------------------------
# exact bracket for counts whose determinization blows up

@dataclass(frozen=True)
class CountBracket:
    lo: int
    hi: int
    exact: bool

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError("bracketed count has no single value")
        return self.lo


def count_factors_bracket(
    store: NodeStore,
    w_roots: list[int],
    c_roots: list[int],
    scale: int,
    horizon: int,
) -> CountBracket:
    """Exact integer bracket on the number of length-2^scale factors.

    Every window of length 2^scale either is an aligned block (a level-
    `scale` word) or straddles exactly one aligned boundary; the straddlers
    at boundary level m split as (suffix of a chosen-set word, prefix of a
    level word).  Counting each split shape as a full product overcounts
    only by cross-shape coincidences, so the sum is a true upper bound,
    while the aligned blocks alone are a true lower bound.
    """
    ell = 1 << scale
    lo = store.count(w_roots[scale])
    hi = lo
    for m in range(scale, horizon):
        c_root = c_roots[m]
        for lam in range(1, ell):
            n_suffix = store.count(store.suffix_set(c_root, lam))
            n_prefix = store.prefix_count(w_roots[m], ell - lam)
            hi += n_suffix * n_prefix
    return CountBracket(lo, hi, exact=False)


# ---------------------------------------------------------------------------
# pattern scans (matching machinery shared by the witness checkers)

def _kmp_table(store: NodeStore, pattern: str) -> list[list[int]]:
    """delta[state][letter] -> next state; the match state len(pattern) is
    absorbing."""
    p = len(pattern)
    pat = [store.letters.index(ch) for ch in pattern]
    fail = [0] * (p + 1)
    for i in range(1, p):
        s = fail[i]
        while s and pat[s] != pat[i]:
            s = fail[s]
        fail[i + 1] = s + 1 if pat[s] == pat[i] else 0
    delta = [[0] * store.alphabet_size for _ in range(p + 1)]
    for st in range(p + 1):
        for l in range(store.alphabet_size):
            if st == p:
                delta[st][l] = p
                continue
            s = st
            while True:
                if s < p and pat[s] == l:
                    delta[st][l] = s + 1
                    break
                if s == 0:
                    delta[st][l] = 0
                    break
                s = fail[s]
    return delta


def _by_height(store: NodeStore, root: int) -> list[int]:
    return sorted(store.reachable(root), key=store.height)


def lexmin_word_containing(store: NodeStore, root: int, word: str) -> str | None:
    """Lex-least full word of root having `word` as a factor, or None."""
    if len(word) > store.height(root):
        return None
    p = len(word)
    delta = _kmp_table(store, word)
    # feasible[x] = set of match states from which accept is reachable with a
    # completed match; computed bottom-up so the walk below never backtracks.
    feas: dict[int, int] = {ACCEPT: 1 << p}
    for x in _by_height(store, root):
        if x == ACCEPT:
            continue
        mask = 0
        for st in range(p + 1):
            ok = False
            for l, c in store.trans(x):
                nst = p if st == p else delta[st][l]
                if feas[c] >> nst & 1:
                    ok = True
                    break
            if ok:
                mask |= 1 << st
        feas[x] = mask
    if not feas[root] & 1:
        return None
    out = []
    x, st = root, 0
    while x != ACCEPT:
        for l, c in store.trans(x):
            nst = p if st == p else delta[st][l]
            if feas[c] >> nst & 1:
                out.append(store.letters[l])
                x, st = c, nst
                break
        else:
            raise AssertionError("containment walk lost feasibility")
    return "".join(out)


def ordered_pair_witness(
    store: NodeStore, root: int, left: str, right: str
) -> str | None:
    """Lex-least full word containing `left` and then, disjointly, `right`.

    Switching to the second pattern at the first completed match of the
    first loses no witnesses: any later start for `right` also lies after
    the first end of `left`.
    """
    if not left or not right:
        raise ValueError("patterns must be nonempty")
    if len(left) + len(right) > store.height(root):
        return None
    dl = _kmp_table(store, left)
    dr = _kmp_table(store, right)
    pl, pr = len(left), len(right)
    # feas[x] = (bitmask over left-KMP states, bitmask over right-KMP states):
    # phase 0 still seeks `left`, phase 1 seeks `right`; bit pr is absorbing.
    feas: dict[int, tuple[int, int]] = {ACCEPT: (0, 1 << pr)}
    for x in _by_height(store, root):
        if x == ACCEPT:
            continue
        m1 = 0
        for st in range(pr + 1):
            for l, c in store.trans(x):
                nst = pr if st == pr else dr[st][l]
                if feas[c][1] >> nst & 1:
                    m1 |= 1 << st
                    break
        m0 = 0
        for st in range(pl):
            for l, c in store.trans(x):
                nst = dl[st][l]
                ok = (feas[c][1] >> 0 & 1) if nst == pl else (feas[c][0] >> nst & 1)
                if ok:
                    m0 |= 1 << st
                    break
        feas[x] = (m0, m1)
    if not feas[root][0] & 1:
        return None
    out = []
    x, st, phase = root, 0, 0
    while x != ACCEPT:
        for l, c in store.trans(x):
            if phase == 0:
                nst = dl[st][l]
                if nst == pl:
                    if feas[c][1] >> 0 & 1:
                        out.append(store.letters[l])
                        x, st, phase = c, 0, 1
                        break
                elif feas[c][0] >> nst & 1:
                    out.append(store.letters[l])
                    x, st = c, nst
                    break
            else:
                nst = pr if st == pr else dr[st][l]
                if feas[c][1] >> nst & 1:
                    out.append(store.letters[l])
                    x, st = c, nst
                    break
        else:
            raise AssertionError("ordered-pair walk lost feasibility")
    return "".join(out)


def max_disjoint_occurrences(store: NodeStore, root: int, pattern: str) -> int:
    """Max number of pairwise-disjoint occurrences of `pattern` in one word."""
    h = store.height(root)
    if len(pattern) > h:
        return 0
    if len(pattern) == h:
        return 1 if store.contains(root, pattern) else 0
    p = len(pattern)
    delta = _kmp_table(store, pattern)
    best: dict[int, list[int]] = {ACCEPT: [0] * (p + 1)}
    for x in _by_height(store, root):
        if x == ACCEPT:
            continue
        row = [0] * (p + 1)
        for st in range(p + 1):
            b = 0
            for l, c in store.trans(x):
                nst = delta[st][l]
                if nst == p:
                    # a completed match counts once and restarts disjointly
                    v = 1 + best[c][0]
                else:
                    v = best[c][nst]
                if v > b:
                    b = v
            row[st] = b
        best[x] = row
    return best[root][0]


def max_letter_per_word(store: NodeStore, root: int, letter: str) -> int:
    """Max count of `letter` over the full words of root."""
    li = store.letters.index(letter)
    best = {ACCEPT: 0}
    for x in _by_height(store, root):
        if x == ACCEPT:
            continue
        best[x] = max(best[c] + (1 if l == li else 0) for l, c in store.trans(x))
    return best[root]


def max_letter_in_windows(
    store: NodeStore, root: int, letter: str, upto: int
) -> list[int]:
    """out[L] = max count of `letter` over all length-L factors, L=1..upto."""
    li = store.letters.index(letter)
    nodes, index, tgt, _ = _tables(store, root)
    out = [0] * (upto + 1)
    if _np is not None:
        score = _np.zeros(len(nodes), dtype=_np.int64)
        alive = _np.ones(len(nodes), dtype=bool)
        marks = [tgt[l] for l in range(store.alphabet_size)]
        for L in range(1, upto + 1):
            new = _np.full(len(nodes), -1, dtype=_np.int64)
            for l in range(store.alphabet_size):
                t = marks[l]
                src = alive & (t >= 0)
                if not src.any():
                    continue
                vals = score[src] + (1 if l == li else 0)
                _np.maximum.at(new, t[src], vals)
            alive = new >= 0
            if not alive.any():
                out[L:] = [max(out[: L]) if L > 1 else 0] * (upto - L + 1)
                break
            score = _np.where(alive, new, 0)
            out[L] = int(new.max())
        return out
    score = {i: 0 for i in range(len(nodes))}
    for L in range(1, upto + 1):
        nxt: dict[int, int] = {}
        for i, s in score.items():
            for l in range(store.alphabet_size):
                j = tgt[l][i]
                if j >= 0:
                    v = s + (1 if l == li else 0)
                    if nxt.get(j, -1) < v:
                        nxt[j] = v
        if not nxt:
            break
        score = nxt
        out[L] = max(score.values())
    return out
