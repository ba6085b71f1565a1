"""Hash-consed acyclic automata for fixed-length word sets.

Every word set handled here is a finite language in which all words share
one length.  Such a language has a unique minimal DFA, and bottom-up
hash-consing builds exactly that DFA: a node is interned by its outgoing
transition tuple, so two nodes accept the same language iff they are the
same id.  Language equality is pointer equality, and set operations
(concatenation, union, lexicographic prefixes, letter filtering) are
memoized rewrites over node ids.

The level sets of the doubling construction explode combinatorially
(billions of words at modest depth), but their automata stay small because
each level is a concatenation of small choice sets.  All queries that the
verifiers need run on the automata without materializing words.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Iterator

LETTERS = "abcdefghijklmnopqrstuvwxyz"

ACCEPT = 0


class CapacityError(RuntimeError):
    """A query exceeded its configured state or memory budget."""


class NodeStore:
    """Arena of hash-consed automaton nodes over a fixed alphabet."""

    def __init__(self, alphabet_size: int):
        if not 2 <= alphabet_size <= len(LETTERS):
            raise ValueError(f"alphabet size {alphabet_size} unsupported")
        self.alphabet_size = alphabet_size
        self.letters = LETTERS[:alphabet_size]
        # node 0 accepts exactly the empty word
        self._trans: list[tuple[tuple[int, int], ...]] = [()]
        self._height: list[int] = [0]
        self._count: list[int] = [1]
        self._intern: dict[tuple[tuple[int, int], ...], int] = {(): ACCEPT}
        self._concat_memo: dict[tuple[int, int], int] = {}
        self._union_memo: dict[tuple[int, int], int] = {}
        self._drop_memo: dict[tuple[int, int], int | None] = {}
        self._suffix_memo: dict[tuple[int, int], int] = {}
        self._reach_memo: dict[int, tuple[int, ...]] = {}
        self._digest_memo: dict[int, str] = {}

    # -- interning ----------------------------------------------------------

    def node(self, items: tuple[tuple[int, int], ...]) -> int:
        """Intern a node with the given sorted (letter, child) transitions."""
        nid = self._intern.get(items)
        if nid is not None:
            return nid
        h = self._height[items[0][1]] + 1
        for _, c in items:
            if self._height[c] + 1 != h:
                raise ValueError("mixed child heights: language not homogeneous")
        nid = len(self._trans)
        self._trans.append(items)
        self._height.append(h)
        self._count.append(sum(self._count[c] for _, c in items))
        self._intern[items] = nid
        return nid

    def trans(self, x: int) -> tuple[tuple[int, int], ...]:
        return self._trans[x]

    def height(self, x: int) -> int:
        return self._height[x]

    def count(self, x: int) -> int:
        return self._count[x]

    def __len__(self) -> int:
        return len(self._trans)

    # -- construction from words --------------------------------------------

    def _letter_index(self, ch: str) -> int:
        i = self.letters.find(ch)
        if i < 0:
            raise ValueError(f"letter {ch!r} outside alphabet {self.letters!r}")
        return i

    def singleton(self, word: str) -> int:
        x = ACCEPT
        for ch in reversed(word):
            x = self.node(((self._letter_index(ch), x),))
        return x

    def from_words(self, words: Iterable[str]) -> int:
        """Minimal automaton of an explicit nonempty equal-length word set."""
        ws = sorted(set(words))
        if not ws:
            raise ValueError("empty word set")
        length = len(ws[0])
        if any(len(w) != length for w in ws):
            raise ValueError("words must share one length")
        # Hash-cons suffix tries iteratively, grouping the sorted block by
        # column; an explicit stack avoids deep recursion on long words.
        out: dict[tuple[int, int, int], int] = {}
        stack = [(0, len(ws), 0)]
        while stack:
            lo, hi, pos = stack[-1]
            if pos == length:
                out[stack.pop()] = ACCEPT
                continue
            items = []
            pending = []
            i = lo
            while i < hi:
                j = i
                ch = ws[i][pos]
                while j < hi and ws[j][pos] == ch:
                    j += 1
                key = (i, j, pos + 1)
                if key not in out:
                    pending.append(key)
                else:
                    items.append((self._letter_index(ch), out[key]))
                i = j
            if pending:
                stack.extend(pending)
                continue
            out[stack.pop()] = self.node(tuple(items))
        return out[(0, len(ws), 0)]

    # -- core set algebra ----------------------------------------------------

    def concat(self, x: int, y: int) -> int:
        """Automaton of the product set {u + v : u in x, v in y}."""
        if x == ACCEPT:
            return y
        memo = self._concat_memo
        stack = [x]
        while stack:
            a = stack[-1]
            if (a, y) in memo:
                stack.pop()
                continue
            pending = [c for _, c in self._trans[a] if c != ACCEPT and (c, y) not in memo]
            if pending:
                stack.extend(pending)
                continue
            items = tuple(
                (l, y if c == ACCEPT else memo[(c, y)]) for l, c in self._trans[a]
            )
            memo[(a, y)] = self.node(items)
            stack.pop()
        return memo[(x, y)]

    def union(self, x: int, y: int) -> int:
        if self._height[x] != self._height[y]:
            raise ValueError("union of different word lengths")
        if x == y:
            return x
        memo = self._union_memo
        stack = [(x, y) if x < y else (y, x)]
        while stack:
            a, b = stack[-1]
            if (a, b) in memo:
                stack.pop()
                continue
            da, db = dict(self._trans[a]), dict(self._trans[b])
            pending = []
            for l in da.keys() & db.keys():
                ca, cb = da[l], db[l]
                if ca != cb:
                    key = (ca, cb) if ca < cb else (cb, ca)
                    if key not in memo:
                        pending.append(key)
            if pending:
                stack.extend(pending)
                continue
            items = []
            for l in sorted(da.keys() | db.keys()):
                if l in da and l in db:
                    ca, cb = da[l], db[l]
                    c = ca if ca == cb else memo[(ca, cb) if ca < cb else (cb, ca)]
                elif l in da:
                    c = da[l]
                else:
                    c = db[l]
                items.append((l, c))
            memo[(a, b)] = self.node(tuple(items))
            stack.pop()
        return memo[(x, y) if x < y else (y, x)]

    def union_all(self, xs: Iterable[int]) -> int:
        it = iter(sorted(set(xs)))
        r = next(it)
        for x in it:
            r = self.union(r, x)
        return r

    def take_first(self, x: int, k: int) -> int:
        """Automaton of the k lexicographically smallest words of x.

        The boundary between kept and dropped words is a single root-to-leaf
        chain, so this walks at most word-length nodes.
        """
        if not 0 < k <= self._count[x]:
            raise ValueError(f"take_first: k={k} outside 1..{self._count[x]}")
        path: list[tuple[tuple[tuple[int, int], ...], int]] = []
        y, kk = x, k
        node = None
        while node is None:
            if kk == self._count[y]:
                node = y
                break
            acc = []
            for l, c in self._trans[y]:
                cc = self._count[c]
                if kk >= cc:
                    acc.append((l, c))
                    kk -= cc
                    if kk == 0:
                        node = self.node(tuple(acc))
                        break
                else:
                    path.append((tuple(acc), l))
                    y = c
                    break
        for kept, l in reversed(path):
            node = self.node(kept + ((l, node),))
        return node

    def without_letter(self, x: int, letter: str) -> int | None:
        """Sub-automaton of words avoiding `letter`; None if it is empty."""
        li = self._letter_index(letter)
        memo = self._drop_memo
        stack = [x]
        while stack:
            a = stack[-1]
            if a == ACCEPT or (a, li) in memo:
                stack.pop()
                continue
            pending = [
                c for l, c in self._trans[a]
                if l != li and c != ACCEPT and (c, li) not in memo
            ]
            if pending:
                stack.extend(pending)
                continue
            items = []
            for l, c in self._trans[a]:
                if l == li:
                    continue
                cc = ACCEPT if c == ACCEPT else memo[(c, li)]
                if cc is not None:
                    items.append((l, cc))
            memo[(a, li)] = self.node(tuple(items)) if items else None
            stack.pop()
        return ACCEPT if x == ACCEPT else memo[(x, li)]

    # -- queries --------------------------------------------------------------

    def contains(self, x: int, word: str) -> bool:
        if len(word) != self._height[x]:
            return False
        for ch in word:
            li = self._letter_index(ch)
            for l, c in self._trans[x]:
                if l == li:
                    x = c
                    break
            else:
                return False
        return x == ACCEPT

    def words(self, x: int, limit: int | None = None) -> Iterator[str]:
        """Yield the words of x in lexicographic order."""
        emitted = 0
        stack = [(x, "")]
        while stack:
            y, pre = stack.pop()
            if y == ACCEPT:
                yield pre
                emitted += 1
                if limit is not None and emitted >= limit:
                    return
                continue
            for l, c in reversed(self._trans[y]):
                stack.append((c, pre + self.letters[l]))

    def min_word(self, x: int) -> str:
        out = []
        while x != ACCEPT:
            l, c = self._trans[x][0]
            out.append(self.letters[l])
            x = c
        return "".join(out)

    def word_at_rank(self, x: int, rank: int) -> str:
        """The rank-th word in lex order, 0-based."""
        if not 0 <= rank < self._count[x]:
            raise ValueError("rank out of range")
        out = []
        while x != ACCEPT:
            for l, c in self._trans[x]:
                if rank < self._count[c]:
                    out.append(self.letters[l])
                    x = c
                    break
                rank -= self._count[c]
        return "".join(out)

    def diff_witness(self, x: int, y: int) -> str | None:
        """Lex-least word accepted by x but not by y, or None if x <= y."""
        if self._height[x] != self._height[y]:
            raise ValueError("diff_witness on different lengths")

        def rec(a: int, b: int | None) -> str | None:
            if b is not None and a == b:
                return None
            if a == ACCEPT:
                return ""  # b differs yet has height 0, impossible unless b None
            db = dict(self._trans[b]) if b is not None else {}
            for l, c in self._trans[a]:
                tail = rec(c, db.get(l))
                if tail is not None:
                    return self.letters[l] + tail
            return None

        return rec(x, y)

    def reachable(self, root: int) -> tuple[int, ...]:
        """All node ids reachable from root (cached, sorted)."""
        got = self._reach_memo.get(root)
        if got is None:
            seen = {root}
            stack = [root]
            while stack:
                y = stack.pop()
                for _, c in self._trans[y]:
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
            got = tuple(sorted(seen))
            self._reach_memo[root] = got
        return got

    def nodes_at_depth(self, root: int, depth: int) -> tuple[int, ...]:
        cur = {root}
        for _ in range(depth):
            cur = {c for y in cur for _, c in self._trans[y]}
        return tuple(sorted(cur))

    def suffix_set(self, root: int, suffix_len: int) -> int:
        """Automaton of the distinct length-`suffix_len` suffixes of root's words."""
        key = (root, suffix_len)
        got = self._suffix_memo.get(key)
        if got is None:
            h = self._height[root]
            if not 0 < suffix_len <= h:
                raise ValueError("suffix length out of range")
            got = self.union_all(self.nodes_at_depth(root, h - suffix_len))
            self._suffix_memo[key] = got
        return got

    def prefix_count(self, root: int, prefix_len: int) -> int:
        """Number of distinct length-`prefix_len` prefixes of root's words."""
        if not 0 <= prefix_len <= self._height[root]:
            raise ValueError("prefix length out of range")
        cur = {root: 1}
        for _ in range(prefix_len):
            nxt: dict[int, int] = {}
            for y, k in cur.items():
                for _, c in self._trans[y]:
                    nxt[c] = nxt.get(c, 0) + k
            cur = nxt
        return sum(cur.values())

    def canonical_digest(self, root: int) -> str:
        """Store-independent structural digest of the language of root."""
        memo = self._digest_memo
        memo[ACCEPT] = hashlib.sha256(b"accept").hexdigest()[:16]
        for x in sorted(self.reachable(root), key=lambda y: self._height[y]):
            if x in memo:
                continue
            body = ";".join(f"{l}:{memo[c]}" for l, c in self._trans[x])
            memo[x] = hashlib.sha256(body.encode()).hexdigest()[:16]
        return memo[root]
