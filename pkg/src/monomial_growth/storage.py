"""State persistence: versioned text manifests with content checksums.

Builds are deterministic functions of their configuration plus the explicit
insertion words, so a state file records exactly that, together with
per-level counts and structural digests.  Loading rebuilds and verifies the
digests; a mismatch distinguishes tampering/drift from simple truncation,
which the whole-file checksum catches first.  Level words are reconstructible
and never dumped here (levels grow past any disk budget); `cmd_dump` exists
for desk-scale listings.
"""

from __future__ import annotations

import hashlib
import os
from fractions import Fraction

from .construction import ConstructionState, build, strategy_from_string
from .growth import parse_growth
from .nilpotent import MarkedSystem, build_marked
from .saturation import SaturatedSystem, saturate

MAGIC = "monomial-growth-state"
VERSION = 1


class StateFileError(RuntimeError):
    pass


class ChecksumError(StateFileError):
    pass


def _emit(lines: list[str]) -> str:
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    return body + f"checksum sha256 {digest}\n"


def _parse(text: str) -> list[str]:
    lines = text.splitlines()
    if not lines or not lines[-1].startswith("checksum sha256 "):
        raise ChecksumError("missing checksum trailer")
    body = "\n".join(lines[:-1]) + "\n"
    want = lines[-1].split()[-1]
    got = hashlib.sha256(body.encode()).hexdigest()
    if got != want:
        raise ChecksumError("state file corrupt: checksum mismatch")
    return lines[:-1]


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def save_state(state: ConstructionState, path: str) -> None:
    lines = [
        f"{MAGIC} v{VERSION}",
        f"kind base",
        f"growth {state.growth.spec_string()}",
        f"alphabet {state.d}",
        f"strategy {state.strategy.spec_string()}",
        f"depth {state.depth}",
        f"fingerprint {state.fingerprint()}",
    ]
    for lv in state.levels:
        c = f" c={lv.c_count}" if lv.c_count is not None else ""
        dig = state.store.canonical_digest(lv.w_root)
        lines.append(f"level {lv.n} w={lv.w_count}{c} digest={dig}")
    _atomic_write(path, _emit(lines))


def load_state(path: str) -> ConstructionState:
    with open(path) as fh:
        lines = _parse(fh.read())
    header = dict(
        line.split(" ", 1) for line in lines[1:] if not line.startswith("level ")
    )
    if not lines[0].startswith(MAGIC):
        raise StateFileError("not a state file")
    if lines[0] != f"{MAGIC} v{VERSION}":
        raise StateFileError(f"unsupported version: {lines[0]!r}")
    if header.get("kind") != "base":
        raise StateFileError(f"not a base state file: kind={header.get('kind')!r}")
    state = build(
        parse_growth(header["growth"]),
        int(header["depth"]),
        strategy_from_string(header["strategy"]),
    )
    if state.fingerprint() != header["fingerprint"]:
        raise StateFileError("rebuilt state disagrees with the recorded fingerprint")
    return state


def save_marked(sys_: MarkedSystem, path: str) -> None:
    lines = [
        f"{MAGIC} v{VERSION}",
        "kind marked",
        f"growth {sys_.growth.spec_string()}",
        f"alphabet {sys_.d}",
        f"depth {sys_.depth}",
        f"eps {','.join(str(e) for e in sys_.eps_seq)}",
        f"fingerprint {sys_.fingerprint()}",
    ]
    for lvl, i in sorted(sys_.insertion_levels.items()):
        words = ",".join(sys_.insertions.get(lvl, ()))
        lines.append(f"insertion level={lvl} scale={i} words={words}")
    _atomic_write(path, _emit(lines))


def load_marked(path: str) -> MarkedSystem:
    with open(path) as fh:
        lines = _parse(fh.read())
    header = dict(
        line.split(" ", 1) for line in lines[1:] if not line.startswith("insertion ")
    )
    if header.get("kind") != "marked":
        raise StateFileError("not a marked-system state file")
    eps = [Fraction(t) for t in header["eps"].split(",")] if header.get("eps") else None
    sys_ = build_marked(parse_growth(header["growth"]), int(header["depth"]), eps)
    if sys_.fingerprint() != header["fingerprint"]:
        raise StateFileError("rebuilt system disagrees with the recorded fingerprint")
    return sys_


def save_saturated(sys_: SaturatedSystem, path: str) -> None:
    base = sys_.base
    lines = [
        f"{MAGIC} v{VERSION}",
        "kind saturated",
        f"growth {base.growth.spec_string()}",
        f"alphabet {base.d}",
        f"strategy {base.strategy.spec_string()}",
        f"depth {base.depth}",
        f"passes {len(sys_.passes)}",
    ]
    for a, delta in enumerate(sys_.passes):
        for lvl in sorted(delta.inserted):
            words = ",".join(delta.inserted[lvl])
            lines.append(f"insertion pass={a} eps={delta.eps} level={lvl} words={words}")
    digest = hashlib.sha256()
    for r in sys_.w_roots:
        digest.update(sys_.store.canonical_digest(r).encode())
    lines.append(f"fingerprint {digest.hexdigest()}")
    _atomic_write(path, _emit(lines))


def load_saturated(path: str) -> SaturatedSystem:
    with open(path) as fh:
        lines = _parse(fh.read())
    header = dict(
        line.split(" ", 1) for line in lines[1:] if not line.startswith("insertion ")
    )
    if header.get("kind") != "saturated":
        raise StateFileError("not a saturated-system state file")
    base = build(
        parse_growth(header["growth"]),
        int(header["depth"]),
        strategy_from_string(header["strategy"]),
    )
    sys_ = saturate(base)
    digest = hashlib.sha256()
    for r in sys_.w_roots:
        digest.update(sys_.store.canonical_digest(r).encode())
    if digest.hexdigest() != header["fingerprint"]:
        raise StateFileError("rebuilt system disagrees with the recorded fingerprint")
    return sys_
