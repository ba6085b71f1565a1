"""Verification reports: per-claim records with exact evidence.

Three-valued verdicts: PASS and FAIL are exact-integer certain; OPEN means
the available bracket straddles the claimed bound, so the claim is neither
certified nor refuted at this horizon.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
OPEN = "OPEN"
INFO = "INFO"


@dataclass
class ClaimRecord:
    claim: str
    verdict: str
    params: dict = field(default_factory=dict)
    lhs: object = None
    rhs: object = None
    witness: str | None = None
    horizon: int | None = None
    note: str = ""

    def to_dict(self) -> dict:
        d = {"claim": self.claim, "verdict": self.verdict}
        if self.params:
            d["params"] = {k: _plain(v) for k, v in sorted(self.params.items())}
        for k in ("lhs", "rhs", "witness", "horizon"):
            v = getattr(self, k)
            if v is not None:
                d[k] = _plain(v)
        if self.note:
            d["note"] = self.note
        return d


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (int, str, bool, float)) or v is None:
        return v
    return str(v)


def bound_record(claim, lhs_lo, lhs_hi, rhs, horizon=None, params=None, note="") -> ClaimRecord:
    """Record for a claim `quantity <= rhs` known only via [lhs_lo, lhs_hi]."""
    if lhs_hi <= rhs:
        verdict = PASS
    elif lhs_lo > rhs:
        verdict = FAIL
    else:
        verdict = OPEN
    return ClaimRecord(
        claim, verdict, params=params or {},
        lhs=[lhs_lo, lhs_hi] if lhs_lo != lhs_hi else lhs_lo,
        rhs=rhs, horizon=horizon, note=note,
    )


@dataclass
class Report:
    name: str
    horizon: int
    config_hash: str = ""
    tool_version: str = ""
    records: list[ClaimRecord] = field(default_factory=list)

    def add(self, record: ClaimRecord) -> ClaimRecord:
        self.records.append(record)
        return record

    @property
    def passed(self) -> bool:
        return all(r.verdict in (PASS, INFO) for r in self.records)

    @property
    def failures(self) -> list[ClaimRecord]:
        return [r for r in self.records if r.verdict == FAIL]

    def to_json(self) -> str:
        body = {
            "report": self.name,
            "horizon": self.horizon,
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "passed": self.passed,
            "records": [r.to_dict() for r in self.records],
        }
        return json.dumps(body, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"report {self.name}  horizon={self.horizon}  "
                 f"{'PASS' if self.passed else 'FAIL'}"]
        width = max((len(r.claim) for r in self.records), default=0)
        for r in self.records:
            bits = [f"  {r.claim:<{width}}  {r.verdict}"]
            if r.lhs is not None:
                bits.append(f"lhs={_short(r.lhs)}")
            if r.rhs is not None:
                bits.append(f"rhs={_short(r.rhs)}")
            if r.witness:
                bits.append(f"witness={_short(r.witness)}")
            if r.note:
                bits.append(f"({r.note})")
            lines.append(" ".join(bits))
        return "\n".join(lines)


def _short(v, cap=40):
    s = str(v)
    return s if len(s) <= cap else s[: cap - 3] + "..."
