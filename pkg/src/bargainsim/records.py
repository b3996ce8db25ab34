"""Bargaining records: the transcript left behind by one two-party negotiation.

A record holds the good, the two party identifiers, the outcome (a settled
price or failure) and one message log per side. Everything downstream
(utilities, welfare, the theorem probes) is computed from records, so this
module also carries the validator that checks the structural invariants every
engine-produced record must satisfy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, TextIO

PRICE_TOL = 1e-9

FAILURE = None  # outcome value for a failed bargaining


class Ending(Enum):
    """How one party's message stream ended.

    NONE means the *other* party (or the mediator) ended the negotiation.
    """

    NONE = "none"
    ACCEPT = "accept"
    REJECT = "reject"


class Role(Enum):
    SELLER = "seller"
    PURCHASER = "purchaser"

    @property
    def other(self) -> "Role":
        return Role.PURCHASER if self is Role.SELLER else Role.SELLER


@dataclass(frozen=True)
class MessageLog:
    """Ordered prices one party proposed, plus its ending flag."""

    prices: tuple[float, ...] = ()
    ending: Ending = Ending.NONE

    @property
    def proposal_count(self) -> int:
        return len(self.prices)

    @property
    def last_price(self) -> float | None:
        return self.prices[-1] if self.prices else None


@dataclass(frozen=True)
class BargainingRecord:
    """One finished bargaining: good, parties, outcome price, two logs."""

    good: str
    seller_id: str
    purchaser_id: str
    outcome: float | None  # settled price, or None on failure
    seller_log: MessageLog
    purchaser_log: MessageLog

    @property
    def succeeded(self) -> bool:
        return self.outcome is not None

    @property
    def message_count(self) -> int:
        return self.seller_log.proposal_count + self.purchaser_log.proposal_count


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


def _check_log(log: MessageLog, role: Role, violations: list[str], warnings: list[str]) -> None:
    for i, p in enumerate(log.prices):
        if p <= 0:
            violations.append(f"{role.value} price not positive, index {i}")
    # Monotonic concession: each proposal at least as good for the opponent as
    # the previous. Repeats are tolerated (surfaced as warnings); only moves in
    # the wrong direction are violations.
    for i in range(1, len(log.prices)):
        prev, cur = log.prices[i - 1], log.prices[i]
        if role is Role.PURCHASER:
            if cur < prev - PRICE_TOL:
                violations.append(f"monotonic concession, index {i}")
            elif abs(cur - prev) <= PRICE_TOL:
                warnings.append(f"repeated {role.value} price, index {i}")
        else:
            if cur > prev + PRICE_TOL:
                violations.append(f"monotonic concession, index {i}")
            elif abs(cur - prev) <= PRICE_TOL:
                warnings.append(f"repeated {role.value} price, index {i}")


def validate_record(record: BargainingRecord, mediated: bool | None = None) -> ValidationResult:
    """Check every structural invariant; violations are values, not faults.

    `mediated` tightens the proposal-count check: simultaneous rounds always
    leave equal counts, alternating mode may differ by one. Pass None when the
    mode is unknown (the lenient check applies).
    """
    violations: list[str] = []
    warnings: list[str] = []

    _check_log(record.seller_log, Role.SELLER, violations, warnings)
    _check_log(record.purchaser_log, Role.PURCHASER, violations, warnings)

    endings = [log.ending for log in (record.seller_log, record.purchaser_log)]
    n_ended = sum(1 for e in endings if e is not Ending.NONE)
    if n_ended > 1:
        violations.append("dual ending")

    if record.outcome is not None:
        if Ending.ACCEPT not in endings:
            violations.append("priced outcome without an accept")
        lasts = [
            log.last_price
            for log in (record.seller_log, record.purchaser_log)
            if log.prices
        ]
        if not lasts:
            violations.append("priced outcome with empty logs")
        elif not (min(lasts) - PRICE_TOL <= record.outcome <= max(lasts) + PRICE_TOL):
            violations.append("outcome price outside the final proposals")
    elif Ending.ACCEPT in endings:
        violations.append("accept ending on a failed bargaining")

    diff = abs(record.seller_log.proposal_count - record.purchaser_log.proposal_count)
    if mediated:
        if diff != 0:
            violations.append("unequal proposal counts in mediated mode")
    elif diff > 1:
        violations.append("proposal counts differ by more than one")

    return ValidationResult(ok=not violations, violations=tuple(violations), warnings=tuple(warnings))


# --- transcript view -------------------------------------------------------

Event = tuple[Role, float | Ending]


def interleave(
    record: BargainingRecord, opener: Role = Role.PURCHASER, mediated: bool = False
) -> list:
    """Flatten a record into the ordered event stream that produced it.

    Alternating mode yields (role, price) events starting with `opener`;
    mediated mode yields one ((PURCHASER, p), (SELLER, s)) pair per round.
    The ending event, when present, comes last. Lossless: `deinterleave`
    rebuilds the original logs.
    """
    logs = {Role.SELLER: record.seller_log, Role.PURCHASER: record.purchaser_log}
    events: list = []
    if mediated:
        for p, s in zip(record.purchaser_log.prices, record.seller_log.prices):
            events.append(((Role.PURCHASER, p), (Role.SELLER, s)))
    else:
        turn = opener
        idx = {Role.SELLER: 0, Role.PURCHASER: 0}
        while idx[Role.SELLER] < logs[Role.SELLER].proposal_count or idx[
            Role.PURCHASER
        ] < logs[Role.PURCHASER].proposal_count:
            log = logs[turn]
            if idx[turn] < log.proposal_count:
                events.append((turn, log.prices[idx[turn]]))
                idx[turn] += 1
                turn = turn.other
            else:
                turn = turn.other
    for role, log in logs.items():
        if log.ending is not Ending.NONE:
            events.append((role, log.ending))
    return events


def deinterleave(events: Iterable, mediated: bool = False) -> dict[Role, MessageLog]:
    """Rebuild the two message logs from an interleaved transcript."""
    prices: dict[Role, list[float]] = {Role.SELLER: [], Role.PURCHASER: []}
    endings: dict[Role, Ending] = {Role.SELLER: Ending.NONE, Role.PURCHASER: Ending.NONE}
    for event in events:
        if mediated and isinstance(event[0], tuple):
            for role, price in event:
                prices[role].append(price)
            continue
        role, payload = event
        if isinstance(payload, Ending):
            endings[role] = payload
        else:
            prices[role].append(payload)
    return {
        role: MessageLog(prices=tuple(prices[role]), ending=endings[role])
        for role in (Role.SELLER, Role.PURCHASER)
    }


# --- line-oriented JSON form -----------------------------------------------


def _log_to_dict(log: MessageLog) -> dict:
    return {
        "k": log.proposal_count,
        "prices": list(log.prices),
        "ending": None if log.ending is Ending.NONE else log.ending.value,
    }


def _log_from_dict(d: dict) -> MessageLog:
    prices = tuple(float(p) for p in d["prices"])
    if d.get("k", len(prices)) != len(prices):
        raise ValueError("message log: k does not match the price list length")
    ending = Ending.NONE if d.get("ending") is None else Ending(d["ending"])
    return MessageLog(prices=prices, ending=ending)


def record_to_json(record: BargainingRecord) -> str:
    """One record as one JSON line; outcome is a number or the string FAIL."""
    return json.dumps(
        {
            "good": record.good,
            "seller": record.seller_id,
            "purchaser": record.purchaser_id,
            "outcome": "FAIL" if record.outcome is None else record.outcome,
            "seller_log": _log_to_dict(record.seller_log),
            "purchaser_log": _log_to_dict(record.purchaser_log),
        }
    )


def record_from_json(line: str) -> BargainingRecord:
    d = json.loads(line)
    outcome = d["outcome"]
    return BargainingRecord(
        good=d["good"],
        seller_id=d["seller"],
        purchaser_id=d["purchaser"],
        outcome=None if outcome == "FAIL" else float(outcome),
        seller_log=_log_from_dict(d["seller_log"]),
        purchaser_log=_log_from_dict(d["purchaser_log"]),
    )


def write_records(records: Iterable[BargainingRecord], fp: TextIO) -> None:
    for record in records:
        fp.write(record_to_json(record) + "\n")


def read_records(fp: TextIO) -> Iterator[BargainingRecord]:
    for line in fp:
        line = line.strip()
        if line:
            yield record_from_json(line)
