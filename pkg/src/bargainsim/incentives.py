"""Executable probes for the mechanism's incentive properties.

The first probe checks that, with all three extensions active, a curious agent
cannot gain by declaring a reserve price beyond the one its utility would
justify at the proposal bound: every declaration on a grid is played against
the same stream of sampled opponents (paired seeds) and the truthful
declaration's mean utility must not be beaten by more than sampling noise.
Each run under an inflated declaration is also sorted into one of the three
proof cases: the bargaining failed and the agent paid its declared price, it
settled above the agent's true bound-reserve, or it settled at a price the
truthful declaration would equally have reached.

The second probe is the agreement-dominance check: a forced settlement is
never better than an agreement at one's own declared reserve, and strictly
worse than any agreement strictly better than it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .agents import AgentSpec, reserve_price, utility
from .protocol import (
    Declaration,
    Outcome,
    OutcomeKind,
    ProtocolConfig,
    RunResult,
    run,
)
from .records import BargainingRecord, Role
from .seeding import rng_for

PRICE_TOL = 1e-9
Z95 = 1.959963984540054

OpponentSampler = Callable[[random.Random], AgentSpec]


@dataclass(frozen=True)
class CaseTally:
    """Proof-case counts over all matched-or-settled inflated-declaration runs."""

    case1_rejected: int
    case2_overpaid: int
    case3_compatible: int

    @property
    def total(self) -> int:
        return self.case1_rejected + self.case2_overpaid + self.case3_compatible


@dataclass(frozen=True)
class DeclarationStats:
    declared: float
    mean_utility: float
    ci95: float
    bargained: int  # runs that passed the matching gate

    def to_dict(self) -> dict:
        return {
            "declared": self.declared,
            "mean_utility": self.mean_utility,
            "ci95": self.ci95,
            "bargained": self.bargained,
        }


@dataclass(frozen=True)
class Theorem1Report:
    grid: tuple[float, ...]
    stats: tuple[DeclarationStats, ...]
    truthful_index: int
    truthful_value: float
    dominance_holds: bool
    tally: CaseTally
    case3_gate_violations: int  # case-3 runs the truthful declaration would have missed

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "stats": [s.to_dict() for s in self.stats],
            "truthful_index": self.truthful_index,
            "truthful_value": self.truthful_value,
            "dominance_holds": self.dominance_holds,
            "case_tally": {
                "case1_rejected": self.tally.case1_rejected,
                "case2_overpaid": self.tally.case2_overpaid,
                "case3_compatible": self.tally.case3_compatible,
            },
            "case3_gate_violations": self.case3_gate_violations,
        }


def _mean_ci(values: list[float]) -> tuple[float, float]:
    n = len(values)
    if n == 0:
        return 0.0, 0.0
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, Z95 * math.sqrt(var / n)


def theorem1_probe(
    agent: AgentSpec,
    opponent_sampler: OpponentSampler,
    grid: list[float],
    config: ProtocolConfig,
    draws: int,
    seed: int,
) -> Theorem1Report:
    """Mean utility per declared reserve, against paired opponent streams.

    Requires the all-extensions configuration and a grid containing the
    truthful value (the agent's reserve price at the bound). Dominance holds
    when no declaration beyond the truthful one beats its mean by more than
    that declaration's own 95% half-width.
    """
    if not (config.matching and config.bound is not None and config.enforcement):
        raise ValueError("the declaration probe requires all three extensions")
    if draws < 1:
        raise ValueError("draws must be >= 1")

    bound = config.bound
    truthful = reserve_price(agent, bound, bound, config.curious_counts)
    grid = sorted(grid)
    truthful_index = next(
        (i for i, g in enumerate(grid) if math.isclose(g, truthful, rel_tol=1e-9)), None
    )
    if truthful_index is None:
        raise ValueError(
            f"declaration grid must contain the truthful bound-reserve {truthful!r}"
        )

    probe_is_purchaser = agent.role is Role.PURCHASER

    def inflated(declared: float) -> bool:
        if probe_is_purchaser:
            return declared > truthful + PRICE_TOL
        return declared < truthful - PRICE_TOL

    stats: list[DeclarationStats] = []
    case1 = case2 = case3 = 0
    gate_violations = 0

    for declared in grid:
        utilities: list[float] = []
        bargained = 0
        for i in range(draws):
            opponent = opponent_sampler(rng_for(seed, i))
            if probe_is_purchaser:
                seller, purchaser = opponent, agent
                seller_decl = Declaration("seller", opponent.initial_reserve)
                purchaser_decl = Declaration("purchaser", declared)
            else:
                seller, purchaser = agent, opponent
                seller_decl = Declaration("seller", declared)
                purchaser_decl = Declaration("purchaser", opponent.initial_reserve)
            result = run(seller, purchaser, seller_decl, purchaser_decl, config)
            u = result.purchaser_utility if probe_is_purchaser else result.seller_utility
            utilities.append(u)
            kind = result.outcome.kind
            if kind is not OutcomeKind.NOT_MATCHED:
                bargained += 1
                if inflated(declared):
                    if kind is OutcomeKind.FORCED:
                        case1 += 1
                    elif _settled_beyond(result, truthful, probe_is_purchaser):
                        case2 += 1
                    else:
                        case3 += 1
                        # with an honest declaration the same opponent must
                        # still have passed the gate
                        if probe_is_purchaser:
                            if seller_decl.declared_reserve > truthful + PRICE_TOL:
                                gate_violations += 1
                        elif purchaser_decl.declared_reserve < truthful - PRICE_TOL:
                            gate_violations += 1
        mean, ci = _mean_ci(utilities)
        stats.append(DeclarationStats(declared, mean, ci, bargained))

    truthful_mean = stats[truthful_index].mean_utility
    dominance = all(
        s.mean_utility <= truthful_mean + s.ci95
        for s in stats
        if inflated(s.declared)
    )
    return Theorem1Report(
        grid=tuple(grid),
        stats=tuple(stats),
        truthful_index=truthful_index,
        truthful_value=truthful,
        dominance_holds=dominance,
        tally=CaseTally(case1, case2, case3),
        case3_gate_violations=gate_violations,
    )


def _settled_beyond(result: RunResult, truthful: float, purchaser_side: bool) -> bool:
    if result.outcome.kind is not OutcomeKind.AGREEMENT:
        return False
    price = result.outcome.price
    if purchaser_side:
        return price > truthful + PRICE_TOL
    return price < truthful - PRICE_TOL


def theorem2_check(
    record: BargainingRecord,
    outcome: Outcome,
    seller: AgentSpec,
    purchaser: AgentSpec,
    seller_decl: Declaration,
    purchaser_decl: Declaration,
    curious_counts: str = "opponent",
    probe_offset: float = 1e-3,
) -> bool:
    """Agreement dominance at a forced settlement.

    True iff, for both parties at the run's final message counts, the forced
    utility is no better than an agreement at the party's own declared
    reserve, and strictly worse than an agreement better than that reserve by
    `probe_offset`.
    """
    if outcome.kind is not OutcomeKind.FORCED:
        raise ValueError("theorem2_check applies to forced settlements only")
    ks = record.seller_log.proposal_count
    kp = record.purchaser_log.proposal_count

    realized_p = utility(purchaser, outcome.purchaser_pays, kp, ks, curious_counts)
    at_decl_p = utility(purchaser, purchaser_decl.declared_reserve, kp, ks, curious_counts)
    better_p = utility(
        purchaser, purchaser_decl.declared_reserve - probe_offset, kp, ks, curious_counts
    )

    realized_s = utility(seller, outcome.seller_receives, ks, kp, curious_counts)
    at_decl_s = utility(seller, seller_decl.declared_reserve, ks, kp, curious_counts)
    better_s = utility(
        seller, seller_decl.declared_reserve + probe_offset, ks, kp, curious_counts
    )

    return (
        realized_p <= at_decl_p + PRICE_TOL
        and realized_p < better_p
        and realized_s <= at_decl_s + PRICE_TOL
        and realized_s < better_s
    )


def theorem2_batch(
    make_pair: Callable[[random.Random], tuple[AgentSpec, AgentSpec]],
    config: ProtocolConfig,
    draws: int,
    seed: int,
) -> tuple[int, int]:
    """Run random bargainings and check every forced settlement.

    `make_pair` returns (seller, purchaser) for one draw's RNG. Returns
    (forced settlements seen, forced settlements passing the check).
    """
    if not config.enforcement:
        raise ValueError("the agreement-dominance batch needs enforcement active")
    seen = passed = 0
    for i in range(draws):
        rng = rng_for(seed, i)
        seller, purchaser = make_pair(rng)
        seller_decl = Declaration("seller", seller.initial_reserve)
        purchaser_decl = Declaration("purchaser", purchaser.initial_reserve)
        result = run(seller, purchaser, seller_decl, purchaser_decl, config)
        if result.outcome.kind is OutcomeKind.FORCED:
            seen += 1
            if theorem2_check(
                result.record,
                result.outcome,
                seller,
                purchaser,
                seller_decl,
                purchaser_decl,
                config.curious_counts,
            ):
                passed += 1
    return seen, passed
