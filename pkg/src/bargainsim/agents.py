"""Curiosity-aware agents: taxonomy, utility, reserve price and strategy.

An agent values the final price *and* the information exchanged on the way.
Information is measured by proposal counts (more messages, more information)
through a logarithmic factor applied to the initial reserve price:

    own-leak weight      L(k) = log_b(b + c*k),  L(0) = 1,  L increasing

A purchaser's information factor is

    uncurious          1
    secretive          1 / L(k_own)        (revealing erodes what it will pay)
    curious            L(k_opp)            (collecting raises what it will pay)
    curious-secretive  L(k_opp) / L(k_own)

and a seller's factor is the reciprocal, so that for both roles a secretive
agent's utility falls as it reveals and a curious one's rises as it collects.
The reserve price at any point of a bargaining is the price of zero utility:
initial reserve times the current information factor.

Proposals follow a time-dependent concession curve from an opening target
toward the initial reserve; an agent accepts any offer at least as good as
its own planned proposal and drops out when the plan passes its current
reserve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .records import Role

RESERVE_TOL = 1e-9


class CuriosityType(Enum):
    UNCURIOUS = "uncurious"
    SECRETIVE = "secretive"
    CURIOUS = "curious"
    CURIOUS_SECRETIVE = "curious-secretive"


# Which count feeds the curious factor. "opponent" follows the definition of
# curiosity (value of the opponent's revealed sequence); "own" keeps the
# literal published formula, which writes the agent's own count everywhere.
CURIOUS_COUNTS = ("opponent", "own")


@dataclass(frozen=True)
class StrategyParams:
    """Shape of the concession curve: opening fraction, pace and target."""

    kappa: float  # offered fraction of the way at step 0, in [0, 1]
    beta: float  # concavity of the pace, > 0
    gamma: float  # opening target price
    pace_horizon: int  # step at which the plan reaches the initial reserve

    def __post_init__(self) -> None:
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must be in [0, 1], got {self.kappa}")
        if self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.pace_horizon < 1:
            raise ValueError(f"pace_horizon must be >= 1, got {self.pace_horizon}")


@dataclass(frozen=True)
class AgentSpec:
    """Immutable description of one negotiating agent."""

    role: Role
    ctype: CuriosityType
    initial_reserve: float
    info_base: float  # the log base b, > 1
    info_scale: float  # message-count scale c inside the log, > 0
    strategy: StrategyParams
    agent_id: str = ""

    def __post_init__(self) -> None:
        if self.initial_reserve <= 0.0:
            raise ValueError(f"initial_reserve must be positive, got {self.initial_reserve}")
        if self.info_base <= 1.0:
            raise ValueError(f"info_base must exceed 1, got {self.info_base}")
        if self.info_scale <= 0.0:
            raise ValueError(f"info_scale must be positive, got {self.info_scale}")
        g = self.strategy.gamma
        if self.role is Role.PURCHASER and g >= self.initial_reserve:
            raise ValueError("purchaser opening target must lie below the initial reserve")
        if self.role is Role.SELLER and g <= self.initial_reserve:
            raise ValueError("seller opening target must lie above the initial reserve")


@dataclass(frozen=True)
class Action:
    """One step's decision: accept the standing offer, counter, or leave."""

    kind: str  # "accept" | "propose" | "reject"
    price: float | None = None

    @staticmethod
    def accept() -> "Action":
        return Action("accept")

    @staticmethod
    def reject() -> "Action":
        return Action("reject")

    @staticmethod
    def propose(price: float) -> "Action":
        if price <= 0:
            raise ValueError(f"proposed price must be positive, got {price}")
        return Action("propose", price)


def _leak_weight(base: float, scale: float, k: int) -> float:
    # log_base(base + scale*k); equals 1 at k = 0.
    return math.log(base + scale * k) / math.log(base)


def delta(
    ctype: CuriosityType,
    info_base: float,
    info_scale: float,
    k_own: int,
    k_opp: int,
    curious_counts: str = "opponent",
) -> float:
    """Purchaser-form information factor; always positive, 1 at zero counts.

    Sellers use the reciprocal (see `utility`). `curious_counts` selects which
    proposal count drives the curious component.
    """
    if info_base <= 1.0:
        raise ValueError(f"info_base must exceed 1, got {info_base}")
    if k_own < 0 or k_opp < 0:
        raise ValueError("proposal counts must be non-negative")
    if curious_counts not in CURIOUS_COUNTS:
        raise ValueError(f"curious_counts must be one of {CURIOUS_COUNTS}")
    if ctype is CuriosityType.UNCURIOUS:
        return 1.0
    k_collect = k_opp if curious_counts == "opponent" else k_own
    if ctype is CuriosityType.SECRETIVE:
        return 1.0 / _leak_weight(info_base, info_scale, k_own)
    if ctype is CuriosityType.CURIOUS:
        return _leak_weight(info_base, info_scale, k_collect)
    return _leak_weight(info_base, info_scale, k_collect) / _leak_weight(
        info_base, info_scale, k_own
    )


def _factor(spec: AgentSpec, k_own: int, k_opp: int, curious_counts: str) -> float:
    d = delta(spec.ctype, spec.info_base, spec.info_scale, k_own, k_opp, curious_counts)
    return d if spec.role is Role.PURCHASER else 1.0 / d


def utility(
    spec: AgentSpec,
    price: float | None,
    k_own: int,
    k_opp: int,
    curious_counts: str = "opponent",
) -> float:
    """Realized utility of one bargaining; `price` is None on failure.

    Purchaser: r0*D - price on success, r0*(D - 1) on failure.
    Seller mirrors with the reciprocal factor: price - r0*Ds, r0*(1 - Ds).
    """
    f = _factor(spec, k_own, k_opp, curious_counts)
    r0 = spec.initial_reserve
    if spec.role is Role.PURCHASER:
        return r0 * f - price if price is not None else r0 * (f - 1.0)
    return price - r0 * f if price is not None else r0 * (1.0 - f)


def reserve_price(
    spec: AgentSpec, k_own: int, k_opp: int, curious_counts: str = "opponent"
) -> float:
    """The unique price of zero utility at the given message counts."""
    return spec.initial_reserve * _factor(spec, k_own, k_opp, curious_counts)


def planned_proposal(spec: AgentSpec, k: int, pace_horizon: int | None = None) -> float:
    """Price the agent intends to put on the table at its own step k.

    alpha(k) = kappa + (1 - kappa) * (k / horizon)^(1/beta), not capped at 1:
    past the horizon the plan overshoots the initial reserve and the drop rule
    ends the run. `pace_horizon` overrides the agent's own pacing (used when a
    protocol deadline makes faster concessions rational).
    """
    s = spec.strategy
    horizon = s.pace_horizon if pace_horizon is None else pace_horizon
    if horizon < 1:
        raise ValueError(f"pace horizon must be >= 1, got {horizon}")
    alpha = s.kappa + (1.0 - s.kappa) * (k / horizon) ** (1.0 / s.beta)
    if spec.role is Role.PURCHASER:
        return s.gamma + (spec.initial_reserve - s.gamma) * alpha
    return s.gamma - (s.gamma - spec.initial_reserve) * alpha


def decide(
    spec: AgentSpec,
    k: int,
    k_opp_so_far: int,
    opponent_last: float | None,
    curious_counts: str = "opponent",
    pace_horizon: int | None = None,
) -> Action:
    """One step of the negotiation policy.

    Accept when the standing offer is at least as good as the own plan; drop
    out when the plan has passed the current (information-adjusted) reserve;
    otherwise put the plan on the table. Acceptance is non-strict, dropping is
    strict, so ties favour agreement.

    Accepting also requires the offer to beat walking away. Success pays the
    price instead of the failure payoff, and the information terms cancel, so
    the walk-away floor is exactly the initial reserve: an offer beyond it is
    worse than ending the run, however tempting the overshooting plan makes
    it look.

    A curious agent never puts a price beyond its reserve on the table either:
    standing pat there is weakly dominant for it (an accepted overshoot would
    be worse than walking, and a refused one only ends the collection run
    sooner). Its raw overshooting plan still drives the drop rule, so a
    stalled run ends once the plan passes the information-adjusted reserve.
    """
    raw_plan = planned_proposal(spec, k, pace_horizon)
    plan = raw_plan
    if spec.ctype is CuriosityType.CURIOUS:
        if spec.role is Role.PURCHASER:
            plan = min(raw_plan, spec.initial_reserve)
        else:
            plan = max(raw_plan, spec.initial_reserve)
    if spec.role is Role.PURCHASER:
        if (
            opponent_last is not None
            and opponent_last <= plan
            and opponent_last <= spec.initial_reserve
        ):
            return Action.accept()
        if raw_plan > reserve_price(spec, k, k_opp_so_far, curious_counts):
            return Action.reject()
    else:
        if (
            opponent_last is not None
            and opponent_last >= plan
            and opponent_last >= spec.initial_reserve
        ):
            return Action.accept()
        if raw_plan < reserve_price(spec, k, k_opp_so_far, curious_counts):
            return Action.reject()
    return Action.propose(plan)
