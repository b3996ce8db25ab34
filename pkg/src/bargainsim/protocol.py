"""Bargaining engines: standard alternating offers plus three leak-limiting extensions.

Variants compose three orthogonal extensions on top of the standard protocol:

* matching -- a trusted referee collects declared reserve prices up front and
  only authorizes pairs whose declared ranges overlap, so incompatible pairs
  leak nothing;
* bounding -- proposals are capped per side and exchanged simultaneously in
  mediated rounds, each side seeing the other's previous-round price, which
  removes the last-mover advantage;
* enforcement -- a failed (rejected or bound-exhausted) bargaining is settled
  by force at the declared reserve prices, the spread confiscated as a penalty.

Enforcement changes what rational agents do near the deadline: concessions are
paced to reach the reserve price by the bound, and in the final round an agent
accepts any standing offer no worse than its own declared reserve, since the
forced settlement at that reserve happens otherwise. Both behaviours are
active only when enforcement and a bound are combined (the "all" variant).

Mediated-round bookkeeping: the referee stops transmitting once any ending
action arrives, so a proposal submitted alongside an accept or reject is
discarded and both logs always hold equally many prices. Settlements the
referee declares itself (simultaneous accepts, or proposals that cross, both
settled at the midpoint) are recorded with the accept flag on the seller's
log; record semantics do not depend on which side carries it.

Because a run's whole decision sequence is a deterministic function of the two
specs, the engines evaluate the per-step policy (`agents.decide`) in closed
form over numpy arrays and resolve the first triggered event, instead of
stepping one call at a time. The equivalence is covered by tests that replay
runs through `decide` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from .agents import AgentSpec, CuriosityType, utility
from .records import BargainingRecord, Ending, MessageLog, Role

VARIANTS = ("barg", "mat", "bou", "all")

DEFAULT_MAX_STEPS = 1_000_000

_PROPOSE, _ACCEPT, _REJECT = 0, 1, 2


@dataclass(frozen=True)
class Declaration:
    """A reserve price declared to the referee before negotiating."""

    agent_id: str
    declared_reserve: float

    def __post_init__(self) -> None:
        if self.declared_reserve <= 0:
            raise ValueError(f"declared reserve must be positive, got {self.declared_reserve}")


@dataclass(frozen=True)
class ProtocolConfig:
    """Which extensions are active, plus run-shape knobs.

    `mediated` is implied: simultaneous mediated rounds are used exactly when
    a bound is set. `max_steps` is a safety valve for the unbounded
    alternating engine, never a protocol bound.
    """

    matching: bool = False
    bound: int | None = None
    enforcement: bool = False
    opener: Role = Role.PURCHASER
    curious_counts: str = "opponent"
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        if self.enforcement and not self.matching:
            raise ValueError("enforced settlement requires matching (declared reserves)")
        if self.bound is not None and self.bound < 1:
            raise ValueError(f"bound must be >= 1, got {self.bound}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    @property
    def mediated(self) -> bool:
        return self.bound is not None

    @staticmethod
    def for_variant(
        variant: str,
        bound: int = 500,
        opener: Role = Role.PURCHASER,
        curious_counts: str = "opponent",
    ) -> "ProtocolConfig":
        """Shorthand configs matching the four experiment variants."""
        v = variant.rstrip(".")
        if v == "barg":
            return ProtocolConfig(opener=opener, curious_counts=curious_counts)
        if v == "mat":
            return ProtocolConfig(matching=True, opener=opener, curious_counts=curious_counts)
        if v == "bou":
            return ProtocolConfig(bound=bound, opener=opener, curious_counts=curious_counts)
        if v == "all":
            return ProtocolConfig(
                matching=True,
                bound=bound,
                enforcement=True,
                opener=opener,
                curious_counts=curious_counts,
            )
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


class OutcomeKind(Enum):
    AGREEMENT = "agreement"
    REJECTED = "rejected"
    NOT_MATCHED = "not-matched"
    FORCED = "forced"
    LIVELOCK = "livelock"  # diagnostic: safety valve exhausted


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    price: float | None = None  # agreement price
    purchaser_pays: float | None = None  # forced settlement legs
    seller_receives: float | None = None
    penalty: float | None = None

    @staticmethod
    def agreement(price: float) -> "Outcome":
        return Outcome(OutcomeKind.AGREEMENT, price=price)

    @staticmethod
    def rejected() -> "Outcome":
        return Outcome(OutcomeKind.REJECTED)

    @staticmethod
    def not_matched() -> "Outcome":
        return Outcome(OutcomeKind.NOT_MATCHED)

    @staticmethod
    def livelock() -> "Outcome":
        return Outcome(OutcomeKind.LIVELOCK)


def match_gate(seller_decl: Declaration, purchaser_decl: Declaration) -> bool:
    """True iff a mutual agreement is possible at the declared prices.

    Equal declarations authorize the pair: the zero-surplus price is still an
    agreement.
    """
    return purchaser_decl.declared_reserve >= seller_decl.declared_reserve


def settle_enforced(seller_decl: Declaration, purchaser_decl: Declaration) -> Outcome:
    """Forced trade at the declared reserves; the spread is confiscated."""
    if not match_gate(seller_decl, purchaser_decl):
        raise ValueError("enforced settlement requires matching declarations")
    pays = purchaser_decl.declared_reserve
    receives = seller_decl.declared_reserve
    return Outcome(
        OutcomeKind.FORCED,
        purchaser_pays=pays,
        seller_receives=receives,
        penalty=pays - receives,
    )


# --- closed-form policy evaluation ------------------------------------------


@lru_cache(maxsize=32)
def _leak_table(info_base: float, info_scale: float, size: int) -> np.ndarray:
    """L[k] = log_base(base + scale*k) for k in [0, size); treat as read-only."""
    k = np.arange(size, dtype=np.float64)
    return np.log(info_base + info_scale * k) / math.log(info_base)


def _plan_array(spec: AgentSpec, n: int, pace_override: int | None) -> np.ndarray:
    """Planned proposals for own steps 0..n-1 (see agents.planned_proposal)."""
    s = spec.strategy
    horizon = s.pace_horizon if pace_override is None else pace_override
    k = np.arange(n, dtype=np.float64)
    alpha = s.kappa + (1.0 - s.kappa) * (k / horizon) ** (1.0 / s.beta)
    if spec.role is Role.PURCHASER:
        return spec.strategy.gamma + (spec.initial_reserve - s.gamma) * alpha
    return s.gamma - (s.gamma - spec.initial_reserve) * alpha


def _reserve_array(
    spec: AgentSpec, n: int, opp_offset: int, curious_counts: str
) -> np.ndarray:
    """Reserve prices at own steps 0..n-1 with k_opp = k_own + opp_offset."""
    if spec.ctype is CuriosityType.UNCURIOUS:
        return np.full(n, spec.initial_reserve)
    table = _leak_table(spec.info_base, spec.info_scale, n + opp_offset)
    own = table[:n]
    opp = table[opp_offset : opp_offset + n]
    collect = opp if curious_counts == "opponent" else own
    if spec.ctype is CuriosityType.SECRETIVE:
        factor = 1.0 / own
    elif spec.ctype is CuriosityType.CURIOUS:
        factor = collect
    else:
        factor = collect / own
    if spec.role is Role.SELLER:
        factor = 1.0 / factor
    return spec.initial_reserve * factor


def _effective_plan(spec: AgentSpec, raw: np.ndarray, stand_pat: float | None = None) -> np.ndarray:
    """Prices actually put on the table; see `agents.decide` on the clamps.

    Curious agents stand pat at their reserve rather than overshoot it; under
    enforcement `stand_pat` (the declared reserve) bounds everyone, since a
    proposal worse than the forced-settlement price is pointless.
    """
    bound_at = stand_pat
    if bound_at is None and spec.ctype is CuriosityType.CURIOUS:
        bound_at = spec.initial_reserve
    if bound_at is None:
        return raw
    if spec.role is Role.PURCHASER:
        return np.minimum(raw, bound_at)
    return np.maximum(raw, bound_at)


def _kinds(
    spec: AgentSpec,
    plan_eff: np.ndarray,
    plan_raw: np.ndarray,
    opp_last: np.ndarray,  # opponent's standing price at each own step; NaN if none
    opp_offset: int,
    curious_counts: str,
    walk_away: float | None = None,
) -> np.ndarray:
    """Per-step action kind, mirroring `agents.decide` element-wise.

    `walk_away` is the acceptance floor: what failing is worth in price terms
    (the initial reserve normally, the declared reserve under enforcement).
    """
    n = len(plan_eff)
    reserve = _reserve_array(spec, n, opp_offset, curious_counts)
    floor = spec.initial_reserve if walk_away is None else walk_away
    with np.errstate(invalid="ignore"):
        if spec.role is Role.PURCHASER:
            accept = (opp_last <= plan_eff) & (opp_last <= floor)
            reject = plan_raw > reserve
        else:
            accept = (opp_last >= plan_eff) & (opp_last >= floor)
            reject = plan_raw < reserve
    kinds = np.zeros(n, dtype=np.int8)
    kinds[reject] = _REJECT
    kinds[accept] = _ACCEPT  # acceptance wins over dropping within one step
    return kinds


def _shift_prev(prices: np.ndarray) -> np.ndarray:
    """prev[k] = prices[k-1]; NaN at k = 0 (no standing offer yet)."""
    prev = np.empty_like(prices)
    prev[0] = np.nan
    prev[1:] = prices[:-1]
    return prev


def _record(
    seller: AgentSpec,
    purchaser: AgentSpec,
    outcome: float | None,
    s_prices: np.ndarray,
    p_prices: np.ndarray,
    s_end: Ending,
    p_end: Ending,
) -> BargainingRecord:
    return BargainingRecord(
        good="good",
        seller_id=seller.agent_id or "seller",
        purchaser_id=purchaser.agent_id or "purchaser",
        outcome=outcome,
        seller_log=MessageLog(tuple(map(float, s_prices)), s_end),
        purchaser_log=MessageLog(tuple(map(float, p_prices)), p_end),
    )


def run_alternating(
    seller: AgentSpec,
    purchaser: AgentSpec,
    opener: Role = Role.PURCHASER,
    max_steps: int = DEFAULT_MAX_STEPS,
    curious_counts: str = "opponent",
) -> BargainingRecord:
    """Standard alternating offers until one side accepts or drops out.

    `max_steps` caps the total number of actions as a pure safety valve (the
    drop rule terminates every run well before it); exhausting it leaves a
    record with no ending flag, which `run` reports as a livelock diagnostic.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    second = opener.other
    window = 2048
    while True:
        n = min(window, max_steps // 2 + 2)
        specs = {Role.SELLER: seller, Role.PURCHASER: purchaser}
        raws = {role: _plan_array(spec, n, None) for role, spec in specs.items()}
        plans = {role: _effective_plan(spec, raws[role]) for role, spec in specs.items()}
        # The opener's step k sees the opponent's (k-1)-th price and has seen
        # k opposing proposals; the second mover's step k sees the opener's
        # k-th price and has seen k+1.
        kinds = {
            opener: _kinds(
                specs[opener], plans[opener], raws[opener],
                _shift_prev(plans[second]), 0, curious_counts,
            ),
            second: _kinds(
                specs[second], plans[second], raws[second],
                plans[opener][:n], 1, curious_counts,
            ),
        }

        first = {}
        for role in (opener, second):
            hits = np.nonzero(kinds[role])[0]
            first[role] = int(hits[0]) if len(hits) else None
        # global step index: opener's step k is action 2k, second's is 2k+1
        g_open = 2 * first[opener] if first[opener] is not None else None
        g_second = 2 * first[second] + 1 if first[second] is not None else None

        candidates = [g for g in (g_open, g_second) if g is not None and g < max_steps]
        if not candidates:
            if n >= max_steps // 2 + 2:
                # safety valve: cut the transcript at max_steps proposals
                n_open = (max_steps + 1) // 2
                n_second = max_steps // 2
                counts = {opener: n_open, second: n_second}
                return _record(
                    seller,
                    purchaser,
                    None,
                    plans[Role.SELLER][: counts[Role.SELLER]],
                    plans[Role.PURCHASER][: counts[Role.PURCHASER]],
                    Ending.NONE,
                    Ending.NONE,
                )
            window *= 4
            continue

        g = min(candidates)
        actor = opener if g % 2 == 0 else second
        k = g // 2
        kind = kinds[actor][k]
        other = actor.other
        # proposals actually put on the table before this action
        n_actor, n_other = (k, k) if actor is opener else (k, k + 1)
        counts = {actor: n_actor, other: n_other}
        endings = {Role.SELLER: Ending.NONE, Role.PURCHASER: Ending.NONE}
        outcome = None
        if kind == _ACCEPT:
            endings[actor] = Ending.ACCEPT
            outcome = float(plans[other][counts[other] - 1])
        else:
            endings[actor] = Ending.REJECT
        return _record(
            seller,
            purchaser,
            outcome,
            plans[Role.SELLER][: counts[Role.SELLER]],
            plans[Role.PURCHASER][: counts[Role.PURCHASER]],
            endings[Role.SELLER],
            endings[Role.PURCHASER],
        )


def run_mediated_rounds(
    seller: AgentSpec,
    purchaser: AgentSpec,
    bound: int,
    curious_counts: str = "opponent",
    deadline_declarations: tuple[float, float] | None = None,
    pace_override: int | None = None,
) -> BargainingRecord:
    """Simultaneous proposal rounds through a referee, capped at `bound`.

    Each round both sides act on the opponent's previous-round price. One
    accept settles at the accepted price; two simultaneous accepts settle at
    the midpoint of the previous round's prices; proposals that cross settle
    at their midpoint; any reject fails; reaching the bound without agreement
    fails. `pace_override` re-paces both concession curves to the given
    horizon.

    `deadline_declarations` = (seller reserve, purchaser reserve) switches on
    enforcement-rational behaviour: failure now means a forced trade at one's
    own declared price, so dropping out early cannot beat staying in (any
    settlement no worse than the declaration dominates it), and in the final
    round an agent accepts any standing offer no worse than its declaration.
    Rejects are therefore suppressed and the only remaining failure is a
    deadline standoff with both final offers outside the declared prices.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    n = bound
    raw_p = _plan_array(purchaser, n, pace_override)
    raw_s = _plan_array(seller, n, pace_override)
    s_decl = p_decl = None
    if deadline_declarations is not None:
        # failure is pegged at the declared price, so concessions stop there
        s_decl, p_decl = deadline_declarations
    plan_p = _effective_plan(purchaser, raw_p, stand_pat=p_decl)
    plan_s = _effective_plan(seller, raw_s, stand_pat=s_decl)

    p_kinds = _kinds(
        purchaser, plan_p, raw_p, _shift_prev(plan_s), 0, curious_counts, walk_away=p_decl
    )
    s_kinds = _kinds(
        seller, plan_s, raw_s, _shift_prev(plan_p), 0, curious_counts, walk_away=s_decl
    )

    if deadline_declarations is not None:
        p_kinds[p_kinds == _REJECT] = _PROPOSE
        s_kinds[s_kinds == _REJECT] = _PROPOSE
        if n >= 2:
            last = n - 1
            if p_kinds[last] != _ACCEPT and plan_s[last - 1] <= p_decl:
                p_kinds[last] = _ACCEPT
            if s_kinds[last] != _ACCEPT and plan_p[last - 1] >= s_decl:
                s_kinds[last] = _ACCEPT

    crossing = plan_p >= plan_s
    event = (p_kinds != _PROPOSE) | (s_kinds != _PROPOSE) | crossing
    hits = np.nonzero(event)[0]
    if len(hits) == 0:
        # bound exhausted: every round was a simultaneous pair of proposals
        return _record(seller, purchaser, None, plan_s, plan_p, Ending.NONE, Ending.NONE)

    r = int(hits[0])
    pk, sk = p_kinds[r], s_kinds[r]
    s_end = p_end = Ending.NONE
    outcome: float | None = None
    if pk == _REJECT or sk == _REJECT:
        # the referee stops here; a simultaneous proposal is never relayed
        if sk == _REJECT:
            s_end = Ending.REJECT
        else:
            p_end = Ending.REJECT
        cut = r
    elif pk == _ACCEPT and sk == _ACCEPT:
        outcome = float((plan_p[r - 1] + plan_s[r - 1]) / 2.0)
        s_end = Ending.ACCEPT
        cut = r
    elif pk == _ACCEPT:
        outcome = float(plan_s[r - 1])
        p_end = Ending.ACCEPT
        cut = r
    elif sk == _ACCEPT:
        outcome = float(plan_p[r - 1])
        s_end = Ending.ACCEPT
        cut = r
    else:  # proposals crossed; the referee settles at their midpoint
        outcome = float((plan_p[r] + plan_s[r]) / 2.0)
        s_end = Ending.ACCEPT
        cut = r + 1
    return _record(seller, purchaser, outcome, plan_s[:cut], plan_p[:cut], s_end, p_end)


@dataclass(frozen=True)
class RunResult:
    record: BargainingRecord
    outcome: Outcome
    seller_utility: float
    purchaser_utility: float


def _truthful(spec: AgentSpec, fallback_id: str) -> Declaration:
    return Declaration(spec.agent_id or fallback_id, spec.initial_reserve)


def run(
    seller: AgentSpec,
    purchaser: AgentSpec,
    seller_decl: Declaration | None = None,
    purchaser_decl: Declaration | None = None,
    config: ProtocolConfig = ProtocolConfig(),
) -> RunResult:
    """Full pipeline for one bargaining under the configured variant.

    Declarations default to the truthful initial reserves. An unauthorized
    pair exchanges nothing and both utilities are exactly zero; a failed run
    under enforcement is replaced by the forced settlement, each side's
    utility evaluated at its own forced price with the run's final message
    counts.
    """
    sd = seller_decl if seller_decl is not None else _truthful(seller, "seller")
    pd = purchaser_decl if purchaser_decl is not None else _truthful(purchaser, "purchaser")
    cc = config.curious_counts

    if config.matching and not match_gate(sd, pd):
        empty = BargainingRecord(
            good="good",
            seller_id=sd.agent_id,
            purchaser_id=pd.agent_id,
            outcome=None,
            seller_log=MessageLog(),
            purchaser_log=MessageLog(),
        )
        return RunResult(empty, Outcome.not_matched(), 0.0, 0.0)

    if config.bound is not None:
        deadline = None
        run_seller, run_purchaser = seller, purchaser
        if config.enforcement:
            deadline = (sd.declared_reserve, pd.declared_reserve)
            run_seller = repaced(seller, _deadline_horizon(seller, config.bound))
            run_purchaser = repaced(purchaser, _deadline_horizon(purchaser, config.bound))
        record = run_mediated_rounds(
            run_seller,
            run_purchaser,
            config.bound,
            curious_counts=cc,
            deadline_declarations=deadline,
        )
    else:
        record = run_alternating(seller, purchaser, config.opener, config.max_steps, cc)

    ks = record.seller_log.proposal_count
    kp = record.purchaser_log.proposal_count

    if record.succeeded:
        outcome = Outcome.agreement(record.outcome)
        s_util = utility(seller, record.outcome, ks, kp, cc)
        p_util = utility(purchaser, record.outcome, kp, ks, cc)
    elif config.enforcement:
        outcome = settle_enforced(sd, pd)
        s_util = utility(seller, outcome.seller_receives, ks, kp, cc)
        p_util = utility(purchaser, outcome.purchaser_pays, kp, ks, cc)
    else:
        no_ending = (
            record.seller_log.ending is Ending.NONE
            and record.purchaser_log.ending is Ending.NONE
        )
        # bound exhaustion is a normal failure; an unbounded alternating run
        # without any ending means the safety valve tripped
        if no_ending and not config.mediated:
            outcome = Outcome.livelock()
        else:
            outcome = Outcome.rejected()
        s_util = utility(seller, None, ks, kp, cc)
        p_util = utility(purchaser, None, kp, ks, cc)

    return RunResult(record, outcome, s_util, p_util)


def repaced(spec: AgentSpec, horizon: int) -> AgentSpec:
    """Copy of `spec` with its concession curve re-paced to `horizon`."""
    return replace(spec, strategy=replace(spec.strategy, pace_horizon=horizon))


# Enforcement makes failure a forced trade at the declared reserve, so agents
# whose failure utility is not positive pace their concessions to reach the
# reserve price comfortably before the deadline and stand pat there. A curious
# agent keeps collecting through a failed run and pays the same declared price
# either way, so it has no reason to hurry: it stretches its concessions to
# the deadline instead, never conceding faster than its own pace.
_DEADLINE_PACE_FACTOR = 0.35


def _deadline_horizon(spec: AgentSpec, bound: int) -> int:
    if spec.ctype is CuriosityType.CURIOUS:
        return max(spec.strategy.pace_horizon, bound)
    return max(1, int(_DEADLINE_PACE_FACTOR * bound))
