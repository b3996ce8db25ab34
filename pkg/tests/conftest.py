"""Shared fixtures: golden agents, random spec generation, reference loops."""

from __future__ import annotations

import random

import pytest

from bargainsim.agents import Action, AgentSpec, CuriosityType, StrategyParams, decide
from bargainsim.records import Ending, Role

ALL_TYPES = tuple(CuriosityType)


def make_spec(
    role=Role.PURCHASER,
    ctype=CuriosityType.UNCURIOUS,
    reserve=15.0,
    gamma=None,
    kappa=0.1,
    beta=1.0,
    horizon=5,
    info_base=1.0e5,
    info_scale=1.0e5,
):
    if gamma is None:
        gamma = 2.0 if role is Role.PURCHASER else reserve * 2.0
    return AgentSpec(
        role=role,
        ctype=ctype,
        initial_reserve=reserve,
        info_base=info_base,
        info_scale=info_scale,
        strategy=StrategyParams(kappa=kappa, beta=beta, gamma=gamma, pace_horizon=horizon),
    )


@pytest.fixture
def golden_purchaser():
    return make_spec(Role.PURCHASER, reserve=15.0, gamma=2.0, kappa=0.1, beta=1.0, horizon=5)


@pytest.fixture
def golden_seller():
    return make_spec(Role.SELLER, reserve=10.0, gamma=20.0, kappa=0.1, beta=1.0, horizon=5)


def random_spec(rng: random.Random, role: Role, ctype=None) -> AgentSpec:
    ctype = ctype if ctype is not None else ALL_TYPES[rng.randrange(len(ALL_TYPES))]
    reserve = rng.uniform(5.0, 25.0)
    if role is Role.PURCHASER:
        gamma = reserve * rng.uniform(0.2, 0.9)
    else:
        gamma = reserve * rng.uniform(1.1, 1.8)
    return AgentSpec(
        role=role,
        ctype=ctype,
        initial_reserve=reserve,
        info_base=rng.choice([5.0, 8.0, 100.0, 1.0e5]),
        info_scale=rng.choice([0.02, 0.5, 10.0, 1.0e5]),
        strategy=StrategyParams(
            kappa=rng.uniform(0.0, 0.4),
            beta=rng.uniform(0.5, 5.0),
            gamma=gamma,
            pace_horizon=rng.randint(2, 400),
        ),
    )


# Step-by-step reference engines driven by `decide`; the vectorized engines in
# bargainsim.protocol must reproduce them.


def reference_alternating(seller, purchaser, opener, max_steps=1_000_000, cc="opponent"):
    specs = {Role.SELLER: seller, Role.PURCHASER: purchaser}
    prices = {Role.SELLER: [], Role.PURCHASER: []}
    endings = {Role.SELLER: Ending.NONE, Role.PURCHASER: Ending.NONE}
    last = {Role.SELLER: None, Role.PURCHASER: None}
    outcome = None
    turn = opener
    for _ in range(max_steps):
        me, opp = turn, turn.other
        action = decide(specs[me], len(prices[me]), len(prices[opp]), last[opp], cc)
        if action.kind == "accept":
            endings[me] = Ending.ACCEPT
            outcome = last[opp]
            break
        if action.kind == "reject":
            endings[me] = Ending.REJECT
            break
        prices[me].append(action.price)
        last[me] = action.price
        turn = opp
    return (
        outcome,
        tuple(prices[Role.SELLER]),
        tuple(prices[Role.PURCHASER]),
        endings[Role.SELLER],
        endings[Role.PURCHASER],
    )


def reference_mediated(seller, purchaser, bound, cc="opponent"):
    # standard (no-enforcement) mediated rounds only
    s_prices, p_prices = [], []
    s_end = p_end = Ending.NONE
    outcome = None
    s_prev = p_prev = None
    for r in range(bound):
        p_act = decide(purchaser, r, r, s_prev, cc)
        s_act = decide(seller, r, r, p_prev, cc)
        if p_act.kind == "reject" or s_act.kind == "reject":
            if s_act.kind == "reject":
                s_end = Ending.REJECT
            else:
                p_end = Ending.REJECT
            break
        if p_act.kind == "accept" and s_act.kind == "accept":
            outcome = (p_prev + s_prev) / 2.0
            s_end = Ending.ACCEPT
            break
        if p_act.kind == "accept":
            outcome = s_prev
            p_end = Ending.ACCEPT
            break
        if s_act.kind == "accept":
            outcome = p_prev
            s_end = Ending.ACCEPT
            break
        p_prices.append(p_act.price)
        s_prices.append(s_act.price)
        if p_act.price >= s_act.price:
            outcome = (p_act.price + s_act.price) / 2.0
            s_end = Ending.ACCEPT
            break
        p_prev, s_prev = p_act.price, s_act.price
    return (outcome, tuple(s_prices), tuple(p_prices), s_end, p_end)
