import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargainsim.agents import (
    AgentSpec,
    CuriosityType,
    StrategyParams,
    decide,
    delta,
    planned_proposal,
    reserve_price,
    utility,
)
from bargainsim.records import Role

from conftest import make_spec

UNC = CuriosityType.UNCURIOUS
SEC = CuriosityType.SECRETIVE
CUR = CuriosityType.CURIOUS
CS = CuriosityType.CURIOUS_SECRETIVE


# --- information factor -------------------------------------------------


def test_delta_uncurious_is_one():
    assert delta(UNC, 1e5, 1e5, 7, 3) == 1.0


def test_delta_secretive_matches_direct_log_evaluation():
    # 1 / log_base(base + scale*k) with base = scale = 1e5, k = 9
    expected = math.log(1e5) / math.log(1e6)
    assert delta(SEC, 1e5, 1e5, 9, 9) == pytest.approx(expected, abs=1e-12)
    assert delta(SEC, 1e5, 1e5, 9, 9) == pytest.approx(5.0 / 6.0, abs=1e-12)


def test_delta_curious_matches_direct_log_evaluation():
    expected = math.log(1e6) / math.log(1e5)
    assert delta(CUR, 1e5, 1e5, 9, 9) == pytest.approx(expected, abs=1e-12)
    assert delta(CUR, 1e5, 1e5, 9, 9) == pytest.approx(1.2, abs=1e-12)


def test_delta_is_one_at_zero_counts():
    for ctype in (UNC, SEC, CUR, CS):
        assert delta(ctype, 50.0, 2.0, 0, 0) == pytest.approx(1.0, abs=1e-12)


def test_delta_curious_counts_switch():
    assert delta(CUR, 1e5, 1e5, 3, 9) == pytest.approx(
        math.log(1e5 + 9e5) / math.log(1e5), abs=1e-12
    )
    assert delta(CUR, 1e5, 1e5, 3, 9, curious_counts="own") == pytest.approx(
        math.log(1e5 + 3e5) / math.log(1e5), abs=1e-12
    )


def test_delta_parameter_errors():
    with pytest.raises(ValueError):
        delta(UNC, 1.0, 1.0, 0, 0)
    with pytest.raises(ValueError):
        delta(UNC, 10.0, 1.0, -1, 0)
    with pytest.raises(ValueError):
        delta(CUR, 10.0, 1.0, 0, 0, curious_counts="sideways")


# --- utility and reserve price -------------------------------------------


def test_uncurious_purchaser_success_utility():
    spec = make_spec(Role.PURCHASER, UNC, reserve=15.0)
    assert utility(spec, 10.0, 4, 4) == pytest.approx(5.0, abs=1e-12)


def test_secretive_purchaser_failure_utility():
    spec = make_spec(Role.PURCHASER, SEC, reserve=15.0)
    assert utility(spec, None, 9, 0) == pytest.approx(15.0 * (5.0 / 6.0 - 1.0), abs=1e-9)
    assert utility(spec, None, 9, 0) == pytest.approx(-2.5, abs=1e-9)


def test_curious_purchaser_failure_utility():
    spec = make_spec(Role.PURCHASER, CUR, reserve=15.0)
    assert utility(spec, None, 0, 9) == pytest.approx(3.0, abs=1e-9)


def test_reserve_price_examples():
    unc = make_spec(Role.PURCHASER, UNC, reserve=15.0)
    assert reserve_price(unc, 0, 0) == pytest.approx(15.0)
    assert reserve_price(unc, 500, 123) == pytest.approx(15.0)

    sec = make_spec(Role.PURCHASER, SEC, reserve=15.0)
    assert reserve_price(sec, 9, 0) == pytest.approx(12.5, abs=1e-9)

    cur = make_spec(Role.PURCHASER, CUR, reserve=15.0)
    assert reserve_price(cur, 0, 9) == pytest.approx(18.0, abs=1e-9)


def test_seller_mirror_directions():
    sec = make_spec(Role.SELLER, SEC, reserve=10.0)
    cur = make_spec(Role.SELLER, CUR, reserve=10.0)
    # a secretive seller's floor rises as it reveals
    assert reserve_price(sec, 9, 0) > 10.0
    # a curious seller accepts lower prices as it collects
    assert reserve_price(cur, 0, 9) < 10.0
    # failure signs mirror the purchaser's
    assert utility(sec, None, 9, 0) < 0.0
    assert utility(cur, None, 0, 9) > 0.0


# --- concession strategy --------------------------------------------------


def test_planned_proposal_golden_values():
    spec = make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=2.0, kappa=0.1, beta=4.0, horizon=10)
    assert planned_proposal(spec, 0) == pytest.approx(3.3, abs=1e-9)
    assert planned_proposal(spec, 10) == pytest.approx(15.0, abs=1e-9)
    # frozen from direct evaluation: 2 + 13*(0.1 + 0.9*(0.5 ** 0.25))
    assert planned_proposal(spec, 5) == pytest.approx(13.138488058468461, abs=1e-9)


def test_planned_proposal_uncapped_past_horizon():
    spec = make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=2.0, kappa=0.1, beta=1.0, horizon=5)
    assert planned_proposal(spec, 6) > 15.0


def test_planned_proposal_monotone_by_role():
    purchaser = make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=3.0, beta=2.5, horizon=50)
    seller = make_spec(Role.SELLER, UNC, reserve=10.0, gamma=22.0, beta=2.5, horizon=50)
    p_vals = [planned_proposal(purchaser, k) for k in range(80)]
    s_vals = [planned_proposal(seller, k) for k in range(80)]
    assert all(a <= b + 1e-12 for a, b in zip(p_vals, p_vals[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(s_vals, s_vals[1:]))


def test_pace_override_and_errors():
    spec = make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=2.0, kappa=0.1, beta=1.0, horizon=5)
    assert planned_proposal(spec, 10, pace_horizon=10) == pytest.approx(15.0, abs=1e-9)
    with pytest.raises(ValueError):
        planned_proposal(spec, 1, pace_horizon=0)
    with pytest.raises(ValueError):
        StrategyParams(kappa=0.1, beta=1.0, gamma=2.0, pace_horizon=0)


def test_spec_invariants():
    with pytest.raises(ValueError):
        make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=16.0)  # target above reserve
    with pytest.raises(ValueError):
        make_spec(Role.SELLER, UNC, reserve=15.0, gamma=14.0)  # target below reserve
    with pytest.raises(ValueError):
        make_spec(Role.PURCHASER, UNC, reserve=15.0, info_base=1.0)


# --- decision rule ----------------------------------------------------------


def test_decide_accepts_offer_below_plan():
    spec = make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=2.0, kappa=0.1, beta=1.0, horizon=5)
    action = decide(spec, 4, 4, 11.8)  # plan at k=4 is 12.66
    assert action.kind == "accept"


def test_decide_secretive_drop():
    spec = make_spec(
        Role.PURCHASER, SEC, reserve=15.0, gamma=2.0, kappa=0.1, beta=4.0, horizon=10
    )
    # at k=5 the plan (~13.14) exceeds the decayed reserve (~12.98)
    assert planned_proposal(spec, 5) > reserve_price(spec, 5, 5)
    assert decide(spec, 5, 5, None).kind == "reject"


def test_decide_proposes_the_plan():
    spec = make_spec(Role.PURCHASER, UNC, reserve=15.0, gamma=2.0, kappa=0.1, beta=1.0, horizon=5)
    action = decide(spec, 3, 3, 13.6)
    assert action.kind == "propose"
    assert action.price == pytest.approx(10.32, abs=1e-9)


def test_decide_acceptance_respects_walk_away_floor():
    # post-horizon the plan overshoots; an offer above the reserve must not
    # be taken even though it beats the plan
    spec = make_spec(Role.PURCHASER, CUR, reserve=15.0, gamma=2.0, kappa=0.1, beta=1.0, horizon=5)
    assert planned_proposal(spec, 8) > 16.0
    assert decide(spec, 8, 8, 15.8).kind != "accept"
    assert decide(spec, 8, 8, 14.9).kind == "accept"


def test_curious_agent_stands_pat_at_its_reserve():
    spec = make_spec(Role.PURCHASER, CUR, reserve=15.0, gamma=2.0, kappa=0.1, beta=4.0, horizon=5)
    # raw plan overshoots the reserve but stays below the inflated curious
    # reserve, so the agent keeps negotiating at its stand-pat price
    assert planned_proposal(spec, 7) > 15.0
    action = decide(spec, 7, 7, 30.0)
    assert action.kind == "propose"
    assert action.price == pytest.approx(15.0, abs=1e-12)


# --- axiom properties -------------------------------------------------------


def _random_spec_for_axioms(rng: random.Random, ctype, role=Role.PURCHASER):
    reserve = rng.uniform(5.0, 30.0)
    gamma = reserve * (rng.uniform(0.2, 0.9) if role is Role.PURCHASER else rng.uniform(1.1, 1.9))
    return AgentSpec(
        role=role,
        ctype=ctype,
        initial_reserve=reserve,
        info_base=rng.uniform(2.0, 1e5),
        info_scale=rng.uniform(1e-3, 1e5),
        strategy=StrategyParams(
            kappa=rng.uniform(0, 1), beta=rng.uniform(0.2, 6), gamma=gamma,
            pace_horizon=rng.randint(1, 1000),
        ),
    )


def test_reserve_price_is_the_utility_root():
    rng = random.Random(101)
    for _ in range(2000):
        role = Role.PURCHASER if rng.random() < 0.5 else Role.SELLER
        ctype = rng.choice(list(CuriosityType))
        spec = _random_spec_for_axioms(rng, ctype, role)
        k_own, k_opp = rng.randint(0, 1000), rng.randint(0, 1000)
        rp = reserve_price(spec, k_own, k_opp)
        assert abs(utility(spec, rp, k_own, k_opp)) <= 1e-9


def test_price_monotonicity_both_roles():
    rng = random.Random(102)
    for _ in range(1000):
        ctype = rng.choice(list(CuriosityType))
        for role in (Role.PURCHASER, Role.SELLER):
            spec = _random_spec_for_axioms(rng, ctype, role)
            k_own, k_opp = rng.randint(0, 500), rng.randint(0, 500)
            lo, hi = sorted((rng.uniform(1, 30), rng.uniform(1, 30)))
            if hi - lo < 1e-9:
                continue
            u_lo = utility(spec, lo, k_own, k_opp)
            u_hi = utility(spec, hi, k_own, k_opp)
            if role is Role.PURCHASER:
                assert u_lo > u_hi
            else:
                assert u_lo < u_hi


def test_secretive_utility_strictly_decreasing_in_own_count():
    rng = random.Random(103)
    for _ in range(1000):
        for role in (Role.PURCHASER, Role.SELLER):
            spec = _random_spec_for_axioms(rng, SEC, role)
            k_opp = rng.randint(0, 500)
            k1 = rng.randint(0, 500)
            k2 = k1 + rng.randint(1, 100)
            price = rng.uniform(1, 30)
            assert utility(spec, price, k2, k_opp) < utility(spec, price, k1, k_opp)


def test_curious_utility_strictly_increasing_in_opponent_count():
    rng = random.Random(104)
    for _ in range(1000):
        for role in (Role.PURCHASER, Role.SELLER):
            spec = _random_spec_for_axioms(rng, CUR, role)
            k_own = rng.randint(0, 500)
            k1 = rng.randint(0, 500)
            k2 = k1 + rng.randint(1, 100)
            price = rng.uniform(1, 30)
            assert utility(spec, price, k_own, k2) > utility(spec, price, k_own, k1)


def test_curious_secretive_joint_monotonicity():
    rng = random.Random(105)
    for _ in range(1000):
        for role in (Role.PURCHASER, Role.SELLER):
            spec = _random_spec_for_axioms(rng, CS, role)
            k_own, k_opp = rng.randint(0, 500), rng.randint(0, 500)
            price = rng.uniform(1, 30)
            d_own = rng.randint(1, 100)
            d_opp = rng.randint(1, 100)
            base = utility(spec, price, k_own, k_opp)
            assert utility(spec, price, k_own + d_own, k_opp) < base
            assert utility(spec, price, k_own, k_opp + d_opp) > base


def test_uncurious_utility_invariant_in_counts():
    rng = random.Random(106)
    for _ in range(1000):
        for role in (Role.PURCHASER, Role.SELLER):
            spec = _random_spec_for_axioms(rng, UNC, role)
            price = rng.uniform(1, 30)
            u = utility(spec, price, 0, 0)
            assert utility(spec, price, rng.randint(0, 1000), rng.randint(0, 1000)) == u


def test_purchaser_reserve_ordering_across_types():
    rng = random.Random(107)
    for _ in range(500):
        reserve = rng.uniform(5, 30)
        base = rng.uniform(2.0, 1e5)
        scale = rng.uniform(1e-3, 1e4)
        k = rng.randint(1, 1000)
        strategy = StrategyParams(kappa=0.1, beta=1.0, gamma=reserve * 0.5, pace_horizon=10)
        prices = {}
        for ctype in (CUR, UNC, SEC):
            spec = AgentSpec(
                role=Role.PURCHASER, ctype=ctype, initial_reserve=reserve,
                info_base=base, info_scale=scale, strategy=strategy,
            )
            prices[ctype] = reserve_price(spec, k, k)
        assert prices[CUR] >= prices[UNC] >= prices[SEC]
        assert prices[CUR] > prices[SEC]


@given(
    kappa=st.floats(0.0, 1.0),
    beta=st.floats(0.2, 6.0, exclude_min=True),
    horizon=st.integers(1, 500),
    reserve=st.floats(5.0, 30.0),
    frac=st.floats(0.1, 0.9),
)
@settings(max_examples=150, deadline=None)
def test_alpha_endpoints(kappa, beta, horizon, reserve, frac):
    spec = AgentSpec(
        role=Role.PURCHASER,
        ctype=UNC,
        initial_reserve=reserve,
        info_base=10.0,
        info_scale=1.0,
        strategy=StrategyParams(kappa=kappa, beta=beta, gamma=reserve * frac, pace_horizon=horizon),
    )
    gamma = reserve * frac
    assert planned_proposal(spec, 0) == pytest.approx(gamma + (reserve - gamma) * kappa, rel=1e-12)
    assert planned_proposal(spec, horizon) == pytest.approx(reserve, rel=1e-12)
