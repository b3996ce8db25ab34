import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargainsim.records import (
    BargainingRecord,
    Ending,
    MessageLog,
    Role,
    deinterleave,
    interleave,
    read_records,
    record_from_json,
    record_to_json,
    validate_record,
    write_records,
)


def make_record(p_prices, s_prices, outcome=None, p_end=Ending.NONE, s_end=Ending.NONE):
    return BargainingRecord(
        good="good",
        seller_id="s",
        purchaser_id="p",
        outcome=outcome,
        seller_log=MessageLog(tuple(s_prices), s_end),
        purchaser_log=MessageLog(tuple(p_prices), p_end),
    )


def test_valid_monotone_record_is_ok():
    record = make_record(
        [3.3, 5.6, 8.0], [19.0, 17.2], outcome=8.0, s_end=Ending.ACCEPT
    )
    result = validate_record(record)
    assert result.ok
    assert result.violations == ()


def test_decreasing_purchaser_offer_is_flagged():
    record = make_record([5.0, 4.0], [19.0], p_end=Ending.REJECT)
    result = validate_record(record)
    assert not result.ok
    assert "monotonic concession, index 1" in result.violations


def test_dual_ending_is_flagged():
    record = make_record([5.0], [19.0], outcome=5.0, p_end=Ending.ACCEPT, s_end=Ending.ACCEPT)
    result = validate_record(record)
    assert "dual ending" in result.violations


def test_repeated_price_is_a_warning_not_a_violation():
    record = make_record([5.0, 5.0, 6.0], [19.0, 18.0], outcome=6.0, s_end=Ending.ACCEPT)
    result = validate_record(record)
    assert result.ok
    assert any("repeated" in w for w in result.warnings)


def test_priced_outcome_requires_an_accept():
    record = make_record([5.0], [19.0], outcome=5.0)
    assert "priced outcome without an accept" in validate_record(record).violations


def test_outcome_must_lie_between_final_proposals():
    record = make_record([5.0, 9.0], [19.0, 12.0], outcome=25.0, s_end=Ending.ACCEPT)
    assert "outcome price outside the final proposals" in validate_record(record).violations


def test_nonpositive_price_is_flagged():
    record = make_record([0.0], [], p_end=Ending.REJECT)
    assert any("not positive" in v for v in validate_record(record).violations)


def test_count_difference_checks():
    record = make_record([1.0, 2.0, 3.0], [9.0], s_end=Ending.REJECT)
    assert any("differ by more than one" in v for v in validate_record(record).violations)
    uneven = make_record([1.0, 2.0], [9.0], s_end=Ending.REJECT)
    assert validate_record(uneven).ok
    assert not validate_record(uneven, mediated=True).ok


def test_interleave_alternating_purchaser_opener():
    record = make_record([3.0, 5.0], [19.0, 17.0], outcome=5.0, s_end=Ending.ACCEPT)
    events = interleave(record, opener=Role.PURCHASER)
    assert events == [
        (Role.PURCHASER, 3.0),
        (Role.SELLER, 19.0),
        (Role.PURCHASER, 5.0),
        (Role.SELLER, 17.0),
        (Role.SELLER, Ending.ACCEPT),
    ]


def test_interleave_short_run_with_reject():
    record = make_record([3.0], [], p_end=Ending.REJECT)
    events = interleave(record, opener=Role.PURCHASER)
    assert events == [(Role.PURCHASER, 3.0), (Role.PURCHASER, Ending.REJECT)]


def test_interleave_mediated_pairs():
    record = make_record([1.0, 2.0, 3.0], [9.0, 8.0, 7.0], outcome=5.0, s_end=Ending.ACCEPT)
    events = interleave(record, mediated=True)
    assert events[0] == ((Role.PURCHASER, 1.0), (Role.SELLER, 9.0))
    assert len(events) == 4  # three rounds plus the ending
    assert events[-1] == (Role.SELLER, Ending.ACCEPT)


@given(
    n_p=st.integers(0, 6),
    extra_seller=st.integers(-1, 1),
    opener=st.sampled_from([Role.PURCHASER, Role.SELLER]),
    who_ends=st.sampled_from([None, Role.PURCHASER, Role.SELLER]),
    ending=st.sampled_from([Ending.ACCEPT, Ending.REJECT]),
    seed=st.integers(0, 10_000),
)
@settings(max_examples=200, deadline=None)
def test_interleave_roundtrip(n_p, extra_seller, opener, who_ends, ending, seed):
    rng = random.Random(seed)
    n_s = max(0, n_p + extra_seller)
    p_prices = sorted(round(rng.uniform(1, 10), 3) for _ in range(n_p))
    s_prices = sorted((round(rng.uniform(11, 20), 3) for _ in range(n_s)), reverse=True)
    record = make_record(
        p_prices,
        s_prices,
        p_end=ending if who_ends is Role.PURCHASER else Ending.NONE,
        s_end=ending if who_ends is Role.SELLER else Ending.NONE,
    )
    logs = deinterleave(interleave(record, opener=opener))
    assert logs[Role.PURCHASER] == record.purchaser_log
    assert logs[Role.SELLER] == record.seller_log


def test_mediated_roundtrip():
    record = make_record([1.0, 2.0], [9.0, 8.0], p_end=Ending.REJECT)
    logs = deinterleave(interleave(record, mediated=True), mediated=True)
    assert logs[Role.PURCHASER] == record.purchaser_log
    assert logs[Role.SELLER] == record.seller_log


def test_json_line_roundtrip():
    record = make_record([3.3, 5.6], [19.0], outcome=5.6, s_end=Ending.ACCEPT)
    line = record_to_json(record)
    assert '"FAIL"' not in line
    assert record_from_json(line) == record

    failed = make_record([3.3], [19.0], p_end=Ending.REJECT)
    line = record_to_json(failed)
    assert '"FAIL"' in line
    assert record_from_json(line) == failed


def test_json_stream_roundtrip():
    records = [
        make_record([1.0], [9.0], outcome=9.0, p_end=Ending.ACCEPT),
        make_record([2.0], [8.0], s_end=Ending.REJECT),
    ]
    buf = io.StringIO()
    write_records(records, buf)
    buf.seek(0)
    assert list(read_records(buf)) == records


def test_json_rejects_inconsistent_count():
    with pytest.raises(ValueError):
        record_from_json(
            '{"good":"g","seller":"s","purchaser":"p","outcome":"FAIL",'
            '"seller_log":{"k":2,"prices":[1.0],"ending":null},'
            '"purchaser_log":{"k":0,"prices":[],"ending":null}}'
        )
