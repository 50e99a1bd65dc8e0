import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from carletlab import planes
from carletlab.exact import Ordering, cmp_pow_13_3


def test_p_term_and_delta2():
    assert planes.p_term(2) == 18
    assert planes.f_min(2) == (0, Fraction(18))
    assert planes.delta2_check()


def test_csums_match_definition():
    s = planes.compute_csums(10, 3)
    js = range(4, 10)
    assert s.c1 == sum(Fraction(1, j ** 3) - Fraction(1, 8 * j ** 4) for j in js)
    assert s.c2 == sum(Fraction(1, j ** 2) - Fraction(1, 4 * j ** 3) for j in js)
    assert s.c3 == sum(Fraction(2, j) - Fraction(11, 8 * j ** 2) for j in js)
    assert s.c4 == sum(Fraction(1, j) for j in js)


@pytest.mark.parametrize("delta,r", [(3, 0), (3, 2), (10, 9), (2, 1)])
def test_r_out_of_range(delta, r):
    with pytest.raises(ValueError):
        planes.f_value(delta, r)


def test_prefix_matches_direct_exactly():
    prefix = planes.exact_prefix_sums(199)
    for delta in range(3, 201):
        for r in range(1, delta - 1):
            assert planes.f_value_from_prefix(delta, r, prefix) == planes.f_value(delta, r)


def test_fixed_point_prefix_matches_direct_bounds():
    pre = planes._Prefix(planes.SWEEP_BITS)
    for delta in range(3, 201):
        pre.advance_to(delta - 1)
        r = planes.optimal_r_index(delta)
        small = pre.at(r)
        got = planes._scaled_f_bounds(delta, r, pre.lo, pre.hi, small[0], small[1], planes.SWEEP_BITS)
        lo, hi = planes._direct_f_bounds(delta, r, planes.SWEEP_BITS)
        exact = planes.f_value(delta, r) * (4 << planes.SWEEP_BITS)
        assert got[0] <= exact <= got[1]
        assert lo <= exact <= hi


def test_first_difference_sign_matches_exact():
    for delta in range(3, 120):
        for r in range(1, delta - 2):
            diff = planes.f_value(delta, r + 1) - planes.f_value(delta, r)
            assert planes.first_difference_sign(delta, r) == (diff > 0) - (diff < 0)


def test_convexity_in_r():
    # the first difference is nondecreasing in r, so the walk finds the global minimum
    for delta in range(3, 2001):
        signs = [planes.first_difference_sign(delta, r) for r in range(1, delta - 2)]
        assert signs == sorted(signs), delta


@pytest.mark.parametrize("delta", list(range(3, 60)) + [97, 150, 256])
def test_walk_matches_exhaustive(delta):
    assert planes.optimal_r(delta) == planes.optimal_r_exhaustive(delta)


def test_exceptional_examples():
    rows = {r.delta: r for r in planes.exceptional_table()}
    assert len(rows) == 32
    assert (rows[6].r_opt, rows[6].computed_bound) == (2, "4755.719")
    assert (rows[8].computed_bound, rows[8].threshold) == ("16734.776", "16302.080")
    assert (rows[37].r_opt, rows[37].computed_bound, rows[37].threshold) == (3, "12430121.798", "12427789.273")
    assert all(r.verdict == "Fail" for r in rows.values())


def test_csv_header():
    text = planes.rows_to_csv(planes.exceptional_table()[:1])
    assert text.splitlines()[0] == "delta,r_opt,computed_bound,threshold,verdict"


def test_neighbours_of_exceptional_set():
    assert planes.bound_row(5).computed_bound == "2114.112"
    assert planes.bound_row(5).verdict == "Pass"
    assert planes.bound_row(38).computed_bound == "13920945.841"
    assert planes.bound_row(38).verdict == "Pass"


@given(st.integers(min_value=3, max_value=400))
@settings(max_examples=40, deadline=None)
def test_certified_compare_agrees_with_exact(delta):
    r = planes.optimal_r_index(delta)
    for c in (planes.MAIN_CONSTANT, planes.UNIFORM_CONSTANT, Fraction(2)):
        got, _ = planes.certified_compare(delta, r, c)
        assert got == cmp_pow_13_3(planes.f_value(delta, r), c, delta)


def test_verify_range_small():
    rep = planes.verify_range(3, 2000, "199/100")
    assert rep.failures == list(range(6, 38))
    assert planes.verify_range(3, 2000, "2043/1000").failures == []
    assert json.loads(json.dumps(rep.to_json()))["constant"] == "199/100"


def test_verify_range_rejects_bad_range():
    with pytest.raises(ValueError):
        planes.verify_range(5, 3, "199/100")
    with pytest.raises(ValueError):
        planes.verify_range(2, 3, "199/100")


@pytest.mark.parametrize("workers", [1, 4, 8])
def test_sweep_determinism_across_workers(workers):
    rep = planes.verify_range(3, 3000, "199/100", workers=workers, checkpoint_every=500)
    assert rep.failures == list(range(6, 38))


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "ck.json"
    planes.verify_range(3, 1000, "199/100", checkpoint=str(ck), checkpoint_every=250)
    data = json.loads(ck.read_text())
    assert data == {"constant": "199/100", "last_delta": 1000, "failures": list(range(6, 38))}
    # resume from a mid-range state: the range past last_delta is swept, earlier failures kept
    ck.write_text(json.dumps({"constant": "199/100", "last_delta": 20, "failures": list(range(6, 21))}))
    rep = planes.verify_range(3, 1000, "199/100", checkpoint=str(ck))
    assert rep.failures == list(range(6, 38))


@pytest.mark.parametrize("payload", [
    "not json",
    json.dumps({"constant": "199/100", "failures": []}),
    json.dumps({"constant": "2043/1000", "last_delta": 10, "failures": []}),
    json.dumps({"constant": "199/100", "last_delta": 10 ** 9, "failures": []}),
    json.dumps({"constant": "199/100", "last_delta": 10, "failures": [7, 6]}),
    json.dumps({"constant": "199/100", "last_delta": "10", "failures": []}),
])
def test_checkpoint_corruption(tmp_path, payload):
    ck = tmp_path / "ck.json"
    ck.write_text(payload)
    with pytest.raises(planes.CheckpointError):
        planes.verify_range(3, 100, "199/100", checkpoint=str(ck))


def test_max_ratio_small():
    d, bound = planes.max_ratio(2, 500)
    assert d == 8
    assert Fraction(bound) >= Fraction(20428, 10000)


def test_baseline_coefficient_is_weaker():
    # 2 d^(13/3) + 3 d^(11/3) exceeds 2.043 d^(13/3) exactly when d < (3/0.043)^(3/2) ~ 582.7
    assert planes.baseline_exceeds(8)
    assert planes.baseline_exceeds(582)
    assert not planes.baseline_exceeds(583)


def test_floor_threshold():
    assert planes.floor_threshold("199/100", 8) == 16302
    assert planes.floor_threshold(1, 8) == 2 ** 13
