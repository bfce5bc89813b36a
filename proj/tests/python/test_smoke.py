import math

import pytest

import supq


def test_critical_proportion_values():
    assert abs(supq.nu(2, 7) - 0.75220131380140917) < 1e-12
    assert abs(supq.nu(2, 6) - 0.71762430387232113) < 1e-12
    assert supq.nu(2, 7) > 0.75 > supq.nu(2, 6)


def test_radius_identity():
    for n in (1, 2, 5):
        for N in (3, 10, 40):
            want = 0.25 * math.acosh(1.0 + 4.0 * N * N / n)
            assert abs(supq.max_R(n, N) - want) < 1e-12
            assert abs(math.atanh(math.sqrt(supq.nu(n, N))) - want) < 1e-12


def test_find_n0_scalar_ball():
    res = supq.find_n0(1, 1, 3, l=0)
    assert res["n0"] == 7
    assert res["margin"] > 1e-3
    assert res["ratio_below"] < 0.5 < res["ratio_at_n0"]
    closed = supq.find_n0(1, 1, 3, l=0, route="closed")
    assert closed["n0"] == 7


def test_ratio_brackets_threshold():
    above, err_above = supq.ratio(1, 1, 3, 0, 7)
    below, err_below = supq.ratio(1, 1, 3, 0, 6)
    assert above > 0.5 > below
    assert err_above < 1e-8 and err_below < 1e-8


def test_table_subset_matches_published_cells():
    rows = supq.table(1, 0, 1, 3, 4)
    got = {(r["l"], r["m"]): r["n0"] for r in rows}
    assert got == {(0, 3): 7, (0, 4): 3, (1, 3): 12, (1, 4): 5}


def test_weight_below_integrability_rejected():
    with pytest.raises(ValueError):
        supq.find_n0(1, 1, 2, l=0)


def test_norm_gap_certificate():
    rep = supq.check_norm_gap(1, 1, 3, 98)
    assert rep["holds"]
    assert rep["gap_bound"] == 38
    assert rep["min_off_k_norm"] == 38
    assert rep["in_k"] + rep["off_k"] == rep["total"]


def test_truncated_poincare_reports():
    identity_only = supq.truncated_poincare(3, 4, 0, 0j, 2)
    assert identity_only["terms_used"] == 1
    assert identity_only["partial_value"] == 1.0 + 0j

    deep = supq.truncated_poincare(3, 4, 0, 0j, 400)
    assert abs(deep["partial_value"] - 1.0282925512144954) < 1e-12
    assert deep["tail_indicator"] > 0.0


def test_property_suite_runs_clean():
    rep = supq.run_suite("rootdata", seed=7)
    assert rep["failed"] == 0
    assert rep["passed"] > 0
