"""Tail bounds, the union bound, and the volume-to-noise gap decomposition."""

import json
import math

import pytest
from scipy.optimize import brentq

from polarlattice.bounds import (
    epsilon_terms,
    log2_qfunc,
    performance_report,
    qfunc,
    theorem_bound,
    top_level_block_error,
    union_bound,
    vnr_gap_db,
)

# ---------------------------------------------------------------------------
# Gaussian tails
# ---------------------------------------------------------------------------

def test_qfunc_reference_points():
    assert qfunc(0.0) == 0.5
    assert qfunc(1.0) == pytest.approx(0.15865525393145707, rel=1e-14)
    assert qfunc(3.0) == pytest.approx(1.3498980316300945e-3, rel=1e-12)
    for x in (0.3, 1.7, 4.2):
        assert qfunc(-x) == pytest.approx(1.0 - qfunc(x), rel=1e-14)
    assert qfunc(2.0) < qfunc(1.0) < qfunc(0.5)


def test_log2_qfunc_matches_direct_then_outlives_it():
    for x in (0.5, 1.0, 3.0, 8.0):
        assert log2_qfunc(x) == pytest.approx(math.log2(qfunc(x)), rel=1e-12)
    # far past double underflow: compare against the leading asymptotic term
    x = 40.0
    val = log2_qfunc(x)
    asymptote = (-0.5 * x * x - math.log(x * math.sqrt(2.0 * math.pi))) / math.log(2.0)
    assert math.isfinite(val)
    assert val == pytest.approx(asymptote, rel=1e-3)


# ---------------------------------------------------------------------------
# uncoded top level
# ---------------------------------------------------------------------------

def test_top_level_error_shapes_and_ordering():
    res = top_level_block_error(0.25, 1, 1.0)
    assert res.union == pytest.approx(res.per_symbol)
    assert res.exact == pytest.approx(res.per_symbol, rel=1e-12)
    res = top_level_block_error(0.25, 512, 1.0)
    assert 0.0 < res.exact <= res.union <= 1.0
    assert res.per_symbol == pytest.approx(2.0 * qfunc(2.0), rel=1e-14)


def test_top_level_error_spacing_rescale():
    a = top_level_block_error(0.2, 64, 2.0)
    b = top_level_block_error(0.1, 64, 1.0)
    assert a.per_symbol == b.per_symbol
    assert a.union == b.union
    assert a.exact == b.exact


def test_top_level_error_validation():
    with pytest.raises(ValueError):
        top_level_block_error(0.0, 4, 1.0)
    with pytest.raises(ValueError):
        top_level_block_error(0.1, 0, 1.0)
    with pytest.raises(ValueError):
        top_level_block_error(0.1, 4, 0.0)


def test_noise_level_hitting_target_block_error():
    # noise at which 1024 uncoded unit-spaced symbols reach a 1e-5 union bound
    sigma = brentq(
        lambda s: top_level_block_error(s, 1024, 1.0).union - 1e-5, 0.05, 0.2
    )
    assert sigma == pytest.approx(0.08719, abs=5e-4)


# ---------------------------------------------------------------------------
# union bound
# ---------------------------------------------------------------------------

def test_union_bound_is_exact_arithmetic_on_clean_inputs():
    assert union_bound((2e-5, 2e-5), 1e-5) == 5e-5
    assert union_bound((), 1e-3) == 1e-3
    assert union_bound((0.7, 0.7), 0.2) == 1.0
    with pytest.raises(ValueError):
        union_bound((-1e-3,), 1e-4)


# ---------------------------------------------------------------------------
# volume-to-noise gap
# ---------------------------------------------------------------------------

def test_vnr_gap_reference_point():
    assert vnr_gap_db(2.0, 1.12, 0.3488) == pytest.approx(2.1219, abs=2e-3)
    # carrying more rate closes the gap: 0.1 bit/dim is worth ~0.602 dB
    delta = vnr_gap_db(2.0, 1.12, 0.3488) - vnr_gap_db(2.0, 1.22, 0.3488)
    assert delta == pytest.approx(2.0 * 0.1 * 10.0 * math.log10(2.0), rel=1e-12)


def test_epsilon_terms_reference_point():
    eps = epsilon_terms(0.3488, 3, [0.22, 0.9])
    assert eps.eps1 == pytest.approx(0.0118857, abs=1e-6)
    assert eps.eps2 == pytest.approx(4.302e-8, rel=0.05)
    assert eps.eps3 == pytest.approx(0.340547, abs=1e-5)
    assert eps.gap_bits == pytest.approx(2.0 * (eps.eps1 - eps.eps2 + eps.eps3))
    # the aliasing term and its classical tail estimate agree in magnitude
    assert 0.3 < eps.eps2_tail_estimate / eps.eps2 < 3.0
    # dropping eps2 can only widen the reported gap
    assert eps.upper_gap_db >= eps.gap_db


def test_epsilon_identity_matches_volume_route():
    # same quantity two ways: information terms vs direct volume arithmetic
    eps = epsilon_terms(0.3488, 3, [0.22, 0.9])
    assert abs(eps.gap_db - vnr_gap_db(2.0, 1.12, 0.3488)) < 1e-9


def test_epsilon_aliasing_term_dies_with_tall_stacks():
    eps = epsilon_terms(0.3488, 7, [0.22, 0.9, 1.0, 1.0, 1.0, 1.0])
    assert abs(eps.eps2) < 1e-9


def test_epsilon_terms_validation_and_json():
    with pytest.raises(ValueError):
        epsilon_terms(0.3488, 0, [])
    with pytest.raises(ValueError):
        epsilon_terms(0.3488, 3, [0.5])
    obj = epsilon_terms(0.3488, 2, [0.5]).to_jsonable()
    assert set(obj) == {
        "eps1", "eps2", "eps3", "gap_bits", "gap_db", "upper_gap_db",
        "eps2_tail_estimate",
    }
    json.dumps(obj)


# ---------------------------------------------------------------------------
# asymptotic-form bound
# ---------------------------------------------------------------------------

def test_theorem_bound_matches_direct_evaluation():
    n, beta, sigma = 256, 0.45, 0.3
    expected = n * 2.0 ** (-float(n) ** beta) + n * 2.0 * qfunc(2.0 / (2.0 * sigma))
    assert expected < 1.0  # parameters chosen below the clip
    assert theorem_bound(n, [beta], sigma, 2) == pytest.approx(expected, rel=1e-12)
    # past the clip the bound is pinned to 1
    assert theorem_bound(8, [0.45], sigma, 2) == 1.0


def test_theorem_bound_decays_with_dimension():
    vals = [theorem_bound(1 << m, [0.4] * 4, 0.3488, 5) for m in (10, 12, 20)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-60


def test_theorem_bound_deep_underflow_is_clean():
    val = theorem_bound(1 << 20, [0.45] * 4, 0.1, 5)
    assert 0.0 <= val < 1e-140


def test_theorem_bound_validation():
    with pytest.raises(ValueError):
        theorem_bound(0, [0.4], 0.3, 2)
    with pytest.raises(ValueError):
        theorem_bound(8, [0.4, 0.4], 0.3, 2)
    for bad in (0.0, 0.5, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            theorem_bound(8, [bad], 0.3, 2)


# ---------------------------------------------------------------------------
# assembled report
# ---------------------------------------------------------------------------

def test_performance_report_mirrors_design(design_1024):
    report = performance_report(design_1024, 0.3488)
    assert report.n == 1024 and report.r == 3
    assert report.vnr_db == pytest.approx(3.3323, abs=2e-3)
    assert [l.rate for l in report.levels] == [137 / 1024, 804 / 1024]
    assert report.union_bound_pe == design_1024.total_bound
    assert report.theorem_bound_pe is None
    with_betas = performance_report(design_1024, 0.3488, betas=[0.4, 0.4])
    assert with_betas.theorem_bound_pe is not None
    assert 0.0 <= with_betas.theorem_bound_pe <= 1.0


def test_performance_report_serializes(design_256):
    obj = performance_report(design_256, 0.3488).to_jsonable()
    text = json.dumps(obj)
    back = json.loads(text)
    assert back["n"] == 256
    assert len(back["levels"]) == back["r"] - 1
    assert back["epsilon"]["gap_db"] == pytest.approx(back["vnr_db"], abs=1e-6)
