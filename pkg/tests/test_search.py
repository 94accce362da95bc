import numpy as np
import pytest

from stateic import channel as ch
from stateic import fm, regions, search
from stateic.search import SearchConfig


def test_config_validation():
    with pytest.raises(search.SearchError):
        SearchConfig(cards={"W": 2})
    with pytest.raises(search.SearchError):
        SearchConfig(samples=10, grid_step=0.1)
    with pytest.raises(search.SearchError):
        SearchConfig(grid_step=1.5)
    with pytest.raises(search.SearchError):
        SearchConfig(lambdas=0)


def test_lambda_sweep():
    assert SearchConfig(lambdas=3).lambda_values() == [0, 0.5, 1]
    assert SearchConfig(lambdas=1).lambda_values() == [0.5]


def test_default_cardinalities_follow_inputs():
    chan = ch.stuck_at_channel()
    assert SearchConfig().resolved_cards(chan) == {"Q": 1, "U1": 2, "V1": 2, "U2": 1, "V2": 1}
    assert SearchConfig(cards={"V1": 4}).resolved_cards(chan)["V1"] == 4


def test_random_pmf_reaches_faces_and_interior():
    rng = np.random.default_rng(0)
    draws = [search._random_pmf(rng, 3) for _ in range(400)]
    assert all(abs(d.sum() - 1) < 1e-12 and (d >= 0).all() for d in draws)
    zeros = [int((d == 0).sum()) for d in draws]
    assert 0 in zeros and 1 in zeros and 2 in zeros


def test_samples_are_deterministic_and_prefix_stable():
    chan = ch.stuck_at_channel()
    a = list(search.sample_distributions(chan, 1, SearchConfig(samples=12, seed=4)))
    b = list(search.sample_distributions(chan, 1, SearchConfig(samples=30, seed=4)))
    assert [i for i, _ in a] == list(range(12))
    for (_, x), (_, y) in zip(a, b):
        np.testing.assert_array_equal(x.p_v1, y.p_v1)
        assert x.f1 == y.f1
    c = list(search.sample_distributions(chan, 1, SearchConfig(samples=12, seed=5)))
    assert any(not np.array_equal(x.p_u1, y.p_u1) for (_, x), (_, y) in zip(a[1:], c[1:]))


def test_first_sample_is_constant():
    chan = ch.identity_channel()
    for scheme in (1, 2):
        _, d = next(search.sample_distributions(chan, scheme, SearchConfig(samples=3)))
        assert d.p_u1[0, 0, 0] == 1.0 and d.p_v2[..., 0].min() == 1.0


def test_grid_size_and_cap():
    chan = ch.stuck_at_channel()
    cfg = SearchConfig(grid_step=0.5, cards={"U1": 2, "V1": 1})
    got = list(search.sample_distributions(chan, 1, cfg))
    assert len(got) == 1 + 3 ** 3  # one Bernoulli per state for p(u1|s)
    with pytest.raises(search.GridTooLarge):
        list(search.sample_distributions(chan, 1, SearchConfig(grid_step=0.01)))
    with pytest.raises(search.SearchError):
        list(search.sample_distributions(chan, 1, SearchConfig(grid_step=0.5, cards={"U1": 3})))


def test_identity_channel_reaches_full_rate():
    approx = search.union_region(ch.identity_channel(), 1, SearchConfig(grid_step=0.5))
    assert (1, 1) in [tuple(p) for p in approx.hull]
    assert all(approx.certificates.values())
    best = {lam: (r1, r2) for lam, r1, r2, _ in approx.points}
    assert best[1][0] == 1


def test_noise_channel_hull_is_origin():
    approx = search.union_region(ch.noise_channel(), 1, SearchConfig(samples=40, seed=2))
    assert approx.hull == [(0, 0)]
    assert all((r1, r2) == (0, 0) for _, r1, r2, _ in approx.points)


def test_union_points_are_support_optima():
    chan = ch.identity_channel()
    approx = search.union_region(chan, 2, SearchConfig(samples=25, seed=1, lambdas=5))
    for lam, r1, r2, _ in approx.points:
        val = lam * r1 + (1 - lam) * r2
        for _, verts in approx.raw_union:
            assert max(lam * x + (1 - lam) * y for x, y in verts) <= val
    # the hull support function equals the union support function
    for lam, r1, r2, _ in approx.points:
        hv, _ = fm.max_linear(approx.hull, (lam, 1 - lam))
        assert hv == lam * r1 + (1 - lam) * r2


def test_union_is_monotone_in_samples():
    chan = ch.stuck_at_channel(users=2)
    small = search.union_region(chan, 1, SearchConfig(samples=20, seed=3), certify=False)
    large = search.union_region(chan, 1, SearchConfig(samples=60, seed=3), certify=False)
    for (lam, a1, a2, _), (_, b1, b2, _) in zip(small.points, large.points):
        assert lam * b1 + (1 - lam) * b2 >= lam * a1 + (1 - lam) * a2


def test_compare_constant_only():
    rep = search.compare_regions(ch.stuck_at_channel(), SearchConfig(samples=1))
    assert rep["union_contained"] is True
    assert rep["pairs"][0]["contained"] and rep["max_violation_bits"] == 0


def test_compare_reports_violation_fields():
    rep = search.compare_regions(ch.stuck_at_channel(users=2), SearchConfig(samples=15, seed=9))
    assert len(rep["pairs"]) == 15
    for p in rep["pairs"]:
        assert set(p) >= {"id", "contained", "max_violation_bits"}
        assert p["max_violation_bits"] >= 0
    assert rep["counterexamples"] == [p["id"] for p in rep["pairs"] if not p["contained"]]


def test_distribution_polygon_empty_when_state_penalty_dominates():
    chan = ch.binary_state_channel()
    one = np.ones((1, 2, 1))
    # V1 = S and X1 = V1 make Y1 = X1 xor S constant, so the binning cost I(V1;S) = 1 is never repaid
    pv = np.zeros((1, 2, 2))
    pv[0, 0, 0] = pv[0, 1, 1] = 1
    d = ch.Scheme1Distribution(np.ones(1), one, pv, one, one,
                               ch.EncoderMap.from_function(lambda u, v, s: v, 1, 2, 2, 2),
                               ch.EncoderMap.constant(1, 1, 2, 1))
    poly, verts = search.distribution_polygon(chan, d)
    assert verts is None and poly.is_empty
    assert regions.membership(poly, (0, 0, 0, 0)) is False
