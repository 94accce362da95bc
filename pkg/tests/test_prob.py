import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from stateic.prob import (
    ConditionalPmf,
    DanglingVariable,
    JointPmf,
    NegativeWeight,
    NotNormalized,
    OverlappingSets,
    ShapeMismatch,
    UnknownVariable,
    VarId,
    cond_mutual_info,
    entropy,
    marginalize,
    product_join,
    validate,
)

NAMES = ("A", "B", "C", "D")


def random_joint(rng, cards=(2, 2, 2, 2)):
    w = rng.dirichlet(np.ones(int(np.prod(cards)))).reshape(cards)
    return JointPmf.from_weights([VarId(n, k) for n, k in zip(NAMES, cards)], w)


@st.composite
def joints(draw):
    k = draw(st.integers(2, 4))
    cards = tuple(draw(st.integers(1, 3)) for _ in range(k))
    raw = draw(st.lists(st.floats(0, 1), min_size=int(np.prod(cards)), max_size=int(np.prod(cards))))
    w = np.asarray(raw) + 1e-3 * draw(st.booleans())
    w[w < 1e-9] = 0.0
    if w.sum() == 0:
        w[0] = 1.0
    w = w / w.sum()
    return JointPmf.from_weights([VarId(n, c) for n, c in zip(NAMES, cards)], w.reshape(cards))


def test_fixed_pair_mutual_information():
    j = JointPmf.from_weights([VarId("X", 2), VarId("Y", 2)], [[0.4, 0.1], [0.1, 0.4]])
    assert cond_mutual_info(j, "X", "Y") == pytest.approx(0.2781, abs=1e-4)
    ref = oracles.cmi(oracles.array_to_dict(j.weights), ("X", "Y"), ("X",), ("Y",))
    assert cond_mutual_info(j, "X", "Y") == pytest.approx(ref, abs=1e-12)


def test_entropy_of_uniform_and_point_mass():
    u = JointPmf.from_weights([VarId("X", 4)], np.full(4, 0.25))
    assert entropy(u, "X") == pytest.approx(2.0)
    pm = JointPmf.from_weights([VarId("X", 3)], [0, 1, 0])
    assert entropy(pm, "X") == 0.0


def test_product_of_independent_factors_has_zero_information():
    a, b = VarId("A", 2), VarId("B", 3)
    j = product_join([ConditionalPmf.from_table((a,), (), [0.3, 0.7]),
                      ConditionalPmf.from_table((b,), (), [0.2, 0.5, 0.3])])
    assert cond_mutual_info(j, "A", "B") == pytest.approx(0.0, abs=1e-12)


def test_deterministic_copy_carries_full_entropy():
    a, b = VarId("A", 2), VarId("B", 2)
    j = product_join([ConditionalPmf.from_table((a,), (), [0.5, 0.5]),
                      ConditionalPmf.deterministic(b, (a,), lambda x: x)])
    assert cond_mutual_info(j, "A", "B") == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(joints())
def test_measures_match_summation_oracle(j):
    names = j.names
    d = oracles.array_to_dict(j.weights)
    for a, b in itertools.permutations(names, 2):
        rest = [n for n in names if n not in (a, b)]
        for r in range(len(rest) + 1):
            for c in itertools.combinations(rest, r):
                assert cond_mutual_info(j, a, b, c) == pytest.approx(oracles.cmi(d, names, (a,), (b,), c), abs=1e-9)


def test_information_identities_on_random_joints():
    rng = np.random.default_rng(7)
    for _ in range(50):
        j = random_joint(rng)
        assert cond_mutual_info(j, "A", "B", "C") >= -1e-12
        assert cond_mutual_info(j, "A", "B", "C") == pytest.approx(cond_mutual_info(j, "B", "A", "C"), abs=1e-12)
        lhs = cond_mutual_info(j, "A", ("B", "C"), "D")
        rhs = cond_mutual_info(j, "A", "B", "D") + cond_mutual_info(j, "A", "C", ("B", "D"))
        assert lhs == pytest.approx(rhs, abs=1e-12)
        assert entropy(j, ("A", "B")) == pytest.approx(entropy(j, "A") + entropy(j, "B", "A"), abs=1e-12)


def test_marginalize_keeps_order_and_mass():
    rng = np.random.default_rng(1)
    j = random_joint(rng, (2, 3, 2, 2))
    m = marginalize(j, ("C", "B"))
    assert m.names == ("B", "C")
    np.testing.assert_allclose(m.weights, j.weights.sum(axis=(0, 3)))
    validate(m)


def test_reorder_is_a_transpose():
    rng = np.random.default_rng(2)
    j = random_joint(rng, (2, 3, 1, 2))
    r = j.reorder(("D", "A", "C", "B"))
    assert r.shape == (2, 2, 1, 3)
    assert cond_mutual_info(r, "A", "B", "D") == pytest.approx(cond_mutual_info(j, "A", "B", "D"))
    with pytest.raises(UnknownVariable):
        j.reorder(("A", "B"))


def test_rejects_bad_weights():
    v = [VarId("X", 2)]
    with pytest.raises(NegativeWeight):
        JointPmf.from_weights(v, [1.5, -0.5])
    with pytest.raises(NotNormalized):
        JointPmf.from_weights(v, [0.5, 0.4])
    with pytest.raises(ShapeMismatch):
        JointPmf.from_weights(v, [0.2, 0.3, 0.5])


def test_overlapping_sets_are_rejected():
    j = random_joint(np.random.default_rng(3))
    with pytest.raises(OverlappingSets):
        cond_mutual_info(j, "A", ("A", "B"))
    with pytest.raises(UnknownVariable):
        cond_mutual_info(j, "A", "Z")


def test_factor_order_is_checked():
    a, b = VarId("A", 2), VarId("B", 2)
    with pytest.raises(DanglingVariable):
        product_join([ConditionalPmf.from_table((b,), (a,), [[0.5, 0.5], [0.5, 0.5]])])
    with pytest.raises(DanglingVariable):
        product_join([ConditionalPmf.from_table((a,), (), [0.5, 0.5]),
                      ConditionalPmf.from_table((a,), (), [0.5, 0.5])])
