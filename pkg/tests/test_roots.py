from fractions import Fraction
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hoselberg import (DimensionMismatchError, InvalidRankError, RootSystem, WeylElement, check_weight, delta,
                       pairing, rho, row_root, weighted_half_sum, weyl_act, weyl_group, weyl_length)
from hoselberg.roots import root_pairings

ranks = st.integers(min_value=1, max_value=5)


@pytest.mark.parametrize("n", range(1, 9))
def test_positive_root_count_and_shape(n):
    R = RootSystem(n)
    assert len(R.positive_roots) == R.num_positive == n * (n + 1) // 2
    for r in R.positive_roots:
        assert sum(r) == 0 and sorted(r) == [-1] + [0] * (n - 1) + [1]
        assert pairing(r, r) == 2


@pytest.mark.parametrize("bad", [0, 9, -1, 2.0, "3"])
def test_rank_outside_range_rejected(bad):
    with pytest.raises(InvalidRankError):
        RootSystem(bad)


@pytest.mark.parametrize("n", range(1, 7))
def test_fundamental_weights_are_dual_to_simple_roots(n):
    R = RootSystem(n)
    for i, lam in enumerate(R.fundamental_weights):
        assert sum(lam) == 0
        for j, a in enumerate(R.simple_roots):
            assert pairing(lam, a) == Fraction(int(i == j))


@pytest.mark.parametrize("n", range(1, 7))
def test_half_sum_matches_root_sum(n):
    R = RootSystem(n)
    total = [sum(r[i] for r in R.positive_roots) for i in range(n + 1)]
    assert weighted_half_sum(R) == tuple(Fraction(t, 2) for t in total)
    np.testing.assert_allclose(delta(R), np.array(total) / 2)
    np.testing.assert_allclose(rho(R, 0.3 - 0.2j), (0.3 - 0.2j) * delta(R))
    # every simple root pairs to 1 with delta
    assert all(pairing(weighted_half_sum(R), a) == 1 for a in R.simple_roots)


def test_simple_coordinates_and_height():
    R = RootSystem(4)
    for i, j in R.positive_root_pairs:
        coords = R.simple_coordinates(i, j)
        rebuilt = np.sum([c * np.array(a) for c, a in zip(coords, R.simple_roots)], axis=0)
        np.testing.assert_array_equal(rebuilt, R.positive_roots[R.positive_root_pairs.index((i, j))])
        assert sum(coords) == R.root_height(i, j)


@pytest.mark.parametrize("n", range(1, 5))
def test_weyl_group_order_and_lengths(n):
    W = weyl_group(n)
    assert len(W) == len({w.perm for w in W}) == np.prod(range(1, n + 2))
    assert weyl_length(WeylElement.identity(n)) == 0
    assert weyl_length(WeylElement.longest(n)) == n * (n + 1) // 2
    assert max(w.length() for w in W) == n * (n + 1) // 2
    for i in range(1, n + 1):
        assert WeylElement.simple_reflection(i, n).length() == 1


@given(n=ranks, data=st.data())
def test_weyl_composition_and_inverse(n, data):
    perms = st.permutations(list(range(n + 1))).map(lambda p: WeylElement(tuple(p)))
    w1, w2 = data.draw(perms), data.draw(perms)
    lam = np.arange(n + 1, dtype=float) ** 2
    np.testing.assert_array_equal(weyl_act(w1 * w2, lam), weyl_act(w1, weyl_act(w2, lam)))
    assert (w1 * w1.inverse()).perm == WeylElement.identity(n).perm
    assert w1.inverse().length() == w1.length()
    # length is subadditive
    assert (w1 * w2).length() <= w1.length() + w2.length()


@given(n=ranks, data=st.data())
def test_pairing_is_weyl_invariant(n, data):
    w = WeylElement(tuple(data.draw(st.permutations(list(range(n + 1))))))
    vec = st.lists(st.floats(-10, 10), min_size=n + 1, max_size=n + 1).map(np.array)
    u, v = data.draw(vec), data.draw(vec)
    assert pairing(weyl_act(w, u), weyl_act(w, v)) == pytest.approx(pairing(u, v), abs=1e-9)


def test_weyl_act_moves_coordinate_i_to_position_w_i():
    w = WeylElement.from_one_based([2, 3, 1])
    assert weyl_act(w, ("a", "b", "c")) == ("c", "a", "b")
    assert str(w) == "231"
    with pytest.raises(DimensionMismatchError):
        weyl_act(w, (1.0, 2.0))
    with pytest.raises(ValueError):
        WeylElement((0, 0, 1))


def test_length_counts_roots_sent_negative():
    for n in (2, 3):
        R = RootSystem(n)
        for w in weyl_group(n):
            flipped = 0
            for r in R.positive_roots:
                image = weyl_act(w, r)
                flipped += image[next(q for q in range(n + 1) if image[q] != 0)] < 0
            assert flipped == w.length()


def test_check_weight_and_pairings():
    R = RootSystem(2)
    lam = check_weight([1.0, 0.5, -1.5], R)
    np.testing.assert_allclose(root_pairings(lam, R), [0.5, 2.5, 2.0])
    with pytest.raises(DimensionMismatchError):
        check_weight([1.0, -1.0], R)
    with pytest.raises(ValueError, match="sum to zero"):
        check_weight([1.0, 0.0, 0.0], R)
    with pytest.raises(DimensionMismatchError):
        pairing([1, 2], [1, 2, 3])


def test_row_root_reverses_rows():
    assert [row_root(j, 3) for j in (1, 2, 3)] == [3, 2, 1]
    for bad in (0, 4):
        with pytest.raises(ValueError):
            row_root(bad, 3)
