import itertools

import numpy as np
import pytest

from oracles import random_distribution, slsqp_maxent, vertex_lp_max
from polyinfo import (
    DistributionError,
    NotConvergedError,
    builtin,
    complexity_profile,
    connected_informations,
    from_outcomes,
    giant_bit,
    marginal_utility,
    maxent_projection,
    parity_distribution,
    total_correlation,
)
from polyinfo.profiles import Profile, mui_constraints, utility
from polyinfo.shannon import idiagram

TWO_BITS = from_outcomes([((a, b), "1/4") for a in (0, 1) for b in (0, 1)])


def test_complexity_profiles():
    for name in ("dyadic", "triadic"):
        assert complexity_profile(builtin(name)).values == pytest.approx([3, 3, 0], abs=1e-12)
    assert complexity_profile(parity_distribution(3)).values == pytest.approx([2, 2, -1])
    assert complexity_profile(giant_bit(3, 2)).values == pytest.approx([1, 1, 1])


def test_connected_informations_of_the_pair():
    assert connected_informations(builtin("dyadic")).values == pytest.approx([3, 0], abs=1e-6)
    assert connected_informations(builtin("triadic")).values == pytest.approx([2, 1], abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_maxent_against_slsqp(seed):
    rng = np.random.default_rng(600 + seed)
    d = random_distribution(rng, (2, 2, 3), zero_fraction=0.2)
    for k in (1, 2):
        got = maxent_projection(d, k)
        assert got.residual < 1e-9
        assert got.entropy == pytest.approx(slsqp_maxent(d.to_array(), k), abs=1e-6)


FROZEN_MAXENT = [
    (from_outcomes([((a, b, a & b), "1/4") for a in (0, 1) for b in (0, 1)]), 2.811278124459133, 2.0),
    (from_outcomes([((a, b, 2 * a + b), "1/4") for a in (0, 1) for b in (0, 1)]), 4.0, 2.0),
]


@pytest.mark.parametrize("d,h1,h2", FROZEN_MAXENT, ids=["and", "copy"])
def test_maxent_frozen(d, h1, h2):
    assert maxent_projection(d, 1).entropy == pytest.approx(h1, abs=1e-9)
    assert maxent_projection(d, 2).entropy == pytest.approx(h2, abs=1e-9)


def test_maxent_entropies_are_ordered():
    d = random_distribution(np.random.default_rng(3), (3, 3, 2), zero_fraction=0.3)
    res = [maxent_projection(d, k) for k in (1, 2, 3)]
    assert res[0].entropy >= res[1].entropy - 1e-12 >= res[2].entropy - 2e-12
    assert res[1].history[-1] == pytest.approx(res[1].entropy, abs=1e-9)
    assert res[1].sweeps == len(res[1].history)


def test_maxent_distribution_roundtrip():
    res = maxent_projection(builtin("dyadic"), 2)
    e = res.distribution()
    assert len(e) == 8
    assert res.k == 2 and res.entropy == pytest.approx(3)


@pytest.mark.parametrize("seed", range(5))
def test_connected_sum_is_total_correlation(seed):
    rng = np.random.default_rng(700 + seed)
    d = random_distribution(rng, (2, 3, 2), zero_fraction=0.4)
    assert sum(connected_informations(d).values) == pytest.approx(total_correlation(d), abs=1e-6)


def test_maxent_errors():
    with pytest.raises(DistributionError) as e:
        maxent_projection(builtin("xor3"), 0)
    assert e.value.code == "BAD_PARAMETER"
    with pytest.raises(NotConvergedError) as e:
        maxent_projection(random_distribution(np.random.default_rng(0), (3, 3, 3)), 2, max_sweeps=1, tol=0.0)
    assert e.value.code == "NOT_CONVERGED"


@pytest.mark.parametrize(
    "d,points",
    [
        (builtin("dyadic"), [(0.0, 3.0), (1.0, 1.5), (3.0, 0.0)]),
        (builtin("triadic"), [(0.0, 3.0), (1.0, 1.5), (3.0, 0.0)]),
        (giant_bit(3, 2), [(0.0, 3.0), (1.0, 0.0)]),
        (TWO_BITS, [(0.0, 1.0), (2.0, 0.0)]),
        (parity_distribution(3), [(0.0, 1.5), (2.0, 0.0)]),
    ],
    ids=["dyadic", "triadic", "giant", "two_bits", "xor3"],
)
def test_mui_profiles(d, points):
    prof = marginal_utility(d)
    assert len(prof.points) == len(points)
    for (s, v), (es, ev) in zip(prof.points, points):
        assert s == pytest.approx(es, abs=1e-6) and v == pytest.approx(ev, abs=1e-6)


def test_mui_area_is_sum_of_marginal_entropies():
    for d, area in ((builtin("dyadic"), 6), (giant_bit(3, 2), 3), (TWO_BITS, 2)):
        assert marginal_utility(d).area() == pytest.approx(area, abs=1e-6)


def _hand_constraints_n2(x1, x2, x12):
    # columns u1, u2, u12
    A = np.array(
        [
            [1, 0, 0],  # u1 <= x1
            [0, 1, 0],  # u2 <= x2
            [0, 0, 1],  # u12 <= x12
            [-1, 0, -1],  # I(D:X1) >= 0
            [-1, 0, 0],  # I(D:X1|X2) >= 0
            [0, -1, -1],
            [0, -1, 0],
            [1, 1, 1],  # H(D) <= y
        ],
        dtype=float,
    )
    return A, np.array([x1, x2, x12, 0, 0, 0, 0])


@pytest.mark.parametrize("seed", range(4))
def test_utility_against_hand_written_lp_n2(seed):
    d = random_distribution(np.random.default_rng(800 + seed), (3, 3), names="XY")
    a = idiagram(d).atoms
    A, b = _hand_constraints_n2(a[1], a[2], a[3])
    c = np.array([1.0, 1.0, 2.0])
    for y in (0.1, 0.5, 1.0, 2.0, 4.0):
        assert utility(d, y) == pytest.approx(vertex_lp_max(c, A, np.append(b, y)), abs=1e-8)


def test_utility_against_vertex_enumeration_n3():
    d = random_distribution(np.random.default_rng(9), (2, 2, 2))
    masks, A, b = mui_constraints(idiagram(d).atoms, 3)
    c = np.array([bin(m).count("1") for m in masks], dtype=float)
    A_full = np.vstack([A, np.ones(len(masks))])
    for y in (0.3, 1.2, 3.0):
        assert utility(d, y) == pytest.approx(vertex_lp_max(c, A_full, np.append(b, y)), abs=1e-8)


def test_profile_helpers():
    p = Profile("mui", ((0.0, 2.0), (1.0, 1.0), (3.0, 0.0)))
    assert p.area() == pytest.approx(4)
    assert p.at(0.5) == 2.0 and p.at(2) == 1.0 and p.at(5) == 0.0
    assert p[1.0] == 1.0
    assert p.to_csv().splitlines()[0] == "scale,value"
    assert complexity_profile(builtin("dyadic")).to_csv().splitlines()[1] == "1,3.000000"
    with pytest.raises(ValueError):
        Profile("mui", ((1.0, 0.0), (0.0, 1.0)))


def test_small_cases():
    bits = from_outcomes([(o, "1/8") for o in itertools.product((0, 1), repeat=3)])
    assert complexity_profile(bits).values == pytest.approx([3, 0, 0])
    assert connected_informations(bits).values == pytest.approx([0, 0], abs=1e-9)
    assert maxent_projection(builtin("dyadic"), 1).entropy == pytest.approx(6, abs=1e-9)
    assert maxent_projection(builtin("triadic"), 2).entropy == pytest.approx(4, abs=1e-9)
    full = maxent_projection(builtin("triadic"), 3)
    assert full.distribution() == builtin("triadic")
