import math

import numpy as np
import pytest

from oracles import random_distribution
from polyinfo import (
    DistributionError,
    builtin,
    disequilibrium,
    entropy,
    extropy,
    jensen_shannon_divergence,
    lmrp_complexity,
    perplexity,
    renyi_entropy,
    tsallis_entropy,
)


@pytest.mark.parametrize("name", ["dyadic", "triadic"])
def test_pair_scalars(name):
    d = builtin(name)
    assert renyi_entropy(d, 2) == pytest.approx(3, abs=1e-12)
    assert tsallis_entropy(d, 2) == pytest.approx(0.875, abs=1e-12)
    assert perplexity(d) == pytest.approx(8, abs=1e-12)
    assert extropy(d) == pytest.approx(1.349, abs=5e-4)
    assert disequilibrium(d) == pytest.approx(0.761, abs=5e-4)
    assert lmrp_complexity(d) == pytest.approx(0.381, abs=5e-4)


def test_extropy_of_uniform_eight():
    # -sum (1 - p) log2 (1 - p) with p = 1/8, eight times
    expected = -8 * (7 / 8) * math.log2(7 / 8)
    assert extropy(builtin("dyadic")) == pytest.approx(expected, abs=1e-12)


def test_disequilibrium_formula_for_the_pair():
    # uniform over 8 of the 64 product outcomes against the uniform reference
    p = np.zeros(64)
    p[:8] = 1 / 8
    u = np.full(64, 1 / 64)
    m = (p + u) / 2

    def kl(a, b):
        a_ = a[a > 0]
        return float(np.sum(a_ * np.log2(a_ / b[a > 0])))

    jsd = 0.5 * kl(p, m) + 0.5 * kl(u, m)
    # normalizing constant: the largest JSD against uniform, reached by a point mass
    pm = np.zeros(64)
    pm[0] = 1
    jsd_max = 0.5 * kl(pm, (pm + u) / 2) + 0.5 * kl(u, (pm + u) / 2)
    assert disequilibrium(builtin("dyadic")) == pytest.approx(jsd / jsd_max, abs=1e-12)
    assert lmrp_complexity(builtin("dyadic")) == pytest.approx(jsd / jsd_max * 3 / 6, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_renyi_limits_and_formula(seed):
    rng = np.random.default_rng(seed)
    d = random_distribution(rng, (3, 2))
    p = d.probabilities()
    assert renyi_entropy(d, 1) == pytest.approx(entropy(d), abs=1e-12)
    assert renyi_entropy(d, 0) == pytest.approx(math.log2(len(p)))
    assert renyi_entropy(d, math.inf) == pytest.approx(-math.log2(p.max()))
    assert renyi_entropy(d, 3) == pytest.approx(math.log2(np.sum(p**3)) / (1 - 3))
    assert renyi_entropy(d, 1 + 1e-7) == pytest.approx(entropy(d), abs=1e-5)
    assert tsallis_entropy(d, 2) == pytest.approx(1 - np.sum(p**2))
    assert tsallis_entropy(d, 1) == pytest.approx(entropy(d))


def test_negative_order_rejected():
    with pytest.raises(DistributionError) as e:
        renyi_entropy(builtin("xor3"), -1)
    assert e.value.code == "NEGATIVE_ORDER"


def test_jsd_bounds():
    a, b = [1.0, 0.0], [0.0, 1.0]
    assert jensen_shannon_divergence(a, b) == pytest.approx(1)
    assert jensen_shannon_divergence(a, a) == pytest.approx(0)
