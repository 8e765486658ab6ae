import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import H
from polyinfo import (
    builtin,
    caekl,
    coinformation,
    dual_total_correlation,
    dumps,
    entropy,
    from_outcomes,
    gacs_korner,
    idiagram,
    loads,
    mss_common_information,
    pid_imin,
    renyi_entropy,
    residual_entropy,
    total_correlation,
)
from polyinfo.profiles import complexity_profile

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def distributions(draw, max_vars=3, max_card=3):
    n = draw(st.integers(2, max_vars))
    sizes = draw(st.lists(st.integers(2, max_card), min_size=n, max_size=n))
    cells = list(itertools.product(*[range(s) for s in sizes]))
    w = draw(st.lists(st.integers(0, 9), min_size=len(cells), max_size=len(cells)))
    if sum(w) == 0:
        w[0] = 1
    total = sum(w)
    rows = [(c, Fraction(x, total)) for c, x in zip(cells, w) if x]
    return from_outcomes(rows, alphabets=[range(s) for s in sizes])


@SETTINGS
@given(distributions())
def test_atoms_reconstruct_every_subset_entropy(d):
    atoms = idiagram(d).atoms
    for r in range(1, d.n + 1):
        for sub in itertools.combinations(range(d.n), r):
            mask = sum(1 << i for i in sub)
            union = sum(v for m, v in atoms.items() if m & mask)
            assert union == pytest.approx(H(d, sub), abs=1e-9)


@SETTINGS
@given(distributions())
def test_shannon_bounds(d):
    h = entropy(d)
    assert -1e-12 <= residual_entropy(d) <= h + 1e-12
    assert -1e-12 <= dual_total_correlation(d) <= h + 1e-12
    assert total_correlation(d) >= -1e-12
    assert renyi_entropy(d, 2) <= h + 1e-12
    assert gacs_korner(d) <= caekl(d) + 1e-9
    assert gacs_korner(d) <= mss_common_information(d) + 1e-9
    assert complexity_profile(d).values[0] == pytest.approx(h, abs=1e-9)


@SETTINGS
@given(distributions(), st.randoms(use_true_random=False))
def test_variable_order_does_not_matter(d, rnd):
    perm = list(range(d.n))
    rnd.shuffle(perm)
    e = from_outcomes([(tuple(o[i] for i in perm), p) for o, p in d.pmf.items()], variables=[d.variables[i] for i in perm])
    for fn in (entropy, coinformation, total_correlation, dual_total_correlation, caekl, gacs_korner):
        assert fn(e) == pytest.approx(fn(d), abs=1e-9)


@SETTINGS
@given(distributions(max_vars=3))
def test_imin_components_nonnegative(d):
    if d.n != 3:
        return
    r = pid_imin(d, [["X"], ["Y"]], ["Z"])
    assert min(r.as_tuple()) >= -1e-9


@SETTINGS
@given(distributions())
def test_file_round_trip(d):
    assert loads(dumps(d)) == d


def test_builtins_are_normalized():
    for name in ("dyadic", "triadic", "xor3", "camouflage4"):
        assert sum(builtin(name).pmf.values()) == 1
