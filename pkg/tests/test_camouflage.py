import itertools
from fractions import Fraction

import pytest

from oracles import H
from polyinfo import (
    DistributionError,
    SearchError,
    VariablePartition,
    builtin,
    camouflage_generate,
    camouflage_verify,
    diffuse,
    expand_binary,
    from_outcomes,
    giant_bit,
    isomorphic,
    masked_parity,
    parity_distribution,
    parity_map,
    recover_search,
    reduce,
    residual_entropy,
)
from polyinfo.camouflage import (
    CamouflageSpec,
    DiffusionMap,
    equality_relation,
    identity_map,
    identity_reduction,
    parity_reduction,
    recovery_csv,
    xor_relation,
)
from polyinfo.shannon import idiagram


def test_builtin_camouflage_passes():
    report = camouflage_verify(builtin("camouflage4"))
    assert report.passed and not report.violations
    assert report.as_dict() == {"pass": True, "violations": []}


def test_target_entropies_match_direct_sums():
    d = builtin("camouflage4")
    spec = CamouflageSpec(4)
    for m in range(1, 5):
        for sub in itertools.combinations(range(4), m):
            assert H(d, sub) == pytest.approx(spec.target_entropy(m), abs=1e-12)
    assert spec.target_entropies() == (2, 3, 3, 3)


def test_mutated_table_fails():
    d = builtin("camouflage4")
    rows = list(d.pmf.items())
    (o, p) = rows[0]
    w = (o[0] + 1) % 4
    rows[0] = ((w,) + o[1:], p)
    report = camouflage_verify(from_outcomes(rows, variables=d.variables, alphabets=d.alphabets))
    assert not report
    assert report.violations


def test_non_uniform_fails():
    rows = [((0, 0, 0), Fraction(1, 3)), ((1, 1, 1), Fraction(2, 3))]
    assert "not uniform over its support" in camouflage_verify(from_outcomes(rows)).violations


@pytest.mark.parametrize("n", [3, 4, 5, 6])
@pytest.mark.parametrize("seed", [0, 1, 7])
def test_generated_tables_verify(n, seed):
    d = camouflage_generate(n, seed)
    assert camouflage_verify(d).passed
    assert len(d) == CamouflageSpec(n).outcome_count


def test_generation_is_seeded():
    assert camouflage_generate(5, 3) == camouflage_generate(5, 3)


def test_three_variable_camouflage_is_a_shared_bit():
    assert isomorphic(camouflage_generate(3, 0), giant_bit(3, 2))


@pytest.mark.parametrize("n", [3, 4])
def test_search_method(n):
    d = camouflage_generate(n, 0, method="search")
    assert camouflage_verify(d).passed


def test_search_budget(monkeypatch):
    monkeypatch.setenv("POLYINFO_MAX_NODES", "3")
    with pytest.raises(SearchError) as e:
        camouflage_generate(4, 0, method="search")
    assert e.value.code == "SEARCH_EXHAUSTED"
    monkeypatch.setenv("POLYINFO_MAX_NODES", "zero")
    with pytest.raises(DistributionError):
        camouflage_generate(4, 0, method="search")


def test_generate_errors():
    for n in (2, 7):
        with pytest.raises(DistributionError) as e:
            camouflage_generate(n)
        assert e.value.code == "BAD_PARAMETER"
    with pytest.raises(DistributionError):
        camouflage_generate(4, method="magic")


def test_masked_parity_hides_higher_atoms():
    d = masked_parity(4)
    assert len(d) == 64
    atoms = idiagram(d).atoms
    for mask, v in atoms.items():
        if bin(mask).count("1") >= 3:
            assert abs(v) <= 1e-9
    assert residual_entropy(d) == pytest.approx(0, abs=1e-9)
    assert H(d, tuple(range(4))) == pytest.approx(6)


def test_parity_alone_shows_the_top_atom():
    assert idiagram(parity_distribution(4)).atom(15) == pytest.approx(1)


@pytest.mark.parametrize("name", ["xor3", "dyadic"])
def test_diffusion_round_trip(name):
    src = builtin(name)
    src = src if name == "xor3" else expand_binary(src)
    m = parity_map(src)
    d = diffuse(src, m)
    assert len(d) == len(src) * 2 ** src.n
    assert reduce(d, m) == src
    assert reduce(diffuse(src, identity_map(src)), identity_map(src)) == src


def test_diffusion_map_validation():
    red = parity_reduction(2)
    with pytest.raises(DistributionError) as e:
        DiffusionMap(("A",), ((0, 1),), (("a", "b"), ("c", "d")), (red,))
    assert e.value.code == "MAP_INVALID"
    with pytest.raises(DistributionError):
        DiffusionMap(("A", "B"), ((0, 1), (0, 1)), (("a", "b"), ("b", "c")), (red, red))
    with pytest.raises(DistributionError):
        DiffusionMap(("A",), ((0, 1),), (("a",),), (red,))
    with pytest.raises(DistributionError):
        parity_map(builtin("dyadic"))
    assert identity_reduction((0, 1, 2))((2,)) == 2


def test_recovery_finds_the_planted_partition():
    src = builtin("xor3")
    m = parity_map(src)
    hits = recover_search(diffuse(src, m), 3, xor_relation)
    planted = VariablePartition(m.targets)
    assert planted in [h.partition for h in hits]
    assert recovery_csv(hits).splitlines()[0] == "partition,reductions"


def test_recovery_on_independent_bits_is_empty():
    d = from_outcomes([(o, Fraction(1, 64)) for o in itertools.product((0, 1), repeat=6)])
    assert recover_search(d, 3, xor_relation) == []


def test_recovery_of_the_triadic_copy():
    d = expand_binary(builtin("triadic"))
    parts = [h.partition for h in recover_search(d, 3, equality_relation)]
    assert VariablePartition([("X1",), ("Y1",), ("Z1",)]) in parts


def test_recovery_budget():
    d = from_outcomes([(o, Fraction(1, 512)) for o in itertools.product((0, 1), repeat=9)])
    with pytest.raises(SearchError) as e:
        recover_search(d, 3, xor_relation)
    assert e.value.code == "SEARCH_BUDGET_EXCEEDED"
    with pytest.raises(SearchError):
        recover_search(builtin("xor3"), 2, xor_relation, budget=1)


def test_giant_bit_is_not_camouflage():
    assert not camouflage_verify(giant_bit(4, 2)).passed


def test_masked_parity_keeps_the_parity():
    # overlay symbols are (parity bit, camouflage symbol) pairs
    d = masked_parity(4)
    bits = {tuple(s[0] for s in o) for o in d.pmf}
    assert all(sum(b) % 2 == 0 for b in bits)
    assert len(bits) == 8
