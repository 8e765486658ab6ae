"""Dyadic camouflage, parity masking and dependency diffusion.

Camouflage distributions
------------------------
An ``n``-variable dyadic camouflage distribution is uniform, has every pair
of variables determined by the other ``n - 2`` and otherwise has maximal
subset entropies.  Overlaying it with the ``n``-bit parity distribution hides
the parity relation: only pairwise I-diagram atoms survive.

The construction used here takes the cycle space of the complete graph
``K_n``: the edge subsets in which every vertex has even degree.  It is a
binary vector space of dimension ``(n - 1)(n - 2) / 2``.  Drawing a uniform
element and letting variable ``i`` be the bits of the ``n - 1`` edges at
vertex ``i`` gives a camouflage distribution:

* each variable has even parity over its edges, hence ``2**(n-2)`` symbols;
* the edges at two vertices ``i, j`` other than ``ij`` are read off the
  remaining vertices, and the parity at ``i`` fixes ``ij``;
* an ``m``-subset (``m < n``) sees ``C(n,2) - C(n-m,2)`` edges subject to
  ``m`` independent parity checks, so

      H(m) = C(n, 2) - C(n - m, 2) - m,    m < n,
      H(n) = (n - 1)(n - 2) / 2.

This sequence is the target used by :func:`camouflage_verify`.  It is also
exactly the sequence for which the overlay with parity has no atoms above
order two, which is the property camouflage is meant to provide.  For
``n = 4`` it reads (2, 3, 3, 3); for ``n = 3`` the distribution is a single
shared bit.

Dependency diffusion
--------------------
A :class:`DiffusionMap` sends each source variable to a disjoint block of
new variables together with a surjective :class:`Reduction` from the block
back to the source symbol.  :func:`diffuse` spreads the probability of each
source symbol uniformly over its preimages, and :func:`reduce` undoes it.
"""

import itertools
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from ._combinatorics import partitions_into
from .distribution import (
    JointDistribution,
    VariablePartition,
    builtin,
    default_names,
    from_outcomes,
    giant_bit,
    isomorphic,
    overlay,
    parity_distribution,
)
from .errors import DistributionError, SearchError
from .shannon import entropy_table

__all__ = [
    "CamouflageSpec",
    "CamouflageReport",
    "camouflage_verify",
    "camouflage_generate",
    "masked_parity",
    "Reduction",
    "DiffusionMap",
    "parity_reduction",
    "identity_reduction",
    "parity_map",
    "identity_map",
    "diffuse",
    "reduce",
    "recover_search",
    "RecoveryHit",
    "xor_relation",
    "equality_relation",
    "recovery_csv",
    "max_nodes",
]

MIN_N, MAX_N = 3, 6
MAX_RECOVERY_VARIABLES = 8
DEFAULT_MAX_NODES = 1_000_000
TOL = 1e-9


def max_nodes(default=DEFAULT_MAX_NODES):
    """Search budget from ``POLYINFO_MAX_NODES`` (falls back to ``default``)."""
    raw = os.environ.get("POLYINFO_MAX_NODES")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise DistributionError("BAD_PARAMETER", f"POLYINFO_MAX_NODES={raw!r} is not an integer") from None
    if value < 1:
        raise DistributionError("BAD_PARAMETER", "POLYINFO_MAX_NODES must be positive")
    return value


@dataclass(frozen=True)
class CamouflageSpec:
    """Shape of an ``n``-variable camouflage distribution."""

    n: int

    def __post_init__(self):
        if self.n < MIN_N:
            raise DistributionError("BAD_PARAMETER", f"camouflage needs n >= {MIN_N}")

    @property
    def alphabet_size(self):
        return 2 ** (self.n - 2)

    @property
    def outcome_count(self):
        return 2 ** ((self.n - 2) * (self.n - 1) // 2)

    def target_entropy(self, m):
        if m >= self.n:
            return (self.n - 1) * (self.n - 2) // 2
        return comb(self.n, 2) - comb(self.n - m, 2) - m

    def target_entropies(self):
        return tuple(self.target_entropy(m) for m in range(1, self.n + 1))


@dataclass(frozen=True)
class CamouflageReport:
    passed: bool
    violations: tuple

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {"pass": self.passed, "violations": list(self.violations)}


def camouflage_verify(d):
    """Check the defining properties of a dyadic camouflage distribution.

    The checks are: uniform over the expected number of outcomes, every
    variable with ``2**(n-2)`` observed symbols, every pair determined by
    the complementary variables, equal entropy across all ``m``-subsets and
    those entropies equal to the maximal sequence described in the module
    notes.  Nothing is raised; failures are listed in the report.
    """
    violations = []
    n = d.n
    if n < MIN_N:
        return CamouflageReport(False, (f"needs at least {MIN_N} variables, got {n}",))
    spec = CamouflageSpec(n)
    probs = set(d.pmf.values())
    if len(probs) != 1:
        violations.append("not uniform over its support")
    if len(d) != spec.outcome_count:
        violations.append(f"{len(d)} outcomes, expected {spec.outcome_count}")
    for i, v in enumerate(d.variables):
        seen = {o[i] for o in d.pmf}
        if len(seen) != spec.alphabet_size:
            violations.append(f"{v} takes {len(seen)} values, expected {spec.alphabet_size}")
    h = entropy_table(d)
    full = 2**n - 1
    for i, j in itertools.combinations(range(n), 2):
        pair = 1 << i | 1 << j
        residual = h[full] - h[full ^ pair]
        if residual > TOL:
            violations.append(f"{d.variables[i]}{d.variables[j]} not determined by the rest (H = {residual:.6g})")
    for m in range(1, n + 1):
        values = [h[sum(1 << i for i in c)] for c in itertools.combinations(range(n), m)]
        if max(values) - min(values) > TOL:
            violations.append(f"{m}-variable entropies differ ({min(values):.6g} to {max(values):.6g})")
        target = spec.target_entropy(m)
        if abs(max(values) - target) > TOL:
            violations.append(f"{m}-variable entropy {max(values):.6g} is not the maximal {target}")
    return CamouflageReport(not violations, tuple(violations))


def _cycle_space(n):
    """Basis of the cycle space of K_n: triangles through vertex 0 closing each edge avoiding 0."""
    edges = list(itertools.combinations(range(n), 2))
    pos = {e: k for k, e in enumerate(edges)}
    basis = []
    for i, j in edges:
        if i == 0:
            continue
        vec = [0] * len(edges)
        for e in ((0, i), (0, j), (i, j)):
            vec[pos[e]] = 1
        basis.append(vec)
    return edges, basis


def _construct(n, seed):
    edges, basis = _cycle_space(n)
    rng = random.Random(seed)
    incident = [[k for k, e in enumerate(edges) if i in e] for i in range(n)]
    size = 2 ** (n - 2)
    relabel = []
    for _ in range(n):
        perm = list(range(size))
        if seed is not None:
            rng.shuffle(perm)
        relabel.append(perm)
    rows = []
    for coeffs in itertools.product((0, 1), repeat=len(basis)):
        vec = [0] * len(edges)
        for c, b in zip(coeffs, basis):
            if c:
                vec = [x ^ y for x, y in zip(vec, b)]
        outcome = []
        for i in range(n):
            bits = [vec[k] for k in incident[i]][:-1]  # last bit is fixed by parity
            code = int("".join(map(str, bits)), 2) if bits else 0
            outcome.append(relabel[i][code])
        rows.append(tuple(outcome))
    return rows


def _search(n, seed, budget):
    """Backtracking over outcome tables with the first column written in order."""
    spec = CamouflageSpec(n)
    rows_needed, size = spec.outcome_count, spec.alphabet_size
    per_symbol = rows_needed // size
    first = [s for s in range(size) for _ in range(per_symbol)]
    rng = random.Random(seed)
    candidates = list(itertools.product(range(size), repeat=n - 1))
    rng.shuffle(candidates)
    projections = list(itertools.combinations(range(n), n - 2))
    seen = [set() for _ in projections]
    counts = [[0] * size for _ in range(n)]
    table = []
    nodes = 0

    def place(row):
        for k, proj in enumerate(projections):
            seen[k].add(tuple(row[i] for i in proj))
        for i, s in enumerate(row):
            counts[i][s] += 1

    def remove(row):
        for k, proj in enumerate(projections):
            seen[k].discard(tuple(row[i] for i in proj))
        for i, s in enumerate(row):
            counts[i][s] -= 1

    def extend(r):
        nonlocal nodes
        if r == rows_needed:
            d = _uniform_rows(table, n)
            return d if camouflage_verify(d) else None
        for rest in candidates:
            nodes += 1
            if nodes > budget:
                raise SearchError("SEARCH_EXHAUSTED", f"no camouflage table within {budget} nodes")
            row = (first[r],) + rest
            if table and row < table[-1]:
                continue
            if any(counts[i][s] >= per_symbol for i, s in enumerate(row)):
                continue
            # every (n-2)-projection must stay injective
            if any(tuple(row[i] for i in proj) in seen[k] for k, proj in enumerate(projections)):
                continue
            table.append(row)
            place(row)
            found = extend(r + 1)
            if found is not None:
                return found
            remove(row)
            table.pop()
        return None

    found = extend(0)
    if found is None:
        raise SearchError("SEARCH_EXHAUSTED", f"search space exhausted after {nodes} nodes")
    return found


def _uniform_rows(rows, n):
    p = Fraction(1, len(rows))
    return from_outcomes([(r, p) for r in rows], variables=default_names(n))


def camouflage_generate(n, seed=0, method="construction"):
    """A dyadic camouflage distribution on ``n`` variables.

    Parameters
    ----------
    n : int
        Between 3 and 6.
    seed : int
        Selects the symbol relabeling (``construction``) or candidate order
        (``search``).  Output is a pure function of ``(n, seed, method)``.
    method : {"construction", "search"}
        ``construction`` samples the cycle space of K_n and is fast for every
        admissible ``n``.  ``search`` backtracks over outcome tables with the
        first variable written in increasing order; it is practical for
        ``n <= 4`` and obeys the ``POLYINFO_MAX_NODES`` budget.

    Raises
    ------
    DistributionError
        ``BAD_PARAMETER`` outside ``3 <= n <= 6``.
    SearchError
        ``SEARCH_EXHAUSTED`` when the search budget runs out, or if a
        generated table fails verification.
    """
    if not isinstance(n, int) or not MIN_N <= n <= MAX_N:
        raise DistributionError("BAD_PARAMETER", f"camouflage generation supports {MIN_N} <= n <= {MAX_N}, got {n}")
    if method == "construction":
        d = _uniform_rows(_construct(n, seed), n)
    elif method == "search":
        d = _search(n, seed, max_nodes())
    else:
        raise DistributionError("BAD_PARAMETER", f"unknown method {method!r}")
    report = camouflage_verify(d)
    if not report:
        raise SearchError("SEARCH_EXHAUSTED", "generated table failed verification: " + "; ".join(report.violations))
    return d


def masked_parity(n=4, seed=0):
    """Parity on ``n`` bits overlaid with a camouflage distribution.

    ``n = 4`` uses the built-in camouflage table; other sizes use
    :func:`camouflage_generate`.
    """
    camo = builtin("camouflage4") if n == 4 else camouflage_generate(n, seed)
    return overlay(parity_distribution(n), camo)


@dataclass(frozen=True)
class Reduction:
    """Surjective map from a block of target symbols to one source symbol."""

    name: str
    alphabets: tuple
    fn: object

    @property
    def arity(self):
        return len(self.alphabets)

    def __call__(self, block):
        return self.fn(tuple(block))

    def preimages(self):
        """Mapping source symbol -> list of target tuples, in lexicographic order."""
        out = {}
        for t in itertools.product(*self.alphabets):
            out.setdefault(self.fn(t), []).append(t)
        return out


def _parity(t):
    return sum(t) % 2


def _first(t):
    return t[0]


def parity_reduction(arity):
    if arity < 1:
        raise DistributionError("MAP_INVALID", "parity reduction needs arity >= 1")
    return Reduction(f"parity{arity}", ((0, 1),) * arity, _parity)


def identity_reduction(alphabet):
    return Reduction("identity", (tuple(alphabet),), _first)


@dataclass(frozen=True)
class DiffusionMap:
    """Source variable -> (target block, reduction), with the source alphabets."""

    sources: tuple
    source_alphabets: tuple
    targets: tuple
    reductions: tuple

    def __post_init__(self):
        if not len(self.sources) == len(self.source_alphabets) == len(self.targets) == len(self.reductions):
            raise DistributionError("MAP_INVALID", "one target block and reduction per source variable")
        names = [t for block in self.targets for t in block]
        if len(set(names)) != len(names):
            raise DistributionError("MAP_INVALID", "target blocks must be disjoint")
        for src, alpha, block, red in zip(self.sources, self.source_alphabets, self.targets, self.reductions):
            if len(block) != red.arity:
                raise DistributionError("MAP_INVALID", f"block for {src} has {len(block)} variables, reduction expects {red.arity}")
            if not set(alpha) <= set(red.preimages()):
                raise DistributionError("MAP_INVALID", f"reduction for {src} is not onto its alphabet")

    @property
    def target_variables(self):
        return tuple(t for block in self.targets for t in block)


def parity_map(d, arity=2):
    """Each binary variable ``V`` becomes ``V0..V{arity-1}`` with ``V = xor`` of the block."""
    for v, a in zip(d.variables, d.alphabets):
        if not set(a) <= {0, 1}:
            raise DistributionError("MAP_INVALID", f"parity diffusion needs binary variables; {v} has {a}")
    return DiffusionMap(
        tuple(d.variables),
        tuple((0, 1) for _ in d.variables),
        tuple(tuple(f"{v}{j}" for j in range(arity)) for v in d.variables),
        tuple(parity_reduction(arity) for _ in d.variables),
    )


def identity_map(d):
    return DiffusionMap(
        tuple(d.variables),
        tuple(d.alphabets),
        tuple((v,) for v in d.variables),
        tuple(identity_reduction(a) for a in d.alphabets),
    )


def _check_map(d, m):
    if tuple(m.sources) != tuple(d.variables):
        raise DistributionError("MAP_INVALID", f"map sources {m.sources} do not match {d.variables}")
    for v, a, alpha in zip(d.variables, d.alphabets, m.source_alphabets):
        if not set(a) <= set(alpha):
            raise DistributionError("MAP_INVALID", f"alphabet of {v} is not covered by the map")


def diffuse(d, m):
    """Spread ``d`` over the target variables of ``m``."""
    _check_map(d, m)
    pre = [red.preimages() for red in m.reductions]
    pmf = {}
    for outcome, p in d.pmf.items():
        choices = [pre[i][s] for i, s in enumerate(outcome)]
        weight = p
        for c in choices:
            weight /= len(c)
        for blocks in itertools.product(*choices):
            pmf[tuple(x for b in blocks for x in b)] = weight
    alphabets = [a for red in m.reductions for a in red.alphabets]
    return JointDistribution(m.target_variables, alphabets, pmf)


def reduce(d, m):
    """Apply the reductions of ``m`` to ``d`` and merge each block into its source variable."""
    idx = [tuple(d.index(t) for t in block) for block in m.targets]
    pmf = {}
    for outcome, p in d.pmf.items():
        key = tuple(red(tuple(outcome[i] for i in block)) for red, block in zip(m.reductions, idx))
        pmf[key] = pmf.get(key, Fraction(0)) + p
    return JointDistribution(m.sources, m.source_alphabets, pmf)


def xor_relation(d):
    """True when ``d`` is (up to relabeling) the uniform even-parity distribution."""
    return d.n >= 2 and isomorphic(d, parity_distribution(d.n))


def equality_relation(d):
    """True when all variables of ``d`` are copies of one fair bit."""
    return d.n >= 2 and isomorphic(d, giant_bit(d.n, 2))


@dataclass(frozen=True)
class RecoveryHit:
    partition: VariablePartition
    reductions: tuple


def _block_reduction(d, block):
    if len(block) == 1:
        return identity_reduction(d.alphabets[d.index(block[0])])
    if any(not set(d.alphabets[d.index(v)]) <= {0, 1} for v in block):
        return None
    return parity_reduction(len(block))


def recover_search(d, source_arity, relation_test, budget=None):
    """All ways to see a ``source_arity``-variable relation through parity reductions.

    Every subset of the variables is split into ``source_arity`` unordered
    blocks; each block is reduced by xor (single variables are kept as
    they are) and the reduced distribution is handed to ``relation_test``.
    The enumeration is exhaustive, so every planted relation is found.

    Raises
    ------
    SearchError
        ``SEARCH_BUDGET_EXCEEDED`` for more than 8 variables or when the
        number of candidates exceeds ``budget`` (default
        ``POLYINFO_MAX_NODES``).
    """
    if d.n > MAX_RECOVERY_VARIABLES:
        raise SearchError("SEARCH_BUDGET_EXCEEDED", f"recovery search is limited to {MAX_RECOVERY_VARIABLES} variables")
    if source_arity < 1:
        raise DistributionError("BAD_PARAMETER", "source_arity must be positive")
    budget = max_nodes() if budget is None else budget
    hits, nodes = [], 0
    for size in range(source_arity, d.n + 1):
        for subset in itertools.combinations(d.variables, size):
            for blocks in partitions_into(list(subset), source_arity):
                nodes += 1
                if nodes > budget:
                    raise SearchError("SEARCH_BUDGET_EXCEEDED", f"more than {budget} candidate partitions")
                blocks = [tuple(b) for b in blocks]
                reds = [_block_reduction(d, b) for b in blocks]
                if any(r is None for r in reds):
                    continue
                sub = d.marginal([v for b in blocks for v in b])
                names = ["".join(b) for b in blocks]
                m = DiffusionMap(
                    tuple(names),
                    tuple(tuple(sorted(r.preimages())) for r in reds),
                    tuple(blocks),
                    tuple(reds),
                )
                if relation_test(reduce(sub, m)):
                    hits.append(RecoveryHit(VariablePartition(blocks), tuple(r.name for r in reds)))
    return hits


def recovery_csv(hits):
    lines = ["partition,reductions"]
    for h in hits:
        part = " ".join("{" + "".join(b) + "}" for b in h.partition)
        lines.append(f"{part},{' '.join(h.reductions)}")
    return "\n".join(lines) + "\n"
