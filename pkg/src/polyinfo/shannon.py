"""Shannon entropies, multivariate mutual informations and I-diagram atoms.

All values are in bits.  Every quantity here is a signed sum of subset
entropies, so each public function first builds the table of all ``2**n``
subset entropies (cached per distribution) and then combines entries of it.
Subsets are encoded as bitmasks: bit ``i`` stands for ``d.variables[i]``.
"""

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from ._combinatorics import set_partitions
from ._fmt import fmt
from .errors import DistributionError

MAX_VARIABLES = 20
MAX_CAEKL_GROUPS = 10

__all__ = [
    "InfoDiagram",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "comutual_information",
    "coinformation",
    "idiagram",
    "total_correlation",
    "dual_total_correlation",
    "caekl",
    "interaction_information",
    "residual_entropy",
    "tse_complexity",
    "entropy_table",
    "shannon_entropy",
]


def shannon_entropy(probs):
    """Entropy in bits of a probability vector; zeros are ignored."""
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def _codes(d):
    lookup = [{s: i for i, s in enumerate(a)} for a in d.alphabets]
    return np.array([[lk[s] for lk, s in zip(lookup, o)] for o in d.pmf], dtype=np.int64).reshape(len(d), d.n)


@lru_cache(maxsize=256)
def entropy_table(d):
    """Array ``h`` of length ``2**n`` with ``h[mask]`` = H(variables in mask).

    ``h[0]`` is 0 by convention.
    """
    if d.n > MAX_VARIABLES:
        raise DistributionError("TOO_MANY_VARIABLES", f"{d.n} variables exceeds the limit of {MAX_VARIABLES}")
    codes = _codes(d)
    probs = d.probabilities()
    sizes = [len(a) for a in d.alphabets]
    table = np.zeros(2**d.n)
    for mask in range(1, 2**d.n):
        cols = [i for i in range(d.n) if mask >> i & 1]
        key = np.zeros(len(d), dtype=object if np.prod([sizes[i] for i in cols], dtype=float) > 2**62 else np.int64)
        for i in cols:
            key = key * sizes[i] + codes[:, i]
        _, inverse = np.unique(key, return_inverse=True)
        table[mask] = shannon_entropy(np.bincount(inverse.ravel(), weights=probs))
    table.setflags(write=False)
    return table


def _mask(d, names):
    m = 0
    for i in d.indices(names):
        m |= 1 << i
    return m


def _group_masks(d, groups, allow_single=False):
    """Resolve groups to disjoint nonempty bitmasks (default: one per variable)."""
    if groups is None:
        return [1 << i for i in range(d.n)]
    masks = []
    for g in groups:
        m = _mask(d, g)
        if m == 0:
            raise DistributionError("PARTITION_INVALID", "empty group")
        masks.append(m)
    union = 0
    for m in masks:
        if union & m:
            raise DistributionError("PARTITION_INVALID", f"groups {groups} overlap")
        union |= m
    if len(masks) < (1 if allow_single else 2):
        raise DistributionError("PARTITION_INVALID", "at least two groups are required")
    return masks


def entropy(d, subset=None):
    """Joint entropy H(subset); all variables when ``subset`` is None."""
    if subset is None:
        return float(entropy_table(d)[-1])
    m = _mask(d, subset)
    if m == 0:
        raise DistributionError("EMPTY_SET", "entropy of an empty variable set requested")
    return float(entropy_table(d)[m])


def conditional_entropy(d, target, given=()):
    """H(target | given)."""
    t, g = _mask(d, target), _mask(d, given)
    if t == 0:
        raise DistributionError("EMPTY_SET", "empty target")
    if t & g:
        raise DistributionError("OVERLAPPING_SETS", "target and conditioning sets overlap")
    h = entropy_table(d)
    return float(h[t | g] - h[g])


def _coinfo_masks(h, masks, given):
    total = 0.0
    for r in range(len(masks) + 1):
        for sub in combinations(masks, r):
            u = given
            for m in sub:
                u |= m
            total -= (-1) ** r * h[u]
    return total


def comutual_information(d, groups, given=()):
    """Co-information I(G1 : G2 : ... | given), inclusion-exclusion convention.

    For two groups this is the (conditional) mutual information; for three
    it equals I(G1:G2|given) - I(G1:G2|G3,given).
    """
    masks = _group_masks(d, groups)
    g = _mask(d, given)
    if any(m & g for m in masks):
        raise DistributionError("OVERLAPPING_SETS", "groups overlap the conditioning set")
    return float(_coinfo_masks(entropy_table(d), masks, g))


def mutual_information(d, a, b, given=()):
    """I(a : b | given)."""
    return comutual_information(d, [a, b], given)


def coinformation(d, groups=None):
    """Co-information of all groups (default: every variable)."""
    return float(_coinfo_masks(entropy_table(d), _group_masks(d, groups), 0))


@dataclass(frozen=True)
class InfoDiagram:
    """Signed I-measure over the nonempty subsets of ``variables``.

    ``atoms[mask]`` is the value (bits) of the region inside every variable of
    ``mask`` and outside every other variable.
    """

    variables: tuple
    atoms: dict

    @property
    def n(self):
        return len(self.variables)

    def masks(self):
        """Deterministic order: by subset size, then lexicographically by index."""
        return sorted(self.atoms, key=lambda m: (bin(m).count("1"), [i for i in range(self.n) if m >> i & 1]))

    def names(self, mask):
        return tuple(v for i, v in enumerate(self.variables) if mask >> i & 1)

    def atom(self, subset):
        """Atom value for a subset given as a mask or as variable names."""
        if isinstance(subset, (int, np.integer)):
            return self.atoms[int(subset)]
        if isinstance(subset, str):
            subset = [subset]
        m = 0
        for v in subset:
            m |= 1 << self.variables.index(v)
        return self.atoms[m]

    def values(self):
        return [self.atoms[m] for m in self.masks()]

    def by_order(self, k):
        return [self.atoms[m] for m in self.masks() if bin(m).count("1") == k]

    def total(self):
        return float(sum(self.atoms.values()))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mask", "atom", "value"])
        sep = "" if all(len(v) == 1 for v in self.variables) else ";"
        for m in self.masks():
            w.writerow([m, sep.join(self.names(m)), fmt(self.atoms[m])])
        return buf.getvalue()


def idiagram(d):
    """All ``2**n - 1`` I-diagram atoms of ``d``.

    The atom of subset S is the co-information of the variables of S
    conditioned on the complement, computed from subset entropies with the
    Moebius-style sum  ``-sum_{T subset S} (-1)^|T| H(T u complement)``.
    """
    h = entropy_table(d)
    full = 2**d.n - 1
    atoms = {}
    for s in range(1, full + 1):
        comp = full ^ s
        total = 0.0
        t = s
        while True:
            total -= (-1) ** bin(t).count("1") * h[t | comp]
            if t == 0:
                break
            t = (t - 1) & s
        atoms[s] = float(total)
    return InfoDiagram(tuple(d.variables), atoms)


def total_correlation(d, groups=None):
    """T = sum of group entropies minus their joint entropy."""
    masks = _group_masks(d, groups)
    h = entropy_table(d)
    union = 0
    for m in masks:
        union |= m
    return float(sum(h[m] for m in masks) - h[union])


def dual_total_correlation(d, groups=None):
    """B = H(joint) minus the sum of H(group | other groups)."""
    masks = _group_masks(d, groups)
    h = entropy_table(d)
    union = 0
    for m in masks:
        union |= m
    local = sum(h[union] - h[union ^ m] for m in masks)
    return float(h[union] - local)


def caekl(d, groups=None):
    """CAEKL mutual information: minimum over partitions of the groups.

    ``min_P [sum_{C in P} H(C) - H(joint)] / (|P| - 1)`` over every partition
    ``P`` with at least two blocks, found by exhaustive enumeration.
    """
    masks = _group_masks(d, groups)
    if len(masks) > MAX_CAEKL_GROUPS:
        raise DistributionError("PARTITION_INVALID", f"more than {MAX_CAEKL_GROUPS} groups")
    h = entropy_table(d)
    union = 0
    for m in masks:
        union |= m
    best = np.inf
    for part in set_partitions(masks):
        if len(part) < 2:
            continue
        blocks = [sum(b) for b in part]
        best = min(best, (sum(h[b] for b in blocks) - h[union]) / (len(part) - 1))
    return float(best)


def interaction_information(d, groups=None):
    """McGill's interaction information: ``(-1)**k`` times the co-information of k groups."""
    masks = _group_masks(d, groups)
    return float((-1) ** len(masks) * _coinfo_masks(entropy_table(d), masks, 0))


def residual_entropy(d, groups=None):
    """R = sum over groups of H(group | all other groups)."""
    masks = _group_masks(d, groups)
    h = entropy_table(d)
    union = 0
    for m in masks:
        union |= m
    return float(sum(h[union] - h[union ^ m] for m in masks))


def tse_complexity(d, groups=None):
    """Tononi-Sporns-Edelman complexity.

    ``sum_{k=1}^{n-1} [mean_{|S|=k} H(S) - (k/n) H(joint)]`` over subsets of
    the groups.
    """
    masks = _group_masks(d, groups)
    h = entropy_table(d)
    n = len(masks)
    union = sum(masks)
    total = 0.0
    for k in range(1, n):
        subs = [h[sum(c)] for c in combinations(masks, k)]
        total += np.mean(subs) - k / n * h[union]
    return float(total)
