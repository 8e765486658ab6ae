"""Common informations defined through auxiliary variables.

Deterministic constructions (Gacs-Korner, MSS, functional) are computed
exactly on the support.  The Wyner and exact common informations are
nonconvex programs over stochastic kernels; they are reported as a
:class:`BoundedValue` whose lower bound is the dual total correlation and
whose upper bound is the best feasible auxiliary variable found.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from ._fmt import fmt
from ._optim import aggregated_entropy, label_vector, softmax_chain, softmax_rows
from .errors import DistributionError, NotConvergedError
from .shannon import _group_masks, dual_total_correlation, shannon_entropy

__all__ = [
    "BoundedValue",
    "OutcomePartition",
    "AuxiliaryResult",
    "gacs_korner",
    "mss",
    "mss_common_information",
    "functional_common_information",
    "wyner_common_information",
    "exact_common_information",
]

MAX_FUNCTIONAL_SUPPORT = 12
FEASIBILITY_TOL = 1e-8
CERTIFICATE_TOL = 1e-6


@dataclass(frozen=True)
class BoundedValue:
    """A quantity known only up to an interval ``[lower, upper]`` (bits)."""

    lower: float
    upper: float
    certificate: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.lower <= self.upper + 1e-9:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def value(self):
        """Best available point estimate: the achieved (upper) value."""
        return self.upper

    @property
    def width(self):
        return self.upper - self.lower

    def __contains__(self, x):
        return self.lower - 1e-12 <= x <= self.upper + 1e-12

    def __str__(self):
        return f"{fmt(self.value)} [{fmt(self.lower)}, {fmt(self.upper)}]"


@dataclass(frozen=True)
class OutcomePartition:
    """A labelled partition of the observed values of some variables.

    ``cells[c]`` lists the value tuples in cell ``c``; ``label(x)`` inverts it.
    """

    variables: tuple
    cells: tuple

    def __len__(self):
        return len(self.cells)

    def label(self, value):
        value = tuple(value)
        for c, cell in enumerate(self.cells):
            if value in cell:
                return c
        raise KeyError(value)

    def as_mapping(self):
        return {x: c for c, cell in enumerate(self.cells) for x in cell}


def _support_groups(d, groups):
    """Per-group value tuples for each support outcome."""
    masks = _group_masks(d, groups)
    cols = [[i for i in range(d.n) if m >> i & 1] for m in masks]
    outcomes = d.outcomes()
    return [[tuple(o[i] for i in c) for o in outcomes] for c in cols], masks


def gacs_korner(d, groups=None):
    """Entropy of the finest variable computable from every group separately.

    Outcomes sharing a group value are linked; the connected components of
    the support form the common random variable.
    """
    per_group, _ = _support_groups(d, groups)
    m = len(d)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for values in per_group:
        first = {}
        for s, v in enumerate(values):
            if v in first:
                a, b = find(s), find(first[v])
                if a != b:
                    parent[a] = b
            else:
                first[v] = s
    mass = {}
    for s, p in enumerate(d.pmf.values()):
        r = find(s)
        mass[r] = mass.get(r, Fraction(0)) + p
    return shannon_entropy([float(p) for p in mass.values()])


def mss(d, of, about):
    """Minimal sufficient statistic of ``of`` about ``about``.

    Values of ``of`` are grouped by their conditional distribution over
    ``about``; the result is the coarsest partition preserving I(of : about).
    """
    of_idx, about_idx = d.indices(of), d.indices(about)
    if not of_idx or not about_idx:
        raise DistributionError("EMPTY_SET", "mss needs two nonempty sets")
    if set(of_idx) & set(about_idx):
        raise DistributionError("OVERLAPPING_SETS", "'of' and 'about' overlap")
    joint, marg = {}, {}
    for o, p in d.pmf.items():
        x = tuple(o[i] for i in of_idx)
        y = tuple(o[i] for i in about_idx)
        joint.setdefault(x, {})
        joint[x][y] = joint[x].get(y, Fraction(0)) + p
        marg[x] = marg.get(x, Fraction(0)) + p
    cells = {}
    for x in joint:
        key = frozenset((y, q / marg[x]) for y, q in joint[x].items())
        cells.setdefault(key, []).append(x)
    return OutcomePartition(tuple(d.variables[i] for i in of_idx), tuple(tuple(c) for c in cells.values()))


def mss_common_information(d, groups=None):
    """Entropy of the join of each group's MSS about the other groups."""
    masks = _group_masks(d, groups)
    names = [[v for i, v in enumerate(d.variables) if m >> i & 1] for m in masks]
    union = [v for ns in names for v in ns]
    labels = []
    for g, ns in enumerate(names):
        rest = [v for v in union if v not in ns]
        part = mss(d, ns, rest).as_mapping()
        idx = d.indices(ns)
        labels.append([part[tuple(o[i] for i in idx)] for o in d.outcomes()])
    mass = {}
    for s, p in enumerate(d.pmf.values()):
        key = tuple(lab[s] for lab in labels)
        mass[key] = mass.get(key, Fraction(0)) + p
    return shannon_entropy([float(p) for p in mass.values()])


def _ci_exact(weights, group_values, members):
    """True iff the groups are independent conditioned on the outcome set ``members``.

    ``weights`` are integers proportional to the probabilities, so the test
    ``p(s) * total**(g-1) == prod_i w_i(s)`` is exact.
    """
    margs = []
    size = 1
    for values in group_values:
        mg = {}
        for s in members:
            mg[values[s]] = mg.get(values[s], 0) + weights[s]
        margs.append(mg)
        size *= len(mg)
    # independence on a cell forces its support to be a full product
    if size != len(members):
        return False
    total = sum(weights[s] for s in members)
    scale = total ** (len(group_values) - 1)
    for s in members:
        prod = 1
        for values, mg in zip(group_values, margs):
            prod *= mg[values[s]]
        if prod != weights[s] * scale:
            return False
    return True


def functional_partition(d, groups=None, max_support=MAX_FUNCTIONAL_SUPPORT):
    """Support partition minimizing H(V) among CI-inducing functions V of the outcome.

    Returns ``(entropy, cells)`` with ``cells`` a list of lists of outcome
    indices.  A dynamic program over subsets of the support is exact because
    H(V) is additive over the cells of V.
    """
    if len(d) > max_support:
        raise DistributionError("SUPPORT_TOO_LARGE", f"support of {len(d)} exceeds {max_support}")
    key = None if groups is None else tuple(tuple(g) if not isinstance(g, str) else (g,) for g in groups)
    value, cells = _functional_partition(d, key)
    return value, [list(c) for c in cells]


@lru_cache(maxsize=64)
def _functional_partition(d, groups):
    per_group, _ = _support_groups(d, groups)
    probs = list(d.pmf.values())
    denom = math.lcm(*(p.denominator for p in probs))
    weights = [int(p * denom) for p in probs]
    m = len(d)
    full = (1 << m) - 1
    cost = np.full(full + 1, np.inf)
    for sub in range(1, full + 1):
        members = [s for s in range(m) if sub >> s & 1]
        if len(members) == 1 or _ci_exact(weights, per_group, members):
            pc = float(sum((probs[s] for s in members), Fraction(0)))
            cost[sub] = -pc * math.log2(pc) if pc < 1 else 0.0
    best = np.full(full + 1, np.inf)
    choice = np.zeros(full + 1, dtype=np.int64)
    best[0] = 0.0
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while True:
            cell = sub | low
            if cost[cell] < np.inf:
                val = cost[cell] + best[mask ^ cell]
                if val < best[mask] - 1e-15:
                    best[mask] = val
                    choice[mask] = cell
            if sub == 0:
                break
            sub = (sub - 1) & rest
    cells = []
    mask = full
    while mask:
        cell = int(choice[mask])
        cells.append(tuple(s for s in range(m) if cell >> s & 1))
        mask ^= cell
    return float(best[full]), tuple(cells)


def functional_common_information(d, groups=None, max_support=MAX_FUNCTIONAL_SUPPORT):
    """Smallest H(V) over deterministic V = f(outcome) making the groups conditionally independent."""
    return functional_partition(d, groups, max_support)[0]


@dataclass(frozen=True)
class AuxiliaryResult:
    """A feasible auxiliary variable: kernel ``p(v | outcome)`` over the support."""

    kernel: np.ndarray
    mutual_information: float
    entropy: float
    residual: float
    source: str


class _AuxProblem:
    """Objective pieces for an auxiliary V attached to the support of ``d``."""

    def __init__(self, d, groups):
        per_group, _ = _support_groups(d, groups)
        self.p = d.probabilities()
        self.m = len(self.p)
        self.h_s = shannon_entropy(self.p)
        self.groups = [label_vector(vals) for vals in per_group]
        self.ident = (np.arange(self.m), self.m)
        self.const = (np.zeros(self.m, dtype=np.int64), 1)

    def terms(self, kernel):
        """(I(S:V), H(V), residual) and their gradients in the joint table."""
        q = self.p[:, None] * kernel
        h_v, g_v = aggregated_entropy(q, *self.const)
        h_sv, g_sv = aggregated_entropy(q, *self.ident)
        res = -(h_sv - h_v)
        g_res = -(g_sv - g_v)
        for labels, count in self.groups:
            h_gv, g_gv = aggregated_entropy(q, labels, count)
            res += h_gv - h_v
            g_res += g_gv - g_v
        mi = self.h_s + h_v - h_sv
        g_mi = g_v - g_sv
        return (mi, g_mi), (h_v, g_v), (res, g_res)

    def evaluate(self, kernel, source):
        (mi, _), (h_v, _), (res, _) = self.terms(kernel)
        return AuxiliaryResult(kernel, mi, h_v, max(res, 0.0), source)


def _drop_light_values(p, kernel, floor=1e-7):
    """Remove auxiliary values of negligible mass and renormalize the rows.

    A value carrying almost no mass contributes nothing to the objective but
    can hide a large conditional dependence.
    """
    keep = (p @ kernel) >= floor
    if keep.all() or not keep.any():
        return kernel
    kept = kernel[:, keep]
    return kept / kept.sum(axis=1, keepdims=True)


def _worst_conditional_tc(problem, kernel):
    """Largest total correlation of the groups given a single value of V."""
    worst = 0.0
    for v in range(kernel.shape[1]):
        q = problem.p * kernel[:, v]
        if q.sum() <= 1e-15:
            continue
        q = q / q.sum()
        tc = -shannon_entropy(q)
        for labels, count in problem.groups:
            tc += shannon_entropy(np.bincount(labels, weights=q, minlength=count))
        worst = max(worst, tc)
    return worst


def _optimize_auxiliary(problem, objective, k, restarts, seed, tol=FEASIBILITY_TOL):
    """Penalty-method search for kernels minimizing ``objective`` under CI."""
    found = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        logits = rng.normal(scale=2.0, size=(problem.m, k))
        lam = 1.0
        for _ in range(12):

            def fun(x, lam=lam):
                kernel = softmax_rows(x.reshape(problem.m, k))
                mi, hv, res = problem.terms(kernel)
                main = mi if objective == "mi" else hv
                val = main[0] + lam * res[0]
                grad = softmax_chain(problem.p, kernel, main[1] + lam * res[1])
                return val, grad.ravel()

            sol = minimize(fun, logits.ravel(), jac=True, method="L-BFGS-B", options={"maxiter": 500})
            if not np.all(np.isfinite(sol.x)) or not np.isfinite(sol.fun):
                raise NotConvergedError("OPTIMIZATION_DIVERGED", f"non-finite objective in restart {r}")
            logits = sol.x.reshape(problem.m, k)
            kernel = _drop_light_values(problem.p, softmax_rows(logits))
            result = problem.evaluate(kernel, f"{objective} restart {r}")
            if result.residual < tol and _worst_conditional_tc(problem, kernel) < CERTIFICATE_TOL:
                found.append(result)
                break
            lam *= 10.0
    return found


@lru_cache(maxsize=64)
def _candidate_pool(d, groups, k, restarts, seed):
    problem = _AuxProblem(d, groups)
    found = _optimize_auxiliary(problem, "mi", k, restarts, seed)
    found += _optimize_auxiliary(problem, "entropy", k, restarts, seed)
    return tuple(found)


def _common_bounds(d, groups, v_cardinality, restarts, seed, objective):
    problem = _AuxProblem(d, groups)
    lower = dual_total_correlation(d, groups)
    k = problem.m if v_cardinality is None else v_cardinality
    if k < 1:
        raise DistributionError("BAD_PARAMETER", "v_cardinality must be >= 1")
    candidates = []
    try:
        f_value, cells = functional_partition(d, groups)
        kernel = np.zeros((problem.m, len(cells)))
        for c, cell in enumerate(cells):
            kernel[cell, c] = 1.0
        candidates.append(problem.evaluate(kernel, "functional partition"))
    except DistributionError:
        f_value = None
    candidates.append(problem.evaluate(np.eye(problem.m), "V = joint outcome"))
    # Kernels found for either objective are feasible for both; sharing them
    # keeps the Wyner upper bound below the exact one, as I(S:V) <= H(V).
    key_groups = None if groups is None else tuple(tuple(g) if not isinstance(g, str) else (g,) for g in groups)
    candidates.extend(_candidate_pool(d, key_groups, k, restarts, seed))
    key = (lambda c: c.mutual_information) if objective == "mi" else (lambda c: c.entropy)
    best = min(candidates, key=key)
    upper = key(best)
    # The lower bound is rigorous; a nearly feasible candidate can undercut it
    # by at most (groups - 1) * residual.
    slack = (len(problem.groups) - 1) * best.residual + 1e-12
    if upper < lower and lower - upper <= slack:
        upper = lower
    certificate = {
        "lower": "dual total correlation",
        "upper": best.source,
        "residual": best.residual,
        "auxiliary": best,
        "functional": f_value,
        "candidates": len(candidates),
    }
    return BoundedValue(lower, upper, certificate)


def wyner_common_information(d, groups=None, v_cardinality=None, restarts=4, seed=0):
    """Bracket on the Wyner common information min I(joint : V) s.t. groups CI given V.

    Parameters
    ----------
    v_cardinality : int, optional
        Size of the auxiliary alphabet; defaults to the support size.
    restarts : int
        Independent random starts of the penalty optimization.
    seed : int
        Seeds every restart; equal seeds give identical results.
    """
    return _common_bounds(d, groups, v_cardinality, restarts, seed, "mi")


def exact_common_information(d, groups=None, v_cardinality=None, restarts=4, seed=0):
    """Bracket on the exact common information min H(V) s.t. groups CI given V.

    The lower bound is the Wyner lower bound (dual total correlation); the
    functional common information always supplies a feasible upper bound.
    """
    return _common_bounds(d, groups, v_cardinality, restarts, seed, "entropy")


def conditional_total_correlation(d, kernel, groups=None):
    """``max_v`` of the total correlation of ``d`` conditioned on V = v (float path)."""
    return _worst_conditional_tc(_AuxProblem(d, groups), np.asarray(kernel, dtype=float))

