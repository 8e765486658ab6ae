"""Functionals of the joint probability mass function alone.

These ignore which variable is which: only the multiset of outcome
probabilities (and, for the disequilibrium, the size of the full product
alphabet) matters.
"""

import math

import numpy as np

from .errors import DistributionError
from .shannon import shannon_entropy

__all__ = [
    "renyi_entropy",
    "tsallis_entropy",
    "extropy",
    "perplexity",
    "jensen_shannon_divergence",
    "disequilibrium",
    "lmrp_complexity",
]


def _probs(d):
    return d.probabilities()


def renyi_entropy(d, order):
    """Renyi entropy of the given order, in bits.

    ``order == 1`` is Shannon entropy and ``order == 0`` is the log of the
    support size; ``order == inf`` gives the min-entropy.
    """
    if order < 0:
        raise DistributionError("NEGATIVE_ORDER", f"order {order} < 0")
    p = _probs(d)
    if order == 1:
        return shannon_entropy(p)
    if order == 0:
        return math.log2(len(p))
    if math.isinf(order):
        return float(-math.log2(p.max()))
    return float(math.log2(np.sum(p**order)) / (1 - order))


def tsallis_entropy(d, q):
    """Tsallis entropy ``(1 - sum p^q) / (q - 1)``.

    The q -> 1 limit of this form is the natural-log entropy; at ``q == 1``
    the base-2 Shannon entropy is returned instead, matching the units of the
    rest of the package.
    """
    p = _probs(d)
    if q == 1:
        return shannon_entropy(p)
    return float((1 - np.sum(p**q)) / (q - 1))


def extropy(d):
    """``-sum (1 - p) log2(1 - p)`` over the support."""
    p = _probs(d)
    p = p[p < 1]
    return float(-np.sum((1 - p) * np.log2(1 - p)))


def perplexity(d):
    return float(2 ** shannon_entropy(_probs(d)))


def jensen_shannon_divergence(p, q):
    """JSD of two probability vectors in bits."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return shannon_entropy((p + q) / 2) - (shannon_entropy(p) + shannon_entropy(q)) / 2


def _full_vector(d):
    n_total = d.alphabet_size()
    p = np.zeros(n_total)
    p[: len(d)] = _probs(d)
    return p, n_total


def disequilibrium(d):
    """Normalized Jensen-Shannon distance of ``d`` from uniform.

    The uniform reference ranges over the full product alphabet of size N and
    the normalizer ``Q0 = -2 / [((N+1)/N) log2(N+1) - 2 log2(2N) + log2 N]``
    maps the maximum possible JSD (a point mass) to one.
    """
    p, n_total = _full_vector(d)
    if n_total == 1:
        return 0.0
    u = np.full(n_total, 1.0 / n_total)
    q0 = -2.0 / ((n_total + 1) / n_total * math.log2(n_total + 1) - 2 * math.log2(2 * n_total) + math.log2(n_total))
    return float(q0 * jensen_shannon_divergence(p, u))


def lmrp_complexity(d):
    """Disequilibrium times the entropy normalized by ``log2 N``."""
    n_total = d.alphabet_size()
    if n_total == 1:
        return 0.0
    return float(disequilibrium(d) * shannon_entropy(_probs(d)) / math.log2(n_total))
