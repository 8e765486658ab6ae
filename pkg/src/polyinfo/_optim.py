"""Numerical helpers for the auxiliary-variable optimizations.

A stochastic kernel ``K[s, v] = p(v | s)`` is parameterized by unconstrained
logits ``L`` through a row-wise softmax.  Objectives are signed sums of
entropies of aggregated joint tables, so each entropy term supplies its own
gradient with respect to the joint table and the chain rule through the
softmax is shared.
"""

import numpy as np

LN2 = np.log(2.0)


def softmax_rows(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def aggregated_entropy(q, labels, n_labels):
    """Entropy of ``M[a, v] = sum_{s: labels[s] = a} q[s, v]`` and its gradient in ``q``.

    Parameters
    ----------
    q : ndarray, shape (m, k)
        Nonnegative joint table.
    labels : ndarray of int, shape (m,)
    n_labels : int
    """
    m = np.zeros((n_labels, q.shape[1]))
    np.add.at(m, labels, q)
    pos = m > 0
    logm = np.zeros_like(m)
    logm[pos] = np.log2(m[pos])
    h = float(-np.sum(m[pos] * logm[pos]))
    # d/dq of -sum M log2 M; cells with M == 0 get the finite one-sided value
    # of a tiny mass, which keeps the gradient bounded at the boundary.
    logm[~pos] = np.log2(1e-300)
    grad = -(logm[labels] + 1.0 / LN2)
    return h, grad


def softmax_chain(weights, kernel, grad_q):
    """Gradient wrt logits of a function of ``q = weights[:, None] * kernel``."""
    g = grad_q * weights[:, None]
    return kernel * (g - np.sum(kernel * g, axis=1, keepdims=True))


def label_vector(items):
    """Map a sequence of hashables to dense integer labels (first-seen order)."""
    index = {}
    out = np.empty(len(items), dtype=np.int64)
    for i, it in enumerate(items):
        out[i] = index.setdefault(it, len(index))
    return out, len(index)
