"""Intrinsic and reduced intrinsic mutual information.

Both minimize a conditional mutual information I(X:Y|Z') over ways of
processing the conditioning variable.  The channel minimization for the
intrinsic MI runs an exhaustive pass over deterministic channels (one per
set partition of Z's support) and then refines with multi-start gradient
descent over stochastic channels.  Lower bounds come from secret-key rates
that both quantities dominate.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize

from ._combinatorics import bell_number, set_partitions
from ._optim import softmax_chain, softmax_rows
from .common import BoundedValue
from .errors import DistributionError, NotConvergedError
from .shannon import shannon_entropy

__all__ = ["Channel", "IntrinsicResult", "intrinsic_mi", "intrinsic_channel", "intrinsic_mi_bounds", "reduced_intrinsic_mi", "secret_key_lower_bound"]

MAX_DETERMINISTIC_PASS = 25000
OBJECTIVE_TOL = 1e-7


@dataclass(frozen=True)
class Channel:
    """Row-stochastic ``matrix[i, j] = p(output j | input i)``."""

    inputs: tuple
    outputs: tuple
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (len(self.inputs), len(self.outputs)):
            raise DistributionError("BAD_CHANNEL", f"matrix shape {m.shape} does not match alphabets")
        if np.any(m < -1e-15) or np.any(np.abs(m.sum(axis=1) - 1) > 1e-12):
            raise DistributionError("BAD_CHANNEL", "rows must be probability vectors")

    def is_deterministic(self):
        return bool(np.all((self.matrix == 0) | (self.matrix == 1)))


@dataclass(frozen=True)
class IntrinsicResult:
    value: float
    channel: Channel
    deterministic_value: float


def _tensor(d, x, y, z):
    """Dense P[x, y, z] over the observed values of the three (composite) sets."""
    xi, yi, zi = d.indices(x), d.indices(y), d.indices(z)
    if not xi or not yi or not zi:
        raise DistributionError("EMPTY_SET", "x, y and z must be nonempty")
    if set(xi) & set(yi) or set(xi) & set(zi) or set(yi) & set(zi):
        raise DistributionError("OVERLAPPING_SETS", "x, y and z must be disjoint")
    keys = [{}, {}, {}]
    rows = []
    for o, p in d.pmf.items():
        vals = [tuple(o[i] for i in idx) for idx in (xi, yi, zi)]
        rows.append(([k.setdefault(v, len(k)) for k, v in zip(keys, vals)], float(p)))
    P = np.zeros(tuple(len(k) for k in keys))
    for (a, b, c), p in rows:
        P[a, b, c] += p
    return P, tuple(keys[2])


def _cmi(Q):
    """I(X:Y|Z) in bits for a dense table Q[x, y, z]."""
    return (
        shannon_entropy(Q.sum(axis=1))
        + shannon_entropy(Q.sum(axis=0))
        - shannon_entropy(Q)
        - shannon_entropy(Q.sum(axis=(0, 1)))
    )


def _safe_log2(a):
    out = np.full(a.shape, np.log2(1e-300))
    pos = a > 0
    out[pos] = np.log2(a[pos])
    return out


def _cmi_and_grad(P, chan):
    Q = np.einsum("xyz,zw->xyw", P, chan)
    qxw, qyw, qw = Q.sum(axis=1), Q.sum(axis=0), Q.sum(axis=(0, 1))
    val = shannon_entropy(qxw) + shannon_entropy(qyw) - shannon_entropy(Q) - shannon_entropy(qw)
    G = -_safe_log2(qxw)[:, None, :] - _safe_log2(qyw)[None, :, :] + _safe_log2(Q) + _safe_log2(qw)[None, None, :]
    grad_chan = np.einsum("xyz,xyw->zw", P, G)
    return val, grad_chan


def _deterministic_pass(P):
    nz = P.shape[2]
    best, best_cells = np.inf, None
    if bell_number(nz) > MAX_DETERMINISTIC_PASS:
        return best, best_cells
    for cells in set_partitions(range(nz)):
        Q = np.stack([P[:, :, c].sum(axis=2) for c in cells], axis=2)
        val = _cmi(Q)
        if val < best - 1e-15:
            best, best_cells = val, cells
    return best, best_cells


def _minimize_channel(P, restarts, seed, out_size=None):
    nz = P.shape[2]
    k = out_size or nz
    results = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x0 = rng.normal(scale=2.0, size=(nz, k)).ravel()

        def fun(x):
            chan = softmax_rows(x.reshape(nz, k))
            val, g = _cmi_and_grad(P, chan)
            return val, softmax_chain(np.ones(nz), chan, g).ravel()

        sol = minimize(fun, x0, jac=True, method="L-BFGS-B", options={"ftol": OBJECTIVE_TOL * 1e-3, "maxiter": 1000})
        if not np.isfinite(sol.fun):
            raise NotConvergedError("OPTIMIZATION_DIVERGED", f"non-finite objective in restart {r}")
        chan = softmax_rows(sol.x.reshape(nz, k))
        results.append((_cmi(np.einsum("xyz,zw->xyw", P, chan)), r, chan))
    return results


def _intrinsic_from_tensor(P, restarts, seed):
    det_val, det_cells = _deterministic_pass(P)
    nz = P.shape[2]
    best_val, best_chan = np.inf, None
    if det_cells is not None:
        best_val = det_val
        best_chan = np.zeros((nz, len(det_cells)))
        for j, cell in enumerate(det_cells):
            best_chan[cell, j] = 1.0
    for val, _, chan in _minimize_channel(P, restarts, seed):
        if val < best_val - OBJECTIVE_TOL:
            best_val, best_chan = val, chan
    return max(best_val, 0.0), best_chan, det_val


def intrinsic_channel(d, x, y, z, restarts=32, seed=0):
    """Minimize I(X:Y|Z') over channels Z -> Z' with |Z'| <= |Z|.

    Returns
    -------
    IntrinsicResult
        The minimum, the minimizing channel and the best deterministic value.
    """
    P, zvals = _tensor(d, x, y, z)
    val, chan, det_val = _intrinsic_from_tensor(P, restarts, seed)
    return IntrinsicResult(val, Channel(zvals, tuple(range(chan.shape[1])), chan), det_val)


def intrinsic_mi(d, x, y, z, restarts=32, seed=0):
    """Intrinsic mutual information I(X : Y down Z), in bits."""
    return intrinsic_channel(d, x, y, z, restarts, seed).value


def _gk_values(P_xy):
    """Labels of the Gacs-Korner common part of X and Y for a table P[x, y]."""
    nx, ny = P_xy.shape
    parent = list(range(nx + ny))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in zip(*np.nonzero(P_xy > 0)):
        ra, rb = find(a), find(nx + b)
        if ra != rb:
            parent[ra] = rb
    return [find(a) for a in range(nx)]


def _key_rate_bound(P):
    pxy, pxz, pyz = P.sum(axis=2), P.sum(axis=1), P.sum(axis=0)
    px, py, pz = pxy.sum(axis=1), pxy.sum(axis=0), pxz.sum(axis=0)
    h = shannon_entropy
    i_xy = h(px) + h(py) - h(pxy)
    i_xz = h(px) + h(pz) - h(pxz)
    i_yz = h(py) + h(pz) - h(pyz)
    labels = _gk_values(pxy)
    roots = sorted(set(labels))
    pkz = np.zeros((len(roots), P.shape[2]))
    for a, root in enumerate(labels):
        pkz[roots.index(root)] += pxz[a]
    h_k_given_z = h(pkz) - h(pz)
    options = {
        "common part of X and Y hidden from Z": h_k_given_z,
        "one-way rate from X": i_xy - i_xz,
        "one-way rate from Y": i_xy - i_yz,
        "zero": 0.0,
    }
    name = max(options, key=options.get)
    return max(options[name], 0.0), name


def secret_key_lower_bound(d, x, y, z):
    """A lower bound on the secret-key rate S(X;Y||Z), with a description.

    The maximum of H(K|Z) for the common part K of X and Y, the two one-way
    rates I(X:Y) - I(X:Z) and I(X:Y) - I(Y:Z), and zero.  Both intrinsic
    mutual informations are upper bounds on S, so this bounds them too.
    """
    P, _ = _tensor(d, x, y, z)
    return _key_rate_bound(P)


def intrinsic_mi_bounds(d, x, y, z, restarts=32, seed=0):
    """Intrinsic MI as a bracket: secret-key lower bound, best channel upper bound."""
    P, _ = _tensor(d, x, y, z)
    lower, how = _key_rate_bound(P)
    upper, _, det_val = _intrinsic_from_tensor(P, restarts, seed)
    return BoundedValue(min(lower, upper), upper, {"lower": how, "upper": "channel minimization", "deterministic": det_val})


def _u_labelings(m, u_card):
    """Restricted-growth labelings of m outcomes into 2..u_card cells."""

    def rec(i, labels, used):
        if i == m:
            if used >= 2:
                yield tuple(labels)
            return
        for c in range(min(used + 1, u_card)):
            labels.append(c)
            yield from rec(i + 1, labels, max(used, c + 1))
            labels.pop()

    yield from rec(0, [], 0)


def reduced_intrinsic_mi(d, x, y, z, u_cardinality=2, restarts=32, seed=0, u_restarts=4, budget=5000):
    """Bracket on the reduced intrinsic mutual information I(X : Y DOWN Z).

    The upper bound minimizes ``I(X:Y down Z,U) + H(U)`` over the trivial U
    and over deterministic functions U of the (X, Y, Z) outcome with at most
    ``u_cardinality`` values.  The lower bound is
    :func:`secret_key_lower_bound`.  The U search stops as soon as the
    bracket closes.
    """
    if u_cardinality < 1:
        raise DistributionError("BAD_PARAMETER", "u_cardinality must be >= 1")
    P, _ = _tensor(d, x, y, z)
    lower, how = _key_rate_bound(P)
    upper, _, _ = _intrinsic_from_tensor(P, restarts, seed)
    source = "trivial U"
    searched = 0
    cells = list(zip(*np.nonzero(P > 0)))
    probs = np.array([P[c] for c in cells])
    if upper - lower > 1e-9 and u_cardinality >= 2:
        for labels in _u_labelings(len(cells), u_cardinality):
            searched += 1
            if searched > budget:
                break
            lab = np.array(labels)
            h_u = shannon_entropy(np.bincount(lab, weights=probs))
            if h_u >= upper - 1e-12:
                continue
            nz = P.shape[2]
            Pu = np.zeros(P.shape[:2] + (nz * u_cardinality,))
            for (a, b, c), l in zip(cells, labels):
                Pu[a, b, c * u_cardinality + l] += P[a, b, c]
            Pu = Pu[:, :, Pu.sum(axis=(0, 1)) > 0]
            val, _, _ = _intrinsic_from_tensor(Pu, u_restarts, seed)
            if val + h_u < upper - 1e-12:
                upper, source = val + h_u, f"U labeling {labels}"
            if upper - lower <= 1e-9:
                break
    lower = min(lower, upper)
    return BoundedValue(lower, upper, {"lower": how, "upper": source, "labelings searched": searched})
