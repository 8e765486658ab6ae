"""Two-input partial information decomposition.

``pid_imin`` is the Williams-Beer redundancy (exact, finite sums).
``pid_broja`` computes the unique information

    U0 = min { I_q(I0 : O | I1) : q(i0, o) = p(i0, o), q(i1, o) = p(i1, o) }

which is a convex program over the marginal-matching polytope.  Minimizing
I_q(I0:O|I1) there is equivalent to maximizing H_q(O | I0, I1).  The solver
works in coordinates of the polytope's affine hull (so every iterate matches
the pairwise marginals exactly), starts at the maximum-entropy point
``p(i0,o) p(i1,o) / p(o)`` and takes damped Newton steps on a log-barrier
objective, shrinking the barrier weight until its duality-gap bound is below
the tolerance.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import DistributionError, NotConvergedError
from .shannon import shannon_entropy

__all__ = ["PIDResult", "pid_imin", "pid_broja", "pid_tensor"]


@dataclass(frozen=True)
class PIDResult:
    """Redundant, unique and synergistic parts of I((I0, I1) : O), in bits."""

    redundancy: float
    unique_0: float
    unique_1: float
    synergy: float
    method: str
    residual: float = 0.0

    def as_tuple(self):
        return (self.redundancy, self.unique_0, self.unique_1, self.synergy)

    @property
    def total(self):
        return sum(self.as_tuple())

    def swapped(self):
        return PIDResult(self.redundancy, self.unique_1, self.unique_0, self.synergy, self.method, self.residual)


def pid_tensor(d, inputs, output):
    """Dense P[i0, i1, o] over observed values of the three (composite) sets."""
    if len(inputs) != 2:
        raise DistributionError("BAD_PARAMETER", "exactly two inputs are supported")
    sets = [d.indices(inputs[0]), d.indices(inputs[1]), d.indices(output)]
    if any(not s for s in sets):
        raise DistributionError("EMPTY_SET", "inputs and output must be nonempty")
    flat = [i for s in sets for i in s]
    if len(set(flat)) != len(flat):
        raise DistributionError("OVERLAPPING_SETS", "inputs and output must be disjoint")
    keys = [{}, {}, {}]
    entries = []
    for o, p in d.pmf.items():
        idx = [k.setdefault(tuple(o[i] for i in s), len(k)) for k, s in zip(keys, sets)]
        entries.append((idx, float(p)))
    P = np.zeros(tuple(len(k) for k in keys))
    for (a, b, c), p in entries:
        P[a, b, c] += p
    return P


def _mi_tables(P):
    h = shannon_entropy
    p_o = P.sum(axis=(0, 1))
    i0 = h(P.sum(axis=1).sum(axis=1)) + h(p_o) - h(P.sum(axis=1))
    i1 = h(P.sum(axis=0).sum(axis=1)) + h(p_o) - h(P.sum(axis=0))
    i01 = h(P.sum(axis=2)) + h(p_o) - h(P)
    return i0, i1, i01


def _decompose(i0, i1, i01, redundancy, method, residual=0.0):
    u0 = i0 - redundancy
    u1 = i1 - redundancy
    s = i01 - redundancy - u0 - u1
    return PIDResult(redundancy + 0.0, u0 + 0.0, u1 + 0.0, s + 0.0, method, residual)


def _specific_information(P_ao):
    """I_spec(O = o ; A) for each o, given a table P[a, o]."""
    p_o = P_ao.sum(axis=0)
    p_a = P_ao.sum(axis=1)
    spec = np.zeros(P_ao.shape[1])
    for o in range(P_ao.shape[1]):
        if p_o[o] == 0:
            continue
        for a in range(P_ao.shape[0]):
            if P_ao[a, o] > 0:
                spec[o] += P_ao[a, o] / p_o[o] * np.log2((P_ao[a, o] / p_a[a]) / p_o[o])
    return spec


def pid_imin(d, inputs, output):
    """Decomposition with the I_min redundancy of Williams and Beer."""
    P = pid_tensor(d, inputs, output)
    p_o = P.sum(axis=(0, 1))
    s0 = _specific_information(P.sum(axis=1))
    s1 = _specific_information(P.sum(axis=0))
    red = float(np.sum(p_o * np.minimum(s0, s1)))
    return _decompose(*_mi_tables(P), red, "imin")


class _Polytope:
    """Affine parameterization of the joint tables matching two pairwise marginals."""

    def __init__(self, P):
        self.shape = P.shape
        p_ao, p_bo, p_o = P.sum(axis=1), P.sum(axis=0), P.sum(axis=(0, 1))
        cells = [
            (a, b, o)
            for a in range(P.shape[0])
            for b in range(P.shape[1])
            for o in range(P.shape[2])
            if p_ao[a, o] > 0 and p_bo[b, o] > 0
        ]
        self.cells = cells
        rows_ao = sorted({(a, o) for a, _, o in cells})
        rows_bo = sorted({(b, o) for _, b, o in cells})
        A = np.zeros((len(rows_ao) + len(rows_bo), len(cells)))
        rix_ao = {r: i for i, r in enumerate(rows_ao)}
        rix_bo = {r: i + len(rows_ao) for i, r in enumerate(rows_bo)}
        for j, (a, b, o) in enumerate(cells):
            A[rix_ao[a, o], j] = 1
            A[rix_bo[b, o], j] = 1
        self.A = A
        self.b = np.array([p_ao[r] for r in rows_ao] + [p_bo[r] for r in rows_bo])
        self.N = null_space(A) if len(cells) else np.zeros((0, 0))
        self.q_maxent = np.array([p_ao[a, o] * p_bo[b, o] / p_o[o] for a, b, o in cells])
        pairs = sorted({(a, b) for a, b, _ in cells})
        pix = {pr: i for i, pr in enumerate(pairs)}
        self.pair_of = np.array([pix[a, b] for a, b, _ in cells], dtype=np.int64)
        self.n_pairs = len(pairs)

    def table(self, q):
        Q = np.zeros(self.shape)
        for (a, b, o), v in zip(self.cells, q):
            Q[a, b, o] = v
        return Q

    def from_table(self, Q):
        return np.array([Q[c] for c in self.cells])

    def neg_cond_entropy(self, q):
        """-H(O | I0, I1) in nats with gradient and Hessian (cells with q > 0)."""
        q_ab = np.bincount(self.pair_of, weights=q, minlength=self.n_pairs)
        val = float(np.sum(q * np.log(q)) - np.sum(q_ab[q_ab > 0] * np.log(q_ab[q_ab > 0])))
        grad = np.log(q) - np.log(q_ab[self.pair_of])
        B = np.zeros((self.n_pairs, len(q)))
        B[self.pair_of, np.arange(len(q))] = 1
        hess = np.diag(1 / q) - B.T @ np.diag(1 / q_ab) @ B
        return val, grad, hess


def _cmi_0(Q):
    """I(I0 : O | I1) in bits for a table Q[i0, i1, o]."""
    h = shannon_entropy
    return h(Q.sum(axis=2)) + h(Q.sum(axis=0)) - h(Q) - h(Q.sum(axis=(0, 2)))


def _barrier_solve(poly, q, tolerance, max_iterations):
    m = len(q)
    N = poly.N
    mu = 1e-2 * max(1.0, float(np.max(q)))
    iterations = 0
    while True:
        for _ in range(200):
            val, grad, hess = poly.neg_cond_entropy(q)
            g = N.T @ (grad - mu / q)
            H = N.T @ (hess + np.diag(mu / q**2)) @ N
            try:
                step = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                # cells near zero make H numerically singular
                step = np.linalg.lstsq(H, -g, rcond=None)[0]
            decrement = float(-g @ step)
            if decrement / 2 < 1e-14:
                break
            dq = N @ step
            t = 1.0
            neg = dq < 0
            if np.any(neg):
                t = min(1.0, 0.99 * float(np.min(-q[neg] / dq[neg])))
            phi = val - mu * np.sum(np.log(q))
            while True:
                q_new = q + t * dq
                if np.all(q_new > 0):
                    v_new = poly.neg_cond_entropy(q_new)[0] - mu * np.sum(np.log(q_new))
                    if v_new <= phi - 0.25 * t * decrement or t < 1e-12:
                        break
                t *= 0.5
            q = q_new
            iterations += 1
            if iterations > max_iterations:
                raise NotConvergedError("NOT_CONVERGED", f"barrier method exceeded {max_iterations} Newton steps")
        if m * mu < tolerance * 1e-2:
            return q, m * mu, iterations
        mu /= 10.0


def _interior_start(poly, rng):
    q = poly.q_maxent.copy()
    if rng is None or poly.N.shape[1] == 0:
        return q
    direction = poly.N @ rng.normal(size=poly.N.shape[1])
    neg = direction < 0
    t = 0.5 * float(np.min(-q[neg] / direction[neg])) if np.any(neg) else 1.0
    return q + t * rng.uniform(0.2, 1.0) * direction


def pid_broja(d, inputs, output, tolerance=1e-8, max_iterations=5000, seed=None):
    """Decomposition with the BROJA unique information.

    Parameters
    ----------
    tolerance : float
        Target gap (bits) between the returned and the optimal unique
        information, certified by the barrier duality bound.
    max_iterations : int
        Cap on Newton steps; exceeding it raises ``NOT_CONVERGED``.
    seed : int, optional
        If given, start from a random interior point of the polytope rather
        than the maximum-entropy point (used to check convexity).
    """
    P = pid_tensor(d, inputs, output)
    i0, i1, i01 = _mi_tables(P)
    poly = _Polytope(P)
    rng = None if seed is None else np.random.default_rng(seed)
    q = _interior_start(poly, rng)
    gap = 0.0
    if poly.N.shape[1] > 0:
        q, gap, _ = _barrier_solve(poly, q, tolerance * np.log(2), max_iterations)
    if np.max(np.abs(poly.A @ q - poly.b)) > 1e-10:
        q = q - poly.A.T @ np.linalg.lstsq(poly.A @ poly.A.T, poly.A @ q - poly.b, rcond=None)[0]
    q = np.clip(q, 0, None)
    candidates = [_cmi_0(poly.table(q)), _cmi_0(poly.table(poly.q_maxent)), _cmi_0(P)]
    u0 = min(candidates)
    u0 = min(max(u0, 0.0), i0)
    return _decompose(i0, i1, i01, i0 - u0, "broja", gap / np.log(2))
