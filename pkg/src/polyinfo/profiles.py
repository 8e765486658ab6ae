"""Scale-indexed expansions of the dependence in a joint distribution.

Three profiles are provided:

* the complexity profile ``C(k)``, the total of all I-diagram atoms shared by
  at least ``k`` variables;
* connected informations, entropy drops between maximum-entropy
  distributions with fixed ``(k-1)``- and ``k``-way marginals, found by
  iterative proportional fitting;
* the marginal utility of information, the derivative of a linear program
  over the I-diagram.

Marginal utility LP
-------------------
A descriptor ``D`` with ``H(D | X) = 0`` is summarized by its share ``u_a`` of
each atom ``a`` of the I-diagram of ``X = (X_1..X_n)``.  Writing ``x_a`` for
the atom values, the Shannon inequalities that involve ``D`` reduce to

* ``x_{i} - u_{i} >= 0``                                   (H(X_i | rest, D) >= 0)
* ``sum_{a >= {i,j}, a & K = 0} (x_a - u_a) >= 0``   for ``i < j``, ``K`` in the others
                                                             (I(X_i:X_j | X_K, D) >= 0)
* ``sum_{a >= {i}, a & K = 0} u_a >= 0``             for every ``i`` and ``K`` not holding ``i``
                                                             (I(D:X_i | X_K) >= 0)
* ``sum_a u_a <= y``                                       (H(D) <= y)

and the utility ``U(y) = max sum_a |a| u_a`` (the summed information ``D``
carries about each variable).  ``U`` is concave and piecewise linear in
``y``; its slope is the marginal utility.  The total area under the slope
equals ``sum_i H(X_i)``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from ._fmt import fmt
from .distribution import JointDistribution
from .errors import DistributionError, NotConvergedError
from .shannon import entropy_table, idiagram, shannon_entropy

__all__ = [
    "Profile",
    "MaxEntResult",
    "complexity_profile",
    "maxent_projection",
    "connected_informations",
    "marginal_utility",
    "mui_constraints",
    "utility",
]

MAX_IPF_CELLS = 2**20
IPF_TOL = 1e-10
IPF_MAX_SWEEPS = 2000
MAX_NEWTON_CELLS = 4096


@dataclass(frozen=True)
class Profile:
    """Ordered ``(scale, value)`` pairs.

    For ``kind == "mui"`` each point gives the left end of an interval on
    which the marginal utility is constant; the final point carries value 0.
    """

    kind: str
    points: tuple

    def __post_init__(self):
        scales = [s for s, _ in self.points]
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("profile scales must be strictly increasing")

    @property
    def scales(self):
        return [s for s, _ in self.points]

    @property
    def values(self):
        return [v for _, v in self.points]

    def __getitem__(self, scale):
        for s, v in self.points:
            if s == scale:
                return v
        raise KeyError(scale)

    def area(self):
        """Integral of a piecewise-constant (mui) profile over its scales."""
        pts = self.points
        return float(sum((b[0] - a[0]) * a[1] for a, b in zip(pts, pts[1:])))

    def at(self, y):
        """Value of a piecewise-constant profile at scale ``y``."""
        out = 0.0
        for s, v in self.points:
            if s <= y:
                out = v
        return out

    def to_csv(self):
        lines = ["scale,value"]
        for s, v in self.points:
            scale = str(s) if isinstance(s, (int, np.integer)) else fmt(s)
            lines.append(f"{scale},{fmt(v)}")
        return "\n".join(lines) + "\n"


def complexity_profile(d):
    """``C(k)`` for ``k = 1..n``: sum of the atoms on at least ``k`` variables."""
    diagram = idiagram(d)
    pts = []
    for k in range(1, d.n + 1):
        pts.append((k, float(sum(v for m, v in diagram.atoms.items() if bin(m).count("1") >= k)) + 0.0))
    return Profile("complexity", tuple(pts))


@dataclass(frozen=True)
class MaxEntResult:
    """Maximum-entropy distribution with the ``k``-way marginals of ``source``.

    ``table`` is a dense array over the full product alphabet of ``source``.
    ``history`` holds the entropy after each full sweep.
    """

    source: JointDistribution
    k: int
    table: np.ndarray
    entropy: float
    residual: float
    sweeps: int
    history: tuple = field(repr=False, default=())

    def distribution(self, max_denominator=10**9, cutoff=1e-13):
        """Rational approximation of ``table`` as a :class:`JointDistribution`."""
        pmf = {}
        for idx in zip(*np.nonzero(self.table > cutoff)):
            pmf[tuple(a[i] for a, i in zip(self.source.alphabets, idx))] = Fraction(
                float(self.table[idx])
            ).limit_denominator(max_denominator)
        total = sum(pmf.values())
        pmf = {o: p / total for o, p in pmf.items() if p > 0}
        return JointDistribution(self.source.variables, self.source.alphabets, pmf)


def _marginal_residual(Q, targets):
    worst = 0.0
    for axes, target in targets:
        cur = Q.sum(axis=axes, keepdims=True)
        worst = max(worst, 0.5 * float(np.abs(cur - target).sum()))
    return worst


def _face_newton(P, targets, tol):
    """Maximum-entropy point of the marginal polytope by Newton steps on its face.

    Cells forced to zero by the constraints are found with one LP per cell;
    the average of those LP solutions is a relative-interior point, and the
    maximizer (which lies in the relative interior) is reached by damped
    Newton steps in the null space of the constraint matrix.
    """
    allowed = np.ones(P.shape, dtype=bool)
    for axes, target in targets:
        allowed &= np.broadcast_to(target > 0, P.shape)
    cells = np.flatnonzero(allowed)
    if len(cells) > MAX_NEWTON_CELLS:
        return None
    rows, rhs = [], []
    for axes, target in targets:
        keep = tuple(i for i in range(P.ndim) if i not in axes)
        flat = np.ravel_multi_index(
            tuple(np.unravel_index(cells, P.shape)[i] for i in keep), tuple(P.shape[i] for i in keep)
        )
        block = np.zeros((int(np.prod([P.shape[i] for i in keep])), len(cells)))
        block[flat, np.arange(len(cells))] = 1
        rows.append(block)
        rhs.append(target.ravel())
    A, b = np.vstack(rows), np.concatenate(rhs)
    points = []
    for j in range(len(cells)):
        c = np.zeros(len(cells))
        c[j] = -1
        res = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * len(cells), method="highs")
        if res.status == 0:
            points.append(res.x)
    if not points:
        return None
    q = np.mean(points, axis=0)
    free = q > 1e-12
    A, q = A[:, free], q[free]
    q = q - A.T @ np.linalg.lstsq(A @ A.T, A @ q - b, rcond=None)[0]
    if np.any(q <= 0):
        return None
    N = null_space(A)
    for _ in range(200):
        if N.shape[1] == 0:
            break
        g = N.T @ (np.log(q) + 1)
        H = N.T @ (N / q[:, None])
        step = N @ np.linalg.solve(H, -g)
        decrement = float(-g @ np.linalg.solve(H, -g))
        if decrement < 1e-24:
            break
        t = 1.0
        neg = step < 0
        if np.any(neg):
            t = min(1.0, 0.95 * float(np.min(-q[neg] / step[neg])))
        f0 = float(np.sum(q * np.log(q)))
        while t > 1e-14:
            q_new = q + t * step
            if np.all(q_new > 0) and np.sum(q_new * np.log(q_new)) <= f0 - 0.25 * t * decrement:
                break
            t *= 0.5
        q = q_new
    Q = np.zeros(P.size)
    Q[cells[free]] = q
    Q = Q.reshape(P.shape)
    return Q if _marginal_residual(Q, targets) < tol else None


def maxent_projection(d, k, tol=IPF_TOL, max_sweeps=IPF_MAX_SWEEPS):
    """Iterative proportional fitting of all size-``k`` marginals of ``d``.

    Starts from the uniform table on the full product alphabet and cycles
    through the constraints in lexicographic order of the variable subsets.
    When the constraints force cells to zero that are not zero in any
    marginal, IPF only creeps towards the answer; if it has not met ``tol``
    after ``max_sweeps`` sweeps the maximizer is computed directly on the
    face of the marginal polytope (see ``_face_newton``).

    Raises
    ------
    NotConvergedError
        ``NOT_CONVERGED`` when neither route reaches a largest
        total-variation residual below ``tol``.
    """
    n = d.n
    if not 1 <= k <= n:
        raise DistributionError("BAD_PARAMETER", f"marginal order k={k} outside 1..{n}")
    P = d.to_array()
    if P.size > MAX_IPF_CELLS:
        raise DistributionError("ALPHABET_TOO_LARGE", f"{P.size} cells exceed the IPF limit of {MAX_IPF_CELLS}")
    if k == n:
        h = float(entropy_table(d)[-1])
        return MaxEntResult(d, k, P, h, 0.0, 0, (h,))
    targets = []
    for sub in combinations(range(n), k):
        axes = tuple(i for i in range(n) if i not in sub)
        targets.append((axes, P.sum(axis=axes, keepdims=True)))
    Q = np.full(P.shape, 1.0 / P.size)
    history = []
    for sweep in range(1, max_sweeps + 1):
        for axes, target in targets:
            cur = Q.sum(axis=axes, keepdims=True)
            ratio = np.divide(target, cur, out=np.zeros_like(cur), where=cur > 0)
            Q = Q * ratio
        history.append(shannon_entropy(Q))
        residual = _marginal_residual(Q, targets)
        if residual < tol:
            Q = Q / Q.sum()
            return MaxEntResult(d, k, Q, shannon_entropy(Q), residual, sweep, tuple(history))
    polished = _face_newton(P, targets, tol)
    if polished is None:
        raise NotConvergedError("NOT_CONVERGED", f"IPF residual {residual:.3g} after {max_sweeps} sweeps")
    h = shannon_entropy(polished)
    return MaxEntResult(d, k, polished, h, _marginal_residual(polished, targets), max_sweeps, tuple(history) + (h,))


def connected_informations(d, tol=IPF_TOL, max_sweeps=IPF_MAX_SWEEPS):
    """``C_k = H(maxent_{k-1}) - H(maxent_k)`` for ``k = 2..n``."""
    if d.n < 2:
        raise DistributionError("BAD_PARAMETER", "connected informations need at least two variables")
    h = [None] + [maxent_projection(d, k, tol, max_sweeps).entropy for k in range(1, d.n + 1)]
    return Profile("connected", tuple((k, h[k - 1] - h[k] + 0.0) for k in range(2, d.n + 1)))


def mui_constraints(atoms, n):
    """Inequality system ``A u <= b`` of the utility LP, without the scale row.

    Parameters
    ----------
    atoms : mapping
        Bitmask -> atom value for every nonempty subset of ``n`` variables.

    Returns
    -------
    masks : list of int
        Column order of ``u``.
    A, b : ndarray
    """
    masks = sorted(atoms, key=lambda m: (bin(m).count("1"), m))
    col = {m: j for j, m in enumerate(masks)}
    x = np.array([atoms[m] for m in masks])
    rows, rhs = [], []
    for i in range(n):
        # u_i <= x_i
        r = np.zeros(len(masks))
        r[col[1 << i]] = 1
        rows.append(r)
        rhs.append(x[col[1 << i]])
    for i, j in combinations(range(n), 2):
        others = [t for t in range(n) if t not in (i, j)]
        for size in range(len(others) + 1):
            for K in combinations(others, size):
                kmask = sum(1 << t for t in K)
                sel = [col[m] for m in masks if m >> i & 1 and m >> j & 1 and not m & kmask]
                r = np.zeros(len(masks))
                r[sel] = 1
                rows.append(r)
                rhs.append(x[sel].sum())
    for i in range(n):
        others = [t for t in range(n) if t != i]
        for size in range(len(others) + 1):
            for K in combinations(others, size):
                kmask = sum(1 << t for t in K)
                sel = [col[m] for m in masks if m >> i & 1 and not m & kmask]
                r = np.zeros(len(masks))
                r[sel] = -1
                rows.append(r)
                rhs.append(0.0)
    return masks, np.array(rows), np.array(rhs)


class _UtilityLP:
    def __init__(self, d):
        self.n = d.n
        self.masks, self.A, self.b = mui_constraints(idiagram(d).atoms, d.n)
        self.c = -np.array([bin(m).count("1") for m in self.masks], dtype=float)
        self.A_full = np.vstack([self.A, np.ones(len(self.masks))])
        self.cache = {}

    def __call__(self, y):
        y = float(y)
        if y not in self.cache:
            res = linprog(
                self.c,
                A_ub=self.A_full,
                b_ub=np.append(self.b, y),
                bounds=[(None, None)] * len(self.masks),
                method="highs",
            )
            if res.status == 2:
                raise NotConvergedError("LP_INFEASIBLE", f"utility LP infeasible at scale {y}")
            if res.status != 0:
                raise NotConvergedError("NOT_CONVERGED", f"utility LP failed at scale {y}: {res.message}")
            self.cache[y] = -float(res.fun)
        return self.cache[y]


def utility(d, y):
    """Optimal value ``U(y)`` of the utility LP."""
    return _UtilityLP(d)(y)


def _breakpoints(U, a, b, h, tol, depth=0):
    """Interior breakpoints of a concave piecewise-linear ``U`` on ``[a, b]``."""
    if b - a <= 2 * h or depth > 60:
        return []
    ua, ub = U(a), U(b)
    sa = (U(a + h) - ua) / h
    sb = (ub - U(b - h)) / h
    if sa - sb <= tol:
        return []
    # tangents at the two ends meet at x
    x = (ub - ua + sa * a - sb * b) / (sa - sb)
    x = min(max(x, a + h), b - h)
    if abs(U(x) - (ua + sa * (x - a))) <= tol * max(1.0, b - a):
        return [x]
    return _breakpoints(U, a, x, h, tol, depth + 1) + [x] + _breakpoints(U, x, b, h, tol, depth + 1)


def marginal_utility(d, grid_resolution=1e-6, tol=1e-9):
    """Marginal utility of information as a piecewise-constant profile.

    Parameters
    ----------
    grid_resolution : float
        Step used for one-sided slopes when locating breakpoints; breakpoints
        closer than this are merged.
    tol : float
        Slope tolerance below which two pieces are treated as one.
    """
    U = _UtilityLP(d)
    top = float(sum(entropy_table(d)[1 << i] for i in range(d.n)))
    if top <= tol:
        return Profile("mui", ((0.0, 0.0),))
    inner = _breakpoints(U, 0.0, top, grid_resolution, tol)
    knots = [0.0]
    for x in sorted(inner):
        x = round(x, 9)
        if x - knots[-1] > grid_resolution:
            knots.append(x)
    knots.append(top)
    pieces = []
    for a, b in zip(knots, knots[1:]):
        slope = round((U(b) - U(a)) / (b - a), 9) + 0.0
        if pieces and abs(pieces[-1][2] - slope) <= 1e-7:
            pieces[-1][1] = b
        else:
            pieces.append([a, b, slope])
    while len(pieces) > 1 and abs(pieces[-1][2]) <= 1e-7:
        pieces.pop()
    return Profile("mui", tuple((a, s) for a, _, s in pieces) + ((pieces[-1][1], 0.0),))
