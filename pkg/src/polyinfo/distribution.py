"""Finite joint distributions over named discrete variables.

Probabilities are stored as :class:`fractions.Fraction` and only the support
is kept.  Every operation in this module is exact: marginals, conditionals,
expansions and products never leave rational arithmetic.
"""

import itertools
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from .errors import DistributionError

__all__ = [
    "JointDistribution",
    "VariablePartition",
    "from_outcomes",
    "builtin",
    "marginal",
    "condition",
    "expand_binary",
    "coalesce",
    "overlay",
    "isomorphic",
    "default_names",
    "parity_distribution",
    "giant_bit",
]


def _sorted_symbols(symbols):
    symbols = set(symbols)
    try:
        return tuple(sorted(symbols))
    except TypeError:
        return tuple(sorted(symbols, key=repr))


def _as_fraction(p):
    if isinstance(p, Fraction):
        return p
    if isinstance(p, bool):
        raise DistributionError("BAD_PROBABILITY", f"{p!r} is not a probability")
    if isinstance(p, (int, float, str)):
        try:
            return Fraction(p)
        except (ValueError, ZeroDivisionError) as exc:
            raise DistributionError("BAD_PROBABILITY", f"cannot parse {p!r}") from exc
    raise DistributionError("BAD_PROBABILITY", f"{p!r} is not a rational number")


class JointDistribution:
    """An immutable joint probability mass function.

    Parameters
    ----------
    variables : sequence of str
        Unique variable names, in order.
    alphabets : sequence of sequences
        One finite symbol set per variable.  Symbols must be hashable.
    pmf : mapping
        Outcome tuple -> positive rational probability.  Must sum to one.

    Notes
    -----
    Instances are normally built through :func:`from_outcomes` or
    :func:`builtin`, which perform friendlier validation.
    """

    __slots__ = ("_variables", "_alphabets", "_pmf", "_hash")

    def __init__(self, variables, alphabets, pmf):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise DistributionError("DUPLICATE_VARIABLE", f"names {variables} are not unique")
        if len(alphabets) != len(variables):
            raise DistributionError("ARITY_MISMATCH", "one alphabet per variable is required")
        alphabets = tuple(_sorted_symbols(a) for a in alphabets)
        sets = [set(a) for a in alphabets]
        clean = {}
        for outcome, p in pmf.items():
            outcome = tuple(outcome)
            if len(outcome) != len(variables):
                raise DistributionError(
                    "ARITY_MISMATCH", f"outcome {outcome} has {len(outcome)} symbols, expected {len(variables)}"
                )
            for sym, alpha, name in zip(outcome, sets, variables):
                if sym not in alpha:
                    raise DistributionError("UNKNOWN_SYMBOL", f"{sym!r} not in alphabet of {name}")
            p = _as_fraction(p)
            if p <= 0:
                raise DistributionError("NONPOSITIVE_PROBABILITY", f"outcome {outcome} has probability {p}")
            clean[outcome] = p
        total = sum(clean.values(), Fraction(0))
        if total != 1:
            raise DistributionError("SUM_NOT_ONE", f"probabilities sum to {total}")
        self._variables = variables
        self._alphabets = alphabets
        self._pmf = MappingProxyType(dict(sorted(clean.items(), key=lambda kv: _outcome_key(kv[0], alphabets))))
        self._hash = None

    @property
    def variables(self):
        return self._variables

    @property
    def alphabets(self):
        return self._alphabets

    @property
    def pmf(self):
        """Read-only mapping outcome -> Fraction, in canonical order."""
        return self._pmf

    def __len__(self):
        return len(self._pmf)

    def __iter__(self):
        return iter(self._pmf.items())

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return (
            self._variables == other._variables
            and self._alphabets == other._alphabets
            and dict(self._pmf) == dict(other._pmf)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._variables, self._alphabets, frozenset(self._pmf.items())))
        return self._hash

    def __repr__(self):
        rows = ", ".join(f"{o}: {p}" for o, p in itertools.islice(self._pmf.items(), 4))
        more = ", ..." if len(self) > 4 else ""
        return f"JointDistribution({list(self._variables)}, {{{rows}{more}}})"

    @property
    def n(self):
        return len(self._variables)

    def probability(self, outcome):
        return self._pmf.get(tuple(outcome), Fraction(0))

    def outcomes(self):
        return list(self._pmf)

    def probabilities(self):
        """Support probabilities as a float array, in canonical outcome order."""
        return np.array([float(p) for p in self._pmf.values()])

    def index(self, name):
        try:
            return self._variables.index(name)
        except ValueError:
            raise DistributionError("UNKNOWN_VARIABLE", f"{name!r} not in {self._variables}") from None

    def indices(self, names):
        """Resolve a variable set (names or integer positions) to sorted indices."""
        if isinstance(names, (str, int)):
            names = [names]
        out = set()
        for name in names:
            if isinstance(name, (int, np.integer)) and not isinstance(name, bool) and name not in self._variables:
                if not 0 <= name < self.n:
                    raise DistributionError("UNKNOWN_VARIABLE", f"index {name} out of range")
                out.add(int(name))
            else:
                out.add(self.index(name))
        return tuple(sorted(out))

    def alphabet_size(self):
        """Size of the full product alphabet."""
        return int(np.prod([len(a) for a in self._alphabets], dtype=object))

    def to_array(self):
        """Dense float array with one axis per variable (alphabet order)."""
        shape = tuple(len(a) for a in self._alphabets)
        if int(np.prod(shape, dtype=object)) > 2**24:
            raise DistributionError("ALPHABET_TOO_LARGE", f"dense table of shape {shape} is too large")
        arr = np.zeros(shape)
        lookup = [{s: i for i, s in enumerate(a)} for a in self._alphabets]
        for outcome, p in self._pmf.items():
            arr[tuple(lk[s] for lk, s in zip(lookup, outcome))] = float(p)
        return arr

    def marginal(self, keep):
        return marginal(self, keep)

    def condition(self, on, values):
        return condition(self, on, values)

    def rename(self, names):
        """Return the same distribution with new variable names."""
        names = tuple(names)
        if len(names) != self.n:
            raise DistributionError("ARITY_MISMATCH", "one name per variable is required")
        return JointDistribution(names, self._alphabets, self._pmf)


def _outcome_key(outcome, alphabets):
    return tuple(a.index(s) for s, a in zip(outcome, alphabets))


class VariablePartition(tuple):
    """A tuple of disjoint, nonempty blocks of variable names.

    Parameters
    ----------
    blocks : iterable of iterables
    universe : iterable, optional
        If given, the blocks must cover it exactly.
    """

    def __new__(cls, blocks, universe=None):
        blocks = tuple(tuple(b) if not isinstance(b, str) else (b,) for b in blocks)
        seen = []
        for b in blocks:
            if not b:
                raise DistributionError("PARTITION_INVALID", "empty block")
            seen.extend(b)
        if len(set(seen)) != len(seen):
            raise DistributionError("PARTITION_INVALID", f"blocks {blocks} overlap")
        if universe is not None and set(seen) != set(universe):
            raise DistributionError("PARTITION_INVALID", f"blocks {blocks} do not cover {tuple(universe)}")
        return super().__new__(cls, blocks)

    def __repr__(self):
        return "{" + "}{".join(",".join(map(str, b)) for b in self) + "}"


def default_names(n):
    """Variable names used by the built-in constructions."""
    if n <= 3:
        return tuple("XYZ"[:n])
    if n == 4:
        return tuple("WXYZ")
    return tuple(f"X{i}" for i in range(n))


def from_outcomes(rows, variables=None, alphabets=None, strict=True):
    """Build a distribution from ``(outcome, probability)`` rows.

    Parameters
    ----------
    rows : iterable of (tuple, probability)
        Probabilities may be Fractions, ints, ``"p/q"`` strings or floats
        (floats are converted exactly, so only dyadic floats sum to one).
    variables : sequence of str, optional
        Defaults to :func:`default_names`.
    alphabets : sequence of sequences, optional
        Defaults to the symbols observed in the rows.
    strict : bool
        If true, zero-probability rows raise; otherwise they are dropped.

    Raises
    ------
    DistributionError
        ``SUM_NOT_ONE``, ``ARITY_MISMATCH``, ``DUPLICATE_OUTCOME``,
        ``ZERO_PROBABILITY``.
    """
    rows = [(tuple(o) if isinstance(o, (tuple, list)) else (o,), _as_fraction(p)) for o, p in rows]
    if not rows:
        raise DistributionError("SUM_NOT_ONE", "no outcomes given")
    arity = len(rows[0][0]) if variables is None else len(variables)
    pmf = {}
    for outcome, p in rows:
        if len(outcome) != arity:
            raise DistributionError("ARITY_MISMATCH", f"outcome {outcome} does not have {arity} symbols")
        if outcome in pmf:
            raise DistributionError("DUPLICATE_OUTCOME", f"outcome {outcome} listed twice")
        if p < 0:
            raise DistributionError("NONPOSITIVE_PROBABILITY", f"outcome {outcome} has probability {p}")
        if p == 0:
            if strict:
                raise DistributionError("ZERO_PROBABILITY", f"outcome {outcome} has probability 0")
            continue
        pmf[outcome] = p
    total = sum(pmf.values(), Fraction(0))
    if total != 1:
        raise DistributionError("SUM_NOT_ONE", f"probabilities sum to {total}")
    if variables is None:
        variables = default_names(arity)
    if alphabets is None:
        alphabets = [{o[i] for o in pmf} for i in range(arity)]
    return JointDistribution(variables, alphabets, pmf)


def _uniform(outcomes, variables, alphabets=None):
    outcomes = list(outcomes)
    p = Fraction(1, len(outcomes))
    return from_outcomes([(o, p) for o in outcomes], variables=variables, alphabets=alphabets)


_DYADIC = [(0, 0, 0), (0, 2, 1), (1, 0, 2), (1, 2, 3), (2, 1, 0), (2, 3, 1), (3, 1, 2), (3, 3, 3)]
_TRIADIC = [(0, 0, 0), (1, 1, 1), (0, 2, 2), (1, 3, 3), (2, 0, 2), (3, 1, 3), (2, 2, 0), (3, 3, 1)]
_CAMOUFLAGE4 = [
    (0, 0, 0, 0),
    (0, 1, 3, 1),
    (1, 0, 2, 2),
    (1, 1, 1, 3),
    (2, 2, 3, 3),
    (2, 3, 0, 2),
    (3, 2, 1, 1),
    (3, 3, 2, 0),
]


def parity_distribution(n):
    """Uniform distribution over the even-parity ``n``-bit strings."""
    if n < 1:
        raise DistributionError("BAD_PARAMETER", "parity needs n >= 1")
    rows = [o for o in itertools.product((0, 1), repeat=n) if sum(o) % 2 == 0]
    return _uniform(rows, default_names(n), [(0, 1)] * n)


def giant_bit(n, k=2):
    """``k`` equally likely symbols copied across ``n`` variables."""
    if n < 1 or k < 1:
        raise DistributionError("BAD_PARAMETER", "giant_bit needs n >= 1 and k >= 1")
    return _uniform([(s,) * n for s in range(k)], default_names(n), [range(k)] * n)


def builtin(name, *params):
    """Return one of the named reference distributions.

    Parameters
    ----------
    name : str
        ``"dyadic"``, ``"triadic"``, ``"xor3"``, ``"giant_bit"``, ``"parity"``
        or ``"camouflage4"``.  Parameterised names also accept the compact
        forms ``"giant_bit:3,2"`` and ``"parity:4"``.
    *params : int
        ``(n, k)`` for ``giant_bit`` and ``(n,)`` for ``parity``.
    """
    if ":" in name:
        name, _, rest = name.partition(":")
        params = tuple(int(x) for x in rest.split(",") if x.strip()) + params
    name = name.strip().lower()
    try:
        if name == "dyadic":
            return _uniform(_DYADIC, "XYZ", [range(4)] * 3)
        if name == "triadic":
            return _uniform(_TRIADIC, "XYZ", [range(4)] * 3)
        if name == "xor3":
            return parity_distribution(3)
        if name == "camouflage4":
            return _uniform(_CAMOUFLAGE4, "WXYZ", [range(4)] * 4)
        if name == "giant_bit":
            return giant_bit(*(params or (3, 2)))
        if name == "parity":
            return parity_distribution(*(params or (4,)))
    except TypeError as exc:
        raise DistributionError("BAD_PARAMETER", f"bad parameters {params} for {name}") from exc
    raise DistributionError("UNKNOWN_NAME", f"no built-in distribution called {name!r}")


def marginal(d, keep):
    """Exact marginal over the variables in ``keep`` (distribution order)."""
    idx = d.indices(keep)
    if not idx:
        raise DistributionError("EMPTY_SET", "cannot marginalize onto no variables")
    if idx == tuple(range(d.n)):
        return d
    pmf = {}
    for outcome, p in d.pmf.items():
        key = tuple(outcome[i] for i in idx)
        pmf[key] = pmf.get(key, Fraction(0)) + p
    return JointDistribution([d.variables[i] for i in idx], [d.alphabets[i] for i in idx], pmf)


def condition(d, on, values):
    """Distribution of the remaining variables given ``on == values``.

    ``values`` lists one symbol per conditioning variable, in the order the
    variables appear in ``on``.
    """
    if isinstance(on, (str, int)):
        on = [on]
    on = list(on)
    if not isinstance(values, (tuple, list)):
        values = (values,)
    if len(values) != len(on):
        raise DistributionError("ARITY_MISMATCH", "one value per conditioning variable is required")
    fixed = {}
    for name, value in zip(on, values):
        (i,) = d.indices(name)
        if value not in d.alphabets[i]:
            raise DistributionError("UNKNOWN_SYMBOL", f"{value!r} not in alphabet of {d.variables[i]}")
        fixed[i] = value
    rest = [i for i in range(d.n) if i not in fixed]
    pmf = {}
    for outcome, p in d.pmf.items():
        if all(outcome[i] == v for i, v in fixed.items()):
            key = tuple(outcome[i] for i in rest)
            pmf[key] = pmf.get(key, Fraction(0)) + p
    total = sum(pmf.values(), Fraction(0))
    if total == 0:
        raise DistributionError("ZERO_PROBABILITY_EVENT", f"P({dict(zip(on, values))}) = 0")
    if not rest:
        return JointDistribution((), (), {(): Fraction(1)})
    return JointDistribution(
        [d.variables[i] for i in rest], [d.alphabets[i] for i in rest], {o: p / total for o, p in pmf.items()}
    )


def expand_binary(d, widths=None):
    """Replace each integer-valued variable by its bits, most significant first.

    Parameters
    ----------
    widths : int or mapping name -> int, optional
        Bits per variable.  Defaults to the fewest bits covering the alphabet.

    Variable ``V`` of width ``w`` becomes ``V0 .. V{w-1}``.
    """
    if widths is None or isinstance(widths, int):
        w_all = widths
        widths = {}
        for v, a in zip(d.variables, d.alphabets):
            if w_all is not None:
                widths[v] = w_all
            else:
                top = max(a) if all(isinstance(s, int) for s in a) else 1
                widths[v] = max(1, int(top).bit_length())
    names, alphabets = [], []
    for v in d.variables:
        w = widths[v]
        if w < 1:
            raise DistributionError("BAD_PARAMETER", f"width for {v} must be positive")
        names.extend(f"{v}{j}" for j in range(w))
        alphabets.extend([(0, 1)] * w)
    for v, a in zip(d.variables, d.alphabets):
        for s in a:
            if not isinstance(s, (int, np.integer)) or isinstance(s, bool) or not 0 <= s < 2 ** widths[v]:
                raise DistributionError("SYMBOL_OUT_OF_RANGE", f"{s!r} does not fit in {widths[v]} bits for {v}")
    pmf = {}
    for outcome, p in d.pmf.items():
        bits = []
        for v, s in zip(d.variables, outcome):
            w = widths[v]
            bits.extend((int(s) >> (w - 1 - j)) & 1 for j in range(w))
        pmf[tuple(bits)] = p
    return JointDistribution(names, alphabets, pmf)


def coalesce(d, grouping, names=None):
    """Merge each block of variables into one tuple-valued variable.

    Parameters
    ----------
    grouping : VariablePartition or iterable of iterables
        Must cover every variable of ``d``.
    names : sequence of str, optional
        Names of the composite variables; defaults to concatenated names.
    """
    grouping = VariablePartition(grouping, universe=d.variables)
    idx = [tuple(d.index(v) for v in b) for b in grouping]
    if names is None:
        names = ["".join(map(str, b)) for b in grouping]
    alphabets = [list(itertools.product(*(d.alphabets[i] for i in block))) for block in idx]
    pmf = {}
    for outcome, p in d.pmf.items():
        key = tuple(tuple(outcome[i] for i in block) for block in idx)
        pmf[key] = pmf.get(key, Fraction(0)) + p
    return JointDistribution(names, alphabets, pmf)


def overlay(a, b):
    """Independent product pairing variable ``i`` of ``a`` with variable ``i`` of ``b``.

    The result keeps ``a``'s variable names; its symbols are pairs
    ``(a_i, b_i)``.
    """
    if a.n != b.n:
        raise DistributionError("ARITY_MISMATCH", f"{a.n} vs {b.n} variables")
    alphabets = [list(itertools.product(x, y)) for x, y in zip(a.alphabets, b.alphabets)]
    pmf = {}
    for oa, pa in a.pmf.items():
        for ob, pb in b.pmf.items():
            pmf[tuple(zip(oa, ob))] = pa * pb
    return JointDistribution(a.variables, alphabets, pmf)


def _marginal_signature(d, i):
    counts = {}
    for outcome, p in d.pmf.items():
        counts[outcome[i]] = counts.get(outcome[i], Fraction(0)) + p
    return tuple(sorted(counts.values()))


def isomorphic(a, b):
    """True iff ``b`` equals ``a`` after reordering variables and relabelling symbols.

    Only symbols in the support are matched, so unused alphabet letters are
    ignored.  The search is exact: candidate variable orders are filtered by
    marginal signatures, then outcomes are matched by backtracking with
    incremental symbol bijections.
    """
    if a.n != b.n or len(a) != len(b):
        return False
    if sorted(a.pmf.values()) != sorted(b.pmf.values()):
        return False
    sig_a = [_marginal_signature(a, i) for i in range(a.n)]
    sig_b = [_marginal_signature(b, i) for i in range(b.n)]
    if sorted(sig_a) != sorted(sig_b):
        return False
    rows_a = list(a.pmf.items())
    rows_b = list(b.pmf.items())
    for perm in itertools.permutations(range(b.n)):
        if any(sig_a[i] != sig_b[j] for i, j in enumerate(perm)):
            continue
        permuted = [(tuple(o[j] for j in perm), p) for o, p in rows_b]
        if _match_outcomes(rows_a, permuted, a.n):
            return True
    return False


def _match_outcomes(rows_a, rows_b, n):
    fwd = [dict() for _ in range(n)]
    bwd = [dict() for _ in range(n)]
    used = [False] * len(rows_b)

    def extend(k):
        if k == len(rows_a):
            return True
        oa, pa = rows_a[k]
        for j, (ob, pb) in enumerate(rows_b):
            if used[j] or pb != pa:
                continue
            added = []
            ok = True
            for i in range(n):
                x, y = oa[i], ob[i]
                if x in fwd[i]:
                    if fwd[i][x] != y:
                        ok = False
                        break
                elif y in bwd[i]:
                    ok = False
                    break
                else:
                    fwd[i][x] = y
                    bwd[i][y] = x
                    added.append((i, x, y))
            if ok:
                used[j] = True
                if extend(k + 1):
                    return True
                used[j] = False
            for i, x, y in added:
                del fwd[i][x]
                del bwd[i][y]
        return False

    return extend(0)
