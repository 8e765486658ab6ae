"""Canonical text serialization of :class:`JointDistribution`.

The document is JSON with three fields::

    {
      "variables": ["X", "Y"],
      "alphabets": [[0, 1], [0, 1]],
      "outcomes": [
        [0, 0, "1/2"],
        [1, 1, "1/2"]
      ]
    }

Each outcome row lists one symbol per variable followed by its probability
as an exact ``"p/q"`` string.  Tuple-valued symbols (from ``coalesce`` or
``overlay``) are written as JSON arrays and read back as tuples.  Output is
deterministic, so ``dumps(loads(s)) == s`` for any ``s`` produced here.
"""

import json
from fractions import Fraction

from .distribution import JointDistribution
from .errors import DistributionError

__all__ = ["dumps", "loads", "dump", "load"]


def _encode(symbol):
    if isinstance(symbol, tuple):
        return [_encode(s) for s in symbol]
    if isinstance(symbol, bool) or not isinstance(symbol, (int, str)):
        if hasattr(symbol, "__index__"):
            return int(symbol)
        raise DistributionError("UNSERIALIZABLE_SYMBOL", f"cannot serialize symbol {symbol!r}")
    return symbol


def _decode(symbol):
    if isinstance(symbol, list):
        return tuple(_decode(s) for s in symbol)
    if isinstance(symbol, (bool, float)) or symbol is None:
        raise DistributionError("PARSE_ERROR", f"invalid symbol {symbol!r}")
    return symbol


def _compact(obj):
    return json.dumps(obj, separators=(", ", ": "), ensure_ascii=False)


def dumps(d):
    """Serialize ``d`` to the canonical text form."""
    lines = [
        "{",
        f'  "variables": {_compact(list(d.variables))},',
        f'  "alphabets": {_compact([[_encode(s) for s in a] for a in d.alphabets])},',
        '  "outcomes": [',
    ]
    rows = []
    for outcome, p in d.pmf.items():
        row = [_encode(s) for s in outcome] + [f"{p.numerator}/{p.denominator}"]
        rows.append("    " + _compact(row))
    lines.append(",\n".join(rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads(text):
    """Parse the canonical text form.

    Raises
    ------
    DistributionError
        With code ``PARSE_ERROR`` for malformed documents, or any validation
        code raised by :class:`JointDistribution`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DistributionError("PARSE_ERROR", str(exc)) from exc
    if not isinstance(doc, dict) or not {"variables", "outcomes"} <= set(doc):
        raise DistributionError("PARSE_ERROR", "expected an object with 'variables' and 'outcomes'")
    variables = doc["variables"]
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise DistributionError("PARSE_ERROR", "'variables' must be a list of strings")
    pmf = {}
    for row in doc["outcomes"]:
        if not isinstance(row, list) or len(row) != len(variables) + 1 or not isinstance(row[-1], str):
            raise DistributionError("PARSE_ERROR", f"bad outcome row {row!r}")
        outcome = tuple(_decode(s) for s in row[:-1])
        if outcome in pmf:
            raise DistributionError("DUPLICATE_OUTCOME", f"outcome {outcome} listed twice")
        try:
            pmf[outcome] = Fraction(row[-1])
        except (ValueError, ZeroDivisionError) as exc:
            raise DistributionError("PARSE_ERROR", f"bad probability {row[-1]!r}") from exc
    if "alphabets" in doc:
        alphabets = [[_decode(s) for s in a] for a in doc["alphabets"]]
    else:
        alphabets = [{o[i] for o in pmf} for i in range(len(variables))]
    return JointDistribution(variables, alphabets, pmf)


def dump(d, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(d))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
