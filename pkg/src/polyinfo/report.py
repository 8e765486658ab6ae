"""The full measure suite applied to one distribution.

Rows come in a fixed order: entropies, mutual informations, common
informations, then the remaining measures.  The two intrinsic mutual
informations use the first two variables as X and Y and condition on all
the others.
"""

from dataclasses import dataclass, field

from . import __version__
from ._fmt import fmt
from .common import (
    BoundedValue,
    exact_common_information,
    functional_common_information,
    gacs_korner,
    mss_common_information,
    wyner_common_information,
)
from .errors import PolyinfoError
from .scalar import disequilibrium, extropy, lmrp_complexity, perplexity, renyi_entropy, tsallis_entropy
from .secrecy import intrinsic_mi_bounds, reduced_intrinsic_mi
from .shannon import (
    caekl,
    coinformation,
    dual_total_correlation,
    entropy,
    interaction_information,
    residual_entropy,
    total_correlation,
    tse_complexity,
)

__all__ = ["MEASURES", "MeasureRow", "MeasureReport", "measure_suite", "differing_rows"]


def _roles(d):
    v = d.variables
    return [v[0]], [v[1]], list(v[2:])


def _intrinsic(d, seed):
    x, y, z = _roles(d)
    return intrinsic_mi_bounds(d, x, y, z, seed=seed)


def _reduced(d, seed):
    x, y, z = _roles(d)
    return reduced_intrinsic_mi(d, x, y, z, seed=seed)


# key, display label, tolerance class, function(d, seed)
MEASURES = (
    ("H", "H", "exact", lambda d, s: entropy(d)),
    ("H2", "H2", "exact", lambda d, s: renyi_entropy(d, 2)),
    ("S2", "S2", "exact", lambda d, s: tsallis_entropy(d, 2)),
    ("I", "I", "exact", lambda d, s: coinformation(d)),
    ("T", "T", "exact", lambda d, s: total_correlation(d)),
    ("B", "B", "exact", lambda d, s: dual_total_correlation(d)),
    ("J", "J", "exact", lambda d, s: caekl(d)),
    ("II", "II", "exact", lambda d, s: interaction_information(d)),
    ("K", "K", "exact", lambda d, s: gacs_korner(d)),
    ("C", "C", "bracket", lambda d, s: wyner_common_information(d, seed=s)),
    ("G", "G", "bracket", lambda d, s: exact_common_information(d, seed=s)),
    ("F", "F", "exact", lambda d, s: functional_common_information(d)),
    ("M", "M", "exact", lambda d, s: mss_common_information(d)),
    ("I_down", "I↓", "bracket", _intrinsic),
    ("I_ddown", "I⇓", "bracket", _reduced),
    ("X", "X", "exact", lambda d, s: extropy(d)),
    ("R", "R", "exact", lambda d, s: residual_entropy(d)),
    ("P", "P", "exact", lambda d, s: perplexity(d)),
    ("D", "D", "exact", lambda d, s: disequilibrium(d)),
    ("LMRP", "LMRP", "exact", lambda d, s: lmrp_complexity(d)),
    ("TSE", "TSE", "exact", lambda d, s: tse_complexity(d)),
)


@dataclass(frozen=True)
class MeasureRow:
    key: str
    label: str
    tolerance: str
    value: object = None
    status: str = "ok"

    @property
    def point(self):
        if self.value is None:
            return None
        return self.value.value if isinstance(self.value, BoundedValue) else float(self.value)

    def text(self):
        if self.value is None:
            return f"error: {self.status}"
        if isinstance(self.value, BoundedValue):
            return str(self.value)
        return fmt(self.value)


@dataclass(frozen=True)
class MeasureReport:
    source: str
    rows: tuple
    seed: int
    metadata: dict = field(default_factory=dict)

    def row(self, key):
        for r in self.rows:
            if r.key == key:
                return r
        raise KeyError(key)

    def __getitem__(self, key):
        return self.row(key).value

    def failed(self):
        return [r for r in self.rows if r.value is None]


def measure_suite(d, seed=0, source=""):
    """Compute every row; a failing measure records its error code instead of a value."""
    rows = []
    for key, label, tol, fn in MEASURES:
        try:
            rows.append(MeasureRow(key, label, tol, fn(d, seed)))
        except PolyinfoError as exc:
            rows.append(MeasureRow(key, label, tol, None, exc.code))
    return MeasureReport(source, tuple(rows), seed, {"version": __version__, "seed": seed})


def differing_rows(a, b, tol=1e-4):
    """Keys of the rows whose values differ by more than ``tol`` (or whose status differs)."""
    out = []
    for ra, rb in zip(a.rows, b.rows):
        pa, pb = ra.point, rb.point
        if pa is None or pb is None:
            if ra.status != rb.status:
                out.append(ra.key)
        elif abs(pa - pb) > tol:
            out.append(ra.key)
    return out
