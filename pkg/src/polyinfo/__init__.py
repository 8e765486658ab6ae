"""Information measures, decompositions and constructions on finite joint distributions."""

__version__ = "0.1.0"

from .camouflage import (
    camouflage_generate,
    camouflage_verify,
    diffuse,
    masked_parity,
    parity_map,
    recover_search,
    reduce,
)
from .common import (
    BoundedValue,
    exact_common_information,
    functional_common_information,
    gacs_korner,
    mss,
    mss_common_information,
    wyner_common_information,
)
from .distribution import (
    JointDistribution,
    VariablePartition,
    builtin,
    coalesce,
    condition,
    expand_binary,
    from_outcomes,
    giant_bit,
    isomorphic,
    marginal,
    overlay,
    parity_distribution,
)
from .errors import DistributionError, NotConvergedError, PolyinfoError, SearchError
from .fileformat import dump, dumps, load, loads
from .pid import PIDResult, pid_broja, pid_imin
from .profiles import complexity_profile, connected_informations, marginal_utility, maxent_projection
from .report import measure_suite
from .scalar import (
    disequilibrium,
    extropy,
    jensen_shannon_divergence,
    lmrp_complexity,
    perplexity,
    renyi_entropy,
    tsallis_entropy,
)
from .secrecy import Channel, intrinsic_channel, intrinsic_mi, intrinsic_mi_bounds, reduced_intrinsic_mi, secret_key_lower_bound
from .shannon import (
    caekl,
    coinformation,
    conditional_entropy,
    dual_total_correlation,
    entropy,
    idiagram,
    interaction_information,
    mutual_information,
    residual_entropy,
    total_correlation,
    tse_complexity,
)
