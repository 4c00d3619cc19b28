"""Sum-rate bounds, stopping-time schemes and transcript checks for computing
symmetric functions of binary sources over collocated broadcast networks."""

from .bounds import (
    BoundReport,
    combine_adjacent,
    cutset_min_upper,
    cutset_parity_lower,
    fact1_witness,
    lower_bound_i,
    lower_bound_ii,
    report,
    rho,
    upper_bound_iii,
)
from .exceptions import (
    ConsistencyError,
    InputError,
    RatecolError,
    ResourceLimitError,
    StructuralViolationError,
)
from .numerics import (
    SourceModel,
    binary_entropy,
    binom_log_pmf,
    cond_mean_interval,
    prob_interval,
)
from .stopping import SimResult, StoppingRule, exact_expected_k, exact_rate, negbinom_bound_check, simulate
from .symfunc import (
    IntervalDecomposition,
    Rectangle,
    SymmetricFunction,
    build_function,
    builtin,
    decompose_intervals,
    enumerate_monochromatic_rectangles,
    is_type_sensitive_instance,
    is_type_threshold_instance,
    locate_interval,
    project_rectangle,
)
from .zeroerror import (
    ProtocolSpec,
    TranscriptAnalysis,
    analyze_lemma3,
    run_protocol,
    verify_zero_error,
    worst_case_rate,
)

__version__ = "0.1.0"
