"""Order-k finite-context models for categorical sequences.

Two-step hyperparameter selection (pami argmax for k*, Dirichlet-multinomial
maximum likelihood for alpha*), an exhaustive grid-search baseline on the
theoretical bitrate, and an adaptive range coder that achieves it.
"""

from .sequences import (
    DEFAULT_ALPHABET,
    DNA_ALPHABET,
    Alphabet,
    SequenceError,
    SymbolSequence,
    parse_sequence,
    read_sequence_file,
    render_sequence,
    write_sequence_file,
)
from .fcm import (
    BitrateResult,
    ContextCounts,
    FcmError,
    HyperParams,
    bitrate,
    build_counts,
    generate,
    lidstone_prob,
)
from .dependence import (
    DependenceError,
    DependenceProfile,
    LaggedJoint,
    cohens_kappa,
    cramers_v,
    lagged_joint,
    marginals,
    pami,
    profile,
    select_k,
)
from .alpha_ml import (
    AlphaFit,
    AlphaMlError,
    CountMatrix,
    dm_log_marginal,
    fit_alpha,
    log_likelihood_gradient,
    total_log_likelihood,
)
from .tuner import (
    ComparisonRecord,
    SelectionResult,
    compare,
    grid_search,
    two_step_select,
)
from .codec import (
    CodecError,
    CompressedContainer,
    compress,
    decompress,
)
from .simharness import (
    AlphaStats,
    ConfusionMatrix,
    ExperimentConfig,
    ExperimentReport,
    SimError,
    bias,
    desk_config,
    emit_report,
    load_report,
    paper_config,
    pearson_r,
    run_exp1,
    run_exp2,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AlphaFit",
    "AlphaMlError",
    "AlphaStats",
    "BitrateResult",
    "CodecError",
    "ComparisonRecord",
    "CompressedContainer",
    "ConfusionMatrix",
    "ContextCounts",
    "CountMatrix",
    "DEFAULT_ALPHABET",
    "DNA_ALPHABET",
    "DependenceError",
    "DependenceProfile",
    "ExperimentConfig",
    "ExperimentReport",
    "FcmError",
    "HyperParams",
    "LaggedJoint",
    "SelectionResult",
    "SequenceError",
    "SimError",
    "SymbolSequence",
    "bias",
    "bitrate",
    "build_counts",
    "cohens_kappa",
    "compare",
    "compress",
    "cramers_v",
    "decompress",
    "desk_config",
    "dm_log_marginal",
    "emit_report",
    "fit_alpha",
    "generate",
    "grid_search",
    "lagged_joint",
    "lidstone_prob",
    "load_report",
    "log_likelihood_gradient",
    "marginals",
    "pami",
    "paper_config",
    "parse_sequence",
    "pearson_r",
    "profile",
    "read_sequence_file",
    "render_sequence",
    "run_exp1",
    "run_exp2",
    "select_k",
    "total_log_likelihood",
    "two_step_select",
    "write_sequence_file",
]
