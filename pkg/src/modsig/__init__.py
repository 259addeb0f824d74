"""Exact signatures of semicoherent systems and their modular composition."""

from .errors import (
    SignatureError,
    InvalidSizeError,
    InvalidParameterError,
    InvalidSystemError,
    DomainError,
    ParseError,
    ValidationError,
)
from .structure import (
    StructureFunction,
    projection,
    is_semicoherent,
    make_series,
    make_parallel,
    make_k_out_of_n,
    identity,
    conjunction_structure,
    dual,
    multilinear_extension,
    Partition,
    ModularSystem,
    compose,
    monotone_functions,
    semicoherent_structures,
)
from .quality import (
    OrderDistribution,
    block_product,
    interleave,
    symmetrize,
    RelativeQualityFunction,
    q_from_order_distribution,
    q_symmetric,
    marginal_quality,
    marginals,
    is_symmetric,
    is_partition_symmetric,
    DecompositionCoefficients,
    NotDecomposable,
    check_decomposable,
    is_decomposable,
    event_probability,
    hypergeometric_coefficients,
    is_partition_exchangeable,
)
from .signatures import (
    SignatureVector,
    TailSignatureVector,
    structural_signature,
    structural_tail_signature,
    probability_signature,
    tail_probability_signature,
    tail_to_signature,
    signature_to_tail,
    cumulative,
    tail_from_cumulative,
)
from .modular import (
    compose_tail,
    compose_cumulative,
    series_convolution,
    boolean_tail_shortcut,
    parallel_threshold_tail,
    system_level_system,
    component_level_system,
    system_level_redundancy,
    component_level_redundancy,
    RedundancyReport,
    redundancy_report,
    conjunction_system,
    recover_q_via_conjunctions,
    CompositionReport,
    module_tails,
    verify_composition_theorem,
)
from .oracle import (
    failure_index,
    brute_force_signature,
    LifetimeSampler,
    MonteCarloSignature,
    monte_carlo_signature,
    order_distribution_of,
)
from .dsl import elaborate, load_distribution, load_system, parse_structure

__all__ = [
    "CompositionReport",
    "DecompositionCoefficients",
    "DomainError",
    "InvalidParameterError",
    "InvalidSizeError",
    "InvalidSystemError",
    "LifetimeSampler",
    "ModularSystem",
    "MonteCarloSignature",
    "NotDecomposable",
    "OrderDistribution",
    "ParseError",
    "Partition",
    "RedundancyReport",
    "RelativeQualityFunction",
    "SignatureError",
    "SignatureVector",
    "StructureFunction",
    "TailSignatureVector",
    "ValidationError",
    "block_product",
    "boolean_tail_shortcut",
    "brute_force_signature",
    "check_decomposable",
    "component_level_redundancy",
    "component_level_system",
    "compose",
    "compose_cumulative",
    "compose_tail",
    "conjunction_structure",
    "conjunction_system",
    "cumulative",
    "dual",
    "elaborate",
    "event_probability",
    "failure_index",
    "hypergeometric_coefficients",
    "identity",
    "interleave",
    "is_decomposable",
    "is_partition_exchangeable",
    "is_partition_symmetric",
    "is_semicoherent",
    "is_symmetric",
    "load_distribution",
    "load_system",
    "make_k_out_of_n",
    "make_parallel",
    "make_series",
    "marginal_quality",
    "marginals",
    "module_tails",
    "monotone_functions",
    "monte_carlo_signature",
    "multilinear_extension",
    "order_distribution_of",
    "parallel_threshold_tail",
    "parse_structure",
    "probability_signature",
    "projection",
    "q_from_order_distribution",
    "q_symmetric",
    "recover_q_via_conjunctions",
    "redundancy_report",
    "semicoherent_structures",
    "series_convolution",
    "signature_to_tail",
    "structural_signature",
    "structural_tail_signature",
    "symmetrize",
    "system_level_redundancy",
    "system_level_system",
    "tail_from_cumulative",
    "tail_probability_signature",
    "tail_to_signature",
    "verify_composition_theorem",
]
