"""Polar-coded multilevel lattices over the Z / 2Z / ... / 2^(r-1)Z chain.

Construction, quantized channel evolution, analytic performance bounds, and
a deterministic Monte Carlo harness, with a command line front end.
"""

__version__ = "0.1.0"

from .bounds import (
    EpsilonTerms,
    PerformanceReport,
    epsilon_terms,
    performance_report,
    theorem_bound,
    top_level_block_error,
    union_bound,
    vnr_gap_db,
)
from .channel import (
    IntegrationError,
    Mod2AwgnChannel,
    conditional_pdf,
    gaussian_entropy,
    llr,
    mod_channel_capacity,
    partition_capacity,
    sample_observation,
)
from .lattice import (
    ConstructionDLattice,
    DesignResult,
    InfeasibleDesignError,
    MultistageResult,
    NestingReport,
    design_lattice,
    lattice_encode,
    log2_volume,
    multistage_decode,
    verify_nested,
    vnr,
    vnr_db,
)
from .polar import (
    BitChannelMetrics,
    PolarCode,
    code_error_bound,
    encode,
    evolve_metrics,
    sc_decode,
    select_free_set,
)
from .quantize import (
    DiscreteBms,
    QuantizationConfig,
    bms_bhattacharyya,
    bms_capacity,
    degrading_merge,
    discretize_channel,
    polarize_minus,
    polarize_plus,
)
from .sim import (
    RunRecord,
    SimResult,
    TrialConfig,
    emit_report,
    read_report,
    run_code_sim,
    run_lattice_sim,
    sigma_for_vnr,
    single_record,
    sweep_vnr,
    wilson_interval,
)

__all__ = [
    "__version__",
    # channel
    "IntegrationError",
    "Mod2AwgnChannel",
    "conditional_pdf",
    "gaussian_entropy",
    "llr",
    "mod_channel_capacity",
    "partition_capacity",
    "sample_observation",
    # quantized channels
    "DiscreteBms",
    "QuantizationConfig",
    "bms_bhattacharyya",
    "bms_capacity",
    "degrading_merge",
    "discretize_channel",
    "polarize_minus",
    "polarize_plus",
    # polar codes
    "BitChannelMetrics",
    "PolarCode",
    "code_error_bound",
    "encode",
    "evolve_metrics",
    "sc_decode",
    "select_free_set",
    # lattices
    "ConstructionDLattice",
    "DesignResult",
    "InfeasibleDesignError",
    "MultistageResult",
    "NestingReport",
    "design_lattice",
    "lattice_encode",
    "log2_volume",
    "multistage_decode",
    "verify_nested",
    "vnr",
    "vnr_db",
    # bounds
    "EpsilonTerms",
    "PerformanceReport",
    "epsilon_terms",
    "performance_report",
    "theorem_bound",
    "top_level_block_error",
    "union_bound",
    "vnr_gap_db",
    # simulation
    "RunRecord",
    "SimResult",
    "TrialConfig",
    "emit_report",
    "read_report",
    "run_code_sim",
    "run_lattice_sim",
    "sigma_for_vnr",
    "single_record",
    "sweep_vnr",
    "wilson_interval",
]
