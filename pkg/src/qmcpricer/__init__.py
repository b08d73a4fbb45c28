"""Quasi-Monte Carlo pricing with regression-based orthogonal transforms."""

from .brownian_max import (
    BarrierCoefficients,
    DriftedBMParams,
    QuadratureError,
    adaptive_simpson,
    barrier_coefficients,
    conditional_exceed_prob,
    indicator_moment,
    prob_max_exceeds,
    weighted_max_expectation,
)
from .harness import (
    BatchStats,
    ExperimentConfig,
    RawRow,
    UnsupportedCombinationError,
    run_experiment,
    timing_report,
    write_raw_csv,
    write_summary_csv,
)
from .lt import LtConfig, LtResult, lt_transform, payoff_gradient_at_zero
from .payoffs import (
    AsianCall,
    AsianUpIn,
    BasketAsianCall,
    DigitalUpIn,
    GbmParams,
    basket_paths,
    gbm_path,
    payoff,
)
from .regression import (
    LogExpPayoffSpec,
    RegressionVector,
    VarianceReport,
    asian_coefficients,
    asian_spec,
    asian_variance_report,
    basket_spec,
    exact_linear_chain,
    logexp_coefficients,
    regression_chain,
    regression_transform,
    variance_report,
    variance_report_continuum,
)
from .rng import (
    apply_shift,
    inv_normal_cdf,
    max_dimension,
    normal_block,
    normal_vector,
    shift_vector,
    sobol_block,
    sobol_point,
)
from .transforms import (
    BasketBridgeConstruction,
    BasketChainConstruction,
    BasketCovSpec,
    BasketForwardConstruction,
    BasketPcaConstruction,
    BrownianBridgeConstruction,
    ChainConstruction,
    ForwardConstruction,
    HouseholderReflection,
    PcaConstruction,
    TransformChain,
    apply_householder,
    basket_construct,
    basket_forward_matrix,
    complete_first_k_columns,
    construct_path,
    construction_matrix,
    householder_from_target,
    jacobi_eigh,
    path_construction,
    pca_factors,
)

__version__ = "0.1.0"
