"""Regression-based decomposition and diagnostics for Lord's paradox.

Thin wrapper over the C++ core. The main entry points:

    Dataset, Observation, BinningSpec
    compute_a1, compute_a2, conditional_effect_curve
    fit, predict, reverse_fit
    fit_submodel, fit_residual_stage, compose, run_supermodel
    dip_statistic, symmetry_test, unimodality_test,
    residual_diagnostics, variance_reduction_check
    generate, replicate_study, analyze, render_scatter_svg
"""

from ._paradoxlens import (  # noqa: F401
    BinningSpec,
    Dataset,
    FitResult,
    Observation,
    ParadoxlensError,
    ResidualStageFit,
    analyze,
    assign_bins,
    compose,
    compute_a1,
    compute_a2,
    conditional_effect_curve,
    default_binning,
    dip_statistic,
    fit,
    fit_residual_stage,
    fit_submodel,
    generate,
    predict,
    render_scatter_svg,
    replicate_study,
    residual_diagnostics,
    reverse_fit,
    run_supermodel,
    support_overlap,
    symmetry_test,
    unimodality_test,
    variance_reduction_check,
)

__all__ = [
    "BinningSpec",
    "Dataset",
    "FitResult",
    "Observation",
    "ParadoxlensError",
    "ResidualStageFit",
    "analyze",
    "assign_bins",
    "compose",
    "compute_a1",
    "compute_a2",
    "conditional_effect_curve",
    "default_binning",
    "dip_statistic",
    "fit",
    "fit_residual_stage",
    "fit_submodel",
    "generate",
    "predict",
    "render_scatter_svg",
    "replicate_study",
    "residual_diagnostics",
    "reverse_fit",
    "run_supermodel",
    "support_overlap",
    "symmetry_test",
    "unimodality_test",
    "variance_reduction_check",
]

__version__ = "0.1.0"
