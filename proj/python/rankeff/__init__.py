"""Nonparametric multivariate two-sample rank tests with missing data."""

from ._core import (
    RankEffError,
    __version__,
    analyze,
    analyze_file,
    anova_test,
    chisq_upper_tail,
    covariance,
    estimate_effects,
    midranks,
    parse_dataset,
    simulate,
    simulate_config,
    wald_test,
)

__all__ = [
    "RankEffError",
    "__version__",
    "analyze",
    "analyze_file",
    "anova_test",
    "chisq_upper_tail",
    "covariance",
    "estimate_effects",
    "midranks",
    "parse_dataset",
    "simulate",
    "simulate_config",
    "wald_test",
]
