"""Optimal quantile regression trees with kernel density estimates."""

from ._core import (
    Dataset,
    Density,
    Error,
    Model,
    SingleFit,
    Tree,
    crps,
    empirical_quantile,
    evaluate,
    evenly_spaced,
    fit_naive,
    fit_simultaneous,
    fit_single,
    kde_from_quantiles,
    mqe,
    nll,
    pinball_loss,
    scott_bandwidth,
    synth,
)

__all__ = [
    "Dataset",
    "Density",
    "Error",
    "Model",
    "SingleFit",
    "Tree",
    "crps",
    "empirical_quantile",
    "evaluate",
    "evenly_spaced",
    "fit_naive",
    "fit_simultaneous",
    "fit_single",
    "kde_from_quantiles",
    "mqe",
    "nll",
    "pinball_loss",
    "scott_bandwidth",
    "synth",
]
