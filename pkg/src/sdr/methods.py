"""Uniform fit/predict pipeline over all benchmark methods.

Each method fits on a centered training split; the balance hyperparameter of
the gamma-bearing methods is chosen by validation MSE over a log grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, FittedReducer, reduce
from .intrinsic import (LspcaOptions, SppcaOptions, fit_barshan_extended,
                        fit_lspca, fit_pls_extended, fit_sppca)
from .regression import RegressionModel, mse, ols_fit
from .wrappers import fit_bair, fit_pcps, fit_pv

#: Benchmark roster: the raw-feature baseline, classic PCA, and the
#: supervised reducers (PLS and Barshan run as their balanced versions).
DEFAULT_METHODS = ("ols", "pca", "bair", "pv", "pcps",
                   "pls", "barshan", "lspca", "sppca")

#: Validation grid for the balance hyperparameter.
DEFAULT_GAMMA_GRID = (0.0,) + tuple(np.logspace(-4.0, 4.0, 15)) + (math.inf,)

GAMMA_METHODS = ("pls", "barshan", "lspca")


def pca_reducer(data: Dataset, k: int) -> FittedReducer:
    from .linalg import sym_eig_topk
    if k > data.p:
        raise ValueError(f"K={k} exceeds P={data.p}")
    return FittedReducer("pca", k, basis=sym_eig_topk(data.X.T @ data.X, k).vectors)


@dataclass
class MethodFit:
    """A fitted method: optional reducer plus the downstream linear model."""

    method: str
    reducer: FittedReducer | None
    model: RegressionModel
    hyperparams: dict

    def predict(self, x: np.ndarray) -> np.ndarray:
        z = x if self.reducer is None else reduce(self.reducer, x)
        return self.model.predict(z)

    def evaluate(self, data: Dataset) -> float:
        return mse(self.predict(data.X), data.y)


def with_model(method: str, reducer: FittedReducer, train: Dataset,
                extra: dict | None = None) -> MethodFit:
    z = reduce(reducer, train.X)
    model = ols_fit(z, train.y)
    hyper = dict(reducer.hyperparams)
    if extra:
        hyper.update(extra)
    return MethodFit(method=method, reducer=reducer, model=model, hyperparams=hyper)


def _tune_gamma(fitter, method: str, train: Dataset, val: Dataset,
                grid) -> MethodFit:
    if val is None:
        raise ValueError(f"{method} needs a validation split to choose gamma")
    best = None
    for gamma in grid:
        fit = with_model(method, fitter(gamma), train)
        val_mse = fit.evaluate(val)
        if best is None or val_mse < best[0]:
            best = (val_mse, gamma, fit)
    val_mse, gamma, fit = best
    fit.hyperparams.update({"gamma": gamma, "val_mse": val_mse})
    return fit


def fit_method(name: str, train: Dataset, val: Dataset | None, k: int, *,
               score: str = "pearson",
               gamma_grid=DEFAULT_GAMMA_GRID,
               lspca_opts: LspcaOptions | None = None,
               sppca_opts: SppcaOptions | None = None) -> MethodFit:
    """Fit one benchmark method on centered data.

    ``train`` and ``val`` must share the centering transform.  ``val`` is
    only consulted by the gamma-bearing methods.
    """
    if name == "ols":
        model = ols_fit(train.X, train.y)
        return MethodFit("ols", None, model, {})
    if name == "pca":
        return with_model("pca", pca_reducer(train, k), train)
    if name == "bair":
        return with_model("bair", fit_bair(train, k, score=score), train)
    if name == "pv":
        return with_model("pv", fit_pv(train, k, score=score), train)
    if name == "pcps":
        return with_model("pcps", fit_pcps(train, k, score=score), train)
    if name == "pls":
        return _tune_gamma(lambda g: fit_pls_extended(train, k, g),
                           "pls", train, val, gamma_grid)
    if name == "barshan":
        return _tune_gamma(lambda g: fit_barshan_extended(train, k, g),
                           "barshan", train, val, gamma_grid)
    if name == "lspca":
        grid = [g for g in gamma_grid if g > 0]  # reconstruction weight must be positive
        return _tune_gamma(lambda g: fit_lspca(train, k, g, lspca_opts)[0],
                           "lspca", train, val, grid)
    if name == "sppca":
        return with_model("sppca", fit_sppca(train, k, sppca_opts), train)
    raise ValueError(f"unknown method {name!r}")
