"""Scikit-learn style facade: fit learns a table, transform applies it."""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .codec import codec_roundtrip
from .image_io import as_plane, resize_to_proxy
from .objective import rd_cost
from .optimizer import QwioConfig, optimize
from .tables import baseline_table


def _as_plane_list(X):
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [as_plane(X)], True
    planes = [as_plane(p) for p in X]
    if not planes:
        raise ValueError("need at least one plane")
    return planes, False


class QwioCompressor(BaseEstimator, TransformerMixin):
    """Learn an adaptive luminance quantization table, then compress.

    fit() downscales the training planes to the proxy resolution and
    searches band-scaled variants of the standard table for the lowest
    mean rate-distortion cost. transform() runs the codec round trip
    with the learned table. X is one 2-D plane or an iterable of them;
    transform mirrors the input's single/list shape.

    Attributes after fit: table_ (QuantTable), history_ (per-iteration
    cost trace), best_cost_ (final training objective value).
    """

    def __init__(
        self,
        population=32,
        iters=100,
        stall=15,
        gamma=math.pi / 2,
        epsilon=1e-12,
        bandwidth=0.5,
        sigma=0.05,
        lam=50.0,
        proxy=256,
        seed=0,
    ):
        self.population = population
        self.iters = iters
        self.stall = stall
        self.gamma = gamma
        self.epsilon = epsilon
        self.bandwidth = bandwidth
        self.sigma = sigma
        self.lam = lam
        self.proxy = proxy
        self.seed = seed

    def _config(self) -> QwioConfig:
        return QwioConfig(
            population_n=self.population,
            max_iters=self.iters,
            stall_limit=self.stall,
            gamma=self.gamma,
            epsilon=self.epsilon,
            kernel_bandwidth=self.bandwidth,
            mutation_sigma=self.sigma,
            lam=self.lam,
            seed=self.seed,
        )

    def fit(self, X, y=None):
        planes, _ = _as_plane_list(X)
        proxies = [resize_to_proxy(p, self.proxy) for p in planes]
        self.table_, self.history_ = optimize(proxies, baseline_table(), self._config())
        self.best_cost_ = self.history_[-1].best_cost
        return self

    def _check_fitted(self):
        if not hasattr(self, "table_"):
            raise NotFittedError("call fit before using this estimator")

    def transform(self, X):
        """Reconstructions after an encode/decode pass with table_."""
        self._check_fitted()
        planes, single = _as_plane_list(X)
        recs = [codec_roundtrip(p, self.table_)[0] for p in planes]
        return recs[0] if single else recs

    def evaluate(self, X):
        """Full-resolution RDReport for each plane under table_."""
        self._check_fitted()
        planes, single = _as_plane_list(X)
        reports = [rd_cost(p, self.table_, self.lam)[1] for p in planes]
        return reports[0] if single else reports

    def score(self, X, y=None):
        """Negative mean rate-distortion cost (higher is better)."""
        self._check_fitted()
        planes, _ = _as_plane_list(X)
        return -float(
            np.mean([rd_cost(p, self.table_, self.lam)[0] for p in planes])
        )
