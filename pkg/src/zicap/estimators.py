"""scikit-learn style front end.

The estimators are "fit" on a channel (a :class:`ZChannel`, a channel-file dict or
a path to one) and then answer questions about rate pairs::

    est = RateRegionEstimator(bound="capacity", u_card=3, restarts=32).fit(channel)
    est.frontier_          # (n, 2) array of frontier points
    est.predict([[0.3, 0.2]])   # membership in the traced region
"""
from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .channels import ZChannel, channel_from_dict, check_conditions, load_channel
from .optim import SearchConfig, default_lambda_grid
from .regions import BoundKind
from .search import PreconditionError, max_sum_rate, trace_frontier


def as_channel(X) -> ZChannel:
    if isinstance(X, ZChannel):
        return X
    if isinstance(X, dict):
        return channel_from_dict(X)
    if isinstance(X, (str, os.PathLike)):
        return load_channel(X)
    raise TypeError(f"cannot interpret {type(X).__name__} as a channel")


def _config(est) -> SearchConfig:
    return SearchConfig(seed=est.seed, restarts=est.restarts,
                        lambda_grid=default_lambda_grid(est.n_lambdas),
                        max_iters=est.max_iters, step_tol=est.step_tol,
                        q_card=est.q_card, u_card=est.u_card)


def _rate_pairs(X) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected rate pairs with 2 columns, got {X.shape[1]}")
    return X


class RateRegionEstimator(BaseEstimator):
    """Trace one of the rate-region bounds of a Z-interference channel.

    Parameters
    ----------
    bound : {"hk_inner", "thm4_outer", "thm1_outer", "capacity", "sato"}
    u_card, q_card : int or None
        Auxiliary alphabet sizes; ``None`` picks the largest size the bound allows
        (|Q| = 1 for the inner bound, which is hulled instead).
    restarts, n_lambdas, max_iters, step_tol, seed
        Search effort and reproducibility, see :class:`SearchConfig`.
    hull : bool or None
        Convexify the traced union; ``None`` hulls every bound except Sato.
    force : bool
        Trace the capacity region even when the channel conditions are not
        established.
    """

    def __init__(self, bound="thm4_outer", u_card=None, q_card=None, restarts=8,
                 n_lambdas=33, max_iters=300, step_tol=1e-9, seed=0, hull=None,
                 force=False):
        self.bound = bound
        self.u_card = u_card
        self.q_card = q_card
        self.restarts = restarts
        self.n_lambdas = n_lambdas
        self.max_iters = max_iters
        self.step_tol = step_tol
        self.seed = seed
        self.hull = hull
        self.force = force

    def fit(self, X, y=None):
        zc = as_channel(X)
        cfg = _config(self)
        kind = BoundKind(self.bound)
        extras = None
        if kind is BoundKind.CAPACITY:
            self.conditions_ = check_conditions(zc, cfg)
            extras = self.conditions_
        self.region_ = trace_frontier(zc, kind, cfg, extras=extras, force=self.force,
                                      hull=self.hull)
        self.frontier_ = self.region_.points()
        self.channel_ = zc
        return self

    def decision_function(self, X) -> np.ndarray:
        """Diagonal slack of each rate pair: positive inside, negative outside."""
        check_is_fitted(self, "region_")
        return np.array([self.region_.slack(r1, r2) for r1, r2 in _rate_pairs(X)])

    def predict(self, X) -> np.ndarray:
        """Whether each rate pair lies in the traced region (1e-9 tolerance)."""
        return self.decision_function(X) >= -1e-9


class SumCapacityEstimator(BaseEstimator):
    """Maximize the sum rate of the outer bound and certify it when possible."""

    def __init__(self, u_card=None, q_card=None, restarts=8, max_iters=300,
                 step_tol=1e-9, seed=0):
        self.u_card = u_card
        self.q_card = q_card
        self.restarts = restarts
        self.max_iters = max_iters
        self.step_tol = step_tol
        self.seed = seed

    def fit(self, X, y=None):
        zc = as_channel(X)
        cfg = SearchConfig(seed=self.seed, restarts=self.restarts, max_iters=self.max_iters,
                           step_tol=self.step_tol, q_card=self.q_card, u_card=self.u_card)
        self.report_ = max_sum_rate(zc, cfg)
        self.value_ = self.report_.value
        self.certified_ = self.report_.certified
        self.argmax_ = self.report_.argmax
        return self

    def predict(self, X) -> np.ndarray:
        """Whether each rate pair respects the sum-rate bound."""
        check_is_fitted(self, "value_")
        R = _rate_pairs(X)
        return R.sum(axis=1) <= self.value_ + 1e-9


__all__ = ["RateRegionEstimator", "SumCapacityEstimator", "PreconditionError", "as_channel"]
