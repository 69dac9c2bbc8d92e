"""Estimator-style wrappers around the spectral splitting and the eta routes."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .eta import eta_heat, eta_smeared, eta_zeta
from .spectral import DEFAULT_CLUSTER_TOL, RaySpec, frequency_split

__all__ = ["FrequencySplitter", "EtaEstimator"]


class FrequencySplitter(TransformerMixin, BaseEstimator):
    """Split vectors into positive, negative and generalized-kernel parts of ``D``.

    Parameters
    ----------
    ray_angle : float
        Direction of the spectral cut for the square root of ``D @ D``.
    cluster_tol : float
        Eigenvalue clustering tolerance.

    Attributes
    ----------
    p_gt_, p_lt_, p_0_ : ndarray
        Projectors fitted on ``D``.
    """

    def __init__(self, ray_angle: float = np.pi, cluster_tol: float = DEFAULT_CLUSTER_TOL):
        self.ray_angle = ray_angle
        self.cluster_tol = cluster_tol

    def fit(self, D, y=None):
        projectors, _ = frequency_split(D, RaySpec(self.ray_angle), self.cluster_tol)
        self.p_gt_, self.p_lt_, self.p_0_ = projectors
        self.n_features_in_ = self.p_gt_.shape[0]
        return self

    def transform(self, X):
        """Stack ``(p_gt x, p_lt x, p_0 x)`` along a new last axis for each row ``x`` of ``X``."""
        check_is_fitted(self, "p_gt_")
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        return np.stack([X @ self.p_gt_.T, X @ self.p_lt_.T, X @ self.p_0_.T], axis=-1)


class EtaEstimator(BaseEstimator):
    """Eta invariant of a Dirac-type matrix by one of three routes.

    Parameters
    ----------
    method : {"zeta", "heat_fit", "smeared"}
    ray_angle : float
    ansatz : {"extended", "minimal"}
        Small-time ansatz for the two fitting routes.
    grid : array_like, optional
        Time (or smearing) grid for the fitting routes; a default tied to
        the truncation order is used when omitted.

    Attributes
    ----------
    eta_, xi_ : complex
    h_ : int
    error_estimate_ : float
    result_ : EtaResult
    """

    def __init__(self, method: str = "zeta", ray_angle: float = np.pi, ansatz: str = "extended", grid=None):
        self.method = method
        self.ray_angle = ray_angle
        self.ansatz = ansatz
        self.grid = grid

    def fit(self, D, y=None):
        ray = RaySpec(self.ray_angle)
        if self.method == "zeta":
            result = eta_zeta(D, ray)
        elif self.method == "heat_fit":
            result = eta_heat(D, ray, self.grid, self.ansatz)
        elif self.method == "smeared":
            result = eta_smeared(D, ray, self.grid, self.ansatz)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.result_ = result
        self.eta_, self.h_, self.xi_ = result.eta, result.h, result.xi
        self.error_estimate_ = result.error_estimate
        return self

    def predict(self, X=None):
        """Return ``eta_`` (the estimator summarises a single operator)."""
        check_is_fitted(self, "eta_")
        return self.eta_
