"""scikit-learn style wrappers around the Garsia computations.

The "data" here is a single function on the circle (a
:class:`~garsia_kit.specs.FunctionSpec`, its JSON form, or a sampled
:class:`~garsia_kit.boundary.BoundaryFunction`), and the "samples" passed to
``transform`` are disk points.  Hyperparameters follow the usual
``get_params`` / ``set_params`` protocol so the wrappers compose with
``sklearn.base.clone`` and friends.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .boundary import BoundaryFunction, make_grid
from .errors import ParameterError
from .garsia import PhiEvaluator, SearchConfig, garsia_norm
from .geometry import lipschitz_garsia_norm
from .specs import FunctionSpec, parse_spec

__all__ = ["GarsiaNormEstimator", "GarsiaTransformer", "LipschitzGarsiaEstimator", "check_disk_points"]


def check_disk_points(Z) -> np.ndarray:
    """Coerce disk points to a complex vector.

    Accepts complex arrays of shape ``(n,)`` or real arrays of shape ``(n, 2)``
    holding ``(r, theta)`` rows.  Every point must satisfy ``|z| < 1``.
    """
    Z = np.asarray(Z)
    if np.iscomplexobj(Z):
        z = Z.reshape(-1)
    elif Z.ndim == 2 and Z.shape[1] == 2:
        z = Z[:, 0] * np.exp(1j * Z[:, 1])
    elif Z.ndim == 1:
        z = Z.astype(complex)
    else:
        raise ParameterError(f"expected complex (n,) or polar (n, 2) points, got shape {Z.shape}")
    if not np.all(np.abs(z) < 1.0):
        raise ParameterError("all points must lie inside the unit disk")
    return z


def _coerce_function(X):
    if isinstance(X, (FunctionSpec, BoundaryFunction)):
        return X
    if isinstance(X, dict):
        return parse_spec(X)
    raise ParameterError(f"cannot interpret {type(X).__name__} as a function on the circle")


class _SearchMixin:
    def _config(self) -> SearchConfig:
        return SearchConfig(
            n_r=self.n_r, n_theta=self.n_theta, m_max=self.m_max, delta_att=self.delta_att
        )

    def _check_fitted(self):
        if not hasattr(self, "estimate_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")


class GarsiaNormEstimator(_SearchMixin, BaseEstimator):
    """Estimate ``||f||_G`` and its attainment verdict.

    Parameters
    ----------
    n_r, n_theta : int
        Coarse polar search grid.
    m_max : int
        Deepest radial probe ``1 - 2**-m_max``.
    delta_att : float
        Attainment margin in radius.
    log2_n : int
        Grid exponent used when a spec must be sampled.

    Attributes
    ----------
    estimate_ : NormEstimate
    lower_bound_ : float
    argmax_ : DiskPoint
    attained_ : Verdict
    """

    def __init__(self, n_r=64, n_theta=256, m_max=24, delta_att=0.02, log2_n=14):
        self.n_r = n_r
        self.n_theta = n_theta
        self.m_max = m_max
        self.delta_att = delta_att
        self.log2_n = log2_n

    def fit(self, X, y=None):
        f = _coerce_function(X)
        self.estimate_ = garsia_norm(f, self._config(), make_grid(self.log2_n))
        self.lower_bound_ = self.estimate_.lower_bound
        self.argmax_ = self.estimate_.argmax
        self.attained_ = self.estimate_.attained
        return self

    def score(self, X=None, y=None) -> float:
        """The fitted lower bound (larger means more oscillation)."""
        self._check_fitted()
        return self.lower_bound_


class LipschitzGarsiaEstimator(GarsiaNormEstimator):
    """Estimate ``||f||_{G,alpha}`` for ``0 < alpha < 1/2``."""

    def __init__(self, alpha=0.25, n_r=64, n_theta=256, m_max=24, delta_att=0.02, log2_n=14):
        super().__init__(n_r=n_r, n_theta=n_theta, m_max=m_max, delta_att=delta_att, log2_n=log2_n)
        self.alpha = alpha

    def fit(self, X, y=None):
        f = _coerce_function(X)
        self.estimate_ = lipschitz_garsia_norm(f, self.alpha, self._config(), make_grid(self.log2_n))
        self.lower_bound_ = self.estimate_.lower_bound
        self.argmax_ = self.estimate_.argmax
        self.attained_ = self.estimate_.attained
        return self


class GarsiaTransformer(TransformerMixin, BaseEstimator):
    """Map disk points to ``Phi_f`` values for a fitted function ``f``.

    ``fit`` takes the function; ``transform`` takes points and returns an
    ``(n, 1)`` array.
    """

    def __init__(self, method="auto", log2_n=14):
        self.method = method
        self.log2_n = log2_n

    def fit(self, X, y=None):
        self.evaluator_ = PhiEvaluator(_coerce_function(X), make_grid(self.log2_n), self.method)
        self.route_ = self.evaluator_.method
        return self

    def transform(self, Z):
        if not hasattr(self, "evaluator_"):
            raise NotFittedError("GarsiaTransformer is not fitted yet; call fit first")
        z = check_disk_points(Z)
        return np.atleast_1d(self.evaluator_(z)).reshape(-1, 1)
