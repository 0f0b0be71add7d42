"""scikit-learn style wrappers around the functional API.

The estimators take a single feature column of reals (bases or values of x).
Fitting only validates the input; the computations are deterministic and need
no training data.
"""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dimension import DEFAULT_N, DEFAULT_n, dim_Uq, dim_Ux
from .expansions import greedy_expand, quasi_greedy_expand
from .precision import DEFAULT_PRECISION_BITS
from .slices import Regime, classify

__all__ = ["DimensionStaircase", "UnivoqueRegimeClassifier", "ExpansionTransformer"]


def _column(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got {X.shape[1]}")
        X = X[:, 0]
    return X


class DimensionStaircase(TransformerMixin, BaseEstimator):
    """Dimension brackets of psi(q) = dim U_q or phi(x) = dim U(x).

    Parameters
    ----------
    kind : {"psi", "phi"}, default="psi"
        "psi" reads the column as bases, "phi" as values of x.
    M : int, default=1
        Largest digit.
    N : int, default=16
        alpha(q) truncation of the window constraint.
    n : int, default=48
        Counting length, used by ``method="difference"``.
    method : {"spectral", "difference"}, default="spectral"
        Entropy estimator.

    Attributes
    ----------
    n_features_in_ : int
        Always 1.

    Examples
    --------
    >>> DimensionStaircase(kind="psi").fit_transform([[2.0]])[0, 0] > 0.99
    True
    """

    def __init__(self, kind="psi", M=1, N=DEFAULT_N, n=DEFAULT_n, method="spectral"):
        self.kind = kind
        self.M = M
        self.N = N
        self.n = n
        self.method = method

    def fit(self, X, y=None):
        """Validate ``X`` and the parameters.

        Parameters
        ----------
        X : array-like of shape (n_samples, 1) or (n_samples,)
            Bases or values of x.
        y : None
            Ignored.

        Returns
        -------
        self : DimensionStaircase
        """
        _column(X)
        if self.kind not in ("psi", "phi"):
            raise ValueError("kind must be 'psi' or 'phi'")
        if self.M < 1:
            raise ValueError("M must be at least 1")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        """Return an array of shape (n_samples, 2) holding [lower, upper]."""
        check_is_fitted(self)
        f = dim_Uq if self.kind == "psi" else dim_Ux
        rows = []
        for t in _column(X):
            est = f(float(t), self.N, self.n, self.M, method=self.method)
            rows.append((est.lower, est.upper))
        return np.asarray(rows, dtype=np.float64).reshape(-1, 2)


class UnivoqueRegimeClassifier(ClassifierMixin, BaseEstimator):
    """Predict the regime of U(x): full_dim, positive_dim, countable or singleton.

    There is nothing to learn; ``fit`` records the label set.

    Parameters
    ----------
    M : int, default=1
        Largest digit.
    precision_bits : int, default=128
        Working precision for comparisons with x_KL and x_G.

    Attributes
    ----------
    classes_ : ndarray of str
        Regime labels in increasing order of x.
    """

    def __init__(self, M=1, precision_bits=DEFAULT_PRECISION_BITS):
        self.M = M
        self.precision_bits = precision_bits

    def fit(self, X, y=None):
        _column(X)
        self.classes_ = np.array([r.value for r in Regime])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self)
        return np.array([classify(float(x), self.M, self.precision_bits).regime.value
                         for x in _column(X)])


class ExpansionTransformer(TransformerMixin, BaseEstimator):
    """Map values of x to the first ``n_digits`` digits of their q-expansion.

    Parameters
    ----------
    q : float or str, default="1.8"
        Base; strings are read as exact decimals.
    n_digits : int, default=16
        Number of digits per row.
    kind : {"greedy", "quasi"}, default="greedy"
        Expansion type.
    M : int, default=1
        Largest digit.
    """

    def __init__(self, q="1.8", n_digits=16, kind="greedy", M=1):
        self.q = q
        self.n_digits = n_digits
        self.kind = kind
        self.M = M

    def fit(self, X, y=None):
        _column(X)
        if self.kind not in ("greedy", "quasi"):
            raise ValueError("kind must be 'greedy' or 'quasi'")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        """Return an integer array of shape (n_samples, n_digits)."""
        check_is_fitted(self)
        f = greedy_expand if self.kind == "greedy" else quasi_greedy_expand
        rows = [f(float(x), self.q, self.n_digits, self.M).digits.digits for x in _column(X)]
        return np.asarray(rows, dtype=np.int64).reshape(-1, self.n_digits)
