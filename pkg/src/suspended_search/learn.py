"""Regularized logistic regression and ROC analysis.

Two trainers share the sigmoid link p = 1 / (1 + exp(-score)):

* ``train_l1_logistic`` - sparse linear model, summed log-loss plus
  ``lam * ||beta||_1`` with an unpenalized intercept, solved by proximal
  Newton steps (coordinate descent on the weighted least-squares model)
  with a backtracking line search.
* ``train_kernel_logistic`` - dual model over the quadratic kernel
  ``(1 + x.y)**2`` with penalty ``lam * alpha.alpha``, solved by L-BFGS.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

SIGN_CONVENTION = "sigmoid(+score)"


class DegenerateDataError(ValueError):
    """Training data that cannot define a classifier (e.g. one class only)."""


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y have different row counts")
        if not self.feature_names:
            self.feature_names = [f"x{k}" for k in range(self.X.shape[1])]
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names does not match the column count")

    def __len__(self):
        return self.X.shape[0]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], list(self.feature_names))


def binary_labels(y) -> np.ndarray:
    """Map {-1, +1} or {0, 1} labels to {0, 1}."""
    y = np.asarray(y, dtype=float).ravel()
    vals = set(np.unique(y).tolist())
    if vals <= {0.0, 1.0}:
        return y.copy()
    if vals <= {-1.0, 1.0}:
        return (y > 0).astype(float)
    raise ValueError(f"labels must be binary, got {sorted(vals)}")


def signed_labels(y) -> np.ndarray:
    return 2.0 * binary_labels(y) - 1.0


def _require_two_classes(y01: np.ndarray) -> None:
    if y01.size == 0 or y01.min() == y01.max():
        raise DegenerateDataError("training data must contain both classes")


@dataclass
class LinearModel:
    intercept: float
    coefficients: np.ndarray
    lam: float
    feature_names: list = field(default_factory=list)
    n_iter: int = 0
    loss_history: list = field(default_factory=list, repr=False)

    def decision_function(self, X) -> np.ndarray:
        return self.intercept + np.atleast_2d(X) @ self.coefficients

    @property
    def nonzero(self) -> int:
        return int(np.count_nonzero(self.coefficients))


@dataclass
class KernelModel:
    support_points: np.ndarray
    alphas: np.ndarray
    lam: float
    feature_names: list = field(default_factory=list)
    n_iter: int = 0
    loss_history: list = field(default_factory=list, repr=False)

    def decision_function(self, X) -> np.ndarray:
        return quadratic_kernel(np.atleast_2d(X), self.support_points) @ self.alphas


@dataclass(frozen=True)
class ConstantModel:
    """Predicts one fixed probability for every row; a stand-in for tests and dry runs."""

    probability: float

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must lie in [0, 1]")

    def decision_function(self, X) -> np.ndarray:
        p = self.probability
        with np.errstate(divide="ignore"):
            z = np.log(p) - np.log1p(-p)
        return np.full(np.atleast_2d(X).shape[0], z)


# --- L1 linear -------------------------------------------------------------

def _softplus(z):
    return np.logaddexp(0.0, z)


def logistic_loss(X, y01, intercept, beta) -> float:
    """Summed negative log-likelihood of a linear logistic model."""
    eta = intercept + X @ beta
    return float(np.sum(_softplus(eta) - y01 * eta))


def logistic_loss_grad(X, y01, intercept, beta):
    """Gradient of :func:`logistic_loss` as ``(d_intercept, d_beta)``."""
    r = expit(intercept + X @ beta) - y01
    return float(r.sum()), X.T @ r


def l1_objective(X, y01, intercept, beta, lam) -> float:
    return logistic_loss(X, y01, intercept, beta) + lam * float(np.abs(beta).sum())


def _soft(v, t):
    return np.sign(v) * max(abs(v) - t, 0.0)


def _cd_weighted_lasso(X, sq_cols_w, w, z, b0, beta, lam, tol, max_sweeps):
    """Coordinate descent on 0.5*sum w (z - b0 - X beta)^2 + lam*|beta|_1."""
    beta = beta.copy()
    resid = z - b0 - X @ beta
    wsum = w.sum()
    for _ in range(max_sweeps):
        delta = 0.0
        step = float(np.dot(w, resid) / wsum)
        b0 += step
        resid -= step
        delta = max(delta, abs(step))
        for j in range(X.shape[1]):
            a = sq_cols_w[j]
            if a <= 0.0:
                continue
            xj = X[:, j]
            old = beta[j]
            rho = float(np.dot(w * xj, resid)) + a * old
            new = _soft(rho, lam) / a
            if new != old:
                resid -= xj * (new - old)
                beta[j] = new
                delta = max(delta, abs(new - old))
        if delta < tol:
            break
    return b0, beta


def train_l1_logistic(data: Dataset, lam: float, tol: float = 1e-6, max_iter: int = 200) -> LinearModel:
    """Sparse logistic regression: summed log-loss + lam * ||beta||_1.

    Iterates until no parameter moves by more than ``tol``.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    X, y = data.X, binary_labels(data.y)
    _require_two_classes(y)
    n, d = X.shape
    ybar = y.mean()
    b0 = float(np.log(ybar / (1.0 - ybar)))
    beta = np.zeros(d)
    obj = l1_objective(X, y, b0, beta, lam)
    history = [obj]
    it = 0
    for it in range(1, max_iter + 1):
        eta = b0 + X @ beta
        p = expit(eta)
        w = np.maximum(p * (1.0 - p), 1e-10)
        z = eta - (p - y) / w
        sq = (w[:, None] * X * X).sum(axis=0)
        nb0, nbeta = _cd_weighted_lasso(X, sq, w, z, b0, beta, lam, tol * 0.1, 1000)
        d0, dbeta = nb0 - b0, nbeta - beta
        g0, gb = logistic_loss_grad(X, y, b0, beta)
        decrease = g0 * d0 + float(gb @ dbeta) + lam * (np.abs(nbeta).sum() - np.abs(beta).sum())
        t = 1.0
        while True:
            cb0, cbeta = b0 + t * d0, beta + t * dbeta
            cobj = l1_objective(X, y, cb0, cbeta, lam)
            if cobj <= obj + 1e-4 * t * decrease or t < 1e-10:
                break
            t *= 0.5
        if cobj > obj:
            break
        move = max(abs(cb0 - b0), float(np.max(np.abs(cbeta - beta), initial=0.0)))
        b0, beta, obj = cb0, cbeta, cobj
        history.append(obj)
        if move < tol:
            break
    return LinearModel(b0, beta, float(lam), list(data.feature_names), it, history)


# --- quadratic-kernel dual -------------------------------------------------

def quadratic_kernel(A, B) -> np.ndarray:
    return (1.0 + np.atleast_2d(A) @ np.atleast_2d(B).T) ** 2


def kernel_objective(K, ys, alpha, lam) -> float:
    """sum log(1 + exp(-y * K alpha)) + lam * alpha.alpha."""
    m = ys * (K @ alpha)
    return float(np.sum(_softplus(-m)) + lam * alpha @ alpha)


def kernel_gradient(K, ys, alpha, lam) -> np.ndarray:
    m = ys * (K @ alpha)
    return -(K @ (ys * expit(-m))) + 2.0 * lam * alpha


def train_kernel_logistic(data: Dataset, lam: float, tol: float = 1e-5, max_iter: int = 20000) -> KernelModel:
    """Fit dual weights by L-BFGS until the gradient max-norm is below ``tol``."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    ys = signed_labels(data.y)
    _require_two_classes(ys)
    X = data.X
    K = quadratic_kernel(X, X)
    history = []

    def fun(a):
        return kernel_objective(K, ys, a, lam), kernel_gradient(K, ys, a, lam)

    alpha = np.zeros(len(ys))
    history.append(fun(alpha)[0])
    res = minimize(
        fun, alpha, jac=True, method="L-BFGS-B",
        callback=lambda a: history.append(kernel_objective(K, ys, a, lam)),
        options={"maxiter": max_iter, "gtol": tol, "ftol": 0.0, "maxcor": 30},
    )
    return KernelModel(X.copy(), res.x, float(lam), list(data.feature_names), int(res.nit), history)


# --- prediction and evaluation ---------------------------------------------

def predict(model, X) -> np.ndarray | float:
    """Probability of the positive class; scalar for a single feature vector."""
    arr = np.asarray(X, dtype=float)
    probs = expit(model.decision_function(arr))
    return float(probs[0]) if arr.ndim == 1 else probs


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float


def roc_auc(scores, labels) -> RocCurve:
    """ROC by sweeping the threshold down through distinct scores.

    Tied scores move together, so the curve takes a diagonal step through
    them and the trapezoidal area equals the Mann-Whitney statistic.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = binary_labels(labels)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    pos = y.sum()
    neg = y.size - pos
    if pos == 0 or neg == 0:
        raise DegenerateDataError("ROC needs both classes")
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    tpr = np.r_[0.0, tps / pos]
    fpr = np.r_[0.0, fps / neg]
    thresholds = np.r_[np.inf, s[last]]
    # trapezoid area in exact integer arithmetic, scaled by 2 * pos * neg
    tp_int = [0] + [int(v) for v in tps]
    fp_int = [0] + [int(v) for v in fps]
    twice = sum((fp_int[k + 1] - fp_int[k]) * (tp_int[k + 1] + tp_int[k]) for k in range(len(tp_int) - 1))
    auc = twice / (2 * int(pos) * int(neg))
    return RocCurve(fpr, tpr, thresholds, auc)


def pairwise_auc(scores, labels) -> float:
    """P(score of a positive > score of a negative) + 0.5 P(tie), by enumeration."""
    s = np.asarray(scores, dtype=float).ravel()
    y = binary_labels(labels)
    sp, sn = s[y == 1], s[y == 0]
    if sp.size == 0 or sn.size == 0:
        raise DegenerateDataError("AUC needs both classes")
    twice = 0
    for a in sp:
        twice += 2 * int(np.sum(a > sn)) + int(np.sum(a == sn))
    return twice / (2 * sp.size * sn.size)
