"""Soft-margin SVM trained by sequential minimal optimization.

Solves the usual dual problem (minimize 0.5*a'Qa - sum(a) subject to
y'a = 0 and 0 <= a <= C, with Q_ij = y_i y_j K_ij) by repeatedly
optimizing the maximal-violating pair of coefficients in closed form.
The stopping rule bounds every KKT violation by the requested tolerance,
which the test suite checks directly.

Problem sizes here are tiny (an enrollment trains on a few dozen rows),
so the full kernel matrix is precomputed and each iteration is a couple
of vectorized passes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from tapmein.errors import TapmeinError


class SingleClassTraining(TapmeinError):
    """Training data contains only one label."""


class DimensionMismatch(TapmeinError):
    """Scoring input has the wrong number of features."""


class NoConvergenceWarning(RuntimeWarning):
    """Iteration cap hit before the duality gap closed; model returned anyway."""


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: support vectors, dual coefficients and bias.

    ``dual_coef[i]`` is alpha_i * y_i, so the decision function is
    ``sum_i dual_coef[i] * K(sv_i, x) + bias``. ``converged`` is False
    when the solver stopped at its iteration cap.
    """

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    kernel: str
    gamma: Optional[float]
    c: float
    converged: bool = True
    n_iter: int = 0

    def __post_init__(self):
        for name in ("support_vectors", "dual_coef"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if len(self.support_vectors) < 1:
            raise ValueError("a trained model needs at least one support vector")

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]


def _kernel(kind: str, gamma: Optional[float], A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kind!r}")


def train_svm(
    X,
    y,
    c: float = 1.0,
    kernel: str = "rbf",
    gamma: Optional[float] = None,
    tol: float = 1e-3,
    max_iter: Optional[int] = None,
) -> SvmModel:
    """Train on rows X with labels y in {-1, +1}.

    ``gamma`` defaults to 1/n_features for the RBF kernel and is ignored
    for the linear kernel. If the iteration cap is reached first, the
    current model is returned with ``converged=False`` and a
    ``NoConvergenceWarning`` is emitted.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if X.ndim != 2 or X.shape[0] != n or n < 2:
        raise ValueError(f"need matching X rows and labels, n >= 2; got {X.shape} vs {n}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise SingleClassTraining("training data contains a single class")
    if kernel == "rbf" and gamma is None:
        gamma = 1.0 / X.shape[1]
    if max_iter is None:
        max_iter = 10_000 + 100 * n

    K = _kernel(kernel, gamma, X, X)
    Kdiag = np.diag(K).copy()
    alpha = np.zeros(n)
    grad = np.full(n, -1.0)  # gradient of the dual objective at alpha = 0
    pos = y > 0

    it = 0
    converged = False
    m_val = M_val = 0.0
    while it < max_iter:
        # violation measure q_i = -y_i * grad_i; optimal iff
        # max over "can increase" <= min over "can decrease".
        q = -y * grad
        can_up = (pos & (alpha < c)) | (~pos & (alpha > 0))
        can_down = (pos & (alpha > 0)) | (~pos & (alpha < c))
        if not can_up.any() or not can_down.any():
            converged = True
            break
        q_up = np.where(can_up, q, -np.inf)
        q_down = np.where(can_down, q, np.inf)
        i = int(np.argmax(q_up))
        j = int(np.argmin(q_down))
        m_val = q_up[i]
        M_val = q_down[j]
        if m_val - M_val <= tol:
            converged = True
            break

        eta = Kdiag[i] + Kdiag[j] - 2.0 * K[i, j]
        step = (m_val - M_val) / max(eta, 1e-12)
        # box limits along the feasible direction (alpha_i moves by y_i*t,
        # alpha_j by -y_j*t)
        limit_i = (c - alpha[i]) if pos[i] else alpha[i]
        limit_j = alpha[j] if pos[j] else (c - alpha[j])
        step = min(step, limit_i, limit_j)

        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        grad += step * y * (K[:, i] - K[:, j])
        it += 1

    if not converged:
        warnings.warn(
            f"SMO stopped at iteration cap {max_iter} with gap "
            f"{m_val - M_val:.3g} > tol {tol:.3g}",
            NoConvergenceWarning,
        )
    bias = _solve_bias(alpha, y, grad, c)

    np.clip(alpha, 0.0, c, out=alpha)
    sv = alpha > 1e-10
    if not sv.any():
        sv = alpha > 0
    if not sv.any():
        raise SingleClassTraining("solver produced no support vectors")
    return SvmModel(
        support_vectors=X[sv],
        dual_coef=alpha[sv] * y[sv],
        bias=float(bias),
        kernel=kernel,
        gamma=gamma if kernel == "rbf" else None,
        c=float(c),
        converged=converged,
        n_iter=it,
    )


def _solve_bias(alpha, y, grad, c) -> float:
    # Midpoint of the feasible bias interval; keeps every KKT violation
    # within half the final duality gap.
    q = -y * grad
    pos = y > 0
    can_up = (pos & (alpha < c)) | (~pos & (alpha > 0))
    can_down = (pos & (alpha > 0)) | (~pos & (alpha < c))
    if can_up.any() and can_down.any():
        return 0.5 * (float(q[can_up].max()) + float(q[can_down].min()))
    if can_up.any():
        return float(q[can_up].max())
    if can_down.any():
        return float(q[can_down].min())
    return 0.0


def svm_score(model: SvmModel, x) -> float:
    """Decision value for one feature vector; higher reads more genuine."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_features,):
        raise DimensionMismatch(
            f"expected {model.n_features} features, got shape {x.shape}"
        )
    k = _kernel(model.kernel, model.gamma, model.support_vectors, x[None, :])
    return float(model.dual_coef @ k[:, 0] + model.bias)
