"""
Binary logistic regression trained by deterministic full-batch gradient descent.

Features are standardized with train-set statistics; the objective is the
mean binary cross-entropy plus (l2 / 2) * ||w||^2.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from core.exceptions import FilterConfigError
from models.schemas import LogRegHyper


logger = logging.getLogger(__name__)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -z))


def logistic_loss_and_grad(
    x: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float, l2: float
) -> Tuple[float, np.ndarray, float]:
    """
    Regularized cross-entropy and its analytic gradient.

    Args:
        x: Standardized design matrix (N x D)
        y: Labels in {0, 1}
        weights: Weight vector (D)
        bias: Intercept
        l2: L2 strength (intercept is not regularized)

    Returns:
        (loss, gradient w.r.t. weights, gradient w.r.t. bias)
    """
    z = x @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * weights @ weights)
    residual = _sigmoid(z) - y
    grad_w = x.T @ residual / x.shape[0] + l2 * weights
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


class LinearModel(BaseModel):
    """
    Trained logistic regression model.

    Args:
        weights: Weight per feature id
        bias: Intercept
        mean: Train-set feature means used for standardization
        scale: Train-set feature standard deviations (1 where constant)
        hyper: Hyperparameters the model was trained with
        constant_class: Set when training saw a single class
        metadata: Training facts (final loss, epochs, sizes)
    """
    weights: List[float] = Field(..., description="Weight per feature id")
    bias: float = Field(0.0, description="Intercept")
    mean: List[float] = Field(..., description="Standardization means")
    scale: List[float] = Field(..., description="Standardization scales")
    hyper: LogRegHyper = Field(default_factory=LogRegHyper)
    constant_class: Optional[int] = Field(None, description="Single class seen in training")
    metadata: Dict[str, Any] = Field(default_factory=dict, description="Training facts")

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != len(self.weights):
            raise FilterConfigError(
                f"expected {len(self.weights)} features, got {x.shape[1]}",
                field_errors={"features": "width mismatch"},
            )
        standardized = (x - np.asarray(self.mean)) / np.asarray(self.scale)
        return standardized @ np.asarray(self.weights) + self.bias

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        if self.constant_class is not None:
            return np.full(x.shape[0], float(self.constant_class))
        return _sigmoid(self.decision_function(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        if self.constant_class is not None:
            return np.full(x.shape[0], self.constant_class, dtype=np.int64)
        return (self.decision_function(x) >= 0.0).astype(np.int64)


def train_logreg(x: np.ndarray, y: np.ndarray, hyper: Optional[LogRegHyper] = None) -> LinearModel:
    """
    Fit a logistic regression model.

    Args:
        x: Design matrix (N x D), raw feature values
        y: Labels in {0, 1}
        hyper: Hyperparameters (defaults: l2=1e-4, lr=0.5, 500 epochs)

    Returns:
        LinearModel; with a single class present the model predicts that
        class and records it in ``constant_class``

    Raises:
        FilterConfigError: If the inputs are empty or misaligned
    """
    hyper = hyper or LogRegHyper()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[0] != y.shape[0]:
        raise FilterConfigError(
            "training data must be a non-empty matrix aligned with its labels",
            field_errors={"x": f"shape {x.shape}", "y": f"shape {y.shape}"},
        )

    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale == 0.0] = 1.0

    classes = np.unique(y)
    if classes.shape[0] < 2:
        constant = int(classes[0])
        logger.warning(f"Single-class training set ({x.shape[0]} items); predicting constant {constant}")
        return LinearModel(
            weights=[0.0] * x.shape[1],
            bias=0.0,
            mean=mean.tolist(),
            scale=scale.tolist(),
            hyper=hyper,
            constant_class=constant,
            metadata={"single_class": True, "train_size": int(x.shape[0])},
        )

    standardized = (x - mean) / scale
    weights = np.zeros(x.shape[1])
    bias = 0.0
    loss = float("nan")
    for _ in range(hyper.epochs):
        loss, grad_w, grad_b = logistic_loss_and_grad(standardized, y, weights, bias, hyper.l2)
        weights -= hyper.learning_rate * grad_w
        bias -= hyper.learning_rate * grad_b

    return LinearModel(
        weights=weights.tolist(),
        bias=bias,
        mean=mean.tolist(),
        scale=scale.tolist(),
        hyper=hyper,
        metadata={"final_loss": loss, "train_size": int(x.shape[0]), "epochs": hyper.epochs},
    )
