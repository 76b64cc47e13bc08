"""
Classification score
"""
from typing import Sequence

import numpy as np
from sklearn.metrics import f1_score as _sk_f1

from gpdmm.exceptions import UsageError


def f1_score(predictions: Sequence[int], truths: Sequence[int]) -> float:
    """
    Macro F1 over the classes present in ``truths``; a class never predicted
    correctly contributes 0.

    Raises:
        UsageError: If the inputs are empty or differ in length
    """
    predictions = np.asarray(predictions, dtype=int)
    truths = np.asarray(truths, dtype=int)
    if predictions.shape != truths.shape:
        raise UsageError(f"Longitudes distintas: {predictions.size} predicciones, {truths.size} verdades")
    if truths.size == 0:
        raise UsageError("f1_score necesita al menos una muestra")
    labels = np.unique(truths)
    return float(_sk_f1(truths, predictions, labels=labels, average="macro", zero_division=0))


def per_class_f1(predictions: Sequence[int], truths: Sequence[int], n_classes: int) -> np.ndarray:
    predictions = np.asarray(predictions, dtype=int)
    truths = np.asarray(truths, dtype=int)
    return _sk_f1(truths, predictions, labels=np.arange(n_classes), average=None, zero_division=0)
