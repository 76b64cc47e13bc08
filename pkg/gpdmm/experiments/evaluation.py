"""
Test-set evaluation: classify each prefix, generate the remainder, score both.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence as Seq

import numpy as np

from gpdmm.data.dataset import Dataset
from gpdmm.exceptions import DegenerateClassError, DegenerateTrajectoryError, ShapeError, TooShortError, WindowError
from gpdmm.gp.mixture import TrainedGPDMM, classify_latent, generate_from_latent, prefix_length, project
from gpdmm.metrics import class_normalizer, dampening, f1_score, frechet_avg, ldj_ratio, per_class_f1
from gpdmm.models.reports import ClassMetrics, MetricsReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SequenceOutcome:
    """What happened to one test sequence"""

    index: int
    truth: int
    predicted: int
    posterior: np.ndarray
    prefix: np.ndarray
    remainder: np.ndarray
    generated: np.ndarray
    projected: np.ndarray

    @property
    def correct(self) -> bool:
        return self.truth == self.predicted


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def run_sequences(model: TrainedGPDMM, dataset: Dataset, indices: Seq[int], prefix_fraction: float,
                  oracle_class: bool = False) -> List[SequenceOutcome]:
    """
    Classify and continue every selected sequence.

    With ``oracle_class`` the true class drives generation and every
    sequence counts as correctly classified.
    """
    if dataset.D != model.D:
        raise ShapeError(f"El dataset tiene D={dataset.D}, el modelo espera D={model.D}")
    outcomes = []
    for idx in indices:
        seq = dataset.sequences[idx]
        if seq.class_label not in model.class_labels:
            raise ShapeError(f"{seq.source_id}: clase '{seq.class_label}' ausente del modelo")
        truth = model.class_labels.index(seq.class_label)
        T = prefix_length(seq.length, prefix_fraction, model.order)
        prefix, remainder = seq.values[:T], seq.values[T:]
        X_star = project(model, prefix).X
        _, posterior, predicted = classify_latent(model, X_star)
        if oracle_class:
            predicted = truth
        generated = generate_from_latent(model, X_star, predicted, remainder.shape[0])
        logger.debug(f"{seq.source_id}: T={T}, verdad={truth}, predicha={predicted}")
        outcomes.append(SequenceOutcome(index=idx, truth=truth, predicted=predicted, posterior=posterior,
                                        prefix=prefix, remainder=remainder, generated=generated,
                                        projected=X_star))
    return outcomes


def score_outcomes(model: TrainedGPDMM, dataset: Dataset, outcomes: List[SequenceOutcome],
                   prefix_fraction: float, window: Optional[int] = None) -> MetricsReport:
    """
    Aggregate outcomes into a MetricsReport.

    Generation metrics only use correctly classified sequences: a mean over
    each class's pairs, then a mean over the classes that have any.
    """
    if not outcomes:
        raise TooShortError("No hay secuencias de prueba que evaluar")
    warnings: List[str] = []
    labels = model.class_labels
    truths = [o.truth for o in outcomes]
    predictions = [o.predicted for o in outcomes]
    f1 = f1_score(predictions, truths)
    f1_by_class = per_class_f1(predictions, truths, model.A)

    present = sorted(set(truths))
    class_sequences = {labels[c]: [dataset.sequences[o.index].values for o in outcomes if o.truth == c]
                       for c in present}
    pairs = {labels[c]: [(o.generated, o.remainder) for o in outcomes if o.truth == c and o.correct]
             for c in present}

    # classes whose normalizer is degenerate drop out of D_avg
    usable_sequences, usable_pairs = {}, {}
    for label in class_sequences:
        try:
            class_normalizer(class_sequences[label])
        except DegenerateClassError as e:
            warnings.append(f"clase '{label}': {e}")
            continue
        usable_sequences[label] = class_sequences[label]
        usable_pairs[label] = pairs[label]
    if usable_sequences:
        d_avg = frechet_avg(usable_pairs, usable_sequences)
    else:
        d_avg = None
    excluded = [label for label in class_sequences if d_avg is None or label not in d_avg.per_class]

    damp_by_class: Dict[str, float] = {}
    ldj_by_class: Dict[str, float] = {}
    for label, class_pairs in pairs.items():
        damp_values, ldj_values = [], []
        for generated, remainder in class_pairs:
            try:
                damp_values.append(dampening(remainder, generated, window))
            except WindowError as e:
                warnings.append(f"clase '{label}': {e}")
            try:
                ldj_values.append(ldj_ratio(remainder, generated, dataset.dt))
            except (DegenerateTrajectoryError, TooShortError) as e:
                warnings.append(f"clase '{label}': {e}")
        if damp_values:
            damp_by_class[label] = float(np.mean(damp_values))
        if ldj_values:
            ldj_by_class[label] = float(np.mean(ldj_values))

    per_class = {}
    for c in present:
        label = labels[c]
        per_class[label] = ClassMetrics(
            label=label,
            test_count=sum(1 for t in truths if t == c),
            correct_count=len(pairs[label]),
            f1=float(f1_by_class[c]),
            frechet_avg=d_avg.per_class.get(label) if d_avg is not None else None,
            dampening_ratio=damp_by_class.get(label),
            ldj_ratio=ldj_by_class.get(label),
        )
    frechet_value = d_avg.value if d_avg is not None else None
    if frechet_value is None:
        warnings.append("D_avg indefinido: ninguna secuencia correctamente clasificada")
    lengths = [o.prefix.shape[0] for o in outcomes]
    report = MetricsReport(
        f1_macro=f1,
        frechet_avg=frechet_value,
        dampening_ratio=_mean(list(damp_by_class.values())),
        ldj_ratio=_mean(list(ldj_by_class.values())),
        per_class=per_class,
        excluded_classes=excluded,
        test_count=len(outcomes),
        prefix_length=int(max(lengths)),
        prefix_fraction=prefix_fraction,
        warnings=warnings,
    )
    for warning in warnings:
        logger.warning(f"⚠️  {warning}")
    return report


def evaluate(model: TrainedGPDMM, dataset: Dataset, indices: Seq[int], prefix_fraction: float,
             window: Optional[int] = None, oracle_class: Optional[bool] = None):
    """
    Evaluate a model on the given sequences.

    ``oracle_class`` defaults to True for pooled models, whose single expert
    carries no class information.

    Returns:
        tuple: (MetricsReport, list of SequenceOutcome)
    """
    if oracle_class is None:
        oracle_class = model.pooled
    outcomes = run_sequences(model, dataset, indices, prefix_fraction, oracle_class=oracle_class)
    report = score_outcomes(model, dataset, outcomes, prefix_fraction, window)
    d_text = f"{report.frechet_avg:.4f}" if report.frechet_avg is not None else "n/d"
    logger.info(f"📊 Evaluación: F1={report.f1_macro:.4f}, D_avg={d_text}, "
                f"{report.test_count} secuencias, prefijo {report.prefix_length}")
    return report, outcomes


def validation_key(report: MetricsReport) -> tuple:
    """Higher is better: F1 first, then lower D_avg"""
    d = report.frechet_avg if report.frechet_avg is not None else float("inf")
    return report.f1_macro, -d

