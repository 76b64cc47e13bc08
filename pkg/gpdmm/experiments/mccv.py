"""
Monte Carlo cross-validation with validation-based early stopping.

Each iteration draws a fresh split (one training sequence per class),
trains while tracking the validation score after every round, keeps the
best snapshot and evaluates it on the test sequences.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from gpdmm.data.dataset import Dataset
from gpdmm.data.io import mccv_split
from gpdmm.exceptions import UsageError
from gpdmm.experiments.evaluation import evaluate, validation_key
from gpdmm.gp.mixture import TrainedGPDMM, sparsify, train
from gpdmm.models.reports import AggregateReport, IterationReport, MetricsReport, MetricSummary
from gpdmm.models.run_config import RunConfig

logger = logging.getLogger(__name__)

METRICS = ("f1_macro", "frechet_avg", "dampening_ratio", "ldj_ratio")


class _BestRound:
    """Keeps the best validated snapshot and signals when patience runs out"""

    def __init__(self, dataset: Dataset, indices: List[int], config: RunConfig):
        self.dataset = dataset
        self.indices = indices
        self.config = config
        self.best: Optional[Tuple[tuple, int, TrainedGPDMM, MetricsReport]] = None
        self.stale = 0
        self.last_round = 0

    def offer(self, round_index: int, model: TrainedGPDMM) -> bool:
        report, _ = evaluate(model, self.dataset, self.indices, self.config.prefix_fraction,
                             self.config.dampening_window)
        key = validation_key(report)
        if self.best is None or key > self.best[0]:
            self.best = (key, round_index, model, report)
            self.stale = 0
        else:
            self.stale += 1
        return self.stale >= self.config.patience

    def __call__(self, round_index: int, model: TrainedGPDMM) -> bool:
        self.last_round = round_index
        stop = self.offer(round_index, model)
        if stop:
            logger.info(f"⏹️  Parada temprana: {self.stale} rondas sin mejora (mejor ronda {self.best[1]})")
        return stop


def run_iteration(dataset: Dataset, config: RunConfig, iteration: int) -> Tuple[IterationReport, TrainedGPDMM]:
    """
    One MCCV resample with seed ``config.seed + iteration``.

    Raises:
        UsageError: If no validation sequences are requested
        SplitError: If a class is too small for the split
    """
    if config.n_validation < 1:
        raise UsageError("MCCV necesita al menos una secuencia de validación por clase")
    seed = config.seed + iteration
    split = mccv_split(dataset, seed, config.n_validation, config.n_test)
    logger.info(f"🔁 Iteración MCCV {iteration} (semilla {seed}): {len(split.train)} entrenamiento, "
                f"{len(split.validation)} validación, {len(split.test)} prueba")
    options = config.train.model_copy(update={"fitc_inducing": None})
    tracker = _BestRound(dataset, split.validation, config)
    final = train(dataset.subset(split.train), config.latent, options, on_round=tracker)
    tracker.offer(tracker.last_round + 1, final)

    _, best_round, model, validation = tracker.best
    if config.train.fitc_inducing is not None:
        model = sparsify(model, config.train.fitc_inducing, config.train.fitc_steps)
    test, _ = evaluate(model, dataset, split.test, config.prefix_fraction, config.dampening_window)
    report = IterationReport(iteration=iteration, seed=seed, best_round=best_round,
                             rounds_run=tracker.last_round, validation_score=validation.f1_macro,
                             validation=validation, test=test)
    return report, model


def _iteration_job(args) -> IterationReport:
    dataset, config, iteration = args
    return run_iteration(dataset, config, iteration)[0]


def summarize(values: List[Optional[float]]) -> MetricSummary:
    finite = [v for v in values if v is not None and np.isfinite(v)]
    if not finite:
        return MetricSummary(count=0)
    std = float(np.std(finite, ddof=1)) if len(finite) > 1 else 0.0
    return MetricSummary(mean=float(np.mean(finite)), std=std, count=len(finite))


def aggregate(reports: List[IterationReport]) -> AggregateReport:
    """Mean +- standard deviation of every metric across iterations"""
    return AggregateReport(
        iterations=len(reports),
        validation_score=summarize([r.validation_score for r in reports]),
        test={m: summarize([getattr(r.test, m) for r in reports]) for m in METRICS},
        validation={m: summarize([getattr(r.validation, m) for r in reports]) for m in METRICS},
        best_rounds=[r.best_round for r in reports],
    )


def run_mccv(dataset: Dataset, config: RunConfig, out_dir: Optional[Path] = None,
             workers: Optional[int] = None) -> Tuple[List[IterationReport], AggregateReport]:
    """
    Run ``config.iterations`` resamples, in parallel processes when workers > 1.

    Reports are written to ``out_dir/iteration_XX.json`` and
    ``out_dir/aggregate.json`` when a directory is given; results are
    ordered by iteration regardless of completion order.
    """
    workers = config.workers if workers is None else workers
    jobs = [(dataset, config, i) for i in range(config.iterations)]
    if workers > 1 and len(jobs) > 1:
        single = config.model_copy(update={"train": config.train.model_copy(update={"workers": 1})})
        jobs = [(dataset, single, i) for i in range(config.iterations)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_iteration_job, jobs))
    else:
        reports = [_iteration_job(job) for job in jobs]
    summary = aggregate(reports)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for report in reports:
            (out_dir / f"iteration_{report.iteration:02d}.json").write_text(
                report.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
        (out_dir / "aggregate.json").write_text(summary.model_dump_json(indent=2) + "\n",
                                                encoding="utf-8", newline="\n")
    f1 = summary.test["f1_macro"]
    logger.info(f"✅ MCCV completo: F1 prueba {f1.mean:.4f} ± {f1.std:.4f} en {summary.iterations} iteraciones")
    return reports, summary


def summary_table(summary: AggregateReport) -> Dict[str, str]:
    """metric -> 'mean ± sd' text for the CLI"""
    out = {}
    for name, s in summary.test.items():
        out[name] = "n/d" if s.mean is None else f"{s.mean:.4f} ± {s.std:.4f}"
    return out
