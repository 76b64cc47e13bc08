"""
Seeded random search over the latent/kernel/FITC space, scored by MCCV.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from gpdmm.data.dataset import Dataset
from gpdmm.exceptions import GPDMMError, UsageError
from gpdmm.experiments.mccv import run_mccv
from gpdmm.models.reports import LeaderboardEntry
from gpdmm.models.run_config import RunConfig, SearchSpace

logger = logging.getLogger(__name__)


def _log_uniform(rng: np.random.Generator, bounds) -> float:
    lo, hi = bounds
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def sample_candidates(space: SearchSpace, budget: int, seed: int) -> List[Dict[str, Any]]:
    """
    Draw `budget` parameter sets. The same (space, budget, seed) always
    yields the same list.

    Raises:
        UsageError: If any axis of the space is empty
    """
    empty = space.empty_axes()
    if empty:
        raise UsageError(f"Espacio de búsqueda vacío en: {', '.join(empty)}")
    rng = np.random.default_rng(seed)
    candidates = []
    for _ in range(budget):
        candidates.append({
            "fourier_order": space.fourier_order[rng.integers(len(space.fourier_order))],
            "reduction_dims": space.reduction_dims[rng.integers(len(space.reduction_dims))],
            "markov_order": space.markov_order[rng.integers(len(space.markov_order))],
            "include_constant": space.include_constant[rng.integers(len(space.include_constant))],
            "emission_variance_scale": _log_uniform(rng, space.emission_variance_scale),
            "dynamics_variance_scale": _log_uniform(rng, space.dynamics_variance_scale),
            "fitc_inducing": space.fitc_inducing[rng.integers(len(space.fitc_inducing))],
        })
    return candidates


def apply_candidate(config: RunConfig, params: Dict[str, Any]) -> RunConfig:
    latent = config.latent.model_copy(update={
        "fourier_order": int(params["fourier_order"]),
        "reduction_dims": int(params["reduction_dims"]),
        "markov_order": int(params["markov_order"]),
        "include_constant": bool(params["include_constant"]),
    })
    train = config.train.model_copy(update={
        "emission_variance_scale": params["emission_variance_scale"],
        "dynamics_variance_scale": params["dynamics_variance_scale"],
        "fitc_inducing": params["fitc_inducing"],
        "workers": 1,
    })
    return config.model_copy(update={"latent": latent, "train": train, "workers": 1})


def _candidate_job(args) -> LeaderboardEntry:
    dataset, config, index, params = args
    numeric = {k: (None if v is None else float(v)) for k, v in params.items()}
    try:
        _, summary = run_mccv(dataset, apply_candidate(config, params), workers=1)
    except GPDMMError as e:
        logger.warning(f"⚠️  Candidato {index} descartado: {e}")
        return LeaderboardEntry(candidate=index, params=numeric, error=str(e))
    return LeaderboardEntry(
        candidate=index,
        params=numeric,
        validation_f1=summary.validation["f1_macro"].mean,
        validation_frechet=summary.validation["frechet_avg"].mean,
        test_f1=summary.test["f1_macro"].mean,
        test_frechet=summary.test["frechet_avg"].mean,
    )


def _rank_key(entry: LeaderboardEntry) -> Tuple[float, float, int]:
    f1 = entry.validation_f1 if entry.validation_f1 is not None else -1.0
    d = entry.validation_frechet if entry.validation_frechet is not None else float("inf")
    return -f1, d, entry.candidate


def run_search(dataset: Dataset, config: RunConfig, out_dir: Optional[Path] = None,
               workers: Optional[int] = None) -> Tuple[List[LeaderboardEntry], RunConfig]:
    """
    Score every sampled candidate by its mean MCCV validation F1, ties broken
    by lower validation D_avg, and return the ranked leaderboard with the
    winning configuration.

    Writes ``leaderboard.json`` and ``best_config.json`` under `out_dir`.
    """
    workers = config.workers if workers is None else workers
    candidates = sample_candidates(config.search, config.budget, config.seed)
    logger.info(f"🔎 Búsqueda aleatoria: {len(candidates)} candidatos, {config.iterations} iteraciones MCCV cada uno")
    jobs = [(dataset, config, i, params) for i, params in enumerate(candidates)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_candidate_job, jobs))
    else:
        entries = [_candidate_job(job) for job in jobs]

    ranked = sorted(entries, key=_rank_key)
    ranked = [entry.model_copy(update={"rank": rank}) for rank, entry in enumerate(ranked, start=1)]
    if all(entry.error is not None for entry in ranked):
        raise UsageError("Ningún candidato de la búsqueda pudo evaluarse")
    best = ranked[0]
    best_config = apply_candidate(config, candidates[best.candidate])

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = "[\n" + ",\n".join(e.model_dump_json(indent=2) for e in ranked) + "\n]\n"
        (out_dir / "leaderboard.json").write_text(payload, encoding="utf-8", newline="\n")
        (out_dir / "best_config.json").write_text(best_config.model_dump_json(indent=2) + "\n",
                                                  encoding="utf-8", newline="\n")
    logger.info(f"🏆 Mejor candidato {best.candidate}: F1 validación {best.validation_f1}, "
                f"D_avg {best.validation_frechet}")
    return ranked, best_config
